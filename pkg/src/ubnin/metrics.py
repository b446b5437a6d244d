"""Graph-theoretic metrics on binary networks.

Clustering coefficient, characteristic path length, degree-preserving
rewiring, and the small-world index against rewired references. All
functions are pure; the stochastic ones take explicit seeds and derive one
independent stream per random reference, so results do not depend on how the
reference computations are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotEstimableError, UndefinedMetricError, ValidationError
from .graphs import BinaryNetwork, edge_count

__all__ = [
    "nodal_clustering",
    "mean_clustering",
    "characteristic_path_length",
    "random_reference",
    "small_world_index",
    "SmallWorldResult",
    "MetricsReport",
    "metrics_report",
]


def nodal_clustering(b: BinaryNetwork) -> np.ndarray:
    """Clustering coefficient of every node.

    Parameters
    ----------
    b : BinaryNetwork
        Undirected binary network.

    Returns
    -------
    c : (n,) np.ndarray
        Per-node coefficients 2*t / (k*(k-1)), where k is the node's degree
        and t the number of edges among its neighbors. Nodes of degree < 2
        get 0. Values lie in [0, 1].
    """
    a = b.edges.astype(np.float64)
    deg = a.sum(axis=1)
    triangles = ((a @ a) * a).sum(axis=1) / 2.0
    c = np.zeros(b.n)
    connected = deg >= 2
    c[connected] = 2.0 * triangles[connected] / (deg[connected] * (deg[connected] - 1.0))
    return c


def mean_clustering(b: BinaryNetwork) -> float:
    """Arithmetic mean of nodal clustering over all nodes, isolated nodes as 0."""
    return float(nodal_clustering(b).mean())


def characteristic_path_length(b: BinaryNetwork) -> tuple[float, float]:
    """Mean shortest-path distance over reachable node pairs.

    Runs breadth-first search from every node. Unreachable pairs are excluded
    from the mean; the fraction of reachable ordered pairs is returned
    alongside so sparse or fragmented networks are explicit about coverage.

    Returns
    -------
    length : float
        Mean distance over reachable ordered pairs.
    reachable_pair_fraction : float
        Reachable ordered pairs divided by n*(n-1).

    Raises
    ------
    UndefinedMetricError
        If no pair of distinct nodes is reachable (edgeless network).
    """
    e = b.edges
    n = b.n
    total = 0
    reachable = 0
    for src in range(n):
        visited = np.zeros(n, dtype=bool)
        visited[src] = True
        frontier = visited.copy()
        dist = 0
        while True:
            nxt = e[frontier].any(axis=0) & ~visited
            if not nxt.any():
                break
            dist += 1
            cnt = int(nxt.sum())
            total += dist * cnt
            reachable += cnt
            visited |= nxt
            frontier = nxt
    if reachable == 0:
        raise UndefinedMetricError("no reachable node pairs; path length is undefined")
    return total / reachable, reachable / (n * (n - 1))


def random_reference(b: BinaryNetwork, seed, swaps_per_edge: int = 10) -> BinaryNetwork:
    """Degree-preserving randomization by repeated double-edge swaps.

    Attempts ``swaps_per_edge * edge_count`` swaps of edge pairs (a,b), (c,d)
    into (a,d), (c,b); any attempt that would create a self-loop or duplicate
    edge is rejected and simply counts as an attempt. The degree sequence of
    the output equals the input exactly, and the result is a deterministic
    function of (input, seed, swaps_per_edge).
    """
    m = edge_count(b)
    if m < 2:
        raise ValidationError(f"rewiring needs at least 2 edges, got {m}")
    if swaps_per_edge < 0:
        raise ValueError("swaps_per_edge must be nonnegative")
    rows, cols = np.nonzero(np.triu(b.edges, 1))
    edges = [(int(u), int(v)) for u, v in zip(rows, cols)]
    present = set(edges)
    rng = np.random.default_rng(seed)
    attempts = swaps_per_edge * m
    pair_idx = rng.integers(0, m, size=(attempts, 2))
    flips = rng.integers(0, 2, size=attempts)
    for (i, j), flip in zip(pair_idx, flips):
        if i == j:
            continue
        a, b_ = edges[i]
        c, d = edges[j]
        if flip:
            c, d = d, c
        first = (min(a, d), max(a, d))
        second = (min(c, b_), max(c, b_))
        if a == d or c == b_:
            continue
        if first == second or first in present or second in present:
            continue
        present.discard(edges[i])
        present.discard(edges[j])
        present.add(first)
        present.add(second)
        edges[i] = first
        edges[j] = second
    out = np.zeros((b.n, b.n), dtype=bool)
    for u, v in edges:
        out[u, v] = True
    out |= out.T
    return BinaryNetwork(out, b.labels)


@dataclass(frozen=True)
class SmallWorldResult:
    sigma: float
    gamma: float
    lam: float


def small_world_index(b: BinaryNetwork, n_rand: int = 100, seed: int = 0,
                      swaps_per_edge: int = 10) -> SmallWorldResult:
    """Small-world index against degree-preserving random references.

    gamma is the clustering ratio C / <C_rand>, lam the path-length ratio
    L / <L_rand>, and sigma = gamma / lam; sigma > 1 indicates small-world
    organization. Reference i is generated from the stream (seed, i), so the
    result is independent of evaluation order.

    Raises
    ------
    NotEstimableError
        If any reference has undefined path length or zero clustering, the
        regime reached when the network is too sparse for the comparison.
    """
    if n_rand < 1:
        raise ValueError("n_rand must be >= 1")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    c_obs = mean_clustering(b)
    l_obs, _ = characteristic_path_length(b)
    c_rand = np.empty(n_rand)
    l_rand = np.empty(n_rand)
    for idx in range(n_rand):
        ref = random_reference(b, seed=[seed, idx], swaps_per_edge=swaps_per_edge)
        try:
            l_rand[idx], _ = characteristic_path_length(ref)
        except UndefinedMetricError:
            raise NotEstimableError(
                f"random reference {idx} has undefined path length"
            ) from None
        c_rand[idx] = mean_clustering(ref)
        if c_rand[idx] == 0:
            raise NotEstimableError(f"random reference {idx} has zero clustering")
    gamma = c_obs / float(c_rand.mean())
    lam = l_obs / float(l_rand.mean())
    return SmallWorldResult(sigma=gamma / lam, gamma=gamma, lam=lam)


@dataclass(frozen=True)
class MetricsReport:
    """Flat metric record for one binary network.

    The small-world trio (sigma, gamma, lam) is either fully present or fully
    absent, and sigma always equals gamma / lam. Configuration of the random
    references is echoed so every row is self-describing.
    """

    mean_clustering: float
    nodal_clustering: tuple[float, ...]
    char_path_length: float
    reachable_pair_fraction: float
    mean_degree: float
    small_world_sigma: float | None = None
    gamma: float | None = None
    lam: float | None = None
    n_rand: int | None = None
    swaps_per_edge: int | None = None
    seed: int | None = None

    def __post_init__(self):
        trio = (self.small_world_sigma, self.gamma, self.lam)
        if any(v is None for v in trio) != all(v is None for v in trio):
            raise ValidationError("sigma, gamma, lam must be present together")
        if self.small_world_sigma is not None and self.small_world_sigma != self.gamma / self.lam:
            raise ValidationError("sigma must equal gamma / lam")
        if self.mean_clustering != float(np.mean(self.nodal_clustering)):
            raise ValidationError("mean_clustering must be the mean of nodal_clustering")

    def to_row(self) -> dict:
        """Flat dict for CSV serialization, nodal values omitted."""
        return {
            "mean_clustering": self.mean_clustering,
            "char_path_length": self.char_path_length,
            "reachable_pair_fraction": self.reachable_pair_fraction,
            "mean_degree": self.mean_degree,
            "sigma": self.small_world_sigma,
            "gamma": self.gamma,
            "lambda": self.lam,
            "n_rand": self.n_rand,
            "swaps_per_edge": self.swaps_per_edge,
            "seed": self.seed,
        }


def metrics_report(b: BinaryNetwork, n_rand: int = 100, seed: int = 0,
                   swaps_per_edge: int = 10, small_world: bool = True) -> MetricsReport:
    """Compute the full metric record for one network.

    With ``small_world`` false (or n_rand 0) the sigma/gamma/lam fields stay
    empty; otherwise NotEstimableError propagates when references fail.
    """
    nodal = nodal_clustering(b)
    length, reach = characteristic_path_length(b)
    sw = None
    if small_world and n_rand > 0:
        sw = small_world_index(b, n_rand=n_rand, seed=seed, swaps_per_edge=swaps_per_edge)
    return MetricsReport(
        mean_clustering=float(nodal.mean()),
        nodal_clustering=tuple(float(x) for x in nodal),
        char_path_length=length,
        reachable_pair_fraction=reach,
        mean_degree=2.0 * edge_count(b) / b.n,
        small_world_sigma=None if sw is None else sw.sigma,
        gamma=None if sw is None else sw.gamma,
        lam=None if sw is None else sw.lam,
        n_rand=n_rand if sw is not None else None,
        swaps_per_edge=swaps_per_edge if sw is not None else None,
        seed=seed if sw is not None else None,
    )
