"""Independent brute-force reference implementations.

Everything here deliberately avoids the code paths of the package under test:
clustering counts neighbor pairs directly, path lengths come from
Floyd-Warshall, the network code is folded with Fraction arithmetic, and
statistics are evaluated in exact rationals or with mpmath.
"""

from __future__ import annotations

import math
from fractions import Fraction


def clustering_brute(edges) -> list[float]:
    """Per-node clustering by enumerating neighbor pairs."""
    n = edges.shape[0]
    out = []
    for i in range(n):
        nbrs = [j for j in range(n) if edges[i, j]]
        k = len(nbrs)
        if k < 2:
            out.append(0.0)
            continue
        linked = sum(
            1
            for a in range(k)
            for b in range(a + 1, k)
            if edges[nbrs[a], nbrs[b]]
        )
        out.append(float(Fraction(2 * linked, k * (k - 1))))
    return out


def cpl_floyd(edges) -> tuple[float, float]:
    """Characteristic path length via Floyd-Warshall over reachable pairs."""
    n = edges.shape[0]
    inf = math.inf
    dist = [[0 if i == j else (1 if edges[i, j] else inf) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik == inf:
                continue
            row_k = dist[k]
            row_i = dist[i]
            for j in range(n):
                alt = dik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    total = 0
    reachable = 0
    for i in range(n):
        for j in range(n):
            if i != j and dist[i][j] != inf:
                total += dist[i][j]
                reachable += 1
    if reachable == 0:
        raise ZeroDivisionError("no reachable pairs")
    return total / reachable, reachable / (n * (n - 1))


def encode_fraction(edges) -> Fraction:
    """Fold the column codes with Fraction arithmetic."""
    n = edges.shape[0]
    decs = []
    for j in range(1, n):
        value = 0
        for r in range(j):
            if edges[r, j]:
                value += 2 ** r
        decs.append(value)
    u = Fraction(decs[0])
    for i, d in enumerate(decs[1:], start=2):
        u = u / 2 ** (i - 1) + d
    return u


def pearson_brute(x, y) -> float:
    """Pearson correlation in exact rational arithmetic, rounded at the end."""
    xs = [Fraction(v) for v in x]
    ys = [Fraction(v) for v in y]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    sxx = sum((a - mx) ** 2 for a in xs)
    syy = sum((b - my) ** 2 for b in ys)
    return float(sxy) / math.sqrt(float(sxx) * float(syy))


def kept_edges_oracle(keep: float, total: int) -> int:
    """round(keep * total), half away from zero, in exact arithmetic."""
    exact = Fraction(keep) * total
    return int(math.floor(exact + Fraction(1, 2)))


def f_statistic_fraction(groups) -> Fraction:
    """One-way ANOVA F statistic in exact rational arithmetic."""
    groups = [[Fraction(v) for v in g] for g in groups]
    sizes = [len(g) for g in groups]
    n = sum(sizes)
    k = len(groups)
    grand = sum(sum(g) for g in groups) / n
    means = [sum(g) / len(g) for g in groups]
    ssb = sum(s * (m - grand) ** 2 for s, m in zip(sizes, means))
    ssw = sum(sum((v - m) ** 2 for v in g) for g, m in zip(groups, means))
    return (ssb / (k - 1)) / (ssw / (n - k))


def f_tail_mpmath(f_value, df_between, df_within, dps=50):
    """Upper-tail F probability with mpmath at high precision."""
    import mpmath as mp

    with mp.workdps(dps):
        x = mp.mpf(df_within) / (df_within + mp.mpf(df_between) * mp.mpf(f_value))
        return mp.betainc(
            mp.mpf(df_within) / 2, mp.mpf(df_between) / 2, 0, x, regularized=True
        )
