"""Reversible encoding of symmetric binary networks as dyadic rationals.

Every upper-triangle column of the adjacency matrix, read from the diagonal
upward, is an integer code. Folding those codes together with power-of-two
scaling produces one number per network:

    U_2 = D_2,    U_(i+1) = U_i / 2^(i-1) + D_(i+1)    for i = 2 .. n-1

where D_j is the code of column j. Carried out in exact arithmetic the map is
a bijection between n-node binary networks and dyadic rationals m / 2^e with
0 <= m / 2^e < 2^(n-1) and e <= (n-2)(n-1)/2, so the network is recoverable
from the number and the node count alone. All arithmetic here is integer
based and exact at any network size; a separate double-precision emulation
reproduces the behavior of running the same recurrence in binary64, which
caps out at 1024 nodes for complete graphs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import MalformedCodeError
from .graphs import BinaryNetwork, default_labels

__all__ = [
    "ColumnDecimals",
    "UbninCode",
    "column_decimals",
    "matrix_from_column_decimals",
    "encode",
    "decode",
    "to_decimal_string",
    "parse_decimal_string",
    "to_record",
    "from_record",
    "to_float64",
    "encode_float64_emulation",
    "complete_graph_code",
    "max_scale",
]


def _triangular(k: int) -> int:
    return k * (k + 1) // 2


def max_scale(n: int) -> int:
    """Largest canonical power-of-two scale for an n-node code."""
    return _triangular(n - 2) if n >= 3 else 0


@dataclass(frozen=True)
class ColumnDecimals:
    """Per-column integer codes D_2 .. D_n of an adjacency upper triangle.

    ``values[k]`` holds D_(k+2); bit r of D_j (0-based) is the edge between
    nodes r and j-1 in 0-based indexing, so each D_j lies in [0, 2^(j-1)).
    """

    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        n = int(self.n)
        if n < 2:
            raise MalformedCodeError(f"node count must be >= 2, got {n}")
        values = tuple(int(v) for v in self.values)
        if len(values) != n - 1:
            raise MalformedCodeError(f"expected {n - 1} column codes, got {len(values)}")
        for k, v in enumerate(values):
            if not 0 <= v < (1 << (k + 1)):
                raise MalformedCodeError(
                    f"column code {v} out of range [0, {1 << (k + 1)}) at column {k + 2}"
                )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "values", values)


def column_decimals(b: BinaryNetwork) -> ColumnDecimals:
    """Read each upper-triangle column, diagonal upward, as a binary integer.

    The entry nearest the diagonal is the most significant bit, so column j
    (1-based) yields sum over rows r < j of edges(r, j) * 2^(r-1).
    """
    e = b.edges
    vals = []
    for c in range(1, b.n):
        bits = np.packbits(np.ascontiguousarray(e[:c, c]), bitorder="little")
        vals.append(int.from_bytes(bits.tobytes(), "little"))
    return ColumnDecimals(b.n, tuple(vals))


def matrix_from_column_decimals(cd: ColumnDecimals, labels=None) -> BinaryNetwork:
    """Rebuild the adjacency matrix encoded by per-column integer codes."""
    n = cd.n
    e = np.zeros((n, n), dtype=bool)
    for c in range(1, n):
        d = cd.values[c - 1]
        if d:
            raw = np.frombuffer(d.to_bytes((c + 7) // 8, "little"), dtype=np.uint8)
            e[:c, c] = np.unpackbits(raw, bitorder="little")[:c].astype(bool)
    e |= e.T
    return BinaryNetwork(e, labels or default_labels(n))


@dataclass(frozen=True)
class UbninCode:
    """Exact network identifier: the dyadic rational ``numerator / 2**scale``.

    Canonical form (odd numerator, or scale 0) makes structural equality
    coincide with value equality at a fixed node count. Construction rejects
    non-canonical or bound-violating codes.
    """

    n: int
    numerator: int
    scale: int

    def __post_init__(self):
        n, num, e = int(self.n), int(self.numerator), int(self.scale)
        if n < 2:
            raise MalformedCodeError(f"node count must be >= 2, got {n}")
        if num < 0:
            raise MalformedCodeError("numerator must be nonnegative")
        if e < 0:
            raise MalformedCodeError("scale must be nonnegative")
        if e > 0 and num % 2 == 0:
            raise MalformedCodeError("non-canonical code: even numerator with nonzero scale")
        if num >= (1 << (n - 1 + e)):
            raise MalformedCodeError(f"value >= 2^{n - 1}, out of range for {n} nodes")
        if e > max_scale(n):
            raise MalformedCodeError(
                f"scale {e} exceeds bound {max_scale(n)} for {n} nodes"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "scale", e)

    @classmethod
    def canonical(cls, n: int, numerator: int, scale: int) -> "UbninCode":
        """Construct after stripping shared factors of two."""
        numerator, scale = int(numerator), int(scale)
        if numerator == 0:
            scale = 0
        elif scale > 0:
            shift = min((numerator & -numerator).bit_length() - 1, scale)
            numerator >>= shift
            scale -= shift
        return cls(n, numerator, scale)

    @property
    def value(self) -> Fraction:
        """The encoded value as an exact fraction."""
        return Fraction(self.numerator, 1 << self.scale)

    def __str__(self):
        return to_decimal_string(self)


def encode(b: BinaryNetwork) -> UbninCode:
    """Encode a binary network into its exact dyadic-rational identifier.

    Runs the folding recurrence in integer arithmetic, tracking the value as
    numerator / 2^scale, then strips factors of two for the canonical form.
    Exact at every network size.
    """
    cd = column_decimals(b)
    num = cd.values[0]
    e = 0
    for i in range(2, b.n):
        e += i - 1
        num += cd.values[i - 1] << e
    # 0 <= value < 2^(n-1), and the integer part is exactly the last column code
    assert num < (1 << (b.n - 1 + e))
    assert num >> e == cd.values[-1]
    return UbninCode.canonical(b.n, num, e)


def decode(code: UbninCode, labels=None) -> BinaryNetwork:
    """Reconstruct the binary network encoded by ``code``.

    Peels columns from the last node down: the integer part of the running
    value is that column's code, and the remainder is rescaled by 2^(j-2) to
    expose the next one. Inverse of :func:`encode` for every valid network.
    """
    n = code.n
    num, e = code.numerator, code.scale
    values = [0] * (n - 1)
    for j in range(n, 2, -1):
        d = num >> e
        if d >= (1 << (j - 1)):
            raise MalformedCodeError(
                f"recovered column code {d} out of range at column {j}; value/n mismatch"
            )
        num = (num - (d << e)) << (j - 2)
        values[j - 2] = d
    if e and num & ((1 << e) - 1):
        raise MalformedCodeError("fractional residue at final column; value/n mismatch")
    d2 = num >> e
    if d2 not in (0, 1):
        raise MalformedCodeError(f"first column code must be 0 or 1, got {d2}")
    values[0] = d2
    return matrix_from_column_decimals(ColumnDecimals(n, tuple(values)), labels)


def to_decimal_string(code: UbninCode) -> str:
    """Exact terminating decimal expansion of the code value.

    A denominator 2^e divides 10^e, so multiplying the numerator by 5^e and
    placing the point e digits from the right is exact. Canonical codes never
    produce trailing fractional zeros; integers render with no point.
    """
    if code.scale == 0:
        return str(code.numerator)
    digits = str(code.numerator * 5 ** code.scale).zfill(code.scale + 1)
    return f"{digits[:-code.scale]}.{digits[-code.scale:]}"


def parse_decimal_string(text: str, n: int) -> UbninCode:
    """Parse a decimal rendering back into a code for an n-node network."""
    text = text.strip()
    int_part, sep, frac_part = text.partition(".")
    if not int_part.isdigit() or (sep and not frac_part.isdigit()):
        raise MalformedCodeError(f"not a nonnegative decimal number: {text!r}")
    k = len(frac_part)
    m = int(int_part + frac_part)
    if k:
        p5 = 5 ** k
        if m % p5:
            raise MalformedCodeError(
                f"{text!r} is not a dyadic rational; it cannot be a network code"
            )
        m //= p5
    return UbninCode.canonical(n, m, k)


def to_record(code: UbninCode) -> dict:
    """Structured form {n, numerator digit string, scale}."""
    return {"n": code.n, "numerator": str(code.numerator), "scale": code.scale}


def from_record(record) -> UbninCode:
    """Parse the structured record form, rejecting non-canonical input."""
    if isinstance(record, (str, bytes)):
        try:
            record = json.loads(record)
        except json.JSONDecodeError as exc:
            raise MalformedCodeError(f"invalid code record: {exc}") from None
    if not isinstance(record, dict):
        raise MalformedCodeError("code record must be a JSON object")
    missing = {"n", "numerator", "scale"} - set(record)
    if missing:
        raise MalformedCodeError(f"code record missing fields: {sorted(missing)}")
    num = record["numerator"]
    if isinstance(num, str):
        if not num.isdigit():
            raise MalformedCodeError(f"numerator must be a digit string, got {num!r}")
        num = int(num)
    if not isinstance(num, int) or isinstance(num, bool):
        raise MalformedCodeError("numerator must be an integer or digit string")
    for key in ("n", "scale"):
        if not isinstance(record[key], int) or isinstance(record[key], bool):
            raise MalformedCodeError(f"{key} must be an integer")
    return UbninCode(record["n"], num, record["scale"])


def to_float64(code: UbninCode) -> float:
    """Nearest-even binary64 rendering of the exact value; overflows to +inf."""
    try:
        return code.numerator / (1 << code.scale)
    except OverflowError:
        return math.inf


def _int_to_float64(x: int) -> float:
    try:
        return float(x)
    except OverflowError:
        return math.inf


def encode_float64_emulation(b: BinaryNetwork) -> float:
    """Run the folding recurrence entirely in binary64.

    Column codes are first rounded to the nearest double, and the scaling
    factor is evaluated as 1 / 2^power with the denominator overflowing to
    +inf (hence a zero factor) past 2^1023. Reproduces the numeric behavior
    of the double-precision pipeline, including non-finite results for
    complete graphs beyond 1024 nodes.
    """
    cd = column_decimals(b)
    u = _int_to_float64(cd.values[0])
    power = 1
    for d in cd.values[1:]:
        denom = 2.0 ** power if power <= 1023 else math.inf
        u = u * (1.0 / denom) + _int_to_float64(d)
        power += 1
    return u


def complete_graph_code(n: int) -> UbninCode:
    """Closed-form code of the complete graph on n nodes.

    Unrolling the recurrence with every column code at its maximum gives
    2^(n-1) - 2^-T where T = (n-2)(n-1)/2, and exactly 1 for n = 2.
    """
    if n < 2:
        raise ValueError(f"node count must be >= 2, got {n}")
    if n == 2:
        return UbninCode(2, 1, 0)
    t = _triangular(n - 2)
    return UbninCode(n, (1 << (n - 1 + t)) - 1, t)
