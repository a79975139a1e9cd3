"""Exact 1/N characteristics of branch points, Riemann constants and divisor families.

A characteristic [delta; epsilon] stands for the point epsilon + delta Pi of
the Jacobian.  Entries are Fractions reduced to [0, 1).  Within each vector
the g = (N-1)m entries are grouped in N-1 blocks of size m, block s (1-based)
belonging to the differentials du_{k+(s-1)m}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import numpy as np

from .curve import CurveSpec
from .errors import DimensionMismatch, InvalidPartition

FAMILY_M = "M"
FAMILY_M_PLUS_1 = "M_PLUS_1"


def _mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class RationalCharacteristic:
    delta: tuple
    epsilon: tuple

    def __post_init__(self):
        if len(self.delta) != len(self.epsilon):
            raise DimensionMismatch("delta and epsilon must have equal length")
        object.__setattr__(self, "delta", tuple(_mod1(x) for x in self.delta))
        object.__setattr__(self, "epsilon", tuple(_mod1(x) for x in self.epsilon))

    @classmethod
    def zero(cls, g: int) -> "RationalCharacteristic":
        return cls((0,) * g, (0,) * g)

    @property
    def genus(self) -> int:
        return len(self.delta)

    def __add__(self, other):
        return RationalCharacteristic(
            tuple(a + b for a, b in zip(self.delta, other.delta)),
            tuple(a + b for a, b in zip(self.epsilon, other.epsilon)),
        )

    def __neg__(self):
        return RationalCharacteristic(tuple(-a for a in self.delta), tuple(-a for a in self.epsilon))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k: int):
        return RationalCharacteristic(tuple(k * a for a in self.delta), tuple(k * a for a in self.epsilon))

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.delta + self.epsilon)

    def denominators(self) -> set:
        return {x.denominator for x in self.delta + self.epsilon}

    def as_float(self):
        return (np.array([float(x) for x in self.delta]), np.array([float(x) for x in self.epsilon]))

    def centered(self):
        """Float (delta, epsilon) shifted into (-1/2, 1/2]; same point of the Jacobian."""
        d, e = self.as_float()
        return np.where(d > 0.5, d - 1, d), np.where(e > 0.5, e - 1, e)

    def __str__(self):
        top = " ".join(str(x) for x in self.delta)
        bot = " ".join(str(x) for x in self.epsilon)
        return f"[{top}; {bot}]"


@dataclass(frozen=True)
class Partition:
    """Index data of a divisor from family M or M+1.

    I1 collects odd indices from {1,3,..,2m+1}, J1 even ones from {2,4,..,2m+2};
    index 2m+2 is the point at infinity.
    """

    I1: tuple
    J1: tuple
    family: str = FAMILY_M
    i_m: int | None = None
    j_m: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "I1", tuple(sorted(int(i) for i in self.I1)))
        object.__setattr__(self, "J1", tuple(sorted(int(j) for j in self.J1)))

    def validate(self, m: int) -> None:
        I0, J0 = odd_indices(m), even_indices(m)
        if not set(self.I1) <= set(I0) or len(set(self.I1)) != len(self.I1):
            raise InvalidPartition(f"I1={self.I1} is not a subset of {I0}")
        if not set(self.J1) <= set(J0) or len(set(self.J1)) != len(self.J1):
            raise InvalidPartition(f"J1={self.J1} is not a subset of {J0}")
        size = len(self.I1) + len(self.J1)
        if self.family == FAMILY_M:
            if size != m + 1:
                raise InvalidPartition(f"family M needs |I1|+|J1| = {m + 1}, got {size}")
            if self.i_m is not None or self.j_m is not None:
                raise InvalidPartition("family M partitions carry no i_m, j_m")
        elif self.family == FAMILY_M_PLUS_1:
            if size != m - 1:
                raise InvalidPartition(f"family M+1 needs |I1|+|J1| = {m - 1}, got {size}")
            if self.i_m not in I0 or self.i_m in self.I1:
                raise InvalidPartition(f"i_m={self.i_m} must be an odd index outside I1")
            if self.j_m not in J0 or self.j_m in self.J1 or self.j_m == 2 * m + 2:
                raise InvalidPartition(f"j_m={self.j_m} must be a finite even index outside J1")
            if 2 * m + 2 in self.J1:
                raise InvalidPartition("family M+1 partitions exclude infinity from J1")
        else:
            raise InvalidPartition(f"unknown family {self.family!r}")

    def sets(self, m: int) -> dict:
        """Index sets used by the kernel and Thomae formulas.

        Family M: I2 = I0 - I1, J2 = J0 - J1 - {2m+2}.
        Family M+1: I2 = I0 - I1 - {i_m}, J2 = J0 - J1 - {j_m, 2m+2},
        I1' = I1 + {i_m}, J2' = J2 + {j_m}.
        """
        I0, J0 = odd_indices(m), even_indices(m)
        inf = 2 * m + 2
        J1f = tuple(j for j in self.J1 if j != inf)
        if self.family == FAMILY_M:
            I2 = tuple(i for i in I0 if i not in self.I1)
            J2 = tuple(j for j in J0 if j not in self.J1 and j != inf)
            return {"I1": self.I1, "J1": J1f, "I2": I2, "J2": J2}
        I2 = tuple(i for i in I0 if i not in self.I1 and i != self.i_m)
        J2 = tuple(j for j in J0 if j not in self.J1 and j not in (self.j_m, inf))
        return {
            "I1": self.I1, "J1": J1f, "I2": I2, "J2": J2,
            "I1p": tuple(sorted(self.I1 + (self.i_m,))),
            "J2p": tuple(sorted(J2 + (self.j_m,))),
            "i_m": self.i_m, "j_m": self.j_m,
        }

    def complement(self, m: int) -> "Partition":
        """Family M partition of -e: (I0 - I1, J0 - J1)."""
        if self.family != FAMILY_M:
            raise InvalidPartition("complement is defined for family M only")
        I0, J0 = odd_indices(m), even_indices(m)
        return Partition(tuple(i for i in I0 if i not in self.I1), tuple(j for j in J0 if j not in self.J1))

    def label(self) -> str:
        base = f"I1={list(self.I1)} J1={list(self.J1)}"
        if self.family == FAMILY_M_PLUS_1:
            base += f" i_m={self.i_m} j_m={self.j_m}"
        return base


def odd_indices(m: int) -> tuple:
    return tuple(range(1, 2 * m + 2, 2))


def even_indices(m: int) -> tuple:
    return tuple(range(2, 2 * m + 3, 2))


def _spec_dims(spec) -> tuple:
    return spec.N, spec.m


def branch_point_characteristic(spec: CurveSpec, k: int) -> RationalCharacteristic:
    """[U_k], the characteristic of the Abel map from infinity to the branch point P_k.

    Block s (s = 1..N-1) of U_{2j+1}: delta = -1/N in positions j+1..m,
    epsilon = s/N in position j.  Block s of U_{2j}: delta = -1/N in positions
    j..m, epsilon = s/N in position j.  U_{2m+2} (infinity) is zero.
    """
    N, m = _spec_dims(spec)
    g = (N - 1) * m
    if k == 2 * m + 2:
        return RationalCharacteristic.zero(g)
    if not 1 <= k <= 2 * m + 1:
        raise IndexError(f"branch point index {k} out of range 1..{2 * m + 2}")
    j = k // 2
    first_delta = j + 1 if k % 2 == 1 else j
    delta = [Fraction(0)] * g
    eps = [Fraction(0)] * g
    for s in range(1, N):
        off = (s - 1) * m
        for pos in range(first_delta, m + 1):
            delta[off + pos - 1] = Fraction(-1, N)
        if j >= 1:
            eps[off + j - 1] = Fraction(s, N)
    return RationalCharacteristic(tuple(delta), tuple(eps))


def riemann_constant_characteristic(spec: CurveSpec) -> RationalCharacteristic:
    """[K_infinity] = (N-1) * sum_k [U_{2k}]."""
    N, m = _spec_dims(spec)
    total = RationalCharacteristic.zero((N - 1) * m)
    for k in even_indices(m)[:-1]:
        total = total + branch_point_characteristic(spec, k)
    return (N - 1) * total


def _weighted_sum(spec, weights: dict) -> RationalCharacteristic:
    N, m = _spec_dims(spec)
    total = RationalCharacteristic.zero((N - 1) * m)
    for k, w in weights.items():
        if w:
            total = total + w * branch_point_characteristic(spec, k)
    return total


def em_characteristic(spec: CurveSpec, part: Partition) -> RationalCharacteristic:
    """(N-1) sum_{I1 u J1} [U_k] - [K_infinity]."""
    if part.family != FAMILY_M:
        raise InvalidPartition("em_characteristic needs a family M partition")
    part.validate(spec.m)
    N = spec.N
    w = {k: N - 1 for k in part.I1 + part.J1}
    return _weighted_sum(spec, w) - riemann_constant_characteristic(spec)


def em1_characteristic(spec: CurveSpec, part: Partition) -> RationalCharacteristic:
    """(N-1) sum_{I1 u J1} [U_k] + (N-2)[U_{j_m}] + [U_{i_m}] - [K_infinity]."""
    if part.family != FAMILY_M_PLUS_1:
        raise InvalidPartition("em1_characteristic needs a family M+1 partition")
    part.validate(spec.m)
    N = spec.N
    w = {k: N - 1 for k in part.I1 + part.J1}
    w[part.j_m] = w.get(part.j_m, 0) + N - 2
    w[part.i_m] = w.get(part.i_m, 0) + 1
    return _weighted_sum(spec, w) - riemann_constant_characteristic(spec)


def partition_characteristic(spec: CurveSpec, part: Partition) -> RationalCharacteristic:
    if part.family == FAMILY_M:
        return em_characteristic(spec, part)
    return em1_characteristic(spec, part)


def _n3_special(m: int, part: Partition) -> bool:
    # At N=3 the divisor 2(P_{i_1}+..+P_{i_{m-1}}) + P_{i_m} + P_{i_{m+1}} is
    # special exactly when the two simple points share a parity and every
    # double point has the other parity.
    simple = (part.i_m, part.j_m)
    double = part.I1 + part.J1
    if simple[0] % 2 != simple[1] % 2:
        return False
    return all(k % 2 != simple[0] % 2 for k in double)


def enumerate_partitions(spec: CurveSpec, family: str = FAMILY_M) -> list:
    N, m = _spec_dims(spec)
    out = []
    if family == FAMILY_M:
        for combo in combinations(range(1, 2 * m + 3), m + 1):
            out.append(Partition(tuple(k for k in combo if k % 2), tuple(k for k in combo if k % 2 == 0)))
        return out
    if family != FAMILY_M_PLUS_1:
        raise InvalidPartition(f"unknown family {family!r}")
    finite = range(1, 2 * m + 2)
    for combo in combinations(finite, m - 1):
        I1 = tuple(k for k in combo if k % 2)
        J1 = tuple(k for k in combo if k % 2 == 0)
        for i_m in odd_indices(m):
            if i_m in I1:
                continue
            for j_m in even_indices(m)[:-1]:
                if j_m in J1:
                    continue
                part = Partition(I1, J1, FAMILY_M_PLUS_1, i_m, j_m)
                if N == 3 and _n3_special(m, part):
                    continue
                out.append(part)
    return out


def to_vector(char: RationalCharacteristic, periods) -> np.ndarray:
    """epsilon + Pi delta."""
    pi = periods.pi_matrix if hasattr(periods, "pi_matrix") else np.asarray(periods)
    if pi.shape != (char.genus, char.genus):
        raise DimensionMismatch(f"characteristic of length {char.genus} vs period matrix {pi.shape}")
    d, e = char.as_float()
    return e + pi @ d


def characteristic_of_vector(u: np.ndarray, pi: np.ndarray):
    """Real (delta, epsilon) with u = epsilon + Pi delta."""
    u = np.asarray(u, dtype=complex)
    delta = np.linalg.solve(pi.imag, u.imag)
    eps = u.real - pi.real @ delta
    return delta, eps


def mod1_distance(a: Iterable[float], b: Iterable[float]) -> float:
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    d = d - np.round(d)
    return float(np.max(np.abs(d))) if d.size else 0.0


def half_integer_characteristics(g: int):
    """All 2^(2g) characteristics with entries in {0, 1/2}."""
    half = Fraction(1, 2)
    for bits in range(4 ** g):
        d = tuple(half if bits >> i & 1 else Fraction(0) for i in range(g))
        e = tuple(half if bits >> (g + i) & 1 else Fraction(0) for i in range(g))
        yield RationalCharacteristic(d, e)


def is_odd_half(char: RationalCharacteristic) -> bool:
    s = sum(4 * a * b for a, b in zip(char.delta, char.epsilon))
    return int(s) % 2 == 1
