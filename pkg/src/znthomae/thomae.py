"""Thomae-type formulas for theta constants with 1/N characteristics, the
classical hyperelliptic formula, the degeneration limit of det A_s and the
Hutchinson genus-2 reference built on the Gauss hypergeometric function.

Left-hand sides are always theta^{4N} (or theta^8 for the classical form), so
no fractional power of a theta constant is ever taken.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import digamma

from .characteristics import (
    FAMILY_M,
    FAMILY_M_PLUS_1,
    Partition,
    RationalCharacteristic,
    partition_characteristic,
)
from .curve import CurveSpec
from .errors import InvalidPartition, SeriesSlow
from .periods import PeriodData, period_matrix
from .quadrature import QuadratureConfig
from .theta import ThetaTruncation, theta_constant

SERIES_TERMS = 200
SERIES_TOL = 1e-14


# --- Gauss hypergeometric function --------------------------------------------

def _series(a, b, c, t):
    term, total = 1.0 + 0j, 1.0 + 0j
    for n in range(SERIES_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * t
        total += term
        if abs(term) <= SERIES_TOL * abs(total):
            return total
    raise SeriesSlow(f"2F1 series at t={t} not converged after {SERIES_TERMS} terms")


def _log_connection(a, b, t):
    """F(a, b; a+b; t) expanded around t = 1 (the logarithmic case)."""
    s = 1 - t
    pref = math.gamma(a + b) / (math.gamma(a) * math.gamma(b))
    coef, total = 1.0, 0j
    psi1, psia, psib = digamma(1.0), digamma(a), digamma(b)
    log_s = math.log(s)
    for n in range(SERIES_TERMS):
        term = coef * (2 * psi1 - psia - psib - log_s)
        total += term
        if n > 2 and abs(term) <= SERIES_TOL * abs(total):
            return pref * total
        coef *= (a + n) * (b + n) / (n + 1) ** 2 * s
        psi1 += 1 / (n + 1)
        psia += 1 / (a + n)
        psib += 1 / (b + n)
    raise SeriesSlow(f"2F1 connection series at 1-t={s} not converged after {SERIES_TERMS} terms")


def gauss_2f1(a: float, b: float, c: float, t: float) -> complex:
    """F(a, b; c; t) for real t in [0, 1).

    The power series is used for t <= 1/2.  Beyond that the function is
    rebuilt from series in 1 - t: the logarithmic formula when c = a + b,
    the two-term gamma formula when c - a - b is not an integer.
    """
    if c <= 0 and float(c).is_integer():
        raise ValueError("c must not be a non-positive integer")
    if not 0 <= t < 1:
        raise ValueError(f"t={t} outside [0, 1)")
    if t <= 0.5:
        return complex(_series(a, b, c, t))
    d = c - a - b
    if abs(d) < 1e-15:
        return complex(_log_connection(a, b, t))
    if float(d).is_integer():
        return complex(_series(a, b, c, t))  # degenerate integer case: direct series or SeriesSlow
    g = math.gamma
    s = 1 - t
    first = g(c) * g(d) / (g(c - a) * g(c - b)) * _series(a, b, 1 - d, s)
    second = g(c) * g(-d) / (g(a) * g(b)) * s ** d * _series(c - a, c - b, 1 + d, s)
    return complex(first + second)


# --- Hutchinson reference ------------------------------------------------------

@dataclass(frozen=True)
class HutchinsonReference:
    """Closed forms for mu^3 = (l - l1)(l - l2)^2(l - l3) with l = (0, t, 1)."""

    t: float
    T: complex
    A1: complex
    A2: complex
    Pi_closed: np.ndarray


def hutchinson_reference(t: float) -> HutchinsonReference:
    if not 0.05 < t < 0.95:
        raise ValueError(f"t={t} outside (0.05, 0.95)")
    third = 1 / 3
    f_t = gauss_2f1(third, 2 * third, 1.0, t)
    f_s = gauss_2f1(third, 2 * third, 1.0, 1 - t)
    rho = cmath.exp(2j * math.pi / 3)
    T = 1j * math.sqrt(3) / 3 * f_s / f_t
    A1 = 2 * math.sqrt(3) * math.pi / 3 * (1 - rho ** 2) * f_t  # (l3 - l1)^(1/3) = 1
    Pi = np.array([[2 * T, T], [T, 2 * T]])
    return HutchinsonReference(t, T, A1, -rho * A1, Pi)


def hutchinson_spec(t: float) -> CurveSpec:
    return CurveSpec(3, 1, (0.0, float(t), 1.0))


# --- right-hand sides -------------------------------------------------------------

def _lam(spec: CurveSpec) -> dict:
    return dict(enumerate(spec.branch_points, start=1))


def _pairs_product(lam: dict, A, B) -> complex:
    return complex(np.prod([lam[a] - lam[b] for a in A for b in B] or [1.0]))


def _prefactor(spec: CurveSpec, periods: PeriodData, base: complex) -> complex:
    N, m = spec.N, spec.m
    dets = np.prod([np.linalg.det(a) ** (2 * N) for a in periods.blocks.a_blocks])
    return complex(dets / base ** (2 * m * N * (N - 1)))


def _vandermonde(spec: CurveSpec) -> complex:
    """Products over same-parity pairs of finite branch points, each to the power N(N-1)."""
    lam, N, m = _lam(spec), spec.N, spec.m
    even = [lam[k] for k in range(2, 2 * m + 1, 2)]
    odd = [lam[k] for k in range(1, 2 * m + 2, 2)]
    p = N * (N - 1)
    return complex(np.prod([(x - y) ** p for grp in (even, odd) for x, y in combinations(grp, 2)] or [1.0]))


def cross_ratio_em(spec: CurveSpec, part: Partition) -> complex:
    lam, S = _lam(spec), part.sets(spec.m)
    num = _pairs_product(lam, S["I1"], S["J1"]) * _pairs_product(lam, S["I2"], S["J2"])
    den = _pairs_product(lam, S["I1"], S["I2"]) * _pairs_product(lam, S["J1"], S["J2"])
    return (num / den) ** (2 * (spec.N - 1))


def cross_ratio_em1(spec: CurveSpec, part: Partition) -> complex:
    lam, S = _lam(spec), part.sets(spec.m)
    I1p, J2p, im, jm = S["I1p"], S["J2p"], S["i_m"], S["j_m"]
    num = _pairs_product(lam, I1p, S["J1"]) * _pairs_product(lam, S["I2"], J2p)
    den = _pairs_product(lam, I1p, S["I2"]) * _pairs_product(lam, S["J1"], J2p)
    extra_num = _pairs_product(lam, [im], S["J2"]) * _pairs_product(lam, S["I1"], [jm])
    extra_den = _pairs_product(lam, [im], S["I1"]) * _pairs_product(lam, [jm], S["J2"])
    N = spec.N
    return (num / den) ** (2 * (N - 1)) * (extra_num / extra_den) ** (4 * (N - 2))


def thomae_rhs_em(spec: CurveSpec, periods: PeriodData, part: Partition) -> complex:
    """Right-hand side for theta[e_m](0)^{4N}."""
    if part.family != FAMILY_M:
        raise InvalidPartition("thomae_rhs_em needs a family M partition")
    part.validate(spec.m)
    return _prefactor(spec, periods, 2j * math.pi) * _vandermonde(spec) * cross_ratio_em(spec, part)


def thomae_rhs_em1(spec: CurveSpec, periods: PeriodData, part: Partition, prefactor: str = "2pi_i") -> complex:
    """Right-hand side for theta[e_{m+1}](0)^{4N}; ``prefactor`` is "2pi_i" or "2pi"."""
    if part.family != FAMILY_M_PLUS_1:
        raise InvalidPartition("thomae_rhs_em1 needs a family M+1 partition")
    part.validate(spec.m)
    base = {"2pi_i": 2j * math.pi, "2pi": 2 * math.pi}[prefactor]
    return _prefactor(spec, periods, base) * _vandermonde(spec) * cross_ratio_em1(spec, part)


def thomae_rhs(spec, periods, part, prefactor: str = "2pi_i") -> complex:
    if part.family == FAMILY_M:
        return thomae_rhs_em(spec, periods, part)
    return thomae_rhs_em1(spec, periods, part, prefactor)


def thomae_original(spec: CurveSpec, periods: PeriodData, part: Partition) -> complex:
    """Classical hyperelliptic RHS for theta[e]^8 (N = 2 only).

    The 2m+2 branch points (infinity included) are split into the m+1 points of
    I1 u J1 and the rest; the products run over pairs inside each half and
    skip infinity.
    """
    if spec.N != 2:
        raise ValueError("the classical formula needs N = 2")
    if part.family != FAMILY_M:
        raise InvalidPartition("the classical formula uses family M partitions")
    m, lam = spec.m, _lam(spec)
    first = sorted(set(part.I1) | set(part.J1))
    second = [k for k in range(1, 2 * m + 3) if k not in first]
    prod = 1.0 + 0j
    for half in (first, second):
        finite = [k for k in half if k <= 2 * m + 1]
        for a, b in combinations(finite, 2):
            prod *= (lam[a] - lam[b]) ** 2
    det = np.linalg.det(periods.a_full)
    return complex((det / (2j * math.pi) ** m) ** 4 * prod)


# --- verification --------------------------------------------------------------------

@dataclass(frozen=True)
class ThomaeReport:
    partition: Partition
    characteristic: RationalCharacteristic
    lhs: complex
    rhs: complex
    rel_error: float
    phase_error: float
    matching_prefactors: tuple = ("2pi_i",)


def _rel(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def _phase_error(lhs: complex, rhs: complex, N: int) -> float:
    """|arg(lhs/rhs)| reduced to the nearest point of the 2 pi/(4N) grid."""
    step = 2 * math.pi / (4 * N)
    ang = cmath.phase(lhs / rhs) if rhs != 0 and lhs != 0 else 0.0
    return abs(ang - step * round(ang / step))


def verify_thomae(spec: CurveSpec, part: Partition, cfg: QuadratureConfig | None = None,
                  periods: PeriodData | None = None, trunc: ThetaTruncation | None = None,
                  tol: float = 1e-6) -> ThomaeReport:
    periods = periods or period_matrix(spec, cfg)
    char = partition_characteristic(spec, part)
    lhs = theta_constant(periods.pi_matrix, char, trunc).value ** (4 * spec.N)
    if part.family == FAMILY_M:
        rhs = thomae_rhs_em(spec, periods, part)
        matching = ("2pi_i",)
    else:
        variants = {k: thomae_rhs_em1(spec, periods, part, k) for k in ("2pi_i", "2pi")}
        rhs = variants["2pi_i"]
        matching = tuple(k for k, v in variants.items() if _rel(lhs, v) <= tol)
    return ThomaeReport(part, char, complex(lhs), complex(rhs), _rel(lhs, rhs),
                        _phase_error(lhs, rhs, spec.N), matching)


# --- degeneration ------------------------------------------------------------------

def pinched_spec(N: int, v, tail: float, eps: float) -> CurveSpec:
    """Branch points v_k -/+ eps paired up, followed by ``tail``; keeps them increasing."""
    pts = []
    for vk in v:
        pts += [vk - eps, vk + eps]
    pts.append(tail)
    return CurveSpec(N, len(v), tuple(pts))


def det_a_limit(N: int, v, tail: float, s: int) -> complex:
    """Limit of det A_s as the pairs collide (principal branch of the s/N power)."""
    m = len(v)
    van = np.prod([v[k] - v[j] for k in range(m) for j in range(k + 1, m)] or [1.0])
    tails = np.prod([complex(vk - tail) ** (s / N) for vk in v])
    return complex((2j * math.pi) ** m / van / tails)


@dataclass(frozen=True)
class PinchingResult:
    eps: float
    det_errors: tuple
    theta_zero_minus_one: float


def pinching_check(N: int, v, tail: float, eps: float, cfg: QuadratureConfig | None = None) -> PinchingResult:
    spec = pinched_spec(N, v, tail, eps)
    periods = period_matrix(spec, cfg)
    errs = []
    for s, a in enumerate(periods.blocks.a_blocks, start=1):
        lim = det_a_limit(N, v, tail, s)
        errs.append(abs(np.linalg.det(a) - lim) / abs(lim))
    th = theta_constant(periods.pi_matrix).value
    return PinchingResult(eps, tuple(errs), abs(th - 1))
