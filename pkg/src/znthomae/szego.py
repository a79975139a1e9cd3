"""Algebraic Szego kernels for the characteristics e_m and e_{m+1}, their
diagonal coefficients phi, the second-derivative identity and the Fay check.

The kernels are sums of N terms, each a product of rational powers of
psi-ratios psi_k(P,Q) = (lambda(Q) - l_k)/(lambda(P) - l_k).  The powers are
taken along an AbelPath from P to Q (branch "path", the default): every psi_k
starts at 1 for Q = P and its logarithm is continued with the path.  The
alternative branch "principal" takes the principal power of each bracketed
product as a whole.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .abel import AbelPath, path_between
from .characteristics import FAMILY_M, FAMILY_M_PLUS_1, Partition, partition_characteristic
from .curve import CurveSpec, SurfacePoint
from .errors import BranchCut, InvalidPartition, PoleAtBranchPoint
from .kernels import KernelContext, omega_bidifferential, szego_product_theta, szego_theta


def psi_factor(spec: CurveSpec, P, Q, k: int) -> complex:
    """(lambda(Q) - l_k) / (lambda(P) - l_k)."""
    lam_k = spec.branch_points[k - 1]
    den = complex(P.lam) - lam_k
    if abs(den) <= spec.eps_sep:
        raise PoleAtBranchPoint(f"P sits on branch point {k}")
    return (complex(Q.lam) - lam_k) / den


def frac(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def exponents_em(N: int):
    """[(a_s, b_s)] with a_s = (N-1)/2N - s/N and b_s = (N-1)/2N - {(s+1)/N}."""
    base = Fraction(N - 1, 2 * N)
    return [(base - Fraction(s, N), base - frac(Fraction(s + 1, N))) for s in range(N)]


def exponents_em1(N: int):
    """[(a_s, b_s, c_s)] with c_s = (N-1)/2N - {(s+2)/N}."""
    base = Fraction(N - 1, 2 * N)
    return [(a, b, base - frac(Fraction(s + 2, N))) for s, (a, b) in enumerate(exponents_em(N))]


@dataclass(frozen=True)
class SzegoAlgebraicValue:
    """Kernel value per sqrt(d lambda(P) d lambda(Q)) and the N summands."""

    value: complex
    terms: tuple
    branch: str


def _sum(logs, idx):
    return sum((logs[k - 1] for k in idx), 0j)


def _bracket_logs(spec: CurveSpec, sets: dict, P, Q, path: AbelPath | None, branch: str):
    if branch == "path":
        path = path or path_between(spec, P, Q)
        L = path.logs
        logs = {"A": _sum(L, sets["I1"]) - _sum(L, sets["J2"]), "B": _sum(L, sets["I2"]) - _sum(L, sets["J1"])}
        if "i_m" in sets:
            logs["C"] = L[sets["i_m"] - 1] - L[sets["j_m"] - 1]
        return logs
    if branch != "principal":
        raise ValueError(f"unknown branch rule {branch!r}")
    psi = lambda k: psi_factor(spec, P, Q, k)
    prods = {
        "A": np.prod([psi(i) for i in sets["I1"]] or [1]) / np.prod([psi(j) for j in sets["J2"]] or [1]),
        "B": np.prod([psi(i) for i in sets["I2"]] or [1]) / np.prod([psi(j) for j in sets["J1"]] or [1]),
    }
    if "i_m" in sets:
        prods["C"] = psi(sets["i_m"]) / psi(sets["j_m"])
    out = {}
    for key, val in prods.items():
        val = complex(val)
        if val.real < 0 and abs(val.imag) <= 1e-12 * abs(val):
            raise BranchCut(f"bracket {key} lies on the negative real axis; resample the points")
        out[key] = cmath.log(val)
    return out


def _assemble(spec, P, Q, logs, exps, branch):
    dlam = complex(Q.lam) - complex(P.lam)
    if dlam == 0:
        raise PoleAtBranchPoint("P and Q lie over the same lambda")
    keys = ("A", "B", "C")[: len(exps[0])]
    terms = tuple(complex(np.exp(sum(float(e) * logs[k] for e, k in zip(ex, keys)))) for ex in exps)
    return SzegoAlgebraicValue(sum(terms) / (spec.N * dlam), terms, branch)


def szego_algebraic_em(spec: CurveSpec, part: Partition, P, Q, path: AbelPath | None = None,
                       branch: str = "path") -> SzegoAlgebraicValue:
    if part.family != FAMILY_M:
        raise InvalidPartition("szego_algebraic_em needs a family M partition")
    part.validate(spec.m)
    logs = _bracket_logs(spec, part.sets(spec.m), P, Q, path, branch)
    return _assemble(spec, P, Q, logs, exponents_em(spec.N), branch)


def szego_algebraic_em1(spec: CurveSpec, part: Partition, P, Q, path: AbelPath | None = None,
                        branch: str = "path") -> SzegoAlgebraicValue:
    if part.family != FAMILY_M_PLUS_1:
        raise InvalidPartition("szego_algebraic_em1 needs a family M+1 partition")
    part.validate(spec.m)
    logs = _bracket_logs(spec, part.sets(spec.m), P, Q, path, branch)
    return _assemble(spec, P, Q, logs, exponents_em1(spec.N), branch)


def szego_algebraic(spec, part, P, Q, path=None, branch="path") -> SzegoAlgebraicValue:
    if part.family == FAMILY_M:
        return szego_algebraic_em(spec, part, P, Q, path, branch)
    return szego_algebraic_em1(spec, part, P, Q, path, branch)


def szego_zero_closed_form(spec: CurveSpec, P, Q, path: AbelPath | None = None) -> complex:
    """The zero-characteristic kernel written with p and q directly."""
    path = path or path_between(spec, P, Q)
    L = path.logs
    odd, even = L[0::2].sum(), L[1::2].sum()
    log_ratio = odd - even  # log of p(Q) q(P) / (p(P) q(Q)) continued along the path
    N = spec.N
    total = sum(np.exp(float(Fraction(N - 1, 2 * N) - Fraction(s, N)) * log_ratio) for s in range(N))
    return complex(total / (N * (complex(Q.lam) - complex(P.lam))))


# --- diagonal coefficients ------------------------------------------------

def _dlog(spec: CurveSpec, lam: complex, num, den) -> complex:
    pts = spec.points
    for k in tuple(num) + tuple(den):
        if abs(lam - pts[k - 1]) <= spec.eps_sep:
            raise PoleAtBranchPoint(f"lambda sits on branch point {k}")
    return sum((1 / (lam - pts[k - 1]) for k in num), 0j) - sum((1 / (lam - pts[k - 1]) for k in den), 0j)


def phi_coefficients(N: int) -> dict:
    d = 24 * N * N
    return {
        "square": Fraction(N * N - 1, d),
        "cross": Fraction(2 * (N - 1) * (N - 5), d),
        "cross_m1": Fraction(2 * (N * N - 12 * N + 23), d),
    }


def phi_em(spec: CurveSpec, part: Partition, lam) -> complex:
    sets = part.sets(spec.m)
    lam = complex(lam)
    c = phi_coefficients(spec.N)
    a = _dlog(spec, lam, sets["I1"], sets["J2"])
    b = _dlog(spec, lam, sets["I2"], sets["J1"])
    return float(c["square"]) * (a * a + b * b) + float(c["cross"]) * a * b


def phi_em1(spec: CurveSpec, part: Partition, lam) -> complex:
    sets = part.sets(spec.m)
    lam = complex(lam)
    c = phi_coefficients(spec.N)
    a = _dlog(spec, lam, sets["I1"], sets["J2"])
    b = _dlog(spec, lam, sets["I2"], sets["J1"])
    cc = _dlog(spec, lam, (sets["i_m"],), (sets["j_m"],))
    ap = _dlog(spec, lam, sets["I1p"], sets["J2p"])
    return (float(c["square"]) * (a * a + b * b + cc * cc) + float(c["cross"]) * ap * b
            + float(c["cross_m1"]) * a * cc)


def phi(spec: CurveSpec, part: Partition, lam) -> complex:
    return phi_em(spec, part, lam) if part.family == FAMILY_M else phi_em1(spec, part, lam)


# --- identities -------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResult:
    lhs: complex
    rhs: complex

    @property
    def residual(self) -> complex:
        return self.lhs - self.rhs

    @property
    def rel_error(self) -> float:
        return abs(self.residual) / abs(self.rhs)


def second_identity_rhs(spec: CurveSpec, part: Partition, lam) -> complex:
    """(N-1)/(4N) (p''/p + q''/q) - (N^2-1)/(12N^2) (d log(p/q))^2 + 2 phi."""
    N = spec.N
    lam = complex(lam)
    odd = 1 / (lam - spec.odd_points())
    even = 1 / (lam - spec.even_points())
    pp = odd.sum() ** 2 - (odd ** 2).sum()
    qq = even.sum() ** 2 - (even ** 2).sum()
    dlog = odd.sum() - even.sum()
    return (float(Fraction(N - 1, 4 * N)) * (pp + qq) - float(Fraction(N * N - 1, 12 * N * N)) * dlog ** 2
            + 2 * phi(spec, part, lam))


def second_derivative_identity_residual(ctx: KernelContext, part: Partition, P: SurfacePoint) -> IdentityResult:
    """Both sides of the second-log-derivative identity at P, per d lambda^2."""
    char = partition_characteristic(ctx.spec, part)
    H = ctx.theta(np.zeros(ctx.pi.shape[0]), char, derivs=2).log_hessian()
    v = ctx.dv(P)
    return IdentityResult(complex(v @ H @ v), second_identity_rhs(ctx.spec, part, P.lam))


@dataclass(frozen=True)
class FayResult:
    lhs_theta: complex
    lhs_algebraic: complex
    rhs: complex

    @property
    def residual(self) -> float:
        return abs(self.lhs_theta) - abs(self.rhs)

    @property
    def residual_algebraic(self) -> float:
        return abs(self.lhs_algebraic) - abs(self.rhs)


def fay_identity_residual(ctx: KernelContext, part: Partition, P, Q, path: AbelPath | None = None,
                          omega_method: str = "hessian") -> FayResult:
    """S[e](P,Q) S[-e](P,Q) against omega(P,Q) + sum d_k d_l log theta[e](0) dv_k(P) dv_l(Q)."""
    spec = ctx.spec
    path = path or path_between(spec, P, Q)
    char = partition_characteristic(spec, part)
    lhs_theta = szego_product_theta(ctx, P, Q, char, path)
    s_plus = szego_algebraic(spec, part, P, Q, path).value
    s_minus = szego_algebraic(spec, part.complement(spec.m), P, Q, path).value
    H = ctx.theta(np.zeros(ctx.pi.shape[0]), char, derivs=2).log_hessian()
    rhs = omega_bidifferential(ctx, P, Q, path, method=omega_method) + ctx.dv(P) @ H @ ctx.dv(Q)
    return FayResult(complex(lhs_theta), complex(s_plus * s_minus), complex(rhs))


def szego_pair(ctx: KernelContext, part: Partition, P, Q, path: AbelPath | None = None):
    """(algebraic, theta) Szego values for the same path; compare magnitudes."""
    path = path or path_between(ctx.spec, P, Q)
    alg = szego_algebraic(ctx.spec, part, P, Q, path).value
    th = szego_theta(ctx, P, Q, partition_characteristic(ctx.spec, part), path)
    return alg, th
