"""The singular Z_N curve mu^N = p(lambda) q(lambda)^(N-1) and its sheet bookkeeping.

Branch points are real and ordered, lambda_1 < ... < lambda_{2m+1}.  Odd-indexed
points are the roots of ``p``; even-indexed points are the roots of ``q`` and
carry exponent N-1.  The point at infinity is a further (odd-type) branch
point, labelled 2m+2 wherever index sets appear.

Sheets are never numbered globally.  A surface point is the pair (lambda, mu)
and sheet changes are obtained by analytic continuation of mu.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BranchPointProximity,
    CurveInvalid,
    EvenBranchPoint,
    OutOfChart,
    PoleCollision,
    TrackingAmbiguity,
)

INFINITY = "infinity"

# Tracking constants: a continuation step is accepted only if the chosen root
# is closer than SAFETY times the distance to every other root.
SAFETY = 0.4
FLOOR_STEP = 1e-12


@dataclass(frozen=True)
class CurveSpec:
    N: int
    m: int
    branch_points: tuple
    eps_sep: float = 1e-9

    def __post_init__(self):
        bp = tuple(float(x) for x in self.branch_points)
        object.__setattr__(self, "branch_points", bp)
        if int(self.N) != self.N or self.N < 2:
            raise CurveInvalid(f"N must be an integer >= 2, got {self.N!r}")
        if int(self.m) != self.m or self.m < 1:
            raise CurveInvalid(f"m must be an integer >= 1, got {self.m!r}")
        if len(bp) != 2 * self.m + 1:
            raise CurveInvalid(
                f"expected {2 * self.m + 1} branch points for m={self.m}, got {len(bp)}"
            )
        for i in range(len(bp) - 1):
            if not bp[i + 1] - bp[i] > self.eps_sep:
                raise CurveInvalid(
                    f"branch points must be strictly increasing with gap > {self.eps_sep}; "
                    f"violation at index {i + 1}"
                )

    @property
    def genus(self) -> int:
        return (self.N - 1) * self.m

    @property
    def rho(self) -> complex:
        return cmath.exp(2j * math.pi / self.N)

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.branch_points, dtype=float)

    @property
    def exponents(self) -> np.ndarray:
        """Exponent of (lambda - lambda_k) in mu^N, for k = 1..2m+1."""
        return np.array([1 if k % 2 == 1 else self.N - 1 for k in range(1, 2 * self.m + 2)])

    @property
    def min_gap(self) -> float:
        return float(np.min(np.diff(self.points)))

    def odd_points(self) -> np.ndarray:
        return self.points[0::2]

    def even_points(self) -> np.ndarray:
        return self.points[1::2]

    def p(self, lam):
        lam = np.asarray(lam)
        return np.prod(lam[..., None] - self.odd_points(), axis=-1)

    def q(self, lam):
        lam = np.asarray(lam)
        return np.prod(lam[..., None] - self.even_points(), axis=-1)

    def rhs(self, lam):
        """p(lambda) q(lambda)^(N-1)."""
        return self.p(lam) * self.q(lam) ** (self.N - 1)

    def distance_to_branch(self, lam) -> np.ndarray:
        lam = np.asarray(lam)
        return np.min(np.abs(lam[..., None] - self.points), axis=-1)

    def nearest_branch_index(self, lam) -> int:
        """1-based index of the branch point closest to ``lam``."""
        return int(np.argmin(np.abs(lam - self.points))) + 1


@dataclass(frozen=True)
class SurfacePoint:
    lam: complex
    mu: complex

    def residual(self, spec: CurveSpec) -> float:
        return abs(self.mu ** spec.N - complex(spec.rhs(self.lam)))

    def on_curve(self, spec: CurveSpec, tol_rel: float = 1e-10) -> bool:
        return self.residual(spec) <= tol_rel * (1.0 + abs(self.mu) ** spec.N)


@dataclass(frozen=True)
class Contour:
    """Piecewise-linear path in the lambda plane with a seed value of mu.

    ``branch_ends`` lists vertex positions that sit exactly on a branch point;
    panels touching them are integrated with the endpoint substitution.
    """

    vertices: tuple
    start_mu: complex
    max_step: float = 0.05
    branch_ends: frozenset = field(default_factory=frozenset)

    @property
    def closed(self) -> bool:
        return len(self.vertices) > 2 and self.vertices[0] == self.vertices[-1]

    @property
    def length(self) -> float:
        v = np.asarray(self.vertices, dtype=complex)
        return float(np.sum(np.abs(np.diff(v))))


@dataclass(frozen=True)
class FunctionBases:
    psi: np.ndarray
    phi: np.ndarray


def _check_off_branch(spec: CurveSpec, lam) -> None:
    d = float(np.min(spec.distance_to_branch(lam)))
    if d <= spec.eps_sep:
        raise BranchPointProximity(f"lambda={lam!r} is within {spec.eps_sep} of a branch point")


def mu_roots(spec: CurveSpec, lam: complex) -> np.ndarray:
    """All N values of mu over ``lam``; entry 0 is the principal root."""
    _check_off_branch(spec, lam)
    c = complex(spec.rhs(lam))
    r, phi = abs(c), cmath.phase(c)
    k = np.arange(spec.N)
    return r ** (1.0 / spec.N) * np.exp(1j * (phi + 2 * np.pi * k) / spec.N)


def _upper_log_sum(spec: CurveSpec, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=complex)
    # real lambda is read as lambda + i0
    lam = lam.real + 1j * np.where(lam.imag == 0, 0.0, lam.imag)
    return np.sum(spec.exponents * np.log(lam[..., None] - spec.points), axis=-1)


def sheet_one_mu(spec: CurveSpec, lam):
    """mu on the reference sheet.

    The reference sheet is the branch that is real and positive on the ray
    (lambda_{2m+1}, +inf) approached from above, continued through the upper
    half plane and, around the left of lambda_1, into the lower half plane.
    Real ``lam`` is read as an upper-edge value.
    """
    lam = np.asarray(lam, dtype=complex)
    val = np.exp(_upper_log_sum(spec, lam) / spec.N)
    return np.where(lam.imag < 0, spec.rho * val, val)


def continue_on_segment(spec: CurveSpec, a: complex, mu_a: complex, lams) -> np.ndarray:
    """Closed-form continuation of mu from ``a`` along straight segments to ``lams``.

    mu(lam) = mu_a * prod_k ((lam - l_k)/(a - l_k))^(e_k/N) with principal powers.
    The ratio for l_k can only cross the negative axis if l_k lies on the
    segment, so this is exact whenever the segment [a, lam] avoids branch points.
    """
    lams = np.asarray(lams, dtype=complex)
    ratio = (lams[..., None] - spec.points) / (a - spec.points)
    return mu_a * np.exp(np.sum(spec.exponents * np.log(ratio), axis=-1) / spec.N)


def _pick_root(roots: np.ndarray, prev: complex):
    d = np.abs(roots - prev)
    order = np.argsort(d)
    return roots[order[0]], d[order[0]], d[order[1]] if len(d) > 1 else np.inf


def continue_mu(spec: CurveSpec, contour: Contour) -> complex:
    """Track mu along ``contour`` by nearest-root stepping; return mu at the end.

    A step is accepted when the chosen root is closer to the previous value
    than SAFETY times the distance to the runner-up; otherwise it is halved.
    """
    verts = [complex(v) for v in contour.vertices]
    mu = complex(contour.start_mu)
    c0 = complex(spec.rhs(verts[0]))
    if abs(mu ** spec.N - c0) > 1e-8 * (1 + abs(mu) ** spec.N):
        raise TrackingAmbiguity("start_mu does not lie on the curve at the first vertex")
    total = max(contour.length, 1e-300)
    floor = FLOOR_STEP * total
    for a, b in zip(verts[:-1], verts[1:]):
        seg = abs(b - a)
        if seg == 0:
            continue
        t = 0.0
        dt = min(contour.max_step / seg, 1.0)
        while t < 1.0:
            step = min(dt, 1.0 - t)
            while True:
                lam = a + (t + step) * (b - a)
                root, d0, d1 = _pick_root(mu_roots(spec, lam), mu)
                if d0 < SAFETY * d1:
                    break
                step *= 0.5
                if step * seg < floor:
                    raise TrackingAmbiguity(
                        f"cannot separate roots near lambda={lam!r}; contour too close to a branch point"
                    )
            mu = root
            t += step
            dt = min(2 * step, contour.max_step / seg)
    return mu


def local_coordinate(spec: CurveSpec, P: SurfacePoint, R) -> complex:
    """Local coordinate x(P) centred at R (an ordinary point, a branch point or infinity).

    ``R`` may be a SurfacePoint, a 1-based branch point index (int) or INFINITY.
    """
    lam = complex(P.lam)
    if isinstance(R, str) and R == INFINITY:
        if abs(lam) <= 2 * float(np.max(np.abs(spec.points))) + 1.0:
            raise OutOfChart(f"lambda={lam!r} is outside the chart at infinity")
        return lam ** (-1.0 / spec.N)
    if isinstance(R, (int, np.integer)):
        k = int(R)
        if not 1 <= k <= 2 * spec.m + 1:
            raise OutOfChart(f"no branch point with index {k}")
        centre = spec.branch_points[k - 1]
        others = np.delete(spec.points, k - 1)
        if abs(lam - centre) >= 0.5 * float(np.min(np.abs(others - centre))):
            raise OutOfChart("point is outside the branch-point chart")
        return (lam - centre) ** (1.0 / spec.N)
    centre = complex(R.lam)
    idx = np.flatnonzero(np.abs(spec.points - centre) <= spec.eps_sep)
    if idx.size:
        return local_coordinate(spec, P, int(idx[0]) + 1)
    if abs(lam - centre) >= 0.5 * float(np.min(np.abs(spec.points - centre))):
        raise OutOfChart("point is outside the ordinary chart")
    return lam - centre


def function_bases(spec: CurveSpec, P: SurfacePoint) -> FunctionBases:
    """Vectors Psi (functions with poles only at infinity) and its dual Phi at P."""
    N = spec.N
    lam, mu = complex(P.lam), complex(P.mu)
    q = complex(spec.q(lam))
    if abs(q) <= spec.eps_sep:
        raise EvenBranchPoint("q vanishes at this point; Psi is undefined")
    psi = np.empty(N, dtype=complex)
    phi = np.empty(N, dtype=complex)
    psi[0], phi[0] = 1.0, mu ** (N - 1)
    for j in range(1, N):
        psi[j] = mu ** j / q ** (j - 1)
        phi[j] = q ** (j - 1) * mu ** (N - 1 - j)
    return FunctionBases(psi=psi, phi=phi)


def third_kind_differential(spec: CurveSpec, P: SurfacePoint, Q: SurfacePoint, R: SurfacePoint) -> complex:
    """Coefficient of d(lambda) in the third-kind differential Omega_{Q,R}(P).

    Simple poles at P=Q (residue +1) and P=R (residue -1).
    """
    lam, mu = complex(P.lam), complex(P.mu)
    _check_off_branch(spec, lam)
    for X in (Q, R):
        if abs(lam - X.lam) <= spec.eps_sep and abs(mu - X.mu) <= 1e-9 * (1 + abs(mu)):
            raise PoleCollision("P coincides with a pole of the differential")
    phi = function_bases(spec, P).phi
    psi_q = function_bases(spec, Q).psi
    psi_r = function_bases(spec, R).psi
    f_mu = spec.N * mu ** (spec.N - 1)
    return (np.dot(psi_q, phi) / (lam - Q.lam) - np.dot(psi_r, phi) / (lam - R.lam)) / f_mu


def point_on_sheet_one(spec: CurveSpec, lam: complex) -> SurfacePoint:
    _check_off_branch(spec, lam)
    return SurfacePoint(complex(lam), complex(sheet_one_mu(spec, lam)))


def circle(centre: complex, radius: float, n: int = 64, start_angle: float = 0.0) -> tuple:
    """Closed polygonal approximation of an anticlockwise circle."""
    ang = start_angle + 2 * np.pi * np.arange(n + 1) / n
    pts = centre + radius * np.exp(1j * ang)
    pts[-1] = pts[0]
    return tuple(complex(z) for z in pts)


def as_spec(N: int, m: int, branch_points: Sequence[float]) -> CurveSpec:
    return CurveSpec(int(N), int(m), tuple(branch_points))
