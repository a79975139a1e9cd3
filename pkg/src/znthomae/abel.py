"""Paths on the surface between two points and Abel integrals along them.

A path is a polygon in the lambda plane plus the starting value of mu.  Along
it we track, for every finite branch point l_k, the continued logarithm
L_k = log((lambda - l_k)/(lambda_start - l_k)).  Everything multivalued that
depends only on lambda (mu itself, the fractional powers of the algebraic
Szego kernels) is then read off from the same L_k, so both sides of every
identity refer to the same lift of the endpoint.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curve import CurveSpec, SurfacePoint, _check_off_branch, continue_on_segment, sheet_one_mu
from .errors import BranchPointProximity
from .periods import PeriodData, dv_integrand_near, dv_vector
from .quadrature import QuadratureConfig, discretize_path, integrate_to_branch, integrate_to_infinity, line_piece

DETOUR_TRIGGER = 0.2   # detour when a branch point is this close to a segment (x min gap)
DETOUR_RADIUS = 0.25   # radius of the detour arc (x min gap)
ARC_POINTS = 8


@dataclass(frozen=True)
class AbelPath:
    spec: CurveSpec
    vertices: tuple
    mu_start: complex

    @property
    def start(self) -> SurfacePoint:
        return SurfacePoint(self.vertices[0], self.mu_start)

    @property
    def logs(self) -> np.ndarray:
        """Continued log((lambda_end - l_k)/(lambda_start - l_k)) for every finite branch point."""
        pts = self.spec.points
        total = np.zeros(len(pts), dtype=complex)
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            total += np.log((b - pts) / (a - pts))
        return total

    @property
    def mu_end(self) -> complex:
        return complex(self.mu_start * np.exp(np.dot(self.spec.exponents, self.logs) / self.spec.N))

    @property
    def end(self) -> SurfacePoint:
        return SurfacePoint(self.vertices[-1], self.mu_end)

    def pieces(self):
        out, mu = [], complex(self.mu_start)
        for a, b in zip(self.vertices[:-1], self.vertices[1:]):
            if a == b:
                continue
            out.append(line_piece(self.spec, a, b, mu))
            mu = complex(continue_on_segment(self.spec, a, mu, b))
        return out

    def reversed(self) -> "AbelPath":
        return AbelPath(self.spec, tuple(reversed(self.vertices)), self.mu_end)


def _arc(centre: complex, radius: float, a0: float, a1: float, n: int) -> list:
    return [centre + radius * cmath.exp(1j * (a0 + (a1 - a0) * k / n)) for k in range(n + 1)]


def _detour_segment(spec: CurveSpec, a: complex, b: complex) -> list:
    """Vertices from a to b (exclusive of a) that keep clear of every branch point."""
    gap = spec.min_gap
    r = DETOUR_RADIUS * gap
    seg = b - a
    length = abs(seg)
    if length == 0:
        return [b]
    u = seg / length
    hits = []
    for lam_k in spec.points:
        t = ((lam_k - a) * u.conjugate()).real
        if not 0 < t < length:
            continue
        c = a + t * u
        if abs(c - lam_k) < DETOUR_TRIGGER * gap:
            hits.append((t, lam_k, c))
    verts = []
    for t, lam_k, c in sorted(hits):
        off = c - lam_k
        if abs(off) > 1e-14 * (1 + abs(lam_k)):
            normal = off / abs(off)
        else:
            normal = 1j * u if (1j * u).imag >= 0 else -1j * u
        s = math.sqrt(max(r * r - abs(off) ** 2, 0.0))
        p_in, p_out = c - s * u, c + s * u
        if abs(p_in - a) < 1e-12 or abs(b - p_out) < 1e-12 or t - s <= 0 or t + s >= length:
            raise BranchPointProximity("path endpoint lies inside a branch-point detour disc")
        a0 = cmath.phase(p_in - lam_k)
        a1 = cmath.phase(p_out - lam_k)
        an = cmath.phase(normal)
        # go from a0 to a1 through an
        ccw = (a1 - a0) % (2 * math.pi)
        through = (an - a0) % (2 * math.pi)
        if through <= ccw:
            end = a0 + ccw
        else:
            end = a0 - ((a0 - a1) % (2 * math.pi))
        verts.extend(_arc(lam_k, r, a0, end, ARC_POINTS))
    verts.append(b)
    return verts


def polygon_path(spec: CurveSpec, start: SurfacePoint, waypoints) -> AbelPath:
    """Path from ``start`` through the given lambda waypoints, with branch-point detours."""
    _check_off_branch(spec, start.lam)
    verts = [complex(start.lam)]
    for w in waypoints:
        w = complex(w)
        _check_off_branch(spec, w)
        verts.extend(_detour_segment(spec, verts[-1], w))
    return AbelPath(spec, tuple(verts), complex(start.mu))


def _sheet_shift(spec: CurveSpec, mu_from: complex, mu_to: complex) -> int:
    ratio = mu_to / mu_from
    r = round(cmath.phase(ratio) / (2 * math.pi / spec.N)) % spec.N
    if abs(ratio - cmath.exp(2j * math.pi * r / spec.N)) > 1e-6:
        raise ValueError("target mu is not on the curve over the path endpoint")
    return r


def path_between(spec: CurveSpec, P: SurfacePoint, Q: SurfacePoint) -> AbelPath:
    """Straight path from P to the fibre of Q, closed off by loops around the
    branch point nearest to Q until mu matches Q's sheet."""
    base = polygon_path(spec, P, [Q.lam])
    r = _sheet_shift(spec, base.mu_end, complex(Q.mu))
    if r == 0:
        return base
    k = spec.nearest_branch_index(Q.lam)
    lam_k = spec.branch_points[k - 1]
    # an anticlockwise loop multiplies mu by rho^(e_k)
    e = int(spec.exponents[k - 1])
    loops = next(n for n in range(spec.N) if (n * e - r) % spec.N == 0)
    d = complex(Q.lam) - lam_k
    rad = min(DETOUR_RADIUS * spec.min_gap, 0.5 * abs(d))
    a0 = cmath.phase(d)
    entry = lam_k + rad * cmath.exp(1j * a0)
    verts = list(base.vertices)
    verts.append(entry)
    for _ in range(loops):
        verts.extend(_arc(lam_k, rad, a0, a0 + 2 * math.pi, 4 * ARC_POINTS)[1:])
    verts.append(complex(Q.lam))
    path = AbelPath(spec, tuple(verts), complex(P.mu))
    if abs(path.mu_end - Q.mu) > 1e-8 * (1 + abs(Q.mu)):
        raise ValueError("sheet correction failed")
    return path


@dataclass
class AbelIntegral:
    """int dv along a path, plus the quadrature nodes for cumulative reuse."""

    path: AbelPath
    value: np.ndarray
    disc: object


def abel_integral(spec: CurveSpec, periods: PeriodData, path: AbelPath, cfg: QuadratureConfig | None = None):
    cfg = cfg or periods.cfg
    f = lambda lam, mu: dv_vector(spec, periods, lam, mu)
    disc, total = discretize_path(spec, path.pieces(), f, cfg)
    return AbelIntegral(path, np.asarray(total), disc)


def abel_between(spec: CurveSpec, periods: PeriodData, P: SurfacePoint, Q: SurfacePoint, cfg=None) -> AbelIntegral:
    return abel_integral(spec, periods, path_between(spec, P, Q), cfg)


def branch_point_image(spec: CurveSpec, periods: PeriodData, k: int, cfg: QuadratureConfig | None = None) -> np.ndarray:
    """int from infinity to the branch point l_k of dv, through a point above the real axis.

    Defined modulo the period lattice; the path goes from infinity down the
    imaginary direction to a + i*span and then straight to l_k on sheet one.
    """
    cfg = cfg or periods.cfg
    lo, hi = spec.branch_points[0], spec.branch_points[-1]
    a = complex(0.5 * (lo + hi), max(hi - lo, 1.0))
    mu_a = complex(sheet_one_mu(spec, a))
    f = lambda lam, mu: dv_vector(spec, periods, lam, mu)
    _, to_inf = integrate_to_infinity(spec, a, mu_a, f, cfg, direction=1j)
    _, to_k = integrate_to_branch(spec, a, mu_a, k, dv_integrand_near(spec, periods, k), cfg)
    return np.asarray(to_k - to_inf)
