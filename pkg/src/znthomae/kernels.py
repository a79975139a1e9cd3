"""Theta-function kernels on the curve: prime form, Szego kernel and the
canonical bidifferential omega.

All values are coefficients with respect to the affine chart lambda, i.e. per
sqrt(d lambda) for every half-differential slot and per d lambda for every
differential slot.  The Abel integral between the two points is taken along
an explicit AbelPath so that multivalued pieces stay consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abel import AbelPath, abel_integral, path_between
from .characteristics import RationalCharacteristic
from .curve import CurveSpec, SurfacePoint, continue_on_segment
from .errors import DenominatorVanishes, SingularCharacteristic, StepUnderflow
from .periods import PeriodData, dv_vector
from .quadrature import contour_pieces, discretize_path, gauss_legendre
from .theta import ThetaTruncation, find_odd_nonsingular_half_characteristic, theta, theta_constant


@dataclass
class KernelContext:
    """Period data plus cached theta data shared by kernel evaluations."""

    spec: CurveSpec
    periods: PeriodData
    gamma: RationalCharacteristic | None = None
    trunc: ThetaTruncation | None = None

    def __post_init__(self):
        if self.gamma is None:
            self.gamma = find_odd_nonsingular_half_characteristic(self.periods.pi_matrix, self.trunc)
        self._grad_gamma = theta_constant(self.pi, self.gamma, self.trunc, derivs=1).gradient

    @property
    def pi(self) -> np.ndarray:
        return self.periods.pi_matrix

    def dv(self, P: SurfacePoint) -> np.ndarray:
        return dv_vector(self.spec, self.periods, complex(P.lam), complex(P.mu))

    def h_squared(self, P: SurfacePoint) -> complex:
        """sum_j d theta[gamma](0)/dz_j dv_j(P): the square of the half-differential in E."""
        return complex(self._grad_gamma @ self.dv(P))

    def theta(self, z, char, derivs=0):
        return theta(z, self.pi, char, self.trunc, derivs)


@dataclass(frozen=True)
class PrimeFormValue:
    value: complex
    theta_gamma: complex
    h2_P: complex
    h2_Q: complex
    z: np.ndarray

    @property
    def squared(self) -> complex:
        """E^2, free of square-root branch choices."""
        return self.theta_gamma ** 2 / (self.h2_P * self.h2_Q)


def _abel(ctx: KernelContext, P, Q, path: AbelPath | None):
    path = path or path_between(ctx.spec, P, Q)
    return path, abel_integral(ctx.spec, ctx.periods, path).value


def prime_form(ctx: KernelContext, P: SurfacePoint, Q: SurfacePoint, path: AbelPath | None = None) -> PrimeFormValue:
    """E(P,Q) = theta[gamma](int_P^Q dv) / (sqrt(h2(P)) sqrt(h2(Q))), principal square roots."""
    path, z = _abel(ctx, P, Q, path)
    h2p, h2q = ctx.h_squared(P), ctx.h_squared(Q)
    scale = float(np.linalg.norm(ctx._grad_gamma)) * max(np.linalg.norm(ctx.dv(P)), np.linalg.norm(ctx.dv(Q)))
    if min(abs(h2p), abs(h2q)) <= 1e-12 * max(scale, 1e-300):
        raise DenominatorVanishes("sample point sits at a zero of the gamma-differential")
    num = ctx.theta(z, ctx.gamma).value
    return PrimeFormValue(num / (np.sqrt(h2p) * np.sqrt(h2q)), num, h2p, h2q, z)


def szego_theta(ctx: KernelContext, P, Q, char, path: AbelPath | None = None, threshold: float = 1e-10) -> complex:
    """S[char](P,Q) = theta[char](z) / (theta[char](0) E(P,Q))."""
    t0 = ctx.theta(np.zeros(ctx.pi.shape[0]), char).value
    if abs(t0) <= threshold:
        raise SingularCharacteristic(f"theta[char](0) = {t0:.3g} is numerically zero")
    E = prime_form(ctx, P, Q, path)
    return ctx.theta(E.z, char).value / (t0 * E.value)


def szego_product_theta(ctx: KernelContext, P, Q, char, path: AbelPath | None = None) -> complex:
    """S[e](P,Q) S[-e](P,Q), which needs only E^2 and is free of sign choices."""
    E = prime_form(ctx, P, Q, path)
    g = ctx.pi.shape[0]
    t0 = ctx.theta(np.zeros(g), char).value
    return ctx.theta(E.z, char).value * ctx.theta(-E.z, char).value / (t0 ** 2 * E.squared)


def log_hessian_at(ctx: KernelContext, z, char) -> np.ndarray:
    return ctx.theta(z, char, derivs=2).log_hessian()


def omega_from_z(ctx: KernelContext, z, vP, vQ) -> complex:
    """omega = -sum_kl d_k d_l log theta[gamma](z) v_k(P) v_l(Q)."""
    H = log_hessian_at(ctx, z, ctx.gamma)
    return complex(-(vP @ H @ vQ))


def _small_abel(ctx, a, mu_a, b):
    """int_a^b dv along a short straight segment, with mu continued from (a, mu_a)."""
    x, w = gauss_legendre(16)
    lam = a + 0.5 * (b - a) * (x + 1)
    mu = continue_on_segment(ctx.spec, a, mu_a, lam)
    vals = dv_vector(ctx.spec, ctx.periods, lam, mu)
    return 0.5 * (b - a) * (w @ vals)


def omega_bidifferential(ctx: KernelContext, P, Q, path: AbelPath | None = None,
                         method: str = "hessian", step: float = 1e-4) -> complex:
    """omega(P,Q) per d lambda(P) d lambda(Q).

    ``hessian``: closed form through the theta log-Hessian at z = int_P^Q dv.
    ``finite_difference``: mixed central difference of log theta[gamma](z(P',Q'))
    in the lambda charts (the half-differential factors of E drop out of the
    mixed difference), Richardson-extrapolated over steps h and h/2.
    """
    path, z = _abel(ctx, P, Q, path)
    if method == "hessian":
        return omega_from_z(ctx, z, ctx.dv(P), ctx.dv(Q))
    if method != "finite_difference":
        raise ValueError(f"unknown method {method!r}")
    scale = max(1.0, abs(complex(P.lam)), abs(complex(Q.lam)))

    def mixed(h):
        if h < 1e-12 * scale:
            raise StepUnderflow(f"step {h:.3g} too small for finite differences")
        dP = {s: _small_abel(ctx, complex(P.lam), complex(P.mu), P.lam + s * h) for s in (1, -1)}
        dQ = {s: _small_abel(ctx, complex(Q.lam), complex(Q.mu), Q.lam + s * h) for s in (1, -1)}
        val = {}
        for sp in (1, -1):
            for sq in (1, -1):
                val[sp, sq] = ctx.theta(z - dP[sp] + dQ[sq], ctx.gamma).value
        ratio = val[1, 1] * val[-1, -1] / (val[1, -1] * val[-1, 1])
        return np.log(ratio) / (4 * h * h)

    h = step * scale
    d1, d2 = mixed(h), mixed(h / 2)
    return complex((4 * d2 - d1) / 3)


def omega_period(ctx: KernelContext, contour, Q: SurfacePoint) -> complex:
    """int over a closed contour (in the P slot) of omega(P, Q)."""
    spec = ctx.spec
    start = SurfacePoint(contour.vertices[0], contour.start_mu)
    z0 = abel_integral(spec, ctx.periods, path_between(spec, start, Q)).value
    vQ = ctx.dv(Q)
    pieces, _ = contour_pieces(spec, contour)
    f = lambda lam, mu: dv_vector(spec, ctx.periods, lam, mu)
    disc, _ = discretize_path(spec, pieces, f, ctx.periods.cfg)
    vP = f(disc.lam, disc.mu)
    zs = z0[None, :] - disc.cumulative(vP)
    vals = np.array([omega_from_z(ctx, zs[i], vP[i], vQ) for i in range(len(zs))])
    return complex(disc.weights @ vals)
