"""Riemann theta functions with rational characteristics.

theta[delta; epsilon](z; Pi) = sum_n exp(pi i x.Pi.x + 2 pi i (z + epsilon).x),
x = n + delta.  The sum runs over the shifted lattice points x inside an
ellipsoid centred at the maximum of the Gaussian envelope; gradient and
Hessian are summed term by term from the same points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characteristics import RationalCharacteristic, half_integer_characteristics, is_odd_half
from .errors import DimensionMismatch, NoneFound, NotPositiveDefinite


@dataclass(frozen=True)
class ThetaTruncation:
    """Terms with pi (x - c).Y.(x - c) > radius^2 are dropped.

    The relative tail is then about exp(-radius^2) times the number of lattice
    points near the boundary; the extra 2 ln 10 + 2 absorbs that count and the
    polynomial weights of the derivative sums.
    """

    target_tol: float = 1e-12
    max_condition: float = 1e6

    @property
    def radius(self) -> float:
        return math.sqrt(-math.log(self.target_tol) + 2 * math.log(10) + 2)


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    gradient: np.ndarray | None = None
    hessian: np.ndarray | None = None
    n_terms: int = 0

    def log_gradient(self) -> np.ndarray:
        return self.gradient / self.value

    def log_hessian(self) -> np.ndarray:
        gl = self.gradient / self.value
        return self.hessian / self.value - np.outer(gl, gl)


def _check_pi(Pi) -> np.ndarray:
    Pi = np.asarray(Pi, dtype=complex)
    if Pi.ndim != 2 or Pi.shape[0] != Pi.shape[1]:
        raise DimensionMismatch(f"period matrix must be square, got shape {Pi.shape}")
    return Pi


def _cholesky_upper(Y: np.ndarray, max_condition: float) -> np.ndarray:
    Ys = 0.5 * (Y + Y.T)
    eig = np.linalg.eigvalsh(Ys)
    if eig[0] <= 0:
        raise NotPositiveDefinite(f"Im Pi has smallest eigenvalue {eig[0]:.3g}")
    if eig[-1] / eig[0] > max_condition:
        raise NotPositiveDefinite(f"Im Pi condition number {eig[-1] / eig[0]:.3g} exceeds {max_condition:g}")
    return np.linalg.cholesky(Ys).T  # Y = R^T R, R upper triangular


def ellipsoid_points(R: np.ndarray, centre: np.ndarray, radius2: float) -> np.ndarray:
    """Integer vectors n with |R (n - centre)|^2 <= radius2, R upper triangular."""
    g = R.shape[0]
    # build coordinates from the last one backwards; rows carry (n_i.., partial sum)
    pts = np.zeros((1, 0), dtype=np.int64)
    # partial[j] = sum over processed rows of squared contributions
    partial = np.zeros(1)
    # inner[i] for each candidate: sum_{j>i} R_ij (n_j - c_j), needed row by row
    for i in range(g - 1, -1, -1):
        # contribution of already fixed coordinates j > i to row i
        if pts.shape[1]:
            tail = (pts - centre[i + 1:]) @ R[i, i + 1:]
        else:
            tail = np.zeros(len(pts))
        new_pts, new_partial = [], []
        rem = radius2 - partial
        ok = rem >= 0
        span = np.sqrt(np.where(ok, rem, 0.0)) / R[i, i]
        mid = centre[i] - tail / R[i, i]
        lo = np.ceil(mid - span).astype(np.int64)
        hi = np.floor(mid + span).astype(np.int64)
        for row in np.flatnonzero(ok & (hi >= lo)):
            ns = np.arange(lo[row], hi[row] + 1)
            contrib = (R[i, i] * (ns - centre[i]) + tail[row]) ** 2
            new_pts.append(np.column_stack([ns, np.repeat(pts[row:row + 1], len(ns), axis=0)]))
            new_partial.append(partial[row] + contrib)
        if not new_pts:
            return np.zeros((0, g), dtype=np.int64)
        pts = np.vstack(new_pts)
        partial = np.concatenate(new_partial)
    return pts


@lru_cache(maxsize=256)
def _lattice(pi_key: bytes, g: int, delta_key: tuple, centre_key: tuple, radius: float, max_condition: float):
    Y = np.frombuffer(pi_key, dtype=complex).reshape(g, g).imag
    R = _cholesky_upper(Y, max_condition)
    delta = np.array(delta_key)
    centre = np.array(centre_key)
    n = ellipsoid_points(R, centre - delta, radius ** 2 / math.pi)
    return n + delta


def _float_char(char, g: int):
    if char is None:
        return np.zeros(g), np.zeros(g)
    if isinstance(char, RationalCharacteristic):
        d, e = char.as_float()
    else:
        d, e = (np.asarray(c, dtype=float) for c in char)
    if len(d) != g or len(e) != g:
        raise DimensionMismatch(f"characteristic of length {len(d)} for genus {g}")
    return d, e


def theta(z, Pi, char=None, trunc: ThetaTruncation | None = None, derivs: int = 0) -> ThetaValue:
    """theta[char](z; Pi) with optional gradient (derivs >= 1) and Hessian (derivs >= 2)."""
    trunc = trunc or ThetaTruncation()
    Pi = _check_pi(Pi)
    g = Pi.shape[0]
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (g,):
        raise DimensionMismatch(f"z has shape {z.shape}, expected ({g},)")
    delta, eps = _float_char(char, g)
    Y = Pi.imag
    # envelope |term| = exp(-pi (x + c).Y.(x + c) + const), c = Y^{-1} Im z
    c = np.linalg.solve(0.5 * (Y + Y.T), z.imag)
    # round the centre so nearby z reuse the lattice; widen the radius to compensate
    step = 0.25
    c_key = tuple(np.round(-c / step) * step)
    R = _cholesky_upper(Y, trunc.max_condition)
    shift = float(np.linalg.norm(R @ (np.array(c_key) + c)))
    radius = trunc.radius + math.sqrt(math.pi) * shift
    radius = math.ceil(radius * 4) / 4
    x = _lattice(Pi.tobytes(), g, tuple(delta), c_key, radius, trunc.max_condition)
    # subtract the envelope maximum to keep exponents bounded
    expo = 1j * np.pi * np.einsum("ni,ij,nj->n", x, Pi, x) + 2j * np.pi * (x @ (z + eps))
    peak = float(np.max(expo.real)) if len(expo) else 0.0
    terms = np.exp(expo - peak)
    scale = math.exp(peak)
    value = complex(terms.sum()) * scale
    grad = hess = None
    if derivs >= 1:
        grad = (2j * np.pi) * (terms @ x) * scale
    if derivs >= 2:
        hess = (2j * np.pi) ** 2 * np.einsum("n,ni,nj->ij", terms, x, x) * scale
    return ThetaValue(value, grad, hess, len(x))


def theta_constant(Pi, char=None, trunc=None, derivs: int = 0) -> ThetaValue:
    Pi = _check_pi(Pi)
    return theta(np.zeros(Pi.shape[0]), Pi, char, trunc, derivs)


def heat_residual(z, Pi, char, k: int, l: int, step: float = 1e-6, trunc=None) -> complex:
    """Hessian entry (k, l) minus 2 pi i (1 + delta_kl) d theta / d Pi_kl (0-based k, l).

    The Pi derivative is a central difference along the symmetric direction
    E_kl + E_lk (or E_kk on the diagonal).
    """
    Pi = _check_pi(Pi)
    lhs = theta(z, Pi, char, trunc, derivs=2).hessian[k, l]
    E = np.zeros_like(Pi)
    E[k, l] = 1.0
    E[l, k] = 1.0
    plus = theta(z, Pi + step * E, char, trunc).value
    minus = theta(z, Pi - step * E, char, trunc).value
    dtheta = (plus - minus) / (2 * step)
    return lhs - 2j * np.pi * (1 + (k == l)) * dtheta


def _shift(Pi, m_int, m_prime):
    return np.asarray(m_prime, dtype=float) + Pi @ np.asarray(m_int, dtype=float)


def periodicity_residual(z, Pi, char, m_int, m_int_prime, trunc=None) -> complex:
    """theta(z + m' + Pi m) minus a literal automorphic factor times theta(z).

    The factor used is exp(-2 pi i <m', z + Pi m'/2> - 2 pi i <epsilon, m'>).
    It agrees with the standard law only for m' = 0 or special data; see
    ``periodicity_residual_standard`` for the textbook identity.
    """
    Pi = _check_pi(Pi)
    z = np.asarray(z, dtype=complex)
    _, eps = _float_char(char, Pi.shape[0])
    mp = np.asarray(m_int_prime, dtype=float)
    lhs = theta(z + _shift(Pi, m_int, m_int_prime), Pi, char, trunc).value
    factor = np.exp(-2j * np.pi * mp @ (z + 0.5 * Pi @ mp) - 2j * np.pi * eps @ mp)
    return lhs - factor * theta(z, Pi, char, trunc).value


def periodicity_residual_standard(z, Pi, char, m_int, m_int_prime, trunc=None) -> complex:
    """theta(z + m' + Pi m) - exp(2 pi i (<delta,m'> - <epsilon,m>) - pi i <m,Pi m> - 2 pi i <m,z>) theta(z)."""
    Pi = _check_pi(Pi)
    z = np.asarray(z, dtype=complex)
    delta, eps = _float_char(char, Pi.shape[0])
    m = np.asarray(m_int, dtype=float)
    mp = np.asarray(m_int_prime, dtype=float)
    lhs = theta(z + _shift(Pi, m_int, m_int_prime), Pi, char, trunc).value
    factor = np.exp(2j * np.pi * (delta @ mp - eps @ m) - 1j * np.pi * m @ Pi @ m - 2j * np.pi * m @ z)
    return lhs - factor * theta(z, Pi, char, trunc).value


def find_odd_nonsingular_half_characteristic(Pi, trunc=None, threshold: float = 1e-6) -> RationalCharacteristic:
    """Odd half-integer characteristic with the largest theta gradient at 0."""
    Pi = _check_pi(Pi)
    g = Pi.shape[0]
    best, best_norm = None, 0.0
    for char in half_integer_characteristics(g):
        if not is_odd_half(char):
            continue
        tv = theta_constant(Pi, char, trunc, derivs=1)
        norm = float(np.linalg.norm(tv.gradient))
        if norm > best_norm:
            best, best_norm = char, norm
    scale = max(1.0, float(abs(theta_constant(Pi, None, trunc).value)))
    if best is None or best_norm <= threshold * scale:
        raise NoneFound("no odd half characteristic with non-vanishing theta gradient")
    return best

