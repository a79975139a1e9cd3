"""Homology cycles, period matrices and the Rauch variation of the period matrix.

Only the first-sheet cycles alpha_k, beta_k (k = 1..m) are integrated.  The
remaining periods follow from the Z_N action, which is encoded in the twist
matrices R_A and R_B.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .curve import Contour, CurveSpec, _check_off_branch, mu_roots, sheet_one_mu
from .errors import ContourDegenerate, ResidueExtractionUnstable, SymmetryViolation
from .quadrature import QuadratureConfig, integrate_contour

# Orientation of the realised cycles.  Both loops run anticlockwise; with this
# choice alpha_k . beta_k = +1 and the period matrix lands in the Siegel
# half-space (checked against the closed-form genus-two trigonal example).
ALPHA_ORIENTATION = +1
BETA_ORIENTATION = +1

# alpha loops sit at h = 0.25 * (minimum branch-point gap); beta loops at h / 2
ALPHA_OFFSET = 0.25
BETA_OFFSET = 0.125


def du_vector(spec: CurveSpec, lam, mu, near: tuple | None = None) -> np.ndarray:
    """All holomorphic differentials du_{j+sm} = lam^(j-1) q^s / mu^(s+1) per d(lambda).

    Returns an array of shape lam.shape + (g,); column j-1+s*m holds du_{j+sm}.
    ``near = (k, offset)`` supplies lam - l_k exactly (used next to l_k).
    """
    lam = np.asarray(lam, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    if near is None:
        q = spec.q(lam)
    else:
        k, offset = near
        diffs = lam[..., None] - spec.points
        diffs[..., k - 1] = offset
        q = np.prod(diffs[..., 1::2], axis=-1)
    cols = []
    for s in range(spec.N - 1):
        base = q ** s / mu ** (s + 1)
        for j in range(1, spec.m + 1):
            cols.append(lam ** (j - 1) * base)
    return np.stack(cols, axis=-1)


def holomorphic_differential(spec: CurveSpec, P, j: int, s: int) -> complex:
    """Coefficient of d(lambda) in du_{j+sm} at P (j = 1..m, s = 0..N-2)."""
    if not (1 <= j <= spec.m and 0 <= s <= spec.N - 2):
        raise IndexError(f"no differential du_(j={j}, s={s}) for N={spec.N}, m={spec.m}")
    _check_off_branch(spec, P.lam)
    lam, mu = complex(P.lam), complex(P.mu)
    return lam ** (j - 1) * complex(spec.q(lam)) ** s / mu ** (s + 1)


def _root(N: int, k: int) -> complex:
    return cmath.exp(2j * math.pi * (k % N) / N)


def twist_matrices(N: int, m: int):
    """(R_A, R_B) of size (N-1)m.

    Entries are assembled as exact sums of roots of unity (exponents kept mod N):
    R_A[i,k] = rho^(-i(k-1)) and R_B[i,k] = sum_{r<k} rho^(-ir), which are the
    closed forms of the two displayed quotients.
    """
    n = N - 1
    ra = np.empty((n, n), dtype=complex)
    rb = np.empty((n, n), dtype=complex)
    for i in range(1, N):
        for k in range(1, N):
            ra[i - 1, k - 1] = _root(N, -i * (k - 1))
            rb[i - 1, k - 1] = sum(_root(N, -i * r) for r in range(k))
    eye = np.eye(m)
    return np.kron(ra, eye), np.kron(rb, eye)


def twist_matrices_quotient(N: int, m: int):
    """The quotient formulas for R_A, R_B evaluated literally in floating point."""
    rho = cmath.exp(2j * math.pi / N)
    n = N - 1
    ra = np.empty((n, n), dtype=complex)
    rb = np.empty((n, n), dtype=complex)
    for i in range(1, N):
        for k in range(1, N):
            ra[i - 1, k - 1] = (rho ** (-i * (k - 1)) - rho ** (-i * k)) / (1 - rho ** (-i))
            rb[i - 1, k - 1] = (rho ** (-i * (k - 1)) - rho ** (-i * (N - 1))) / (1 - rho ** (-(N - 1) * i))
    eye = np.eye(m)
    return np.kron(ra, eye), np.kron(rb, eye)


def _rectangle(x_left: float, x_right: float, h: float, orientation: int) -> tuple:
    verts = [x_right + 1j * h, x_left + 1j * h, x_left - 1j * h, x_right - 1j * h, x_right + 1j * h]
    if orientation < 0:
        verts = verts[::-1]
    return tuple(complex(v) for v in verts)


def _check_gaps(spec: CurveSpec):
    h = ALPHA_OFFSET * spec.min_gap
    if h <= 10 * spec.eps_sep:
        raise ContourDegenerate(f"branch points too close for contour offset h={h:.3g}")
    return h


def alpha_contour(spec: CurveSpec, k: int, max_step: float | None = None) -> Contour:
    """Anticlockwise rectangle around the cuts (l_1,l_2) u ... u (l_{2k-1},l_{2k}) on the reference sheet."""
    if not 1 <= k <= spec.m:
        raise IndexError(k)
    h = _check_gaps(spec)
    lam = spec.points
    verts = _rectangle(lam[0] - h, lam[2 * k - 1] + h, h, ALPHA_ORIENTATION)
    step = max_step or h / 4
    return Contour(verts, complex(sheet_one_mu(spec, verts[0])), step)


def beta_contour(spec: CurveSpec, k: int, max_step: float | None = None) -> Contour:
    """Loop around the gap [l_{2k}, l_{2k+1}].

    The upper half lies on the reference sheet; passing anticlockwise round
    l_{2k} moves the lower half to the sheet mu -> rho^(-1) mu, and passing
    round l_{2k+1} brings it back, so the loop closes.
    """
    if not 1 <= k <= spec.m:
        raise IndexError(k)
    h = _check_gaps(spec)
    hb = h * BETA_OFFSET / ALPHA_OFFSET
    lam = spec.points
    verts = _rectangle(lam[2 * k - 1] - h, lam[2 * k] + h, hb, BETA_ORIENTATION)
    step = max_step or hb / 4
    return Contour(verts, complex(sheet_one_mu(spec, verts[0])), step)


@dataclass(frozen=True)
class BlockPeriods:
    a_blocks: tuple
    b_blocks: tuple
    conditions: tuple = ()


@dataclass(frozen=True)
class PeriodData:
    spec: CurveSpec
    a_full: np.ndarray
    b_full: np.ndarray
    pi_matrix: np.ndarray
    a_inverse: np.ndarray
    blocks: BlockPeriods
    symmetry_error: float = 0.0
    cfg: QuadratureConfig = field(default_factory=QuadratureConfig)

    @property
    def genus(self) -> int:
        return self.pi_matrix.shape[0]


def cycle_integrals(spec: CurveSpec, cfg: QuadratureConfig):
    """Integrals of (du_1..du_g) over alpha_1..alpha_m and beta_1..beta_m (as columns)."""
    f = lambda lam, mu: du_vector(spec, lam, mu)
    a_cols, b_cols = [], []
    for k in range(1, spec.m + 1):
        a_val, _, _ = integrate_contour(spec, alpha_contour(spec, k), f, cfg)
        b_val, _, _ = integrate_contour(spec, beta_contour(spec, k), f, cfg)
        a_cols.append(a_val)
        b_cols.append(b_val)
    return np.column_stack(a_cols), np.column_stack(b_cols)


def block_period_matrices(spec: CurveSpec, cfg: QuadratureConfig | None = None) -> BlockPeriods:
    """A_{s+1}[k, j] = int_{alpha_j} du_{k+ms} and likewise B_{s+1}, for s = 0..N-2."""
    cfg = cfg or QuadratureConfig()
    a_cols, b_cols = cycle_integrals(spec, cfg)
    m = spec.m
    a_blocks = tuple(a_cols[s * m:(s + 1) * m, :] for s in range(spec.N - 1))
    b_blocks = tuple(b_cols[s * m:(s + 1) * m, :] for s in range(spec.N - 1))
    conds = tuple(float(np.linalg.cond(a)) for a in a_blocks)
    return BlockPeriods(a_blocks, b_blocks, conds)


def _block_diag(blocks) -> np.ndarray:
    m = blocks[0].shape[0]
    n = len(blocks)
    out = np.zeros((n * m, n * m), dtype=complex)
    for s, b in enumerate(blocks):
        out[s * m:(s + 1) * m, s * m:(s + 1) * m] = b
    return out


def assemble_period_data(spec: CurveSpec, blocks: BlockPeriods, cfg=None, sym_tol: float = 1e-6) -> PeriodData:
    ra, rb = twist_matrices(spec.N, spec.m)
    a_full = _block_diag(blocks.a_blocks) @ ra
    b_full = _block_diag(blocks.b_blocks) @ rb
    inner = _block_diag([np.linalg.solve(a, b) for a, b in zip(blocks.a_blocks, blocks.b_blocks)])
    pi = np.linalg.solve(ra, inner @ rb)
    norm = float(np.max(np.sum(np.abs(pi), axis=1)))
    asym = float(np.max(np.sum(np.abs(pi - pi.T), axis=1))) / norm
    if asym > sym_tol:
        raise SymmetryViolation(
            f"period matrix asymmetry {asym:.3g} exceeds {sym_tol:g}; cycle orientation is inconsistent"
        )
    pi = 0.5 * (pi + pi.T)
    return PeriodData(
        spec=spec,
        a_full=a_full,
        b_full=b_full,
        pi_matrix=pi,
        a_inverse=np.linalg.inv(a_full),
        blocks=blocks,
        symmetry_error=asym,
        cfg=cfg or QuadratureConfig(),
    )


def period_matrix(spec: CurveSpec, cfg: QuadratureConfig | None = None) -> PeriodData:
    cfg = cfg or QuadratureConfig()
    return assemble_period_data(spec, block_period_matrices(spec, cfg), cfg)


def normalized_differentials(spec: CurveSpec, P, periods: PeriodData) -> np.ndarray:
    """dv = A^{-1} du at P (per d lambda), so that int_{alpha_j} dv_i = delta_ij."""
    _check_off_branch(spec, P.lam)
    return periods.a_inverse @ du_vector(spec, complex(P.lam), complex(P.mu))


def dv_vector(spec: CurveSpec, periods: PeriodData, lam, mu) -> np.ndarray:
    """Vectorised dv at many points: shape lam.shape + (g,)."""
    return du_vector(spec, lam, mu) @ periods.a_inverse.T


def dv_integrand_near(spec: CurveSpec, periods: PeriodData, k: int):
    """dv integrand for integrate_to_branch towards l_k, using the exact offset."""

    def f(lam, mu, offset=None):
        near = None if offset is None else (k, offset)
        return du_vector(spec, lam, mu, near) @ periods.a_inverse.T

    f.uses_offset = True
    return f


def _sheet_sum_dvdv(spec, periods, lam_pts):
    out = np.zeros((len(lam_pts), periods.genus, periods.genus), dtype=complex)
    for n, lam in enumerate(lam_pts):
        for mu in mu_roots(spec, lam):
            v = dv_vector(spec, periods, lam, mu)
            out[n] += np.outer(v, v)
    return out


def _circle_residue(spec, periods, centre, radius, n_nodes):
    ang = 2 * np.pi * np.arange(n_nodes) / n_nodes
    z = radius * np.exp(1j * ang)
    vals = _sheet_sum_dvdv(spec, periods, centre + z)
    # residue = coefficient of z^-1 = mean of F(z) * z over the circle
    return np.tensordot(z, vals, axes=(0, 0)) / n_nodes


def rauch_derivative(spec: CurveSpec, periods: PeriodData, k: int, cfg=None, n_nodes: int = 64,
                     tol: float = 1e-9) -> np.ndarray:
    """d Pi / d lambda_k = 2 pi i res_{lambda=lambda_k} sum_sheets dv dv / d(lambda)^2.

    The sheet sum is single-valued in lambda; its Laurent coefficient is read
    off by a trapezoidal DFT on circles of radius r and r/2.
    """
    if not 1 <= k <= 2 * spec.m + 1:
        raise IndexError(k)
    centre = spec.branch_points[k - 1]
    others = np.delete(spec.points, k - 1)
    r = 0.1 * float(np.min(np.abs(others - centre)))
    res1 = _circle_residue(spec, periods, centre, r, n_nodes)
    res2 = _circle_residue(spec, periods, centre, r / 2, n_nodes)
    scale = max(1.0, float(np.max(np.abs(res1))))
    if float(np.max(np.abs(res1 - res2))) > tol * scale:
        raise ResidueExtractionUnstable(
            f"residue changed by {np.max(np.abs(res1 - res2)):.3g} between radii {r:.3g} and {r / 2:.3g}"
        )
    return 2j * np.pi * res2
