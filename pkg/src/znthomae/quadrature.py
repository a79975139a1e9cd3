"""Adaptive Gauss-Legendre quadrature along piecewise-linear lambda paths.

Every straight piece of a path is mapped from a parameter sigma in [0, 1]
(ordered along the path).  Three maps are used:

* ``line``      lambda = a + sigma (b - a)
* ``to_branch`` lambda = b + (a - b)(1 - sigma)^N, ending on the branch point b
* ``to_inf``    lambda = a + d L ((1 - sigma)^(-N) - 1), a ray to infinity

The last two remove the algebraic endpoint behaviour of the holomorphic
differentials, which become smooth in zeta = 1 - sigma.  mu at the nodes comes
from the closed-form continuation along the piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as npleg

from .curve import Contour, CurveSpec, continue_on_segment
from .errors import QuadratureNoConvergence


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_per_panel: int = 64
    panel_split_depth: int = 40
    target_tol: float = 1e-10

    def __post_init__(self):
        if self.nodes_per_panel < 8:
            raise ValueError("nodes_per_panel must be at least 8")


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = npleg.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def integration_matrix(n: int) -> np.ndarray:
    """W with (W f)_i = int_{-1}^{x_i} p(u) du, p the interpolant of f at the GL nodes."""
    x, _ = gauss_legendre(n)
    V = npleg.legvander(x, n - 1)
    Vinv = np.linalg.inv(V)
    # antiderivative of each Legendre basis polynomial, zero at -1
    cols = []
    for k in range(n):
        c = np.zeros(n)
        c[k] = 1.0
        cols.append(npleg.legval(x, npleg.legint(c, lbnd=-1)))
    return np.column_stack(cols) @ Vinv


@dataclass(frozen=True)
class Panel:
    lam: np.ndarray
    mu: np.ndarray
    jac: np.ndarray  # d lambda / d u times GL weight is jac * w


class _Piece:
    def __init__(self, kind, spec, a, b, mu_a, direction=None, scale=None, branch_index=None):
        self.kind, self.spec, self.a, self.b, self.mu_a = kind, spec, a, b, mu_a
        self.direction, self.scale = direction, scale
        self.branch_index = branch_index

    def lam(self, s):
        N = self.spec.N
        if self.kind == "line":
            return self.a + s * (self.b - self.a)
        if self.kind == "to_branch":
            return self.b + (self.a - self.b) * (1 - s) ** N
        return self.a + self.direction * self.scale * ((1 - s) ** (-N) - 1)

    def dlam(self, s):
        N = self.spec.N
        if self.kind == "line":
            return np.full_like(s, self.b - self.a, dtype=complex)
        if self.kind == "to_branch":
            return -N * (self.a - self.b) * (1 - s) ** (N - 1)
        return N * self.direction * self.scale * (1 - s) ** (-N - 1)

    def nodes(self, s0, s1, n):
        x, w = gauss_legendre(n)
        half = 0.5 * (s1 - s0)
        s = s0 + half * (x + 1)
        lam = self.lam(s)
        if self.kind == "to_branch":
            # lambda - b = (a - b) zeta^N is kept exactly; the difference of the
            # rounded lambda and b would lose everything once zeta^N ~ 1e-16
            zeta = 1 - s
            ratio = (lam[..., None] - self.spec.points) / (self.a - self.spec.points)
            ratio[..., self.branch_index - 1] = zeta ** self.spec.N
            logs = np.log(ratio)
            logs[..., self.branch_index - 1] = self.spec.N * np.log(zeta)
            mu = self.mu_a * np.exp(logs @ self.spec.exponents / self.spec.N)
            self.offset = (self.a - self.b) * zeta ** self.spec.N
        else:
            mu = continue_on_segment(self.spec, self.a, self.mu_a, lam)
        return lam, mu, self.dlam(s) * half, w

    def evaluate(self, func, lam, mu):
        """func(lam, mu), or func(lam, mu, offset) on a branch leg when func takes the exact offset."""
        if self.kind == "to_branch" and getattr(func, "uses_offset", False):
            return func(lam, mu, self.offset)
        return func(lam, mu)


def _refine(piece: _Piece, func, cfg: QuadratureConfig):
    n = cfg.nodes_per_panel
    tol = cfg.target_tol
    panels = []
    total = None
    stack = [(0.0, 1.0, 0)]
    diagnostics = []
    while stack:
        s0, s1, depth = stack.pop()
        sm = 0.5 * (s0 + s1)
        lam, mu, jac, w = piece.nodes(s0, s1, n)
        whole = (w * jac) @ piece.evaluate(func, lam, mu)
        parts = []
        for lo, hi in ((s0, sm), (sm, s1)):
            l2, m2, j2, w2 = piece.nodes(lo, hi, n)
            parts.append(((w2 * j2) @ piece.evaluate(func, l2, m2), Panel(l2, m2, j2)))
        split = parts[0][0] + parts[1][0]
        err = float(np.max(np.abs(whole - split)))
        scale = max(1.0, float(np.max(np.abs(split))))
        if err <= tol * scale:
            panels.extend([parts[0][1], parts[1][1]])
            total = split if total is None else total + split
        elif depth >= cfg.panel_split_depth:
            diagnostics.append({"piece": piece.kind, "s0": s0, "s1": s1, "err": err})
            raise QuadratureNoConvergence(
                f"panel [{s0:.3g}, {s1:.3g}] of a {piece.kind} piece did not converge (err={err:.3g})",
                diagnostics,
            )
        else:
            # push right first so panels come out in path order
            stack.append((sm, s1, depth + 1))
            stack.append((s0, sm, depth + 1))
    return panels, total


@dataclass
class Discretization:
    """Quadrature nodes along a whole path, in path order."""

    panels: list
    n: int

    @property
    def lam(self) -> np.ndarray:
        return np.concatenate([p.lam for p in self.panels])

    @property
    def mu(self) -> np.ndarray:
        return np.concatenate([p.mu for p in self.panels])

    @property
    def weights(self) -> np.ndarray:
        _, w = gauss_legendre(self.n)
        return np.concatenate([w * p.jac for p in self.panels])

    def integrate(self, values: np.ndarray) -> np.ndarray:
        return self.weights @ values

    def cumulative(self, values: np.ndarray) -> np.ndarray:
        """Integral from the start of the path up to every node."""
        W = integration_matrix(self.n)
        _, w = gauss_legendre(self.n)
        out = np.empty_like(values, dtype=complex)
        offset = np.zeros(values.shape[1:], dtype=complex)
        for i, p in enumerate(self.panels):
            sl = slice(i * self.n, (i + 1) * self.n)
            g = values[sl] * p.jac.reshape((-1,) + (1,) * (values.ndim - 1))
            out[sl] = offset + W @ g
            offset = offset + np.tensordot(w, g, axes=(0, 0))
        return out


def discretize_path(spec: CurveSpec, pieces, func, cfg: QuadratureConfig):
    """Refine every piece against ``func``; return (Discretization, integral)."""
    panels, total = [], None
    for piece in pieces:
        p, t = _refine(piece, func, cfg)
        panels.extend(p)
        total = t if total is None else total + t
    return Discretization(panels, cfg.nodes_per_panel), total


def contour_pieces(spec: CurveSpec, contour: Contour):
    """Split a contour into line pieces, carrying mu from vertex to vertex."""
    verts = [complex(v) for v in contour.vertices]
    mu = complex(contour.start_mu)
    pieces = []
    for a, b in zip(verts[:-1], verts[1:]):
        if a == b:
            continue
        pieces.append(_Piece("line", spec, a, b, mu))
        mu = complex(continue_on_segment(spec, a, mu, b))
    return pieces, mu


def integrate_contour(spec: CurveSpec, contour: Contour, func: Callable, cfg: QuadratureConfig):
    """Integrate func(lam, mu) d(lambda) along a contour that avoids branch points.

    Returns (integral, discretization, mu at the end of the contour).
    """
    pieces, mu_end = contour_pieces(spec, contour)
    disc, total = discretize_path(spec, pieces, func, cfg)
    return total, disc, mu_end


def integrate_to_branch(spec: CurveSpec, a: complex, mu_a: complex, branch_index: int, func, cfg):
    """Integral of func d(lambda) from the ordinary point a to branch point branch_index (1-based).

    If ``func.uses_offset`` is true it is called as func(lam, mu, offset) with
    offset = lam - l_k computed without cancellation; integrands that contain
    the factor (lam - l_k) should use it instead of the rounded lam.
    """
    b = spec.branch_points[branch_index - 1]
    piece = _Piece("to_branch", spec, complex(a), complex(b), complex(mu_a), branch_index=branch_index)
    return discretize_path(spec, [piece], func, cfg)


def integrate_to_infinity(spec: CurveSpec, a: complex, mu_a: complex, func, cfg, direction: complex = 1.0):
    """Integral of func d(lambda) from a to infinity along the ray a + t*direction."""
    d = complex(direction) / abs(direction)
    scale = max(1.0, abs(a))
    piece = _Piece("to_inf", spec, complex(a), None, complex(mu_a), direction=d, scale=scale)
    return discretize_path(spec, [piece], func, cfg)


def line_piece(spec, a, b, mu_a):
    return _Piece("line", spec, complex(a), complex(b), complex(mu_a))
