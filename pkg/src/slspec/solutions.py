"""Regular and singular solutions of -y'' + (a(a+1)/x^2 + q) y = lam y.

Both solutions are fixed points of Volterra integral equations with the
zero-potential Green kernel G(x,t) = v(x)u(t) - u(x)v(t) and are computed by
Picard iteration on the grid:

    phi  = u + int_0^x G q phi dt        (regular,  phi ~ x^(a+1) at 0)
    psit = v - int_x^1 G q psit dt       (singular, psit ~ -x^-a/(2a+1) at 0)

The kernel is kept in separated form, so each sweep costs two running
integrals.  The singular iteration runs on the scaled field m = x^a psit,
which is smooth up to x = 0; the one genuinely singular integrand,
v q psit ~ t^-2a, is handled by the power-weighted product quadrature.
Raw psit and psit' carry a 0.0 placeholder at node 0 when a >= 1 (the true
values diverge there); `origin_defined` records whether node 0 is a sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bessel import FundamentalPair
from .errors import NearDegenerateError, PicardDivergenceError, WronskianAccuracyError
from .numerics import Grid, GridFn, cumulative_prefix, cumulative_suffix, weighted_suffix
from .potentials import Potential

__all__ = ["SolutionPair", "solve_regular", "solve_singular", "wronskian", "psi", "solve_pair"]

MAX_PICARD_ITERATIONS = 60
PICARD_TOL = 1e-13
WRONSKIAN_SPREAD_TOL = 1e-4
WRONSKIAN_FLOOR = 1e-8


@dataclass(frozen=True)
class SolutionPair:
    """Sampled solution basis at one (a, lambda, q), plus the wronskian."""

    order: int
    lam: float
    q: Potential
    phi: GridFn
    phi_prime: GridFn
    psi_tilde: GridFn
    psi_tilde_prime: GridFn
    psi_tilde_scaled: GridFn  # x^a psi~, finite on all of [0,1]
    wronskian: float
    wronskian_spread: float
    origin_defined: bool  # node 0 of psi_tilde/psi_tilde_prime is a true sample
    phi_iterations: int
    psi_iterations: int

    @property
    def grid(self) -> Grid:
        return self.phi.grid


class _Workspace:
    """Fundamental-pair arrays on the grid for one (a, lambda)."""

    def __init__(self, a: int, lam: float, grid: Grid):
        self.a = a
        self.lam = lam
        self.grid = grid
        pair = FundamentalPair(a, lam)
        self.pair = pair
        x = grid.x
        self.u = np.asarray(pair.u(x))
        self.up = np.asarray(pair.u_prime(x))
        v = np.empty(grid.n_points)
        vp = np.empty(grid.n_points)
        v[1:] = pair.v(x[1:])
        vp[1:] = pair.v_prime(x[1:])
        if a == 0:
            v[0] = float(pair.v(np.array(0.0)))
            vp[0] = 0.0  # v is even at the origin when a = 0
        else:
            v[0] = 0.0  # placeholder, never a sample
            vp[0] = 0.0
        self.v = v
        self.vp = vp
        self.v_scaled = np.asarray(pair.v_scaled(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            u_over = np.where(x > 0, self.u * x ** (-float(a)), 0.0)
        u_over[0] = 0.0
        self.u_over_xa = u_over  # u / x^a, vanishes like x at 0
        self.u_times_xa = self.u * x ** float(a)


def _picard_regular(ws: _Workspace, qv: np.ndarray):
    grid, u, v = ws.grid, ws.u, ws.v
    h = grid.h
    phi = u.copy()
    sup = float(np.max(np.abs(phi)))
    for it in range(1, MAX_PICARD_ITERATIONS + 1):
        pa = cumulative_prefix(u * qv * phi, h)
        pb = cumulative_prefix(v * qv * phi, h)
        new = u * (1.0 - pb) + v * pa
        new[0] = 0.0
        delta = float(np.max(np.abs(new - phi)))
        phi = new
        sup = float(np.max(np.abs(phi)))
        if delta <= PICARD_TOL * (1.0 + sup):
            return phi, pa, pb, it
    raise PicardDivergenceError(
        f"regular solve did not converge in {MAX_PICARD_ITERATIONS} sweeps "
        f"(a={ws.a}, lam={ws.lam:.6g}); grid too coarse for this potential"
    )


def _picard_singular(ws: _Workspace, qv: np.ndarray):
    grid, a = ws.grid, ws.a
    h = grid.h
    vM, uM = ws.v_scaled, ws.u_times_xa
    m = vM.copy()
    for it in range(1, MAX_PICARD_ITERATIONS + 1):
        sa = cumulative_suffix(ws.u_over_xa * qv * m, h)
        sb = weighted_suffix(vM * qv * m, grid, -2 * a)
        new = vM * (1.0 - sa) + uM * sb
        delta = float(np.max(np.abs(new - m)))
        m = new
        if delta <= PICARD_TOL * (1.0 + float(np.max(np.abs(m)))):
            return m, sa, sb, it
    raise PicardDivergenceError(
        f"singular solve did not converge in {MAX_PICARD_ITERATIONS} sweeps "
        f"(a={ws.a}, lam={ws.lam:.6g}); grid too coarse for this potential"
    )


def solve_pair(a: int, lam: float, q: Potential) -> SolutionPair:
    """Both solutions, their derivatives, and the wronskian at one lambda."""
    grid = q.grid
    x = grid.x
    qv = q.samples.values
    ws = _Workspace(a, float(lam), grid)

    phi, pa, pb, it_phi = _picard_regular(ws, qv)
    phip = ws.up * (1.0 - pb) + ws.vp * pa
    phip[0] = ws.up[0]

    m, sa, sb, it_psi = _picard_singular(ws, qv)
    psit = np.empty(grid.n_points)
    psitp = np.empty(grid.n_points)
    with np.errstate(divide="ignore"):
        psit[1:] = m[1:] * x[1:] ** (-float(a))
    psitp[1:] = ws.vp[1:] * (1.0 - sa[1:]) + ws.up[1:] * sb[1:]
    if a == 0:
        psit[0] = m[0]
        psitp[0] = ws.vp[0] * (1.0 - sa[0]) + ws.up[0] * sb[0]
    else:
        psit[0] = 0.0
        psitp[0] = 0.0

    third = grid.n_points // 3
    mid = slice(third, 2 * third)
    warr = phi[mid] * psitp[mid] - phip[mid] * psit[mid]
    w = float(np.mean(warr))
    spread = float(np.ptp(warr))
    if spread > WRONSKIAN_SPREAD_TOL * (1.0 + abs(w)):
        raise WronskianAccuracyError(
            f"wronskian spread {spread:.3e} at a={a}, lam={lam:.6g}"
        )

    return SolutionPair(
        order=a,
        lam=float(lam),
        q=q,
        phi=GridFn(grid, phi),
        phi_prime=GridFn(grid, phip),
        psi_tilde=GridFn(grid, psit),
        psi_tilde_prime=GridFn(grid, psitp),
        psi_tilde_scaled=GridFn(grid, m),
        wronskian=w,
        wronskian_spread=spread,
        origin_defined=(a == 0),
        phi_iterations=it_phi,
        psi_iterations=it_psi,
    )


def solve_regular(a: int, lam: float, q: Potential) -> tuple[GridFn, GridFn]:
    """Regular solution phi and its x-derivative."""
    grid = q.grid
    ws = _Workspace(a, float(lam), grid)
    phi, pa, pb, _ = _picard_regular(ws, q.samples.values)
    phip = ws.up * (1.0 - pb) + ws.vp * pa
    phip[0] = ws.up[0]
    return GridFn(grid, phi), GridFn(grid, phip)


def solve_singular(a: int, lam: float, q: Potential) -> tuple[GridFn, GridFn]:
    """Singular solution psi~ and derivative (node 0 is a placeholder for a >= 1)."""
    pair = solve_pair(a, lam, q)
    return pair.psi_tilde, pair.psi_tilde_prime


def wronskian(a: int, lam: float, q: Potential) -> float:
    """W(lam, q) = phi psit' - phi' psit, averaged over the middle third."""
    return solve_pair(a, lam, q).wronskian


def psi(a: int, lam: float, q: Potential) -> GridFn:
    """Normalized singular solution psi = psi~ / W, so that W(phi, psi) = 1."""
    pair = solve_pair(a, lam, q)
    return psi_from_pair(pair)


def psi_from_pair(pair: SolutionPair) -> GridFn:
    if abs(pair.wronskian) <= WRONSKIAN_FLOOR:
        raise NearDegenerateError(
            f"wronskian {pair.wronskian:.3e} too close to zero at lam={pair.lam:.6g}"
        )
    return GridFn(pair.grid, pair.psi_tilde.values / pair.wronskian)
