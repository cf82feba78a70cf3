"""Forward spectral map, its differential, the explicit inverse differential,
quasi-Newton potential recovery, and isospectral tangent/normal projections.

The forward map sends q to (mean q, (lam_tilde_n), (n kappa_n)) truncated at
N modes.  Its differential pairs a direction v against the gradient fields

    d(q)(v) = ( <1, v>, (<grad lam_n - 1, v>)_n, (n <grad kappa_n, v>)_n )

and is inverted explicitly, coordinate by coordinate, by the biorthogonal
dual fields:

    inverse(eta0, eta, xi) = eta0 + sum eta_n W_n + sum (xi_n / n) V_n.

Recovery iterates q <- q + inverse(target - forward(q)); with the inverse
differential evaluated at the current iterate this is a full Newton step,
and near the target it contracts fast.  Truncation at N modes means the
recovered potential agrees with the target potential only up to the
unconstrained high-mode directions; the data residual itself is driven to
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import GridFn, RealSeq, inner, integrate
from .potentials import Potential
from .spectrum import SpectralData, eigen_data, spectral_map

__all__ = [
    "SpectralTarget",
    "RecoveryReport",
    "forward",
    "differential_apply",
    "inverse_differential_apply",
    "recover",
    "iso_tangent",
    "iso_normal",
]


@dataclass(frozen=True)
class SpectralTarget:
    """Target spectral data for recovery (same shape as SpectralData)."""

    order: int
    n_modes: int
    mean: float
    lambda_tilde: RealSeq
    n_kappa: RealSeq

    @classmethod
    def from_spectral_data(cls, sd: SpectralData) -> "SpectralTarget":
        return cls(
            order=sd.order,
            n_modes=sd.n_modes,
            mean=sd.mean,
            lambda_tilde=sd.lambda_tilde,
            n_kappa=sd.n_kappa,
        )

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralTarget":
        return cls.from_spectral_data(SpectralData.from_dict(d))


@dataclass
class RecoveryReport:
    iterations: int
    data_residual_history: list[float]
    final_potential: Potential
    converged: bool


def forward(a: int, q: Potential, n_modes: int) -> SpectralData:
    """The spectral map value at q (delegates to the spectrum machinery)."""
    return spectral_map(a, q, n_modes)


def differential_apply(
    a: int, q: Potential, v: GridFn, n_modes: int
) -> tuple[float, RealSeq, RealSeq]:
    """Directional derivative of the spectral map at q in direction v."""
    d_mean = integrate(v)
    d_lt = np.empty(n_modes)
    d_nk = np.empty(n_modes)
    for n in range(1, n_modes + 1):
        mode = eigen_data(a, q, n)
        d_lt[n - 1] = inner(mode.grad_lambda, v) - d_mean
        d_nk[n - 1] = n * inner(mode.grad_kappa, v)
    return d_mean, RealSeq(d_lt), RealSeq(d_nk)


def _seq_entries(seq, n_modes: int) -> np.ndarray:
    e = seq.entries if isinstance(seq, RealSeq) else np.asarray(seq, float)
    if len(e) != n_modes:
        raise ValueError(f"expected {n_modes} entries, got {len(e)}")
    return e


def inverse_differential_apply(a: int, q: Potential, eta0: float, eta, xi) -> GridFn:
    """eta0 + sum eta_n W_n + sum (xi_n / n) V_n on the grid of q."""
    eta = np.asarray(eta.entries if isinstance(eta, RealSeq) else eta, float)
    xi = np.asarray(xi.entries if isinstance(xi, RealSeq) else xi, float)
    if len(eta) != len(xi):
        raise ValueError("eta and xi must have the same length")
    out = np.full(q.grid.n_points, float(eta0))
    for n in range(1, len(eta) + 1):
        mode = eigen_data(a, q, n)
        out += eta[n - 1] * mode.w_field.values
        out += (xi[n - 1] / n) * mode.v_field.values
    return GridFn(q.grid, out)


def _residual_vector(target: SpectralTarget, sd: SpectralData) -> tuple[float, np.ndarray, np.ndarray]:
    n = target.n_modes
    d_mean = target.mean - sd.mean
    d_lt = _seq_entries(target.lambda_tilde, n) - sd.lambda_tilde.entries
    d_nk = _seq_entries(target.n_kappa, n) - sd.n_kappa.entries
    return d_mean, d_lt, d_nk


def recover(
    a: int,
    target: SpectralTarget,
    q0: Potential | None = None,
    tol: float = 1e-6,
    max_iter: int = 30,
    grid=None,
    frozen: bool = False,
) -> RecoveryReport:
    """Quasi-Newton recovery of a potential from truncated spectral data.

    Iterates q <- q + step * inverse_differential(target - forward(q)).
    The inverse differential is evaluated at the current iterate unless
    `frozen` pins it at q0.  Steps are damped by halving after three
    consecutive residual increases; if the residual still grows right after
    halving, a non-converged report is returned instead of raising.
    """
    from .numerics import default_grid

    if grid is None:
        grid = q0.grid if q0 is not None else default_grid()
    n_modes = target.n_modes
    if q0 is None:
        q = Potential.constant(grid, target.mean)
    else:
        q = q0
    history: list[float] = []
    step = 1.0
    grow_streak = 0
    just_halved = False
    best_q, best_res = q, np.inf
    for it in range(max_iter):
        sd = forward(a, q, n_modes)
        d_mean, d_lt, d_nk = _residual_vector(target, sd)
        res = float(np.sqrt(d_mean ** 2 + np.sum(d_lt ** 2) + np.sum(d_nk ** 2)))
        history.append(res)
        if res < best_res:
            best_q, best_res = q, res
        if res < tol:
            return RecoveryReport(it, history, q, True)
        if len(history) > 1 and res > history[-2]:
            grow_streak += 1
            if just_halved:
                return RecoveryReport(it, history, best_q, False)
            if grow_streak >= 3:
                step *= 0.5
                just_halved = True
                q = best_q
                continue
        else:
            grow_streak = 0
            just_halved = False
        base = q0 if (frozen and q0 is not None) else q
        h = inverse_differential_apply(a, base, d_mean, RealSeq(d_lt), RealSeq(d_nk))
        q = Potential.from_grid_fn(GridFn(grid, q.samples.values + step * h.values))
    return RecoveryReport(max_iter, history, best_q, False)


def iso_tangent(a: int, q: Potential, xi) -> GridFn:
    """Tangent direction to the isospectral set: sum (xi_n / n) V_n."""
    xi = np.asarray(xi.entries if isinstance(xi, RealSeq) else xi, float)
    out = np.zeros(q.grid.n_points)
    for n in range(1, len(xi) + 1):
        out += (xi[n - 1] / n) * eigen_data(a, q, n).v_field.values
    return GridFn(q.grid, out)


def iso_normal(a: int, q: Potential, eta0: float, eta) -> GridFn:
    """Normal direction: eta0 + sum eta_n (g_n^2 - 1)."""
    eta = np.asarray(eta.entries if isinstance(eta, RealSeq) else eta, float)
    out = np.full(q.grid.n_points, float(eta0))
    for n in range(1, len(eta) + 1):
        out += eta[n - 1] * (eigen_data(a, q, n).grad_lambda.values - 1.0)
    return GridFn(q.grid, out)
