"""Named invariant suites, one per module, used by the `verify` subcommand.

Each check returns its measured value together with the tolerance it was
held to; a suite passes when every check passes.  These are the same
invariants the test suite asserts, packaged for command-line runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bessel, inverse, solutions, spectrum, transform
from .numerics import (
    Grid,
    GridFn,
    RealSeq,
    derivative,
    find_root_bracketed,
    inner,
    integrate,
    second_derivative,
)
from .potentials import Potential, make_potential

__all__ = ["CheckResult", "SUITES", "run_suite"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "check_name": self.name,
            "status": "pass" if self.passed else "fail",
            "measured": self.measured,
            "tolerance": self.tolerance,
        }


def _check(results: list, name: str, measured: float, tol: float) -> None:
    results.append(CheckResult(name, bool(measured <= tol), float(measured), float(tol)))


def numerics_suite(grid: Grid, a: int = 1, seed: int = 0) -> list[CheckResult]:
    res: list[CheckResult] = []
    _check(res, "simpson_weights_sum", abs(float(np.sum(grid.weights)) - 1.0), 1e-14)
    f = grid.sample(lambda x: x**3)
    _check(res, "simpson_cubic_exact", abs(integrate(f) - 0.25), 1e-13)
    rng = np.random.default_rng(seed)
    al, be = rng.normal(size=2)
    f1 = grid.sample(lambda x: np.sin(2 * np.pi * x))
    f2 = grid.sample(lambda x: np.exp(-x) * x)
    lin = abs(
        integrate(f1 * al + f2 * be) - al * integrate(f1) - be * integrate(f2)
    )
    _check(res, "integrate_linear", lin, 1e-13 * (abs(al) + abs(be)) * 2)
    d = derivative(grid.sample(lambda x: np.sin(2 * np.pi * x)))
    _check(
        res,
        "derivative_then_integrate",
        abs(integrate(d) - (math.sin(2 * math.pi) - 0.0)),
        1e-6,
    )
    root, lo, hi, _ = find_root_bracketed(
        lambda t: math.tan(t) - t, math.pi, 1.5 * math.pi - 1e-6, 1e-12, full_output=True
    )
    _check(res, "root_bracket_width", hi - lo, 1e-12)
    _check(res, "root_tan_eq", abs(root - 4.493409457909064), 1e-9)
    return res


def bessel_suite(grid: Grid, a: int = 10, seed: int = 0) -> list[CheckResult]:
    res: list[CheckResult] = []
    worst_wr = 0.0
    for order in range(0, min(a, 10) + 1):
        for lam in (1.0, 5.5**2, 40.0**2):
            pair = bessel.FundamentalPair(order, lam)
            x = grid.x[1:]
            wr = pair.u(x) * pair.v_prime(x) - pair.u_prime(x) * pair.v(x)
            worst_wr = max(worst_wr, float(np.max(np.abs(wr - 1.0))))
    _check(res, "fundamental_wronskian", worst_wr, 1e-8)
    z = np.linspace(0.01, 60.0, 700)
    worst_rec = 0.0
    for order in range(1, min(a, 10) + 1):
        lhs = z * bessel.j_prime(order, z)
        rhs = z * bessel.j(order - 1, z) - order * bessel.j(order, z)
        scale = np.maximum(np.abs(z * bessel.j(order - 1, z)), 1.0)
        worst_rec = max(worst_rec, float(np.max(np.abs(lhs - rhs) / scale)))
    _check(res, "recurrence_consistency", worst_rec, 1e-9)
    worst_br = 0.0
    for order in range(1, min(a, 10) + 1):
        zs = bessel.z_switch(order)
        s = bessel._j_series(order, np.array([zs]))[0]
        r = bessel._j_recur_pair(order, np.array([zs]))[1][0]
        worst_br = max(worst_br, abs(s - r) / max(abs(s), 1e-300))
    _check(res, "branch_agreement", worst_br, 1e-11)
    zz = np.linspace(20.0, 200.0, 1200)
    worst = 0.0
    for order in range(0, min(a, 10) + 1):
        diff = np.abs(bessel.j(order, zz) - np.sin(zz - order * np.pi / 2))
        cfit = float(np.max((zz * diff)[zz <= 20 + np.pi]))
        worst = max(worst, float(np.max(zz * diff)) / max(cfit, 1e-300))
    _check(res, "large_z_asymptotics", worst, 1.05)
    i1, i2 = bessel.bessel_integral_checks(min(a, 10), 100.0, grid)
    _check(res, "integral_band_phi", abs(i1 - 0.5), 0.05)
    _check(res, "integral_band_psi", abs(i2), 5.0 / 100.0)
    return res


def solutions_suite(grid: Grid, a: int = 2, seed: int = 0) -> list[CheckResult]:
    res: list[CheckResult] = []
    q = make_potential(grid, "cos:3,1")
    lam = 50.0
    pair = solutions.solve_pair(a, lam, q)
    # plug-back residual of the discrete fixed point
    from .numerics import cumulative_prefix

    ws = solutions._Workspace(a, lam, grid)
    qv = q.samples.values
    pa = cumulative_prefix(ws.u * qv * pair.phi.values, grid.h)
    pb = cumulative_prefix(ws.v * qv * pair.phi.values, grid.h)
    resid = pair.phi.values - (ws.u * (1 - pb) + ws.v * pa)
    resid[0] = 0.0
    _check(
        res,
        "regular_plugback_residual",
        float(np.max(np.abs(resid))) / (1 + pair.phi.norm_sup()),
        1e-10,
    )
    _check(res, "wronskian_spread", pair.wronskian_spread, 1e-6 * (1 + abs(pair.wronskian)))
    # ODE residual on interior nodes
    phi = pair.phi
    phixx = second_derivative(phi).values
    x = grid.x
    interior = slice(4, grid.n_points - 4)
    ode = np.abs(
        -phixx[interior]
        + (a * (a + 1) / x[interior] ** 2 + qv[interior] - lam) * phi.values[interior]
    )
    _check(res, "ode_residual", float(np.max(ode)) / phi.norm_sup(), 1e-4)
    # q = 0 wronskian is 1
    q0 = Potential.zero(grid)
    worst = max(
        abs(solutions.wronskian(order, lam0, q0) - 1.0)
        for order in range(0, min(a, 5) + 1)
        for lam0 in (10.0, 100.0)
    )
    _check(res, "zero_potential_wronskian", worst, 1e-9)
    return res


def spectrum_suite(grid: Grid, a: int = 1, seed: int = 0) -> list[CheckResult]:
    res: list[CheckResult] = []
    q0 = Potential.zero(grid)
    lam = spectrum.eigenvalues(0, q0, 6)
    worst = max(
        abs(lam.value(n) - n**2 * math.pi**2) / (n**2 * math.pi**2) for n in range(1, 7)
    )
    _check(res, "zero_potential_a0", worst, 1e-7)
    q = make_potential(grid, "poly:0,0,1")
    worst_pair = 0.0
    modes = [spectrum.eigen_data(a, q, n) for n in range(1, 5)]
    for mn in modes:
        for mm in modes:
            d = abs(inner(mn.grad_kappa, derivative(mm.grad_lambda)) - (0.5 if mn.n == mm.n else 0.0))
            worst_pair = max(worst_pair, d)
            worst_pair = max(worst_pair, abs(inner(mn.grad_kappa, derivative(mm.grad_kappa))))
            worst_pair = max(worst_pair, abs(inner(mn.grad_lambda, derivative(mm.grad_lambda))))
    _check(res, "gradient_orthogonality", worst_pair, 5e-5)
    lams = spectrum.eigenvalues(a, q, 6).entries
    _check(res, "strict_monotonicity", float(np.max(np.diff(lams) <= 0)), 0.5)
    norm_dev = max(abs(integrate(m.grad_lambda) - 1.0) for m in modes)
    _check(res, "grad_lambda_mass", norm_dev, 1e-8)
    kap_dev = max(abs(integrate(m.grad_kappa)) for m in modes)
    _check(res, "grad_kappa_zero_mass", kap_dev, 1e-8)
    return res


def transform_suite(grid: Grid, a: int = 3, seed: int = 0) -> list[CheckResult]:
    res: list[CheckResult] = []
    a = max(1, min(a, 5))
    rng = np.random.default_rng(seed)
    vals = sum(
        rng.normal() * np.cos(k * np.pi * grid.x) + rng.normal() * np.sin(k * np.pi * grid.x)
        for k in range(6)
    )
    f = GridFn(grid, vals)
    gfn = GridFn(grid, np.exp(grid.x) * np.cos(2 * grid.x))
    inv = transform.apply_A(a, transform.apply_S(a, f))
    _check(res, "inverse_composition", float(np.max(np.abs(inv.values - f.values))), 1e-9)
    bt = transform.apply_B(a, transform.apply_T(a, f))
    _check(res, "chain_inverse", float(np.max(np.abs(bt.values - f.values))), 1e-8)
    adj = abs(
        transform.structured_inner(transform.apply_S(a, f), gfn)
        - inner(f, transform.apply_S_adj(a, gfn))
    )
    _check(res, "adjoint_consistency", adj, 1e-9)
    _check(res, "commutator", transform.commute_check(1, min(a + 1, 5), f), 1e-9)
    worst_ker = max(
        float(np.max(np.abs(transform.apply_T_adj(a, b).values)))
        for b in transform.kernel_basis(a, grid)
    )
    _check(res, "kernel_monomials", worst_ker, 1e-8)
    worst_tr = 0.0
    for w in (1.0, math.pi, 17.3, 60.0):
        worst_tr = max(worst_tr, max(transform.verify_bessel_transport(a, w, grid).values()))
    _check(res, "transport_identities", worst_tr, 1e-6)
    xg = GridFn(grid, grid.x ** (2 * a))
    _check(
        res,
        "range_orthogonal",
        abs(transform.structured_inner(transform.apply_S(a, f), xg)),
        1e-9,
    )
    return res


def inverse_suite(grid: Grid, a: int = 1, seed: int = 0) -> list[CheckResult]:
    res: list[CheckResult] = []
    q = make_potential(grid, f"cos:{2 * math.pi},1")
    n_modes = 4
    rng = np.random.default_rng(seed)
    modes = [spectrum.eigen_data(a, q, n) for n in range(1, n_modes + 1)]
    one = grid.constant(1.0)
    rows = (
        [one]
        + [GridFn(grid, m.grad_lambda.values - 1.0) for m in modes]
        + [m.grad_kappa * float(m.n) for m in modes]
    )
    cols = (
        [one]
        + [m.w_field for m in modes]
        + [m.v_field * (1.0 / m.n) for m in modes]
    )
    M = np.array([[inner(r, c) for c in cols] for r in rows])
    _check(res, "biorthogonality", float(np.max(np.abs(M - np.eye(2 * n_modes + 1)))), 2e-4)
    qstar = make_potential(grid, f"cos:{2 * math.pi},0.5")
    target = inverse.SpectralTarget.from_spectral_data(inverse.forward(a, qstar, 6))
    rep = inverse.recover(a, target, q0=Potential.zero(grid), tol=1e-6, max_iter=15)
    _check(res, "recovery_residual", rep.data_residual_history[-1], 1e-6)
    _check(res, "recovery_iterations", float(rep.iterations), 15.0)
    xi = rng.normal(size=4)
    xi /= np.linalg.norm(xi)
    h = inverse.iso_tangent(a, q, xi)
    _check(res, "tangent_zero_mean", abs(integrate(h)), 1e-7)
    nrm = inverse.iso_normal(a, q, 0.5, rng.normal(size=4))
    _check(res, "tangent_normal_orthogonal", abs(inner(h, nrm)), 1e-5)
    return res


SUITES = {
    "numerics": numerics_suite,
    "bessel": bessel_suite,
    "solutions": solutions_suite,
    "spectrum": spectrum_suite,
    "transform": transform_suite,
    "inverse": inverse_suite,
}


def run_suite(name: str, grid: Grid, a: int, seed: int = 0) -> list[CheckResult]:
    if name == "all":
        out: list[CheckResult] = []
        for key in SUITES:
            out.extend(
                CheckResult(f"{key}.{c.name}", c.passed, c.measured, c.tolerance)
                for c in SUITES[key](grid, a=a, seed=seed)
            )
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; known: {sorted(SUITES)} or 'all'")
    return SUITES[name](grid, a=a, seed=seed)
