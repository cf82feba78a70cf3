import math

import numpy as np
import pytest

from slspec.bessel import FundamentalPair
from slspec.errors import NearDegenerateError, PicardDivergenceError
from slspec.numerics import cumulative_prefix, second_derivative, weighted_suffix
from slspec.potentials import Potential, make_potential
from slspec.solutions import (
    psi,
    psi_from_pair,
    solve_pair,
    solve_regular,
    solve_singular,
    wronskian,
)


def test_zero_potential_regular(grid, zero_potential):
    phi, phip = solve_regular(0, math.pi**2, zero_potential)
    assert np.max(np.abs(phi.values - np.sin(math.pi * grid.x) / math.pi)) < 1e-10
    assert np.max(np.abs(phip.values - np.cos(math.pi * grid.x))) < 1e-10


def test_zero_potential_singular(grid, zero_potential):
    psit, psitp = solve_singular(0, math.pi**2 / 4, zero_potential)
    assert np.max(np.abs(psit.values + np.cos(math.pi * grid.x / 2))) < 1e-10


def test_constant_shift_identity(grid):
    # independent oracle: with q = c the solution is the zero-potential u at
    # lambda - c, so phi(1) vanishes at lambda = pi^2 + c for a = 0
    c = 10.0
    qc = Potential.constant(grid, c)
    phi, _ = solve_regular(0, math.pi**2 + c, qc)
    assert abs(phi.values[-1]) < 1e-8
    pair = FundamentalPair(2, 40.0)
    phi2, _ = solve_regular(2, 40.0 + c, qc)
    assert np.max(np.abs(phi2.values - np.asarray(pair.u(grid.x)))) < 1e-9


def test_plugback_residual_regular(grid):
    from slspec.solutions import _Workspace

    q = make_potential(grid, "cos:3,1")
    pair = solve_pair(2, 50.0, q)
    ws = _Workspace(2, 50.0, grid)
    qv = q.samples.values
    pa = cumulative_prefix(ws.u * qv * pair.phi.values, grid.h)
    pb = cumulative_prefix(ws.v * qv * pair.phi.values, grid.h)
    resid = pair.phi.values - (ws.u * (1.0 - pb) + ws.v * pa)
    resid[0] = 0.0
    assert np.max(np.abs(resid)) < 1e-10 * (1 + pair.phi.norm_sup())


def test_plugback_residual_singular(grid):
    from slspec.solutions import _Workspace

    q = make_potential(grid, "poly:0,1")  # q(x) = x
    a, lam = 1, 30.0
    pair = solve_pair(a, lam, q)
    ws = _Workspace(a, lam, grid)
    qv = q.samples.values
    m = pair.psi_tilde_scaled.values
    sa = cumulative_prefix(ws.u_over_xa * qv * m, grid.h)
    sa = sa[-1] - sa
    sb = weighted_suffix(ws.v_scaled * qv * m, grid, -2 * a)
    resid = m - (ws.v_scaled * (1.0 - sa) + ws.u_times_xa * sb)
    resid[0] = 0.0
    assert np.max(np.abs(resid)) < 1e-10 * (1 + np.max(np.abs(m)))


def test_scaled_limit_extrapolation(grid, zero_potential):
    # smoothness of x^a psi~ near 0: node 1 agrees with the quadratic
    # extrapolation from nodes 2..4
    pair = solve_pair(2, 40.0, zero_potential)
    m = pair.psi_tilde_scaled.values
    extrap = 3 * m[2] - 3 * m[3] + m[4]
    assert abs(m[1] - extrap) < 1e-5


def test_phi_leading_coefficient(grid):
    q = make_potential(grid, "cos:2,3")
    for a in (0, 1, 2, 3):
        pair = solve_pair(a, 25.0, q)
        k = 4
        ratio = pair.phi.values[k] / grid.x[k] ** (a + 1)
        assert abs(ratio - 1.0) < 1e-4


def test_wronskian_zero_potential(grid, zero_potential):
    for a in range(0, 6):
        for lam in (10.0, 100.0):
            assert abs(wronskian(a, lam, zero_potential) - 1.0) < 1e-9


def test_wronskian_under_constant_shift(grid):
    # phi is invariant under (lambda, q) -> (lambda + c, q + c), but psi~ is
    # anchored by v(1, lambda), so the wronskian is NOT shift invariant; both
    # values obey the 1 + O(1/omega) law and converge to each other at large
    # lambda.
    q = make_potential(grid, "cos:5,1")
    c = 4.0
    qc = Potential.from_grid_fn(q.samples + c)
    for lam, tol in ((60.0, 0.05), (2500.0, 2e-3)):
        w1 = wronskian(1, lam, q)
        w2 = wronskian(1, lam + c, qc)
        assert abs(w1 - 1.0) < 0.5 and abs(w2 - 1.0) < 0.5
        assert abs(w1 - w2) < tol


def test_wronskian_large_lambda_band(grid):
    # |W - 1| <= C / sqrt(lambda) with C measured at lambda = 200
    q = make_potential(grid, f"cos:{2 * math.pi},5")
    w = wronskian(0, 200.0, q)
    c_meas = abs(w - 1.0) * math.sqrt(200.0)
    assert c_meas < 10.0
    for lam in (800.0, 3200.0):
        assert abs(wronskian(0, lam, q) - 1.0) <= max(c_meas, 1.0) / math.sqrt(lam)


def test_psi_normalization(grid, zero_potential):
    # q = 0: psi = v, so x^a psi tends to -1/(2a+1) at the origin
    a, lam = 1, 10.0
    p = psi(a, lam, zero_potential)
    k = 2
    scaled = grid.x[k] ** a * p.values[k]
    assert abs(scaled + 1.0 / (2 * a + 1)) < 1e-4
    pair = FundamentalPair(a, lam)
    assert np.max(np.abs(p.values[1:] - np.asarray(pair.v(grid.x[1:])))) < 1e-9


def test_psi_wronskian_one(grid):
    q = make_potential(grid, "cos:5,1")  # sin-free smooth potential
    qs = Potential.from_grid_fn(grid.sample(lambda x: np.sin(5 * x)))
    a, lam = 3, 77.0
    pair = solve_pair(a, lam, qs)
    pv = psi_from_pair(pair)
    mid = slice(grid.n_points // 3, 2 * grid.n_points // 3)
    w = pair.phi.values[mid] * np.gradient(pv.values, grid.x)[mid] - pair.phi_prime.values[mid] * pv.values[mid]
    # direct check with the solver derivative instead of np.gradient
    w = (
        pair.phi.values[mid] * (pair.psi_tilde_prime.values[mid] / pair.wronskian)
        - pair.phi_prime.values[mid] * pv.values[mid]
    )
    assert np.max(np.abs(w - 1.0)) < 1e-6
    assert pv.values.dtype == np.float64


def test_ode_residual(grid):
    q = make_potential(grid, "cos:3,1")
    a, lam = 2, 50.0
    pair = solve_pair(a, lam, q)
    phixx = second_derivative(pair.phi).values
    x = grid.x
    inner_nodes = slice(4, grid.n_points - 4)
    resid = (
        -phixx[inner_nodes]
        + (a * (a + 1) / x[inner_nodes] ** 2 + q.samples.values[inner_nodes] - lam)
        * pair.phi.values[inner_nodes]
    )
    assert np.max(np.abs(resid)) < 1e-4 * pair.phi.norm_sup()


def test_regular_envelope_estimate(grid):
    # |phi - u| <= C (x/(1+wx))^(a+1) int_0^x t|q|/(1+wt) dt, measured at
    # omega = 20 and re-checked with the same constant at omega = 80
    q = make_potential(grid, "cos:2,3")
    a = 1

    def measured_c(om):
        lam = om * om
        pair = solve_pair(a, lam, q)
        u = np.asarray(FundamentalPair(a, lam).u(grid.x))
        envelope_kernel = grid.x * np.abs(q.samples.values) / (1 + om * grid.x)
        env_int = cumulative_prefix(envelope_kernel, grid.h)
        env = (grid.x / (1 + om * grid.x)) ** (a + 1) * env_int
        diff = np.abs(pair.phi.values - u)
        sl = slice(8, None)
        return np.max(diff[sl] / env[sl])

    c20 = measured_c(20.0)
    c80 = measured_c(80.0)
    assert np.isfinite(c20)
    assert c80 <= c20 * 1.05  # uniform in omega


def test_picard_iterations_decrease_with_omega(grid):
    for spec in ("cos:3,1", "poly:0,0,1", "bump:0.5,0.2,2"):
        q = make_potential(grid, spec)
        its_low = solve_pair(1, 25.0, q).phi_iterations
        its_high = solve_pair(1, 10000.0, q).phi_iterations
        assert its_high <= its_low


def test_picard_divergence_error(grid):
    q = Potential.constant(grid, 2000.0)
    with pytest.raises(PicardDivergenceError):
        solve_pair(0, 1.0, q)


def test_near_degenerate_refusal(grid, zero_potential):
    pair = solve_pair(0, math.pi**2, zero_potential)
    # fake a near-zero wronskian by constructing the error path directly
    import dataclasses

    broken = dataclasses.replace(pair, wronskian=1e-12)
    with pytest.raises(NearDegenerateError):
        psi_from_pair(broken)


def test_potential_mean_cached(grid):
    q = make_potential(grid, "cos:3,2")
    from slspec.numerics import integrate

    assert abs(q.mean - integrate(q.samples)) < 1e-13
    assert make_potential(grid, "zero").is_zero()
