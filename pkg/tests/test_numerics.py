import math

import numpy as np
import pytest

from slspec.errors import BracketError, GridMismatchError
from slspec.numerics import (
    Grid,
    GridFn,
    RealSeq,
    cumulative_prefix,
    derivative,
    ell2_tail,
    find_root_bracketed,
    inner,
    integrate,
    read_grid_fn_csv,
    weighted_prefix,
    weighted_suffix,
    write_grid_fn_csv,
)
from oracles import mp_weighted_integral


def test_grid_invariants(grid):
    assert grid.n_points == 2049
    assert abs(np.sum(grid.weights) - 1.0) < 1e-14
    dx = np.diff(grid.x)
    assert np.all(dx > 0)
    assert np.max(np.abs(dx - grid.h)) < 1e-16
    assert grid.x[0] == 0.0 and grid.x[-1] == 1.0


@pytest.mark.parametrize("bad", [128, 127, 2048])
def test_grid_rejects_bad_sizes(bad):
    with pytest.raises(ValueError):
        Grid(bad)


def test_integrate_examples(grid, grid_small):
    assert integrate(grid.constant(1.0)) == pytest.approx(1.0, abs=1e-15)
    assert abs(integrate(grid.sample(lambda x: x**3)) - 0.25) < 1e-13
    f = grid_small.sample(lambda x: np.sin(2 * np.pi * x))
    assert abs(integrate(f)) < 1e-10


def test_integrate_linearity(grid):
    rng = np.random.default_rng(11)
    f = grid.sample(lambda x: np.sin(3 * x) + x**2)
    g = grid.sample(lambda x: np.exp(-x))
    for _ in range(5):
        al, be = rng.normal(size=2)
        lhs = integrate(f * al + g * be)
        rhs = al * integrate(f) + be * integrate(g)
        assert abs(lhs - rhs) < 1e-13 * (abs(al) + abs(be)) * 2


def test_inner_examples(grid):
    one = grid.constant(1.0)
    assert inner(one, one) == pytest.approx(1.0, abs=1e-14)
    s = grid.sample(lambda x: np.sin(2 * np.pi * x))
    c = grid.sample(lambda x: np.cos(2 * np.pi * x))
    assert abs(inner(s, c)) < 1e-10
    sn = grid.sample(lambda x: np.sqrt(2) * np.sin(np.pi * x))
    assert abs(inner(sn, sn) - 1.0) < 1e-10


def test_inner_grid_mismatch(grid, grid_small):
    with pytest.raises(GridMismatchError):
        inner(grid.constant(1.0), grid_small.constant(1.0))


def test_derivative_examples(grid, grid_small):
    d = derivative(grid.sample(lambda x: x))
    assert np.max(np.abs(d.values - 1.0)) < 1e-12
    d4 = derivative(grid_small.sample(lambda x: x**4))
    assert np.max(np.abs(d4.values - 4 * grid_small.x**3)) < 1e-8
    ds = derivative(grid_small.sample(lambda x: np.sin(2 * np.pi * x)))
    assert np.max(np.abs(ds.values - 2 * np.pi * np.cos(2 * np.pi * grid_small.x))) < 1e-6


def test_derivative_then_integrate(grid):
    for fn in (lambda x: np.exp(x) * np.sin(3 * x), lambda x: x**3 - x):
        f = grid.sample(fn)
        endpoint = fn(np.array([1.0]))[0] - fn(np.array([0.0]))[0]
        assert abs(integrate(derivative(f)) - endpoint) < 1e-6


def test_find_root_linear():
    assert find_root_bracketed(lambda x: x - 2.0, 0.0, 5.0, 1e-12) == pytest.approx(2.0, abs=1e-12)


def test_find_root_tan_equation():
    # oracle first: bisection on the closed form
    from oracles import tan_equals_omega_root

    ref = tan_equals_omega_root()
    assert abs(ref - 4.493409458) < 5e-10  # frozen digits
    root = find_root_bracketed(
        lambda w: math.tan(w) - w, math.pi, 1.5 * math.pi - 1e-6, 1e-12
    )
    assert abs(root - ref) < 1e-9


def test_find_root_cos():
    root = find_root_bracketed(math.cos, 1.0, 2.0, 1e-13)
    assert abs(root - math.pi / 2) < 1e-12


def test_find_root_bracket_property():
    root, lo, hi, _ = find_root_bracketed(
        lambda x: np.sign(x - 0.7) * abs(x - 0.7) ** 0.5, 0.0, 1.0, 1e-10, full_output=True
    )
    assert hi - lo <= 1e-10
    assert lo <= root <= hi


def test_find_root_requires_sign_change():
    with pytest.raises(BracketError):
        find_root_bracketed(lambda x: x * x + 1.0, -1.0, 1.0, 1e-8)


def test_ell2_tail():
    assert ell2_tail(RealSeq(np.zeros(3))) == 0.0
    assert ell2_tail(RealSeq(np.array([3.0, 4.0]))) == pytest.approx(5.0, abs=1e-15)
    seq = 1.0 / np.arange(1, 101)
    ref = math.sqrt(np.sum(seq**2))  # partial sum oracle
    assert abs(ref - 1.2787) < 1e-3
    assert ell2_tail(RealSeq(seq)) == pytest.approx(ref, abs=1e-14)


def test_realseq_one_based():
    s = RealSeq(np.array([1.5, 2.5]))
    assert s.value(1) == 1.5 and s.value(2) == 2.5
    with pytest.raises(IndexError):
        s.value(0)
    with pytest.raises(ValueError):
        RealSeq(np.array([np.nan]))


def test_cumulative_prefix_accuracy(grid):
    f = np.exp(grid.x) * np.cos(3 * grid.x)
    P = cumulative_prefix(f, grid.h)
    # antiderivative of e^x cos 3x = e^x (cos 3x + 3 sin 3x)/10
    exact = (np.exp(grid.x) * (np.cos(3 * grid.x) + 3 * np.sin(3 * grid.x)) - 1.0) / 10.0
    assert np.max(np.abs(P - exact)) < 1e-12


@pytest.mark.parametrize("p", [0, 3, 9])
def test_weighted_prefix_against_quadrature(grid, p):
    fn = lambda t: np.cos(5.0 * t) + t
    wp = weighted_prefix(fn(grid.x), grid, p)
    for i in (3, 64, 1024, 2048):
        import mpmath as mp

        ref = mp_weighted_integral(p, lambda t: mp.cos(5 * t) + t, 0, grid.x[i])
        assert abs(wp[i] - ref) < 1e-12 * (1 + abs(ref))


@pytest.mark.parametrize("p", [-2, -7])
def test_weighted_suffix_against_quadrature(grid, p):
    import mpmath as mp

    fn = lambda t: np.exp(-t) * np.cos(4.0 * t)
    ws = weighted_suffix(fn(grid.x), grid, p)
    for i in (1, 2, 50, 1500):
        ref = mp_weighted_integral(p, lambda t: mp.e**-t * mp.cos(4 * t), grid.x[i], 1)
        assert abs(ws[i] - ref) < 1e-9 * (1 + abs(ref))


def test_weighted_rules_polynomial_exactness(grid):
    # weight moments are exact, interpolation is exact through degree 5;
    # what is left is rounding accumulated over the running sum
    wp = weighted_prefix(grid.x**4, grid, 3)
    assert np.max(np.abs(wp - grid.x**8 / 8)) < 5e-14
    ws = weighted_suffix(grid.x**4, grid, -2)
    exact = (1.0 - grid.x**3) / 3.0
    assert np.max(np.abs(ws[1:] - exact[1:])) < 5e-13


def test_grid_fn_csv_round_trip(tmp_path, grid):
    f = grid.sample(lambda x: np.sin(x) * np.exp(x))
    path = tmp_path / "f.csv"
    write_grid_fn_csv(f, path)
    g = read_grid_fn_csv(grid, path)
    assert np.array_equal(f.values, g.values)
    header = path.read_text().splitlines()[0]
    assert header == "x,value"


def test_grid_fn_rejects_nonfinite(grid):
    vals = np.zeros(grid.n_points)
    vals[5] = np.inf
    with pytest.raises(ValueError):
        GridFn(grid, vals)
