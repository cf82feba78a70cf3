"""Uniform grid on [0,1], quadrature, differentiation, root finding.

Every field in the library is sampled on a :class:`Grid` (odd number of
nodes, composite-Simpson weights). Definite integrals use Simpson; running
integrals come in two flavours:

* :func:`cumulative_prefix` / :func:`cumulative_suffix` - trapezoid with an
  Euler-Maclaurin endpoint correction, O(h^4) for smooth integrands;
* :func:`weighted_prefix` / :func:`weighted_suffix` - a product rule that
  interpolates the smooth factor by a quartic per panel and integrates the
  power weight t**p exactly.  The integral operators and the singular
  solution carry t**(+-2a) weights; plain quadrature loses all relative
  accuracy on those near x = 0, the product rule does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BracketError, GridMismatchError

__all__ = [
    "Grid",
    "GridFn",
    "RealSeq",
    "default_grid",
    "integrate",
    "inner",
    "derivative",
    "second_derivative",
    "find_root_bracketed",
    "ell2_tail",
    "cumulative_prefix",
    "cumulative_suffix",
    "weighted_prefix",
    "weighted_suffix",
    "weighted_prefix_log",
    "weighted_suffix_log",
    "write_grid_fn_csv",
    "read_grid_fn_csv",
]


class Grid:
    """Uniform sampling of [0,1] carrying composite-Simpson weights.

    Parameters
    ----------
    n_points : int
        Number of nodes; must be odd and at least 129 so composite Simpson
        applies and the boundary stencils have room.
    """

    __slots__ = ("n_points", "x", "h", "weights")

    def __init__(self, n_points: int = 2049):
        if n_points < 129 or n_points % 2 == 0:
            raise ValueError(f"n_points must be odd and >= 129, got {n_points}")
        self.n_points = int(n_points)
        self.h = 1.0 / (n_points - 1)
        x = np.linspace(0.0, 1.0, n_points)
        w = np.full(n_points, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= self.h / 3.0
        x.setflags(write=False)
        w.setflags(write=False)
        self.x = x
        self.weights = w

    def sample(self, fn) -> "GridFn":
        """Sample a callable fn(x) on the grid."""
        return GridFn(self, np.asarray(fn(self.x), dtype=float))

    def constant(self, c: float) -> "GridFn":
        return GridFn(self, np.full(self.n_points, float(c)))

    def __repr__(self):
        return f"Grid(n_points={self.n_points})"


_DEFAULT_GRIDS: dict[int, Grid] = {}


def default_grid(n_points: int = 2049) -> Grid:
    """Shared grid instance (2049 nodes unless overridden)."""
    g = _DEFAULT_GRIDS.get(n_points)
    if g is None:
        g = _DEFAULT_GRIDS[n_points] = Grid(n_points)
    return g


class GridFn:
    """A real function known by its values at the grid nodes.

    The integral operators attach their exact term decomposition to the
    results they produce (`structure`); downstream operator applications use
    it to integrate by parts instead of re-interpolating values that carry a
    weak x log x singularity at the origin.  The attribute is advisory: all
    numerics here use only `values`.
    """

    __slots__ = ("grid", "values", "structure")

    def __init__(self, grid: Grid, values, structure=None):
        v = np.asarray(values, dtype=float)
        if v.shape != (grid.n_points,):
            raise GridMismatchError(
                f"expected {grid.n_points} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("GridFn values must be finite")
        v = v.copy()
        v.setflags(write=False)
        self.grid = grid
        self.values = v
        self.structure = structure

    def _check(self, other: "GridFn") -> None:
        if self.grid.n_points != other.grid.n_points:
            raise GridMismatchError(
                f"grids differ: {self.grid.n_points} vs {other.grid.n_points}"
            )

    def __add__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.grid, self.values + other.values)
        return GridFn(self.grid, self.values + float(other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.grid, self.values - other.values)
        return GridFn(self.grid, self.values - float(other))

    def __rsub__(self, other):
        return GridFn(self.grid, float(other) - self.values)

    def __mul__(self, other):
        if isinstance(other, GridFn):
            self._check(other)
            return GridFn(self.grid, self.values * other.values)
        return GridFn(self.grid, self.values * float(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFn(self.grid, -self.values)

    def norm_sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def norm_l2(self) -> float:
        return math.sqrt(max(integrate(self * self), 0.0))

    def __repr__(self):
        return f"GridFn(n={self.grid.n_points}, sup={self.norm_sup():.3g})"


@dataclass(frozen=True)
class RealSeq:
    """Finite real sequence indexed from 1 (mode numbers)."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if not np.all(np.isfinite(e)):
            raise ValueError("RealSeq entries must be finite")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def __len__(self) -> int:
        return len(self.entries)

    def value(self, n: int) -> float:
        """Entry for mode n (1-based)."""
        if not 1 <= n <= len(self.entries):
            raise IndexError(f"mode {n} outside 1..{len(self.entries)}")
        return float(self.entries[n - 1])


def integrate(f: GridFn) -> float:
    """Composite-Simpson value of the integral of f over [0,1]."""
    return float(np.dot(f.grid.weights, f.values))


def inner(f: GridFn, g: GridFn) -> float:
    """L2 pairing <f, g> = integral of f*g."""
    f._check(g)
    return float(np.dot(f.grid.weights, f.values * g.values))


def _fd4(v: np.ndarray, h: float) -> np.ndarray:
    """4th-order first derivative: central stencil inside, one-sided at the ends."""
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
    d[-2] = (3.0 * v[-1] + 10.0 * v[-2] - 18.0 * v[-3] + 6.0 * v[-4] - v[-5]) / (12.0 * h)
    d[-1] = (25.0 * v[-1] - 48.0 * v[-2] + 36.0 * v[-3] - 16.0 * v[-4] + 3.0 * v[-5]) / (12.0 * h)
    return d


def derivative(f: GridFn) -> GridFn:
    """d/dx by 4th-order finite differences (one-sided boundary bands)."""
    return GridFn(f.grid, _fd4(f.values, f.grid.h))


def _fd4_second(v: np.ndarray, h: float) -> np.ndarray:
    """4th-order second derivative on interior nodes; 2nd-order near the ends."""
    d = np.empty_like(v)
    d[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)
    d[1] = (v[0] - 2.0 * v[1] + v[2]) / (h * h)
    d[-2] = (v[-3] - 2.0 * v[-2] + v[-1]) / (h * h)
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
    d[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return d


def second_derivative(f: GridFn) -> GridFn:
    return GridFn(f.grid, _fd4_second(f.values, f.grid.h))


def cumulative_prefix(values: np.ndarray, h: float) -> np.ndarray:
    """P[i] ~ integral of the sampled function over [0, x_i].

    Composite trapezoid plus the Euler-Maclaurin endpoint correction
    -(h^2/12)(f'(x_i) - f'(0)); O(h^4) per prefix for smooth integrands.
    """
    P = np.empty_like(values)
    P[0] = 0.0
    np.cumsum((values[1:] + values[:-1]) * (h / 2.0), out=P[1:])
    d = _fd4(values, h)
    return P - (h * h / 12.0) * (d - d[0])


def cumulative_suffix(values: np.ndarray, h: float) -> np.ndarray:
    """S[i] ~ integral over [x_i, 1] (same corrected-trapezoid scheme)."""
    P = cumulative_prefix(values, h)
    return P[-1] - P


# Quintic interpolation machinery for power-weighted integrals (6-node stencils).
_NSTEN = 6
_VAND_INV = np.linalg.inv(np.vander(np.arange(float(_NSTEN)), _NSTEN, increasing=True))
_BINOM = np.array(
    [[math.comb(r, m) if m <= r else 0 for m in range(_NSTEN)] for r in range(_NSTEN)],
    dtype=float,
)


def _power_moments(e: int, a_: np.ndarray, b_: np.ndarray) -> np.ndarray:
    """integral of t**e over the panels [a_, b_] (log antiderivative at e = -1)."""
    if e == -1:
        return np.log(b_ / a_)
    return (b_ ** (e + 1) - a_ ** (e + 1)) / (e + 1)


def _power_log_moments(e: int, a_: np.ndarray, b_: np.ndarray) -> np.ndarray:
    """integral of t**e * log t over the panels [a_, b_]."""
    if e == -1:
        return 0.5 * (np.log(b_) ** 2 - np.log(a_) ** 2)
    c = 1.0 / (e + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        fa = np.where(a_ > 0, a_ ** (e + 1) * (np.log(np.maximum(a_, 1e-300)) * c - c * c), 0.0)
        fb = b_ ** (e + 1) * (np.log(b_) * c - c * c)
    return fb - fa


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_GL_NODES = (_GL_NODES + 1.0) / 2.0
_GL_WEIGHTS = _GL_WEIGHTS / 2.0


def _panel_integrals(s: np.ndarray, x: np.ndarray, p: int, log_weight: bool = False) -> np.ndarray:
    """I[i] = integral of t**p [* log t] * (quintic interpolant of s) over
    [x_i, x_{i+1}].

    The interpolant uses the 6-node stencil nearest to the panel.  Panels
    near the origin integrate the weight exactly (monomial expansion of the
    interpolant about t = 0, well conditioned there and valid for any p);
    panels away from it use 10-point Gauss-Legendre, where t**p is locally
    polynomial-like and the exact expansion would cancel catastrophically.
    For p <= -1 the first panel touches the singularity and is skipped
    (I[0] = 0); callers supply the analytic x -> 0 limit themselves.
    """
    n = x.size
    h = x[1] - x[0]
    js = np.clip(np.arange(n - 1) - 2, 0, n - _NSTEN)
    sv = np.stack([s[js + k] for k in range(_NSTEN)])
    c = _VAND_INV @ sv  # interpolant coefficients in tau = (t - x[js]) / h
    xs = x[js]
    lo = 1 if p < 0 else 0
    I = np.zeros(n - 1)

    t_star = h * max(16.0, 8.0 * (abs(p) + 6.0))
    near = x[: n - 1] < t_star
    near[:lo] = False
    far = ~near
    far[:lo] = False

    if near.any():
        sl = np.nonzero(near)[0]
        a_ = x[sl]
        b_ = x[sl + 1]
        moments = _power_log_moments if log_weight else _power_moments
        acc = np.zeros(sl.size)
        for m in range(_NSTEN):
            K = moments(p + m, a_, b_)
            G = np.zeros(sl.size)
            for r in range(m, _NSTEN):
                G += c[r, sl] * h ** (-r) * _BINOM[r, m] * (-xs[sl]) ** (r - m)
            acc += K * G
        I[sl] = acc

    if far.any():
        sl = np.nonzero(far)[0]
        a_ = x[sl]
        tau0 = (a_ - xs[sl]) / h  # panel start in stencil coordinates
        acc = np.zeros(sl.size)
        for k in range(_GL_NODES.size):
            t = a_ + h * _GL_NODES[k]
            tau = tau0 + _GL_NODES[k]
            q = c[_NSTEN - 1, sl].copy()
            for r in range(_NSTEN - 2, -1, -1):
                q = q * tau + c[r, sl]
            w = t ** float(p)
            if log_weight:
                w = w * np.log(t)
            acc += _GL_WEIGHTS[k] * w * q
        I[sl] = h * acc

    return I


def weighted_prefix(smooth: np.ndarray, grid: Grid, p: int) -> np.ndarray:
    """WP[i] ~ integral of t**p * smooth(t) over [0, x_i]; requires p >= 0."""
    if p < 0:
        raise ValueError("prefix weight must have p >= 0")
    I = _panel_integrals(np.asarray(smooth, float), grid.x, p)
    out = np.zeros(grid.n_points)
    np.cumsum(I, out=out[1:])
    return out


def weighted_suffix(smooth: np.ndarray, grid: Grid, p: int) -> np.ndarray:
    """WS[i] ~ integral of t**p * smooth(t) over [x_i, 1].

    For p <= -1 the value at node 0 is undefined (the integral diverges);
    WS[0] is returned as 0.0 and must not be used.
    """
    I = _panel_integrals(np.asarray(smooth, float), grid.x, p)
    out = np.zeros(grid.n_points)
    out[:-1] = np.cumsum(I[::-1])[::-1]
    return out


def weighted_prefix_log(smooth: np.ndarray, grid: Grid, p: int) -> np.ndarray:
    """WP[i] ~ integral of t**p log(t) * smooth(t) over [0, x_i]; p >= 0."""
    if p < 0:
        raise ValueError("prefix weight must have p >= 0")
    I = _panel_integrals(np.asarray(smooth, float), grid.x, p, log_weight=True)
    out = np.zeros(grid.n_points)
    np.cumsum(I, out=out[1:])
    return out


def weighted_suffix_log(smooth: np.ndarray, grid: Grid, p: int) -> np.ndarray:
    """WS[i] ~ integral of t**p log(t) * smooth(t) over [x_i, 1]."""
    I = _panel_integrals(np.asarray(smooth, float), grid.x, p, log_weight=True)
    out = np.zeros(grid.n_points)
    out[:-1] = np.cumsum(I[::-1])[::-1]
    return out


def find_root_bracketed(f, lo: float, hi: float, tol: float, full_output: bool = False):
    """Root of f on [lo, hi] by a guarded secant/bisection hybrid.

    Requires a sign change on the bracket. The bracket shrinks every
    iteration (secant steps that stall fall back to bisection), so the
    method cannot skip the root. Returns the midpoint of the final bracket,
    whose width is at most tol.
    """
    lo, hi = float(lo), float(hi)
    if not tol > 0:
        raise ValueError("tol must be positive")
    fa, fb = f(lo), f(hi)
    if fa == 0.0:
        return (lo, lo, hi, 1) if full_output else lo
    if fb == 0.0:
        return (hi, lo, hi, 2) if full_output else hi
    if np.sign(fa) == np.sign(fb):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={fa:.3g},{fb:.3g}")
    n_eval = 2
    prev_width = hi - lo
    use_bisect = False
    for _ in range(200):
        width = hi - lo
        if width <= tol:
            break
        if use_bisect or fb == fa:
            xm = 0.5 * (lo + hi)
        else:
            xm = (lo * fb - hi * fa) / (fb - fa)
            margin = 0.01 * width
            if not (lo + margin < xm < hi - margin):
                xm = 0.5 * (lo + hi)
        fm = f(xm)
        n_eval += 1
        if fm == 0.0:
            lo = hi = xm
            fa = fb = 0.0
            break
        if np.sign(fm) == np.sign(fa):
            lo, fa = xm, fm
        else:
            hi, fb = xm, fm
        # force bisection whenever the last two steps failed to halve the bracket
        use_bisect = (hi - lo) > 0.5 * prev_width
        prev_width = width
    root = 0.5 * (lo + hi)
    if full_output:
        return root, lo, hi, n_eval
    return root


def ell2_tail(seq) -> float:
    """sqrt(sum of squares) of a RealSeq or array-like."""
    e = seq.entries if isinstance(seq, RealSeq) else np.asarray(seq, float)
    return float(np.sqrt(np.sum(e * e)))


def write_grid_fn_csv(f: GridFn, path) -> None:
    """Serialize as CSV `x,value` with 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,value\n")
        for xv, fv in zip(f.grid.x, f.values):
            fh.write(f"{xv:.17g},{fv:.17g}\n")


def read_grid_fn_csv(grid: Grid, path) -> GridFn:
    """Read CSV written by :func:`write_grid_fn_csv`; nodes must match the grid."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim == 1:
        data = data[None, :]
    if data.shape[0] != grid.n_points:
        raise GridMismatchError(
            f"CSV has {data.shape[0]} rows, grid has {grid.n_points} nodes"
        )
    if np.max(np.abs(data[:, 0] - grid.x)) > 1e-12:
        raise GridMismatchError("CSV abscissae do not match the grid")
    return GridFn(grid, data[:, 1])
