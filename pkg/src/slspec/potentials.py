"""Potentials on the grid: construction, named registry, CSV input."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .numerics import Grid, GridFn, integrate

__all__ = ["Potential", "make_potential", "NAMED_FORMS"]


@dataclass(frozen=True)
class Potential:
    """Real-valued potential q with its mean cached."""

    samples: GridFn
    mean: float

    @classmethod
    def from_grid_fn(cls, f: GridFn) -> "Potential":
        return cls(samples=f, mean=integrate(f))

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "Potential":
        return cls.from_grid_fn(grid.sample(fn))

    @classmethod
    def zero(cls, grid: Grid) -> "Potential":
        return cls(samples=grid.constant(0.0), mean=0.0)

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "Potential":
        return cls(samples=grid.constant(c), mean=float(c))

    @classmethod
    def from_csv(cls, grid: Grid, path) -> "Potential":
        """Read CSV `x,value` at arbitrary abscissae, resample by cubic spline."""
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        xs, vs = data[:, 0], data[:, 1]
        order = np.argsort(xs)
        spline = CubicSpline(xs[order], vs[order])
        return cls.from_grid_fn(GridFn(grid, spline(grid.x)))

    @property
    def grid(self) -> Grid:
        return self.samples.grid

    def is_zero(self) -> bool:
        return not np.any(self.samples.values)

    def key(self) -> bytes:
        """Value-based cache key."""
        return self.samples.values.tobytes()


def _form_zero(grid: Grid) -> Potential:
    return Potential.zero(grid)


def _form_const(grid: Grid, c: float) -> Potential:
    return Potential.constant(grid, c)


def _form_cos(grid: Grid, k: float, amp: float = 1.0) -> Potential:
    return Potential.from_callable(grid, lambda x: amp * np.cos(k * x))


def _form_bump(grid: Grid, center: float, width: float, amp: float) -> Potential:
    return Potential.from_callable(
        grid, lambda x: amp * np.exp(-(((x - center) / width) ** 2))
    )


def _form_poly(grid: Grid, *coeffs: float) -> Potential:
    c = np.asarray(coeffs, dtype=float)
    return Potential.from_callable(grid, lambda x: np.polynomial.polynomial.polyval(x, c))


NAMED_FORMS = {
    "zero": _form_zero,
    "const": _form_const,
    "cos": _form_cos,
    "bump": _form_bump,
    "poly": _form_poly,
}


def make_potential(grid: Grid, spec: str) -> Potential:
    """Build a potential from `name` or `name:arg1,arg2,...`.

    Registry: zero | const:c | cos:k,amp | bump:center,width,amp | poly:c0,c1,...
    """
    name, _, argstr = spec.partition(":")
    name = name.strip().lower()
    if name not in NAMED_FORMS:
        raise ValueError(f"unknown potential form {name!r}; known: {sorted(NAMED_FORMS)}")
    args = [float(tok) for tok in argstr.split(",") if tok.strip()] if argstr else []
    return NAMED_FORMS[name](grid, *args)
