"""Dirichlet spectral data: eigenvalues, eigenfunctions, terminal velocities,
gradients, and the dual tangent/normal fields.

Eigenvalues of -y'' + (a(a+1)/x^2 + q) y = lam y with y(0) = y(1) = 0 are the
zeros of lam -> phi(1, lam, q).  Search strategy per mode n:

1. zero-potential eigenvalues lam_n(0) come from the zeros of j_a, bracketed
   by interlacing against the zeros of j_{a-1} (down to j_0, whose zeros are
   n pi);
2. for general q, min-max pins lam_n(q) inside
   [lam_n(0) + min q, lam_n(0) + max q]; when those windows are disjoint
   they bracket exactly one root each, otherwise a mesh scan over the swept
   interval takes over;
3. a guarded secant/bisection pass is polished by Newton steps using the
   analytic lambda-derivative of phi(1), and a sign-change census over the
   swept window asserts that no eigenvalue was skipped.

Terminal velocity: kappa_n = log |phi'(1, lam_n(q), q) / u'(1, lam_n(0))|.
Gradients: grad lam_n = g_n^2 and grad kappa_n = -a_n + (int a_n) g_n^2 with
a_n = phi psi at lam_n.  Dual fields: V_n = 2 (grad lam_n)',
W_n = -2 (grad kappa_n)'.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .bessel import FundamentalPair, j, j_prime
from .errors import (
    BracketError,
    DegenerateEigenvalueError,
    MissedEigenvalueError,
    NearDegenerateError,
)
from .numerics import GridFn, RealSeq, derivative, find_root_bracketed, integrate
from .potentials import Potential
from .solutions import SolutionPair, solve_pair, solve_regular

__all__ = [
    "EigenData",
    "SpectralData",
    "zero_potential_eigenvalues",
    "eigenvalues",
    "eigenfunction",
    "terminal_velocity",
    "grad_lambda",
    "grad_kappa",
    "a_fn",
    "dual_fields",
    "eigen_data",
    "spectral_map",
    "clear_caches",
]

_PI2 = math.pi * math.pi
_PHIP_FLOOR = 1e-12
_W_FLOOR = 1e-8


@dataclass(frozen=True)
class EigenData:
    """Everything attached to one Dirichlet mode."""

    n: int
    lam: float
    g: GridFn
    kappa: float
    grad_lambda: GridFn
    grad_kappa: GridFn
    a_fn: GridFn
    v_field: GridFn
    w_field: GridFn
    pair: SolutionPair

    @property
    def omega(self) -> float:
        return math.sqrt(self.lam)


@dataclass(frozen=True)
class SpectralData:
    """Truncated spectral map value (mean, regularized eigenvalues, n kappa_n)."""

    order: int
    n_modes: int
    mean: float
    lambda_tilde: RealSeq
    n_kappa: RealSeq

    def lambdas(self) -> np.ndarray:
        """Reconstruct the raw eigenvalues from the regularized remainders."""
        n = np.arange(1, self.n_modes + 1)
        a = self.order
        return (
            (n + a / 2.0) ** 2 * _PI2
            + self.mean
            - a * (a + 1)
            + self.lambda_tilde.entries
        )

    def to_dict(self) -> dict:
        return {
            "a": self.order,
            "N": self.n_modes,
            "mean": self.mean,
            "lambda_tilde": list(self.lambda_tilde.entries),
            "n_kappa": list(self.n_kappa.entries),
            "lambda": list(self.lambdas()),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralData":
        return cls(
            order=int(d["a"]),
            n_modes=int(d["N"]),
            mean=float(d["mean"]),
            lambda_tilde=RealSeq(np.asarray(d["lambda_tilde"], float)),
            n_kappa=RealSeq(np.asarray(d["n_kappa"], float)),
        )


# ---------------------------------------------------------------------------
# zero-potential reference spectrum (zeros of j_a, squared)

_ZERO_OMEGAS: dict[int, np.ndarray] = {}
_ZERO_UPRIME: dict[int, np.ndarray] = {}


def _bessel_zeros(a: int, count: int) -> np.ndarray:
    """First `count` positive zeros of j_a, by interlacing from j_0."""
    zs = np.arange(1, count + a + 1, dtype=float) * math.pi
    for b in range(1, a + 1):
        nxt = np.empty(len(zs) - 1)
        for k in range(len(zs) - 1):
            r = find_root_bracketed(lambda z: j(b, z), zs[k], zs[k + 1], 1e-10)
            for _ in range(3):
                r -= j(b, r) / j_prime(b, r)
            nxt[k] = r
        zs = nxt
    return zs[:count]


def zero_potential_eigenvalues(a: int, n_modes: int) -> np.ndarray:
    """lam_n(0) for n = 1..n_modes (cached)."""
    cached = _ZERO_OMEGAS.get(a)
    if cached is None or len(cached) < n_modes:
        cached = _bessel_zeros(a, max(n_modes, 8))
        _ZERO_OMEGAS[a] = cached
    return (cached[:n_modes]) ** 2


def _zero_uprime_at_one(a: int, n: int) -> float:
    """u'(1, lam_n(0)), the reference slope in the terminal velocity."""
    cached = _ZERO_UPRIME.get(a)
    if cached is None or len(cached) < n:
        lams = zero_potential_eigenvalues(a, max(n, 8))
        cached = np.array([float(FundamentalPair(a, l).u_prime(1.0)) for l in lams])
        _ZERO_UPRIME[a] = cached
    return float(cached[n - 1])


# ---------------------------------------------------------------------------
# per-(a, q) problem state

_PROBLEMS: "OrderedDict[tuple, _Problem]" = OrderedDict()
_PROBLEM_CACHE_SIZE = 32


def _problem(a: int, q: Potential) -> "_Problem":
    key = (a, q.grid.n_points, q.key())
    prob = _PROBLEMS.get(key)
    if prob is None:
        prob = _Problem(a, q)
        _PROBLEMS[key] = prob
        while len(_PROBLEMS) > _PROBLEM_CACHE_SIZE:
            _PROBLEMS.popitem(last=False)
    else:
        _PROBLEMS.move_to_end(key)
    return prob


def clear_caches() -> None:
    _PROBLEMS.clear()


class _Problem:
    def __init__(self, a: int, q: Potential):
        self.a = a
        self.q = q
        self.grid = q.grid
        self.qmin = float(np.min(q.samples.values))
        self.qmax = float(np.max(q.samples.values))
        self.lams: list[float] = []
        self.pairs: dict[int, SolutionPair] = {}
        self.modes: dict[int, EigenData] = {}
        self.census_ok_upto = 0

    # boundary function whose zeros are the eigenvalues
    def boundary(self, lam: float) -> float:
        phi, _ = solve_regular(self.a, lam, self.q)
        return float(phi.values[-1])

    def _minmax_window(self, n: int) -> tuple[float, float]:
        lam0 = zero_potential_eigenvalues(self.a, n)[n - 1]
        pad = 1e-7 * (1.0 + abs(lam0))
        return lam0 + self.qmin - pad, lam0 + self.qmax + pad

    def _newton_polish(self, lam: float, lo: float, hi: float) -> tuple[float, SolutionPair]:
        pair = solve_pair(self.a, lam, self.q)
        for _ in range(8):
            b = float(pair.phi.values[-1])
            v1 = float(pair.psi_tilde.values[-1])  # equals v(1, lam) exactly
            norm2 = integrate(pair.phi * pair.phi)
            cross = integrate(pair.phi * pair.psi_tilde)
            w = pair.wronskian
            db = -(v1 * norm2 - b * cross) / w
            if db == 0.0:
                break
            step = b / db
            new = lam - step
            if not lo < new < hi:
                new = 0.5 * (lo + hi)
            if abs(new - lam) <= 1e-13 * (1.0 + abs(lam)):
                lam = new
                break
            lam = new
            pair = solve_pair(self.a, lam, self.q)
        pair = solve_pair(self.a, lam, self.q)
        return lam, pair

    def _locate(self, n: int) -> tuple[float, SolutionPair]:
        lo, hi = self._minmax_window(n)
        blo = self.boundary(lo)
        bhi = self.boundary(hi)
        if np.sign(blo) == np.sign(bhi):
            return self._locate_by_scan(n)
        scale = 1.0 + abs(lo)
        root = find_root_bracketed(self.boundary, lo, hi, tol=1e-6 * scale)
        return self._newton_polish(root, lo, hi)

    def _locate_by_scan(self, n: int) -> tuple[float, SolutionPair]:
        """Mesh scan over the swept interval; used when min-max windows overlap
        or fail to show a sign change."""
        lam0 = zero_potential_eigenvalues(self.a, n + 1)
        lo = lam0[0] + self.qmin - 1.0
        hi = lam0[n - 1] + self.qmax + 1.0
        npts = 16 * n + 33
        for _ in range(4):
            mesh = np.linspace(lo, hi, npts)
            vals = np.array([self.boundary(m) for m in mesh])
            idx = np.nonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
            if len(idx) >= n:
                k = idx[n - 1]
                root = find_root_bracketed(
                    self.boundary, mesh[k], mesh[k + 1], tol=1e-6 * (1 + abs(mesh[k]))
                )
                return self._newton_polish(root, mesh[k], mesh[k + 1])
            npts = 2 * npts - 1
        raise MissedEigenvalueError(
            f"could not isolate eigenvalue {n} on [{lo:.4g}, {hi:.4g}]"
        )

    def ensure(self, n_modes: int) -> None:
        changed = False
        for n in range(len(self.lams) + 1, n_modes + 1):
            lam, pair = self._locate(n)
            self.lams.append(lam)
            self.pairs[n] = pair
            changed = True
        if changed:
            lams = np.asarray(self.lams[:n_modes])
            if not np.all(np.diff(lams) > 0):
                raise MissedEigenvalueError("computed eigenvalues are not increasing")
        if changed or self.census_ok_upto < n_modes:
            self._census(n_modes)
            self.census_ok_upto = n_modes

    def _census(self, n_modes: int) -> None:
        """Sign-change count of phi(1, .) over the swept interval must equal
        the number of computed eigenvalues."""
        lam0 = zero_potential_eigenvalues(self.a, n_modes + 1)
        lams = self.lams[:n_modes]
        pts = [lam0[0] + self.qmin - 0.5]
        for k in range(n_modes - 1):
            pts.append(0.5 * (lams[k] + lams[k + 1]))
        upper = lam0[n_modes] + self.qmin - 1e-6
        if upper <= lams[-1]:
            upper = lams[-1] + 0.25 * (lam0[n_modes] - lam0[n_modes - 1])
        pts.append(upper)
        vals = [self.boundary(p) for p in pts]
        if vals[0] <= 0:
            raise MissedEigenvalueError(
                "phi(1, .) not positive below the first eigenvalue"
            )
        for i, v in enumerate(vals):
            if np.sign(v) != (-1.0) ** i:
                raise MissedEigenvalueError(
                    f"sign census failed near mode {i}: count of sign changes "
                    f"disagrees with {n_modes}"
                )

    def mode(self, n: int) -> EigenData:
        data = self.modes.get(n)
        if data is not None:
            return data
        self.ensure(n)
        data = self._build_mode(n)
        self.modes[n] = data
        return data

    def _build_mode(self, n: int) -> EigenData:
        pair = self.pairs[n]
        lam = self.lams[n - 1]
        phi = pair.phi
        nrm = math.sqrt(integrate(phi * phi))
        g = phi * (1.0 / nrm)

        if self.q.is_zero():
            kappa = 0.0
        else:
            phip1 = float(pair.phi_prime.values[-1])
            if abs(phip1) < _PHIP_FLOOR:
                raise DegenerateEigenvalueError(
                    f"phi'(1) = {phip1:.3e} at mode {n}; eigenvalue not simple?"
                )
            kappa = math.log(abs(phip1 / _zero_uprime_at_one(self.a, n)))

        w = pair.wronskian
        if abs(w) <= _W_FLOOR:
            raise NearDegenerateError(f"wronskian {w:.3e} at eigenvalue {n}")
        afn = GridFn(self.grid, phi.values * pair.psi_tilde.values / w)
        gl = g * g
        gk = GridFn(self.grid, -afn.values + integrate(afn) * gl.values)
        vf = derivative(gl) * 2.0
        wf = derivative(gk) * (-2.0)
        return EigenData(
            n=n,
            lam=lam,
            g=g,
            kappa=kappa,
            grad_lambda=gl,
            grad_kappa=gk,
            a_fn=afn,
            v_field=vf,
            w_field=wf,
            pair=pair,
        )


# ---------------------------------------------------------------------------
# public surface

def eigenvalues(a: int, q: Potential, n_modes: int) -> RealSeq:
    """The n_modes smallest Dirichlet eigenvalues, strictly increasing."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    prob = _problem(a, q)
    prob.ensure(n_modes)
    return RealSeq(np.asarray(prob.lams[:n_modes]))


def eigenfunction(a: int, q: Potential, lam_n: float) -> GridFn:
    """Unit-norm eigenfunction at a previously computed eigenvalue."""
    pair = solve_pair(a, lam_n, q)
    nrm = math.sqrt(integrate(pair.phi * pair.phi))
    return pair.phi * (1.0 / nrm)


def terminal_velocity(a: int, q: Potential, lam_n: float, n: int) -> float:
    """kappa_n = log |phi'(1, lam_n, q) / u'(1, lam_n(0))|; exactly 0 for q = 0."""
    if q.is_zero():
        return 0.0
    pair = solve_pair(a, lam_n, q)
    phip1 = float(pair.phi_prime.values[-1])
    if abs(phip1) < _PHIP_FLOOR:
        raise DegenerateEigenvalueError(f"phi'(1) = {phip1:.3e} at lam = {lam_n:.6g}")
    return math.log(abs(phip1 / _zero_uprime_at_one(a, n)))


def grad_lambda(a: int, q: Potential, n: int) -> GridFn:
    """Gradient of lam_n with respect to q: g_n^2."""
    return _problem(a, q).mode(n).grad_lambda


def grad_kappa(a: int, q: Potential, n: int) -> GridFn:
    """Gradient of kappa_n: -a_n + (int a_n) grad lam_n."""
    return _problem(a, q).mode(n).grad_kappa


def a_fn(a: int, q: Potential, n: int) -> GridFn:
    """a_n = phi(., lam_n) psi(., lam_n); finite, vanishing at both endpoints."""
    return _problem(a, q).mode(n).a_fn


def dual_fields(a: int, q: Potential, n: int) -> tuple[GridFn, GridFn]:
    """(V_n, W_n) = (2 d/dx grad lam_n, -2 d/dx grad kappa_n)."""
    m = _problem(a, q).mode(n)
    return m.v_field, m.w_field


def eigen_data(a: int, q: Potential, n: int) -> EigenData:
    return _problem(a, q).mode(n)


def spectral_map(a: int, q: Potential, n_modes: int) -> SpectralData:
    """(mean q, (lam_tilde_n), (n kappa_n)) truncated at n_modes."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    prob = _problem(a, q)
    prob.ensure(n_modes)
    mean = q.mean
    ns = np.arange(1, n_modes + 1)
    lams = np.asarray(prob.lams[:n_modes])
    lam_tilde = lams - (ns + a / 2.0) ** 2 * _PI2 - mean + a * (a + 1)
    nk = np.empty(n_modes)
    for i, n in enumerate(ns):
        if q.is_zero():
            nk[i] = 0.0
        else:
            pair = prob.pairs[int(n)]
            phip1 = float(pair.phi_prime.values[-1])
            if abs(phip1) < _PHIP_FLOOR:
                raise DegenerateEigenvalueError(f"phi'(1) vanished at mode {n}")
            nk[i] = n * math.log(abs(phip1 / _zero_uprime_at_one(a, int(n))))
    return SpectralData(
        order=a,
        n_modes=n_modes,
        mean=mean,
        lambda_tilde=RealSeq(lam_tilde),
        n_kappa=RealSeq(nk),
    )
