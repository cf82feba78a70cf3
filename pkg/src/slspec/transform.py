"""Integral operators that turn Bessel-product pairings into trigonometric ones.

The elementary operator (a >= 1)

    S_a[f](x) = f(x) - 4a x^(2a-1) int_x^1 f(t) t^(-2a) dt

has adjoint S_a*[g](x) = g(x) - 4a x^(-2a) int_0^x t^(2a-1) g(t) dt and
inverse A_a[g](x) = g(x) - 4a x^(-2a-1) int_0^x t^2a g(t) dt.  The chains

    T_a = (-1)^(a+1) S_a S_{a-1} ... S_1,   B_a = (-1)^(a+1) A_a A_{a-1} ... A_1

relate the Bessel products Phi_a = j_a^2 and Psi_a = j_a eta_a to cos(2wx)
and sin(2wx); ker(T_a*) is spanned by x^2, x^4, ..., x^2a.  T_0 and B_0 are
the identity by convention, so order-0 callers need no special casing.

Numerically the delicate point is that S-type outputs contain an exact
x^(2a-1) log x component whenever the input has a nonzero (2a-1)-th
derivative at 0.  Re-sampling such a function and pushing it through another
quadrature destroys the first panels.  The operators therefore carry an
exact term decomposition with every result they produce:

    sum of  coef * x^p * (log x)^k * atom(x)

where an atom is the raw input, or a running integral of it against a power
(or power*log) weight.  Applying an operator to a decomposed function
reduces, by integration by parts, to new atoms of the same shape; only the
original smooth input is ever touched by quadrature.  Plain GridFns without
a decomposition fall back to direct product-rule quadrature, which is
accurate whenever the input is smooth.
"""

from __future__ import annotations

import math

import numpy as np

from .bessel import phi_cap, phi_cap_prime, psi_cap, psi_cap_prime
from .errors import UnsupportedOrderError
from .numerics import (
    Grid,
    GridFn,
    inner,
    integrate,
    weighted_prefix,
    weighted_prefix_log,
    weighted_suffix,
    weighted_suffix_log,
)

__all__ = [
    "apply_S",
    "apply_S_adj",
    "apply_A",
    "apply_A_adj",
    "apply_T",
    "apply_T_adj",
    "apply_B",
    "apply_B_adj",
    "apply_operator",
    "OPERATOR_KINDS",
    "kernel_basis",
    "structured_inner",
    "verify_bessel_transport",
    "commute_check",
]


def _check_positive_order(a: int) -> int:
    if not isinstance(a, (int, np.integer)) or a < 1:
        raise UnsupportedOrderError(f"elementary operators need integer a >= 1, got {a!r}")
    return int(a)


# ---------------------------------------------------------------------------
# structured representation
#
# atom  = (kind, w, V)  with kind in {plain, suf, pre, suflog, prelog}
#   plain:  V(x)
#   suf:    int_x^1 t^w V dt          suflog: int_x^1 t^w log t V dt
#   pre:    int_0^x t^w V dt          prelog: int_0^x t^w log t V dt
# term  = (coef, p, k, atom)  meaning  coef * x^p * (log x)^k * atom(x)

class _Algebra:
    def __init__(self, grid: Grid):
        self.grid = grid
        self._cache: dict = {}
        self._ones = np.ones(grid.n_points)

    def one_atom(self):
        return ("plain", 0, self._ones)

    def atom_values(self, atom) -> np.ndarray:
        kind, w, V = atom
        key = (kind, w, id(V))
        vals = self._cache.get(key)
        if vals is None:
            if kind == "plain":
                vals = V
            elif kind == "suf":
                vals = weighted_suffix(V, self.grid, w)
            elif kind == "pre":
                vals = weighted_prefix(V, self.grid, w)
            elif kind == "suflog":
                vals = weighted_suffix_log(V, self.grid, w)
            elif kind == "prelog":
                vals = weighted_prefix_log(V, self.grid, w)
            else:  # pragma: no cover
                raise AssertionError(kind)
            self._cache[key] = vals
        return vals

    def full_integral(self, atom) -> float:
        """Value at x = 1 of a prefix-type atom (the complete integral)."""
        return float(self.atom_values(atom)[-1])

    # -- integration by parts rules ----------------------------------------
    def suf_terms(self, terms, w0: int):
        """Decomposition of x -> int_x^1 t^w0 f(t) dt for decomposed f."""
        out = []
        for coef, p, k, atom in terms:
            kind, w, V = atom
            gamma = w0 + p
            beta = gamma + 1
            if kind == "plain":
                out.append((coef, 0, 0, ("suflog" if k else "suf", gamma, V)))
                continue
            if k == 0:
                if kind == "suf":
                    if beta != 0:
                        out.append((-coef / beta, beta, 0, atom))
                        out.append((coef / beta, 0, 0, ("suf", beta + w, V)))
                    else:
                        out.append((-coef, 0, 1, atom))
                        out.append((coef, 0, 0, ("suflog", w, V)))
                elif kind == "suflog":
                    if beta == 0:
                        raise NotImplementedError("double-log composition")
                    out.append((-coef / beta, beta, 0, atom))
                    out.append((coef / beta, 0, 0, ("suflog", beta + w, V)))
                elif kind == "pre":
                    if beta != 0:
                        C = self.full_integral(atom)
                        out.append((coef * C / beta, 0, 0, self.one_atom()))
                        out.append((-coef / beta, beta, 0, atom))
                        out.append((-coef / beta, 0, 0, ("suf", beta + w, V)))
                    else:
                        out.append((-coef, 0, 1, atom))
                        out.append((-coef, 0, 0, ("suflog", w, V)))
                elif kind == "prelog":
                    if beta == 0:
                        raise NotImplementedError("double-log composition")
                    C = self.full_integral(atom)
                    out.append((coef * C / beta, 0, 0, self.one_atom()))
                    out.append((-coef / beta, beta, 0, atom))
                    out.append((-coef / beta, 0, 0, ("suflog", beta + w, V)))
                else:  # pragma: no cover
                    raise AssertionError(kind)
                continue
            # k == 1: antiderivative of t^gamma log t is t^beta (log t / beta - 1/beta^2)
            if beta == 0 or kind in ("suflog", "prelog"):
                raise NotImplementedError("double-log composition")
            if kind == "suf":
                out.append((-coef / beta, beta, 1, atom))
                out.append((coef / beta ** 2, beta, 0, atom))
                out.append((coef / beta, 0, 0, ("suflog", beta + w, V)))
                out.append((-coef / beta ** 2, 0, 0, ("suf", beta + w, V)))
            elif kind == "pre":
                C = self.full_integral(atom)
                out.append((-coef * C / beta ** 2, 0, 0, self.one_atom()))
                out.append((-coef / beta, beta, 1, atom))
                out.append((coef / beta ** 2, beta, 0, atom))
                out.append((-coef / beta, 0, 0, ("suflog", beta + w, V)))
                out.append((coef / beta ** 2, 0, 0, ("suf", beta + w, V)))
            else:  # pragma: no cover
                raise AssertionError(kind)
        return out

    def pre_terms(self, terms, w0: int):
        """Decomposition of x -> int_0^x t^w0 f(t) dt for decomposed f."""
        out = []
        for coef, p, k, atom in terms:
            kind, w, V = atom
            gamma = w0 + p
            beta = gamma + 1
            if kind == "plain":
                if gamma < 0:
                    raise ValueError("divergent prefix integral")
                out.append((coef, 0, 0, ("prelog" if k else "pre", gamma, V)))
                continue
            if kind in ("suf", "pre") and beta + w + 1 <= 0:
                raise ValueError("divergent boundary term in prefix reduction")
            if k == 0:
                if kind == "pre":
                    if beta != 0:
                        out.append((coef / beta, beta, 0, atom))
                        out.append((-coef / beta, 0, 0, ("pre", beta + w, V)))
                    else:
                        out.append((coef, 0, 1, atom))
                        out.append((-coef, 0, 0, ("prelog", w, V)))
                elif kind == "suf":
                    if beta != 0:
                        out.append((coef / beta, beta, 0, atom))
                        out.append((coef / beta, 0, 0, ("pre", beta + w, V)))
                    else:
                        if w + 1 <= 0:
                            raise ValueError("divergent boundary term")
                        out.append((coef, 0, 1, atom))
                        out.append((coef, 0, 0, ("prelog", w, V)))
                elif kind == "prelog":
                    if beta == 0:
                        raise NotImplementedError("double-log composition")
                    out.append((coef / beta, beta, 0, atom))
                    out.append((-coef / beta, 0, 0, ("prelog", beta + w, V)))
                elif kind == "suflog":
                    if beta == 0:
                        raise NotImplementedError("double-log composition")
                    out.append((coef / beta, beta, 0, atom))
                    out.append((coef / beta, 0, 0, ("prelog", beta + w, V)))
                else:  # pragma: no cover
                    raise AssertionError(kind)
                continue
            if beta == 0 or kind in ("suflog", "prelog"):
                raise NotImplementedError("double-log composition")
            if kind == "pre":
                out.append((coef / beta, beta, 1, atom))
                out.append((-coef / beta ** 2, beta, 0, atom))
                out.append((-coef / beta, 0, 0, ("prelog", beta + w, V)))
                out.append((coef / beta ** 2, 0, 0, ("pre", beta + w, V)))
            elif kind == "suf":
                out.append((coef / beta, beta, 1, atom))
                out.append((-coef / beta ** 2, beta, 0, atom))
                out.append((coef / beta, 0, 0, ("prelog", beta + w, V)))
                out.append((-coef / beta ** 2, 0, 0, ("pre", beta + w, V)))
            else:  # pragma: no cover
                raise AssertionError(kind)
        return out

    # -- realization --------------------------------------------------------
    def evaluate(self, terms, node0: float) -> np.ndarray:
        x = self.grid.x
        xi = x[1:]
        logxi = np.log(xi)
        vals = np.zeros(self.grid.n_points)
        for coef, p, k, atom in terms:
            av = self.atom_values(atom)
            contrib = coef * av[1:]
            if p:
                contrib = contrib * xi ** float(p)
            if k:
                contrib = contrib * logxi
            vals[1:] += contrib
        vals[0] = node0
        return vals


def _merge(terms):
    acc: dict = {}
    for coef, p, k, atom in terms:
        key = (p, k, atom[0], atom[1], id(atom[2]))
        if key in acc:
            old_coef, _, _, _ = acc[key]
            acc[key] = (old_coef + coef, p, k, atom)
        else:
            acc[key] = (coef, p, k, atom)
    return [t for t in acc.values() if t[0] != 0.0]


def _structure_of(f: GridFn):
    if f.structure is not None:
        return f.structure
    return [(1.0, 0, 0, ("plain", 0, f.values))]


def _apply_elementary(which: str, b: int, f: GridFn) -> GridFn:
    b = _check_positive_order(b)
    grid = f.grid
    alg = _Algebra(grid)
    terms = _structure_of(f)
    if which == "S":
        integral = alg.suf_terms(terms, -2 * b)
        dp, limit = 2 * b - 1, 1.0 - 4.0 * b / (2 * b - 1)
    elif which == "A_adj":
        integral = alg.suf_terms(terms, -2 * b - 1)
        dp, limit = 2 * b, -1.0
    elif which == "S_adj":
        integral = alg.pre_terms(terms, 2 * b - 1)
        dp, limit = -2 * b, -1.0
    elif which == "A":
        integral = alg.pre_terms(terms, 2 * b)
        dp, limit = -2 * b - 1, 1.0 - 4.0 * b / (2 * b + 1)
    else:  # pragma: no cover
        raise AssertionError(which)
    scaled = [(-4.0 * b * c, p + dp, k, atom) for c, p, k, atom in integral]
    new_terms = _merge(list(terms) + scaled)
    node0 = float(f.values[0]) * limit
    vals = alg.evaluate(new_terms, node0)
    # The prefix operators S* and A map smooth functions to smooth functions,
    # so when the input carried no decomposition the output needs none either;
    # dropping it keeps long prefix chains free of coefficient growth in the
    # by-parts reduction.  Suffix outputs always carry their decomposition
    # (they are the ones with the x^(2b-1) log x component).
    keep = f.structure is not None or which in ("S", "A_adj")
    return GridFn(grid, vals, structure=new_terms if keep else None)


def _scale(f: GridFn, s: float) -> GridFn:
    terms = None
    if f.structure is not None:
        terms = [(c * s, p, k, atom) for c, p, k, atom in f.structure]
    return GridFn(f.grid, f.values * s, structure=terms)


def apply_S(a: int, f: GridFn) -> GridFn:
    """S_a[f](x) = f - 4a x^(2a-1) int_x^1 f/t^2a; node 0 takes the limit
    f(0) (1 - 4a/(2a-1))."""
    return _apply_elementary("S", a, f)


def apply_S_adj(a: int, g: GridFn) -> GridFn:
    """S_a*[g](x) = g - 4a x^(-2a) int_0^x t^(2a-1) g; node 0 limit is -g(0)."""
    return _apply_elementary("S_adj", a, g)


def apply_A(a: int, g: GridFn) -> GridFn:
    """A_a[g](x) = g - 4a x^(-2a-1) int_0^x t^2a g, the inverse of S_a;
    node 0 limit g(0) (1 - 4a/(2a+1))."""
    return _apply_elementary("A", a, g)


def apply_A_adj(a: int, f: GridFn) -> GridFn:
    """A_a*[f](x) = f - 4a x^2a int_x^1 f/t^(2a+1); node 0 limit is -f(0)."""
    return _apply_elementary("A_adj", a, f)


def apply_T(a: int, f: GridFn) -> GridFn:
    """T_a = (-1)^(a+1) S_a ... S_1; identity for a = 0."""
    if a == 0:
        return f
    out = f
    for b in range(1, a + 1):
        out = apply_S(b, out)
    return _scale(out, float((-1.0) ** (a + 1)))


def apply_T_adj(a: int, g: GridFn) -> GridFn:
    """T_a* = (-1)^(a+1) S_1* ... S_a*; identity for a = 0."""
    if a == 0:
        return g
    out = g
    for b in range(a, 0, -1):
        out = apply_S_adj(b, out)
    return _scale(out, float((-1.0) ** (a + 1)))


def apply_B(a: int, g: GridFn) -> GridFn:
    """B_a = (-1)^(a+1) A_a ... A_1, the inverse of T_a; identity for a = 0."""
    if a == 0:
        return g
    out = g
    for b in range(1, a + 1):
        out = apply_A(b, out)
    return _scale(out, float((-1.0) ** (a + 1)))


def apply_B_adj(a: int, f: GridFn) -> GridFn:
    """B_a* = (-1)^(a+1) A_1* ... A_a*; identity for a = 0."""
    if a == 0:
        return f
    out = f
    for b in range(a, 0, -1):
        out = apply_A_adj(b, out)
    return _scale(out, float((-1.0) ** (a + 1)))


OPERATOR_KINDS = {
    "S": apply_S,
    "S_adj": apply_S_adj,
    "A": apply_A,
    "A_adj": apply_A_adj,
    "T": apply_T,
    "T_adj": apply_T_adj,
    "B": apply_B,
    "B_adj": apply_B_adj,
}


def apply_operator(kind: str, a: int, f: GridFn) -> GridFn:
    try:
        op = OPERATOR_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown operator kind {kind!r}; known: {sorted(OPERATOR_KINDS)}")
    return op(a, f)


def structured_inner(f: GridFn, g: GridFn) -> float:
    """<f, g> where f may carry an operator decomposition.

    For decomposed f every pairing reduces, by one integration by parts, to
    Simpson quadrature of smooth integrands; without a decomposition this is
    the plain Simpson pairing.  g must be smooth (typically an analytic
    probe).
    """
    if f.structure is None:
        return inner(f, g)
    grid = f.grid
    alg = _Algebra(grid)
    x = grid.x
    total = 0.0
    for coef, p, k, atom in f.structure:
        kind, w, V = atom
        if k != 0 or p < 0:
            raise NotImplementedError("pairing with log-carrying terms")
        if kind == "plain":
            vals = V * g.values
            if p:
                vals = vals * x ** float(p)
            total += coef * float(np.dot(grid.weights, vals))
            continue
        v = weighted_prefix(g.values, grid, p)
        if kind in ("suf", "pre"):
            integ = np.empty(grid.n_points)
            integ[1:] = v[1:] * x[1:] ** float(w) * V[1:]
            if p + 1 + w > 0:
                integ[0] = 0.0
            elif p + 1 + w == 0:
                integ[0] = g.values[0] * V[0] / (p + 1)
            else:
                raise ValueError("divergent pairing")
            val = float(np.dot(grid.weights, integ))
            if kind == "suf":
                total += coef * val
            else:
                C = alg.full_integral(atom)
                total += coef * (float(v[-1]) * C - val)
        else:
            raise NotImplementedError(f"pairing with {kind} atoms")
    return total


def kernel_basis(a: int, grid: Grid) -> list[GridFn]:
    """Monomials x^2, x^4, ..., x^2a spanning ker(T_a*)."""
    _check_positive_order(a)
    return [GridFn(grid, grid.x ** (2 * k)) for k in range(1, a + 1)]


def commute_check(a: int, b: int, f: GridFn) -> float:
    """sup |S_a S_b f - S_b S_a f|; the family commutes, so this is noise."""
    lhs = apply_S(a, apply_S(b, f))
    rhs = apply_S(b, apply_S(a, f))
    return float(np.max(np.abs(lhs.values - rhs.values)))


def verify_bessel_transport(a: int, omega: float, grid: Grid) -> dict[str, float]:
    """Residuals of the Bessel <-> trigonometric transport identities at order a.

    Covers the order-lowering relations for Phi, Psi and their derivatives,
    the adjoint-chain images of cos/sin, the derivative-chain images, and the
    two integral-form pairings against smooth probes.  Sup norms except the
    `pairing_*` entries (absolute differences of scalars).
    """
    a = _check_positive_order(a)
    x = grid.x
    w = float(omega)
    z = w * x

    phi_a = GridFn(grid, phi_cap(a, z))
    psi_a = GridFn(grid, psi_cap(a, z))
    phi_am1 = GridFn(grid, phi_cap(a - 1, z))
    psi_am1 = GridFn(grid, psi_cap(a - 1, z))
    dphi_a = GridFn(grid, phi_cap_prime(a, z))
    dpsi_a = GridFn(grid, psi_cap_prime(a, z))
    dphi_am1 = GridFn(grid, phi_cap_prime(a - 1, z))
    dpsi_am1 = GridFn(grid, psi_cap_prime(a - 1, z))

    cos2 = GridFn(grid, np.cos(2 * w * x))
    sin2 = GridFn(grid, np.sin(2 * w * x))

    res: dict[str, float] = {}

    def sup(u: GridFn, v: GridFn) -> float:
        return float(np.max(np.abs(u.values - v.values)))

    # order lowering: Phi_a = -S_a*[Phi_{a-1}], Psi_a = -S_a*[Psi_{a-1}]
    res["lower_phi"] = sup(phi_a, _scale(apply_S_adj(a, phi_am1), -1.0))
    res["lower_psi"] = sup(psi_a, _scale(apply_S_adj(a, psi_am1), -1.0))
    # derivative lowering: Phi_a' = -A_a[Phi_{a-1}'], same for Psi
    res["lower_dphi"] = sup(dphi_a, _scale(apply_A(a, dphi_am1), -1.0))
    res["lower_dpsi"] = sup(dpsi_a, _scale(apply_A(a, dpsi_am1), -1.0))
    # adjoint chain: 2 Phi_a - 1 = T_a*[cos 2wx], Psi_a = T_a*[-sin(2wx)/2]
    res["chain_phi"] = sup(phi_a * 2.0 - 1.0, apply_T_adj(a, cos2))
    res["chain_psi"] = sup(psi_a, apply_T_adj(a, _scale(sin2, -0.5)))
    # derivative chain: Phi_a'(wx) = B_a[-sin 2wx], Psi_a'(wx) = B_a[-cos 2wx]
    res["chain_dphi"] = sup(dphi_a, apply_B(a, _scale(sin2, -1.0)))
    res["chain_dpsi"] = sup(dpsi_a, apply_B(a, _scale(cos2, -1.0)))
    # integral pairings against probes:
    # int (2 Phi_a - 1) q = int cos(2wt) T_a[q],  int Psi_a q = -1/2 int sin(2wt) T_a[q]
    probes = [
        grid.constant(1.0),
        GridFn(grid, grid.x ** 2 - grid.x),
        GridFn(grid, np.exp(grid.x) * np.cos(3.0 * grid.x)),
    ]
    p1 = p2 = 0.0
    for qf in probes:
        tq = apply_T(a, qf)
        p1 = max(p1, abs(inner(phi_a * 2.0 - 1.0, qf) - structured_inner(tq, cos2)))
        p2 = max(p2, abs(inner(psi_a, qf) + 0.5 * structured_inner(tq, sin2)))
    res["pairing_phi"] = p1
    res["pairing_psi"] = p2
    # zero-frequency limit of the adjoint chain: T_a*[1] = -1
    ones = grid.constant(1.0)
    res["adjoint_of_one"] = float(np.max(np.abs(apply_T_adj(a, ones).values + 1.0)))
    # integrated form: int T_a[v] = -int v
    res["integral_of_T"] = max(
        abs(structured_inner(apply_T(a, qf), ones) + integrate(qf)) for qf in probes
    )
    return res
