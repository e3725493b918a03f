"""Central extension bracket, coadjoint actions and the Poisson pencil.

The Lie algebra is the space of pairs (lambda, X) with bracket
(-s(X,Y), [X,Y]), where s is the off-diagonal 2-cocycle
s(X,Y) = Tr(X_pm Y_mp - Y_pm X_mp).  Points (gamma, mu) of the predual
carry the pencil of compatible Poisson brackets

    {F,G}_eps = <mu, [D2F, D2G]> - eps * gamma * s(D2F, D2G),

with eps = 1 the canonical bracket.  Gradients are pairs
(d_gamma, d_mu) identified through the pairing gamma*lambda + Tr_res(mu X).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .blocks import (
    BlockOperator,
    Dims,
    ExtendedPoint,
    commutator,
    inverse,
    pairing,
    projector_p_plus,
    restricted_trace,
)
from .errors import DimensionMismatchError

__all__ = [
    "AlgebraElement",
    "GradientProvider",
    "schwinger",
    "central_bracket",
    "coad_action",
    "group_coad",
    "extended_pairing",
    "poisson_bracket_parts",
    "poisson_bracket",
    "numeric_gradient",
    "constant_gradient",
    "linear_functional",
]

#: a gradient provider maps a point to (D1 f, D2 f)
GradientProvider = Callable[[ExtendedPoint], tuple[complex, BlockOperator]]


@dataclass(frozen=True)
class AlgebraElement:
    """Element (lambda, x) of the centrally extended Lie algebra."""

    lam: complex
    x: BlockOperator

    @property
    def dims(self) -> Dims:
        return self.x.dims


def schwinger(x: BlockOperator, y: BlockOperator) -> complex:
    """Two-cocycle s(x,y) = Tr(x_pm y_mp - y_pm x_mp)."""
    x._check(y)
    return complex(np.trace(x.apm @ y.amp) - np.trace(y.apm @ x.amp))


def central_bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Bracket (-s(X,Y), [X,Y]) of the central extension."""
    return AlgebraElement(-schwinger(a.x, b.x), commutator(a.x, b.x))


def _offdiag_embed(x: BlockOperator) -> np.ndarray:
    """Dense operator with blocks (0, x_pm; -x_mp, 0) = [P_plus, x]."""
    np_ = x.dims.n_plus
    m = np.zeros((x.dims.total, x.dims.total), dtype=complex)
    m[:np_, np_:] = x.apm
    m[np_:, :np_] = -x.amp
    return m


def coad_action(a: AlgebraElement, p: ExtendedPoint) -> ExtendedPoint:
    """Algebra coadjoint action: (0, -[X,mu] - gamma(X_pm - X_mp)).

    The first slot is identically zero: gamma never moves.  Satisfies
    <ad*_a p, b> = <p, [a,b]> for the extended pairing.
    """
    if a.dims != p.dims:
        raise DimensionMismatchError(f"dims mismatch: {a.dims} vs {p.dims}")
    xm = a.x.matrix
    mm = p.mu.matrix
    out = -(xm @ mm - mm @ xm) - p.gamma * _offdiag_embed(a.x)
    return ExtendedPoint(0.0 + 0.0j, BlockOperator(p.dims, out))


def group_coad(a: BlockOperator, p: ExtendedPoint) -> ExtendedPoint:
    """Group coadjoint action: (gamma, A^{-1} mu A + gamma(P_plus - A^{-1} P_plus A)).

    Leaves gamma fixed and conjugates mu - gamma P_plus, so the shifted
    spectrum and all Casimirs are invariants.  Composition satisfies
    group_coad(A2, group_coad(A1, p)) == group_coad(A1 @ A2, p).
    """
    if a.dims != p.dims:
        raise DimensionMismatchError(f"dims mismatch: {a.dims} vs {p.dims}")
    ainv = inverse(a).matrix
    am = a.matrix
    pm = projector_p_plus(p.dims).matrix
    mu2 = ainv @ p.mu.matrix @ am + p.gamma * (pm - ainv @ pm @ am)
    return ExtendedPoint(p.gamma, BlockOperator(p.dims, mu2))


def extended_pairing(p: ExtendedPoint, a: AlgebraElement) -> complex:
    """<(gamma, mu), (lambda, X)> = gamma*lambda + Tr_res(mu X)."""
    return p.gamma * a.lam + pairing(p.mu, a.x)


def poisson_bracket_parts(
    f: GradientProvider, g: GradientProvider, p: ExtendedPoint
) -> tuple[complex, complex]:
    """The two compatible brackets ({F,G}_1, {F,G}_2) evaluated at ``p``.

    {F,G}_1 = <mu, [D2F, D2G]>  and  {F,G}_2 = -gamma s(D2F, D2G).
    """
    _, df = f(p)
    _, dg = g(p)
    b1 = pairing(p.mu, commutator(df, dg))
    b2 = -p.gamma * schwinger(df, dg)
    return b1, b2


def poisson_bracket(
    f: GradientProvider, g: GradientProvider, p: ExtendedPoint, epsilon: float = 1.0
) -> complex:
    """Pencil bracket {F,G}_eps = {F,G}_1 + eps {F,G}_2 at ``p``."""
    b1, b2 = poisson_bracket_parts(f, g, p)
    return b1 + epsilon * b2


def numeric_gradient(
    f: Callable[[ExtendedPoint], complex], p: ExtendedPoint, step: float = 1e-5
) -> tuple[complex, BlockOperator]:
    """Central-difference Frechet gradient (D1 f, D2 f) of a scalar field.

    Differentiates along the real and imaginary direction of every entry
    and combines them as the holomorphic (Wirtinger) derivative, which for
    the polynomial fields of this package is the complex-linear Frechet
    derivative the pairing identifies.  Error is O(step^2).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    dims = p.dims
    n = dims.total
    mu = p.mu.matrix

    def field(gamma: complex, mat: np.ndarray) -> complex:
        val = complex(f(ExtendedPoint(gamma, BlockOperator(dims, mat))))
        if not np.isfinite([val.real, val.imag]).all():
            raise ValueError("field returned a non-finite value")
        return val

    grad = np.zeros((n, n), dtype=complex)
    for r in range(n):
        for c in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[r, c] = 1.0
            d_re = (field(p.gamma, mu + step * e) - field(p.gamma, mu - step * e)) / (2 * step)
            d_im = (field(p.gamma, mu + 1j * step * e) - field(p.gamma, mu - 1j * step * e)) / (
                2j * step
            )
            # pairing Tr_res(delta G): gradient entry sits transposed
            grad[c, r] = (d_re + d_im) / 2
    dg_re = (field(p.gamma + step, mu) - field(p.gamma - step, mu)) / (2 * step)
    dg_im = (field(p.gamma + 1j * step, mu) - field(p.gamma - 1j * step, mu)) / (2j * step)
    return (dg_re + dg_im) / 2, BlockOperator(dims, grad)


def constant_gradient(y: BlockOperator, d_gamma: complex = 0.0) -> GradientProvider:
    """Gradient provider of the linear functional F = <mu, y> + d_gamma*gamma."""

    def provider(p: ExtendedPoint) -> tuple[complex, BlockOperator]:
        return complex(d_gamma), y

    return provider


def linear_functional(y: BlockOperator, d_gamma: complex = 0.0):
    """The scalar field F(gamma, mu) = Tr_res(mu y) + d_gamma*gamma."""

    def field(p: ExtendedPoint) -> complex:
        return pairing(p.mu, y) + d_gamma * p.gamma

    return field
