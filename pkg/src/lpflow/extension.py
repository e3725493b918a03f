"""Finite-dimensional verification surface for the group/algebra extension.

The local product structure on pairs (n, A) -- n an invertible ++ matrix,
A an invertible block operator with invertible ++ block -- is governed by

    phi(A)(n)    = A_pp n A_pp^{-1}
    omega(A1,A2) = A1_pp A2_pp ((A1 A2)_pp)^{-1}
    (n1,A1)(n2,A2) = (n1 phi(A1)(n2) omega(A1,A2), A1 A2).

Its Lie algebra is the pairs (rho, X) with bracket

    [(rho,X),(rho',Y)] = ([rho,rho'] + [X_pp,rho'] - [Y_pp,rho]
                          - X_pm Y_mp + Y_pm X_mp,  [X,Y]),

whose central quotient by traceless rho reproduces the Schwinger cocycle.
Adjoint and coadjoint actions are given in the same local chart; all group
formulas are meaningful near the identity only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import (
    BlockOperator,
    Dims,
    ExtendedPoint,
    inverse,
    pairing,
    projector_p_plus,
)
from .errors import DimensionMismatchError, SingularOperatorError

__all__ = [
    "LocalGroupElement",
    "ExtendedAlgebraElement",
    "phi_map",
    "omega_map",
    "group_multiply",
    "extended_adjoint",
    "extended_bracket",
    "extended_coadjoint",
    "extended_ad_star",
    "moment_pairing",
    "central_adjoint",
]


def _pp_inv(m: np.ndarray, rcond: float = 1e-12) -> np.ndarray:
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] <= rcond * sv[0]:
        raise SingularOperatorError("++ block singular: outside the local chart")
    return np.linalg.inv(m)


@dataclass(frozen=True)
class LocalGroupElement:
    """Pair (n, A) of the locally trivialized extension near the identity."""

    n: np.ndarray
    a: BlockOperator

    def __post_init__(self) -> None:
        np_ = self.a.dims.n_plus
        if self.n.shape != (np_, np_):
            raise DimensionMismatchError(
                f"n must be {np_}x{np_} for dims {self.a.dims}, got {self.n.shape}"
            )

    @property
    def dims(self) -> Dims:
        return self.a.dims


@dataclass(frozen=True)
class ExtendedAlgebraElement:
    """Pair (rho, X): a trace-class ++ part and a full block operator."""

    rho: np.ndarray
    x: BlockOperator

    def __post_init__(self) -> None:
        np_ = self.x.dims.n_plus
        if self.rho.shape != (np_, np_):
            raise DimensionMismatchError(
                f"rho must be {np_}x{np_} for dims {self.x.dims}, got {self.rho.shape}"
            )

    @property
    def dims(self) -> Dims:
        return self.x.dims


def phi_map(a: BlockOperator, n: np.ndarray) -> np.ndarray:
    """phi(A)(n) = A_pp n A_pp^{-1}; an automorphism for each fixed A."""
    app = a.app
    return app @ n @ _pp_inv(app)


def omega_map(a1: BlockOperator, a2: BlockOperator) -> np.ndarray:
    """omega(A1, A2) = A1_pp A2_pp ((A1 A2)_pp)^{-1}."""
    a1._check(a2)
    prod_pp = (a1 @ a2).app
    return a1.app @ a2.app @ _pp_inv(prod_pp)


def group_multiply(g1: LocalGroupElement, g2: LocalGroupElement) -> LocalGroupElement:
    """(n1, A1)(n2, A2) = (n1 phi(A1)(n2) omega(A1, A2), A1 A2)."""
    if g1.dims != g2.dims:
        raise DimensionMismatchError("group elements live over different dims")
    n = g1.n @ phi_map(g1.a, g2.n) @ omega_map(g1.a, g2.a)
    return LocalGroupElement(n, g1.a @ g2.a)


def extended_adjoint(g: LocalGroupElement, e: ExtendedAlgebraElement) -> ExtendedAlgebraElement:
    """Ad_{(n,A)}(rho, X) = (n A_pp (rho + X_pp) A_pp^{-1} n^{-1} - (AXA^{-1})_pp, AXA^{-1})."""
    if g.dims != e.dims:
        raise DimensionMismatchError("dims mismatch")
    app = g.a.app
    axa = (g.a @ e.x @ inverse(g.a)).matrix
    np_ = g.dims.n_plus
    first = (
        g.n @ app @ (e.rho + e.x.app) @ _pp_inv(app) @ _pp_inv(g.n) - axa[:np_, :np_]
    )
    return ExtendedAlgebraElement(first, BlockOperator(g.dims, axa))


def extended_bracket(
    e1: ExtendedAlgebraElement, e2: ExtendedAlgebraElement
) -> ExtendedAlgebraElement:
    """The extension bracket; antisymmetric and Jacobi (tested numerically)."""
    if e1.dims != e2.dims:
        raise DimensionMismatchError("dims mismatch")
    x, y = e1.x, e2.x
    first = (
        e1.rho @ e2.rho
        - e2.rho @ e1.rho
        + x.app @ e2.rho
        - e2.rho @ x.app
        - (y.app @ e1.rho - e1.rho @ y.app)
        - x.apm @ y.amp
        + y.apm @ x.amp
    )
    second = x.matrix @ y.matrix - y.matrix @ x.matrix
    return ExtendedAlgebraElement(first, BlockOperator(e1.dims, second))


def _embed_pp(dims: Dims, tau: np.ndarray) -> np.ndarray:
    m = np.zeros((dims.total, dims.total), dtype=complex)
    m[: dims.n_plus, : dims.n_plus] = tau
    return m


def extended_coadjoint(
    g: LocalGroupElement, m: tuple[np.ndarray, BlockOperator]
) -> tuple[np.ndarray, BlockOperator]:
    """Ad*_{(n,A)}(tau, mu) = (A_pp^{-1} n^{-1} tau n A_pp,  same - A^{-1} tau A + A^{-1} mu A).

    tau enters the second slot through its ++ embedding.  Output shapes stay
    in the declared spaces (structural at finite dims).  Dual to
    :func:`extended_adjoint`: <Ad*_g m, e> = <m, Ad_g e>.
    """
    tau, mu = m
    if mu.dims != g.dims:
        raise DimensionMismatchError("dims mismatch")
    app = g.a.app
    first = _pp_inv(app) @ _pp_inv(g.n) @ tau @ g.n @ app
    ai = inverse(g.a).matrix
    am = g.a.matrix
    second = _embed_pp(g.dims, first) - ai @ _embed_pp(g.dims, tau) @ am + ai @ mu.matrix @ am
    return first, BlockOperator(g.dims, second)


def extended_ad_star(
    e: ExtendedAlgebraElement, m: tuple[np.ndarray, BlockOperator]
) -> tuple[np.ndarray, BlockOperator]:
    """ad*_{(rho,X)}(tau, mu) = ([-rho,tau] - [X_pp,tau], -[X,mu] - [rho,tau]_pp - tau X_pm + X_mp tau)."""
    tau, mu = m
    if mu.dims != e.dims:
        raise DimensionMismatchError("dims mismatch")
    rho, x = e.rho, e.x
    first = -(rho @ tau - tau @ rho) - (x.app @ tau - tau @ x.app)
    dims = e.dims
    np_ = dims.n_plus
    second = -(x.matrix @ mu.matrix - mu.matrix @ x.matrix)
    second = second - _embed_pp(dims, rho @ tau - tau @ rho)
    second[:np_, np_:] -= tau @ x.apm
    second[np_:, :np_] += x.amp @ tau
    return first, BlockOperator(dims, second)


def moment_pairing(m: tuple[np.ndarray, BlockOperator], e: ExtendedAlgebraElement) -> complex:
    """<(tau, mu), (rho, X)> = Tr(tau rho) + Tr_res(mu X)."""
    tau, mu = m
    return complex(np.trace(tau @ e.rho)) + pairing(mu, e.x)


def central_adjoint(a: BlockOperator, lam: complex, x: BlockOperator) -> tuple[complex, BlockOperator]:
    """Central-quotient adjoint: (lambda + Tr((P_plus - A^{-1} P_plus A) X), A X A^{-1}).

    This is the trace (determinant at group level) of the extension's first
    component; the correction term is linear in X, as duality with the
    coadjoint action requires.
    """
    a._check(x)
    ai = inverse(a).matrix
    pp = projector_p_plus(a.dims).matrix
    corr = np.trace((pp - ai @ pp @ a.matrix) @ x.matrix)
    return lam + complex(corr), BlockOperator(a.dims, a.matrix @ x.matrix @ ai)
