"""Seeded random inputs for tests, verification suites and the harness.

All randomness flows through numpy's default PCG64 generator so that a
seed pins every stream bit-for-bit.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .blocks import BlockOperator, Dims, ExtendedPoint
from .extension import ExtendedAlgebraElement, LocalGroupElement
from .poisson import AlgebraElement

__all__ = [
    "make_rng",
    "complex_matrix",
    "block_operator",
    "skew_hermitian",
    "random_point",
    "real_form_point",
    "near_identity",
    "near_identity_group",
    "algebra_element",
    "extended_element",
]


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide generator: PCG64 seeded deterministically."""
    return np.random.default_rng(seed)


def complex_matrix(rng: np.random.Generator, rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return scale * (re + 1j * im) / np.sqrt(2)


def block_operator(rng: np.random.Generator, dims: Dims, scale: float = 1.0) -> BlockOperator:
    return BlockOperator(dims, complex_matrix(rng, dims.total, dims.total, scale))


def skew_hermitian(rng: np.random.Generator, dims: Dims, scale: float = 1.0) -> BlockOperator:
    m = complex_matrix(rng, dims.total, dims.total, scale)
    return BlockOperator(dims, (m - m.conj().T) / 2)


def random_point(
    rng: np.random.Generator, dims: Dims, scale: float = 1.0, gamma: complex | None = None
) -> ExtendedPoint:
    if gamma is None:
        gamma = complex(*rng.standard_normal(2))
    return ExtendedPoint(gamma, block_operator(rng, dims, scale))


def real_form_point(
    rng: np.random.Generator, dims: Dims, scale: float = 1.0, chi: float | None = None
) -> ExtendedPoint:
    if chi is None:
        chi = float(rng.standard_normal())
    return ExtendedPoint(1j * chi, skew_hermitian(rng, dims, scale))


def near_identity(rng: np.random.Generator, dims: Dims, eps: float = 0.1) -> BlockOperator:
    """exp(eps Z) for bounded random Z; invertible with margin, ++ block too."""
    z = complex_matrix(rng, dims.total, dims.total)
    z /= max(np.linalg.norm(z, 2), 1e-12)
    return BlockOperator(dims, expm(eps * z))


def near_identity_group(
    rng: np.random.Generator, dims: Dims, eps: float = 0.1
) -> LocalGroupElement:
    zn = complex_matrix(rng, dims.n_plus, dims.n_plus)
    zn /= max(np.linalg.norm(zn, 2), 1e-12)
    return LocalGroupElement(expm(eps * zn), near_identity(rng, dims, eps))


def algebra_element(rng: np.random.Generator, dims: Dims, scale: float = 1.0) -> AlgebraElement:
    return AlgebraElement(complex(*rng.standard_normal(2)), block_operator(rng, dims, scale))


def extended_element(
    rng: np.random.Generator, dims: Dims, scale: float = 1.0
) -> ExtendedAlgebraElement:
    return ExtendedAlgebraElement(
        complex_matrix(rng, dims.n_plus, dims.n_plus, scale), block_operator(rng, dims, scale)
    )
