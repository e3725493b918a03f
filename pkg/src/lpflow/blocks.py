"""Operators split into 2x2 blocks by a fixed orthogonal decomposition.

Everything in this package lives on a finite-dimensional Hilbert space
H = H_plus + H_minus.  An operator is stored dense and addressed through
its four blocks (++, +-, -+, --).  The diagonal blocks carry trace-norm
bookkeeping, the off-diagonal ones Hilbert-Schmidt (Frobenius) norms; the
restricted trace is the trace of the two diagonal blocks, which at finite
truncation coincides with the ordinary trace of the dense matrix.

Values are immutable after construction; every operation returns a new
object, so concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, SingularOperatorError

__all__ = [
    "Dims",
    "BlockOperator",
    "ExtendedPoint",
    "projector_p_plus",
    "restricted_trace",
    "star_norm",
    "res_norm",
    "commutator",
    "pairing",
    "inverse",
    "sorted_spectrum",
    "spectrum_shifted",
    "spectrum_displacement",
]

#: tie tolerance for the lexicographic eigenvalue sort
SPECTRUM_TIE_TOL = 1e-12

#: relative singular-value threshold below which inversion is refused
SINGULARITY_RCOND = 1e-12


@dataclass(frozen=True)
class Dims:
    """Sizes (n_plus, n_minus) of the two components of the splitting."""

    n_plus: int
    n_minus: int

    def __post_init__(self) -> None:
        if self.n_plus < 1 or self.n_minus < 1:
            raise ValueError(f"both components need dimension >= 1, got {self}")

    @property
    def total(self) -> int:
        return self.n_plus + self.n_minus


def _as_matrix(x, shape) -> np.ndarray:
    m = np.asarray(x, dtype=complex)
    if m.shape != shape:
        raise DimensionMismatchError(f"expected block of shape {shape}, got {m.shape}")
    return m


class BlockOperator:
    """Dense complex operator with named blocks w.r.t. a fixed :class:`Dims`.

    The canonical constructor takes the assembled dense matrix; use
    :meth:`from_blocks` to build from the four blocks.  The underlying
    array is frozen (non-writeable) after construction.
    """

    __slots__ = ("dims", "_mat")

    def __init__(self, dims: Dims, mat) -> None:
        m = np.array(mat, dtype=complex)
        if m.shape != (dims.total, dims.total):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} does not match dims {dims}"
            )
        if not np.isfinite(m).all():
            raise ValueError("block operator entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "_mat", m)

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("BlockOperator is immutable")

    @classmethod
    def from_blocks(cls, dims: Dims, app, apm, amp, amm) -> "BlockOperator":
        np_, nm = dims.n_plus, dims.n_minus
        m = np.zeros((dims.total, dims.total), dtype=complex)
        m[:np_, :np_] = _as_matrix(app, (np_, np_))
        m[:np_, np_:] = _as_matrix(apm, (np_, nm))
        m[np_:, :np_] = _as_matrix(amp, (nm, np_))
        m[np_:, np_:] = _as_matrix(amm, (nm, nm))
        return cls(dims, m)

    @classmethod
    def zeros(cls, dims: Dims) -> "BlockOperator":
        return cls(dims, np.zeros((dims.total, dims.total), dtype=complex))

    @classmethod
    def identity(cls, dims: Dims) -> "BlockOperator":
        return cls(dims, np.eye(dims.total, dtype=complex))

    # -- block access (read-only views) --
    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def app(self) -> np.ndarray:
        return self._mat[: self.dims.n_plus, : self.dims.n_plus]

    @property
    def apm(self) -> np.ndarray:
        return self._mat[: self.dims.n_plus, self.dims.n_plus :]

    @property
    def amp(self) -> np.ndarray:
        return self._mat[self.dims.n_plus :, : self.dims.n_plus]

    @property
    def amm(self) -> np.ndarray:
        return self._mat[self.dims.n_plus :, self.dims.n_plus :]

    # -- algebra --
    def _check(self, other: "BlockOperator") -> None:
        if self.dims != other.dims:
            raise DimensionMismatchError(f"dims mismatch: {self.dims} vs {other.dims}")

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.dims, self._mat + other._mat)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.dims, self._mat - other._mat)

    def __neg__(self) -> "BlockOperator":
        return BlockOperator(self.dims, -self._mat)

    def __mul__(self, scalar: complex) -> "BlockOperator":
        return BlockOperator(self.dims, self._mat * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.dims, self._mat @ other._mat)

    def adjoint(self) -> "BlockOperator":
        return BlockOperator(self.dims, self._mat.conj().T)

    def power(self, k: int) -> "BlockOperator":
        return BlockOperator(self.dims, np.linalg.matrix_power(self._mat, k))

    def is_skew_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.abs(self._mat + self._mat.conj().T).max() <= tol)

    def max_abs(self) -> float:
        return float(np.abs(self._mat).max()) if self._mat.size else 0.0

    def __repr__(self) -> str:
        return f"BlockOperator(dims={self.dims}, max|entry|={self.max_abs():.3g})"


@dataclass(frozen=True)
class ExtendedPoint:
    """Point (gamma, mu) of the centrally extended predual space."""

    gamma: complex
    mu: BlockOperator

    @property
    def dims(self) -> Dims:
        return self.mu.dims

    def is_real_form(self, tol: float = 1e-12) -> bool:
        """gamma purely imaginary and mu skew-hermitian, to tolerance."""
        return abs(self.gamma.real) <= tol and self.mu.is_skew_hermitian(tol)


def projector_p_plus(dims: Dims) -> BlockOperator:
    """Orthogonal projector onto the plus component: identity ++ block."""
    m = np.zeros((dims.total, dims.total), dtype=complex)
    m[: dims.n_plus, : dims.n_plus] = np.eye(dims.n_plus)
    return BlockOperator(dims, m)


def restricted_trace(a: BlockOperator) -> complex:
    """Trace of the two diagonal blocks (= full trace at finite truncation)."""
    return complex(np.trace(a.matrix))


def star_norm(a: BlockOperator) -> float:
    """Trace norm on diagonal blocks plus Frobenius norm on off-diagonal ones."""
    return float(
        np.linalg.svd(a.app, compute_uv=False).sum()
        + np.linalg.svd(a.amm, compute_uv=False).sum()
        + np.linalg.norm(a.apm)
        + np.linalg.norm(a.amp)
    )


def res_norm(x: BlockOperator) -> float:
    """Operator norm on diagonal blocks plus Frobenius norm on off-diagonal ones."""
    return float(
        np.linalg.norm(x.app, 2)
        + np.linalg.norm(x.amm, 2)
        + np.linalg.norm(x.apm)
        + np.linalg.norm(x.amp)
    )


def commutator(a: BlockOperator, b: BlockOperator) -> BlockOperator:
    a._check(b)
    return BlockOperator(a.dims, a.matrix @ b.matrix - b.matrix @ a.matrix)


def pairing(mu: BlockOperator, x: BlockOperator) -> complex:
    """Duality pairing <mu, x> = Tr_res(mu x)."""
    mu._check(x)
    # np.vdot on transposed layout == Tr(mu @ x) without forming the product
    return complex(np.sum(mu.matrix * x.matrix.T))


def inverse(a: BlockOperator, rcond: float = SINGULARITY_RCOND) -> BlockOperator:
    """Inverse by LU factorization, refused when numerically singular."""
    sv = np.linalg.svd(a.matrix, compute_uv=False)
    if sv[-1] <= rcond * sv[0]:
        raise SingularOperatorError(
            f"singular to working precision (sv ratio {sv[-1] / sv[0]:.2e})"
        )
    return BlockOperator(a.dims, np.linalg.inv(a.matrix))


def sorted_spectrum(values: np.ndarray, tie_tol: float = SPECTRUM_TIE_TOL) -> np.ndarray:
    """Eigenvalues sorted by (real, imag), real parts quantized at ``tie_tol``.

    Quantizing the real part before the lexicographic sort keeps the order
    stable when real parts agree only up to roundoff (e.g. purely imaginary
    spectra of skew-hermitian operators).
    """
    ev = np.asarray(values, dtype=complex).ravel()
    key_re = np.round(ev.real / tie_tol) * tie_tol
    return ev[np.lexsort((ev.imag, key_re))]


def spectrum_shifted(p: ExtendedPoint, tie_tol: float = SPECTRUM_TIE_TOL) -> np.ndarray:
    """Sorted eigenvalues of mu - gamma P_plus; a symplectic-leaf diagnostic."""
    shift = p.mu.matrix - p.gamma * projector_p_plus(p.dims).matrix
    return sorted_spectrum(np.linalg.eigvals(shift), tie_tol)


def spectrum_displacement(s1: np.ndarray, s2: np.ndarray) -> float:
    """Max entrywise distance between two sorted spectra."""
    s1 = np.asarray(s1).ravel()
    s2 = np.asarray(s2).ravel()
    if s1.shape != s2.shape:
        raise DimensionMismatchError("spectra have different lengths")
    return float(np.abs(s1 - s2).max())
