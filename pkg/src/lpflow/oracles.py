"""Closed-form and reduced-form reference solutions used as acceptance oracles.

Three independent solution routes:

* Grassmannian points: mu = gamma (P_plus - P_W) built from an orthonormal
  column basis of a subspace W; along hierarchy flows the local coordinate
  z keeps z^+ z constant (the diagonal blocks are motion invariants).
* Vector case (n_plus = 1): the off-diagonal flows reduce to linear ODEs
  driven by constant matrices M_k with (mu^k)_{-+} = M_k w, solved by
  matrix exponentials.
* Four-dimensional real form (2+2): the degree-3 Riccati-type flow reduces
  to one elliptic quadrature x(t) plus four phase quadratures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp
from scipy.linalg import expm, qr

from .blocks import (
    BlockOperator,
    Dims,
    ExtendedPoint,
    projector_p_plus,
    sorted_spectrum,
)
from .errors import DimensionMismatchError, SingularOperatorError
from .integrate import Trajectory

__all__ = [
    "GrassmannPoint",
    "grassmann_embed",
    "grassmann_z",
    "point_to_grassmann_z",
    "grassmann_zz_invariance",
    "VectorCaseState",
    "vector_case_m_operator",
    "vector_case_solution",
    "vector_state_to_point",
    "point_to_vector_state",
    "FourDimState",
    "FourDimInvariants",
    "four_dim_invariants",
    "four_dim_state_to_point",
    "point_to_four_dim_state",
    "four_dim_evolve",
    "four_dim_quasi_period",
]

#: relative rank threshold for basis orthonormalization
RANK_RCOND = 1e-10


# --------------------------------------------------------------------------
# Grassmannian coordinates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GrassmannPoint:
    """Local coordinate z (n_minus x n_plus) of a subspace with invertible top block."""

    z: np.ndarray


def _orthonormal_basis(basis: np.ndarray, n_plus: int) -> np.ndarray:
    b = np.asarray(basis, dtype=complex)
    if b.ndim != 2 or b.shape[1] != n_plus:
        raise DimensionMismatchError(f"basis must have {n_plus} columns, got {b.shape}")
    q, r, _ = qr(b, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size < n_plus or diag.min() <= RANK_RCOND * diag.max():
        raise SingularOperatorError("basis is rank deficient")
    return q


def grassmann_embed(gamma: complex, basis) -> ExtendedPoint:
    """Embed the span of ``basis`` as the point (gamma, gamma(P_plus - P_W)).

    ``basis`` is an (n_plus + n_minus) x n_plus matrix of full column rank;
    P_W is the orthogonal projector onto its span (QR with column pivoting).
    For imaginary gamma the result is a real-form point.
    """
    b = np.asarray(basis, dtype=complex)
    n_plus = b.shape[1]
    n_minus = b.shape[0] - n_plus
    if n_minus < 1:
        raise DimensionMismatchError("basis must be tall: n_minus >= 1")
    dims = Dims(n_plus, n_minus)
    q = _orthonormal_basis(b, n_plus)
    p_w = q @ q.conj().T
    mu = gamma * (projector_p_plus(dims).matrix - p_w)
    return ExtendedPoint(gamma, BlockOperator(dims, mu))


def grassmann_z(basis) -> np.ndarray:
    """Local coordinate z = beta alpha^{-1} from the (alpha; beta) row split."""
    b = np.asarray(basis, dtype=complex)
    n_plus = b.shape[1]
    alpha = b[:n_plus, :]
    sv = np.linalg.svd(alpha, compute_uv=False)
    if sv[-1] <= RANK_RCOND * sv[0]:
        raise SingularOperatorError("top block of the basis is singular")
    return b[n_plus:, :] @ np.linalg.inv(alpha)


def point_to_grassmann_z(p: ExtendedPoint) -> np.ndarray:
    """Recover z from mu = gamma(P_plus - P_W): z = (P_W)_mp (P_W)_pp^{-1}."""
    if p.gamma == 0:
        raise SingularOperatorError("gamma must be nonzero to recover the projector")
    p_w = projector_p_plus(p.dims).matrix - p.mu.matrix / p.gamma
    np_ = p.dims.n_plus
    top = p_w[:np_, :np_]
    sv = np.linalg.svd(top, compute_uv=False)
    if sv[-1] <= RANK_RCOND * max(sv[0], 1.0):
        raise SingularOperatorError("projector ++ block singular: no local coordinate")
    return p_w[np_:, :np_] @ np.linalg.inv(top)


def grassmann_zz_invariance(traj: Trajectory) -> float:
    """Max drift of the sorted eigenvalues of z^+ z along the trajectory."""
    z0 = point_to_grassmann_z(traj.points[0])
    ev0 = np.sort(np.linalg.eigvalsh(z0.conj().T @ z0))
    worst = 0.0
    for p in traj.points[1:]:
        z = point_to_grassmann_z(p)
        ev = np.sort(np.linalg.eigvalsh(z.conj().T @ z))
        worst = max(worst, float(np.abs(ev - ev0).max()))
    return worst


# --------------------------------------------------------------------------
# vector case (n_plus = 1)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorCaseState:
    """State (a, v, w, A) with mu = [[a, v^+], [w, A]] at n_plus = 1."""

    a: complex
    v: np.ndarray  # column vector; mu_pm = v^+
    w: np.ndarray  # column vector; mu_mp = w
    A: np.ndarray

    def __post_init__(self) -> None:
        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.v.shape != (n, 1) or self.w.shape != (n, 1):
            raise DimensionMismatchError("inconsistent vector-case shapes")


def vector_state_to_point(state: VectorCaseState, gamma: complex) -> ExtendedPoint:
    n = state.A.shape[0]
    dims = Dims(1, n)
    mu = np.zeros((n + 1, n + 1), dtype=complex)
    mu[0, 0] = state.a
    mu[:1, 1:] = state.v.conj().T
    mu[1:, :1] = state.w
    mu[1:, 1:] = state.A
    return ExtendedPoint(gamma, BlockOperator(dims, mu))


def point_to_vector_state(p: ExtendedPoint) -> VectorCaseState:
    if p.dims.n_plus != 1:
        raise DimensionMismatchError("vector case requires n_plus = 1")
    mu = p.mu.matrix
    return VectorCaseState(
        complex(mu[0, 0]), mu[:1, 1:].conj().T.copy(), mu[1:, :1].copy(), mu[1:, 1:].copy()
    )


def vector_case_m_operator(k: int, state: VectorCaseState, gamma: complex) -> np.ndarray:
    """Constant matrix M_k with (mu^k)_{-+} = M_k w and (mu^k)_{+-} = v^+ M_k.

    Built by the recurrence M_k = (mu^{k-1})_{++} 1 + A M_{k-1}, M_1 = 1;
    the scalars (mu^m)_{++} are conserved under every hierarchy flow.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    mu = vector_state_to_point(state, gamma).mu.matrix
    n = state.A.shape[0]
    m = np.eye(n, dtype=complex)
    for j in range(2, k + 1):
        scal = np.linalg.matrix_power(mu, j - 1)[0, 0]
        m = scal * np.eye(n, dtype=complex) + state.A @ m
    return m


def vector_case_solution(
    state0: VectorCaseState, gamma: complex, taus: Mapping[int, float]
) -> VectorCaseState:
    """Exact endpoint of the commuting degree-k off-diagonal flows.

    For flow times tau_k of the flows d mu_pm/d tau = -gamma (mu^k)_pm,
    d mu_mp/d tau = +gamma (mu^k)_mp:

        w(tau)  = exp(+gamma sum_k M_k tau_k) w(0),
        v^+(tau) = v^+(0) exp(-gamma sum_k M_k tau_k);

    a and A are unchanged.
    """
    n = state0.A.shape[0]
    total = np.zeros((n, n), dtype=complex)
    for k, t in taus.items():
        if t != 0.0:
            total += vector_case_m_operator(int(k), state0, gamma) * t
    prop = expm(gamma * total)
    w_t = prop @ state0.w
    vdag_t = state0.v.conj().T @ expm(-gamma * total)
    return VectorCaseState(state0.a, vdag_t.conj().T, w_t, state0.A.copy())


# --------------------------------------------------------------------------
# four-dimensional real form
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FourDimState:
    """Real-form 2+2 data: gamma = i chi, mu = i[[A, Z], [Z^+, D]].

    A = diag(a1, a2), D = diag(d1, d2) are the conserved diagonal blocks;
    Z = [[a, b], [c, d]] carries the dynamics.
    """

    chi: float
    a1: float
    a2: float
    d1: float
    d2: float
    a: complex
    b: complex
    c: complex
    d: complex

    @property
    def generic(self) -> bool:
        return self.a1 != self.a2 and self.d1 != self.d2

    @property
    def z(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)


@dataclass(frozen=True)
class FourDimInvariants:
    """Conserved moduli pairs, the mixed invariant and the quadrature data."""

    p2: float
    q2: float
    r2: float
    s2: float
    delta: float
    x: float
    v_of_x: Polynomial
    w_of_x: Polynomial


def four_dim_state_to_point(s: FourDimState) -> ExtendedPoint:
    a_blk = np.diag([s.a1, s.a2]).astype(complex)
    d_blk = np.diag([s.d1, s.d2]).astype(complex)
    z = s.z
    mu = 1j * np.block([[a_blk, z], [z.conj().T, d_blk]])
    return ExtendedPoint(1j * s.chi, BlockOperator(Dims(2, 2), mu))


def point_to_four_dim_state(p: ExtendedPoint, tol: float = 1e-9) -> FourDimState:
    if p.dims != Dims(2, 2):
        raise DimensionMismatchError("four-dim case requires dims (2, 2)")
    if not p.is_real_form(tol):
        raise ValueError("four-dim case requires a real-form point")
    chi = p.gamma.imag
    b_mat = p.mu.matrix / 1j
    a_blk = b_mat[:2, :2]
    d_blk = b_mat[2:, 2:]
    if max(abs(a_blk[0, 1]), abs(a_blk[1, 0]), abs(d_blk[0, 1]), abs(d_blk[1, 0])) > tol:
        raise ValueError("diagonal blocks must be diagonal matrices")
    z = b_mat[:2, 2:]
    return FourDimState(
        chi,
        float(a_blk[0, 0].real),
        float(a_blk[1, 1].real),
        float(d_blk[0, 0].real),
        float(d_blk[1, 1].real),
        complex(z[0, 0]),
        complex(z[0, 1]),
        complex(z[1, 0]),
        complex(z[1, 1]),
    )


def four_dim_invariants(s: FourDimState) -> FourDimInvariants:
    """Conserved quantities and the quadrature polynomials v(x), w(x).

    With x = |a|^2 the remaining moduli are p^2 - x, q^2 - x, r^2 - q^2 + x.
    v(x) equals 2 Re(a conj(b) conj(c) d) along the motion and
    w(x) = chi^2 (4x(p^2-x)(q^2-x)(r^2-q^2+x) - v(x)^2) = (dx/dt)^2.
    Consistency p^2 + r^2 = q^2 + s^2 is asserted.
    """
    aa, bb, cc, dd = abs(s.a) ** 2, abs(s.b) ** 2, abs(s.c) ** 2, abs(s.d) ** 2
    p2, q2, r2, s2 = aa + bb, aa + cc, cc + dd, bb + dd
    scale = max(p2, r2, 1.0)
    if abs((p2 + r2) - (q2 + s2)) > 1e-12 * scale:
        raise AssertionError("moduli identity p^2 + r^2 = q^2 + s^2 violated")
    delta = (
        aa * s.a1 * s.d1
        + bb * s.a1 * s.d2
        + cc * s.a2 * s.d1
        + dd * s.a2 * s.d2
        + aa * cc
        + bb * dd
        + 2 * np.real(s.a * np.conj(s.b) * np.conj(s.c) * s.d)
    )
    x = Polynomial([0.0, 1.0])
    moduli_part = (
        x * (s.a1 - s.a2) * (s.d1 - s.d2)
        + p2 * s.a1 * s.d2
        + q2 * s.a2 * s.d1
        + (r2 - q2) * s.a2 * s.d2
        + x * (q2 - x)
        + (p2 - x) * (r2 - q2 + x)
    )
    v = delta - moduli_part
    w = s.chi**2 * (4 * x * (p2 - x) * (q2 - x) * (r2 - q2 + x) - v**2)
    return FourDimInvariants(float(p2), float(q2), float(r2), float(s2), float(delta), float(aa), v, w)


def _four_dim_rhs(s: FourDimState, inv: FourDimInvariants):
    """Scalar ODE system for (x, u, alpha, beta, gamma, delta) phases.

    u = dx/dt is lifted to du/dt = w'(x)/2, which conserves u^2 - w(x)
    exactly and is smooth through the turning points of x.
    """
    chi = s.chi
    a1, a2, d1, d2 = s.a1, s.a2, s.d1, s.d2
    p2, q2, r2 = inv.p2, inv.q2, inv.r2
    v = inv.v_of_x
    wp = inv.w_of_x.deriv()

    def rhs(t, y):
        x, u = y[0], y[1]
        vx = v(x)
        return [
            u,
            0.5 * wp(x),
            chi * (a1**2 + a1 * d1 + d1**2 + p2 + q2 - x + vx / (2 * x)),
            chi * (a1**2 + a1 * d2 + d2**2 + p2 + r2 - q2 + x + vx / (2 * (p2 - x))),
            chi * (a2**2 + a2 * d1 + d1**2 + r2 + x + vx / (2 * (q2 - x))),
            chi * (a2**2 + a2 * d2 + d2**2 + p2 + r2 - x + vx / (2 * (r2 - q2 + x))),
        ]

    return rhs


def _four_dim_initial(s: FourDimState, inv: FourDimInvariants) -> list[float]:
    u0 = 2 * s.chi * np.imag(s.a * np.conj(s.b) * np.conj(s.c) * s.d)
    return [
        inv.x,
        float(u0),
        float(np.angle(s.a)),
        float(np.angle(s.b)),
        float(np.angle(s.c)),
        float(np.angle(s.d)),
    ]


def four_dim_evolve(s0: FourDimState, t: float, rtol: float = 1e-12) -> FourDimState:
    """Evolve the reduced scalar system and reconstruct Z from moduli and phases.

    Phases are integrated continuously (no mod-2pi folding); moduli are
    reconstructed from the conserved combinations, so they satisfy the
    moduli identities exactly by construction.
    """
    if not s0.generic:
        raise ValueError("generic case a1 != a2, d1 != d2 required")
    inv = four_dim_invariants(s0)
    if t == 0.0:
        return s0
    y0 = _four_dim_initial(s0, inv)
    sol = solve_ivp(
        _four_dim_rhs(s0, inv),
        (0.0, t),
        y0,
        rtol=rtol,
        atol=1e-14,
        method="DOP853",
        dense_output=False,
    )
    if not sol.success:
        raise RuntimeError(f"quadrature integration failed: {sol.message}")
    x, _, al, be, ga, de = sol.y[:, -1]
    return _reconstruct(s0, inv, x, al, be, ga, de)


def _reconstruct(s0, inv, x, al, be, ga, de) -> FourDimState:
    clip = lambda r: max(r, 0.0)
    return FourDimState(
        s0.chi,
        s0.a1,
        s0.a2,
        s0.d1,
        s0.d2,
        np.sqrt(clip(x)) * np.exp(1j * al),
        np.sqrt(clip(inv.p2 - x)) * np.exp(1j * be),
        np.sqrt(clip(inv.q2 - x)) * np.exp(1j * ga),
        np.sqrt(clip(inv.r2 - inv.q2 + x)) * np.exp(1j * de),
    )


def four_dim_quasi_period(s0: FourDimState, horizon: float = 200.0) -> float:
    """Oscillation period of x(t): twice the gap between consecutive u-zeros."""
    inv = four_dim_invariants(s0)
    y0 = _four_dim_initial(s0, inv)
    crossings: list[float] = []

    def event(t, y):
        return y[1]

    event.direction = 0.0
    sol = solve_ivp(
        _four_dim_rhs(s0, inv), (0.0, horizon), y0, rtol=1e-11, atol=1e-13,
        method="DOP853", events=event,
    )
    if not sol.success:
        raise RuntimeError(f"period search failed: {sol.message}")
    crossings = [t for t in sol.t_events[0] if t > 1e-9]
    if len(crossings) < 2:
        raise RuntimeError("no oscillation detected within the horizon")
    return 2.0 * (crossings[1] - crossings[0])
