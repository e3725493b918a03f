"""Time steppers for the hierarchy flows and invariant monitoring.

Two steppers are provided: classical RK4, and a structure-preserving
Lie-Euler step that freezes the Lax generator at the step start and
conjugates the Lax operand by its exponential, preserving the operand's
spectrum to roundoff regardless of the step size.  gamma never evolves;
it is copied bit-identically into every new point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .blocks import (
    BlockOperator,
    ExtendedPoint,
    sorted_spectrum,
    spectrum_displacement,
)
from .hierarchy import (
    Generating,
    HamiltonianId,
    Hbasis,
    RHSForm,
    Wbasis,
    _flow_rhs_dense,
    _grad_generating_dense,
    _projector,
    _w_row,
    casimir,
    hamiltonian,
)

__all__ = [
    "Integrator",
    "FlowSpec",
    "Trajectory",
    "InvariantReport",
    "rk4_step",
    "lie_euler_conj_step",
    "integrate",
    "monitor",
]


class Integrator(enum.Enum):
    RK4 = "rk4"
    LIE_EULER_CONJ = "lie_euler_conj"


@dataclass(frozen=True)
class FlowSpec:
    """Everything needed to run one flow: id, realization, stepper, horizon."""

    hid: HamiltonianId
    form: RHSForm
    dt: float
    t_end: float
    integrator: Integrator = Integrator.RK4
    real_form: bool = False
    record_every: int = 1

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be nonnegative")
        if self.t_end > 0 and self.dt > self.t_end * (1 + 1e-12):
            raise ValueError("dt must not exceed t_end")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.integrator is Integrator.LIE_EULER_CONJ and self.form not in (
            RHSForm.W_FORM,
            RHSForm.MU_FORM,
        ):
            raise ValueError("LIE_EULER_CONJ requires a Lax realization (W_FORM or MU_FORM)")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt)) if self.t_end > 0 else 0


@dataclass
class Trajectory:
    """Recorded times, points and named observable series of one run."""

    times: list[float]
    points: list[ExtendedPoint]
    observables: dict[str, list[complex]] = field(default_factory=dict)
    aborted: bool = False

    def __post_init__(self) -> None:
        if len(self.times) != len(self.points):
            raise ValueError("times and points must have equal length")


@dataclass(frozen=True)
class InvariantReport:
    """Worst-case drifts of the conserved structures along a trajectory."""

    casimir_drift: dict[int, float]
    diag_drift: float
    spectrum_drift: float
    hamiltonian_drift: float


def _rk4_dense(f, mu: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(mu)
    k2 = f(mu + (dt / 2) * k1)
    k3 = f(mu + (dt / 2) * k2)
    k4 = f(mu + dt * k3)
    return mu + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _lax_generator(spec: FlowSpec, gamma: complex, mu: np.ndarray, pp: np.ndarray):
    """Frozen generator C and Lax operand for the conjugation step.

    W_FORM evolves nu = mu - gamma P by d nu/dt = [nu, C] with
    C = -(k+1) gamma^n W_n^k(mu); MU_FORM evolves mu itself with
    C = -(k+1) gamma^n (W_n^k + gamma W_{n+1}^k).  Returns (C, operand,
    shift) with mu = operand + shift.
    """
    hid = spec.hid
    if isinstance(hid, Wbasis):
        row = _w_row(hid.k, mu, pp)
        c0 = -(hid.k + 1) * gamma**hid.n
        if spec.form is RHSForm.W_FORM:
            return c0 * row[hid.n], mu - gamma * pp, gamma * pp
        w = row[hid.n] + (gamma * row[hid.n + 1] if hid.n + 1 <= hid.k else 0.0)
        return c0 * w, mu, 0.0
    raise ValueError(f"no Lax generator for {hid!r} with form {spec.form}")


def rk4_step(spec: FlowSpec, p: ExtendedPoint) -> ExtendedPoint:
    """One classical RK4 step; gamma is copied through unchanged."""
    pp = _projector(p.dims)
    f = lambda m: _flow_rhs_dense(spec.hid, spec.form, p.gamma, m, pp, p.dims)
    out = _rk4_dense(f, p.mu.matrix, spec.dt)
    if not np.isfinite(out).all():
        raise FloatingPointError("non-finite state after RK4 step")
    return ExtendedPoint(p.gamma, BlockOperator(p.dims, out))


def lie_euler_conj_step(spec: FlowSpec, p: ExtendedPoint) -> ExtendedPoint:
    """First-order isospectral step: conjugate the Lax operand by exp(dt C).

    The generator is frozen at the step start and the operand nu is updated
    as solve(E, nu E) with E = exp(dt C) -- a similarity transform by one
    matrix, so the operand's spectrum is preserved to roundoff for any dt.
    """
    pp = _projector(p.dims)
    mu = p.mu.matrix
    if isinstance(spec.hid, Generating):
        if spec.form is not RHSForm.W_FORM:
            raise ValueError("generating Lie-Euler step requires W_FORM")
        c = -_grad_generating_dense(spec.hid.kappa, spec.hid.lam, p.gamma, mu, p.dims)
        operand, shift = mu - p.gamma * pp, p.gamma * pp
    else:
        c, operand, shift = _lax_generator(spec, p.gamma, mu, pp)
    e = expm(spec.dt * c)
    out = np.linalg.solve(e, operand @ e) + shift
    if not np.isfinite(out).all():
        raise FloatingPointError("non-finite state after Lie-Euler step")
    return ExtendedPoint(p.gamma, BlockOperator(p.dims, out))


def integrate(spec: FlowSpec, p0: ExtendedPoint, observables=None) -> Trajectory:
    """Run the flow, recording every ``record_every`` steps (and the endpoint).

    ``observables`` maps names to callables on points.  A non-finite state
    aborts the run; the partial trajectory is returned with ``aborted`` set.
    """
    if spec.form is RHSForm.REAL_FORM and not p0.is_real_form(tol=1e-9):
        raise ValueError("REAL_FORM flow requires a real-form initial point")
    observables = observables or {}
    pp = _projector(p0.dims)
    gamma = p0.gamma
    dims = p0.dims

    use_rk4 = spec.integrator is Integrator.RK4
    if use_rk4:
        f = lambda m: _flow_rhs_dense(spec.hid, spec.form, gamma, m, pp, dims)

    times = [0.0]
    points = [p0]
    series: dict[str, list[complex]] = {name: [complex(fn(p0))] for name, fn in observables.items()}
    traj = Trajectory(times, points, series)

    mu = p0.mu.matrix
    current = p0
    for i in range(1, spec.n_steps + 1):
        try:
            if use_rk4:
                mu = _rk4_dense(f, mu, spec.dt)
                if not np.isfinite(mu).all():
                    raise FloatingPointError("non-finite state")
                current = ExtendedPoint(gamma, BlockOperator(dims, mu))
            else:
                current = lie_euler_conj_step(spec, current)
                mu = current.mu.matrix
        except (FloatingPointError, ValueError):
            traj.aborted = True
            break
        if i % spec.record_every == 0 or i == spec.n_steps:
            times.append(i * spec.dt)
            points.append(current)
            for name, fn in observables.items():
                series[name].append(complex(fn(current)))
    return traj


def monitor(traj: Trajectory, ks: list[int], hid: HamiltonianId | None = None) -> InvariantReport:
    """Drift statistics of Casimirs, diagonal blocks, shifted spectrum and energy."""
    p0 = traj.points[0]
    c0 = {k: casimir(k, p0) for k in ks}
    s0 = sorted_spectrum(
        np.linalg.eigvals(p0.mu.matrix - p0.gamma * _projector(p0.dims))
    )
    h0 = hamiltonian(hid, p0) if hid is not None else None

    cas = {k: 0.0 for k in ks}
    diag = 0.0
    spec_d = 0.0
    ham = 0.0
    for p in traj.points[1:]:
        for k in ks:
            cas[k] = max(cas[k], abs(casimir(k, p) - c0[k]))
        diag = max(
            diag,
            float(np.linalg.norm(p.mu.app - p0.mu.app)),
            float(np.linalg.norm(p.mu.amm - p0.mu.amm)),
        )
        st = sorted_spectrum(np.linalg.eigvals(p.mu.matrix - p.gamma * _projector(p.dims)))
        spec_d = max(spec_d, spectrum_displacement(st, s0))
        if h0 is not None:
            ham = max(ham, abs(hamiltonian(hid, p) - h0))
    return InvariantReport(cas, diag, spec_d, ham)
