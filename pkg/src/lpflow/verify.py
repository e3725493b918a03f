"""Named verification suites behind the ``verify`` CLI command.

Each suite runs a fixed list of residual checks at desk scale and reports
(name, residual, tolerance, pass) rows; a suite passes when every row
does.  The checks mirror the package's property tests in a re-runnable,
seedable form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .blocks import (
    BlockOperator,
    Dims,
    ExtendedPoint,
    commutator,
    pairing,
    projector_p_plus,
    res_norm,
    restricted_trace,
    sorted_spectrum,
    spectrum_displacement,
    spectrum_shifted,
    star_norm,
)
from .extension import (
    ExtendedAlgebraElement,
    LocalGroupElement,
    central_adjoint,
    extended_adjoint,
    extended_bracket,
    extended_coadjoint,
    group_multiply,
    moment_pairing,
    omega_map,
    phi_map,
)
from .hierarchy import (
    Generating,
    Hbasis,
    RHSForm,
    Wbasis,
    casimir,
    flow_rhs,
    generating_hamiltonian,
    generating_series,
    grad_hamiltonian,
    h_poly_enumerated,
    h_poly_row,
    hamiltonian,
    magri_chain_residual,
    p_coeff,
    w_poly_row,
)
from .integrate import FlowSpec, Integrator, integrate, monitor
from .oracles import (
    four_dim_evolve,
    four_dim_invariants,
    four_dim_state_to_point,
    grassmann_embed,
    grassmann_zz_invariance,
    point_to_four_dim_state,
    point_to_vector_state,
    vector_case_solution,
    vector_state_to_point,
)
from .poisson import (
    AlgebraElement,
    central_bracket,
    coad_action,
    constant_gradient,
    extended_pairing,
    group_coad,
    poisson_bracket,
    poisson_bracket_parts,
    schwinger,
)
from .sampling import (
    algebra_element,
    block_operator,
    complex_matrix,
    extended_element,
    make_rng,
    near_identity,
    near_identity_group,
    random_point,
    real_form_point,
    skew_hermitian,
)

__all__ = ["Check", "VerifyReport", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class VerifyReport:
    suite: str
    checks: list[Check]
    environment: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "environment": self.environment,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "residual": c.residual,
                    "tolerance": c.tolerance,
                    "pass": c.passed,
                }
                for c in self.checks
            ],
        }


def _suite_core(rng: np.random.Generator, dims: Dims) -> list[Check]:
    checks = []
    worst = 0.0
    for _ in range(50):
        a = block_operator(rng, dims)
        b = block_operator(rng, dims)
        worst = max(worst, abs(restricted_trace(a @ b) - restricted_trace(b @ a)))
    checks.append(Check("restricted-trace cyclicity", worst, 1e-12))

    worst = 0.0
    for _ in range(1000):
        a = block_operator(rng, dims)
        b = block_operator(rng, dims)
        worst = max(worst, star_norm(a @ b) - star_norm(a) * star_norm(b))
    checks.append(Check("star-norm submultiplicativity", max(worst, 0.0), 1e-12))

    worst = 0.0
    for _ in range(50):
        g = near_identity(rng, dims, 0.5)
        mu = block_operator(rng, dims)
        gi = np.linalg.inv(g.matrix)
        worst = max(
            worst,
            abs(
                restricted_trace(BlockOperator(dims, g.matrix @ mu.matrix @ gi))
                - restricted_trace(mu)
            ),
        )
    checks.append(Check("conjugation invariance of trace", worst, 1e-10))

    worst = 0.0
    for _ in range(25):
        p = random_point(rng, dims)
        a = near_identity(rng, dims, 0.2)
        worst = max(
            worst,
            spectrum_displacement(spectrum_shifted(group_coad(a, p)), spectrum_shifted(p)),
        )
    checks.append(Check("shifted-spectrum coadjoint invariance", worst, 1e-8))

    pp = projector_p_plus(dims)
    checks.append(
        Check(
            "projector idempotent + trace",
            max((pp @ pp - pp).max_abs(), abs(restricted_trace(pp) - dims.n_plus)),
            1e-14,
        )
    )
    checks.append(Check("res-norm of identity", abs(res_norm(BlockOperator.identity(dims)) - 2.0), 1e-14))
    return checks


def _suite_poisson(rng: np.random.Generator, dims: Dims) -> list[Check]:
    checks = []
    worst_anti = worst_jac = 0.0
    for _ in range(200):
        a = algebra_element(rng, dims)
        b = algebra_element(rng, dims)
        c = algebra_element(rng, dims)
        ab = central_bracket(a, b)
        ba = central_bracket(b, a)
        worst_anti = max(worst_anti, abs(ab.lam + ba.lam), (ab.x + ba.x).max_abs())
        j1 = central_bracket(a, central_bracket(b, c))
        j2 = central_bracket(b, central_bracket(c, a))
        j3 = central_bracket(c, central_bracket(a, b))
        worst_jac = max(worst_jac, abs(j1.lam + j2.lam + j3.lam), (j1.x + j2.x + j3.x).max_abs())
    checks.append(Check("central bracket antisymmetry", worst_anti, 1e-11))
    checks.append(Check("central bracket Jacobi", worst_jac, 1e-11))

    worst = 0.0
    for _ in range(50):
        a = algebra_element(rng, dims)
        b = algebra_element(rng, dims)
        p = random_point(rng, dims)
        lhs = extended_pairing(coad_action(a, p), b)
        rhs = extended_pairing(p, central_bracket(a, b))
        worst = max(worst, abs(lhs - rhs))
    checks.append(Check("coadjoint duality", worst, 1e-10))

    worst = 0.0
    for _ in range(50):
        x = skew_hermitian(rng, dims)
        y = skew_hermitian(rng, dims)
        lam1 = 1j * rng.standard_normal()
        lam2 = 1j * rng.standard_normal()
        br = central_bracket(AlgebraElement(lam1, x), AlgebraElement(lam2, y))
        worst = max(
            worst,
            abs(br.lam.real),
            (br.x + br.x.adjoint()).max_abs(),
        )
    checks.append(Check("real-form closure of the bracket", worst, 1e-12))

    # Leibniz for products of linear coordinate functionals, analytic gradients
    worst = 0.0
    for _ in range(25):
        p = random_point(rng, dims)
        y1 = block_operator(rng, dims)
        y2 = block_operator(rng, dims)
        y3 = block_operator(rng, dims)
        f1 = lambda q, y=y1: pairing(q.mu, y)
        f2 = lambda q, y=y2: pairing(q.mu, y)
        g = constant_gradient(y3)

        def fg_grad(q):
            return 0.0, f1(q) * y2 + f2(q) * y1

        lhs = poisson_bracket(fg_grad, g, p)
        rhs = f1(p) * poisson_bracket(constant_gradient(y2), g, p) + f2(p) * poisson_bracket(
            constant_gradient(y1), g, p
        )
        worst = max(worst, abs(lhs - rhs))
    checks.append(Check("Leibniz rule", worst, 1e-8))

    worst = 0.0
    for _ in range(25):
        a = algebra_element(rng, dims)
        p = random_point(rng, dims)
        worst = max(worst, abs(coad_action(a, p).gamma))
    checks.append(Check("coadjoint action fixes gamma", worst, 0.0))
    return checks


def _suite_hierarchy(rng: np.random.Generator, dims: Dims) -> list[Check]:
    checks = []
    worst = 0.0
    for _ in range(10):
        mu = block_operator(rng, dims)
        for k in range(1, 9):
            row_r = w_poly_row(k, mu)
            from .hierarchy import _projector, _w_row_left

            row_l = _w_row_left(k, mu.matrix, _projector(dims))
            for n in range(k + 1):
                worst = max(worst, float(np.abs(row_r[n].matrix - row_l[n]).max()))
    checks.append(Check("W recurrences (left vs right)", worst, 1e-11))

    worst = 0.0
    for _ in range(10):
        mu = block_operator(rng, dims)
        for k in range(1, 9):
            row = w_poly_row(k, mu)
            for n in range(k + 1):
                wm1 = row[n - 1] if n >= 1 else BlockOperator.zeros(dims)
                r = commutator(mu, row[n]) + commutator(projector_p_plus(dims), wm1)
                worst = max(worst, r.max_abs())
    checks.append(Check("commutation relation", worst, 1e-11))

    worst = 0.0
    for _ in range(100):
        mu = block_operator(rng, dims)
        nrm = star_norm(mu)
        for k in range(1, 9):
            roww = w_poly_row(k, mu)
            for l in range(0, k):
                hrow = h_poly_row(l, mu)
                combo = BlockOperator.zeros(dims)
                for n in range(1, l + 2):
                    cn = max(0, p_coeff(l, n, k))
                    if cn:
                        combo = combo + cn * hrow[n]
                resid = (roww[k - l] - combo).max_abs() / max(nrm**l, 1e-30)
                worst = max(worst, resid)
    checks.append(Check("degree-l combination identity (k <= 8)", worst, 1e-9))

    worst = 0.0
    for _ in range(30):
        p = random_point(rng, dims)
        for k in range(1, 5):
            for n in range(k + 1):
                hid = Wbasis(k, n)
                a = flow_rhs(hid, RHSForm.W_FORM, p)
                b = flow_rhs(hid, RHSForm.MU_FORM, p)
                c = flow_rhs(hid, RHSForm.PPLUS_FORM, p)
                worst = max(worst, (a - b).max_abs(), (a - c).max_abs())
    checks.append(Check("three-way flow equivalence", worst, 1e-10))

    worst = 0.0
    for _ in range(8):
        p = random_point(rng, dims, scale=0.6)
        grads = {
            (k, n): constant_gradient(grad_hamiltonian(Wbasis(k, n), p))
            for k in range(1, 5)
            for n in range(k + 1)
        }
        for eps in (0.0, 0.5, 1.0):
            for ka, na in grads:
                for kb, nb in grads:
                    worst = max(
                        worst,
                        abs(poisson_bracket(grads[(ka, na)], grads[(kb, nb)], p, eps)),
                    )
    checks.append(Check("involution of the Hamiltonian family", worst, 1e-10))

    # span: coefficient rows for k = l+1 .. 2l+2 have full rank l+1
    worst_rank = 0
    for l in range(0, 5):
        mat = np.array(
            [[max(0, p_coeff(l, n, k)) for n in range(1, l + 2)] for k in range(l + 1, 2 * l + 3)],
            dtype=float,
        )
        worst_rank = max(worst_rank, abs(np.linalg.matrix_rank(mat) - (l + 1)))
    checks.append(Check("degree-l span has full rank", float(worst_rank), 0.0))

    worst = 0.0
    for _ in range(10):
        p = random_point(rng, dims, scale=0.15)
        kappa = complex(*rng.standard_normal(2)) * 0.15
        lam = complex(*rng.standard_normal(2)) * 0.4
        s = generating_series(kappa, lam, p, tol=1e-13)
        c = generating_hamiltonian(kappa, lam, p)
        worst = max(worst, abs(c - s) / max(abs(s), 1e-12))
    checks.append(Check("closed log form vs series", worst, 1e-8))

    mu0 = BlockOperator.zeros(dims)
    p0 = ExtendedPoint(0.8 + 0.3j, mu0)
    worst = max(
        abs(hamiltonian(Wbasis(k, n), p0)) for k in range(1, 6) for n in range(k + 1)
    )
    checks.append(Check("hierarchy vanishes at mu = 0", worst, 1e-14))
    return checks


def _suite_magri(rng: np.random.Generator, dims: Dims) -> list[Check]:
    checks = []
    worst = 0.0
    for _ in range(10):
        p = random_point(rng, dims, scale=0.7)
        y = block_operator(rng, dims)
        for k in range(1, 6):
            for n in range(0, k):
                worst = max(worst, magri_chain_residual(k, n, y, p))
    checks.append(Check("chain links consecutive Hamiltonians", worst, 1e-9))

    worst = 0.0
    for _ in range(10):
        p = random_point(rng, dims, scale=0.7)
        y = block_operator(rng, dims)
        g = constant_gradient(y)
        for k in range(1, 6):
            b1, _ = poisson_bracket_parts(constant_gradient(grad_hamiltonian(Wbasis(k, 0), p)), g, p)
            _, b2 = poisson_bracket_parts(constant_gradient(grad_hamiltonian(Wbasis(k, k), p)), g, p)
            worst = max(worst, abs(b1), abs(b2))
    checks.append(Check("chain boundary Casimir conditions", worst, 1e-12))

    worst = 0.0
    for _ in range(10):
        p = random_point(rng, dims, scale=0.7)
        a = near_identity(rng, dims, 0.2)
        for k in range(1, 6):
            worst = max(worst, abs(casimir(k, group_coad(a, p)) - casimir(k, p)))
    checks.append(Check("Casimir coadjoint invariance", worst, 1e-9))
    return checks


def _suite_oracles(rng: np.random.Generator, dims: Dims) -> list[Check]:
    checks = []
    # grassmann leaf at the given dims
    gamma = 1j * 0.8
    basis = complex_matrix(rng, dims.total, dims.n_plus)
    p0 = grassmann_embed(gamma, basis)
    pw = projector_p_plus(dims).matrix - p0.mu.matrix / gamma
    checks.append(
        Check(
            "embedded projector hermitian idempotent",
            max(float(np.abs(pw @ pw - pw).max()), float(np.abs(pw - pw.conj().T).max())),
            1e-12,
        )
    )
    spec = FlowSpec(Hbasis(2, 1), RHSForm.REAL_FORM, dt=1e-3, t_end=0.5, record_every=50)
    traj = integrate(spec, p0)
    checks.append(Check("z^+z spectrum constant along flow", grassmann_zz_invariance(traj), 1e-8))

    # vector case at (1, 4)
    vdims = Dims(1, 4)
    pv = ExtendedPoint(0.4 + 0.3j, block_operator(rng, vdims, 0.5))
    state0 = point_to_vector_state(pv)
    k = 3
    spec = FlowSpec(Hbasis(k, 0), RHSForm.H_FORM, dt=1e-3, t_end=1.0, record_every=1000)
    traj = integrate(spec, pv)
    endpoint = traj.points[-1]
    oracle = vector_state_to_point(vector_case_solution(state0, pv.gamma, {k: 1.0}), pv.gamma)
    checks.append(
        Check("vector-case exponential oracle", (endpoint.mu - oracle.mu).max_abs(), 1e-6)
    )

    # four-dim case
    fdims = Dims(2, 2)
    rngf = make_rng(int(rng.integers(2**31)))
    z = complex_matrix(rngf, 2, 2, 0.6)
    from .oracles import FourDimState

    s0 = FourDimState(0.9, 0.8, -0.5, 0.4, -0.6, z[0, 0], z[0, 1], z[1, 0], z[1, 1])
    pf = four_dim_state_to_point(s0)
    inv0 = four_dim_invariants(s0)
    spec = FlowSpec(Hbasis(3, 0), RHSForm.REAL_FORM, dt=1e-3, t_end=1.0, record_every=100)
    traj = integrate(spec, pf)
    worst_inv = 0.0
    worst_vs = 0.0
    for t, p in zip(traj.times, traj.points):
        st = point_to_four_dim_state(p)
        inv = four_dim_invariants(st)
        worst_inv = max(
            worst_inv,
            abs(inv.p2 - inv0.p2),
            abs(inv.q2 - inv0.q2),
            abs(inv.r2 - inv0.r2),
            abs(inv.s2 - inv0.s2),
            abs(inv.delta - inv0.delta),
        )
        ev = four_dim_evolve(s0, t)
        worst_vs = max(worst_vs, float(np.abs(ev.z - st.z).max()))
    checks.append(Check("four-dim invariants conserved", worst_inv, 1e-8))
    checks.append(Check("four-dim quadrature oracle", worst_vs, 1e-5))
    return checks


def _suite_extension(rng: np.random.Generator, dims: Dims) -> list[Check]:
    checks = []
    eye_p = np.eye(dims.n_plus, dtype=complex)
    ident = BlockOperator.identity(dims)

    worst = 0.0
    for _ in range(20):
        a1 = near_identity(rng, dims, 0.1)
        a2 = near_identity(rng, dims, 0.1)
        a3 = near_identity(rng, dims, 0.1)
        n = expm(0.1 * complex_matrix(rng, dims.n_plus, dims.n_plus))
        worst = max(
            worst,
            float(np.abs(phi_map(ident, n) - n).max()),
            float(np.abs(omega_map(ident, a1) - eye_p).max()),
            float(np.abs(omega_map(a1, ident) - eye_p).max()),
            float(
                np.abs(
                    omega_map(a1, a2) @ omega_map(a1 @ a2, a3)
                    - phi_map(a1, omega_map(a2, a3)) @ omega_map(a1, a2 @ a3)
                ).max()
            ),
            float(
                np.abs(
                    omega_map(a1, a2) @ phi_map(a1 @ a2, n)
                    - phi_map(a1, phi_map(a2, n)) @ omega_map(a1, a2)
                ).max()
            ),
        )
    checks.append(Check("group cocycle conditions near identity", worst, 1e-10))

    h = 1e-4
    worst = 0.0
    for _ in range(5):
        x = block_operator(rng, dims)
        y = block_operator(rng, dims)

        def mixed(u: BlockOperator, v: BlockOperator) -> complex:
            f = lambda s, t: np.linalg.det(
                omega_map(
                    BlockOperator(dims, expm(s * u.matrix)),
                    BlockOperator(dims, expm(t * v.matrix)),
                )
            )
            return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)

        cocycle = mixed(x, y) - mixed(y, x)
        worst = max(worst, abs(cocycle - (-schwinger(x, y))))
    checks.append(Check("determinant cocycle equals the off-diagonal 2-cocycle", worst, 1e-5))

    worst = 0.0
    hh = 1e-5
    for _ in range(5):
        rho = complex_matrix(rng, dims.n_plus, dims.n_plus)
        x = block_operator(rng, dims)
        e = extended_element(rng, dims)
        gp = LocalGroupElement(expm(hh * rho), BlockOperator(dims, expm(hh * x.matrix)))
        gm = LocalGroupElement(expm(-hh * rho), BlockOperator(dims, expm(-hh * x.matrix)))
        fd_first = (extended_adjoint(gp, e).rho - extended_adjoint(gm, e).rho) / (2 * hh)
        fd_second = (extended_adjoint(gp, e).x.matrix - extended_adjoint(gm, e).x.matrix) / (2 * hh)
        br = extended_bracket(ExtendedAlgebraElement(rho, x), e)
        worst = max(
            worst,
            float(np.abs(fd_first - br.rho).max()),
            float(np.abs(fd_second - br.x.matrix).max()),
        )
    checks.append(Check("adjoint derivative recovers the bracket", worst, 1e-5))

    worst = 0.0
    for _ in range(100):
        e1 = extended_element(rng, dims)
        e2 = extended_element(rng, dims)
        e3 = extended_element(rng, dims)
        j1 = extended_bracket(e1, extended_bracket(e2, e3))
        j2 = extended_bracket(e2, extended_bracket(e3, e1))
        j3 = extended_bracket(e3, extended_bracket(e1, e2))
        worst = max(
            worst,
            float(np.abs(j1.rho + j2.rho + j3.rho).max()),
            (j1.x + j2.x + j3.x).max_abs(),
        )
    checks.append(Check("extension bracket Jacobi", worst, 1e-11))

    worst = 0.0
    for _ in range(20):
        g = near_identity_group(rng, dims, 0.1)
        tau = complex_matrix(rng, dims.n_plus, dims.n_plus)
        mu = block_operator(rng, dims)
        e = extended_element(rng, dims)
        lhs = moment_pairing(extended_coadjoint(g, (tau, mu)), e)
        rhs = moment_pairing((tau, mu), extended_adjoint(g, e))
        worst = max(worst, abs(lhs - rhs))
    checks.append(Check("coadjoint duality", worst, 1e-9))

    worst = 0.0
    for _ in range(20):
        g = near_identity_group(rng, dims, 0.1)
        e = extended_element(rng, dims)
        lam = np.trace(e.rho)
        lhs = np.trace(extended_adjoint(g, e).rho)
        rhs, _ = central_adjoint(g.a, lam, e.x)
        worst = max(worst, abs(lhs - rhs))
    checks.append(Check("central quotient matches the trace identity", worst, 1e-8))
    return checks


SUITES = {
    "core": _suite_core,
    "poisson": _suite_poisson,
    "hierarchy": _suite_hierarchy,
    "oracles": _suite_oracles,
    "extension": _suite_extension,
    "magri": _suite_magri,
}


def run_suite(name: str, seed: int = 1234, dims: Dims | None = None) -> VerifyReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
    dims = dims or Dims(2, 3)
    rng = make_rng(seed)
    checks = SUITES[name](rng, dims)
    return VerifyReport(
        suite=name,
        checks=checks,
        environment={"dims": [dims.n_plus, dims.n_minus], "seed": seed},
    )
