"""Lie-Poisson hierarchy flows on block-split operator spaces.

Finite truncations of the centrally extended operator spaces attached to a
fixed polarization: block arithmetic with the restricted trace, the
extension bracket and coadjoint actions, the commuting Hamiltonian
hierarchy with its Lax flows, structure-preserving integrators, and
closed-form oracles for the solvable special cases.
"""

from .blocks import (
    BlockOperator,
    Dims,
    ExtendedPoint,
    commutator,
    inverse,
    pairing,
    projector_p_plus,
    res_norm,
    restricted_trace,
    sorted_spectrum,
    spectrum_displacement,
    spectrum_shifted,
    star_norm,
)
from .errors import (
    ConfigError,
    DimensionMismatchError,
    IndexRangeError,
    LpflowError,
    RadiusError,
    SingularOperatorError,
)
from .hierarchy import (
    Generating,
    HamiltonianId,
    Hbasis,
    RHSForm,
    TauCheck,
    Wbasis,
    casimir,
    flow_rhs,
    generating_hamiltonian,
    generating_radius,
    generating_series,
    grad_hamiltonian,
    h_poly,
    h_poly_enumerated,
    h_poly_row,
    hamiltonian,
    magri_chain_residual,
    p_coeff,
    tau_reparametrization_check,
    w_poly,
    w_poly_row,
)
from .integrate import (
    FlowSpec,
    Integrator,
    InvariantReport,
    Trajectory,
    integrate,
    lie_euler_conj_step,
    monitor,
    rk4_step,
)
from .poisson import (
    AlgebraElement,
    central_bracket,
    coad_action,
    constant_gradient,
    group_coad,
    linear_functional,
    numeric_gradient,
    poisson_bracket,
    poisson_bracket_parts,
    schwinger,
)

__version__ = "0.1.0"
