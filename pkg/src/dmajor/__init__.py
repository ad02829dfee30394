"""d-majorization, thermomajorization polytopes, thermal-bath dissipation,
and switched-system reachability on the probability simplex."""

from .channels import (
    SuperOperator,
    channel_between,
    choi,
    d_matrix_majorizes_2x2,
    identity_distance_witness,
    is_cp,
    is_strictly_positive,
    is_tp,
    is_unital,
    kernel_block_form,
    kraus_set,
    matrix_majorizes,
    pure_state_reachable,
    trace_norm,
)
from .cnr import c_numerical_range_sample, c_spectrum, unitary_orbit_extrema
from .dissipation import (
    BathRates,
    Generator,
    apply_gamma,
    b0_from_rates,
    equidistant_d,
    flow,
    gibbs_vector,
    steady_state,
    thermal_rates,
    zero_temperature_rates,
)
from .linalg import expm, hermitian_eig, perm_matrix
from .majorize import (
    MaximalElement,
    StochasticMatrix,
    ThermoCurve,
    column_stochastic_transfer,
    d_majorizes,
    d_stochastic_transfer,
    doubly_stochastic_transfer,
    majorizes,
    maximal_element,
    minimal_element,
    thermo_curve,
)
from .polytope import (
    HPolytope,
    VertexSet,
    constraint_matrix,
    contains,
    halfspace_bounds,
    hausdorff,
    lipschitz_constant,
    max_corner,
    vertex_for_permutation,
    vertices,
)
from .reach import (
    Schedule,
    Segment,
    Trajectory,
    majorization_envelope,
    reachable_sample,
    simulate,
    synthesize,
    synthesize_from_ground,
    synthesize_local,
)

__version__ = "0.1.0"
