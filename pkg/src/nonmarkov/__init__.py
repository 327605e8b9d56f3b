"""Canonical dynamical maps and non-Markovian master equations for finite open quantum systems."""

from .core import (
    PAULIS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DimensionError,
    InvalidStateError,
    NotHermitianError,
    as_density_matrix,
    bloch_to_density,
    density_to_bloch,
    kron,
    min_eigenvalue,
    partial_trace_env,
    unitary_propagator,
)
from .maps import (
    AffineQubitMap,
    AForm,
    BForm,
    MapSpectrum,
    a_to_affine,
    a_to_b,
    affine_to_a,
    apply_a,
    apply_b,
    b_to_a,
    check_a_properties,
    choi_spectrum,
    compose_a,
    depolarizing_map,
    in_compatibility_domain,
    is_completely_positive,
    map_from_json,
    map_to_json,
    preimage,
    pseudo_inverse_a,
    spectral_decompose,
    transpose_map,
)
from .open_system import (
    EmbeddingResult,
    TotalDynamics,
    evolve_total,
    product_embed,
    reduced_aform,
    reduced_dynamical_map,
    reduced_state,
    swap_dynamics,
)
from .canonical import (
    CanonicalMap,
    SingularTimeError,
    canonical_embedding,
    canonical_map,
    compose_canonical,
    embedding_relocation_check,
)
from .master import (
    GeneratorSample,
    IntegrationAborted,
    LindbladModel,
    Trajectory,
    channel_rates,
    collision_simulate,
    depolarizing_lindblad,
    f_operator,
    generator_at,
    generator_from_embedding,
    integrate_lindblad,
    integrate_nonmarkovian,
    integrate_truncated,
    lindblad_from_map,
    lindblad_map,
    lindblad_rhs,
    rescaled_rate,
    swap_generator_closed_form,
)
from .classical import apply_stochastic, is_bistochastic, permutation_matrix, pseudo_inverse_stochastic

__version__ = "0.1.0"
