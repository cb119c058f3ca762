"""Decoherence-free subspace sensing with GHZ-type probe states.

The hot loop (parity-shot sampling) runs in a compiled extension when it is
available; ``BACKEND`` reports which implementation was loaded.
"""
from ._backend import BACKEND
from .dfs import (
    ConvexDecomposition,
    DfsPolytope,
    caratheodory_decompose,
    center_affine,
    contains,
    enumerate_vertices,
    kernel_basis,
    project_to_dfs,
)
from .errors import *  # noqa: F401,F403
from .improve import (
    ImprovementTrace,
    certify_vertex_sequential,
    improve_pipeline,
    is_extremal_trace,
    lift_to_vertices,
    sequentialize,
    symmetrize,
)
from .model import (
    MixedKState,
    PureStrategy,
    SensorNetwork,
    SequentialStrategy,
    mixed_k_state,
    network_from_samples,
    pure_strategy,
    pure_to_mixed,
    sequential_strategy,
    validate_network,
    weight_matrix,
)
from .optimize import (
    RateSolution,
    compare_affine,
    figure_of_merit,
    optimal_rates_orthogonal,
    optimize_rates,
)
from .qfim import (
    PsdOrder,
    dephase,
    k_matrix_mixed,
    k_matrix_pure,
    k_matrix_sequential,
    psd_compare,
    qfim_from_k,
    single_direction_qfi,
)
from .simulate import (
    EstimationReport,
    NoiseModel,
    estimate_parameters,
    ghz_phase,
    sample_shots,
)

__version__ = "0.1.0"
