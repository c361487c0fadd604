"""spectral-forge: finite truncations of Dirac operators on Toeplitz-type
extensions, with certified spectra, bound checks, and state distances."""

__version__ = "0.1.0"

from .linop import (
    BasisSpace,
    ContractViolation,
    DirectSum,
    HalfLine,
    Line,
    LinOp,
    Product,
    Qubit,
    ResourceLimit,
    SpaceMismatch,
    Spectrum,
    commutator,
    diagonal_op,
    direct_sum,
    eig_hermitian,
    from_matrix,
    identity,
    opnorm,
    tensor,
)
from .models import (
    ExtensionModel,
    KronTerms,
    SplitElement,
    TripleModel,
    build_from_descriptor,
    circle_triple,
    hermitian_basis,
    podles_model,
    point_triple,
    suq2_model,
    toeplitz_extension,
    two_point_triple,
)
from .dirac import (
    DiracBundle,
    build_bundle,
    check_p_injectivity,
    commutator_blocks,
    commutator_direct,
    represent,
)
from .analysis import (
    BoundReport,
    CountingPolicy,
    DimensionEstimate,
    StructuredSpectra,
    check_bound_3y,
    check_bound_7,
    check_nondegeneracy,
    commutator_norm_sweep,
    distance_to_scalars,
    estimate_spectral_dimension,
    structured_eigs,
    verify_d1_eigs,
    verify_dI_eigs,
)
from .metrics import (
    CirclePoint,
    DistanceResult,
    QubitPoint,
    SolverOptions,
    VectorState,
    connes_distance,
    default_basis,
    diameter_estimate,
    q_sweep,
    seminorm_L,
)
from .reporting import canonical_json, read_artifact, write_artifact

__all__ = [name for name in dir() if not name.startswith("_")]
