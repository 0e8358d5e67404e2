"""Stability of spectral graph filters under large-scale edge rewiring."""

from .errors import (
    DegeneracyError,
    DegenerateInputError,
    GapViolationError,
    GfstabError,
    NumericError,
    ParameterError,
    ParseError,
    ValidationError,
)
from .filters import (
    FilterSpec,
    apply_filter,
    empirical_ratio,
    h_max,
    lipschitz,
    low_pass_ratio,
    response_eval,
)
from .graph import (
    Graph,
    adjacency,
    gft,
    is_connected,
    load_communities,
    load_edge_list,
    normalized_laplacian,
    permute,
    total_variation,
    unnormalized_laplacian,
)
from .random_models import (
    PpmParams,
    SbmParams,
    rewire_count_preserving,
    rewire_sbm,
    sample_ppm,
    sample_sbm,
)
from .spectral import (
    EigenPair,
    StructuralTerms,
    align_signs,
    canonical_signs,
    eigh,
    spectral_gap_interval,
    spectral_norm,
    structural_terms,
)
from .stability import (
    BoundBreakdown,
    filter_distance,
    polynomial_baseline_bound,
    stability_bound,
)

__version__ = "0.1.0"
