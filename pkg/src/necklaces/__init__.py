"""Exact-arithmetic engine for the necklace Lie bialgebra of symplectic
derivations: cyclic-word brackets and cobrackets, Chevalley-Eilenberg
(co)homology in the weight grading, coboundary deformations, and
order-by-order construction of symplectic expansions.

Everything is computed over the rationals with exact arithmetic; there is
no floating point anywhere in the package.
"""

__version__ = "0.1.0"

from .errors import (
    ConditionFailed,
    GenusMismatch,
    InconsistentExpansions,
    MinWeightTooLow,
    NecklacesError,
    NotChainMap,
    NotCyclic,
    NotInN,
    ParseError,
    PrecisionError,
    SolveFailed,
)
from .words import Letter
from .tensors import (
    PairTensor,
    Tensor,
    TruncatedSeries,
    concat_mul,
    coproduct,
    cyclicize,
    exp_series,
    inverse_series,
    is_grouplike,
    is_lie_element,
    log_series,
    omega,
    pairing,
)
from .lie import (
    BiDerivationElem,
    DerivationElem,
    Necklace,
    TensorDerivElem,
    bracket,
    derivation_apply,
    derivation_tensor,
    exp_derivation,
    module_action,
    mu_alg,
    necklace_basis,
    necklace_count,
    necklace_normal_form,
    schedler_delta,
    sigma_bar,
)
from .complexes import (
    AlgCobracket,
    AlgComodule,
    ChainVector,
    ModChainVector,
    ModWedgeBasis,
    WedgeBasis,
    assemble,
    boundary,
    cochain_d,
    mod_boundary,
    mod_cochain_d,
    mod_wedge_basis,
    sigma_wedge,
    wedge_basis,
    wedge_product,
)
from .linalg import SparseRationalMatrix, image_basis, kernel_basis, nullity, rank, rref
from .homology import (
    HomologyEngine,
    HomologySpace,
    InducedMap,
    cohomology_of_homology,
    homology_report,
)
from .deform import (
    DeformationElement,
    DeformedCobracket,
    DeformedComodule,
    deform_delta,
    deform_mu,
    exp_ad_conjugate,
    homotopy_check,
    n_space_basis,
    verify_deformation_invariance,
)
from .expansion import (
    Expansion,
    boundary_word,
    compare_expansions,
    lie_basis,
    loop_tensor,
    symplectic_expansion,
)

__all__ = [
    "__version__",
    "AlgCobracket",
    "AlgComodule",
    "BiDerivationElem",
    "ChainVector",
    "ConditionFailed",
    "DeformationElement",
    "DeformedCobracket",
    "DeformedComodule",
    "DerivationElem",
    "Expansion",
    "GenusMismatch",
    "HomologyEngine",
    "HomologySpace",
    "InconsistentExpansions",
    "InducedMap",
    "Letter",
    "MinWeightTooLow",
    "ModChainVector",
    "ModWedgeBasis",
    "Necklace",
    "NecklacesError",
    "NotChainMap",
    "NotCyclic",
    "NotInN",
    "PairTensor",
    "ParseError",
    "PrecisionError",
    "SolveFailed",
    "SparseRationalMatrix",
    "Tensor",
    "TensorDerivElem",
    "TruncatedSeries",
    "WedgeBasis",
    "assemble",
    "boundary",
    "boundary_word",
    "bracket",
    "cochain_d",
    "cohomology_of_homology",
    "compare_expansions",
    "concat_mul",
    "coproduct",
    "cyclicize",
    "deform_delta",
    "deform_mu",
    "derivation_apply",
    "derivation_tensor",
    "exp_ad_conjugate",
    "exp_derivation",
    "exp_series",
    "homology_report",
    "homotopy_check",
    "image_basis",
    "inverse_series",
    "is_grouplike",
    "is_lie_element",
    "kernel_basis",
    "lie_basis",
    "log_series",
    "loop_tensor",
    "mod_boundary",
    "mod_cochain_d",
    "mod_wedge_basis",
    "module_action",
    "mu_alg",
    "n_space_basis",
    "necklace_basis",
    "necklace_count",
    "necklace_normal_form",
    "nullity",
    "omega",
    "pairing",
    "rank",
    "rref",
    "schedler_delta",
    "sigma_bar",
    "sigma_wedge",
    "symplectic_expansion",
    "verify_deformation_invariance",
    "wedge_basis",
    "wedge_product",
]
