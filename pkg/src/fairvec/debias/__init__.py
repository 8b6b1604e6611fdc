"""Bias-removal transforms over embedding stores."""
from __future__ import annotations

from .conceptor import (
    DEFAULT_ALPHA,
    Conceptor,
    apply_negated,
    compute_conceptor,
    conceptor_debias,
    correlation_matrix,
    load_conceptor,
    save_conceptor,
)
from .hard import (
    BiasSubspace,
    HardDebiasDetails,
    equalize,
    hard_debias,
    hard_debias_details,
    identify_bias_subspace,
    neutralize,
)
from .softweat import (
    apply_displacement,
    DEFAULT_LAMBDA,
    DEFAULT_NEIGHBORS,
    DEFAULT_THRESHOLD,
    SoftWeatPlan,
    choose_translation,
    expand_targets,
    null_space_basis,
    select_biased_attributes,
    softweat_debias,
    softweat_plans,
)

__all__ = [
    "BiasSubspace",
    "Conceptor",
    "DEFAULT_ALPHA",
    "DEFAULT_LAMBDA",
    "DEFAULT_NEIGHBORS",
    "DEFAULT_THRESHOLD",
    "HardDebiasDetails",
    "SoftWeatPlan",
    "apply_displacement",
    "apply_negated",
    "choose_translation",
    "compute_conceptor",
    "conceptor_debias",
    "correlation_matrix",
    "equalize",
    "expand_targets",
    "hard_debias",
    "hard_debias_details",
    "identify_bias_subspace",
    "load_conceptor",
    "neutralize",
    "null_space_basis",
    "save_conceptor",
    "select_biased_attributes",
    "softweat_debias",
    "softweat_plans",
]
