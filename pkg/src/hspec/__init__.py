"""Spectral bounds for Hadamard weighted geometric means of nonnegative matrices.

Certified spectral functionals, the matrix constructions the bounds are
stated for, a catalog of checkable inequality laws and a seeded harness
that searches for counterexamples.
"""

__version__ = "0.1.0"

from .constructions import (
    alpha_profile,
    c_matrix,
    cyclic_products,
    grid_bundle,
    pair_family,
    refinement_sequence,
    sym,
    weighted_gmean,
)
from .harness import CampaignReport, Counterexample, GenConfig, run_campaign, shrink
from .laws import LawInput, LawReport, Tolerances, catalog, evaluate_law, get_law
from .matcore import NonnegMatrix, Permutation, Weights, from_rows, hadamard_power, hadamard_product
from .spectral import CertifiedValue, Functional, certified, evaluate, spectral_radius

__all__ = [
    "CampaignReport",
    "CertifiedValue",
    "Counterexample",
    "Functional",
    "GenConfig",
    "LawInput",
    "LawReport",
    "NonnegMatrix",
    "Permutation",
    "Tolerances",
    "Weights",
    "alpha_profile",
    "c_matrix",
    "catalog",
    "certified",
    "cyclic_products",
    "evaluate",
    "evaluate_law",
    "from_rows",
    "get_law",
    "grid_bundle",
    "hadamard_power",
    "hadamard_product",
    "pair_family",
    "refinement_sequence",
    "run_campaign",
    "shrink",
    "spectral_radius",
    "sym",
    "weighted_gmean",
]
