"""Entanglement and CHSH nonlocality certification for bipartite states
constrained by an additive observable with a definite value."""

from __future__ import annotations

__version__ = "0.1.0"

from .chsh import (
    AnchorEntry,
    BasisReordering,
    ChshCertificate,
    ChshObservables,
    OExpectations,
    build_o_operators,
    build_observables,
    certify_nonlocality,
    f_max_closed_form,
    f_value,
    find_anchor_entries,
    grid_verify,
    o_expectations,
    reorder_basis,
)
from .entanglement import (
    BlockWitness,
    CrossedEntry,
    EntanglementVerdict,
    SectorClass,
    SectorKind,
    VerdictStatus,
    block_ppt_min_eig,
    certify,
    classify_sectors,
    find_crossed_entries,
    reduced_purity,
)
from .higgs_zz import (
    HiggsCoefficients,
    HiggsZZParams,
    Measurement,
    f12,
    f13,
    params_from_coefficients,
    params_from_measured,
    reproduce_tables,
    rho_from_params,
    significance,
)
from .structure import (
    AdditiveStructure,
    DensityMatrix,
    Sector,
    StateValidationError,
    TextureError,
    TextureViolation,
    build_sectors,
    min_pt_eigenvalue,
    pt_block_decomposition,
    validate_additivity,
)

__all__ = [
    "AdditiveStructure",
    "AnchorEntry",
    "BasisReordering",
    "BlockWitness",
    "ChshCertificate",
    "ChshObservables",
    "CrossedEntry",
    "DensityMatrix",
    "EntanglementVerdict",
    "HiggsCoefficients",
    "HiggsZZParams",
    "Measurement",
    "OExpectations",
    "Sector",
    "SectorClass",
    "SectorKind",
    "StateValidationError",
    "TextureError",
    "TextureViolation",
    "VerdictStatus",
    "block_ppt_min_eig",
    "build_o_operators",
    "build_observables",
    "build_sectors",
    "certify",
    "certify_nonlocality",
    "classify_sectors",
    "f12",
    "f13",
    "f_max_closed_form",
    "f_value",
    "find_anchor_entries",
    "find_crossed_entries",
    "grid_verify",
    "min_pt_eigenvalue",
    "o_expectations",
    "params_from_coefficients",
    "params_from_measured",
    "pt_block_decomposition",
    "reduced_purity",
    "reorder_basis",
    "reproduce_tables",
    "rho_from_params",
    "significance",
    "validate_additivity",
    "__version__",
]
