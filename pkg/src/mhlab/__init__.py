"""Numerical laboratory for integrable symplectic lattice maps.

Tools to iterate staircase reductions of lattice KdV/MKdV equations,
compute their conserved quantities and monodromy spectra, build modified
(interpolating) Hamiltonians three independent ways — truncated
Baker-Campbell-Hausdorff series, closed-form action-angle quadratures,
and separation-of-variables flows — and verify at machine precision that
they all generate the same dynamics.
"""

__version__ = "1.0.0"

from .maps import (
    MapParams,
    PhasePoint,
    SingularOrbitError,
    InvalidStateError,
    kdv_map_p2,
    kdv_map_p3,
    mkdv_map_p2,
    kdv_map_generalP,
    mkdv_map_generalP,
    generating_hamiltonian,
    invariants,
    symplecticity_check,
)
from .jets import Jet, ScalarField, jet_seed, poisson_bracket
from .spectral import (
    SpectralData,
    NonSeparableError,
    DegenerateStepError,
    build_monodromy,
    spectral_data,
    zs_residual,
    separation_coordinates,
    dubrovin_residual_discrete,
    canonicity_check,
    entry_bracket_check,
)
from .mh import (
    MHSeries,
    DefectTable,
    bch_mh,
    bch_series,
    printed_series,
    invariant_series,
    series_match,
    defect_scan,
    window_defect,
    with_grading,
    tag_for,
)
from .actionangle import (
    QuadratureSpec,
    FrequencyReport,
    DomainError,
    BranchPathError,
    frequency_g1_kdv,
    frequency_g1_mkdv,
    frequencies_g2,
    mh_g1_kdv,
    mh_g1_mkdv,
    mh_g2,
    interpolating_flow_g1,
    interpolating_flow_g2,
    abel_step_sum,
    abel_endpoint_integral,
    jacobi_inversion_check,
    generating_function_checks,
)

__all__ = [
    "MapParams",
    "PhasePoint",
    "SingularOrbitError",
    "InvalidStateError",
    "kdv_map_p2",
    "kdv_map_p3",
    "mkdv_map_p2",
    "kdv_map_generalP",
    "mkdv_map_generalP",
    "generating_hamiltonian",
    "invariants",
    "symplecticity_check",
    "Jet",
    "ScalarField",
    "jet_seed",
    "poisson_bracket",
    "SpectralData",
    "NonSeparableError",
    "DegenerateStepError",
    "build_monodromy",
    "spectral_data",
    "zs_residual",
    "separation_coordinates",
    "dubrovin_residual_discrete",
    "canonicity_check",
    "entry_bracket_check",
    "MHSeries",
    "DefectTable",
    "bch_mh",
    "bch_series",
    "printed_series",
    "invariant_series",
    "series_match",
    "defect_scan",
    "window_defect",
    "with_grading",
    "tag_for",
    "QuadratureSpec",
    "FrequencyReport",
    "DomainError",
    "BranchPathError",
    "frequency_g1_kdv",
    "frequency_g1_mkdv",
    "frequencies_g2",
    "mh_g1_kdv",
    "mh_g1_mkdv",
    "mh_g2",
    "interpolating_flow_g1",
    "interpolating_flow_g2",
    "abel_step_sum",
    "abel_endpoint_integral",
    "jacobi_inversion_check",
    "generating_function_checks",
]
