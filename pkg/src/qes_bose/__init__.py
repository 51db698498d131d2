"""Quasi-exactly solvable sectors of anharmonic Bose Hamiltonians."""

from .conditions import (
    CutoffSystem,
    FeasibilityReport,
    build_cutoff_system,
    check_cutoff,
    decoupled_two_level_relations,
    feasibility,
    simultaneous_sector_check,
    solve_cutoff_system,
    two_level_couplings,
    two_level_relations,
)
from .errors import ComplexPairError, ConvergenceError, InvariantSubspaceViolated, QESError, TruncationError
from .model import (
    HamiltonianSpec,
    SectorBasis,
    Status,
    Validity,
    alpha,
    beta,
    fock_matrix_element,
    gamma,
    validate_ground_state,
)
from .multimode import ProductHamiltonian, ProductTerm, build_product_matrix, check_product_invariance, product_spectrum
from .oracle import MatchReport, block_decoupling_check, build_truncated, match_spectra
from .spectra import (
    BandMatrix,
    SpectrumResult,
    build_subspace_matrix,
    eigen_2x2,
    eigen_cubic_h1,
    eigen_general,
    solve_sector,
    symmetrize,
)

__version__ = "0.1.0"
