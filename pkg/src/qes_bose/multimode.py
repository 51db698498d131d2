"""Two-mode Hamiltonians ``H = sum_i w_i H_i^(a) h_i^(b)``.

Each factor acts on its own mode.  When every factor keeps its mode's sector
closed, the tensor product of the two sectors is closed as well and its
spectrum follows from a matrix of dimension ``(N_a+1)(N_b+1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import mpmath
import numpy as np

from .conditions import check_cutoff, cutoff_violations
from .errors import InvariantSubspaceViolated, TruncationError
from .model import HamiltonianSpec, Number, SectorBasis, fock_matrix_element_exact, to_fraction
from .oracle import MatchReport, default_n_max, exact_entry, match_eigenvalues
from .spectra import (
    DEFAULT_TOL,
    SpectrumResult,
    build_subspace_matrix,
    diagonalize_symmetric,
    format_violation,
    similarity_transform,
)


class ProductTerm(NamedTuple):
    """``weight * factor_a (x) factor_b``; a factor of ``None`` is the identity."""

    factor_a: Optional[HamiltonianSpec]
    factor_b: Optional[HamiltonianSpec]
    weight: Fraction = Fraction(1)


@dataclass(frozen=True)
class ProductHamiltonian:
    terms: tuple[ProductTerm, ...]
    sector_a: SectorBasis
    sector_b: SectorBasis

    def __post_init__(self):
        terms = []
        for term in self.terms:
            a, b, *rest = term
            weight = to_fraction(rest[0]) if rest else Fraction(1)
            terms.append(ProductTerm(a, b, weight))
        object.__setattr__(self, "terms", tuple(terms))
        for t in self.terms:
            if t.factor_a is not None and t.factor_a.q != self.sector_a.q:
                raise ValueError("every mode-a factor must share the stride of sector_a")
            if t.factor_b is not None and t.factor_b.q != self.sector_b.q:
                raise ValueError("every mode-b factor must share the stride of sector_b")

    @property
    def labels(self) -> list[tuple[int, int]]:
        """Particle-number pairs in row-major ``(n_a, n_b)`` order."""
        return [(ma, mb) for ma in self.sector_a.particle_numbers() for mb in self.sector_b.particle_numbers()]


def separable(h_a: HamiltonianSpec, h_b: HamiltonianSpec, sector_a: SectorBasis, sector_b: SectorBasis) -> ProductHamiltonian:
    """``H_a (x) 1 + 1 (x) h_b``."""
    return ProductHamiltonian(((h_a, None), (None, h_b)), sector_a, sector_b)


def check_product_invariance(ph: ProductHamiltonian) -> bool:
    for t in ph.terms:
        if t.factor_a is not None and not check_cutoff(t.factor_a, ph.sector_a):
            return False
        if t.factor_b is not None and not check_cutoff(t.factor_b, ph.sector_b):
            return False
    return True


def _factor_block(factor: Optional[HamiltonianSpec], sector: SectorBasis, mode: str) -> np.ndarray:
    if factor is None:
        return np.eye(sector.dim)
    violations = cutoff_violations(factor, sector)
    if violations:
        detail = ", ".join(format_violation(*v) for v in violations)
        raise InvariantSubspaceViolated(f"mode-{mode} factor leaves its sector: {detail}", violations)
    return build_subspace_matrix(factor, sector).array


def build_product_matrix(ph: ProductHamiltonian) -> np.ndarray:
    """Monomial-basis matrix ``sum_i w_i M_a,i (x) M_b,i``."""
    dim = ph.sector_a.dim * ph.sector_b.dim
    out = np.zeros((dim, dim))
    for t in ph.terms:
        out += float(t.weight) * np.kron(_factor_block(t.factor_a, ph.sector_a, "a"), _factor_block(t.factor_b, ph.sector_b, "b"))
    return out


def symmetrize_product(ph: ProductHamiltonian, M: np.ndarray | None = None) -> np.ndarray:
    """``(D_a (x) D_b) M (D_a (x) D_b)^-1``."""
    if M is None:
        M = build_product_matrix(ph)
    return similarity_transform(M, ph.labels)


def product_spectrum(ph: ProductHamiltonian, tol: float = DEFAULT_TOL) -> SpectrumResult:
    return diagonalize_symmetric(symmetrize_product(ph), ph.labels, tol)


def _factor_element(factor: Optional[HamiltonianSpec], m: int, n: int) -> tuple[Fraction, int]:
    if factor is None:
        return (Fraction(1), 1) if m == n else (Fraction(0), 1)
    return fock_matrix_element_exact(factor, m, n)


def two_mode_truncated(
    ph: ProductHamiltonian, n_max_a: int, n_max_b: int, residues: tuple[int, int] | None = None
) -> tuple[list[tuple[int, int]], list[list[list[tuple[Fraction, int]]]]]:
    """Truncated two-mode matrix as sums of ``coef * sqrt(radicand)`` terms.

    With ``residues`` only particle numbers congruent to them (mod each
    mode's stride) are kept; the full truncated matrix is the direct sum of
    those blocks.
    """
    qa, qb = ph.sector_a.q, ph.sector_b.q
    ra, rb = residues if residues is not None else (None, None)
    numbers_a = [m for m in range(n_max_a + 1) if ra is None or m % qa == ra]
    numbers_b = [m for m in range(n_max_b + 1) if rb is None or m % qb == rb]
    labels = [(ma, mb) for ma in numbers_a for mb in numbers_b]
    entries = []
    for ma, mb in labels:
        row = []
        for na, nb in labels:
            parts = []
            for t in ph.terms:
                ca, rad_a = _factor_element(t.factor_a, ma, na)
                if ca == 0:
                    continue
                cb, rad_b = _factor_element(t.factor_b, mb, nb)
                if cb == 0:
                    continue
                parts.append((t.weight * ca * cb, rad_a * rad_b))
            row.append(parts)
        entries.append(row)
    return labels, entries


def two_mode_oracle_eigenvalues(
    ph: ProductHamiltonian, n_max_a: int | None = None, n_max_b: int | None = None, dps: int | None = 40
) -> list[float]:
    """Eigenvalues of the truncated two-mode Hamiltonian on the sectors' residue classes."""
    n_max_a = default_n_max(ph.sector_a) if n_max_a is None else n_max_a
    n_max_b = default_n_max(ph.sector_b) if n_max_b is None else n_max_b
    top_a = ph.sector_a.particle_number(ph.sector_a.N)
    top_b = ph.sector_b.particle_number(ph.sector_b.N)
    if n_max_a < top_a or n_max_b < top_b:
        raise TruncationError(f"cutoffs ({n_max_a}, {n_max_b}) do not contain the sectors (need >= ({top_a}, {top_b}))")
    _, entries = two_mode_truncated(ph, n_max_a, n_max_b, (ph.sector_a.r, ph.sector_b.r))
    if dps is None:
        T = np.array([[sum(float(c) * np.sqrt(float(r)) for c, r in cell) for cell in row] for row in entries])
        return [float(x) for x in np.linalg.eigvalsh(T)]
    with mpmath.workdps(dps):
        T = mpmath.matrix([[mpmath.fsum(exact_entry(c, r) for c, r in cell) for cell in row] for row in entries])
        return sorted(float(x) for x in mpmath.eigsy(T, eigvals_only=True))


def match_product(
    result: SpectrumResult,
    ph: ProductHamiltonian,
    n_max_a: int | None = None,
    n_max_b: int | None = None,
    tol: float = 1e-10,
    dps: int | None = 40,
) -> MatchReport:
    return match_eigenvalues(result.eigenvalues, two_mode_oracle_eigenvalues(ph, n_max_a, n_max_b, dps), tol)


def product_from_config(modes: Sequence[dict], terms: Sequence[Sequence]) -> ProductHamiltonian:
    """Build from ``modes: [{specs, sector}, ..]`` and ``terms: [[i_a, i_b, weight]]``.

    ``i_a``/``i_b`` index the mode's ``specs`` list; ``null`` selects the identity.
    """
    if len(modes) != 2:
        raise ValueError(f"exactly two modes are supported, got {len(modes)}")
    specs, sectors = [], []
    for mode in modes:
        raw = mode.get("specs")
        if raw is None:
            raw = [mode["spec"]]
        mode_specs = [HamiltonianSpec.from_dict(s) for s in raw]
        q = mode_specs[0].q if mode_specs else int(mode.get("q", 2))
        sec = mode["sector"]
        specs.append(mode_specs)
        sectors.append(SectorBasis(int(sec.get("q", q)), int(sec.get("r", 0)), int(sec["N"])))
    built = []
    for entry in terms:
        if len(entry) not in (2, 3):
            raise ValueError(f"term {entry!r} must be [i_a, i_b] or [i_a, i_b, weight]")
        ia, ib = entry[0], entry[1]
        weight: Number = entry[2] if len(entry) == 3 else 1
        fa = None if ia is None else specs[0][int(ia)]
        fb = None if ib is None else specs[1][int(ib)]
        built.append(ProductTerm(fa, fb, to_fraction(weight)))
    return ProductHamiltonian(tuple(built), sectors[0], sectors[1])
