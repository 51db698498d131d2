"""Brute-force check of closed-sector spectra on a truncated Fock space.

The truncated matrix is assembled only from ladder-operator matrix elements
``<m|H|n>``; none of the monomial machinery is involved, so agreement with
the sector spectra is an independent certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import TruncationError
from .model import HamiltonianSpec, SectorBasis, fock_matrix_element, fock_matrix_element_exact
from .spectra import SpectrumResult


@dataclass(frozen=True)
class TruncatedMatrix:
    n_max: int
    entries: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


@dataclass
class MatchReport:
    matched: list[tuple[float, float, float]] = field(default_factory=list)
    unmatched: list[float] = field(default_factory=list)
    tol: float = 1e-10

    @property
    def ok(self) -> bool:
        return not self.unmatched

    @property
    def max_gap(self) -> float:
        return max((gap for _, _, gap in self.matched), default=0.0)

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "ok": self.ok,
            "max_gap": self.max_gap,
            "matched": [{"qes": e, "oracle": o, "gap": g} for e, o, g in self.matched],
            "unmatched": list(self.unmatched),
        }

    def table(self) -> str:
        lines = [f"{'qes':>24} {'oracle':>24} {'gap':>10}"]
        for e, o, g in self.matched:
            lines.append(f"{e:24.15g} {o:24.15g} {g:10.2e}")
        for e in self.unmatched:
            lines.append(f"{e:24.15g} {'UNMATCHED':>24} {'-':>10}")
        return "\n".join(lines)


def default_n_max(sector: SectorBasis) -> int:
    """Three shells beyond the top of the sector."""
    return sector.q * (sector.N + 3) + sector.r


def build_truncated(spec: HamiltonianSpec, n_max: int) -> TruncatedMatrix:
    if n_max < spec.q * spec.k0:
        raise TruncationError(f"n_max = {n_max} is below the longest hop q*k0 = {spec.q * spec.k0}")
    T = np.zeros((n_max + 1, n_max + 1))
    hops = [k * spec.q for k in range(1, spec.k0 + 1)]
    for n in range(n_max + 1):
        T[n, n] = fock_matrix_element(spec, n, n)
        for h in hops:
            if n + h <= n_max:
                T[n + h, n] = T[n, n + h] = fock_matrix_element(spec, n + h, n)
    return TruncatedMatrix(n_max, T)


def match_eigenvalues(qes_values, oracle_values, tol: float) -> MatchReport:
    """Greedy nearest matching; each oracle value is used at most once.

    A pair matches when ``|E_qes - E_oracle| <= tol * (1 + |E_qes|)``.
    """
    available = sorted(float(x) for x in oracle_values)
    used = [False] * len(available)
    report = MatchReport(tol=tol)
    for e in sorted(float(x) for x in qes_values):
        best, best_gap = None, None
        for idx, o in enumerate(available):
            if used[idx]:
                continue
            gap = abs(o - e)
            if best_gap is None or gap < best_gap:
                best, best_gap = idx, gap
        if best is not None and best_gap <= tol * (1.0 + abs(e)):
            used[best] = True
            report.matched.append((e, available[best], best_gap))
        else:
            report.unmatched.append(e)
    return report


def exact_entry(coef: Fraction, radicand: int):
    return mpmath.mpf(coef.numerator) / coef.denominator * mpmath.sqrt(radicand)


def symmetric_eigenvalues(entries, dps: int | None) -> list[float]:
    """Eigenvalues of a symmetric matrix of ``(coef, radicand)`` pairs.

    With ``dps=None`` the matrix is rounded to doubles and handed to LAPACK;
    otherwise it is diagonalized with ``dps`` significant digits, which keeps
    small eigenvalues accurate when the entries span many decades.
    """
    if dps is None:
        T = np.array([[float(c) * np.sqrt(float(rad)) for c, rad in row] for row in entries])
        return [float(x) for x in np.linalg.eigvalsh(T)]
    with mpmath.workdps(dps):
        T = mpmath.matrix([[exact_entry(c, rad) for c, rad in row] for row in entries])
        values = mpmath.eigsy(T, eigvals_only=True)
        return sorted(float(x) for x in values)


def residue_block(spec: HamiltonianSpec, n_max: int, residue: int) -> tuple[list[int], list[list[tuple[Fraction, int]]]]:
    """Truncated matrix on particle numbers ``n = residue (mod q)``, ``n <= n_max``.

    Every off-diagonal element changes the particle number by a multiple of
    q, so the truncated matrix is exactly the direct sum of these blocks.
    """
    numbers = list(range(residue % spec.q, n_max + 1, spec.q))
    entries = [[fock_matrix_element_exact(spec, m, n) for n in numbers] for m in numbers]
    return numbers, entries


def oracle_eigenvalues(spec: HamiltonianSpec, n_max: int, residues=None, dps: int | None = 40) -> list[float]:
    """Eigenvalues of the truncated Hamiltonian, optionally only on some residue classes."""
    if n_max < spec.q * spec.k0:
        raise TruncationError(f"n_max = {n_max} is below the longest hop q*k0 = {spec.q * spec.k0}")
    if residues is None:
        residues = range(spec.q)
    values = []
    for r in sorted(set(x % spec.q for x in residues)):
        _, entries = residue_block(spec, n_max, r)
        values.extend(symmetric_eigenvalues(entries, dps))
    return sorted(values)


def match_spectra(
    qes: SpectrumResult, spec: HamiltonianSpec, n_max: int, tol: float = 1e-10, dps: int | None = 40
) -> MatchReport:
    """Certify every sector eigenvalue against the truncated Hamiltonian.

    Only the residue classes occupied by the sector are diagonalized.
    """
    top = max((max(lab) for lab in qes.labels), default=0)
    if n_max < top:
        raise TruncationError(f"n_max = {n_max} does not contain the sector (needs >= {top})")
    residues = {lab[0] % spec.q for lab in qes.labels}
    values = oracle_eigenvalues(spec, n_max, residues, dps)
    return match_eigenvalues(qes.eigenvalues, values, tol)


def block_decoupling_check(spec: HamiltonianSpec, sector: SectorBasis, n_max: int) -> bool:
    """True when no matrix element links the sector to its complement.

    Each element is ``coef * sqrt(radicand)`` with a positive integer
    radicand, so the test reduces to exact rational ``coef == 0``.
    """
    block = set(sector.particle_numbers())
    if n_max <= max(block):
        raise TruncationError(f"n_max = {n_max} must exceed the top particle number {max(block)}")
    for m in block:
        for n in range(n_max + 1):
            if n in block:
                continue
            coef, _ = fock_matrix_element_exact(spec, m, n)
            if coef != 0:
                return False
    return True
