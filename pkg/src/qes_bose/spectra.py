"""Invariant-subspace matrices and their spectra.

In the monomial basis the Hamiltonian restricted to a closed sector is a
banded, non-symmetric matrix.  The diagonal similarity ``D = diag(sqrt(m!))``
maps it to the orthonormal number basis, where it is real symmetric; all
numerical eigensolving is done on that symmetric form.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .conditions import cutoff_violations
from .errors import ComplexPairError, ConvergenceError, InvariantSubspaceViolated
from .model import HamiltonianSpec, SectorBasis, alpha, beta, gamma, sqrt_factorial_ratio

DEFAULT_TOL = 1e-12
DEFAULT_MAX_DIM = 512


def max_dim() -> int:
    """Dimension cap, overridable through ``QES_BOSE_MAX_DIM``."""
    raw = os.environ.get("QES_BOSE_MAX_DIM")
    return int(raw) if raw else DEFAULT_MAX_DIM


@dataclass(frozen=True)
class BandMatrix:
    """Exact monomial-basis matrix of a closed sector.

    Column ``n`` holds the image of basis element ``n``: ``gamma_n`` on the
    diagonal, ``alpha_{n,k}`` at row ``n+k`` and ``beta_{n,k}`` at row ``n-k``.
    """

    exact: tuple[tuple[Fraction, ...], ...]
    bandwidth: int
    sector: SectorBasis

    @property
    def dim(self) -> int:
        return len(self.exact)

    @property
    def array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.exact], dtype=float)


def format_violation(n: int, k: int, value: Fraction) -> str:
    label = f"alpha_{n}" if k == 1 else f"alpha_{n},{k}"
    return f"{label} = {value}"


def build_subspace_matrix(spec: HamiltonianSpec, sector: SectorBasis) -> BandMatrix:
    violations = cutoff_violations(spec, sector)
    if violations:
        detail = ", ".join(format_violation(*v) for v in violations)
        raise InvariantSubspaceViolated(
            f"sector (q={sector.q}, r={sector.r}, N={sector.N}) is not invariant: {detail}",
            violations,
        )
    dim = sector.dim
    k0 = spec.k0
    M = [[Fraction(0)] * dim for _ in range(dim)]
    for n in range(dim):
        M[n][n] = gamma(spec, sector, n)
        for k in range(1, k0 + 1):
            if n + k < dim:
                M[n + k][n] = alpha(spec, sector, n, k)
            if n - k >= 0:
                M[n - k][n] = beta(spec, sector, n, k)
    return BandMatrix(tuple(tuple(row) for row in M), k0, sector)


def similarity_ratio(m_row: Sequence[int], m_col: Sequence[int]) -> float:
    """``D_row / D_col`` with ``D = prod_modes sqrt(m!)``."""
    out = 1.0
    for a, b in zip(m_row, m_col):
        if a >= b:
            out *= sqrt_factorial_ratio(b, a)
        else:
            out /= sqrt_factorial_ratio(a, b)
    return out


def similarity_transform(M: np.ndarray, labels: Sequence[Sequence[int]]) -> np.ndarray:
    """``D M D^-1`` where basis state ``i`` carries particle numbers ``labels[i]``."""
    S = np.zeros_like(M, dtype=float)
    rows, cols = np.nonzero(M)
    for i, j in zip(rows, cols):
        S[i, j] = M[i, j] * similarity_ratio(labels[i], labels[j])
    return S


def symmetrize(M: BandMatrix) -> np.ndarray:
    labels = [(m,) for m in M.sector.particle_numbers()]
    dim = M.dim
    S = np.zeros((dim, dim))
    for i in range(dim):
        for j in range(max(0, i - M.bandwidth), min(dim, i + M.bandwidth + 1)):
            value = M.exact[i][j]
            if value:
                S[i, j] = float(value) * similarity_ratio(labels[i], labels[j])
    return S


def eigen_2x2(gamma_a: float, gamma_b: float, offdiag_product: float) -> tuple[float, float]:
    """Eigenvalues of ``[[gamma_a, x], [y, gamma_b]]`` with ``x * y = offdiag_product``."""
    mean = 0.5 * (gamma_a + gamma_b)
    disc = 0.25 * (gamma_a - gamma_b) ** 2 + offdiag_product
    if disc < 0:
        root = complex(0.0, math.sqrt(-disc))
        raise ComplexPairError(
            f"negative discriminant {disc!r}: off-diagonal product is not Hermitian-consistent",
            (mean - root, mean + root),
        )
    root = math.sqrt(disc)
    return mean - root, mean + root


def _cubic_real_roots(c2: float, c1: float, c0: float) -> list[float]:
    # E^3 + c2 E^2 + c1 E + c0 with three real roots (trigonometric form)
    shift = c2 / 3.0
    p = c1 - c2 * c2 / 3.0
    q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    if p >= 0.0:
        t = np.cbrt(-q)
        roots = [t - shift] * 3
    else:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * r)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [r * math.cos(theta - 2.0 * math.pi * j / 3.0) - shift for j in range(3)]
    polished = []
    for x in roots:
        for _ in range(2):
            f = ((x + c2) * x + c1) * x + c0
            df = (3.0 * x + 2.0 * c2) * x + c1
            if df == 0.0:
                break
            step = f / df
            if not math.isfinite(step) or abs(step) > 1e-6 * (1.0 + abs(x)):
                break
            x -= step
        polished.append(x)
    return sorted(polished)


def h1_cubic_coefficients(A1: float, A2: float, gamma1: float, gamma2: float) -> tuple[float, float, float, float]:
    """Monic cubic ``E^3 + c2 E^2 + c1 E + c0`` of the three-level even sector."""
    return (
        1.0,
        -(gamma1 + gamma2),
        gamma1 * gamma2 - 16.0 * (5.0 * A1 * A1 + 52.0 * A1 * A2 + 140.0 * A2 * A2),
        32.0 * gamma2 * (A1 + 4.0 * A2) ** 2,
    )


def eigen_cubic_h1(spec: HamiltonianSpec, gamma1: float, gamma2: float) -> tuple[float, float, float]:
    """Closed-form levels of the three-dimensional even sector of the quadratic model.

    Requires ``alpha_2 = A0 + 4 A1 + 16 A2 = 0``.
    """
    if spec.q != 2 or spec.k0 != 1 or spec.s0 > 2:
        raise ValueError("closed-form cubic applies to the stride-2 model with s0 <= 2, k0 = 1")
    A0, A1, A2 = (spec.coupling(s, 1) for s in range(3))
    if A0 + 4 * A1 + 16 * A2 != 0:
        raise InvariantSubspaceViolated(
            f"cubic closed form needs alpha_2 = 0, got {format_violation(2, 1, A0 + 4 * A1 + 16 * A2)}",
            [(2, 1, A0 + 4 * A1 + 16 * A2)],
        )
    _, c2, c1, c0 = h1_cubic_coefficients(float(A1), float(A2), gamma1, gamma2)
    return tuple(_cubic_real_roots(c2, c1, c0))


def characteristic_polynomial(M: BandMatrix) -> list[Fraction]:
    """Exact coefficients of ``det(E - M)``, highest power first (Faddeev-LeVerrier)."""
    A = [list(row) for row in M.exact]
    n = len(A)
    coeffs = [Fraction(1)]
    Mk = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        # Mk <- A Mk_prev + c I
        prod = [[sum((A[i][t] * Mk[t][j] for t in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += c
        Mk = prod
        AM_trace = sum((A[i][t] * Mk[t][i] for i in range(n) for t in range(n)), Fraction(0))
        c = -AM_trace / k
        coeffs.append(c)
    return coeffs


@dataclass(frozen=True)
class SpectrumResult:
    """Sorted eigenpairs of a closed sector.

    ``vectors_fock[j]`` is the unit eigenvector in the orthonormal number
    basis and ``vectors_monomial[j] = D^-1 vectors_fock[j]`` the matching
    coefficients of the monomials.
    """

    eigenvalues: tuple[float, ...]
    vectors_monomial: tuple[tuple[float, ...], ...]
    vectors_fock: tuple[tuple[float, ...], ...]
    residuals: tuple[float, ...]
    residual_max: float
    labels: tuple[tuple[int, ...], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "eigenvalues": list(self.eigenvalues),
            "residuals": list(self.residuals),
            "residual_max": self.residual_max,
            "particle_numbers": [list(x) for x in self.labels],
            "vectors_monomial": [list(v) for v in self.vectors_monomial],
            "vectors_fock": [list(v) for v in self.vectors_fock],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumResult":
        return cls(
            eigenvalues=tuple(data["eigenvalues"]),
            vectors_monomial=tuple(tuple(v) for v in data["vectors_monomial"]),
            vectors_fock=tuple(tuple(v) for v in data["vectors_fock"]),
            residuals=tuple(data["residuals"]),
            residual_max=data["residual_max"],
            labels=tuple(tuple(x) for x in data.get("particle_numbers", [])),
        )


def diagonalize_symmetric(S: np.ndarray, labels: Sequence[Sequence[int]], tol: float = DEFAULT_TOL) -> SpectrumResult:
    """Dense symmetric eigensolve with a per-pair residual certificate."""
    dim = S.shape[0]
    cap = max_dim()
    if dim > cap:
        raise ValueError(f"matrix dimension {dim} exceeds cap {cap} (set QES_BOSE_MAX_DIM to raise it)")
    scale = float(np.max(np.abs(S))) if S.size else 0.0
    asym = float(np.max(np.abs(S - S.T))) if S.size else 0.0
    if asym > 1e-12 * scale:
        raise ConvergenceError(f"symmetrized matrix is not symmetric (max |S - S^T| = {asym:.3e})", S)
    try:
        values, vectors = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}\n{np.array2string(S)}", S) from exc
    norm = float(np.max(np.abs(values))) if dim else 0.0
    residuals = np.linalg.norm(S @ vectors - vectors * values, axis=0)
    residual_max = float(residuals.max()) if dim else 0.0
    if residual_max > tol * max(norm, np.finfo(float).tiny):
        raise ConvergenceError(
            f"residual {residual_max:.3e} exceeds {tol:.1e} * |S| = {tol * norm:.3e}\n{np.array2string(S)}", S
        )
    # fix the sign so the largest component is positive
    for j in range(dim):
        col = vectors[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            vectors[:, j] = -col
    inv_d = np.array([math.exp(-0.5 * sum(math.lgamma(m + 1) for m in lab)) for lab in labels])
    mono = vectors * inv_d[:, None]
    return SpectrumResult(
        eigenvalues=tuple(float(x) for x in values),
        vectors_monomial=tuple(tuple(float(x) for x in mono[:, j]) for j in range(dim)),
        vectors_fock=tuple(tuple(float(x) for x in vectors[:, j]) for j in range(dim)),
        residuals=tuple(float(x) for x in residuals),
        residual_max=residual_max,
        labels=tuple(tuple(lab) for lab in labels),
    )


def eigen_general(M: BandMatrix, tol: float = DEFAULT_TOL) -> SpectrumResult:
    labels = [(m,) for m in M.sector.particle_numbers()]
    return diagonalize_symmetric(symmetrize(M), labels, tol)


def solve_sector(spec: HamiltonianSpec, sector: SectorBasis, tol: float = DEFAULT_TOL) -> SpectrumResult:
    return eigen_general(build_subspace_matrix(spec, sector), tol)


def merge_spectra(*results: SpectrumResult) -> SpectrumResult:
    """Combine spectra of disjoint sectors; vectors are padded onto the union basis."""
    labels = [lab for res in results for lab in res.labels]
    pairs = []
    offset = 0
    for res in results:
        width = len(res.labels)
        for j, value in enumerate(res.eigenvalues):
            mono = [0.0] * len(labels)
            fock = [0.0] * len(labels)
            mono[offset:offset + width] = res.vectors_monomial[j]
            fock[offset:offset + width] = res.vectors_fock[j]
            pairs.append((value, tuple(mono), tuple(fock), res.residuals[j]))
        offset += width
    pairs.sort(key=lambda p: p[0])
    return SpectrumResult(
        eigenvalues=tuple(p[0] for p in pairs),
        vectors_monomial=tuple(p[1] for p in pairs),
        vectors_fock=tuple(p[2] for p in pairs),
        residuals=tuple(p[3] for p in pairs),
        residual_max=max((p[3] for p in pairs), default=0.0),
        labels=tuple(labels),
    )
