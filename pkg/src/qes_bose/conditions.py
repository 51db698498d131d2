"""Cutoff conditions that close a monomial sector under the Hamiltonian.

A sector ``x^{qn+r}, n = 0..N`` is invariant when no basis element couples
upward past ``N``: ``alpha_{N+1-i,k} = 0`` for every hop ``k`` and
``i = 1..k``.  Each condition is linear in the couplings ``A_{s,k}`` with
integer coefficients, so the admissible couplings form the nullspace of an
integer matrix which is computed here in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .model import HamiltonianSpec, SectorBasis, _alpha_at


class CutoffRow(NamedTuple):
    k: int
    i: int
    coeffs: tuple[int, ...]  # entries for A_{0,k} .. A_{s0,k}


@dataclass(frozen=True)
class CutoffSystem:
    """Integer linear system in the unknowns ``A_{s,k}``.

    Unknowns are ordered by hop first, ``(0,1), (1,1), .., (s0,1), (0,2), ..``.
    Rows whose basis index ``N+1-i`` would be negative are vacuous and are not
    generated, so the row count equals ``k0(k0+1)/2`` whenever ``N >= k0-1``.
    """

    rows: tuple[CutoffRow, ...]
    sector: SectorBasis
    shape: tuple[int, int]

    @property
    def unknowns(self) -> list[tuple[int, int]]:
        s0, k0 = self.shape
        return [(s, k) for k in range(1, k0 + 1) for s in range(s0 + 1)]

    def dense(self) -> list[list[int]]:
        """Rows expanded over the full unknown vector."""
        s0, k0 = self.shape
        width = (s0 + 1) * k0
        out = []
        for row in self.rows:
            full = [0] * width
            start = (row.k - 1) * (s0 + 1)
            full[start:start + s0 + 1] = row.coeffs
            out.append(full)
        return out


@dataclass(frozen=True)
class FeasibilityReport:
    n1: int
    n2: int
    feasible: bool


def build_cutoff_system(shape: tuple[int, int], sector: SectorBasis) -> CutoffSystem:
    s0, k0 = shape
    if s0 < 0 or k0 < 1:
        raise ValueError(f"shape needs s0 >= 0 and k0 >= 1, got {shape}")
    rows = []
    for k in range(1, k0 + 1):
        for i in range(1, k + 1):
            n = sector.N + 1 - i
            if n < 0:
                continue
            m = sector.particle_number(n)
            rows.append(CutoffRow(k, i, tuple(m**s for s in range(s0 + 1))))
    return CutoffSystem(tuple(rows), sector, (s0, k0))


def rref(matrix: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns ``(R, pivot_columns)``."""
    m = [[Fraction(x) for x in row] for row in matrix]
    if not m:
        return [], []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def _clear_denominators(vec: list[Fraction]) -> list[Fraction]:
    lcm = 1
    for x in vec:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    g = g or 1
    return [Fraction(x // g) for x in ints]


def nullspace(matrix: Sequence[Sequence], n_cols: int | None = None) -> list[list[Fraction]]:
    """Exact nullspace basis, one integer-cleared vector per free column."""
    if not matrix:
        if n_cols is None:
            raise ValueError("n_cols is required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    n_cols = len(matrix[0])
    R, pivots = rref(matrix)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n_cols
        vec[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            vec[pc] = -row[f]
        basis.append(_clear_denominators(vec))
    return basis


def _stack(systems: Sequence[CutoffSystem]) -> tuple[tuple[int, int], list[list[int]]]:
    if not systems:
        raise ValueError("at least one cutoff system is required")
    shape = systems[0].shape
    if any(s.shape != shape for s in systems):
        raise ValueError("cutoff systems must share one shape (s0, k0)")
    rows = [row for s in systems for row in s.dense()]
    return shape, rows


def system_rank(*systems: CutoffSystem) -> int:
    shape, rows = _stack(systems)
    return len(rref(rows)[1]) if rows else 0


def solve_cutoff_system(*systems: CutoffSystem) -> list[list[Fraction]]:
    """Exact basis of couplings satisfying every row of every given system.

    Passing several systems intersects their solution sets, e.g. the even and
    odd sectors together.  The hop blocks are independent and are solved one
    at a time; an empty list means only the zero coupling survives.
    """
    (s0, k0), _ = _stack(systems)
    width = s0 + 1
    basis = []
    for k in range(1, k0 + 1):
        block = [list(row.coeffs) for s in systems for row in s.rows if row.k == k]
        for vec in nullspace(block, n_cols=width):
            full = [Fraction(0)] * (width * k0)
            full[(k - 1) * width:k * width] = vec
            basis.append(full)
    return basis


def couplings_from_vector(vec: Sequence, shape: tuple[int, int]) -> dict[tuple[int, int], Fraction]:
    s0, k0 = shape
    if len(vec) != (s0 + 1) * k0:
        raise ValueError(f"vector of length {len(vec)} does not match shape {shape}")
    keys = [(s, k) for k in range(1, k0 + 1) for s in range(s0 + 1)]
    return {key: Fraction(v) for key, v in zip(keys, vec)}


def cutoff_violations(spec: HamiltonianSpec, sector: SectorBasis) -> list[tuple[int, int, Fraction]]:
    """Every ``(n, k, alpha_{n,k})`` with a nonzero coupling out of the sector."""
    if spec.q != sector.q:
        raise ValueError(f"sector stride {sector.q} does not match Hamiltonian stride {spec.q}")
    out = []
    for k in range(1, spec.k0 + 1):
        for i in range(1, k + 1):
            n = sector.N + 1 - i
            if n < 0:
                continue
            value = _alpha_at(spec, sector.particle_number(n), k)
            if value != 0:
                out.append((n, k, value))
    return out


def check_cutoff(spec: HamiltonianSpec, sector: SectorBasis) -> bool:
    return not cutoff_violations(spec, sector)


def feasibility(shape: tuple[int, int]) -> FeasibilityReport:
    s0, k0 = shape
    n1 = k0 * (k0 + 1) // 2
    n2 = (s0 + 1) * k0
    return FeasibilityReport(n1, n2, n2 > n1)


def two_level_relations(L: int) -> tuple[Fraction, Fraction, Fraction]:
    """Closed-form ``(A0, A1, A2) / A2`` for the quadratic stride-2 model.

    These relations give ``alpha_L = 0``, ``alpha_{L-1} = -2 A2`` and
    ``beta_L = -4L(2L-1) A2``.  They do not make ``beta_{L-1}`` vanish for
    ``L >= 2`` (it equals ``4(2L-2)(2L-3) A2``), so the pair
    ``{x^{2L-2}, x^{2L}}`` is isolated only at ``L = 1``; use
    :func:`decoupled_two_level_relations` for a genuinely isolated pair.
    """
    if L < 1:
        raise ValueError(f"two-level relations need L >= 1, got {L}")
    return Fraction(2 * L * (2 * L - 3)), Fraction(3 - 4 * L), Fraction(1)


def decoupled_two_level_relations(L: int) -> tuple[Fraction, Fraction, Fraction]:
    """``(A0, A1, A2) / A2`` with ``alpha_L = 0`` and ``beta_{L-1} = 0``.

    Here ``alpha_{L-1} = -4 A2`` and ``beta_L = -8L(2L-1) A2``, so the
    isolated pair has off-diagonal product ``32 L(2L-1) A2^2``.
    """
    if L < 1:
        raise ValueError(f"two-level relations need L >= 1, got {L}")
    return Fraction(4 * L * (L - 2)), Fraction(4 - 4 * L), Fraction(1)


def two_level_couplings(s0: int, sector: SectorBasis) -> list[list[Fraction]]:
    """Nullspace of single-hop couplings isolating the top two basis elements.

    Solves ``alpha_N = 0`` together with ``beta_{N-1} = 0``; the latter is
    ``alpha`` at particle number ``q(N-2)+r`` times a nonzero falling
    factorial, so both conditions are linear.  Works for either parity.
    """
    N = sector.N
    if N < 1:
        raise ValueError("a two-level block needs N >= 1")
    rows = [[sector.particle_number(N) ** s for s in range(s0 + 1)]]
    if N >= 2:
        rows.append([sector.particle_number(N - 2) ** s for s in range(s0 + 1)])
    return nullspace(rows)


class SectorCheck(NamedTuple):
    even_ok: bool
    odd_ok: bool
    sl2_expressible: bool


def simultaneous_sector_check(spec: HamiltonianSpec, L: int, M: int) -> SectorCheck:
    """Test even closure at ``N = L`` and odd closure at ``N = M``.

    When both hold the Hamiltonian can be written through the sl2 generators
    acting on all polynomials of degree ``<= max(2L, 2M+1)``.
    """
    if spec.q != 2:
        raise ValueError("even/odd sector check needs stride q = 2")
    even_ok = check_cutoff(spec, SectorBasis(2, 0, L))
    odd_ok = check_cutoff(spec, SectorBasis(2, 1, M))
    return SectorCheck(even_ok, odd_ok, even_ok and odd_ok)


def report(shape: tuple[int, int], *sectors: SectorBasis) -> dict:
    """Summary document for the conditions command."""
    systems = [build_cutoff_system(shape, sector) for sector in sectors]
    feas = feasibility(shape)
    basis = solve_cutoff_system(*systems)
    return {
        "n1": feas.n1,
        "n2": feas.n2,
        "feasible": feas.feasible,
        "rank": system_rank(*systems),
        "unknowns": [{"s": s, "k": k} for s, k in systems[0].unknowns],
        "nullspace": [[str(x) for x in vec] for vec in basis],
    }
