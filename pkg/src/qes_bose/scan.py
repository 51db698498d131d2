"""Coefficient sweeps that stay on the invariant-sector manifold."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .conditions import build_cutoff_system, feasibility, rref
from .config import ScanSettings
from .errors import QESError
from .model import HamiltonianSpec, SectorBasis
from .spectra import DEFAULT_TOL, merge_spectra, solve_sector


class ScanError(QESError):
    """The requested sweep cannot keep the sectors closed."""


def _free_mode(base: HamiltonianSpec, sectors: Sequence[SectorBasis], shape, key, value: Fraction) -> HamiltonianSpec:
    s0, k0 = shape
    unknowns = [(s, k) for k in range(1, k0 + 1) for s in range(s0 + 1)]
    if key not in unknowns:
        raise ScanError(f"A_{key[0]},{key[1]} is outside the shape (s0={s0}, k0={k0})")
    order = [u for u in unknowns if u != key] + [key]
    rows = []
    for sector in sectors:
        system = build_cutoff_system(shape, sector)
        for row, dense in zip(system.rows, system.dense()):
            by_key = dict(zip(unknowns, dense))
            rows.append([by_key[u] for u in order])
    values = {u: base.coupling(*u) for u in unknowns}
    values[key] = value
    if not rows:
        return base.with_couplings(values)
    R, pivots = rref(rows)
    if len(order) - 1 in pivots:
        raise ScanError(f"A_{key[0]},{key[1]} is fixed by the cutoff conditions and cannot be swept")
    pivot_keys = {order[p] for p in pivots}
    for row, p in zip(R, pivots):
        values[order[p]] = -sum(
            (row[c] * values[order[c]] for c in range(len(order)) if c != p and order[c] not in pivot_keys),
            Fraction(0),
        )
    return base.with_couplings(values)


def spec_at(base: HamiltonianSpec, sectors: Sequence[SectorBasis], shape, scan: ScanSettings, value: Fraction) -> HamiltonianSpec:
    """Hamiltonian at one sweep point with the cutoff conditions re-imposed.

    ``free`` mode sets the swept coupling, keeps the other independent
    couplings at their base values and re-solves the dependent ones.
    ``ray`` mode rescales every coupling along the ray through the base point.
    """
    kind, a, b = scan.variable
    if kind == "eps":
        eps = list(base.eps) + [Fraction(0)] * max(0, a - len(base.eps))
        eps[a - 1] = value
        return HamiltonianSpec(eps=tuple(eps), A=base.A, q=base.q)
    key = (a, b)
    if scan.mode == "ray":
        anchor = base.coupling(*key)
        if anchor == 0:
            raise ScanError(f"ray sweep needs a nonzero base value of A_{a},{b}")
        factor = value / anchor
        return base.with_couplings({k: v * factor for k, v in base.A.items()})
    return _free_mode(base, sectors, shape, key, value)


def run_scan(base: HamiltonianSpec, sectors: Sequence[SectorBasis], shape, scan: ScanSettings, tol: float = DEFAULT_TOL):
    """``[(value, spectrum), ...]`` ordered by sweep value."""
    if not feasibility(shape).feasible:
        rep = feasibility(shape)
        raise ScanError(f"shape (s0={shape[0]}, k0={shape[1]}) is infeasible: n2 = {rep.n2} <= n1 = {rep.n1}")
    out = []
    for value in scan.values():
        spec = spec_at(base, sectors, shape, scan, value)
        out.append((value, merge_spectra(*(solve_sector(spec, s, tol) for s in sectors))))
    return out
