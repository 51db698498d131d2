import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qes_bose.conditions import (
    build_cutoff_system,
    check_cutoff,
    couplings_from_vector,
    decoupled_two_level_relations,
    feasibility,
    nullspace,
    report,
    rref,
    simultaneous_sector_check,
    solve_cutoff_system,
    system_rank,
    two_level_couplings,
    two_level_relations,
)
from qes_bose.model import HamiltonianSpec, SectorBasis, alpha, beta


def test_build_rows_quadratic_family():
    even = build_cutoff_system((2, 1), SectorBasis(2, 0, 1))
    assert [r.coeffs for r in even.rows] == [(1, 2, 4)]
    odd = build_cutoff_system((2, 1), SectorBasis(2, 1, 1))
    assert [r.coeffs for r in odd.rows] == [(1, 3, 9)]
    const = build_cutoff_system((0, 1), SectorBasis(3, 2, 4))
    assert [r.coeffs for r in const.rows] == [(1,)]


def test_row_count_and_block_structure():
    sys_ = build_cutoff_system((3, 4), SectorBasis(2, 1, 5))
    assert len(sys_.rows) == 4 * 5 // 2
    assert len(sys_.unknowns) == 4 * 4
    for row, dense in zip(sys_.rows, sys_.dense()):
        nonzero = [sys_.unknowns[j][1] for j, x in enumerate(dense) if x]
        assert set(nonzero) == {row.k}


def test_vacuous_rows_dropped_for_small_N():
    sys_ = build_cutoff_system((2, 3), SectorBasis(2, 0, 0))
    # only alpha_{0,k} exists; rows i = 2, 3 would point at negative indices
    assert [(r.k, r.i) for r in sys_.rows] == [(1, 1), (2, 1), (3, 1)]


def test_solve_even_L1():
    basis = solve_cutoff_system(build_cutoff_system((2, 1), SectorBasis(2, 0, 1)))
    assert basis == [[-2, 1, 0], [-4, 0, 1]]


def test_solve_even_and_odd():
    basis = solve_cutoff_system(
        build_cutoff_system((2, 1), SectorBasis(2, 0, 1)),
        build_cutoff_system((2, 1), SectorBasis(2, 1, 1)),
    )
    assert basis == [[6, -5, 1]]


def test_solve_constant_coupling_only_zero():
    assert solve_cutoff_system(build_cutoff_system((0, 1), SectorBasis(2, 0, 3))) == []


def test_rref_and_nullspace_small():
    R, piv = rref([[2, 4, 6], [1, 3, 5]])
    assert piv == [0, 1]
    assert R == [[1, 0, -1], [0, 1, 2]]
    assert nullspace([[2, 4, 6], [1, 3, 5]]) == [[1, -2, 1]]
    assert nullspace([], n_cols=2) == [[1, 0], [0, 1]]


def test_check_cutoff_examples(four_level):
    assert check_cutoff(four_level, SectorBasis(2, 0, 1))
    assert not check_cutoff(four_level, SectorBasis(2, 0, 2))
    # alpha_2 = 6 - 20 + 16
    assert alpha(four_level, SectorBasis(2, 0, 2), 2) == 2
    free = HamiltonianSpec(eps=(1,))
    assert all(check_cutoff(free, SectorBasis(2, r, N)) for r in (0, 1) for N in range(6))


def test_feasibility_examples():
    f = feasibility((2, 1))
    assert (f.n1, f.n2, f.feasible) == (1, 3, True)
    f = feasibility((1, 3))
    assert (f.n1, f.n2, f.feasible) == (6, 6, False)
    f = feasibility((0, 1))
    assert (f.n1, f.n2, f.feasible) == (1, 1, False)


def test_feasibility_grid():
    for s0, k0 in itertools.product(range(11), range(1, 11)):
        f = feasibility((s0, k0))
        assert f.n1 == k0 * (k0 + 1) // 2
        assert f.n2 == (s0 + 1) * k0
        assert f.feasible == (2 * s0 >= k0)


@given(
    q=st.integers(1, 4),
    data=st.data(),
    N=st.integers(0, 9),
    s0=st.integers(0, 4),
    k0=st.integers(1, 4),
)
@settings(max_examples=80, deadline=None)
def test_nullspace_vectors_close_the_sector(q, data, N, s0, k0):
    r = data.draw(st.integers(0, q - 1))
    sector = SectorBasis(q, r, N)
    system = build_cutoff_system((s0, k0), sector)
    basis = solve_cutoff_system(system)
    rank = system_rank(system)
    assert rank <= feasibility((s0, k0)).n1
    assert len(basis) == (s0 + 1) * k0 - rank
    for vec in basis:
        assert all(x.denominator == 1 for x in vec)
        spec = HamiltonianSpec(eps=(1,), A=couplings_from_vector(vec, (s0, k0)), q=q)
        assert check_cutoff(spec, sector)
    # Vandermonde blocks have full row rank when the hop count fits the degree
    if N >= k0 - 1:
        expected = sum(min(k, s0 + 1) for k in range(1, k0 + 1))
        assert rank == expected


@pytest.mark.parametrize("L", range(1, 21))
def test_two_level_relations_identities(L):
    A0, A1, A2 = two_level_relations(L)
    spec = HamiltonianSpec.h1(A0, A1, A2)
    sector = SectorBasis(2, 0, L)
    assert alpha(spec, sector, L) == 0
    assert alpha(spec, sector, L - 1) == -2 * A2
    assert beta(spec, sector, L) == -4 * L * (2 * L - 1) * A2
    if L >= 2:
        # the pair is not isolated: beta_{L-1} = 4 (2L-2)(2L-3) A2
        assert beta(spec, sector, L - 1) == 4 * (2 * L - 2) * (2 * L - 3) * A2


def test_two_level_relations_values():
    assert two_level_relations(1) == (-2, -1, 1)
    assert two_level_relations(2) == (4, -5, 1)
    with pytest.raises(ValueError):
        two_level_relations(0)


@pytest.mark.parametrize("L", range(1, 21))
def test_decoupled_two_level_relations(L):
    A0, A1, A2 = decoupled_two_level_relations(L)
    spec = HamiltonianSpec.h1(A0, A1, A2)
    sector = SectorBasis(2, 0, L)
    assert alpha(spec, sector, L) == 0
    assert L == 1 or beta(spec, sector, L - 1) == 0
    assert alpha(spec, sector, L - 1) == -4 * A2
    assert beta(spec, sector, L) == -8 * L * (2 * L - 1) * A2


@pytest.mark.parametrize("r", [0, 1])
@pytest.mark.parametrize("N", [1, 2, 3, 5, 8])
def test_two_level_search(r, N):
    sector = SectorBasis(2, r, N)
    basis = two_level_couplings(2, sector)
    assert len(basis) == (2 if N == 1 else 1)
    for vec in basis:
        spec = HamiltonianSpec(eps=(1,), A=couplings_from_vector(vec, (2, 1)), q=2)
        assert check_cutoff(spec, sector)
        assert beta(spec, sector, N - 1) == 0
    if r == 0 and N >= 2:
        A = [x / basis[0][2] for x in basis[0]]
        assert tuple(A) == decoupled_two_level_relations(N)


def test_simultaneous_sector_check(four_level):
    assert simultaneous_sector_check(four_level, 1, 1) == (True, True, True)
    two = HamiltonianSpec.h1(-2, -1, 1)
    assert simultaneous_sector_check(two, 1, 1) == (True, False, False)
    # alpha~_1 = -2 - 3 + 9
    assert alpha(two, SectorBasis(2, 1, 1), 1) == 4
    assert simultaneous_sector_check(HamiltonianSpec(eps=(1,)), 3, 2) == (True, True, True)
    with pytest.raises(ValueError):
        simultaneous_sector_check(HamiltonianSpec(eps=(1,), q=3), 1, 1)


def test_report_document():
    doc = report((2, 1), SectorBasis(2, 0, 1), SectorBasis(2, 1, 1))
    assert doc["nullspace"] == [["6", "-5", "1"]]
    assert (doc["n1"], doc["n2"], doc["feasible"], doc["rank"]) == (1, 3, True, 2)
    half = report((2, 1), SectorBasis(2, 0, 3))
    assert [[Fraction(x) for x in v] for v in half["nullspace"]] == [[-6, 1, 0], [-36, 0, 1]]
