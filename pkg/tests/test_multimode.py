import itertools
from fractions import Fraction

import numpy as np
import pytest

from qes_bose.errors import InvariantSubspaceViolated
from qes_bose.model import HamiltonianSpec, SectorBasis
from qes_bose.multimode import (
    ProductHamiltonian,
    ProductTerm,
    build_product_matrix,
    check_product_invariance,
    match_product,
    product_from_config,
    product_spectrum,
    separable,
    symmetrize_product,
    two_mode_oracle_eigenvalues,
)
from qes_bose.spectra import solve_sector

HARMONIC = HamiltonianSpec(eps=(1,))
TWO_LEVEL = HamiltonianSpec.h1(-2, 0, Fraction(1, 2))
EVEN1 = SectorBasis(2, 0, 1)


def test_invariance_checks(four_level):
    assert check_product_invariance(separable(TWO_LEVEL, four_level, EVEN1, SectorBasis(2, 1, 1)))
    broken = HamiltonianSpec.h1(1, 0, 0)
    assert not check_product_invariance(separable(broken, HARMONIC, EVEN1, EVEN1))
    ph = ProductHamiltonian(((four_level, four_level),), EVEN1, SectorBasis(2, 1, 1))
    assert check_product_invariance(ph)


def test_build_rejects_open_factor():
    ph = separable(HamiltonianSpec.h1(1, 0, 0), HARMONIC, EVEN1, EVEN1)
    with pytest.raises(InvariantSubspaceViolated):
        build_product_matrix(ph)


def test_diagonal_product():
    a = HamiltonianSpec(eps=(1, 1))
    b = HamiltonianSpec(eps=(2,), q=3)
    ph = ProductHamiltonian(((a, b),), SectorBasis(2, 1, 2), SectorBasis(3, 0, 1))
    M = build_product_matrix(ph)
    ga = [m + m * m for m in (1, 3, 5)]
    gb = [2 * m for m in (0, 3)]
    np.testing.assert_array_equal(M, np.diag([x * y for x in ga for y in gb]))


def test_separable_harmonic():
    res = product_spectrum(separable(HARMONIC, HARMONIC, EVEN1, EVEN1))
    assert res.eigenvalues == pytest.approx((0.0, 2.0, 2.0, 4.0), abs=1e-14)


def test_separable_pairwise_sums(four_level):
    res = product_spectrum(separable(TWO_LEVEL, HARMONIC, EVEN1, EVEN1))
    assert res.eigenvalues == pytest.approx((-2.0, 0.0, 4.0, 6.0), abs=1e-12)
    sec_b = SectorBasis(2, 1, 1)
    res = product_spectrum(separable(four_level, four_level, EVEN1, sec_b))
    ea = solve_sector(four_level, EVEN1).eigenvalues
    eb = solve_sector(four_level, sec_b).eigenvalues
    assert res.eigenvalues == pytest.approx(sorted(x + y for x, y in itertools.product(ea, eb)), abs=1e-10)


def test_product_symmetrization(four_level):
    ph = ProductHamiltonian(
        ((four_level, None), (None, TWO_LEVEL), ProductTerm(four_level, TWO_LEVEL, Fraction(1, 3))),
        SectorBasis(2, 1, 1),
        EVEN1,
    )
    S = symmetrize_product(ph)
    assert np.max(np.abs(S - S.T)) <= 1e-12 * np.max(np.abs(S))


def test_coupled_matches_two_mode_oracle(four_level):
    ph = ProductHamiltonian(
        ((four_level, None), (None, TWO_LEVEL), ProductTerm(four_level, TWO_LEVEL, Fraction(-2, 5))),
        SectorBasis(2, 1, 1),
        EVEN1,
    )
    res = product_spectrum(ph)
    rep = match_product(res, ph)
    assert rep.ok and rep.max_gap <= 1e-10


def test_two_mode_oracle_float_and_mp_agree(four_level):
    ph = separable(four_level, TWO_LEVEL, EVEN1, EVEN1)
    lo = two_mode_oracle_eigenvalues(ph, 8, 8, dps=None)
    hi = two_mode_oracle_eigenvalues(ph, 8, 8, dps=30)
    np.testing.assert_allclose(lo, hi, atol=1e-9)


def test_product_from_config():
    modes = [
        {"specs": [{"eps": ["1"], "A": [{"s": 0, "k": 1, "value": "-2"}, {"s": 2, "k": 1, "value": "1/2"}], "q": 2}], "sector": {"r": 0, "N": 1}},
        {"spec": {"eps": ["1"], "q": 2}, "sector": {"r": 0, "N": 1}},
    ]
    ph = product_from_config(modes, [[0, None], [None, 0, "1"]])
    assert product_spectrum(ph).eigenvalues == pytest.approx((-2.0, 0.0, 4.0, 6.0), abs=1e-12)
    with pytest.raises(ValueError):
        product_from_config(modes[:1], [])
