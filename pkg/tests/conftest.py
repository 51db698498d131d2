import math
import random
from fractions import Fraction

import numpy as np
import pytest

from qes_bose.conditions import build_cutoff_system, couplings_from_vector, feasibility, solve_cutoff_system
from qes_bose.model import HamiltonianSpec, SectorBasis
from qes_bose.spectra import build_subspace_matrix, symmetrize


def ladder_hamiltonian(spec, n_max):
    """Dense <m|H|n> for m, n <= n_max from explicit ladder-operator products.

    The operators live on a larger space so that truncation never touches the
    returned block.
    """
    pad = spec.q * spec.k0 + 2
    dim = n_max + 1 + pad
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    ad = a.T
    N = np.diag(np.arange(dim, dtype=float))
    H = np.zeros((dim, dim))
    for p, e in enumerate(spec.eps, start=1):
        H += float(e) * np.linalg.matrix_power(N, p)
    for (s, k), v in spec.A.items():
        Ns = np.linalg.matrix_power(N, s)
        down = np.linalg.matrix_power(a, k * spec.q)
        up = np.linalg.matrix_power(ad, k * spec.q)
        H += float(v) * (Ns @ down + up @ Ns)
    return H[: n_max + 1, : n_max + 1]


def sample_qes_spec(rng, q=None, N=None, k0=None, s0=None, normalize=True):
    """Random Hamiltonian whose couplings lie in the cutoff nullspace of a random sector."""
    while True:
        q_ = q or rng.randint(1, 3)
        r = rng.randrange(q_)
        N_ = N if N is not None else rng.randint(0, 8)
        k0_ = k0 or rng.randint(1, 2)
        s0_ = s0 if s0 is not None else rng.randint(1, 3)
        if feasibility((s0_, k0_)).feasible:
            break
    sector = SectorBasis(q_, r, N_)
    basis = solve_cutoff_system(build_cutoff_system((s0_, k0_), sector))
    coeffs = [Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in basis]
    width = (s0_ + 1) * k0_
    vec = [sum((c * b[i] for c, b in zip(coeffs, basis)), Fraction(0)) for i in range(width)]
    eps = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
    spec = HamiltonianSpec(eps=tuple(eps), A=couplings_from_vector(vec, (s0_, k0_)), q=q_)
    if normalize:
        # exact power-of-two rescale so the block has entries of order ten
        scale = float(np.max(np.abs(symmetrize(build_subspace_matrix(spec, sector))))) or 1.0
        f = Fraction(2) ** (3 - math.frexp(scale)[1])
        spec = HamiltonianSpec(eps=tuple(e * f for e in spec.eps), A={k: v * f for k, v in spec.A.items()}, q=q_)
    return spec, sector


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def four_level():
    return HamiltonianSpec.h1(6, -5, 1)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.TITLES):
        parts = mod.RESULTS.get(n)
        if not parts:
            terminalreporter.write_line(f"SKIP criterion {n}: {mod.TITLES[n]} (not run)")
            continue
        passed = sum(ok for ok, _ in parts)
        status = "PASS" if passed == len(parts) else "FAIL"
        extra = "" if len(parts) == 1 else f" ({passed}/{len(parts)} checks pass)"
        terminalreporter.write_line(f"{status} criterion {n}: {mod.TITLES[n]}{extra}")
