"""Anharmonic Bose Hamiltonians and their coefficient functions.

The family handled here is

    H = sum_p eps_p N^p + sum_{s,k} A_{s,k} [N^s a^{kq} + (a^+)^{kq} N^s],

with ``N = a^+ a``.  Under ``a -> d/dx`` and ``a^+ -> x`` the monomial
``x^m`` is the unnormalized state ``sqrt(m!) |m>`` and the Hamiltonian maps
``x^{qn+r}`` onto a band of neighbouring monomials ``x^{q(n+-k)+r}``.  The
functions :func:`gamma`, :func:`alpha` and :func:`beta` return the diagonal,
upward and downward coefficients of that band.

All coefficients are held as :class:`fractions.Fraction` so that cutoff
conditions can be tested exactly; callers wanting doubles convert with
``float``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .errors import SectorRangeError

Number = Union[int, float, str, Fraction]


def to_fraction(value: Number) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings may be integers, decimals (``"0.25"``) or ratios (``"-3/7"``).
    Floats are converted exactly from their binary value.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"non-finite coefficient {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a real coefficient")


@dataclass(frozen=True)
class SectorBasis:
    """Monomials ``x^{qn+r}`` for ``n = 0..N``.

    For ``q = 2``, ``r = 0`` is the even sector and ``r = 1`` the odd one.
    """

    q: int
    r: int
    N: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"stride q must be positive, got {self.q}")
        if not 0 <= self.r < self.q:
            raise ValueError(f"offset r must satisfy 0 <= r < q, got r={self.r}, q={self.q}")
        if self.N < 0:
            raise ValueError(f"top index N must be >= 0, got {self.N}")

    @property
    def dim(self) -> int:
        return self.N + 1

    def particle_number(self, n: int) -> int:
        return self.q * n + self.r

    def particle_numbers(self) -> list[int]:
        return [self.q * n + self.r for n in range(self.N + 1)]

    def with_top(self, N: int) -> "SectorBasis":
        return SectorBasis(self.q, self.r, N)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Coefficients of one Hamiltonian of the family.

    Parameters
    ----------
    eps : sequence
        ``eps[p-1]`` multiplies ``N^p``; its length is the diagonal degree p0.
    A : mapping
        ``A[(s, k)]`` multiplies ``N^s a^{kq} + (a^+)^{kq} N^s``.
    q : int
        Hop stride in particle number units.
    """

    eps: tuple[Fraction, ...]
    A: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    q: int = 2

    def __post_init__(self):
        eps = tuple(to_fraction(e) for e in self.eps)
        if not eps:
            raise ValueError("at least one diagonal coefficient eps_1 is required")
        couplings = {}
        for key, value in dict(self.A).items():
            s, k = (int(x) for x in key)
            if s < 0 or k < 1:
                raise ValueError(f"coupling index (s={s}, k={k}) needs s >= 0 and k >= 1")
            couplings[(s, k)] = to_fraction(value)
        if self.q < 1:
            raise ValueError(f"stride q must be positive, got {self.q}")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "A", dict(sorted(couplings.items(), key=lambda kv: (kv[0][1], kv[0][0]))))

    @classmethod
    def h1(cls, A0: Number = 0, A1: Number = 0, A2: Number = 0, eps: tuple = (1,)) -> "HamiltonianSpec":
        """Stride-2 model with quadratic coupling ``sum_s A_s [N^s a^2 + h.c.]``."""
        return cls(eps=tuple(eps), A={(0, 1): A0, (1, 1): A1, (2, 1): A2}, q=2)

    def coupling(self, s: int, k: int) -> Fraction:
        return self.A.get((s, k), Fraction(0))

    def _nonzero(self):
        return [key for key, value in self.A.items() if value != 0]

    @property
    def p0(self) -> int:
        return len(self.eps)

    @property
    def s0(self) -> int:
        keys = self._nonzero()
        return max((s for s, _ in keys), default=0)

    @property
    def k0(self) -> int:
        keys = self._nonzero()
        return max((k for _, k in keys), default=1)

    @property
    def is_free(self) -> bool:
        """True when every off-diagonal coupling vanishes."""
        return not self._nonzero()

    def with_couplings(self, A: Mapping[tuple[int, int], Number]) -> "HamiltonianSpec":
        return HamiltonianSpec(eps=self.eps, A=A, q=self.q)

    def to_dict(self) -> dict:
        return {
            "eps": [str(e) for e in self.eps],
            "A": [{"s": s, "k": k, "value": str(v)} for (s, k), v in self.A.items()],
            "q": self.q,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HamiltonianSpec":
        if "eps" not in data:
            raise ValueError("Hamiltonian document needs an 'eps' list")
        A = {}
        for entry in data.get("A", []):
            key = (int(entry["s"]), int(entry.get("k", 1)))
            if key in A:
                raise ValueError(f"duplicate coupling entry s={key[0]}, k={key[1]}")
            A[key] = entry["value"]
        return cls(eps=tuple(data["eps"]), A=A, q=int(data.get("q", 2)))


def _check_index(sector: SectorBasis, n: int):
    if not 0 <= n <= sector.N:
        raise SectorRangeError(f"basis index {n} outside sector 0..{sector.N}")


def _check_hop(spec: HamiltonianSpec, k: int):
    if not 1 <= k <= spec.k0:
        raise SectorRangeError(f"hop {k} outside 1..{spec.k0}")


def _check_stride(spec: HamiltonianSpec, sector: SectorBasis):
    if spec.q != sector.q:
        raise ValueError(f"sector stride {sector.q} does not match Hamiltonian stride {spec.q}")


def _alpha_at(spec: HamiltonianSpec, m: int, k: int) -> Fraction:
    # coupling of x^m to x^{m+kq}; also valid at points outside a sector
    return sum((v * m**s for (s, kk), v in spec.A.items() if kk == k), Fraction(0))


def falling_factorial(m: int, length: int) -> int:
    """``m (m-1) ... (m-length+1)``."""
    out = 1
    for t in range(m - length + 1, m + 1):
        out *= t
    return out


def gamma(spec: HamiltonianSpec, sector: SectorBasis, n: int) -> Fraction:
    """Diagonal coefficient ``sum_p eps_p (qn+r)^p``."""
    _check_stride(spec, sector)
    _check_index(sector, n)
    m = sector.particle_number(n)
    return sum((e * m ** (p + 1) for p, e in enumerate(spec.eps)), Fraction(0))


def alpha(spec: HamiltonianSpec, sector: SectorBasis, n: int, k: int = 1) -> Fraction:
    """Coefficient of ``x^{q(n+k)+r}`` in ``H x^{qn+r}``."""
    _check_stride(spec, sector)
    _check_index(sector, n)
    _check_hop(spec, k)
    return _alpha_at(spec, sector.particle_number(n), k)


def beta(spec: HamiltonianSpec, sector: SectorBasis, n: int, k: int = 1) -> Fraction:
    """Coefficient of ``x^{q(n-k)+r}`` in ``H x^{qn+r}``; zero for ``n < k``."""
    _check_stride(spec, sector)
    _check_index(sector, n)
    _check_hop(spec, k)
    if n < k:
        return Fraction(0)
    m = sector.particle_number(n)
    hop = k * spec.q
    return falling_factorial(m, hop) * _alpha_at(spec, m - hop, k)


class Status(enum.Enum):
    WELL_DEFINED = "WellDefined"
    CONDITIONAL = "Conditional"
    ILL_DEFINED = "IllDefined"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Validity:
    status: Status
    message: str

    @property
    def ok(self) -> bool:
        return self.status in (Status.WELL_DEFINED, Status.CONDITIONAL)


def validate_ground_state(spec: HamiltonianSpec) -> Validity:
    """Decide whether the Hamiltonian is bounded below.

    The diagonal part grows like ``N^p0`` while a coupling ``A_{s,1}`` grows
    like ``N^{s+2}`` in the large-N limit, so p0 must dominate s0 + 2.  At
    equality the leading coefficients decide; the comparison uses
    ``|A_{s0,1}|`` because the sign of the coupling can be flipped by the
    phase change ``a -> i a``.
    """
    p0, s0 = spec.p0, spec.s0
    top = spec.eps[-1]
    if spec.is_free:
        if top > 0:
            return Validity(Status.WELL_DEFINED, "no off-diagonal part; leading eps is positive")
        return Validity(Status.ILL_DEFINED, f"ill-defined ground state: leading eps_{p0} = {top} is not positive")
    if spec.k0 > 1:
        return Validity(Status.UNKNOWN, f"no ground-state criterion known for hops up to k0 = {spec.k0}")
    if p0 > s0 + 2:
        if top > 0:
            return Validity(Status.WELL_DEFINED, f"p0 = {p0} > s0 + 2 = {s0 + 2}")
        return Validity(Status.ILL_DEFINED, f"ill-defined ground state: leading eps_{p0} = {top} is not positive")
    if p0 == s0 + 2:
        lead = spec.coupling(s0, 1)
        if top >= 2 * abs(lead):
            return Validity(
                Status.CONDITIONAL,
                f"p0 = s0 + 2 = {p0} and eps_{p0} = {top} >= 2|A_{s0},1| = {2 * abs(lead)} (absolute value used)",
            )
        return Validity(
            Status.ILL_DEFINED,
            f"ill-defined ground state: eps_{p0} = {top} < 2|A_{s0},1| = {2 * abs(lead)} (absolute value used)",
        )
    return Validity(Status.ILL_DEFINED, f"ill-defined ground state: p0 = {p0} < s0 + 2 = {s0 + 2}")


def sqrt_factorial_ratio(lo: int, hi: int) -> float:
    """``sqrt(hi! / lo!)`` for ``hi >= lo`` as a product of ``hi - lo`` square roots."""
    out = 1.0
    for t in range(lo + 1, hi + 1):
        out *= math.sqrt(t)
    return out


def fock_matrix_element_exact(spec: HamiltonianSpec, m: int, n: int) -> tuple[Fraction, int]:
    """``<m|H|n> = coef * sqrt(radicand)`` with a rational coefficient and integer radicand."""
    if m < 0 or n < 0:
        raise ValueError("particle numbers must be non-negative")
    if m == n:
        return sum((e * n ** (p + 1) for p, e in enumerate(spec.eps)), Fraction(0)), 1
    lo, hi = min(m, n), max(m, n)
    gap = hi - lo
    if gap % spec.q:
        return Fraction(0), 1
    k = gap // spec.q
    coef = _alpha_at(spec, lo, k)
    if coef == 0:
        return Fraction(0), 1
    return coef, falling_factorial(hi, gap)


def fock_matrix_element(spec: HamiltonianSpec, m: int, n: int) -> float:
    """``<m|H|n>`` in the orthonormal number basis; symmetric in ``(m, n)``."""
    if m < 0 or n < 0:
        raise ValueError("particle numbers must be non-negative")
    if m == n:
        return float(sum((e * n ** (p + 1) for p, e in enumerate(spec.eps)), Fraction(0)))
    lo, hi = min(m, n), max(m, n)
    gap = hi - lo
    if gap % spec.q:
        return 0.0
    coef = _alpha_at(spec, lo, gap // spec.q)
    if coef == 0:
        return 0.0
    return float(coef) * sqrt_factorial_ratio(lo, hi)
