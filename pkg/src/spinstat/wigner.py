"""Wigner D matrices and Clebsch-Gordan coefficients.

Matrices are indexed by projection in descending order, so row and column 0
belong to m = +s. big_d takes an SU2Element rather than a rotation matrix so
that a 2*pi turn shows up as (-1)**(2s) for half-integer spin.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import InvalidSpinProjection
from .numerics import (
    TOLERANCE,
    HalfInt,
    SignedSqrtRational,
    factorial,
    parity_sign,
    ssr_to_float,
)
from .su2 import SU2Element, cayley_klein

logger = logging.getLogger(__name__)


def dimension(s: HalfInt) -> int:
    return s.twice + 1


def projections(s: HalfInt) -> list[HalfInt]:
    """Projections m = s, s-1, ..., -s in matrix index order."""
    if s.twice < 0:
        raise InvalidSpinProjection(f"spin {s} is negative")
    return [HalfInt(s.twice - 2 * i) for i in range(s.twice + 1)]


def index_of(s: HalfInt, m: HalfInt) -> int:
    """Matrix index of projection m for spin s."""
    if abs(m.twice) > s.twice or (s.twice - m.twice) % 2:
        raise InvalidSpinProjection(f"projection {m} is not allowed for spin {s}")
    return (s.twice - m.twice) // 2


@dataclass(frozen=True)
class WignerD:
    """A (2s+1)x(2s+1) representation matrix."""

    s: HalfInt
    entries: np.ndarray

    def element(self, m_prime: HalfInt, m: HalfInt) -> complex:
        return complex(self.entries[index_of(self.s, m_prime), index_of(self.s, m)])

    def column(self, m: HalfInt) -> np.ndarray:
        return self.entries[:, index_of(self.s, m)].copy()

    def row(self, m_prime: HalfInt) -> np.ndarray:
        return self.entries[index_of(self.s, m_prime), :].copy()

    def is_unitary(self, tol: float = TOLERANCE) -> bool:
        n = self.entries.shape[0]
        return bool(np.allclose(self.entries.conj().T @ self.entries, np.eye(n), atol=tol, rtol=0))

    def __matmul__(self, other: "WignerD") -> "WignerD":
        return WignerD(self.s, self.entries @ other.entries)


# One term of the Cayley-Klein expansion:
# (row, col, coefficient, power of a, power of conj(a), power of b, power of conj(b))
_Term = tuple[int, int, float, int, int, int, int]


@lru_cache(maxsize=None)
def _big_d_terms(twice_s: int) -> tuple[_Term, ...]:
    """Expansion of D^s in the Cayley-Klein parameters, as exact-then-rounded terms."""
    terms: list[_Term] = []
    for row in range(twice_s + 1):
        jmp = twice_s - row  # j + m'
        jmm_p = row  # j - m'
        for col in range(twice_s + 1):
            jm = twice_s - col  # j + m
            jm_m = col  # j - m
            dm = (jmp - jm)  # m' - m
            numerator = factorial(jm) * factorial(jm_m) * factorial(jmp) * factorial(jmm_p)
            root = math.sqrt(numerator)
            k_min = max(0, -dm)
            k_max = min(jm, jmm_p)
            for k in range(k_min, k_max + 1):
                denominator = (
                    factorial(k) * factorial(jm - k) * factorial(jmm_p - k) * factorial(dm + k)
                )
                coefficient = parity_sign(k) * root / denominator
                terms.append((row, col, coefficient, jm - k, jmm_p - k, dm + k, k))
    logger.debug(f"Built D-matrix expansion for 2s={twice_s}: {len(terms)} terms")
    return tuple(terms)


def big_d(s: HalfInt, g: SU2Element) -> WignerD:
    """D^s(g) for an element of the double cover."""
    if s.twice < 0:
        raise InvalidSpinProjection(f"spin {s} is negative")
    a, b = cayley_klein(g)
    ac, bc = a.conjugate(), b.conjugate()
    n = s.twice + 1
    a_pow = [a**p for p in range(n)]
    ac_pow = [ac**p for p in range(n)]
    b_pow = [b**p for p in range(n)]
    bc_pow = [bc**p for p in range(n)]
    entries = np.zeros((n, n), dtype=complex)
    for row, col, coefficient, pa, pac, pb, pbc in _big_d_terms(s.twice):
        entries[row, col] += coefficient * a_pow[pa] * ac_pow[pac] * b_pow[pb] * bc_pow[pbc]
    return WignerD(s, entries)


@lru_cache(maxsize=None)
def _little_d_terms(twice_s: int) -> tuple[tuple[int, int, float, int, int], ...]:
    terms: list[tuple[int, int, float, int, int]] = []
    for row in range(twice_s + 1):
        jmp, jmm_p = twice_s - row, row
        for col in range(twice_s + 1):
            jm, jm_m = twice_s - col, col
            dm = jmp - jm
            root = math.sqrt(factorial(jm) * factorial(jm_m) * factorial(jmp) * factorial(jmm_p))
            for k in range(max(0, -dm), min(jm, jmm_p) + 1):
                denominator = (
                    factorial(k) * factorial(jm - k) * factorial(jmm_p - k) * factorial(dm + k)
                )
                sign = parity_sign(k + dm)
                cos_power = jm + jmm_p - 2 * k
                sin_power = dm + 2 * k
                terms.append((row, col, sign * root / denominator, cos_power, sin_power))
    return tuple(terms)


def little_d(s: HalfInt, beta: float) -> np.ndarray:
    """Real matrix d^s(beta) = D^s(R_y(beta))."""
    c, sn = math.cos(0.5 * beta), math.sin(0.5 * beta)
    n = s.twice + 1
    out = np.zeros((n, n), dtype=float)
    for row, col, coefficient, cos_power, sin_power in _little_d_terms(s.twice):
        out[row, col] += coefficient * c**cos_power * sn**sin_power
    return out


@dataclass(frozen=True)
class CGValue:
    """An exact Clebsch-Gordan coefficient <j1 m1 j2 m2 | J M>."""

    j1: HalfInt
    j2: HalfInt
    J: HalfInt
    m1: HalfInt
    m2: HalfInt
    M: HalfInt
    value: SignedSqrtRational

    def __float__(self) -> float:
        return ssr_to_float(self.value)


def triangle_ok(j1: HalfInt, j2: HalfInt, j3: HalfInt) -> bool:
    """Triangle rule including the integer-sum condition."""
    if (j1.twice + j2.twice + j3.twice) % 2:
        return False
    return abs(j1.twice - j2.twice) <= j3.twice <= j1.twice + j2.twice


def _projection_ok(j: HalfInt, m: HalfInt) -> bool:
    return abs(m.twice) <= j.twice and (j.twice - m.twice) % 2 == 0


@lru_cache(maxsize=4096)
def _clebsch_gordan(tj1: int, tj2: int, tJ: int, tm1: int, tm2: int, tM: int) -> SignedSqrtRational:
    # All arguments are twice the quantum numbers; every combination below is even.
    def f(twice_value: int) -> int:
        return factorial(twice_value // 2)

    prefactor = Fraction(
        (tJ + 1) * f(tJ + tj1 - tj2) * f(tJ - tj1 + tj2) * f(tj1 + tj2 - tJ),
        f(tj1 + tj2 + tJ + 2),
    )
    prefactor *= (
        f(tJ + tM) * f(tJ - tM) * f(tj1 - tm1) * f(tj1 + tm1) * f(tj2 - tm2) * f(tj2 + tm2)
    )

    k_min = max(0, (tj2 - tJ - tm1) // 2, (tj1 - tJ + tm2) // 2)
    k_max = min((tj1 + tj2 - tJ) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    total = Fraction(0)
    for k in range(k_min, k_max + 1):
        denominator = (
            factorial(k)
            * f(tj1 + tj2 - tJ - 2 * k)
            * f(tj1 - tm1 - 2 * k)
            * f(tj2 + tm2 - 2 * k)
            * f(tJ - tj2 + tm1 + 2 * k)
            * f(tJ - tj1 - tm2 + 2 * k)
        )
        total += Fraction(parity_sign(k), denominator)

    if total == 0:
        return SignedSqrtRational.zero()
    sign = 1 if total > 0 else -1
    return SignedSqrtRational(sign, prefactor * total * total)


def clebsch_gordan(
    j1: HalfInt, j2: HalfInt, J: HalfInt, m1: HalfInt, m2: HalfInt, M: HalfInt
) -> CGValue:
    """Exact Clebsch-Gordan coefficient in the Condon-Shortley convention.

    Returns an exact zero whenever a selection rule fails.
    """
    allowed = (
        m1.twice + m2.twice == M.twice
        and triangle_ok(j1, j2, J)
        and _projection_ok(j1, m1)
        and _projection_ok(j2, m2)
        and _projection_ok(J, M)
    )
    if not allowed:
        value = SignedSqrtRational.zero()
    else:
        value = _clebsch_gordan(j1.twice, j2.twice, J.twice, m1.twice, m2.twice, M.twice)
    return CGValue(j1, j2, J, m1, m2, M, value)


def cg_float(
    j1: HalfInt, j2: HalfInt, J: HalfInt, m1: HalfInt, m2: HalfInt, M: HalfInt
) -> float:
    return float(clebsch_gordan(j1, j2, J, m1, m2, M))


def cg_exchange_sign(s: HalfInt, S: HalfInt) -> int:
    """Sign (-1)**(S - 2s) relating C^{ssS}_{m2 m1 M} to C^{ssS}_{m1 m2 M}."""
    return parity_sign((S.twice - 2 * s.twice) // 2)


def cg_table(j1: HalfInt, j2: HalfInt) -> Iterator[CGValue]:
    """Every nonzero coefficient coupling j1 and j2, ordered by J, M, m1."""
    for tJ in range(abs(j1.twice - j2.twice), j1.twice + j2.twice + 1, 2):
        J = HalfInt(tJ)
        for M in projections(J):
            for m1 in projections(j1):
                m2 = M - m1
                if not _projection_ok(j2, m2):
                    continue
                cg = clebsch_gordan(j1, j2, J, m1, m2, M)
                if not cg.value.is_zero():
                    yield cg


def cg_column_norm(j1: HalfInt, j2: HalfInt, J: HalfInt, M: HalfInt) -> Fraction:
    """Exact sum of squared coefficients over (m1, m2) for fixed J, M."""
    total = Fraction(0)
    for m1 in projections(j1):
        m2 = M - m1
        if _projection_ok(j2, m2):
            total += clebsch_gordan(j1, j2, J, m1, m2, M).value.squared()
    return total
