"""Coupled two-particle states and the exclusion rules they imply.

Total-spin states are Clebsch-Gordan sums of ordered canonical pairs.
Centre-of-mass helicity states follow the Jacob-Wick construction, where
the second particle's frame is reached from its own helicity frame by a
fixed half-turn, and are projected onto definite J on a quadrature grid.
An L-S state is a double Clebsch-Gordan sum of those partial waves.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    GridTooCoarse,
    InvalidSpinProjection,
    OracleDisagreement,
    SpinMismatch,
    TriangleViolation,
)
from .geometry import rotate_about
from .numerics import HalfInt, minus_one_power, parity_sign
from .states import BaseFrame, LabelKey, ParticleDesc, extended_angle_lift, polar_angles
from .su2 import SU2Element, Vec3, compose, from_euler_zyz, inverse, rotation_y, rotation_z
from .twoparticle import (
    OrderedPairDesc,
    PairState,
    direction_from_angles,
    identical_limit,
    ordered_pair_canonical,
    pair_from_descriptions,
)
from .wigner import big_d, cg_float, clebsch_gordan, projections, triangle_ok

logger = logging.getLogger(__name__)

FORBIDDEN_RATIO = 1e-6

JW_CONVENTIONS = ("yz", "y")

# (first helicity, second helicity, reordered)
PartialWaveKey = tuple[HalfInt, HalfInt, bool]


def jw_rotation(convention: str = "yz") -> SU2Element:
    """Half-turn taking the second particle's own helicity frame onto the first one's.

    R_y(pi) R_z(-pi), or R_y(pi) alone for convention "y".
    """
    if convention == "yz":
        return compose(rotation_y(math.pi), rotation_z(-math.pi))
    if convention == "y":
        return rotation_y(math.pi)
    raise ValueError(f"unknown convention {convention!r}; expected one of {JW_CONVENTIONS}")


# Total spin


@dataclass(frozen=True)
class CoupledSpinState:
    """sum_{m_a m_b} C^{ssS}_{m_a m_b M} |(a, m_a)^1; (b, m_b)^2>."""

    S: HalfInt
    M: HalfInt
    base: OrderedPairDesc
    state: PairState
    exchanged: PairState

    def identical_state(self) -> PairState:
        return identical_limit(self.state, self.exchanged)

    def identical_norm(self) -> float:
        return self.identical_state().norm()


def couple_spins(o: OrderedPairDesc, S: HalfInt, M: HalfInt) -> CoupledSpinState:
    """Couple two equal spins to total S, M using the ordered canonical builder."""
    s = o.first.s
    if o.second.s != s:
        raise SpinMismatch(f"couple_spins needs equal spins, got {s} and {o.second.s}")
    if not triangle_ok(s, s, S):
        raise TriangleViolation(f"S={S} cannot be built from two spin-{s} particles")
    if abs(M.twice) > S.twice or (S.twice - M.twice) % 2:
        raise InvalidSpinProjection(f"M={M} is not allowed for S={S}")

    state: PairState | None = None
    exchanged: PairState | None = None
    for m_a in projections(s):
        m_b = M - m_a
        if abs(m_b.twice) > s.twice:
            continue
        c = cg_float(s, s, S, m_a, m_b, M)
        if c == 0.0:
            continue
        direct = OrderedPairDesc(
            o.first.with_projection(m_a), o.second.with_projection(m_b), o.r12_sign, o.seed
        )
        # particle b first, carrying the projection a had
        reordered = OrderedPairDesc(
            o.second.with_projection(m_a), o.first.with_projection(m_b), o.r12_sign,
            None if o.seed is None else -o.seed,
        )
        term = ordered_pair_canonical(direct).scaled(c)
        term_x = ordered_pair_canonical(reordered).scaled(c)
        state = term if state is None else state.plus(term)
        exchanged = term_x if exchanged is None else exchanged.plus(term_x)

    assert state is not None and exchanged is not None
    return CoupledSpinState(S, M, o, state, exchanged)


def even_s_table(
    s: HalfInt,
    eps: float = 1e-3,
    *,
    ratio: float = FORBIDDEN_RATIO,
    r12_sign: int = 1,
) -> list[tuple[HalfInt, bool, float]]:
    """(S, allowed, identical-limit norm squared) for S = 0 .. 2s."""
    p_a = Vec3(0.0, 0.0, 1.0)
    p_b = rotate_about(p_a, Vec3(1.0, 0.0, 0.0), eps)
    base = OrderedPairDesc(
        ParticleDesc("q", p_a, 1.0, s, s), ParticleDesc("q", p_b, 1.0, s, s), r12_sign
    )
    norms: list[tuple[HalfInt, float]] = []
    for twice_S in range(0, 2 * s.twice + 1, 2):
        S = HalfInt(twice_S)
        coupled = couple_spins(base, S, HalfInt(0))
        norms.append((S, coupled.identical_norm() ** 2))
    largest = max(n for _, n in norms)
    table = [(S, n >= ratio * largest, n) for S, n in norms]
    logger.debug(f"even-S table for s={s}: {[(str(S), ok) for S, ok, _ in table]}")
    return table


# Centre-of-mass plane waves


def cm_helicity_lifts(p_dir: Vec3) -> tuple[SU2Element, SU2Element]:
    """Independent helicity-frame lifts for particle a at p and b at -p.

    The pair is the same for both plane-wave conventions; a convention only
    changes the second particle's r_bs.
    """
    lift_a = extended_angle_lift(*polar_angles(p_dir))
    lift_b = compose(lift_a, inverse(jw_rotation("yz")))
    return lift_a, lift_b


def jw_plane_wave(
    q_a: str,
    q_b: str,
    s_a: HalfInt,
    lam_a: HalfInt,
    s_b: HalfInt,
    lam_b: HalfInt,
    p_dir: Vec3,
    *,
    p_mag: float = 1.0,
    convention: str = "yz",
    lifts: tuple[SU2Element, SU2Element] | None = None,
) -> PairState:
    """Ordered CM helicity state with particle a first at p and b at -p."""
    lift_a, lift_b = lifts if lifts is not None else cm_helicity_lifts(p_dir)
    a = ParticleDesc(
        q_a, p_dir, p_mag, s_a, lam_a, BaseFrame.HELICITY, SU2Element.identity(), lift_a
    )
    b = ParticleDesc(q_b, -p_dir, p_mag, s_b, -lam_b, BaseFrame.HELICITY,
                     jw_rotation(convention), lift_b)
    return pair_from_descriptions(a, b)


def cm_helicity_pair(
    q_a: str,
    q_b: str,
    s_a: HalfInt,
    lam_a: HalfInt,
    s_b: HalfInt,
    lam_b: HalfInt,
    p_dir: Vec3,
    *,
    p_mag: float = 1.0,
    lifts: tuple[SU2Element, SU2Element] | None = None,
) -> PairState:
    """Symmetric helicity pair, each particle quantized in its own frame."""
    lift_a, lift_b = lifts if lifts is not None else cm_helicity_lifts(p_dir)
    a = ParticleDesc(
        q_a, p_dir, p_mag, s_a, lam_a, BaseFrame.HELICITY, SU2Element.identity(), lift_a
    )
    b = ParticleDesc(
        q_b, -p_dir, p_mag, s_b, lam_b, BaseFrame.HELICITY, SU2Element.identity(), lift_b
    )
    return pair_from_descriptions(a, b)


def jw_reordered(
    q_a: str,
    q_b: str,
    s_a: HalfInt,
    lam_a: HalfInt,
    s_b: HalfInt,
    lam_b: HalfInt,
    p_dir: Vec3,
    *,
    p_mag: float = 1.0,
    convention: str = "yz",
    lifts: tuple[SU2Element, SU2Element] | None = None,
) -> PairState:
    """The same pair with b first at -p; both keep their own helicity frames."""
    lift_a, lift_b = lifts if lifts is not None else cm_helicity_lifts(p_dir)
    return jw_plane_wave(
        q_b, q_a, s_b, lam_b, s_a, lam_a, -p_dir,
        p_mag=p_mag, convention=convention, lifts=(lift_b, lift_a),
    )


def jw_relation_factor(s_b: HalfInt, lam_b: HalfInt, convention: str = "yz") -> complex:
    """Factor between the ordered CM state and the symmetric helicity pair."""
    if convention == "yz":
        return minus_one_power(s_b)
    return complex(parity_sign((s_b.twice + lam_b.twice) // 2))


def jw_reorder_factor(
    s_a: HalfInt, lam_a: HalfInt, s_b: HalfInt, lam_b: HalfInt, convention: str = "yz"
) -> complex:
    """State(b first) / State(a first) for the CM plane wave."""
    return jw_relation_factor(s_a, lam_a, convention) / jw_relation_factor(s_b, lam_b, convention)


def d_exchange_identity(
    J: HalfInt, M: HalfInt, lam_a: HalfInt, lam_b: HalfInt, g: SU2Element
) -> tuple[complex, complex]:
    """Both sides of D*^J_{M, lb-la}(g R_y(pi) R_z(-pi)) = (-1)^J D*^J_{M, la-lb}(g).

    (-1)^J is exp(-i pi J), which is the usual sign for integer J.
    """
    lhs = big_d(J, compose(g, jw_rotation("yz"))).element(M, lam_b - lam_a).conjugate()
    rhs = minus_one_power(J).conjugate() * big_d(J, g).element(M, lam_a - lam_b).conjugate()
    return lhs, rhs


# Partial waves


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Legendre nodes in cos(theta) times a uniform grid in phi."""

    n_theta: int
    n_phi: int

    @classmethod
    def for_rank(cls, J: HalfInt, refine: int = 1) -> "QuadratureGrid":
        return cls((J.twice + 4) * refine, (2 * J.twice + 8) * refine)

    def require(self, J: HalfInt) -> None:
        if self.n_theta < J.twice + 2 or self.n_phi < 2 * (J.twice + 1):
            raise GridTooCoarse(
                f"grid {self.n_theta}x{self.n_phi} is too coarse for J={J}; "
                f"need at least {J.twice + 2}x{2 * (J.twice + 1)}"
            )

    def node_angles(self) -> list[tuple[float, float, float]]:
        """(theta, phi, weight) for every node, theta-major."""
        return list(_node_angles(self.n_theta, self.n_phi))

    def __len__(self) -> int:
        return self.n_theta * self.n_phi


@lru_cache(maxsize=64)
def _node_angles(n_theta: int, n_phi: int) -> tuple[tuple[float, float, float], ...]:
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    dphi = 2.0 * np.pi / n_phi
    return tuple(
        (float(t), float(p), float(wt * dphi)) for t, wt in zip(theta, w) for p in phi
    )


@dataclass(frozen=True)
class PartialWaveState:
    """Node-by-node spin tensors of a state of definite J and M."""

    J: HalfInt
    M: HalfInt
    lam_a: HalfInt
    lam_b: HalfInt
    grid: QuadratureGrid
    weights: np.ndarray
    tensors: np.ndarray
    reordered: bool = False
    labels: tuple[tuple[LabelKey, ...], ...] = field(default=(), compare=False)

    def _check(self, other: "PartialWaveState") -> None:
        if self.grid != other.grid or self.tensors.shape != other.tensors.shape:
            raise ValueError("partial waves live on different grids")

    def inner(self, other: "PartialWaveState") -> complex:
        self._check(other)
        per_node = np.einsum("nij,nij->n", self.tensors.conj(), other.tensors)
        return complex(np.sum(self.weights * per_node))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def scaled(self, factor: complex) -> "PartialWaveState":
        return PartialWaveState(
            self.J, self.M, self.lam_a, self.lam_b, self.grid, self.weights,
            factor * self.tensors, self.reordered, self.labels,
        )

    def plus(self, other: "PartialWaveState") -> "PartialWaveState":
        self._check(other)
        return PartialWaveState(
            self.J, self.M, self.lam_a, self.lam_b, self.grid, self.weights,
            self.tensors + other.tensors, self.reordered, self.labels,
        )


def _pw_normalization(J: HalfInt) -> float:
    return math.sqrt((J.twice + 1) / (4.0 * math.pi))


def partial_wave_project(
    J: HalfInt,
    M: HalfInt,
    lam_a: HalfInt,
    lam_b: HalfInt,
    grid: QuadratureGrid | None = None,
    *,
    s_a: HalfInt,
    s_b: HalfInt,
    q_a: str = "a",
    q_b: str = "b",
    p_mag: float = 1.0,
    reorder: bool = False,
    convention: str = "yz",
) -> PartialWaveState:
    """N_J * integral dOmega D*^J_{M, l1-l2}(R(p1 -> z)) |p1: 1; 2> on a grid.

    With reorder=True particle b is first. Its momentum -p has
    R(-p -> z) = R(p -> z) * R_ba, which is the Euler rotation at the
    extended angles (pi - theta, phi + pi).
    """
    grid = grid if grid is not None else QuadratureGrid.for_rank(J)
    grid.require(J)
    norm_j = _pw_normalization(J)
    r_ba = jw_rotation(convention)

    weights, tensors, labels = [], [], []
    for theta, phi, weight in grid.node_angles():
        p = direction_from_angles(theta, phi)
        to_z = from_euler_zyz(-phi, -theta, 0.0)
        lifts = cm_helicity_lifts(p)
        if reorder:
            d = big_d(J, compose(to_z, r_ba)).element(M, lam_b - lam_a)
            state = jw_reordered(
                q_a, q_b, s_a, lam_a, s_b, lam_b, p,
                p_mag=p_mag, convention=convention, lifts=lifts,
            )
        else:
            d = big_d(J, to_z).element(M, lam_a - lam_b)
            state = jw_plane_wave(
                q_a, q_b, s_a, lam_a, s_b, lam_b, p,
                p_mag=p_mag, convention=convention, lifts=lifts,
            )
        weights.append(weight)
        tensors.append(norm_j * d.conjugate() * state.tensor)
        labels.append(state.labels)

    logger.debug(f"Projected J={J} M={M} ({lam_a},{lam_b}) on {len(grid)} nodes, reorder={reorder}")
    return PartialWaveState(
        J, M, lam_a, lam_b, grid, np.asarray(weights), np.asarray(tensors), reorder,
        tuple(labels),
    )


def partial_wave_reorder_factor(
    J: HalfInt,
    s_a: HalfInt,
    s_b: HalfInt,
    lam_a: HalfInt | None = None,
    lam_b: HalfInt | None = None,
    convention: str = "yz",
) -> int:
    """Partial wave with b first over partial wave with a first.

    (-1)^(s_a - s_b - J) for convention "yz", equal to (-1)^(J + s_a - s_b)
    when J is an integer. Convention "y" gives (-1)^(J + s_a - s_b + 2(lam_a - lam_b)).
    """
    if convention == "y":
        if lam_a is None or lam_b is None:
            raise ValueError("convention 'y' needs both helicities")
        exponent = J.twice + s_a.twice - s_b.twice + 2 * (lam_a.twice - lam_b.twice)
    else:
        exponent = s_a.twice - s_b.twice - J.twice
    return parity_sign(exponent // 2)


# L-S coupling


@dataclass(frozen=True)
class LSState:
    """Helicity amplitudes u(lam_a, lam_b) of a state of definite L and S."""

    J: HalfInt
    M: HalfInt
    L: HalfInt
    S: HalfInt
    s_a: HalfInt
    s_b: HalfInt
    amplitudes: dict[tuple[HalfInt, HalfInt], float]

    def norm_sq(self) -> float:
        return sum(u * u for u in self.amplitudes.values())


def ls_state(
    J: HalfInt, M: HalfInt, L: HalfInt, S: HalfInt, s_a: HalfInt, s_b: HalfInt
) -> LSState:
    """u = sqrt((2J+1)/(2L+1)) C^{LSJ}_{0 lam lam} C^{s_a s_b S}_{lam_a, -lam_b, lam}."""
    if not L.is_integer:
        raise TriangleViolation(f"orbital L={L} must be an integer")
    if not triangle_ok(L, S, J):
        raise TriangleViolation(f"(L, S, J)=({L}, {S}, {J}) fails the triangle rule")
    if not triangle_ok(s_a, s_b, S):
        raise TriangleViolation(f"(s_a, s_b, S)=({s_a}, {s_b}, {S}) fails the triangle rule")
    if abs(M.twice) > J.twice or (J.twice - M.twice) % 2:
        raise InvalidSpinProjection(f"M={M} is not allowed for J={J}")

    prefactor = math.sqrt((J.twice + 1) / (L.twice + 1))
    zero = HalfInt(0)
    amplitudes: dict[tuple[HalfInt, HalfInt], float] = {}
    for lam_a in projections(s_a):
        for lam_b in projections(s_b):
            lam = lam_a - lam_b
            c_orbital = clebsch_gordan(L, S, J, zero, lam, lam)
            c_spin = clebsch_gordan(s_a, s_b, S, lam_a, -lam_b, lam)
            if c_orbital.value.is_zero() or c_spin.value.is_zero():
                continue
            amplitudes[(lam_a, lam_b)] = prefactor * float(c_orbital) * float(c_spin)
    return LSState(J, M, L, S, s_a, s_b, amplitudes)


def ls_grid_state(
    ls: LSState,
    grid: QuadratureGrid | None = None,
    *,
    reorder: bool = False,
    convention: str = "yz",
    cache: dict[PartialWaveKey, PartialWaveState] | None = None,
) -> PartialWaveState:
    """Expand an L-S state over partial waves.

    With reorder=True the expansion is written with particle b first, so b
    carries the first helicity of every amplitude.
    """
    grid = grid if grid is not None else QuadratureGrid.for_rank(ls.J)
    cache = cache if cache is not None else {}
    total: PartialWaveState | None = None
    for (lam_1, lam_2), u in ls.amplitudes.items():
        if reorder:
            key = (lam_2, lam_1, True)
        else:
            key = (lam_1, lam_2, False)
        if key not in cache:
            cache[key] = partial_wave_project(
                ls.J, ls.M, key[0], key[1], grid,
                s_a=ls.s_a, s_b=ls.s_b, q_a="q", q_b="q", reorder=reorder,
                convention=convention,
            )
        term = cache[key].scaled(u)
        total = term if total is None else total.plus(term)
    if total is None:
        raise TriangleViolation(f"L-S state J={ls.J} L={ls.L} S={ls.S} has no amplitudes")
    return total


@dataclass(frozen=True)
class LSRow:
    J: HalfInt
    L: HalfInt
    S: HalfInt
    allowed: bool
    norm_sq: float


def ls_exchange_sign(J: HalfInt, L: HalfInt, S: HalfInt, s: HalfInt) -> int:
    """Sign picked up by an L-S state of two identical spin-s particles under reordering.

    Combines the Clebsch-Gordan symmetry (-1)^(J-L-S) of the orbital
    coefficient with the partial-wave factor (-1)^J.
    """
    cg_sign = parity_sign((J.twice - L.twice - S.twice) // 2)
    return cg_sign * partial_wave_reorder_factor(J, s, s)


def ls_exclusion_check(
    s: HalfInt,
    J_max: int,
    *,
    refine: int = 1,
    convention: str = "yz",
    ratio: float = FORBIDDEN_RATIO,
) -> list[LSRow]:
    """Which (J, L, S) survive for two identical spin-s particles.

    Every row is decided twice: by the exchange sign and by the norm of the
    identical-particle state on the grid. A disagreement raises.
    """
    zero = HalfInt(0)
    rows: list[tuple[HalfInt, HalfInt, HalfInt, bool, float]] = []
    for j in range(0, J_max + 1):
        J = HalfInt(2 * j)
        grid = QuadratureGrid.for_rank(J, refine)
        forward: dict[PartialWaveKey, PartialWaveState] = {}
        backward: dict[PartialWaveKey, PartialWaveState] = {}
        for twice_S in range(0, 2 * s.twice + 1, 2):
            S = HalfInt(twice_S)
            for twice_L in range(abs(J.twice - S.twice), J.twice + S.twice + 1, 2):
                L = HalfInt(twice_L)
                ls = ls_state(J, zero, L, S, s, s)
                state = ls_grid_state(ls, grid, convention=convention, cache=forward)
                reordered = ls_grid_state(
                    ls, grid, reorder=True, convention=convention, cache=backward
                )
                physical = state.plus(reordered).scaled(0.5)
                algebraic = ls_exchange_sign(J, L, S, s) == 1
                rows.append((J, L, S, algebraic, physical.inner(physical).real))

    largest = max(r[4] for r in rows)
    table = []
    for J, L, S, algebraic, norm_sq in rows:
        numeric = norm_sq >= ratio * largest
        if numeric != algebraic:
            raise OracleDisagreement(
                f"J={J} L={L} S={S}: algebraic says {'allowed' if algebraic else 'forbidden'}, "
                f"grid norm^2 {norm_sq:.3e} (max {largest:.3e})"
            )
        table.append(LSRow(J, L, S, algebraic, norm_sq))
    logger.info(f"L-S exclusion table for s={s}, J<={J_max}: {len(table)} rows agree")
    return table
