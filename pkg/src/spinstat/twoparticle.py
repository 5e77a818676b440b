"""Two-particle states: order-free multisets, symmetrized pairs, ordered builders.

A PairState lives in the symmetric square of a mode space made of one
(2s+1)-dimensional block per distinct single-particle label. Each particle's
ket is first expressed in the common canonical basis, so two descriptions
built from different base frames can still be added and compared.
"""

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import FrameMismatch, LabelMismatch, NotProportional
from .geometry import FrameKind, FramePair, bisecting_frames, parallel_frames, rotate_about
from .numerics import TOLERANCE, HalfInt, halfint_phase
from .states import (
    BaseFrame,
    LabelKey,
    ParticleDesc,
    extended_angle_lift,
    ket_in_canonical,
    polar_angles,
)
from .su2 import SU2Element, Vec3, compose, from_axis_angle, inverse

logger = logging.getLogger(__name__)

ALPHA = 1.0 / math.sqrt(2.0)


# Multisets


def multiset_count(n_entities: int, n_states: int) -> int:
    """Number of ways to put n identical entities into n_states states."""
    if n_entities < 0 or n_states < 0:
        raise ValueError("counts must be non-negative")
    if n_states == 0:
        return 1 if n_entities == 0 else 0
    return math.comb(n_entities + n_states - 1, n_entities)


@dataclass(frozen=True)
class MultisetState:
    """Population numbers of an order-free description."""

    entries: tuple[tuple[Hashable, int], ...]

    def total(self) -> int:
        return sum(count for _, count in self.entries)

    def as_dict(self) -> dict[Hashable, int]:
        return dict(self.entries)


def canonicalize_multiset(keys: Iterable[Hashable]) -> MultisetState:
    """Order-free representative: sorted (key, count) pairs."""
    counts = Counter(keys)
    return MultisetState(tuple(sorted(counts.items(), key=lambda item: repr(item[0]))))


def enumerate_multisets(states: Sequence[Hashable], n_entities: int) -> list[MultisetState]:
    """Every distinct multiset of size n over the given states."""
    seen = {
        canonicalize_multiset(combo)
        for combo in itertools.product(states, repeat=n_entities)
    }
    return sorted(seen, key=lambda m: repr(m.entries))


# Pair states


@dataclass(frozen=True)
class PairState:
    """Symmetric tensor over the mode space of a pair.

    labels lists the distinct single-particle labels in sorted order and
    dims the block size of each.
    """

    labels: tuple[LabelKey, ...]
    dims: tuple[int, ...]
    tensor: np.ndarray
    descriptions: tuple[ParticleDesc, ...] = field(default=(), compare=False)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate((0,) + self.dims[:-1]))

    def block(self, i: int, j: int) -> np.ndarray:
        oi, oj = self.offsets[i], self.offsets[j]
        return self.tensor[oi : oi + self.dims[i], oj : oj + self.dims[j]]

    def _check(self, other: "PairState") -> None:
        if self.labels != other.labels:
            raise LabelMismatch(f"mode spaces differ: {self.labels} vs {other.labels}")

    def inner(self, other: "PairState") -> complex:
        self._check(other)
        return complex(np.vdot(self.tensor, other.tensor))

    def norm_sq(self) -> float:
        return float(np.vdot(self.tensor, self.tensor).real)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def scaled(self, factor: complex) -> "PairState":
        return PairState(self.labels, self.dims, factor * self.tensor, self.descriptions)

    def plus(self, other: "PairState") -> "PairState":
        self._check(other)
        return PairState(self.labels, self.dims, self.tensor + other.tensor, self.descriptions)

    def is_close(self, other: "PairState", tol: float = TOLERANCE) -> bool:
        self._check(other)
        return bool(np.allclose(self.tensor, other.tensor, atol=tol, rtol=0))

    @classmethod
    def zero_like(cls, state: "PairState") -> "PairState":
        return cls(state.labels, state.dims, np.zeros_like(state.tensor))


def _embed(d: ParticleDesc, labels: tuple[LabelKey, ...], dims: tuple[int, ...]) -> np.ndarray:
    vector = np.zeros(sum(dims), dtype=complex)
    i = labels.index(d.label_key())
    offset = sum(dims[:i])
    vector[offset : offset + dims[i]] = ket_in_canonical(d).amps
    return vector


def pair_from_descriptions(d_a: ParticleDesc, d_b: ParticleDesc) -> PairState:
    """alpha * (v_a (x) v_b + v_b (x) v_a) in the pair's mode space."""
    spins = {d_a.label_key(): d_a.s.twice + 1, d_b.label_key(): d_b.s.twice + 1}
    labels = tuple(sorted(spins, key=repr))
    dims = tuple(spins[key] for key in labels)
    v_a = _embed(d_a, labels, dims)
    v_b = _embed(d_b, labels, dims)
    tensor = ALPHA * (np.outer(v_a, v_b) + np.outer(v_b, v_a))
    return PairState(labels, dims, tensor, (d_a, d_b))


def symmetrized_pair(d_a: ParticleDesc, d_b: ParticleDesc) -> PairState:
    """Permutation-symmetric pair state of two complete descriptions.

    Swapping the arguments gives a bit-identical tensor.
    """
    if d_a.base.is_pair_dependent or d_b.base.is_pair_dependent:
        if d_a.frames is None or d_b.frames is None:
            raise FrameMismatch("pair-dependent base frames need their FramePair")
        if not d_a.frames.same_geometry(d_b.frames):
            raise FrameMismatch("descriptions come from different frame pairs")
    return pair_from_descriptions(d_a, d_b)


def identical_limit(state: PairState, exchanged: PairState) -> PairState:
    """The state both orderings must agree on once the particles are identical."""
    return state.plus(exchanged).scaled(0.5)


# Ordered builders


class Builder(Enum):
    """How a two-particle state is assembled."""

    CANONICAL = "canonical"
    HELICITY = "helicity"
    SYMMETRIZED = "symmetrized"


@dataclass(frozen=True)
class OrderedPairDesc:
    """Two descriptions with an explicit order and the sign of R_12 = R_k(+-pi)."""

    first: ParticleDesc
    second: ParticleDesc
    r12_sign: int = 1
    seed: Vec3 | None = None
    kind: FrameKind = FrameKind.PARALLEL

    def __post_init__(self) -> None:
        if self.r12_sign not in (1, -1):
            raise ValueError(f"r12_sign must be +1 or -1, got {self.r12_sign}")

    def swapped(self) -> "OrderedPairDesc":
        # the seed is y of the first particle, and y_second = -y_first
        seed = None if self.seed is None else -self.seed
        return OrderedPairDesc(self.second, self.first, self.r12_sign, seed, self.kind)

    def frames(self) -> FramePair:
        build = parallel_frames if self.kind is FrameKind.PARALLEL else bisecting_frames
        return build(self.first.p_dir, self.second.p_dir, seed=self.seed)

    def ordering_rotation(self, pair: FramePair) -> SU2Element:
        """R_k(r12_sign * pi) about the unsigned bisector."""
        return from_axis_angle(pair.bisector, self.r12_sign * math.pi)


def ordered_pair_canonical(o: OrderedPairDesc) -> PairState:
    """Helicity base frames, common canonical quantization frame.

    The first particle's rotation undoes its helicity-frame lift; the second
    particle's rotation is the first one followed by R_21.
    """
    pair = o.frames()
    base = BaseFrame.HELICITY if pair.kind is FrameKind.PARALLEL else BaseFrame.BISECTING
    r_21 = o.ordering_rotation(pair)
    r_first = inverse(pair.lift_a)
    first = ParticleDesc(
        o.first.q, o.first.p_dir, o.first.p_mag, o.first.s, o.first.m,
        base, r_first, pair.lift_a, pair,
    )
    second = ParticleDesc(
        o.second.q, o.second.p_dir, o.second.p_mag, o.second.s, o.second.m,
        base, compose(r_first, r_21), pair.lift_b, pair,
    )
    return pair_from_descriptions(first, second)


def symmetric_helicity_lifts(pair: FramePair) -> tuple[SU2Element, SU2Element]:
    """Canonical-to-helicity lifts of both particles that satisfy R_b = r_ab * R_a.

    The lead particle takes the normal-range Euler lift; the other is
    derived from it.
    """
    if pair.lead_is_a:
        lead = extended_angle_lift(*polar_angles(pair.v_a))
        return lead, compose(pair.r_ab, lead)
    lead = extended_angle_lift(*polar_angles(pair.v_b))
    return compose(pair.r_ba, lead), lead


def ordered_pair_helicity(o: OrderedPairDesc) -> PairState:
    """Common canonical base frame, helicity quantization frames.

    The second particle's frame is R_12 applied to the first particle's.
    """
    pair = parallel_frames(o.first.p_dir, o.second.p_dir, seed=o.seed)
    r_12 = o.ordering_rotation(pair)
    lift_first, _ = symmetric_helicity_lifts(pair)
    first = ParticleDesc(
        o.first.q, o.first.p_dir, o.first.p_mag, o.first.s, o.first.m,
        BaseFrame.CANONICAL, lift_first,
    )
    second = ParticleDesc(
        o.second.q, o.second.p_dir, o.second.p_mag, o.second.s, o.second.m,
        BaseFrame.CANONICAL, compose(r_12, lift_first),
    )
    return pair_from_descriptions(first, second)


def independent_helicity_pair(o: OrderedPairDesc) -> PairState:
    """Symmetrized pair with each particle quantized along its own momentum."""
    pair = parallel_frames(o.first.p_dir, o.second.p_dir, seed=o.seed)
    first = ParticleDesc(
        o.first.q, o.first.p_dir, o.first.p_mag, o.first.s, o.first.m,
        BaseFrame.HELICITY, SU2Element.identity(), pair.lift_a, pair,
    )
    second = ParticleDesc(
        o.second.q, o.second.p_dir, o.second.p_mag, o.second.s, o.second.m,
        BaseFrame.HELICITY, SU2Element.identity(), pair.lift_b, pair,
    )
    return symmetrized_pair(first, second)


_BUILDERS = {
    Builder.CANONICAL: ordered_pair_canonical,
    Builder.HELICITY: ordered_pair_helicity,
    Builder.SYMMETRIZED: independent_helicity_pair,
}


def build_pair(builder: Builder, o: OrderedPairDesc) -> PairState:
    return _BUILDERS[Builder(builder)](o)


def fit_phase(state: PairState, other: PairState, tol: float = TOLERANCE) -> complex:
    """The scalar c with other = c * state, checked against the residual."""
    norm_sq = state.norm_sq()
    if norm_sq == 0.0:
        raise NotProportional("reference state is zero", residual=float("inf"))
    c = state.inner(other) / norm_sq
    residual = float(np.linalg.norm(other.tensor - c * state.tensor))
    if residual > tol * math.sqrt(norm_sq):
        raise NotProportional(
            f"states are not proportional: residual {residual:.3e}", residual=residual
        )
    if residual > 0.1 * tol * math.sqrt(norm_sq):
        logger.warning(f"Phase fit residual {residual:.3e} is close to the tolerance")
    return c


def exchange_phase(builder: Builder, o: OrderedPairDesc, tol: float = TOLERANCE) -> complex:
    """c with State(b first) = c * State(a first)."""
    builder = Builder(builder)
    state = build_pair(builder, o)
    exchanged = build_pair(builder, o.swapped())
    c = fit_phase(state, exchanged, tol)
    logger.debug(f"{builder.value} exchange phase: {c:.12g}")
    return c


def predicted_exchange_phase(builder: Builder, o: OrderedPairDesc) -> int:
    """Phase expected from the relation between the ordering rotation and r_ab."""
    builder = Builder(builder)
    if builder is Builder.SYMMETRIZED:
        return 1
    pair = parallel_frames(o.first.p_dir, o.second.p_dir, seed=o.seed)
    ordering = o.ordering_rotation(pair)
    relating = pair.r_ab if builder is Builder.HELICITY else pair.r_ba
    if relating.is_close(ordering):
        return halfint_phase(o.first.s)
    return halfint_phase(o.second.s)


def first_spin_sign(builder: Builder, first_dir: Vec3, second_dir: Vec3,
                    seed: Vec3 | None = None) -> int:
    """r12_sign for which exchange gives (-1)**(2 s_first)."""
    pair = parallel_frames(first_dir, second_dir, seed=seed)
    lead_sign = 1 if pair.lead_is_a else -1
    return lead_sign if Builder(builder) is Builder.HELICITY else -lead_sign


# Limits


def mode_vector(d: ParticleDesc) -> np.ndarray:
    """Momentum direction (x) canonical spin ket of one particle.

    Two such vectors overlap by cos(angle between momenta) times the spin
    overlap, so they merge continuously as the momenta meet.
    """
    return np.kron(d.p_dir.as_array(), ket_in_canonical(d).amps)


def slot_ordered_tensor(state: PairState) -> np.ndarray:
    """mode(first) (x) mode(second) for a state built by an ordered builder."""
    if len(state.descriptions) != 2:
        raise ValueError("state does not carry its two descriptions")
    first, second = state.descriptions
    return np.outer(mode_vector(first), mode_vector(second))


def pauli_norm(
    builder: Builder,
    q: str,
    p_dir_a: Vec3,
    p_dir_b: Vec3,
    s: HalfInt,
    m: HalfInt,
    epsilon_sequence: Sequence[float],
    *,
    p_mag: float = 1.0,
    r12_sign: int = 1,
) -> list[float]:
    """Norms of the identical-particle state as p_b approaches p_a.

    At each epsilon, p_b is p_a turned by epsilon towards p_dir_b. Both
    orderings are evaluated as slot-ordered tensors and averaged. For
    identical fermions the average is the antisymmetric part, whose norm
    falls linearly in epsilon; for bosons it tends to 1.
    """
    axis = p_dir_a.cross(p_dir_b)
    if axis.norm() < 1e-8:
        raise ValueError("p_dir_b must not be collinear with p_dir_a")
    axis = axis.normalized()
    norms = []
    for eps in epsilon_sequence:
        p_b = rotate_about(p_dir_a, axis, eps)
        a = ParticleDesc(q, p_dir_a, p_mag, s, m)
        b = ParticleDesc(q, p_b, p_mag, s, m)
        o = OrderedPairDesc(a, b, r12_sign)
        forward = slot_ordered_tensor(build_pair(builder, o))
        backward = slot_ordered_tensor(build_pair(builder, o.swapped()))
        norm = float(np.linalg.norm(0.5 * (forward + backward)))
        logger.debug(f"pauli_norm eps={eps:g}: {norm:.3e}")
        norms.append(norm)
    return norms


def extrapolate_to_zero(eps: Sequence[float], values: Sequence[float]) -> float:
    """Straight line through the last two samples, evaluated at zero."""
    if len(eps) != len(values) or len(eps) == 0:
        raise ValueError("need matching, non-empty sequences")
    if len(eps) == 1:
        return float(values[0])
    e1, e2 = eps[-2], eps[-1]
    v1, v2 = values[-2], values[-1]
    slope = (v2 - v1) / (e2 - e1)
    return float(v2 - slope * e2)


# Coordinate-space version with extended angles


def direction_from_angles(theta: float, phi: float) -> Vec3:
    return Vec3(math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))


def quick_exchange_phase(
    s_a: HalfInt,
    m_a: HalfInt,
    s_b: HalfInt,
    m_b: HalfInt,
    theta: float,
    phi: float,
    hold: str = "second",
) -> complex:
    """Exchange phase of a product of extended-angle spin factors.

    The second particle sits at phi + pi. With hold="second" its angle is kept
    and the first particle moves to phi + 2*pi; with hold="first" the first
    angle is kept and the second drops to phi - pi.
    """
    if hold not in ("first", "second"):
        raise ValueError(f"hold must be 'first' or 'second', got {hold!r}")
    where_a = direction_from_angles(theta, phi)
    where_b = direction_from_angles(theta, phi + math.pi)

    def desc(q: str, where: Vec3, s: HalfInt, m: HalfInt, angle: float) -> ParticleDesc:
        lift = extended_angle_lift(theta, angle)
        return ParticleDesc(q, where, 0.0, s, m, r_bs=lift)

    state = pair_from_descriptions(
        desc("a", where_a, s_a, m_a, phi), desc("b", where_b, s_b, m_b, phi + math.pi)
    )
    if hold == "second":
        moved = desc("a", where_a, s_a, m_a, phi + 2 * math.pi)
        kept = desc("b", where_b, s_b, m_b, phi + math.pi)
    else:
        moved = desc("b", where_b, s_b, m_b, phi - math.pi)
        kept = desc("a", where_a, s_a, m_a, phi)
    exchanged = pair_from_descriptions(moved, kept)
    return fit_phase(state, exchanged)
