"""Symmetric per-particle frames for a pair of directions.

For two unit vectors v_a, v_b the pair carries two triads built the same way
from (own vector, other vector), so swapping the inputs swaps the triads. The
half-turn about the bisector that carries frame a onto frame b is an element
of SU(2); it differs from the half-turn carrying b onto a by the 2*pi kernel
element, which is where the order dependence of exchange comes from.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateAntiparallel, DegenerateCollinear, NonUnitAxis
from .numerics import TOLERANCE
from .su2 import (
    SU2Element,
    Vec3,
    compose,
    from_axis_angle,
    from_matrix,
    rotate_vector,
    rotation_y,
)

logger = logging.getLogger(__name__)

DEGENERACY_EPS = 1e-8
TIE_BREAK_EPS = 1e-9


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal triad."""

    x: Vec3
    y: Vec3
    z: Vec3

    @classmethod
    def from_yz(cls, y: Vec3, z: Vec3) -> "Frame":
        return cls(y.cross(z), y, z)

    def matrix(self) -> np.ndarray:
        """Axes as columns."""
        return np.column_stack([self.x.as_array(), self.y.as_array(), self.z.as_array()])

    def is_orthonormal(self, tol: float = TOLERANCE) -> bool:
        m = self.matrix()
        return bool(
            np.allclose(m.T @ m, np.eye(3), atol=tol, rtol=0)
            and abs(np.linalg.det(m) - 1.0) <= tol
        )

    def is_close(self, other: "Frame", tol: float = TOLERANCE) -> bool:
        return bool(np.allclose(self.matrix(), other.matrix(), atol=tol, rtol=0))

    def rotated(self, g: SU2Element) -> "Frame":
        return Frame(rotate_vector(g, self.x), rotate_vector(g, self.y), rotate_vector(g, self.z))


class FrameKind(Enum):
    """How the per-particle z axes are chosen."""

    PARALLEL = (1, "parallel")  # z along the particle's own vector
    BISECTING = (2, "bisecting")  # z along the bisector for both

    def __init__(self, kind_id: int, label: str):
        self.kind_id = kind_id
        self.label = label


class Direction(Enum):
    A_TO_B = "a_to_b"
    B_TO_A = "b_to_a"


@dataclass(frozen=True)
class FramePair:
    """The two symmetric frames of a pair and the half-turns relating them.

    lift_a and lift_b are the SU(2) lifts of frame_a and frame_b relative to
    the canonical frame. They always satisfy lift_b == r_ab * lift_a.
    """

    v_a: Vec3
    v_b: Vec3
    frame_a: Frame
    frame_b: Frame
    k_hat: Vec3
    r_ab: SU2Element
    r_ba: SU2Element
    kind: FrameKind
    theta: float
    lift_a: SU2Element
    lift_b: SU2Element
    bisector: Vec3
    lead_is_a: bool

    def swapped(self) -> "FramePair":
        """The same geometry with the roles of a and b exchanged."""
        return FramePair(
            v_a=self.v_b,
            v_b=self.v_a,
            frame_a=self.frame_b,
            frame_b=self.frame_a,
            k_hat=-self.k_hat,
            r_ab=self.r_ba,
            r_ba=self.r_ab,
            kind=self.kind,
            theta=self.theta,
            lift_a=self.lift_b,
            lift_b=self.lift_a,
            bisector=self.bisector,
            lead_is_a=not self.lead_is_a,
        )

    def same_geometry(self, other: "FramePair", tol: float = TOLERANCE) -> bool:
        """True when both pairs describe the same frames, in either order."""
        direct = (
            self.kind == other.kind
            and self.frame_a.is_close(other.frame_a, tol)
            and self.frame_b.is_close(other.frame_b, tol)
            and self.r_ab.is_close(other.r_ab, tol)
        )
        if direct:
            return True
        flipped = other.swapped()
        return (
            self.kind == flipped.kind
            and self.frame_a.is_close(flipped.frame_a, tol)
            and self.frame_b.is_close(flipped.frame_b, tol)
            and self.r_ab.is_close(flipped.r_ab, tol)
        )


def _require_unit(v: Vec3, name: str) -> None:
    if not v.is_unit(1e-9):
        raise NonUnitAxis(f"{name}={v.as_tuple()} is not a unit vector (norm {v.norm()!r})")


def bisecting_axis(v_a: Vec3, v_b: Vec3) -> Vec3:
    """Unit bisector (v_a + v_b)/|v_a + v_b|."""
    _require_unit(v_a, "v_a")
    _require_unit(v_b, "v_b")
    total = v_a + v_b
    if total.norm() < DEGENERACY_EPS:
        raise DegenerateAntiparallel(
            f"v_a={v_a.as_tuple()} and v_b={v_b.as_tuple()} are antiparallel"
        )
    return total.normalized()


def half_angle(v_a: Vec3, v_b: Vec3) -> float:
    """Half of the angle between two unit vectors."""
    c = max(-1.0, min(1.0, v_a.dot(v_b)))
    return 0.5 * math.acos(c)


def bisecting_to_parallel(theta: float) -> SU2Element:
    """Body rotation taking either bisecting frame into the matching parallel frame."""
    return rotation_y(-theta)


def rotate_about(v: Vec3, axis: Vec3, angle: float) -> Vec3:
    return rotate_vector(from_axis_angle(axis.normalized(), angle), v)


def _leading_sign(v: Vec3) -> int:
    for c in v.as_tuple():
        if abs(c) > TIE_BREAK_EPS:
            return 1 if c > 0 else -1
    return 1


def _normal_and_bisector(v_a: Vec3, v_b: Vec3, seed: Vec3 | None) -> tuple[Vec3, Vec3]:
    """The normal y_a and the unsigned bisector for the pair."""
    cross = v_a.cross(v_b)
    if cross.norm() >= DEGENERACY_EPS:
        y_a = cross.normalized()
        return y_a, bisecting_axis(v_a, v_b)

    if seed is None:
        raise DegenerateCollinear(
            f"v_a={v_a.as_tuple()} and v_b={v_b.as_tuple()} are collinear; pass a seed axis"
        )
    orthogonal = seed - v_a.scaled(seed.dot(v_a))
    if orthogonal.norm() < DEGENERACY_EPS:
        raise DegenerateCollinear(f"seed {seed.as_tuple()} is parallel to the pair")
    y_a = orthogonal.normalized()
    if v_a.dot(v_b) > 0:
        bisector = v_a
    else:
        bisector = y_a.cross(v_a)
    logger.debug(f"Collinear pair resolved with seed: y_a={y_a.as_tuple()}")
    return y_a, bisector


def _build_pair(
    v_a: Vec3, v_b: Vec3, kind: FrameKind, seed: Vec3 | None, sign: int
) -> FramePair:
    _require_unit(v_a, "v_a")
    _require_unit(v_b, "v_b")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")

    y_a, bisector = _normal_and_bisector(v_a, v_b, seed)
    y_b = -y_a
    theta = half_angle(v_a, v_b)

    bis_a = Frame.from_yz(y_a, bisector)
    bis_b = Frame.from_yz(y_b, bisector)
    if kind is FrameKind.PARALLEL:
        frame_a = Frame.from_yz(y_a, v_a)
        frame_b = Frame.from_yz(y_b, v_b)
    else:
        frame_a, frame_b = bis_a, bis_b

    eps = _leading_sign(y_a)
    k_hat = bisector.scaled(float(eps))
    r_ab = from_axis_angle(k_hat, sign * math.pi)
    r_ba = from_axis_angle(k_hat, -sign * math.pi)

    lead_is_a = eps > 0
    lead_bisecting = from_matrix((bis_a if lead_is_a else bis_b).matrix())
    if kind is FrameKind.PARALLEL:
        lead_lift = compose(lead_bisecting, bisecting_to_parallel(theta))
    else:
        lead_lift = lead_bisecting
    if lead_is_a:
        lift_a, lift_b = lead_lift, compose(r_ab, lead_lift)
    else:
        lift_b, lift_a = lead_lift, compose(r_ba, lead_lift)

    pair = FramePair(
        v_a=v_a,
        v_b=v_b,
        frame_a=frame_a,
        frame_b=frame_b,
        k_hat=k_hat,
        r_ab=r_ab,
        r_ba=r_ba,
        kind=kind,
        theta=theta,
        lift_a=lift_a,
        lift_b=lift_b,
        bisector=bisector,
        lead_is_a=lead_is_a,
    )
    logger.debug(
        f"{kind.label} frames: theta={theta:.6g}, k_hat={k_hat.as_tuple()}, lead={'a' if lead_is_a else 'b'}"
    )
    return pair


def parallel_frames(
    v_a: Vec3, v_b: Vec3, *, seed: Vec3 | None = None, sign: int = 1
) -> FramePair:
    """Frames with z along each particle's own vector and y = v_c x v_o."""
    return _build_pair(v_a, v_b, FrameKind.PARALLEL, seed, sign)


def bisecting_frames(
    v_a: Vec3, v_b: Vec3, *, seed: Vec3 | None = None, sign: int = 1
) -> FramePair:
    """Frames with z along the bisector for both particles and y = v_c x v_o."""
    return _build_pair(v_a, v_b, FrameKind.BISECTING, seed, sign)


def relating_rotation(pair: FramePair, direction: Direction | str) -> SU2Element:
    """r_ab (frame a onto frame b) or r_ba."""
    direction = Direction(direction)
    return pair.r_ab if direction is Direction.A_TO_B else pair.r_ba
