"""Single-particle spin states with an explicit base frame.

A state is described by its labels plus the SU(2) element r_bs taking the
declared base frame into the spin-quantization frame. The ket is the m-th
basis vector carried along by that element, so it is a single-valued
function of the description.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidSpinProjection
from .geometry import FramePair
from .numerics import TOLERANCE, HalfInt
from .su2 import SU2Element, Vec3, compose, from_euler_zyz, rotation_y, rotation_z
from .wigner import big_d, index_of


class BaseFrame(Enum):
    """Reference frame a quantization rotation is declared against."""

    HELICITY = (1, "helicity")
    BISECTING = (2, "bisecting")
    CANONICAL = (3, "canonical")

    def __init__(self, frame_id: int, label: str):
        self.frame_id = frame_id
        self.label = label

    @property
    def is_pair_dependent(self) -> bool:
        """Helicity and bisecting frames come from a FramePair."""
        return self is not BaseFrame.CANONICAL


LabelKey = tuple[str, tuple[float, float, float], float, int]


@dataclass(frozen=True)
class ParticleDesc:
    """Complete description of one particle's state.

    base_lift is the SU(2) lift of the base frame relative to the common
    canonical frame, identity for a canonical base. frames is the pair the
    base frame was taken from, if any.
    """

    q: str
    p_dir: Vec3
    p_mag: float
    s: HalfInt
    m: HalfInt
    base: BaseFrame = BaseFrame.CANONICAL
    r_bs: SU2Element = field(default_factory=SU2Element.identity)
    base_lift: SU2Element = field(default_factory=SU2Element.identity)
    frames: FramePair | None = None

    def __post_init__(self) -> None:
        if self.s.twice < 0:
            raise InvalidSpinProjection(f"spin {self.s} is negative")
        if abs(self.m.twice) > self.s.twice or (self.s.twice - self.m.twice) % 2:
            raise InvalidSpinProjection(f"projection m={self.m} is not allowed for s={self.s}")
        if self.p_mag < 0:
            raise InvalidSpinProjection(f"momentum magnitude {self.p_mag} is negative")

    def label_key(self) -> LabelKey:
        """Labels of the single-particle mode, independent of m and frames."""
        return (self.q, self.p_dir.as_tuple(), float(self.p_mag), self.s.twice)

    def with_projection(self, m: HalfInt) -> "ParticleDesc":
        return ParticleDesc(
            self.q, self.p_dir, self.p_mag, self.s, m, self.base, self.r_bs,
            self.base_lift, self.frames,
        )

    def with_rotation(self, r_bs: SU2Element) -> "ParticleDesc":
        return ParticleDesc(
            self.q, self.p_dir, self.p_mag, self.s, self.m, self.base, r_bs,
            self.base_lift, self.frames,
        )


@dataclass(frozen=True)
class SpinKet:
    """Amplitudes over m = s..-s in a base frame's fiducial basis."""

    s: HalfInt
    amps: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def inner(self, other: "SpinKet") -> complex:
        return complex(np.vdot(self.amps, other.amps))

    def amplitude(self, m: HalfInt) -> complex:
        return complex(self.amps[index_of(self.s, m)])

    def is_close(self, other: "SpinKet", tol: float = TOLERANCE) -> bool:
        return self.s == other.s and bool(
            np.allclose(self.amps, other.amps, atol=tol, rtol=0)
        )

    def in_canonical(self, lift: SU2Element) -> "SpinKet":
        """Re-express the ket in the common canonical basis."""
        return rotate_frame(self, lift)


def make_ket(d: ParticleDesc) -> SpinKet:
    """Column m of D^s(r_bs): e_m carried into the quantization frame."""
    column = big_d(d.s, d.r_bs).column(d.m)
    return SpinKet(d.s, column)


def rotate_frame(ket: SpinKet, g: SU2Element) -> SpinKet:
    return SpinKet(ket.s, big_d(ket.s, g).entries @ ket.amps)


def ket_in_canonical(d: ParticleDesc) -> SpinKet:
    """The particle's ket in the common canonical basis."""
    return make_ket(d).in_canonical(d.base_lift)


def polar_angles(p_dir: Vec3) -> tuple[float, float]:
    """(theta, phi) with theta in [0, pi] and phi in [0, 2*pi)."""
    theta = math.acos(max(-1.0, min(1.0, p_dir.z)))
    if math.hypot(p_dir.x, p_dir.y) == 0.0:
        return theta, 0.0
    phi = math.atan2(p_dir.y, p_dir.x) % (2 * math.pi)
    return theta, phi


def canonical_to_helicity_rotation(p_dir: Vec3) -> SU2Element:
    """R(p -> z) = R_z(-phi) R_y(-theta) with normal-range angles."""
    theta, phi = polar_angles(p_dir)
    return from_euler_zyz(-phi, -theta, 0.0)


def helicity_to_canonical(s: HalfInt, lam: HalfInt, p_dir: Vec3) -> SpinKet:
    """Coefficients D^s_{lam, m}(R(p -> z)) over canonical m."""
    d = big_d(s, canonical_to_helicity_rotation(p_dir))
    return SpinKet(s, d.row(lam))


def extended_angle_lift(theta: float, phi: float) -> SU2Element:
    """R_z(phi) R_y(theta) for angles outside the normal range.

    Adding 2*pi to phi negates the result.
    """
    return compose(rotation_z(phi), rotation_y(theta))


def quick_ket(s: HalfInt, m: HalfInt, theta: float, phi: float) -> SpinKet:
    """Spin factor of a coordinate-space state at extended angles (theta, phi)."""
    d = ParticleDesc("", Vec3(0.0, 0.0, 1.0), 0.0, s, m, r_bs=extended_angle_lift(theta, phi))
    return make_ket(d)
