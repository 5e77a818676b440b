"""Unit quaternions as elements of SU(2), the double cover of 3D rotations.

Rotations are active and Euler angles follow the z-y-z convention. An element
and its negative project to the same rotation matrix but act differently on
half-integer spins, so the sign of an SU2Element is never normalized away.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonUnitAxis
from .numerics import TOLERANCE


@dataclass(frozen=True)
class Vec3:
    """A real 3-vector."""

    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, values: np.ndarray | list[float] | tuple[float, ...]) -> "Vec3":
        a = np.asarray(values, dtype=float)
        if a.shape != (3,):
            raise ValueError(f"expected three components, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise NonUnitAxis("cannot normalize the zero vector")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def is_unit(self, tol: float = TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def scaled(self, factor: float) -> "Vec3":
        return Vec3(factor * self.x, factor * self.y, factor * self.z)

    def is_close(self, other: "Vec3", tol: float = TOLERANCE) -> bool:
        return (self - other).norm() <= tol

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)


X_HAT = Vec3(1.0, 0.0, 0.0)
Y_HAT = Vec3(0.0, 1.0, 0.0)
Z_HAT = Vec3(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class SU2Element:
    """Unit quaternion w + x*i + y*j + z*k."""

    w: float
    x: float
    y: float
    z: float

    @classmethod
    def identity(cls) -> "SU2Element":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def deck(cls) -> "SU2Element":
        """The nontrivial kernel element of the projection to SO(3)."""
        return cls(-1.0, 0.0, 0.0, 0.0)

    def __neg__(self) -> "SU2Element":
        return SU2Element(-self.w, -self.x, -self.y, -self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def axis_part(self) -> Vec3:
        return Vec3(self.x, self.y, self.z)

    def is_close(self, other: "SU2Element", tol: float = TOLERANCE) -> bool:
        """Compare on the double cover; g and -g are not close."""
        return bool(np.max(np.abs(self.as_array() - other.as_array())) <= tol)

    def projects_like(self, other: "SU2Element", tol: float = TOLERANCE) -> bool:
        """True when both elements project to the same rotation."""
        return self.is_close(other, tol) or self.is_close(-other, tol)


def from_axis_angle(axis: Vec3, angle: float) -> SU2Element:
    """Rotation by `angle` about the unit vector `axis`.

    angle and angle + 2*pi give negatives of each other; angle + 4*pi gives
    the same element.
    """
    if not axis.is_unit():
        raise NonUnitAxis(f"rotation axis {axis.as_tuple()} has norm {axis.norm()!r}")
    half = 0.5 * angle
    s = math.sin(half)
    return SU2Element(math.cos(half), s * axis.x, s * axis.y, s * axis.z)


def rotation_x(angle: float) -> SU2Element:
    return from_axis_angle(X_HAT, angle)


def rotation_y(angle: float) -> SU2Element:
    return from_axis_angle(Y_HAT, angle)


def rotation_z(angle: float) -> SU2Element:
    return from_axis_angle(Z_HAT, angle)


def _normalized(w: float, x: float, y: float, z: float) -> SU2Element:
    n = math.sqrt(w * w + x * x + y * y + z * z)
    return SU2Element(w / n, x / n, y / n, z / n)


def compose(g2: SU2Element, g1: SU2Element) -> SU2Element:
    """The product g2 * g1, i.e. g1 applied first."""
    w = g2.w * g1.w - g2.x * g1.x - g2.y * g1.y - g2.z * g1.z
    x = g2.w * g1.x + g2.x * g1.w + g2.y * g1.z - g2.z * g1.y
    y = g2.w * g1.y - g2.x * g1.z + g2.y * g1.w + g2.z * g1.x
    z = g2.w * g1.z + g2.x * g1.y - g2.y * g1.x + g2.z * g1.w
    return _normalized(w, x, y, z)


def compose_all(*elements: SU2Element) -> SU2Element:
    """Left-to-right product: compose_all(a, b, c) = a * b * c."""
    result = SU2Element.identity()
    for g in elements:
        result = compose(result, g)
    return result


def inverse(g: SU2Element) -> SU2Element:
    return SU2Element(g.w, -g.x, -g.y, -g.z)


def project_so3(g: SU2Element) -> np.ndarray:
    """The 3x3 rotation matrix of g; g and -g give the same matrix."""
    w, x, y, z = g.w, g.x, g.y, g.z
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ],
        dtype=float,
    )


def rotate_vector(g: SU2Element, v: Vec3) -> Vec3:
    return Vec3.from_array(project_so3(g) @ v.as_array())


def from_euler_zyz(alpha: float, beta: float, gamma: float) -> SU2Element:
    """R_z(alpha) * R_y(beta) * R_z(gamma)."""
    return compose_all(rotation_z(alpha), rotation_y(beta), rotation_z(gamma))


def from_matrix(m: np.ndarray) -> SU2Element:
    """One of the two lifts of a proper rotation matrix.

    The branch is chosen by Shepperd's largest-component rule, so the sign
    is arbitrary but deterministic.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {m.shape}")
    trace = m[0, 0] + m[1, 1] + m[2, 2]
    if trace > 0:
        s = 2.0 * math.sqrt(trace + 1.0)
        w = 0.25 * s
        x = (m[2, 1] - m[1, 2]) / s
        y = (m[0, 2] - m[2, 0]) / s
        z = (m[1, 0] - m[0, 1]) / s
    elif m[0, 0] > m[1, 1] and m[0, 0] > m[2, 2]:
        s = 2.0 * math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
        w = (m[2, 1] - m[1, 2]) / s
        x = 0.25 * s
        y = (m[0, 1] + m[1, 0]) / s
        z = (m[0, 2] + m[2, 0]) / s
    elif m[1, 1] > m[2, 2]:
        s = 2.0 * math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2])
        w = (m[0, 2] - m[2, 0]) / s
        x = (m[0, 1] + m[1, 0]) / s
        y = 0.25 * s
        z = (m[1, 2] + m[2, 1]) / s
    else:
        s = 2.0 * math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1])
        w = (m[1, 0] - m[0, 1]) / s
        x = (m[0, 2] + m[2, 0]) / s
        y = (m[1, 2] + m[2, 1]) / s
        z = 0.25 * s
    return _normalized(float(w), float(x), float(y), float(z))


def cayley_klein(g: SU2Element) -> tuple[complex, complex]:
    """Parameters (a, b) of the SU(2) matrix [[a, b], [-conj(b), conj(a)]]."""
    return complex(g.w, -g.z), complex(-g.y, -g.x)


def su2_matrix(g: SU2Element) -> np.ndarray:
    a, b = cayley_klein(g)
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]], dtype=complex)


def is_half_turn(g: SU2Element, tol: float = TOLERANCE) -> bool:
    return abs(g.w) <= tol
