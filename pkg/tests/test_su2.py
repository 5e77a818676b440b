"""Unit tests for the SU(2) double cover.

Tests verify:
- 2*pi turns give the nontrivial kernel element, 4*pi turns the identity
- Composition, inverse and the projection to SO(3)
- Lifting rotation matrices back to SU(2)
"""

import math

import numpy as np
import pytest

from spinstat.errors import NonUnitAxis
from spinstat.su2 import (
    X_HAT,
    Y_HAT,
    Z_HAT,
    SU2Element,
    Vec3,
    compose,
    compose_all,
    from_axis_angle,
    from_euler_zyz,
    from_matrix,
    inverse,
    is_half_turn,
    project_so3,
    rotate_vector,
    rotation_y,
    rotation_z,
    su2_matrix,
)


class TestVec3:
    """Tests for Vec3."""

    def test_cross_is_right_handed(self):
        """Test that x cross y is z."""
        assert X_HAT.cross(Y_HAT).is_close(Z_HAT)

    def test_normalized(self):
        """Test normalization of a non-unit vector."""
        v = Vec3(3.0, 0.0, 4.0).normalized()
        assert v.is_unit()
        assert v.is_close(Vec3(0.6, 0.0, 0.8))


class TestAxisAngle:
    """Tests for from_axis_angle."""

    def test_two_pi_is_deck(self, random_direction):
        """Test that a full turn about any axis is -identity."""
        for _ in range(20):
            g = from_axis_angle(random_direction(), 2 * math.pi)
            assert g.is_close(SU2Element.deck(), 1e-12)

    def test_four_pi_is_identity(self, random_direction):
        """Test that two full turns return to the identity."""
        g = from_axis_angle(random_direction(), 4 * math.pi)
        assert g.is_close(SU2Element.identity(), 1e-12)

    def test_angle_shift_negates(self, random_direction):
        """Test that angle and angle + 2*pi give negatives of each other."""
        n = random_direction()
        assert from_axis_angle(n, 0.7 + 2 * math.pi).is_close(-from_axis_angle(n, 0.7), 1e-12)

    def test_non_unit_axis_raises(self):
        """Test that a non-unit axis raises NonUnitAxis."""
        with pytest.raises(NonUnitAxis):
            from_axis_angle(Vec3(1.0, 1.0, 0.0), 1.0)

    def test_half_turn_detection(self):
        """Test is_half_turn on pi and 2*pi rotations."""
        assert is_half_turn(rotation_y(math.pi))
        assert not is_half_turn(rotation_y(2 * math.pi))


class TestGroupOperations:
    """Tests for composition and inverse."""

    def test_inverse(self, random_su2):
        """Test that g * g^-1 is the identity."""
        g = random_su2()
        assert compose(g, inverse(g)).is_close(SU2Element.identity(), 1e-12)

    def test_compose_matches_matrix_product(self, random_su2):
        """Test that composition agrees with the 2x2 matrix product."""
        for _ in range(20):
            g1, g2 = random_su2(), random_su2()
            expected = su2_matrix(g2) @ su2_matrix(g1)
            assert np.allclose(su2_matrix(compose(g2, g1)), expected, atol=1e-12)

    def test_compose_all_order(self):
        """Test that compose_all multiplies left to right."""
        a, b = rotation_z(0.3), rotation_y(1.1)
        assert compose_all(a, b).is_close(compose(a, b))

    def test_euler_zyz(self):
        """Test that Euler angles compose z, y, z."""
        g = from_euler_zyz(0.2, 0.9, -0.4)
        expected = compose(rotation_z(0.2), compose(rotation_y(0.9), rotation_z(-0.4)))
        assert g.is_close(expected, 1e-12)

    def test_projection_is_homomorphism(self, random_su2):
        """Test that the rotation of a product is the product of rotations."""
        for _ in range(50):
            a, b = random_su2(), random_su2()
            expected = project_so3(a) @ project_so3(b)
            assert np.allclose(project_so3(compose(a, b)), expected, atol=1e-12)

    def test_half_turn_squared_is_deck(self, random_direction):
        """Test that two half-turns about any axis give the 2*pi element."""
        for _ in range(20):
            half = from_axis_angle(random_direction(), math.pi)
            assert compose(half, half).is_close(SU2Element.deck(), 1e-12)

    def test_half_turn_inverse_turns_back(self, random_direction):
        """Test inverse(R_k(pi)) = R_k(-pi), which differs from R_k(pi)."""
        k = random_direction()
        forward, backward = from_axis_angle(k, math.pi), from_axis_angle(k, -math.pi)
        assert inverse(forward).is_close(backward, 1e-12)
        assert not inverse(forward).is_close(forward, 1e-6)
        assert inverse(forward).projects_like(forward, 1e-12)

    def test_deck_is_its_own_inverse(self):
        """Test inverse(-1) = -1."""
        assert inverse(SU2Element.deck()).is_close(SU2Element.deck(), 0.0)

    def test_half_turns_flip_z(self):
        """Test that R_z(pi) R_y(pi) sends z to -z."""
        g = compose(rotation_z(math.pi), rotation_y(math.pi))
        assert rotate_vector(g, Z_HAT).is_close(-Z_HAT, 1e-12)


class TestProjection:
    """Tests for the map to SO(3) and back."""

    def test_projection_forgets_sign(self, random_su2):
        """Test that g and -g project to the same rotation."""
        g = random_su2()
        assert np.allclose(project_so3(g), project_so3(-g), atol=1e-14)

    def test_projection_is_a_rotation(self, random_su2):
        """Test orthogonality and unit determinant."""
        r = project_so3(random_su2())
        assert np.allclose(r.T @ r, np.eye(3), atol=1e-12)
        assert abs(np.linalg.det(r) - 1.0) < 1e-12

    def test_rotate_vector(self):
        """Test a quarter turn about z."""
        v = rotate_vector(rotation_z(math.pi / 2), X_HAT)
        assert v.is_close(Y_HAT, 1e-12)

    def test_from_matrix_lifts(self, random_su2):
        """Test that from_matrix returns one of the two lifts."""
        for _ in range(50):
            g = random_su2()
            lifted = from_matrix(project_so3(g))
            assert lifted.projects_like(g, 1e-10)

    def test_from_matrix_shape_check(self):
        """Test that a non-3x3 input raises ValueError."""
        with pytest.raises(ValueError):
            from_matrix(np.eye(2))
