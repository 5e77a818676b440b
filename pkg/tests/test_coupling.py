"""Unit tests for coupled states and exclusion rules.

Tests verify:
- Even-S rule for two identical particles
- Centre-of-mass helicity relations and the reorder factor
- The D-matrix exchange identity
- Partial-wave exchange factors, normalization and orthogonality on the quadrature grid
- The odd L+S exclusion table, decided by two independent oracles
"""

import math

import pytest

from spinstat.coupling import (
    JW_CONVENTIONS,
    QuadratureGrid,
    cm_helicity_lifts,
    cm_helicity_pair,
    couple_spins,
    d_exchange_identity,
    even_s_table,
    jw_plane_wave,
    jw_relation_factor,
    jw_reorder_factor,
    jw_reordered,
    jw_rotation,
    ls_exchange_sign,
    ls_exclusion_check,
    ls_grid_state,
    ls_state,
    partial_wave_project,
    partial_wave_reorder_factor,
)
from spinstat.errors import GridTooCoarse, SpinMismatch, TriangleViolation
from spinstat.numerics import HalfInt, minus_one_power
from spinstat.states import ParticleDesc
from spinstat.su2 import X_HAT, Z_HAT, rotate_vector
from spinstat.twoparticle import OrderedPairDesc, fit_phase
from spinstat.wigner import cg_column_norm, projections


def _residual(backward, forward, factor) -> float:
    return backward.plus(forward.scaled(-factor)).norm()


class TestEvenS:
    """Tests for the even total-spin rule."""

    @pytest.mark.parametrize("twice_s", [1, 2, 3, 4])
    def test_even_s_allowed(self, twice_s):
        """Test that exactly the even total spins survive."""
        table = even_s_table(HalfInt(twice_s))
        assert [S.twice for S, _, _ in table] == list(range(0, 2 * twice_s + 1, 2))
        largest = max(n for _, ok, n in table if ok)
        for S, allowed, norm_sq in table:
            assert allowed == ((S.twice // 2) % 2 == 0)
            if not allowed:
                assert norm_sq <= 1e-6 * largest

    def test_coupled_state_norm(self):
        """Test that a single ordering of the S=0 state is normalized."""
        s = HalfInt(1)
        base = OrderedPairDesc(
            ParticleDesc("e", Z_HAT, 1.0, s, s), ParticleDesc("e", X_HAT, 1.0, s, s)
        )
        coupled = couple_spins(base, HalfInt(0), HalfInt(0))
        assert coupled.state.norm() == pytest.approx(1.0)

    @pytest.mark.parametrize("twice_s", [1, 2, 3, 4])
    def test_identical_norm_identity(self, twice_s):
        """Test |1/2 (F + F_x)| = 1/2 |1 + (-1)^S| sum C^2 for every S and M."""
        s = HalfInt(twice_s)
        base = OrderedPairDesc(
            ParticleDesc("e", Z_HAT, 1.0, s, s), ParticleDesc("e", X_HAT, 1.0, s, s)
        )
        for twice_S in range(0, 2 * twice_s + 1, 2):
            S = HalfInt(twice_S)
            for M in (HalfInt(0), S):
                coupled = couple_spins(base, S, M)
                column = float(cg_column_norm(s, s, S, M))
                expected = 0.5 * abs(1 + (-1) ** (twice_S // 2)) * column
                assert coupled.identical_norm() == pytest.approx(expected, abs=1e-8)


    def test_unequal_spins_raise(self):
        """Test that coupling needs two equal spins."""
        base = OrderedPairDesc(
            ParticleDesc("e", Z_HAT, 1.0, HalfInt(1), HalfInt(1)),
            ParticleDesc("e", X_HAT, 1.0, HalfInt(2), HalfInt(2)),
        )
        with pytest.raises(SpinMismatch):
            couple_spins(base, HalfInt(0), HalfInt(0))

    def test_triangle_violation(self):
        """Test that S above 2s is refused."""
        s = HalfInt(1)
        base = OrderedPairDesc(
            ParticleDesc("e", Z_HAT, 1.0, s, s), ParticleDesc("e", X_HAT, 1.0, s, s)
        )
        with pytest.raises(TriangleViolation):
            couple_spins(base, HalfInt(4), HalfInt(0))


class TestPlaneWaves:
    """Tests for centre-of-mass helicity plane waves."""

    @pytest.mark.parametrize("convention", JW_CONVENTIONS)
    @pytest.mark.parametrize("twice_s_a, twice_s_b", [(1, 1), (1, 2), (2, 3), (3, 4)])
    def test_relation_and_reorder(self, convention, twice_s_a, twice_s_b, random_direction):
        """Test the factor to the symmetric pair and the reorder factor."""
        s_a, s_b = HalfInt(twice_s_a), HalfInt(twice_s_b)
        p = random_direction()
        lifts = cm_helicity_lifts(p)
        for lam_a in projections(s_a):
            for lam_b in projections(s_b):
                args = ("a", "b", s_a, lam_a, s_b, lam_b, p)
                jw = jw_plane_wave(*args, convention=convention, lifts=lifts)
                sym = cm_helicity_pair(*args, lifts=lifts)
                rev = jw_reordered(*args, convention=convention, lifts=lifts)
                relation = fit_phase(sym, jw)
                reorder = fit_phase(jw, rev)
                assert abs(relation - jw_relation_factor(s_b, lam_b, convention)) <= 1e-10
                assert abs(reorder - jw_reorder_factor(s_a, lam_a, s_b, lam_b, convention)) <= 1e-10

    def test_reorder_is_power_of_spin_difference(self):
        """Test (-1)^(s_a - s_b) for the yz convention."""
        assert jw_reorder_factor(HalfInt(1), HalfInt(1), HalfInt(1), HalfInt(1)) == 1
        assert jw_reorder_factor(HalfInt(3), HalfInt(1), HalfInt(1), HalfInt(1)) == pytest.approx(-1)
        assert jw_reorder_factor(HalfInt(2), HalfInt(0), HalfInt(1), HalfInt(1)) == pytest.approx(
            minus_one_power(HalfInt(1))
        )

    def test_unknown_convention(self):
        """Test that an unknown convention raises."""
        with pytest.raises(ValueError):
            jw_rotation("zz")

    def test_cm_lifts_point_along_momenta(self, random_direction):
        """Test that the lifts carry z to p and to -p."""
        p = random_direction()
        lift_a, lift_b = cm_helicity_lifts(p)
        assert rotate_vector(lift_a, Z_HAT).is_close(p, 1e-10)
        assert rotate_vector(lift_b, Z_HAT).is_close(-p, 1e-10)

    @pytest.mark.parametrize("twice_s_b", [1, 2, 3])
    def test_conventions_share_lifts(self, twice_s_b, random_direction):
        """Test that the two conventions differ only by exp(-i pi lam_b) on default lifts."""
        s_a, s_b = HalfInt(1), HalfInt(twice_s_b)
        p = random_direction()
        for lam_b in projections(s_b):
            args = ("a", "b", s_a, s_a, s_b, lam_b, p)
            y_state = jw_plane_wave(*args, convention="y")
            yz_state = jw_plane_wave(*args, convention="yz")
            assert abs(fit_phase(y_state, yz_state) - minus_one_power(-lam_b)) <= 1e-10


class TestDIdentity:
    """Tests for the D-matrix exchange identity."""

    def test_identity_holds(self, random_su2):
        """Test both sides agree over random rotations for J up to 3."""
        checked = 0
        for i in range(100):
            g = random_su2()
            J = HalfInt(i % 7)
            M = projections(J)[i % (J.twice + 1)]
            for twice_a in range(-2, 3):
                for twice_b in range(-2, 3):
                    diff = twice_a - twice_b
                    if abs(diff) > J.twice or (J.twice - diff) % 2:
                        continue
                    lhs, rhs = d_exchange_identity(J, M, HalfInt(twice_a), HalfInt(twice_b), g)
                    assert abs(lhs - rhs) <= 1e-10
                    checked += 1
        assert checked > 100


class TestPartialWaves:
    """Tests for partial-wave projection."""

    @pytest.mark.parametrize(
        "twice_J, twice_s_a, twice_s_b, twice_lam_a, twice_lam_b",
        [
            (2, 1, 1, 1, 1),
            (2, 1, 1, 1, -1),
            (4, 2, 2, 2, 0),
            (0, 2, 2, 0, 0),
            (3, 2, 1, 2, 1),
            (1, 2, 1, 0, 1),
        ],
    )
    def test_reorder_factor_on_grid(self, twice_J, twice_s_a, twice_s_b, twice_lam_a, twice_lam_b):
        """Test the exchange factor between the two orderings of a partial wave."""
        J = HalfInt(twice_J)
        s_a, s_b = HalfInt(twice_s_a), HalfInt(twice_s_b)
        lam_a, lam_b = HalfInt(twice_lam_a), HalfInt(twice_lam_b)
        M = projections(J)[0]
        grid = QuadratureGrid.for_rank(J)
        forward = partial_wave_project(J, M, lam_a, lam_b, grid, s_a=s_a, s_b=s_b)
        backward = partial_wave_project(J, M, lam_a, lam_b, grid, s_a=s_a, s_b=s_b, reorder=True)
        factor = partial_wave_reorder_factor(J, s_a, s_b)
        assert forward.norm() > 0.1
        assert abs(forward.inner(backward) / forward.inner(forward) - factor) <= 1e-8
        assert _residual(backward, forward, factor) <= 1e-8

    def test_reorder_factor_y_convention(self):
        """Test the helicity-dependent factor of the y convention."""
        J, s = HalfInt(2), HalfInt(1)
        lam_a, lam_b = HalfInt(1), HalfInt(-1)
        grid = QuadratureGrid.for_rank(J)
        kwargs = dict(s_a=s, s_b=s, convention="y")
        forward = partial_wave_project(J, HalfInt(0), lam_a, lam_b, grid, **kwargs)
        backward = partial_wave_project(J, HalfInt(0), lam_a, lam_b, grid, reorder=True, **kwargs)
        factor = partial_wave_reorder_factor(J, s, s, lam_a, lam_b, "y")
        assert factor == -1
        assert _residual(backward, forward, factor) <= 1e-8

    def test_integer_j_factor(self):
        """Test that for integer J the factor is (-1)^(J + s_a - s_b)."""
        assert partial_wave_reorder_factor(HalfInt(2), HalfInt(1), HalfInt(1)) == -1
        assert partial_wave_reorder_factor(HalfInt(4), HalfInt(3), HalfInt(1)) == -1
        assert partial_wave_reorder_factor(HalfInt(0), HalfInt(2), HalfInt(2)) == 1

    def test_y_convention_needs_helicities(self):
        """Test that the y factor cannot be computed without helicities."""
        with pytest.raises(ValueError):
            partial_wave_reorder_factor(HalfInt(2), HalfInt(1), HalfInt(1), convention="y")

    def test_partial_waves_orthogonal_in_m(self):
        """Test that different M give orthogonal states."""
        J, s = HalfInt(2), HalfInt(1)
        grid = QuadratureGrid.for_rank(J)
        up = partial_wave_project(J, HalfInt(2), s, s, grid, s_a=s, s_b=s)
        down = partial_wave_project(J, HalfInt(-2), s, s, grid, s_a=s, s_b=s)
        assert abs(up.inner(down)) <= 1e-10 * up.norm() * down.norm()

    @pytest.mark.parametrize("twice_J", [0, 2, 6])
    def test_partial_waves_normalized(self, twice_J):
        """Test <J, M | J, M> = 1."""
        J, s = HalfInt(twice_J), HalfInt(1)
        wave = partial_wave_project(J, HalfInt(0), s, s, s_a=s, s_b=s)
        assert wave.norm() == pytest.approx(1.0, abs=1e-10)

    def test_partial_waves_orthogonal_in_j(self):
        """Test <J, M | J', M> = 0 for J != J' on a shared grid."""
        s = HalfInt(1)
        grid = QuadratureGrid.for_rank(HalfInt(6))
        waves = [
            partial_wave_project(HalfInt(twice_J), HalfInt(0), s, s, grid, s_a=s, s_b=s)
            for twice_J in (0, 2, 4, 6)
        ]
        for i, left in enumerate(waves):
            for right in waves[i + 1 :]:
                assert abs(left.inner(right)) <= 1e-10

    @pytest.mark.parametrize("twice_J", [1, 3, 5])
    def test_grid_refinement_converged(self, twice_J):
        """Test that doubling the grid order changes the norm by at most 1e-8."""
        J = HalfInt(twice_J)
        s_a, s_b = HalfInt(2), HalfInt(1)
        lam_a, lam_b = HalfInt(2), HalfInt(1)
        M = projections(J)[-1]
        kwargs = dict(s_a=s_a, s_b=s_b)
        coarse = partial_wave_project(J, M, lam_a, lam_b, QuadratureGrid.for_rank(J), **kwargs)
        fine = partial_wave_project(J, M, lam_a, lam_b, QuadratureGrid.for_rank(J, 2), **kwargs)
        assert abs(coarse.norm() - fine.norm()) <= 1e-8

    @pytest.mark.parametrize("twice_s", [1, 2])
    @pytest.mark.parametrize("twice_J", [0, 2, 4, 6])
    def test_identical_equal_helicities(self, twice_s, twice_J):
        """Test that identical particles with equal helicities vanish for odd J only."""
        s, J = HalfInt(twice_s), HalfInt(twice_J)
        grid = QuadratureGrid.for_rank(J)
        kwargs = dict(s_a=s, s_b=s, q_a="e", q_b="e")
        forward = partial_wave_project(J, HalfInt(0), s, s, grid, **kwargs)
        backward = partial_wave_project(J, HalfInt(0), s, s, grid, reorder=True, **kwargs)
        identical = forward.plus(backward).scaled(0.5)
        if (twice_J // 2) % 2:
            assert identical.norm() <= 1e-8
        else:
            assert identical.norm() == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize(
        "twice_J, twice_s_a, twice_s_b, expected",
        [(1, 1, 0, 1), (3, 1, 0, -1), (1, 2, 1, 1), (3, 2, 1, -1), (5, 3, 0, -1)],
    )
    def test_half_integer_j_factor(self, twice_J, twice_s_a, twice_s_b, expected):
        """Test the yz factor (-1)^(s_a - s_b - J) for half-integer J."""
        J, s_a, s_b = HalfInt(twice_J), HalfInt(twice_s_a), HalfInt(twice_s_b)
        assert partial_wave_reorder_factor(J, s_a, s_b) == expected


    def test_coarse_grid_rejected(self):
        """Test that an under-resolved grid raises."""
        J = HalfInt(4)
        with pytest.raises(GridTooCoarse):
            partial_wave_project(
                J, HalfInt(0), HalfInt(1), HalfInt(1), QuadratureGrid(2, 4),
                s_a=HalfInt(1), s_b=HalfInt(1),
            )

    def test_grid_weights_cover_sphere(self):
        """Test that the weights integrate 1 to 4*pi."""
        grid = QuadratureGrid.for_rank(HalfInt(2))
        total = sum(w for _, _, w in grid.node_angles())
        assert total == pytest.approx(4 * math.pi)
        assert len(grid) == grid.n_theta * grid.n_phi


class TestLSCoupling:
    """Tests for L-S states and the odd L+S rule."""

    def test_ls_amplitudes(self):
        """Test the amplitude normalization of an L-S state."""
        s = HalfInt(1)
        ls = ls_state(HalfInt(2), HalfInt(0), HalfInt(2), HalfInt(0), s, s)
        assert set(ls.amplitudes) == {(s, s), (-s, -s)}
        assert ls.norm_sq() == pytest.approx(1.0)

    def test_ls_triangle(self):
        """Test that impossible (L, S, J) raise."""
        s = HalfInt(1)
        with pytest.raises(TriangleViolation):
            ls_state(HalfInt(2), HalfInt(0), HalfInt(6), HalfInt(0), s, s)
        with pytest.raises(TriangleViolation):
            ls_state(HalfInt(2), HalfInt(0), HalfInt(1), HalfInt(1), s, s)

    @pytest.mark.parametrize("twice_s", [1, 2, 3])
    def test_exchange_sign(self, twice_s):
        """Test that the algebraic sign is (-1)^(L+S) for any particle spin."""
        s = HalfInt(twice_s)
        for twice_J in (0, 2, 4):
            for twice_L in (0, 2, 4):
                for twice_S in range(0, 2 * twice_s + 1, 2):
                    expected = 1 if ((twice_L + twice_S) // 2) % 2 == 0 else -1
                    J, L, S = HalfInt(twice_J), HalfInt(twice_L), HalfInt(twice_S)
                    assert ls_exchange_sign(J, L, S, s) == expected

    def test_grid_state_is_cached(self):
        """Test that the partial-wave cache is reused across L-S states."""
        s = HalfInt(1)
        cache: dict = {}
        ls = ls_state(HalfInt(2), HalfInt(0), HalfInt(2), HalfInt(2), s, s)
        ls_grid_state(ls, cache=cache)
        size = len(cache)
        ls_grid_state(ls_state(HalfInt(2), HalfInt(0), HalfInt(0), HalfInt(2), s, s), cache=cache)
        assert size > 0
        assert len(cache) >= size

    @pytest.mark.parametrize("twice_s", [1, 2])
    def test_odd_l_plus_s_forbidden(self, twice_s):
        """Test that both oracles agree and allowed rows have L+S even."""
        table = ls_exclusion_check(HalfInt(twice_s), 3)
        assert table
        for row in table:
            assert row.allowed == (((row.L.twice + row.S.twice) // 2) % 2 == 0)
