import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import smooth_random_field
from fracsfe import (
    RADIAL,
    BoxTooSmall,
    Field,
    Grid,
    IncompatibleGrid,
    NonlinearitySpec,
    SymmetryClass,
    SymmetryKind,
    antisymmetry_defect,
    build_block_tent,
    choose_tent_radius,
    ds_seminorm_sq,
    potential,
    project,
    radial_defect,
    schwarz_rearrange,
)
from fracsfe.symmetry import block_swap, group_order, radial_average

BLOCK1 = SymmetryClass(SymmetryKind.BLOCK1, 2)
BLOCK2_4 = SymmetryClass(SymmetryKind.BLOCK2, 2)


def random_field(grid, seed):
    return Field(grid, np.random.default_rng(seed).standard_normal(grid.shape))


class TestParsing:
    @pytest.mark.parametrize("text,kind,m", [
        ("radial", SymmetryKind.RADIAL, 0),
        ("none", SymmetryKind.NONE, 0),
        ("block1:2", SymmetryKind.BLOCK1, 2),
        ("block2:m2=3", SymmetryKind.BLOCK2, 3),
    ])
    def test_parse(self, text, kind, m):
        sc = SymmetryClass.parse(text)
        assert sc.kind is kind and sc.m == m

    def test_round_trip(self):
        assert SymmetryClass.parse(str(BLOCK1)) == BLOCK1

    def test_block1_needs_four_dimensions(self):
        assert SymmetryClass(SymmetryKind.BLOCK1, 2).violations(3)

    def test_block1_needs_m_at_least_two(self):
        assert any("m1 >= 2" in v for v in SymmetryClass(SymmetryKind.BLOCK1, 1).violations(4))

    def test_block2_rest_one_rejected(self):
        assert any("N-2*m2" in v for v in SymmetryClass(SymmetryKind.BLOCK2, 2).violations(5))

    def test_block2_rest_two_needs_n4_or_n6(self):
        assert SymmetryClass(SymmetryKind.BLOCK2, 1).violations(4) == []
        assert SymmetryClass(SymmetryKind.BLOCK2, 2).violations(6) == []
        assert SymmetryClass(SymmetryKind.BLOCK2, 2).violations(4) == []

    def test_check_raises(self):
        with pytest.raises(IncompatibleGrid):
            project(random_field(Grid(3, 1.0, 4), 0), BLOCK1)

    def test_group_orders(self):
        assert group_order(RADIAL, 2) == 8
        assert group_order(BLOCK1, 4) == 2 * 8 * 8


class TestProjection:
    @pytest.mark.parametrize("sc,dim", [(RADIAL, 2), (RADIAL, 3), (BLOCK1, 4), (BLOCK2_4, 4)])
    def test_idempotent(self, sc, dim):
        g = Grid(dim, 3.0, 8)
        u = random_field(g, 1)
        once = project(u, sc)
        twice = project(once, sc)
        assert np.allclose(once.values, twice.values, rtol=0, atol=1e-14)

    @pytest.mark.parametrize("sc,dim", [(RADIAL, 2), (BLOCK1, 4)])
    def test_self_adjoint(self, sc, dim):
        g = Grid(dim, 3.0, 8)
        u, v = random_field(g, 2), random_field(g, 3)
        assert project(u, sc).inner(v) == pytest.approx(u.inner(project(v, sc)), rel=1e-12)

    def test_block_class_is_swap_odd(self):
        g = Grid(4, 3.0, 8)
        u = project(random_field(g, 4), BLOCK1)
        assert antisymmetry_defect(u, BLOCK1) <= 1e-15
        assert np.allclose(block_swap(u, BLOCK1).values, -u.values, rtol=0, atol=1e-15)

    def test_radial_projection_is_lattice_symmetric(self):
        g = Grid(2, 3.0, 16)
        u = project(random_field(g, 5), RADIAL).values
        assert np.allclose(u, u.T, atol=1e-15)
        assert np.allclose(u, np.roll(np.flip(u, 0), 1, 0), atol=1e-15)

    def test_swap_odd_field_has_zero_radial_part(self):
        g = Grid(4, 3.0, 8)
        u = project(random_field(g, 6), BLOCK1)
        both = project(u, RADIAL)
        assert np.max(np.abs(both.values)) <= 1e-14

    @given(seed=st.integers(0, 2**32 - 1))
    def test_projection_does_not_grow_norm(self, seed):
        g = Grid(2, 3.0, 8)
        u = random_field(g, seed)
        assert project(u, RADIAL).l2_norm() <= u.l2_norm() * (1 + 1e-14)


class TestDefects:
    def test_radial_gaussian(self):
        g = Grid(2, 40.0, 128)
        u = Field(g, np.exp(-g.radius() ** 2 / 60.0))
        assert radial_defect(u) <= 0.02

    def test_plane_wave_is_not_radial(self):
        g = Grid(2, 4.0, 32)
        u = Field.from_function(g, lambda x, y: np.cos(2 * np.pi * x / 4.0))
        assert radial_defect(u) > 0.5

    def test_radial_average_preserves_shell_sums(self):
        g = Grid(2, 4.0, 32)
        u = random_field(g, 7)
        assert radial_average(u).values.sum() == pytest.approx(u.values.sum(), rel=1e-12, abs=1e-10)

    def test_zero_field(self):
        assert radial_defect(Field.zeros(Grid(2, 1.0, 8))) == 0.0


class TestRearrangement:
    def test_preserves_distribution(self, rng):
        g = Grid(2, 20.0, 64)
        u = smooth_random_field(g, rng)
        us = schwarz_rearrange(u)
        assert np.array_equal(np.sort(us.values.ravel()), np.sort(np.abs(u.values.ravel())))

    def test_potential_exact(self, rng):
        g = Grid(2, 20.0, 64)
        spec = NonlinearitySpec(((-1, 1), (1, 2)), "zero")
        u = smooth_random_field(g, rng)
        assert potential(schwarz_rearrange(u), spec) == pytest.approx(potential(u, spec), rel=1e-12)

    def test_decreasing_in_radius(self, rng):
        g = Grid(2, 20.0, 64)
        us = schwarz_rearrange(smooth_random_field(g, rng))
        order = np.argsort(g.radius_sq_index().ravel(), kind="stable")
        assert np.all(np.diff(us.values.ravel()[order]) <= 0)

    def test_seminorm_does_not_grow_much(self, rng):
        g = Grid(2, 20.0, 64)
        for _ in range(5):
            u = Field(g, np.abs(smooth_random_field(g, rng).values))
            assert ds_seminorm_sq(schwarz_rearrange(u), 0.5) <= 1.05 * ds_seminorm_sq(u, 0.5)


class TestTent:
    def test_swap_odd(self):
        g = Grid(4, 12.0, 16)
        w = build_block_tent(g, BLOCK1, 1.5, 2.0, 3.5)
        assert antisymmetry_defect(w, BLOCK1) == 0.0
        assert np.max(w.values) == pytest.approx(2.0)

    def test_invariant_under_projection(self):
        g = Grid(4, 12.0, 16)
        w = build_block_tent(g, BLOCK1, 1.5, 2.0, 3.0)
        assert np.allclose(project(w, BLOCK1).values, w.values, rtol=0, atol=1e-14)

    def test_box_too_small(self):
        with pytest.raises(BoxTooSmall):
            build_block_tent(Grid(4, 6.0, 8), BLOCK1, 1.5, 2.0, 2.5)

    def test_needs_block_class(self):
        with pytest.raises(IncompatibleGrid):
            build_block_tent(Grid(4, 12.0, 8), RADIAL, 1.0, 1.0)

    def test_radius_search(self):
        g = Grid(4, 16.0, 16)
        spec = NonlinearitySpec(((-1, 1), (1, 2)), "zero")
        R, R_cut, w = choose_tent_radius(g, BLOCK1, 2.25, lambda u: potential(u, spec))
        assert potential(w, spec) > 0 and R_cut > R

    def test_radius_search_fails_in_small_box(self):
        g = Grid(4, 5.0, 8)
        with pytest.raises(BoxTooSmall):
            choose_tent_radius(g, BLOCK1, 1.0, lambda u: -1.0)
