"""Grid, quadrature, Laplacian, rearrangement, and field serialization tests."""

import math

import numpy as np
import pytest

from lognls.grid import (Field, Grid, dirichlet_form, integrate,
                         laplacian_apply, read_field_csv,
                         rearrange_decreasing, sample_field, sample_potential,
                         write_field_csv)


@pytest.fixture(scope="module")
def g1():
    return Grid(1, 12.0, 1025)


@pytest.fixture(scope="module")
def g2():
    return Grid(2, 6.0, 65)


class TestGridValidation:
    def test_even_point_count_rejected(self):
        with pytest.raises(ValueError):
            Grid(1, 12.0, 1024)

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            Grid(1, 12.0, 1)

    def test_bad_dim_rejected(self):
        with pytest.raises(ValueError):
            Grid(3, 12.0, 9)

    def test_nodes_and_spacing(self, g1):
        assert g1.spacing == pytest.approx(24.0 / 1024)
        assert g1.axis[0] == -12.0 and g1.axis[-1] == 12.0
        assert g1.axis[512] == 0.0

    def test_field_shape_and_finiteness(self, g1):
        with pytest.raises(ValueError):
            Field(g1, np.ones(7))
        bad = np.ones(g1.shape)
        bad[0] = np.nan
        with pytest.raises(ValueError):
            Field(g1, bad)


class TestIntegrate:
    def test_constant_exact(self, g1):
        assert integrate(g1, Field(g1, np.ones(g1.shape))) == 24.0

    def test_gaussian_against_analytic(self, g1):
        f = sample_field(g1, lambda p: np.exp(-p[..., 0] ** 2))
        assert integrate(g1, f) == pytest.approx(math.sqrt(math.pi), abs=1e-10)

    def test_linearity(self, g1):
        rng = np.random.default_rng(0)
        f = Field(g1, rng.standard_normal(g1.shape))
        h = Field(g1, rng.standard_normal(g1.shape))
        combo = Field(g1, 2.5 * f.values - 1.25 * h.values)
        assert integrate(g1, combo) == pytest.approx(
            2.5 * integrate(g1, f) - 1.25 * integrate(g1, h), rel=1e-12, abs=1e-12)

    def test_even_field_twice_half_domain(self, g1):
        f = sample_field(g1, lambda p: np.cos(p[..., 0]) ** 2)
        w = g1.weights
        mid = g1.points_per_axis // 2
        half = float(np.sum((w * f.values)[mid + 1:])) + 0.5 * float((w * f.values)[mid])
        assert integrate(g1, f) == pytest.approx(2.0 * half, rel=1e-13)

    def test_constant_2d(self, g2):
        assert integrate(g2, Field(g2, np.ones(g2.shape))) == pytest.approx(144.0, rel=1e-13)


class TestLaplacian:
    def test_constant_interior_zero(self, g1):
        out = laplacian_apply(g1, Field(g1, np.ones(g1.shape)))
        assert np.max(np.abs(out.values[1:-1])) == 0.0
        assert out.values[0] != 0.0  # boundary sees the Dirichlet exterior

    def test_sine_eigenfield_interior(self, g1):
        L = g1.half_width
        u = sample_field(g1, lambda p: np.sin(math.pi * p[..., 0] / L))
        out = laplacian_apply(g1, u)
        k2 = (math.pi / L) ** 2
        margin = 8
        err = np.max(np.abs(out.values[margin:-margin] - k2 * u.values[margin:-margin]))
        assert err <= 1e-3 * k2  # O(h^2) at h ~ 0.023

    def test_quadratic_interior_exact(self, g1):
        u = sample_field(g1, lambda p: p[..., 0] ** 2)
        out = laplacian_apply(g1, u)
        assert np.max(np.abs(out.values[2:-2] + 2.0)) <= 1e-9

    def test_symmetry_exact(self, g1):
        rng = np.random.default_rng(1)
        u = Field(g1, rng.standard_normal(g1.shape))
        v = Field(g1, rng.standard_normal(g1.shape))
        a = integrate(g1, Field(g1, u.values * laplacian_apply(g1, v).values))
        b = integrate(g1, Field(g1, v.values * laplacian_apply(g1, u).values))
        assert a == pytest.approx(b, rel=1e-12)

    def test_form_matches_operator(self, g1):
        rng = np.random.default_rng(2)
        u = Field(g1, rng.standard_normal(g1.shape))
        quad = integrate(g1, Field(g1, u.values * laplacian_apply(g1, u).values))
        assert dirichlet_form(g1, u) == pytest.approx(quad, rel=1e-12)

    def test_linearity(self, g1):
        rng = np.random.default_rng(3)
        u = rng.standard_normal(g1.shape)
        v = rng.standard_normal(g1.shape)
        lhs = laplacian_apply(g1, Field(g1, 2.0 * u - 3.0 * v)).values
        rhs = 2.0 * laplacian_apply(g1, Field(g1, u)).values - 3.0 * laplacian_apply(g1, Field(g1, v)).values
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-9)

    def test_2d_symmetry_and_form(self, g2):
        rng = np.random.default_rng(4)
        u = Field(g2, rng.standard_normal(g2.shape))
        v = Field(g2, rng.standard_normal(g2.shape))
        a = integrate(g2, Field(g2, u.values * laplacian_apply(g2, v).values))
        b = integrate(g2, Field(g2, v.values * laplacian_apply(g2, u).values))
        assert a == pytest.approx(b, rel=1e-11)
        quad = integrate(g2, Field(g2, u.values * laplacian_apply(g2, u).values))
        assert dirichlet_form(g2, u) == pytest.approx(quad, rel=1e-11)

    def test_grid_mismatch(self, g1):
        other = Grid(1, 12.0, 513)
        with pytest.raises(ValueError):
            laplacian_apply(g1, Field(other, np.ones(other.shape)))


class TestRearrange:
    def test_fixed_point(self, g1):
        u = sample_field(g1, lambda p: np.exp(-p[..., 0] ** 2))
        out = rearrange_decreasing(g1, u)
        assert np.array_equal(out.values, u.values)

    def test_multiset_preserved_and_idempotent(self, g1):
        rng = np.random.default_rng(5)
        u = Field(g1, np.abs(rng.standard_normal(g1.shape)))
        out = rearrange_decreasing(g1, u)
        assert np.array_equal(np.sort(out.values, axis=None),
                              np.sort(np.abs(u.values), axis=None))
        again = rearrange_decreasing(g1, out)
        assert np.array_equal(again.values, out.values)

    def test_integrals_preserved_on_decaying_field(self, g1):
        from lognls.nonlinearity import f1, f2
        u = sample_field(g1, lambda p: np.exp(-0.5 * (p[..., 0] - 1.7) ** 2))
        out = rearrange_decreasing(g1, u)
        for fn in (lambda v: v * v, f1, f2):
            before = integrate(g1, Field(g1, fn(u.values)))
            after = integrate(g1, Field(g1, fn(out.values)))
            assert after == pytest.approx(before, rel=1e-12, abs=1e-13)

    def test_gradient_decreases_on_two_bump_field(self, g1):
        x = g1.points[..., 0]
        u = Field(g1, np.exp(-2.0 * (x - 2.0) ** 2) + 0.6 * np.exp(-(x + 3.0) ** 2))
        out = rearrange_decreasing(g1, u)
        assert dirichlet_form(g1, out) <= dirichlet_form(g1, u) + 1e-6

    def test_2d_multiset_and_idempotence(self, g2):
        rng = np.random.default_rng(6)
        u = Field(g2, np.abs(rng.standard_normal(g2.shape)))
        out = rearrange_decreasing(g2, u)
        assert np.array_equal(np.sort(out.values, axis=None),
                              np.sort(u.values, axis=None))
        assert np.array_equal(rearrange_decreasing(g2, out).values, out.values)
        # peak moved to the origin
        peak = np.unravel_index(np.argmax(out.values), g2.shape)
        assert g2.node_radii[peak] == 0.0


class TestSamplePotential:
    def test_constant(self, g1):
        f = sample_potential(g1, lambda p: np.full(p.shape[:-1], 0.7), 0.5)
        assert np.all(f.values == 0.7)

    def test_eps_scaling(self, g1):
        f = sample_potential(g1, lambda p: p[..., 0], 0.25)
        assert np.allclose(f.values, 0.25 * g1.axis)

    def test_eps_positive_required(self, g1):
        with pytest.raises(ValueError):
            sample_potential(g1, lambda p: p[..., 0], 0.0)


class TestFieldCsv:
    def test_roundtrip_1d(self, tmp_path, g1):
        rng = np.random.default_rng(7)
        u = Field(g1, rng.standard_normal(g1.shape))
        path = tmp_path / "f.csv"
        write_field_csv(u, path)
        back = read_field_csv(path, g1)
        assert np.array_equal(back.values, u.values)
        header = path.read_text().splitlines()[0]
        assert header == "index,x,value"

    def test_roundtrip_2d(self, tmp_path, g2):
        rng = np.random.default_rng(8)
        u = Field(g2, rng.standard_normal(g2.shape))
        path = tmp_path / "f2.csv"
        write_field_csv(u, path)
        back = read_field_csv(path, g2)
        assert np.array_equal(back.values, u.values)
        header = path.read_text().splitlines()[0]
        assert header == "index,x,y,value"

    def test_wrong_grid_rejected(self, tmp_path, g1):
        u = Field(g1, np.ones(g1.shape))
        path = tmp_path / "f.csv"
        write_field_csv(u, path)
        with pytest.raises(ValueError):
            read_field_csv(path, Grid(1, 12.0, 513))
