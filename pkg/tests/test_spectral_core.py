"""Unit tests for the spectral representation layer."""

import json
import math

import numpy as np
import pytest

from gbbm import (
    AliasError,
    DomainSpec,
    RangeError,
    SymmetryError,
    field_from_json,
    field_to_json,
    make_field,
    mean_integral,
    power,
    product,
    product_many,
    project_split,
    sobolev_norm,
    to_values,
    from_values,
    zero_field,
)


def cos_field(domain, n=1, amp=1.0):
    # amp*cos(n x / ell) has coefficient amp*sqrt(pi ell / 2) at +-n
    c = amp * math.sqrt(math.pi * domain.ell / 2.0)
    return make_field(domain, [(n, c), (-n, c)])


class TestDomainSpec:
    def test_basic_fields(self):
        dom = DomainSpec(K=8, ell=2.0, pad_factor=2.0)
        assert dom.n_modes == 17
        assert dom.grid_capacity == 34

    def test_frequencies(self):
        dom = DomainSpec(K=2, ell=4.0)
        np.testing.assert_allclose(dom.frequencies(), [-0.5, -0.25, 0, 0.25, 0.5])

    @pytest.mark.parametrize("kwargs", [dict(K=0), dict(K=4, ell=0.0), dict(K=4, pad_factor=0.5)])
    def test_invalid(self, kwargs):
        with pytest.raises(RangeError):
            DomainSpec(**kwargs)


class TestMakeField:
    def test_conjugate_autofill(self):
        dom = DomainSpec(K=4)
        f = make_field(dom, [(2, 1.0 + 2.0j)])
        assert f.coefficient(-2) == pytest.approx(1.0 - 2.0j)

    def test_symmetry_conflict(self):
        dom = DomainSpec(K=4)
        with pytest.raises(SymmetryError):
            make_field(dom, [(2, 1.0 + 2.0j), (-2, 1.0 + 2.0j)])

    def test_complex_mean_rejected(self):
        dom = DomainSpec(K=4)
        with pytest.raises(SymmetryError):
            make_field(dom, [(0, 1.0j)])

    def test_out_of_band(self):
        dom = DomainSpec(K=4)
        with pytest.raises(RangeError):
            make_field(dom, [(5, 1.0)])

    def test_zero_field(self):
        dom = DomainSpec(K=4)
        assert zero_field(dom).is_zero


class TestSobolevNorm:
    def test_cos_h0(self):
        dom = DomainSpec(K=4)
        assert sobolev_norm(cos_field(dom), 0.0) == pytest.approx(math.sqrt(math.pi))

    def test_cos_h1(self):
        dom = DomainSpec(K=4)
        assert sobolev_norm(cos_field(dom), 1.0) == pytest.approx(math.sqrt(2 * math.pi))

    def test_norm_stable_in_ell(self):
        # the 1/ell measure cancels the coefficient growth, so the norm
        # of cos(x/ell) is sqrt(pi) on every circle size
        for ell in (1.0, 8.0, 64.0):
            dom = DomainSpec(K=4, ell=ell)
            f = cos_field(dom)
            assert sobolev_norm(f, 0.0) == pytest.approx(math.sqrt(math.pi))

    def test_triangle_inequality(self):
        dom = DomainSpec(K=8)
        f = make_field(dom, [(1, 1.0 + 1.0j), (3, 0.5)])
        g = make_field(dom, [(2, 2.0), (3, -1.0j)])
        for s in (-0.5, 0.0, 1.0):
            assert sobolev_norm(f + g, s) <= sobolev_norm(f, s) + sobolev_norm(g, s) + 1e-12


class TestProjectSplit:
    def test_partition(self):
        dom = DomainSpec(K=8)
        f = make_field(dom, [(1, 1.0), (3, 2.0), (7, 1.0 + 1.0j)])
        low, high = project_split(f, 4)
        g = low + high
        for n in range(-8, 9):
            assert g.coefficient(n) == pytest.approx(f.coefficient(n))

    def test_strict_cut(self):
        dom = DomainSpec(K=8)
        f = make_field(dom, [(4, 1.0)])
        low, high = project_split(f, 4)
        assert low.is_zero
        assert high.coefficient(4) == pytest.approx(1.0)

    def test_pythagoras(self):
        dom = DomainSpec(K=8)
        f = make_field(dom, [(1, 1.0j), (5, 2.0), (0, 3.0)])
        low, high = project_split(f, 3)
        l2 = sobolev_norm(f, 0.0) ** 2
        assert sobolev_norm(low, 0.0) ** 2 + sobolev_norm(high, 0.0) ** 2 == pytest.approx(l2)


class TestValuesRoundTrip:
    @pytest.mark.parametrize("n_points", [17, 24, 64])
    def test_round_trip(self, n_points):
        dom = DomainSpec(K=8, ell=3.0)
        f = make_field(dom, [(1, 1.0 - 2.0j), (4, 0.3), (8, 1.0j)])
        g = from_values(to_values(f, n_points), dom)
        np.testing.assert_allclose(g.coeff, f.coeff, atol=1e-12)

    def test_values_are_real(self):
        dom = DomainSpec(K=4)
        vals = to_values(cos_field(dom), 32)
        assert np.isrealobj(vals)
        # cos(x) sampled at x_j = 2*pi*j/32
        x = 2 * math.pi * np.arange(32) / 32
        np.testing.assert_allclose(vals, np.cos(x), atol=1e-12)


class TestProducts:
    def test_cos_squared(self):
        # cos^2 x = 1/2 + cos(2x)/2
        dom = DomainSpec(K=8)
        f = cos_field(dom)
        g = product(f, f)
        assert g.coefficient(0) == pytest.approx(math.sqrt(math.pi / 2))
        assert g.coefficient(2) == pytest.approx(0.5 * math.sqrt(math.pi / 2))
        assert abs(g.coefficient(1)) < 1e-12

    def test_product_matches_convolution(self):
        rngf = np.random.default_rng(7)
        dom = DomainSpec(K=6)
        a = rngf.normal(size=7) + 1j * rngf.normal(size=7)
        a[0] = a[0].real
        f = make_field(dom, [(n, a[n]) for n in range(7)])
        b = rngf.normal(size=7) + 1j * rngf.normal(size=7)
        b[0] = b[0].real
        g = make_field(dom, [(n, b[n]) for n in range(7)])
        conv = np.convolve(f.coeff, g.coeff) / math.sqrt(2 * math.pi * dom.ell)
        h = product(f, g)
        # central 2K+1 window of the full convolution
        np.testing.assert_allclose(h.coeff, conv[6:19], atol=1e-10)

    def test_power_equals_repeated_product(self):
        dom = DomainSpec(K=16, pad_factor=2.0)
        f = make_field(dom, [(1, 0.7), (2, 0.1j), (5, -0.3)])
        cubed = power(f, 3)
        byhand = product(product(f, f), f)
        np.testing.assert_allclose(cubed.coeff, byhand.coeff, atol=1e-12)

    def test_alias_gate(self):
        dom = DomainSpec(K=16, pad_factor=1.0)
        f = make_field(dom, [(16, 1.0)])
        with pytest.raises(AliasError):
            power(f, 3)

    def test_product_many_matches_power(self):
        dom = DomainSpec(K=8, pad_factor=3.0)
        f = make_field(dom, [(1, 1.0), (3, 0.5j)])
        np.testing.assert_allclose(product_many([f, f, f]).coeff, power(f, 3).coeff, atol=1e-12)


class TestMeanIntegral:
    def test_constant(self):
        dom = DomainSpec(K=4, ell=2.0)
        # constant 3: coefficient sqrt(2 pi ell) * 3 at mode 0
        f = make_field(dom, [(0, 3.0 * math.sqrt(2 * math.pi * dom.ell))])
        # integral over the circle is 3 * 2 pi ell, divided by ell per convention
        assert mean_integral(f) == pytest.approx(6 * math.pi)

    def test_cos_integrates_to_zero(self):
        dom = DomainSpec(K=4)
        assert mean_integral(cos_field(dom)) == pytest.approx(0.0, abs=1e-14)

    def test_cos_squared_integral(self):
        dom = DomainSpec(K=4)
        assert mean_integral(power(cos_field(dom), 2)) == pytest.approx(math.pi)


class TestJsonRoundTrip:
    def test_round_trip(self):
        dom = DomainSpec(K=6, ell=2.5, pad_factor=2.0)
        f = make_field(dom, [(0, 1.5), (2, 1.0 - 0.5j), (6, 2.0j)])
        g = field_from_json(field_to_json(f))
        assert g.domain.K == dom.K
        assert g.domain.ell == dom.ell
        np.testing.assert_allclose(g.coeff, f.coeff, atol=0)

    def test_only_nonnegative_modes_stored(self):
        dom = DomainSpec(K=4)
        payload = json.loads(field_to_json(cos_field(dom)))
        assert all(entry[0] >= 0 for entry in payload["modes"])
