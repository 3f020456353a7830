import math

import pytest

import kglab


def test_bessel_light_values():
    assert kglab.bessel_j(0, 0.0) == 1.0
    assert kglab.bessel_j(1, 2.0) == pytest.approx(0.5767248077568734, rel=1e-14)


def test_c1_inside_cone_is_yukawa():
    r = 2.0
    assert kglab.cosine_c1(r, 1.0) == pytest.approx(math.exp(-r) / (4 * math.pi * r), rel=1e-9)


def test_light_cone_value_and_wave_mass():
    assert kglab.sine_bessel_part(1.0, 1.0) == pytest.approx(-1 / (8 * math.pi), rel=1e-14)
    assert kglab.sine_wave_mass(1.0) == pytest.approx(1 / (4 * math.pi))


def test_fractional_kernel_range_error():
    v = kglab.fractional_kernel(1.25, "E", 1.0, 3.0)
    assert isinstance(v, complex)
    assert abs(v) <= 10 * kglab.fractional_bound(1.25, 1.0, 3.0)
    with pytest.raises(kglab.RangeError):
        kglab.fractional_kernel(2.6, "E", 1.0, 2.0)


def test_lorentz_norm_indicator():
    assert kglab.lorentz_norm([1.0] * 4, [0.25] * 4, "2") == pytest.approx(1.0)
    assert kglab.lorentz_norm([1.0] * 4, [1.0] * 4, "2,inf") == pytest.approx(2.0)


def test_bound_state_of_gaussian_well():
    mu = kglab.bound_states(-8.0, 1.0, R=30.0, N=511)
    assert len(mu) == 1
    assert mu[0] == pytest.approx(-1.5678, rel=2e-3)


def test_run_check_report():
    assert "semilinear" in kglab.check_names()
    rep = kglab.run_check("kernel-identity", {"radii": [1.0, 2.0]})
    assert rep["pass"] is True
    assert rep["paper_anchor"]
    assert rep["schema_version"] == 1
    with pytest.raises(kglab.ConfigError, match="kernel-identity.radius"):
        kglab.run_check("kernel-identity", {"radius": [1.0]})
