import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from starklp import kernels
from starklp.cerf import dawson, erfc_complex, faddeeva_w, faddeeva_w_prime
from starklp.errors import DomainError, ScaledFormRequired


def _oracle_points(oracle):
    z = np.array([complex(float(r["re"]), float(r["im"])) for r in oracle["w"]])
    w = np.array([complex(float(r["w_re"]), float(r["w_im"])) for r in oracle["w"]])
    return z, w


def rel(a, b):
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)


def test_fixture_accuracy(cerf_oracle):
    z, w = _oracle_points(cerf_oracle)
    assert len(z) == 200 and np.max(np.abs(z)) <= 30.0
    assert np.max(rel(faddeeva_w(z), w)) <= 1e-12


def test_backends_agree(cerf_oracle):
    z, w = _oracle_points(cerf_oracle)
    a = kernels.faddeeva(z)
    b = kernels.numpy_impl.faddeeva(z)
    assert np.max(rel(a, b)) <= 1e-13
    assert np.max(rel(b, w)) <= 1e-12


def test_real_point_fixture(cerf_oracle):
    z, w = _oracle_points(cerf_oracle)
    k = int(np.argmin(np.abs(z - (-6.288))))
    assert z[k] == -6.288
    assert rel(faddeeva_w(-6.288), w[k]) <= 1e-12


def test_origin():
    assert faddeeva_w(0.0) == 1.0
    assert faddeeva_w(0j) == 1.0


def test_reflection_at_1_plus_1i():
    z = 1 + 1j
    lhs = faddeeva_w(z) + faddeeva_w(-z)
    assert abs(lhs - 2 * cmath.exp(-z * z)) <= 1e-13 * abs(2 * cmath.exp(-z * z))


def test_conjugation_symmetry():
    rng = np.random.default_rng(1)
    r = 20.0 * np.sqrt(rng.uniform(0, 1, 1000))
    z = r * np.exp(2j * np.pi * rng.uniform(0, 1, 1000))
    # keep points where w is representable
    z = z[-(z.real - z.imag) * (z.real + z.imag) < 700]
    assert np.max(rel(faddeeva_w(-np.conj(z)), np.conj(faddeeva_w(z)))) <= 1e-12


def test_reflection_identity():
    rng = np.random.default_rng(2)
    z = rng.uniform(-5, 5, 500) + 1j * rng.uniform(-5, 5, 500)
    e = np.exp(-z * z)
    lhs = faddeeva_w(z) + faddeeva_w(-z)
    scale = np.maximum(np.abs(e), np.abs(faddeeva_w(z)))
    assert np.max(np.abs(lhs - 2 * e) / scale) <= 1e-12


@pytest.mark.parametrize("z", [0.3 + 0.2j, -2.5 + 1.0j, 4.0 + 0.5j, 1.5 - 0.7j, 8.0 + 3.0j])
def test_derivative_identity(z):
    h = 1e-5
    fd = (faddeeva_w(z + h) - faddeeva_w(z - h)) / (2 * h)
    an = faddeeva_w_prime(z)
    assert abs(fd - an) <= 1e-6 * abs(an)


@settings(max_examples=300, deadline=None)
@given(st.floats(-25, 25), st.floats(1e-6, 25))
def test_upper_half_plane_positivity(x, y):
    assert faddeeva_w(complex(x, y)).real > 0


@settings(max_examples=200, deadline=None)
@given(st.floats(-30, 30))
def test_real_axis_real_part_is_gaussian(x):
    assert faddeeva_w(x).real == pytest.approx(math.exp(-x * x), rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("bad", [complex(np.nan, 0), complex(np.inf, 1), complex(0, -np.inf)])
def test_nonfinite_rejected(bad):
    with pytest.raises(DomainError):
        faddeeva_w(bad)


def test_lower_half_plane_overflow_is_explicit():
    with pytest.raises(ScaledFormRequired):
        faddeeva_w(-40j)


def test_shape_preserved():
    z = np.zeros((3, 4), dtype=complex)
    assert faddeeva_w(z).shape == (3, 4)
    assert isinstance(faddeeva_w(0.5), complex)


# erfc ----------------------------------------------------------------------

def test_erfc_origin():
    assert erfc_complex(0.0) == 1.0


def test_erfc_reflection():
    z = 0.5 + 0.25j
    assert abs(erfc_complex(z) + erfc_complex(-z) - 2.0) <= 1e-14


def test_erfc_real_fixtures(cerf_oracle):
    for rec in cerf_oracle["erfc"]:
        assert rel(erfc_complex(float(rec["x"])), float(rec["value"])) <= 1e-12


def test_erfc_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 30
    for z in (0.3 + 0.4j, 1.2 - 2.0j, -2.0 + 0.5j, 3.0 + 3.0j, -0.7 - 1.1j):
        ref = complex(mpmath.erfc(mpmath.mpc(z)))
        assert rel(erfc_complex(z), ref) <= 1e-12


def test_erfc_scaled_consistency():
    z = np.array([0.2 + 0.1j, 1.5 + 0.3j, 2.5 - 1.0j])
    assert np.max(rel(erfc_complex(z), np.exp(-z * z) * faddeeva_w(1j * z))) <= 1e-12


def test_erfc_overflow_points_to_scaled_form():
    with pytest.raises(ScaledFormRequired, match="faddeeva_w"):
        erfc_complex(30j)


# dawson --------------------------------------------------------------------

def test_dawson_origin_and_oddness():
    assert dawson(0.0) == 0.0
    assert dawson(-1.7) == -dawson(1.7)


def test_dawson_asymptotic_fixture(cerf_oracle):
    rec = cerf_oracle["dawson"][0]
    x = float(rec["x"])
    assert rel(dawson(x), float(rec["value"])) <= 1e-12
    # leading asymptotic terms
    assert dawson(x) == pytest.approx(1 / (2 * x) + 1 / (4 * x**3), rel=1e-4)


def test_dawson_against_quadrature():
    from scipy import integrate
    x = 1.3
    ref = math.exp(-x * x) * integrate.quad(lambda t: math.exp(t * t), 0, x, epsabs=1e-16, epsrel=1e-13)[0]
    assert rel(dawson(x), ref) <= 1e-12


def test_dawson_nonfinite():
    with pytest.raises(DomainError):
        dawson(float("nan"))
