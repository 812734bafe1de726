import math

import numpy as np
import pytest

from starklp import ledger, poles
from starklp.errors import (ContourError, DegenerateResidueError, NoPoleError, SearchError,
                            TrackingError)
from starklp.model import ModelParams
from starklp.poles import (PoleMethod, certify, count_zeros, enumerate_roots, field_scan,
                           find_pole, find_pole_two_stage, g, g_prime, residue_at_pole,
                           residue_formula, scan_monotonicity)

from conftest import KAPPA_REF

ZERO = ModelParams(1.0, 0.0)


def test_g_trivial_limits(broad):
    z = np.array([0.3 - 0.2j, 5 + 1j])
    assert np.all(g(z, ZERO) == 1)
    assert g(0.0, broad) == pytest.approx(1 - 2 * math.sqrt(2 / math.pi) * (-1j * math.pi))
    assert abs(g(1e4j, broad) - 1) < 1e-3


def test_g_prime_finite_difference():
    p = ModelParams(1.0, 11.0)
    z, h = -4 - 1e-3j, 1e-6
    fd = (g(z + h, p) - g(z - h, p)) / (2 * h)
    assert abs(fd - g_prime(z, p)) <= 1e-6 * abs(g_prime(z, p))


def test_g_prime_linear_in_coupling():
    z = np.array([0.5 - 0.5j, -2 + 0.1j])
    assert np.all(g_prime(z, ZERO) == 0)
    np.testing.assert_allclose(g_prime(z, ModelParams(1.0, 4.0)), 2 * g_prime(z, ModelParams(1.0, 2.0)),
                               rtol=1e-15)


@pytest.mark.parametrize("lam,E", [(2.0, 1.0), (-2.0, 1.0), (2.0, 1.5), (KAPPA_REF, 1.0), (11.0, 1.0)])
def test_root_certificate(lam, E):
    p = ModelParams(E, lam)
    r = find_pole(p)
    assert r.converged and r.final_g_magnitude <= 1e-12 and r.z0.imag <= 0
    assert certify(r, p) == 1
    # at a root, 1 + i kappa w = 0 turns w' into a closed form: g'(z0) = 4 (z0 - lambda) / E^2
    assert abs(g_prime(r.z0, p) - 4 * (r.z0 - lam) / E**2) <= 1e-10 * abs(g_prime(r.z0, p))


def test_broad_pole_value(broad_pole):
    assert broad_pole.z0 == pytest.approx(2.1366486898843693 - 0.0009934084046670127j, abs=1e-13)
    assert broad_pole.method is PoleMethod.NEWTON_DIRECT


def test_zero_coupling_has_no_pole():
    for fn in (lambda: find_pole(ZERO), lambda: find_pole(ZERO, 1 + 0j), lambda: find_pole_two_stage(ZERO)):
        with pytest.raises(NoPoleError):
            fn()


def test_search_error_carries_trajectory(broad):
    with pytest.raises(SearchError) as info:
        find_pole(broad, seed=-5j)
    assert len(info.value.trajectory) >= 2
    with pytest.raises(SearchError):
        find_pole(broad, seed=complex("nan"))


def test_pole_convention_reproduces_reference(narrow_ref):
    r = find_pole(narrow_ref)
    assert abs(r.z0.real - (-4.446)) <= 1e-3
    assert 1e-17 <= abs(r.z0.imag) <= 1e-15
    assert r.method is PoleMethod.TWO_STAGE
    # the literal reading lambda = 11 puts the narrow root on the other side of the spectrum
    lit = find_pole(ModelParams(1.0, 11.0))
    assert lit.z0.real == pytest.approx(11.022774623495572, abs=1e-12)
    assert ledger.entry("pole-convention").values["reproducing"] == ["kappa=-11"]


def test_parity_between_couplings():
    a = find_pole(ModelParams(1.0, 2.0)).z0
    b = find_pole(ModelParams(1.0, -2.0)).z0
    assert b == pytest.approx(-np.conj(a), abs=1e-13)


def test_two_stage_width_order():
    p = ModelParams(1.0, 11.0)
    r = find_pole_two_stage(p)
    x0 = r.trajectory[0].real
    order = math.pi * p.strength * math.exp(-2 * x0**2) / abs(g_prime(x0, p))
    assert r.z0.imag < 0
    assert 0.1 < abs(r.z0.imag) / order < 10
    assert r.method is PoleMethod.TWO_STAGE


@pytest.mark.parametrize("lam", [11.0, KAPPA_REF, -11.0])
def test_newton_and_two_stage_agree(lam):
    p = ModelParams(1.0, lam)
    a = find_pole(p, find_pole_two_stage(p).z0 + 1e-3, method="newton")
    b = find_pole_two_stage(p)
    assert a.converged and b.converged
    assert abs(abs(a.z0) - abs(b.z0)) <= 1e-10 * abs(b.z0)


def test_two_stage_flags_broad_root_unconverged(broad):
    # one off-axis step is first-order only; it is not a converged root for a broad resonance
    assert not find_pole_two_stage(broad).converged


def test_two_stage_needs_sign_change(broad):
    with pytest.raises(SearchError):
        find_pole_two_stage(broad, window=(5.0, 6.0))


def test_count_zeros(broad, broad_pole):
    assert count_zeros(ZERO, -1 - 1j, 1 + 1j) == 0
    d = 0.05 + 0.05j
    assert count_zeros(broad, broad_pole.z0 - d, broad_pole.z0 + d) == 1
    assert count_zeros(broad, -5 + 1j, 5 + 5j) == 0


def test_count_zeros_contour_touch(broad, broad_pole):
    z0 = broad_pole.z0
    with pytest.raises(ContourError):
        count_zeros(broad, complex(z0.real - 0.1, z0.imag), complex(z0.real + 0.1, z0.imag + 0.1))


def test_enumerate_roots_window():
    roots, total = enumerate_roots(ModelParams(1.0, 11.0), -15 - 1j, 15 + 0.25j)
    assert total == len(roots) == 3
    assert all(r.final_g_magnitude <= 1e-12 for r in roots)
    assert roots[-1].z0.real == pytest.approx(11.0227746, abs=1e-6)


def test_residue_formula_vs_contour(broad, broad_pole):
    rep = residue_at_pole(broad_pole, broad)
    closed = complex(-(2j * math.pi) * broad.strength * np.exp(-2 * broad_pole.z0**2)
                     / g_prime(broad_pole.z0, broad))
    assert abs(rep.contour - closed) <= 1e-8 * abs(closed)
    # printed prefactor differs by -16 / E^4; the discrepancy sits in the ledger with both values
    assert rep.ratio == pytest.approx(-16.0, rel=1e-10)
    vals = ledger.entry("residue-prefactor").values
    assert vals["formula"] == pytest.approx([rep.formula.real, rep.formula.imag], rel=1e-5)
    assert vals["contour"] == pytest.approx([rep.contour.real, rep.contour.imag], rel=1e-5)


def test_residue_field_scaling():
    p = ModelParams(1.5, 2.0)
    rep = residue_at_pole(find_pole(p), p)
    assert rep.ratio == pytest.approx(-16.0 / 1.5**4, rel=1e-8)


def test_residue_vanishes_with_coupling():
    z = 0.5 - 0.1j
    vals = [abs(residue_formula(z, ModelParams(1.0, lam))) for lam in (1e-3, 1e-6, 1e-9)]
    assert vals[1] < 1e-2 * vals[0] and vals[2] < 1e-2 * vals[1]


def test_degenerate_residue():
    p = ModelParams(1.0, 2.0)
    with pytest.raises(DegenerateResidueError):
        residue_formula(2.0 + 0j, p)


def test_field_scan_reference_coupling():
    res = field_scan(KAPPA_REF, [0.5, 0.75, 1.0, 1.5, 2.0])
    stats = scan_monotonicity(res)
    assert stats["re_decreasing_violations"] == 0
    assert stats["abs_im_increasing_violations"] == 0


def test_field_scan_positive_coupling_moves_right():
    # Re z0 ~ lambda + E^2 / (4 lambda): the direction of travel follows the sign of lambda
    res = field_scan(2.0, [0.5, 1.0, 1.5])
    assert np.all(np.diff([r.z0.real for r in res]) > 0)


def test_single_element_scan(broad, broad_pole):
    (r,) = field_scan(2.0, [1.0])
    assert r.z0 == pytest.approx(broad_pole.z0, abs=1e-14)


def test_scan_validation():
    with pytest.raises(ValueError):
        field_scan(2.0, [1.0, 0.5])


def test_tracking_error(monkeypatch):
    real = poles.find_pole

    def jumpy(params, seed=None, **kw):
        r = real(params, seed, **kw)
        if params.E == 1.2:
            r.z0 = r.z0 - 3.0
        return r

    monkeypatch.setattr(poles, "find_pole", jumpy)
    with pytest.raises(TrackingError):
        field_scan(2.0, [1.0, 1.1, 1.2])


def test_certify_isolates_broad_roots(narrow_ref):
    roots, _ = enumerate_roots(narrow_ref, complex(-15.0, -1.0), complex(15.0, 0.25))
    assert [certify(r, narrow_ref) for r in roots] == [1, 1, 1]
