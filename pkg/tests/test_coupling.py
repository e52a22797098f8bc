import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from qdfiber import coupling
from qdfiber.coupling import SMF28, EtalonConfig, FiberSpec
from qdfiber.errors import DomainError, RangeError

W = st.floats(0.1, 20.0)
ANGLE = st.floats(0.5, 80.0)


def test_smf28_numerical_aperture():
    na = coupling.numerical_aperture(SMF28)
    assert na == pytest.approx(0.1204, abs=5e-5)
    assert na == pytest.approx(0.12039518262787760, rel=1e-14)


def test_acceptance_angle_matches_far_field_window():
    ang = coupling.acceptance_half_angle(SMF28)
    # asin(0.1204) = 6.9149 degrees; 6.92 is the same figure rounded up
    assert ang == pytest.approx(6.914910231967690, rel=1e-13)
    assert ang == pytest.approx(6.92, abs=1e-2)
    assert abs(ang - 7.0) <= 0.1


def test_v_number_and_warning():
    v = coupling.v_number(SMF28, 1237.0)
    assert v.value == pytest.approx(2.4889357616400339, rel=1e-13)
    assert v.multimode_warning  # above the 2.405 LP11 cutoff below ~1260 nm
    assert not coupling.v_number(SMF28, 1550.0).multimode_warning


def test_mode_field_radius_smf28():
    w = coupling.mode_field_radius(SMF28, 1237.0)
    assert w == pytest.approx(4.3729006097813051, rel=1e-13)
    assert w == pytest.approx(4.38, abs=0.01)


def test_marcuse_validity_gate():
    with pytest.raises(RangeError):
        coupling.mode_field_radius(SMF28, 700.0)  # V ~ 4.4
    with pytest.raises(RangeError):
        coupling.mode_field_radius(SMF28, 5000.0)  # V ~ 0.6


def test_fiber_spec_invariants():
    with pytest.raises(DomainError):
        FiberSpec(4.0, 1.44, 1.45)
    with pytest.raises(DomainError):
        FiberSpec(-1.0, 1.452, 1.447)


@pytest.mark.parametrize("frac,theta,theta0,tol", [
    (0.60, 7.0, 10.34, 5e-3),
    (1 - math.exp(-2), 7.0, 7.0, 1e-12),
    (0.86, 7.0, 7.06, 5e-3),
])
def test_divergence_examples(frac, theta, theta0, tol):
    assert coupling.divergence_from_enclosed_fraction(frac, theta) == pytest.approx(theta0, abs=tol)


def test_enclosed_fraction_examples():
    theta0 = coupling.divergence_from_enclosed_fraction(0.60, 7.0)
    assert theta0 == pytest.approx(10.341806102313781, rel=1e-13)
    assert coupling.enclosed_power_fraction(theta0, 7.0) == pytest.approx(0.60, rel=1e-12)
    assert coupling.enclosed_power_fraction(10.34, 7.0) == pytest.approx(0.60, abs=5e-3)
    assert coupling.enclosed_power_fraction(12.0, 12.0) == pytest.approx(1 - math.exp(-2), rel=1e-15)
    assert coupling.enclosed_power_fraction(10.0, 30.0) == pytest.approx(1 - math.exp(-18), rel=1e-15)


@pytest.mark.parametrize("args", [(0.0, 7.0), (1.0, 7.0), (0.5, 0.0), (0.5, 90.0)])
def test_divergence_domain(args):
    with pytest.raises(DomainError):
        coupling.divergence_from_enclosed_fraction(*args)


@given(st.floats(0.01, 0.99), st.floats(0.5, 40.0))
def test_fraction_roundtrip(frac, theta):
    theta0 = coupling.divergence_from_enclosed_fraction(frac, theta)
    assume(theta0 < 90)
    assert coupling.enclosed_power_fraction(theta0, theta) == pytest.approx(frac, rel=1e-12)


@given(st.floats(1.0, 60.0), ANGLE, st.floats(0.01, 5.0))
def test_fraction_increasing_in_theta(theta0, theta, step):
    assume(theta + step < 90)
    assert coupling.enclosed_power_fraction(theta0, theta + step) >= coupling.enclosed_power_fraction(theta0, theta)


def test_waist_examples():
    theta0 = coupling.divergence_from_enclosed_fraction(0.60, 7.0)
    w = coupling.waist_from_divergence(theta0, 1237.0)
    assert w == pytest.approx(2.18, abs=5e-3)
    assert w == pytest.approx(2.1814540445460026, rel=1e-13)
    assert coupling.waist_from_divergence(theta0 / 2, 1237.0) == pytest.approx(2 * w, rel=1e-15)
    assert coupling.waist_from_divergence(5.0, 1550.0) == pytest.approx(5.65, abs=5e-3)
    with pytest.raises(RangeError):
        coupling.waist_from_divergence(35.0, 1237.0)


def test_overlap_examples():
    assert coupling.gaussian_overlap(3.0, 3.0, 0.0) == 1.0
    assert coupling.gaussian_overlap(3.0, 3.0, 3.0) == pytest.approx(math.exp(-1), rel=1e-15)
    # the two-decimal waists give 0.6365; the unrounded chain gives 0.6382
    assert coupling.gaussian_overlap(2.18, 4.38, 0.0) == pytest.approx(0.63648623717065, rel=1e-12)
    assert coupling.gaussian_overlap(2.18, 4.38, 0.0) == pytest.approx(0.637, abs=1e-3)


def test_overlap_of_computed_waists():
    theta0 = coupling.divergence_from_enclosed_fraction(0.60, 7.0)
    w_beam = coupling.waist_from_divergence(theta0, 1237.0)
    eta = coupling.gaussian_overlap(w_beam, coupling.mode_field_radius(SMF28, 1237.0))
    # computed V = 2.489 gives 0.6382; the two-decimal waists give 0.6365
    assert eta == pytest.approx(0.63824330763896929, rel=1e-12)
    assert 0.50 <= eta <= 0.72


@given(W, W, st.floats(0.0, 30.0))
def test_overlap_symmetric_and_bounded(w1, w2, d):
    eta = coupling.gaussian_overlap(w1, w2, d)
    assert eta == coupling.gaussian_overlap(w2, w1, d)
    assert 0.0 <= eta <= 1.0
    if w1 != w2 or d > 0:
        assert eta < 1.0 or math.isclose(w1, w2, rel_tol=1e-7) and d < 1e-7


def test_overlap_domain():
    with pytest.raises(DomainError):
        coupling.gaussian_overlap(0.0, 1.0)
    with pytest.raises(DomainError):
        coupling.gaussian_overlap(1.0, 1.0, -0.5)


def test_half_coupling_offset():
    d = coupling.half_coupling_offset(2.18, 4.38)
    assert d == pytest.approx(2.88, abs=5e-3)
    ratio = coupling.gaussian_overlap(2.18, 4.38, d) / coupling.gaussian_overlap(2.18, 4.38, 0.0)
    assert ratio == pytest.approx(0.5, rel=1e-14)


def test_cavity_offset_curve():
    grid = np.linspace(-6, 6, 121)
    x, eta = coupling.coupling_vs_cavity_offset(2.18, 4.38, grid)
    eta0 = coupling.gaussian_overlap(2.18, 4.38, 0.0)
    assert np.all(np.isfinite(eta)) and eta.size == grid.size
    assert eta[60] == eta0
    assert np.allclose(eta / eta0, np.exp(-2 * x**2 / (2.18**2 + 4.38**2)), rtol=1e-14)
    order = np.argsort(np.abs(x), kind="stable")
    assert np.all(np.diff(eta[order]) <= 0)


def test_dipole_offset_curve():
    x, rel = coupling.coupling_vs_dipole_offset(0.618, np.array([0.0, 0.309, 0.618]))
    assert rel[0] == 1.0
    assert rel[1] == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert rel[2] == pytest.approx(math.exp(-2), rel=1e-15)
    with pytest.raises(DomainError):
        coupling.coupling_vs_dipole_offset(0.0, [0.0, 1.0])
    with pytest.raises(DomainError):
        coupling.coupling_vs_dipole_offset(1.0, [1.0, 0.0])


def test_etalon_default_phase_puts_maximum_at_800nm():
    phase = coupling.default_phase_offset(800.0, 1237.0)
    et = EtalonConfig(800.0, 0.3, phase)
    assert coupling.electrode_etalon_factor(et, 1237.0) == pytest.approx(1.0, abs=1e-12)
    g = np.linspace(100, 2000, 19001)
    m = coupling.electrode_etalon_factor(et, 1237.0, gap=g)
    assert m.max() <= 1.0 + 1e-12
    assert m.min() >= 0.7 / 1.3 - 1e-12
    assert m.min() == pytest.approx(0.7 / 1.3, abs=1e-6)


def test_etalon_without_reflection_is_flat():
    et = EtalonConfig(800.0, 0.0, 0.4)
    m = coupling.electrode_etalon_factor(et, 1237.0, gap=np.linspace(100, 2000, 50))
    assert np.all(m == 1.0)


@given(st.floats(0.0, 0.99), st.floats(50.0, 3000.0), st.floats(-math.pi, math.pi))
def test_etalon_half_wave_period(r, g, phase):
    et = EtalonConfig(800.0, r, phase)
    a = coupling.electrode_etalon_factor(et, 1237.0, gap=g)
    b = coupling.electrode_etalon_factor(et, 1237.0, gap=g + 1237.0 / 2)
    assert b == pytest.approx(a, rel=1e-9)
    assert (1 - r) / (1 + r) - 1e-12 <= a <= 1.0 + 1e-12


def test_etalon_invariants():
    with pytest.raises(DomainError):
        EtalonConfig(800.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        EtalonConfig(-1.0, 0.3, 0.0)
    with pytest.raises(DomainError):
        EtalonConfig(800.0, 0.3, math.inf)
