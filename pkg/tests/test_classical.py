import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import gamma as Gamma

from rplscl import classical as cl
from rplscl.classical import PoLabel, PotentialConfig
from rplscl.errors import NoRealRootError, OrbitNotFoundError

# mpmath oracle values (30 digits, tanh-sinh quadrature between findroot
# turning points), alpha=6, E=1, L=L_C/2 unless stated otherwise
IR_A6_HALF = 0.186732856001909981641758216826
RATIO_A6_HALF = 0.419249173668544900326527000133
K_A6_HALF = 0.159097557823320739723885766948
LSTAR_A8_31 = 0.91791797120166379940847492992


def ho_tps(L):
    # 2(1 - r^2) = L^2 / r^2 is a quadratic in r^2
    d = math.sqrt(1.0 - 2.0 * L * L)
    return math.sqrt((1 - d) / 2), math.sqrt((1 + d) / 2)


@pytest.fixture
def a6():
    return PotentialConfig(6.0)


def test_config_rejects_bad_alpha():
    for bad in (1.9, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            PotentialConfig(bad)


def test_label_validation_and_str():
    assert str(PoLabel.polygon(3, 1)) == "1P(3,1)"
    assert str(PoLabel.circle(2)) == "2C"
    with pytest.raises(ValueError):
        PoLabel.polygon(2, 1)
    with pytest.raises(ValueError):
        PoLabel.circle(0)


def test_turning_points_examples():
    assert cl.turning_points(PotentialConfig(4.0), 1.0, 0.0) == pytest.approx((0.0, 1.0), abs=1e-14)
    r1, r2 = cl.turning_points(PotentialConfig(2.0), 1.0, 0.5)
    assert (r1, r2) == pytest.approx((0.38268343236509, 0.92387953251129), rel=1e-12)
    assert (r1, r2) == pytest.approx(ho_tps(0.5), rel=1e-13)


def test_turning_points_at_circle(a6):
    rc, LC = cl.circle_radius(a6, 1.0), cl.circle_L(a6, 1.0)
    assert cl.turning_points(a6, 1.0, LC) == pytest.approx((rc, rc), rel=1e-12)
    with pytest.raises(NoRealRootError):
        cl.turning_points(a6, 1.0, 1.01 * LC)


@pytest.mark.parametrize("L", [0.0, 0.2, 0.5, 0.69])
def test_ho_radial_action_closed_form(L):
    ho = PotentialConfig(2.0)
    assert cl.radial_action(ho, 1.0, L) == pytest.approx((1 / math.sqrt(2) - L) / 2, abs=1e-13)
    assert cl.omega_ratio(ho, 1.0, L) == pytest.approx(0.5, abs=1e-13)
    assert cl.radial_period(ho, 1.0, L) == pytest.approx(math.pi / math.sqrt(2), rel=1e-12)


def test_radial_action_at_circle_is_zero(a6):
    assert cl.radial_action(a6, 1.0, cl.circle_L(a6, 1.0)) == pytest.approx(0.0, abs=1e-14)


def test_against_mpmath_oracle(a6):
    L = 0.5 * cl.circle_L(a6, 1.0)
    assert cl.radial_action(a6, 1.0, L) == pytest.approx(IR_A6_HALF, rel=1e-12)
    assert cl.omega_ratio(a6, 1.0, L) == pytest.approx(RATIO_A6_HALF, rel=1e-12)
    assert cl.curvature_num(a6, 1.0, L) == pytest.approx(K_A6_HALF, rel=1e-9)


@pytest.mark.parametrize("alpha,L", [(3.0, 0.3), (5.5, 0.7), (8.0, 0.1)])
def test_radial_action_against_scipy_quad(alpha, L):
    cfg = PotentialConfig(alpha)
    r1, r2 = cl.turning_points(cfg, 1.0, L)
    f = lambda r: math.sqrt(max(2 * (1 - r ** alpha) - L * L / (r * r), 0.0))
    ref = quad(f, r1, r2, epsabs=1e-14, epsrel=1e-13, limit=400)[0] / math.pi
    assert cl.radial_action(cfg, 1.0, L) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("alpha", [2.5, 4.0, 6.0, 7.0, 10.0])
def test_ratio_limit_at_circle(alpha):
    cfg = PotentialConfig(alpha)
    LC = cl.circle_L(cfg, 1.0)
    assert cl.omega_ratio(cfg, 1.0, LC) == pytest.approx(1 / math.sqrt(alpha + 2), rel=1e-12)
    assert cl.omega_ratio(cfg, 1.0, LC * (1 - 1e-6)) == pytest.approx(1 / math.sqrt(alpha + 2), rel=1e-5)


def test_bifurcation_alpha():
    assert cl.bifurcation_alpha(3, 1) == 7.0
    assert cl.bifurcation_alpha(4, 1) == 14.0
    assert cl.bifurcation_alpha(7, 3) == pytest.approx(49 / 9 - 2, rel=1e-15)
    with pytest.raises(ValueError):
        cl.bifurcation_alpha(2, 1)


def test_find_po_golden():
    p = cl.find_po(PotentialConfig(8.0), 1.0, 3, 1)
    assert p.L_star == pytest.approx(LSTAR_A8_31, rel=1e-12)
    assert p.tau == pytest.approx(6.48016151627588, rel=1e-11)
    assert p.K == pytest.approx(0.155824788854094, rel=1e-8)
    assert p.T == pytest.approx(4.05010094767242, rel=1e-11)
    assert p.maslov == 13
    assert p.phi_D == pytest.approx(-math.pi / 2)


def test_find_po_at_bifurcation_is_circle():
    cfg = PotentialConfig(7.0)
    p = cl.find_po(cfg, 1.0, 3, 1)
    assert p.L_star == pytest.approx(cl.circle_L(cfg, 1.0), rel=1e-12)
    assert p.tau == pytest.approx(cl.circle_orbit(cfg, 1.0).tau, rel=1e-12)
    assert p.maslov == 13


def test_find_po_missing_family():
    with pytest.raises(OrbitNotFoundError):
        cl.find_po(PotentialConfig(6.0), 1.0, 3, 1)


def test_circle_data():
    ho = cl.circle_orbit(PotentialConfig(2.0), 1.0)
    assert ho.r_C == pytest.approx(math.sqrt(0.5), rel=1e-14)
    assert ho.L_C == pytest.approx(math.sqrt(0.5), rel=1e-14)
    assert cl.curvature_circle(PotentialConfig(2.0), 1.0) == 0.0
    c7 = cl.circle_orbit(PotentialConfig(7.0), 1.0)
    assert c7.F == pytest.approx(0.0, abs=1e-12)
    assert c7.r_C == pytest.approx((2 / 9) ** (1 / 7), rel=1e-13)
    assert c7.L_C == pytest.approx(1.00607, rel=1e-5)
    assert c7.tau == pytest.approx(2 * math.pi * c7.L_C, rel=1e-13)


def test_curvature_num_near_circle_matches_closed_form_magnitude():
    # the closed form carries a negative sign; d^2 I_r / dL^2 itself is positive
    cfg = PotentialConfig(7.0)
    LC = cl.circle_L(cfg, 1.0)
    kc = cl.curvature_circle(cfg, 1.0)
    assert kc == pytest.approx(-40 / (324 * LC), rel=1e-13)
    assert cl.curvature_num(cfg, 1.0, LC * (1 - 1e-9)) == pytest.approx(-kc, rel=1e-6)
    assert cl.curvature_circle_limit(cfg, 1.0) == pytest.approx(-kc, rel=1e-13)


def test_curvature_ho_is_zero():
    assert cl.curvature_num(PotentialConfig(2.0), 1.0, 0.3) == pytest.approx(0.0, abs=1e-9)


def test_diameter_data():
    ho = cl.diameter_orbit(PotentialConfig(2.0), 1.0)
    assert ho.T / 2 == pytest.approx(math.pi / math.sqrt(2), rel=1e-12)
    assert ho.K == 0.0
    kd = Gamma(0.75) / (Gamma(0.25) * math.sqrt(2 * math.pi))
    assert kd == pytest.approx(0.134838, abs=1e-6)
    assert cl.diameter_orbit(PotentialConfig(4.0), 1.0).K == pytest.approx(kd, rel=1e-12)


def test_scaling_helpers():
    assert cl.scaled_energy(2.0, 4.0) == pytest.approx(4.0)
    eps, dE = cl.scaled_quantities(PotentialConfig(6.0), 1.0)
    assert (eps, dE) == pytest.approx((1.0, 1.5))


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(2.5, 12.0), s=st.floats(0.2, 20.0))
def test_scaling_invariants(alpha, s):
    cfg = PotentialConfig(alpha)
    assert cl.circle_radius(cfg, s) == pytest.approx(s ** (1 / alpha) * cl.circle_radius(cfg, 1.0), rel=1e-12)
    eps = cl.scaled_energy(alpha, s)
    assert cl.energy_from_scaled(alpha, eps) == pytest.approx(s, rel=1e-12)
    assert cl.circle_L(cfg, s) == pytest.approx(eps * cl.circle_L(cfg, 1.0), rel=1e-12)


def test_scale_po_matches_direct_evaluation():
    cfg = PotentialConfig(8.0)
    p1 = cl.find_po(cfg, 1.0, 3, 1)
    E = 3.0
    direct = cl.find_po(cfg, E, 3, 1)
    scaled = cl.scale_po(p1, cl.scaled_energy(8.0, E))
    for f in ("L_star", "T", "K", "omega_r", "L_C", "r_C", "action"):
        assert float(getattr(scaled, f)) == pytest.approx(getattr(direct, f), rel=1e-9), f
    assert float(scaled.tau) == pytest.approx(direct.tau, rel=1e-12)


def test_closed_orbit_phase_at_circle():
    cfg = PotentialConfig(7.2)
    rc = cl.circle_radius(cfg, 1.0)
    val = cl.closed_orbit_phase(cfg, 1.0, 1, 3, 1, rc)
    assert val == pytest.approx(2 * math.pi * cl.circle_L(cfg, 1.0), rel=1e-14)
    # continuity just off the circle
    near = cl.closed_orbit_phase(cfg, 1.0, 1, 3, 1, rc * (1 + 1e-4))
    assert near == pytest.approx(val, rel=1e-6)


def test_closed_orbit_third_derivative_golden():
    d2, d3 = cl.closed_orbit_derivatives(PotentialConfig(7.2), 1.0, 1, 3, 1)
    assert d2 == pytest.approx(-0.980552344590079, rel=1e-5)
    assert d3 == pytest.approx(-10.038293338140507, rel=1e-4)


def test_closed_orbit_phase_stationary_on_daughter_turning_point():
    # past the bifurcation the outer turning point of the polygon family is a
    # closed orbit: the phase tends to the polygon action quadratically
    cfg = PotentialConfig(8.0)
    p = cl.find_po(cfg, 1.0, 3, 1)
    r2 = p.r_turn[1]
    dev = [cl.closed_orbit_phase(cfg, 1.0, 1, 3, 1, r2 * (1 - d)) - p.action for d in (2.5e-4, 5e-4)]
    assert dev[0] > 0
    assert dev[1] / dev[0] == pytest.approx(4.0, rel=0.05)


def test_catalogue_sorted_and_complete():
    cat = cl.po_catalogue(PotentialConfig(8.0), 13.0)
    taus = [p.tau for p in cat]
    assert taus == sorted(taus)
    names = {str(p.label) for p in cat}
    assert {"1D", "1C", "1P(3,1)", "2D", "2C"} <= names
    assert "1P(4,1)" not in names  # born at alpha=14
