import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rplscl import specfun as sf
from rplscl.errors import AccuracyError
from rplscl.specfun import CatastropheParams, ComplexValue

# mpmath oracles at 30 digits
ERF_0_1PI = complex(1.31615128169794764488027108024, 0.190453469237834686284108861969)
AI0 = 0.355028053887817239260063186004
GI0 = 0.204975542482000245050307456365
# (1/pi) int_{-2}^{2} cos(z^3/3 - z) dz ; the sine part vanishes by symmetry
AI_W1_PM2 = 1.13953550142847717908696108365

finite = st.floats(-6, 6, allow_nan=False)


def test_complex_value_rejects_nonfinite():
    with pytest.raises(ArithmeticError):
        ComplexValue(complex(float("nan"), 0))
    v = ComplexValue(1j)
    assert (v.re, v.im, v.phase) == (0.0, 1.0, pytest.approx(math.pi / 2))


def test_erf_examples():
    assert erf_close(sf.erf_two_limit(0.0, math.inf), 1.0)
    assert sf.erf_two_limit(0.3 + 0.2j, 0.3 + 0.2j) == 0
    assert erf_close(sf.erf_two_limit(0.0, 1 + 1j), ERF_0_1PI)


def erf_close(a, b, tol=1e-12):
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(b)))


@pytest.mark.parametrize("z", [0.5 + 0.5j, 3 - 4j, 10 * cmath.exp(0.25j * math.pi), 25 * cmath.exp(-0.25j * math.pi),
                               -7 + 0.1j, 29.0])
def test_erf_against_mpmath(z):
    ref = complex(mp.erf(mp.mpc(z.real if isinstance(z, complex) else z, z.imag if isinstance(z, complex) else 0)))
    got = complex(sf.erf_two_limit(0.0, z))
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_erf_far_limits_use_complement():
    # erf(6) - erf(5) is ~1.5e-12; naive subtraction loses it entirely
    ref = float(mp.erfc(5) - mp.erfc(6))
    assert sf.erf_two_limit(5.0, 6.0).real == pytest.approx(ref, rel=1e-10)
    ref = complex(mp.erfc(mp.mpc(4, 1)) - mp.erfc(mp.mpc(5, 1)))
    assert abs(complex(sf.erf_two_limit(4 + 1j, 5 + 1j)) - ref) <= 1e-10 * abs(ref)


def test_erf_rejects_huge_arguments():
    with pytest.raises(AccuracyError):
        sf.erf_two_limit(0.0, 2e6)


@settings(max_examples=60, deadline=None)
@given(finite, finite, finite, finite, finite, finite)
def test_erf_additivity(a, b, c, d, e, f):
    z1, z2, z3 = complex(a, b * 0.5), complex(c, d * 0.5), complex(e, f * 0.5)
    lhs = complex(sf.erf_two_limit(z1, z2)) + complex(sf.erf_two_limit(z2, z3))
    rhs = complex(sf.erf_two_limit(z1, z3))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


@settings(max_examples=60, deadline=None)
@given(finite, finite)
def test_erf_oddness(a, b):
    z = complex(a, b * 0.5)
    lhs = complex(sf.erf_two_limit(-z, z))
    rhs = 2 * complex(sf.erf_two_limit(0.0, z))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_erf_diff_vectorised_matches_scalar():
    z1 = np.array([0.1 + 0.2j, 4 + 1j, -5 - 1j])
    z2 = np.array([1.0 - 1j, 5 + 1j, -4 - 1j])
    vec = sf.erf_diff(z1, z2)
    for a, b, v in zip(z1, z2, vec):
        assert abs(v - complex(sf.erf_two_limit(a, b))) <= 1e-13 * max(1, abs(v))


def test_airy_values_at_zero():
    ai, gi = sf.airy_gairy_complete(0.0)
    assert ai == pytest.approx(AI0, rel=1e-10)
    assert gi == pytest.approx(GI0, rel=1e-10)
    ai, _ = sf.airy_gairy_incomplete(0.0, -math.inf, math.inf)
    assert ai == pytest.approx(2 * AI0, rel=1e-10)


def test_airy_incomplete_examples():
    assert sf.airy_gairy_incomplete(1.3, 0.7, 0.7) == (0.0, 0.0)
    ai, gi = sf.airy_gairy_incomplete(1.0, -2.0, 2.0)
    assert ai == pytest.approx(AI_W1_PM2, rel=1e-10)
    assert gi == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("w,z1,z2", [(2.0, -1.0, 3.0), (-1.5, 0.0, 2.5), (9.0, -4.0, 1.0)])
def test_airy_incomplete_against_mpmath(w, z1, z2):
    pts = sorted({z1, z2, *[x for x in (-math.sqrt(max(w, 0)), math.sqrt(max(w, 0))) if z1 < x < z2]})
    ai = float(mp.quad(lambda z: mp.cos(z ** 3 / 3 - w * z), pts)) / math.pi
    gi = float(mp.quad(lambda z: mp.sin(z ** 3 / 3 - w * z), pts)) / math.pi
    got = sf.airy_gairy_incomplete(w, z1, z2)
    assert got[0] == pytest.approx(ai, abs=1e-10)
    assert got[1] == pytest.approx(gi, abs=1e-10)


@pytest.mark.parametrize("w", [-3.0, 1.0, 25.0])
def test_complete_against_mpmath_scorer(w):
    ai, gi = sf.airy_gairy_complete(w)
    assert ai == pytest.approx(float(mp.airyai(-w)), abs=1e-10)
    assert gi == pytest.approx(float(mp.scorergi(-w)), abs=1e-10)


def test_incomplete_tends_to_complete():
    w = 2.0
    ai, gi = sf.airy_gairy_incomplete(w, 0.0, 20.0)
    cai, cgi = sf.airy_gairy_complete(w)
    # remaining tail oscillates with amplitude ~ 1 / (pi Z^2)
    assert abs(ai - cai) < 1.0 / (math.pi * 20.0 ** 2)
    assert abs(gi - cgi) < 1.0 / (math.pi * 20.0 ** 2)


def test_airy_asymptotic_at_w25():
    w = 25.0
    ai, _ = sf.airy_gairy_complete(w)
    lhs = ai * math.sqrt(math.pi) * w ** 0.25
    assert lhs - math.sin(2 * w ** 1.5 / 3 + math.pi / 4) == pytest.approx(0.0, abs=1e-2)


def test_params_derived_quantities():
    p = CatastropheParams(1e3, 0.1, 1 / 6)
    assert p.Lambda == pytest.approx((0.5 * 1e3) ** (-1 / 3))
    assert p.Upsilon == pytest.approx(-0.2)
    assert p.w == pytest.approx(1e3 ** (2 / 3) * 0.01 / 0.5 ** (4 / 3))
    assert p.sigma == 1.0
    with pytest.raises(ValueError):
        CatastropheParams(1e3, 0.1, 0.0)
    with pytest.raises(ValueError):
        CatastropheParams(-1.0, 0.1, 1.0)


@pytest.mark.parametrize("eps,a", [(0.1, 1 / 6), (-0.1, 1 / 6), (0.1, -0.4), (0.0, 1 / 6)])
def test_direct_matches_airy_form(eps, a):
    p = CatastropheParams(1e3, eps, a)
    d = complex(sf.catastrophe_direct(1.0, 0.3, p))
    f = complex(sf.catastrophe_airy_form(1.0, 0.3, p))
    assert abs(d - f) <= 1e-6 * abs(d)


def test_direct_against_mpmath():
    p = CatastropheParams(200.0, 0.1, 1 / 6)
    f = lambda x: mp.exp(1j * 200 * (0.1 * x ** 2 + x ** 3 / 6))
    ref = complex(mp.quad(f, mp.linspace(-1, 1, 41)))
    assert abs(complex(sf.catastrophe_direct(1.0, 0.0, p)) - ref) <= 1e-8 * abs(ref)


def test_airy_form_at_w0_is_finite():
    p = CatastropheParams(1e4, 0.0, 1 / 6)
    v = complex(sf.catastrophe_airy_form(1.0, 0.0, p))
    assert p.w == 0.0
    assert math.isfinite(abs(v)) and abs(v) > 0


def test_large_w_reproduces_fresnel_limit():
    # w = 100: the xi* saddle alone gives sqrt(pi/(kappa |eps|)) e^{+-i pi/4}
    a, eps = 1 / 6, 0.05
    kappa = (100.0 * (3 * a) ** (4 / 3) / eps ** 2) ** 1.5
    for sgn in (1, -1):
        p = CatastropheParams(kappa, sgn * eps, a)
        s = sf.saddle_contribution(p)
        ref = math.sqrt(math.pi / (kappa * eps)) * cmath.exp(sgn * 0.25j * math.pi)
        assert abs(s - ref) <= 0.01 * abs(ref)


def test_saddle_contribution_requires_eps():
    with pytest.raises(ValueError):
        sf.saddle_contribution(CatastropheParams(1e4, 0.0, 1 / 6))


def test_maslov_shift_tends_to_half_pi():
    shifts = [sf.maslov_phase_shift(k, 0.05, 1 / 6) - math.pi / 2 for k in (1e4, 1e5, 1e6)]
    assert all(s > 0 for s in shifts)
    assert shifts[0] > shifts[1] > shifts[2]
    assert shifts[2] < 1e-2
