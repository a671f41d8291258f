"""Special functions of the fold catastrophe.

Two-limit complex error function, incomplete and complete Airy/Gairy
integrals, and the cubic catastrophe integral both by direct quadrature and in
its Airy representation.

Conventions::

    erf(z1, z2) = 2/sqrt(pi) int_{z1}^{z2} exp(-z^2) dz
    Ai(-w; z1, z2) + i Gi(-w; z1, z2) = 1/pi int_{z1}^{z2} exp(i (z^3/3 - w z)) dz

so the complete pair on (0, inf) is the Airy function Ai(-w) and the Scorer
function Gi(-w).
"""
import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, ResolutionError

__all__ = [
    "ComplexValue", "CatastropheParams", "erf_two_limit", "erf_diff", "airy_gairy_incomplete",
    "airy_gairy_complete", "catastrophe_direct", "catastrophe_airy_form",
    "saddle_contribution", "maslov_phase_shift",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_ERF_ZMAX = 1.0e6
_PANEL_BUDGET = 2_000_000


class ComplexValue(complex):
    """Complex number that refuses NaN and infinite components."""

    def __new__(cls, re, im=0.0):
        z = complex(re, im) if not isinstance(re, complex) else complex(re.real + 0.0, re.imag + im)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ArithmeticError(f"non-finite complex value {z!r}")
        return super().__new__(cls, z.real, z.imag)

    @property
    def re(self):
        return self.real

    @property
    def im(self):
        return self.imag

    @property
    def phase(self):
        return cmath.phase(self)


@dataclass(frozen=True)
class CatastropheParams:
    """Cubic normal form  Phi = Phi* + eps (xi - xi*)^2 + a (xi - xi*)^3  with weight kappa."""

    kappa: float
    eps: float
    a: float
    xi_minus: float = -1.0
    xi_plus: float = 1.0
    xi_star: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.a == 0:
            raise ValueError("cubic coefficient a must be non-zero")
        if not self.xi_minus < self.xi_plus:
            raise ValueError("need xi_minus < xi_plus")

    def mirrored(self):
        """Reflection xi -> -xi, which flips the sign of a."""
        return CatastropheParams(self.kappa, self.eps, -self.a, -self.xi_plus, -self.xi_minus, -self.xi_star)

    @property
    def sigma(self):
        return 1.0 if self.eps >= 0 else -1.0

    @property
    def w(self):
        return self.kappa ** (2.0 / 3.0) * self.eps ** 2 / (3.0 * abs(self.a)) ** (4.0 / 3.0)

    @property
    def Lambda(self):
        return (3.0 * abs(self.a) * self.kappa) ** (-1.0 / 3.0)

    @property
    def Upsilon(self):
        return -self.eps / (3.0 * self.a)

    @property
    def z_limits(self):
        """Airy-variable images of the integration limits (for a > 0)."""
        p = self if self.a > 0 else self.mirrored()
        shift = p.sigma * math.sqrt(p.w)
        return ((p.xi_minus - p.xi_star) / p.Lambda + shift,
                (p.xi_plus - p.xi_star) / p.Lambda + shift)


# ------------------------------------------------------------------- erf

def _as_complex(z):
    if isinstance(z, (float, int)) and math.isinf(z):
        return z
    return complex(z)


def _erfc_pair(z1, z2):
    """erfc(z1) - erfc(z2) with infinite limits on the real axis allowed."""
    e1 = 0.0 if z1 == math.inf else (2.0 if z1 == -math.inf else special.erfc(z1))
    e2 = 0.0 if z2 == math.inf else (2.0 if z2 == -math.inf else special.erfc(z2))
    return e1 - e2


def erf_diff(z1, z2):
    """Vectorised erf(z2) - erf(z1) for finite complex arrays."""
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    right = (z1.real > 0) & (z2.real > 0)
    left = (z1.real < 0) & (z2.real < 0)
    with np.errstate(all="ignore"):
        out = np.where(right, special.erfc(z1) - special.erfc(z2),
                       np.where(left, special.erfc(-z2) - special.erfc(-z1),
                                special.erf(z2) - special.erf(z1)))
    return out


def erf_two_limit(z1, z2):
    """Generalised error function erf(z2) - erf(z1) for complex limits.

    Uses the Faddeeva-based scipy implementation; when both limits lie in the
    same half plane far from the origin the complementary function is used to
    avoid cancellation between values close to +/-1.
    """
    z1, z2 = _as_complex(z1), _as_complex(z2)
    for z in (z1, z2):
        if not isinstance(z, float) and abs(z) > _ERF_ZMAX:
            raise AccuracyError(f"|z|={abs(z):.3e} beyond the supported range {_ERF_ZMAX:g}")
    if z1 == z2:
        return ComplexValue(0.0)
    re1 = z1.real if isinstance(z1, complex) else z1
    re2 = z2.real if isinstance(z2, complex) else z2
    if re1 > 0 and re2 > 0:
        val = _erfc_pair(z1, z2)
    elif re1 < 0 and re2 < 0:
        val = _erfc_pair(-z2 if isinstance(z2, complex) else -z2, -z1 if isinstance(z1, complex) else -z1)
    else:
        e = lambda z: (1.0 if z > 0 else -1.0) if isinstance(z, float) and math.isinf(z) else special.erf(z)
        val = e(z2) - e(z1)
    val = complex(val)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise AccuracyError(f"erf({z1}, {z2}) overflowed")
    return ComplexValue(val)


# ------------------------------------------------------------ Airy / Gairy

def _cubic(w, z):
    return np.exp(1j * (z ** 3 / 3.0 - w * z))


def _tail_right(w, Z):
    """1/pi int_Z^inf exp(i(z^3/3 - w z)) dz along Z + s e^{i pi/6}; needs Z > 0, Z^2 > w."""
    d = cmath.exp(1j * math.pi / 6)
    f = lambda s: _cubic(w, Z + s * d) * d
    re = integrate.quad(lambda s: f(s).real, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    im = integrate.quad(lambda s: f(s).imag, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return complex(re, im) / math.pi


def _tail_left(w, Z):
    """1/pi int_-inf^Z exp(i(z^3/3 - w z)) dz along Z + s e^{5i pi/6}; needs Z < 0, Z^2 > w."""
    d = cmath.exp(5j * math.pi / 6)
    f = lambda s: _cubic(w, Z + s * d) * d
    re = integrate.quad(lambda s: f(s).real, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    im = integrate.quad(lambda s: f(s).imag, 0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return -complex(re, im) / math.pi


def _panel_integral(func, lo, hi, width):
    """Composite Gauss-Legendre of a vectorised complex integrand."""
    if hi <= lo:
        return 0.0j
    n = int(math.ceil((hi - lo) / width))
    if n > _PANEL_BUDGET:
        raise ResolutionError(f"oscillatory quadrature needs {n} panels (budget {_PANEL_BUDGET})")
    edges = np.linspace(lo, hi, n + 1)
    total = 0.0j
    chunk = 20000
    for k in range(0, n, chunk):
        m = min(k + chunk, n)
        a, b = edges[k:m, None], edges[k + 1:m + 1, None]
        x = 0.5 * (b - a) * _GL_X + 0.5 * (b + a)
        total += np.sum(0.5 * (b - a) * _GL_W * func(x))
    return total


def _airy_complex(w, z1, z2):
    if z1 == z2:
        return 0.0j
    sign = 1.0
    if z1 > z2:
        z1, z2, sign = z2, z1, -1.0
    B = math.sqrt(max(w, 0.0)) + 1.0
    total = 0.0j
    # left of -B
    if z1 < -B:
        hi = min(z2, -B)
        total += _tail_left(w, hi) - (0.0 if z1 == -math.inf else _tail_left(w, z1))
    # right of +B
    if z2 > B:
        lo = max(z1, B)
        total += _tail_right(w, lo) - (0.0 if z2 == math.inf else _tail_right(w, z2))
    lo, hi = max(z1, -B), min(z2, B)
    if hi > lo:
        width = 0.5 / max(1.0, abs(w), B * B - w)
        total += _panel_integral(lambda z: _cubic(w, z), lo, hi, width) / math.pi
    return sign * total


def airy_gairy_incomplete(w, z1, z2):
    """Incomplete Airy and Gairy integrals (Ai(-w; z1, z2), Gi(-w; z1, z2)).

    Infinite limits are accepted.  Finite pieces beyond the stationary
    points are obtained from tails along rotated contours; the oscillatory
    core is integrated by panels of bounded phase change.
    """
    v = _airy_complex(float(w), float(z1), float(z2))
    return v.real, v.imag


def airy_gairy_complete(w):
    """Complete pair (Ai(-w), Gi(-w)) on the half line (0, inf)."""
    ai = special.airy(-float(w))[0]
    gi = _airy_complex(float(w), 0.0, math.inf).imag
    return float(ai), float(gi)


# -------------------------------------------------- catastrophe integral

def catastrophe_direct(A_star, Phi_star, params, xi_limits=None):
    """Direct quadrature of  int A* exp(i kappa Phi(xi)) dxi  over finite limits."""
    p = params
    lo, hi = xi_limits if xi_limits is not None else (p.xi_minus, p.xi_plus)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("direct quadrature needs finite limits")
    k, e, a, xs = p.kappa, p.eps, p.a, p.xi_star
    umax = max(abs(lo - xs), abs(hi - xs))
    slope = k * (2.0 * abs(e) * umax + 3.0 * abs(a) * umax * umax)
    width = min(hi - lo, 0.5 / max(slope, 1e-300))

    def f(x):
        u = x - xs
        return np.exp(1j * k * (e * u * u + a * u ** 3))

    val = A_star * cmath.exp(1j * k * Phi_star) * _panel_integral(f, lo, hi, width)
    return ComplexValue(val)


def catastrophe_airy_form(A_star, Phi_star, params):
    """Airy representation  pi Lambda A* exp(i kappa Phi* + 2 i sigma w^{3/2}/3) (Ai + i Gi)."""
    p = params if params.a > 0 else params.mirrored()
    z1, z2 = p.z_limits
    w = p.w
    v = _airy_complex(w, z1, z2)
    pref = math.pi * p.Lambda * A_star * cmath.exp(1j * p.kappa * Phi_star + 2j * p.sigma * w ** 1.5 / 3.0)
    return ComplexValue(pref * v)


def saddle_contribution(params):
    """Exact contribution of the stationary point xi* by steepest descent.

    Along the descent path  eps u^2 + a u^3 = i t^2  the integrand becomes
    exp(-kappa t^2); the two branches leaving u = 0 are followed by Newton
    continuation and du/dt is taken analytically.  The value returned is the
    integral divided by A* exp(i kappa Phi*).  Requires eps != 0.
    """
    p = params if params.a > 0 else params.mirrored()
    if p.eps == 0:
        raise ValueError("the fold point itself has no isolated saddle")
    k, e, a = p.kappa, p.eps, p.a
    panels = np.linspace(0.0, 7.0, 71)
    lo, hi = panels[:-1, None], panels[1:, None]
    tau = (0.5 * (hi - lo) * _GL_X + 0.5 * (hi + lo)).ravel()
    wts = (0.5 * (hi - lo) * _GL_W).ravel()
    t = tau / math.sqrt(k)

    def branch(sign):
        u = sign * cmath.sqrt(1j / e) * t[0]
        out = np.empty(t.size, dtype=complex)
        for n, tn in enumerate(t):
            target = 1j * tn * tn
            for _ in range(50):
                step = (e * u * u + a * u ** 3 - target) / (2 * e * u + 3 * a * u * u)
                u -= step
                if abs(step) <= 1e-15 * abs(u):
                    break
            out[n] = 2j * tn / (2 * e * u + 3 * a * u * u)
        return out

    dudt = branch(1.0) - branch(-1.0)
    return complex(np.sum(wts * np.exp(-tau ** 2) * dudt) / math.sqrt(k))


def maslov_phase_shift(kappa, eps, a):
    """Phase difference of the xi* saddle contributions at +|eps| and -|eps|.

    Asymptotically (w -> inf) this is pi/2; finite w adds corrections of
    order 5 / (36 w^{3/2}).
    """
    plus = saddle_contribution(CatastropheParams(kappa, abs(eps), a))
    minus = saddle_contribution(CatastropheParams(kappa, -abs(eps), a))
    return cmath.phase(plus) - cmath.phase(minus)
