"""Classical dynamics in the spherical power-law potential V(r) = r**alpha.

Natural units hbar = m = R0 = V0 = 1 are used throughout.  For an energy E the
scaled energy is ``eps = E**(1/2 + 1/alpha)``.  Under E -> sE lengths scale as
s**(1/alpha), momenta as s**(1/2), times as s**(1/alpha - 1/2) and actions
(hence angular momenta) as s**(1/2 + 1/alpha), i.e. linearly in eps.

Radial integrals use the substitution r = r_min + (r_max - r_min) sin^2 t and
express p_r^2 through divided differences around each turning point, so the
integrands stay smooth and free of cancellation even for thin tori near the
circle orbit.
"""
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, rgamma

from .errors import NoRealRootError, NumericError, OrbitNotFoundError

__all__ = [
    "PotentialConfig", "Family", "PoLabel", "PoData", "TorusPoint",
    "circle_radius", "circle_L", "turning_points", "radial_action", "omega_ratio",
    "radial_period", "torus_point", "bifurcation_alpha", "find_po", "circle_orbit",
    "diameter_orbit", "curvature_num", "curvature_circle", "curvature_circle_limit",
    "scaled_energy", "energy_from_scaled", "scaled_quantities", "scale_po",
    "closed_orbit_phase", "closed_orbit_derivatives", "po_catalogue",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)
_SERIES_X = 0.05


@dataclass(frozen=True)
class PotentialConfig:
    """Power-law potential V(r) = r**alpha in natural units."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a) or a < 2.0:
            raise ValueError(f"alpha must be finite and >= 2, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


class Family(str, Enum):
    P = "P"
    C = "C"
    D = "D"


@dataclass(frozen=True)
class PoLabel:
    """Identity of a periodic-orbit family M(n_r, n_theta)."""

    family: Family
    n_r: int
    n_theta: int
    M: int = 1

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if self.M < 1:
            raise ValueError("repetition number M must be >= 1")
        if fam is Family.P:
            if self.n_theta < 1 or self.n_r <= 2 * self.n_theta:
                raise ValueError("polygon orbits need n_r > 2 n_theta >= 2")
        elif fam is Family.C and (self.n_r, self.n_theta) != (1, 1):
            raise ValueError("circle orbits carry (n_r, n_theta) = (1, 1)")
        elif fam is Family.D and (self.n_r, self.n_theta) != (2, 1):
            raise ValueError("diameter orbits carry (n_r, n_theta) = (2, 1)")

    @classmethod
    def circle(cls, M=1):
        return cls(Family.C, 1, 1, M)

    @classmethod
    def diameter(cls, M=1):
        return cls(Family.D, 2, 1, M)

    @classmethod
    def polygon(cls, n_r, n_theta, M=1):
        return cls(Family.P, n_r, n_theta, M)

    def __str__(self):
        if self.family is Family.P:
            return f"{self.M}P({self.n_r},{self.n_theta})"
        return f"{self.M}{self.family.value}"


@dataclass(frozen=True)
class PoData:
    """Classical characteristics of one periodic-orbit family at energy E.

    ``T`` is the period of the primitive orbit, ``omega_r`` the radial
    frequency of the torus carrying it, ``K`` the curvature d^2 I_r / dL^2
    used by the amplitude formulas.  Array-valued fields appear when the data
    were scaled to an array of energies with :func:`scale_po`.
    """

    label: PoLabel
    alpha: float
    E: float
    L_star: float
    r_turn: Tuple[float, float]
    tau: float
    T: float
    K: float
    F: Optional[float]
    maslov: int
    phi_D: float
    omega_r: float
    L_C: float
    r_C: float
    action: float
    warning: Optional[str] = None


@dataclass(frozen=True)
class TorusPoint:
    E: float
    L: float
    I_r: float
    omega_ratio: float


# ---------------------------------------------------------------- basic maps

def scaled_energy(alpha, E):
    return np.power(E, 0.5 + 1.0 / alpha)


def energy_from_scaled(alpha, eps):
    return np.power(eps, 2.0 * alpha / (alpha + 2.0))


def scaled_quantities(cfg, E):
    """Return (eps, dE/deps) at energy E."""
    a = cfg.alpha
    eps = scaled_energy(a, E)
    return eps, 2.0 * a / (a + 2.0) * np.power(eps, (a - 2.0) / (a + 2.0))


def circle_radius(cfg, E):
    return (2.0 * E / (cfg.alpha + 2.0)) ** (1.0 / cfg.alpha)


def circle_L(cfg, E):
    rc = circle_radius(cfg, E)
    return math.sqrt(cfg.alpha * rc ** cfg.alpha) * rc


def bifurcation_alpha(n_r, n_theta):
    """Power parameter at which M(n_r, n_theta) branches off the circle orbit."""
    if n_theta < 1 or n_r <= 2 * n_theta:
        raise ValueError("need n_r > 2 n_theta >= 2")
    return n_r * n_r / (n_theta * n_theta) - 2.0


# ------------------------------------------------------- effective potential
# With r_m the minimum of V_eff = r^a + L^2/(2 r^2) and y = r / r_m,
# V_eff(r) - V_eff(r_m) = r_m^a * g(y - 1),
# g(x) = (1+x)^a - 1 - (a/2) (1 - (1+x)^-2).

def _series_coeffs(a, n=16):
    c = np.zeros(n + 1)
    binom = 1.0
    for k in range(1, n + 1):
        binom *= (a - k + 1) / k
        c[k] = binom + 0.5 * a * (k + 1) * (-1) ** k
    return c


def _g(a, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SERIES_X
    if np.any(small):
        c = _series_coeffs(a)
        xs = x[small]
        out[small] = np.polynomial.polynomial.polyval(xs, c)
    big = ~small
    if np.any(big):
        xb = x[big]
        out[big] = np.expm1(a * np.log1p(xb)) - 0.5 * a * (1.0 - (1.0 + xb) ** -2)
    return out


def _g_slope(a, xt, x):
    """Divided difference (g(x) - g(xt)) / (x - xt), accurate for x near xt."""
    yt = 1.0 + xt
    y = 1.0 + np.asarray(x, dtype=float)
    h = y - yt
    q = h / yt
    # expm1(a log1p(q)) / h with the removable singularity at h = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        e1 = np.where(np.abs(q) > 1e-300, np.expm1(a * np.log1p(q)) / np.where(q == 0, 1.0, h), a / yt)
    e1 = np.where(q == 0, a / yt, e1)
    return yt ** a * e1 - 0.5 * a * (y + yt) / (y * y * yt * yt)


class _Torus:
    """Turning points and quadrature helpers for one (E, L) torus."""

    def __init__(self, alpha, E, L):
        self.a = a = float(alpha)
        self.E = float(E)
        self.L = float(L)
        if self.E <= 0:
            raise ValueError("energy must be positive")
        if self.L < 0:
            raise ValueError("angular momentum must be non-negative")
        self.LC = math.sqrt(a * (2.0 * E / (a + 2.0))) * (2.0 * E / (a + 2.0)) ** (1.0 / a)
        if self.L == 0.0:
            self.rm = 0.0
            self.r1, self.r2 = 0.0, E ** (1.0 / a)
            self.degenerate = False
            return
        if self.L > self.LC * (1.0 + 1e-14):
            raise NoRealRootError(f"L={L} exceeds L_C(E)={self.LC}")
        self.rm = (L * L / a) ** (1.0 / (a + 2.0))
        self.scale = self.rm ** a
        self.delta = E / self.scale - (1.0 + 0.5 * a)
        if self.delta <= 0.0 or self.L >= self.LC * (1.0 - 1e-14):
            self.degenerate = True
            self.x1 = self.x2 = 0.0
            self.r1 = self.r2 = self.rm
            return
        self.degenerate = False
        self.x1, self.x2 = self._roots()
        self.r1 = self.rm * (1.0 + self.x1)
        self.r2 = self.rm * (1.0 + self.x2)

    def _roots(self):
        a, d = self.a, self.delta
        f = lambda x: float(_g(a, np.array([x]))[0]) - d
        guess = math.sqrt(2.0 * d / (a * (a + 2.0)))
        hi = 2.0 * guess
        while f(hi) < 0.0:
            hi *= 2.0
        lo = max(-2.0 * guess, -0.5)
        while f(lo) < 0.0:
            lo = -1.0 + 0.5 * (1.0 + lo)
            if 1.0 + lo < 1e-300:
                raise NumericError("inner turning point not bracketed")
        try:
            x2 = brentq(f, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=400)
            x1 = brentq(f, lo, 0.0, xtol=1e-300, rtol=1e-15, maxiter=400)
        except (ValueError, RuntimeError) as exc:
            raise NumericError(f"turning-point search failed: {exc}") from exc
        return x1, x2

    # --- quadrature nodes on t in (0, pi/2)
    def nodes(self):
        if self.L == 0.0:
            ts = 0.0
        else:
            ts = math.sqrt(max(self.r1, 0.0) / (self.r2 - self.r1))
        if ts < 0.15:
            edges = np.concatenate(([0.0], np.geomspace(max(ts, 1e-9) / 4.0, math.pi / 2, 2 + int(math.log2(2 * math.pi / max(ts, 1e-9))))))
        else:
            edges = np.linspace(0.0, math.pi / 2, 4)
        lo, hi = edges[:-1, None], edges[1:, None]
        t = (0.5 * (hi - lo) * _GL_X + 0.5 * (hi + lo)).ravel()
        w = (0.5 * (hi - lo) * _GL_W).ravel()
        return t, w

    def integrands(self, t):
        """Return r, dr/dt and p_r/(sin t cos t) at nodes t."""
        s, c = np.sin(t), np.cos(t)
        if self.L == 0.0:
            r = self.r2 * s * s
            drdt = 2.0 * self.r2 * s * c
            # p_r^2 = 2E (1 - s^(2a)) = 2E (1 - s^2) * h ; divide out c^2 near the top
            s2 = s * s
            with np.errstate(divide="ignore", invalid="ignore"):
                h = np.where(c > 1e-3, -np.expm1(self.a * np.log(s2)) / (c * c), self.a)
            pr_sc = np.sqrt(2.0 * self.E * h) / np.where(s > 0, s, 1.0)  # p_r / (s c)
            return r, drdt, pr_sc
        dx = self.x2 - self.x1
        x = self.x1 + dx * s * s
        r = self.rm * (1.0 + x)
        drdt = 2.0 * self.rm * dx * s * c
        lower = t < math.pi / 4
        # p_r^2 = -2 rm^a D(x1, x) (x - x1) = 2 rm^a D(x2, x) (x2 - x)
        d1 = _g_slope(self.a, self.x1, x)
        d2 = _g_slope(self.a, self.x2, x)
        k1 = np.sqrt(np.maximum(-2.0 * self.scale * d1 * dx, 0.0)) / np.where(c > 0, c, 1.0)
        k2 = np.sqrt(np.maximum(2.0 * self.scale * d2 * dx, 0.0)) / np.where(s > 0, s, 1.0)
        pr_sc = np.where(lower, k1, k2)
        return r, drdt, pr_sc

    def action(self):
        if self.L == 0.0:
            a = self.a
            return math.sqrt(2.0 * self.E) * self.r2 * math.exp(
                gammaln(1 + 1 / a) + gammaln(1.5) - gammaln(1.5 + 1 / a)) / math.pi
        if self.degenerate:
            return 0.0
        t, w = self.nodes()
        r, drdt, pr_sc = self.integrands(t)
        s, c = np.sin(t), np.cos(t)
        return float(np.sum(w * pr_sc * s * c * drdt)) / math.pi

    def ratio(self):
        if self.L == 0.0:
            return 0.5
        if self.degenerate:
            return 1.0 / math.sqrt(self.a + 2.0)
        t, w = self.nodes()
        r, drdt, pr_sc = self.integrands(t)
        # drdt / (p_r) = 2 rm dx / pr_sc
        return float(np.sum(w * self.L / (r * r) * 2.0 * self.rm * (self.x2 - self.x1) / pr_sc)) / math.pi

    def period(self):
        if self.L == 0.0:
            a = self.a
            return math.sqrt(2.0 * math.pi / self.E) * self.r2 * math.exp(
                gammaln(1 + 1 / a) - gammaln(0.5 + 1 / a))
        if self.degenerate:
            rc = self.rm
            return 2.0 * math.pi * rc * rc / (self.L * math.sqrt(self.a + 2.0))
        t, w = self.nodes()
        r, drdt, pr_sc = self.integrands(t)
        return 2.0 * float(np.sum(w * 2.0 * self.rm * (self.x2 - self.x1) / pr_sc))


# --------------------------------------------------------------- public API

def turning_points(cfg, E, L):
    """Radial turning points (r_min, r_max) of the torus (E, L)."""
    tor = _Torus(cfg.alpha, E, L)
    return tor.r1, tor.r2


def radial_action(cfg, E, L):
    """I_r = (1/pi) int p_r dr between the turning points."""
    return _Torus(cfg.alpha, E, L).action()


def omega_ratio(cfg, E, L):
    """Frequency ratio omega_theta / omega_r = -dI_r/dL.

    The end points use the analytic limits 1/2 (L = 0) and 1/sqrt(alpha+2)
    (L = L_C).
    """
    return _Torus(cfg.alpha, E, L).ratio()


def radial_period(cfg, E, L):
    """Radial period 2 pi / omega_r of the torus (E, L)."""
    return _Torus(cfg.alpha, E, L).period()


def torus_point(cfg, E, L):
    tor = _Torus(cfg.alpha, E, L)
    return TorusPoint(E=float(E), L=float(L), I_r=tor.action(), omega_ratio=tor.ratio())


def curvature_circle(cfg, E):
    """Closed-form circle curvature with the sign convention of the trace formulas.

    This is -(a+1)(a-2) / (12 (a+2)^{3/2} L_C); the numerical second
    derivative of I_r tends to the same magnitude with a positive sign.
    """
    a = cfg.alpha
    return -(a + 1.0) * (a - 2.0) / (12.0 * (a + 2.0) ** 1.5 * circle_L(cfg, E))


def curvature_circle_limit(cfg, E):
    """Limit of d^2 I_r / dL^2 as L -> L_C (positive for alpha > 2)."""
    return -curvature_circle(cfg, E)


def curvature_num(cfg, E, L, full_output=False):
    """K = d^2 I_r / dL^2 by Richardson extrapolation of -d(omega_ratio)/dL.

    Central differences are used away from the end points; within a small
    distance of L = 0 or L = L_C the stencil becomes one-sided and points into
    the interior.  With ``full_output`` the error estimate is returned too.
    """
    a = cfg.alpha
    LC = circle_L(cfg, E)
    if not 0.0 < L < LC:
        raise ValueError("curvature_num needs 0 < L < L_C")
    f = lambda x: _Torus(a, E, x).ratio()
    dist = min(L, LC - L)
    h0 = 0.02 * LC
    levels = 5
    if dist > 2.0 * h0:
        table = []
        for i in range(levels):
            h = h0 / 2 ** i
            row = [(f(L + h) - f(L - h)) / (2 * h)]
            for j in range(1, i + 1):
                row.append(row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (4 ** j - 1))
            table.append(row)
    else:
        sgn = 1.0 if L < 0.5 * LC else -1.0
        h0 = sgn * min(0.02 * LC, 0.45 * (LC - dist) / 1.0)
        f0 = f(L)
        table = []
        for i in range(levels + 1):
            h = h0 / 2 ** i
            row = [(f(L + h) - f0) / h]
            for j in range(1, i + 1):
                row.append(row[j - 1] + (row[j - 1] - table[i - 1][j - 1]) / (2 ** j - 1))
            table.append(row)
    best = table[-1][-1]
    err = abs(table[-1][-1] - table[-2][-2])
    K = -best
    return (K, err) if full_output else K


def find_po(cfg, E, n_r, n_theta, M=1):
    """Locate the polygon-like family M(n_r, n_theta) on the energy surface.

    Solves omega_ratio(L*) = n_theta / n_r by bracketing on (0, L_C); at the
    bifurcation point the orbit coincides with the circle and L* = L_C.
    """
    label = PoLabel.polygon(n_r, n_theta, M)
    a = cfg.alpha
    target = n_theta / n_r
    end_value = 1.0 / math.sqrt(a + 2.0) - target
    if end_value > 1e-15:
        raise OrbitNotFoundError(
            f"{label} does not exist at alpha={a} (alpha_bif={bifurcation_alpha(n_r, n_theta)})")
    LC = circle_L(cfg, E)
    if end_value >= -1e-15:
        Ls = LC
        K = curvature_circle_limit(cfg, E)
    else:
        fn = lambda x: _Torus(a, E, x).ratio() - target
        try:
            Ls = brentq(fn, 0.0, LC, xtol=1e-15 * LC, rtol=1e-15, maxiter=500)
        except (ValueError, RuntimeError) as exc:
            raise NumericError(f"root for {label} not bracketed: {exc}") from exc
        res = fn(Ls)
        if abs(res) > 1e-10:
            raise NumericError(f"{label} root inaccurate", residual=res)
        if LC - Ls < 1e-4 * LC:
            # interpolate between the analytic end value and an interior point
            Kb = curvature_circle_limit(cfg, E)
            Li = LC * (1 - 2e-3)
            Ki = curvature_num(cfg, E, Li)
            K = Kb + (Ki - Kb) * (LC - Ls) / (LC - Li)
        else:
            K = curvature_num(cfg, E, Ls)
    tor = _Torus(a, E, Ls)
    Tr = tor.period()
    Ir = tor.action()
    eps = scaled_energy(a, E)
    S = 2.0 * math.pi * M * (n_r * Ir + n_theta * Ls)
    return PoData(
        label=label, alpha=a, E=float(E), L_star=Ls, r_turn=(tor.r1, tor.r2),
        tau=S / eps, T=n_r * Tr, K=K, F=None, maslov=3 * M * n_r + 4 * M * n_theta,
        phi_D=-math.pi / 2, omega_r=2.0 * math.pi / Tr, L_C=LC,
        r_C=circle_radius(cfg, E), action=S)


def _stability(a, M):
    x = M * math.sqrt(a + 2.0)
    return 4.0 * math.sin(math.pi * (x - round(x))) ** 2


def circle_orbit(cfg, E, M=1):
    """Circle orbit MC: radius, angular momentum, period, curvature, stability."""
    a = cfg.alpha
    rc = circle_radius(cfg, E)
    LC = circle_L(cfg, E)
    wC = LC / (rc * rc)
    eps = scaled_energy(a, E)
    S = 2.0 * math.pi * M * LC
    return PoData(
        label=PoLabel.circle(M), alpha=a, E=float(E), L_star=LC, r_turn=(rc, rc),
        tau=S / eps, T=2.0 * math.pi / wC, K=curvature_circle(cfg, E), F=_stability(a, M),
        maslov=2 * M, phi_D=math.pi / 2, omega_r=wC * math.sqrt(a + 2.0), L_C=LC,
        r_C=rc, action=S)


def diameter_orbit(cfg, E, M=1):
    """Diameter orbit M(2,1) from Gamma-function closed forms.

    ``T`` is the period of the primitive diameter (two radial periods of the
    L -> 0 torus) and ``omega_r`` the radial frequency 2 pi / T_r.
    """
    a = cfg.alpha
    rmax = E ** (1.0 / a)
    Tr = math.sqrt(2.0 * math.pi / E) * rmax * math.exp(gammaln(1 + 1 / a) - gammaln(0.5 + 1 / a))
    eps = scaled_energy(a, E)
    KD = math.gamma(1.0 - 1.0 / a) * float(rgamma(0.5 - 1.0 / a)) / (eps * math.sqrt(2.0 * math.pi))
    Ir0 = _Torus(a, E, 0.0).action()
    S = M * 4.0 * math.pi * Ir0
    warning = None
    if a < 2.5:
        warning = "alpha < 2.5: diameter amplitude unreliable near the oscillator limit"
    return PoData(
        label=PoLabel.diameter(M), alpha=a, E=float(E), L_star=0.0, r_turn=(0.0, rmax),
        tau=S / eps, T=2.0 * Tr, K=KD, F=None, maslov=2 * M, phi_D=-math.pi / 2,
        omega_r=2.0 * math.pi / Tr, L_C=circle_L(cfg, E), r_C=circle_radius(cfg, E),
        action=S, warning=warning)


def scale_po(po, eps):
    """Map PoData computed at any energy to scaled energy ``eps`` (scalar or array)."""
    a = po.alpha
    eps = np.asarray(eps, dtype=float) if np.ndim(eps) else float(eps)
    u = eps / scaled_energy(a, po.E)           # action ratio
    s = u ** (2.0 * a / (a + 2.0))              # energy ratio
    lr = s ** (1.0 / a)
    lt = s ** (1.0 / a - 0.5)
    return replace(
        po, E=po.E * s, L_star=po.L_star * u, r_turn=(po.r_turn[0] * lr, po.r_turn[1] * lr),
        T=po.T * lt, K=po.K / u, omega_r=po.omega_r / lt, L_C=po.L_C * u, r_C=po.r_C * lr,
        action=po.action * u)


# ----------------------------------------------------- closed-orbit action

def _partial(a, tor, r, rt_x):
    """Angle and |action| accumulated between radius r and turning point rt_x."""
    xr = r / tor.rm - 1.0
    h = xr - rt_x
    u = 0.25 * math.pi * (_GL_X + 1.0)
    w = 0.25 * math.pi * _GL_W
    su, cu = np.sin(u), np.cos(u)
    x = rt_x + h * su * su
    rr = tor.rm * (1.0 + x)
    slope = _g_slope(a, rt_x, x)
    # p_r^2 = -2 rm^a slope (x - xt) = -2 rm^a slope h su^2
    k = np.sqrt(np.maximum(-2.0 * tor.scale * slope * h, 0.0))
    drdu = 2.0 * tor.rm * h * su * cu
    theta = float(np.sum(w * tor.L / (rr * rr) * 2.0 * tor.rm * h * cu / k))
    act = float(np.sum(w * k * su * drdu))
    return abs(theta), abs(act)


def closed_orbit_phase(cfg, E, M, n_r, n_theta, r):
    """Action of the closed orbit that leaves radius r and returns to it.

    The orbit sweeps the polar angle 2 pi M n_theta, is symmetric about its
    middle turning point and performs M n_r half-librations plus a partial
    segment next to r (added past the bifurcation, removed before it).  Its
    action is ``2 pi M n_r I_r(L) +/- 2 |int p_r dr| + 2 pi M n_theta L`` with
    L fixed by the angle condition; at r = r_C it reduces to the circle
    action 2 pi M n_theta L_C.
    """
    a = cfg.alpha
    rc = circle_radius(cfg, E)
    LC = circle_L(cfg, E)
    q = M * n_r
    nu = math.sqrt(a + 2.0)
    s = 1.0 if n_theta * nu > n_r else -1.0
    if abs(r - rc) < 1e-12 * rc:
        return 2.0 * math.pi * M * n_theta * LC
    Vr = r ** a
    if Vr >= E:
        raise NumericError("radius outside the classically allowed region")
    Lt = r * math.sqrt(2.0 * (E - Vr))

    def side(tor):
        return tor.x2 if r > rc else tor.x1

    def g(L):
        tor = _Torus(a, E, L)
        th, _ = _partial(a, tor, r, side(tor))
        return q * math.pi * tor.ratio() + s * th - math.pi * M * n_theta

    g0 = g(Lt * (1 - 1e-13))
    lo = None
    for k in np.linspace(12.0, 0.3, 120):
        Lk = Lt * (1.0 - 10.0 ** (-k))
        if np.sign(g(Lk)) != np.sign(g0):
            lo = Lk
            break
    if lo is None:
        raise NumericError("closed-orbit angular momentum not bracketed; r too far from r_C")
    L = brentq(g, lo, Lt * (1 - 1e-13), xtol=1e-16 * Lt, rtol=1e-15, maxiter=500)
    tor = _Torus(a, E, L)
    _, act = _partial(a, tor, r, side(tor))
    return 2.0 * math.pi * q * tor.action() + 2.0 * s * act + 2.0 * math.pi * M * n_theta * L


def closed_orbit_derivatives(cfg, E, M, n_r, n_theta, h_rel=0.01):
    """Second and third r-derivatives of closed_orbit_phase at r_C.

    Five-point stencils at steps h and h/2 are combined by Richardson
    extrapolation (orders h^4 and h^2 respectively).
    """
    rc = circle_radius(cfg, E)
    f0 = closed_orbit_phase(cfg, E, M, n_r, n_theta, rc)

    def stencil(h):
        f = {k: closed_orbit_phase(cfg, E, M, n_r, n_theta, rc + k * h) for k in (-2, -1, 1, 2)}
        d2 = (-f[2] + 16 * f[1] - 30 * f0 + 16 * f[-1] - f[-2]) / (12 * h * h)
        d3 = (f[2] - 2 * f[1] + 2 * f[-1] - f[-2]) / (2 * h ** 3)
        return d2, d3

    h = h_rel * rc
    a2, a3 = stencil(h)
    b2, b3 = stencil(h / 2)
    return (16 * b2 - a2) / 15, (4 * b3 - a3) / 3


# ------------------------------------------------------------- catalogue

def po_catalogue(cfg, tau_max, E=1.0, families="PCD"):
    """All families with scaled period <= tau_max at this alpha, sorted by tau."""
    out = []
    a = cfg.alpha
    tauD1 = diameter_orbit(cfg, E, 1).tau
    if "C" in families:
        c1 = circle_orbit(cfg, E, 1)
        M = 1
        while M * c1.tau <= tau_max:
            out.append(circle_orbit(cfg, E, M))
            M += 1
    if "D" in families:
        M = 1
        while M * tauD1 <= tau_max:
            out.append(diameter_orbit(cfg, E, M))
            M += 1
    if "P" in families:
        nu = math.sqrt(a + 2.0)
        nt = 1
        while nt * tauD1 <= tau_max:
            for nr in range(2 * nt + 1, int(math.floor(nt * nu)) + 1):
                if math.gcd(nr, nt) != 1 or nr / nt > nu:
                    continue
                p1 = find_po(cfg, E, nr, nt, 1)
                M = 1
                while M * p1.tau <= tau_max:
                    out.append(p1 if M == 1 else find_po(cfg, E, nr, nt, M))
                    M += 1
            nt += 1
    out.sort(key=lambda p: p.tau)
    return out
