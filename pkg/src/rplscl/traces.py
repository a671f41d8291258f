"""Periodic-orbit sums for the oscillating level density.

Every family contributes ``Re[A(E) exp(i (eps tau - pi mu/2 - phi_D))]`` to
dg(E), where ``mu`` is the effective Maslov index of :func:`effective_maslov`.
In scaled form the sum is multiplied by dE/deps and each term may be damped by
``exp(-tau^2 gamma^2 / 4)`` (Gaussian averaging of width gamma in eps).

Amplitudes:

* polygon families P: improved stationary phase with the finite angular
  momentum interval (0, L_C), or the plain stationary-phase limit;
* circle C: finite radial and angular-momentum limits (ISPM2), the third
  order Airy form (ISPM3), or the stationary-phase limit;
* diameter D: stationary-phase amplitude only.
"""
import functools
import hashlib
import math
import re
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from . import classical as cl
from .classical import Family, PoLabel
from .errors import DivergenceError, NumericError, OrbitNotFoundError, ResolutionError
from .grid import DensityGrid
from .specfun import (CatastropheParams, ComplexValue, airy_gairy_incomplete, erf_diff)

__all__ = [
    "Method", "EndpointMode", "TraceConfig", "PoContribution", "DensityGrid",
    "amp_P_ispm2", "amp_P_sspm", "amp_C_ispm2", "amp_C_sspm", "amp_C_ispm3", "amp_D_sspm",
    "effective_maslov", "circle_cubic_coefficient", "resolve_po_set", "po_data",
    "po_contribution", "density_by_po", "density_scaled", "density_total", "coarse_grain",
    "scl_density", "fourier_scl", "averaging_factor",
]


class Method(str, Enum):
    ISPM2 = "ISPM2"
    ISPM3 = "ISPM3"
    SSPM = "SSPM"


class EndpointMode(str, Enum):
    FULL = "full"
    REDUCED = "reduced_at_bifurcation"


@dataclass(frozen=True)
class TraceConfig:
    """What to sum and how.

    ``method`` is a single method name or a mapping family -> method.  With
    ``absorb_parent`` a circle term MC is dropped (evaluated with the reduced
    end-point manifold) whenever the set holds an ISPM2 polygon family that
    has already branched off MC, since that term then carries the parent.
    Circle terms with |F| below ``reduce_threshold`` are always reduced.
    """

    po_set: Tuple[PoLabel, ...]
    gamma_avg: float = 0.6
    endpoint_mode: EndpointMode = EndpointMode.FULL
    method: object = Method.ISPM2
    absorb_parent: bool = True
    reduce_threshold: float = 1e-6

    def __post_init__(self):
        if not self.gamma_avg > 0:
            raise ValueError("gamma_avg must be positive")
        if not self.po_set:
            raise ValueError("po_set must not be empty")
        object.__setattr__(self, "po_set", tuple(self.po_set))
        object.__setattr__(self, "endpoint_mode", EndpointMode(self.endpoint_mode))
        if isinstance(self.method, dict):
            object.__setattr__(self, "method", {Family(k): Method(v) for k, v in self.method.items()})
        else:
            object.__setattr__(self, "method", Method(self.method))

    def method_for(self, family):
        family = Family(family)
        m = self.method.get(family, Method.ISPM2) if isinstance(self.method, dict) else self.method
        if family is Family.D:
            return Method.SSPM
        if family is Family.P and m is Method.ISPM3:
            return Method.ISPM2
        return m

    def digest(self):
        text = ",".join(str(x) for x in self.po_set)
        return hashlib.sha1(text.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class PoContribution:
    label: PoLabel
    amplitude: complex
    phase: float
    density_term: float
    total_maslov_arg: float


# ----------------------------------------------------------- helpers

def _eps(po, E):
    return cl.scaled_energy(po.alpha, np.asarray(E, dtype=float))


def _scalar(x, E):
    if np.ndim(E) == 0:
        x = np.asarray(x).reshape(())[()]
        return ComplexValue(complex(x)) if np.iscomplexobj(x) else float(x)
    return x


def _check(po, family):
    if po.label.family is not family:
        raise ValueError(f"{po.label} is not a {family.value} orbit")


def effective_maslov(po, method=Method.ISPM2):
    """Maslov index entering the phase together with phi_D of the family.

    P: 2M(n_r + n_theta) + 1.  D: 2M - 1.  C: 2M for every method, so that
    the improved circle amplitude tends to the stationary-phase one.
    """
    lab = po.label
    method = Method(method)
    if lab.family is Family.P:
        return 2 * lab.M * (lab.n_r + lab.n_theta) + 1
    if lab.family is Family.D:
        return 2 * lab.M - 1
    return 2 * lab.M


# --------------------------------------------------------- amplitudes

def amp_P_ispm2(po, E):
    """Improved amplitude of a polygon family with angular momentum limits 0 and L_C.

    ``L T_r / (pi sqrt(M n_r K)) erf(Z_-, Z_+) e^{i pi/4}`` with
    ``Z_pm = sqrt(-i pi M n_r K) (L_pm - L_P)``; T_r is the radial period.
    """
    _check(po, Family.P)
    lab = po.label
    q = cl.scale_po(po, _eps(po, E))
    Tr = q.T / lab.n_r
    mn = lab.M * lab.n_r
    if po.K == 0:
        fac = (2.0 / math.sqrt(math.pi)) * np.sqrt(-1j * math.pi * mn) * q.L_C
        amp = q.L_star * Tr / math.pi * fac
    else:
        root = np.sqrt(-1j * math.pi * mn * q.K)
        zm = root * (0.0 - q.L_star)
        zp = root * (q.L_C - q.L_star)
        amp = q.L_star * Tr / (math.pi * np.sqrt(mn * q.K)) * erf_diff(zm, zp)
    return _scalar(amp * np.exp(0.25j * math.pi), E)


def amp_P_sspm(po, E):
    """Stationary-phase (Berry-Tabor) amplitude ``2 L T_r / (pi sqrt(M n_r K)) e^{i pi/4}``."""
    _check(po, Family.P)
    if po.K == 0:
        raise DivergenceError(f"{po.label}: stationary-phase amplitude diverges at K = 0")
    lab = po.label
    q = cl.scale_po(po, _eps(po, E))
    Tr = q.T / lab.n_r
    amp = 2.0 * q.L_star * Tr / (math.pi * np.sqrt(lab.M * lab.n_r * q.K)) * np.exp(0.25j * math.pi)
    return _scalar(amp, E)


def _xi_limits(alpha):
    """Radial limits r_min = 0 and r_max(L=0) in units of r_C, shifted by 1."""
    return -1.0, ((alpha + 2.0) / 2.0) ** (1.0 / alpha) - 1.0


def amp_C_sspm(po, E):
    """Stationary-phase circle amplitude ``2 L_C T_C / (pi sqrt(F))``."""
    _check(po, Family.C)
    if po.F == 0:
        raise DivergenceError(f"{po.label}: stationary-phase amplitude diverges at F = 0")
    q = cl.scale_po(po, _eps(po, E))
    amp = np.asarray(2.0 * q.L_C * q.T / (math.pi * math.sqrt(po.F)), dtype=complex)
    return _scalar(amp, E)


def amp_C_ispm2(po, E, endpoint_mode=EndpointMode.FULL):
    """Improved circle amplitude with finite angular-momentum and radial limits.

    ``A_SSP (1/2) erf(0, Z_p) erf(Z_r-, Z_r+)``; at F = 0 the analytic limit of
    erf(Z_r-, Z_r+)/sqrt(F) is used.  The reduced end-point mode returns 0.
    """
    _check(po, Family.C)
    q = cl.scale_po(po, _eps(po, E))
    if EndpointMode(endpoint_mode) is EndpointMode.REDUCED:
        return _scalar(np.zeros_like(np.asarray(q.L_C, dtype=complex)), E)
    a, M, F = po.alpha, po.label.M, po.F
    kk = 4.0 * math.pi * (a + 2.0) * M * q.K
    zp = q.L_C * np.sqrt(-1j * math.pi * (a + 2.0) * M * q.K)
    xm, xp = _xi_limits(a)
    ep = erf_diff(0.0, zp)
    if F > 0:
        root = np.sqrt(1j * F / kk)
        amp = 2.0 * q.L_C * q.T / (math.pi * math.sqrt(F)) * 0.5 * ep * erf_diff(xm * root, xp * root)
    else:
        amp = (2.0 * q.L_C * q.T / math.pi) * 0.5 * ep * (2.0 / math.sqrt(math.pi)) * (xp - xm) * np.sqrt(1j / kk)
    return _scalar(amp, E)


def _daughter(alpha, M):
    """Resonance (n_r, n_theta, M_P) nearest to the circle MC."""
    nr = int(round(M * math.sqrt(alpha + 2.0)))
    g = math.gcd(nr, M)
    return nr // g, M // g, g


@functools.lru_cache(maxsize=256)
def circle_cubic_coefficient(alpha, M=1):
    """Cubic coefficient a = r_C^3 Phi'''(r_C) / (6 L_C) of the closed-orbit action.

    Scale invariant, so it is evaluated at E = 1.
    """
    cfg = cl.PotentialConfig(alpha)
    nr, nt, mp = _daughter(alpha, M)
    if nr <= 2 * nt:
        raise NumericError("no polygon resonance next to this circle")
    _, d3 = cl.closed_orbit_derivatives(cfg, 1.0, mp, nr, nt)
    rc = cl.circle_radius(cfg, 1.0)
    return rc ** 3 * d3 / (6.0 * cl.circle_L(cfg, 1.0))


def amp_C_ispm3(po, E, endpoint_mode=EndpointMode.FULL):
    """Third-order circle amplitude and the extra phase 2 sigma w^{3/2} / 3.

    The radial integral is the cubic catastrophe integral with
    kappa = L_C, quadratic coefficient -F/(4 pi (alpha+2) M K_C L_C) (the sign
    that reproduces the ISPM2 Fresnel factor when a -> 0) and the cubic
    coefficient of :func:`circle_cubic_coefficient`, evaluated in Airy form.
    If the cubic coefficient cannot be obtained the ISPM2 amplitude is
    returned with zero extra phase and a warning.
    """
    _check(po, Family.C)
    eps = _eps(po, E)
    q = cl.scale_po(po, eps)
    if EndpointMode(endpoint_mode) is EndpointMode.REDUCED:
        z = np.zeros_like(np.asarray(q.L_C, dtype=complex))
        return _scalar(z, E), _scalar(np.real(z), E)
    alpha, M, F = po.alpha, po.label.M, po.F
    try:
        acub = circle_cubic_coefficient(alpha, M)
    except (NumericError, ValueError) as exc:
        warnings.warn(f"{po.label}: cubic coefficient unavailable ({exc}); using ISPM2", RuntimeWarning)
        amp = amp_C_ispm2(po, E, endpoint_mode)
        return amp, _scalar(np.zeros(np.shape(eps)), E)
    kk = 4.0 * math.pi * (alpha + 2.0) * M * q.K
    zp = q.L_C * np.sqrt(-1j * math.pi * (alpha + 2.0) * M * q.K)
    # A_SSP * sqrt(i kappa eps') is independent of F
    pref = 2.0 * q.L_C * q.T / math.pi * np.sqrt(1j / kk) * erf_diff(0.0, zp) / math.sqrt(math.pi)
    xm, xp = _xi_limits(alpha)
    eps_q = -F / (4.0 * math.pi * (alpha + 2.0) * M * po.K * po.L_C)
    kap = np.atleast_1d(np.asarray(q.L_C, dtype=float))
    airy = np.empty(kap.size, dtype=complex)
    extra = np.empty(kap.size)
    for i, k in enumerate(kap):
        par = CatastropheParams(float(k), eps_q, acub, xm, xp, 0.0)
        p = par if par.a > 0 else par.mirrored()
        z1, z2 = p.z_limits
        ai, gi = airy_gairy_incomplete(p.w, z1, z2)
        airy[i] = math.pi * p.Lambda * complex(ai, gi)
        extra[i] = 2.0 * p.sigma * p.w ** 1.5 / 3.0
    if np.ndim(E) == 0:
        return ComplexValue(complex(pref * airy[0])), float(extra[0])
    return pref * airy, extra


def amp_D_sspm(po, E):
    """Diameter amplitude ``1 / (i pi M K_D omega_r)``."""
    _check(po, Family.D)
    if po.K == 0:
        raise DivergenceError("diameter amplitude diverges at K_D = 0 (oscillator limit)")
    if po.warning:
        warnings.warn(po.warning, RuntimeWarning)
    q = cl.scale_po(po, _eps(po, E))
    return _scalar(1.0 / (1j * math.pi * po.label.M * q.K * q.omega_r), E)


# ------------------------------------------------------ orbit sets

_PRESET = re.compile(r"^(\d+)P(\d+)D(\d+)C$")
_LABEL = re.compile(r"^(\d+)(?:(C)|(D)|P\((\d+),(\d+)\))$")


def _shortest_p(cfg, k, E=1.0):
    if k == 0:
        return []
    tmax = 3.0 * cl.diameter_orbit(cfg, E).tau
    for _ in range(12):
        found = cl.po_catalogue(cfg, tmax, E, families="P")
        if len(found) >= k:
            return [p.label for p in found[:k]]
        tmax *= 2.0
    raise OrbitNotFoundError(f"fewer than {k} polygon families exist at alpha={cfg.alpha}")


def resolve_po_set(cfg, spec, tau_max=20.0, E=1.0):
    """Expand a preset or rule string into an explicit tuple of PoLabel.

    Accepted forms: ``"kPmDnC"`` (k shortest polygon families counting
    repetitions, diameters and circles with M up to m and n), ``"FULLPDC"``
    (every family with tau <= tau_max), or rules such as
    ``"P:max_tau=20;C:M<=2;D:M<=2"`` and ``"P:n=3"``.  A comma-separated
    list of labels such as ``"1C,2D,1P(3,1)"`` is taken literally.
    """
    spec = spec.strip()
    toks = [t for t in re.split(r",(?![^(]*\))", spec.replace(" ", "")) if t]
    if toks and all(_LABEL.match(t) for t in toks):
        labels = []
        for t in toks:
            M, c, d, nr, nt = _LABEL.match(t).groups()
            if c:
                labels.append(PoLabel.circle(int(M)))
            elif d:
                labels.append(PoLabel.diameter(int(M)))
            else:
                labels.append(PoLabel.polygon(int(nr), int(nt), int(M)))
        return tuple(dict.fromkeys(labels))
    m = _PRESET.match(spec)
    if m:
        k, nd, nc = (int(x) for x in m.groups())
        labels = _shortest_p(cfg, k, E)
        labels += [PoLabel.diameter(i) for i in range(1, nd + 1)]
        labels += [PoLabel.circle(i) for i in range(1, nc + 1)]
        return tuple(labels)
    if spec.upper().startswith("FULLPDC"):
        rest = spec[7:].lstrip(":")
        if rest:
            key, _, val = rest.partition("=")
            if key.strip() != "tau_max":
                raise ValueError(f"unknown FULLPDC option {rest!r}")
            tau_max = float(val)
        return tuple(p.label for p in cl.po_catalogue(cfg, tau_max, E))
    labels = []
    for part in filter(None, (s.strip() for s in spec.split(";"))):
        fam, _, rule = part.partition(":")
        fam = Family(fam.strip().upper())
        rule = rule.replace(" ", "")
        if rule.startswith("max_tau="):
            t = float(rule[8:])
            labels += [p.label for p in cl.po_catalogue(cfg, t, E, families=fam.value)]
        elif rule.startswith("M<=") and fam is not Family.P:
            mm = int(rule[3:])
            make = PoLabel.circle if fam is Family.C else PoLabel.diameter
            labels += [make(i) for i in range(1, mm + 1)]
        elif rule.startswith("n=") and fam is Family.P:
            labels += _shortest_p(cfg, int(rule[2:]), E)
        else:
            raise ValueError(f"cannot parse orbit rule {part!r}")
    if not labels:
        raise ValueError("orbit set selects nothing")
    return tuple(dict.fromkeys(labels))


@functools.lru_cache(maxsize=1024)
def _po_data_cached(alpha, label):
    cfg = cl.PotentialConfig(alpha)
    if label.family is Family.C:
        return cl.circle_orbit(cfg, 1.0, label.M)
    if label.family is Family.D:
        return cl.diameter_orbit(cfg, 1.0, label.M)
    return cl.find_po(cfg, 1.0, label.n_r, label.n_theta, label.M)


def po_data(cfg, label):
    """Classical data of ``label`` at E = 1 (cached)."""
    return _po_data_cached(cfg.alpha, label)


def _circle_mode(cfg, tc, po):
    if tc.endpoint_mode is EndpointMode.REDUCED:
        return EndpointMode.REDUCED, "configured"
    if abs(po.F) < tc.reduce_threshold:
        return EndpointMode.REDUCED, "bifurcation"
    if tc.absorb_parent and tc.method_for(Family.P) is Method.ISPM2:
        for lab in tc.po_set:
            if (lab.family is Family.P and lab.M * lab.n_theta == po.label.M
                    and cfg.alpha >= cl.bifurcation_alpha(lab.n_r, lab.n_theta)):
                return EndpointMode.REDUCED, f"absorbed by {lab}"
    return EndpointMode.FULL, ""


def _term(cfg, tc, label, E):
    """Amplitude, total phase and method tag for one family on E (array)."""
    po = po_data(cfg, label)
    method = tc.method_for(label.family)
    extra = 0.0
    note = ""
    if label.family is Family.P:
        amp = amp_P_ispm2(po, E) if method is Method.ISPM2 else amp_P_sspm(po, E)
    elif label.family is Family.D:
        amp = amp_D_sspm(po, E)
    else:
        mode, note = _circle_mode(cfg, tc, po)
        if method is Method.SSPM:
            amp = amp_C_sspm(po, E) if mode is EndpointMode.FULL else 0.0 * amp_C_ispm2(po, E, mode)
        elif method is Method.ISPM3:
            amp, extra = amp_C_ispm3(po, E, mode)
        else:
            amp = amp_C_ispm2(po, E, mode)
    eps = _eps(po, E)
    phase = eps * po.tau - 0.5 * math.pi * effective_maslov(po, method) - po.phi_D
    return po, np.asarray(amp), phase + extra, method, note


def po_contribution(cfg, tc, label, E):
    """Single-family contribution to dg(E) at scalar energy E."""
    po, amp, phase, _, _ = _term(cfg, tc, label, float(E))
    amp = complex(amp)
    term = (amp * np.exp(1j * float(phase))).real
    total = math.remainder(math.atan2(amp.imag, amp.real) + float(phase) - float(_eps(po, E)) * po.tau, 2 * math.pi)
    return PoContribution(label, ComplexValue(amp), float(phase), float(term), total)


def _guard(cfg):
    if cfg.alpha < 2.5:
        raise ValueError("trace sums need alpha >= 2.5 (oscillator symmetry breaking not treated)")


def _raw_terms(cfg, tc, eps):
    _guard(cfg)
    E = cl.energy_from_scaled(cfg.alpha, eps)
    dEde = cl.scaled_quantities(cfg, E)[1]
    for lab in tc.po_set:
        try:
            po, amp, phase, method, note = _term(cfg, tc, lab, E)
        except (NumericError, OrbitNotFoundError) as exc:
            raise type(exc)(f"{lab}: {exc}") from exc
        meta = {"label": str(lab), "tau": float(po.tau), "method": method.value}
        if note:
            meta["endpoint"] = note
        yield np.real(amp * np.exp(1j * phase)) * dEde, meta


def density_by_po(cfg, tc, eps_grid):
    """Un-averaged scaled density per family, keyed by label string."""
    eps = np.asarray(eps_grid, dtype=float)
    return {m["label"]: DensityGrid("scaledE", eps, v, m) for v, m in _raw_terms(cfg, tc, eps)}


def averaging_factor(tau, gamma):
    return math.exp(-(tau * gamma) ** 2 / 4.0)


def coarse_grain(by_po, gamma):
    """Sum of family densities, each damped by exp(-tau^2 gamma^2 / 4)."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    items = list(by_po.values())
    grid = items[0].grid
    vals = np.zeros(grid.size)
    for d in items:
        vals += d.values * averaging_factor(d.meta["tau"], gamma)
    meta = {"gamma": gamma, "po_set": [d.meta["label"] for d in items]}
    return DensityGrid("scaledE", grid, vals, meta)


def density_scaled(cfg, tc, eps):
    """Un-averaged scaled density d G(eps) = dg(E) dE/deps."""
    e = np.asarray(eps, dtype=float)
    tot = sum(v for v, _ in _raw_terms(cfg, tc, e))
    return float(tot) if e.ndim == 0 else tot


def density_total(cfg, tc, E):
    """Un-averaged oscillating density dg(E)."""
    E = np.asarray(E, dtype=float)
    eps = cl.scaled_energy(cfg.alpha, E)
    d = density_scaled(cfg, tc, eps)
    return d / cl.scaled_quantities(cfg, E)[1]


def scl_density(cfg, tc, eps_grid):
    """Gaussian-averaged scaled density on a grid, with metadata."""
    by = density_by_po(cfg, tc, eps_grid)
    avg = coarse_grain(by, tc.gamma_avg)
    method = (tc.method.value if isinstance(tc.method, Method)
              else {k.value: v.value for k, v in tc.method.items()})
    meta = {"alpha": cfg.alpha, "gamma": tc.gamma_avg, "method": method,
            "endpoint_mode": tc.endpoint_mode.value, "absorb_parent": tc.absorb_parent,
            "reduce_threshold": tc.reduce_threshold, "po_set": [str(x) for x in tc.po_set],
            "po_digest": tc.digest(),
            "endpoint_notes": {k: d.meta["endpoint"] for k, d in by.items() if "endpoint" in d.meta}}
    return DensityGrid("scaledE", avg.grid, avg.values, meta)


def fourier_scl(cfg, tc, gamma_cut, tau_grid, eps_min=1.0, step=None, check=True):
    """|int dG(eps) e^{i eps tau} e^{-(eps/gamma)^2} d eps| by direct quadrature.

    The density is sampled on [eps_min, 4 gamma_cut] with a step of at most
    pi / (4 tau_max); a second evaluation on every other sample guards against
    aliasing.
    """
    tau = np.asarray(tau_grid, dtype=float)
    tmax = max(float(np.max(np.abs(tau))), max(po_data(cfg, l).tau for l in tc.po_set))
    hmax = math.pi / (4.0 * tmax)
    if step is None:
        step = hmax / 2.0
    if step > hmax:
        raise ResolutionError(f"grid step {step:g} exceeds pi/(4 tau_max) = {hmax:g}")
    n = int(math.ceil((4.0 * gamma_cut - eps_min) / step))
    n += n % 2
    eps = np.linspace(eps_min, 4.0 * gamma_cut, n + 1)
    g = density_scaled(cfg, tc, eps) * np.exp(-(eps / gamma_cut) ** 2)

    def transform(e, v):
        out = np.empty(tau.size)
        for lo in range(0, tau.size, 200):
            ph = np.exp(1j * tau[lo:lo + 200, None] * e[None, :])
            out[lo:lo + 200] = np.abs(np.trapezoid(ph * v[None, :], e, axis=1))
        return out

    full = transform(eps, g)
    if check:
        half = transform(eps[::2], g[::2])
        scale = max(float(np.max(full)), 1e-300)
        if np.max(np.abs(full - half)) > 1e-3 * scale:
            raise ResolutionError("Fourier transform not converged under grid halving")
    return full
