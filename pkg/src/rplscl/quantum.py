"""Quantum spectra of the power-law well and the densities built from them.

Radial levels come from a second-order finite-difference Hamiltonian on
three nested grids combined by Richardson extrapolation; a Numerov shooting
solver provides an independent check.  Levels carry the spinless degeneracy
2l + 1.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq
from scipy.special import eval_genlaguerre

from .classical import energy_from_scaled, scaled_energy
from .errors import CompletenessError, ResolutionError
from .grid import DensityGrid

__all__ = [
    "SpectrumLevel", "Spectrum", "SmoothingConfig", "solve_spectrum", "numerov_level",
    "quantum_coarse_density", "strutinsky_smooth", "plateau_diagnostic", "delta_g_qm",
    "fourier_qm", "box_radius",
]


@dataclass(frozen=True)
class SpectrumLevel:
    l: int
    n: int
    E: float
    eps: float

    @property
    def degeneracy(self):
        return 2 * self.l + 1


class Spectrum(list):
    """Sorted list of SpectrumLevel that remembers its completeness limit."""

    def __init__(self, levels, alpha, eps_max, max_error=0.0):
        super().__init__(sorted(levels, key=lambda x: x.E))
        self.alpha = alpha
        self.eps_max = eps_max
        self.max_error = max_error

    @property
    def eps(self):
        return np.array([x.eps for x in self])

    @property
    def weights(self):
        return np.array([x.degeneracy for x in self], dtype=float)


@dataclass(frozen=True)
class SmoothingConfig:
    gamma_tilde: float = 2.5
    curvature_order: int = 6
    gamma_avg: float = 0.6
    gamma_cut: float = 20.0

    def __post_init__(self):
        if self.curvature_order not in (0, 2, 4, 6, 8):
            raise ValueError("curvature_order must be one of 0, 2, 4, 6, 8")
        if not self.gamma_tilde > self.gamma_avg > 0:
            raise ValueError("need gamma_tilde > gamma_avg > 0")
        if self.gamma_cut <= 0:
            raise ValueError("gamma_cut must be positive")


def box_radius(alpha, eps_max):
    return 1.5 * eps_max ** (2.0 / (2.0 + alpha)) + 2.0


def _threads(threads):
    if threads is None:
        threads = int(os.environ.get("RPLSCL_THREADS", "1"))
    return max(1, threads)


def _fd_levels(alpha, l, h, rbox, select):
    n = int(round(rbox / h))
    h = rbox / n
    r = h * np.arange(1, n)
    d = 1.0 / h ** 2 + l * (l + 1) / (2.0 * r * r) + r ** alpha
    e = np.full(n - 2, -0.5 / h ** 2)
    if select[0] == "v":
        return eigh_tridiagonal(d, e, eigvals_only=True, select="v", select_range=(-1.0, select[1]))
    return eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, select[1] - 1))


def _channel(alpha, l, E_max, h, rbox):
    a = _fd_levels(alpha, l, h, rbox, ("v", E_max * 1.02 + 1.0))
    k = len(a)
    if k == 0:
        return np.empty(0), np.empty(0)
    b = _fd_levels(alpha, l, h / 2, rbox, ("i", k))
    c = _fd_levels(alpha, l, h / 4, rbox, ("i", k))
    ab = (4 * b - a) / 3
    bc = (4 * c - b) / 3
    return (16 * bc - ab) / 15, np.abs(bc - ab) / 15


def solve_spectrum(cfg, eps_max, l_max=None, h=None, threads=None, tol=1e-8):
    """All levels with scaled energy up to ``eps_max``.

    When ``l_max`` is omitted channels are added until one holds no level
    below the cut.  A given ``l_max`` must itself be empty below the cut,
    otherwise CompletenessError is raised.  ResolutionError signals that the
    Richardson error estimate exceeds ``tol`` (relative).
    """
    a = cfg.alpha
    if eps_max <= 0:
        raise ValueError("eps_max must be positive")
    E_max = float(energy_from_scaled(a, eps_max))
    rbox = box_radius(a, eps_max)
    if h is None:
        h = 2e-3 if a < 5 else 1e-3
    pool = _threads(threads)
    levels, worst = [], 0.0

    def run(l):
        return _channel(a, l, E_max, h, rbox)

    def add(l, vals, errs):
        nonlocal worst
        keep = vals <= E_max
        if not np.any(keep):
            return False
        worst = max(worst, float(np.max(errs[keep] / vals[keep])))
        for n, E in enumerate(vals[keep]):
            levels.append(SpectrumLevel(l, n, float(E), float(scaled_energy(a, E))))
        return True

    with ThreadPoolExecutor(pool) as ex:
        if l_max is None:
            l = 0
            while True:
                batch = range(l, l + 4 * pool)
                filled = [add(ll, *res) for ll, res in zip(batch, ex.map(run, batch))]
                if not all(filled):
                    break
                l = batch.stop
        else:
            batch = range(0, l_max + 1)
            filled = [add(ll, *res) for ll, res in zip(batch, ex.map(run, batch))]
            if filled[-1]:
                raise CompletenessError(
                    f"channel l={l_max} still has levels below eps_max={eps_max}; raise l_max")
    if worst > tol:
        raise ResolutionError(f"eigenvalue error estimate {worst:.2e} exceeds {tol:.0e}; reduce h")
    return Spectrum(levels, a, float(eps_max), worst)


# ------------------------------------------------------------ Numerov

def _numerov_end(alpha, l, E, h, rbox):
    """u(r_box) and node count of the outward Numerov solution."""
    n = int(round(rbox / h))
    h = rbox / n
    r = h * np.arange(n + 1)
    with np.errstate(divide="ignore"):
        k2 = 2.0 * (E - r ** alpha) - l * (l + 1) / np.where(r > 0, r * r, 1.0)
    k2[0] = 0.0
    f = 1.0 + h * h * k2 / 12.0
    u_prev, u = 0.0, h ** (l + 1)
    nodes = 0
    for j in range(1, n):
        u_next = ((12.0 - 10.0 * f[j]) * u - f[j - 1] * u_prev) / f[j + 1]
        if u_next * u < 0:
            nodes += 1
        u_prev, u = u, u_next
        if abs(u) > 1e100:
            u_prev /= 1e100
            u /= 1e100
    return u, nodes


def numerov_level(cfg, l, n, eps_max=None, h=1e-3):
    """Energy of the radial level (l, n) by Numerov shooting, Richardson over h, h/2.

    Brackets by node counting, then refines with Brent's method on u(r_box).
    """
    a = cfg.alpha
    if eps_max is None:
        eps_max = 10.0
    rbox = box_radius(a, eps_max)

    def solve(hh):
        lo, hi = 0.0, 1.0
        while _numerov_end(a, l, hi, hh, rbox)[1] <= n:
            lo, hi = hi, 2 * hi
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            cnt = _numerov_end(a, l, mid, hh, rbox)[1]
            if cnt > n:
                hi = mid
            else:
                lo = mid
            if _numerov_end(a, l, lo, hh, rbox)[1] == n and cnt == n + 1:
                break
        f = lambda E: _numerov_end(a, l, E, hh, rbox)[0]
        return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)

    e1 = solve(h)
    e2 = solve(h / 2)
    return (16 * e2 - e1) / 15


# ------------------------------------------------------------- densities

def _check_margin(levels, hi, margin, what):
    lim = getattr(levels, "eps_max", None)
    if lim is not None and lim < hi + margin:
        raise CompletenessError(
            f"{what}: spectrum complete to eps={lim:g} but {hi + margin:g} is needed")


def quantum_coarse_density(levels, gamma_avg, grid):
    """sum_i (2l_i+1) exp(-((eps - eps_i)/gamma)^2) on the scaled-energy grid."""
    grid = np.asarray(grid, dtype=float)
    if gamma_avg <= 0:
        raise ValueError("gamma_avg must be positive")
    _check_margin(levels, grid.max(), 5.0 * gamma_avg, "coarse density")
    e, d = _arrays(levels)
    vals = np.zeros(grid.size)
    for lo in range(0, e.size, 2000):
        x = (grid[:, None] - e[None, lo:lo + 2000]) / gamma_avg
        vals += np.exp(-x * x) @ d[lo:lo + 2000]
    return DensityGrid("scaledE", grid, vals, {"kind": "quantum_coarse", "gamma": gamma_avg})


def _arrays(levels):
    if isinstance(levels, Spectrum):
        return levels.eps, levels.weights
    return (np.array([x.eps for x in levels], dtype=float),
            np.array([x.degeneracy for x in levels], dtype=float))


def _strutinsky_values(e, d, grid, gt, order):
    vals = np.zeros(grid.size)
    k = order // 2
    for lo in range(0, e.size, 2000):
        u = (grid[:, None] - e[None, lo:lo + 2000]) / gt
        u2 = u * u
        vals += (np.exp(-u2) * eval_genlaguerre(k, 0.5, u2)) @ d[lo:lo + 2000]
    return vals / (math.sqrt(math.pi) * gt)


def plateau_diagnostic(levels, grid, order=6, gammas=None):
    """max over gamma_tilde of |d G~ / d gamma_tilde| on the grid, and max |G~|."""
    grid = np.asarray(grid, dtype=float)
    if gammas is None:
        gammas = np.linspace(2.0, 3.0, 11)
    e, d = _arrays(levels)
    curves = np.array([_strutinsky_values(e, d, grid, g, order) for g in gammas])
    deriv = np.gradient(curves, gammas, axis=0)
    return float(np.max(np.abs(deriv))), float(np.max(np.abs(curves)))


def strutinsky_smooth(levels, smoothing, grid, plateau_threshold=0.02):
    """Strutinsky-smoothed density over scaled energy.

    Gaussian folding of width gamma_tilde with the generalised Laguerre
    curvature correction L_k^{(1/2)}(u^2), k = curvature_order/2.  The plateau
    diagnostic over gamma_tilde in [2, 3] is stored in ``meta`` together with
    a warning when it exceeds ``plateau_threshold`` times max |G~|.
    """
    grid = np.asarray(grid, dtype=float)
    gt, order = smoothing.gamma_tilde, smoothing.curvature_order
    if not 1.5 <= gt <= 4.0:
        raise ValueError("gamma_tilde must lie in [1.5, 4]")
    _check_margin(levels, grid.max(), 6.0 * max(gt, 3.0), "Strutinsky smoothing")
    e, d = _arrays(levels)
    vals = _strutinsky_values(e, d, grid, gt, order)
    diag, gmax = plateau_diagnostic(levels, grid, order)
    meta = {"kind": "strutinsky", "gamma_tilde": gt, "curvature_order": order,
            "plateau_diagnostic": diag, "plateau_scale": gmax}
    if diag > plateau_threshold * gmax:
        meta["warning"] = f"no plateau: diagnostic {diag:.3g} > {plateau_threshold} * {gmax:.3g}"
    return DensityGrid("scaledE", grid, vals, meta)


def _folded_smooth(levels, smoothing, grid):
    """Strutinsky density folded with the unit-normalised averaging Gaussian.

    Gauss-Hermite nodes whose weight is below 1e-16 are dropped; the smooth
    curve varies on the scale gamma_tilde, so the remaining nodes suffice.
    """
    t, w = np.polynomial.hermite.hermgauss(40)
    keep = w > 1e-16 * w.max()
    t, w = t[keep], w[keep] / math.sqrt(math.pi)
    shifted = grid[:, None] + smoothing.gamma_avg * t[None, :]
    _check_margin(levels, float(shifted.max()), 6.0 * max(smoothing.gamma_tilde, 3.0), "Strutinsky smoothing")
    e, d = _arrays(levels)
    vals = _strutinsky_values(e, d, shifted.ravel(), smoothing.gamma_tilde, smoothing.curvature_order)
    return vals.reshape(shifted.shape) @ w


def delta_g_qm(levels, smoothing, grid):
    """Oscillating quantum density averaged over gamma_avg.

    The coarse density is divided by sqrt(pi) gamma so that it becomes a
    unit-normalised convolution; the Strutinsky average is folded with the
    same Gaussian before subtraction, so the smooth part cancels exactly
    (folding alone would add gamma^2 g~''/4 to it).
    """
    grid = np.asarray(grid, dtype=float)
    g = smoothing.gamma_avg
    coarse = quantum_coarse_density(levels, g, grid)
    smooth = strutinsky_smooth(levels, smoothing, grid)
    vals = coarse.values / (math.sqrt(math.pi) * g) - _folded_smooth(levels, smoothing, grid)
    meta = {"kind": "delta_g_qm", "gamma_avg": g, "gamma_tilde": smoothing.gamma_tilde,
            "curvature_order": smoothing.curvature_order,
            "plateau_diagnostic": smooth.meta["plateau_diagnostic"]}
    if "warning" in smooth.meta:
        meta["warning"] = smooth.meta["warning"]
    return DensityGrid("scaledE", grid, vals, meta)


def fourier_qm(levels, gamma_cut, tau_grid):
    """|sum_i (2l_i+1) exp(i eps_i tau) exp(-(eps_i/gamma)^2)| on tau_grid."""
    tau = np.asarray(tau_grid, dtype=float)
    lim = getattr(levels, "eps_max", None)
    if lim is not None and math.exp(-(lim / gamma_cut) ** 2) > 1e-6:
        raise CompletenessError(
            f"truncation weight at eps_max={lim:g} exceeds 1e-6 for gamma_cut={gamma_cut:g}")
    e, d = _arrays(levels)
    wts = d * np.exp(-(e / gamma_cut) ** 2)
    out = np.zeros(tau.size)
    for lo in range(0, tau.size, 500):
        ph = np.exp(1j * tau[lo:lo + 500, None] * e[None, :])
        out[lo:lo + 500] = np.abs(ph @ wts)
    return out
