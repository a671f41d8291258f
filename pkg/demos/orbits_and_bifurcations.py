"""Periodic orbits of V = r^alpha and the birth of the triangle family.

Run with ``python3 demos/orbits_and_bifurcations.py``.

The circle orbit loses stability whenever sqrt(alpha + 2) passes a rational
n_r/n_theta.  At alpha = 7 the triangle-like family P(3,1) splits off the
circle, and its scaled period starts exactly at the circle value.  The
script prints the orbit table on both sides of that point and follows the
two periods through it.
"""
import math

import numpy as np

from rplscl import classical as cl
from rplscl.classical import PotentialConfig


def table(alpha, tau_max=10.0):
    print(f"\norbits at alpha={alpha:g} with tau <= {tau_max:g}")
    print(f"{'label':>9} {'tau':>10} {'T':>10} {'K':>10} {'F':>10} {'mu':>4}")
    for p in cl.po_catalogue(PotentialConfig(alpha), tau_max):
        F = "" if p.F is None else f"{p.F:10.4f}"
        print(f"{str(p.label):>9} {p.tau:10.5f} {p.T:10.5f} {p.K:10.5f} {F:>10} {p.maslov:4d}")


def main():
    for a in (6.0, 7.0, 8.0):
        table(a)

    # stability factor of the circle crosses zero at the bifurcation
    print("\ncircle stability factor F = 4 sin^2(pi sqrt(alpha+2))")
    for a in (6.8, 6.9, 7.0, 7.1, 7.2):
        print(f"  alpha={a:4.1f}  F={cl.circle_orbit(PotentialConfig(a), 1.0).F:.6f}")

    print(f"\nP(3,1) is born at alpha_bif = {cl.bifurcation_alpha(3, 1):g}")
    print(f"{'alpha':>8} {'tau_C':>10} {'tau_P31':>10} {'L*/L_C':>10}")
    for a in np.arange(7.0, 8.01, 0.2):
        cfg = PotentialConfig(float(a))
        c = cl.circle_orbit(cfg, 1.0)
        p = cl.find_po(cfg, 1.0, 3, 1)
        print(f"{a:8.2f} {c.tau:10.5f} {p.tau:10.5f} {p.L_star / c.L_C:10.6f}")

    # below the bifurcation the family does not exist
    try:
        cl.find_po(PotentialConfig(6.9), 1.0, 3, 1)
    except Exception as exc:
        print(f"\nalpha=6.9: {type(exc).__name__}: {exc}")

    c7 = cl.circle_orbit(PotentialConfig(7.0), 1.0)
    print(f"\ntau_1C(7) = {c7.tau:.6f}  (2 pi L_C with L_C = {c7.L_C:.6f})")
    print(f"omega_theta/omega_r at the circle = 1/sqrt(9) = {1 / math.sqrt(9):.6f}")


if __name__ == "__main__":
    main()
