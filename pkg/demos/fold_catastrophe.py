"""Fold catastrophe integral and the pi/2 Maslov jump.

Run with ``python3 demos/fold_catastrophe.py``.

The integral  int exp(i kappa (eps x^2 + a x^3)) dx  over [-1, 1] has two
stationary points for eps != 0.  Far from eps = 0 each contributes a Fresnel
term, and the phase of the dominant one flips by pi/2 as eps changes sign.
The incomplete Airy form reproduces direct quadrature, and the finite-kappa
phase difference approaches pi/2 only slowly, as the table shows.
"""
import cmath
import math

from rplscl import specfun as sf
from rplscl.specfun import CatastropheParams


def main():
    a = 1 / 6
    print("direct quadrature vs incomplete Airy form, kappa=1e4")
    for eps in (0.1, 0.05, 0.0, -0.05, -0.1):
        p = CatastropheParams(1e4, eps, a)
        d = complex(sf.catastrophe_direct(1.0, 0.0, p))
        f = complex(sf.catastrophe_airy_form(1.0, 0.0, p))
        print(f"  eps={eps:+.2f}  w={p.w:7.3f}  |I|={abs(d):.6f}  arg={cmath.phase(d):+.5f}"
              f"  rel diff={abs(d - f) / abs(d):.1e}")

    print("\nphase difference between eps=+0.05 and eps=-0.05")
    print(f"{'kappa':>10} {'w':>8} {'shift - pi/2':>14}")
    for kappa in (1e3, 1e4, 1e5, 1e6):
        w = CatastropheParams(kappa, 0.05, a).w
        s = sf.maslov_phase_shift(kappa, 0.05, a)
        print(f"{kappa:10.0e} {w:8.2f} {s - math.pi / 2:14.6f}")

    # the complete Airy function against its large-w form
    print("\nAi(-w) sqrt(pi) w^(1/4) vs sin(2/3 w^(3/2) + pi/4)")
    for w in (5.0, 10.0, 25.0):
        ai, _ = sf.airy_gairy_complete(w)
        print(f"  w={w:5.1f}  {ai * math.sqrt(math.pi) * w ** 0.25:+.6f}"
              f"  {math.sin(2 * w ** 1.5 / 3 + math.pi / 4):+.6f}")


if __name__ == "__main__":
    main()
