"""Shell structure from the spectrum and from the orbit sum.

Run with ``python3 demos/quantum_vs_semiclassical.py [alpha]`` (default 7).
Solving the spectrum takes a few seconds.

The quantum oscillating density is the Gaussian-averaged level density minus
its Strutinsky average.  The semiclassical one sums the three shortest orbit
families with the improved stationary-phase amplitudes.  Both are divided by
the scaled energy, which removes the overall growth of the amplitudes.  The
Fourier transform of the spectrum then shows peaks at the orbit periods.
"""
import sys

import numpy as np

from rplscl import classical as cl
from rplscl import quantum as qm
from rplscl import traces as tr
from rplscl.classical import PotentialConfig


def main(alpha=7.0):
    cfg = PotentialConfig(alpha)
    sp = qm.solve_spectrum(cfg, 76.0)
    print(f"alpha={alpha:g}: {len(sp)} radial levels below scaled energy 76")

    grid = np.linspace(10.0, 40.0, 1201)
    dq = qm.delta_g_qm(sp, qm.SmoothingConfig(gamma_avg=0.6), grid).values / grid
    tc = tr.TraceConfig(tr.resolve_po_set(cfg, "1P1D1C"), gamma_avg=0.6)
    dens = tr.scl_density(cfg, tc, grid)
    ds = dens.values / grid
    ratio = np.sqrt(np.mean((dq - ds) ** 2)) / np.sqrt(np.mean(dq ** 2))
    print("orbits:", ", ".join(str(x) for x in tc.po_set))
    if dens.meta.get("endpoint_notes"):
        print("end-point handling:", dens.meta["endpoint_notes"])
    print(f"normalised RMS difference on [10, 40]: {ratio:.3f}\n")

    print(f"{'eps':>6} {'QM':>9} {'ISPM':>9}")
    for k in range(0, grid.size, 80):
        print(f"{grid[k]:6.2f} {dq[k]:9.4f} {ds[k]:9.4f}")

    taus = np.linspace(1.0, 14.0, 2601)
    F = qm.fourier_qm(sp, 20.0, taus)
    inner = (F[1:-1] > F[:-2]) & (F[1:-1] > F[2:]) & (F[1:-1] > 0.2 * F.max())
    print("\nFourier peaks of the spectrum and the nearest orbits")
    cat = cl.po_catalogue(cfg, 14.0)
    for t, h in zip(taus[1:-1][inner], F[1:-1][inner]):
        near = min(cat, key=lambda p: abs(p.tau - t))
        print(f"  tau={t:6.3f}  |F|={h:8.1f}  nearest {near.label} at {near.tau:.3f}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 7.0)
