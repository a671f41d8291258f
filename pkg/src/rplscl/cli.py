"""Command-line front end: ``rplscl <command> [options]``.

Every command writes CSV (or JSON with ``--format json``) with ``#`` metadata
lines recording the version, a digest of the options and the numerical
settings.  Exit status is 0 on success, 2 for invalid options and 1 for
numerical failures.  ``RPLSCL_THREADS`` sets the worker count of the
spectrum solver.
"""
import argparse
import hashlib
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from . import classical as cl
from . import quantum as qm
from . import specfun as sf
from . import traces as tr
from .errors import RplError
from .grid import energy_grid
from .io import format_csv, to_json, write_text

TOLERANCES = {"radial_action": 1e-10, "po_root": 1e-10, "eigenvalue": 1e-8, "erf": 1e-12,
              "airy": 1e-10, "catastrophe": 1e-8}


class UsageError(Exception):
    pass


def _range(text, n=3):
    try:
        parts = [float(p) for p in text.split(":")]
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected lo:hi:step") from None
    if len(parts) != n:
        raise UsageError(f"bad range {text!r}; expected {n} colon-separated numbers")
    if parts[1] <= parts[0] or (n == 3 and parts[2] <= 0):
        raise UsageError(f"empty or reversed range {text!r}")
    return parts


def _alpha(a):
    try:
        return cl.PotentialConfig(a)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _meta(args, extra=None):
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output", "format")}
    digest = hashlib.sha1(json.dumps(opts, sort_keys=True, default=str).encode()).hexdigest()[:16]
    meta = {"program": "rplscl", "version": __version__, "command": args.command,
            "options": opts, "config_digest": digest, "tolerances": TOLERANCES}
    meta.update(extra or {})
    return meta


def _emit(args, columns, meta):
    if args.format == "json":
        text = to_json({"meta": meta, "data": columns})
    else:
        text = format_csv(columns, meta)
    write_text(text, args.output, sys.stdout)


# ------------------------------------------------------------ commands

def cmd_po_table(args):
    cfg = _alpha(args.alpha)
    rows = cl.po_catalogue(cfg, args.tau_max, args.energy)
    cols = {k: [] for k in ("family", "n_r", "n_theta", "M", "alpha", "L_star", "tau", "T", "K",
                            "F", "maslov", "phi_D")}
    for p in rows:
        lab = p.label
        for k, v in (("family", lab.family.value), ("n_r", lab.n_r), ("n_theta", lab.n_theta),
                     ("M", lab.M), ("alpha", cfg.alpha), ("L_star", p.L_star), ("tau", p.tau),
                     ("T", p.T), ("K", p.K), ("F", p.F if p.F is not None else float("nan")),
                     ("maslov", p.maslov), ("phi_D", p.phi_D)):
            cols[k].append(v)
    _emit(args, cols, _meta(args, {"energy": args.energy}))


def cmd_bif_diagram(args):
    lo, hi, step = _range(args.alpha_range)
    alphas = energy_grid(lo, hi, step)
    cols = {"alpha": [], "tau": [], "family": [], "label": []}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for a in alphas:
            for p in cl.po_catalogue(cl.PotentialConfig(float(a)), args.tau_max):
                cols["alpha"].append(float(a))
                cols["tau"].append(p.tau)
                cols["family"].append(p.label.family.value)
                cols["label"].append(str(p.label))
    # bifurcation points of polygon families inside the window
    marks = []
    for nt in range(1, 6):
        for nr in range(2 * nt + 1, 4 * nt + 1):
            if math.gcd(nr, nt) != 1:
                continue
            ab = cl.bifurcation_alpha(nr, nt)
            if lo <= ab <= hi:
                tau = cl.circle_orbit(cl.PotentialConfig(ab), 1.0, nt).tau
                if tau <= args.tau_max:
                    marks.append({"label": f"P({nr},{nt})", "alpha_bif": ab, "tau": tau})
    _emit(args, cols, _meta(args, {"bifurcations": marks}))


def _trace_config(args, cfg):
    labels = tr.resolve_po_set(cfg, args.po_set, tau_max=args.tau_max)
    return tr.TraceConfig(labels, gamma_avg=args.gamma, endpoint_mode=args.endpoint_mode,
                          method=args.method, absorb_parent=not args.no_absorb)


def cmd_trace(args):
    cfg = _alpha(args.alpha)
    lo, hi, step = _range(args.eps_range)
    grid = energy_grid(lo, hi, step)
    tc = _trace_config(args, cfg)
    dens = tr.scl_density(cfg, tc, grid)
    cols = {"scaled_energy": grid, "value": dens.values}
    if args.per_po:
        for k, d in tr.density_by_po(cfg, tc, grid).items():
            cols[k] = d.values * tr.averaging_factor(d.meta["tau"], tc.gamma_avg)
    _emit(args, cols, _meta(args, dens.meta))


def _spectrum(args, cfg, eps_max):
    return qm.solve_spectrum(cfg, eps_max, threads=args.threads)


def cmd_spectrum(args):
    cfg = _alpha(args.alpha)
    sp = _spectrum(args, cfg, args.eps_max)
    cols = {"l": [x.l for x in sp], "n": [x.n for x in sp], "E": [x.E for x in sp],
            "eps": [x.eps for x in sp], "degeneracy": [x.degeneracy for x in sp]}
    _emit(args, cols, _meta(args, {"levels": len(sp), "max_rel_error": sp.max_error}))


def cmd_fourier(args):
    cfg = _alpha(args.alpha)
    lo, hi, step = _range(args.tau_range)
    taus = energy_grid(lo, hi, step)
    gcut = args.gamma_cut if args.gamma_cut else args.eps_max / 2.0
    if args.source == "qm":
        need = 3.8 * gcut
        sp = _spectrum(args, cfg, max(args.eps_max, need))
        vals = qm.fourier_qm(sp, gcut, taus)
        extra = {"gamma_cut": gcut, "levels": len(sp)}
    else:
        tc = _trace_config(args, cfg)
        vals = tr.fourier_scl(cfg, tc, gcut, taus)
        extra = {"gamma_cut": gcut, "po_set": [str(x) for x in tc.po_set]}
    _emit(args, {"tau": taus, "absF": vals}, _meta(args, extra))


def cmd_compare(args):
    cfg = _alpha(args.alpha)
    lo, hi, step = _range(args.eps_range)
    grid = energy_grid(lo, hi, step)
    sm = qm.SmoothingConfig(gamma_tilde=args.gamma_tilde, curvature_order=args.curvature_order,
                            gamma_avg=args.gamma)
    sp = _spectrum(args, cfg, hi + 6.0 * args.gamma + 6.0 * max(args.gamma_tilde, 3.0) + 1.0)
    dq = qm.delta_g_qm(sp, sm, grid)
    tc = _trace_config(args, cfg)
    ds = tr.scl_density(cfg, tc, grid)
    a, b = dq.values / grid, ds.values / grid
    ratio = float(np.sqrt(np.mean((a - b) ** 2)) / np.sqrt(np.mean(a ** 2)))
    meta = {"semiclassical": ds.meta, "quantum": dq.meta, "rms_ratio": ratio}
    _emit(args, {"scaled_energy": grid, "dG_qm_over_eps": a, "dG_scl_over_eps": b}, _meta(args, meta))


def cmd_catastrophe_demo(args):
    lo, hi = _range(args.limits, 2)
    a = float(eval_fraction(args.a))
    out = {}
    for sign in (1, -1):
        p = sf.CatastropheParams(args.kappa, sign * abs(args.eps), a, lo, hi)
        d = sf.catastrophe_direct(1.0, 0.0, p)
        f = sf.catastrophe_airy_form(1.0, 0.0, p)
        out["eps=%+g" % (sign * abs(args.eps))] = {
            "w": p.w, "Lambda": p.Lambda, "z_limits": list(p.z_limits),
            "direct": complex(d), "airy_form": complex(f),
            "relative_difference": abs(d - f) / abs(d),
            "saddle_phase": complex(sf.saddle_contribution(p)),
        }
    shift = sf.maslov_phase_shift(args.kappa, args.eps, a)
    result = {"meta": _meta(args), "kappa": args.kappa, "a": a, "limits": [lo, hi], "cases": out,
              "phase_shift": shift, "phase_shift_minus_half_pi": shift - math.pi / 2}
    text = to_json(result)
    if args.format == "csv":
        rows = {"quantity": [], "value": []}
        for k, v in out.items():
            for q in ("w", "relative_difference"):
                rows["quantity"].append(f"{k}:{q}")
                rows["value"].append(v[q])
        rows["quantity"].append("phase_shift")
        rows["value"].append(shift)
        text = format_csv(rows, _meta(args))
    write_text(text, args.output, sys.stdout)


def eval_fraction(text):
    """Parse '1/6' or '0.1666'."""
    if "/" in text:
        n, d = text.split("/")
        return float(n) / float(d)
    return float(text)


# ------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="rplscl", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(s, alpha=True):
        if alpha:
            s.add_argument("--alpha", type=float, required=True)
        s.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--threads", type=int, default=None)

    def orbits(s):
        s.add_argument("--po-set", default="1P1D1C")
        s.add_argument("--tau-max", type=float, default=20.0)
        s.add_argument("--method", choices=("ISPM2", "ISPM3", "SSPM"), default="ISPM2")
        s.add_argument("--endpoint-mode", choices=("full", "reduced_at_bifurcation"), default="full")
        s.add_argument("--no-absorb", action="store_true",
                       help="keep circle terms even when a daughter polygon family is summed")
        s.add_argument("--gamma", type=float, default=0.6)

    s = sub.add_parser("po-table", help="periodic-orbit table")
    common(s)
    s.add_argument("--tau-max", type=float, default=20.0)
    s.add_argument("--energy", type=float, default=1.0)
    s.set_defaults(func=cmd_po_table)

    s = sub.add_parser("bif-diagram", help="scaled periods against alpha")
    common(s, alpha=False)
    s.add_argument("--alpha-range", default="2:8:0.01")
    s.add_argument("--tau-max", type=float, default=13.0)
    s.set_defaults(func=cmd_bif_diagram)

    s = sub.add_parser("trace", help="semiclassical scaled density")
    common(s)
    orbits(s)
    s.add_argument("--eps-range", default="5:40:0.05")
    s.add_argument("--per-po", action="store_true")
    s.set_defaults(func=cmd_trace)

    s = sub.add_parser("spectrum", help="quantum levels")
    common(s)
    s.add_argument("--eps-max", type=float, default=40.0)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("fourier", help="|F(tau)| of the spectrum or of the orbit sum")
    common(s)
    orbits(s)
    s.add_argument("--source", choices=("qm", "scl"), default="qm")
    s.add_argument("--eps-max", type=float, default=40.0)
    s.add_argument("--gamma-cut", type=float, default=None)
    s.add_argument("--tau-range", default="0:15:0.01")
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("compare", help="quantum vs semiclassical oscillating density")
    common(s)
    orbits(s)
    s.add_argument("--eps-range", default="10:40:0.025")
    s.add_argument("--gamma-tilde", type=float, default=2.5)
    s.add_argument("--curvature-order", type=int, default=6)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("catastrophe-demo", help="fold catastrophe integral and Maslov shift")
    common(s, alpha=False)
    s.set_defaults(format="json")
    s.add_argument("--kappa", type=float, default=1e4)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--a", default="1/6")
    s.add_argument("--limits", default="-1:1")
    s.set_defaults(func=cmd_catastrophe_demo)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (UsageError, ValueError) as exc:
        if isinstance(exc, RplError):
            print(f"rplscl {args.command}: numerical failure: {exc}", file=sys.stderr)
            return 1
        print(f"rplscl {args.command}: {exc}", file=sys.stderr)
        return 2
    except (RplError, ArithmeticError, RuntimeError) as exc:
        print(f"rplscl {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
