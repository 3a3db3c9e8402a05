"""Command-line front door.

Subcommands: validate, unitarize, map, sweep {morse|metric|residual|gluegap},
torelli, gh-demo.  JSON in, CSV/JSON out with 17 significant digits; sweep,
torelli and gh-demo additionally render a PNG figure next to each CSV.
Outputs are byte-identical across runs with the same seed and config.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import gibbons_hawking as gh
from . import higgs, hyperpolygon
from .errors import PolyhiggsError
from .globalmetric import ApproxMetricCfg, r_sweep
from .hp_tangent import hp_norm_sq, random_unitary_lift
from .tolerances import Tolerances


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


def _write_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=1, sort_keys=True)
        f.write("\n")


def _save_figure(path, draw):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    draw(ax)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _load(args):
    rep, beta = hyperpolygon.load_json(args.input)
    if beta is None:
        raise PolyhiggsError("input file is missing the beta weights")
    return rep, hyperpolygon.BetaWeights(tuple(float(b) for b in beta))


def _tolerances(args) -> Tolerances:
    if args.tol is None:
        return Tolerances()
    return Tolerances(eq=args.tol, moment=args.tol, kernel=args.tol,
                      invariant=args.tol)


def _cfg(args) -> ApproxMetricCfg:
    kw = {}
    if args.delta is not None:
        kw["delta"] = args.delta
    if args.eps is not None:
        kw["eps"] = args.eps
    if args.grid_radial is not None:
        kw["n_radial"] = args.grid_radial
    if args.grid_angular is not None:
        kw["n_angular"] = args.grid_angular
    return ApproxMetricCfg(**kw)


def _r_list(args, beta, fractions=(0.1, 0.05, 0.025)):
    rmax = higgs.r_max(beta)
    if args.R:
        return sorted((float(r) for r in args.R), reverse=True)
    return [f * rmax for f in fractions]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    tol = _tolerances(args)
    rep, beta = _load(args)
    mu, scalars = hyperpolygon.mu_complex(rep)
    resid = float(np.linalg.norm(mu) + np.linalg.norm(scalars))
    if resid > tol.eq * 100 + 1e-10:
        print(f"FAIL mu_complex_zero residual={_fmt(resid)}")
        print("invariant violated: mu_complex_zero")
        return 2
    checks = [("mu_complex_zero", True, resid)]
    try:
        stable = hyperpolygon.is_stable(rep, beta, tol)
        checks.append(("stable", stable, 0.0))
    except PolyhiggsError as e:
        print(f"FAIL stability: {type(e).__name__}: {e}")
        return 2
    checks.append(("moment_residual", True, hyperpolygon.moment_residual(rep, beta)))
    checks.append(("unitary", hyperpolygon.is_unitary(rep, beta, tol),
                   hyperpolygon.moment_residual(rep, beta)))
    failed = None
    for name, ok, residual in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name} residual={_fmt(residual)}")
        if not ok and failed is None and name != "unitary":
            failed = name
    if failed:
        print(f"invariant violated: {failed}")
        return 2
    return 0


def cmd_unitarize(args) -> int:
    tol = _tolerances(args)
    rep, beta = _load(args)
    out = hyperpolygon.unitarize(rep, beta, tol=tol)
    hyperpolygon.save_json(args.out, out, beta)
    print(f"wrote {args.out}  residual={_fmt(hyperpolygon.moment_residual(out, beta))}")
    return 0


def cmd_map(args) -> int:
    tol = _tolerances(args)
    rep, beta = _load(args)
    R = args.R[0] if args.R else 0.1 * higgs.r_max(beta)
    p = higgs.default_punctures(rep.n)
    h = higgs.to_higgs(rep, p, beta, R, tol)

    def c2(z):
        return [float(np.real(z)), float(np.imag(z))]

    obj = {
        "n": h.n,
        "R": float(R),
        "punctures": [c2(z) for z in h.p],
        "alpha": [float(a) for a in h.alpha.alpha],
        "phi": [[[c2(h.phi[i, r, c]) for c in range(2)] for r in range(2)]
                for i in range(h.n)],
        "flags": [[c2(h.F[i, 0]), c2(h.F[i, 1])] for i in range(h.n)],
    }
    _write_json(args.out, obj)
    print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    rep, beta = _load(args)
    Rs = _r_list(args, beta)
    v = None
    if args.kind == "metric":
        rng = np.random.default_rng(args.seed)
        v = random_unitary_lift(rep, rng, beta)
    result = r_sweep(args.kind, rep, higgs.default_punctures(rep.n), beta, Rs,
                     v=v, cfg=_cfg(args))
    rows = [
        (r["R"], r["value"], r["target"], r["abs_err"], result["slope_fit"],
         result["extrapolant"])
        for r in result["rows"]
    ]
    _write_csv(args.out, ["R", "value", "target", "abs_err", "slope_fit",
                          "extrapolant"], rows)

    png = args.out.rsplit(".", 1)[0] + ".png"

    def draw(ax):
        Rv = [r["R"] for r in result["rows"]]
        err = [max(r["abs_err"], 1e-300) for r in result["rows"]]
        ax.loglog(Rv, err, "o-", label="abs error")
        ax.set_xlabel("R")
        ax.set_ylabel("|value - target|")
        ax.set_title(f"{args.kind} sweep  slope={result['slope_fit']:.2f}")
        ax.legend()

    _save_figure(png, draw)
    extra = ""
    if args.kind == "metric":
        extra = f"  target={_fmt(2 * np.pi * hp_norm_sq(v))}"
    print(f"wrote {args.out} and {png}  extrapolant="
          f"{_fmt(result['extrapolant'])}{extra}")
    return 0


def cmd_torelli(args) -> int:
    rep, beta = _load(args)
    R = args.R[0] if args.R else 0.1 * higgs.r_max(beta)
    table = higgs.torelli_table(beta, R)
    rows = [
        ("{" + ",".join(map(str, sorted(row["I"]))) + "}", row["tau_hp_j1"],
         row["tau_hitchin_j1"], row["ratio"], row["tau_j2"], row["tau_j3"])
        for row in table
    ]
    _write_csv(args.out, ["I", "tau_hp_j1", "tau_hitchin_j1", "ratio", "tau_j2",
                          "tau_j3"], rows)

    png = args.out.rsplit(".", 1)[0] + ".png"

    def draw(ax):
        labels = [r[0] for r in rows]
        ratios = [row["ratio"] for row in table]
        ax.bar(range(len(rows)), ratios)
        ax.axhline(2 * np.pi, color="k", linestyle="--", label="2π")
        ax.set_xticks(range(len(rows)), labels, rotation=45, fontsize=8)
        ax.set_ylabel("critical-value ratio")
        ax.legend()

    _save_figure(png, draw)
    print(f"wrote {args.out} and {png}")
    return 0


def cmd_gh(args) -> int:
    Rs = sorted((float(r) for r in args.R), reverse=True) if args.R else \
        [1.0, 0.1, 0.01, 0.0]
    g0 = np.array([[0.0, 0.0, 0.0]])
    radii = np.geomspace(0.05, 50.0, 60)
    rows = []
    for R in Rs:
        data = gh.GHData(R=R, centers=g0)
        for s in radii:
            V, Vinv = gh.metric_coeffs(data, np.array([s, 0.0, 0.0]))
            rows.append((R, s, V, Vinv))
    _write_csv(args.out, ["R", "abs_x", "V", "V_inv"], rows)

    png = args.out.rsplit(".", 1)[0] + ".png"

    def draw(ax):
        for R in Rs:
            vinv = [r[3] for r in rows if r[0] == R]
            ax.loglog(radii, vinv, label=f"R={R:g}")
        ax.set_xlabel("|x|")
        ax.set_ylabel("fiber coefficient 1/V")
        ax.set_title("bounded (ALF) vs unbounded (ALE) fibers")
        ax.legend()

    _save_figure(png, draw)
    print(f"wrote {args.out} and {png}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="polyhiggs",
        description="Hyperpolygon spaces, parabolic Higgs bundles, and "
        "hyperkähler metric degeneration checks.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True, needs_out=True):
        if needs_input:
            sp.add_argument("input", help="input JSON file")
        sp.add_argument("--delta", type=float, default=None,
                        help="gluing radius")
        sp.add_argument("--eps", type=float, default=None,
                        help="weight exponent in (0, 1/2)")
        sp.add_argument("--grid-radial", type=int, default=None)
        sp.add_argument("--grid-angular", type=int, default=None)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--R", type=float, action="append", default=None,
                        help="scale parameter; repeatable")
        sp.add_argument("--seed", type=int, default=0)
        if needs_out:
            sp.add_argument("--out", required=True, help="output file")

    sp = sub.add_parser("validate", help="check type invariants; exit 2 on failure")
    common(sp, needs_out=False)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("unitarize", help="flow to the zero set of the real moment map")
    common(sp)
    sp.set_defaults(func=cmd_unitarize)

    sp = sub.add_parser("map", help="map a stable hyperpolygon to Higgs data")
    common(sp)
    sp.set_defaults(func=cmd_map)

    sp = sub.add_parser("sweep", help="report a quantity over decreasing R")
    sp.add_argument("kind", choices=["morse", "metric", "residual", "gluegap"])
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("torelli", help="critical-value table over fixed loci")
    common(sp)
    sp.set_defaults(func=cmd_torelli)

    sp = sub.add_parser("gh-demo", help="multi-center potential profiles")
    common(sp, needs_input=False)
    sp.set_defaults(func=cmd_gh)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PolyhiggsError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
