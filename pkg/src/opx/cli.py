"""Command-line front end.

Subcommands: equilibrium, poly, oracle, compare, kernel, gap,
dbar-certify, dbar-knorm, statphase.  Every run writes a JSON report
(and CSV tables where applicable) under --output-dir.  Outputs are
byte-deterministic: floats are serialized with repr round-tripping in
JSON and 17 significant digits in CSV, and nothing depends on wall
clock or unordered iteration.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import equilibrium as eqmod
from . import oracle as orc
from . import statphase as sph
from . import universality as uni
from .asymptotics import AsymptoticContext
from .dbar import PhiExtension, ThetaExtension, certify_phi, certify_theta, knorm_estimate
from .errors import NumericalError, ValidationError
from .fields import builtin


def _fmt(x):
    return f"{x:.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def write_json(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2)
        fh.write("\n")


def write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v)
                              for v in row) + "\n")


def _parse_grid(spec, default):
    if spec is None:
        return default
    lo, hi, cnt = spec.split(":")
    return np.linspace(float(lo), float(hi), int(cnt))


def _parse_int_list(spec):
    return [int(tok) for tok in spec.split(",") if tok]


def _apply_config(args):
    if getattr(args, "config", None):
        overrides = {}
        for line in Path(args.config).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, val = line.split("=", 1)
            overrides[key.strip().replace("-", "_")] = val.strip()
        for key, val in overrides.items():
            if hasattr(args, key) and getattr(args, key) is None:
                setattr(args, key, val)
    return args


# -- subcommand handlers ------------------------------------------------------

def cmd_equilibrium(args):
    field = builtin(args.field)
    eq = eqmod.solve(field, float(args.c), quad_order=int(args.quad_order or 256))
    report = {
        "field": field.id,
        "c": eq.c,
        "alpha": eq.alpha,
        "beta": eq.beta,
        "ell": eq.ell,
        "condition_report": eq.verify_conditions().as_dict(),
    }
    out = Path(args.output_dir)
    write_json(out / "equilibrium.json", report)
    span = eq.beta - eq.alpha
    xs = _parse_grid(args.grid, np.linspace(eq.alpha - span / 2, eq.beta + span / 2, 201))
    rows = []
    for x in xs:
        inside = eq.alpha <= x <= eq.beta
        psi = eq.psi(x) if inside else 0.0
        th = eq.theta(x) if inside else (2 * math.pi if x < eq.alpha else 0.0)
        ph = 0.0 if eq.alpha < x < eq.beta else eq.phi(x)
        rows.append((float(x), float(psi), float(th), float(ph)))
    write_csv(out / "equilibrium.csv", ["x", "psi", "theta", "phi"], rows)
    print(json.dumps(_jsonable({k: report[k] for k in ("alpha", "beta", "ell")})))
    return 0


def _context(args):
    field = builtin(args.field)
    c = float(args.c)
    n = int(args.n)
    eq = eqmod.solve(field, c, quad_order=int(args.quad_order or 256))
    return eq, AsymptoticContext(eq, n, N=int(args.bigN) if args.bigN else None)


def cmd_poly(args):
    eq, ctx = _context(args)
    out = Path(args.output_dir)
    rows = []
    if args.where == "bulk":
        xs = _parse_grid(args.grid, np.linspace(eq.alpha + ctx.delta, eq.beta - ctx.delta, 101))
        for x in xs:
            pe = ctx.bulk_axis(float(x))
            rows.append((float(x), pe.a11.real, pe.a11.imag,
                         pe.a21.real, pe.a21.imag, pe.log_scale))
        header = ["x", "re_a11", "im_a11", "re_a21", "im_a21", "log_scale"]
    else:
        zs = _parse_grid(args.grid, np.linspace(-2.0, 1.0, 61))
        for zeta in zs:
            pe = ctx.edge(float(zeta))
            rows.append((float(zeta), pe.a11.real, pe.a11.imag,
                         pe.a21.real, pe.a21.imag, pe.log_scale))
        header = ["zeta", "re_a11", "im_a11", "re_a21", "im_a21", "log_scale"]
    write_csv(out / f"poly_{args.where}.csv", header, rows)
    kn, kn1 = ctx.kappa_log()
    write_json(out / "poly.json", {
        "field": eq.field.id, "c": eq.c, "n": ctx.n, "N": ctx.N,
        "lambda_edge": ctx.lambda_edge, "w_beta": ctx.w_beta,
        "log_kappa_nn_sq": kn, "log_kappa_n1n1_sq": kn1,
    })
    print(f"wrote poly_{args.where}.csv ({len(rows)} rows)")
    return 0


def cmd_oracle(args):
    field = builtin(args.field)
    N = int(args.bigN)
    nmax = int(args.nmax)
    grid = orc.build_grid(field, N, nmax,
                          nodes_per_unit=int(args.nodes_per_unit) if args.nodes_per_unit else None)
    table = orc.stieltjes(grid, nmax)
    out = Path(args.output_dir)
    write_json(out / "oracle.json", {
        "field": field.id, "N": N, "n_max": nmax,
        "truncation_radius": grid.truncation_radius,
        "node_count": grid.node_count,
        "m0": table.m0,
        "a": table.a,
        "b": table.b[1:],
    })
    print(f"wrote oracle.json (n_max={nmax}, nodes={grid.node_count})")
    return 0


def cmd_compare(args):
    eq, ctx = _context(args)
    n = ctx.n
    grid = orc.build_grid(eq.field, ctx.N, n + 2)
    table = orc.stieltjes(grid, n + 2)
    out = Path(args.output_dir)
    rows = []
    if args.where == "bulk":
        xs = _parse_grid(args.grid, np.linspace(eq.alpha + ctx.delta, eq.beta - ctx.delta, 41))
        for x in xs:
            pe = ctx.bulk_axis(float(x))
            p, _, lk2 = orc.eval_poly(table, n, float(x))
            a11_orc = p.real / math.exp(0.5 * lk2 + pe.log_scale)
            err = abs(a11_orc - pe.a11.real) / max(abs(a11_orc), 1e-300)
            rows.append((float(x), pe.a11.real, a11_orc, err))
        header = ["x", "a11_asym", "a11_oracle", "rel_err"]
    else:
        zs = _parse_grid(args.grid, np.linspace(-2.0, 1.0, 31))
        for zeta in zs:
            pe = ctx.edge(float(zeta))
            z = ctx.edge_z(float(zeta)).real
            p, _, lk2 = orc.eval_poly(table, n, z)
            a11_orc = p.real / math.exp(0.5 * lk2 + pe.log_scale)
            err = abs(a11_orc - pe.a11.real) / max(abs(a11_orc), 1e-300)
            rows.append((float(zeta), pe.a11.real, a11_orc, err))
        header = ["zeta", "a11_asym", "a11_oracle", "rel_err"]
    write_csv(out / f"compare_{args.where}.csv", header, rows)
    print(f"wrote compare_{args.where}.csv ({len(rows)} rows)")
    return 0


def cmd_kernel(args):
    field = builtin(args.field)
    c = float(args.c)
    N = int(args.bigN)
    eq = eqmod.solve(field, c)
    grid = orc.build_grid(field, N, N + 2)
    table = orc.stieltjes(grid, N + 2)
    us = _parse_grid(args.grid, np.linspace(-2.0, 2.0, 17))
    out = Path(args.output_dir)
    rows = []
    if args.mode == "bulk":
        a = float(args.a) if args.a is not None else (eq.alpha + eq.beta) / 2
        K = uni.bulk_rescaled(table, field, N, eq, a, us[:, None], us[None, :])
        ref = uni.sine_kernel(us[:, None], us[None, :])
    else:
        lam = 0.75 * (-eq.h_beta_prime_at_beta())
        K = uni.edge_rescaled(table, field, N, lam, eq.beta, us[:, None], us[None, :])
        ref = uni.airy_kernel(us[:, None], us[None, :])
    for i, u in enumerate(us):
        for j, v in enumerate(us):
            rows.append((float(u), float(v), float(K[i, j]), float(ref[i, j])))
    write_csv(out / f"kernel_{args.mode}.csv", ["u", "v", "finite_n", "limit"], rows)
    write_json(out / f"kernel_{args.mode}.json", {
        "field": field.id, "N": N, "mode": args.mode,
        "sup_deviation": float(np.abs(K - ref).max()),
    })
    print(f"kernel {args.mode}: sup dev {np.abs(K - ref).max():.6f}")
    return 0


def cmd_gap(args):
    field = builtin(args.field)
    rep = uni.gap_convergence(field, float(args.c), _parse_int_list(args.N), float(args.s))
    write_json(Path(args.output_dir) / "gap.json", rep)
    print(json.dumps(_jsonable({"bulk_dev_decreasing": rep["bulk_dev_decreasing"],
                                "edge_dev_decreasing": rep["edge_dev_decreasing"]})))
    return 0


def cmd_dbar_certify(args):
    field = builtin(args.field)
    eq = eqmod.solve(field, float(args.c))
    if args.grid:
        gn, gm = (int(t) for t in args.grid.split("x"))
    else:
        gn, gm = 200, 50
    rep = {
        "field": field.id,
        "c": eq.c,
        "theta": certify_theta(ThetaExtension(eq), gn, gm),
        "phi": certify_phi(PhiExtension(eq), gn, gm),
    }
    write_json(Path(args.output_dir) / "dbar_certify.json", rep)
    print(json.dumps(_jsonable({"theta_K_fit": rep["theta"]["K_fit"],
                                "theta_k_fit": min(rep["theta"]["k_fit_upper"],
                                                   rep["theta"]["k_fit_lower"])})))
    return 0


def cmd_dbar_knorm(args):
    field = builtin(args.field)
    eq = eqmod.solve(field, float(args.c))
    if args.grid:
        gn, gm = (int(t) for t in args.grid.split("x"))
    else:
        gn, gm = 200, 60
    rep = knorm_estimate(eq, _parse_int_list(args.n), grid=(gn, gm),
                         threads=int(args.threads) if args.threads else None)
    rep["field"] = field.id
    write_json(Path(args.output_dir) / "dbar_knorm.json", rep)
    print(json.dumps(_jsonable({"estimates": rep["estimates"],
                                "first_last_ratio": rep["first_last_ratio"]})))
    return 0


def cmd_statphase(args):
    phase = sph.builtin_phase(args.phase)
    rep = sph.decomposition_check(phase, _parse_int_list(args.n))
    out = Path(args.output_dir)
    rows = []
    for r in rep["rows"]:
        rows.append((r["n"], r["i_direct"].real, r["i_direct"].imag,
                     abs(r["right_edge"]), abs(r["left_edge"]),
                     abs(r["triangle_plus"]), abs(r["triangle_minus"]),
                     r["identity_residual"], r["leading_gap_times_n"]))
    write_csv(out / "statphase.csv",
              ["n", "re_i", "im_i", "right_edge", "left_edge",
               "triangle_plus", "triangle_minus", "identity_residual",
               "leading_gap_times_n"], rows)
    write_json(out / "statphase.json",
               {"phase": args.phase, "slopes": rep["slopes"],
                "max_identity_residual": rep["max_identity_residual"]})
    print(json.dumps(_jsonable(rep["slopes"])))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="opx", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, field=True, c=True):
        if field:
            sp.add_argument("--field", required=True, help="gue | quartic(g) | c2lip(a,c0)")
        if c:
            sp.add_argument("--c", default="1.0", help="ratio N/n")
        sp.add_argument("--output-dir", default="opx-out")
        sp.add_argument("--config", default=None, help="flat key=value file; flags win")
        sp.add_argument("--quad-order", default=None)
        sp.add_argument("--threads", default=None)
        sp.add_argument("--seed", default="0")

    sp = sub.add_parser("equilibrium", help="solve the equilibrium measure")
    common(sp)
    sp.add_argument("--grid", default=None, help="lo:hi:count for the CSV table")
    sp.set_defaults(func=cmd_equilibrium)

    sp = sub.add_parser("poly", help="closed-form polynomial asymptotics")
    common(sp)
    sp.add_argument("--n", required=True)
    sp.add_argument("--bigN", default=None)
    sp.add_argument("--where", choices=["bulk", "edge"], default="bulk")
    sp.add_argument("--grid", default=None)
    sp.set_defaults(func=cmd_poly)

    sp = sub.add_parser("oracle", help="recurrence table by discretized Stieltjes")
    common(sp, c=False)
    sp.add_argument("--bigN", required=True)
    sp.add_argument("--nmax", required=True)
    sp.add_argument("--nodes-per-unit", default=None)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("compare", help="oracle vs asymptotics error report")
    common(sp)
    sp.add_argument("--n", required=True)
    sp.add_argument("--bigN", default=None)
    sp.add_argument("--where", choices=["bulk", "edge"], default="bulk")
    sp.add_argument("--grid", default=None)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("kernel", help="rescaled kernel vs universal limit")
    common(sp)
    sp.add_argument("--mode", choices=["bulk", "edge"], required=True)
    sp.add_argument("--bigN", required=True)
    sp.add_argument("--a", default=None, help="bulk expansion point")
    sp.add_argument("--grid", default=None)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("gap", help="gap probabilities vs sine/airy limits")
    common(sp)
    sp.add_argument("--s", required=True)
    sp.add_argument("--N", required=True, help="comma list, e.g. 20,40,60")
    sp.set_defaults(func=cmd_gap)

    sp = sub.add_parser("dbar-certify", help="extension certification report")
    common(sp)
    sp.add_argument("--grid", default=None, help="NxM grid, e.g. 200x50")
    sp.set_defaults(func=cmd_dbar_certify)

    sp = sub.add_parser("dbar-knorm", help="defect operator norm decay")
    common(sp)
    sp.add_argument("--n", default="16,64,256")
    sp.add_argument("--grid", default=None)
    sp.set_defaults(func=cmd_dbar_knorm)

    sp = sub.add_parser("statphase", help="stationary-phase decomposition demo")
    common(sp, field=False, c=False)
    sp.add_argument("--phase", choices=["quad", "cubic"], required=True)
    sp.add_argument("--n", default="100,1000,10000")
    sp.set_defaults(func=cmd_statphase)
    return p


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    _apply_config(args)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
