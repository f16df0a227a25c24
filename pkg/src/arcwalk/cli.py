"""Command line interface.

Exit codes: 0 pass, 1 verification failure, 2 usage error.  Sample streams
are CSV, verdicts are JSON objects with "command", "params" and "result".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

import numpy as np

from . import absorption, brownian, density, gof, kernels, lq

log = logging.getLogger("arcwalk")

MC_SAMPLES = 200_000
MC_BURN_IN = 1_000
MC_THIN = 5
KS_THRESHOLD = 0.02
QUAD_TOL = 1e-6


class UsageError(Exception):
    pass


def _emit_json(command, params, result, out=None):
    text = json.dumps({"command": command, "params": params, "result": result},
                      indent=2)
    _write(text + "\n", out)


def _write(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_column(name, values) -> str:
    buf = io.StringIO()
    buf.write(name + "\n")
    for v in values:
        buf.write(repr(float(v)) + "\n")
    return buf.getvalue()


def _params(args) -> dict:
    skip = {"func", "command", "verbose"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _seed(value: str) -> int:
    v = int(value, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _count(value: str) -> int:
    v = int(value)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(value: str) -> int:
    v = int(value)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


# -- simulate ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    try:
        params = kernels.WalkParams(args.variant, args.p)
    except ValueError as exc:
        raise UsageError(str(exc))
    lo_ok = 0.0 <= args.x0 <= 1.0 if params.variant is kernels.Variant.PABSORBING \
        else 0.0 < args.x0 < 1.0
    if not lo_ok:
        raise UsageError(f"--x0 {args.x0} is outside the state space")
    trace = kernels.simulate(params, args.x0, args.steps, args.burn_in, args.thin,
                             args.seed)
    _write(_csv_column("x", trace.states), args.out)
    if args.figure:
        from . import plotting
        pdf = None
        if params.variant is not kernels.Variant.PABSORBING and params.exponent >= 0:
            pdf = density.density_model(params.exponent).pdf
        plotting.samples_vs_density(trace.states, pdf, args.figure,
                                    title=f"{params.variant.value} walk, p = {params.exponent:g}",
                                    label="stationary density")
    return 0


# -- verify-stationary --------------------------------------------------------

def _read_samples(path) -> np.ndarray:
    fh = sys.stdin if path == "-" else open(path, newline="")
    try:
        rows = list(csv.reader(fh))
    finally:
        if fh is not sys.stdin:
            fh.close()
    if not rows:
        raise UsageError("no samples in input")
    body = rows[1:] if rows[0] and rows[0][0].strip().lower() == "x" else rows
    try:
        return np.array([float(r[0]) for r in body if r])
    except ValueError as exc:
        raise UsageError(f"bad sample value: {exc}")


def cmd_verify_stationary(args) -> int:
    if args.p < 0:
        raise UsageError("--p must be >= 0; no stationary density exists for p < 0")
    model = density.density_model(args.p)
    params = _params(args)
    if args.mode == "quadrature":
        tol = QUAD_TOL if args.tol is None else args.tol
        grid = [(k + 1) / (args.grid + 1) for k in range(args.grid)]
        res = density.residual_profile(args.p, grid)
        worst = max(res)
        result = {"z_p": model.z_p, "max_residual": worst, "tol": tol,
                  "pass": worst <= tol,
                  "residuals": [[a, r] for a, r in zip(grid, res)]}
        if args.figure:
            from . import plotting
            plotting.residual_profile(grid, res, tol, args.figure,
                                      title=f"stationarity residual, p = {args.p:g}")
    else:
        tol = KS_THRESHOLD if args.tol is None else args.tol
        if args.input is not None:
            samples = _read_samples(args.input)
        else:
            if args.seed is None:
                raise UsageError("--seed is required for montecarlo mode")
            walk = kernels.WalkParams(kernels.Variant.PFAMILY, args.p)
            samples = kernels.simulate(walk, 0.5, args.samples, args.burn_in,
                                       args.thin, args.seed).states
        report = gof.ks_report(samples, model.cdf, tol)
        result = {"z_p": model.z_p, **report.to_dict()}
        if args.figure:
            from . import plotting
            plotting.samples_vs_density(samples, model.pdf, args.figure,
                                        title=f"p = {args.p:g}, KS = {report.statistic:.4f}",
                                        label="stationary density")
    _emit_json("verify-stationary", params, result, args.out)
    return 0 if result["pass"] else 1


# -- zp-table ---------------------------------------------------------------

def _parse_p_values(args) -> list[float]:
    if args.p_list is not None:
        try:
            ps = [float(v) for v in args.p_list.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad --p-list: {exc}")
    else:
        try:
            lo, hi, st = (float(v) for v in args.p_range.split(":"))
        except ValueError:
            raise UsageError("--p-range must look like lo:hi:step")
        if st <= 0 or hi < lo:
            raise UsageError("--p-range needs step > 0 and hi >= lo")
        count = int(math.floor((hi - lo) / st + 1e-9)) + 1
        ps = [round(lo + i * st, 12) for i in range(count)]
    if not ps:
        raise UsageError("no p values given")
    bad = [p for p in ps if not p > 0]
    if bad:
        raise UsageError(f"zp-table takes p > 0 only, got {bad}")
    return ps


def cmd_zp_table(args) -> int:
    ps = _parse_p_values(args)
    zs = [density.z_p(p) for p in ps]
    lines = ["p,z_p"] + [f"{p!r},{z!r}" for p, z in zip(ps, zs)]
    _write("\n".join(lines) + "\n", args.out)
    if args.figure:
        from . import plotting
        plotting.zp_curve(ps, zs, args.figure)
    return 0


# -- brownian -----------------------------------------------------------------

SPLICE_POINTS = (0.25, 0.5, 0.75)


def cmd_brownian(args) -> int:
    try:
        brownian.PathGrid(args.n)
    except ValueError as exc:
        raise UsageError(str(exc))
    params = _params(args)
    what = args.what
    if what == "splice-check":
        vals = brownian.spliced_marginals(args.n, args.samples, args.seed,
                                          SPLICE_POINTS)
        table = []
        for i, s in enumerate(SPLICE_POINTS):
            for j in range(i, len(SPLICE_POINTS)):
                t = SPLICE_POINTS[j]
                cov, se = brownian.covariance_with_se(vals[:, i], vals[:, j])
                expected = min(s, t)
                table.append({"s": s, "t": t, "cov": cov, "se": se,
                              "expected": expected,
                              "z": (cov - expected) / se,
                              "pass": abs(cov - expected) <= 3 * se})
        ok = all(row["pass"] for row in table)
        result = {"n_samples": args.samples, "covariance": table, "pass": ok}
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(",".join(f"w{s}" for s in SPLICE_POINTS) + "\n")
                for row in vals:
                    fh.write(",".join(repr(float(v)) for v in row) + "\n")
        if args.figure:
            from . import plotting
            diag = [r for r in table if r["s"] == r["t"]]
            plotting.variance_profile([r["s"] for r in diag], [r["cov"] for r in diag],
                                      [r["se"] for r in diag], args.figure)
        _emit_json("brownian", params, result)
        return 0 if ok else 1

    if what == "occupation":
        samples = brownian.occupation_samples(args.n, args.samples, args.seed)
        cdf, pdf = density.arcsine_cdf, density.rho_arcsine
    elif what == "bridge-occupation":
        samples = brownian.occupation_samples(args.n, args.samples, args.seed,
                                              brownian.PathKind.BRIDGE)
        cdf, pdf = (lambda x: np.clip(x, 0.0, 1.0)), (lambda x: 1.0)
    else:
        samples = brownian.last_zero_samples(args.n, args.samples, args.seed)
        cdf, pdf = density.arcsine_cdf, density.rho_arcsine
    report = gof.ks_report(samples, cdf, args.threshold)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_csv_column("value", samples))
    if args.figure:
        from . import plotting
        plotting.samples_vs_density(samples, pdf, args.figure,
                                    title=f"{what}, KS = {report.statistic:.4f}")
    _emit_json("brownian", params, report.to_dict())
    return 0 if report.passed else 1


# -- lq-check -------------------------------------------------------------------

MINIMIZER_TOL = 1e-6
DERIV_TOL = 1e-9


def cmd_lq_check(args) -> int:
    if not args.q > 0:
        raise UsageError("--q must be positive")
    p = 1.0 - args.q if args.p is None else args.p
    xs = [(k + 1) / (args.x_grid + 1) for k in range(args.x_grid)]
    queries = [lq.LqQuery(p, args.q, x) for x in xs]
    derivs = [lq.lq_derivative_at_x(qr) for qr in queries]
    sup_deriv = max(abs(d) for d in derivs)
    result = {"p": p, "q": args.q, "sup_abs_derivative": sup_deriv}

    if args.q >= 1.0:
        gaps = [abs(lq.lq_minimizer(qr) - qr.x) for qr in queries]
        result["sup_abs_minimizer_gap"] = max(gaps)
        martingale = max(gaps) <= MINIMIZER_TOL
    else:
        result["sup_abs_minimizer_gap"] = None
        martingale = False

    verdicts = set()
    if sup_deriv <= DERIV_TOL:
        for qr in queries:
            if abs(qr.x - 0.5) < 1e-12:
                continue  # symmetric point: the odd term vanishes there
            try:
                verdicts.add(lq.classify_critical_point(qr).value)
            except lq.UndeterminedError:
                verdicts.add("Undetermined")
        verdict = verdicts.pop() if len(verdicts) == 1 else "Mixed"
    else:
        verdict = "NotCritical"
    result["verdict"] = verdict

    if args.q >= 1.0:
        ok = martingale and verdict == lq.CriticalPoint.MINIMUM.value
        result["prediction"] = "l_q-minimizing martingale"
    else:
        ok = verdict == lq.CriticalPoint.INFLECTION.value
        result["prediction"] = "critical point is an inflection, not a minimum"
    result["pass"] = ok
    if args.figure:
        from . import plotting
        plotting.lq_objective_curve(lq.LqQuery(p, args.q, xs[len(xs) // 4]), args.figure)
    _emit_json("lq-check", _params(args), result, args.out)
    return 0 if ok else 1


# -- absorb -------------------------------------------------------------------

def cmd_absorb(args) -> int:
    if not args.p < 0:
        raise UsageError("--p must be negative for the absorbing walk")
    if not 0.0 < args.x0 < 1.0:
        raise UsageError("--x0 must lie strictly inside (0, 1)")
    summary = absorption.absorption_frequency(args.p, args.x0, args.runs, args.seed,
                                              args.max_steps, args.eps)
    formula = absorption.bernoulli_limit_mean(args.x0, args.p)
    se = summary.std_error
    z = (summary.frac_one - formula) / se if se > 0 else (
        0.0 if summary.frac_one == formula else math.inf)
    ok = abs(z) <= 3.0 and summary.undecided == 0
    result = {"formula": formula, "empirical": summary.frac_one, "se": se,
              "z": z, "at_one": summary.at_one, "at_zero": summary.at_zero,
              "undecided": summary.undecided, "pass": ok}
    _emit_json("absorb", _params(args), result, args.out)
    return 0 if ok else 1


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arcwalk",
                                 description="Simulate and verify interval random walks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="simulate one chain, CSV of states")
    sp.add_argument("--variant", choices=[v.value for v in kernels.Variant], default="x")
    sp.add_argument("--p", type=float, default=0.0)
    sp.add_argument("--x0", type=float, default=0.5)
    sp.add_argument("--steps", type=_positive, required=True,
                    help="number of recorded states")
    sp.add_argument("--burn-in", type=_count, default=0)
    sp.add_argument("--thin", type=_positive, default=1)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--out")
    sp.add_argument("--figure", help="write a histogram figure to this path")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify-stationary", help="check the stationary density")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--mode", choices=["quadrature", "montecarlo"], default="quadrature")
    sp.add_argument("--grid", type=_positive, default=99)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--input", help="CSV of samples (column x) or - for stdin")
    sp.add_argument("--samples", type=_positive, default=MC_SAMPLES)
    sp.add_argument("--burn-in", type=_count, default=MC_BURN_IN)
    sp.add_argument("--thin", type=_positive, default=MC_THIN)
    sp.add_argument("--out")
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_verify_stationary)

    sp = sub.add_parser("zp-table", help="normalizing constants Z_p as CSV")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--p-list")
    g.add_argument("--p-range")
    sp.add_argument("--out")
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_zp_table)

    sp = sub.add_parser("brownian", help="Brownian arcsine-law checks")
    sp.add_argument("--what", required=True,
                    choices=["occupation", "lastzero", "bridge-occupation", "splice-check"])
    sp.add_argument("--n", type=int, default=brownian.DEFAULT_N)
    sp.add_argument("--samples", type=_positive, default=20_000)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--threshold", type=float, default=KS_THRESHOLD)
    sp.add_argument("--out", help="CSV of per-sample values")
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_brownian)

    sp = sub.add_parser("lq-check", help="l_q-minimizing martingale check")
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--p", type=float)
    sp.add_argument("--x-grid", type=_positive, default=19)
    sp.add_argument("--out")
    sp.add_argument("--figure")
    sp.set_defaults(func=cmd_lq_check)

    sp = sub.add_parser("absorb", help="absorption frequencies for p < 0")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--x0", type=float, required=True)
    sp.add_argument("--runs", type=_positive, default=100_000)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--max-steps", type=_positive, default=absorption.DEFAULT_MAX_STEPS)
    sp.add_argument("--eps", type=float, default=absorption.DEFAULT_EPS)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_absorb)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"arcwalk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
