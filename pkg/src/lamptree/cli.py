"""Command-line front end.

Subcommands: `bounds` (closed-form report for one (q,p)), `table` (the full
reference grid as CSV), `simulate` (seeded Monte Carlo estimates), `verify`
(named invariant suites), `oracle` (closed-form length vs BFS distance).

Exit codes: 0 success, 1 verification failure or oracle mismatch, 2 invalid
arguments, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import analytic, geodesic, montecarlo, verify
from .analytic import ModelParams
from .wreath import ModelKind, ModelSpec, element_to_json


def _parse_prob(text: str) -> float:
    """Accept '0.5' or exact fractions like '2/3'."""
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}") from exc
    return value


def _parse_alpha(text: str) -> tuple[float, ...]:
    return tuple(float(Fraction(part)) for part in text.split(","))


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _model_from_args(args) -> ModelSpec:
    kind = ModelKind(args.model)
    if kind is ModelKind.WALK_OR_SWITCH:
        return ModelSpec.walk_or_switch(args.q, args.p)
    if kind is ModelKind.SWITCH_WALK_SWITCH:
        return ModelSpec.switch_walk_switch(args.q, args.p)
    alpha = args.alpha if args.alpha else tuple(args.p / (args.r - 1) for _ in range(args.r - 1))
    return ModelSpec.multi_state(args.q, args.p, args.r, alpha)


def cmd_bounds(args) -> int:
    report = analytic.bounds_report(ModelParams(args.q, args.p))
    if args.format == "json":
        _emit(json.dumps(report.to_json_dict(), indent=2) + "\n", args.out)
    else:
        _emit(analytic.CSV_HEADER + "\n" + report.to_csv_row() + "\n", args.out)
    return 0


def cmd_table(args) -> int:
    lines = [analytic.CSV_HEADER]
    lines += [rep.to_csv_row() for rep in analytic.compute_reference_reports()]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    model = _model_from_args(args)
    threads = montecarlo.resolve_threads(args.threads)
    drift_vals, proj_vals = montecarlo.run_drift_trials(
        model, args.steps, args.trials, args.seed, threads
    )
    drift = montecarlo.EstimateWithCI.from_values(drift_vals)
    proj = montecarlo.EstimateWithCI.from_values(proj_vals)

    def ci(est: montecarlo.EstimateWithCI) -> dict:
        return {"mean": est.mean, "std_error": est.std_error, "n_trials": est.n_trials}

    estimates: dict = {"drift": ci(drift), "projection": ci(proj)}

    if args.exit_stats:
        if model.kind is not ModelKind.SWITCH_WALK_SWITCH:
            raise ValueError("--exit-stats requires --model sws")
        summaries = montecarlo.run_exit_trials(
            model, args.steps, args.trials, args.seed, args.horizon_buffer, threads
        )
        total = sum(s.delta_sum for s in summaries)
        count = sum(s.delta_count for s in summaries)
        per_traj = [s.delta_sum / s.delta_count for s in summaries if s.delta_count]
        spread = montecarlo.EstimateWithCI.from_values(per_traj) if per_traj else None
        estimates["exit_stats"] = {
            "mean_delta": total / count if count else 0.0,
            "mean_delta_se": spread.std_error if spread else 0.0,
            "n_increments": count,
            "min_inequality_slack": min((s.min_slack for s in summaries), default=0),
        }

    if args.boundary_stats:
        bs = montecarlo.estimate_boundary_stats(
            model, args.steps, args.trials, args.seed, args.ball_radius, threads
        )
        estimates["boundary"] = {
            "first_letter_freq": {str(k): v for k, v in sorted(bs.first_letter_freq.items())},
            "lamp_off_freq": bs.lamp_off_freq,
            "lamp_off_se": bs.lamp_off_se,
            "nu1_est": bs.nu1_est,
            "nu1_se": bs.nu1_se,
            "nu2_est": bs.nu2_est,
            "nu2_se": bs.nu2_se,
            "coverage": bs.coverage,
            "horizon_ok": bs.horizon_ok,
        }

    result = {
        "model": model.kind.value,
        "q": model.q,
        "p": model.p,
        "r": model.r,
        "alpha": list(model.alpha),
        "n_steps": args.steps,
        "n_trials": args.trials,
        "base_seed": args.seed,
        "ball_radius": args.ball_radius,
        "horizon_buffer": args.horizon_buffer,
        "estimates": estimates,
    }
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    only = args.only.split(",") if args.only else None
    results = verify.run_checks(only)
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_oracle(args) -> int:
    model = _model_from_args(args)
    n_checked, bad = geodesic.oracle_mismatches(model, args.radius, args.state_cap)
    lines = [
        json.dumps({"element": element_to_json(z), "closed_form": c, "bfs": d})
        for z, c, d in bad
    ]
    summary = f"{len(bad)} mismatches ({n_checked} elements within radius {args.radius})\n"
    _emit("\n".join(lines) + ("\n" if lines else "") + summary, args.out)
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lamptree",
        description="Lamplighter random walks on the homogeneous tree T_q: "
        "closed-form drift bounds, Monte Carlo estimates, and a Cayley-graph oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_out(p):
        p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("bounds", help="closed-form bound report for one (q, p)")
    p.add_argument("--q", type=int, required=True, help="tree degree, >= 3")
    p.add_argument("--p", type=_parse_prob, required=True, help="switch probability in (0,1); fractions allowed")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    add_common_out(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("table", help="reference bound table as CSV (16 rows)")
    add_common_out(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("simulate", help="seeded Monte Carlo drift estimates")
    p.add_argument("--model", choices=[k.value for k in ModelKind], default="wos")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p", type=_parse_prob, required=True)
    p.add_argument("--r", type=int, default=2, help="lamp states (multi model)")
    p.add_argument("--alpha", type=_parse_alpha, default=None,
                   help="comma-separated switch weights summing to p (multi model)")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: LAMPTREE_THREADS or all cores); output is identical for any value")
    p.add_argument("--exit-stats", action="store_true", help="exit-time and pseudo-increment analysis (sws only)")
    p.add_argument("--boundary-stats", action="store_true", help="first-letter and cone-event estimators (wos only)")
    p.add_argument("--ball-radius", type=int, default=12)
    p.add_argument("--horizon-buffer", type=int, default=None)
    add_common_out(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run invariant check suites")
    p.add_argument("--only", help=f"comma-separated suite names among: {','.join(verify.SUITES)}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="certify closed-form lengths against BFS")
    p.add_argument("--model", choices=[k.value for k in ModelKind], default="wos")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p", type=_parse_prob, default=0.5, help="only the support matters; default 0.5")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--alpha", type=_parse_alpha, default=None)
    p.add_argument("--radius", type=int, default=4, help="BFS radius, at most 6")
    p.add_argument("--state-cap", type=int, default=50_000_000)
    add_common_out(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except geodesic.ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, analytic.DivergentSeriesError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
