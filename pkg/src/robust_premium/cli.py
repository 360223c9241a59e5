"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 parameter-domain error, 4 simulation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .errors import (
    DivergentPremium,
    EstimationError,
    HeavinessConditionViolated,
    ParameterDomainViolated,
    RhoInvalid,
)
from .models import Lomax, ParetoMixture, StrictPareto
from .montecarlo import SimulationStudy, run_study
from .premium import (
    confidence_interval,
    empirical_premium,
    normal_quantile,
    premium_ph_hill,
    premium_ph_thill,
    sigma_squared,
    ProportionalHazards,
)
from .reporting import InputError, read_losses, report_to_csv, report_to_json
from .tail_estimation import sort_sample, t_hill_asymptotic_variance
from .threshold import DEFAULT_THETA, reiss_thomas_select

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_SIMULATION = 0, 2, 3, 4

PRESETS = {
    "table1": dict(model="lomax", gamma=0.6, rho=1.12, sizes=(100, 200, 500, 1000),
                   reps=1000, theta=0.3, eps=None),
    "table2": dict(model="mixture", gamma1=0.6, gamma2=2.0, rho=1.12, sizes=(100, 200, 1000),
                   reps=1000, theta=0.3, eps=(0.05, 0.10, 0.15, 0.25)),
}

log = logging.getLogger("robust_premium")


def _method(value: str) -> str:
    aliases = {"thill": "t_hill", "t_hill": "t_hill", "t-hill": "t_hill", "hill": "hill"}
    try:
        return aliases[value.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"invalid method {value!r} (choose hill or thill)")


def _k_arg(value: str):
    if value == "auto":
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--k must be 'auto' or an integer, got {value!r}")


def _float_list(value: str) -> tuple[float, ...]:
    return tuple(float(v) for v in value.split(","))


def _int_list(value: str) -> tuple[int, ...]:
    return tuple(int(v) for v in value.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robust-premium",
        description="Robust distortion risk premiums for heavy-tailed losses.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate the PH premium of a loss file")
    est.add_argument("input", type=Path, help="one loss per line, optional header")
    est.add_argument("--method", type=_method, default="t_hill", help="hill | thill")
    est.add_argument("--k", type=_k_arg, default="auto", help="auto | INT")
    est.add_argument("--theta", type=float, default=DEFAULT_THETA)
    est.add_argument("--rho", type=float, required=True)
    est.add_argument("--alpha", type=float, default=0.05)
    est.add_argument("--format", choices=("csv", "json"), default="csv")
    est.add_argument("--out", type=Path)

    sim = sub.add_parser("simulate", help="run a bias / RMSE simulation study")
    sim.add_argument("--preset", choices=sorted(PRESETS))
    sim.add_argument("--model", choices=("lomax", "pareto", "mixture"))
    sim.add_argument("--support", choices=("lomax", "pareto"), default="lomax",
                     help="support of the mixture components")
    sim.add_argument("--gamma", type=float)
    sim.add_argument("--gamma1", type=float)
    sim.add_argument("--gamma2", type=float)
    sim.add_argument("--eps", type=_float_list, help="contamination level(s), comma separated")
    sim.add_argument("--sizes", type=_int_list, help="sample sizes, comma separated")
    sim.add_argument("--rho", type=float)
    sim.add_argument("--theta", type=float)
    sim.add_argument("--reps", type=int)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--out", type=Path)

    var = sub.add_parser("variance", help="print asymptotic variances")
    var.add_argument("--gamma", type=float, required=True)
    var.add_argument("--rho", type=float)
    var.add_argument("--n", type=int)
    var.add_argument("--k", type=int)
    var.add_argument("--alpha", type=float, default=0.05)
    var.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _row_output(row: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(row, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(row.keys())
    writer.writerow(["" if v is None else (("%.17g" % v) if isinstance(v, float) else v)
                     for v in row.values()])
    return buf.getvalue()


def cmd_estimate(args) -> int:
    try:
        losses = read_losses(args.input.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sample = sort_sample(losses)
    try:
        ProportionalHazards(args.rho)
        if args.k == "auto":
            k = reiss_thomas_select(sample, args.method, args.theta).k_star
        else:
            k = args.k
        estimator = premium_ph_thill if args.method == "t_hill" else premium_ph_hill
        estimate = estimator(sample, k, args.rho)
    except HeavinessConditionViolated as exc:
        print(f"error: heaviness condition violated: gamma_hat={exc.gamma_hat:.6g}, "
              f"rho={exc.rho:.6g}, product={exc.product:.6g} >= 1", file=sys.stderr)
        return EXIT_DOMAIN
    except RhoInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if estimate.estimator == "thill_extrapolated":
        try:
            estimate = confidence_interval(estimate, sample, args.alpha)
        except ParameterDomainViolated as exc:
            log.warning("no confidence interval: %s", exc)
    row = {
        "method": args.method,
        "n": sample.n,
        "k": estimate.k,
        "gamma_hat": estimate.gamma_hat,
        "rho": args.rho,
        "premium": estimate.value,
        "std_error": estimate.std_error,
        "ci_lower": estimate.ci[0] if estimate.ci else None,
        "ci_upper": estimate.ci[1] if estimate.ci else None,
        "alpha": args.alpha if estimate.ci else None,
        "empirical_premium": empirical_premium(sample, ProportionalHazards(args.rho)).value,
    }
    _emit(_row_output(row, args.format), args.out)
    return EXIT_OK


def study_from_args(args) -> SimulationStudy:
    cfg = dict(PRESETS[args.preset]) if args.preset else dict(
        model="lomax", gamma=0.6, rho=1.12, sizes=(100, 200, 500, 1000), reps=1000,
        theta=DEFAULT_THETA, eps=None)
    for name in ("model", "gamma", "gamma1", "gamma2", "rho", "theta", "reps", "sizes", "eps"):
        value = getattr(args, name)
        if value is not None:
            cfg[name] = value
    family = cfg["model"]
    if family == "mixture":
        eps = cfg.get("eps") or (0.0,)
        model = ParetoMixture(cfg.get("gamma1", cfg.get("gamma", 0.6)), cfg.get("gamma2", 2.0),
                              eps[0], args.support)
        eps_grid = tuple(eps)
    else:
        if cfg.get("eps"):
            raise ValueError("--eps needs --model mixture")
        gamma = cfg.get("gamma", 0.6)
        model = Lomax(gamma) if family == "lomax" else StrictPareto(gamma)
        eps_grid = None
    return SimulationStudy(model, tuple(cfg["sizes"]), cfg["reps"], cfg["rho"], cfg["theta"],
                           args.seed, eps_grid)


def cmd_simulate(args) -> int:
    try:
        study = study_from_args(args)
        study.truth()
    except DivergentPremium as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = run_study(study, workers=args.workers)
    if args.format == "json":
        meta = {"model": repr(study.model), "sizes": list(study.sizes),
                "replications": study.replications, "rho": study.rho, "theta": study.theta,
                "seed": study.seed, "eps_grid": list(study.eps_values)}
        text = report_to_json(report, meta)
    else:
        text = report_to_csv(report)
    _emit(text, args.out)
    failed = report.failed_cells()
    if failed:
        for c in failed:
            print(f"error: all replications failed for n={c.n}, eps={c.eps}, {c.estimator}",
                  file=sys.stderr)
        return EXIT_SIMULATION
    return EXIT_OK


def cmd_variance(args) -> int:
    try:
        row = {"gamma": args.gamma, "t_hill_variance": t_hill_asymptotic_variance(args.gamma)}
        if args.rho is not None:
            sigma2 = sigma_squared(args.gamma, args.rho)
            row.update(rho=args.rho, sigma_squared=sigma2)
            if args.n is not None and args.k is not None:
                if not (1 <= args.k < args.n):
                    raise ValueError(f"need 1 <= k < n, got k={args.k}, n={args.n}")
                # multiply by X_(n-k:n) to get the CI half-width
                factor = (normal_quantile(1 - args.alpha / 2) * math.sqrt(sigma2)
                          * (args.k / args.n) ** (1 / args.rho - 0.5) / math.sqrt(args.n))
                row.update(n=args.n, k=args.k, alpha=args.alpha, half_width_factor=factor)
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(_row_output(row, args.format))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    handler = {"estimate": cmd_estimate, "simulate": cmd_simulate, "variance": cmd_variance}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
