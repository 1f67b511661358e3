"""Command-line interface.

Data goes to stdout as CSV or JSON, diagnostics to stderr.  Exit codes:

    0  success
    1  ``verify`` ran but the oracle disagreed with the analytic posterior
    2  usage error (bad or conflicting flags)
    3  model error (parameters or evidence out of range)
    4  convergence error (adaptive curve hit its size cap)
    5  oracle budget exhausted before enough acceptances
    6  impossible evidence or undefined limit
"""

from __future__ import annotations

import argparse
import csv
import inspect
import json
import math
import sys
from typing import Iterable, Sequence

import numpy as np

from . import coin, crypto, curves, oracle
from .errors import (
    ConvergenceError,
    DegenerateEvidenceError,
    ModelError,
    OracleBudgetError,
    UndefinedLimitError,
)
from .model import Evidence, FailureModel, posterior, posterior_curve
from .presets import SCENARIOS, build_scenario

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_MODEL = 3
EXIT_CONVERGENCE = 4
EXIT_ORACLE_BUDGET = 5
EXIT_DEGENERATE = 6

# below this, crypto probabilities are written as powers of two
LOG2_OUTPUT_THRESHOLD = 1e-300


class UsageError(Exception):
    pass


def _scenario_params() -> dict[str, type]:
    params: dict[str, type] = {}
    for factory in SCENARIOS.values():
        for p in inspect.signature(factory).parameters.values():
            params[p.name] = int if isinstance(p.default, int) else float
    return params


SCENARIO_PARAMS = _scenario_params()


def fmt(x) -> str:
    """Shortest text that parses back to the same float."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no infinities
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")
    return obj


def emit_json(obj, out) -> None:
    json.dump(_jsonable(obj), out, indent=2, sort_keys=False)
    out.write("\n")


def emit_csv(header: Sequence[str], rows: Iterable[Sequence], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def emit_table(args, header, rows, extra: dict | None = None) -> None:
    rows = list(rows)
    if args.output == "json":
        record = dict(extra or {})
        record["rows"] = [dict(zip(header, r)) for r in rows]
        emit_json(record, sys.stdout)
    else:
        emit_csv(header, rows, sys.stdout)
        for key, value in (extra or {}).items():
            print(f"{key}: {json.dumps(_jsonable(value))}", file=sys.stderr)


# -- model selection ---------------------------------------------------------


def _add_model_args(p: argparse.ArgumentParser, default: str | None = None) -> None:
    p.add_argument(
        "--scenario", choices=sorted(SCENARIOS), default=None,
        help=f"preset model (default: {default or 'required unless --model'})",
    )
    p.add_argument(
        "--model", metavar="JSON",
        help="inline model: a JSON object or a path to a JSON file with "
        "hypothesis_labels, state_labels, joint_prior, positive_prob",
    )
    g = p.add_argument_group("scenario parameters")
    for name, kind in sorted(SCENARIO_PARAMS.items()):
        g.add_argument(
            "--" + name.replace("_", "-"), dest=name, type=kind, default=None,
            metavar="X",
        )
    p.set_defaults(default_scenario=default)


def _overrides(args) -> dict:
    return {
        name: getattr(args, name)
        for name in SCENARIO_PARAMS
        if getattr(args, name, None) is not None
    }


def _load_inline(spec: str) -> FailureModel:
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            with open(spec) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read model file {spec!r}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"model is not valid JSON: {exc}") from None
    keys = {"hypothesis_labels", "state_labels", "joint_prior", "positive_prob"}
    if not isinstance(data, dict) or set(data) != keys:
        raise UsageError(f"model JSON must have exactly the keys {sorted(keys)}")
    return FailureModel(**data)


def resolve_model(args) -> FailureModel:
    overrides = _overrides(args)
    if args.model is not None:
        if args.scenario is not None or overrides:
            raise UsageError("--model cannot be combined with --scenario or parameter flags")
        return _load_inline(args.model)
    name = args.scenario or args.default_scenario
    if name is None:
        raise UsageError("one of --scenario or --model is required")
    allowed = inspect.signature(SCENARIOS[name]).parameters
    unknown = sorted(set(overrides) - set(allowed))
    if unknown:
        flags = ", ".join("--" + u.replace("_", "-") for u in unknown)
        raise UsageError(f"scenario {name!r} does not take {flags}")
    return build_scenario(name, **overrides)


def _target(model: FailureModel, args) -> int:
    return model.hypothesis_index(args.target) if args.target is not None else 0


# -- subcommands -------------------------------------------------------------


def cmd_curve(args) -> int:
    model = resolve_model(args)
    target = _target(model, args)
    curve = posterior_curve(model, args.n_max, fraction=args.fraction, target=target)
    emit_table(args, ("n", "posterior"), zip(curve.ns, curve.values))
    return EXIT_OK


def cmd_analyze(args) -> int:
    model = resolve_model(args)
    summary = curves.summarize(model, tau=args.tau, target=_target(model, args))
    record = summary.to_dict()
    if args.output == "json":
        emit_json(record, sys.stdout)
    else:
        header = ("peak_n", "peak_value", "limit", "max_value", "tau", "reaches_tau", "n_max")
        emit_csv(header, [[record[h] for h in header]], sys.stdout)
    return EXIT_OK


def cmd_sanhedrin(args) -> int:
    model = resolve_model(args)
    target = _target(model, args)
    if not 0 <= args.k_min <= args.k_max <= args.n:
        raise UsageError("need 0 <= --k-min <= --k-max <= --n")
    full = curves.conviction_band(model, args.n, 0, args.n, target)
    rows = [(k, v, args.k_min <= k <= args.k_max) for k, v in full.points]
    band = curves.conviction_band(model, args.n, args.k_min, args.k_max, target)
    extra = {
        "n": args.n,
        "band": [args.k_min, args.k_max],
        "band_min_k": band.min_k,
        "band_min_posterior": band.min_value,
    }
    emit_table(args, ("k", "posterior", "in_conviction_band"), rows, extra)
    return EXIT_OK


def _prob_text(p: float, log2p: float):
    return p if p >= LOG2_OUTPUT_THRESHOLD else f"2^{fmt(log2p)}"


def cmd_crypto(args) -> int:
    if args.T is not None and args.months is not None:
        raise UsageError("give exposure as --T or --months, not both")
    if args.ecc != "none" and args.R is None:
        raise UsageError(f"--ecc {args.ecc} needs --R")
    if args.k_min < 0 or args.k_max < args.k_min:
        raise UsageError("need 0 <= --k-min <= --k-max")
    T = args.T if args.T is not None else (args.months if args.months is not None else 1.0) * crypto.SECONDS_PER_MONTH
    scenario = crypto.FaultScenario(args.lam, T, args.R, args.ecc)
    p_f = crypto.bit_flip_probability(scenario)
    target = 2.0**args.target_log2
    rows = []
    for k in range(args.k_min, args.k_max + 1):
        log2p = crypto.log2_false_acceptance_rate(k, p_f)
        p_fa = crypto.false_acceptance_rate(k, p_f)
        rows.append((k, _prob_text(p_fa, log2p), log2p, log2p - args.target_log2))
    ratio, log2_gap = crypto.security_gap(p_f, target)
    extra = {
        "lambda": args.lam,
        "T": T,
        "R": args.R,
        "ecc": args.ecc,
        "effective_rate": scenario.effective_rate,
        "p_f": p_f,
        "log2_p_f": math.log2(p_f) if p_f > 0 else -math.inf,
        "target_log2": args.target_log2,
        "floor_gap_ratio": ratio,
        "floor_gap_log2": log2_gap,
    }
    emit_table(args, ("k", "p_fa", "log2_p_fa", "log2_gap"), rows, extra)
    return EXIT_OK


def _bias_prior(args) -> coin.BiasPrior:
    if args.prior == "uniform":
        return coin.BiasPrior.uniform(args.grid_size)
    if args.prior == "beta":
        return coin.BiasPrior.beta(args.a, args.b, args.grid_size)
    return coin.BiasPrior.mixture(
        args.weight_fair, args.fair_concentration, (args.a, args.b), args.grid_size
    )


def cmd_coin(args) -> int:
    if args.stride < 1:
        raise UsageError("--stride must be positive")
    post = coin.coin_posterior(_bias_prior(args), args.n, args.x)
    extra = post.to_dict()
    extra["fair_mass"] = coin.fair_mass(post, args.eps)
    extra["eps"] = args.eps
    idx = np.arange(0, len(post.grid), args.stride)
    if idx[-1] != len(post.grid) - 1:
        idx = np.append(idx, len(post.grid) - 1)
    emit_table(args, ("q", "density"), zip(post.grid[idx], post.density[idx]), extra)
    return EXIT_OK


def _parse_assignments(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        name = name.strip().lstrip("-").replace("-", "_")
        if not sep or name not in SCENARIO_PARAMS:
            raise UsageError(f"--perturb expects NAME=VALUE with a scenario parameter, got {item!r}")
        try:
            out[name] = SCENARIO_PARAMS[name](value)
        except ValueError:
            raise UsageError(f"bad value in --perturb {item!r}") from None
    return out


def cmd_verify(args) -> int:
    model = resolve_model(args)
    sim_model = model
    if args.perturb:
        if args.model is not None:
            raise UsageError("--perturb needs a preset --scenario")
        params = _overrides(args)
        params.update(_parse_assignments(args.perturb))
        sim_model = build_scenario(args.scenario or args.default_scenario, **params)
    evidence = Evidence(args.n, args.k)
    analytic = posterior(model, evidence).hypothesis_marginal
    est = oracle.estimate_posterior(
        sim_model, evidence, min_accepted=args.min_accepted,
        max_total=args.max_total, seed=args.seed, workers=args.workers,
    )
    z = est.z_scores(analytic)
    passed = bool(np.all(np.abs(z) <= args.n_se))
    rows = [
        (label, analytic[i], est.estimate[i], est.standard_error[i], z[i], abs(z[i]) <= args.n_se)
        for i, label in enumerate(model.hypothesis_labels)
    ]
    extra = {
        "n": args.n,
        "k": args.k,
        "seed": args.seed,
        "accepted_samples": est.accepted_samples,
        "total_samples": est.total_samples,
        "n_se": args.n_se,
        "pass": passed,
    }
    emit_table(args, ("hypothesis", "analytic", "estimate", "standard_error", "z", "pass"), rows, extra)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# -- parser ------------------------------------------------------------------


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _prob(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hidden-failure",
        description="Posterior analysis of evidence under hidden failure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_output="csv"):
        p.add_argument("--output", choices=("csv", "json"), default=default_output)

    p = sub.add_parser("curve", help="posterior of the target hypothesis for n = 0..n_max")
    _add_model_args(p)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--fraction", type=_prob, default=None,
                   help="positive fraction k/n (default: unanimous)")
    p.add_argument("--target", default=None, help="hypothesis label (default: first)")
    common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("analyze", help="peak, limit and confidence ceiling of the unanimous curve")
    _add_model_args(p)
    p.add_argument("--tau", type=_prob, default=0.95)
    p.add_argument("--target", default=None)
    common(p, "json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sanhedrin", help="posterior by vote count with the conviction band")
    _add_model_args(p, default="sanhedrin")
    p.add_argument("--n", type=int, default=23)
    p.add_argument("--k-min", type=int, default=13)
    p.add_argument("--k-max", type=int, default=22)
    p.add_argument("--target", default=None)
    common(p)
    p.set_defaults(func=cmd_sanhedrin)

    p = sub.add_parser("crypto", help="false-acceptance rate of Rabin-Miller under bit flips")
    p.add_argument("--lambda", dest="lam", type=float, default=1e-19,
                   help="per-bit flip probability per second")
    p.add_argument("--T", type=float, default=None, help="exposure in seconds")
    p.add_argument("--months", type=float, default=None,
                   help=f"exposure in months of {crypto.SECONDS_PER_MONTH:g} s (default 1)")
    p.add_argument("--R", type=float, default=None, help="check interval in seconds")
    p.add_argument("--ecc", choices=crypto.ECC_KINDS, default="none")
    p.add_argument("--k-min", type=int, default=0)
    p.add_argument("--k-max", type=int, default=128)
    p.add_argument("--target-log2", type=float, default=crypto.SECURITY_TARGET_LOG2)
    common(p)
    p.set_defaults(func=cmd_crypto)

    p = sub.add_parser("coin", help="grid posterior of a coin's heads probability")
    p.add_argument("--prior", choices=coin.PRIOR_KINDS, default="uniform")
    p.add_argument("--a", type=float, default=1.0, help="beta / background shape a")
    p.add_argument("--b", type=float, default=1.0, help="beta / background shape b")
    p.add_argument("--weight-fair", type=_prob, default=0.99)
    p.add_argument("--fair-concentration", type=float, default=500.0)
    p.add_argument("--grid-size", type=int, default=coin.DEFAULT_GRID)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.05, help="half-width of the near-fair window")
    p.add_argument("--stride", type=int, default=1, help="emit every stride-th grid point")
    common(p)
    p.set_defaults(func=cmd_coin)

    p = sub.add_parser("verify", help="compare the analytic posterior with rejection sampling")
    _add_model_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--min-accepted", type=int, default=10_000)
    p.add_argument("--max-total", type=int, default=10**8)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--n-se", type=float, default=3.0)
    p.add_argument("--perturb", action="append", default=[], metavar="NAME=VALUE",
                   help="simulate from a model with this parameter changed (negative control)")
    common(p, "json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ModelError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OracleBudgetError as exc:
        print(f"oracle budget exhausted: {exc}", file=sys.stderr)
        return EXIT_ORACLE_BUDGET
    except (DegenerateEvidenceError, UndefinedLimitError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
