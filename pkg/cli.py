"""Command-line front end: closed-form bounds, degree/valency estimates, verification suites.

    python cli.py bound bg --k 1 --n 1 --lambda 0.5
    python cli.py degree f.json --seed 7 --out degree.jsonl
    python cli.py verify remez1d f.json --d 3 --format text
    python cli.py valency f.json --t 1.25
    python cli.py bernstein f.json --s 1.5 --t 1.25

Exit codes: 0 success, 1 verification failure, 2 invalid parameters,
3 unreadable function spec, 4 degenerate function, 5 numerical failure
(zero count, tail fit, ray selection or Orlicz bracketing did not converge).
"""

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

import bounds
from body_inequalities import FitError, OrliczConvergenceError, RaySelectionError
from complex_analysis import ZeroCountError, bernstein_index, valency_global
from config import DEFAULT_SLACK, LOG_LEVEL, RunConfig
from estimation import DegenerateFunctionError, EstimatorConfig, empirical_chebyshev_degree
from function_core import EvaluationOverflow, SpecParseError, check_compose_domain, expr_to_spec, load_function_spec
from reports import FORMATS, render, report_record, to_text, write_records
from verify_suites import SUITES, run_suite

logger = logging.getLogger("RemezCLI")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_SPEC = 3
EXIT_DEGENERATE = 4
EXIT_NUMERICAL = 5

NUMERICAL_ERRORS = (ZeroCountError, FitError, RaySelectionError, OrliczConvergenceError)


# ============================================================
# BOUND KINDS
# ============================================================

def _structural(kind, c, params):
    value = bounds.structural_degree_bounds(kind, dict(params), c)
    return {"formula_id": f"structural-{kind}", "value": value}


def _degree_record(formula_id, result):
    return {"formula_id": formula_id, "fine": result.fine, "coarse": result.coarse}


# kind -> (callable, argparse dests it needs)
BOUND_KINDS = {
    "bg": (bounds.bg_bound, ("k", "n", "lam")),
    "bg-simplified": (bounds.bg_simplified, ("k", "n", "vol_V", "vol_omega")),
    "remez": (bounds.remez_interval_bound, ("len_I", "len_omega", "d")),
    "convex": (bounds.convex_body_bound, ("n", "vol_V", "vol_omega", "d")),
    "ball-pair": (bounds.ball_pair_bound, ("R1", "R2", "d")),
    "quasipoly": (lambda k, m, M: _degree_record("quasipoly", bounds.quasipoly_zero_bound(k, m, M)),
                  ("k", "m", "M")),
    "quasipoly-degree": (lambda k, m, M, c: {"formula_id": "quasipoly-degree",
                                             "value": bounds.quasipoly_degree_bound(k, m, M, c)},
                         ("k", "m", "M", "c")),
    "distribution": (lambda t, sup, d, n, vol_V: {"formula_id": "distribution",
                                                  "value": bounds.distribution_bound(t, sup, d, n, vol_V)},
                     ("t", "sup", "d", "n", "vol_V")),
    "logbmo": (lambda d, n: {"formula_id": "logbmo", "value": bounds.logbmo_bound(d, n)}, ("d", "n")),
    "structural": (_structural, ("kind", "c", "params")),
    "chebyshev": (lambda k, x: {"formula_id": "chebyshev", "value": bounds.chebyshev_T(k, x),
                                "log_value": bounds.log_chebyshev_T(k, x)}, ("k", "x")),
    "valency-index": (lambda m, A: {"formula_id": "valency-index", "value": bounds.valency_index_bound(m, A)},
                      ("m", "A")),
    "remez-valency": (bounds.remez_from_valency, ("len_I", "len_omega", "m", "c")),
}


def _parse_param(text):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got '{text}'")
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key} needs a number, got '{value}'")


def cmd_bound(args):
    fn, needed = BOUND_KINDS[args.subkind]
    missing = [name for name in needed if getattr(args, name) is None]
    if missing:
        flags = ", ".join(BOUND_FLAGS.get(name, ("--" + name.rstrip("s"),))[0] for name in missing)
        raise ValueError(f"bound {args.subkind} needs {flags}")
    result = fn(*(getattr(args, name) for name in needed))
    record = result.to_record() if hasattr(result, "to_record") else result
    if "value" in record and "log_value" not in record and record["value"] > 0:
        record["log_value"] = math.log(record["value"])
    return [record], EXIT_OK


# flag, dest, type
BOUND_FLAGS = {
    "k": ("--k", int),
    "n": ("--n", int),
    "lam": ("--lambda", float),
    "vol_V": ("--vol-V", float),
    "vol_omega": ("--vol-omega", float),
    "len_I": ("--I", float),
    "len_omega": ("--omega", float),
    "d": ("--d", float),
    "R1": ("--R1", float),
    "R2": ("--R2", float),
    "m": ("--m", float),
    "M": ("--M", float),
    "c": ("--c", float),
    "t": ("--t", float),
    "sup": ("--sup", float),
    "x": ("--x", float),
    "A": ("--A", float),
}


# ============================================================
# ESTIMATES AND SUITES
# ============================================================

def _run_config(args):
    return RunConfig(
        seed=args.seed, r=args.r, n_lines=args.lines, n_segments=args.segments,
        n_subsets=args.subsets, n_mc=args.mc, n_eval=args.eval, slack=args.slack,
        workers=args.workers, output_path=args.out,
    )


def _load(args, run_config):
    expr = load_function_spec(args.spec_file)
    check_compose_domain(expr, run_config.r, np.random.default_rng([run_config.seed, 0xC]))
    return expr


def cmd_degree(args):
    run_config = _run_config(args)
    expr = _load(args, run_config)
    est = empirical_chebyshev_degree(expr, run_config.r, EstimatorConfig.from_run_config(run_config),
                                     np.random.default_rng(run_config.seed))
    record = {
        "check_id": "degree",
        "seed": run_config.seed,
        "function": expr_to_spec(expr),
        "d_emp": est.d_emp,
        "r": est.r,
        "n_configs": est.n_configs,
        "n_degenerate": est.n_degenerate,
        "witness": est.witness,
        "label": est.label,
    }
    return [record], EXIT_OK


def cmd_verify(args):
    run_config = _run_config(args)
    expr = _load(args, run_config)
    reports = run_suite(args.suite, expr, run_config, d=args.d)
    records = [report_record(r, args.timings) for r in reports]
    failed = [r for r in reports if not r.passed]
    for r in failed:
        logger.error(f"{r.check_id} failed: {r.measured_lhs} > {r.bound_rhs} (slack {r.slack})")
    return records, EXIT_FAILED if failed else EXIT_OK


def cmd_valency(args):
    run_config = _run_config(args)
    expr = _load(args, run_config)
    t = args.t if args.t is not None else (1.0 + run_config.r) / 2.0
    rep = valency_global(expr, t, run_config.n_lines, np.random.default_rng(run_config.seed),
                         r=run_config.r, exact_disk=args.exact_disk, workers=run_config.workers)
    return [{"check_id": "valency", "seed": run_config.seed, "value": rep.value, "t": rep.t,
             "n_lines": rep.n_lines, "n_w_samples": rep.n_w_samples,
             "witness_line": rep.witness_line, "witness_w": rep.witness_w, "label": rep.label}], EXIT_OK


def cmd_bernstein(args):
    run_config = _run_config(args)
    expr = _load(args, run_config)
    s_default, t_default = bounds.default_bernstein_radii(run_config.r)
    s = args.s if args.s is not None else s_default
    t = args.t if args.t is not None else t_default
    rep = bernstein_index(expr, s, t, run_config.r, run_config.n_lines,
                          np.random.default_rng(run_config.seed), workers=run_config.workers)
    return [{"check_id": "bernstein", "seed": run_config.seed, "value": rep.value, "s": rep.s, "t": rep.t,
             "r": rep.r, "n_lines": rep.n_lines, "n_skipped": rep.n_skipped,
             "witness_line": rep.witness_line}], EXIT_OK


# ============================================================
# PARSER
# ============================================================

def _run_flags():
    parent = argparse.ArgumentParser(add_help=False)
    defaults = RunConfig()
    parent.add_argument("--seed", type=int, default=defaults.seed)
    parent.add_argument("--r", type=float, default=defaults.r)
    parent.add_argument("--lines", type=int, default=defaults.n_lines)
    parent.add_argument("--segments", type=int, default=defaults.n_segments)
    parent.add_argument("--subsets", type=int, default=defaults.n_subsets)
    parent.add_argument("--mc", type=int, default=defaults.n_mc)
    parent.add_argument("--eval", type=int, default=defaults.n_eval)
    parent.add_argument("--slack", type=float, default=DEFAULT_SLACK)
    parent.add_argument("--workers", type=int, default=defaults.workers)
    parent.add_argument("--timings", action="store_true", help="serialise runtime_ms")
    return parent


def _output_flags():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--out", type=Path, default=None)
    parent.add_argument("--format", choices=FORMATS, default=None)
    return parent


def build_parser():
    parser = argparse.ArgumentParser(prog="remez", description="Remez-type inequalities for analytic functions")
    sub = parser.add_subparsers(dest="command", required=True)
    run_flags, output_flags = _run_flags(), _output_flags()

    bound_cmd = sub.add_parser("bound", parents=[output_flags], help="Evaluate a closed-form bound")
    bound_cmd.add_argument("subkind", choices=sorted(BOUND_KINDS))
    for dest, (flag, kind) in BOUND_FLAGS.items():
        bound_cmd.add_argument(flag, dest=dest, type=kind, default=None)
    bound_cmd.add_argument("--kind", choices=["composition", "reciprocal", "product", "rolle", "bernstein"],
                           default=None, help="structural bound kind")
    bound_cmd.add_argument("--param", dest="params", type=_parse_param, action="append", default=None,
                           help="structural parameter key=value (repeatable)")
    bound_cmd.set_defaults(c=1.0, A=1.0)
    bound_cmd.set_defaults(handler=cmd_bound)

    degree_cmd = sub.add_parser("degree", parents=[run_flags, output_flags], help="Empirical Chebyshev degree")
    degree_cmd.add_argument("spec_file", type=Path)
    degree_cmd.set_defaults(handler=cmd_degree)

    verify_cmd = sub.add_parser("verify", parents=[run_flags, output_flags], help="Run a verification suite")
    verify_cmd.add_argument("suite", choices=sorted(SUITES) + ["all"])
    verify_cmd.add_argument("spec_file", type=Path)
    verify_cmd.add_argument("--d", type=float, default=None, help="tested exponent")
    verify_cmd.set_defaults(handler=cmd_verify)

    valency_cmd = sub.add_parser("valency", parents=[run_flags, output_flags], help="Global valency estimate")
    valency_cmd.add_argument("spec_file", type=Path)
    valency_cmd.add_argument("--t", type=float, default=None)
    valency_cmd.add_argument("--exact-disk", action="store_true")
    valency_cmd.set_defaults(handler=cmd_valency)

    bernstein_cmd = sub.add_parser("bernstein", parents=[run_flags, output_flags], help="Bernstein index")
    bernstein_cmd.add_argument("spec_file", type=Path)
    bernstein_cmd.add_argument("--s", type=float, default=None)
    bernstein_cmd.add_argument("--t", type=float, default=None)
    bernstein_cmd.set_defaults(handler=cmd_bernstein)
    return parser


def _emit(args, records):
    fmt = args.format or ("jsonl" if args.out else "text")
    if args.out:
        write_records(records, args.out, fmt)
        if args.command == "verify":
            sys.stdout.write(to_text(records))
    else:
        sys.stdout.write(render(records, fmt))


def main(argv=None):
    logging.basicConfig(level=LOG_LEVEL, stream=sys.stderr,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        records, code = args.handler(args)
    except SpecParseError as e:
        logger.error(f"function spec: {e}")
        return EXIT_SPEC
    except (DegenerateFunctionError, EvaluationOverflow) as e:
        logger.error(f"degenerate function: {e}")
        return EXIT_DEGENERATE
    except NUMERICAL_ERRORS as e:
        logger.error(f"numerical failure ({type(e).__name__}): {e}")
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.error(f"invalid parameters: {e}")
        return EXIT_INVALID
    _emit(args, records)
    return code


if __name__ == "__main__":
    sys.exit(main())
