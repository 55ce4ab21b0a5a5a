"""Batch command-line front end.

Commands::

    noonsim tn --n 4 [--eta 0.9] [--out report.json]
    noonsim table --max-exponent 6 [--out table.csv]
    noonsim pool --target 4 --count 100 --runs 1000 --eta 1 --seed 7 [--initial-level 2] [--max-singles N] [--out runs.csv] [--summary summary.json]
    noonsim cascade --target 4 --runs 100000 --seed 7 [--out cascade.json]

Exit codes: 0 success, 2 parameter error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import analytics, catfactory, protocol
from .analytics import format_rational

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARAM = 2
EXIT_IO = 3

TABLE_COLUMNS = [
    "schema_version",
    "n",
    "exact_p_tn",
    "exact_p_tn_float",
    "stirling_p_tn",
    "stirling_rel_error",
    "exact_naive_p",
    "exact_naive_p_float",
    "naive_asymptotic",
    "m1_exact",
    "m1_exact_float",
    "m1_estimate",
    "yield_estimate",
    "leak_one",
    "leak_one_float",
    "leak_two",
    "leak_two_float",
    "leak_two_total",
    "leak_two_total_float",
    "baseline_kok",
    "baseline_fiurasek",
]

RUN_BASE_COLUMNS = [
    "schema_version",
    "run_index",
    "seed",
    "target_n",
    "target_count",
    "eta",
    "initial_level",
    "max_singles",
    "singles_consumed",
    "elapsed_steps",
    "final_clean",
    "final_corrupt",
    "budget_exhausted",
]


class ParameterError(ValueError):
    pass


def fmt_float(x: float) -> str:
    return format(x, ".17g")


def _json_ready(obj):
    # NaN/inf are not valid JSON; they become null
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_json_ready(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_csv(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- tn ---------------------------------------------------------------------


def tn_report(n: int, eta: float) -> dict:
    if n < 1:
        raise ParameterError(f"--n must be >= 1, got {n}")
    if not 0.0 <= eta <= 1.0:
        raise ParameterError(f"--eta must lie in [0, 1], got {eta}")
    cat = catfactory.make_cat(n)
    outcome = catfactory.apply_tn(cat, cat, n)
    exact = analytics.exact_p_tn(n)
    lossy = catfactory.merge_lossy_accept(n, eta)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "tn",
        "n": n,
        "eta": eta,
        "success_prob_exact": format_rational(exact),
        "success_prob_exact_float": float(exact),
        "success_prob_sim": outcome.success_prob,
        "fidelity": outcome.fidelity_to_target,
        "branch_spectrum_sim": {str(k): v for k, v in catfactory.tn_branch_spectrum(n).items()},
        "branch_spectrum_exact": {
            str(k): format_rational(v) for k, v in analytics.total_detection_spectrum(n).items()
        },
        "leak_prob_one": format_rational(analytics.leak_prob_one(n)),
        "leak_prob_two": format_rational(analytics.leak_prob_two(n)),
        "lossy": lossy.to_dict(),
        "false_accept_fraction_exact": analytics.false_accept_fraction(n, eta),
        "output_state": outcome.output_state.to_dict() if outcome.output_state else None,
    }


def cmd_tn(args) -> int:
    if args.n >= 1 and not analytics.is_power_of_two(args.n):
        print(f"warning: n={args.n} is not a power of two; the recursion only uses powers of two", file=sys.stderr)
    _emit(dump_json(tn_report(args.n, args.eta)), args.out)
    return EXIT_OK


# --- table ------------------------------------------------------------------


def table_rows(max_exponent: int) -> list[list[str]]:
    if max_exponent < 1:
        raise ParameterError(f"--max-exponent must be >= 1, got {max_exponent}")
    rows = [TABLE_COLUMNS]
    for k in range(max_exponent + 1):
        n = 2**k
        p_tn = analytics.exact_p_tn(n)
        naive = analytics.exact_naive_p(n)
        m1 = analytics.m1_exact(n, 1) if n > 1 else Fraction(1)
        leak1 = analytics.leak_prob_one(n)
        leak2 = analytics.leak_prob_two(n)
        leak2_total = analytics.total_detection_spectrum(n).get(2, Fraction(0))
        even = n % 2 == 0
        rows.append(
            [
                str(SCHEMA_VERSION),
                str(n),
                format_rational(p_tn),
                fmt_float(float(p_tn)),
                fmt_float(analytics.stirling_p_tn(n)),
                fmt_float(analytics.scaling_report(n).relative_error),
                format_rational(naive),
                fmt_float(float(naive)),
                fmt_float(analytics.naive_asymptotic(n)),
                format_rational(m1),
                fmt_float(float(m1)),
                fmt_float(analytics.m1_estimate(n)),
                fmt_float(analytics.yield_estimate(n)),
                format_rational(leak1),
                fmt_float(float(leak1)),
                format_rational(leak2),
                fmt_float(float(leak2)),
                format_rational(leak2_total),
                fmt_float(float(leak2_total)),
                fmt_float(analytics.baseline_scaling(n, "kok")) if even else "",
                fmt_float(analytics.baseline_scaling(n, "fiurasek")) if even else "",
            ]
        )
    return rows


def cmd_table(args) -> int:
    _emit(write_csv(table_rows(args.max_exponent)), args.out)
    return EXIT_OK


# --- pool -------------------------------------------------------------------


def run_columns(config: protocol.ProtocolConfig) -> list[str]:
    cols = list(RUN_BASE_COLUMNS)
    for lvl in config.merge_levels:
        cols += [f"attempts_{lvl}", f"successes_{lvl}", f"false_accepts_{lvl}"]
    return cols


def run_row(stats: protocol.RunStatistics) -> list[str]:
    c = stats.config
    row = [
        str(SCHEMA_VERSION),
        str(stats.run_index),
        str(c.seed),
        str(c.target_n),
        str(c.target_count),
        fmt_float(c.eta),
        str(c.initial_level),
        "" if c.max_singles is None else str(c.max_singles),
        str(stats.singles_consumed),
        str(stats.elapsed_steps),
        str(stats.final_clean),
        str(stats.final_corrupt),
        str(int(stats.budget_exhausted)),
    ]
    for lvl in c.merge_levels:
        row += [str(stats.tn_attempts[lvl]), str(stats.tn_successes[lvl]), str(stats.false_accepts[lvl])]
    return row


def parse_run_row(record: dict[str, str]) -> protocol.RunStatistics:
    """Rebuild :class:`RunStatistics` (without the leftover pool) from a CSV record."""
    config = protocol.ProtocolConfig(
        target_n=int(record["target_n"]),
        target_count=int(record["target_count"]),
        eta=float(record["eta"]),
        seed=int(record["seed"]),
        initial_level=int(record["initial_level"]),
        max_singles=int(record["max_singles"]) if record["max_singles"] else None,
    )
    levels = config.merge_levels
    return protocol.RunStatistics(
        config=config,
        run_index=int(record["run_index"]),
        singles_consumed=int(record["singles_consumed"]),
        tn_attempts={lvl: int(record[f"attempts_{lvl}"]) for lvl in levels},
        tn_successes={lvl: int(record[f"successes_{lvl}"]) for lvl in levels},
        false_accepts={lvl: int(record[f"false_accepts_{lvl}"]) for lvl in levels},
        final_clean=int(record["final_clean"]),
        final_corrupt=int(record["final_corrupt"]),
        elapsed_steps=int(record["elapsed_steps"]),
        budget_exhausted=bool(int(record["budget_exhausted"])),
    )


def pool_outputs(config: protocol.ProtocolConfig, runs: int) -> tuple[str, str]:
    if runs < 1:
        raise ParameterError(f"--runs must be >= 1, got {runs}")
    stats = protocol.run_many(config, runs)
    csv_text = write_csv([run_columns(config)] + [run_row(s) for s in stats])
    summary = protocol.aggregate(stats).to_dict()
    summary["schema_version"] = SCHEMA_VERSION
    summary["command"] = "pool"
    summary["analytic_false_accept_fraction"] = {
        str(lvl): analytics.false_accept_fraction(lvl, config.eta) for lvl in config.merge_levels
    }
    return csv_text, dump_json(summary)


def cmd_pool(args) -> int:
    try:
        config = protocol.ProtocolConfig(
            target_n=args.target,
            target_count=args.count,
            eta=args.eta,
            seed=args.seed,
            initial_level=args.initial_level,
            max_singles=args.max_singles,
        )
    except ValueError as exc:
        raise ParameterError(str(exc)) from exc
    csv_text, summary_text = pool_outputs(config, args.runs)
    summary_path = args.summary
    if summary_path is None and args.out not in (None, "-"):
        summary_path = str(Path(args.out).with_suffix(".summary.json"))
    _emit(csv_text, args.out)
    if summary_path is not None:
        _emit(summary_text, summary_path)
    return EXIT_OK


# --- cascade ----------------------------------------------------------------


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def cascade_report(target_n: int, runs: int, seed: int) -> dict:
    if not analytics.is_power_of_two(target_n) or target_n < 2:
        raise ParameterError(f"--target must be a power of two >= 2, got {target_n}")
    if runs < 1:
        raise ParameterError(f"--runs must be >= 1, got {runs}")
    rng = protocol.run_rng(seed, 0)
    flags = catfactory.naive_cascade_batch(target_n, runs, rng)
    successes = int(flags.sum())
    rate = successes / runs
    exact = analytics.exact_naive_p(target_n)
    p = float(exact)
    se_exact = math.sqrt(p * (1 - p) / runs)
    lo, hi = wilson_interval(successes, runs)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "cascade",
        "target_n": target_n,
        "runs": runs,
        "seed": seed,
        "successes": successes,
        "success_rate": rate,
        "success_rate_se": math.sqrt(rate * (1 - rate) / runs),
        "ci95_wilson": [lo, hi],
        "exact_naive_p": format_rational(exact),
        "exact_naive_p_float": p,
        "z_score": (rate - p) / se_exact if se_exact > 0 else 0.0,
    }


def cmd_cascade(args) -> int:
    _emit(dump_json(cascade_report(args.target, args.runs, args.seed)), args.out)
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noonsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tn", help="simulate one merge of two n-photon cats")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tn)

    p = sub.add_parser("table", help="closed forms for N = 1, 2, 4, ..., 2^k")
    p.add_argument("--max-exponent", "-k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("pool", help="Monte Carlo of the memory-pooled protocol")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--initial-level", type=int, default=1, choices=(1, 2))
    p.add_argument("--max-singles", type=int)
    p.add_argument("--out", help="per-run CSV (default: stdout)")
    p.add_argument("--summary", help="JSON summary (default: next to --out)")
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("cascade", help="Monte Carlo of the memoryless cascade")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cascade)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARAM if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
