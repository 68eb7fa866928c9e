"""Command-line interface.

Subcommands: dissect, coastline, fit, generate, agent-sim, stats. Exit codes:
0 success, 1 usage error, 2 data error (messages carry line numbers),
3 insufficient events for the requested estimate. Outputs are byte-identical
across runs for identical inputs and flags; no environment variable changes
any output (the numba toggle only changes speed). Results are fully computed
before any output file is opened, so failures leave no partial files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .agent import AgentRules, DirectionPolicy, run_strategy
from .core import DissectionConfig, ReturnConvention
from .dissect import coastline as make_coastline
from .dissect import dissect
from .errors import DataError, EstimationError
from .ingest import format_time_ms, read_price_series, write_price_series
from .scaling import ThresholdGrid, dc_count_law, overshoot_law
from .series import PriceSeries
from .synth import GeneratorKind, GeneratorSpec, generate_pareto, generate_series

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INSUFFICIENT = 3

_KIND_LABELS = ("directional_change", "overshoot")
_MODE_LABELS = {1: "up", -1: "down"}


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _UsageError(Exception):
    """Bad flag values; reported before any input is read (exit 1)."""


def _validated(build, *args, **kwargs):
    """Build a config object from flag values, mapping rejects to usage errors."""
    try:
        return build(*args, **kwargs)
    except DataError as exc:
        raise _UsageError(str(exc)) from exc


def _parse_convention(name: str) -> ReturnConvention:
    return (
        ReturnConvention.LOGARITHMIC
        if name == "logarithmic"
        else ReturnConvention.FRACTIONAL
    )


def _parse_grid(text: str) -> ThresholdGrid:
    parts = text.split(":")
    if len(parts) != 3:
        raise DataError(f"grid must be min:max:count, got {text!r}")
    try:
        low, high, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise DataError(f"grid must be min:max:count, got {text!r}") from None
    return ThresholdGrid.log_spaced(low, high, count)


def _infer_format(out: str | None, explicit: str | None, default: str = "csv") -> str:
    if explicit:
        return explicit
    if out:
        suffix = Path(out).suffix.lower()
        if suffix == ".jsonl":
            return "jsonl"
        if suffix == ".csv":
            return "csv"
    return default


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_series(args) -> PriceSeries:
    return read_price_series(
        args.input, side=args.price_side, max_rel_spread=args.max_spread
    )


def _add_input_flags(p: _Parser) -> None:
    p.add_argument("--input", required=True, help="input CSV (time,bid,ask or time,price)")
    p.add_argument(
        "--price-side",
        choices=("mid", "bid", "ask"),
        default="mid",
        help="price reduction for tick files (default mid)",
    )
    p.add_argument(
        "--max-spread",
        type=float,
        default=None,
        help="drop ticks with relative spread above this bound",
    )
    p.add_argument(
        "--convention",
        choices=("fractional", "logarithmic"),
        default="fractional",
        help="return convention for threshold moves (default fractional)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="intrinsic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dissect", parents=[], help="emit the event stream of a series")
    _add_input_flags(p)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), default=None)

    p = sub.add_parser("coastline", help="emit the event-price polyline and its length")
    _add_input_flags(p)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--out", default=None, help="coastline CSV (default stdout)")

    p = sub.add_parser("fit", help="fit a scaling law over a threshold grid")
    _add_input_flags(p)
    p.add_argument("--law", choices=("dc-count", "overshoot"), required=True)
    p.add_argument(
        "--grid",
        default="0.0005:0.05:12",
        help="log-spaced threshold grid min:max:count (default 0.0005:0.05:12)",
    )
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--out", default=None, help="fit JSON (default stdout)")
    p.add_argument("--samples-csv", default=None, help="also write the samples as CSV")

    p = sub.add_parser("generate", help="write a deterministic synthetic series")
    p.add_argument("--kind", choices=("gbm", "arw", "sawtooth", "pareto"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=1e-4, help="gbm per-step volatility")
    p.add_argument("--mu", type=float, default=0.0, help="gbm per-step drift")
    p.add_argument("--step", type=float, default=0.01, help="arw per-step move")
    p.add_argument("--amplitude", type=float, default=0.01, help="sawtooth swing")
    p.add_argument("--alpha", type=float, default=2.5, help="pareto tail exponent")
    p.add_argument("--x-min", type=float, default=1.0, help="pareto scale")
    p.add_argument("--start", type=float, default=100.0, help="start price")
    p.add_argument("--out", default=None, help="output CSV (default stdout)")

    p = sub.add_parser("agent-sim", help="run the demo agent over a dissection")
    _add_input_flags(p)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--policy", choices=("contrarian", "trend-following"), default="contrarian")
    p.add_argument("--unit-gearing", type=float, default=1.0)
    p.add_argument("--max-gearing", type=float, default=5.0)
    p.add_argument("--out", default=None, help="trajectory CSV (default stdout)")

    p = sub.add_parser("stats", help="summarize an input file")
    _add_input_flags(p)

    return parser


def _cmd_dissect(args) -> int:
    config = _validated(DissectionConfig, args.threshold, _parse_convention(args.convention))
    series = _load_series(args)
    d = dissect(series, config)
    fmt = _infer_format(args.out, args.format)
    ev = d.events
    if fmt == "csv":
        lines = ["intrinsic_index,kind,mode,time,price,tick_index"]
        for i in range(len(ev)):
            lines.append(
                f"{i},{_KIND_LABELS[int(ev.kind[i])]},{_MODE_LABELS[int(ev.mode[i])]},"
                f"{int(ev.time[i])},{float(ev.price[i])!r},{int(ev.tick_index[i])}"
            )
        text = "\n".join(lines) + "\n" if len(lines) > 1 else lines[0] + "\n"
    else:
        rows = []
        for i in range(len(ev)):
            rows.append(
                json.dumps(
                    {
                        "intrinsic_index": i,
                        "kind": _KIND_LABELS[int(ev.kind[i])],
                        "mode": _MODE_LABELS[int(ev.mode[i])],
                        "time": int(ev.time[i]),
                        "price": float(ev.price[i]),
                        "tick_index": int(ev.tick_index[i]),
                    }
                )
            )
        text = "\n".join(rows) + "\n" if rows else ""
    _emit(text, args.out)
    return EXIT_OK


def _cmd_coastline(args) -> int:
    config = _validated(DissectionConfig, args.threshold, _parse_convention(args.convention))
    series = _load_series(args)
    d = dissect(series, config)
    line = make_coastline(d)
    lines = ["intrinsic_index,price"]
    for i, p in zip(line.intrinsic_index, line.price):
        lines.append(f"{int(i)},{float(p)!r}")
    _emit("\n".join(lines) + "\n", args.out)
    summary = f"events={len(line)} total_length={line.total_length!r}\n"
    if args.out:
        sys.stdout.write(summary)
    else:
        sys.stderr.write(summary)
    return EXIT_OK


def _cmd_fit(args) -> int:
    grid = _validated(_parse_grid, args.grid)
    convention = _parse_convention(args.convention)
    series = _load_series(args)
    if args.law == "dc-count":
        result = dc_count_law(series, grid, convention, min_count=args.min_count)
    else:
        result = overshoot_law(series, grid, convention, min_count=args.min_count)
    doc = {
        "law": result.law,
        "C": result.fit.C,
        "E": result.fit.E,
        "r_squared": result.fit.r_squared,
        "n_points": result.fit.n_points,
        "samples": [{"x": s.x, "y": s.y} for s in result.samples],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    if args.samples_csv:
        lines = ["x,y"] + [f"{s.x!r},{s.y!r}" for s in result.samples]
        Path(args.samples_csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_generate(args) -> int:
    kind = GeneratorKind(args.kind)
    spec = _validated(
        GeneratorSpec,
        kind=kind,
        n=args.n,
        seed=args.seed,
        step=args.step,
        sigma=args.sigma,
        mu=args.mu,
        amplitude=args.amplitude,
        alpha=args.alpha,
        x_min=args.x_min,
        start_price=args.start,
    )
    if kind is GeneratorKind.PARETO_SAMPLES:
        values = generate_pareto(spec)
        text = "\n".join(["value"] + [f"{float(v)!r}" for v in values]) + "\n"
        _emit(text, args.out)
        return EXIT_OK
    series = generate_series(spec)
    if args.out:
        write_price_series(series, args.out)
    else:
        lines = ["time,price"] + [
            f"{format_time_ms(int(t))},{float(p)!r}"
            for t, p in zip(series.time, series.price)
        ]
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_agent_sim(args) -> int:
    config = _validated(DissectionConfig, args.threshold, _parse_convention(args.convention))
    rules = _validated(
        AgentRules,
        unit_gearing=args.unit_gearing,
        max_gearing=args.max_gearing,
        direction_policy=DirectionPolicy(args.policy),
    )
    series = _load_series(args)
    trajectory = run_strategy(series, config, rules)
    lines = ["intrinsic_index,gearing,entry_price,unrealized,realized"]
    for r in trajectory.records:
        lines.append(
            f"{r.intrinsic_index},{r.gearing!r},{r.entry_price!r},"
            f"{r.unrealized_pnl!r},{r.realized_pnl!r}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    summary = (
        f"events={len(trajectory.records)} realized={trajectory.final_realized!r} "
        f"unrealized={trajectory.final_unrealized!r} total={trajectory.total_pnl!r}\n"
    )
    if args.out:
        sys.stdout.write(summary)
    else:
        sys.stderr.write(summary)
    return EXIT_OK


def _cmd_stats(args) -> int:
    series = _load_series(args)
    out = [f"rows={len(series)}"]
    if len(series):
        t = series.time
        out.append(f"start={format_time_ms(int(t[0]))}")
        out.append(f"end={format_time_ms(int(t[-1]))}")
        out.append(f"span_ms={int(t[-1] - t[0])}")
        if len(series) > 1:
            gaps = np.diff(t)
            k = int(np.argmax(gaps))
            out.append(f"median_gap_ms={float(np.median(gaps))!r}")
            out.append(f"max_gap_ms={int(gaps[k])}")
            out.append(f"max_gap_start={format_time_ms(int(t[k]))}")
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


_COMMANDS = {
    "dissect": _cmd_dissect,
    "coastline": _cmd_coastline,
    "fit": _cmd_fit,
    "generate": _cmd_generate,
    "agent-sim": _cmd_agent_sim,
    "stats": _cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        sys.stderr.write(f"intrinsic: error: {exc}\n")
        return EXIT_USAGE
    except EstimationError as exc:
        sys.stderr.write(f"intrinsic: insufficient events: {exc}\n")
        return EXIT_INSUFFICIENT
    except DataError as exc:
        sys.stderr.write(f"intrinsic: data error: {exc}\n")
        return EXIT_DATA
    except FileNotFoundError as exc:
        sys.stderr.write(f"intrinsic: data error: {exc}\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
