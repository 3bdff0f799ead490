"""Command-line entry point: ``vbstl <command> ...``.

Commands
--------
translate   block graph JSON to STL text plus the logged-signal manifest
monitor     evaluate a spec file on a trace CSV (exit 0 true, 1 false, 2 error)
falsify     run campaign configs; per-run CSV, summary CSV and a convergence PNG
laws        randomised check of the connective laws
fig5        robustness of the four demonstration traces (CSV and PNG)
isobars     signed robustness grids of both conjunctions (CSV and PNG)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, load_campaign, resolve_path
from .falsifier import CampaignSummary, RunResult, run_campaign
from .figures import FIG5_FORMULA, fig5_rows, fig5_traces, isobar_grid
from .laws import check_laws
from .robustness import SEMANTICS, SemanticsConfig, eval_robust
from .stl import format_formula, load_spec
from .trace import Trace
from .transform import MODES, execute_graph, load_graph, translate

log = logging.getLogger("vbstl")

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


def _param(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value of {name.strip()!r} is not a number") from None


def _num(x: float) -> float | str:
    """JSON-safe number: infinities become the strings ``"inf"`` / ``"-inf"``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _table(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


# translate ----------------------------------------------------------------------------


def cmd_translate(args) -> int:
    graph = load_graph(resolve_path(args.graph, None))
    tr = translate(
        graph, horizon=args.horizon, mode=args.mode, encoding=args.encoding, n_samples=args.samples
    )
    formula = tr.final_formula if args.final else tr.formula
    print(format_formula(formula))
    print()
    print("reading: " + ("value at the final sample" if args.final or tr.anchored else "pointwise"))
    if tr.manifest:
        print("logged signals:")
        for m in tr.manifest:
            print(f"  {m.signal}  (block {m.block}: {m.reason})")
    else:
        print("logged signals: none")
    return EXIT_TRUE


# monitor ------------------------------------------------------------------------------


def cmd_monitor(args) -> int:
    formula, params = load_spec(resolve_path(args.spec, None), dict(args.param))
    trace = Trace.from_csv(Path(args.trace))
    if args.graph:
        trace = execute_graph(load_graph(resolve_path(args.graph, None)), trace)
    cfg = SemanticsConfig(
        default=args.semantics,
        eq_constant=args.eq_constant,
        implication_scale=args.implication_scale,
        constant_magnitude=args.constant_magnitude,
        rng_seed=args.seed,
    )
    k = args.at if args.at >= 0 else len(trace) + args.at
    v = eval_robust(formula, trace, k, cfg)
    report = {
        "truth": v.truth,
        "robustness": _num(v.rob),
        "signed_robustness": _num(v.signed),
        "semantics": cfg.default,
        "sample": k,
        "time": float(trace.times[k]),
        "formula": format_formula(formula),
        "params": params,
    }
    if args.json:
        text = json.dumps(report, indent=2) + "\n"
        if args.json == "-":
            sys.stdout.write(text)
        else:
            Path(args.json).write_text(text, encoding="utf-8")
    if args.json != "-":
        print(f"truth: {str(v.truth).lower()}")
        print(f"robustness: {v.rob:g}")
        print(f"signed robustness: {v.signed:g}")
    return EXIT_TRUE if v.truth else EXIT_FALSE


# falsify ------------------------------------------------------------------------------


def runs_table(runs: Sequence[RunResult], names: Sequence[str]) -> tuple[list[str], list[list[object]]]:
    header = ["run", "seed", "falsified", "iterations", "best_signed_robustness", *names, "failures"]
    rows = [
        [r.run_index, r.seed, int(r.falsified), r.iterations_used, repr(float(r.best_signed_robustness)),
         *(repr(float(x)) for x in r.best_point), len(r.failures)]
        for r in runs
    ]
    return header, rows


def summary_row(name: str, s: CampaignSummary) -> list[str]:
    row = s.row()
    return [name, f"{row['Succ']}/{s.repetitions}", row["Iter"], row["Iter/Succ"]]


def cmd_falsify(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = [["campaign", "Succ", "Iter", "Iter/Succ"]]
    for path in args.config:
        loaded = load_campaign(path)
        overrides = {k: v for k, v in (("repetitions", args.repetitions),
                                       ("max_iterations", args.max_iterations),
                                       ("seed", args.seed)) if v is not None}
        c = replace(loaded.campaign, **overrides)
        jobs = args.jobs if args.jobs is not None else loaded.jobs
        summary, runs = run_campaign(c, jobs=jobs)
        names = [b.name for b in c.model.bounds()]
        header, rows = runs_table(runs, names)
        _write_csv(out / f"{c.name}_runs.csv", header, rows)
        s = summary.row()
        _write_csv(out / f"{c.name}_summary.csv", ["campaign", "repetitions", "Succ", "Iter", "Iter/Succ"],
                   [[c.name, summary.repetitions, s["Succ"], s["Iter"], s["Iter/Succ"]]])
        if not args.no_plot:
            from .plotting import plot_convergence
            plot_convergence([r.history for r in runs], out / f"{c.name}_convergence.png", title=c.name)
        table.append(summary_row(c.name, summary))
    print(_table(table))
    return EXIT_TRUE


# laws, fig5, isobars ------------------------------------------------------------------


def cmd_laws(args) -> int:
    results = check_laws(n=args.n, seed=args.seed, tol=args.tol)
    rows = [["law", "cases", "failures", "worst"]]
    rows += [[r.name, str(r.cases), str(r.failures), f"{r.worst_error:.3g}"] for r in results]
    print(_table(rows))
    return EXIT_TRUE if all(r.ok for r in results) else EXIT_FALSE


def cmd_fig5(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = fig5_rows()
    _write_csv(out / "fig5.csv", ["trace", "minimum", "max_robustness", "add_robustness"],
               [[r.trace, repr(r.minimum), repr(r.max_robustness), repr(r.add_robustness)] for r in rows])
    samples = fig5_traces()
    _write_csv(out / "fig5_traces.csv", ["time", *samples],
               [[repr(float(t)), *(repr(float(tr.signal("x")[i])) for tr in samples.values())]
                for i, t in enumerate(next(iter(samples.values())).times)])
    if not args.no_plot:
        from .plotting import plot_fig5
        labels = {r.trace: f"max {r.max_robustness:.3g}, add {r.add_robustness:.3g}" for r in rows}
        plot_fig5(samples, labels, out / "fig5.png")
    print(f"formula: {FIG5_FORMULA}")
    print(_table([["trace", "min x", "max", "add"]]
                 + [[r.trace, f"{r.minimum:.4g}", f"{r.max_robustness:.6g}", f"{r.add_robustness:.6g}"]
                    for r in rows]))
    return EXIT_TRUE


def cmd_isobars(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grids = {}
    values = None
    for sem in ("add", "max"):
        values, grids[sem] = isobar_grid(sem, args.connective, n=args.n, span=args.span)
    rows = [
        [repr(float(x)), repr(float(y)), repr(float(grids["add"][i, j])), repr(float(grids["max"][i, j]))]
        for i, y in enumerate(values) for j, x in enumerate(values)
    ]
    _write_csv(out / f"isobars_{args.connective}.csv", ["x", "y", "add", "max"], rows)
    if not args.no_plot:
        from .plotting import plot_isobars
        plot_isobars(values, {f"x {args.connective}_{k} y": g for k, g in grids.items()},
                     out / f"isobars_{args.connective}.png")
    print(f"wrote {len(rows)} grid points to {out / f'isobars_{args.connective}.csv'}")
    return EXIT_TRUE


# parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vbstl", description="STL robustness monitoring and falsification")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("translate", help="translate a block graph to STL")
    t.add_argument("--graph", required=True, help="block graph JSON file; 'package:graphs/...' for shipped ones")
    t.add_argument("--mode", choices=MODES, default="auto")
    t.add_argument("--encoding", choices=("implicative", "disjunctive"), default="implicative")
    t.add_argument("--horizon", type=float, help="simulation horizon, needed for some modes")
    t.add_argument("--samples", type=int, help="number of samples (unroll mode)")
    t.add_argument("--final", action="store_true", help="print the formula read at the final sample")
    t.set_defaults(func=cmd_translate)

    m = sub.add_parser("monitor", help="evaluate a spec on a trace")
    m.add_argument("spec", help="spec file; 'package:specs/...' for shipped ones")
    m.add_argument("trace", help="trace CSV file")
    m.add_argument("--semantics", choices=SEMANTICS + ("additive",), default="max")
    m.add_argument("--at", type=int, default=0, help="sample index; negative counts from the end")
    m.add_argument("--param", type=_param, action="append", default=[], metavar="NAME=VALUE")
    m.add_argument("--graph", help="execute this block graph on the trace first")
    m.add_argument("--eq-constant", type=float, default=100.0)
    m.add_argument("--implication-scale", type=float, default=10.0)
    m.add_argument("--constant-magnitude", type=float, default=100.0)
    m.add_argument("--seed", type=int, default=0, help="seed for random semantics")
    m.add_argument("--json", metavar="PATH", help="also write the report as JSON ('-' for stdout only)")
    m.set_defaults(func=cmd_monitor)

    f = sub.add_parser("falsify", help="run falsification campaigns")
    f.add_argument("config", nargs="+", help="campaign JSON file(s); 'package:campaigns/...' for shipped ones")
    f.add_argument("--out", default=".", help="output directory")
    f.add_argument("--jobs", type=int, help="parallel runs per campaign")
    f.add_argument("--repetitions", type=int)
    f.add_argument("--max-iterations", type=int)
    f.add_argument("--seed", type=int)
    f.add_argument("--no-plot", action="store_true", help="skip the PNG")
    f.set_defaults(func=cmd_falsify)

    la = sub.add_parser("laws", help="check connective laws on random operands")
    la.add_argument("-n", type=int, default=100_000)
    la.add_argument("--seed", type=int, default=0)
    la.add_argument("--tol", type=float, default=1e-9)
    la.set_defaults(func=cmd_laws)

    f5 = sub.add_parser("fig5", help="robustness of the demonstration traces")
    f5.add_argument("--out", default=".")
    f5.add_argument("--no-plot", action="store_true")
    f5.set_defaults(func=cmd_fig5)

    iso = sub.add_parser("isobars", help="robustness grids of the conjunctions")
    iso.add_argument("--out", default=".")
    iso.add_argument("-n", type=int, default=101, help="grid points per axis")
    iso.add_argument("--span", type=float, default=5.0)
    iso.add_argument("--connective", choices=("and", "or"), default="and")
    iso.add_argument("--no-plot", action="store_true")
    iso.set_defaults(func=cmd_isobars)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, KeyError) as exc:
        print(f"vbstl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
