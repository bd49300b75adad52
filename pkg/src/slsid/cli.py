"""Command-line entry point.

Subcommands: simulate, fit, oracle, pe-check, min-samples, select-order,
consistency-sweep, bench, repro.  All outputs are UTF-8 CSV or JSON with a
stable key order, so a rerun with the same seed is byte-identical apart
from wall-clock timing columns.

Exit codes: 0 success, 1 usage error, 2 reproduction mismatch,
3 enumeration limit exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import bench, fixtures
from .bcd import SolverConfig, bcd_solve
from .dataio import load_dataset, load_model, save_dataset, save_model
from .model import NoiseSpec, generate_random_scenario
from .oracle import EnumerationLimitError, oracle_global, oracle_unique
from .order import OrderSelectConfig, SweepScenario, consistency_sweep, select_order
from .pe import min_samples_bako, min_samples_ours, min_samples_table, min_samples_vidal, pe_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_ENUM_LIMIT = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(args, text: str, filename: str) -> None:
    if args.output is not None:
        outdir = Path(args.output)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / filename).write_text(text)
        print(f"wrote {outdir / filename}")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] for c in columns])
    return buf.getvalue()


def _cmd_simulate(args) -> int:
    if args.example is not None:
        make = {1: fixtures.example_one, 2: fixtures.example_two}[args.example]
        model, data = make()
        stem = f"example{args.example}"
    else:
        if args.n is None or args.S is None or args.N is None:
            print("error: provide --example or all of --n/--S/--N", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        noise = NoiseSpec("gaussian", args.sigma) if args.sigma > 0 else NoiseSpec()
        model, data = generate_random_scenario(
            args.n, args.S, args.N, (args.range_lo, args.range_hi), noise, args.seed
        )
        stem = f"scenario_n{args.n}_S{args.S}_N{args.N}_seed{args.seed}"
    outdir = Path(args.output) if args.output is not None else Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    data_path = outdir / f"{stem}.csv"
    model_path = outdir / f"{stem}_model.json"
    save_dataset(data_path, data)
    save_model(model_path, model)
    print(f"wrote {data_path} ({data.N} samples, n={data.n}) and {model_path}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    data = load_dataset(args.data)
    cfg = SolverConfig(
        S=args.S,
        max_iters=args.max_iters,
        obj_tol=args.tol,
        restarts=args.restarts,
        seed=args.seed,
        keep_history=args.trace,
    )
    report = bcd_solve(data, cfg)
    _emit(args, _json(report.to_dict()), "fit.json")
    if args.trace:
        columns = ["iteration"]
        S, n = report.model.S, report.model.n
        columns += [f"theta{s}_{j}" for s in range(1, S + 1) for j in range(1, n + 1)]
        columns += ["zeta", "obj"]
        rows = []
        for rec in report.history or ():
            row = {"iteration": rec.iteration}
            for s in range(S):
                for j in range(n):
                    row[f"theta{s + 1}_{j + 1}"] = repr(float(rec.params[s, j]))
            row["zeta"] = " ".join(str(int(v)) for v in rec.labels)
            row["obj"] = repr(float(rec.objective))
            rows.append(row)
        _emit(args, _csv_text(columns, rows), "fit_trace.csv")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    data = load_dataset(args.data)
    optimum, classes = oracle_global(data, args.S, limit=args.limit)
    payload = {
        "optimum": optimum,
        "classes": [c.to_dict() for c in classes],
        "unique": oracle_unique(data, args.S, limit=args.limit),
    }
    _emit(args, _json(payload), "oracle.json")
    return EXIT_OK


def _cmd_pe_check(args) -> int:
    data = load_dataset(args.data)
    model = load_model(args.model)
    if data.truth is None:
        print("error: dataset has no zeta column to take labels from", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    report = pe_report(data, model, data.truth, tol=args.tol)
    _emit(args, _json(report.to_dict()), "pe_report.json")
    return EXIT_ENUM_LIMIT if report.undecided else EXIT_OK


def _cmd_min_samples(args) -> int:
    if args.table:
        table = min_samples_table(args.n, args.S)
        rows = [
            {
                "n": n,
                "S": S,
                "ours": counts.ours,
                "bako": counts.bako,
                "vidal": counts.vidal,
            }
            for (n, S), counts in sorted(table.items())
        ]
        _emit(args, _csv_text(["n", "S", "ours", "bako", "vidal"], rows), "min_samples.csv")
    else:
        payload = {
            "n": args.n,
            "S": args.S,
            "ours": min_samples_ours(args.n, args.S),
            "bako": min_samples_bako(args.n, args.S),
            "vidal": min_samples_vidal(args.n, args.S),
        }
        _emit(args, _json(payload), "min_samples.json")
    return EXIT_OK


def _cmd_select_order(args) -> int:
    data = load_dataset(args.data)
    penalty = "auto" if args.penalty == "auto" else float(args.penalty)
    cfg = OrderSelectConfig(
        S_bar=args.s_bar,
        penalty=penalty,
        solver=SolverConfig(S=1, restarts=args.restarts, seed=args.seed),
    )
    report = select_order(data, cfg)
    _emit(args, _json(report.to_dict()), "order.json")
    return EXIT_OK


def _cmd_consistency_sweep(args) -> int:
    scenario = SweepScenario(n=args.n, S=args.S, sigma=args.sigma)
    cfg = OrderSelectConfig(
        S_bar=args.s_bar,
        penalty="auto" if args.penalty == "auto" else float(args.penalty),
        solver=SolverConfig(S=1, restarts=args.restarts, seed=args.seed),
    )
    rows = consistency_sweep(scenario, args.N, args.trials, cfg, seed=args.seed)
    _emit(args, _csv_text(["N", "trials", "recovery_rate"], rows), "consistency.csv")
    return EXIT_OK


def _cmd_bench(args) -> int:
    specs = []
    for cell in args.cell:
        try:
            n, S, N = (int(v) for v in cell.split(","))
        except ValueError:
            print(f"error: malformed --cell {cell!r}, expected n,S,N", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        specs.append(
            bench.ScenarioSpec(
                n=n,
                S=S,
                N=N,
                sigma=args.sigma,
                repetitions=args.repetitions,
                restarts=args.restarts,
                seed=args.seed,
            )
        )
    results = bench.run_bench(specs)
    summary = [r.summary for r in results]
    raw = [row for r in results for row in r.raw]
    _emit(args, _csv_text(bench.SUMMARY_COLUMNS, summary), "bench_summary.csv")
    _emit(args, _csv_text(bench.RAW_COLUMNS, raw), "bench_raw.csv")
    return EXIT_OK


def _cmd_repro(args) -> int:
    mismatches = bench.repro(args.table_id)
    if mismatches:
        for line in mismatches:
            print(f"MISMATCH: {line}")
        print(f"{args.table_id}: {len(mismatches)} mismatch(es)")
        return EXIT_MISMATCH
    print(f"{args.table_id}: ok")
    return EXIT_OK


def build_parser(defaults: dict | None = None) -> argparse.ArgumentParser:
    """Build the CLI; ``defaults`` (from a config file) both pre-fills values
    and waives the requiredness of the options it covers."""
    defaults = defaults or {}
    parser = _Parser(prog="slsid", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--config",
        default=None,
        help="flat JSON file of option defaults; explicit flags win",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def need(dest: str) -> bool:
        return dest not in defaults

    def add_output(p):
        p.add_argument("--output", default=None, help="directory for output files")
        p.set_defaults(**defaults)

    p = sub.add_parser("simulate", help="write a dataset CSV and model JSON")
    p.add_argument("--example", type=int, choices=(1, 2), default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--S", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--range-lo", type=float, default=-5.0)
    p.add_argument("--range-hi", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    add_output(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="block-coordinate descent fit")
    p.add_argument("--data", required=need("data"))
    p.add_argument("--S", type=int, required=need("S"))
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--trace", action="store_true", help="emit per-iteration CSV")
    add_output(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("oracle", help="exhaustive global optimum on a small instance")
    p.add_argument("--data", required=need("data"))
    p.add_argument("--S", type=int, required=need("S"))
    p.add_argument("--limit", type=int, default=2_000_000)
    add_output(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("pe-check", help="excitation certificate for labeled data")
    p.add_argument("--data", required=need("data"))
    p.add_argument("--model", required=need("model"))
    p.add_argument("--labels", choices=("from-data",), default="from-data")
    p.add_argument("--tol", type=float, default=1e-10)
    add_output(p)
    p.set_defaults(func=_cmd_pe_check)

    p = sub.add_parser("min-samples", help="minimum sample counts")
    p.add_argument("--n", type=int, required=need("n"))
    p.add_argument("--S", type=int, required=need("S"))
    p.add_argument("--table", action="store_true", help="emit the full grid as CSV")
    add_output(p)
    p.set_defaults(func=_cmd_min_samples)

    p = sub.add_parser("select-order", help="penalized subsystem-count selection")
    p.add_argument("--data", required=need("data"))
    p.add_argument("--s-bar", type=int, required=need("s_bar"))
    p.add_argument("--penalty", "--lambda", dest="penalty", default="auto")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    add_output(p)
    p.set_defaults(func=_cmd_select_order)

    p = sub.add_parser("consistency-sweep", help="order-selection recovery vs N")
    p.add_argument("--n", type=int, required=need("n"))
    p.add_argument("--S", type=int, required=need("S"))
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--N", type=int, nargs="+", required=need("N"))
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--s-bar", type=int, required=need("s_bar"))
    p.add_argument("--penalty", "--lambda", dest="penalty", default="auto")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    add_output(p)
    p.set_defaults(func=_cmd_consistency_sweep)

    p = sub.add_parser("bench", help="Monte-Carlo sweep over scenario cells")
    p.add_argument(
        "--cell",
        action="append",
        required=need("cell"),
        metavar="n,S,N",
        help="repeatable scenario cell, e.g. --cell 2,2,500",
    )
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--repetitions", type=int, default=20)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    add_output(p)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("repro", help="regenerate a stored reference result")
    p.add_argument("table_id", choices=bench.REPRO_IDS)
    add_output(p)
    p.set_defaults(func=_cmd_repro)

    return parser


def _config_path(argv) -> str | None:
    for i, token in enumerate(argv):
        if token == "--config":
            return argv[i + 1] if i + 1 < len(argv) else None
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # precedence: explicit flags > config file > built-in defaults; the file
    # is located before parsing so its values can satisfy required options
    defaults = None
    config = _config_path(argv)
    if config is not None:
        try:
            defaults = json.loads(Path(config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if not isinstance(defaults, dict):
            print("error: config must be a flat JSON object", file=sys.stderr)
            return EXIT_USAGE
    parser = build_parser(defaults)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EnumerationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENUM_LIMIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
