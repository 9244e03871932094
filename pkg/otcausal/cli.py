"""Command-line entry point: ``otcausal <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from ._version import __version__
from .ci import omega_report
from .config import Settings, load_settings
from .discovery import run_pc_ot, select_ordering
from .errors import ConfigError, OtCausalError
from .graph import Dag, Pdag, essential_graph, from_json, serialize_graph, structural_metrics, to_dot
from .io import (
    ExperimentPlan,
    ResultTable,
    dot_comment,
    fingerprint,
    load_csv,
    run_experiment,
    save_csv,
    write_json,
)
from .sem import preset, sample
from .transport import TriangularMapSpec, fit_map

logger = logging.getLogger(__name__)

_SUMMARY_FIELDS = ("metric", "count", "mean", "median", "q25", "q75", "min", "max")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("variable numbers are 1-based")
    return values


def _gamma(text: str) -> float | tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a weight or comma-separated weights, got {text!r}") from e
    return values[0] if len(values) == 1 else values


def _invocation(args: argparse.Namespace, settings: Settings) -> dict[str, Any]:
    plan = {k: v for k, v in vars(args).items() if k not in ("func",) and v is not None}
    plan["settings"] = settings.to_dict()
    return plan


def _read_data(args: argparse.Namespace):
    dataset = load_csv(args.data, log_transform=args.log_transform)
    if getattr(args, "columns", None):
        columns = [c - 1 for c in args.columns]
        if max(columns) >= dataset.d:
            raise ConfigError(f"column {max(columns) + 1} does not exist; the file has {dataset.d} columns")
        dataset = dataset.select(columns)
    return dataset


def _read_graph(path: str) -> Dag | Pdag:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read graph file {path}: {e}") from e
    return from_json(text)


def cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    kwargs: dict[str, Any] = {}
    if args.rho is not None:
        kwargs["rho"] = args.rho
    if args.d is not None:
        kwargs["d"] = args.d
    if args.noise is not None:
        kwargs["noise"] = args.noise
    spec = preset(args.preset, **kwargs)
    values = sample(spec, args.n, seed=settings.seed)
    save_csv(args.out, values, spec.names)
    if args.model_out:
        write_json(args.model_out, {"model": spec.to_dict()}, _invocation(args, settings))
    print(f"Wrote {args.n} samples of {spec.d} variables to {args.out}")
    return 0


def cmd_fit(args: argparse.Namespace, settings: Settings) -> int:
    dataset = _read_data(args)
    spec = TriangularMapSpec.total_degree(dataset.d, settings.fit.degree, settings.fit.quadrature_order)
    columns = tuple(c - 1 for c in args.columns) if args.columns else None
    fitted = fit_map(spec, dataset.values, settings.fit, columns=columns)
    payload = {"names": list(dataset.names), "map": fitted.to_dict()}
    write_json(args.out, payload, _invocation(args, settings))
    diag = fitted.diagnostics
    status = "converged" if diag.converged else "not converged"
    print(f"Fitted degree-{settings.fit.degree} map on {dataset.n} samples: nll={diag.objective:.6g} ({status})")
    return 0


def cmd_citest(args: argparse.Namespace, settings: Settings) -> int:
    dataset = _read_data(args)
    subset = [v - 1 for v in args.subset]
    if max(subset) >= dataset.d:
        raise ConfigError(f"variable {max(subset) + 1} does not exist; the file has {dataset.d} columns")
    report = omega_report(dataset.values, subset, settings.fit, settings.ci)
    payload = {"names": [dataset.names[v] for v in report.subset], "report": report.to_dict()}
    if args.out:
        write_json(args.out, payload, _invocation(args, settings))
    for k, ell in report.pairs():
        verdict = "independent" if report.independent(k, ell) else "dependent"
        a, b = report.position(k), report.position(ell)
        print(
            f"{dataset.names[k]} ~ {dataset.names[ell]}: omega={report.omega[a, b]:.4g} "
            f"tau={report.tau[a, b]:.4g} -> {verdict}"
        )
    return 0


def cmd_pcot(args: argparse.Namespace, settings: Settings) -> int:
    dataset = _read_data(args)
    result = run_pc_ot(dataset.values, settings.pc_ot())
    labels = list(dataset.names)
    plan = _invocation(args, settings)
    out = Path(args.out)
    if out.suffix == ".dot":
        out.write_text(to_dot(result.cpdag, labels, comment=dot_comment(plan)), encoding="utf-8")
    else:
        payload = {
            "graph": serialize_graph(result.cpdag, labels),
            "sepsets": result.sepsets.to_dict(),
            "levels": result.levels,
            "failed_subsets": result.trace.count("failed"),
        }
        write_json(out, payload, plan)
    if args.trace:
        result.trace.write(args.trace)
    cpdag = result.cpdag
    print(
        f"PC-OT finished after {result.levels} levels: "
        f"{len(cpdag.directed)} directed, {len(cpdag.undirected)} undirected edges -> {out}"
    )
    return 0


def cmd_order_select(args: argparse.Namespace, settings: Settings) -> int:
    dataset = _read_data(args)
    graph = _read_graph(args.cpdag)
    cpdag = essential_graph(graph) if isinstance(graph, Dag) else graph
    selection = select_ordering(cpdag, dataset.values, kind=args.loss, gamma=args.gamma, opts=settings.order_options())
    plan = _invocation(args, settings)
    table = selection.table()
    payload = {
        "ordering": selection.ordering.label(),
        "dag": serialize_graph(selection.dag, list(dataset.names)),
        "scores": [score.to_dict() for score in selection.scores],
        "table": table,
    }
    write_json(args.out, payload, plan)
    if args.table:
        ResultTable(table, fingerprint=fingerprint(plan)).write_csv(args.table)
    for row in table:
        print(f"{row['rank']:>3}  {row['ordering']:<20} {row['total']:.6g}")
    print(f"Selected ordering {selection.ordering.label()}")
    return 0


def cmd_eval(args: argparse.Namespace, settings: Settings) -> int:
    estimate = _read_graph(args.estimate)
    if isinstance(estimate, Dag):
        estimate = Pdag.from_dag(estimate)
    if args.preset:
        truth: Dag | Pdag = preset(args.preset).dag
    else:
        truth = _read_graph(args.truth)
    if not isinstance(truth, Dag):
        raise ConfigError("the true graph must be a DAG")
    metrics = structural_metrics(estimate, truth).to_dict()
    if args.out:
        write_json(args.out, {"metrics": metrics}, _invocation(args, settings))
    print(json.dumps(metrics))
    return 0


def cmd_experiment(args: argparse.Namespace, settings: Settings) -> int:
    plan = ExperimentPlan.load(args.plan)
    if args.out_dir:
        plan = plan.with_outputs(args.out_dir)
    result = run_experiment(plan, settings)
    print(f"{plan.method}: {result.repetitions - result.failures}/{result.repetitions} repetitions succeeded")
    for row in result.summary.rows:
        if not row["count"]:
            continue
        group = " ".join(f"{k}={row[k]}" for k in row if k not in _SUMMARY_FIELDS)
        label = f"{group} {row['metric']}" if group else row["metric"]
        print(f"  {label}: mean={row['mean']:.4g} median={row['median']:.4g}")
    for path in plan.outputs.values():
        print(f"  -> {path}")
    return 1 if result.all_failed else 0


def _add_data_args(parser: argparse.ArgumentParser, columns: bool = True) -> None:
    parser.add_argument("--data", required=True, help="CSV file with a header row")
    parser.add_argument(
        "--log-transform",
        action="store_true",
        help="Apply the natural logarithm to every entry (all values must be positive)",
    )
    if columns:
        parser.add_argument("--columns", type=_int_list, help="1-based columns to use, e.g. 1,2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otcausal",
        description="Causal discovery with triangular transport maps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, help="Random seed (default: 0)")
    parser.add_argument("--workers", type=int, help="Worker threads (default: 1)")
    parser.add_argument("--config", help="JSON file with settings")
    parser.add_argument("--log-level", help="Logging level (default: WARNING)")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Sample a preset structural equation model")
    gen.add_argument("--preset", required=True, help="Preset model name")
    gen.add_argument("--n", type=int, required=True, help="Number of samples")
    gen.add_argument("--rho", type=float, help="Correlation of the linear_gaussian preset")
    gen.add_argument("--d", type=int, help="Variable count of the linear_gaussian_sem preset")
    gen.add_argument("--noise", choices=["gaussian", "gumbel"], help="Noise of the linear_gaussian_sem preset")
    gen.add_argument("--out", required=True, help="Output CSV")
    gen.add_argument("--model-out", help="Also write the model as JSON")
    gen.set_defaults(func=cmd_gen)

    fit = sub.add_parser("fit", help="Fit a triangular map")
    _add_data_args(fit)
    fit.add_argument("--degree", type=int, help="Total degree of the map (default: 2)")
    fit.add_argument("--out", required=True, help="Output JSON")
    fit.set_defaults(func=cmd_fit)

    citest = sub.add_parser("citest", help="Omega conditional-independence test on a subset")
    _add_data_args(citest, columns=False)
    citest.add_argument("--subset", type=_int_list, required=True, help="1-based variables, e.g. 1,2,3")
    citest.add_argument("--delta", type=float, help="Threshold multiplier (default: 2)")
    citest.add_argument("--degree", type=int, help="Total degree of the map (default: 2)")
    citest.add_argument("--out", help="Output JSON")
    citest.set_defaults(func=cmd_citest)

    pcot = sub.add_parser("pcot", help="Learn a CPDAG with PC-OT")
    _add_data_args(pcot)
    pcot.add_argument("--delta", type=float, help="Threshold multiplier (default: 2)")
    pcot.add_argument("--degree", type=int, help="Total degree of the maps (default: 2)")
    pcot.add_argument("--max-level", type=int, help="Highest conditioning level")
    pcot.add_argument("--out", required=True, help="Output graph (.json or .dot)")
    pcot.add_argument("--trace", help="Write the per-subset trace as JSON lines")
    pcot.set_defaults(func=cmd_pcot)

    order = sub.add_parser("order-select", help="Pick the best ordering of a CPDAG's equivalence class")
    _add_data_args(order)
    order.add_argument("--cpdag", required=True, help="Graph JSON (a DAG is replaced by its CPDAG)")
    order.add_argument("--loss", choices=["anm", "pnl"], default="anm", help="Loss (default: anm)")
    order.add_argument("--gamma", type=_gamma, help="Component weight or comma-separated weights")
    order.add_argument("--degree", type=int, help="Total degree of the maps (default: 2)")
    order.add_argument("--out", required=True, help="Output JSON")
    order.add_argument("--table", help="Also write the ordering table as CSV")
    order.set_defaults(func=cmd_order_select)

    ev = sub.add_parser("eval", help="Compare an estimated graph with the truth")
    ev.add_argument("--estimate", required=True, help="Estimated graph JSON")
    truth = ev.add_mutually_exclusive_group(required=True)
    truth.add_argument("--truth", help="True DAG JSON")
    truth.add_argument("--preset", help="Preset whose DAG is the truth")
    ev.add_argument("--out", help="Output JSON")
    ev.set_defaults(func=cmd_eval)

    exp = sub.add_parser("experiment", help="Run an experiment plan")
    exp.add_argument("--plan", required=True, help="Plan JSON")
    exp.add_argument("--out-dir", help="Directory for outputs the plan does not name")
    exp.set_defaults(func=cmd_experiment)

    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "seed": args.seed,
        "workers": args.workers,
        "log_level": args.log_level,
        "fit.degree": getattr(args, "degree", None),
        "ci.delta": getattr(args, "delta", None),
        "max_level": getattr(args, "max_level", None),
    }


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point; returns the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings(args.config, overrides=_overrides(args))
    except ConfigError as e:
        print(f"otcausal: {e}", file=sys.stderr)
        return 2

    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args, settings)
    except OtCausalError as e:
        print(f"otcausal: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
