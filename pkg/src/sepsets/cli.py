"""Command-line interface.

Subcommands: ``scores``, ``audit``, ``partition``, ``eval-dataset``,
and ``demo``. Inputs are JSON files (value table, sample space,
partition) or CSV datasets; the file kind is sniffed from its keys,
CSV from its extension. Every report embeds the tool version, the
tolerance in force, and a content hash of the input so results can be
tied back to exactly what produced them.

Exit codes: 0 on success, 1 on usage, parse, or validation errors,
3 when ``--fail-on-violation`` is set and an audit check failed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .axioms import (
    ELIMINATION_MAX_FEATURES,
    AxiomReport,
    check_elimination,
    check_empty_set,
    check_marginal_contribution,
    check_minimalism,
    check_monotonicity,
    check_symmetry,
    check_triviality,
    report_rows_markdown,
)
from .dataset_eval import DATASET_MAX_FEATURES, new_dataset, r2_value_table
from .errors import SepsetsError
from .importance import ALL_METHODS, ScoreMethod, score_vector
from .sample_space import (
    SampleSpace,
    check_importance_consistency,
    check_value_consistency,
    global_table,
    space_from_dict,
)
from .separability import (
    ORACLE_MAX_FEATURES,
    maximal_partition,
    maximal_partition_oracle,
    partition_to_dict,
    validate_partition,
)
from .scenarios import (
    ColliderParams,
    demo_collider,
    demo_mci_nonlinearity,
    demo_toy_separable,
    demo_twin_features,
    render_scenario_markdown,
)
from .subset_algebra import MAX_FEATURES, Tolerance, ValueTable, table_from_dict, table_to_dict

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_VIOLATION = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Exit code 1 for usage problems instead of argparse's default 2.
    def error(self, message: str) -> "typing.NoReturn":  # type: ignore[name-defined]
        raise _UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-9, help="absolute tolerance (default 1e-9)")
    p.add_argument(
        "--output",
        choices=("json", "markdown"),
        default="json",
        help="report format on stdout (default json)",
    )
    p.add_argument("--out", type=Path, default=None, help="also write the report to this file")


def _add_methods(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--method",
        action="append",
        choices=[m.value for m in ALL_METHODS],
        default=None,
        help="scoring rule; repeatable, defaults to all four",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sepsets", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sepsets {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scores = sub.add_parser("scores", help="importance scores of a table or CSV dataset")
    p_scores.add_argument("input", type=Path)
    p_scores.add_argument("--target", default=None, help="CSV target column name")
    p_scores.add_argument("--weight-col", default=None, help="CSV weight column name")
    p_scores.add_argument("--max-features", type=int, default=MAX_FEATURES)
    _add_methods(p_scores)
    _add_common(p_scores)
    p_scores.set_defaults(func=run_scores)

    p_audit = sub.add_parser("audit", help="axiom audit of a table or sample space")
    p_audit.add_argument("input", type=Path)
    p_audit.add_argument("--max-features", type=int, default=MAX_FEATURES)
    p_audit.add_argument(
        "--fail-on-violation",
        action="store_true",
        help="exit with code 3 when any check fails",
    )
    _add_methods(p_audit)
    _add_common(p_audit)
    p_audit.set_defaults(func=run_audit)

    p_part = sub.add_parser("partition", help="maximal separable partition of a table")
    p_part.add_argument("input", type=Path)
    p_part.add_argument("--max-features", type=int, default=MAX_FEATURES)
    p_part.add_argument(
        "--with-oracle",
        action="store_true",
        help=f"cross-check against exhaustive enumeration (n <= {ORACLE_MAX_FEATURES})",
    )
    p_part.add_argument(
        "--partition-out", type=Path, default=None, help="write the partition file here"
    )
    _add_common(p_part)
    p_part.set_defaults(func=run_partition)

    p_eval = sub.add_parser("eval-dataset", help="derive a value table from a CSV dataset")
    p_eval.add_argument("input", type=Path)
    p_eval.add_argument("--target", required=True, help="target column name")
    p_eval.add_argument("--weight-col", default=None, help="weight column name")
    p_eval.add_argument("--max-features", type=int, default=DATASET_MAX_FEATURES)
    p_eval.add_argument(
        "--table-out", type=Path, required=True, help="write the value-table file here"
    )
    _add_common(p_eval)
    p_eval.set_defaults(func=run_eval_dataset)

    p_demo = sub.add_parser("demo", help="run a built-in scenario")
    p_demo.add_argument(
        "name",
        choices=("mci-nonlinearity", "twin-features", "collider", "toy-separable"),
    )
    p_demo.add_argument("--p-smoke", type=float, default=None)
    p_demo.add_argument("--p-earache", type=float, default=None)
    p_demo.add_argument("--p-gum-00", type=float, default=None, help="P(gum | no smoke, no earache)")
    p_demo.add_argument("--p-gum-01", type=float, default=None, help="P(gum | no smoke, earache)")
    p_demo.add_argument("--p-gum-10", type=float, default=None, help="P(gum | smoke, no earache)")
    p_demo.add_argument("--p-gum-11", type=float, default=None, help="P(gum | smoke, earache)")
    p_demo.add_argument("--p-cancer-0", type=float, default=None, help="P(cancer | no smoke)")
    p_demo.add_argument("--p-cancer-1", type=float, default=None, help="P(cancer | smoke)")
    _add_common(p_demo)
    p_demo.set_defaults(func=run_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(
            f"error: {args.input}: JSON parse error at line {exc.lineno} "
            f"column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return _EXIT_USAGE
    except (_UsageError, SepsetsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE


def console_main() -> None:
    sys.exit(main())


# ---------------------------------------------------------------- input handling


def _read_json(path: Path) -> tuple[dict, str]:
    raw = path.read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    return json.loads(raw.decode("utf-8")), digest


def _sniff(payload: dict) -> str:
    if not isinstance(payload, dict):
        raise _UsageError("input JSON must be an object")
    if "values" in payload:
        return "table"
    if "instances" in payload:
        return "space"
    if "blocks" in payload:
        return "partition"
    raise _UsageError(
        'unrecognized input: expected keys "values" (table), "instances" '
        '(sample space), or "blocks" (partition)'
    )


def _load_csv(
    path: Path, target: str, weight_col: str | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None, list[str], float]:
    """CSV rows to arrays. Malformed cells are reported by coordinate."""
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise _UsageError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    if target not in header:
        raise _UsageError(f"{path}: no column named {target!r}; columns are {header}")
    if weight_col is not None and weight_col not in header:
        raise _UsageError(f"{path}: no column named {weight_col!r}; columns are {header}")
    feature_names = [h for h in header if h != target and h != weight_col]
    if not feature_names:
        raise _UsageError(f"{path}: no feature columns remain")

    def parse(cell: str, row_no: int, col_name: str) -> float:
        try:
            return float(cell)
        except ValueError:
            raise _UsageError(
                f"{path}: row {row_no}, column {col_name!r}: "
                f"could not parse {cell.strip()!r} as a number"
            ) from None

    t_idx = header.index(target)
    w_idx = header.index(weight_col) if weight_col is not None else None
    f_idx = [header.index(name) for name in feature_names]
    X, y, w = [], [], []
    for row_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise _UsageError(
                f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}"
            )
        X.append([parse(row[i], row_no, header[i]) for i in f_idx])
        y.append(parse(row[t_idx], row_no, target))
        if w_idx is not None:
            w.append(parse(row[w_idx], row_no, weight_col))
    weights = np.array(w) if w_idx is not None else None
    raw_sum = float(weights.sum()) if weights is not None else 1.0
    return np.array(X), np.array(y), weights, feature_names, raw_sum


def _table_from_input(args) -> tuple[ValueTable, str, dict]:
    """A value table from either a JSON table file or a CSV dataset."""
    extras: dict = {}
    if args.input.suffix.lower() == ".csv":
        if args.target is None:
            raise _UsageError("CSV input needs --target")
        X, y, w, names, raw_sum = _load_csv(args.input, args.target, args.weight_col)
        digest = hashlib.sha256(args.input.read_bytes()).hexdigest()
        data = new_dataset(X, y, w)
        table = r2_value_table(data, max_features=min(args.max_features, DATASET_MAX_FEATURES))
        extras["features"] = names
        if w is not None and abs(raw_sum - 1.0) > 1e-12:
            extras["notes"] = [f"weight column summed to {raw_sum:.12g}; weights normalized"]
        return table, digest, extras
    payload, digest = _read_json(args.input)
    kind = _sniff(payload)
    if kind != "table":
        raise _UsageError(f"expected a value table or CSV dataset, got a {kind} file")
    return table_from_dict(payload, max_features=args.max_features), digest, extras


def _methods(args) -> list[ScoreMethod]:
    if args.method is None:
        return list(ALL_METHODS)
    seen = []
    for name in args.method:
        m = ScoreMethod.parse(name)
        if m not in seen:
            seen.append(m)
    return seen


def _emit(args, command: str, digest: str | None, report: dict, markdown: str) -> None:
    envelope = {
        "tool": "sepsets",
        "version": __version__,
        "command": command,
        "tolerance": args.tol,
        "input_sha256": digest,
        "report": report,
    }
    if args.output == "json":
        text = json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    else:
        head = [
            f"# sepsets {command}",
            "",
            f"- version: {__version__}",
            f"- tolerance: {args.tol:.12g}",
        ]
        if digest is not None:
            head.append(f"- input sha256: {digest}")
        text = "\n".join(head) + "\n\n" + markdown
    sys.stdout.write(text)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")


def _tol(args) -> Tolerance:
    return Tolerance(args.tol)


# ---------------------------------------------------------------- subcommands


def run_scores(args) -> int:
    table, digest, extras = _table_from_input(args)
    _tol(args)  # validates the flag even though scoring itself needs no tolerance
    methods = _methods(args)
    per_method: dict = {}
    for m in methods:
        vec = score_vector(m, table)
        entry: dict = {"scores": [float(x) for x in vec.scores]}
        if vec.witnesses is not None:
            entry["witness_contexts"] = list(vec.witnesses)
        per_method[m.value] = entry
    report = {"n": table.n, **extras, "methods": per_method}

    lines = ["| feature | " + " | ".join(m.value for m in methods) + " |"]
    lines.append("| --- |" + " --- |" * len(methods))
    for f in range(table.n):
        cells = " | ".join(f"{per_method[m.value]['scores'][f]:.12g}" for m in methods)
        lines.append(f"| {f} | {cells} |")
    _emit(args, "scores", digest, report, "\n".join(lines) + "\n")
    return _EXIT_OK


def _audit_table_rows(
    table: ValueTable, label: str, methods: list[ScoreMethod], tol: Tolerance
) -> tuple[list[tuple[str, AxiomReport]], list[str]]:
    rows: list[tuple[str, AxiomReport]] = []
    notes: list[str] = []
    rows.append((f"empty_set_value[{label}]", check_empty_set(table, tol)))
    rows.append((f"monotonicity[{label}]", check_monotonicity(table, tol)))
    for m in methods:
        v = score_vector(m, table)
        rows.append((f"triviality[{label},{m.value}]", check_triviality(table, v, tol)))
        rows.append(
            (
                f"marginal_contribution[{label},{m.value}]",
                check_marginal_contribution(table, v, tol),
            )
        )
        rows.append((f"minimalism[{label},{m.value}]", check_minimalism(table, v, tol)))
        for variant in ("z_pair", "z_empty"):
            rows.append(
                (
                    f"symmetry[{label},{m.value},{variant}]",
                    check_symmetry(table, v, variant, tol),
                )
            )
        if table.n <= ELIMINATION_MAX_FEATURES:
            rows.append((f"elimination[{label},{m.value}]", check_elimination(m, table, tol)))
        else:
            notes.append(
                f"elimination[{label},{m.value}] skipped: n={table.n} exceeds "
                f"cap {ELIMINATION_MAX_FEATURES}"
            )
    return rows, notes


def run_audit(args) -> int:
    payload_kind: str
    rows: list[tuple[str, AxiomReport]] = []
    notes: list[str] = []
    tol = _tol(args)
    methods = _methods(args)

    if args.input.suffix.lower() == ".csv":
        raise _UsageError("audit expects a value-table or sample-space JSON file")
    payload, digest = _read_json(args.input)
    payload_kind = _sniff(payload)
    if payload_kind == "table":
        table = table_from_dict(payload, max_features=args.max_features)
        t_rows, t_notes = _audit_table_rows(table, "table", methods, tol)
        rows += t_rows
        notes += t_notes
    elif payload_kind == "space":
        space: SampleSpace = space_from_dict(payload)
        mean = global_table(space)
        rows.append(("value_consistency[global]", check_value_consistency(space, mean, tol)))
        notes.append(
            "value consistency compares the aggregated global table against itself; "
            "it fails only for an externally supplied claim"
        )
        for m in methods:
            rows.append(
                (f"importance_consistency[{m.value}]", check_importance_consistency(space, m, tol))
            )
        t_rows, t_notes = _audit_table_rows(mean, "global", methods, tol)
        rows += t_rows
        notes += t_notes
    else:
        raise _UsageError(f"audit expects a value table or sample space, got a {payload_kind} file")

    violations = [label for label, rep in rows if not rep.passed]
    report = {
        "checks": [{"check": label, **rep.to_dict()} for label, rep in rows],
        "violations": violations,
        "notes": notes,
    }
    _emit(args, "audit", digest, report, report_rows_markdown(rows))
    if violations and args.fail_on_violation:
        return _EXIT_VIOLATION
    return _EXIT_OK


def run_partition(args) -> int:
    if args.input.suffix.lower() == ".csv":
        raise _UsageError("partition expects a value-table JSON file")
    payload, digest = _read_json(args.input)
    if _sniff(payload) != "table":
        raise _UsageError("partition expects a value-table JSON file")
    table = table_from_dict(payload, max_features=args.max_features)
    tol = _tol(args)
    partition = maximal_partition(table, tol)
    block_reports = validate_partition(table, partition, tol)
    report = {
        "partition": partition_to_dict(partition),
        "block_reports": [
            {
                "block": list(rep_block),
                "separable": rep.separable,
                "worst_context": rep.worst_T,
                "worst_residual": rep.worst_residual,
            }
            for rep_block, rep in zip(partition.block_indices(), block_reports)
        ],
    }
    if args.with_oracle:
        if table.n > ORACLE_MAX_FEATURES:
            raise _UsageError(
                f"--with-oracle is capped at {ORACLE_MAX_FEATURES} features, got n={table.n}"
            )
        oracle = maximal_partition_oracle(table, tol)
        agrees = oracle.blocks == partition.blocks
        report["oracle"] = {"blocks": partition_to_dict(oracle)["blocks"], "agrees": agrees}
        if not agrees:
            print(
                f"error: oracle disagreement: fast {partition.block_indices()} "
                f"vs exhaustive {oracle.block_indices()}",
                file=sys.stderr,
            )
            return _EXIT_USAGE
    if args.partition_out is not None:
        args.partition_out.write_text(
            json.dumps(partition_to_dict(partition), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )

    lines = ["| block | separable | worst context | worst residual |", "| --- | --- | --- | --- |"]
    for entry in report["block_reports"]:
        lines.append(
            f"| {entry['block']} | {'yes' if entry['separable'] else 'NO'} "
            f"| {entry['worst_context']} | {entry['worst_residual']:.12g} |"
        )
    _emit(args, "partition", digest, report, "\n".join(lines) + "\n")
    return _EXIT_OK


def run_eval_dataset(args) -> int:
    if args.input.suffix.lower() != ".csv":
        raise _UsageError("eval-dataset expects a CSV file")
    X, y, w, names, raw_sum = _load_csv(args.input, args.target, args.weight_col)
    digest = hashlib.sha256(args.input.read_bytes()).hexdigest()
    data = new_dataset(X, y, w)
    table = r2_value_table(data, max_features=args.max_features)
    _tol(args)
    notes = []
    if w is not None and abs(raw_sum - 1.0) > 1e-12:
        notes.append(f"weight column summed to {raw_sum:.12g}; weights normalized")
    args.table_out.write_text(
        json.dumps(table_to_dict(table), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    report = {
        "rows": data.m,
        "n": table.n,
        "features": names,
        "empty_set_value": float(table.values[0]),
        "full_set_value": float(table.values[table.full_mask]),
        "table_file": str(args.table_out),
        "notes": notes,
    }
    lines = [
        f"- rows: {data.m}",
        f"- features: {', '.join(names)}",
        f"- full-set value: {report['full_set_value']:.12g}",
        f"- table written to: {args.table_out}",
    ]
    lines += [f"- note: {n}" for n in notes]
    _emit(args, "eval-dataset", digest, report, "\n".join(lines) + "\n")
    return _EXIT_OK


def run_demo(args) -> int:
    tol = _tol(args)
    if args.name == "mci-nonlinearity":
        report = demo_mci_nonlinearity(tol)
    elif args.name == "twin-features":
        report = demo_twin_features(tol)
    elif args.name == "toy-separable":
        report = demo_toy_separable(tol)
    else:
        defaults = ColliderParams()
        gum = [
            [
                args.p_gum_00 if args.p_gum_00 is not None else defaults.p_gum[0][0],
                args.p_gum_01 if args.p_gum_01 is not None else defaults.p_gum[0][1],
            ],
            [
                args.p_gum_10 if args.p_gum_10 is not None else defaults.p_gum[1][0],
                args.p_gum_11 if args.p_gum_11 is not None else defaults.p_gum[1][1],
            ],
        ]
        params = ColliderParams(
            p_smoke=args.p_smoke if args.p_smoke is not None else defaults.p_smoke,
            p_earache=args.p_earache if args.p_earache is not None else defaults.p_earache,
            p_gum=(tuple(gum[0]), tuple(gum[1])),
            p_cancer=(
                args.p_cancer_0 if args.p_cancer_0 is not None else defaults.p_cancer[0],
                args.p_cancer_1 if args.p_cancer_1 is not None else defaults.p_cancer[1],
            ),
        )
        report = demo_collider(params, tol)
    digest = hashlib.sha256(
        json.dumps(report.inputs, sort_keys=True).encode("utf-8")
    ).hexdigest()
    _emit(args, f"demo {args.name}", digest, report.to_dict(), render_scenario_markdown(report))
    return _EXIT_OK
