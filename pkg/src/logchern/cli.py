"""Command-line front end.

    logchern analyze  --input dual_hesse_conic --xi 1-8 --xi none --xi 9-20
    logchern sample   --input triangle --prime 7 --seed 0
    logchern converge --input triangle --primes 1000-100000 --count 24
    logchern badset   --primes 2-10000

``--input`` is a JSON file or a builtin name such as ``generic_lines(5)``.
Exit status: 0 on success, 2 for unusable input, 1 when a consistency
check fails during the computation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import catalog
from .arrangement import (
    ArrangementSpec,
    ExtensionChoice,
    InvalidArrangement,
    InvalidChoice,
    check_choice,
    classify,
    fiber_stats,
    is_removable,
    load_spec,
    num_blowups,
    tau,
    validate,
)
from .invariants import check_inequalities, format_ratio, log_chern_extended, render_table, table_rows
from .numtheory import census, is_prime, primes_in, spaced_primes
from .resolution import build_resolution, to_dot
from .surface import IntegralityError, MultiplicityError, NoSolution, chern_of_X, classify_nodes, assign_multiplicities, converge, sample_solution

CONVERGE_COLUMNS = ("p", "seed", "good", "c1sq", "c2", "ratio", "CCF", "LCF")
BADSET_COLUMNS = ("p", "size", "bound", "within_bound", "max_l", "max_12s")
TABLE_COLUMNS = ("xi", "c1sq", "c2", "ratio", "decimal")


class UsageError(Exception):
    pass


def load_input(name: str) -> ArrangementSpec:
    path = Path(name)
    if path.is_file():
        try:
            spec = load_spec(path)
        except (TypeError, AttributeError) as exc:
            raise UsageError(f"{path}: malformed arrangement: {exc}") from None
        report = validate(spec)
        if not report.ok:
            raise InvalidArrangement(report)
        return spec
    try:
        return catalog.builtin(name)
    except KeyError:
        raise UsageError(f"{name!r} is neither a file nor a builtin ({', '.join(catalog.BUILTIN_NAMES)})") from None


def parse_xi(text: str) -> ExtensionChoice:
    """'none' or '' is the empty set; otherwise comma-separated indices or ranges a-b / Fa..Fb."""
    text = text.strip().strip("{}").replace("F", "").replace("..", "-")
    if text.lower() in ("", "none", "empty"):
        return ExtensionChoice()
    out: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                a, b = (int(v) for v in part.split("-", 1))
                if b < a:
                    raise UsageError(f"empty range {part!r}")
                out.update(range(a, b + 1))
            else:
                out.add(int(part))
        except ValueError:
            raise UsageError(f"cannot read fiber list {text!r}") from None
    return ExtensionChoice.of(out)


def parse_primes(text: str, count: int | None = None) -> list[int]:
    """'p', 'p,q,...' or 'lo-hi' (primes in range; ``count`` of them spaced geometrically)."""
    text = text.strip()
    if not text:
        return []
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-", 1))
            return spaced_primes(lo, hi, count) if count else primes_in(lo, hi)
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot read primes from {text!r}") from None
    return [v for v in values if is_prime(v)]


def _workers(flag: int | None) -> int:
    if flag is not None:
        return max(flag, 1)
    try:
        return max(int(os.environ.get("LOGCHERN_WORKERS", "1")), 1)
    except ValueError:
        return 1


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _jsonable(v) if not isinstance(v, list) else " ".join(map(str, v)) for k, v in row.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def analyze_report(spec: ArrangementSpec, choices: Sequence[ExtensionChoice]) -> dict:
    for c in choices:
        check_choice(spec, c)
    ext = log_chern_extended(spec)
    fibers = []
    for j in range(1, spec.delta + 1):
        k_o, k = fiber_stats(spec, j)
        fibers.append({"fiber": j, "k_o": k_o, "k": k, "removable": is_removable(spec, j)})
    inequalities = []
    for c in choices or [ExtensionChoice()]:
        for chk in check_inequalities(spec, c):
            inequalities.append(
                {
                    "xi": c.label() if c.removed else "{}",
                    "name": chk.name,
                    "holds": chk.holds,
                    "lhs": chk.lhs,
                    "rhs": chk.rhs,
                    "applicable": chk.applicable,
                    "note": chk.note,
                }
            )
    return {
        "label": spec.label,
        "genus": spec.genus,
        "degree": spec.degree,
        "d": spec.num_sections,
        "delta": spec.delta,
        "char_p": spec.char_p,
        "class": classify(spec).value,
        "tau": tau(spec),
        "blowups": num_blowups(spec),
        "fibers": fibers,
        "extended": {"c1sq": ext.c1sq, "c2": ext.c2, "ratio": ext.ratio, "decimal": format_ratio(ext.ratio)},
        "table": table_rows(spec, choices),
        "inequalities": inequalities,
    }


def cmd_analyze(args: argparse.Namespace) -> str:
    spec = load_input(args.input)
    choices = [parse_xi(x) for x in args.xi] if args.xi else []
    report = analyze_report(spec, choices)
    if args.format == "json":
        return json.dumps(_jsonable(report), indent=1) + "\n"
    if args.format == "csv":
        rows = report["table"] or table_rows(spec, [ExtensionChoice()])
        return _csv(TABLE_COLUMNS, [{**r, "xi": r["label"] if r["xi"] else "{}"} for r in rows])
    if args.format == "dot":
        return to_dot(build_resolution(spec, choices[0] if choices else None))
    lines = [
        f"arrangement {spec.label or args.input}: g={spec.genus} e={spec.degree} d={spec.num_sections} "
        f"delta={spec.delta} tau={report['tau']} class={report['class']}"
        + (f" char={spec.char_p}" if spec.char_p else ""),
        "fibers (k_o, k): " + " ".join(f"F{f['fiber']}({f['k_o']},{f['k']}){'' if f['removable'] else '*'}" for f in report["fibers"]),
        f"extended: c1^2={report['extended']['c1sq']} c2={report['extended']['c2']} "
        f"ratio={report['extended']['ratio']} = {report['extended']['decimal']}",
    ]
    if choices:
        lines += ["", render_table(spec, choices)]
    lines.append("")
    for row in report["inequalities"]:
        if row["applicable"]:
            status = "ok" if row["holds"] else "VIOLATED"
        else:
            status = "holds" if row["holds"] else "fails"
            status += f" (n/a: {row['note']})"
        lines.append(f"{row['xi']:>10}  {row['name']:<32} {status}")
    return "\n".join(lines) + "\n"


def _sample_record(spec: ArrangementSpec, choice: ExtensionChoice, p: int, seed: int, detail: bool) -> dict:
    sol = sample_solution(spec, choice, p, seed)
    inv = chern_of_X(spec, choice, sol)
    record = {
        "p": p,
        "seed": seed,
        "xi": list(choice.sorted()),
        "x": list(sol.x),
        "y": list(sol.y),
        "x_last": sol.x_last,
        "c1sq": inv.c1sq,
        "c2": inv.c2,
        "ratio": inv.ratio,
        "CCF": inv.ccf,
        "LCF": inv.lcf,
        "good": inv.good,
        "bad_nodes": inv.bad_nodes,
        "nodes": inv.num_nodes,
        "log_c1sq": inv.log_chern.c1sq,
        "log_c2": inv.log_chern.c2,
    }
    if detail:
        graph = build_resolution(spec, choice, minimal=True)
        nodes = classify_nodes(graph, assign_multiplicities(graph, sol))
        record["node_list"] = [
            {"a": n.a.label, "b": n.b.label, "nu_a": n.nu_a, "nu_b": n.nu_b, "type": n.type.value, "count": n.count} for n in nodes
        ]
    return record


def cmd_sample(args: argparse.Namespace) -> str:
    spec = load_input(args.input)
    choice = parse_xi(args.xi[0]) if args.xi else ExtensionChoice()
    if len(args.xi or []) > 1:
        raise UsageError("sample takes a single --xi")
    record = _sample_record(spec, choice, args.prime, args.seed, args.detail)
    if args.format == "csv":
        return _csv(list(k for k in record if k != "node_list"), [record])
    if args.format == "json":
        return json.dumps(_jsonable(record), indent=1) + "\n"
    out = [f"{k} = {_jsonable(v)}" for k, v in record.items() if k != "node_list"]
    for n in record.get("node_list", []):
        out.append(f"  {n['type']:>3} {n['a']} - {n['b']} nu=({n['nu_a']},{n['nu_b']}) x{n['count']}")
    return "\n".join(out) + "\n"


def cmd_converge(args: argparse.Namespace) -> str:
    spec = load_input(args.input)
    choice = parse_xi(args.xi[0]) if args.xi else ExtensionChoice()
    primes = parse_primes(args.primes, args.count)
    rows = converge(spec, choice, primes, seed=args.seed, retries=args.retries, workers=_workers(args.workers))
    records = [
        {"p": r.p, "seed": r.seed, "good": r.good, "c1sq": r.c1sq, "c2": r.c2, "ratio": r.ratio, "CCF": r.ccf, "LCF": r.lcf, "error": r.error}
        for r in rows
    ]
    if args.format == "json":
        return json.dumps(_jsonable(records), indent=1) + "\n"
    if args.format == "table":
        lines = [f"{'p':>8} {'good':>5} {'c1^2':>10} {'c2':>10} ratio"]
        for r in rows:
            ratio = "-" if r.ratio is None else format_ratio(r.ratio)
            lines.append(f"{r.p:>8} {str(r.good):>5} {r.c1sq!s:>10} {r.c2!s:>10} {ratio}")
        return "\n".join(lines) + "\n"
    return _csv(CONVERGE_COLUMNS, records)


def cmd_badset(args: argparse.Namespace) -> str:
    if args.prime is not None:
        if not is_prime(args.prime):
            raise UsageError(f"{args.prime} is not prime")
        primes = [args.prime]
    else:
        primes = parse_primes(args.primes or "")
    rows = [
        {"p": r.p, "size": r.size, "bound": f"{r.bound:.4f}", "within_bound": r.ok, "max_l": r.max_l, "max_12s": r.max_12s}
        for r in census(primes, workers=_workers(args.workers))
    ]
    if args.format == "json":
        return json.dumps(_jsonable(rows), indent=1) + "\n"
    if args.format == "table":
        lines = [f"{'p':>8} {'|F|':>6} {'bound':>10} ok"]
        lines += [f"{r['p']:>8} {r['size']:>6} {r['bound']:>10} {r['within_bound']}" for r in rows]
        return "\n".join(lines) + "\n"
    return _csv(BADSET_COLUMNS, rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="logchern", description="Log Chern numbers of arrangements of sections and their root covers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, formats: Sequence[str], default: str) -> None:
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--out", help="write here instead of stdout")

    a = sub.add_parser("analyze", help="invariants, log Chern table and inequality report")
    a.add_argument("--input", required=True, help="JSON file or builtin name")
    a.add_argument("--xi", action="append", help="removed fibers, e.g. 9-20 or 1,3,5 or none; repeat for a table")
    common(a, ("table", "json", "csv", "dot"), "table")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sample", help="Chern numbers of one random root cover")
    s.add_argument("--input", required=True)
    s.add_argument("--xi", action="append")
    s.add_argument("--prime", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--detail", action="store_true", help="include every node")
    common(s, ("table", "json", "csv"), "table")
    s.set_defaults(func=cmd_sample)

    c = sub.add_parser("converge", help="ratio sweep over primes, CSV")
    c.add_argument("--input", required=True)
    c.add_argument("--xi", action="append")
    c.add_argument("--primes", "--prime", dest="primes", required=True, help="p, p,q,... or lo-hi")
    c.add_argument("--count", type=int, help="use this many geometrically spaced primes from the range")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--retries", type=int, default=64)
    c.add_argument("--workers", type=int)
    common(c, ("csv", "json", "table"), "csv")
    c.set_defaults(func=cmd_converge)

    b = sub.add_parser("badset", help="bad-set census, CSV")
    group = b.add_mutually_exclusive_group(required=True)
    group.add_argument("--prime", type=int)
    group.add_argument("--primes")
    b.add_argument("--workers", type=int)
    common(b, ("csv", "json", "table"), "csv")
    b.set_defaults(func=cmd_badset)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except InvalidArrangement as exc:
        print("invalid arrangement:", file=sys.stderr)
        for issue in exc.report.issues:
            print(f"  {issue}", file=sys.stderr)
        return 2
    except (IntegralityError, MultiplicityError, AssertionError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (UsageError, InvalidChoice, NoSolution, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
