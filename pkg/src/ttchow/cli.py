"""Command-line front end.

Each subcommand builds one report: a JSON object with the echoed input, the
result, the theorem trace, warnings and (optionally) a timestamp. Failures
produce a report with ``status: "error"`` and a stable error code, and the
process exits with the code's status.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from typing import Any, Callable

from . import algebra_lab, classgroups, exactseq, grouprings, orders
from .abgroup import AbMap, GroupExpr, IntMatrix, Presentation, ValidationError, cokernel, is_surjective, smith_normal_form
from .formats import (
    SchemaError,
    builtin_algebra,
    canonical_json,
    group_to_dict,
    load_document,
    parse_document,
    parse_group_spec,
    parse_matrix,
    parse_ring,
    validate_document,
)
from .traces import Derivation

COMMANDS = ("chow", "cycle", "k0", "groupring", "classgroup", "snf", "oracle", "check", "batch")

# stable error codes and their exit statuses
EXIT_CODES = {
    "E_USAGE": 2,
    "E_PARSE": 3,
    "E_SCHEMA": 4,
    "E_VALIDATION": 5,
    "E_NO_THEOREM": 6,
    "E_NOT_EXACT": 7,
    "E_TOO_LARGE": 8,
    "E_INTERNAL": 70,
}


class CliError(Exception):
    def __init__(self, code: str, message: str, location: str | None = None, data: dict | None = None):
        super().__init__(message)
        self.code = code
        self.location = location
        self.data = data or {}

    def to_dict(self) -> dict:
        d = {"code": self.code, "message": str(self)}
        if self.location is not None:
            d["location"] = self.location
        d.update(self.data)
        return d


def classify(exc: BaseException) -> CliError:
    """Map a module exception to its error code."""
    if isinstance(exc, CliError):
        return exc
    if isinstance(exc, SchemaError):
        return CliError("E_SCHEMA", str(exc), exc.location)
    if isinstance(exc, exactseq.NotExactError):
        return CliError("E_NOT_EXACT", str(exc), data={"witness": list(exc.witness)})
    if isinstance(exc, algebra_lab.OracleTooLarge):
        return CliError("E_TOO_LARGE", str(exc))
    if isinstance(exc, orders.OrderError):
        return CliError("E_NO_THEOREM", str(exc))
    if isinstance(exc, ValidationError):
        return CliError("E_VALIDATION", str(exc))
    if isinstance(exc, json.JSONDecodeError):
        return CliError("E_PARSE", f"invalid JSON: {exc}")
    if isinstance(exc, OSError):
        return CliError("E_PARSE", f"cannot read input: {exc}")
    return CliError("E_INTERNAL", f"{type(exc).__name__}: {exc}")


# --- evaluation ---------------------------------------------------------------


def _document(args: dict, base_dir: str = ".") -> dict:
    if args.get("document") is not None:
        return args["document"]
    path = args.get("input")
    if path is None:
        raise CliError("E_USAGE", "an input document is required (--input FILE)")
    return load_document(os.path.join(base_dir, path))


def _parsed(args: dict, base_dir: str, allowed: tuple[str, ...]):
    doc = _document(args, base_dir)
    kind, obj = parse_document(doc)
    if kind not in allowed:
        raise CliError("E_SCHEMA", f"input kind {kind!r} not accepted here (expected {', '.join(allowed)})", "/kind")
    return doc, kind, obj


def _need_dim(args: dict) -> int:
    if args.get("dim") is None:
        raise CliError("E_USAGE", "--dim is required")
    return int(args["dim"])


def _groupring_derivation(spec: grouprings.GroupRingSpec, dim: int) -> Derivation:
    if dim < 0:
        raise ValidationError(f"negative dimension {dim}")
    if dim == 0:
        return grouprings.derive_ch0_group_ring(spec)
    if dim == 1:
        return grouprings.derive_ch1_group_ring(spec)
    return Derivation(GroupExpr(), ("cycles.vanishing",))


def _group_result(d: Derivation) -> dict:
    return {"result": group_to_dict(d.value), "theorem_trace": d.trace, "warnings": list(d.warnings)}


def run_chow(args: dict, base_dir: str) -> dict:
    doc, kind, obj = _parsed(args, base_dir, ("order", "bracket", "boundary", "groupring"))
    if kind == "order":
        d = orders.derive_chow_group(obj, _need_dim(args))
    elif kind == "groupring":
        d = _groupring_derivation(obj, _need_dim(args))
    elif kind == "bracket":
        d = exactseq.derive_chow_from_bracket(obj, verify=bool(args.get("verify")))
    else:
        d = exactseq.derive_chow_from_cokernel(obj)
    return {"document": doc, **_group_result(d)}


def run_cycle(args: dict, base_dir: str) -> dict:
    doc, _, obj = _parsed(args, base_dir, ("order",))
    return {"document": doc, **_group_result(orders.derive_cycle_group(obj, _need_dim(args)))}


def run_k0(args: dict, base_dir: str) -> dict:
    doc, kind, obj = _parsed(args, base_dir, ("order", "algebra"))
    if kind == "order":
        return {"document": doc, **_group_result(orders.derive_k0_decomposition(obj))}
    d = algebra_lab.derive_count_simples(obj, args.get("guard"))
    value = GroupExpr(d.value)
    return {
        "document": doc,
        **_group_result(Derivation(value, (*d.rules, "algebra.devissage"), d.warnings)),
    }


def run_groupring(args: dict, base_dir: str) -> dict:
    if args.get("group") is not None:
        spec = grouprings.GroupRingSpec(parse_group_spec(args["group"]), parse_ring(args.get("ring") or "Z"))
        doc = None
    else:
        doc, _, spec = _parsed(args, base_dir, ("groupring",))
    out = _group_result(_groupring_derivation(spec, _need_dim(args)))
    out["details"] = {"group_order": spec.group.order, "ring": str(spec.base)}
    return {"document": doc, **out}


def run_classgroup(args: dict, base_dir: str) -> dict:
    doc = None
    query = {k: args[k] for k in ("disc", "cyclotomic") if args.get(k) is not None}
    if not query:
        doc, _, query = _parsed(args, base_dir, ("classgroup-query",))
    if len(query) != 1:
        raise CliError("E_USAGE", "give exactly one of --disc and --cyclotomic")
    if "disc" in query:
        disc = int(query["disc"])
        forms = classgroups.reduced_forms(disc)
        d = Derivation(GroupExpr.of(classgroups.form_class_group(disc)), ("classgroups.forms",))
        details = {"class_number": len(forms), "forms": [[f.a, f.b, f.c] for f in forms]}
    else:
        p = int(query["cyclotomic"])
        value = classgroups.cyclotomic_class_group(p)
        warnings = () if value.is_resolved() else (f"Cl(Z[zeta_{p}]) is outside the shipped table",)
        d = Derivation(value, ("classgroups.cyclotomic",), warnings)
        details = {}
    return {"document": doc, **_group_result(d), "details": details}


def _matrix_from(args: dict, base_dir: str) -> tuple[Any, IntMatrix]:
    if args.get("document") is not None or args.get("matrix") is None:
        doc, _, m = _parsed(args, base_dir, ("matrix",))
        return doc, m
    raw = load_document(os.path.join(base_dir, args["matrix"]))
    if isinstance(raw, dict):
        validate_document(raw)
        if raw["kind"] != "matrix":
            raise CliError("E_SCHEMA", f"input kind {raw['kind']!r} not accepted here (expected matrix)", "/kind")
        return raw, parse_matrix(raw["payload"]["matrix"])
    doc = {"kind": "matrix", "payload": {"matrix": raw}}
    validate_document(doc)
    return doc, parse_matrix(raw)


def run_snf(args: dict, base_dir: str) -> dict:
    doc, m = _matrix_from(args, base_dir)
    u, s, v = smith_normal_form(m)
    diagonal = [s[i, i] for i in range(min(s.rows, s.cols))]
    coker = cokernel(AbMap(Presentation(m.cols), Presentation(m.rows), m))
    return {
        "document": doc,
        "result": {"u": u.to_rows(), "s": s.to_rows(), "v": v.to_rows()},
        "theorem_trace": Derivation(None, ("snf", "abgroup.cokernel")).trace,
        "warnings": [],
        "details": {"diagonal": diagonal, "cokernel": group_to_dict(coker)},
    }


def run_oracle(args: dict, base_dir: str) -> dict:
    guard = args.get("guard")
    if args.get("wedderburn") is not None:
        n = int(args["wedderburn"])
        factors = algebra_lab.cyclic_wedderburn_oracle(n)
        classes = grouprings.cyclic_subgroup_classes(grouprings.cyclic_group(n))
        warnings = [] if factors == classes else [f"oracle {factors} differs from subgroup count {classes}"]
        return {
            "document": None,
            "result": group_to_dict(GroupExpr(factors)),
            "theorem_trace": Derivation(None, ("algebra.wedderburn_cyclic", "grouprings.cyclic_subgroups")).trace,
            "warnings": warnings,
            "details": {"wedderburn_factors": factors, "cyclic_subgroup_classes": classes},
        }
    if args.get("builtin") is not None:
        if args.get("char") is None:
            raise CliError("E_USAGE", "--builtin needs --char")
        doc = {"kind": "algebra", "payload": {"builtin": args["builtin"], "characteristic": int(args["char"])}}
        validate_document(doc)
        alg = builtin_algebra(args["builtin"], int(args["char"]))
    else:
        doc, _, alg = _parsed(args, base_dir, ("algebra",))
    alg.check_guard(guard)
    radical = algebra_lab.jacobson_radical(alg, guard)
    d = algebra_lab.derive_count_simples(alg, guard)
    warnings = list(d.warnings)
    if str(doc["payload"].get("builtin", "")).startswith("auslander:"):
        warnings.append("finite-dimensional proxy: the fibre A/mA of the Auslander order, which has the same simples")
    return {
        "document": doc,
        "result": group_to_dict(GroupExpr(d.value)),
        "theorem_trace": Derivation(None, (*d.rules, "algebra.devissage")).trace,
        "warnings": warnings,
        "details": {
            "characteristic": alg.p,
            "dimension": alg.dim,
            "radical_dimension": int(radical.shape[0]),
            "simples": d.value,
        },
    }


def run_check(args: dict, base_dir: str) -> dict:
    doc, _, b = _parsed(args, base_dir, ("bracket",))
    d = exactseq.derive_chow_from_bracket(b, verify=True)
    surjective = is_surjective(b.pi)
    warnings = list(d.warnings)
    rules = list(d.rules)
    if b.idempotent_complete is not None:
        rules.append("exactseq.surjective")
        if b.idempotent_complete != surjective:
            warnings.append(
                f"idempotent_complete={str(b.idempotent_complete).lower()} but pi is "
                f"{'' if surjective else 'not '}surjective"
            )
    return {
        "document": doc,
        "result": group_to_dict(d.value),
        "theorem_trace": Derivation(None, tuple(rules)).trace,
        "warnings": warnings,
        "details": {"exact": True, "pi_surjective": surjective, "kernel_of_pi": group_to_dict(exactseq.kernel_of_pi(b))},
    }


RUNNERS: dict[str, Callable[[dict, str], dict]] = {
    "chow": run_chow,
    "cycle": run_cycle,
    "k0": run_k0,
    "groupring": run_groupring,
    "classgroup": run_classgroup,
    "snf": run_snf,
    "oracle": run_oracle,
    "check": run_check,
}

# argument keys that are echoed into a report (paths and output options are not)
ECHO_KEYS = ("dim", "group", "ring", "disc", "cyclotomic", "builtin", "char", "wedderburn", "guard", "verify")


def execute(command: str, args: dict, base_dir: str = ".") -> dict:
    """Run one subcommand and return its report (without timestamp); never raises."""
    echo = {k: args[k] for k in ECHO_KEYS if args.get(k) not in (None, False)}
    report: dict[str, Any] = {"command": command, "input": {"args": echo}}
    try:
        if command not in RUNNERS:
            raise CliError("E_USAGE", f"unknown command {command!r}")
        out = RUNNERS[command](args, base_dir)
    except Exception as exc:  # every failure becomes a structured error entry
        err = classify(exc)
        report.update(status="error", error=err.to_dict())
        if args.get("document") is not None:
            report["input"]["document"] = args["document"]
        return report
    report["input"]["document"] = out.pop("document")
    report.update(status="ok", **out)
    return report


# --- batch ------------------------------------------------------------------

BATCH_KEYS = frozenset(("command", "input", "document", "matrix", *ECHO_KEYS))


def _batch_item(item: Any, base_dir: str) -> dict:
    if not isinstance(item, dict) or "command" not in item:
        return {
            "command": None,
            "input": {"args": {}},
            "status": "error",
            "error": CliError("E_SCHEMA", "batch item must be an object with a command", "/").to_dict(),
        }
    unknown = sorted(set(item) - BATCH_KEYS)
    if unknown:
        return {
            "command": item["command"],
            "input": {"args": {}},
            "status": "error",
            "error": CliError("E_SCHEMA", f"unknown batch item fields {unknown}", f"/{unknown[0]}").to_dict(),
        }
    if item["command"] == "batch":
        return {
            "command": "batch",
            "input": {"args": {}},
            "status": "error",
            "error": CliError("E_USAGE", "batches do not nest").to_dict(),
        }
    return execute(item["command"], item, base_dir)


def run_batch(path: str, jobs: int = 1) -> dict:
    """Evaluate every item of a run list; item failures are reported, not raised."""
    raw = load_document(path)
    items = raw.get("items") if isinstance(raw, dict) else raw
    if not isinstance(items, list):
        raise CliError("E_SCHEMA", "run list must be a list or an object with an 'items' list", "/items")
    base_dir = os.path.dirname(os.path.abspath(path))
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda it: _batch_item(it, base_dir), items))
    else:
        reports = [_batch_item(it, base_dir) for it in items]
    for i, r in enumerate(reports):
        r["index"] = i
    failed = sum(r["status"] != "ok" for r in reports)
    return {
        "command": "batch",
        "status": "ok",
        "items": reports,
        "summary": {"total": len(reports), "ok": len(reports) - failed, "failed": failed},
    }


# --- output -------------------------------------------------------------------

TSV_COLUMNS = ("index", "command", "status", "result", "rank", "torsion", "symbols", "error_code")


def _tsv_row(i: int, r: dict) -> list[str]:
    res = r.get("result")
    text = rank = torsion = symbols = ""
    if isinstance(res, dict) and "rank" in res:
        g = GroupExpr.from_dict(res)
        text, rank = str(g), str(g.free_rank)
        torsion = ",".join(map(str, g.torsion))
        symbols = ";".join(str(s) for s in g.symbols)
    elif isinstance(res, dict) and "s" in res:
        text = ",".join(map(str, r["details"]["diagonal"]))
    code = r.get("error", {}).get("code", "")
    return [str(i), str(r.get("command") or ""), r["status"], text, rank, torsion, symbols, code]


def render_tsv(report: dict) -> str:
    rows = report["items"] if report.get("command") == "batch" and "items" in report else [report]
    lines = ["\t".join(TSV_COLUMNS)]
    lines += ["\t".join(_tsv_row(i, r)) for i, r in enumerate(rows)]
    return "\n".join(lines) + "\n"


def render_text(report: dict) -> str:
    if report.get("command") == "batch" and "items" in report:
        return "".join(f"[{r['index']}] " + render_text(r) for r in report["items"]) or "empty batch\n"
    if report["status"] != "ok":
        e = report["error"]
        loc = f" at {e['location']}" if "location" in e else ""
        return f"{report.get('command')}: error {e['code']}{loc}: {e['message']}\n"
    res = report["result"]
    if "rank" in res:
        shown = str(GroupExpr.from_dict(res))
    else:
        shown = "S = diag(" + ", ".join(map(str, report["details"]["diagonal"])) + ")"
    lines = [f"{report['command']}: {shown}"]
    lines += [f"  by: {t}" for t in report.get("theorem_trace", [])]
    lines += [f"  warning: {w}" for w in report.get("warnings", [])]
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "tsv":
        return render_tsv(report)
    if fmt == "text":
        return render_text(report)
    return canonical_json(report)


def write_figures(report: dict, directory: str) -> list[str]:
    from . import plotting

    written = []
    if report.get("command") == "batch" and "items" in report:
        names, groups = [], []
        for r in report["items"]:
            names.append(f"{r['index']}:{r.get('command')}")
            res = r.get("result")
            groups.append(GroupExpr.from_dict(res) if r["status"] == "ok" and "rank" in res else None)
        written.append(plotting.plot_batch(names, groups, os.path.join(directory, "batch.png")))
        return written
    if report["status"] != "ok" or "rank" not in report["result"]:
        return written
    g = GroupExpr.from_dict(report["result"])
    name = report["command"]
    written.append(plotting.plot_group(g, os.path.join(directory, f"{name}.png"), f"{name}: {g}"))
    forms = report.get("details", {}).get("forms")
    if forms:
        disc = report["input"]["args"].get("disc")
        if disc is None:
            disc = report["input"]["document"]["payload"]["disc"]
        written.append(plotting.plot_forms(forms, disc, os.path.join(directory, f"forms_{abs(disc)}.png")))
    return written


# --- argument parsing ---------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError("E_USAGE", message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "tsv", "text"), default="json", help="output format")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    common.add_argument("--figures", metavar="DIR", help="also render figures into DIR")

    parser = _Parser(prog="ttchow", description="Chow and K_0 groups of orders and group rings.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    for name in ("chow", "cycle"):
        p = add(name, "CH_dim of an order, bracket, boundary or group ring" if name == "chow" else "Z_dim of an order")
        p.add_argument("--dim", type=int)
        p.add_argument("--input", metavar="FILE")
        if name == "chow":
            p.add_argument("--verify", action="store_true", help="check exactness of a bracket first")

    p = add("k0", "K_0 decomposition of an hereditary order, or K_0 of a finite algebra")
    p.add_argument("--input", metavar="FILE", required=True)
    p.add_argument("--guard", type=int)

    p = add("groupring", "CH_dim of a group ring R G")
    p.add_argument("--group", metavar="NAME", help="cyclic:n, klein4, sym:k or dihedral:n")
    p.add_argument("--ring", metavar="SPEC", default=None, help="Z (default) or Z[zeta_p]")
    p.add_argument("--dim", type=int)
    p.add_argument("--input", metavar="FILE")

    p = add("classgroup", "class groups of imaginary quadratic fields and Z[zeta_p]")
    p.add_argument("--disc", type=int)
    p.add_argument("--cyclotomic", type=int, metavar="P")
    p.add_argument("--input", metavar="FILE")

    p = add("snf", "Smith normal form U M V = S of an integer matrix")
    p.add_argument("--matrix", metavar="FILE", required=True)

    p = add("oracle", "brute-force simple-module count of a finite algebra")
    p.add_argument("--input", metavar="FILE")
    p.add_argument("--builtin", metavar="NAME", help="matrix:k, upper:k, fields:m, dual, gf:k, ...")
    p.add_argument("--char", type=int, metavar="P")
    p.add_argument("--wedderburn", type=int, metavar="N", help="compare Q Cyc_N factor counts")
    p.add_argument("--guard", type=int, help=f"max field size p^d (default {algebra_lab.DEFAULT_GUARD})")

    p = add("check", "verify exactness of a bracket and report its Chow group")
    p.add_argument("--input", metavar="FILE", required=True)

    p = add("batch", "evaluate a run list of subcommand items")
    p.add_argument("--input", metavar="FILE", required=True)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _stamp(report: dict, no_timestamp: bool) -> dict:
    if not no_timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return report


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(argv)
        if ns.command is None:
            raise CliError("E_USAGE", "a subcommand is required: " + ", ".join(COMMANDS))
    except CliError as err:
        report = {"command": None, "status": "error", "error": err.to_dict()}
        sys.stdout.write(canonical_json(report))
        print(f"ttchow: {err}", file=sys.stderr)
        return EXIT_CODES[err.code]

    args = vars(ns)
    if ns.command == "batch":
        try:
            report = run_batch(ns.input, max(1, ns.jobs))
        except Exception as exc:
            err = classify(exc)
            report = {"command": "batch", "status": "error", "error": err.to_dict()}
    else:
        report = execute(ns.command, args)
    _stamp(report, ns.no_timestamp)

    if ns.figures and report["status"] == "ok":
        try:
            write_figures(report, ns.figures)
        except OSError as exc:
            print(f"ttchow: cannot write figures: {exc}", file=sys.stderr)

    sys.stdout.write(render(report, ns.format))
    if report["status"] != "ok":
        err = report["error"]
        print(f"ttchow: {err['code']}: {err['message']}", file=sys.stderr)
        return EXIT_CODES[err["code"]]
    return 0


if __name__ == "__main__":
    sys.exit(main())
