"""Structured input documents and canonical report serialization.

Every input is a JSON object ``{"kind": ..., "payload": {...}}`` checked
against the shipped schema (``data/input.schema.json``) before any module
object is built. Output is JSON with sorted keys, so identical inputs give
byte-identical reports.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any

import jsonschema

from .abgroup import AbMap, FgAbGroup, GroupExpr, IntMatrix, Presentation, ValidationError
from .classgroups import resolve_backend
from .exactseq import BoundaryData, MiddleBracket
from .grouprings import (
    CyclotomicBase,
    DedekindBase,
    FiniteGroupTable,
    GroupRingSpec,
    IntegersBase,
    base_from_name,
    group_from_name,
)
from .orders import CurveSpec, DedekindSpec, DVRSpec, OrderSpec

KINDS = ("order", "groupring", "bracket", "boundary", "algebra", "classgroup-query", "matrix")


class SchemaError(ValueError):
    """An input document does not match the schema; ``location`` is a JSON path."""

    def __init__(self, message: str, location: str):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


@lru_cache(maxsize=1)
def schema() -> dict:
    text = resources.files("ttchow").joinpath("data/input.schema.json").read_text()
    return json.loads(text)


def _location(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def _deepest(err: jsonschema.ValidationError) -> jsonschema.ValidationError:
    # oneOf/anyOf failures bury the useful message in their context; a branch
    # whose discriminator ("type", "backend", ...) fails a const, or whose root
    # has the wrong JSON type, is the wrong branch
    while err.context:
        branches: dict[int, list] = {}
        for e in err.context:
            branches.setdefault(e.relative_schema_path[0], []).append(e)

        def wrong(e, at=err.absolute_path):
            return e.validator == "const" or (e.validator == "type" and e.absolute_path == at)

        live = [es for es in branches.values() if not any(wrong(e) for e in es)]
        # a branch that rejects the object's own keys is a worse fit than one that does not
        fits = [es for es in live if not any(e.validator == "additionalProperties" for e in es)]
        pool = [e for es in (fits or live or branches.values()) for e in es]
        err = max(pool, key=lambda e: (len(e.absolute_path), e.validator == "additionalProperties"))
    return err


def validate_document(doc: Any) -> dict:
    validator = jsonschema.Draft202012Validator(schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = _deepest(min(errors, key=lambda e: -len(e.absolute_path)))
        raise SchemaError(err.message, _location(err))
    return doc


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# --- payload -> module objects ----------------------------------------------


def parse_group(data: dict) -> GroupExpr:
    if "backend" in data:
        return resolve_backend(data)
    return GroupExpr.from_dict(data)


def group_to_dict(g: FgAbGroup | GroupExpr) -> dict:
    return GroupExpr.of(g).to_dict()


def parse_matrix(rows: list, nrows: int | None = None, ncols: int | None = None) -> IntMatrix:
    """Nested row lists; ``[]`` stands for a matrix with no rows or no columns."""
    if not rows or all(len(r) == 0 for r in rows):
        return IntMatrix.zeros(nrows if nrows is not None else len(rows), ncols or 0)
    m = IntMatrix.from_rows(rows)
    if (nrows is not None and m.rows != nrows) or (ncols is not None and m.cols != ncols):
        raise ValidationError(f"matrix is {m.rows}x{m.cols}, expected {nrows}x{ncols}")
    return m


def matrix_to_rows(m: IntMatrix) -> list[list[int]]:
    return m.to_rows()


def parse_presentation(data: dict) -> Presentation:
    n = data["generators"]
    rel = data.get("relations", [])
    if not rel or all(len(r) == 0 for r in rel):
        return Presentation(n)
    return Presentation(n, parse_matrix(rel, nrows=n))


def parse_map(data: dict) -> AbMap:
    dom = parse_presentation(data["domain"])
    cod = parse_presentation(data["codomain"])
    return AbMap(dom, cod, parse_matrix(data["matrix"], cod.generators, dom.generators))


def parse_order(p: dict) -> OrderSpec:
    b = p["base"]
    if b["type"] == "curve":
        kw = {k: b[k] for k in ("field_kind", "proper") if k in b}
        if "pic" in b:
            kw["pic"] = parse_group(b["pic"])
        base = CurveSpec(b["name"], **kw)
    elif b["type"] == "dedekind":
        cl = parse_group(b["class_group"]) if "class_group" in b else None
        base = DedekindSpec(b["name"], cl)
    else:
        base = DVRSpec(b.get("name", "R"), b.get("complete", True))
    mcg = p.get("maximal_class_group")
    return OrderSpec(
        base=base,
        csa_degree=p["csa_degree"],
        unramified=p.get("unramified", False),
        split=p.get("split", False),
        hereditary=p.get("hereditary", True),
        maximal=p.get("maximal", False),
        local_types={k: tuple(v) for k, v in p.get("local_types", {}).items()},
        maximal_class_group=parse_group(mcg) if mcg is not None else None,
    )


def parse_group_spec(g) -> FiniteGroupTable:
    if isinstance(g, str):
        return group_from_name(g)
    try:
        return FiniteGroupTable(g["table"], g.get("identity", 0), g.get("name"))
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def parse_ring(r) -> object:
    if isinstance(r, str):
        return base_from_name(r)
    if r["type"] == "integers":
        return IntegersBase()
    if r["type"] == "cyclotomic":
        return CyclotomicBase(r["p"])
    cl = parse_group(r["class_group"]) if "class_group" in r else None
    return DedekindBase(r["name"], frozenset(r.get("invertible_primes", ())), cl)


def parse_groupring(p: dict) -> GroupRingSpec:
    return GroupRingSpec(parse_group_spec(p["group"]), parse_ring(p.get("ring", "Z")))


def parse_bracket(p: dict) -> MiddleBracket:
    return MiddleBracket(parse_map(p["iota"]), parse_map(p["pi"]), p.get("idempotent_complete"))


def parse_boundary(p: dict) -> BoundaryData:
    return BoundaryData(parse_map(p["k1_boundary"]))


def parse_algebra(p: dict):
    from . import algebra_lab

    char = p["characteristic"]
    if "builtin" in p:
        return builtin_algebra(p["builtin"], char)
    return algebra_lab.StructAlgebra(char, p["structure_constants"], p["unit"], p.get("name", "A"))


def builtin_algebra(name: str, p: int):
    """``matrix:k``, ``upper:k``, ``fields:m``, ``truncated:n``, ``dual``,
    ``gf:k``, ``auslander:nodal|cuspidal`` or ``group:<group name>``."""
    from . import algebra_lab as al

    kind, _, arg = name.partition(":")
    try:
        if kind == "dual" and not arg:
            return al.dual_numbers(p)
        if kind == "auslander":
            return al.auslander_fiber(arg, p)
        if kind == "group":
            return al.group_algebra(group_from_name(arg), p)
        makers = {
            "matrix": al.matrix_algebra,
            "upper": al.upper_triangular,
            "fields": al.field_product,
            "truncated": al.truncated_polynomials,
            "gf": lambda k, q: al.finite_field(q, k),
        }
        if kind in makers:
            return makers[kind](int(arg), p)
    except ValueError as exc:
        raise ValidationError(f"bad builtin algebra {name!r}: {exc}") from None
    raise ValidationError(f"unknown builtin algebra {name!r}")


PARSERS = {
    "order": parse_order,
    "groupring": parse_groupring,
    "bracket": parse_bracket,
    "boundary": parse_boundary,
    "algebra": parse_algebra,
    "matrix": lambda p: parse_matrix(p["matrix"]),
    "classgroup-query": lambda p: dict(p),
}


def parse_document(doc: Any):
    """Validate and build the module object; returns ``(kind, object)``."""
    validate_document(doc)
    kind = doc["kind"]
    return kind, PARSERS[kind](doc["payload"])


def load_document(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
