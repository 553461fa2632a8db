"""Cycle, Chow and K_0 groups of orders over one-dimensional bases.

An order is described declaratively by :class:`OrderSpec`: its base (a
curve, the spectrum of a Dedekind domain, or a complete DVR), the degree of
its generic central simple algebra, a few flags, and the block type of the
order at each point where it is not maximal. The functions below evaluate
the structure theorems for hereditary orders on these data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

from .abgroup import FgAbGroup, GroupExpr, ValidationError, direct_sum, invert_integer
from .classgroups import class_group_of_matrix_order
from .traces import Derivation

__all__ = [
    "OrderError",
    "HereditaryLocalType",
    "CurveSpec",
    "DedekindSpec",
    "DVRSpec",
    "OrderSpec",
    "local_type",
    "chain_length_rho",
    "cycle_group",
    "dvr_cycle_group",
    "chow_group",
    "k0_decomposition",
    "derive_cycle_group",
    "derive_chow_group",
    "derive_k0_decomposition",
]

CLOSED_POINTS = "Z^(X_0)"
MAXIMAL_CL = "Cl(Abar)"
MAXIMAL_K0 = "K0(Abar)"


class OrderError(ValueError):
    """No structure theorem applies to the given order."""


@dataclass(frozen=True)
class HereditaryLocalType:
    """Block sizes ``(n_1, ..., n_r)`` of an hereditary order at one point."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        if not self.blocks:
            raise ValidationError("a local type needs at least one block")
        if any(b < 1 for b in self.blocks):
            raise ValidationError(f"block sizes must be positive: {self.blocks}")

    @property
    def type(self) -> int:
        return len(self.blocks)

    @property
    def degree(self) -> int:
        return sum(self.blocks)


@dataclass(frozen=True)
class CurveSpec:
    name: str
    field_kind: str = "general"
    proper: bool = True
    pic: GroupExpr = field(default_factory=lambda: GroupExpr.symbol("Pic(C)"))

    def __post_init__(self):
        if self.field_kind not in ("algebraically_closed", "general"):
            raise ValidationError(f"unknown field kind {self.field_kind!r}")
        object.__setattr__(self, "pic", GroupExpr.of(self.pic))

    @classmethod
    def projective_line(cls, field_kind: str = "algebraically_closed") -> CurveSpec:
        return cls("P1", field_kind, True, GroupExpr(1))


@dataclass(frozen=True)
class DedekindSpec:
    """Spectrum of a Dedekind domain ``R``; ``class_group`` is Cl(R) if known."""

    name: str
    class_group: GroupExpr | None = None

    def __post_init__(self):
        if self.class_group is not None:
            object.__setattr__(self, "class_group", GroupExpr.of(self.class_group))


@dataclass(frozen=True)
class DVRSpec:
    name: str = "R"
    complete: bool = True


Base = Union[CurveSpec, DedekindSpec, DVRSpec]


@dataclass(frozen=True)
class OrderSpec:
    base: Base
    csa_degree: int
    unramified: bool = False
    split: bool = False
    hereditary: bool = True
    maximal: bool = False
    local_types: Mapping[str, HereditaryLocalType] = field(default_factory=dict)
    maximal_class_group: GroupExpr | None = None

    def __post_init__(self):
        if self.csa_degree < 1:
            raise ValidationError(f"csa_degree must be positive, got {self.csa_degree}")
        types = {
            str(k): v if isinstance(v, HereditaryLocalType) else HereditaryLocalType(tuple(v))
            for k, v in dict(self.local_types).items()
        }
        object.__setattr__(self, "local_types", types)
        if self.maximal_class_group is not None:
            object.__setattr__(self, "maximal_class_group", GroupExpr.of(self.maximal_class_group))
        if self.maximal and not self.hereditary:
            raise ValidationError("a maximal order is hereditary")
        if self.split and not self.unramified:
            raise ValidationError("a split algebra is unramified")
        for point, t in types.items():
            if t.degree != self.csa_degree:
                raise ValidationError(
                    f"local type at {point} has blocks summing to {t.degree}, "
                    f"expected csa_degree {self.csa_degree}"
                )
            if self.maximal and t.type != 1:
                raise ValidationError(f"maximal order has type {t.type} at {point}")
        if isinstance(self.base, DVRSpec) and len(types) > 1:
            raise ValidationError("a DVR has a single closed point")

    @property
    def is_curve(self) -> bool:
        return isinstance(self.base, CurveSpec)


def local_type(t: HereditaryLocalType) -> int:
    return t.type


def _require_hereditary(o: OrderSpec):
    if not o.hereditary:
        raise OrderError("no structure theorem available; supply explicit K0 data to exactseq")


def chain_length_rho(o: OrderSpec) -> int:
    """Sum over the listed points of ``type - 1``."""
    if not o.hereditary:
        raise OrderError("chain length undefined for non-hereditary order")
    return sum(t.type - 1 for t in o.local_types.values())


def dvr_cycle_group(t: HereditaryLocalType) -> FgAbGroup:
    return FgAbGroup.free(t.type)


def _dvr_type(o: OrderSpec) -> HereditaryLocalType:
    if o.local_types:
        return next(iter(o.local_types.values()))
    return HereditaryLocalType((o.csa_degree,))


def derive_cycle_group(o: OrderSpec, dim: int) -> Derivation:
    if dim < 0:
        raise ValidationError(f"negative dimension {dim}")
    if dim > 1:
        return Derivation(GroupExpr(), ("cycles.vanishing",))
    if dim == 1:
        return Derivation(GroupExpr(1), ("cycles.top",))
    _require_hereditary(o)
    if isinstance(o.base, DVRSpec):
        return Derivation(
            GroupExpr.of(dvr_cycle_group(_dvr_type(o))), ("cycles.dvr_type", "orders.type")
        )
    # one copy of Z per closed point, plus r_p - 1 more at each non-maximal point
    value = GroupExpr(chain_length_rho(o), symbols=(CLOSED_POINTS,))
    return Derivation(value, ("cycles.simples", "orders.type", "orders.chain_length"))


def cycle_group(o: OrderSpec, dim: int) -> GroupExpr:
    return derive_cycle_group(o, dim).value


def _maximal_class_group(o: OrderSpec) -> tuple[GroupExpr, list[str], list[str]]:
    """Cl of a maximal order containing ``o``, with rules and warnings used."""
    if isinstance(o.base, DVRSpec):
        return GroupExpr(), ["orders.local_maximal_cl"], []
    if o.maximal_class_group is not None:
        return o.maximal_class_group, ["orders.cl_maximal"], []
    if o.split:
        if isinstance(o.base, CurveSpec):
            return o.base.pic, ["orders.chow_matrix", "classgroups.morita"], []
        if o.base.class_group is not None:
            return class_group_of_matrix_order(o.base.class_group, o.csa_degree), ["classgroups.morita"], []
    return GroupExpr.symbol(MAXIMAL_CL), [], ["class group of the maximal order is unresolved"]


def derive_chow_group(o: OrderSpec, dim: int) -> Derivation:
    if dim < 0:
        raise ValidationError(f"negative dimension {dim}")
    _require_hereditary(o)
    if dim > 1:
        return Derivation(GroupExpr(), ("cycles.vanishing",))
    if dim == 1:
        return Derivation(GroupExpr(1), ("orders.chow_top",))

    rho = chain_length_rho(o)
    free = GroupExpr(rho)
    base = o.base

    if isinstance(base, CurveSpec):
        matrix_case = o.split or base.field_kind == "algebraically_closed"
        if matrix_case:
            warnings = []
            if not o.split:
                warnings.append("algebraically closed base field: the algebra is split (Tsen)")
            if o.maximal_class_group is not None and o.maximal_class_group != base.pic:
                warnings.append("declared maximal_class_group differs from Pic(C); Pic(C) used")
            return Derivation(
                direct_sum(base.pic, free),
                ("orders.chow_curve", "orders.chow_matrix", "orders.chain_length"),
                tuple(warnings),
            )
        # a declared Cl(Abar) makes the general theorem exact, so it wins over the Azumaya bound
        if o.unramified and o.maximal_class_group is None:
            n = o.csa_degree
            value = invert_integer(direct_sum(base.pic, free), n)
            return Derivation(
                value,
                ("orders.chow_curve", "orders.chow_azumaya", "orders.chain_length"),
                (f"isomorphism holds only after inverting {n}",),
            )
        cl, rules, warnings = _maximal_class_group(o)
        return Derivation(
            direct_sum(cl, free),
            ("orders.chow_curve", *rules, "orders.chain_length"),
            tuple(warnings),
        )

    cl, rules, warnings = _maximal_class_group(o)
    return Derivation(
        direct_sum(cl, free),
        ("orders.chow_dedekind", *rules, "orders.chain_length"),
        tuple(warnings),
    )


def chow_group(o: OrderSpec, dim: int) -> GroupExpr:
    """CH_dim of an hereditary order, as far as the structure theorems resolve it."""
    return derive_chow_group(o, dim).value


def derive_k0_decomposition(o: OrderSpec) -> Derivation:
    _require_hereditary(o)
    free = GroupExpr(chain_length_rho(o))
    rules = ["orders.k0_decomposition", "orders.chain_length"]
    base = o.base
    if isinstance(base, CurveSpec) and (o.split or base.field_kind == "algebraically_closed"):
        k0_max = direct_sum(base.pic, GroupExpr(1))
        rules.insert(1, "orders.k0_matrix")
    elif isinstance(base, DVRSpec):
        k0_max = GroupExpr(1)
        rules.insert(1, "orders.local_maximal_cl")
    else:
        cl, cl_rules, _ = _maximal_class_group(o)
        if cl.is_resolved():
            # K_0(Abar) -> K_0(A) = Z is split with kernel Cl(Abar)
            k0_max = direct_sum(cl, GroupExpr(1))
            rules[1:1] = cl_rules
        else:
            k0_max = GroupExpr.symbol(MAXIMAL_K0)
    return Derivation(direct_sum(k0_max, free), tuple(rules))


def k0_decomposition(o: OrderSpec) -> GroupExpr:
    """K_0 of an hereditary order as K_0(maximal order) + Z^rho."""
    return derive_k0_decomposition(o).value
