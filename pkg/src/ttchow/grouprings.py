"""Chow groups of group rings R G over Dedekind domains of characteristic zero.

CH_1 counts the simple Artin-Wedderburn factors of K G; over Q this is
the number of conjugacy classes of cyclic subgroups of G. CH_0 is the
class group Cl(R G), which is resolved only where a closed answer is
known and kept symbolic otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from sympy import factorint, isprime, totient
from sympy.ntheory import divisors

from .abgroup import FgAbGroup, GroupExpr, ValidationError
from .classgroups import cyclotomic_class_group
from .traces import Derivation

__all__ = [
    "FiniteGroupTable",
    "IntegersBase",
    "CyclotomicBase",
    "DedekindBase",
    "GroupRingSpec",
    "cyclic_group",
    "klein_four",
    "symmetric_group",
    "dihedral_group",
    "group_from_name",
    "conjugacy_classes",
    "cyclic_subgroups",
    "cyclic_subgroup_classes",
    "ch1_group_ring",
    "ch0_group_ring",
    "is_maximal_group_ring",
    "derive_ch1_group_ring",
    "derive_ch0_group_ring",
]

# Cl(ZG) = 0 exactly for these abelian groups (cyclic orders; plus Klein four)
VANISHING_CYCLIC_ORDERS = frozenset(range(1, 12)) | {13, 14, 17, 19}


class FiniteGroupTable:
    """A finite group given by its multiplication table ``mult[a][b] = a*b``."""

    def __init__(self, mult, identity: int = 0, name: str | None = None, validate: bool = True):
        table = np.asarray(mult, dtype=np.int64)
        n = table.shape[0] if table.ndim == 2 else -1
        if table.ndim != 2 or table.shape != (n, n) or n == 0:
            raise ValidationError("multiplication table must be a nonempty square array")
        self.order = n
        self.mult = table
        self.identity = int(identity)
        self.name = name
        if validate:
            self._validate()
        self.mult.setflags(write=False)

    def _validate(self):
        n, m, e = self.order, self.mult, self.identity
        if not 0 <= e < n:
            raise ValidationError(f"identity index {e} out of range")
        if m.min() < 0 or m.max() >= n:
            raise ValidationError("table entries out of range")
        ar = np.arange(n)
        if not (np.array_equal(m[e], ar) and np.array_equal(m[:, e], ar)):
            raise ValidationError(f"element {e} is not a two-sided identity")
        for row in m:
            if len(np.unique(row)) != n:
                raise ValidationError("table is not a Latin square: some element lacks an inverse")
        # (ab)c == a(bc), one block of a's at a time to bound memory
        step = max(1, 2_000_000 // (n * n))
        for start in range(0, n, step):
            a = ar[start:start + step]
            left = m[m[a]]  # left[i, b, c] = (a_i b) c
            right = m[a][:, m]  # right[i, b, c] = a_i (b c)
            if not np.array_equal(left, right):
                raise ValidationError("multiplication is not associative")

    def __repr__(self):
        return f"FiniteGroupTable(order={self.order}, name={self.name!r})"

    def mul(self, a: int, b: int) -> int:
        return int(self.mult[a, b])

    @cached_property
    def inverses(self) -> list[int]:
        rows, cols = np.nonzero(self.mult == self.identity)
        inv = [0] * self.order
        for a, b in zip(rows.tolist(), cols.tolist()):
            inv[a] = b
        return inv

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def powers(self, a: int) -> frozenset[int]:
        out, x = {self.identity}, a
        while x != self.identity:
            out.add(x)
            x = self.mul(x, a)
        return frozenset(out)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mult, self.mult.T))

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in range(self.order))

    def exponent(self) -> int:
        return math.lcm(*(self.element_order(a) for a in range(self.order)))

    def relabel(self, perm) -> FiniteGroupTable:
        """The same group with element ``i`` renamed ``perm[i]``."""
        perm = np.asarray(perm)
        inv = np.argsort(perm)
        new = perm[self.mult[np.ix_(inv, inv)]]
        return FiniteGroupTable(new, int(perm[self.identity]), self.name)


def cyclic_group(n: int) -> FiniteGroupTable:
    if n < 1:
        raise ValidationError(f"cyclic group order must be positive, got {n}")
    ar = np.arange(n)
    return FiniteGroupTable((ar[:, None] + ar[None, :]) % n, 0, f"cyclic:{n}", validate=False)


def klein_four() -> FiniteGroupTable:
    ar = np.arange(4)
    return FiniteGroupTable(ar[:, None] ^ ar[None, :], 0, "klein4", validate=False)


def _permutation_group(perms: list[tuple[int, ...]], name: str) -> FiniteGroupTable:
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    mult = [[index[tuple(p[x] for x in q)] for q in perms] for p in perms]
    identity = index[tuple(range(len(perms[0])))]
    return FiniteGroupTable(mult, identity, name, validate=False)


def symmetric_group(k: int) -> FiniteGroupTable:
    if not 1 <= k <= 6:
        raise ValidationError(f"sym:{k} is outside the supported range 1..6")
    return _permutation_group(sorted(itertools.permutations(range(k))), f"sym:{k}")


def dihedral_group(n: int) -> FiniteGroupTable:
    """Symmetries of the regular n-gon (order 2n)."""
    if n < 1:
        raise ValidationError(f"dihedral group needs n >= 1, got {n}")
    if n <= 2:
        # D_1 = C_2, D_2 = Klein four; the vertex action is not faithful
        return cyclic_group(2) if n == 1 else klein_four()
    rot = [tuple((x + r) % n for x in range(n)) for r in range(n)]
    refl = [tuple((r - x) % n for x in range(n)) for r in range(n)]
    return _permutation_group(sorted(rot + refl), f"dihedral:{n}")


def group_from_name(spec: str) -> FiniteGroupTable:
    """Builtin groups: ``cyclic:n``, ``klein4``, ``sym:k``, ``dihedral:n``."""
    name, _, arg = spec.strip().partition(":")
    try:
        if name == "klein4" and not arg:
            return klein_four()
        if name == "cyclic":
            return cyclic_group(int(arg))
        if name == "sym":
            return symmetric_group(int(arg))
        if name == "dihedral":
            return dihedral_group(int(arg))
    except ValueError as exc:
        raise ValidationError(f"bad group name {spec!r}: {exc}") from None
    raise ValidationError(f"unknown group {spec!r}")


def conjugacy_classes(g: FiniteGroupTable) -> list[list[int]]:
    seen = [False] * g.order
    classes = []
    inv = g.inverses
    for x in range(g.order):
        if seen[x]:
            continue
        orbit = sorted({g.mul(g.mul(h, x), inv[h]) for h in range(g.order)})
        for y in orbit:
            seen[y] = True
        classes.append(orbit)
    return classes


def cyclic_subgroups(g: FiniteGroupTable) -> list[frozenset[int]]:
    subgroups = {}
    for a in range(g.order):
        h = g.powers(a)
        subgroups.setdefault(h, None)
    return list(subgroups)


def cyclic_subgroup_classes(g: FiniteGroupTable) -> int:
    """Number of conjugacy classes of cyclic subgroups of ``g``."""
    subgroups = cyclic_subgroups(g)
    if g.is_abelian():
        return len(subgroups)
    remaining = set(subgroups)
    inv = g.inverses
    count = 0
    while remaining:
        h = remaining.pop()
        count += 1
        for x in range(g.order):
            remaining.discard(frozenset(g.mul(g.mul(x, y), inv[x]) for y in h))
    return count


# --- base rings -----------------------------------------------------------


@dataclass(frozen=True)
class IntegersBase:
    def is_unit(self, n: int) -> bool:
        return abs(n) == 1

    def __str__(self):
        return "Z"


@dataclass(frozen=True)
class CyclotomicBase:
    """The ring of integers Z[zeta_p] of Q(zeta_p)."""

    p: int

    def __post_init__(self):
        if not isprime(self.p):
            raise ValidationError(f"Z[zeta_{self.p}] requires a prime, got {self.p}")

    def is_unit(self, n: int) -> bool:
        # Z[zeta_p] meets Q in Z
        return abs(n) == 1

    def __str__(self):
        return f"Z[zeta_{self.p}]"


@dataclass(frozen=True)
class DedekindBase:
    """A Dedekind domain of characteristic zero, described only by declared data.

    ``invertible_primes`` lists the rational primes that are units in R and
    ``class_group`` is Cl(R) if known.
    """

    name: str
    invertible_primes: frozenset[int] = frozenset()
    class_group: GroupExpr | None = None

    def __post_init__(self):
        object.__setattr__(self, "invertible_primes", frozenset(int(p) for p in self.invertible_primes))
        if self.class_group is not None:
            object.__setattr__(self, "class_group", GroupExpr.of(self.class_group))

    def is_unit(self, n: int) -> bool:
        return n != 0 and all(p in self.invertible_primes for p in factorint(abs(n)))

    def __str__(self):
        return self.name


def base_from_name(spec: str):
    """``Z``, ``Z[zeta_p]`` or ``cyclotomic:p``."""
    s = spec.strip()
    if s in ("Z", "ZZ", "integers"):
        return IntegersBase()
    for prefix, suffix in (("Z[zeta_", "]"), ("cyclotomic:", "")):
        if s.startswith(prefix) and s.endswith(suffix):
            body = s[len(prefix):len(s) - len(suffix)]
            if body.isdigit():
                return CyclotomicBase(int(body))
    raise ValidationError(f"unknown base ring {spec!r}")


@dataclass(frozen=True)
class GroupRingSpec:
    group: FiniteGroupTable
    base: object = field(default_factory=IntegersBase)

    # characteristic zero is built into every base type, so K G is separable


def _cyclic_factor_count(n: int, p: int) -> int:
    # x^n - 1 over Q(zeta_p): Phi_d splits into phi(d) / [Q(zeta_p, zeta_d) : Q(zeta_p)] factors
    total = 0
    for d in divisors(n):
        degree = totient(math.lcm(p, d)) // totient(p)
        total += totient(d) // degree
    return int(total)


def derive_ch1_group_ring(s: GroupRingSpec) -> Derivation:
    g, base = s.group, s.base
    if isinstance(base, IntegersBase):
        t = cyclic_subgroup_classes(g)
        return Derivation(GroupExpr(t), ("grouprings.wedderburn", "grouprings.cyclic_subgroups"))
    if isinstance(base, CyclotomicBase) and g.is_cyclic():
        t = _cyclic_factor_count(g.order, base.p)
        return Derivation(GroupExpr(t), ("grouprings.wedderburn", "grouprings.cyclotomic_split"))
    return Derivation(
        GroupExpr.symbol(f"Z^t(K G over {base})", note="Wedderburn factor count not available"),
        ("grouprings.wedderburn",),
        (f"number of Wedderburn factors of KG over {base} is not computed for this group",),
    )


def ch1_group_ring(s: GroupRingSpec) -> GroupExpr:
    """CH_1 = Z^t with t the number of simple factors of K G."""
    return derive_ch1_group_ring(s).value


def _is_klein_four(g: FiniteGroupTable) -> bool:
    return g.order == 4 and g.is_abelian() and not g.is_cyclic()


def derive_ch0_group_ring(s: GroupRingSpec) -> Derivation:
    g, base = s.group, s.base
    rules = ["grouprings.swan"]
    if g.order == 1:
        if isinstance(base, IntegersBase):
            return Derivation(GroupExpr(), (*rules, "grouprings.trivial_group"))
        if isinstance(base, CyclotomicBase):
            return Derivation(
                cyclotomic_class_group(base.p),
                (*rules, "grouprings.trivial_group", "classgroups.cyclotomic"),
            )
        if base.class_group is not None:
            return Derivation(base.class_group, (*rules, "grouprings.trivial_group"))
        return Derivation(
            GroupExpr.symbol(f"Cl({base})"),
            (*rules, "grouprings.trivial_group"),
            ("class group of the base ring is unresolved",),
        )

    if isinstance(base, IntegersBase):
        cyclic = g.is_cyclic()
        if (cyclic and g.order in VANISHING_CYCLIC_ORDERS) or _is_klein_four(g):
            return Derivation(GroupExpr(), (*rules, "grouprings.vanishing"))
        if cyclic and isprime(g.order):
            cl = cyclotomic_class_group(g.order)
            return Derivation(
                cl,
                (*rules, "grouprings.cyclic_prime", "classgroups.cyclotomic"),
                () if cl.is_resolved() else (f"Cl(Z[zeta_{g.order}]) is outside the tabulated range",),
            )

    label = "Cl(ZG)" if isinstance(base, IntegersBase) else f"Cl({base}G)"
    note = "0 -> D(RG) -> Cl(RG) -> Cl(Lambda') -> 0, independent of the maximal order Lambda'"
    return Derivation(
        GroupExpr.symbol(label, note=note),
        (*rules, "grouprings.d_sequence"),
        ("Cl(RG) is not resolved for this group; D(RG) has no algorithm here",),
    )


def ch0_group_ring(s: GroupRingSpec) -> GroupExpr:
    return derive_ch0_group_ring(s).value


def is_maximal_group_ring(s: GroupRingSpec) -> bool:
    """R G is a maximal order iff the group order is a unit in R."""
    return s.base.is_unit(s.group.order)
