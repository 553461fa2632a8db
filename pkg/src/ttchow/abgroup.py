"""Finitely generated abelian groups over exact integer arithmetic.

Everything here is built on one primitive, :func:`smith_normal_form`.
Groups are given by presentations (generators modulo a relation lattice),
homomorphisms by integer matrices on generators, and the usual derived
objects (kernel, image, cokernel) are computed as subquotients of lattices.

>>> cokernel(AbMap.between(Presentation.free(2), Presentation.free(2), [[2, 0], [0, 3]]))
FgAbGroup(rank=0, torsion=(6,))
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sympy import factorint

__all__ = [
    "ValidationError",
    "IntMatrix",
    "FgAbGroup",
    "Presentation",
    "AbMap",
    "Symbol",
    "GroupExpr",
    "smith_normal_form",
    "invariant_factors",
    "cokernel",
    "kernel",
    "kernel_inclusion",
    "image",
    "is_surjective",
    "direct_sum",
    "invert_integer",
    "is_isomorphic",
    "solve_integer",
    "in_column_span",
    "column_basis",
    "integer_kernel",
    "preimage_lattice",
]


class ValidationError(ValueError):
    """Raised for ill-formed matrices, presentations or maps."""


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValidationError(f"negative matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ValidationError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}"
            )
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise ValidationError(f"row {i} has length {len(r)}, expected {cols}")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> IntMatrix:
        columns = [list(c) for c in columns]
        for j, c in enumerate(columns):
            if len(c) != rows:
                raise ValidationError(f"column {j} has length {len(c)}, expected {rows}")
        return cls(rows, len(columns), tuple(columns[j][i] for i in range(rows) for j in range(len(columns))))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls.diagonal([1] * n, n, n)

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> IntMatrix:
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        out = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            out[i][i] = v
        return cls.from_rows(out, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_columns(self.to_rows(), self.cols)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValidationError(f"cannot multiply {self.shape} by {other.shape}")
        a = self.to_rows()
        bt = other.transpose().to_rows()
        return IntMatrix.from_rows(
            [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a], other.cols
        )

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValidationError("determinant of a non-square matrix")
        n = self.rows
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k]:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1


def hstack(*mats: IntMatrix, rows: int | None = None) -> IntMatrix:
    if rows is None:
        if not mats:
            raise ValidationError("hstack of nothing needs an explicit row count")
        rows = mats[0].rows
    for m in mats:
        if m.rows != rows:
            raise ValidationError(f"hstack row mismatch: {m.rows} != {rows}")
    cols = [c for m in mats for c in m.columns()]
    return IntMatrix.from_columns(cols, rows)


def block_diagonal(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    out = [[0] * (a.cols + b.cols) for _ in range(a.rows + b.rows)]
    for i in range(a.rows):
        for j in range(a.cols):
            out[i][j] = a[i, j]
    for i in range(b.rows):
        for j in range(b.cols):
            out[a.rows + i][a.cols + j] = b[i, j]
    return IntMatrix.from_rows(out, a.cols + b.cols)


def _as_matrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    return IntMatrix.from_rows(m)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(u, s, v)`` with ``u @ m @ v == s`` in Smith normal form.

    ``u`` and ``v`` are unimodular; ``s`` is diagonal with nonnegative entries
    ``d1 | d2 | ...`` (trailing zeros last). The pivot is always the entry of
    least absolute value in the remaining block.
    """
    m = _as_matrix(m)
    r, c = m.rows, m.cols
    a = m.to_rows()
    u = IntMatrix.identity(r).to_rows()
    v = IntMatrix.identity(c).to_rows()

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):
        # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    for t in range(min(r, c)):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])

        while True:
            p = a[t][t]
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // p))
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // p))

            # remainders smaller than the pivot left behind: re-pivot on them
            best = None
            for i in range(t + 1, r):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), i, "row")
            for j in range(t + 1, c):
                if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                    best = (abs(a[t][j]), j, "col")
            if best is not None:
                if best[2] == "row":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                continue

            bad = next(
                ((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    return (
        IntMatrix.from_rows(u, r),
        IntMatrix.from_rows(a, c),
        IntMatrix.from_rows(v, c),
    )


def _diagonal(s: IntMatrix) -> list[int]:
    return [s[i, i] for i in range(min(s.rows, s.cols))]


def _rank_from_snf(s: IntMatrix) -> int:
    return sum(1 for d in _diagonal(s) if d)


# ---------------------------------------------------------------------------
# lattice utilities (column conventions throughout)


def solve_integer(a: IntMatrix, b: Sequence[int]) -> list[int] | None:
    """An integer solution ``x`` of ``a @ x == b``, or ``None``."""
    if len(b) != a.rows:
        raise ValidationError(f"right-hand side has length {len(b)}, expected {a.rows}")
    u, s, v = smith_normal_form(a)
    ub = [sum(u[i, k] * b[k] for k in range(a.rows)) for i in range(a.rows)]
    diag = _diagonal(s)
    y = [0] * a.cols
    for i in range(a.rows):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ub[i]:
                return None
        else:
            if ub[i] % d:
                return None
            y[i] = ub[i] // d
    return [sum(v[i, k] * y[k] for k in range(a.cols)) for i in range(a.cols)]


def in_column_span(a: IntMatrix, x: Sequence[int]) -> bool:
    return solve_integer(a, x) is not None


def column_basis(a: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the lattice spanned by the columns of ``a``."""
    u, s, v = smith_normal_form(a)
    av = a @ v
    k = _rank_from_snf(s)
    return IntMatrix.from_columns(av.columns()[:k], a.rows)


def integer_kernel(a: IntMatrix) -> IntMatrix:
    """A basis (as columns) of ``{x in Z^cols : a @ x == 0}``."""
    u, s, v = smith_normal_form(a)
    k = _rank_from_snf(s)
    return IntMatrix.from_columns(v.columns()[k:], a.cols)


def _coordinates(basis: IntMatrix, vectors: Iterable[Sequence[int]]) -> IntMatrix:
    cols = []
    for x in vectors:
        y = solve_integer(basis, x)
        if y is None:
            raise ValidationError(f"vector {tuple(x)} not in lattice")
        cols.append(y)
    return IntMatrix.from_columns(cols, basis.cols)


# ---------------------------------------------------------------------------
# groups


def invariant_factors(orders: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Split cyclic orders into ``(rank, invariant factors)``.

    ``0`` stands for an infinite cyclic summand, ``1`` for a trivial one.
    """
    rank = 0
    per_prime: dict[int, list[int]] = {}
    for d in orders:
        d = abs(int(d))
        if d == 0:
            rank += 1
            continue
        for p, e in factorint(d).items():
            per_prime.setdefault(p, []).append(p ** e)
    if not per_prime:
        return rank, ()
    length = max(len(v) for v in per_prime.values())
    factors = [1] * length
    for powers in per_prime.values():
        powers.sort(reverse=True)
        for k, q in enumerate(powers):
            factors[k] *= q
    return rank, tuple(sorted(factors))


@dataclass(frozen=True)
class FgAbGroup:
    """``Z^rank + Z/d1 + ... + Z/dm`` with ``d1 | d2 | ... | dm`` and each ``di >= 2``."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.rank < 0:
            raise ValidationError(f"negative rank {self.rank}")
        for d in self.torsion:
            if d < 2:
                raise ValidationError(f"invariant factor {d} must be at least 2")
        for d, e in zip(self.torsion, self.torsion[1:]):
            if e % d:
                raise ValidationError(f"invariant factors {self.torsion} do not form a divisibility chain")

    @classmethod
    def from_orders(cls, orders: Iterable[int], rank: int = 0) -> FgAbGroup:
        extra, torsion = invariant_factors(orders)
        return cls(rank + extra, torsion)

    @classmethod
    def free(cls, rank: int) -> FgAbGroup:
        return cls(rank)

    @classmethod
    def trivial(cls) -> FgAbGroup:
        return cls()

    @property
    def order(self) -> int | None:
        """Cardinality, or ``None`` for an infinite group."""
        return None if self.rank else math.prod(self.torsion)

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def is_free(self) -> bool:
        return not self.torsion

    def elementary_divisors(self) -> tuple[int, ...]:
        """Primary decomposition of the torsion, as sorted prime powers."""
        out = []
        for d in self.torsion:
            out.extend(p ** e for p, e in factorint(d).items())
        return tuple(sorted(out))

    def __add__(self, other: FgAbGroup) -> FgAbGroup:
        return FgAbGroup.from_orders(self.torsion + other.torsion, self.rank + other.rank)

    def format(self, primary: bool = False) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in (self.elementary_divisors() if primary else self.torsion))
        return " + ".join(parts) or "0"

    def __str__(self):
        return self.format()


@dataclass(frozen=True)
class Presentation:
    """``Z^generators`` modulo the column span of ``relations``."""

    generators: int
    relations: IntMatrix = None

    def __post_init__(self):
        if self.relations is None:
            object.__setattr__(self, "relations", IntMatrix.zeros(self.generators, 0))
        elif not isinstance(self.relations, IntMatrix):
            object.__setattr__(self, "relations", IntMatrix.from_rows(self.relations))
        if self.relations.rows != self.generators:
            raise ValidationError(
                f"relation matrix has {self.relations.rows} rows for {self.generators} generators"
            )

    @classmethod
    def free(cls, n: int) -> Presentation:
        return cls(n)

    @classmethod
    def cyclic(cls, d: int) -> Presentation:
        return cls(1, IntMatrix.from_rows([[d]]))

    @classmethod
    def of(cls, group: FgAbGroup) -> Presentation:
        """Standard presentation: free generators first, then one per invariant factor."""
        n = group.rank + len(group.torsion)
        return cls(n, IntMatrix.diagonal([0] * group.rank + list(group.torsion), n, n))

    def group(self) -> FgAbGroup:
        u, s, v = smith_normal_form(self.relations)
        diag = _diagonal(s)
        nonzero = [d for d in diag if d]
        return FgAbGroup.from_orders(nonzero, self.generators - len(nonzero))

    def is_zero_element(self, x: Sequence[int]) -> bool:
        return in_column_span(self.relations, x)


@dataclass(frozen=True)
class AbMap:
    """Homomorphism ``domain -> codomain`` given on generators (columns = images)."""

    domain: Presentation
    codomain: Presentation
    matrix: IntMatrix

    def __post_init__(self):
        if not isinstance(self.matrix, IntMatrix):
            object.__setattr__(
                self, "matrix", IntMatrix.from_rows(self.matrix, self.domain.generators)
            )
        if self.matrix.shape != (self.codomain.generators, self.domain.generators):
            raise ValidationError(
                f"map matrix has shape {self.matrix.shape}, expected "
                f"{(self.codomain.generators, self.domain.generators)}"
            )
        image_of_relations = self.matrix @ self.domain.relations
        for j, col in enumerate(image_of_relations.columns()):
            if not self.codomain.is_zero_element(col):
                raise ValidationError(
                    f"map is not well defined: domain relation {j} maps to {col}, "
                    "which is nonzero in the codomain"
                )

    @classmethod
    def between(cls, domain: Presentation, codomain: Presentation, rows) -> AbMap:
        return cls(domain, codomain, IntMatrix.from_rows(rows, domain.generators))

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        m = self.matrix
        return tuple(sum(m[i, j] * x[j] for j in range(m.cols)) for i in range(m.rows))

    def compose(self, first: AbMap) -> AbMap:
        """``self o first``."""
        return AbMap(first.domain, self.codomain, self.matrix @ first.matrix)


def _subquotient(numerators: IntMatrix, denominators: IntMatrix) -> tuple[Presentation, IntMatrix]:
    # span(numerators + denominators) / span(denominators), with the basis used
    basis = column_basis(hstack(numerators, denominators, rows=denominators.rows))
    coords = _coordinates(basis, denominators.columns())
    return Presentation(basis.cols, coords), basis


def preimage_lattice(f: AbMap) -> IntMatrix:
    """Basis of ``{x in Z^n : f(x) = 0 in the codomain}``; contains the domain relations."""
    m, s = f.matrix, f.codomain.relations
    n = f.domain.generators
    full = integer_kernel(hstack(m, -s, rows=m.rows))
    top = IntMatrix.from_columns([c[:n] for c in full.columns()], n)
    return column_basis(hstack(top, f.domain.relations, rows=n))


def cokernel(f: AbMap) -> FgAbGroup:
    """``codomain / (image f)`` in invariant-factor form."""
    c = f.codomain
    return Presentation(c.generators, hstack(c.relations, f.matrix, rows=c.generators)).group()


def kernel_inclusion(f: AbMap) -> AbMap:
    """The kernel of ``f`` as a presented group with its inclusion into the domain."""
    pres, basis = _subquotient(preimage_lattice(f), f.domain.relations)
    return AbMap(pres, f.domain, basis)


def kernel(f: AbMap) -> FgAbGroup:
    return kernel_inclusion(f).domain.group()


def image(f: AbMap) -> FgAbGroup:
    """Isomorphism type of ``f(domain)`` as a subgroup of the codomain group."""
    pres, _ = _subquotient(f.matrix, f.codomain.relations)
    return pres.group()


def is_surjective(f: AbMap) -> bool:
    return cokernel(f).is_trivial()


# ---------------------------------------------------------------------------
# symbolic expressions

_QUALIFIER = re.compile(r"^after inverting (\d+)$")


@dataclass(frozen=True, order=True)
class Symbol:
    """An opaque summand such as ``Pic(C)``, optionally tensored with ``Z[1/inverted]``."""

    name: str
    inverted: int = 1
    note: str = field(default="", compare=False)

    @property
    def qualifier(self) -> str | None:
        return None if self.inverted == 1 else f"after inverting {self.inverted}"

    def __str__(self):
        q = self.qualifier
        return f"{self.name} [{q}]" if q else self.name

    def to_dict(self) -> dict:
        d = {"name": self.name}
        if self.qualifier:
            d["qualifier"] = self.qualifier
        if self.note:
            d["note"] = self.note
        return d

    @classmethod
    def from_dict(cls, data) -> Symbol:
        if isinstance(data, str):
            return cls(data)
        inverted = 1
        q = data.get("qualifier")
        if q:
            match = _QUALIFIER.match(q)
            if not match:
                raise ValidationError(f"unrecognized qualifier {q!r}")
            inverted = int(match.group(1))
        return cls(data["name"], inverted, data.get("note", ""))


@dataclass(frozen=True)
class GroupExpr:
    """Formal direct sum of ``Z^free_rank``, cyclic torsion and opaque symbols.

    Torsion is renormalized to invariant factors and symbols are kept sorted,
    so structural equality is the right notion of equality.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()
    symbols: tuple[Symbol, ...] = ()

    def __post_init__(self):
        extra, torsion = invariant_factors(self.torsion)
        if self.free_rank < 0:
            raise ValidationError(f"negative free rank {self.free_rank}")
        object.__setattr__(self, "free_rank", self.free_rank + extra)
        object.__setattr__(self, "torsion", torsion)
        syms = [Symbol(s) if isinstance(s, str) else s for s in self.symbols]
        object.__setattr__(self, "symbols", tuple(sorted(syms)))

    @classmethod
    def of(cls, g: FgAbGroup | GroupExpr) -> GroupExpr:
        if isinstance(g, GroupExpr):
            return g
        return cls(g.rank, g.torsion)

    @classmethod
    def symbol(cls, name: str, note: str = "") -> GroupExpr:
        return cls(symbols=(Symbol(name, note=note),))

    def is_resolved(self) -> bool:
        return not self.symbols

    def to_group(self) -> FgAbGroup:
        if self.symbols:
            raise ValidationError(f"{self} contains unresolved summands")
        return FgAbGroup(self.free_rank, self.torsion)

    def is_trivial(self) -> bool:
        return self.is_resolved() and self.free_rank == 0 and not self.torsion

    def __add__(self, other) -> GroupExpr:
        return direct_sum(self, other)

    def __str__(self):
        parts = [str(s) for s in self.symbols]
        base = FgAbGroup(self.free_rank, self.torsion).format()
        if base != "0" or not parts:
            parts.append(base)
        return " + ".join(parts)

    def to_dict(self) -> dict:
        return {
            "rank": self.free_rank,
            "torsion": list(self.torsion),
            "symbols": [s.to_dict() for s in self.symbols],
        }

    @classmethod
    def from_dict(cls, data: dict) -> GroupExpr:
        return cls(
            int(data.get("rank", 0)),
            tuple(data.get("torsion", ())),
            tuple(Symbol.from_dict(s) for s in data.get("symbols", ())),
        )


def direct_sum(a: FgAbGroup | GroupExpr, b: FgAbGroup | GroupExpr) -> GroupExpr:
    a, b = GroupExpr.of(a), GroupExpr.of(b)
    return GroupExpr(a.free_rank + b.free_rank, a.torsion + b.torsion, a.symbols + b.symbols)


def _strip_primes(d: int, n: int) -> int:
    g = math.gcd(d, n)
    while g > 1:
        d //= g
        g = math.gcd(d, n)
    return d


def invert_integer(g: FgAbGroup | GroupExpr, n: int) -> GroupExpr:
    """``g`` tensored with ``Z[1/n]``, as far as it can be computed.

    The n-primary part of the explicit torsion is removed. Opaque symbols can
    hide n-torsion, so they are kept and only annotated.
    """
    if n < 1:
        raise ValidationError(f"cannot invert {n}")
    g = GroupExpr.of(g)
    if n == 1:
        return g
    torsion = tuple(_strip_primes(d, n) for d in g.torsion)
    symbols = tuple(
        Symbol(s.name, s.inverted * n // math.gcd(s.inverted, n), s.note) for s in g.symbols
    )
    return GroupExpr(g.free_rank, torsion, symbols)


def is_isomorphic(a: FgAbGroup | GroupExpr, b: FgAbGroup | GroupExpr) -> bool:
    return GroupExpr.of(a) == GroupExpr.of(b)
