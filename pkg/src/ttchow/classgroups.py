"""Class-group backends.

* imaginary quadratic orders: reduced binary quadratic forms under Gauss
  (Dirichlet) composition, computed from scratch;
* Z[zeta_p]: a small shipped table, everything else stays symbolic;
* full matrix orders: Morita invariance, the class group passes through.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from sympy import factorint, isprime

from .abgroup import FgAbGroup, GroupExpr, ValidationError

__all__ = [
    "QuadForm",
    "is_fundamental_discriminant",
    "reduced_forms",
    "compose",
    "form_class_group",
    "composition_table",
    "cyclotomic_class_group",
    "cyclotomic_table",
    "class_group_of_matrix_order",
    "resolve_backend",
]


@dataclass(frozen=True, order=True)
class QuadForm:
    """Positive definite primitive form ``a x^2 + b x y + c y^2``."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.discriminant >= 0 or self.a <= 0:
            raise ValidationError(f"{self} is not positive definite")
        if math.gcd(self.a, self.b, self.c) != 1:
            raise ValidationError(f"{self} is not primitive")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduce(self) -> QuadForm:
        a, b, c = self.a, self.b, self.c
        d = self.discriminant
        while True:
            if not (-a < b <= a):
                # b -> b + 2ak lands in (-a, a]
                k = (a - b) // (2 * a)
                b += 2 * a * k
                c = (b * b - d) // (4 * a)
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return QuadForm(a, b, c)

    def inverse(self) -> QuadForm:
        return QuadForm(self.a, -self.b, self.c).reduce()

    def __mul__(self, other: QuadForm) -> QuadForm:
        return compose(self, other)

    def __str__(self):
        return f"({self.a},{self.b},{self.c})"


def is_fundamental_discriminant(d: int) -> bool:
    def squarefree(n):
        return all(e == 1 for e in factorint(abs(n)).values())

    if d % 4 == 1:
        return squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree(m)
    return False


def _check_discriminant(d: int):
    if d >= 0:
        raise ValidationError(f"discriminant {d} is not negative")
    if not is_fundamental_discriminant(d):
        raise ValidationError(f"discriminant {d} is not fundamental")


def principal_form(d: int) -> QuadForm:
    return QuadForm(1, d % 2, (d % 2 - d) // 4)


def reduced_forms(d: int) -> list[QuadForm]:
    """All reduced primitive positive definite forms of discriminant ``d``."""
    _check_discriminant(d)
    out = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if math.gcd(a, b, c) == 1:
                out.append(QuadForm(a, b, c))
        a += 1
    return sorted(out)


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Dirichlet composition of two forms of the same discriminant, reduced.

    Follows the classical united-forms recipe (Shanks' arrangement as in
    Cohen's *Course in Computational Algebraic Number Theory*, 5.4.7).
    """
    d = f.discriminant
    if g.discriminant != d:
        raise ValidationError(f"cannot compose forms of discriminants {d} and {g.discriminant}")
    if f.a > g.a:
        f, g = g, f
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, dd = 0, a1
    else:
        dd, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % dd == 0:
        y2, x2, d1 = -1, 0, dd
    else:
        d1, x2, y2 = _xgcd(s, dd)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - d) // (4 * a3)
    return QuadForm(a3, b3, c3).reduce()


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, x, y)`` with ``a x + b y = g = gcd(a, b)``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def composition_table(d: int) -> tuple[list[QuadForm], list[list[int]]]:
    forms = reduced_forms(d)
    index = {f: i for i, f in enumerate(forms)}
    table = [[index[compose(f, g)] for g in forms] for f in forms]
    return forms, table


def _element_order(table: list[list[int]], identity: int, x: int) -> int:
    k, y = 1, x
    while y != identity:
        y = table[y][x]
        k += 1
    return k


def abelian_group_from_table(table: list[list[int]], identity: int) -> FgAbGroup:
    """Invariant factors of a finite abelian group given by its Cayley table.

    For each prime p the sizes ``|G[p^j]|`` determine the partition of the
    p-primary part.
    """
    n = len(table)
    orders = [_element_order(table, identity, x) for x in range(n)]
    cyclic_orders = []
    for p, e in factorint(n).items():
        counts = [1]
        j = 0
        while counts[-1] < p ** e:
            j += 1
            m = sum(1 for o in orders if (p ** j) % o == 0)
            counts.append(m)
        logs = [round(math.log(c, p)) for c in counts]
        # number of cyclic factors of order >= p^j is logs[j] - logs[j-1]
        ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))] + [0]
        for k in range(len(ge) - 1):
            cyclic_orders.extend([p ** (k + 1)] * (ge[k] - ge[k + 1]))
    return FgAbGroup.from_orders(cyclic_orders)


@lru_cache(maxsize=256)
def form_class_group(d: int) -> FgAbGroup:
    """The form class group of discriminant ``d`` in invariant-factor form."""
    forms, table = composition_table(d)
    return abelian_group_from_table(table, forms.index(principal_form(d)))


@lru_cache(maxsize=1)
def cyclotomic_table() -> dict[int, FgAbGroup]:
    text = resources.files("ttchow").joinpath("data/cyclotomic_class_groups.txt").read_text()
    table = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        p, factors = line.split()
        orders = [int(x) for x in factors.split(",") if int(x) > 1]
        table[int(p)] = FgAbGroup.from_orders(orders)
    return table


def cyclotomic_symbol(p: int) -> str:
    return f"Cl(Z[zeta_{p}])"


def cyclotomic_class_group(p: int) -> GroupExpr:
    """Cl(Z[zeta_p]) from the shipped table; an unresolved symbol for other primes."""
    if not isprime(p):
        raise ValidationError(f"{p} is not prime")
    table = cyclotomic_table()
    if p in table:
        return GroupExpr.of(table[p])
    return GroupExpr.symbol(cyclotomic_symbol(p), note="class group not in table")


def class_group_of_matrix_order(base: FgAbGroup | GroupExpr, n: int) -> GroupExpr:
    if n < 1:
        raise ValidationError(f"matrix size must be positive, got {n}")
    return GroupExpr.of(base)


def resolve_backend(ref: dict) -> GroupExpr:
    """Evaluate a class-group backend reference.

    ``{"backend": "quadratic", "disc": D}`` or ``{"backend": "cyclotomic", "p": p}``.
    """
    kind = ref.get("backend")
    if kind == "quadratic":
        return GroupExpr.of(form_class_group(int(ref["disc"])))
    if kind == "cyclotomic":
        return cyclotomic_class_group(int(ref["p"]))
    raise ValidationError(f"unknown class-group backend {kind!r}")
