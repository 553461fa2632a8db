"""Independent reference computations used to derive and cross-check test values.

None of these share code with the package; they use sympy or plain brute force.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

from sympy import ZZ, Matrix, jacobi_symbol, primefactors
from sympy.polys.galoistools import gf_factor
from sympy.matrices.normalforms import smith_normal_form as sympy_snf


def snf_diagonal(rows: list[list[int]]) -> list[int]:
    """Nonzero SNF diagonal entries (absolute values) computed by sympy."""
    if not rows or not rows[0]:
        return []
    s = sympy_snf(Matrix(rows), domain=ZZ)
    return [abs(int(s[i, i])) for i in range(min(s.shape)) if s[i, i] != 0]


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d / n) for n > 0."""
    result = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        result *= 1 if d % 8 in (1, 7) else -1
    if n == 1:
        return result
    return result * jacobi_symbol(d % n, n)


def class_number(d: int) -> int:
    """Dirichlet's class number formula for a negative fundamental discriminant."""
    w = {-3: 6, -4: 4}.get(d, 2)
    s = sum(kronecker(d, a) * a for a in range(1, -d))
    return -w * s // (2 * -d)


def two_rank(d: int) -> int:
    """Genus theory: the 2-rank of Cl(d) is one less than the number of primes dividing d."""
    return len(primefactors(d)) - 1


def coset_count(columns: list[list[int]], n: int) -> int | None:
    """|Z^n / L| by brute force, L spanned by ``columns``; ``None`` if infinite.

    L contains D Z^n with D = |det| of a full-rank minor, so count the orbit of 0
    in (Z/D)^n under L and divide.
    """
    if n == 0:
        return 1
    m = Matrix(columns).T if columns else Matrix.zeros(n, 0)
    if m.rank() < n:
        return None
    dets = [abs(m[:, list(c)].det()) for c in itertools.combinations(range(m.shape[1]), n)]
    big = min(x for x in dets if x)
    gens = [tuple(int(x) % big for x in col) for col in columns]
    seen = {(0,) * n}
    frontier = [(0,) * n]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple((a + b) % big for a, b in zip(v, g))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return big ** n // len(seen)


def order_census(moduli: list[int]) -> Counter:
    """How many elements of Z/m_1 x ... x Z/m_k have each order."""
    census = Counter()
    for x in itertools.product(*(range(m) for m in moduli)):
        census[math.lcm(*(m // math.gcd(m, xi) for m, xi in zip(moduli, x))) if x else 1] += 1
    return census


def distinct_irreducible_factors(n: int, p: int) -> int:
    """Number of distinct monic irreducible factors of x^n - 1 over F_p."""
    coeffs = [1] + [0] * (n - 1) + [p - 1]
    _, factors = gf_factor(coeffs, p, ZZ)
    return len(factors)


def divisor_count(n: int) -> int:
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def partitions(n: int) -> int:
    from sympy.functions.combinatorial.numbers import partition

    return int(partition(n))


# --- imaginary quadratic class groups via ideal multiplication ------------------


def _egcd(a, b):
    if b == 0:
        return (abs(a), (1 if a >= 0 else -1), 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _reduce_form(a, b, c):
    while True:
        if not (-a < b <= a):
            k = (a - b) // (2 * a)
            b, c = b + 2 * a * k, a * k * k + b * k + c
        elif a > c:
            a, b, c = c, -b, a
        else:
            if a == c and b < 0:
                b = -b
            return a, b, c


def ideal_product_form(f, g, d):
    """Reduced form of the primitive part of the product of the ideals attached to f and g.

    The ideal of (a, b, c) is aZ + ((-b + sqrt d) / 2)Z inside Z[w], w = (delta + sqrt d) / 2.
    Elements x + y w are stored as pairs (x, y).
    """
    delta = d % 2
    nrm = (d - delta) // 4

    def mul(u, v):
        return (u[0] * v[0] + u[1] * v[1] * nrm, u[0] * v[1] + u[1] * v[0] + delta * u[1] * v[1])

    def gens(form):
        a, b, _ = form
        return [(a, 0), ((-b - delta) // 2, 1)]

    vecs = [mul(u, v) for u in gens(f) for v in gens(g)]
    # Hermite basis (big_a, 0), (big_b, big_c) of the lattice spanned by vecs
    big_c, pivot_x = 0, 0
    for x, y in vecs:
        g_, s_, t_ = _egcd(big_c, y)
        big_c, pivot_x = g_, s_ * pivot_x + t_ * x
    big_a = 0
    for x, y in vecs:
        big_a = math.gcd(big_a, x - (y // big_c) * pivot_x)
    big_b = pivot_x % big_a
    a_new = big_a // big_c
    r = big_b // big_c
    b_new = -2 * r - delta
    c_new = (b_new * b_new - d) // (4 * a_new)
    return _reduce_form(a_new, b_new, c_new)


def independent_class_group(d: int) -> tuple[int, ...]:
    """Invariant factors of Cl(d), from ideal products and element-order counts."""
    forms = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a) == 0:
                c = (b * b - d) // (4 * a)
                if c >= a and not (a == c and b < 0) and math.gcd(math.gcd(a, b), c) == 1:
                    forms.append((a, b, c))
        a += 1
    identity = _reduce_form(1, d % 2, (d % 2 - d) // 4)
    orders = []
    for f in forms:
        k, x = 1, f
        while x != identity:
            x = ideal_product_form(x, f, d)
            k += 1
        orders.append(k)
    h = len(forms)
    factors = []
    for p, e in _factor(h).items():
        counts = [sum(1 for o in orders if p ** j % o == 0) for j in range(e + 1)]
        ranks = [round(math.log(c, p)) for c in counts]
        at_least = [ranks[j] - ranks[j - 1] for j in range(1, e + 1)] + [0]
        for j in range(e):
            factors += [p ** (j + 1)] * (at_least[j] - at_least[j + 1])
    # assemble invariant factors from the prime-power list
    by_prime = {}
    for q in factors:
        by_prime.setdefault(min(_factor(q)), []).append(q)
    chains = [sorted(v, reverse=True) for v in by_prime.values()]
    out = []
    while any(chains):
        prod = 1
        for ch in chains:
            if ch:
                prod *= ch.pop(0)
        out.append(prod)
    return tuple(sorted(out))


def _factor(n: int) -> dict[int, int]:
    from sympy import factorint

    return {int(p): int(e) for p, e in factorint(n).items()}
