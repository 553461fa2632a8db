"""Brute-force oracle for small finite-dimensional algebras over F_p.

The Jacobson radical is found by testing quasi-regularity element by
element, and simple modules are counted on the semisimple quotient. All
of this is exhaustive, so instances are capped at ``p**dim`` elements
(default ``2**20``, overridable through ``TTCHOW_ORACLE_GUARD``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import Poly, divisor_count, isprime, symbols

from . import modp
from .abgroup import FgAbGroup, ValidationError
from .traces import Derivation

DEFAULT_GUARD = 2 ** 20
GUARD_ENV = "TTCHOW_ORACLE_GUARD"

_CHUNK = 4096


class OracleTooLarge(ValueError):
    pass


def guard_limit(guard: int | None = None) -> int:
    if guard is not None:
        return int(guard)
    env = os.environ.get(GUARD_ENV)
    return int(env) if env else DEFAULT_GUARD


@dataclass(frozen=True, eq=False)
class StructAlgebra:
    """Associative unital algebra over F_p with ``e_i e_j = sum_k c[i, j, k] e_k``."""

    p: int
    constants: np.ndarray
    unit: np.ndarray
    name: str = ""

    def __post_init__(self):
        if not isprime(self.p):
            raise ValidationError(f"characteristic {self.p} is not prime")
        c = np.array(self.constants, dtype=np.int64) % self.p
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise ValidationError(f"structure constants must have shape (d, d, d), got {c.shape}")
        u = np.array(self.unit, dtype=np.int64) % self.p
        if u.shape != (c.shape[0],):
            raise ValidationError(f"unit has shape {u.shape}, expected ({c.shape[0]},)")
        c.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "constants", c)
        object.__setattr__(self, "unit", u)
        self._validate()

    def _validate(self):
        c, p, d = self.constants, self.p, self.dim
        left = np.einsum("ijm,mkn->ijkn", c, c) % p  # (e_i e_j) e_k
        right = np.einsum("jkm,imn->ijkn", c, c) % p  # e_i (e_j e_k)
        if not np.array_equal(left, right):
            bad = np.argwhere(left != right)[0][:3]
            raise ValidationError(f"product is not associative on basis triple {tuple(bad.tolist())}")
        eye = np.eye(d, dtype=np.int64)
        if not (
            np.array_equal(np.einsum("i,ijk->jk", self.unit, c) % p, eye)
            and np.array_equal(np.einsum("i,jik->jk", self.unit, c) % p, eye)
        ):
            raise ValidationError("declared unit is not a two-sided identity")

    @property
    def dim(self) -> int:
        return self.constants.shape[0]

    @property
    def size(self) -> int:
        return self.p ** self.dim

    def mul(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.constants) % self.p

    def mul_many(self, xs, ys) -> np.ndarray:
        return np.einsum("ni,nj,ijk->nk", xs, ys, self.constants, optimize=True) % self.p

    def right_matrix(self, a) -> np.ndarray:
        """Matrix of ``z -> z a`` acting on coordinate columns."""
        return np.einsum("j,ijk->ki", a, self.constants) % self.p

    def right_matrices(self, elems) -> np.ndarray:
        return np.einsum("nj,ijk->nki", elems, self.constants, optimize=True) % self.p

    def power(self, x, k: int) -> np.ndarray:
        out = self.unit.copy()
        for _ in range(k):
            out = self.mul(out, x)
        return out

    @cached_property
    def basis(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    def check_guard(self, guard: int | None = None):
        limit = guard_limit(guard)
        if self.size > limit:
            raise OracleTooLarge(
                f"instance too large for oracle: {self.p}^{self.dim} elements exceeds {limit}"
            )


# --- radical ------------------------------------------------------------------


def _elements(a: StructAlgebra, start: int, stop: int) -> np.ndarray:
    return modp.digits(np.arange(start, stop), a.p, a.dim)


def _nilpotent_mask(a: StructAlgebra, xs: np.ndarray) -> np.ndarray:
    # x is nilpotent iff x^dim = 0 (left multiplication is faithful)
    y = xs.copy()
    for _ in range(a.dim - 1):
        y = a.mul_many(y, xs)
    return ~y.any(axis=1)


def _left_ideal_basis(a: StructAlgebra, x) -> np.ndarray:
    prods = np.array([a.mul(e, x) for e in a.basis])
    r, _ = modp.rref(prods, a.p)
    return r


def is_quasi_regular_ideal_element(a: StructAlgebra, x) -> bool:
    """Whether ``1 - y x`` is left invertible for every ``y``.

    Left invertibility of ``w`` means ``z w = 1`` is solvable, i.e. the
    matrix of ``z -> z w`` is nonsingular. The products ``y x`` range over
    the left ideal ``A x``, so its elements are enumerated directly.
    """
    ideal = _left_ideal_basis(a, x)
    k = ideal.shape[0]
    total = a.p ** k
    start, step = 0, 16
    while start < total:
        # small batches first: a non-radical x usually fails early
        coeffs = modp.digits(np.arange(start, min(total, start + step)), a.p, k)
        start += step
        step = min(step * 4, _CHUNK)
        ys = (coeffs @ ideal) % a.p if k else np.zeros((len(coeffs), a.dim), dtype=np.int64)
        w = (a.unit[None, :] - ys) % a.p
        if not modp.batched_nonsingular(a.right_matrices(w), a.p).all():
            return False
    return True


def _in_span(basis: np.ndarray, x, p: int) -> bool:
    if basis.shape[0] == 0:
        return not np.any(x)
    return modp.rank(np.vstack([basis, x]), p) == basis.shape[0]


def jacobson_radical(a: StructAlgebra, guard: int | None = None) -> np.ndarray:
    """Basis (rows, reduced echelon form) of J(a), found by exhaustive scan.

    Elements of the radical are nilpotent, so only nilpotent elements are
    tested, one per line through the origin (leading coordinate 1), and
    those already in the span of accepted elements are skipped.
    """
    a.check_guard(guard)
    p, d = a.p, a.dim
    found = np.zeros((0, d), dtype=np.int64)
    for start in range(0, a.size, _CHUNK):
        xs = _elements(a, start, min(a.size, start + _CHUNK))
        xs = xs[_nilpotent_mask(a, xs)]
        for x in xs:
            if not x.any():
                continue
            lead = x[np.nonzero(x)[0][0]]
            if lead != 1:
                # scalar multiple of the normalized element, already decided
                continue
            if _in_span(found, x, p):
                continue
            if is_quasi_regular_ideal_element(a, x):
                found, _ = modp.rref(np.vstack([found, x]), p)
    return found


# --- quotients, centre, simple count --------------------------------------------


def quotient(a: StructAlgebra, ideal: np.ndarray) -> StructAlgebra:
    """``a / ideal`` for a two-sided ideal given by a basis in reduced echelon form."""
    p, d = a.p, a.dim
    rows, pivots = modp.rref(ideal, p) if len(ideal) else (np.zeros((0, d), dtype=np.int64), [])
    keep = [i for i in range(d) if i not in pivots]

    def reduce(v):
        v = v.copy() % p
        for row, pc in zip(rows, pivots):
            v = (v - v[pc] * row) % p
        return v[keep]

    m = len(keep)
    c = np.zeros((m, m, m), dtype=np.int64)
    eye = a.basis
    for i, bi in enumerate(keep):
        for j, bj in enumerate(keep):
            c[i, j] = reduce(a.mul(eye[bi], eye[bj]))
    name = f"{a.name}/J" if a.name else ""
    return StructAlgebra(p, c, reduce(a.unit), name)


def centre(a: StructAlgebra) -> np.ndarray:
    """Basis (rows) of the centre."""
    c = a.constants
    # x central iff sum_i x_i (c[i,j,k] - c[j,i,k]) = 0 for all j, k
    m = (c - c.transpose(1, 0, 2)).transpose(1, 2, 0).reshape(-1, a.dim)
    return modp.nullspace(m, a.p)


def derive_count_simples(a: StructAlgebra, guard: int | None = None) -> Derivation:
    p = a.p
    semisimple = quotient(a, jacobson_radical(a, guard))
    z = centre(semisimple)
    # Frobenius z -> z^p is F_p-linear on the commutative centre
    images = np.array([semisimple.power(v, p) for v in z])
    frob = np.array([modp.solve(z.T, w, p) for w in images]).T
    fixed = modp.nullspace((frob - np.eye(len(z), dtype=np.int64)) % p, p)
    return Derivation(int(fixed.shape[0]), ("algebra.radical", "algebra.simples"))


def count_simples(a: StructAlgebra, guard: int | None = None) -> int:
    """Number of isomorphism classes of simple right modules."""
    return derive_count_simples(a, guard).value


def k0_finite_length(a: StructAlgebra, guard: int | None = None) -> FgAbGroup:
    return FgAbGroup.free(count_simples(a, guard))


def cyclic_wedderburn_oracle(n: int) -> int:
    """Simple factors of Q[x]/(x^n - 1): one cyclotomic field per divisor of n."""
    if n < 1:
        raise ValidationError(f"n must be positive, got {n}")
    return int(divisor_count(n))


def nilpotency_index(a: StructAlgebra, ideal: np.ndarray) -> int | None:
    """Least k with ideal^k = 0, or ``None`` if the powers stabilize above zero."""
    p = a.p
    current, _ = modp.rref(ideal, p) if len(ideal) else (ideal, [])
    k = 1
    while current.shape[0]:
        prods = np.array([a.mul(x, y) for x in current for y in ideal]).reshape(-1, a.dim)
        nxt, _ = modp.rref(prods, p)
        if nxt.shape[0] == current.shape[0]:
            return None
        current = nxt
        k += 1
    return k


# --- builders -----------------------------------------------------------------


def _from_basis_products(p, d, product, unit, name) -> StructAlgebra:
    c = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            for k, coef in product(i, j).items():
                c[i, j, k] = (c[i, j, k] + coef) % p
    return StructAlgebra(p, c, unit, name)


def matrix_algebra(k: int, p: int) -> StructAlgebra:
    """M_k(F_p) on matrix units ``E_ab`` (index ``a*k + b``)."""
    d = k * k

    def product(i, j):
        a, b = divmod(i, k)
        c, e = divmod(j, k)
        return {a * k + e: 1} if b == c else {}

    unit = np.zeros(d, dtype=np.int64)
    for a in range(k):
        unit[a * k + a] = 1
    return _from_basis_products(p, d, product, unit, f"M{k}(F{p})")


def upper_triangular(k: int, p: int) -> StructAlgebra:
    units = [(a, b) for a in range(k) for b in range(a, k)]
    index = {u: i for i, u in enumerate(units)}

    def product(i, j):
        (a, b), (c, e) = units[i], units[j]
        return {index[(a, e)]: 1} if b == c else {}

    unit = np.zeros(len(units), dtype=np.int64)
    for a in range(k):
        unit[index[(a, a)]] = 1
    return _from_basis_products(p, len(units), product, unit, f"T{k}(F{p})")


def field_product(m: int, p: int) -> StructAlgebra:
    """F_p x ... x F_p (m copies)."""
    return _from_basis_products(
        p, m, lambda i, j: {i: 1} if i == j else {}, np.ones(m, dtype=np.int64), f"F{p}^{m}"
    )


def truncated_polynomials(n: int, p: int) -> StructAlgebra:
    """F_p[x]/(x^n); ``n = 2`` gives the dual numbers."""
    return _from_basis_products(
        p, n, lambda i, j: {i + j: 1} if i + j < n else {}, np.eye(n, dtype=np.int64)[0], f"F{p}[x]/x^{n}"
    )


def dual_numbers(p: int) -> StructAlgebra:
    return truncated_polynomials(2, p)


def _irreducible_poly(p: int, degree: int) -> list[int]:
    x = symbols("x")
    for idx in range(p ** degree):
        low = [(idx // p ** i) % p for i in range(degree)]
        coeffs = [1] + low[::-1]
        if Poly(coeffs, x, modulus=p).is_irreducible:
            return coeffs
    raise ValidationError(f"no irreducible polynomial of degree {degree} over F_{p}")


def finite_field(p: int, degree: int) -> StructAlgebra:
    """F_{p^degree} as an F_p-algebra on the power basis of a root of an irreducible polynomial."""
    coeffs = _irreducible_poly(p, degree)  # leading first
    # x^degree = -(sum of lower terms)
    reduction = [(-c) % p for c in coeffs[1:][::-1]]  # by ascending power

    def product(i, j):
        vec = [0] * (2 * degree)
        vec[i + j] = 1
        for top in range(2 * degree - 1, degree - 1, -1):
            t = vec[top]
            if t:
                vec[top] = 0
                for s, r in enumerate(reduction):
                    vec[top - degree + s] = (vec[top - degree + s] + t * r) % p
        return {k: v for k, v in enumerate(vec[:degree]) if v}

    return _from_basis_products(p, degree, product, np.eye(degree, dtype=np.int64)[0], f"F{p}^{degree}")


def direct_product(*algs: StructAlgebra) -> StructAlgebra:
    p = algs[0].p
    if any(b.p != p for b in algs):
        raise ValidationError("direct product needs a common characteristic")
    d = sum(b.dim for b in algs)
    c = np.zeros((d, d, d), dtype=np.int64)
    unit = np.zeros(d, dtype=np.int64)
    off = 0
    for b in algs:
        s = slice(off, off + b.dim)
        c[s, s, s] = b.constants
        unit[s] = b.unit
        off += b.dim
    return StructAlgebra(p, c, unit, " x ".join(b.name for b in algs))


def group_algebra(table, p: int) -> StructAlgebra:
    """F_p G from a multiplication table (``FiniteGroupTable`` or nested lists)."""
    mult = np.asarray(getattr(table, "mult", table))
    identity = getattr(table, "identity", 0)
    n = mult.shape[0]
    c = np.zeros((n, n, n), dtype=np.int64)
    c[np.arange(n)[:, None], np.arange(n)[None, :], mult] = 1
    unit = np.zeros(n, dtype=np.int64)
    unit[identity] = 1
    return StructAlgebra(p, c, unit, f"F{p}G")


def change_basis(a: StructAlgebra, t) -> StructAlgebra:
    """The same algebra in the basis given by the rows of the invertible matrix ``t``."""
    p = a.p
    t = np.array(t, dtype=np.int64) % p
    tinv = _inverse_mod_p(t, p)
    # new e'_i = sum_a t[i,a] e_a ; coordinates transform by tinv
    c = np.einsum("ia,jb,abk,kl->ijl", t, t, a.constants, tinv) % p
    unit = (a.unit @ tinv) % p
    return StructAlgebra(p, c, unit, a.name)


def _inverse_mod_p(t: np.ndarray, p: int) -> np.ndarray:
    d = t.shape[0]
    r, pivots = modp.rref(np.hstack([t, np.eye(d, dtype=np.int64)]), p)
    if pivots[:d] != list(range(d)):
        raise ValidationError("basis change matrix is singular")
    return r[:, d:]


# The Auslander order A = [[Rt, m], [Rt, R]] of a curve singularity R with
# normalization Rt, reduced modulo the maximal ideal m of R. Since m A lies
# in the radical of A, the fibre A / m A has the same simple modules as A.
# Elements of Rt are truncated power series, one per branch; each matrix
# slot keeps the monomials spanning slot / (m * slot).
_AUSLANDER = {
    # k[[x, y]]/(xy): branches u (x = u) and v (y = v)
    "nodal": {
        "branches": 2,
        "slots": {
            (0, 0): [((0, 0),), ((1, 0),)],
            (0, 1): [((0, 1),), ((1, 1),)],
            (1, 0): [((0, 0),), ((1, 0),)],
            (1, 1): [((0, 0), (1, 0))],
        },
    },
    # k[[x, y]]/(y^2 - x^3) = k[[t^2, t^3]]: one branch t
    "cuspidal": {
        "branches": 1,
        "slots": {
            (0, 0): [((0, 0),), ((0, 1),)],
            (0, 1): [((0, 2),), ((0, 3),)],
            (1, 0): [((0, 0),), ((0, 1),)],
            (1, 1): [((0, 0),)],
        },
    },
}
_TRUNC = 8


def auslander_fiber(kind: str, p: int = 2) -> StructAlgebra:
    """Finite-dimensional fibre ``A / m A`` of the Auslander order of a nodal or cuspidal singularity.

    Each basis vector is a 2x2 matrix with one nonzero slot holding a sum of
    monomials ``branch^degree``; the first monomial of each is its reading
    coordinate in that slot.
    """
    try:
        spec = _AUSLANDER[kind]
    except KeyError:
        raise ValidationError(f"unknown singularity {kind!r}; expected 'nodal' or 'cuspidal'") from None
    nb = spec["branches"]
    basis = [(slot, monos) for slot, elems in spec["slots"].items() for monos in elems]
    d = len(basis)

    def series(monos):
        s = np.zeros((nb, _TRUNC), dtype=np.int64)
        for br, deg in monos:
            s[br, deg] = 1
        return s

    def product(i, j):
        (si, mi), (sj, mj) = basis[i], basis[j]
        if si[1] != sj[0]:
            return {}
        a, b = series(mi), series(mj)
        prod = np.zeros_like(a)
        for br in range(nb):
            prod[br] = np.convolve(a[br], b[br])[:_TRUNC]
        slot = (si[0], sj[1])
        out = {}
        for k, (sk, mk) in enumerate(basis):
            if sk == slot:
                br, deg = mk[0]
                if prod[br, deg] % p:
                    out[k] = int(prod[br, deg] % p)
        return out

    unit = np.zeros(d, dtype=np.int64)
    unit[basis.index(((0, 0), ((0, 0),)))] = 1
    unit[basis.index(((1, 1), spec["slots"][(1, 1)][0]))] = 1
    if kind == "nodal":
        unit[basis.index(((0, 0), ((1, 0),)))] = 1
    return _from_basis_products(p, d, product, unit, f"Auslander({kind})/m")
