import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import coset_count, order_census, snf_diagonal
from ttchow.abgroup import (
    AbMap,
    FgAbGroup,
    GroupExpr,
    IntMatrix,
    Presentation,
    Symbol,
    ValidationError,
    block_diagonal,
    cokernel,
    direct_sum,
    image,
    invariant_factors,
    invert_integer,
    is_isomorphic,
    is_surjective,
    kernel,
    smith_normal_form,
)


def matrices(max_rows=6, max_cols=6, lo=-30, hi=30):
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r
            ).map(lambda rows: IntMatrix(r, c, tuple(x for row in rows for x in row)))
        )
    )


def free_map(rows):
    m = IntMatrix.from_rows(rows)
    return AbMap(Presentation(m.cols), Presentation(m.rows), m)


def random_unimodular(n, rng, steps=12):
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        k = rng.randint(-3, 3)
        rows[i] = [a + k * b for a, b in zip(rows[i], rows[j])]
    if n and rng.random() < 0.5:
        rows[0] = [-x for x in rows[0]]
    return IntMatrix.from_rows(rows, n)


# --- IntMatrix -----------------------------------------------------------------


def test_matrix_shape_is_checked():
    with pytest.raises(ValidationError):
        IntMatrix(2, 2, (1, 2, 3))
    with pytest.raises(ValidationError):
        IntMatrix.from_rows([[1, 2], [3]])


def test_matrix_entries_are_arbitrary_precision():
    big = 2 ** 200
    m = IntMatrix.from_rows([[big, 1], [0, big]])
    assert (m @ m)[0, 0] == big * big
    assert m.det() == big * big


# --- Smith normal form -----------------------------------------------------------


def test_snf_identity():
    u, s, v = smith_normal_form(IntMatrix.identity(2))
    assert s == u == v == IntMatrix.identity(2)


def test_snf_known_example():
    m = IntMatrix.from_rows([[2, 4], [6, 8]])
    u, s, v = smith_normal_form(m)
    assert s == IntMatrix.diagonal([2, 4])
    assert u @ m @ v == s
    assert abs(u.det()) == abs(v.det()) == 1


def test_snf_zero_matrix():
    u, s, v = smith_normal_form(IntMatrix.zeros(3, 2))
    assert s == IntMatrix.zeros(3, 2)
    assert u == IntMatrix.identity(3) and v == IntMatrix.identity(2)


@pytest.mark.parametrize("shape", [(0, 0), (0, 3), (2, 0)])
def test_snf_empty(shape):
    m = IntMatrix.zeros(*shape)
    u, s, v = smith_normal_form(m)
    assert u @ m @ v == s == m


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_snf_identities(m):
    u, s, v = smith_normal_form(m)
    assert u @ m @ v == s
    assert u.is_unimodular() and v.is_unimodular()
    diag = [s[i, i] for i in range(min(m.rows, m.cols))]
    off = [s[i, j] for i in range(s.rows) for j in range(s.cols) if i != j]
    assert not any(off)
    assert all(d >= 0 for d in diag)
    nonzero = [d for d in diag if d]
    assert diag[: len(nonzero)] == nonzero
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@settings(max_examples=100, deadline=None)
@given(matrices(5, 5, -20, 20))
def test_snf_matches_sympy(m):
    diag = [s for s in (smith_normal_form(m)[1][i, i] for i in range(min(m.shape))) if s]
    assert diag == snf_diagonal(m.to_rows())


@settings(max_examples=60, deadline=None)
@given(matrices(5, 5), st.randoms(use_true_random=False))
def test_snf_unique_under_unimodular_mixing(m, rng):
    p, q = random_unimodular(m.rows, rng), random_unimodular(m.cols, rng)
    assert smith_normal_form(p @ m @ q)[1] == smith_normal_form(m)[1]


# --- FgAbGroup -----------------------------------------------------------------


def test_normal_form_invariants():
    with pytest.raises(ValidationError):
        FgAbGroup(0, (2, 3))
    with pytest.raises(ValidationError):
        FgAbGroup(0, (1, 2))
    with pytest.raises(ValidationError):
        FgAbGroup(-1)
    assert FgAbGroup.from_orders([2, 3, 0, 1]) == FgAbGroup(1, (6,))


def test_invariant_factors_preserve_order():
    rank, tors = invariant_factors([4, 6, 10, 0, 1])
    assert rank == 1 and tors == (2, 2, 60)


def test_primary_format():
    g = FgAbGroup(1, (2, 12))
    assert g.format() == "Z + Z/2 + Z/12"
    assert g.format(primary=True) == "Z + Z/2 + Z/3 + Z/4"
    assert FgAbGroup.trivial().format() == "0"


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 12), max_size=4))
def test_invariant_factors_agree_with_order_census(orders):
    # two finite abelian groups are isomorphic iff their element-order censuses agree
    g = FgAbGroup.from_orders(orders)
    assert order_census(list(g.torsion)) == order_census([d for d in orders if d > 1])


# --- cokernel / kernel / image ---------------------------------------------------


def test_cokernel_examples():
    assert cokernel(free_map([[0]])) == FgAbGroup(1)
    assert cokernel(free_map([[5]])) == FgAbGroup(0, (5,))
    assert cokernel(free_map([[2, 0], [0, 3]])) == FgAbGroup(0, (6,))


def test_cokernel_of_map_from_zero_group_is_codomain():
    cod = Presentation.of(FgAbGroup(1, (4,)))
    f = AbMap(Presentation(0), cod, IntMatrix.zeros(2, 0))
    assert cokernel(f) == FgAbGroup(1, (4,))


def test_ill_formed_map_rejected():
    with pytest.raises(ValidationError):
        AbMap(Presentation(2), Presentation(1), IntMatrix.from_rows([[1]]))
    # Z/2 -> Z sending the generator to 1 is not well defined
    with pytest.raises(ValidationError):
        AbMap(Presentation.cyclic(2), Presentation(1), IntMatrix.from_rows([[1]]))


def test_kernel_examples():
    assert kernel(free_map([[7]])) == FgAbGroup.trivial()
    assert kernel(free_map([[1, 0]])) == FgAbGroup(1)
    q = AbMap(Presentation(1), Presentation.cyclic(6), IntMatrix.from_rows([[1]]))
    assert kernel(q) == FgAbGroup(1)


def test_image_examples():
    assert image(free_map([[0, 0]])) == FgAbGroup.trivial()
    z4 = Presentation.cyclic(4)
    assert image(AbMap(z4, z4, IntMatrix.identity(1))) == FgAbGroup(0, (4,))
    target = Presentation(2, IntMatrix.from_rows([[2], [0]]))
    assert image(AbMap(Presentation(1), target, IntMatrix.from_rows([[1], [2]]))) == FgAbGroup(1)


def test_image_is_taken_modulo_relations():
    # Z -> Z/4 by 2 has image Z/2, although the lattice image 2Z is infinite cyclic
    f = AbMap(Presentation(1), Presentation.cyclic(4), IntMatrix.from_rows([[2]]))
    assert image(f) == FgAbGroup(0, (2,))
    assert kernel(f) == FgAbGroup(1)
    assert not is_surjective(f)


@settings(max_examples=100, deadline=None)
@given(matrices(4, 4, -9, 9))
def test_rank_nullity_for_free_groups(m):
    f = AbMap(Presentation(m.cols), Presentation(m.rows), m)
    assert kernel(f).rank + image(f).rank == m.cols
    assert kernel(f).is_free() and image(f).is_free()


@settings(max_examples=60, deadline=None)
@given(matrices(3, 3, -6, 6), matrices(3, 3, -6, 6))
def test_cokernel_of_block_sum(a, b):
    fa = AbMap(Presentation(a.cols), Presentation(a.rows), a)
    fb = AbMap(Presentation(b.cols), Presentation(b.rows), b)
    ab = block_diagonal(a, b)
    fab = AbMap(Presentation(ab.cols), Presentation(ab.rows), ab)
    assert cokernel(fab) == cokernel(fa) + cokernel(fb)


def relation_columns(n, bound):
    column = st.lists(st.integers(-bound, bound), min_size=n, max_size=n)
    return st.tuples(st.just(n), st.lists(column, min_size=n, max_size=n + 1))


# entry bounds keep the brute-force orbit in (Z/D)^n small
@settings(max_examples=80, deadline=None)
@given(st.one_of(relation_columns(1, 40), relation_columns(2, 12), relation_columns(3, 2)))
def test_cokernel_order_matches_coset_count(data):
    n, columns = data
    rel = IntMatrix.from_columns(columns, n)
    expected = coset_count(columns, n)
    g = cokernel(AbMap(Presentation(rel.cols), Presentation(n), rel))
    if expected is None:
        assert g.rank > 0
    elif expected <= 1000:
        assert g.rank == 0 and g.order == expected


# --- GroupExpr -----------------------------------------------------------------

symbol_names = st.sampled_from(["Pic(C)", "Cl(Abar)", "Z^(X_0)", "K0(Abar)"])
group_exprs = st.builds(
    GroupExpr,
    st.integers(0, 4),
    st.lists(st.integers(0, 30), max_size=4).map(tuple),
    st.lists(st.builds(Symbol, symbol_names, st.sampled_from([1, 2, 6])), max_size=3).map(tuple),
)


def test_direct_sum_examples():
    assert direct_sum(GroupExpr(1), GroupExpr(0, (2,))) == GroupExpr(1, (2,))
    assert direct_sum(GroupExpr(0, (2,)), GroupExpr(0, (3,))) == GroupExpr(0, (6,))
    pic = direct_sum(GroupExpr.symbol("Pic(C)"), GroupExpr(1))
    assert pic.free_rank == 1 and [s.name for s in pic.symbols] == ["Pic(C)"]


def test_group_expr_normalizes():
    g = GroupExpr(1, (0, 2, 4, 1), ("Z^(X_0)", "Cl(Abar)"))
    assert g.free_rank == 2 and g.torsion == (2, 4)
    assert [s.name for s in g.symbols] == ["Cl(Abar)", "Z^(X_0)"]
    assert str(g) == "Cl(Abar) + Z^(X_0) + Z^2 + Z/2 + Z/4"


def test_resolved_expr_round_trips_to_group():
    g = FgAbGroup(2, (3, 6))
    assert GroupExpr.of(g).to_group() == g
    with pytest.raises(ValidationError):
        GroupExpr.symbol("Pic(C)").to_group()


@settings(max_examples=100)
@given(group_exprs)
def test_group_expr_dict_round_trip(g):
    assert GroupExpr.from_dict(g.to_dict()) == g


@settings(max_examples=100)
@given(group_exprs, group_exprs)
def test_direct_sum_is_commutative(a, b):
    assert direct_sum(a, b) == direct_sum(b, a)


def test_invert_integer_examples():
    assert invert_integer(GroupExpr(1, (8,)), 2) == GroupExpr(1)
    assert invert_integer(GroupExpr(0, (6,)), 2) == GroupExpr(0, (3,))
    g = GroupExpr(1, (4,), ("Pic(C)",))
    assert invert_integer(g, 1) is g


def test_invert_integer_annotates_symbols():
    g = invert_integer(invert_integer(GroupExpr.symbol("Pic(C)"), 2), 3)
    (s,) = g.symbols
    assert s.qualifier == "after inverting 6"
    assert str(g) == "Pic(C) [after inverting 6]"


@settings(max_examples=100)
@given(group_exprs, st.integers(1, 30))
def test_invert_integer_idempotent(g, n):
    once = invert_integer(g, n)
    assert invert_integer(once, n) == once
    assert once.free_rank == g.free_rank
    assert all(math.gcd(d, n) == 1 for d in once.torsion)


def test_is_isomorphic_examples():
    assert is_isomorphic(FgAbGroup.from_orders([2, 3]), FgAbGroup(0, (6,)))
    assert not is_isomorphic(FgAbGroup(1), FgAbGroup(0, (2,)))
    assert not is_isomorphic(FgAbGroup(0, (4,)), FgAbGroup(0, (2, 2)))
    assert order_census([4]) != order_census([2, 2])


def test_symbol_dict_forms():
    assert Symbol.from_dict("Pic(C)") == Symbol("Pic(C)")
    s = Symbol.from_dict({"name": "Pic(C)", "qualifier": "after inverting 3", "note": "x"})
    assert s.inverted == 3 and s.to_dict()["note"] == "x"
    with pytest.raises(ValidationError):
        Symbol.from_dict({"name": "A", "qualifier": "tensored with Q"})


def test_random_snfs_seeded():
    rng = random.Random(11)
    for _ in range(50):
        r, c = rng.randint(1, 8), rng.randint(1, 8)
        m = IntMatrix.from_rows([[rng.randint(-50, 50) for _ in range(c)] for _ in range(r)])
        u, s, v = smith_normal_form(m)
        assert u @ m @ v == s
