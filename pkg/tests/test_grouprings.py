import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import divisor_count, partitions
from ttchow.abgroup import GroupExpr, ValidationError
from ttchow.grouprings import (
    VANISHING_CYCLIC_ORDERS,
    CyclotomicBase,
    DedekindBase,
    FiniteGroupTable,
    GroupRingSpec,
    base_from_name,
    ch0_group_ring,
    ch1_group_ring,
    conjugacy_classes,
    cyclic_group,
    cyclic_subgroup_classes,
    derive_ch0_group_ring,
    dihedral_group,
    group_from_name,
    is_maximal_group_ring,
    klein_four,
    symmetric_group,
)


def test_conjugacy_classes():
    assert len(conjugacy_classes(cyclic_group(4))) == 4
    sizes = sorted(len(c) for c in conjugacy_classes(symmetric_group(3)))
    assert sizes == [1, 2, 3]
    assert conjugacy_classes(cyclic_group(1)) == [[0]]


def test_cyclic_subgroup_class_examples():
    assert cyclic_subgroup_classes(cyclic_group(7)) == 2
    assert cyclic_subgroup_classes(klein_four()) == 4
    assert cyclic_subgroup_classes(symmetric_group(3)) == 3
    assert cyclic_subgroup_classes(symmetric_group(4)) == 5
    assert cyclic_subgroup_classes(cyclic_group(1)) == 1


@pytest.mark.parametrize("n", range(1, 201))
def test_cyclic_counts_divisors(n):
    assert cyclic_subgroup_classes(cyclic_group(n)) == divisor_count(n)


@pytest.mark.parametrize("k", range(1, 6))
def test_symmetric_counts_partitions(k):
    # cyclic subgroups of S_k up to conjugacy are cycle types
    assert cyclic_subgroup_classes(symmetric_group(k)) == partitions(k)


@pytest.mark.parametrize("n", range(3, 16))
def test_dihedral_counts(n):
    # rotations give tau(n); reflections one class for odd n, two for even n
    assert cyclic_subgroup_classes(dihedral_group(n)) == divisor_count(n) + (1 if n % 2 else 2)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["cyclic:12", "klein4", "sym:3", "dihedral:5", "dihedral:6", "sym:4"]), st.randoms())
def test_relabel_invariance(name, rng):
    g = group_from_name(name)
    perm = list(range(g.order))
    rng.shuffle(perm)
    h = g.relabel(perm)
    FiniteGroupTable(h.mult, h.identity)  # still a valid group
    assert cyclic_subgroup_classes(h) == cyclic_subgroup_classes(g)
    assert sorted(map(len, conjugacy_classes(h))) == sorted(map(len, conjugacy_classes(g)))


def test_invalid_tables_rejected():
    with pytest.raises(ValidationError):
        FiniteGroupTable([[0, 1], [1, 1]])
    with pytest.raises(ValidationError):
        FiniteGroupTable([[0, 1, 2], [1, 2, 0]])
    with pytest.raises(ValidationError):
        FiniteGroupTable([])
    # Latin square without associativity
    with pytest.raises(ValidationError):
        FiniteGroupTable([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])


def test_group_names():
    assert group_from_name("cyclic:6").order == 6
    assert group_from_name("sym:4").order == 24
    assert group_from_name("dihedral:4").order == 8
    assert group_from_name("klein4").is_abelian()
    for bad in ("cyclic:x", "sym:9", "quaternion", "cyclic:0"):
        with pytest.raises(ValidationError):
            group_from_name(bad)


def test_base_names():
    assert str(base_from_name("Z")) == "Z"
    assert base_from_name("Z[zeta_5]") == CyclotomicBase(5)
    assert base_from_name("cyclotomic:7") == CyclotomicBase(7)
    with pytest.raises(ValidationError):
        base_from_name("Z[zeta_6]")
    with pytest.raises(ValidationError):
        base_from_name("Q")


def test_ch1_examples():
    assert ch1_group_ring(GroupRingSpec(cyclic_group(5))) == GroupExpr(2)
    assert ch1_group_ring(GroupRingSpec(cyclic_group(6))) == GroupExpr(4)
    assert ch1_group_ring(GroupRingSpec(symmetric_group(3))) == GroupExpr(3)
    # Q(zeta_p) contains the p-th roots of unity, so x^p - 1 splits
    assert ch1_group_ring(GroupRingSpec(cyclic_group(5), CyclotomicBase(5))) == GroupExpr(5)
    assert ch1_group_ring(GroupRingSpec(cyclic_group(3), CyclotomicBase(5))) == GroupExpr(2)
    assert not ch1_group_ring(GroupRingSpec(symmetric_group(3), CyclotomicBase(3))).is_resolved()


def test_ch0_examples():
    assert ch0_group_ring(GroupRingSpec(cyclic_group(23))) == GroupExpr(0, (3,))
    assert ch0_group_ring(GroupRingSpec(klein_four())).is_trivial()
    assert ch0_group_ring(GroupRingSpec(cyclic_group(7))).is_trivial()
    assert ch0_group_ring(GroupRingSpec(cyclic_group(1))).is_trivial()
    assert ch0_group_ring(GroupRingSpec(cyclic_group(1), CyclotomicBase(23))) == GroupExpr(0, (3,))


@pytest.mark.parametrize("n", sorted(VANISHING_CYCLIC_ORDERS))
def test_vanishing_list(n):
    assert ch0_group_ring(GroupRingSpec(cyclic_group(n))).is_trivial()


@pytest.mark.parametrize("name", ["cyclic:12", "cyclic:15", "sym:3", "dihedral:4", "cyclic:29"])
def test_unresolved_ch0_is_symbolic(name):
    d = derive_ch0_group_ring(GroupRingSpec(group_from_name(name)))
    assert not d.value.is_resolved()
    assert d.warnings


@pytest.mark.parametrize("n", [2, 3, 5, 7, 11, 13, 17, 19, 23])
def test_resolved_class_groups_are_finite(n):
    g = ch0_group_ring(GroupRingSpec(cyclic_group(n)))
    assert g.is_resolved() and g.free_rank == 0


def test_maximality():
    assert is_maximal_group_ring(GroupRingSpec(cyclic_group(1)))
    assert not is_maximal_group_ring(GroupRingSpec(cyclic_group(5)))
    assert is_maximal_group_ring(GroupRingSpec(cyclic_group(5), DedekindBase("Z[1/5]", {5})))
    assert not is_maximal_group_ring(GroupRingSpec(cyclic_group(10), DedekindBase("Z[1/5]", {5})))
    assert not is_maximal_group_ring(GroupRingSpec(cyclic_group(3), CyclotomicBase(3)))


def test_dedekind_base_trivial_group():
    base = DedekindBase("O", class_group=GroupExpr(0, (2,)))
    assert ch0_group_ring(GroupRingSpec(cyclic_group(1), base)) == GroupExpr(0, (2,))
    assert not ch0_group_ring(GroupRingSpec(cyclic_group(1), DedekindBase("O"))).is_resolved()


def test_tables_are_numpy_backed():
    g = symmetric_group(3)
    assert isinstance(g.mult, np.ndarray)
    assert g.mul(g.identity, 4) == 4
