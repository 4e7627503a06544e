import itertools

import pytest
from hypothesis import given, strategies as st

from mhybrid.core import (Domain, InputError, Preference, ProductSpace, all_preferences, disagreement_set,
                          induce_marginal, induce_marginal_at, induced_marginal_domain, interior_interval,
                          interval, is_complete_reversal, is_similar)
from mhybrid.fixtures import load_fixture

from conftest import P

S5 = ProductSpace((5, 2))


def test_space_basics():
    sp = ProductSpace((3, 2))
    assert sp.m == 2 and sp.n_alternatives == 6
    assert sp.alternatives[:3] == ((0, 0), (0, 1), (1, 0))
    assert all(sp.index(a) == i for i, a in enumerate(sp.alternatives))
    assert str(sp) == "3x2"


@pytest.mark.parametrize("sizes", [(3,), (1, 3), (2, 0)])
def test_space_rejects_degenerate(sizes):
    with pytest.raises(InputError):
        ProductSpace(sizes)


def test_interval_examples():
    assert interval(S5, 0, 1, 3) == {1, 2, 3}
    assert interval(S5, 0, 2, 2) == {2}
    ex1 = ProductSpace((4, 2))
    iv = interval(ex1, 0, 1, 3)
    assert iv == {1, 2, 3} and len(iv) >= 3
    with pytest.raises(InputError):
        interval(S5, 0, 0, 5)


def test_interior_interval_examples():
    assert interior_interval(S5, 0, 1, 4) == {2, 3}
    assert interior_interval(S5, 0, 2, 2) == set()
    assert interior_interval(ProductSpace((4, 2)), 0, 0, 2) == {1}
    with pytest.raises(InputError):
        interior_interval(S5, 1, 0, 2)


@given(st.integers(0, 4), st.integers(0, 4))
def test_interval_symmetry(a, b):
    assert interval(S5, 0, a, b) == interval(S5, 0, b, a)
    if a != b:
        assert interior_interval(S5, 0, a, b) | {a, b} == interval(S5, 0, a, b)
    assert interior_interval(S5, 0, a, b) == (set() if abs(a - b) <= 1 else interior_interval(S5, 0, b, a))


def test_disagreement_set():
    assert disagreement_set((1, 0), (1, 0)) == set()
    assert disagreement_set((1, 0), (3, 0)) == {0} and is_similar((1, 0), (3, 0))
    assert disagreement_set((1, 0), (3, 1)) == {0, 1} and not is_similar((1, 0), (3, 1))
    with pytest.raises(InputError):
        disagreement_set((1, 0), (1, 0, 0))


def test_preference_validation():
    sp = ProductSpace((2, 2))
    with pytest.raises(InputError):
        Preference(sp, ((0, 0), (0, 1), (1, 0)))
    with pytest.raises(InputError):
        Preference(sp, ((0, 0), (0, 0), (1, 0), (1, 1)))
    p = Preference(sp, ((1, 1), (0, 0), (0, 1), (1, 0)))
    assert p.peak == (1, 1) and p.rank((1, 0)) == 3 and p.prefers((0, 0), (1, 0))


def test_domain_rejects_duplicates():
    sp = ProductSpace((2, 2))
    p = Preference(sp, sp.alternatives)
    with pytest.raises(InputError):
        Domain(sp, [p, p])


def test_induce_marginal_fixture(table1):
    assert induce_marginal(table1[P(2)], 0).ranking == (0, 2, 1)  # labels 1 > 3 > 2
    assert induce_marginal(table1[P(1)], 1).ranking == (0, 1)


def test_induce_marginal_binary_component(table1):
    for p in table1:
        mp = induce_marginal(p, 1)
        assert mp.peak == p.peak[1] and mp.size == 2


def test_induce_marginal_at_example():
    hat = load_fixture("example1").data["hat"]
    # rows at l8 read l2 > l4 > l9 > l6; rows at l3 read l2 > l4 > l6 > l9
    assert induce_marginal_at(hat, 0, (0, 1)).ranking == (0, 1, 3, 2)
    assert induce_marginal(hat, 0).ranking == (0, 1, 2, 3)


def test_induce_marginal_at_peak_matches(table1):
    for p in table1:
        for s in range(2):
            assert induce_marginal_at(p, s, p.peak) == induce_marginal(p, s)


def test_induced_marginal_domain(table1):
    assert {m.ranking for m in induced_marginal_domain(table1, 0)} == set(itertools.permutations(range(3)))
    assert {m.ranking for m in induced_marginal_domain(table1, 1)} == {(0, 1), (1, 0)}
    single = Domain(table1.space, [table1[0]])
    assert len(induced_marginal_domain(single, 0)) == 1


def test_complete_reversal(table1):
    assert is_complete_reversal(table1[P(1)], table1[P(30)])
    assert not is_complete_reversal(table1[P(1)], table1[P(1)])
    assert not is_complete_reversal(table1[P(1)], table1[P(2)])


ALL_22 = list(all_preferences(ProductSpace((2, 2))))


@given(st.sampled_from(ALL_22), st.integers(0, 1))
def test_marginal_peak_is_peak_coordinate(p, s):
    assert induce_marginal(p, s).peak == p.peak[s]


@given(st.sampled_from(ALL_22))
def test_reverse_is_involution(p):
    assert is_complete_reversal(p, p.reversed())
    assert p.reversed().reversed() == p


def test_every_preference_enumerated_once():
    assert len(ALL_22) == 24 and len(set(ALL_22)) == 24
