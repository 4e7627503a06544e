import itertools

import pytest

from mhybrid.core import InputError, MarginalPreference, Preference, ProductSpace, ResourceError
from mhybrid.domains import (Thresholds, extreme_thresholds, find_hybrid_representation, gen_mh_domain,
                             gen_msp_domain, gen_separable_domain, gen_top_separable_domain, gen_universal,
                             is_hybrid_marginal, is_mh_domain, is_mh_domain_for, is_mh_preference,
                             is_msp_preference, is_semi_separable, is_separable, is_top_separable,
                             mh_domain_diagnostics, separable_marginals, validate_thresholds)
from mhybrid.fixtures import load_fixture
from mhybrid.rules import universal_marginals

from conftest import P

EX1 = load_fixture("example1").data
SP42 = ProductSpace((4, 2))


def mp(*ranking, s=0):
    return MarginalPreference(s, ranking)


def test_separable_examples(table1):
    assert is_separable(table1[P(1)])
    assert not is_separable(table1[P(2)])
    assert is_separable(EX1["separable"]) and not is_separable(EX1["hat"])
    wit = separable_marginals(table1[P(1)])
    assert [m.ranking for m in wit] == [(0, 1, 2), (0, 1)]


def test_top_separable_examples(table1):
    assert is_top_separable(EX1["hat"])
    rev = table1[P(1)].reversed()
    assert rev.peak == (2, 1) and is_top_separable(rev)


def test_separable_implies_top_separable():
    for p in gen_separable_domain(ProductSpace((3, 2))):
        assert is_top_separable(p)


def test_hybrid_marginal_three_chain():
    assert is_hybrid_marginal(mp(1, 0, 2), 1, 1)
    assert not is_hybrid_marginal(mp(0, 2, 1), 1, 1)
    assert all(is_hybrid_marginal(mp(*o), 0, 2) for o in itertools.permutations(range(3)))


def test_hybrid_marginal_five_chain():
    # 1 > 2 > 5 > 4 > 3 in 1-based labels, thresholds at 2 and 4
    assert not is_hybrid_marginal(mp(0, 1, 4, 3, 2), 1, 3)
    assert is_hybrid_marginal(mp(0, 1, 3, 4, 2), 1, 3)


def test_hybrid_marginal_bad_thresholds():
    with pytest.raises(InputError):
        is_hybrid_marginal(mp(0, 1, 2), 0, 1)


def test_hybrid_marginal_matches_definition():
    # literal reading of the definition on a 4-chain, every order and every valid threshold pair
    k = 4
    for lo, up in [(a, b) for a in range(k) for b in range(a, k) if a == b or b - a >= 2]:
        inner = set(range(lo + 1, up))
        for o in itertools.permutations(range(k)):
            x = o[0]
            pos = {v: r for r, v in enumerate(o)}
            expect = all(pos[a] < pos[b] for a in range(k) for b in range(k)
                         if a != b and min(x, b) < a < max(x, b) and a not in inner)
            assert is_hybrid_marginal(mp(*o), lo, up) == expect


def test_validate_thresholds():
    assert validate_thresholds(ProductSpace((2, 2)), Thresholds((1, 0), (1, 0)))
    assert not validate_thresholds(ProductSpace((3, 2)), Thresholds((0, 0), (1, 0)))
    assert validate_thresholds(SP42, EX1["thresholds"])


def test_mh_preference_examples(table1, table1_thresholds):
    t = EX1["thresholds"]
    assert is_mh_preference(EX1["separable"], t) and is_mh_preference(EX1["hat"], t)
    assert all(is_mh_preference(p, table1_thresholds) for p in table1)
    extra = Preference(table1.space, ((0, 1), (1, 1), (2, 1), (0, 0), (1, 0), (2, 0)))
    assert is_mh_preference(extra, table1_thresholds) and extra not in table1
    with pytest.raises(InputError):
        is_mh_preference(table1[0], Thresholds((0, 0), (1, 0)))


def test_msp_examples(table1):
    assert is_msp_preference(table1[P(1)])
    assert not is_msp_preference(EX1["hat"])


def test_semi_separable_examples():
    t = EX1["thresholds"]
    hybrid1 = [m for m in universal_marginals(4, 0) if is_hybrid_marginal(m, 1, 3)]
    both2 = list(universal_marginals(2, 1))
    p = EX1["separable"]
    wit = separable_marginals(p)
    assert is_semi_separable(p, [[wit[0]], [wit[1]]])
    assert is_semi_separable(p, [hybrid1, both2])
    swapped = list(p.ranking)
    swapped[1], swapped[2] = swapped[2], swapped[1]  # (l6,l3) above (l4,l3)
    assert not is_semi_separable(Preference(SP42, swapped), [hybrid1, both2])
    assert is_mh_preference(p, t)


def test_semi_separable_vacuous_component_flagged():
    p = EX1["separable"]
    diag = []
    # no marginal on component 1 peaks at l2: the quantifier is empty, so it holds for both orders
    assert not is_semi_separable(p, [[mp(1, 0, 2, 3)], list(universal_marginals(2, 1))], diag)
    assert diag and diag[0]["component"] == 0


def test_generators_on_binary_grid():
    sp = ProductSpace((2, 2))
    assert len(gen_universal(sp)) == 24
    mh = {p.ranking for p in gen_mh_domain(sp, Thresholds((0, 0), (0, 0)))}
    assert mh == {p.ranking for p in gen_msp_domain(sp)} == {p.ranking for p in gen_top_separable_domain(sp)}
    for lo in itertools.product(range(2), repeat=2):
        assert {p.ranking for p in gen_mh_domain(sp, Thresholds(lo, lo))} == mh


def test_generator_nesting_is_strict():
    t = EX1["thresholds"]
    msp = {p.ranking for p in gen_msp_domain(SP42)}
    mh = {p.ranking for p in gen_mh_domain(SP42, t)}
    ts = {p.ranking for p in gen_top_separable_domain(SP42)}
    assert msp < mh < ts


def test_generator_guard():
    with pytest.raises(ResourceError):
        gen_universal(ProductSpace((3, 3)))


def test_mh_domain_examples(table1, table1_thresholds, universal22):
    assert is_mh_domain(table1) == table1_thresholds
    assert is_mh_domain_for(table1, table1_thresholds)
    assert is_mh_domain(gen_separable_domain(ProductSpace((3, 2)))) == Thresholds((0, 0), (2, 0))
    assert is_mh_domain(universal22) is None
    assert is_mh_domain(universal22, all_thresholds=True) == []


def test_mh_domain_diagnostic_mode(table1):
    everything = is_mh_domain(table1, all_thresholds=True)
    assert everything == [Thresholds((0, 0), (2, 0)), Thresholds((0, 1), (2, 1))]
    diag = mh_domain_diagnostics(table1)
    assert all(entry["connected"] for entry in diag)


def test_hybrid_representation_examples():
    rep = find_hybrid_representation(universal_marginals(3))
    assert (rep.order, rep.lower, rep.upper) == ((0, 1, 2), 0, 2)
    sp = [mp(0, 1, 2), mp(1, 0, 2), mp(1, 2, 0), mp(2, 1, 0)]
    rep = find_hybrid_representation(sp)
    assert rep.lower == rep.upper
    assert all(is_hybrid_marginal(MarginalPreference(0, tuple(rep.order.index(x) for x in m.ranking)),
                                  rep.order.index(rep.lower), rep.order.index(rep.upper)) for m in sp)
    rep = find_hybrid_representation(universal_marginals(2))
    assert rep.lower == rep.upper


def test_hybrid_representation_guard():
    with pytest.raises(ResourceError):
        find_hybrid_representation(universal_marginals(3), max_elements=2)


def test_extreme_thresholds():
    assert extreme_thresholds(ProductSpace((4, 2, 3))) == Thresholds((0, 0, 0), (3, 0, 2))
