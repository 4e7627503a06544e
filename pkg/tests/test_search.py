import itertools

import numpy as np
import pytest

from mhybrid.core import InputError, MarginalPreference, ProductSpace, ResourceError, induced_marginal_domain
from mhybrid.domains import Thresholds, gen_mh_domain, gen_separable_domain, gen_universal
from mhybrid.graphs import is_rich_domain
from mhybrid.rules import (Fbr, Scf, assemble, decompose, fbr_from_rule, fbr_rule, is_constrained_dictatorship,
                           is_strategy_proof, is_tops_only, is_unanimous, make_dictatorship, universal_marginals)
from mhybrid.search import (EXHAUSTED, REFUTED, UNMET, VERIFIED, EnumerationBudget, VerificationReport,
                            enum_fbrs, enum_sp_marginal_rules, enum_sp_rules, verify_decomposable_domain,
                            verify_proposition1, verify_theorem)

from oracles import (backtrack_sp_rules, monotone_families, peak_agreement_violation, similar_peak_violation,
                     sp_violation, pref_ranks, tops_only_sp_rules, tops_only_violation)


def single_peaked_3chain():
    return tuple(MarginalPreference(0, r) for r in ((0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 1, 0)))


def keys(rules):
    return sorted(f.key for f in rules)


# -- FBR enumeration ----------------------------------------------------------

@pytest.mark.parametrize("k,n", [(2, 2), (3, 2), (2, 3), (3, 3), (4, 2)])
def test_enum_fbrs_matches_monotone_brute_force(k, n):
    got = enum_fbrs(ProductSpace((k, 2)), 0, n)
    assert sorted(f.ballots for f in got) == monotone_families(k, n)
    assert len({f.ballots for f in got}) == len(got)


def test_enum_fbrs_counts():
    sp = ProductSpace((3, 2))
    assert len(enum_fbrs(ProductSpace((2, 2)), 0, 2)) == 4
    assert len(enum_fbrs(sp, 0, 2)) == 9
    constrained = enum_fbrs(sp, 0, 2, constrained=(0, 2))
    assert sorted(f.ballots for f in constrained) == [(0, 0, 2, 2), (0, 2, 0, 2)]


@pytest.mark.parametrize("k,n,lo,up", [(3, 2, 0, 2), (3, 3, 0, 2), (5, 3, 1, 3), (4, 2, 0, 3), (4, 3, 1, 2)])
def test_enum_fbrs_constrained_is_filter_of_unconstrained(k, n, lo, up):
    sp = ProductSpace((k, 2))
    every = enum_fbrs(sp, 0, n)
    want = sorted(f.ballots for f in every if is_constrained_dictatorship(f, lo, up))
    assert sorted(f.ballots for f in enum_fbrs(sp, 0, n, constrained=(lo, up))) == want


def test_enum_fbrs_component_and_errors():
    sp = ProductSpace((2, 3))
    got = enum_fbrs(sp, 1, 2)
    assert len(got) == 9 and all(f.component == 1 and f.size == 3 for f in got)
    with pytest.raises(InputError):
        enum_fbrs(sp, 0, 1)
    with pytest.raises(InputError):
        enum_fbrs(sp, 1, 2, constrained=(2, 0))
    with pytest.raises(ResourceError):
        enum_fbrs(ProductSpace((5, 2)), 0, 4, budget=EnumerationBudget(max_nodes=10))


# -- SP marginal rules ----------------------------------------------------------

def test_marginal_all_orders_3chain_gives_dictatorships():
    ds = universal_marginals(3)
    res = enum_sp_marginal_rules(ds, 2)
    assert not res.exhausted and len(res.rules) == 2
    images = {fbr_rule(f, ds).key for f in enum_fbrs(ProductSpace((3, 2)), 0, 2, constrained=(0, 2))}
    assert set(keys(res.rules)) == images
    assert keys(res.rules) == backtrack_sp_rules([m.ranking for m in ds], 2)


def test_marginal_binary_orders_give_four():
    ds = universal_marginals(2)
    res = enum_sp_marginal_rules(ds, 2)
    images = {fbr_rule(f, ds).key for f in enum_fbrs(ProductSpace((2, 2)), 0, 2)}
    assert set(keys(res.rules)) == images and len(images) == 4


def test_marginal_single_peaked_gives_all_fbrs():
    ds = single_peaked_3chain()
    res = enum_sp_marginal_rules(ds, 2)
    images = {fbr_rule(f, ds).key for f in enum_fbrs(ProductSpace((3, 2)), 0, 2)}
    assert len(res.rules) == 9 and set(keys(res.rules)) == images
    assert all(fbr_from_rule(f) is not None for f in res.rules)


@pytest.mark.parametrize("orders,n", [
    (((0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 1, 0)), 3),
    (((0, 1, 2), (2, 1, 0), (1, 0, 2)), 2),
    (((0, 1, 2, 3), (1, 2, 0, 3), (3, 2, 1, 0), (2, 3, 1, 0)), 2),
    (((0, 1), (1, 0)), 3),
])
def test_marginal_search_matches_backtracking_oracle(orders, n):
    ds = tuple(MarginalPreference(0, o) for o in orders)
    res = enum_sp_marginal_rules(ds, n)
    assert keys(res.rules) == backtrack_sp_rules(list(orders), n)


def test_marginal_rules_closed_under_voter_relabeling():
    ds = single_peaked_3chain()
    res = enum_sp_marginal_rules(ds, 3)
    found = set(keys(res.rules))
    for f in res.rules:
        for perm in itertools.permutations(range(3)):
            assert tuple(int(v) for v in np.transpose(f.table, perm).ravel()) in found


# -- SP rules on full domains ---------------------------------------------------

def test_mh22_sixteen_rules_both_modes(mh22):
    full = enum_sp_rules(mh22, 2, "full")
    tops = enum_sp_rules(mh22, 2, "tops_only")
    assert len(full.rules) == 16 and keys(full.rules) == keys(tops.rules)
    m1, m2 = (induced_marginal_domain(mh22, s) for s in range(2))
    sp = mh22.space
    products = {assemble((fbr_rule(a, m1), fbr_rule(b, m2)), mh22).key
                for a in enum_fbrs(sp, 0, 2) for b in enum_fbrs(sp, 1, 2)}
    assert set(keys(full.rules)) == products


def test_full_search_matches_backtracking_oracle(mh22, universal22):
    for dom in (mh22, universal22):
        orders = [p.order for p in dom]
        assert keys(enum_sp_rules(dom, 2).rules) == backtrack_sp_rules(orders, 2)
        assert keys(enum_sp_rules(dom, 2, "tops_only").rules) == tops_only_sp_rules(orders, 2)


def test_rules_recheck_independently(mh22, universal22, table1):
    for dom in (mh22, universal22, table1):
        ranks = pref_ranks([p.order for p in dom])
        for f in enum_sp_rules(dom, 2, "tops_only").rules:
            assert is_unanimous(f) and is_strategy_proof(f)
            assert sp_violation(f.table, ranks, 2) is None


def test_dictatorships_always_found(mh22, universal22):
    for dom in (mh22, universal22, gen_separable_domain(ProductSpace((2, 2)))):
        found = set(keys(enum_sp_rules(dom, 2).rules))
        for i in range(2):
            assert make_dictatorship(dom, i).key in found


def test_universal22_only_dictatorships(universal22):
    res = enum_sp_rules(universal22, 2)
    assert keys(res.rules) == sorted(make_dictatorship(universal22, i).key for i in range(2))


def test_full_equals_tops_only_on_fixture(table1):
    full = enum_sp_rules(table1, 2, "full")
    tops = enum_sp_rules(table1, 2, "tops_only")
    assert not full.exhausted and keys(full.rules) == keys(tops.rules) and len(full.rules) == 8


def test_universal_3x2_rules_are_tops_only():
    dom = gen_universal(ProductSpace((3, 2)))
    res = enum_sp_rules(dom, 2, "tops_only")
    assert len(res.rules) == 2
    assert all(tops_only_violation(f) is None for f in res.rules)
    # the full search on 720 preferences cannot finish quickly: exhaustion must be reported
    short = enum_sp_rules(dom, 2, "full", budget=EnumerationBudget(max_seconds=1.0))
    assert short.exhausted
    assert all(is_tops_only(f) for f in short.rules)


def test_budget_exhaustion_is_partial(mh22):
    res = enum_sp_rules(mh22, 2, budget=EnumerationBudget(max_nodes=3))
    assert res.exhausted and len(res.rules) < 16
    assert all(is_strategy_proof(f) for f in res.rules)


def test_workers_give_identical_output(mh22):
    assert keys(enum_sp_rules(mh22, 3, workers=2).rules) == keys(enum_sp_rules(mh22, 3).rules)


def test_guard_and_mode_errors(mh22):
    with pytest.raises(ResourceError):
        enum_sp_rules(mh22, 3, max_cells=100)
    with pytest.raises(InputError):
        enum_sp_rules(mh22, 2, mode="fast")
    with pytest.raises(InputError):
        EnumerationBudget(max_nodes=0)


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("MHYBRID_BUDGET_NODES", "77")
    monkeypatch.setenv("MHYBRID_BUDGET_SECONDS", "1.5")
    assert EnumerationBudget.from_env() == EnumerationBudget(77, 1.5)
    monkeypatch.setenv("MHYBRID_BUDGET_NODES", "many")
    with pytest.raises(InputError):
        EnumerationBudget.from_env()


def rich_cases(table1, mh22, universal22):
    mh32 = gen_mh_domain(ProductSpace((3, 2)), Thresholds((0, 0), (2, 0)))
    return [(table1, 2, "full"), (mh22, 2, "full"), (mh22, 3, "full"), (universal22, 2, "full"),
            (mh32, 2, "full")]


def test_peak_invariances_on_rich_domains(table1, mh22, universal22):
    for dom, n, mode in rich_cases(table1, mh22, universal22):
        assert is_rich_domain(dom)
        rules = enum_sp_rules(dom, n, mode).rules
        assert rules
        for f in rules:
            assert tops_only_violation(f) is None
            assert similar_peak_violation(f) is None
            assert peak_agreement_violation(f) is None


def test_rules_are_products_of_threshold_fbrs(table1, table1_thresholds):
    # threshold component 1 carries constrained FBRs, component 2 any FBR
    sp = table1.space
    m1, m2 = (induced_marginal_domain(table1, s) for s in range(2))
    lo, up = table1_thresholds.component(0)
    expected = {assemble((fbr_rule(a, m1), fbr_rule(b, m2)), table1).key
                for a in enum_fbrs(sp, 0, 2, constrained=(lo, up)) for b in enum_fbrs(sp, 1, 2)}
    assert set(keys(enum_sp_rules(table1, 2).rules)) == expected


def test_rules_decompose_into_fbrs(mh22):
    for f in enum_sp_rules(mh22, 2).rules:
        parts = decompose(f)
        assert all(fbr_from_rule(g) is not None for g in parts)


# -- verifiers ------------------------------------------------------------------

def test_marginal_verifier_on_fixture(table1, table1_thresholds):
    r1 = verify_proposition1(table1, table1_thresholds, 0, 2)
    assert r1.status == VERIFIED and r1.counts["sp_marginal_rules"] == 2 and r1.counts["fbr_images"] == 2
    assert r1.details["fbr_kind"] == "constrained"
    r2 = verify_proposition1(table1, table1_thresholds, 1, 2)
    assert r2.status == VERIFIED and r2.counts["sp_marginal_rules"] == 4
    assert r2.details["fbr_kind"] == "unconstrained"
    assert r1.scope["n"] == 2 and r1.scope["sizes"] == "3x2"


def test_marginal_verifier_on_4x2_grid():
    t = Thresholds((1, 0), (3, 0))
    dom = gen_mh_domain(ProductSpace((4, 2)), t)
    rep = verify_proposition1(dom, t, 0, 2)
    assert rep.status == VERIFIED


def test_marginal_verifier_unmet_when_thresholds_wrong(table1):
    rep = verify_proposition1(table1, Thresholds((0, 0), (0, 0)), 0, 2)
    assert rep.status == UNMET


def test_decomposability_mh22_verified(mh22):
    rep = verify_decomposable_domain(mh22, 2)
    assert rep.status == VERIFIED and rep.counts["sp_rules"] == 16
    assert rep.details == {"if": "holds", "only_if": "holds"}


def test_decomposability_universal22_refuted_with_witness(universal22):
    rep = verify_decomposable_domain(universal22, 2)
    assert rep.status == REFUTED and rep.details["if"] == "fails"
    w = rep.witnesses[0]
    assert w["kind"] == "assembly-manipulable" and w["voter"] in (1, 2)
    assert w["sincere_profile"] != w["misreport_profile"]


def test_decomposability_fixture_if_direction(table1):
    rep = verify_decomposable_domain(table1, 2, directions=("if",))
    assert rep.status == VERIFIED and rep.counts["assemblies_checked"] == 8
    assert rep.details["only_if"] == "skipped"


def test_decomposability_exhaustion_reported_per_direction(mh22):
    rep = verify_decomposable_domain(mh22, 2, budget=EnumerationBudget(max_nodes=2))
    assert rep.status == EXHAUSTED
    assert rep.details["only_if"] == EXHAUSTED


def test_characterization_instances(mh22, universal22, table1):
    assert verify_theorem(mh22, 2).details["summary"] == "both sides true"
    rep = verify_theorem(universal22, 2)
    assert rep.status == VERIFIED and rep.details["summary"] == "both sides false"
    rep = verify_theorem(table1, 2)
    assert rep.status == VERIFIED and rep.details["summary"] == "both sides true"


def test_characterization_hypothesis_unmet():
    sp = ProductSpace((2, 2))
    dom = gen_universal(sp)
    thin = type(dom)(sp, dom.prefs[:3])
    assert not is_rich_domain(thin)
    assert verify_theorem(thin, 2).status == UNMET


def test_report_invariants():
    with pytest.raises(ValueError):
        VerificationReport("x", REFUTED, {})
    with pytest.raises(ValueError):
        VerificationReport("x", "maybe", {})


def test_invariance_oracles_detect_violations(universal22):
    # second-ranked alternative of voter 1: depends on more than peaks
    f = Scf.from_function(universal22, 2, lambda p, q: p.ranking[1])
    assert tops_only_violation(f) is not None
    assert peak_agreement_violation(f) is not None
    assert similar_peak_violation(f) is not None
