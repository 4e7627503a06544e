"""
Reference cases shipped with the package: a 30-preference rich domain, two
preferences on a 4x2 grid, a 3-voter constrained ballot family, and graph
facts about the 30-preference domain.

Each case carries a list of assertions.  ``run_fixture_assertions`` executes
them and reports every failure together with the source fact it encodes.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from .core import Domain, InputError, Preference, ProductSpace, induced_marginal_domain, induce_marginal
from .domains import Thresholds, is_mh_domain, is_mh_domain_for, is_mh_preference, is_separable
from . import graphs as G
from .rules import Fbr, constrained_dictator, evaluate_fbr, validate_fbr
from .search import REFUTED, VERIFIED, VerificationReport

FIXTURE_NAMES = ("table1", "example1", "lemma8_ballots", "appendixA_graph")
TABLE1_SHA256 = "1d2dc089c6999fb6b70eb9f465ae56615cf8d9ad95fa86cd70e9b67149fc2080"


@dataclass(frozen=True)
class Assertion:
    name: str
    check: Callable[[], object]
    expected: object
    source: str


@dataclass
class FixtureCase:
    name: str
    data: dict
    assertions: list = field(default_factory=list)


def table1_text() -> str:
    raw = resources.files("mhybrid").joinpath("data/table1.domain").read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != TABLE1_SHA256:
        raise InputError(f"table1.domain checksum mismatch: {digest}")
    return raw.decode()


def table1_domain() -> Domain:
    from .io import parse_domain
    return parse_domain(table1_text())


# the 30-preference domain is labelled 1,2,3 x 0,1; thresholds (1,0) and (3,0)
TABLE1_THRESHOLDS = Thresholds((0, 0), (2, 0))


def _p(*names):
    """1-based P-numbers to 0-based domain indices."""
    return [k - 1 for k in names]


def _table1_case() -> FixtureCase:
    dom = table1_domain()
    space = dom.space
    src = "30-preference example domain"
    p1 = ((0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1))
    outside = Preference(space, ((0, 1), (1, 1), (2, 1), (0, 0), (1, 0), (2, 0)))
    t = TABLE1_THRESHOLDS
    checks = [
        Assertion("size", lambda: len(dom), 30, f"{src}: 30 columns"),
        Assertion("labels", lambda: dom.labels, (("1", "2", "3"), ("0", "1")), f"{src}: element names"),
        Assertion("P1", lambda: dom[0].ranking, p1, f"{src}: first column"),
        Assertion("minimal_richness", lambda: G.check_minimal_richness(dom), True, f"{src}: minimal richness"),
        Assertion("diversity_plus_pair", lambda: G.diversity_plus_pair(dom), (0, 29),
                  f"{src}: diversity+ via P1 and P30"),
        Assertion("all_mh", lambda: all(is_mh_preference(p, t) for p in dom), True,
                  f"{src}: every preference is MH for (1,0):(3,0)"),
        Assertion("mh_domain", lambda: is_mh_domain_for(dom, t), True, f"{src}: MH domain"),
        Assertion("mh_domain_search", lambda: is_mh_domain(dom), t, f"{src}: MH domain"),
        Assertion("P1_separable", lambda: is_separable(dom[0]), True, f"{src}: P1 is separable"),
        Assertion("P2_not_separable", lambda: is_separable(dom[1]), False, f"{src}: P2 is not separable"),
        Assertion("missing_mh_preference", lambda: (is_mh_preference(outside, t), outside in dom),
                  (True, False), f"{src}: an MH preference left out of the domain"),
        Assertion("marginals_1_universal", lambda: len(induced_marginal_domain(dom, 0)), 6,
                  f"{src}: first induced marginal domain is universal"),
        Assertion("marginals_2_universal", lambda: len(induced_marginal_domain(dom, 1)), 2,
                  f"{src}: second induced marginal domain is universal"),
        Assertion("interior_plus", lambda: bool(G.check_interior_plus(dom)), True, f"{src}: Interior+"),
        Assertion("exterior_plus", lambda: bool(G.check_exterior_plus(dom)), True, f"{src}: Exterior+"),
        Assertion("rich", lambda: G.is_rich_domain(dom), True, f"{src}: the domain is rich"),
    ]
    return FixtureCase("table1", {"domain": dom, "thresholds": t}, checks)


# P1..P6 then P15..P18 etc. as listed for the graph of the 30-preference domain
PEAK_PATHS = (
    tuple(range(1, 7)), tuple(range(7, 11)), tuple(range(11, 15)),
    tuple(range(15, 19)), tuple(range(19, 25)), tuple(range(25, 31)),
)
CLOCKWISE = (1, 2, 3, 4, 5, 6, 15, 16, 17, 18, 28, 29, 30, 24, 23)
COUNTER_CLOCKWISE = (1, 7, 8, 9, 10, 19, 20, 21, 22, 23)
RESTORATION_PAIR = ((1, 0), (0, 1))  # labels (2,0) and (1,1)


def _is_graph_path(g, path):
    return all(g.has_edge(u, v) for u, v in zip(path, path[1:]))


def _appendix_graph_case() -> FixtureCase:
    dom = table1_domain()
    g = G.build_pref_graph(dom)
    src = "graph of the 30-preference domain"
    a, b = RESTORATION_PAIR
    cw, ccw = _p(*CLOCKWISE), _p(*COUNTER_CLOCKWISE)
    checks = [
        Assertion("P1~P2", lambda: g.label(0, 1), G.ADJACENT, f"{src}: P1 adjacent to P2"),
        Assertion("P6~+P15", lambda: g.label(5, 14), G.ADJACENT_PLUS, f"{src}: P6 adjacent+ to P15"),
    ]
    for u, v in ((3, 11), (1, 7), (18, 28), (24, 30)):
        checks.append(Assertion(f"edge P{u}-P{v}", lambda u=u, v=v: g.has_edge(u - 1, v - 1), True,
                                f"{src}: edge between P{u} and P{v}"))
    for path in PEAK_PATHS:
        idx = _p(*path)
        checks.append(Assertion(
            f"peak path P{path[0]}..P{path[-1]}",
            lambda idx=idx: (_is_graph_path(g, idx), len({dom[i].peak for i in idx})), (True, 1),
            f"{src}: constant-peak path P{path[0]}..P{path[-1]}"))
    checks += [
        Assertion("clockwise restoration", lambda: (_is_graph_path(g, cw), G.path_has_restoration(cw, a, b, dom)),
                  (True, True), f"{src}: the clockwise path restores (2,0) vs (1,1)"),
        Assertion("counter-clockwise no restoration",
                  lambda: (_is_graph_path(g, ccw), G.path_has_restoration(ccw, a, b, dom)),
                  (True, False), f"{src}: the counter-clockwise path has no restoration"),
        Assertion("no-detour line set", lambda: G.is_connected(g.subgraph(_p(*range(1, 7), *range(15, 19)))),
                  True, f"{src}: preferences with peaks (1,0) and (1,1) are connected"),
    ]
    return FixtureCase("appendixA_graph", {"domain": dom, "graph": g}, checks)


EXAMPLE1_LABELS = (("l2", "l4", "l6", "l9"), ("l3", "l8"))


def _example1_case() -> FixtureCase:
    space = ProductSpace((4, 2))
    separable = Preference(space, ((0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1), (3, 1)))
    hat = Preference(space, ((0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (3, 0), (3, 1), (2, 1)))
    t = Thresholds((1, 0), (3, 0))  # (l4,l3) and (l9,l3)
    src = "public-goods example on a 4x2 grid"
    checks = [
        Assertion("P separable", lambda: is_separable(separable), True, f"{src}: P_i is separable"),
        Assertion("P-hat not separable", lambda: is_separable(hat), False, f"{src}: P-hat_i is not separable"),
        Assertion("P MH", lambda: is_mh_preference(separable, t), True, f"{src}: P_i is MH"),
        Assertion("P-hat MH", lambda: is_mh_preference(hat, t), True, f"{src}: P-hat_i is MH"),
        Assertion("peak", lambda: (separable.peak, hat.peak), ((0, 0), (0, 0)), f"{src}: both peak at (l2,l3)"),
        Assertion("marginal", lambda: induce_marginal(hat, 0).ranking, (0, 1, 2, 3),
                  f"{src}: induced marginal of P-hat_i on the first component"),
    ]
    data = {"space": space, "labels": EXAMPLE1_LABELS, "separable": separable, "hat": hat, "thresholds": t,
            "domain": Domain(space, (separable, hat), EXAMPLE1_LABELS)}
    return FixtureCase("example1", data, checks)


# bit i is voter i+1; 5-chain encoded 0..4, thresholds at the 2nd and 4th element
LEMMA8_BALLOTS = (0, 3, 0, 4, 0, 4, 1, 4)
LEMMA8_LOWER, LEMMA8_UPPER = 1, 3


def lemma8_closed_form(peaks, lower=LEMMA8_LOWER, upper=LEMMA8_UPPER) -> int:
    """Voter 1 dictates inside the interval; outside, a five-point median."""
    p1, p2, p3 = peaks
    if lower <= p1 <= upper:
        return p1
    bound = lower if p1 < lower else upper
    return sorted((p1, p2, p3, p1, bound))[2]


def _lemma8_case() -> FixtureCase:
    fbr = Fbr(0, 3, 5, LEMMA8_BALLOTS)
    src = "constrained ballot family on a 5-chain"
    checks = [
        Assertion("valid", lambda: validate_fbr(fbr), True, f"{src}: ballot unanimity and monotonicity"),
        Assertion("constrained dictator", lambda: constrained_dictator(fbr, LEMMA8_LOWER, LEMMA8_UPPER), 0,
                  f"{src}: voter 1 is the constrained dictator"),
        Assertion("peaks (3,1,5)", lambda: evaluate_fbr(fbr, (2, 0, 4)), 2,
                  f"{src}: voter 1's peak inside the interval is chosen"),
        Assertion("peaks (1,3,5)", lambda: evaluate_fbr(fbr, (0, 2, 4)), 1, f"{src}: median case"),
        Assertion("closed form", lambda: all(evaluate_fbr(fbr, pk) == lemma8_closed_form(pk)
                                             for pk in itertools.product(range(5), repeat=3)),
                  True, f"{src}: three-case median expression on all 125 peak profiles"),
    ]
    return FixtureCase("lemma8_ballots", {"fbr": fbr, "lower": LEMMA8_LOWER, "upper": LEMMA8_UPPER}, checks)


_BUILDERS = {"table1": _table1_case, "example1": _example1_case,
             "lemma8_ballots": _lemma8_case, "appendixA_graph": _appendix_graph_case}


def load_fixture(name: str) -> FixtureCase:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise InputError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}") from None


def run_fixture_assertions(case: FixtureCase) -> VerificationReport:
    failures = []
    for a in case.assertions:
        try:
            got = a.check()
        except Exception as exc:  # a crash is a failed assertion, reported like one
            got = f"error: {exc}"
        if got != a.expected:
            failures.append({"kind": "assertion-failed", "assertion": a.name, "source": a.source,
                             "expected": repr(a.expected), "got": repr(got)})
    if "domain" in case.data:
        scope = {"fixture": case.name, "sizes": str(case.data["domain"].space)}
    else:
        fbr = case.data["fbr"]
        scope = {"fixture": case.name, "sizes": str(fbr.size), "n": fbr.n}
    scope["limit"] = "checked only for the sizes listed here"
    counts = {"assertions": len(case.assertions), "failed": len(failures)}
    return VerificationReport(f"fixture-{case.name}", REFUTED if failures else VERIFIED, scope, counts, failures)
