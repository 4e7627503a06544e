"""
Preference restrictions and domain generators.

Covers separability, top-separability, hybrid marginal preferences,
semi-separability, multidimensional hybrid (MH) and multidimensional
single-peaked (MSP) preferences, the MH-domain test, and the search for a
hybrid representation of a marginal domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .core import (
    Domain,
    InputError,
    MarginalPreference,
    Preference,
    ProductSpace,
    ResourceError,
    all_preferences,
    induce_marginal,
    induce_marginal_at,
    induced_marginal_domain,
)

DEFAULT_MAX_ALTERNATIVES = 8
DEFAULT_MAX_ELEMENTS = 8


@dataclass(frozen=True)
class Thresholds:
    lower: tuple
    upper: tuple

    def component(self, s: int) -> tuple:
        return self.lower[s], self.upper[s]

    def __str__(self) -> str:
        fmt = lambda a: ",".join(map(str, a))  # noqa: E731
        return f"{fmt(self.lower)}:{fmt(self.upper)}"


@dataclass(frozen=True)
class HybridRepresentation:
    """A linear order ``order`` (lowest first) plus marginal thresholds on it."""

    component: int
    order: tuple
    lower: int
    upper: int

    @property
    def interval_size(self) -> int:
        i, j = self.order.index(self.lower), self.order.index(self.upper)
        return abs(i - j) + 1


def is_marginal_thresholds(lo: int, up: int) -> bool:
    return lo == up or abs(lo - up) + 1 >= 3


def validate_thresholds(space: ProductSpace, t: Thresholds) -> bool:
    if len(t.lower) != space.m or len(t.upper) != space.m:
        return False
    for s, k in enumerate(space.sizes):
        lo, up = t.lower[s], t.upper[s]
        if not (0 <= lo < k and 0 <= up < k):
            return False
        if not is_marginal_thresholds(lo, up):
            return False
    return True


def _require_thresholds(space, t):
    if not validate_thresholds(space, t):
        raise InputError(f"{t} are not thresholds on a {space} space")


def extreme_thresholds(space: ProductSpace) -> Thresholds:
    """``min``/``max`` on components with at least three elements, tied elsewhere."""
    lower = tuple(0 for _ in space.sizes)
    upper = tuple(k - 1 if k >= 3 else 0 for k in space.sizes)
    return Thresholds(lower, upper)


# -- separability -----------------------------------------------------------

def separable_marginals(p: Preference):
    """The unique separability witness ``(P^1, ..., P^m)``, or ``None``."""
    space = p.space
    witness = []
    for s in range(space.m):
        rests = space.others(s)
        ref = induce_marginal_at(p, s, rests[0])
        for z in rests[1:]:
            if induce_marginal_at(p, s, z).ranking != ref.ranking:
                return None
        witness.append(ref)
    return tuple(witness)


def is_separable(p: Preference) -> bool:
    return separable_marginals(p) is not None


# -- pairwise requirement tables -------------------------------------------
#
# Every restriction below has the shape "for similar a, b with M(a,b) = {s}:
# <condition on the peak's s-coordinate, a^s, b^s> implies a P b".  For each
# space the required pairs are tabulated per peak once, then reused.

def _similar_pairs(space: ProductSpace, s: int):
    for z in space.others(s):
        line = [space.index(a) for a in space.line(s, z)]
        for x, y in itertools.permutations(range(space.sizes[s]), 2):
            yield x, y, line[x], line[y]


def _between(x, a, b) -> bool:
    return min(a, b) <= x <= max(a, b)


def _strictly_between(x, a, b) -> bool:
    return min(a, b) < x < max(a, b)


def _mh_condition(xs, as_, bs, lo, up) -> bool:
    if as_ == xs:
        return True
    return _strictly_between(as_, xs, bs) and not _strictly_between(as_, lo, up)


def _ts_condition(xs, as_, bs, lo, up) -> bool:
    return as_ == xs


def _msp_condition(xs, as_, bs, lo, up) -> bool:
    return _between(as_, xs, bs)


_CONDITIONS = {"mh": _mh_condition, "ts": _ts_condition, "msp": _msp_condition}


@lru_cache(maxsize=None)
def _requirements(space: ProductSpace, s: int, kind: str, lo: int = 0, up: int = 0) -> tuple:
    """Per peak index: tuple of (better, worse) alternative index pairs."""
    cond = _CONDITIONS[kind]
    table = []
    for peak in space.alternatives:
        xs = peak[s]
        table.append(tuple((ia, ib) for x, y, ia, ib in _similar_pairs(space, s)
                           if cond(xs, x, y, lo, up)))
    return tuple(table)


def _meets(p: Preference, reqs) -> bool:
    pos = p.pos
    return all(pos[a] < pos[b] for a, b in reqs[p.order[0]])


def _component_mh(p: Preference, s: int, lo: int, up: int) -> bool:
    return _meets(p, _requirements(p.space, s, "mh", lo, up))


def is_top_separable(p: Preference) -> bool:
    return all(_meets(p, _requirements(p.space, s, "ts")) for s in range(p.space.m))


def is_msp_preference(p: Preference) -> bool:
    return all(_meets(p, _requirements(p.space, s, "msp")) for s in range(p.space.m))


def is_mh_preference(p: Preference, t: Thresholds) -> bool:
    _require_thresholds(p.space, t)
    return all(_component_mh(p, s, t.lower[s], t.upper[s]) for s in range(p.space.m))


# -- marginal restrictions --------------------------------------------------

def _hybrid_on_axis(mp_pos, axis_pos, lo, up) -> bool:
    """Hybridness of a marginal (given by positions) on an arbitrary axis."""
    k = len(mp_pos)
    peak = min(range(k), key=lambda e: mp_pos[e])
    xs, l, u = axis_pos[peak], axis_pos[lo], axis_pos[up]
    for a in range(k):
        pa = axis_pos[a]
        if pa == xs or _strictly_between(pa, l, u):
            continue
        for b in range(k):
            if b != a and _strictly_between(pa, xs, axis_pos[b]) and mp_pos[b] < mp_pos[a]:
                return False
    return True


def is_hybrid_marginal(mp: MarginalPreference, lower: int, upper: int) -> bool:
    """Hybridness w.r.t. marginal thresholds on the natural order."""
    k = mp.size
    if not (0 <= lower < k and 0 <= upper < k) or not is_marginal_thresholds(lower, upper):
        raise InputError(f"({lower}, {upper}) are not marginal thresholds on {k} elements")
    return _hybrid_on_axis(mp.pos, tuple(range(k)), lower, upper)


def is_semi_separable(p: Preference, marginal_domains, diagnostics: list | None = None) -> bool:
    """Semi-separability of ``p`` relative to per-component marginal domains.

    When a component's marginal domain has no order peaked at the peak's
    coordinate, "every such marginal ranks a^s above b^s" holds vacuously for
    every pair, so the component forces both orders and the test fails for
    any pair disagreeing there.  Such components are appended to
    ``diagnostics`` when a list is passed.
    """
    space = p.space
    x = p.peak
    if len(marginal_domains) != space.m or any(len(ds) == 0 for ds in marginal_domains):
        raise InputError("need a nonempty marginal domain for every component")
    # beats[s][a][b]: a^s above b^s in every marginal of D^s peaked at x^s
    beats = []
    for s, ds in enumerate(marginal_domains):
        k = space.sizes[s]
        peaked = [mp for mp in ds if mp.peak == x[s]]
        if not peaked and diagnostics is not None:
            diagnostics.append({"component": s, "reason": "no marginal peaked at the peak coordinate"})
        beats.append([[a != b and all(mp.prefers(a, b) for mp in peaked) for b in range(k)]
                      for a in range(k)])
    alts = space.alternatives
    pos = p.pos
    for ia, a in enumerate(alts):
        for ib, b in enumerate(alts):
            if ia == ib:
                continue
            if all(beats[s][a[s]][b[s]] for s in range(space.m) if a[s] != b[s]):
                if pos[ia] > pos[ib]:
                    return False
    return True


# -- generators -------------------------------------------------------------

def _guarded(space: ProductSpace, max_alternatives):
    if max_alternatives is not None and space.n_alternatives > max_alternatives:
        raise ResourceError(
            f"{space.n_alternatives}! orders exceed the guard of {max_alternatives} alternatives")
    return all_preferences(space)


def gen_universal(space: ProductSpace, max_alternatives=DEFAULT_MAX_ALTERNATIVES) -> Domain:
    return Domain(space, _guarded(space, max_alternatives))


def gen_mh_domain(space: ProductSpace, t: Thresholds,
                  max_alternatives=DEFAULT_MAX_ALTERNATIVES) -> Domain:
    _require_thresholds(space, t)
    return Domain(space, (p for p in _guarded(space, max_alternatives) if is_mh_preference(p, t)))


def gen_msp_domain(space: ProductSpace, max_alternatives=DEFAULT_MAX_ALTERNATIVES) -> Domain:
    return Domain(space, (p for p in _guarded(space, max_alternatives) if is_msp_preference(p)))


def gen_top_separable_domain(space: ProductSpace,
                             max_alternatives=DEFAULT_MAX_ALTERNATIVES) -> Domain:
    return Domain(space, (p for p in _guarded(space, max_alternatives) if is_top_separable(p)))


def gen_separable_domain(space: ProductSpace, max_alternatives=DEFAULT_MAX_ALTERNATIVES) -> Domain:
    return Domain(space, (p for p in _guarded(space, max_alternatives) if is_separable(p)))


# -- MH domain test ---------------------------------------------------------

def component_threshold_candidates(k: int):
    """Marginal threshold pairs ``(lo, up)`` with ``lo <= up``, lexicographic."""
    return [(lo, up) for lo in range(k) for up in range(lo, k) if is_marginal_thresholds(lo, up)]


def mh_domain_diagnostics(domain: Domain) -> list:
    """Per component: which threshold pairs pass each condition of an MH domain."""
    from .graphs import build_elem_graph, is_connected, leaves

    space = domain.space
    report = []
    for s, k in enumerate(space.sizes):
        ds = induced_marginal_domain(domain, s)
        full = build_elem_graph(ds, range(k))
        connected = is_connected(full)
        entries = []
        for lo, up in component_threshold_candidates(k):
            ok_i = all(_component_mh(p, s, lo, up) for p in domain)
            no_leaf = True
            if lo != up:
                no_leaf = not leaves(build_elem_graph(ds, range(lo, up + 1)))
            entries.append({"thresholds": (lo, up), "all_mh": ok_i, "no_leaf": no_leaf,
                            "ok": ok_i and connected and no_leaf})
        report.append({"component": s, "connected": connected, "candidates": entries})
    return report


def is_mh_domain(domain: Domain, all_thresholds: bool = False):
    """Thresholds witnessing that ``domain`` is an MH domain, or ``None``.

    Both conditions split over components, so each component is searched on
    its own and the first success (lexicographic) is combined.  With
    ``all_thresholds`` every qualifying :class:`Thresholds` is returned as a
    list instead.
    """
    per_component = []
    for entry in mh_domain_diagnostics(domain):
        good = [c["thresholds"] for c in entry["candidates"] if c["ok"]]
        if not good:
            return [] if all_thresholds else None
        per_component.append(good)
    combos = itertools.product(*per_component)
    if not all_thresholds:
        first = next(combos)
        return Thresholds(tuple(c[0] for c in first), tuple(c[1] for c in first))
    return [Thresholds(tuple(c[0] for c in combo), tuple(c[1] for c in combo)) for combo in combos]


def find_hybrid_representation(ds, max_elements=DEFAULT_MAX_ELEMENTS):
    """Smallest-interval hybrid representation of the marginal domain ``ds``.

    Orders are taken up to reversal (first element below last).  Among all
    (order, thresholds) making every marginal in ``ds`` hybrid, the one with
    the fewest elements in the threshold interval wins, ties broken by
    ``(order, lower position, upper position)``.
    """
    ds = list(ds)
    if not ds:
        raise InputError("empty marginal domain")
    k = ds[0].size
    if max_elements is not None and k > max_elements:
        raise ResourceError(f"{k} elements exceed the guard of {max_elements}")
    best = None
    for order in itertools.permutations(range(k)):
        if order[0] > order[-1]:
            continue
        axis_pos = [0] * k
        for i, e in enumerate(order):
            axis_pos[e] = i
        for i in range(k):
            for j in range(i, k):
                if not (i == j or j - i + 1 >= 3):
                    continue
                key = (j - i + 1, order, i, j)
                if best is not None and key >= best[0]:
                    continue
                if all(_hybrid_on_axis(mp.pos, axis_pos, order[i], order[j]) for mp in ds):
                    best = (key, HybridRepresentation(ds[0].component, order, order[i], order[j]))
    return None if best is None else best[1]


def induced_marginals_are_hybrid(domain: Domain, t: Thresholds) -> bool:
    return all(is_hybrid_marginal(induce_marginal(p, s), t.lower[s], t.upper[s])
               for p in domain for s in range(domain.space.m))


def is_mh_domain_for(domain: Domain, t: Thresholds) -> bool:
    """Whether ``domain`` is an MH domain with respect to the given thresholds."""
    _require_thresholds(domain.space, t)
    for entry in mh_domain_diagnostics(domain):
        want = t.component(entry["component"])
        if not any(c["ok"] for c in entry["candidates"] if c["thresholds"] == want):
            return False
    return True
