"""
Exhaustive enumeration of fixed ballot rules and strategy-proof rules, and the
verifiers built on top of them.

Strategy-proof rules are found with a small binary constraint solver.  Each
profile is a variable whose values are outcomes.  Two profiles that differ
only in voter ``i``'s report (``P_i`` versus ``P_i'``) are linked by the
constraint that neither report gains at the other's outcome, so every
assignment prunes both directions.  Unanimity fixes cells up front and the
search maintains arc consistency (MAC) while branching on the cell with the
fewest remaining values.
"""

from __future__ import annotations

import itertools
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import Domain, InputError, ProductSpace, ResourceError, induced_marginal_domain
from .domains import Thresholds, is_mh_domain, is_mh_domain_for
from .graphs import is_rich_domain
from . import rules as R

VERIFIED = "verified"
REFUTED = "refuted"
EXHAUSTED = "budget-exhausted"
UNMET = "hypothesis-unmet"
STATUSES = (VERIFIED, REFUTED, EXHAUSTED, UNMET)


@dataclass(frozen=True)
class EnumerationBudget:
    max_nodes: int = 10**8
    max_seconds: float = 300.0

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise InputError("budget caps must be positive")

    @classmethod
    def from_env(cls) -> "EnumerationBudget":
        """Defaults overridden by ``MHYBRID_BUDGET_NODES`` / ``MHYBRID_BUDGET_SECONDS``."""
        try:
            nodes = int(os.environ.get("MHYBRID_BUDGET_NODES", 10**8))
            seconds = float(os.environ.get("MHYBRID_BUDGET_SECONDS", 300.0))
        except ValueError as exc:
            raise InputError(f"bad budget environment variable: {exc}") from None
        return cls(nodes, seconds)


@dataclass
class EnumerationResult:
    rules: list
    exhausted: bool = False
    nodes: int = 0
    elapsed: float = 0.0


@dataclass
class VerificationReport:
    claim: str
    status: str
    scope: dict
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == REFUTED and not self.witnesses:
            raise ValueError("a refuted report needs a witness")

    @property
    def ok(self) -> bool:
        return self.status == VERIFIED


def scope_of(space: ProductSpace, n: int, **extra) -> dict:
    scope = {"n": n, "sizes": str(space)}
    scope.update(extra)
    scope["limit"] = "checked only for the n and sizes listed here"
    return scope


# -- constraint engine --------------------------------------------------------

def _allow_masks(ranks: np.ndarray) -> np.ndarray:
    """``out[p, q, v]``: bitmask of outcomes ``w`` compatible with ``v`` across a ``p``/``q`` switch.

    Compatible means ``w == v`` or (``v`` beats ``w`` under ``p`` and ``w`` beats
    ``v`` under ``q``), i.e. neither report gains by switching to the other.
    """
    k = ranks.shape[1]
    rp = ranks[:, None, :, None]   # p, -, v, -
    rpw = ranks[:, None, None, :]  # p, -, -, w
    rq_w = ranks[None, :, None, :]  # -, q, -, w
    rq_v = ranks[None, :, :, None]  # -, q, v, -
    ok = (rp < rpw) & (rq_w < rq_v)
    ok |= np.eye(k, dtype=bool)[None, None]
    weights = (1 << np.arange(k, dtype=np.int64))
    return (ok * weights).sum(axis=3)


class _Csp:
    """Tables over ``T^n`` cells with outcomes in ``0..k-1``."""

    def __init__(self, allow, type_peaks, n: int, k: int):
        self.allow = [[list(map(int, row)) for row in plane] for plane in allow]
        self.peaks = list(type_peaks)
        self.t, self.n, self.k = len(self.peaks), n, k
        t = self.t
        self.strides = [t ** (n - 1 - i) for i in range(n)]
        self.cells = t ** n
        self._nbrs = {}
        self.deadline = None
        # branch on cells whose peak vector is most common first
        vecs = [tuple(self.peaks[x] for x in self.digits(c)) for c in range(self.cells)]
        freq = {}
        for v in vecs:
            freq[v] = freq.get(v, 0) + 1
        self.priority = sorted(range(self.cells), key=lambda c: (-freq[vecs[c]], c))
        self._memo = {}

    def digits(self, c):
        return [(c // st) % self.t for st in self.strides]

    def nbrs(self, c):
        """Cells differing from ``c`` in one voter's report, as ``(cell, type_at_c, type_there)``."""
        row = self._nbrs.get(c)
        if row is None:
            row = []
            for i, st in enumerate(self.strides):
                p = (c // st) % self.t
                base = c - p * st
                row.extend((base + q * st, p, q) for q in range(self.t) if q != p)
            self._nbrs[c] = row
        return row

    def initial(self):
        full = (1 << self.k) - 1
        dom = [full] * self.cells
        for c in range(self.cells):
            ps = {self.peaks[x] for x in self.digits(c)}
            if len(ps) == 1:
                dom[c] = 1 << ps.pop()
        return dom

    def _support(self, p, q, mask):
        if mask & (mask - 1) == 0:
            return self.allow[p][q][mask.bit_length() - 1]
        key = (p, q, mask)
        sup = self._memo.get(key)
        if sup is None:
            sup = 0
            row = self.allow[p][q]
            m, v = mask, 0
            while m:
                if m & 1:
                    sup |= row[v]
                m >>= 1
                v += 1
            self._memo[key] = sup
        return sup

    def propagate(self, dom, seeds) -> bool:
        queue = deque(seeds)
        inq = set(queue)
        pops = 0
        while queue:
            x = queue.popleft()
            inq.discard(x)
            pops += 1
            if self.deadline is not None and pops % 4096 == 0 and time.monotonic() > self.deadline:
                raise _OutOfTime
            dx = dom[x]
            for y, p, q in self.nbrs(x):
                dy = dom[y]
                ny = dy & self._support(p, q, dx)
                if ny != dy:
                    if not ny:
                        return False
                    dom[y] = ny
                    if y not in inq:
                        inq.add(y)
                        queue.append(y)
        return True

    def pick(self, dom):
        best, best_count = None, None
        for c in self.priority:
            cnt = dom[c].bit_count()
            if cnt > 1 and (best_count is None or cnt < best_count):
                best, best_count = c, cnt
                if cnt == 2:
                    break
        return best

    def solve(self, dom, budget: EnumerationBudget, start=None):
        """All solutions below ``dom`` (already propagated); returns (solutions, nodes, exhausted)."""
        start = time.monotonic() if start is None else start
        self.deadline = start + budget.max_seconds
        solutions, nodes = [], 0
        stack = [dom]
        while stack:
            cur = stack.pop()
            c = self.pick(cur)
            if c is None:
                solutions.append(tuple(m.bit_length() - 1 for m in cur))
                continue
            m = cur[c]
            values = []
            while m:
                low = m & -m
                values.append(low)
                m ^= low
            for bit in reversed(values):
                nodes += 1
                if nodes > budget.max_nodes or (nodes % 512 == 0 and time.monotonic() - start > budget.max_seconds):
                    return solutions, nodes, True
                nxt = list(cur)
                nxt[c] = bit
                try:
                    if self.propagate(nxt, [c]):
                        stack.append(nxt)
                except _OutOfTime:
                    return solutions, nodes, True
        return solutions, nodes, False

    def enumerate(self, budget: EnumerationBudget, workers: int = 1):
        start = time.monotonic()
        self.deadline = start + budget.max_seconds
        dom = self.initial()
        fixed = [c for c, m in enumerate(dom) if m & (m - 1) == 0]
        try:
            if not self.propagate(dom, fixed or range(self.cells)):
                return [], 0, False, time.monotonic() - start
        except _OutOfTime:
            return [], 0, True, time.monotonic() - start
        c = self.pick(dom)
        if workers <= 1 or c is None:
            sols, nodes, exhausted = self.solve(dom, budget, start)
        else:
            branches = []
            m = dom[c]
            while m:
                low = m & -m
                m ^= low
                nxt = list(dom)
                nxt[c] = low
                try:
                    if self.propagate(nxt, [c]):
                        branches.append(nxt)
                except _OutOfTime:
                    return [], 0, True, time.monotonic() - start
            sols, nodes, exhausted = [], len(branches), False
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for s, nd, ex in pool.map(_solve_branch, [(self, b, budget) for b in branches]):
                    sols.extend(s)
                    nodes += nd
                    exhausted |= ex
        return sorted(set(sols)), nodes, exhausted, time.monotonic() - start


class _OutOfTime(Exception):
    pass


def _solve_branch(args):
    csp, dom, budget = args
    return csp.solve(dom, budget)


def _check_size(types: int, n: int, max_cells):
    if n < 2:
        raise InputError("need at least two voters")
    if max_cells is not None and types ** n > max_cells:
        raise ResourceError(f"{types}^{n} profiles exceed the guard of {max_cells} cells")


# -- enumerators --------------------------------------------------------------

def enum_fbrs(space: ProductSpace, s: int, n: int, constrained=None, budget: EnumerationBudget | None = None) -> list:
    """Every FBR on component ``s`` for ``n`` voters, sorted by ballots.

    Ballots are filled in increasing bitmask order, so every proper subset of
    a coalition is assigned before it and monotonicity gives the lower bound.
    With ``constrained=(lower, upper)`` only constrained dictatorships are kept,
    pruned per candidate dictator during generation.
    """
    space.check_component(s)
    if not 2 <= n <= R.MAX_VOTERS:
        raise InputError(f"voter count {n} outside 2..{R.MAX_VOTERS}")
    k = space.sizes[s]
    budget = budget or EnumerationBudget()
    full = (1 << n) - 1
    if constrained is not None:
        lower, upper = constrained
        space.check_element(s, lower)
        space.check_element(s, upper)
        if not lower < upper:
            raise InputError(f"constrained FBRs need lower < upper, got {lower}, {upper}")
        dictators = range(n)
    else:
        dictators = [None]
    found = set()
    nodes = 0
    start = time.monotonic()
    for dictator in dictators:
        b = [0] * (full + 1)
        b[full] = k - 1

        def bounds(mask):
            lb = max((b[mask ^ (1 << i)] for i in range(n) if mask >> i & 1), default=0)
            ub = k - 1
            if dictator is not None:
                if mask >> dictator & 1:
                    lb = max(lb, upper)
                else:
                    ub = lower
            return lb, ub

        def fill(mask):
            nonlocal nodes
            nodes += 1
            if nodes > budget.max_nodes or time.monotonic() - start > budget.max_seconds:
                raise ResourceError(f"FBR enumeration exceeded the budget after {nodes} nodes")
            if mask == full:
                lb, ub = bounds(full)
                if lb <= k - 1 <= ub:
                    found.add(tuple(b))
                return
            if mask == 0:
                if dictator is None or 0 <= lower:
                    fill(1)
                return
            lb, ub = bounds(mask)
            for v in range(lb, ub + 1):
                b[mask] = v
                fill(mask + 1)

        fill(0)
    return [R.Fbr(s, n, k, ballots) for ballots in sorted(found)]


def enum_sp_marginal_rules(ds, n: int, budget: EnumerationBudget | None = None,
                           workers: int = 1, max_cells=R.DEFAULT_MAX_CELLS) -> EnumerationResult:
    """All unanimous strategy-proof marginal rules on ``ds``, sorted by table."""
    ds = tuple(ds)
    if not ds:
        raise InputError("empty marginal domain")
    _check_size(len(ds), n, max_cells)
    budget = budget or EnumerationBudget()
    ranks = np.array([mp.pos for mp in ds])
    csp = _Csp(_allow_masks(ranks), [mp.peak for mp in ds], n, ds[0].size)
    sols, nodes, exhausted, elapsed = csp.enumerate(budget, workers)
    shape = (len(ds),) * n
    out = []
    for sol in sols:
        f = R.MarginalScf(ds, n, np.array(sol).reshape(shape))
        if not (R.is_unanimous(f) and R.is_strategy_proof(f)):
            raise AssertionError("constraint search produced a rule the checker rejects")
        out.append(f)
    return EnumerationResult(out, exhausted, nodes, elapsed)


def enum_sp_rules(domain: Domain, n: int, mode: str = "full", budget: EnumerationBudget | None = None,
                  workers: int = 1, max_cells=R.DEFAULT_MAX_CELLS) -> EnumerationResult:
    """All unanimous strategy-proof SCFs on ``domain`` (``mode='full'``), or the tops-only ones.

    In ``tops_only`` mode the search runs over peak profiles only; every
    scheme found is lifted to the full domain and re-checked there, and
    schemes failing that check are dropped.
    """
    if mode not in ("full", "tops_only"):
        raise InputError(f"unknown mode {mode!r}")
    budget = budget or EnumerationBudget()
    d = len(domain)
    _check_size(d, n, max_cells)
    ranks = np.array([p.pos for p in domain])
    allow = _allow_masks(ranks)
    k = domain.space.n_alternatives
    pref_peaks = [p.order[0] for p in domain]
    if mode == "full":
        csp = _Csp(allow, pref_peaks, n, k)
        type_of = np.arange(d)
    else:
        tops = sorted(set(pref_peaks))
        members = [[j for j in range(d) if pref_peaks[j] == u] for u in tops]
        full = (1 << k) - 1
        grouped = np.full((len(tops), len(tops), k), full, dtype=np.int64)
        for a, ga in enumerate(members):
            for b, gb in enumerate(members):
                if a != b:
                    grouped[a, b] = np.bitwise_and.reduce(allow[np.ix_(ga, gb)].reshape(-1, k), axis=0)
        csp = _Csp(grouped, tops, n, k)
        type_of = np.array([tops.index(u) for u in pref_peaks])
    sols, nodes, exhausted, elapsed = csp.enumerate(budget, workers)
    idx = np.ix_(*([type_of] * n))
    shape = (csp.t,) * n
    out = []
    for sol in sols:
        table = np.array(sol).reshape(shape)[idx]
        f = R.Scf(domain, n, table, max_cells=max_cells)
        valid = R.is_unanimous(f) and R.is_strategy_proof(f)
        if not valid:
            if mode == "full":
                raise AssertionError("constraint search produced a rule the checker rejects")
            continue
        out.append(f)
    out.sort(key=lambda f: f.key)
    return EnumerationResult(out, exhausted, nodes, elapsed)


# -- witnesses ------------------------------------------------------------------

def manipulation_witness(f, m: R.Manipulation) -> dict:
    """A manipulation with 1-based voter and preference indices plus decoded rankings."""
    w = {"kind": "manipulation", "voter": m.voter + 1,
         "sincere_profile": [j + 1 for j in m.sincere],
         "misreport_profile": [j + 1 for j in m.misreport]}
    if isinstance(f, R.Scf):
        dom = f.domain
        alts = dom.space.alternatives
        w["sincere_preference"] = dom.format_preference(dom[m.sincere[m.voter]])
        w["misreport_preference"] = dom.format_preference(dom[m.misreport[m.voter]])
        w["sincere_outcome"] = dom.format_alternative(alts[m.sincere_outcome])
        w["misreport_outcome"] = dom.format_alternative(alts[m.misreport_outcome])
    else:
        w["sincere_preference"] = str(f.marginals[m.sincere[m.voter]])
        w["misreport_preference"] = str(f.marginals[m.misreport[m.voter]])
        w["sincere_outcome"] = m.sincere_outcome
        w["misreport_outcome"] = m.misreport_outcome
    return w


def describe_marginal(f: R.MarginalScf) -> str:
    fbr = R.fbr_from_rule(f)
    if fbr is not None:
        return "fbr ballots=" + ",".join(map(str, fbr.ballots))
    return "table=" + ",".join(map(str, f.key))


# -- verifiers ------------------------------------------------------------------

def verify_proposition1(domain: Domain, t: Thresholds, s: int, n: int,
                        budget: EnumerationBudget | None = None, workers: int = 1) -> VerificationReport:
    """SP marginal rules on ``[D]^s`` versus (constrained) FBR images, as sets of tables."""
    space = domain.space
    space.check_component(s)
    lo, up = t.component(s)
    scope = scope_of(space, n, component=s + 1, thresholds=f"{domain.label(s, lo)}:{domain.label(s, up)}")
    claim = "sp-marginal-rules-are-fbrs"
    if not is_mh_domain_for(domain, t):
        return VerificationReport(claim, UNMET, scope, details={"reason": f"not an MH domain for thresholds {t}"})
    ds = induced_marginal_domain(domain, s)
    res = enum_sp_marginal_rules(ds, n, budget, workers)
    counts = {"sp_marginal_rules": len(res.rules), "nodes": res.nodes}
    if res.exhausted:
        return VerificationReport(claim, EXHAUSTED, scope, counts)
    constrained = (lo, up) if lo != up else None
    fbrs = enum_fbrs(space, s, n, constrained, budget)
    images = {R.fbr_rule(fb, ds).key: fb for fb in fbrs}
    counts["fbrs"] = len(fbrs)
    counts["fbr_images"] = len(images)
    found = {f.key: f for f in res.rules}
    details = {"fbr_kind": "constrained" if constrained else "unconstrained",
               "summary": f"{len(found)} SP marginal rules vs {len(images)} "
                          f"{'constrained ' if constrained else ''}FBRs"}
    witnesses = []
    for key in sorted(set(found) - set(images)):
        witnesses.append({"kind": "sp-rule-not-fbr", "rule": describe_marginal(found[key])})
    for key in sorted(set(images) - set(found)):
        witnesses.append({"kind": "fbr-not-sp", "ballots": list(images[key].ballots)})
    return VerificationReport(claim, REFUTED if witnesses else VERIFIED, scope, counts, witnesses, details)


def _check_assemblies(domain, per_component, n, budget, start):
    """First failing assembly of SP marginal rules, and how many were checked."""
    checked = 0
    for combo in itertools.product(*per_component):
        if time.monotonic() - start > budget.max_seconds:
            return None, checked, True
        f = R.assemble(combo, domain)
        checked += 1
        if not R.is_unanimous(f):
            return {"kind": "assembly-not-unanimous",
                    "marginals": " | ".join(describe_marginal(g) for g in combo)}, checked, False
        m = R.find_manipulation(f)
        if m is not None:
            w = manipulation_witness(f, m)
            w["kind"] = "assembly-manipulable"
            w["marginals"] = " | ".join(describe_marginal(g) for g in combo)
            return w, checked, False
    return None, checked, False


def verify_decomposable_domain(domain: Domain, n: int, budget: EnumerationBudget | None = None,
                               workers: int = 1, directions=("if", "only_if")) -> VerificationReport:
    """Check both directions of decomposability at a fixed ``n``.

    ``if``: every assembly of SP marginal rules is an SP rule.
    ``only_if``: every SP rule decomposes into SP marginal rules.
    Each direction's outcome is reported separately in ``details``.
    """
    budget = budget or EnumerationBudget()
    start = time.monotonic()
    space = domain.space
    scope = scope_of(space, n, domain_size=len(domain))
    claim = "decomposable-domain"
    counts, details, witnesses = {}, {}, []

    per_component, marginal_keys, marginal_done = [], [], True
    for s in range(space.m):
        res = enum_sp_marginal_rules(induced_marginal_domain(domain, s), n, budget, workers)
        per_component.append(res.rules)
        marginal_keys.append({f.key for f in res.rules})
        counts[f"sp_marginal_rules_component_{s + 1}"] = len(res.rules)
        marginal_done &= not res.exhausted

    if "if" in directions:
        if not marginal_done:
            details["if"] = EXHAUSTED
        else:
            w, checked, ex = _check_assemblies(domain, per_component, n, budget, start)
            counts["assemblies_checked"] = checked
            if w is not None:
                details["if"] = "fails"
                witnesses.append(w)
            else:
                details["if"] = EXHAUSTED if ex else "holds"
    else:
        details["if"] = "skipped"

    if "only_if" in directions:
        res = enum_sp_rules(domain, n, "full", budget, workers)
        counts["sp_rules"] = len(res.rules)
        counts["nodes"] = res.nodes
        verdict = EXHAUSTED if res.exhausted else "holds"
        for f in res.rules:
            try:
                parts = R.decompose(f)
            except R.NotDecomposable as exc:
                witnesses.append({"kind": "not-decomposable", "component": exc.component + 1,
                                  "first_profile": [j + 1 for j in exc.first],
                                  "second_profile": [j + 1 for j in exc.second]})
                verdict = "fails"
                break
            bad = [s for s, g in enumerate(parts)
                   if not (g.key in marginal_keys[s] if marginal_done else R.is_strategy_proof(g))]
            if bad:
                witnesses.append({"kind": "component-not-sp", "component": bad[0] + 1,
                                  "rule": describe_marginal(parts[bad[0]])})
                verdict = "fails"
                break
        details["only_if"] = verdict
    else:
        details["only_if"] = "skipped"

    states = [details["if"], details["only_if"]]
    if "fails" in states:
        status = REFUTED
    elif EXHAUSTED in states or "skipped" in states:
        status = EXHAUSTED if EXHAUSTED in states else VERIFIED
    else:
        status = VERIFIED
    if "skipped" in states and status == VERIFIED:
        details["note"] = "only the requested directions were checked"
    return VerificationReport(claim, status, scope, counts, witnesses, details)


def verify_theorem(domain: Domain, n: int, budget: EnumerationBudget | None = None,
                   workers: int = 1) -> VerificationReport:
    """On a rich domain: MH domain iff decomposable domain, at this ``n``."""
    space = domain.space
    scope = scope_of(space, n, domain_size=len(domain))
    claim = "rich-domain-mh-iff-decomposable"
    if not is_rich_domain(domain):
        return VerificationReport(claim, UNMET, scope, details={"reason": "domain is not rich"})
    t = is_mh_domain(domain)
    dec = verify_decomposable_domain(domain, n, budget, workers)
    details = {"mh_domain": t is not None, "thresholds": str(t) if t is not None else "none",
               "decomposition": dec.status, "if": dec.details["if"], "only_if": dec.details["only_if"]}
    if dec.status == EXHAUSTED:
        return VerificationReport(claim, EXHAUSTED, scope, dec.counts, dec.witnesses, details)
    decomposable = dec.status == VERIFIED
    details["decomposable"] = decomposable
    agree = decomposable == (t is not None)
    details["summary"] = ("both sides " + ("true" if decomposable else "false")) if agree else "sides disagree"
    witnesses = list(dec.witnesses)
    if not agree and not witnesses:
        witnesses.append({"kind": "mh-but-not-decomposable" if t is not None else "decomposable-but-not-mh"})
    return VerificationReport(claim, VERIFIED if agree else REFUTED, scope, dec.counts, witnesses, details)
