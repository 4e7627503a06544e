"""
Social choice functions as dense tables, their axioms, fixed ballot rules,
and the decompose/assemble pair.

Tables are numpy arrays with one axis per voter.  An :class:`Scf` axis runs
over domain preference indices and cells hold alternative indices; a
:class:`MarginalScf` axis runs over a list of marginal preferences and cells
hold elements of that component.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import Domain, InputError, MarginalPreference, ProductSpace, ResourceError, induce_marginal

DEFAULT_MAX_CELLS = 10**6
MAX_VOTERS = 16


def _check_cells(d: int, n: int, max_cells):
    if n < 2:
        raise InputError(f"need at least two voters, got {n}")
    if max_cells is not None and d ** n > max_cells:
        raise ResourceError(f"{d}^{n} profiles exceed the table guard of {max_cells} cells")


class _Table:
    """Shared behaviour for voter-indexed tables."""

    table: np.ndarray
    n: int

    @property
    def key(self) -> tuple:
        return tuple(int(v) for v in self.table.ravel())

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._ident() == other._ident() and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self._ident(), self.table.tobytes()))

    def __call__(self, *profile):
        return int(self.table[tuple(profile)])


class Scf(_Table):
    """``f: D^n -> A`` with cells holding alternative indices."""

    def __init__(self, domain: Domain, n: int, table, max_cells=DEFAULT_MAX_CELLS):
        _check_cells(len(domain), n, max_cells)
        table = np.asarray(table, dtype=np.int32)
        if table.shape != (len(domain),) * n:
            raise InputError(f"table shape {table.shape} does not cover all {len(domain)}^{n} profiles")
        if table.size and (table.min() < 0 or table.max() >= domain.space.n_alternatives):
            raise InputError("table holds an out-of-range alternative")
        self.domain, self.n, self.table = domain, n, table

    def _ident(self):
        return ("scf", self.domain.space, self.domain.prefs, self.n)

    @classmethod
    def from_function(cls, domain: Domain, n: int, fn, max_cells=DEFAULT_MAX_CELLS):
        """Tabulate ``fn(*prefs) -> alternative tuple``."""
        _check_cells(len(domain), n, max_cells)
        table = np.empty((len(domain),) * n, dtype=np.int32)
        for prof in itertools.product(range(len(domain)), repeat=n):
            table[prof] = domain.space.index(fn(*(domain[i] for i in prof)))
        return cls(domain, n, table)

    def outcome(self, profile) -> tuple:
        return self.domain.space.alternatives[self(*profile)]

    # uniform views used by the axiom checkers
    def _ranks(self):
        return np.array([p.pos for p in self.domain], dtype=np.int32)

    def _peaks(self):
        return np.array([p.order[0] for p in self.domain], dtype=np.int32)

    @property
    def n_values(self) -> int:
        return self.domain.space.n_alternatives


class MarginalScf(_Table):
    """``f^s: [D^s]^n -> A^s`` over an explicit list of marginal preferences."""

    def __init__(self, marginals, n: int, table, max_cells=DEFAULT_MAX_CELLS):
        marginals = tuple(marginals)
        if not marginals:
            raise InputError("empty marginal domain")
        _check_cells(len(marginals), n, max_cells)
        table = np.asarray(table, dtype=np.int32)
        if table.shape != (len(marginals),) * n:
            raise InputError("table does not cover every marginal profile")
        self.marginals, self.n, self.table = marginals, n, table
        self.component = marginals[0].component
        self.size = marginals[0].size

    def _ident(self):
        return ("mscf", tuple(mp.ranking for mp in self.marginals), self.n)

    def _ranks(self):
        return np.array([mp.pos for mp in self.marginals], dtype=np.int32)

    def _peaks(self):
        return np.array([mp.peak for mp in self.marginals], dtype=np.int32)

    @property
    def n_values(self) -> int:
        return self.size


@dataclass(eq=False)
class VotingScheme:
    """``g: A^n -> A`` on peak profiles; ``-1`` marks peaks absent from the domain."""

    space: ProductSpace
    n: int
    table: np.ndarray

    def __call__(self, *peaks) -> tuple:
        idx = tuple(self.space.index(a) for a in peaks)
        return self.space.alternatives[int(self.table[idx])]


@dataclass(frozen=True)
class Manipulation:
    voter: int
    sincere: tuple
    misreport: tuple
    sincere_outcome: int
    misreport_outcome: int


# -- axioms ---------------------------------------------------------------------

def find_manipulation(f) -> Manipulation | None:
    """Lexicographically first ``(i, P_i, P_i', P_-i)`` where ``i`` gains by lying."""
    ranks = f._ranks()
    d, n = f.table.shape[0], f.n
    for i in range(n):
        t = np.moveaxis(f.table, i, 0).reshape(d, -1)
        for p in range(d):
            rp = ranks[p]
            sincere = rp[t[p]]
            better = rp[t] < sincere
            if better.any():
                q, r = (int(x) for x in np.argwhere(better)[0])
                others = np.unravel_index(r, (d,) * (n - 1)) if n > 1 else ()
                others = [int(x) for x in others]
                prof = tuple(others[:i] + [p] + others[i:])
                lie = tuple(others[:i] + [q] + others[i:])
                return Manipulation(i, prof, lie, int(t[p, r]), int(t[q, r]))
    return None


def is_strategy_proof(f) -> bool:
    return find_manipulation(f) is None


def is_unanimous(f) -> bool:
    peaks = f._peaks()
    for v in np.unique(peaks):
        types = np.flatnonzero(peaks == v)
        sub = f.table[np.ix_(*([types] * f.n))]
        if not np.all(sub == v):
            return False
    return True


def _peak_codes(f) -> np.ndarray:
    """Mixed-radix code of the peak vector of every profile, table-shaped."""
    peaks = f._peaks()
    k = f.n_values
    d = f.table.shape[0]
    code = np.zeros((d,) * f.n, dtype=np.int64)
    for i in range(f.n):
        shape = [1] * f.n
        shape[i] = d
        code = code * k + peaks.reshape(shape)
    return code


def peak_table(f) -> dict | None:
    """Map from peak vectors to outcomes when ``f`` is tops-only, else ``None``."""
    codes = _peak_codes(f).ravel()
    vals = f.table.ravel()
    out = {}
    for c, v in zip(codes.tolist(), vals.tolist()):
        if out.setdefault(c, v) != v:
            return None
    k = f.n_values
    res = {}
    for c, v in out.items():
        vec = []
        for _ in range(f.n):
            c, r = divmod(c, k)
            vec.append(r)
        res[tuple(reversed(vec))] = v
    return res


def is_tops_only(f) -> bool:
    return peak_table(f) is not None


def to_voting_scheme(f: Scf) -> VotingScheme:
    table = peak_table(f)
    if table is None:
        raise InputError("the SCF is not tops-only")
    k = f.n_values
    out = np.full((k,) * f.n, -1, dtype=np.int32)
    for vec, v in table.items():
        out[vec] = v
    return VotingScheme(f.domain.space, f.n, out)


# -- fixed ballot rules -------------------------------------------------------

@dataclass(frozen=True)
class Fbr:
    """Fixed ballots ``b_J`` indexed by coalition bitmask (voter ``i`` is bit ``i``)."""

    component: int
    n: int
    size: int
    ballots: tuple

    def __post_init__(self):
        object.__setattr__(self, "ballots", tuple(int(b) for b in self.ballots))
        if not 2 <= self.n <= MAX_VOTERS:
            raise InputError(f"voter count {self.n} outside 2..{MAX_VOTERS}")
        if len(self.ballots) != 1 << self.n:
            raise InputError(f"need {1 << self.n} ballots for {self.n} voters")
        if any(not 0 <= b < self.size for b in self.ballots):
            raise InputError("ballot outside the component")

    def __call__(self, *peaks) -> int:
        return evaluate_fbr(self, peaks)


def validate_fbr(fbr: Fbr) -> bool:
    b = fbr.ballots
    full = (1 << fbr.n) - 1
    if b[0] != 0 or b[full] != fbr.size - 1:
        return False
    for mask in range(1 << fbr.n):
        for i in range(fbr.n):
            if not mask >> i & 1 and b[mask] > b[mask | 1 << i]:
                return False
    return True


def evaluate_fbr(fbr: Fbr, peaks) -> int:
    """``max_J min(min_{i in J} peak_i, b_J)``."""
    if len(peaks) != fbr.n:
        raise InputError(f"expected {fbr.n} peaks, got {len(peaks)}")
    best = fbr.ballots[0]
    for mask in range(1, 1 << fbr.n):
        v = fbr.ballots[mask]
        if v <= best:
            continue
        for i in range(fbr.n):
            if mask >> i & 1 and peaks[i] < v:
                v = peaks[i]
        if v > best:
            best = v
    return best


def constrained_dictator(fbr: Fbr, lower: int, upper: int) -> int | None:
    if not lower < upper:
        raise InputError(f"constrained dictatorship needs lower < upper, got {lower}, {upper}")
    for i in range(fbr.n):
        if all((fbr.ballots[m] >= upper) if m >> i & 1 else (fbr.ballots[m] <= lower)
               for m in range(1 << fbr.n)):
            return i
    return None


def is_constrained_dictatorship(fbr: Fbr, lower: int, upper: int) -> bool:
    return constrained_dictator(fbr, lower, upper) is not None


def fbr_rule(fbr: Fbr, marginals) -> MarginalScf:
    """The FBR tabulated on profiles drawn from ``marginals``."""
    marginals = tuple(marginals)
    peaks = [mp.peak for mp in marginals]
    d = len(marginals)
    table = np.empty((d,) * fbr.n, dtype=np.int32)
    cache = {}
    for prof in itertools.product(range(d), repeat=fbr.n):
        pk = tuple(peaks[j] for j in prof)
        if pk not in cache:
            cache[pk] = evaluate_fbr(fbr, pk)
        table[prof] = cache[pk]
    return MarginalScf(marginals, fbr.n, table)


def fbr_from_rule(f: MarginalScf) -> Fbr | None:
    """The FBR whose table equals ``f`` on its marginal domain, if there is one.

    Ballots are read off at the profiles where coalition ``J`` reports the top
    element and everyone else the bottom one.
    """
    table = peak_table(f)
    if table is None:
        return None
    top, bottom = f.size - 1, 0
    ballots = []
    for mask in range(1 << f.n):
        vec = tuple(top if mask >> i & 1 else bottom for i in range(f.n))
        if vec not in table:
            return None
        ballots.append(table[vec])
    fbr = Fbr(f.component, f.n, f.size, tuple(ballots))
    if not validate_fbr(fbr):
        return None
    if any(evaluate_fbr(fbr, vec) != v for vec, v in table.items()):
        return None
    return fbr


# -- named rules ----------------------------------------------------------------

def make_dictatorship(domain: Domain, i: int, n: int = 2) -> Scf:
    if not 0 <= i < n:
        raise InputError(f"dictator {i} out of range for {n} voters")
    return Scf.from_function(domain, n, lambda *prefs: prefs[i].peak)


def make_marginal_dictatorship(marginals, i: int, n: int = 2) -> MarginalScf:
    marginals = tuple(marginals)
    if not 0 <= i < n:
        raise InputError(f"dictator {i} out of range for {n} voters")
    peaks = np.array([mp.peak for mp in marginals], dtype=np.int32)
    shape = [1] * n
    shape[i] = len(marginals)
    table = np.broadcast_to(peaks.reshape(shape), (len(marginals),) * n).copy()
    return MarginalScf(marginals, n, table)


def make_median_marginal(marginals, n: int = 3) -> MarginalScf:
    if n != 3:
        raise InputError("the median marginal rule is defined for three voters")
    marginals = tuple(marginals)
    d = len(marginals)
    table = np.empty((d,) * 3, dtype=np.int32)
    for prof in itertools.product(range(d), repeat=3):
        table[prof] = sorted(marginals[j].peak for j in prof)[1]
    return MarginalScf(marginals, 3, table)


# -- decomposition ------------------------------------------------------------

class NotDecomposable(Exception):
    """Component outcomes are not a function of that component's peaks."""

    def __init__(self, component, first, second):
        super().__init__(f"component {component} outcome differs on profiles {first} and {second}"
                         " that agree on all component peaks")
        self.component, self.first, self.second = component, first, second


def decompose(f: Scf) -> list:
    """Marginal rules ``f^1 .. f^m`` with ``f`` equal to their assembly.

    Each ``f^s`` is read off as a function of the voters' s-th peak
    coordinates; raises :class:`NotDecomposable` with a witness pair of
    profiles when that function is ill-defined.
    """
    if not is_unanimous(f):
        raise InputError("decompose expects a unanimous SCF")
    domain, n = f.domain, f.n
    space = domain.space
    d = len(domain)
    coords = np.array(space.alternatives, dtype=np.int32)
    rules = []
    for s in range(space.m):
        comp_peak = [p.peak[s] for p in domain]
        g = {}
        where = {}
        for prof in itertools.product(range(d), repeat=n):
            key = tuple(comp_peak[j] for j in prof)
            v = int(coords[f.table[prof], s])
            if key in g and g[key] != v:
                raise NotDecomposable(s, where[key], prof)
            g.setdefault(key, v)
            where.setdefault(key, prof)
        marg = []
        seen = {}
        for p in domain:
            mp = induce_marginal(p, s)
            if mp.ranking not in seen:
                seen[mp.ranking] = len(marg)
                marg.append(mp)
        dm = len(marg)
        table = np.empty((dm,) * n, dtype=np.int32)
        for prof in itertools.product(range(dm), repeat=n):
            table[prof] = g[tuple(marg[j].peak for j in prof)]
        rules.append(MarginalScf(marg, n, table))
    rebuilt = assemble(rules, domain)
    if not np.array_equal(rebuilt.table, f.table):
        raise AssertionError("reassembled table differs from the input SCF")
    return rules


def assemble(marginal_rules, domain: Domain) -> Scf:
    """``f(P) = (f^1([P]^1), ..., f^m([P]^m))`` tabulated on ``domain``."""
    rules = list(marginal_rules)
    space = domain.space
    if len(rules) != space.m:
        raise InputError(f"need one marginal rule per component ({space.m}), got {len(rules)}")
    n = rules[0].n
    if any(r.n != n for r in rules):
        raise InputError("marginal rules disagree on the number of voters")
    d = len(domain)
    _check_cells(d, n, DEFAULT_MAX_CELLS)
    out = np.zeros((d,) * n, dtype=np.int64)
    for s, rule in enumerate(rules):
        if rule.size != space.sizes[s]:
            raise InputError(f"marginal rule {s} is over {rule.size} elements, component has {space.sizes[s]}")
        lookup = {mp.ranking: j for j, mp in enumerate(rule.marginals)}
        idx = []
        for p in domain:
            mp = induce_marginal(p, s)
            if mp.ranking not in lookup:
                raise InputError(f"marginal rule {s} is undefined on induced marginal {mp}")
            idx.append(lookup[mp.ranking])
        idx = np.array(idx)
        comp = rule.table[np.ix_(*([idx] * n))]
        out = out * space.sizes[s] + comp
    return Scf(domain, n, out.astype(np.int32))


def marginal_space_rule(marginals, n, fn) -> MarginalScf:
    """Tabulate ``fn(*marginal_prefs) -> element`` as a :class:`MarginalScf`."""
    marginals = tuple(marginals)
    d = len(marginals)
    table = np.empty((d,) * n, dtype=np.int32)
    for prof in itertools.product(range(d), repeat=n):
        table[prof] = fn(*(marginals[j] for j in prof))
    return MarginalScf(marginals, n, table)


def universal_marginals(size: int, component: int = 0) -> tuple:
    return tuple(MarginalPreference(component, perm) for perm in itertools.permutations(range(size)))
