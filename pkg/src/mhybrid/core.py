"""
Product alternative spaces, preferences and induced marginal preferences.

Elements of every component are encoded ``0 .. k-1`` and the component's
linear order is the encoding order. Components are indexed ``0 .. m-1``.
Alternatives are plain tuples of element indices; internally they are also
addressed by a mixed-radix (row-major) integer index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

Alternative = tuple  # m-tuple of element indices


class InputError(ValueError):
    """Raised on malformed user input (bad indices, sizes, files)."""


class ResourceError(RuntimeError):
    """Raised when an enumeration would exceed a size guard or budget."""


@dataclass(frozen=True)
class ProductSpace:
    """The alternative set ``A = A^1 x ... x A^m``."""

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if len(sizes) < 2:
            raise InputError("a product space needs at least two components")
        if any(k < 2 for k in sizes):
            raise InputError(f"every component needs at least two elements, got {sizes}")

    @property
    def m(self) -> int:
        return len(self.sizes)

    @cached_property
    def n_alternatives(self) -> int:
        total = 1
        for k in self.sizes:
            total *= k
        return total

    @cached_property
    def alternatives(self) -> tuple:
        """All alternatives in mixed-radix (row-major) order."""
        return tuple(itertools.product(*(range(k) for k in self.sizes)))

    @cached_property
    def _strides(self) -> tuple:
        strides = []
        acc = 1
        for k in reversed(self.sizes):
            strides.append(acc)
            acc *= k
        return tuple(reversed(strides))

    def index(self, a: Alternative) -> int:
        self.check_alternative(a)
        return sum(x * st for x, st in zip(a, self._strides))

    def alternative(self, idx: int) -> Alternative:
        return self.alternatives[idx]

    def check_component(self, s: int) -> None:
        if not 0 <= s < self.m:
            raise InputError(f"component {s} out of range for {self.m} components")

    def check_element(self, s: int, x: int) -> None:
        self.check_component(s)
        if not 0 <= x < self.sizes[s]:
            raise InputError(f"element {x} out of range for component {s} of size {self.sizes[s]}")

    def check_alternative(self, a) -> None:
        if len(a) != self.m:
            raise InputError(f"alternative {a!r} has arity {len(a)}, expected {self.m}")
        for s, x in enumerate(a):
            if not 0 <= x < self.sizes[s]:
                raise InputError(f"alternative {a!r} out of range in component {s}")

    def line(self, s: int, rest: Alternative) -> tuple:
        """``(A^s, rest^{-s})``: alternatives agreeing with ``rest`` off component ``s``."""
        return tuple(replace(rest, s, x) for x in range(self.sizes[s]))

    def others(self, s: int) -> tuple:
        """All ``z^{-s}`` as full alternatives with coordinate ``s`` set to 0."""
        ranges = [range(k) if t != s else range(1) for t, k in enumerate(self.sizes)]
        return tuple(itertools.product(*ranges))

    def __str__(self) -> str:
        return "x".join(map(str, self.sizes))


def replace(a: Alternative, s: int, x: int) -> Alternative:
    return a[:s] + (x,) + a[s + 1:]


@dataclass(frozen=True)
class Preference:
    """A strict linear order over all alternatives of ``space``, best first."""

    space: ProductSpace
    ranking: tuple
    order: tuple = field(init=False, repr=False, compare=False)
    pos: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        space = self.space
        ranking = tuple(tuple(int(x) for x in a) for a in self.ranking)
        object.__setattr__(self, "ranking", ranking)
        order = tuple(space.index(a) for a in ranking)
        if len(order) != space.n_alternatives or len(set(order)) != len(order):
            raise InputError("ranking is not a permutation of the alternatives")
        pos = [0] * len(order)
        for r, idx in enumerate(order):
            pos[idx] = r
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "pos", tuple(pos))

    @classmethod
    def from_indices(cls, space: ProductSpace, order: Iterable[int]) -> "Preference":
        return cls(space, tuple(space.alternatives[i] for i in order))

    @property
    def peak(self) -> Alternative:
        return self.ranking[0]

    def rank(self, a: Alternative) -> int:
        """0-based rank of ``a`` (0 is the peak)."""
        return self.pos[self.space.index(a)]

    def prefers(self, a: Alternative, b: Alternative) -> bool:
        return self.pos[self.space.index(a)] < self.pos[self.space.index(b)]

    def reversed(self) -> "Preference":
        return Preference(self.space, self.ranking[::-1])

    def __str__(self) -> str:
        return " > ".join("(" + ",".join(map(str, a)) + ")" for a in self.ranking)


@dataclass(frozen=True)
class MarginalPreference:
    """A linear order over the elements of one component, best first."""

    component: int
    ranking: tuple
    pos: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ranking = tuple(int(x) for x in self.ranking)
        object.__setattr__(self, "ranking", ranking)
        if sorted(ranking) != list(range(len(ranking))):
            raise InputError(f"marginal ranking {ranking} is not a permutation")
        pos = [0] * len(ranking)
        for r, x in enumerate(ranking):
            pos[x] = r
        object.__setattr__(self, "pos", tuple(pos))

    @property
    def size(self) -> int:
        return len(self.ranking)

    @property
    def peak(self) -> int:
        return self.ranking[0]

    def prefers(self, x: int, y: int) -> bool:
        return self.pos[x] < self.pos[y]

    def __str__(self) -> str:
        return " > ".join(map(str, self.ranking))


class Domain(Sequence):
    """An ordered collection of distinct preferences over one space.

    Insertion order is preserved, so fixture indices stay stable.
    ``labels`` optionally names the elements of each component, and is used
    only for reading and writing files.
    """

    def __init__(self, space: ProductSpace, prefs: Iterable[Preference], labels=None):
        self.space = space
        self.prefs = tuple(prefs)
        self._index = {}
        for i, p in enumerate(self.prefs):
            if p.space != space:
                raise InputError(f"preference {i} is over a different space")
            if p.ranking in self._index:
                raise InputError(f"duplicate preference at positions {self._index[p.ranking]} and {i}")
            self._index[p.ranking] = i
        if labels is not None:
            labels = tuple(tuple(str(x) for x in comp) for comp in labels)
            if tuple(len(c) for c in labels) != space.sizes:
                raise InputError("labels do not match the component sizes")
        self.labels = labels

    def __len__(self) -> int:
        return len(self.prefs)

    def __getitem__(self, i):
        return self.prefs[i]

    def __iter__(self) -> Iterator[Preference]:
        return iter(self.prefs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Domain):
            return NotImplemented
        return (self.space, self.prefs, self.labels) == (other.space, other.prefs, other.labels)

    def __hash__(self):
        return hash((self.space, self.prefs))

    def __repr__(self) -> str:
        return f"Domain(space={self.space}, size={len(self)})"

    def index_of(self, p: Preference) -> int:
        return self._index[p.ranking]

    def __contains__(self, p) -> bool:
        return isinstance(p, Preference) and p.ranking in self._index

    @cached_property
    def peaks(self) -> tuple:
        return tuple(p.peak for p in self.prefs)

    def label(self, s: int, x: int) -> str:
        return self.labels[s][x] if self.labels else str(x)

    def format_alternative(self, a: Alternative) -> str:
        return "(" + ",".join(self.label(s, x) for s, x in enumerate(a)) + ")"

    def format_preference(self, p: Preference) -> str:
        return " > ".join(self.format_alternative(a) for a in p.ranking)


def all_preferences(space: ProductSpace) -> Iterator[Preference]:
    """Every linear order over ``space`` in lexicographic order of index sequences."""
    for perm in itertools.permutations(range(space.n_alternatives)):
        yield Preference.from_indices(space, perm)


def interval(space: ProductSpace, s: int, a: int, b: int) -> frozenset:
    """Elements between ``a`` and ``b`` (inclusive) on component ``s``."""
    space.check_element(s, a)
    space.check_element(s, b)
    lo, hi = min(a, b), max(a, b)
    return frozenset(range(lo, hi + 1))


def interior_interval(space: ProductSpace, s: int, a: int, b: int) -> frozenset:
    """Elements strictly between ``a`` and ``b`` on component ``s``."""
    space.check_element(s, a)
    space.check_element(s, b)
    lo, hi = min(a, b), max(a, b)
    return frozenset(range(lo + 1, hi))


def disagreement_set(a: Alternative, b: Alternative) -> frozenset:
    if len(a) != len(b):
        raise InputError("alternatives from different spaces")
    return frozenset(s for s, (x, y) in enumerate(zip(a, b)) if x != y)


def is_similar(a: Alternative, b: Alternative) -> bool:
    return len(disagreement_set(a, b)) == 1


def induce_marginal_at(p: Preference, s: int, z) -> MarginalPreference:
    """Marginal order on component ``s`` read off ``p`` along the line through ``z``.

    Only the coordinates of ``z`` other than ``s`` matter.
    """
    space = p.space
    space.check_component(s)
    z = tuple(z)
    space.check_alternative(replace(z, s, 0))
    line = space.line(s, z)
    keyed = sorted(range(space.sizes[s]), key=lambda x: p.pos[space.index(line[x])])
    return MarginalPreference(s, tuple(keyed))


def induce_marginal(p: Preference, s: int) -> MarginalPreference:
    """The induced marginal ``[P]^s``, read along the line through the peak."""
    return induce_marginal_at(p, s, p.peak)


def induced_marginal_domain(domain: Domain, s: int) -> tuple:
    """``[D]^s`` without duplicates, in order of first appearance."""
    seen = {}
    for p in domain:
        mp = induce_marginal(p, s)
        seen.setdefault(mp.ranking, mp)
    return tuple(seen.values())


def is_complete_reversal(p: Preference, q: Preference) -> bool:
    if p.space != q.space:
        raise InputError("preferences over different spaces")
    return p.ranking == q.ranking[::-1]
