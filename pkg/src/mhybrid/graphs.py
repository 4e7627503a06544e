"""
Graphs over preferences, elements and alternatives, and the richness checks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .core import Domain, InputError, Preference, replace
from .domains import is_separable

ADJACENT = "adjacent"
ADJACENT_PLUS = "adjacent-plus"


class Graph:
    """Undirected simple graph on an ordered vertex list."""

    def __init__(self, vertices, edges=()):
        self.vertices = tuple(vertices)
        self._adj = {v: {} for v in self.vertices}
        for e in edges:
            u, v, *label = e
            self.add_edge(u, v, label[0] if label else None)

    def add_edge(self, u, v, label=None):
        if u == v:
            raise InputError("self-loops are not allowed")
        if u not in self._adj or v not in self._adj:
            raise InputError(f"edge ({u!r}, {v!r}) has an unknown endpoint")
        self._adj[u][v] = label
        self._adj[v][u] = label

    def neighbors(self, v):
        return self._adj[v].keys()

    def has_edge(self, u, v) -> bool:
        return v in self._adj.get(u, ())

    def label(self, u, v):
        return self._adj[u][v]

    @property
    def edges(self) -> list:
        """Each edge once, as ``(u, v, label)`` in vertex order."""
        order = {v: i for i, v in enumerate(self.vertices)}
        out = []
        for u in self.vertices:
            for v, lab in self._adj[u].items():
                if order[u] < order[v]:
                    out.append((u, v, lab))
        return sorted(out, key=lambda e: (order[e[0]], order[e[1]]))

    def subgraph(self, keep) -> "Graph":
        keep = set(keep)
        verts = [v for v in self.vertices if v in keep]
        return Graph(verts, [(u, v, lab) for u, v, lab in self.edges if u in keep and v in keep])

    def __len__(self):
        return len(self.vertices)


def _check_vertex(g: Graph, v):
    if v not in g._adj:
        raise InputError(f"{v!r} is not a vertex")


def is_connected(g: Graph) -> bool:
    if len(g.vertices) <= 1:
        return True
    start = g.vertices[0]
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(g.vertices)


def leaves(g: Graph) -> set:
    return {v for v in g.vertices if len(g._adj[v]) == 1}


def find_path(g: Graph, u, v):
    """A shortest path from ``u`` to ``v`` as a list of vertices, or ``None``."""
    _check_vertex(g, u)
    _check_vertex(g, v)
    parent = {u: None}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        if w == v:
            break
        for x in g.neighbors(w):
            if x not in parent:
                parent[x] = w
                queue.append(x)
    if v not in parent:
        return None
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def export_edge_list(g: Graph, name=str) -> str:
    """One ``u v label`` line per edge."""
    lines = []
    for u, v, lab in g.edges:
        lines.append(f"{name(u)} {name(v)} {lab if lab is not None else '-'}")
    return "\n".join(lines) + ("\n" if lines else "")


# -- adjacency ---------------------------------------------------------------

def are_adjacent(p: Preference, q: Preference) -> bool:
    diff = [k for k, (a, b) in enumerate(zip(p.order, q.order)) if a != b]
    return (len(diff) == 2 and diff[1] == diff[0] + 1
            and p.order[diff[0]] == q.order[diff[1]] and p.order[diff[1]] == q.order[diff[0]])


def adjacent_plus_witness(p: Preference, q: Preference, check_separable: bool = True):
    """``(s, a^s, b^s)`` if ``p ~+ q`` (``a^s`` above ``b^s`` in ``p``), else ``None``."""
    space = p.space
    po, qo = p.order, q.order
    diff = [k for k in range(len(po)) if po[k] != qo[k]]
    if len(diff) < 2 or len(diff) % 2:
        return None
    swaps = []
    for k in range(0, len(diff), 2):
        r = diff[k]
        if diff[k + 1] != r + 1 or po[r] != qo[r + 1] or po[r + 1] != qo[r]:
            return None
        swaps.append((space.alternatives[po[r]], space.alternatives[po[r + 1]]))
    a0, b0 = swaps[0]
    comps = [s for s in range(space.m) if a0[s] != b0[s]]
    if len(comps) != 1:
        return None
    s = comps[0]
    rests = set()
    for a, b in swaps:
        if (a[s], b[s]) != (a0[s], b0[s]) or replace(a, s, 0) != replace(b, s, 0):
            return None
        rests.add(replace(a, s, 0))
    if len(rests) != len(swaps) or len(rests) != len(space.others(s)):
        return None
    if check_separable and not (is_separable(p) and is_separable(q)):
        return None
    return s, a0[s], b0[s]


def are_adjacent_plus(p: Preference, q: Preference) -> bool:
    return adjacent_plus_witness(p, q) is not None


def build_pref_graph(domain: Domain) -> Graph:
    """``G_{~/~+}`` on preference indices ``0 .. |D|-1``, edges labelled."""
    g = Graph(range(len(domain)))
    by_order = {p.order: i for i, p in enumerate(domain)}
    for i, p in enumerate(domain):
        order = list(p.order)
        for k in range(len(order) - 1):
            order[k], order[k + 1] = order[k + 1], order[k]
            j = by_order.get(tuple(order))
            if j is not None and j > i:
                g.add_edge(i, j, ADJACENT)
            order[k], order[k + 1] = order[k + 1], order[k]
    separable = [i for i, p in enumerate(domain) if is_separable(p)]
    for i, j in combinations(separable, 2):
        if adjacent_plus_witness(domain[i], domain[j], check_separable=False) is not None:
            g.add_edge(i, j, ADJACENT_PLUS)
    return g


# -- element and alternative graphs -----------------------------------------

def strongly_connected_elems(ds, a: int, b: int) -> bool:
    if a == b:
        raise InputError("strong connectedness needs two distinct elements")
    tails_ab = {mp.ranking[2:] for mp in ds if mp.ranking[:2] == (a, b)}
    return any(mp.ranking[2:] in tails_ab for mp in ds if mp.ranking[:2] == (b, a))


def build_elem_graph(ds, elements) -> Graph:
    ds = list(ds)
    elements = list(elements)
    if not elements:
        raise InputError("element set must be nonempty")
    g = Graph(elements)
    for a, b in combinations(elements, 2):
        if strongly_connected_elems(ds, a, b):
            g.add_edge(a, b)
    return g


def strongly_connected_plus_alts(domain: Domain, a, b, graph: Graph | None = None) -> bool:
    a, b = tuple(a), tuple(b)
    if a == b:
        raise InputError("strong connectedness+ needs two distinct alternatives")
    g = graph if graph is not None else build_pref_graph(domain)
    for i, j, lab in g.edges:
        if lab == ADJACENT_PLUS and {domain[i].peak, domain[j].peak} == {a, b}:
            return True
    return False


def build_alt_plus_graph(domain: Domain, alternatives, graph: Graph | None = None) -> Graph:
    """``G_{~+}`` over a set of alternatives: edges join peaks of ``~+`` pairs."""
    g = graph if graph is not None else build_pref_graph(domain)
    alts = [tuple(a) for a in alternatives]
    out = Graph(alts)
    keep = set(alts)
    for i, j, lab in g.edges:
        pi, pj = domain[i].peak, domain[j].peak
        if lab == ADJACENT_PLUS and pi in keep and pj in keep and pi != pj:
            out.add_edge(pi, pj)
    return out


# -- restoration -------------------------------------------------------------

def _validate_path(path, domain: Domain | None):
    prefs = [domain[v] if domain is not None else v for v in path]
    for x, y in zip(prefs, prefs[1:]):
        if not (are_adjacent(x, y) or are_adjacent_plus(x, y)):
            raise InputError("consecutive path vertices are neither adjacent nor adjacent+")
    return prefs


def path_has_restoration(path, a, b, domain: Domain | None = None) -> bool:
    """Whether the relative ranking of ``a`` and ``b`` flips more than once.

    ``path`` holds :class:`Preference` objects, or indices into ``domain``.
    """
    prefs = _validate_path(path, domain)
    rel = [p.prefers(a, b) for p in prefs]
    flips = sum(1 for x, y in zip(rel, rel[1:]) if x != y)
    return flips > 1


def exists_norestoration_path(g: Graph, domain: Domain, src, dst, a, b):
    """Shortest path ``src -> dst`` in ``g`` without ``{a, b}``-restoration.

    Breadth-first search over (vertex, flips so far) with flips in {0, 1}; a
    second flip is a dead end.  Returns a list of vertices or ``None``.
    """
    ia, ib = domain.space.index(a), domain.space.index(b)

    def rel(v):
        pos = domain[v].pos
        return pos[ia] < pos[ib]

    start = (src, 0)
    parent = {start: None}
    queue = deque([start])
    goal = None
    while queue:
        state = queue.popleft()
        v, flips = state
        if v == dst:
            goal = state
            break
        rv = rel(v)
        for w in g.neighbors(v):
            nf = flips + (rel(w) != rv)
            if nf > 1:
                continue
            nxt = (w, nf)
            if nxt not in parent:
                parent[nxt] = state
                queue.append(nxt)
    if goal is None:
        return None
    path = []
    while goal is not None:
        path.append(goal[0])
        goal = parent[goal]
    return path[::-1]


def _reachable_without_restoration(g: Graph, domain: Domain, src, ia, ib) -> set:
    rels = [p.pos[ia] < p.pos[ib] for p in domain]
    seen = {(src, 0)}
    queue = deque(seen)
    while queue:
        v, flips = queue.popleft()
        for w in g.neighbors(v):
            nf = flips + (rels[w] != rels[v])
            if nf <= 1 and (w, nf) not in seen:
                seen.add((w, nf))
                queue.append((w, nf))
    return {v for v, _ in seen}


# -- richness -----------------------------------------------------------------

@dataclass
class CheckResult:
    ok: bool
    witness: dict = field(default=None)

    def __bool__(self):
        return self.ok


def check_interior_plus(domain: Domain, graph: Graph | None = None) -> CheckResult:
    g = graph if graph is not None else build_pref_graph(domain)
    groups = {}
    for i, p in enumerate(domain):
        groups.setdefault(p.peak, []).append(i)
    for peak, members in groups.items():
        sub = g.subgraph(members)
        for j in members[1:]:
            if find_path(sub, members[0], j) is None:
                return CheckResult(False, {"peak": peak, "pair": (members[0], j)})
    return CheckResult(True)


def check_exterior_plus(domain: Domain, graph: Graph | None = None) -> CheckResult:
    g = graph if graph is not None else build_pref_graph(domain)
    space = domain.space
    n_alt = space.n_alternatives
    peaks = domain.peaks
    # (i) no-restoration paths between preferences with distinct peaks
    for i in range(len(domain)):
        for ia in range(n_alt):
            for ib in range(ia + 1, n_alt):
                reach = _reachable_without_restoration(g, domain, i, ia, ib)
                for j in range(len(domain)):
                    if peaks[j] != peaks[i] and j not in reach:
                        return CheckResult(False, {
                            "condition": "no-restoration", "pair": (i, j),
                            "alternatives": (space.alternatives[ia], space.alternatives[ib])})
    # (ii) no-detour: similar peaks joined inside their line
    for i, j in combinations(range(len(domain)), 2):
        x, y = peaks[i], peaks[j]
        diff = [s for s in range(space.m) if x[s] != y[s]]
        if len(diff) != 1:
            continue
        s = diff[0]
        line = set(space.line(s, x))
        sub = g.subgraph(v for v in range(len(domain)) if peaks[v] in line)
        if find_path(sub, i, j) is None:
            return CheckResult(False, {"condition": "no-detour", "pair": (i, j), "component": s})
    return CheckResult(True)


def diversity_plus_pair(domain: Domain):
    """Indices of a separable complete-reversal pair, or ``None``."""
    index = {p.ranking: i for i, p in enumerate(domain)}
    for i, p in enumerate(domain):
        j = index.get(p.ranking[::-1])
        if j is not None and i < j and is_separable(p) and is_separable(domain[j]):
            return i, j
    return None


def check_diversity_plus(domain: Domain) -> bool:
    return diversity_plus_pair(domain) is not None


def check_minimal_richness(domain: Domain) -> bool:
    return set(domain.peaks) == set(domain.space.alternatives)


def richness_report(domain: Domain, graph: Graph | None = None) -> dict:
    g = graph if graph is not None else build_pref_graph(domain)
    interior = check_interior_plus(domain, g)
    exterior = check_exterior_plus(domain, g)
    return {
        "minimal_richness": check_minimal_richness(domain),
        "diversity_plus": diversity_plus_pair(domain),
        "interior_plus": interior,
        "exterior_plus": exterior,
    }


def is_rich_domain(domain: Domain, graph: Graph | None = None) -> bool:
    if not check_minimal_richness(domain) or not check_diversity_plus(domain):
        return False
    g = graph if graph is not None else build_pref_graph(domain)
    return bool(check_interior_plus(domain, g)) and bool(check_exterior_plus(domain, g))
