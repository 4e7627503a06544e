"""
Text formats for domains, rules and fixed ballot rules, and report rendering.

Domain files::

    # comment
    space 3x2
    labels 1: 1,2,3
    labels 2: 0,1
    1,0;2,0;3,0;1,1;2,1;3,1

Components in headers are 1-based.  Without a ``labels`` line a component's
elements are written as their 0-based encoding.
"""

from __future__ import annotations

import itertools
import json

import numpy as np

from . import __version__
from .core import Domain, InputError, Preference, ProductSpace
from .domains import Thresholds
from .rules import Fbr, Scf
from .search import VerificationReport


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_space(token: str) -> ProductSpace:
    try:
        sizes = tuple(int(k) for k in token.lower().split("x"))
    except ValueError:
        raise InputError(f"bad space specification {token!r}") from None
    return ProductSpace(sizes)


def _element(token: str, s: int, lookup, no: int) -> int:
    token = token.strip()
    if lookup is not None and token in lookup[s]:
        return lookup[s][token]
    if lookup is None:
        try:
            return int(token)
        except ValueError:
            pass
    raise InputError(f"line {no}: unknown element {token!r} in component {s + 1}")


def parse_alternative(token: str, space: ProductSpace, lookup=None, no: int = 0) -> tuple:
    parts = token.strip().strip("()").split(",")
    if len(parts) != space.m:
        raise InputError(f"line {no}: alternative {token.strip()!r} has arity {len(parts)}, expected {space.m}")
    a = tuple(_element(x, s, lookup, no) for s, x in enumerate(parts))
    try:
        space.check_alternative(a)
    except InputError as exc:
        raise InputError(f"line {no}: {exc}") from None
    return a


def _label_lookup(labels):
    if labels is None:
        return None
    return [{lab: x for x, lab in enumerate(comp)} for comp in labels]


def parse_domain(text: str) -> Domain:
    space, labels, prefs, seen = None, {}, [], {}
    lookup = None
    for no, line in _content_lines(text):
        head, _, rest = line.partition(" ")
        if head == "space":
            if space is not None:
                raise InputError(f"line {no}: second space header")
            space = parse_space(rest.strip())
            continue
        if space is None:
            raise InputError(f"line {no}: body before the 'space' header")
        if head == "labels":
            if prefs:
                raise InputError(f"line {no}: labels must precede preferences")
            comp, _, names = rest.partition(":")
            try:
                s = int(comp) - 1
            except ValueError:
                raise InputError(f"line {no}: bad component in labels line") from None
            space.check_component(s)
            names = tuple(x.strip() for x in names.split(","))
            if len(names) != space.sizes[s] or len(set(names)) != len(names):
                raise InputError(f"line {no}: component {s + 1} needs {space.sizes[s]} distinct labels")
            labels[s] = names
            continue
        if lookup is None and labels:
            full = tuple(labels.get(s, tuple(map(str, range(k)))) for s, k in enumerate(space.sizes))
            lookup = _label_lookup(full)
        ranking = [parse_alternative(tok, space, lookup, no) for tok in line.split(";")]
        if len(ranking) != space.n_alternatives or len(set(ranking)) != len(ranking):
            raise InputError(f"line {no}: not a permutation of the {space.n_alternatives} alternatives")
        pref = Preference(space, ranking)
        if pref.ranking in seen:
            raise InputError(f"line {no}: duplicate of the preference on line {seen[pref.ranking]}")
        seen[pref.ranking] = no
        prefs.append(pref)
    if space is None:
        raise InputError("missing 'space' header")
    full = None
    if labels:
        full = tuple(labels.get(s, tuple(map(str, range(k)))) for s, k in enumerate(space.sizes))
    return Domain(space, prefs, full)


def serialize_domain(domain: Domain) -> str:
    lines = [f"space {domain.space}"]
    if domain.labels:
        for s, comp in enumerate(domain.labels):
            lines.append(f"labels {s + 1}: " + ",".join(comp))
    for p in domain:
        lines.append(";".join(",".join(domain.label(s, x) for s, x in enumerate(a)) for a in p.ranking))
    return "\n".join(lines) + "\n"


def parse_thresholds(text: str, domain: Domain) -> Thresholds:
    """``a1,a2:b1,b2`` written with the domain's labels."""
    lookup = _label_lookup(domain.labels)
    try:
        lo, up = text.split(":")
    except ValueError:
        raise InputError(f"thresholds {text!r} must look like 'a1,a2:b1,b2'") from None
    return Thresholds(parse_alternative(lo, domain.space, lookup), parse_alternative(up, domain.space, lookup))


def format_thresholds(t: Thresholds, domain: Domain) -> str:
    return ",".join(domain.label(s, x) for s, x in enumerate(t.lower)) + ":" + \
        ",".join(domain.label(s, x) for s, x in enumerate(t.upper))


def _header_fields(line: str, kind: str, no: int) -> dict:
    parts = line.split()
    if parts[0] != kind:
        raise InputError(f"line {no}: expected a '{kind}' header")
    out = {}
    for tok in parts[1:]:
        key, eq, val = tok.partition("=")
        if not eq:
            raise InputError(f"line {no}: bad header field {tok!r}")
        out[key] = val
    return out


def parse_scf(text: str, domain: Domain) -> Scf:
    """Rule file: ``scf n=<n> domain=<file>`` then ``i1 .. in -> alt`` (1-based indices)."""
    lines = list(_content_lines(text))
    if not lines:
        raise InputError("empty rule file")
    no, head = lines[0]
    fields = _header_fields(head, "scf", no)
    try:
        n = int(fields["n"])
    except (KeyError, ValueError):
        raise InputError(f"line {no}: header needs n=<voters>") from None
    d = len(domain)
    table = np.full((d,) * n, -1, dtype=np.int32)
    lookup = _label_lookup(domain.labels)
    for no, line in lines[1:]:
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            raise InputError(f"line {no}: expected 'i1 ... in -> alternative'")
        try:
            prof = tuple(int(x) - 1 for x in lhs.split())
        except ValueError:
            raise InputError(f"line {no}: bad profile indices") from None
        if len(prof) != n or any(not 0 <= j < d for j in prof):
            raise InputError(f"line {no}: profile must list {n} indices in 1..{d}")
        if table[prof] != -1:
            raise InputError(f"line {no}: profile listed twice")
        table[prof] = domain.space.index(parse_alternative(rhs, domain.space, lookup, no))
    if (table < 0).any():
        missing = tuple(int(j) + 1 for j in np.argwhere(table < 0)[0])
        raise InputError(f"rule file misses profile {missing}")
    return Scf(domain, n, table)


def serialize_scf(f: Scf, domain_path: str = "domain") -> str:
    dom = f.domain
    lines = [f"scf n={f.n} domain={domain_path}"]
    alts = dom.space.alternatives
    for prof in itertools.product(range(len(dom)), repeat=f.n):
        a = alts[int(f.table[prof])]
        lines.append(" ".join(str(j + 1) for j in prof) + " -> " +
                     ",".join(dom.label(s, x) for s, x in enumerate(a)))
    return "\n".join(lines) + "\n"


def scf_domain_path(text: str) -> str | None:
    for no, line in _content_lines(text):
        return _header_fields(line, "scf", no).get("domain")
    return None


def parse_fbr(text: str) -> Fbr:
    """FBR file: ``fbr s=<s> n=<n> [size=<k>]`` then ``J=<bitmask> b=<element>`` lines.

    ``s`` is 1-based, elements are 0-based encodings.  Without ``size`` the
    component size is read off the grand-coalition ballot.
    """
    lines = list(_content_lines(text))
    if not lines:
        raise InputError("empty FBR file")
    no, head = lines[0]
    fields = _header_fields(head, "fbr", no)
    try:
        s, n = int(fields["s"]) - 1, int(fields["n"])
    except (KeyError, ValueError):
        raise InputError(f"line {no}: header needs s=<component> n=<voters>") from None
    if not 2 <= n <= 16:
        raise InputError(f"line {no}: voter count {n} outside 2..16")
    ballots = [None] * (1 << n)
    for no, line in lines[1:]:
        try:
            kv = dict(tok.split("=", 1) for tok in line.split())
            mask, b = int(kv["J"]), int(kv["b"])
        except (KeyError, ValueError):
            raise InputError(f"line {no}: expected 'J=<bitmask> b=<element>'") from None
        if not 0 <= mask < len(ballots):
            raise InputError(f"line {no}: coalition {mask} out of range")
        if ballots[mask] is not None:
            raise InputError(f"line {no}: coalition {mask} listed twice")
        ballots[mask] = b
    if None in ballots:
        raise InputError(f"FBR file misses coalition {ballots.index(None)}")
    size = int(fields["size"]) if "size" in fields else ballots[-1] + 1
    return Fbr(s, n, size, tuple(ballots))


def serialize_fbr(fbr: Fbr) -> str:
    lines = [f"fbr s={fbr.component + 1} n={fbr.n} size={fbr.size}"]
    lines += [f"J={mask} b={b}" for mask, b in enumerate(fbr.ballots)]
    return "\n".join(lines) + "\n"


# -- reports --------------------------------------------------------------------

def _flat(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return " ".join(_flat(v) for v in value)
    return str(value)


def report_dict(report: VerificationReport) -> dict:
    return {"claim": report.claim, "status": report.status, "scope": report.scope,
            "counts": report.counts, "details": report.details, "witnesses": report.witnesses}


def emit_report(report: VerificationReport, fmt: str = "text", banner: bool = True) -> str:
    if fmt == "json":
        data = report_dict(report)
        if banner:
            data = {"version": f"mhybrid {__version__}", **data}
        return json.dumps(data, indent=2, sort_keys=False, default=_flat) + "\n"
    if fmt != "text":
        raise InputError(f"unknown report format {fmt!r}")
    lines = [f"VERSION: mhybrid {__version__}"] if banner else []
    lines.append(f"CLAIM: {report.claim}")
    lines.append(f"STATUS: {report.status}")
    for section, data in (("SCOPE", report.scope), ("COUNT", report.counts), ("DETAIL", report.details)):
        for key, val in data.items():
            lines.append(f"{section}.{key}: {_flat(val)}")
    for i, w in enumerate(report.witnesses, 1):
        for key, val in w.items():
            lines.append(f"WITNESS.{i}.{key}: {_flat(val)}")
    return "\n".join(lines) + "\n"
