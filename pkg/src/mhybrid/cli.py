"""Command-line front end.  Exit codes: 0 verified, 1 refuted, 2 input error, 3 budget exhausted."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import domains as Dm
from . import graphs as G
from . import rules as R
from . import search as S
from .core import InputError, ResourceError, induced_marginal_domain
from .fixtures import FIXTURE_NAMES, load_fixture, run_fixture_assertions, table1_text
from .io import (emit_report, format_thresholds, parse_domain, parse_fbr, parse_scf, parse_space,
                 parse_thresholds, scf_domain_path, serialize_domain, serialize_fbr, serialize_scf)

EXIT_CODES = {S.VERIFIED: 0, S.REFUTED: 1, S.UNMET: 2, S.EXHAUSTED: 3}

GENERATORS = {
    "universal": lambda sp, t: Dm.gen_universal(sp),
    "mh": lambda sp, t: Dm.gen_mh_domain(sp, t),
    "msp": lambda sp, t: Dm.gen_msp_domain(sp),
    "top-separable": lambda sp, t: Dm.gen_top_separable_domain(sp),
    "separable": lambda sp, t: Dm.gen_separable_domain(sp),
}


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_domain(path):
    return parse_domain(_read(path))


def _component(domain, s: int) -> int:
    domain.space.check_component(s - 1)
    return s - 1


def _budget(args) -> S.EnumerationBudget:
    base = S.EnumerationBudget.from_env()
    return S.EnumerationBudget(args.max_nodes or base.max_nodes, args.max_seconds or base.max_seconds)


def _thresholds(args, domain):
    if args.thresholds:
        return parse_thresholds(args.thresholds, domain)
    t = Dm.is_mh_domain(domain)
    if t is None:
        raise InputError("no thresholds given and the domain is not an MH domain")
    return t


# -- commands -------------------------------------------------------------------

def cmd_domain_check(args):
    dom = _load_domain(args.file)
    rich = G.richness_report(dom)
    pair = rich["diversity_plus"]
    details = {
        "preferences": len(dom),
        "minimal_richness": rich["minimal_richness"],
        "diversity_plus": f"P{pair[0] + 1} P{pair[1] + 1}" if pair else "none",
        "interior_plus": bool(rich["interior_plus"]),
        "exterior_plus": bool(rich["exterior_plus"]),
        "rich": all(bool(v) for v in rich.values()),
    }
    witnesses = []
    if args.thresholds:
        t = parse_thresholds(args.thresholds, dom)
        ok = Dm.is_mh_domain_for(dom, t)
        details["thresholds"] = format_thresholds(t, dom)
        details["mh"] = ok
        if not ok:
            bad = [i + 1 for i, p in enumerate(dom) if not Dm.is_mh_preference(p, t)]
            witnesses.append({"kind": "not-mh-domain", "non_mh_preferences": bad or "none",
                              "note": "see the per-component graph conditions" if not bad else ""})
    else:
        t = Dm.is_mh_domain(dom)
        details["mh"] = t is not None
        details["thresholds"] = format_thresholds(t, dom) if t is not None else "none"
    status = S.REFUTED if witnesses else S.VERIFIED
    return S.VerificationReport("domain-check", status, S.scope_of(dom.space, 0) | {"n": "any"},
                                details=details, witnesses=witnesses)


def cmd_domain_gen(args):
    space = parse_space(args.sizes)
    t = None
    if args.kind == "mh":
        if not args.thresholds:
            raise InputError("--thresholds is required for an MH domain")
        lo, up = args.thresholds.split(":")
        t = Dm.Thresholds(tuple(int(x) for x in lo.split(",")), tuple(int(x) for x in up.split(",")))
    dom = GENERATORS[args.kind](space, t)
    text = serialize_domain(dom)
    if not args.output:
        return text
    Path(args.output).write_text(text)
    return S.VerificationReport("domain-gen", S.VERIFIED, S.scope_of(space, 0) | {"n": "any"},
                                counts={"preferences": len(dom)}, details={"kind": args.kind})


def cmd_enum_fbr(args):
    from .core import ProductSpace
    space = ProductSpace((args.size, 2))
    constrained = None
    if args.constrained:
        lo, up = (int(x) for x in args.constrained.split(","))
        constrained = (lo, up)
    fbrs = S.enum_fbrs(space, 0, args.n, constrained, _budget(args))
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for i, f in enumerate(fbrs, 1):
            g = R.Fbr(args.component - 1, f.n, f.size, f.ballots)
            (out / f"fbr_{i:04d}.fbr").write_text(serialize_fbr(g))
    details = {f"fbr_{i:04d}": list(f.ballots) for i, f in enumerate(fbrs, 1)}
    return S.VerificationReport("enum-fbr", S.VERIFIED, {"n": args.n, "sizes": str(args.size),
                                                         "limit": "checked only for the n and sizes listed here"},
                                counts={"fbrs": len(fbrs)}, details=details)


def cmd_enum_sp(args):
    dom = _load_domain(args.domain)
    mode = args.mode.replace("-", "_")
    res = S.enum_sp_rules(dom, args.n, mode, _budget(args), args.workers)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        ref = os.path.relpath(Path(args.domain).resolve(), out.resolve())
        for i, f in enumerate(res.rules, 1):
            (out / f"rule_{i:04d}.scf").write_text(serialize_scf(f, ref))
    status = S.EXHAUSTED if res.exhausted else S.VERIFIED
    details = {}
    for i, f in enumerate(res.rules, 1):
        try:
            parts = R.decompose(f)
            details[f"rule_{i:04d}"] = " | ".join(S.describe_marginal(g) for g in parts)
        except R.NotDecomposable:
            details[f"rule_{i:04d}"] = "not decomposable"
    return S.VerificationReport("enum-sp", status, S.scope_of(dom.space, args.n, mode=mode),
                                counts={"sp_rules": len(res.rules), "nodes": res.nodes}, details=details)


def _load_rule(path, domain_path=None):
    text = _read(path)
    ref = domain_path or scf_domain_path(text)
    if ref is None:
        raise InputError("rule file names no domain; pass --domain")
    if domain_path is None:
        ref = Path(path).parent / ref
    dom = _load_domain(ref)
    return parse_scf(text, dom)


def _rule_report(claim, f, extra=None):
    details = {"unanimous": R.is_unanimous(f), "tops_only": R.is_tops_only(f)}
    details.update(extra or {})
    m = R.find_manipulation(f)
    details["strategy_proof"] = m is None
    witnesses = [S.manipulation_witness(f, m)] if m is not None else []
    ok = details["unanimous"] and m is None
    if not ok and not witnesses:
        witnesses.append({"kind": "not-unanimous"})
    return S.VerificationReport(claim, S.VERIFIED if ok else S.REFUTED,
                                S.scope_of(f.domain.space, f.n), details=details, witnesses=witnesses)


def cmd_rules_check(args):
    return _rule_report("rule-check", _load_rule(args.rule, args.domain))


def cmd_rules_assemble(args):
    dom = _load_domain(args.domain)
    fbrs = [parse_fbr(_read(p)) for p in args.fbr]
    by_comp = {}
    for f in fbrs:
        if not R.validate_fbr(f):
            raise InputError(f"FBR for component {f.component + 1} violates ballot unanimity or monotonicity")
        dom.space.check_component(f.component)
        if f.size != dom.space.sizes[f.component]:
            raise InputError(f"FBR for component {f.component + 1} has size {f.size}")
        if f.component in by_comp:
            raise InputError(f"two FBRs for component {f.component + 1}")
        by_comp[f.component] = f
    if sorted(by_comp) != list(range(dom.space.m)):
        raise InputError(f"need one FBR per component (1..{dom.space.m})")
    parts = [R.fbr_rule(by_comp[s], induced_marginal_domain(dom, s)) for s in range(dom.space.m)]
    f = R.assemble(parts, dom)
    if args.output:
        Path(args.output).write_text(serialize_scf(f, os.path.relpath(Path(args.domain).resolve(),
                                                                      Path(args.output).resolve().parent)))
    return _rule_report("rule-assemble", f)


def cmd_rules_decompose(args):
    f = _load_rule(args.rule, args.domain)
    scope = S.scope_of(f.domain.space, f.n)
    try:
        parts = R.decompose(f)
    except R.NotDecomposable as exc:
        w = {"kind": "not-decomposable", "component": exc.component + 1,
             "first_profile": [j + 1 for j in exc.first], "second_profile": [j + 1 for j in exc.second],
             "note": "outcome is not a function of the component peaks; no other decomposition is searched"}
        return S.VerificationReport("rule-decompose", S.REFUTED, scope, witnesses=[w])
    except InputError as exc:
        return S.VerificationReport("rule-decompose", S.REFUTED, scope,
                                    witnesses=[{"kind": "not-unanimous", "note": str(exc)}])
    details = {f"component_{s + 1}": S.describe_marginal(g) for s, g in enumerate(parts)}
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for s, g in enumerate(parts):
            fbr = R.fbr_from_rule(g)
            if fbr is not None:
                (out / f"component_{s + 1}.fbr").write_text(serialize_fbr(fbr))
    return S.VerificationReport("rule-decompose", S.VERIFIED, scope, details=details)


def cmd_verify_prop1(args):
    dom = _load_domain(args.domain)
    s = _component(dom, args.component)
    return S.verify_proposition1(dom, _thresholds(args, dom), s, args.n, _budget(args), args.workers)


def cmd_verify_defn1(args):
    dom = _load_domain(args.domain)
    directions = {"both": ("if", "only_if"), "if": ("if",), "only-if": ("only_if",)}[args.direction]
    return S.verify_decomposable_domain(dom, args.n, _budget(args), args.workers, directions)


def cmd_verify_theorem(args):
    return S.verify_theorem(_load_domain(args.domain), args.n, _budget(args), args.workers)


def cmd_fixture_check(args):
    return run_fixture_assertions(load_fixture(args.name))


def cmd_fixture_export(args):
    if args.name != "table1":
        raise InputError("only the table1 fixture is exported as a domain file")
    Path(args.output).write_text(table1_text())
    return S.VerificationReport("fixture-export", S.VERIFIED, {"fixture": args.name})


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--no-banner", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-nodes", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-seconds", type=float, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="mhybrid", parents=[common],
                                description="Check preference domains and enumerate strategy-proof rules.")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, fn, help_):
        q = group.add_parser(name, help=help_, parents=[common])
        q.set_defaults(fn=fn)
        return q

    dom = groups.add_parser("domain", help="domain checks and generators").add_subparsers(dest="cmd", required=True)
    q = sub(dom, "check", cmd_domain_check, "richness and MH report for a domain file")
    q.add_argument("file")
    q.add_argument("--thresholds", help="lower:upper in the file's labels, e.g. 1,0:3,0")
    q = sub(dom, "gen", cmd_domain_gen, "write a generated domain")
    q.add_argument("kind", choices=sorted(GENERATORS))
    q.add_argument("--sizes", required=True, help="component sizes, e.g. 3x2")
    q.add_argument("--thresholds", help="encoded lower:upper, e.g. 0,0:2,0")
    q.add_argument("-o", "--output")

    rules = groups.add_parser("rules", help="rule enumeration and checks").add_subparsers(dest="cmd", required=True)
    q = sub(rules, "enum-fbr", cmd_enum_fbr, "list fixed ballot rules on one component")
    q.add_argument("--size", type=int, required=True)
    q.add_argument("-n", type=int, required=True)
    q.add_argument("-s", "--component", type=int, default=1, help="component written into exported files")
    q.add_argument("--constrained", help="encoded lower,upper")
    q.add_argument("-o", "--output", help="directory for .fbr files")
    q = sub(rules, "enum-sp", cmd_enum_sp, "list strategy-proof rules on a domain")
    q.add_argument("domain")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--mode", choices=("full", "tops-only"), default="full")
    q.add_argument("-o", "--output", help="directory for .scf files")
    q = sub(rules, "check", cmd_rules_check, "unanimity, tops-only and strategy-proofness of a rule file")
    q.add_argument("rule")
    q.add_argument("--domain")
    q = sub(rules, "assemble", cmd_rules_assemble, "assemble one FBR per component into a rule")
    q.add_argument("domain")
    q.add_argument("fbr", nargs="+")
    q.add_argument("-o", "--output")
    q = sub(rules, "decompose", cmd_rules_decompose, "split a rule into marginal rules")
    q.add_argument("rule")
    q.add_argument("--domain")
    q.add_argument("-o", "--output", help="directory for component .fbr files")

    ver = groups.add_parser("verify", help="exhaustive verification").add_subparsers(dest="cmd", required=True)
    q = sub(ver, "prop1", cmd_verify_prop1, "SP marginal rules versus FBRs on one component")
    q.add_argument("domain")
    q.add_argument("-s", "--component", type=int, required=True)
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--thresholds")
    q = sub(ver, "defn1", cmd_verify_defn1, "is the domain decomposable at this n")
    q.add_argument("domain")
    q.add_argument("-n", type=int, required=True)
    q.add_argument("--direction", choices=("both", "if", "only-if"), default="both")
    q = sub(ver, "theorem", cmd_verify_theorem, "rich domain: MH iff decomposable, at this n")
    q.add_argument("domain")
    q.add_argument("-n", type=int, required=True)

    fx = groups.add_parser("fixture", help="bundled reference cases").add_subparsers(dest="cmd", required=True)
    q = sub(fx, "check", cmd_fixture_check, "run a fixture's assertions")
    q.add_argument("name", choices=FIXTURE_NAMES)
    q = sub(fx, "export", cmd_fixture_export, "write the table1 domain file")
    q.add_argument("name", choices=FIXTURE_NAMES)
    q.add_argument("-o", "--output", required=True)
    return p


def cli_dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    fmt = getattr(args, "format", "text")
    banner = not getattr(args, "no_banner", False)
    for name, default in (("workers", 1), ("max_nodes", None), ("max_seconds", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        if args.workers < 1:
            raise InputError("--workers must be at least 1")
        report = args.fn(args)
    except ValueError as exc:  # InputError and malformed numbers alike
        stderr.write(f"input error: {exc}\n")
        return 2
    except ResourceError as exc:
        stderr.write(f"budget exhausted: {exc}\n")
        return 3
    if isinstance(report, str):  # raw file content requested on stdout
        stdout.write(report)
        return 0
    stdout.write(emit_report(report, fmt, banner))
    return EXIT_CODES[report.status]


def main():
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
