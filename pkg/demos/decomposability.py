"""Decomposability and the MH characterization on two small 2x2 domains."""

from mhybrid.core import ProductSpace
from mhybrid.domains import Thresholds, gen_mh_domain, gen_universal
from mhybrid.io import emit_report
from mhybrid.rules import decompose
from mhybrid.search import describe_marginal, enum_sp_rules, verify_theorem

space = ProductSpace((2, 2))
mh = gen_mh_domain(space, Thresholds((0, 0), (0, 0)))
rules = enum_sp_rules(mh, 2).rules
print(f"MH 2x2 domain: {len(mh)} preferences, {len(rules)} strategy-proof rules")
for f in rules[:3]:
    print("  ", " | ".join(describe_marginal(g) for g in decompose(f)))

for name, dom in (("MH 2x2", mh), ("universal 2x2", gen_universal(space))):
    print(f"--- {name}")
    print(emit_report(verify_theorem(dom, 2), banner=False), end="")
