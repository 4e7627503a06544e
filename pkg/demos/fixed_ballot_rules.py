"""Enumerate fixed ballot rules and compare them with strategy-proof marginal rules."""

from mhybrid.core import MarginalPreference, ProductSpace
from mhybrid.fixtures import LEMMA8_BALLOTS, lemma8_closed_form
from mhybrid.rules import Fbr, evaluate_fbr, fbr_rule
from mhybrid.search import enum_fbrs, enum_sp_marginal_rules

space = ProductSpace((3, 2))
fbrs = enum_fbrs(space, 0, 2)
print(f"{len(fbrs)} FBRs on a 3-chain with two voters:")
for f in fbrs:
    print("  ballots", f.ballots)

# single-peaked orders on the chain 0 < 1 < 2
sp_orders = [MarginalPreference(0, r) for r in ((0, 1, 2), (1, 0, 2), (1, 2, 0), (2, 1, 0))]
found = {g.key for g in enum_sp_marginal_rules(sp_orders, 2).rules}
images = {fbr_rule(f, sp_orders).key for f in fbrs}
print("SP marginal rules on single-peaked orders equal the FBR images:", found == images)

f = Fbr(0, 3, 5, LEMMA8_BALLOTS)
for peaks in ((2, 0, 4), (0, 2, 4), (4, 0, 0)):
    print(f"peaks {peaks}: rule {evaluate_fbr(f, peaks)}, closed form {lemma8_closed_form(peaks)}")
