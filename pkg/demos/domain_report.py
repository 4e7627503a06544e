"""Richness and MH structure of the bundled 30-preference domain."""

from mhybrid.core import induced_marginal_domain
from mhybrid.domains import is_mh_domain
from mhybrid.fixtures import table1_domain
from mhybrid.graphs import build_pref_graph, richness_report

dom = table1_domain()
print(f"{len(dom)} preferences over {dom.space}")
t = is_mh_domain(dom)
print("MH thresholds (encoded):", t)
for s in range(dom.space.m):
    print(f"component {s + 1}: {len(induced_marginal_domain(dom, s))} distinct induced marginals")
g = build_pref_graph(dom)
print("graph edges:", len(g.edges))
rep = richness_report(dom, g)
a, b = rep["diversity_plus"]
print(f"minimal richness {rep['minimal_richness']}, diversity+ via P{a + 1} and P{b + 1}, "
      f"interior+ {bool(rep['interior_plus'])}, exterior+ {bool(rep['exterior_plus'])}")
