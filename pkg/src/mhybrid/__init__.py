"""Multidimensional hybrid preference domains, fixed ballot rules and decomposability checks."""

__version__ = "0.1.0"

from .core import (Domain, InputError, MarginalPreference, Preference, ProductSpace, ResourceError,
                   disagreement_set, induce_marginal, induce_marginal_at, induced_marginal_domain,
                   interior_interval, interval, is_complete_reversal)
from .domains import (Thresholds, find_hybrid_representation, gen_mh_domain, gen_msp_domain,
                      gen_separable_domain, gen_universal, is_hybrid_marginal, is_mh_domain,
                      is_mh_preference, is_msp_preference, is_semi_separable, is_separable,
                      is_top_separable, validate_thresholds)
from .rules import (Fbr, MarginalScf, Scf, VotingScheme, assemble, decompose, evaluate_fbr,
                    is_constrained_dictatorship, is_strategy_proof, is_tops_only, is_unanimous,
                    make_dictatorship, make_marginal_dictatorship, make_median_marginal, validate_fbr)
from .search import (EnumerationBudget, VerificationReport, enum_fbrs, enum_sp_marginal_rules, enum_sp_rules,
                     verify_decomposable_domain, verify_proposition1, verify_theorem)
from .fixtures import load_fixture, run_fixture_assertions
