"""Good automata, Ramsey splits, factorization trees and good expressions for finite semigroup morphisms."""
from .algebra import (FiniteSemigroup, Morphism, PowerProfile, derived_alphabet, eval_morphism,
                      idempotents, is_group, left_ideal, power_profile, right_ideal,
                      split_alphabet, validate_semigroup)
from .automaton import (GoodnessReport, OrderedAutomaton, accepting_runs_finite, accepting_runs_up,
                        check_unambiguous_finite, check_unambiguous_omega, check_universal_finite,
                        image_of_restricted_language, reduce, verify_goodness, weakly_good_to_good)
from .ramsey import (FactTree, HeightAssignment, Split, default_heights, optimized_heights,
                     split_word, tree_from_split, verify_fact_tree, verify_ramsey)
from .rexpr import (RExpr, check_good_expression, count_parses, eliminate, finite_expressions,
                    omega_expression, parse_to_fact_tree, parse_unique, simplify_empty)
from .synthesis import (build_base_group, build_base_single_image, build_good, build_inductive_left,
                        build_inductive_right, build_report, choose_case)
from .words import UPWord

__version__ = "0.1.0"
