"""Implicitly quantified modal logic: model checking, bisimulation, characteristic
formulas, first-order translation with EF games, tableau satisfiability and a
Hilbert-style proof checker."""
from .syntax import (Formula, Atom, Top, Bot, Not, And, Or, Imp, BoxE, BoxA, DiaE, DiaA,
                     TRUE, FALSE, parse_formula, render_formula, subformulas, modal_depth,
                     to_nnf, random_formula)
from .kripke import (KripkeModel, PointedModel, ModelError, validate_model, parse_model,
                     render_model, successors, unravel, restrict, random_model,
                     enumerate_models)
from .semantics import holds, valid_on_model, OracleBounds, sat_oracle
from .bisim import (max_bisimulation, bisimilar, n_bisimilar, CharContext, char_formula,
                    distinguishing_formula)
from .fo_bridge import (to_fo_structure, translate, fo_eval, quantifier_ranks, GameConfig,
                        ef_winner, Player)
from .tableau import witness_index_set, apply_br, decide_sat, is_valid, extract_model, Verdict
from .proofcheck import is_tautology_instance, match_axiom, check_proof, parse_proof

__version__ = "0.1.0"
