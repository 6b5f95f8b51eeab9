"""Branching- and alternating-time temporal logics with a single-variable
translation: parsing, explicit-state model checking, gadget models, witness
constructions and bounded satisfiability search."""

from .cgs import (
    CAction,
    ConcurrentGameModel,
    cgs_from_json,
    cgs_from_kripke,
    cgs_to_dot,
    cgs_to_json,
    mc_atl,
    outcomes,
    pre,
    strategy_oracle,
    validate_cgs,
)
from .embedding import (
    Flavor,
    TranslationResult,
    canonicalize_variables,
    chi,
    embed,
    gadget_formula,
    gadget_model_cgs,
    gadget_model_kripke,
    hat_top_collapse,
    prime,
    theta,
    var_marker,
    witness_model_cgs,
    witness_model_forward,
)
from .kripke import (
    KripkeModel,
    exists_path_check,
    kripke_from_json,
    kripke_to_dot,
    kripke_to_json,
    mc_ctl,
    mc_ctlstar,
    reachable_submodel,
    restrict_submodel,
    validate,
)
from .satsearch import SatVerdict, bounded_sat, bounded_sat_cgs, enumerate_cgs, enumerate_kripke
from .syntax import (
    FALSE,
    AgentSet,
    Always,
    Classification,
    Coalition,
    Falsum,
    ForAllPaths,
    Formula,
    FragmentError,
    Implies,
    LogicId,
    Next,
    ParseError,
    SortError,
    Until,
    Var,
    classify,
    ctl_to_atl,
    expand_derived,
    fold_variable_free,
    format_formula,
    parse,
    substitute,
    substitute_all,
)
from .verification import SuiteResult, run_suites

__version__ = "0.1.0"
