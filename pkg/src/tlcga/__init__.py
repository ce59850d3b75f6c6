"""Model checking for the temporal logic of coalitional goal assignments.

The library covers the logic's syntax (parser, printer, goal-assignment
algebra), finite concurrent game models, fixpoint-based model checking,
formula transformations, a brute-force strategy oracle, bisimulation
checking, one-step satisfiability, and game-theoretic stability
constructors, with a command-line front end in `tlcga.cli`.
"""

from .bisim import (
    are_bisimilar,
    distinguishing_formula,
    greatest_bisimulation,
    hm_agreement,
)
from .checking import (
    CheckResult,
    Evaluator,
    check,
    check_with_stats,
    extension_of,
    valid_on,
)
from .formulas import (
    And,
    Coalition,
    EMPTY_ASSIGNMENT,
    FALSE,
    Falsity,
    GoalAssignment,
    GoalAssignmentKind,
    Globally,
    Implies,
    Mu,
    Next,
    Not,
    Nu,
    Or,
    PathAnd,
    PathFormula,
    Prop,
    StateFormula,
    Strategic,
    TRIVIAL_GOAL,
    TRUE,
    Truth,
    Until,
    Var,
    classify,
    desugar,
    format_goal_assignment,
    format_path,
    format_state,
    make_path_and,
    path_conjuncts,
    split_long_term_and_next,
    strategic,
)
from .models import (
    ConcurrentGameModel,
    InvalidModelError,
    ResourceLimitError,
    disjoint_union,
    load_model,
    save_model,
)
from .onestep import (
    OneStepSequent,
    OneStepShapeError,
    SatConstraint,
    sequent_from_formulas,
    sequent_satisfiable,
    validate_game_form,
    witness_game_form,
)
from .parser import FormulaSyntaxError, parse_path_formula, parse_state_formula
from .stability import (
    GoalNegationError,
    OutcomePartition,
    coalitional_ga,
    coequilibrium_ga,
    core_membership_formula,
    nash_ga,
    partition_outcomes,
    strong_ga,
)
from .strategies import (
    FiniteStrategyProfile,
    MemoryMode,
    POSITIONAL,
    atl_check,
    find_witness,
    parse_memory_mode,
    profile_from_json_dict,
    verify_witness,
)
from .transforms import (
    axiom_instance,
    induction_formula,
    nexttime_extension,
    normal_form,
    to_mu,
    unfold,
)

__all__ = [
    "And",
    "CheckResult",
    "Coalition",
    "ConcurrentGameModel",
    "EMPTY_ASSIGNMENT",
    "Evaluator",
    "FALSE",
    "Falsity",
    "FiniteStrategyProfile",
    "FormulaSyntaxError",
    "GoalAssignment",
    "GoalAssignmentKind",
    "GoalNegationError",
    "Globally",
    "Implies",
    "InvalidModelError",
    "MemoryMode",
    "Mu",
    "Next",
    "Not",
    "Nu",
    "OneStepSequent",
    "OneStepShapeError",
    "Or",
    "OutcomePartition",
    "POSITIONAL",
    "PathAnd",
    "PathFormula",
    "Prop",
    "ResourceLimitError",
    "SatConstraint",
    "StateFormula",
    "Strategic",
    "TRIVIAL_GOAL",
    "TRUE",
    "Truth",
    "Until",
    "Var",
    "are_bisimilar",
    "atl_check",
    "axiom_instance",
    "check",
    "check_with_stats",
    "classify",
    "coalitional_ga",
    "coequilibrium_ga",
    "core_membership_formula",
    "desugar",
    "disjoint_union",
    "distinguishing_formula",
    "extension_of",
    "find_witness",
    "format_goal_assignment",
    "format_path",
    "format_state",
    "greatest_bisimulation",
    "hm_agreement",
    "induction_formula",
    "load_model",
    "make_path_and",
    "nash_ga",
    "nexttime_extension",
    "normal_form",
    "parse_memory_mode",
    "parse_path_formula",
    "parse_state_formula",
    "partition_outcomes",
    "path_conjuncts",
    "profile_from_json_dict",
    "save_model",
    "sequent_from_formulas",
    "sequent_satisfiable",
    "split_long_term_and_next",
    "strategic",
    "strong_ga",
    "to_mu",
    "unfold",
    "valid_on",
    "validate_game_form",
    "verify_witness",
    "witness_game_form",
]
