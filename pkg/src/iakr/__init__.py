"""Keys and independence atoms over relational schemas.

Satisfaction checking, a nine-rule proof system with saturation, a
polynomial decision procedure for general implication of keys and unary
atoms, chase countermodels, and the finite-implication separation family
Σ_n with its explicit finite models.
"""

from .core import (
    IA,
    ConstraintSet,
    CSVFormatError,
    Key,
    ParseError,
    Relation,
    Schema,
    SchemaError,
    format_constraint_file,
    ind,
    key,
    load_relation,
    parse_constraint,
    parse_constraint_file,
    project,
    projection_size,
    select_eq,
)
from .countermodel import (
    ChasePrefix,
    ChaseTooLarge,
    InvariantViolation,
    PreconditionError,
    finite_chase_model,
    lemma2_chain,
    lemma2_prefix_holds,
    theorem2_chain,
    theorem2_prefix,
    verify_countermodel,
)
from .decision import ImplicationAnswer, UnsupportedConstraint, constant_attributes, implies_general
from .derivation import ProofTree, Rule, apply_rule, check_proof, derive, hypothesis, saturate
from .semantics import confirms_violation, restrict_constraints, satisfies, satisfies_all
from .separation import (
    bounded_search,
    cardinality_schedule,
    counting_chain,
    enumerate_relations,
    kary_demo,
    lemma3_model,
    lemma4_model,
    lemma5_models,
    lemma6_models,
    sigma_n,
    theorem3_countermodel,
    upward_closure,
)

__all__ = [name for name in dir() if not name.startswith("_")]
