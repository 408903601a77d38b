"""Opacity verification for partially observed discrete-event systems."""

from .automata import (
    DEFAULT_OBSERVER_CAP,
    EPSILON,
    Automaton,
    Event,
    Observation,
    StructureReport,
    Verdict,
    Witness,
    classify,
    inclusion_modulo_projection,
    intersection_nonempty_modulo_projection,
    observer,
    product,
    project,
    project_string,
    realize_observation,
    trim,
    unobservable_reach,
)
from .errors import (
    InputNotDeterministic,
    MalformedFormula,
    ObserverBlowup,
    OpacheckError,
    ParseError,
    PreconditionViolated,
    TooLarge,
)
from .gadgets import (
    CnfFormula,
    Dag,
    IsoReduction,
    PoDeterminization,
    UnionUniversalityCso,
    cso_to_lbo,
    gen_cnf_cso,
    gen_dag_cso_unary,
    gen_dag_weak_lbo,
    gen_union_universality_cso,
    lbo_to_iso,
    po_determinize,
)
from .opacity import (
    CSO_ALGORITHMS,
    CsoInstance,
    IfsoInstance,
    IsoInstance,
    LboInstance,
    LengthSet,
    observation_length_set,
    select_cso_algorithm,
    verify_cso,
    verify_cso_inclusion,
    verify_cso_observer,
    verify_cso_unary_acyclic,
    verify_cso_unary_po,
    verify_ifso,
    verify_iso,
    verify_lbo,
    verify_lbo_weak,
)

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "CSO_ALGORITHMS",
    "CnfFormula",
    "CsoInstance",
    "DEFAULT_OBSERVER_CAP",
    "Dag",
    "EPSILON",
    "Event",
    "IfsoInstance",
    "InputNotDeterministic",
    "IsoInstance",
    "IsoReduction",
    "LboInstance",
    "LengthSet",
    "MalformedFormula",
    "Observation",
    "ObserverBlowup",
    "OpacheckError",
    "ParseError",
    "PoDeterminization",
    "PreconditionViolated",
    "StructureReport",
    "TooLarge",
    "UnionUniversalityCso",
    "Verdict",
    "Witness",
    "classify",
    "cso_to_lbo",
    "gen_cnf_cso",
    "gen_dag_cso_unary",
    "gen_dag_weak_lbo",
    "gen_union_universality_cso",
    "inclusion_modulo_projection",
    "intersection_nonempty_modulo_projection",
    "lbo_to_iso",
    "observation_length_set",
    "observer",
    "po_determinize",
    "product",
    "project",
    "project_string",
    "realize_observation",
    "select_cso_algorithm",
    "trim",
    "unobservable_reach",
    "verify_cso",
    "verify_cso_inclusion",
    "verify_cso_observer",
    "verify_cso_unary_acyclic",
    "verify_cso_unary_po",
    "verify_ifso",
    "verify_iso",
    "verify_lbo",
    "verify_lbo_weak",
    "__version__",
]
