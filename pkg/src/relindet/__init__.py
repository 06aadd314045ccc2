"""Relative indeterminacy on 1+1D Minkowski space-time.

Propositions about random outcomes are three-valued: they become true or
false only inside the closed future light cone of the event that fixes the
outcome. On top of that sit classical propensity models, no-signaling boxes
and a small state-vector engine that assigns a global quantum state to every
space-time point.
"""

from .boxes import (
    Box,
    ConditionedBox,
    chsh_value,
    condition_box,
    local_bound,
    no_signaling_check,
    pr_box,
)
from .determinacy import (
    DeterminationEvent,
    Determinations,
    KnowledgeMark,
    atom_truth_at,
    check_local_reality,
    determinacy_frontier,
    minimal_determining_sets,
    present_reality_falsifier,
    truth_at,
)
from .diagram import render_diagram
from .engine import Report, realize, run
from .errors import (
    ArityError,
    DeclarationError,
    ModelInconsistencyError,
    RelindetError,
    ScenarioError,
    SuperluminalError,
)
from .logic import Atom, Connective, TruthValue, kleene_connective, parse_proposition
from .quantum import (
    MeasurementEvent,
    QuantumRegister,
    QuantumSetup,
    born_probabilities,
    overlap,
    project,
    realize_outcomes,
    standard_states,
    state_at,
)
from .randomness import (
    CorrelationModel,
    PropensityAssignment,
    TrngProcess,
    propensity_at,
    sample,
    tick_events,
    validate_model,
)
from .scenario import Scenario, dump_scenario, load_builtin, parse_scenario
from .spacetime import (
    CausalRelation,
    Frame,
    SpacetimePoint,
    Worldline,
    boost,
    causal_relation,
    compose_velocities,
    in_future_cone,
    interval,
    simultaneity_coordinate,
    worldline_point_at,
)

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "Atom",
    "atom_truth_at",
    "boost",
    "born_probabilities",
    "Box",
    "causal_relation",
    "CausalRelation",
    "check_local_reality",
    "chsh_value",
    "compose_velocities",
    "condition_box",
    "ConditionedBox",
    "Connective",
    "CorrelationModel",
    "DeclarationError",
    "determinacy_frontier",
    "DeterminationEvent",
    "Determinations",
    "dump_scenario",
    "Frame",
    "in_future_cone",
    "interval",
    "kleene_connective",
    "KnowledgeMark",
    "load_builtin",
    "local_bound",
    "MeasurementEvent",
    "minimal_determining_sets",
    "ModelInconsistencyError",
    "no_signaling_check",
    "overlap",
    "parse_proposition",
    "parse_scenario",
    "pr_box",
    "present_reality_falsifier",
    "project",
    "propensity_at",
    "PropensityAssignment",
    "QuantumRegister",
    "QuantumSetup",
    "realize",
    "realize_outcomes",
    "RelindetError",
    "render_diagram",
    "Report",
    "run",
    "sample",
    "Scenario",
    "ScenarioError",
    "simultaneity_coordinate",
    "SpacetimePoint",
    "standard_states",
    "state_at",
    "SuperluminalError",
    "tick_events",
    "TrngProcess",
    "truth_at",
    "TruthValue",
    "validate_model",
    "Worldline",
    "worldline_point_at",
]
