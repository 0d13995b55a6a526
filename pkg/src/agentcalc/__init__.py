"""Agents as probability kernels: exact and sampled goal probabilities,
composition of agents into hierarchical, parallel and control-flow
topologies, and search over their configurable parts."""
from __future__ import annotations

from .errors import (
    AgentCalcError,
    BudgetExceeded,
    CoverageError,
    DeadEndError,
    DofViolation,
    DomainError,
    FormMismatch,
    GoalError,
    NormalizationError,
    ParseError,
    ScenarioError,
    UnresolvedReference,
    ValidationError,
    VersionMismatch,
)
from .inference import (
    Estimate,
    Trace,
    estimate_goal_probability,
    exact_goal_probability,
    prefix_probabilities,
    sample_trajectory,
    sequence_distribution,
)
from .kernels import (
    Distribution,
    ReActKernel,
    RestrictedKernel,
    TabularKernel,
    action_distribution,
    marginalize_thoughts,
    restrict,
)
from .model import (
    Action,
    ActionSpace,
    Alphabet,
    ContextAlphabet,
    InitBuilder,
    State,
    ThoughtAlphabet,
    UpdateFn,
    apply_update,
    build_initial_state,
)
from .optimize import (
    CostModel,
    DofHandle,
    Mutation,
    Objective,
    StrategyKind,
    collab_cost,
    dof_handles,
    optimize_context,
    optimize_dof,
    regularized_objective,
)
from .report import ResultRow, emit_report
from .scenario import ScenarioDoc, load_scenario, parse_scenario, serialize_scenario
from .topology import (
    AgentSpec,
    Chain,
    ContextEmission,
    ControlFlow,
    Empty,
    FlowNode,
    GoalQuery,
    Hierarchical,
    Parallel,
    compose_hierarchical,
    compose_parallel,
    validate_topology,
)

__all__ = sorted(
    name for name, value in globals().items()
    if not name.startswith("_") and name != "annotations" and not hasattr(value, "__path__") and type(value).__name__ != "module"
)
