"""Degrees of freedom, collaboration cost and the optimizers built on them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .errors import DeadEndError, DofViolation, GoalError, ScenarioError, UnresolvedReference
from .inference import DEFAULT_BUDGET, exact_goal_probability
from .topology import (
    AgentSpec,
    Chain,
    ControlFlow,
    GoalQuery,
    Hierarchical,
    Topology,
    hierarchical_depth,
    rewrite,
    walk,
)


class StrategyKind(str, Enum):
    REACT = "ReAct"
    COMPOSABLE_INFERENCE = "ComposableInference"
    DEEP_THINKING = "DeepThinking"
    FINE_TUNING = "FineTuning"
    CONTROL_FLOW = "ControlFlow"
    MULTI_AGENT_NO_COLLAB = "MultiAgentNoCollab"
    MULTI_AGENT_COLLAB = "MultiAgentCollab"


class DofHandle(str, Enum):
    INIT_STATE = "init_state"
    UPDATE = "update"
    KERNEL = "kernel"
    ACTION_PARTITION = "action_partition"
    EMISSION_OUT = "emission_out"
    EMISSION_BACK = "emission_back"


_H = DofHandle
_PARTITIONED = frozenset({_H.KERNEL, _H.UPDATE, _H.INIT_STATE, _H.ACTION_PARTITION})

# Optimizing parameters per methodology.
DOF_TABLE: dict[StrategyKind, frozenset[DofHandle]] = {
    StrategyKind.REACT: frozenset({_H.INIT_STATE, _H.UPDATE}),
    StrategyKind.COMPOSABLE_INFERENCE: frozenset({_H.KERNEL}),
    StrategyKind.DEEP_THINKING: frozenset({_H.KERNEL}),
    StrategyKind.FINE_TUNING: frozenset({_H.KERNEL}),
    StrategyKind.CONTROL_FLOW: _PARTITIONED,
    StrategyKind.MULTI_AGENT_NO_COLLAB: _PARTITIONED,
    StrategyKind.MULTI_AGENT_COLLAB: _PARTITIONED | {_H.EMISSION_OUT, _H.EMISSION_BACK},
}

HANDLE_ORDER = tuple(DofHandle)


def dof_handles(kind) -> frozenset[DofHandle]:
    return DOF_TABLE[StrategyKind(kind)]


def check_handle(kind, handle) -> None:
    kind, handle = StrategyKind(kind), DofHandle(handle)
    if handle not in DOF_TABLE[kind]:
        raise DofViolation(handle.value, kind.value)


@dataclass(frozen=True)
class CostModel:
    w_msg: float = 1.0
    w_ctx: float = 0.1
    w_depth: float = 0.5

    def __post_init__(self):
        for name in ("w_msg", "w_ctx", "w_depth"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v) or v < 0:
                raise ScenarioError(f"cost weight {name} must be a finite number >= 0")


@dataclass(frozen=True)
class Objective:
    goal: GoalQuery
    lam: float = 0.01
    cost_model: CostModel = CostModel()

    def __post_init__(self):
        if not isinstance(self.lam, (int, float)) or not math.isfinite(self.lam) or self.lam < 0:
            raise ScenarioError(f"regularization weight must be >= 0, got {self.lam!r}")


@dataclass(frozen=True)
class Mutation:
    """A finite domain for one degree of freedom of one target.

    ``target`` names an agent, a control flow (``flow`` or ``flow/node``)
    or a hierarchical node. ``values`` are registry ids (kernels, updates,
    templates, emissions), parameter values when ``param`` is set, or
    allowed action sets for ``action_partition``.
    """

    handle: DofHandle
    target: str
    values: tuple
    param: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "handle", DofHandle(self.handle))
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ScenarioError(f"mutation {self.label}: empty value domain")

    @property
    def label(self) -> str:
        suffix = f".{self.param}" if self.param else ""
        return f"{self.handle.value}:{self.target}{suffix}"

    def sort_key(self):
        return (HANDLE_ORDER.index(self.handle), self.target, self.param or "")


def collab_cost(t: Topology, cm: CostModel) -> float:
    """Structural collaboration cost of a topology.

    Two boundary crossings per hierarchical node (handoff and hand-back),
    the context alphabet sizes of those crossings, and the deepest
    hierarchical nesting level.
    """
    hier = [n for n in walk(t) if isinstance(n, Hierarchical)]
    if not hier:
        return 0.0
    crossings = 2 * len(hier)
    symbols = sum(len(n.emission_out.contexts) + len(n.emission_back.contexts) for n in hier)
    return cm.w_msg * crossings + cm.w_ctx * symbols + cm.w_depth * hierarchical_depth(t)


def regularized_objective(t: Topology, obj: Objective, budget: int = DEFAULT_BUDGET) -> float:
    if obj.lam < 0:
        raise ScenarioError("regularization weight must be >= 0")
    p = exact_goal_probability(t, obj.goal, budget)
    return p - obj.lam * collab_cost(t, obj.cost_model)


def optimize_context(
    t: Hierarchical,
    obj: Objective,
    budget: int,
    boundary: str = "out",
    enum_budget: int = DEFAULT_BUDGET,
) -> tuple[str, float]:
    """Best context to force at one handoff of a hierarchical topology.

    Each candidate replaces the handoff's emission with a point mass and is
    scored exactly (one probe per budget unit). Ties go to the
    lexicographically smallest context.
    """
    if not isinstance(t, Hierarchical):
        raise ScenarioError("context search needs a hierarchical topology")
    if budget < 1:
        raise ScenarioError("context search budget must be at least 1")
    emission = t.emission_out if boundary == "out" else t.emission_back
    best: Optional[tuple[str, float]] = None
    for c in emission.contexts[:budget]:
        forced = emission.forced(c)
        probe = replace(t, emission_out=forced) if boundary == "out" else replace(t, emission_back=forced)
        value = regularized_objective(probe, obj, enum_budget)
        if best is None or value > best[1]:
            best = (c, value)
    return best


# --- degree-of-freedom search -----------------------------------------------


def _split_target(target: str) -> tuple[str, Optional[str]]:
    head, _, node = target.partition("/")
    return head, node or None


def _mutate_agent(agent: AgentSpec, doc, m: Mutation, value) -> AgentSpec:
    h = m.handle
    if h == DofHandle.KERNEL:
        return replace(agent, kernel=_registry(doc.kernels, value, m))
    if h == DofHandle.UPDATE:
        return replace(agent, update=_registry(doc.updates, value, m))
    if h == DofHandle.INIT_STATE:
        if m.param is None:
            return replace(agent, init=_registry(doc.templates, value, m))
        return replace(agent, bindings={**agent.bindings, m.param: value})
    if h == DofHandle.ACTION_PARTITION:
        return replace(agent, allowed=frozenset(value))
    raise ScenarioError(f"mutation {m.label}: handle does not apply to agent {agent.name!r}")


def _mutate_flow(flow: ControlFlow, node: Optional[str], doc, m: Mutation, value) -> ControlFlow:
    h = m.handle
    if node is None:
        if h == DofHandle.UPDATE:
            return replace(flow, update=_registry(doc.updates, value, m))
        if h == DofHandle.INIT_STATE:
            if m.param is None:
                return replace(flow, init=_registry(doc.templates, value, m))
            return replace(flow, bindings={**flow.bindings, m.param: value})
        raise ScenarioError(f"mutation {m.label}: target a node as 'flow/node'")
    if node not in flow.nodes:
        raise UnresolvedReference(f"mutations[{m.label}]", m.target)
    fnode = flow.nodes[node]
    if h == DofHandle.KERNEL:
        fnode = replace(fnode, kernel=_registry(doc.kernels, value, m))
    elif h == DofHandle.UPDATE:
        fnode = replace(fnode, update=_registry(doc.updates, value, m))
    elif h == DofHandle.INIT_STATE and m.param is None:
        fnode = replace(fnode, init=_registry(doc.templates, value, m))
    elif h == DofHandle.INIT_STATE:
        return replace(flow, bindings={**flow.bindings, m.param: value})
    elif h == DofHandle.ACTION_PARTITION:
        fnode = replace(fnode, allowed=frozenset(value))
    else:
        raise ScenarioError(f"mutation {m.label}: handle does not apply to a control-flow node")
    return replace(flow, nodes={**flow.nodes, node: fnode})


def _registry(table, key, m: Mutation):
    try:
        return table[key]
    except KeyError:
        raise UnresolvedReference(f"mutations[{m.label}]", key) from None


def apply_mutation(doc, m: Mutation, value):
    """Scenario with one degree of freedom set to ``value``."""
    head, node = _split_target(m.target)
    hit = False

    def fn(n):
        nonlocal hit
        if isinstance(n, Chain) and n.agent.name == head and node is None:
            hit = True
            return Chain(_mutate_agent(n.agent, doc, m, value))
        if isinstance(n, ControlFlow) and n.name == head:
            hit = True
            return _mutate_flow(n, node, doc, m, value)
        if isinstance(n, Hierarchical):
            if n.name == head and m.handle in (DofHandle.EMISSION_OUT, DofHandle.EMISSION_BACK):
                hit = True
                field_name = "emission_out" if m.handle == DofHandle.EMISSION_OUT else "emission_back"
                return replace(n, **{field_name: _registry(doc.emissions, value, m)})
            if node is None and head in (n.outer.name, n.resume.name):
                hit = True
                if n.outer.name == head:
                    n = replace(n, outer=_mutate_agent(n.outer, doc, m, value))
                if n.resume.name == head:
                    n = replace(n, resume=_mutate_agent(n.resume, doc, m, value))
        return n

    topology = rewrite(doc.topology, fn)
    if not hit:
        raise UnresolvedReference(f"mutations[{m.label}]", m.target)
    agents = dict(doc.agents)
    if head in agents and node is None:
        agents[head] = _mutate_agent(agents[head], doc, m, value)
    return replace(doc, topology=topology, agents=agents)


@dataclass(frozen=True)
class Candidate:
    """One evaluated configuration, in canonical order ``order``."""

    config: str
    probability: float
    cost: float
    objective: float
    order: int


def _evaluate(doc, obj: Objective, enum_budget: int) -> tuple[float, float, float]:
    cost = collab_cost(doc.topology, obj.cost_model)
    try:
        p = exact_goal_probability(doc.topology, obj.goal, enum_budget)
    except GoalError:
        p = 0.0
    except DeadEndError:
        return 0.0, cost, -math.inf
    return p, cost, p - obj.lam * cost


def _describe(mutations, choice) -> str:
    parts = []
    for m, idx in zip(mutations, choice):
        if idx is None:
            continue
        v = m.values[idx]
        shown = "+".join(sorted(v)) if isinstance(v, (list, tuple, frozenset, set)) else str(v)
        parts.append(f"{m.label}={shown}")
    return ";".join(parts) or "baseline"


def _order_of(mutations, choice) -> int:
    if any(i is None for i in choice):
        return -1
    order = 0
    for m, idx in zip(mutations, choice):
        order = order * len(m.values) + idx
    return order


def optimize_dof(doc, kind, obj: Optional[Objective] = None, budget: int = 64, enum_budget: Optional[int] = None):
    """Search the declared mutation domains that ``kind`` may touch.

    Exhaustive when the full product of domains fits in ``budget``
    evaluations, otherwise greedy coordinate ascent from the baseline in
    canonical order. Returns ``(scenario, value, log)``; ``value`` is a
    fresh exact evaluation of the returned scenario and ``log`` lists
    every evaluated candidate in canonical order.
    """
    kind = StrategyKind(kind)
    obj = obj if obj is not None else doc.objective
    if obj is None:
        raise ScenarioError("optimization needs an objective")
    enum_budget = enum_budget if enum_budget is not None else doc.enum_budget
    for m in doc.mutations:
        check_handle(kind, m.handle)
    mutations = sorted(doc.mutations, key=Mutation.sort_key)

    cache: dict[tuple, Candidate] = {}

    def build(choice):
        d = doc
        for m, idx in zip(mutations, choice):
            if idx is not None:
                d = apply_mutation(d, m, m.values[idx])
        return d

    def score(choice) -> Candidate:
        hit = cache.get(choice)
        if hit is None:
            p, cost, value = _evaluate(build(choice), obj, enum_budget)
            hit = cache[choice] = Candidate(_describe(mutations, choice), p, cost, value, _order_of(mutations, choice))
        return hit

    baseline = tuple(None for _ in mutations)
    size = math.prod(len(m.values) for m in mutations)
    if not mutations:
        best = baseline
        score(best)
    elif size <= budget:
        best = None
        for choice in itertools.product(*(range(len(m.values)) for m in mutations)):
            cand = score(choice)
            if best is None or cand.objective > cache[best].objective:
                best = choice
    else:
        best = baseline
        score(best)
        improved = True
        while improved and len(cache) < budget:
            improved = False
            for i, m in enumerate(mutations):
                for idx in range(len(m.values)):
                    choice = best[:i] + (idx,) + best[i + 1:]
                    if choice not in cache and len(cache) >= budget:
                        break
                    if score(choice).objective > cache[best].objective:
                        best = choice
                        improved = True
    result = build(best)
    _, _, value = _evaluate(result, obj, enum_budget)
    log = sorted(cache.values(), key=lambda c: (c.order, c.config))
    return result, value, log
