"""Agents and the topologies composed from them.

A topology is a tree of immutable nodes:

* :class:`Chain` - one agent run for up to ``horizon`` steps;
* :class:`ControlFlow` - a graph of nodes, each with its own kernel,
  allowed action set and optional prompt/update override;
* :class:`Parallel` - two branches from the same start, a recombiner and an
  optional tail;
* :class:`Hierarchical` - outer agent, context handoff, inner topology,
  context hand-back, resuming agent;
* :class:`Empty` - emits nothing, probability one.

Leaves (chains and control flows) are addressed by their *stage path*, a
``/``-joined list of child slots from the root (``""`` for the root itself),
e.g. ``"inner/outer"``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Mapping, Optional, Union

from .errors import CoverageError, GoalError, ScenarioError, UnresolvedReference
from .kernels import Distribution, Kernel, RestrictedKernel
from .model import WILDCARD, ActionSpace, InitBuilder, State, UpdateFn, check_identifier


def sequence_key(actions) -> str:
    return ",".join(actions)


@dataclass(frozen=True)
class AgentSpec:
    name: str
    kernel: Kernel
    update: UpdateFn
    init: InitBuilder
    horizon: int
    action_space: ActionSpace
    bindings: Mapping[str, str] = field(default_factory=dict)
    allowed: Optional[frozenset[str]] = None
    _effective: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        check_identifier(self.name, "agent name")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ScenarioError(f"agent {self.name!r}: horizon must be a positive integer")
        if self.allowed is not None:
            object.__setattr__(self, "allowed", frozenset(self.allowed))
            if not self.allowed:
                raise ScenarioError(f"agent {self.name!r}: allowed set is empty")
        object.__setattr__(self, "bindings", dict(sorted(self.bindings.items())))

    @property
    def partition(self) -> frozenset[str]:
        return self.allowed if self.allowed is not None else frozenset(self.action_space.action_ids)

    def effective_kernel(self) -> Kernel:
        k = self._effective.get("k")
        if k is None:
            k = self.kernel if self.allowed is None else RestrictedKernel(self.kernel, {WILDCARD: self.allowed})
            self._effective["k"] = k
        return k


@dataclass(frozen=True)
class ContextEmission:
    """P(context | emitted action sequence).

    Rows are keyed by the comma-joined action sequence; ``"*"`` applies to
    every sequence. ``contexts`` is the alphabet this handoff can carry.
    """

    name: str
    contexts: tuple[str, ...]
    table: Mapping[str, Distribution]

    def __post_init__(self):
        object.__setattr__(self, "contexts", tuple(sorted(self.contexts)))
        for key, row in self.table.items():
            extra = set(row.support) - set(self.contexts)
            if extra:
                raise ScenarioError(f"emission {self.name!r} row {key!r}: contexts {sorted(extra)} not in its alphabet")

    def row(self, actions) -> Distribution:
        key = sequence_key(actions)
        row = self.table.get(key)
        if row is None:
            row = self.table.get(WILDCARD)
            if row is None:
                raise CoverageError(f"emission {self.name!r}: no row for action sequence {key!r}")
        return row

    def forced(self, context: str) -> ContextEmission:
        """Degenerate emission that always hands over ``context``."""
        if context not in self.contexts:
            raise ScenarioError(f"emission {self.name!r}: {context!r} is not in its alphabet")
        return ContextEmission(self.name, self.contexts, {WILDCARD: Distribution.point(context)})


@dataclass(frozen=True)
class Chain:
    agent: AgentSpec


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class FlowNode:
    kernel: Kernel
    allowed: Optional[frozenset[str]] = None
    init: Optional[InitBuilder] = None
    update: Optional[UpdateFn] = None
    _effective: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.allowed is not None:
            object.__setattr__(self, "allowed", frozenset(self.allowed))
            if not self.allowed:
                raise ScenarioError("control-flow node has an empty allowed set")

    def effective_kernel(self) -> Kernel:
        k = self._effective.get("k")
        if k is None:
            k = self.kernel if self.allowed is None else RestrictedKernel(self.kernel, {WILDCARD: self.allowed})
            self._effective["k"] = k
        return k


@dataclass(frozen=True)
class ControlFlow:
    """Graph-constrained agent.

    ``edges[node][action_class]`` names the successor node, or ``None`` to
    stop. A node without an ``edges`` entry is terminal. Entering a node with
    its own ``init`` re-prompts: the state is rebuilt from that template and
    the flow's context.
    """

    name: str
    action_space: ActionSpace
    init: InitBuilder
    update: UpdateFn
    horizon: int
    entry: str
    nodes: Mapping[str, FlowNode]
    edges: Mapping[str, Mapping[str, Optional[str]]]
    bindings: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        check_identifier(self.name, "control-flow name")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ScenarioError(f"control flow {self.name!r}: horizon must be a positive integer")
        object.__setattr__(self, "bindings", dict(sorted(self.bindings.items())))

    def allowed_at(self, node: str) -> frozenset[str]:
        allowed = self.nodes[node].allowed
        return allowed if allowed is not None else frozenset(self.action_space.action_ids)

    @property
    def partition(self) -> frozenset[str]:
        out = frozenset()
        for n in self.nodes:
            out |= self.allowed_at(n)
        return out

    def update_at(self, node: str) -> UpdateFn:
        return self.nodes[node].update or self.update


@dataclass(frozen=True)
class Parallel:
    """Independent branches from one start state, merged by ``recombiner``.

    ``recombiner`` maps ``(left final key, right final key)`` to the merged
    state; ``None`` concatenates the two histories left then right.
    """

    name: str
    left: "Topology"
    right: "Topology"
    recombiner: Optional[Mapping[tuple[str, str], State]] = None
    tail: Optional["Topology"] = None

    def merge(self, left: State, right: State) -> State:
        if self.recombiner is None:
            if left.form != "concat" or right.form != "concat":
                raise CoverageError(
                    f"recombiner gap in {self.name!r}: default merge needs history states, got {left.form}/{right.form}"
                )
            return State.of_history(left.history + right.history)
        try:
            return self.recombiner[(left.key, right.key)]
        except KeyError:
            raise CoverageError(f"recombiner gap in {self.name!r}: no merge for ({left.key!r}, {right.key!r})") from None


@dataclass(frozen=True)
class Hierarchical:
    name: str
    outer: AgentSpec
    emission_out: ContextEmission
    inner: "Topology"
    emission_back: ContextEmission
    resume: AgentSpec
    resume_carries_history: bool = False


Topology = Union[Chain, Empty, ControlFlow, Parallel, Hierarchical]
Leaf = Union[Chain, ControlFlow]


@dataclass(frozen=True)
class GoalQuery:
    goal: tuple[str, ...]
    context: str

    def __post_init__(self):
        object.__setattr__(self, "goal", tuple(self.goal))

    def prefix(self, k: int) -> GoalQuery:
        return GoalQuery(self.goal[:k], self.context)


def join_path(path: str, slot: str) -> str:
    return slot if not path else f"{path}/{slot}"


def children(node: Topology) -> list[tuple[str, Topology]]:
    if isinstance(node, Hierarchical):
        return [("inner", node.inner)]
    if isinstance(node, Parallel):
        kids = [("left", node.left), ("right", node.right)]
        if node.tail is not None:
            kids.append(("tail", node.tail))
        return kids
    return []


def leaves(node: Topology, path: str = "") -> Iterator[tuple[str, Leaf]]:
    """All stages in execution order with their paths."""
    if isinstance(node, (Chain, ControlFlow)):
        yield path, node
    elif isinstance(node, Hierarchical):
        yield join_path(path, "outer"), Chain(node.outer)
        yield from leaves(node.inner, join_path(path, "inner"))
        yield join_path(path, "resume"), Chain(node.resume)
    elif isinstance(node, Parallel):
        for slot, child in children(node):
            yield from leaves(child, join_path(path, slot))


def partition(node: Topology) -> frozenset[str]:
    out = frozenset()
    for _, leaf in leaves(node):
        out |= leaf.agent.partition if isinstance(leaf, Chain) else leaf.partition
    return out


def split_goal(node: Topology, goal) -> dict[str, tuple[str, ...]]:
    """Assign each goal action to a stage, in execution order.

    Each stage takes the longest run of leading goal actions that lie in its
    partition; partitions are disjoint, so the split is unambiguous.
    """
    goal = tuple(goal)
    known = partition(node)
    for a in goal:
        if a not in known:
            raise GoalError(f"invalid goal action {a!r}: not in any partition of the topology")
    out: dict[str, tuple[str, ...]] = {}
    rest = goal
    for path, leaf in leaves(node):
        part = leaf.agent.partition if isinstance(leaf, Chain) else leaf.partition
        n = 0
        while n < len(rest) and rest[n] in part:
            n += 1
        out[path] = rest[:n]
        rest = rest[n:]
    if rest:
        raise GoalError(f"goal action {rest[0]!r} is out of stage order for this topology")
    return out


def rewrite(node: Topology, fn: Callable[[Topology], Topology]) -> Topology:
    """Bottom-up rebuild of the tree through ``fn``."""
    if isinstance(node, Hierarchical):
        node = replace(node, inner=rewrite(node.inner, fn))
    elif isinstance(node, Parallel):
        node = replace(
            node,
            left=rewrite(node.left, fn),
            right=rewrite(node.right, fn),
            tail=None if node.tail is None else rewrite(node.tail, fn),
        )
    return fn(node)


def walk(node: Topology) -> Iterator[Topology]:
    yield node
    for _, child in children(node):
        yield from walk(child)


def agents(node: Topology) -> Iterator[AgentSpec]:
    for n in walk(node):
        if isinstance(n, Chain):
            yield n.agent
        elif isinstance(n, Hierarchical):
            yield n.outer
            yield n.resume


def hierarchical_depth(node: Topology) -> int:
    own = 1 if isinstance(node, Hierarchical) else 0
    return own + max((hierarchical_depth(c) for _, c in children(node)), default=0)


# --- structural enumeration -------------------------------------------------


def _chain_sequences(agent: AgentSpec) -> set[tuple[str, ...]]:
    space = agent.action_space
    part = sorted(agent.partition)
    out = set()

    def grow(seq):
        if len(seq) == agent.horizon:
            out.add(seq)
            return
        for a in part:
            if a in space and space.is_terminal(a):
                out.add(seq + (a,))
            else:
                grow(seq + (a,))

    grow(())
    return out


def _flow_sequences(flow: ControlFlow) -> set[tuple[str, ...]]:
    space = flow.action_space
    out = set()

    def grow(node, seq):
        for a in sorted(flow.allowed_at(node)):
            nxt_seq = seq + (a,)
            if a not in space:
                continue
            cls = space.action(a).cls
            succ = flow.edges.get(node, {}).get(cls) if node in flow.edges else None
            if cls in space.terminal_classes or len(nxt_seq) == flow.horizon or succ is None:
                out.add(nxt_seq)
            elif succ in flow.nodes:
                grow(succ, nxt_seq)

    grow(flow.entry, ())
    return out


def possible_sequences(node: Topology, limit: int = 100_000) -> Optional[set[tuple[str, ...]]]:
    """Structurally possible action sequences, or ``None`` past ``limit``."""
    if isinstance(node, Empty):
        return {()}
    if isinstance(node, Chain):
        n = len(node.agent.partition) ** node.agent.horizon
        return _chain_sequences(node.agent) if n <= limit else None
    if isinstance(node, ControlFlow):
        n = max(len(node.allowed_at(x)) for x in node.nodes) ** node.horizon
        return _flow_sequences(node) if n <= limit else None
    if isinstance(node, Hierarchical):
        parts = [possible_sequences(Chain(node.outer), limit), possible_sequences(node.inner, limit),
                 possible_sequences(Chain(node.resume), limit)]
    else:
        parts = [possible_sequences(node.left, limit), possible_sequences(node.right, limit)]
        if node.tail is not None:
            parts.append(possible_sequences(node.tail, limit))
    if any(p is None for p in parts):
        return None
    size = 1
    for p in parts:
        size *= len(p)
    if size > limit:
        return None
    return {tuple(itertools.chain.from_iterable(combo)) for combo in itertools.product(*parts)}


def _emission_gaps(emission: ContextEmission, emitter: Topology) -> list[str]:
    if WILDCARD in emission.table:
        return []
    seqs = possible_sequences(emitter)
    if seqs is None:
        return []
    return [
        f"emission {emission.name!r} missing row for action sequence {sequence_key(s)!r}"
        for s in sorted(seqs)
        if sequence_key(s) not in emission.table
    ]


def _overlap(label: str, parts: list[frozenset[str]]) -> list[str]:
    found = []
    for i, j in itertools.combinations(range(len(parts)), 2):
        common = parts[i] & parts[j]
        if common:
            found.append(f"partition overlap: {{{', '.join(sorted(common))}}} in {label}")
    return found


def _agent_issues(agent: AgentSpec) -> list[str]:
    issues = []
    space = agent.action_space
    stray = agent.kernel.action_support() - set(space.action_ids)
    if stray:
        issues.append(f"agent {agent.name!r}: kernel {agent.kernel.name!r} emits {sorted(stray)} outside action space {space.name!r}")
    if agent.allowed is not None and not agent.allowed <= set(space.action_ids):
        issues.append(f"agent {agent.name!r}: allowed set {sorted(agent.allowed - set(space.action_ids))} outside action space")
    issues.extend(_binding_issues(agent.init, agent.bindings, f"agent {agent.name!r}"))
    return issues


def _binding_issues(init: InitBuilder, bindings: Mapping[str, str], label: str) -> list[str]:
    issues = []
    for p, domain in init.params.items():
        if p not in bindings:
            issues.append(f"{label}: template parameter {p!r} is unbound")
        elif bindings[p] not in domain:
            issues.append(f"{label}: value {bindings[p]!r} outside the domain of {p!r}")
    return issues


def _flow_issues(flow: ControlFlow) -> list[str]:
    issues = []
    space = flow.action_space
    if flow.entry not in flow.nodes:
        issues.append(f"control flow {flow.name!r}: entry node {flow.entry!r} does not exist")
    issues.extend(_binding_issues(flow.init, flow.bindings, f"control flow {flow.name!r}"))
    for name, node in sorted(flow.nodes.items()):
        allowed = flow.allowed_at(name)
        if not allowed <= set(space.action_ids):
            issues.append(f"control flow {flow.name!r} node {name!r}: allowed actions outside action space")
        stray = node.kernel.action_support() - set(space.action_ids)
        if stray:
            issues.append(f"control flow {flow.name!r} node {name!r}: kernel emits {sorted(stray)} outside action space")
        if node.init is not None:
            issues.extend(_binding_issues(node.init, flow.bindings, f"control flow {flow.name!r} node {name!r}"))
        if name not in flow.edges:
            continue
        succ = flow.edges[name]
        for a in sorted(allowed):
            if a not in space:
                continue
            cls = space.action(a).cls
            if cls in space.terminal_classes:
                continue
            if cls not in succ:
                issues.append(f"control flow {flow.name!r} node {name!r}: no edge for action class {cls!r}")
        for cls, target in sorted(succ.items()):
            if target is not None and target not in flow.nodes:
                issues.append(f"control flow {flow.name!r} node {name!r}: edge {cls!r} targets unknown node {target!r}")
    for name in flow.edges:
        if name not in flow.nodes:
            issues.append(f"control flow {flow.name!r}: edges declared for unknown node {name!r}")
    return issues


def structural_issues(node: Topology) -> list[str]:
    issues: list[str] = []
    for n in walk(node):
        if isinstance(n, Chain):
            issues.extend(_agent_issues(n.agent))
        elif isinstance(n, ControlFlow):
            issues.extend(_flow_issues(n))
        elif isinstance(n, Hierarchical):
            issues.extend(_agent_issues(n.outer))
            issues.extend(_agent_issues(n.resume))
            issues.extend(_overlap(
                f"hierarchical {n.name!r}",
                [n.outer.partition, partition(n.inner), n.resume.partition],
            ))
            issues.extend(_emission_gaps(n.emission_out, Chain(n.outer)))
            issues.extend(_emission_gaps(n.emission_back, n.inner))
        elif isinstance(n, Parallel):
            issues.extend(_overlap(f"parallel {n.name!r}", [partition(n.left), partition(n.right)]))
    return issues


def compose_hierarchical(
    outer: AgentSpec,
    e_out: ContextEmission,
    inner: Topology,
    e_back: ContextEmission,
    resume: AgentSpec,
    name: str = "hier",
    resume_carries_history: bool = False,
) -> Hierarchical:
    node = Hierarchical(name, outer, e_out, inner, e_back, resume, resume_carries_history)
    issues = [i for i in structural_issues(node) if i.startswith(("partition overlap", "emission"))]
    if issues:
        raise ScenarioError("; ".join(issues))
    return node


def compose_parallel(left: Topology, right: Topology, recombiner=None, tail=None, name: str = "par") -> Parallel:
    node = Parallel(name, left, right, recombiner, tail)
    issues = _overlap(f"parallel {name!r}", [partition(left), partition(right)])
    if issues:
        raise ScenarioError("; ".join(issues))
    return node


def validate_topology(
    t: Topology,
    contexts=None,
    budget: int = 10**7,
) -> list[str]:
    """Every violation found, as readable messages (empty means valid).

    Beyond the structural checks, the topology is run symbolically from each
    context in ``contexts`` over every positive-probability path, which
    surfaces missing kernel rows, emission rows, recombiner entries and
    dead-end restrictions. That pass is skipped when its enumeration bound
    exceeds ``budget``.
    """
    from .inference import reachable_issues

    issues = structural_issues(t)
    if issues:
        return issues
    for c in contexts or ():
        issues.extend(reachable_issues(t, c, budget))
    return issues


def find_agent(node: Topology, name: str) -> AgentSpec:
    for a in agents(node):
        if a.name == name:
            return a
    raise UnresolvedReference("target", name)
