"""Exact goal probabilities by enumeration, and seeded Monte Carlo estimates.

The goal event is a prefix event per stage: the goal is split over the
stages (:func:`~agentcalc.topology.split_goal`) and each stage's executed
action sequence must start with its share. Exact evaluation sums, over every
latent assignment (thoughts, handed-over contexts, actions past the goal),
the product of kernel, emission and restriction factors.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BudgetExceeded,
    CoverageError,
    DeadEndError,
    DomainError,
    FormMismatch,
    GoalError,
    ScenarioError,
)
from .model import Action, State, build_initial_state
from .rng import CounterStream, uniforms
from .topology import (
    Chain,
    ControlFlow,
    Empty,
    GoalQuery,
    Hierarchical,
    Parallel,
    Topology,
    join_path,
    leaves,
    split_goal,
)

DEFAULT_BUDGET = 10**7
LOG_SPACE_DEPTH = 32


def _log_sum(logs: list[float]) -> float:
    top = max(logs)
    if top == -math.inf:
        return -math.inf
    return top + math.log(math.fsum(math.exp(x - top) for x in logs))


# --- enumeration budget -----------------------------------------------------


def term_bound(node: Topology, goals: dict[str, tuple], path: str = "") -> int:
    """Upper bound on the number of leaf terms exact enumeration visits."""
    if isinstance(node, Empty):
        return 1
    if isinstance(node, Chain):
        a = node.agent
        return _stage_bound(a.kernel.thought_count(), len(a.partition), a.horizon, len(goals.get(path, ())))
    if isinstance(node, ControlFlow):
        thoughts = max(n.kernel.thought_count() for n in node.nodes.values())
        width = max(len(node.allowed_at(n)) for n in node.nodes)
        return _stage_bound(thoughts, width, node.horizon, len(goals.get(path, ())))
    if isinstance(node, Hierarchical):
        return (
            term_bound(Chain(node.outer), goals, join_path(path, "outer"))
            * len(node.emission_out.contexts)
            * term_bound(node.inner, goals, join_path(path, "inner"))
            * len(node.emission_back.contexts)
            * term_bound(Chain(node.resume), goals, join_path(path, "resume"))
        )
    total = term_bound(node.left, goals, join_path(path, "left")) * term_bound(node.right, goals, join_path(path, "right"))
    if node.tail is not None:
        total *= term_bound(node.tail, goals, join_path(path, "tail"))
    return total


def _stage_bound(thoughts: int, width: int, horizon: int, forced: int) -> int:
    total = 1
    for step in range(horizon):
        total *= max(thoughts, 1) * (1 if step < forced else max(width, 1))
    return total


# --- exact enumeration ------------------------------------------------------


class _Enumerator:
    """Depth-first enumeration of one topology under fixed per-stage goals.

    ``outcomes`` returns ``{(action sequence, final state): weight}`` over the
    goal-consistent complete executions of a subtree; zero-weight branches
    are pruned and sub-results are memoized by start point.
    """

    def __init__(self, goals: dict[str, tuple]):
        self.goals = goals
        self.memo: dict = {}

    def outcomes(self, node: Topology, path: str, context: str, start: Optional[State]) -> dict:
        key = (path, context, None if start is None else start.key)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._compute(node, path, context, start)
        return hit

    def _compute(self, node, path, context, start):
        if isinstance(node, Empty):
            return {((), start if start is not None else State.of_history((context,))): 1.0}
        if isinstance(node, Chain):
            return self._chain(node.agent, path, context, start)
        if isinstance(node, ControlFlow):
            return self._flow(node, path, context, start)
        if isinstance(node, Hierarchical):
            return self._hierarchical(node, path, context, start)
        return self._parallel(node, path, context, start)

    def _chain(self, agent, path, context, start):
        s0 = start if start is not None else build_initial_state(agent.init, context, agent.bindings)
        s0 = agent.update.lift(s0)
        kernel = agent.effective_kernel()
        update = agent.update
        space = agent.action_space
        horizon = agent.horizon
        goal = self.goals.get(path, ())
        use_log = horizon > LOG_SPACE_DEPTH
        acc: dict = {}

        def visit(state, depth, actions, w):
            forced = goal[depth] if depth < len(goal) else None
            for t, wt, dist in kernel.branches(state):
                for a, pa in dist.items():
                    if pa <= 0.0 or (forced is not None and a != forced):
                        continue
                    nw = w + math.log(wt) + math.log(pa) if use_log else w * wt * pa
                    act = space.action(a)
                    nxt = update.apply(state, t, act.obs)
                    seq = actions + (a,)
                    if depth + 1 == horizon or act.cls in space.terminal_classes:
                        if len(seq) >= len(goal):
                            acc.setdefault((seq, nxt), []).append(nw)
                    else:
                        visit(nxt, depth + 1, seq, nw)

        visit(s0, 0, (), 0.0 if use_log else 1.0)
        if use_log:
            return {k: math.exp(_log_sum(v)) for k, v in acc.items()}
        return {k: math.fsum(v) for k, v in acc.items()}

    def _flow(self, flow: ControlFlow, path, context, start):
        space = flow.action_space
        goal = self.goals.get(path, ())
        use_log = flow.horizon > LOG_SPACE_DEPTH
        acc: dict = {}
        s0 = _flow_enter(flow, flow.entry, context, start if start is not None else
                         build_initial_state(flow.init, context, flow.bindings))

        def visit(node, state, depth, actions, w):
            forced = goal[depth] if depth < len(goal) else None
            fnode = flow.nodes[node]
            update = flow.update_at(node)
            for t, wt, dist in fnode.effective_kernel().branches(state):
                for a, pa in dist.items():
                    if pa <= 0.0 or (forced is not None and a != forced):
                        continue
                    nw = w + math.log(wt) + math.log(pa) if use_log else w * wt * pa
                    act = space.action(a)
                    nxt = update.apply(state, t, act.obs)
                    seq = actions + (a,)
                    succ = _successor(flow, node, act)
                    if succ is None or depth + 1 == flow.horizon:
                        if len(seq) >= len(goal):
                            acc.setdefault((seq, nxt), []).append(nw)
                    else:
                        visit(succ, _flow_enter(flow, succ, context, nxt), depth + 1, seq, nw)

        visit(flow.entry, s0, 0, (), 0.0 if use_log else 1.0)
        if use_log:
            return {k: math.exp(_log_sum(v)) for k, v in acc.items()}
        return {k: math.fsum(v) for k, v in acc.items()}

    def _hierarchical(self, node: Hierarchical, path, context, start):
        outer = self._chain(node.outer, join_path(path, "outer"), context, start)
        inner_path = join_path(path, "inner")
        resume_path = join_path(path, "resume")
        acc: dict = {}
        for (a_l, s_l), w_l in outer.items():
            for c_l, p_l in node.emission_out.row(a_l).items():
                if p_l <= 0.0:
                    continue
                inner = self.outcomes(node.inner, inner_path, c_l, None)
                for (a_k, _), w_k in inner.items():
                    for c_k, p_k in node.emission_back.row(a_k).items():
                        if p_k <= 0.0:
                            continue
                        r_start = _resume_start(node, s_l, c_k)
                        resumed = self.outcomes(Chain(node.resume), resume_path, c_k, r_start)
                        head = w_l * p_l * w_k * p_k
                        for (a_u, s_u), w_u in resumed.items():
                            acc.setdefault((a_l + a_k + a_u, s_u), []).append(head * w_u)
        return {k: math.fsum(v) for k, v in acc.items()}

    def _parallel(self, node: Parallel, path, context, start):
        left = self.outcomes(node.left, join_path(path, "left"), context, start)
        right = self.outcomes(node.right, join_path(path, "right"), context, start)
        tail_path = join_path(path, "tail")
        acc: dict = {}
        for (a_x, s_x), w_x in left.items():
            for (a_y, s_y), w_y in right.items():
                merged = node.merge(s_x, s_y)
                if node.tail is None:
                    acc.setdefault((a_x + a_y, merged), []).append(w_x * w_y)
                    continue
                for (a_n, s_n), w_n in self.outcomes(node.tail, tail_path, context, merged).items():
                    acc.setdefault((a_x + a_y + a_n, s_n), []).append(w_x * w_y * w_n)
        return {k: math.fsum(v) for k, v in acc.items()}


def _flow_enter(flow: ControlFlow, node: str, context: str, state: State) -> State:
    fnode = flow.nodes[node]
    if fnode.init is not None:
        state = build_initial_state(fnode.init, context, flow.bindings)
    return flow.update_at(node).lift(state)


def _successor(flow: ControlFlow, node: str, act: Action) -> Optional[str]:
    """Next node, or ``None`` when the flow stops after ``act``."""
    if act.cls in flow.action_space.terminal_classes or node not in flow.edges:
        return None
    succ = flow.edges[node]
    if act.cls not in succ:
        raise CoverageError(f"control flow {flow.name!r} node {node!r}: no edge for action class {act.cls!r}")
    return succ[act.cls]


def _resume_start(node: Hierarchical, outer_final: State, c_k: str) -> Optional[State]:
    if not node.resume_carries_history:
        return None
    if outer_final.form != "concat":
        raise FormMismatch(f"hierarchical {node.name!r}: carrying history needs a history-form outer state")
    fresh = build_initial_state(node.resume.init, c_k, node.resume.bindings)
    return State.of_history(outer_final.history + fresh.history)


def _goals_for(t: Topology, q: GoalQuery) -> dict[str, tuple]:
    return split_goal(t, q.goal)


def _check_budget(t: Topology, goals, budget: int) -> None:
    terms = term_bound(t, goals)
    if terms > budget:
        raise BudgetExceeded(terms, budget)


def exact_goal_probability(t: Topology, q: GoalQuery, budget: int = DEFAULT_BUDGET) -> float:
    if not q.goal:
        return 1.0
    goals = _goals_for(t, q)
    _check_budget(t, goals, budget)
    return math.fsum(_Enumerator(goals).outcomes(t, "", q.context, None).values())


def prefix_probabilities(t: Topology, q: GoalQuery, budget: int = DEFAULT_BUDGET) -> list[float]:
    """Exact probability of each goal prefix.

    Longer prefixes are nested events and their leaf products are computed
    identically, so the list is non-increasing even in floating point.
    """
    return [exact_goal_probability(t, q.prefix(k), budget) for k in range(1, len(q.goal) + 1)]


def sequence_distribution(t: Topology, context: str, budget: int = DEFAULT_BUDGET) -> dict[tuple, float]:
    """Exact probability of every complete action sequence."""
    goals = {path: () for path, _ in leaves(t)}
    _check_budget(t, goals, budget)
    acc: dict = {}
    for (seq, _), w in _Enumerator(goals).outcomes(t, "", context, None).items():
        acc.setdefault(seq, []).append(w)
    return {k: math.fsum(v) for k, v in sorted(acc.items())}


def reachable_issues(t: Topology, context: str, budget: int = DEFAULT_BUDGET) -> list[str]:
    """Coverage problems met on positive-probability paths from ``context``."""
    goals = {path: () for path, _ in leaves(t)}
    if term_bound(t, goals) > budget:
        return []
    try:
        _Enumerator(goals).outcomes(t, "", context, None)
    except (CoverageError, DeadEndError, FormMismatch, DomainError) as exc:
        return [f"from context {context!r}: {exc}"]
    return []


# --- sampling ---------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    stage: str
    state_before: State
    thought: Optional[str]
    action: Action
    state_after: State


@dataclass(frozen=True)
class Trace:
    steps: tuple[Step, ...]
    contexts_emitted: tuple[tuple[str, str], ...]
    terminal: bool

    @property
    def actions(self) -> tuple[str, ...]:
        return tuple(s.action.id for s in self.steps)

    def stage_actions(self, stage: str) -> tuple[str, ...]:
        return tuple(s.action.id for s in self.steps if s.stage == stage)


def _pick_branch(branches, u: float):
    acc = 0.0
    for b in branches:
        acc += b[1]
        if u < acc:
            return b
    return branches[-1]


class _Sampler:
    def __init__(self, stream: CounterStream, record: bool):
        self.stream = stream
        self.record = record
        self.steps: list[Step] = []
        self.contexts: list[tuple[str, str]] = []
        self.stage_actions: dict[str, tuple] = {}
        self.last_terminal = False

    def run(self, node, path, context, start):
        if isinstance(node, Empty):
            return (), start if start is not None else State.of_history((context,))
        if isinstance(node, Chain):
            return self._chain(node.agent, path, context, start)
        if isinstance(node, ControlFlow):
            return self._flow(node, path, context, start)
        if isinstance(node, Hierarchical):
            return self._hierarchical(node, path, context, start)
        return self._parallel(node, path, context, start)

    def _step(self, kernel, state, path, depth):
        uniform = self.stream.uniform
        branches = kernel.branches(state)
        if len(branches) == 1:
            t, _, dist = branches[0]
        else:
            t, _, dist = _pick_branch(branches, uniform(path, depth, "thought"))
        return t, dist.pick(uniform(path, depth, "action"))

    def _emit(self, step, path, state, t, act, nxt):
        if self.record:
            self.steps.append(Step(path, state, t, act, nxt))

    def _chain(self, agent, path, context, start):
        s = start if start is not None else build_initial_state(agent.init, context, agent.bindings)
        s = agent.update.lift(s)
        kernel = agent.effective_kernel()
        space = agent.action_space
        actions = []
        for depth in range(agent.horizon):
            t, a = self._step(kernel, s, path, depth)
            act = space.action(a)
            nxt = agent.update.apply(s, t, act.obs)
            self._emit(depth, path, s, t, act, nxt)
            actions.append(a)
            s = nxt
            self.last_terminal = act.cls in space.terminal_classes
            if self.last_terminal:
                break
        self.stage_actions[path] = tuple(actions)
        return tuple(actions), s

    def _flow(self, flow, path, context, start):
        node = flow.entry
        s = _flow_enter(flow, node, context, start if start is not None else
                        build_initial_state(flow.init, context, flow.bindings))
        actions = []
        for depth in range(flow.horizon):
            t, a = self._step(flow.nodes[node].effective_kernel(), s, path, depth)
            act = flow.action_space.action(a)
            nxt = flow.update_at(node).apply(s, t, act.obs)
            self._emit(depth, path, s, t, act, nxt)
            actions.append(a)
            s = nxt
            self.last_terminal = act.cls in flow.action_space.terminal_classes
            succ = _successor(flow, node, act)
            if succ is None:
                break
            node = succ
            if depth + 1 < flow.horizon:
                s = _flow_enter(flow, node, context, s)
        self.stage_actions[path] = tuple(actions)
        return tuple(actions), s

    def _hierarchical(self, node, path, context, start):
        a_l, s_l = self._chain(node.outer, join_path(path, "outer"), context, start)
        c_l = node.emission_out.row(a_l).pick(self.stream.uniform(path, 0, "handoff"))
        self.contexts.append((join_path(path, "handoff"), c_l))
        a_k, _ = self.run(node.inner, join_path(path, "inner"), c_l, None)
        c_k = node.emission_back.row(a_k).pick(self.stream.uniform(path, 0, "handback"))
        self.contexts.append((join_path(path, "handback"), c_k))
        a_u, s_u = self._chain(node.resume, join_path(path, "resume"), c_k, _resume_start(node, s_l, c_k))
        return a_l + a_k + a_u, s_u

    def _parallel(self, node, path, context, start):
        a_x, s_x = self.run(node.left, join_path(path, "left"), context, start)
        a_y, s_y = self.run(node.right, join_path(path, "right"), context, start)
        merged = node.merge(s_x, s_y)
        if node.tail is None:
            return a_x + a_y, merged
        a_n, s_n = self.run(node.tail, join_path(path, "tail"), context, merged)
        return a_x + a_y + a_n, s_n


def sample_trajectory(t: Topology, context: str, seed: int, trajectory: int = 0) -> Trace:
    """One execution drawn from the generative process.

    Fully determined by ``(seed, trajectory)``: every draw has its own
    counter-derived uniform.
    """
    sampler = _Sampler(CounterStream(seed, trajectory), record=True)
    sampler.run(t, "", context, None)
    return Trace(tuple(sampler.steps), tuple(sampler.contexts), sampler.last_terminal)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    n: int
    seed: int
    hits: int = field(default=0, compare=False)


def _pick_many(values, weights, u: np.ndarray, skip_zero: bool):
    """Vectorized inverse-CDF choice matching the scalar pickers."""
    if skip_zero:
        kept = [(v, w) for v, w in zip(values, weights) if w > 0.0]
        values, weights = [v for v, _ in kept], [w for _, w in kept]
    cum = np.fromiter(itertools.accumulate(weights), dtype=np.float64, count=len(weights))
    choice = np.minimum(np.searchsorted(cum, u, side="right"), len(values) - 1)
    return values, choice


def _split(values, choice: np.ndarray, idx: np.ndarray):
    for j, v in enumerate(values):
        sub = idx[choice == j]
        if sub.size:
            yield v, sub


class _BatchSampler:
    """Runs a block of trajectories together, grouped by discrete state.

    Trajectory ``i`` consumes exactly the draws :class:`_Sampler` would use
    for it, so the set of hits does not depend on how trajectories are
    grouped or blocked. Trajectories leave the batch as soon as they miss
    their stage goal.
    """

    def __init__(self, seed: int, goals: dict[str, tuple]):
        self.seed = seed
        self.goals = goals

    def _u(self, idx, path, step, kind):
        return uniforms(self.seed, idx, path, step, kind)

    def run(self, node, path, context, start, idx) -> list:
        if isinstance(node, Empty):
            return [((), start if start is not None else State.of_history((context,)), idx)]
        if isinstance(node, Chain):
            return self._chain(node.agent, path, context, start, idx)
        if isinstance(node, ControlFlow):
            return self._flow(node, path, context, start, idx)
        if isinstance(node, Hierarchical):
            return self._hierarchical(node, path, context, start, idx)
        return self._parallel(node, path, context, start, idx)

    def _step(self, kernel, state, path, depth, idx):
        branches = kernel.branches(state)
        if len(branches) == 1:
            split = [(branches[0], idx)]
        else:
            u = self._u(idx, path, depth, "thought")
            split = _split(*_pick_many(branches, [b[1] for b in branches], u, False), idx)
        for (t, _, dist), sub in split:
            u = self._u(sub, path, depth, "action")
            for a, leaf in _split(*_pick_many(dist.support, dist.probs, u, True), sub):
                yield t, a, leaf

    @staticmethod
    def _add(groups: dict, key, value, idx):
        hit = groups.get(key)
        groups[key] = (value, idx) if hit is None else (value, np.concatenate((hit[1], idx)))

    def _chain(self, agent, path, context, start, idx):
        s = start if start is not None else build_initial_state(agent.init, context, agent.bindings)
        s = agent.update.lift(s)
        kernel = agent.effective_kernel()
        space = agent.action_space
        goal = self.goals.get(path, ())
        active = {((), s.key): (((), s), idx)}
        done: dict = {}
        for depth in range(agent.horizon):
            nxt_groups: dict = {}
            for (acts, st), ix in active.values():
                for t, a, leaf in self._step(kernel, st, path, depth, ix):
                    if depth < len(goal) and a != goal[depth]:
                        continue
                    act = space.action(a)
                    nxt = agent.update.apply(st, t, act.obs)
                    seq = acts + (a,)
                    target = done if act.cls in space.terminal_classes else nxt_groups
                    self._add(target, (seq, nxt.key), (seq, nxt), leaf)
            active = nxt_groups
        for key, (value, ix) in active.items():
            self._add(done, key, value, ix)
        return [(acts, st, ix) for (acts, st), ix in done.values() if len(acts) >= len(goal)]

    def _flow(self, flow, path, context, start, idx):
        node = flow.entry
        s = _flow_enter(flow, node, context, start if start is not None else
                        build_initial_state(flow.init, context, flow.bindings))
        goal = self.goals.get(path, ())
        active = {((), node, s.key): (((), node, s), idx)}
        done: dict = {}
        for depth in range(flow.horizon):
            nxt_groups: dict = {}
            for (acts, node, st), ix in active.values():
                kernel = flow.nodes[node].effective_kernel()
                for t, a, leaf in self._step(kernel, st, path, depth, ix):
                    if depth < len(goal) and a != goal[depth]:
                        continue
                    act = flow.action_space.action(a)
                    nxt = flow.update_at(node).apply(st, t, act.obs)
                    seq = acts + (a,)
                    succ = _successor(flow, node, act)
                    if succ is None:
                        self._add(done, (seq, None, nxt.key), (seq, None, nxt), leaf)
                        continue
                    if depth + 1 < flow.horizon:
                        nxt = _flow_enter(flow, succ, context, nxt)
                    self._add(nxt_groups, (seq, succ, nxt.key), (seq, succ, nxt), leaf)
            active = nxt_groups
        for key, (value, ix) in active.items():
            self._add(done, key, value, ix)
        return [(acts, st, ix) for (acts, _, st), ix in done.values() if len(acts) >= len(goal)]

    def _hierarchical(self, node, path, context, start, idx):
        out = []
        for a_l, s_l, ix in self._chain(node.outer, join_path(path, "outer"), context, start, idx):
            row = node.emission_out.row(a_l)
            u = self._u(ix, path, 0, "handoff")
            for c_l, ix2 in _split(*_pick_many(row.support, row.probs, u, True), ix):
                for a_k, _, ix3 in self.run(node.inner, join_path(path, "inner"), c_l, None, ix2):
                    back = node.emission_back.row(a_k)
                    u = self._u(ix3, path, 0, "handback")
                    for c_k, ix4 in _split(*_pick_many(back.support, back.probs, u, True), ix3):
                        resumed = self._chain(
                            node.resume, join_path(path, "resume"), c_k, _resume_start(node, s_l, c_k), ix4
                        )
                        out.extend((a_l + a_k + a_u, s_u, ix5) for a_u, s_u, ix5 in resumed)
        return out

    def _parallel(self, node, path, context, start, idx):
        out = []
        for a_x, s_x, ix in self.run(node.left, join_path(path, "left"), context, start, idx):
            for a_y, s_y, iy in self.run(node.right, join_path(path, "right"), context, start, ix):
                merged = node.merge(s_x, s_y)
                if node.tail is None:
                    out.append((a_x + a_y, merged, iy))
                    continue
                for a_n, s_n, iz in self.run(node.tail, join_path(path, "tail"), context, merged, iy):
                    out.append((a_x + a_y + a_n, s_n, iz))
        return out


def hit_indices(t: Topology, q: GoalQuery, seed: int, lo: int, hi: int) -> np.ndarray:
    """Sorted indices in ``[lo, hi)`` of the trajectories that realize the goal."""
    goals = {p: g for p, g in _goals_for(t, q).items() if g}
    groups = _BatchSampler(seed, goals).run(t, "", q.context, None, np.arange(lo, hi, dtype=np.int64))
    if not groups:
        return np.zeros(0, dtype=np.int64)
    return np.sort(np.concatenate([ix for _, _, ix in groups]))


def _count_hits(t: Topology, q: GoalQuery, seed: int, lo: int, hi: int) -> int:
    goals = {p: g for p, g in _goals_for(t, q).items() if g}
    groups = _BatchSampler(seed, goals).run(t, "", q.context, None, np.arange(lo, hi, dtype=np.int64))
    return int(sum(ix.size for _, _, ix in groups))


def estimate_goal_probability(
    t: Topology, q: GoalQuery, n: int, seed: int = 0, workers: int = 1
) -> Estimate:
    """Goal-hit frequency over ``n`` seeded trajectories.

    Trajectory ``i`` uses substream ``(seed, i)``, so the result is the same
    for any ``workers``.
    """
    if n < 1:
        raise ScenarioError("sample count must be at least 1")
    if not q.goal:
        return Estimate(1.0, 0.0, n, seed, n)
    if workers <= 1:
        hits = _count_hits(t, q, seed, 0, n)
    else:
        bounds = [n * i // workers for i in range(workers + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_count_hits, t, q, seed, lo, hi)
                for lo, hi in zip(bounds, bounds[1:])
            ]
            hits = sum(f.result() for f in futures)
    mean = hits / n
    return Estimate(mean, math.sqrt(mean * (1.0 - mean) / n), n, seed, hits)


__all__ = [
    "DEFAULT_BUDGET",
    "Estimate",
    "GoalError",
    "Step",
    "Trace",
    "estimate_goal_probability",
    "exact_goal_probability",
    "hit_indices",
    "prefix_probabilities",
    "reachable_issues",
    "sample_trajectory",
    "sequence_distribution",
    "term_bound",
]
