"""Seeded generators for small random scenarios (alphabets of at most 3)."""
from __future__ import annotations

import itertools
import random

from agentcalc.kernels import Distribution, ReActKernel, TabularKernel
from agentcalc.model import ActionSpace, InitBuilder, State, UpdateFn
from agentcalc.topology import (
    AgentSpec,
    Chain,
    ContextEmission,
    GoalQuery,
    compose_hierarchical,
    compose_parallel,
)

PROMPT = InitBuilder("prompt", ("<c>",))
CONCAT = UpdateFn("cat", "concat")


def random_dist(rng: random.Random, outcomes, zeros: bool = False) -> Distribution:
    outcomes = sorted(outcomes)
    weights = [rng.random() + 0.05 for _ in outcomes]
    if zeros and len(outcomes) > 1:
        weights[rng.randrange(len(outcomes))] = 0.0
    total = sum(weights)
    return Distribution.from_mapping({o: w / total for o, w in zip(outcomes, weights)})


def random_space(rng: random.Random, prefix: str, size: int | None = None) -> ActionSpace:
    size = size or rng.randint(1, 3)
    return ActionSpace(prefix, {(f"{prefix}{i}", ""): f"o{prefix}{i}" for i in range(size)})


def summary_update(rng: random.Random, space: ActionSpace, thoughts) -> UpdateFn:
    table = {}
    for s in ("S0", "S1"):
        for a in space.actions():
            table[(s, "*", a.obs)] = rng.choice(("S0", "S1"))
    return UpdateFn("sum", "summary", summary_map=table, init={"*": "S0"})


def random_kernel(rng: random.Random, name: str, space: ActionSpace, keys, n_thoughts: int):
    """Tabular kernel when ``n_thoughts`` is 0, ReAct otherwise; rows for ``keys`` plus ``"*"``."""
    actions = space.action_ids
    keys = sorted(set(keys) | {"*"})
    if n_thoughts == 0:
        return TabularKernel(name, {k: random_dist(rng, actions, zeros=rng.random() < 0.2) for k in keys})
    thoughts = [f"t{i}" for i in range(n_thoughts)]
    t_rows = {k: random_dist(rng, thoughts) for k in keys}
    a_rows = {(t, k): random_dist(rng, actions, zeros=rng.random() < 0.2) for t in thoughts for k in keys}
    return ReActKernel(name, t_rows, a_rows)


def random_agent(rng, name, prefix, contexts, horizon=None, summary=False) -> AgentSpec:
    space = random_space(rng, prefix)
    horizon = horizon if horizon is not None else rng.randint(1, 2)
    n_thoughts = rng.randint(0, 3)
    update = summary_update(rng, space, ()) if summary else CONCAT
    keys = ["summary:S0", "summary:S1"] if summary else list(contexts)
    kernel = random_kernel(rng, f"K{name}", space, keys, n_thoughts)
    return AgentSpec(name, kernel, update, PROMPT, horizon, space)


def _sequences(agent: AgentSpec):
    return [",".join(s) for s in itertools.product(agent.action_space.action_ids, repeat=agent.horizon)]


def random_goal(rng, agents) -> tuple[str, ...]:
    goal = []
    for a in agents:
        goal += [rng.choice(a.action_space.action_ids) for _ in range(rng.randint(0, a.horizon))]
    return tuple(goal)


def random_hierarchical(seed: int):
    """Outer agent, inner chain and resume agent with random handoffs."""
    rng = random.Random(seed)
    c_out = [f"c{i}" for i in range(rng.randint(1, 3))]
    c_back = [f"k{i}" for i in range(rng.randint(1, 3))]
    outer = random_agent(rng, "outer", "A", ["x0"])
    inner = random_agent(rng, "inner", "G", c_out)
    resume = random_agent(rng, "resume", "U", c_back)
    e_out = ContextEmission("e_out", tuple(c_out), {k: random_dist(rng, c_out) for k in _sequences(outer)})
    e_back = ContextEmission("e_back", tuple(c_back), {k: random_dist(rng, c_back) for k in _sequences(inner)})
    t = compose_hierarchical(outer, e_out, Chain(inner), e_back, resume)
    return t, GoalQuery(random_goal(rng, (outer, inner, resume)), "x0")


def random_parallel(seed: int):
    """Two independent chains; returns the composite, both branches and their goals."""
    rng = random.Random(seed)
    left = random_agent(rng, "lhs", "L", ["x0"], summary=rng.random() < 0.3)
    right = random_agent(rng, "rhs", "R", ["x0"])
    g_left, g_right = random_goal(rng, (left,)), random_goal(rng, (right,))
    recombiner = None
    if left.update.kind != "concat":
        # summary-form left branch: merge into a fixed history per pair of finals
        finals_l = ["summary:S0", "summary:S1"]
        finals_r = sorted({"|".join(("x0", *h)) for h in _obs_histories(right)})
        recombiner = {(l, r): State.of_history(("m", l.split(":")[1])) for l in finals_l for r in finals_r}
    t = compose_parallel(Chain(left), Chain(right), recombiner=recombiner)
    return t, Chain(left), Chain(right), g_left, g_right


def _obs_histories(agent: AgentSpec):
    """Concat-form histories after ``agent.horizon`` steps (thoughts included)."""
    thoughts = [None]
    k = agent.kernel
    if isinstance(k, ReActKernel):
        thoughts = sorted({t for t, _ in k.action_given_thought_state})
    steps = [(t, a.obs) if t else (a.obs,) for t in thoughts for a in agent.action_space.actions()]
    for combo in itertools.product(steps, repeat=agent.horizon):
        yield tuple(x for step in combo for x in step)


def random_chain(seed: int, max_horizon: int = 4):
    rng = random.Random(seed)
    agent = random_agent(rng, "solo", "A", ["x0"], horizon=rng.randint(1, max_horizon), summary=rng.random() < 0.4)
    goal = tuple(rng.choice(agent.action_space.action_ids) for _ in range(agent.horizon))
    return Chain(agent), GoalQuery(goal, "x0")
