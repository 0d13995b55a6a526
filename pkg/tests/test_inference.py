from __future__ import annotations

import math

import numpy as np
import pytest

from agentcalc.errors import BudgetExceeded, ScenarioError
from agentcalc.inference import (
    estimate_goal_probability,
    exact_goal_probability,
    hit_indices,
    prefix_probabilities,
    sample_trajectory,
    sequence_distribution,
    term_bound,
)
from agentcalc.kernels import Distribution, TabularKernel
from agentcalc.model import ActionSpace, InitBuilder, UpdateFn, apply_update
from agentcalc.topology import AgentSpec, Chain, GoalQuery, split_goal

from conftest import ALL_FIXTURES


def long_chain(horizon, p):
    space = ActionSpace("s", {("A", ""): "oA", ("B", ""): "oB"})
    k = TabularKernel("k", {"*": Distribution.from_mapping({"A": p, "B": 1 - p})})
    return Chain(AgentSpec("a", k, UpdateFn("cat", "concat"), InitBuilder("p", ("<c>",)), horizon, space))


def test_k1_single_step(fixture_doc):
    doc = fixture_doc("k1_chain")
    assert exact_goal_probability(doc.topology, doc.goal) == pytest.approx(0.82, abs=1e-12)


def test_k1_two_steps_and_prefixes(fixture_doc):
    doc = fixture_doc("k1_chain2")
    assert exact_goal_probability(doc.topology, doc.goal) == pytest.approx(0.6724, abs=1e-12)
    assert prefix_probabilities(doc.topology, doc.goal) == pytest.approx([0.82, 0.6724], abs=1e-12)


def test_empty_goal(fixture_doc):
    t = fixture_doc("f2_hierarchical").topology
    assert exact_goal_probability(t, GoalQuery((), "c0")) == 1.0
    assert prefix_probabilities(t, GoalQuery((), "c0")) == []


def test_probability_one_chain(fixture_doc):
    doc = fixture_doc("deterministic")
    assert prefix_probabilities(doc.topology, doc.goal) == [1.0, 1.0, 1.0]
    for seed in (0, 1, 99):
        assert sample_trajectory(doc.topology, "c0", seed).actions == ("A", "A", "A")
    est = estimate_goal_probability(doc.topology, doc.goal, 1000, seed=5)
    assert (est.mean, est.stderr) == (1.0, 0.0)


def test_budget_exceeded_names_term_count(fixture_doc):
    doc = fixture_doc("budget")
    with pytest.raises(BudgetExceeded, match="16 leaf terms") as exc:
        exact_goal_probability(doc.topology, doc.goal, doc.enum_budget)
    assert exc.value.terms == 16 and exc.value.budget == 10


def test_term_bound_counts_contexts(fixture_doc):
    t = fixture_doc("f2_hierarchical").topology
    goals = split_goal(t, ())
    # 2 thoughts x 2 actions, 2 handoff contexts, 2 inner actions, 2 hand-back contexts, 2 resume actions
    assert term_bound(t, goals) == 4 * 2 * 2 * 2 * 2


def test_long_chain_uses_stable_products():
    t = long_chain(40, 0.9)
    p = exact_goal_probability(t, GoalQuery(("A",) * 40, "c0"))
    assert p == pytest.approx(0.9**40, rel=1e-12)
    p = exact_goal_probability(long_chain(40, 1e-4), GoalQuery(("A",) * 40, "c0"))
    assert p == pytest.approx(1e-160, rel=1e-9)


def test_total_mass_of_single_chains(fixture_doc):
    for name in ("k1_chain", "k1_chain2", "react", "deterministic", "ci_react"):
        doc = fixture_doc(name)
        masses = sequence_distribution(doc.topology, "c0")
        assert math.fsum(masses.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(len(seq) == doc.topology.agent.horizon for seq in masses)


def test_trace_is_deterministic_and_consistent(fixture_doc):
    doc = fixture_doc("f2_hierarchical")
    a = sample_trajectory(doc.topology, "c0", 42)
    b = sample_trajectory(doc.topology, "c0", 42)
    assert a == b
    assert [boundary for boundary, _ in a.contexts_emitted] == ["handoff", "handback"]
    agents = {"outer": doc.agents["planner"], "inner": doc.agents["worker"], "resume": doc.agents["finisher"]}
    for step in a.steps:
        u = agents[step.stage].update
        assert step.state_after == apply_update(u, step.state_before, step.thought, step.action.obs)


def test_sampled_first_action_frequency(fixture_doc):
    doc = fixture_doc("k1_chain")
    n = 100_000
    est = estimate_goal_probability(doc.topology, GoalQuery(("A",), "c0"), n, seed=7)
    assert abs(est.mean - 0.82) <= 4 * math.sqrt(0.82 * 0.18 / n)
    assert est.stderr == pytest.approx(math.sqrt(est.mean * (1 - est.mean) / n))


def test_sample_count_must_be_positive(fixture_doc):
    doc = fixture_doc("k1_chain")
    with pytest.raises(ScenarioError):
        estimate_goal_probability(doc.topology, doc.goal, 0)


@pytest.mark.parametrize("name", [n for n in ALL_FIXTURES])
def test_block_sampler_matches_single_traces(fixture_doc, name):
    doc = fixture_doc(name)
    q = doc.goal
    shares = split_goal(doc.topology, q.goal)
    expected = [
        i for i in range(300)
        if all(sample_trajectory(doc.topology, q.context, 3, i).stage_actions(p)[: len(g)] == g
               for p, g in shares.items())
    ]
    assert hit_indices(doc.topology, q, 3, 0, 300).tolist() == expected


def test_hits_do_not_depend_on_blocking(fixture_doc):
    doc = fixture_doc("f2_nested")
    whole = hit_indices(doc.topology, doc.goal, 9, 0, 5000)
    parts = np.concatenate([hit_indices(doc.topology, doc.goal, 9, lo, lo + 700) for lo in range(0, 5000, 700)])
    assert np.array_equal(whole, np.sort(parts[parts < 5000]))
