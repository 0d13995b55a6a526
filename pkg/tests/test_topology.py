from __future__ import annotations

from dataclasses import replace

import pytest

from agentcalc.errors import CoverageError, GoalError, ScenarioError
from agentcalc.inference import exact_goal_probability
from agentcalc.kernels import Distribution, TabularKernel
from agentcalc.model import ActionSpace, InitBuilder, State, UpdateFn
from agentcalc.topology import (
    AgentSpec,
    Chain,
    ContextEmission,
    Empty,
    GoalQuery,
    compose_hierarchical,
    compose_parallel,
    hierarchical_depth,
    split_goal,
    validate_topology,
)

PROMPT = InitBuilder("prompt", ("<c>",))
CAT = UpdateFn("cat", "concat")


def agent(name, probs, horizon=1, rows_key="*"):
    space = ActionSpace(name, {(a, ""): f"o{a}" for a in probs})
    kernel = TabularKernel(f"K{name}", {rows_key: Distribution.from_mapping(probs)})
    return AgentSpec(name, kernel, CAT, PROMPT, horizon, space)


def test_f2_composite(fixture_doc):
    doc = fixture_doc("f2_hierarchical")
    assert exact_goal_probability(doc.topology, doc.goal) == pytest.approx(0.3075, abs=1e-12)
    assert validate_topology(doc.topology, ["c0"]) == []


def test_point_mass_handoff_collapses_to_product(fixture_doc):
    doc = fixture_doc("f2_hierarchical")
    t = replace(doc.topology, emission_out=doc.topology.emission_out.forced("c1"))
    assert exact_goal_probability(t, doc.goal) == pytest.approx(0.82 * 0.9 * 0.5, abs=1e-12)


def test_unreachable_inner_goal_gives_zero(fixture_doc):
    doc = fixture_doc("f2_hierarchical")
    inner = doc.topology.inner.agent
    dead = TabularKernel("dead", {"*": Distribution.from_mapping({"G": 0.0, "H": 1.0})})
    t = replace(doc.topology, inner=Chain(replace(inner, kernel=dead)))
    assert exact_goal_probability(t, doc.goal) == 0.0


def test_overlapping_partitions_rejected():
    a, b = agent("p", {"A": 1.0}), agent("q", {"A": 0.5, "B": 0.5})
    e = ContextEmission("e", ("c0",), {"*": Distribution.point("c0")})
    with pytest.raises(ScenarioError, match=r"partition overlap: \{A\}"):
        compose_hierarchical(a, e, Chain(b), e, agent("r", {"U": 1.0}))
    with pytest.raises(ScenarioError, match="partition overlap"):
        compose_parallel(Chain(a), Chain(b))


def test_missing_emission_row_is_named():
    outer = agent("p", {"A": 0.5, "B": 0.5})
    e_out = ContextEmission("e_out", ("c0",), {"A": Distribution.point("c0")})
    e_back = ContextEmission("e_back", ("c0",), {"*": Distribution.point("c0")})
    with pytest.raises(ScenarioError, match="missing row for action sequence 'B'"):
        compose_hierarchical(outer, e_out, Chain(agent("q", {"G": 1.0})), e_back, agent("r", {"U": 1.0}))


def test_parallel_factorizes():
    t = compose_parallel(Chain(agent("x", {"X": 0.5, "W": 0.5})), Chain(agent("y", {"Y": 0.25, "Z": 0.75})))
    assert exact_goal_probability(t, GoalQuery(("X", "Y"), "c0")) == 0.125


def test_empty_branch_is_neutral():
    left = Chain(agent("x", {"X": 0.5, "W": 0.5}))
    t = compose_parallel(left, Empty())
    assert exact_goal_probability(t, GoalQuery(("X",), "c0")) == exact_goal_probability(left, GoalQuery(("X",), "c0"))


def test_parallel_tail_reads_merged_state(fixture_doc):
    doc = fixture_doc("parallel")
    assert exact_goal_probability(doc.topology, doc.goal) == pytest.approx(0.075, abs=1e-12)


def test_recombiner_gap():
    left = agent("x", {"X": 1.0})
    right = agent("y", {"Y": 1.0})
    t = compose_parallel(Chain(left), Chain(right), recombiner={("c0|oX", "nope"): State.of_history(("m",))},
                         tail=Chain(agent("n", {"N": 1.0})))
    with pytest.raises(CoverageError, match="recombiner gap"):
        exact_goal_probability(t, GoalQuery(("X", "Y", "N"), "c0"))
    assert any("recombiner gap" in v for v in validate_topology(t, ["c0"]))


def test_explicit_recombiner():
    left = agent("x", {"X": 1.0})
    right = agent("y", {"Y": 1.0})
    tail = agent("n", {"N": 0.3, "M": 0.7}, rows_key="merged")
    rec = {("c0|oX", "c0|oY"): State.of_history(("merged",))}
    t = compose_parallel(Chain(left), Chain(right), recombiner=rec, tail=Chain(tail))
    assert exact_goal_probability(t, GoalQuery(("X", "Y", "N"), "c0")) == pytest.approx(0.3)


def test_goal_split_follows_stage_order(fixture_doc):
    t = fixture_doc("f2_hierarchical").topology
    assert split_goal(t, ("A", "G", "U")) == {"outer": ("A",), "inner": ("G",), "resume": ("U",)}
    assert split_goal(t, ("A", "U")) == {"outer": ("A",), "inner": (), "resume": ("U",)}
    with pytest.raises(GoalError, match="'Z'"):
        split_goal(t, ("Z",))
    with pytest.raises(GoalError):
        split_goal(t, ("G", "A"))


def test_nesting_depth(fixture_doc):
    assert hierarchical_depth(fixture_doc("f2_hierarchical").topology) == 1
    assert hierarchical_depth(fixture_doc("f2_nested").topology) == 2
    assert hierarchical_depth(fixture_doc("k1_chain").topology) == 0


def test_resume_can_carry_outer_history():
    outer = agent("p", {"A": 1.0})
    inner = agent("q", {"G": 1.0})
    resume_kernel = TabularKernel("Kr", {
        "c0|oA|k0": Distribution.from_mapping({"U": 0.9, "V": 0.1}),
        "k0": Distribution.from_mapping({"U": 0.2, "V": 0.8}),
    })
    resume = AgentSpec("r", resume_kernel, CAT, PROMPT, 1, ActionSpace("r", {("U", ""): "oU", ("V", ""): "oV"}))
    e = ContextEmission("e", ("k0",), {"*": Distribution.point("k0")})
    goal = GoalQuery(("A", "G", "U"), "c0")
    fresh = compose_hierarchical(outer, e, Chain(inner), e, resume)
    carried = compose_hierarchical(outer, e, Chain(inner), e, resume, resume_carries_history=True)
    assert exact_goal_probability(fresh, goal) == pytest.approx(0.2)
    assert exact_goal_probability(carried, goal) == pytest.approx(0.9)


def test_flow_edge_gap_reported(fixture_doc):
    doc = fixture_doc("controlflow_open")
    flow = doc.topology
    edges = {**flow.edges, "plan": {k: v for k, v in flow.edges["plan"].items() if k != "search"}}
    issues = validate_topology(replace(flow, edges=edges), ["c0"])
    assert any("no edge for action class 'search'" in i for i in issues)
