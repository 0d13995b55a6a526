from __future__ import annotations

import math
from dataclasses import replace

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from agentcalc.errors import DofViolation
from agentcalc.inference import exact_goal_probability, prefix_probabilities, sample_trajectory
from agentcalc.kernels import Distribution, restrict
from agentcalc.model import State, UpdateFn
from agentcalc.optimize import DOF_TABLE, CostModel, DofHandle, Objective, StrategyKind, check_handle, regularized_objective
from agentcalc.topology import GoalQuery

import desk
import oracle

seeds = st.integers(min_value=0, max_value=10**6)
symbols = st.text(alphabet="abcxyz0123", min_size=1, max_size=4)


@given(st.lists(st.tuples(st.one_of(st.none(), symbols), symbols), max_size=8))
def test_concat_is_lossless(steps):
    u = UpdateFn("cat", "concat")
    s = State.of_history(("c0",))
    for t, o in steps:
        s = u.apply(s, t, o)
    flat = [x for t, o in steps for x in ((o,) if t is None else (t, o))]
    assert s.history == ("c0", *flat)


@given(st.dictionaries(st.sampled_from("ABCDE"), st.floats(0.01, 1.0), min_size=1))
def test_normalized_rows_are_accepted_as_is(weights):
    total = sum(weights.values())
    d = Distribution.from_mapping({k: v / total for k, v in weights.items()})
    assert abs(d.total() - 1.0) <= 1e-9
    assert list(d.support) == sorted(weights)


@given(
    st.dictionaries(st.sampled_from("ABCDE"), st.floats(0.01, 1.0), min_size=2),
    st.data(),
)
def test_restriction_concentrates_and_is_idempotent(weights, data):
    from agentcalc.kernels import TabularKernel

    total = sum(weights.values())
    k = TabularKernel("k", {"*": Distribution.from_mapping({a: w / total for a, w in weights.items()})})
    s = State.of_history(("c0",))
    allowed = data.draw(st.sets(st.sampled_from(sorted(weights)), min_size=1))
    once = restrict(k, allowed, s)
    assert set(once.support) <= allowed
    assert math.isclose(once.total(), 1.0, abs_tol=1e-12)
    twice = restrict(TabularKernel("k2", {"*": once}), allowed, s)
    for a in allowed:
        assert twice[a] == pytest.approx(once[a], abs=1e-15)
    base = k.action_distribution(s)
    for a in allowed:
        assert once[a] >= base[a]


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_sampling_is_deterministic(seed):
    t, q = desk.random_hierarchical(seed % 97)
    assert sample_trajectory(t, q.context, seed) == sample_trajectory(t, q.context, seed)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_prefixes_never_increase(seed):
    t, q = desk.random_chain(seed)
    probs = prefix_probabilities(t, q)
    assert all(a >= b for a, b in zip(probs, probs[1:]))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_hierarchical_matches_flat_enumeration(seed):
    t, q = desk.random_hierarchical(seed)
    assert exact_goal_probability(t, q) == pytest.approx(oracle.goal_probability(t, q.goal, q.context), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_parallel_branches_factorize(seed):
    t, left, right, g_left, g_right = desk.random_parallel(seed)
    joint = exact_goal_probability(t, GoalQuery(g_left + g_right, "x0"))
    product = exact_goal_probability(left, GoalQuery(g_left, "x0")) * exact_goal_probability(right, GoalQuery(g_right, "x0"))
    assert joint == pytest.approx(product, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.data())
def test_restriction_dominance(seed, data):
    t, q = desk.random_chain(seed, max_horizon=3)
    agent = t.agent
    ids = agent.action_space.action_ids
    extra = data.draw(st.sets(st.sampled_from(ids)))
    allowed = frozenset(q.goal) | extra
    open_p = exact_goal_probability(t, q)
    assume(open_p > 0.0)
    restricted = replace(t, agent=replace(agent, allowed=allowed))
    assert exact_goal_probability(restricted, q) >= open_p * (1 - 1e-12)


@given(st.lists(st.floats(0.0, 100.0), min_size=2, max_size=6))
def test_objective_non_increasing_in_lambda(lams):
    from conftest import load

    doc = load("f2_hierarchical")
    values = [regularized_objective(doc.topology, Objective(doc.goal, lam, CostModel())) for lam in sorted(lams)]
    assert all(a >= b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("kind", list(StrategyKind))
def test_dof_gating_is_total(kind):
    for handle in DofHandle:
        if handle in DOF_TABLE[kind]:
            check_handle(kind, handle)
        else:
            with pytest.raises(DofViolation):
                check_handle(kind, handle)
