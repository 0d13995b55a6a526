# %%
# Monte Carlo against exact enumeration. Draws come from a counter-based
# stream, so a fixed seed gives the same estimate for any worker count.
from __future__ import annotations

from agentcalc import estimate_goal_probability, exact_goal_probability, load_scenario, sample_trajectory

from _paths import fixture

# %%
for name in ("k1_chain", "f2_hierarchical", "parallel", "controlflow"):
    doc = load_scenario(fixture(name))
    exact = exact_goal_probability(doc.topology, doc.goal)
    est = estimate_goal_probability(doc.topology, doc.goal, 50_000, seed=7)
    z = (est.mean - exact) / est.stderr if est.stderr else 0.0
    print(f"{name:16} exact={exact:.5f} sampled={est.mean:.5f} +- {est.stderr:.5f} (z={z:+.2f})")

# %%
# One trajectory, step by step.
doc = load_scenario(fixture("f2_hierarchical"))
trace = sample_trajectory(doc.topology, doc.goal.context, seed=7)
for step in trace.steps:
    print(f"{step.stage:10} thought={step.thought} action={step.action.id}")
print("contexts emitted:", trace.contexts_emitted)
