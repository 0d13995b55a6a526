# %%
# Hierarchical delegation: a planner emits a context for a worker, the
# worker's actions are summarized back, and a finisher resumes. The exact
# probability sums over both emitted contexts.
from __future__ import annotations

from agentcalc import CostModel, Objective, collab_cost, exact_goal_probability, load_scenario, optimize_context

from _paths import fixture

# %%
for name in ("f2_hierarchical", "f2_nested"):
    doc = load_scenario(fixture(name))
    p = exact_goal_probability(doc.topology, doc.goal)
    cost = collab_cost(doc.topology, doc.objective.cost_model)
    print(f"{name}: P(goal) = {p:.6f}, collaboration cost = {cost:.2f}")

# %%
# Searching over the starting context, with no cost penalty.
doc = load_scenario(fixture("f2_hierarchical"))
best, value = optimize_context(doc.topology, Objective(doc.goal, 0.0, CostModel()), budget=8)
print(f"best context {best!r} reaches {value:.4f}")

# %%
# Raising the cost weight pushes the regularized objective down.
from agentcalc import regularized_objective

for lam in (0.0, 0.01, 0.1, 1.0):
    print(f"lambda={lam:<5} objective={regularized_objective(doc.topology, Objective(doc.goal, lam, CostModel())):.4f}")
