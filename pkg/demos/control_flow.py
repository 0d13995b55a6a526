# %%
# Control flow as restriction: each node only permits some actions, and the
# kernel is conditioned on that set. Conditioning on an event that contains
# the goal can only raise the goal probability.
from __future__ import annotations

from dataclasses import replace

from agentcalc import exact_goal_probability, load_scenario

from _paths import fixture

# %%
doc = load_scenario(fixture("controlflow"))
flow = doc.topology
for name, node in flow.nodes.items():
    allowed = sorted(node.allowed) if node.allowed is not None else "everything"
    print(f"node {name}: allowed {allowed}")

restricted = exact_goal_probability(flow, doc.goal)
opened = replace(flow, nodes={n: replace(fn, allowed=None) for n, fn in flow.nodes.items()})
print(f"restricted P(goal) = {restricted:.4f}")
print(f"unrestricted P(goal) = {exact_goal_probability(opened, doc.goal):.4f}")
