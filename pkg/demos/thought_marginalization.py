# %%
# Thoughts as latent variables: a ReAct kernel samples a thought, then an
# action given that thought. Summing the thought out leaves a plain action
# law, and chains of steps multiply those marginals.
from __future__ import annotations

from agentcalc import State, exact_goal_probability, load_scenario, marginalize_thoughts

from _paths import fixture

# %%
doc = load_scenario(fixture("k1_chain"))
k1 = doc.kernels["K1"]
s0 = State.of_history(("c0",))
for t in k1.thought_given_state["*"].support:
    print(f"P(thought={t}) = {k1.thought_given_state['*'][t]:.2f}")
print("marginal action law:", marginalize_thoughts(k1, s0).as_dict())

# %%
# Two steps with goal A,A: every pair of thoughts contributes.
two = load_scenario(fixture("k1_chain2"))
print("P(A, A) =", exact_goal_probability(two.topology, two.goal))

# %%
# A tabular kernel with the same support but a uniform law lands elsewhere.
flat = load_scenario(fixture("k1_identity"))
print("uniform counterpart P(A) =", exact_goal_probability(flat.topology, flat.goal))
