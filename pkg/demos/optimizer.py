# %%
# Optimizing the degrees of freedom a strategy owns. The react scenario
# declares a prompt-style parameter and a choice of state update; both
# belong to the ReAct strategy, neither to fine tuning.
from __future__ import annotations

from agentcalc import DofViolation, load_scenario, optimize_dof

from _paths import fixture

# %%
doc = load_scenario(fixture("react"))
best, value, log = optimize_dof(doc, "ReAct")
for cand in log:
    print(f"{cand.config:45} P={cand.probability:.4f} objective={cand.objective:.4f}")
print(f"best objective {value:.4f}")

# %%
try:
    optimize_dof(doc, "FineTuning")
except DofViolation as exc:
    print("refused:", exc)
