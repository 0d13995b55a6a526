"""Stochastic action kernels P(a|s).

Three kernel families share one small protocol:

``branches(state)``
    tuple of ``(thought, weight, Distribution over actions)`` where
    ``thought`` is ``None`` for kernels without latent thoughts. The action
    marginal is ``sum(weight * dist)``; enumeration and sampling walk the
    branches so that the thought can feed the state update.

``action_distribution(state)``
    the thought-marginal action distribution.

Rows are looked up by ``State.key`` and fall back to the stationary row
``"*"`` when present.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import CoverageError, DeadEndError, NormalizationError, ScenarioError
from .model import WILDCARD, State

NORM_TOL = 1e-9


@dataclass(frozen=True)
class Distribution:
    support: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ScenarioError("distribution support and probabilities differ in length")
        if len(set(self.support)) != len(self.support):
            raise ScenarioError("distribution support has duplicates")
        if list(self.support) != sorted(self.support):
            raise ScenarioError("distribution support must be in canonical order")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float], label: str = "distribution", tol: float = NORM_TOL):
        """Validated distribution; raises instead of renormalizing."""
        items = sorted(mapping.items())
        for k, p in items:
            if isinstance(p, bool) or not isinstance(p, (int, float)) or not math.isfinite(p):
                raise ScenarioError(f"{label}: probability of {k!r} is not a finite number")
            if p < 0:
                raise ScenarioError(f"{label}: probability of {k!r} is negative")
        total = math.fsum(p for _, p in items)
        if not items or abs(total - 1.0) > tol:
            raise NormalizationError(label, total)
        return cls(tuple(k for k, _ in items), tuple(float(p) for _, p in items))

    @classmethod
    def point(cls, outcome: str) -> Distribution:
        return cls((outcome,), (1.0,))

    def __getitem__(self, outcome: str) -> float:
        try:
            return self.probs[self.support.index(outcome)]
        except ValueError:
            return 0.0

    def items(self):
        return zip(self.support, self.probs)

    def as_dict(self) -> dict[str, float]:
        return dict(self.items())

    def total(self) -> float:
        return math.fsum(self.probs)

    def pick(self, u: float) -> str:
        """Inverse-CDF draw for ``u`` in [0, 1) over the canonical order."""
        acc = 0.0
        last = None
        for outcome, p in zip(self.support, self.probs):
            if p <= 0.0:
                continue
            acc += p
            last = outcome
            if u < acc:
                return outcome
        return last


def _row(table: Mapping, key, what: str):
    row = table.get(key)
    if row is None:
        row = table.get(WILDCARD)
        if row is None:
            raise CoverageError(f"{what}: no row for state {key!r}")
    return row


@dataclass(frozen=True)
class TabularKernel:
    """Identity functional: one action distribution per state."""

    name: str
    table: Mapping[str, Distribution]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def row(self, state: State) -> Distribution:
        return _row(self.table, state.key, f"kernel {self.name!r}")

    def branches(self, state: State):
        key = state.key
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = ((None, 1.0, self.row(state)),)
        return hit

    def action_distribution(self, state: State) -> Distribution:
        return self.row(state)

    def thought_count(self) -> int:
        return 1

    def action_support(self) -> set[str]:
        return {a for d in self.table.values() for a in d.support}


@dataclass(frozen=True)
class ReActKernel:
    """Thought-then-action kernel: P(t|s) and P(a|t,s)."""

    name: str
    thought_given_state: Mapping[str, Distribution]
    action_given_thought_state: Mapping[tuple[str, str], Distribution]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def thought_row(self, state: State) -> Distribution:
        return _row(self.thought_given_state, state.key, f"kernel {self.name!r} thoughts")

    def action_row(self, thought: str, state: State) -> Distribution:
        key = state.key
        row = self.action_given_thought_state.get((thought, key))
        if row is None:
            row = self.action_given_thought_state.get((thought, WILDCARD))
            if row is None:
                raise CoverageError(f"kernel {self.name!r}: no action row for thought {thought!r} at state {key!r}")
        return row

    def branches(self, state: State):
        key = state.key
        hit = self._cache.get(key)
        if hit is None:
            hit = tuple(
                (t, pt, self.action_row(t, state)) for t, pt in self.thought_row(state).items() if pt > 0.0
            )
            self._cache[key] = hit
        return hit

    def action_distribution(self, state: State) -> Distribution:
        return marginalize_thoughts(self, state)

    def thought_count(self) -> int:
        return len({t for d in self.thought_given_state.values() for t in d.support})

    def action_support(self) -> set[str]:
        return {a for d in self.action_given_thought_state.values() for a in d.support}


@dataclass(frozen=True)
class RestrictedKernel:
    """A base kernel conditioned on the action falling in an allowed set.

    ``allowed`` maps state keys (or ``"*"``) to non-empty sets of action ids.
    For a thought kernel the joint (t, a) is conditioned, so the action
    marginal is exactly the renormalized restriction of the base marginal.
    """

    base: Union[TabularKernel, ReActKernel, "RestrictedKernel"]
    allowed: Mapping[str, frozenset[str]]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for key, allowed in self.allowed.items():
            if not allowed:
                raise ScenarioError(f"restriction of {self.name!r}: empty allowed set for {key!r}")

    @property
    def name(self) -> str:
        return self.base.name

    def allowed_at(self, state: State) -> frozenset[str]:
        return _row(self.allowed, state.key, f"restriction of {self.name!r}")

    def branches(self, state: State):
        key = state.key
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        allowed = self.allowed_at(state)
        base = self.base.branches(state)
        if all(p <= 0.0 or a in allowed for _, _, dist in base for a, p in dist.items()):
            # conditioning on a sure event changes nothing
            self._cache[key] = base
            return base
        kept = []
        for t, w, dist in base:
            mass = math.fsum(p for a, p in dist.items() if a in allowed)
            if mass > 0.0:
                kept.append((t, w, mass, dist))
        z = math.fsum(w * mass for _, w, mass, _ in kept)
        if z <= 0.0:
            raise DeadEndError(f"dead-end node: kernel {self.name!r} puts no mass on {sorted(allowed)} at {key!r}")
        hit = tuple(
            (
                t,
                w * mass / z,
                Distribution(
                    tuple(a for a in dist.support if a in allowed),
                    tuple(p / mass for a, p in dist.items() if a in allowed),
                ),
            )
            for t, w, mass, dist in kept
        )
        self._cache[key] = hit
        return hit

    def action_distribution(self, state: State) -> Distribution:
        return _mix(self.branches(state))

    def thought_count(self) -> int:
        return self.base.thought_count()

    def action_support(self) -> set[str]:
        return self.base.action_support()


Kernel = Union[TabularKernel, ReActKernel, RestrictedKernel]


def _mix(branches) -> Distribution:
    terms: dict[str, list[float]] = {}
    for _, w, dist in branches:
        for a, p in dist.items():
            terms.setdefault(a, []).append(w * p)
    support = tuple(sorted(terms))
    return Distribution(support, tuple(math.fsum(terms[a]) for a in support))


def action_distribution(k: Kernel, s: State) -> Distribution:
    return k.action_distribution(s)


def marginalize_thoughts(k: ReActKernel, s: State) -> Distribution:
    """P(a|s) = sum_t P(a|t,s) P(t|s)."""
    return _mix(k.branches(s))


def restrict(k: Kernel, allowed, s: State) -> Distribution:
    allowed = frozenset(allowed)
    if not allowed:
        raise ScenarioError("restriction needs a non-empty allowed set")
    base = k.action_distribution(s)
    if all(p <= 0.0 or a in allowed for a, p in base.items()):
        return base
    z = math.fsum(p for a, p in base.items() if a in allowed)
    if z <= 0.0:
        raise DeadEndError(f"dead-end node: no mass on {sorted(allowed)} at {s.key!r}")
    kept = [(a, p / z) for a, p in base.items() if a in allowed]
    return Distribution(tuple(a for a, _ in kept), tuple(p for _, p in kept))
