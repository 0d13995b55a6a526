"""Finite universes, states and update functions.

Everything here is an immutable value. Identifiers are plain strings; ordered
sets are stored sorted so that lexicographic order is the canonical order used
for every tie-break in the engine.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import DomainError, FormMismatch, ScenarioError

WILDCARD = "*"
CONTEXT_SLOT = "<c>"

_IDENT = re.compile(r'^[^\s|:;=,<>*()"\[\]{}$]+$')
_LITERAL = re.compile(r"^[^|:]+$")
_SLOT = re.compile(r"^<([^<>]+)>$")

CONCAT = "concat"
SUMMARY = "summary"
SELECTIVE = "selective"
UPDATE_KINDS = (CONCAT, SUMMARY, SELECTIVE)


def check_identifier(name: str, what: str = "identifier") -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise ScenarioError(f"invalid {what} {name!r}")
    return name


class Alphabet:
    """A finite, non-empty, canonically ordered set of identifiers."""

    __slots__ = ("symbols",)

    def __init__(self, symbols):
        symbols = tuple(symbols)
        if not symbols:
            raise ScenarioError(f"{type(self).__name__} must be non-empty")
        if len(set(symbols)) != len(symbols):
            raise ScenarioError(f"{type(self).__name__} has duplicate symbols")
        for s in symbols:
            check_identifier(s)
        self.symbols = tuple(sorted(symbols))

    def __contains__(self, item) -> bool:
        return item in self.symbols

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other) -> bool:
        return type(other) is type(self) and other.symbols == self.symbols

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.symbols))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.symbols)})"


class ThoughtAlphabet(Alphabet):
    __slots__ = ()


class ContextAlphabet(Alphabet):
    __slots__ = ()


@dataclass(frozen=True)
class Action:
    cls: str
    arg: str
    obs: str

    @property
    def id(self) -> str:
        return self.cls if self.arg == "" else f"{self.cls}({self.arg})"


@dataclass(frozen=True)
class ActionSpace:
    """Action classes, their arguments and the (deterministic) observations.

    ``obs_of`` maps ``(class, arg)`` to an observation id. An argument of
    ``""`` means the class takes no argument and the action id is the bare
    class name.
    """

    name: str
    obs_of: Mapping[tuple[str, str], str]
    terminal_classes: frozenset[str] = frozenset()
    _by_id: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        obs_of = {k: self.obs_of[k] for k in sorted(self.obs_of)}
        if not obs_of:
            raise ScenarioError(f"action space {self.name!r} declares no actions")
        by_id = {}
        for (cls, arg), obs in obs_of.items():
            check_identifier(cls, "action class")
            if arg != "":
                check_identifier(arg, "action argument")
            check_identifier(obs, "observation")
            action = Action(cls, arg, obs)
            by_id[action.id] = action
        if len(by_id) != len(obs_of):
            raise ScenarioError(f"action space {self.name!r} has colliding action ids")
        unknown = set(self.terminal_classes) - {c for c, _ in obs_of}
        if unknown:
            raise ScenarioError(f"action space {self.name!r}: unknown terminal classes {sorted(unknown)}")
        object.__setattr__(self, "obs_of", obs_of)
        object.__setattr__(self, "terminal_classes", frozenset(self.terminal_classes))
        object.__setattr__(self, "_by_id", by_id)

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted({c for c, _ in self.obs_of}))

    def args_of(self, cls: str) -> tuple[str, ...]:
        return tuple(a for c, a in self.obs_of if c == cls)

    @property
    def action_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._by_id))

    def actions(self) -> tuple[Action, ...]:
        return tuple(self._by_id[i] for i in self.action_ids)

    def action(self, action_id: str) -> Action:
        try:
            return self._by_id[action_id]
        except KeyError:
            raise DomainError(f"action {action_id!r} is not in action space {self.name!r}") from None

    def __contains__(self, action_id) -> bool:
        return action_id in self._by_id

    def is_terminal(self, action_id: str) -> bool:
        return self._by_id[action_id].cls in self.terminal_classes


@dataclass(frozen=True)
class State:
    """Agent state in one of three forms.

    A concat-form state keeps its full segment history; a summary-form state
    is a single summary id; a selective-form state is a small key/value
    memory stored as sorted pairs.
    """

    form: str
    history: tuple[str, ...] = ()
    summary: str | None = None
    memory: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of_history(cls, segments) -> State:
        return cls(CONCAT, history=tuple(segments))

    @classmethod
    def of_summary(cls, summary_id: str) -> State:
        return cls(SUMMARY, summary=summary_id)

    @classmethod
    def of_memory(cls, memory: Mapping[str, str]) -> State:
        return cls(SELECTIVE, memory=tuple(sorted(memory.items())))

    @property
    def key(self) -> str:
        """Canonical serialization used to index kernel rows.

        History segments never contain ``|`` or ``:``, so the three forms
        cannot collide.
        """
        key = self.__dict__.get("_key")
        if key is None:
            if self.form == CONCAT:
                key = "|".join(self.history)
            elif self.form == SUMMARY:
                key = f"summary:{self.summary}"
            else:
                key = "memory:" + ";".join(f"{k}={v}" for k, v in self.memory)
            object.__setattr__(self, "_key", key)
        return key

    def memory_dict(self) -> dict[str, str]:
        return dict(self.memory)

    def __repr__(self) -> str:
        return f"State({self.key!r})"


def _lookup(table: Mapping, keys):
    for k in keys:
        if k in table:
            return table[k]
    raise KeyError(keys[0])


@dataclass(frozen=True)
class UpdateFn:
    """One of the three update kinds: concat, summary or selective.

    ``summary_map`` keys are ``(summary, thought, obs)``; ``selector`` keys
    are ``(thought, obs)`` and values ``(memory key, value)``. Thought and
    observation positions accept ``"*"`` as a fallback, and a thought of
    ``None`` stands for a step taken without a thought. Selector values may
    be ``"$t"`` or ``"$o"`` to write the current thought or observation.

    ``init`` lifts a history-form initial state into this update's form. It
    maps an initial-state key (or ``"*"``) to a summary id (summary) or to
    a tuple of ``(key, value)`` writes (selective); ``"$last"`` as a value
    writes the last segment of the initial history.
    """

    name: str
    kind: str
    summary_map: Mapping[tuple, str] = field(default_factory=dict)
    selector: Mapping[tuple, tuple[str, str]] = field(default_factory=dict)
    init: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in UPDATE_KINDS:
            raise ScenarioError(f"update {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == SUMMARY and not self.init:
            raise ScenarioError(f"update {self.name!r}: summary update needs an init map")
        if self.kind == SELECTIVE and not self.init:
            raise ScenarioError(f"update {self.name!r}: selective update needs an init map")

    @property
    def summaries(self) -> tuple[str, ...]:
        ids = {k[0] for k in self.summary_map} | set(self.summary_map.values())
        if self.kind == SUMMARY:
            ids |= set(self.init.values())
        return tuple(sorted(ids))

    def lift(self, state: State) -> State:
        """Bring a history-form state into this update's form."""
        if state.form == self.kind:
            return state
        if state.form != CONCAT:
            raise FormMismatch(f"update {self.name!r} ({self.kind}) cannot lift a {state.form}-form state")
        try:
            rule = _lookup(self.init, (state.key, WILDCARD))
        except KeyError:
            raise FormMismatch(f"update {self.name!r}: no init rule for initial state {state.key!r}") from None
        if self.kind == SUMMARY:
            return State.of_summary(rule)
        last = state.history[-1] if state.history else ""
        return State.of_memory({k: (last if v == "$last" else v) for k, v in rule})

    def apply(self, state: State, thought: str | None, obs: str) -> State:
        if state.form != self.kind:
            raise FormMismatch(f"{self.kind} update {self.name!r} applied to a {state.form}-form state")
        if self.kind == CONCAT:
            if thought is None:
                return State(CONCAT, history=state.history + (obs,))
            return State(CONCAT, history=state.history + (thought, obs))
        if self.kind == SUMMARY:
            s = state.summary
            keys = ((s, thought, obs), (s, thought, WILDCARD), (s, WILDCARD, obs), (s, WILDCARD, WILDCARD))
            try:
                return State.of_summary(_lookup(self.summary_map, keys))
            except KeyError:
                raise FormMismatch(
                    f"summary update {self.name!r} undefined for ({s}, {thought}, {obs})"
                ) from None
        keys = ((thought, obs), (thought, WILDCARD), (WILDCARD, obs), (WILDCARD, WILDCARD))
        try:
            key, value = _lookup(self.selector, keys)
        except KeyError:
            raise FormMismatch(f"selective update {self.name!r} undefined for ({thought}, {obs})") from None
        if value == "$o":
            value = obs
        elif value == "$t":
            value = "-" if thought is None else thought
        memory = state.memory_dict()
        memory[key] = value
        return State.of_memory(memory)

    def missing_transitions(self, thoughts, observations) -> list[str]:
        """Combinations over the declared alphabets with no defined transition."""
        thoughts = [None, *thoughts]
        missing = []
        if self.kind == SUMMARY:
            for s in self.summaries:
                for t in thoughts:
                    for o in observations:
                        keys = ((s, t, o), (s, t, WILDCARD), (s, WILDCARD, o), (s, WILDCARD, WILDCARD))
                        if not any(k in self.summary_map for k in keys):
                            missing.append(f"({s}, {t}, {o})")
        elif self.kind == SELECTIVE:
            for t in thoughts:
                for o in observations:
                    keys = ((t, o), (t, WILDCARD), (WILDCARD, o), (WILDCARD, WILDCARD))
                    if not any(k in self.selector for k in keys):
                        missing.append(f"({t}, {o})")
        return missing


def apply_update(u: UpdateFn, s: State, t: str | None, o: str) -> State:
    return u.apply(s, t, o)


@dataclass(frozen=True)
class InitBuilder:
    """Prompt template producing the initial state from a context.

    Segments of the form ``<name>`` are placeholders: ``<c>`` for the
    context, anything else for a declared parameter.
    """

    name: str
    template: tuple[str, ...]
    params: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "template", tuple(self.template))
        object.__setattr__(self, "params", {p: tuple(v) for p, v in sorted(self.params.items())})
        slots = [seg for seg in self.template if _SLOT.match(seg)]
        if slots.count(CONTEXT_SLOT) != 1:
            raise ScenarioError(f"template {self.name!r} must contain exactly one {CONTEXT_SLOT} placeholder")
        for seg in self.template:
            m = _SLOT.match(seg)
            if m is None:
                if not _LITERAL.match(seg) or seg == WILDCARD:
                    raise ScenarioError(f"template {self.name!r}: invalid literal segment {seg!r}")
            elif seg != CONTEXT_SLOT and m.group(1) not in self.params:
                raise ScenarioError(f"template {self.name!r}: parameter {m.group(1)!r} is not declared")
        for p, domain in self.params.items():
            check_identifier(p, "parameter")
            if not domain:
                raise ScenarioError(f"template {self.name!r}: parameter {p!r} has an empty domain")
            for v in domain:
                check_identifier(v, "parameter value")


def build_initial_state(
    builder: InitBuilder,
    context: str,
    bindings: Mapping[str, str] | None = None,
    contexts: ContextAlphabet | None = None,
) -> State:
    bindings = bindings or {}
    if contexts is not None and context not in contexts:
        raise DomainError(f"unknown context {context!r}")
    for p, domain in builder.params.items():
        if p not in bindings:
            raise DomainError(f"template {builder.name!r}: parameter {p!r} is unbound")
        if bindings[p] not in domain:
            raise DomainError(
                f"template {builder.name!r}: value {bindings[p]!r} is outside the domain of {p!r} {list(domain)}"
            )
    segments = []
    for seg in builder.template:
        if seg == CONTEXT_SLOT:
            segments.append(context)
        else:
            m = _SLOT.match(seg)
            segments.append(bindings[m.group(1)] if m else seg)
    return State.of_history(segments)
