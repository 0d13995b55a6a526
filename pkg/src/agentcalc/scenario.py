"""Scenario documents: strict JSON parsing, validation and serialization.

A scenario declares alphabets, action spaces, kernels, update functions,
prompt templates, context emissions, agents, one topology, an objective,
optional mutation domains and budgets. Parsing is strict: unknown fields,
duplicate keys, unresolved names and unnormalized rows are all errors, and
nothing is renormalized or defaulted silently.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .errors import (
    DomainError,
    GoalError,
    ParseError,
    ScenarioError,
    UnresolvedReference,
    ValidationError,
    VersionMismatch,
)
from .inference import DEFAULT_BUDGET
from .kernels import Distribution, Kernel, ReActKernel, TabularKernel
from .model import (
    CONCAT,
    SELECTIVE,
    SUMMARY,
    ActionSpace,
    Alphabet,
    ContextAlphabet,
    InitBuilder,
    State,
    ThoughtAlphabet,
    UpdateFn,
)
from .optimize import CostModel, DofHandle, Mutation, Objective, apply_mutation
from .topology import (
    AgentSpec,
    Chain,
    ContextEmission,
    ControlFlow,
    Empty,
    FlowNode,
    GoalQuery,
    Hierarchical,
    Parallel,
    Topology,
    split_goal,
    validate_topology,
)

FORMAT_VERSION = "1.0"
DEFAULT_OPT_BUDGET = 64


@dataclass(frozen=True)
class ScenarioDoc:
    version: str
    contexts: ContextAlphabet
    observations: Alphabet
    thoughts: Optional[ThoughtAlphabet]
    summaries: tuple[str, ...]
    action_spaces: dict[str, ActionSpace]
    kernels: dict[str, Kernel]
    updates: dict[str, UpdateFn]
    templates: dict[str, InitBuilder]
    emissions: dict[str, ContextEmission]
    agents: dict[str, AgentSpec]
    topology: Topology
    objective: Optional[Objective] = None
    mutations: tuple[Mutation, ...] = ()
    enum_budget: int = DEFAULT_BUDGET
    opt_budget: int = DEFAULT_OPT_BUDGET
    source: Optional[str] = field(default=None, compare=False)

    @property
    def goal(self) -> GoalQuery:
        if self.objective is None:
            raise ScenarioError("scenario declares no objective")
        return self.objective.goal


# --- reading helpers --------------------------------------------------------


def _obj(value, path: str, required=(), optional=()) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"{path}: expected an object")
    unknown = sorted(set(value) - set(required) - set(optional))
    if unknown:
        raise ScenarioError(f"{path}: unknown field(s) {unknown}")
    for k in required:
        if k not in value:
            raise ScenarioError(f"{path}: missing field {k!r}")
    return value


def _list(value, path: str) -> list:
    if not isinstance(value, list):
        raise ScenarioError(f"{path}: expected an array")
    return value


def _str(value, path: str) -> str:
    if not isinstance(value, str):
        raise ScenarioError(f"{path}: expected a string")
    return value


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}: expected an integer")
    return value


def _num(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}: expected a number")
    return float(value)


def _ref(table: dict, name, path: str):
    if not isinstance(name, str) or name not in table:
        raise UnresolvedReference(path, name)
    return table[name]


def _dist(value, path: str, alphabet=None) -> Distribution:
    row = _obj(value, path, optional=value.keys() if isinstance(value, dict) else ())
    if alphabet is not None:
        for k in row:
            if k not in alphabet:
                raise UnresolvedReference(path, k)
    return Distribution.from_mapping(row, label=path)


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ScenarioError(f"duplicate key {k!r}")
        out[k] = v
    return out


# --- parsing ----------------------------------------------------------------

_TOP_REQUIRED = ("version", "alphabets", "action_spaces", "kernels", "updates", "templates", "topology")
_TOP_OPTIONAL = ("emissions", "agents", "objective", "mutations", "budgets")


def parse_scenario(text: str, source: Optional[str] = None) -> ScenarioDoc:
    """Parse and fully validate a scenario document."""
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    doc = _build(raw, source)
    _validate(doc)
    return doc


def load_scenario(path) -> ScenarioDoc:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {str(path)!r}: {exc.strerror}") from None
    return parse_scenario(text, source=str(path))


def _build(raw, source) -> ScenarioDoc:
    top = _obj(raw, "scenario", _TOP_REQUIRED, _TOP_OPTIONAL)
    version = _str(top["version"], "version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"version mismatch: document is {version!r}, this reader supports {FORMAT_VERSION!r}")

    alph = _obj(top["alphabets"], "alphabets", ("contexts", "observations"), ("thoughts", "summaries"))
    contexts = ContextAlphabet(_list(alph["contexts"], "alphabets.contexts"))
    observations = Alphabet(_list(alph["observations"], "alphabets.observations"))
    thoughts = ThoughtAlphabet(_list(alph["thoughts"], "alphabets.thoughts")) if "thoughts" in alph else None
    summaries = tuple(sorted(_list(alph.get("summaries", []), "alphabets.summaries")))
    if len(set(summaries)) != len(summaries):
        raise ScenarioError("alphabets.summaries: duplicate symbols")

    spaces = {
        name: _action_space(name, raw, f"action_spaces.{name}", observations)
        for name, raw in _obj(top["action_spaces"], "action_spaces", optional=top["action_spaces"]).items()
    }
    kernels = {
        name: _kernel(name, raw, f"kernels.{name}", thoughts)
        for name, raw in _obj(top["kernels"], "kernels", optional=top["kernels"]).items()
    }
    updates = {
        name: _update(name, raw, f"updates.{name}", thoughts, observations, summaries)
        for name, raw in _obj(top["updates"], "updates", optional=top["updates"]).items()
    }
    templates = {
        name: _template(name, raw, f"templates.{name}")
        for name, raw in _obj(top["templates"], "templates", optional=top["templates"]).items()
    }
    emissions_raw = top.get("emissions", {})
    emissions = {
        name: _emission(name, raw, f"emissions.{name}", contexts)
        for name, raw in _obj(emissions_raw, "emissions", optional=emissions_raw).items()
    }
    reg = dict(spaces=spaces, kernels=kernels, updates=updates, templates=templates, emissions=emissions)
    agents_raw = top.get("agents", {})
    agents = {
        name: _agent(name, raw, f"agents.{name}", reg)
        for name, raw in _obj(agents_raw, "agents", optional=agents_raw).items()
    }
    reg["agents"] = agents
    topology = _topology(top["topology"], "topology", reg)

    objective = None
    if "objective" in top:
        objective = _objective(top["objective"], "objective", contexts)
    mutations = tuple(
        _mutation(m, f"mutations[{i}]") for i, m in enumerate(_list(top.get("mutations", []), "mutations"))
    )
    budgets = _obj(top.get("budgets", {}), "budgets", optional=("enumeration", "optimizer"))
    enum_budget = _int(budgets.get("enumeration", DEFAULT_BUDGET), "budgets.enumeration")
    opt_budget = _int(budgets.get("optimizer", DEFAULT_OPT_BUDGET), "budgets.optimizer")
    if enum_budget < 1 or opt_budget < 1:
        raise ScenarioError("budgets must be positive")
    return ScenarioDoc(
        version, contexts, observations, thoughts, summaries, spaces, kernels, updates, templates,
        emissions, agents, topology, objective, mutations, enum_budget, opt_budget, source,
    )


def _action_space(name, raw, path, observations) -> ActionSpace:
    raw = _obj(raw, path, ("classes",), ("terminal",))
    obs_of = {}
    classes = _obj(raw["classes"], f"{path}.classes", optional=raw["classes"])
    for cls, cspec in classes.items():
        cpath = f"{path}.classes.{cls}"
        cspec = _obj(cspec, cpath, optional=("obs", "args"))
        if ("obs" in cspec) == ("args" in cspec):
            raise ScenarioError(f"{cpath}: give exactly one of 'obs' or 'args'")
        if "obs" in cspec:
            pairs = {"": cspec["obs"]}
        else:
            pairs = _obj(cspec["args"], f"{cpath}.args", optional=cspec["args"])
            if not pairs or "" in pairs:
                raise ScenarioError(f"{cpath}.args: needs at least one named argument")
        for arg, obs in pairs.items():
            if obs not in observations:
                raise UnresolvedReference(f"{cpath}", obs)
            obs_of[(cls, arg)] = obs
    terminal = frozenset(_list(raw.get("terminal", []), f"{path}.terminal"))
    for t in terminal:
        if t not in classes:
            raise UnresolvedReference(f"{path}.terminal", t)
    return ActionSpace(name, obs_of, terminal)


def _kernel(name, raw, path, thoughts) -> Kernel:
    kind = _obj(raw, path, ("type",), ("rows", "thoughts", "actions")).get("type")
    if kind == "tabular":
        raw = _obj(raw, path, ("type", "rows"))
        rows = _obj(raw["rows"], f"{path}.rows", optional=raw["rows"])
        return TabularKernel(name, {k: _dist(v, f"{path}.rows[{k!r}]") for k, v in rows.items()})
    if kind == "react":
        raw = _obj(raw, path, ("type", "thoughts", "actions"))
        if thoughts is None:
            raise ScenarioError(f"{path}: react kernel needs alphabets.thoughts")
        trows = _obj(raw["thoughts"], f"{path}.thoughts", optional=raw["thoughts"])
        t_given_s = {k: _dist(v, f"{path}.thoughts[{k!r}]", thoughts) for k, v in trows.items()}
        a_given = {}
        arows = _obj(raw["actions"], f"{path}.actions", optional=raw["actions"])
        for t, rows in arows.items():
            if t not in thoughts:
                raise UnresolvedReference(f"{path}.actions", t)
            rows = _obj(rows, f"{path}.actions.{t}", optional=rows)
            for k, v in rows.items():
                a_given[(t, k)] = _dist(v, f"{path}.actions.{t}[{k!r}]")
        return ReActKernel(name, t_given_s, a_given)
    raise ScenarioError(f"{path}.type: unknown kernel type {kind!r}")


def _wild(value, alphabet, path, allow_none=False):
    if value is None and allow_none:
        return None
    if value == "*":
        return value
    if alphabet is None or value not in alphabet:
        raise UnresolvedReference(path, value)
    return value


def _update(name, raw, path, thoughts, observations, summaries) -> UpdateFn:
    raw = _obj(raw, path, ("kind",), ("init", "map"))
    kind = raw["kind"]
    if kind == "concat":
        _obj(raw, path, ("kind",))
        return UpdateFn(name, kind)
    if kind == SUMMARY:
        raw = _obj(raw, path, ("kind", "init", "map"))
        init = {}
        for k, v in _obj(raw["init"], f"{path}.init", optional=raw["init"]).items():
            if v not in summaries:
                raise UnresolvedReference(f"{path}.init[{k!r}]", v)
            init[k] = v
        table = {}
        for i, entry in enumerate(_list(raw["map"], f"{path}.map")):
            epath = f"{path}.map[{i}]"
            if not isinstance(entry, list) or len(entry) != 4:
                raise ScenarioError(f"{epath}: expected [summary, thought, observation, result]")
            s, t, o, r = entry
            if s not in summaries:
                raise UnresolvedReference(epath, s)
            if r not in summaries:
                raise UnresolvedReference(epath, r)
            key = (s, _wild(t, thoughts, epath, True), _wild(o, observations, epath))
            if key in table:
                raise ScenarioError(f"{epath}: duplicate transition {key}")
            table[key] = r
        return UpdateFn(name, kind, summary_map=table, init=init)
    if kind == SELECTIVE:
        raw = _obj(raw, path, ("kind", "init", "map"))
        init = {}
        for k, writes in _obj(raw["init"], f"{path}.init", optional=raw["init"]).items():
            pairs = []
            for j, w in enumerate(_list(writes, f"{path}.init[{k!r}]")):
                if not isinstance(w, list) or len(w) != 2 or not all(isinstance(x, str) for x in w):
                    raise ScenarioError(f"{path}.init[{k!r}][{j}]: expected [key, value]")
                pairs.append(tuple(w))
            init[k] = tuple(pairs)
        table = {}
        for i, entry in enumerate(_list(raw["map"], f"{path}.map")):
            epath = f"{path}.map[{i}]"
            if not isinstance(entry, list) or len(entry) != 4:
                raise ScenarioError(f"{epath}: expected [thought, observation, key, value]")
            t, o, k, v = entry
            key = (_wild(t, thoughts, epath, True), _wild(o, observations, epath))
            if key in table:
                raise ScenarioError(f"{epath}: duplicate transition {key}")
            table[key] = (_str(k, epath), _str(v, epath))
        return UpdateFn(name, kind, selector=table, init=init)
    raise ScenarioError(f"{path}.kind: unknown update kind {kind!r}")


def _template(name, raw, path) -> InitBuilder:
    raw = _obj(raw, path, ("segments",), ("params",))
    params_raw = raw.get("params", {})
    params = {
        p: tuple(_list(v, f"{path}.params.{p}"))
        for p, v in _obj(params_raw, f"{path}.params", optional=params_raw).items()
    }
    segments = [_str(s, f"{path}.segments") for s in _list(raw["segments"], f"{path}.segments")]
    return InitBuilder(name, tuple(segments), params)


def _emission(name, raw, path, contexts) -> ContextEmission:
    raw = _obj(raw, path, ("contexts", "rows"))
    alphabet = _list(raw["contexts"], f"{path}.contexts")
    for c in alphabet:
        if c not in contexts:
            raise UnresolvedReference(f"{path}.contexts", c)
    if len(set(alphabet)) != len(alphabet) or not alphabet:
        raise ScenarioError(f"{path}.contexts: must be non-empty and unique")
    rows = _obj(raw["rows"], f"{path}.rows", optional=raw["rows"])
    return ContextEmission(name, tuple(alphabet), {k: _dist(v, f"{path}.rows[{k!r}]", alphabet) for k, v in rows.items()})


def _bindings(value, path) -> dict:
    raw = _obj(value, path, optional=value.keys() if isinstance(value, dict) else ())
    return {k: _str(v, f"{path}.{k}") for k, v in raw.items()}


def _allowed(value, path, space: ActionSpace):
    if value is None:
        return None
    out = frozenset(_list(value, path))
    for a in out:
        if a not in space:
            raise UnresolvedReference(path, a)
    return out


def _agent(name, raw, path, reg) -> AgentSpec:
    raw = _obj(raw, path, ("kernel", "update", "template", "action_space", "horizon"), ("bindings", "allowed"))
    space = _ref(reg["spaces"], raw["action_space"], f"{path}.action_space")
    agent = AgentSpec(
        name=name,
        kernel=_ref(reg["kernels"], raw["kernel"], f"{path}.kernel"),
        update=_ref(reg["updates"], raw["update"], f"{path}.update"),
        init=_ref(reg["templates"], raw["template"], f"{path}.template"),
        horizon=_int(raw["horizon"], f"{path}.horizon"),
        action_space=space,
        bindings=_bindings(raw.get("bindings", {}), f"{path}.bindings"),
        allowed=_allowed(raw.get("allowed"), f"{path}.allowed", space),
    )
    return agent


def _state(value, path) -> State:
    raw = _obj(value, path, optional=("history", "summary", "memory"))
    if len(raw) != 1:
        raise ScenarioError(f"{path}: give exactly one of history, summary, memory")
    if "history" in raw:
        return State.of_history(_str(s, path) for s in _list(raw["history"], f"{path}.history"))
    if "summary" in raw:
        return State.of_summary(_str(raw["summary"], f"{path}.summary"))
    return State.of_memory(_bindings(raw["memory"], f"{path}.memory"))


def _topology(raw, path, reg) -> Topology:
    kind = _obj(raw, path, ("type",), raw.keys() if isinstance(raw, dict) else ()).get("type")
    if kind == "chain":
        raw = _obj(raw, path, ("type", "agent"))
        return Chain(_ref(reg["agents"], raw["agent"], f"{path}.agent"))
    if kind == "empty":
        _obj(raw, path, ("type",))
        return Empty()
    if kind == "hierarchical":
        raw = _obj(
            raw, path,
            ("type", "name", "outer", "emission_out", "inner", "emission_back", "resume"),
            ("resume_carries_history",),
        )
        carries = raw.get("resume_carries_history", False)
        if not isinstance(carries, bool):
            raise ScenarioError(f"{path}.resume_carries_history: expected a boolean")
        return Hierarchical(
            name=_str(raw["name"], f"{path}.name"),
            outer=_ref(reg["agents"], raw["outer"], f"{path}.outer"),
            emission_out=_ref(reg["emissions"], raw["emission_out"], f"{path}.emission_out"),
            inner=_topology(raw["inner"], f"{path}.inner", reg),
            emission_back=_ref(reg["emissions"], raw["emission_back"], f"{path}.emission_back"),
            resume=_ref(reg["agents"], raw["resume"], f"{path}.resume"),
            resume_carries_history=carries,
        )
    if kind == "parallel":
        raw = _obj(raw, path, ("type", "name", "left", "right"), ("recombiner", "tail"))
        recombiner = None
        if raw.get("recombiner") is not None:
            recombiner = {}
            for i, entry in enumerate(_list(raw["recombiner"], f"{path}.recombiner")):
                epath = f"{path}.recombiner[{i}]"
                entry = _obj(entry, epath, ("left", "right", "state"))
                key = (_str(entry["left"], epath), _str(entry["right"], epath))
                if key in recombiner:
                    raise ScenarioError(f"{epath}: duplicate merge entry")
                recombiner[key] = _state(entry["state"], f"{epath}.state")
        tail = raw.get("tail")
        return Parallel(
            name=_str(raw["name"], f"{path}.name"),
            left=_topology(raw["left"], f"{path}.left", reg),
            right=_topology(raw["right"], f"{path}.right", reg),
            recombiner=recombiner,
            tail=None if tail is None else _topology(tail, f"{path}.tail", reg),
        )
    if kind == "controlflow":
        raw = _obj(
            raw, path,
            ("type", "name", "action_space", "template", "update", "horizon", "entry", "nodes", "edges"),
            ("bindings",),
        )
        space = _ref(reg["spaces"], raw["action_space"], f"{path}.action_space")
        nodes = {}
        for n, nspec in _obj(raw["nodes"], f"{path}.nodes", optional=raw["nodes"]).items():
            npath = f"{path}.nodes.{n}"
            nspec = _obj(nspec, npath, ("kernel",), ("allowed", "template", "update"))
            nodes[n] = FlowNode(
                kernel=_ref(reg["kernels"], nspec["kernel"], f"{npath}.kernel"),
                allowed=_allowed(nspec.get("allowed"), f"{npath}.allowed", space),
                init=None if nspec.get("template") is None else _ref(reg["templates"], nspec["template"], f"{npath}.template"),
                update=None if nspec.get("update") is None else _ref(reg["updates"], nspec["update"], f"{npath}.update"),
            )
        edges = {}
        for n, succ in _obj(raw["edges"], f"{path}.edges", optional=raw["edges"]).items():
            succ = _obj(succ, f"{path}.edges.{n}", optional=succ.keys() if isinstance(succ, dict) else ())
            for cls, target in succ.items():
                if cls not in space.classes:
                    raise UnresolvedReference(f"{path}.edges.{n}", cls)
                if target is not None:
                    _str(target, f"{path}.edges.{n}.{cls}")
            edges[n] = dict(succ)
        return ControlFlow(
            name=_str(raw["name"], f"{path}.name"),
            action_space=space,
            init=_ref(reg["templates"], raw["template"], f"{path}.template"),
            update=_ref(reg["updates"], raw["update"], f"{path}.update"),
            horizon=_int(raw["horizon"], f"{path}.horizon"),
            entry=_str(raw["entry"], f"{path}.entry"),
            nodes=nodes,
            edges=edges,
            bindings=_bindings(raw.get("bindings", {}), f"{path}.bindings"),
        )
    raise ScenarioError(f"{path}.type: unknown topology type {kind!r}")


def _objective(raw, path, contexts) -> Objective:
    raw = _obj(raw, path, ("goal", "context", "lambda", "cost"))
    goal = tuple(_str(a, f"{path}.goal") for a in _list(raw["goal"], f"{path}.goal"))
    context = _str(raw["context"], f"{path}.context")
    if context not in contexts:
        raise UnresolvedReference(f"{path}.context", context)
    cost = _obj(raw["cost"], f"{path}.cost", ("w_msg", "w_ctx", "w_depth"))
    return Objective(
        GoalQuery(goal, context),
        _num(raw["lambda"], f"{path}.lambda"),
        CostModel(*(_num(cost[k], f"{path}.cost.{k}") for k in ("w_msg", "w_ctx", "w_depth"))),
    )


def _mutation(raw, path) -> Mutation:
    raw = _obj(raw, path, ("handle", "target", "values"), ("param",))
    try:
        handle = DofHandle(raw["handle"])
    except ValueError:
        raise ScenarioError(f"{path}.handle: unknown handle {raw['handle']!r}") from None
    values = _list(raw["values"], f"{path}.values")
    if handle == DofHandle.ACTION_PARTITION:
        values = [frozenset(_list(v, f"{path}.values")) for v in values]
    param = raw.get("param")
    if param is not None and handle != DofHandle.INIT_STATE:
        raise ScenarioError(f"{path}.param: only init_state mutations take a parameter")
    return Mutation(handle, _str(raw["target"], f"{path}.target"), tuple(values), param)


# --- validation -------------------------------------------------------------


def _validate(doc: ScenarioDoc) -> None:
    violations = []
    thoughts = tuple(doc.thoughts or ())
    for name, u in doc.updates.items():
        if u.kind == SUMMARY:
            for s in u.summaries:
                if s not in doc.summaries:
                    raise UnresolvedReference(f"updates.{name}", s)
        missing = u.missing_transitions(thoughts, tuple(doc.observations))
        if missing:
            violations.append(f"update {name!r} is not total: missing {', '.join(missing[:5])}")
    if doc.objective is not None:
        known = set()
        for space in doc.action_spaces.values():
            known |= set(space.action_ids)
        for i, a in enumerate(doc.objective.goal.goal):
            if a not in known:
                raise UnresolvedReference(f"objective.goal[{i}]", a)
        try:
            split_goal(doc.topology, doc.objective.goal.goal)
        except GoalError as exc:
            violations.append(str(exc))
    for m in doc.mutations:
        for v in m.values:
            try:
                apply_mutation(doc, m, v)
            except DomainError as exc:
                violations.append(str(exc))
    contexts = [doc.objective.goal.context] if doc.objective is not None else list(doc.contexts)
    violations.extend(validate_topology(doc.topology, contexts, doc.enum_budget))
    if violations:
        raise ValidationError(violations)


# --- serialization ----------------------------------------------------------


def _dist_out(d: Distribution) -> dict:
    return dict(d.items())


def _kernel_out(k: Kernel) -> dict:
    if isinstance(k, TabularKernel):
        return {"type": "tabular", "rows": {key: _dist_out(d) for key, d in k.table.items()}}
    actions: dict[str, dict] = {}
    for (t, key), d in k.action_given_thought_state.items():
        actions.setdefault(t, {})[key] = _dist_out(d)
    return {
        "type": "react",
        "thoughts": {key: _dist_out(d) for key, d in k.thought_given_state.items()},
        "actions": actions,
    }


def _update_out(u: UpdateFn) -> dict:
    if u.kind == SUMMARY:
        return {
            "kind": u.kind,
            "init": dict(u.init),
            "map": [[s, t, o, r] for (s, t, o), r in u.summary_map.items()],
        }
    if u.kind == SELECTIVE:
        return {
            "kind": u.kind,
            "init": {k: [list(w) for w in writes] for k, writes in u.init.items()},
            "map": [[t, o, k, v] for (t, o), (k, v) in u.selector.items()],
        }
    return {"kind": u.kind}


def _space_out(space: ActionSpace) -> dict:
    classes: dict[str, Any] = {}
    for cls in space.classes:
        args = space.args_of(cls)
        if args == ("",):
            classes[cls] = {"obs": space.obs_of[(cls, "")]}
        else:
            classes[cls] = {"args": {a: space.obs_of[(cls, a)] for a in args}}
    out: dict[str, Any] = {"classes": classes}
    if space.terminal_classes:
        out["terminal"] = sorted(space.terminal_classes)
    return out


def _agent_out(a: AgentSpec) -> dict:
    out = {
        "kernel": a.kernel.name,
        "update": a.update.name,
        "template": a.init.name,
        "action_space": a.action_space.name,
        "horizon": a.horizon,
        "bindings": dict(a.bindings),
    }
    if a.allowed is not None:
        out["allowed"] = sorted(a.allowed)
    return out


def _state_out(s: State) -> dict:
    if s.form == CONCAT:
        return {"history": list(s.history)}
    if s.form == SUMMARY:
        return {"summary": s.summary}
    return {"memory": dict(s.memory)}


def _topology_out(t: Topology) -> dict:
    if isinstance(t, Chain):
        return {"type": "chain", "agent": t.agent.name}
    if isinstance(t, Empty):
        return {"type": "empty"}
    if isinstance(t, Hierarchical):
        return {
            "type": "hierarchical",
            "name": t.name,
            "outer": t.outer.name,
            "emission_out": t.emission_out.name,
            "inner": _topology_out(t.inner),
            "emission_back": t.emission_back.name,
            "resume": t.resume.name,
            "resume_carries_history": t.resume_carries_history,
        }
    if isinstance(t, Parallel):
        rec = None
        if t.recombiner is not None:
            rec = [{"left": l, "right": r, "state": _state_out(s)} for (l, r), s in t.recombiner.items()]
        return {
            "type": "parallel",
            "name": t.name,
            "left": _topology_out(t.left),
            "right": _topology_out(t.right),
            "recombiner": rec,
            "tail": None if t.tail is None else _topology_out(t.tail),
        }
    nodes = {}
    for n, fn in t.nodes.items():
        raw: dict[str, Any] = {"kernel": fn.kernel.name}
        if fn.allowed is not None:
            raw["allowed"] = sorted(fn.allowed)
        if fn.init is not None:
            raw["template"] = fn.init.name
        if fn.update is not None:
            raw["update"] = fn.update.name
        nodes[n] = raw
    return {
        "type": "controlflow",
        "name": t.name,
        "action_space": t.action_space.name,
        "template": t.init.name,
        "update": t.update.name,
        "horizon": t.horizon,
        "entry": t.entry,
        "bindings": dict(t.bindings),
        "nodes": nodes,
        "edges": {n: dict(s) for n, s in t.edges.items()},
    }


def _mutation_out(m: Mutation) -> dict:
    values = [sorted(v) for v in m.values] if m.handle == DofHandle.ACTION_PARTITION else list(m.values)
    out: dict[str, Any] = {"handle": m.handle.value, "target": m.target, "values": values}
    if m.param is not None:
        out["param"] = m.param
    return out


def to_dict(doc: ScenarioDoc) -> dict:
    alphabets: dict[str, Any] = {"contexts": list(doc.contexts), "observations": list(doc.observations)}
    if doc.thoughts is not None:
        alphabets["thoughts"] = list(doc.thoughts)
    if doc.summaries:
        alphabets["summaries"] = list(doc.summaries)
    out: dict[str, Any] = {
        "version": doc.version,
        "alphabets": alphabets,
        "action_spaces": {n: _space_out(s) for n, s in doc.action_spaces.items()},
        "kernels": {n: _kernel_out(k) for n, k in doc.kernels.items()},
        "updates": {n: _update_out(u) for n, u in doc.updates.items()},
        "templates": {
            n: {"segments": list(b.template), "params": {p: list(v) for p, v in b.params.items()}}
            for n, b in doc.templates.items()
        },
        "emissions": {
            n: {"contexts": list(e.contexts), "rows": {k: _dist_out(d) for k, d in e.table.items()}}
            for n, e in doc.emissions.items()
        },
        "agents": {n: _agent_out(a) for n, a in doc.agents.items()},
        "topology": _topology_out(doc.topology),
    }
    if doc.objective is not None:
        o = doc.objective
        out["objective"] = {
            "goal": list(o.goal.goal),
            "context": o.goal.context,
            "lambda": o.lam,
            "cost": {"w_msg": o.cost_model.w_msg, "w_ctx": o.cost_model.w_ctx, "w_depth": o.cost_model.w_depth},
        }
    if doc.mutations:
        out["mutations"] = [_mutation_out(m) for m in doc.mutations]
    out["budgets"] = {"enumeration": doc.enum_budget, "optimizer": doc.opt_budget}
    return out


def serialize_scenario(doc: ScenarioDoc) -> str:
    return json.dumps(to_dict(doc), indent=2, ensure_ascii=False) + "\n"
