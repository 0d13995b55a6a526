"""Command-line entry point.

Standard output carries CSV only; every diagnostic goes to standard error.
Exit codes: 0 success, 2 bad scenario input, 3 enumeration budget
exceeded, 4 strategy touched a handle it does not own, 1 anything else.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .errors import BudgetExceeded, DofViolation, ScenarioError
from .inference import estimate_goal_probability, exact_goal_probability, prefix_probabilities
from .optimize import StrategyKind, collab_cost, optimize_dof
from .report import ResultRow, emit_report, merge_reports
from .scenario import ScenarioDoc, load_scenario, serialize_scenario


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ScenarioError(f"usage: {message}")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="agentcalc", description="Exact and sampled goal probabilities for agent scenarios.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="exact goal probability")
    ev.add_argument("scenario")
    ev.add_argument("--prefixes", action="store_true", help="also print every goal-prefix probability")
    ev.add_argument("--enum-budget", type=_positive)
    ev.add_argument("--timing", action="store_true", help="fill the wall_time column")

    sm = sub.add_parser("sample", help="Monte Carlo estimate of the goal probability")
    sm.add_argument("scenario")
    sm.add_argument("--n", type=_positive, required=True)
    sm.add_argument("--seed", type=int, default=0)
    sm.add_argument("--workers", type=_positive, default=1)
    sm.add_argument("--timing", action="store_true")

    cp = sub.add_parser("compare", help="exact probabilities of several scenarios with one goal")
    cp.add_argument("scenarios", nargs="+")
    cp.add_argument("--enum-budget", type=_positive)
    cp.add_argument("--timing", action="store_true")

    op = sub.add_parser("optimize", help="search declared mutation domains")
    op.add_argument("scenario")
    op.add_argument("--strategy", required=True, choices=[k.value for k in StrategyKind])
    op.add_argument("--budget", type=_positive)
    op.add_argument("--out", help="write the best scenario here")
    op.add_argument("--enum-budget", type=_positive)

    mg = sub.add_parser("report-merge", help="concatenate CSV reports")
    mg.add_argument("reports", nargs="+")
    return p


def _query_id(doc: ScenarioDoc, path: str) -> str:
    return Path(path).stem


def _timed(fn, enabled: bool):
    start = time.perf_counter()
    value = fn()
    return value, (time.perf_counter() - start if enabled else None)


def _eval_rows(doc: ScenarioDoc, path: str, args) -> list[ResultRow]:
    budget = args.enum_budget or doc.enum_budget
    obj = doc.objective
    if obj is None:
        raise ScenarioError(f"{path}: scenario declares no objective")
    qid = _query_id(doc, path)
    cost = collab_cost(doc.topology, obj.cost_model)
    p, elapsed = _timed(lambda: exact_goal_probability(doc.topology, obj.goal, budget), args.timing)
    rows = [ResultRow(qid, "exact", p, None, cost, p - obj.lam * cost, elapsed)]
    if getattr(args, "prefixes", False):
        for k, pk in enumerate(prefix_probabilities(doc.topology, obj.goal, budget), start=1):
            rows.append(ResultRow(f"{qid}[{k}]", "prefix", pk))
    return rows


def _cmd_eval(args) -> str:
    doc = load_scenario(args.scenario)
    return emit_report(_eval_rows(doc, args.scenario, args))


def _cmd_sample(args) -> str:
    doc = load_scenario(args.scenario)
    obj = doc.objective
    if obj is None:
        raise ScenarioError(f"{args.scenario}: scenario declares no objective")
    est, elapsed = _timed(
        lambda: estimate_goal_probability(doc.topology, obj.goal, args.n, args.seed, args.workers), args.timing
    )
    cost = collab_cost(doc.topology, obj.cost_model)
    row = ResultRow(_query_id(doc, args.scenario), "sample", est.mean, est.stderr, cost, est.mean - obj.lam * cost, elapsed)
    return emit_report([row])


def _cmd_compare(args) -> str:
    docs = [load_scenario(p) for p in args.scenarios]
    for path, doc in zip(args.scenarios, docs):
        if doc.objective is None:
            raise ScenarioError(f"{path}: scenario declares no objective")
    first = docs[0].objective.goal
    for path, doc in zip(args.scenarios[1:], docs[1:]):
        if doc.objective.goal != first:
            raise ScenarioError(
                f"{path}: goal {list(doc.objective.goal.goal)} in context {doc.objective.goal.context!r} "
                f"differs from {list(first.goal)} in context {first.context!r}"
            )
    rows = []
    for path, doc in zip(args.scenarios, docs):
        rows.extend(_eval_rows(doc, path, args))
    return emit_report(rows)


def _cmd_optimize(args) -> str:
    doc = load_scenario(args.scenario)
    budget = args.budget or doc.opt_budget
    best, value, log = optimize_dof(doc, args.strategy, budget=budget, enum_budget=args.enum_budget)
    rows = [ResultRow(c.config, "candidate", c.probability, None, c.cost, c.objective) for c in log]
    if args.out:
        Path(args.out).write_text(serialize_scenario(best), encoding="utf-8")
    print(f"best objective {value:.12g}", file=sys.stderr)
    return emit_report(rows)


def _cmd_merge(args) -> str:
    texts = []
    for path in args.reports:
        try:
            texts.append(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ScenarioError(f"cannot read report {path!r}: {exc.strerror}") from None
    return merge_reports(texts)


_COMMANDS = {
    "eval": _cmd_eval,
    "sample": _cmd_sample,
    "compare": _cmd_compare,
    "optimize": _cmd_optimize,
    "report-merge": _cmd_merge,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = _COMMANDS[args.command](args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DofViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SystemExit as exc:
        # --help exits through argparse
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001 - the exit-code contract covers every failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
