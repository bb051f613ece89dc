"""Command-line interface.

Exit codes: 0 on success, 2 for usage errors (bad flags, unknown labels,
invalid preset parameters), 1 when a domain operation fails; the message
names the operation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Callable, Sequence, TextIO

from . import engine, montecarlo, wager
from .engine import Measure
from .errors import SleepingBeautyError
from .io_formats import emit_report, parse_protocol, parse_rational, render_table, serialize_protocol
from .protocol import PRESETS, ExperimentProtocol, preset

MEASURES = [m.value for m in Measure]


class UsageError(Exception):
    pass


class DomainFailure(Exception):
    def __init__(self, op: str, exc: SleepingBeautyError):
        super().__init__(f"{op} failed: {type(exc).__name__}: {exc}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _call(op: str, fn: Callable, *args):
    try:
        return fn(*args)
    except SleepingBeautyError as exc:
        raise DomainFailure(op, exc) from exc


def _rational_arg(text):
    try:
        return parse_rational(text)
    except SleepingBeautyError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    source = _Parser(add_help=False)
    grp = source.add_argument_group("protocol source")
    grp.add_argument("--preset", choices=sorted(PRESETS))
    grp.add_argument("--k", type=int, help="chain length for --preset chain")
    grp.add_argument("--heads-prob", type=_rational_arg, default=None, metavar="P/Q")
    grp.add_argument("--protocol", type=Path, metavar="PATH", help="protocol JSON document")

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["csv", "md", "markdown", "json"], default="csv")
    common.add_argument("--out", default="-", metavar="PATH", help="output file (default stdout)")

    question = _Parser(add_help=False)
    question.add_argument("--agent")
    question.add_argument("--prop", help="comma-separated outcome labels")

    parser = _Parser(prog="sbeauty", description="Exact and simulated credences for Sleeping Beauty protocols.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("presets", parents=[common], help="list built-in protocols")
    p = sub.add_parser("show", parents=[source, common], help="print the canonical protocol document")

    p = sub.add_parser("credence", parents=[source, common, question], help="exact credences")
    p.add_argument("--measure", choices=MEASURES + ["both"], default="both")

    p = sub.add_parser("simulate", parents=[source, common, question], help="Monte Carlo estimates")
    p.add_argument("--trials", type=_nonneg_int, default=100_000)
    p.add_argument("--seed", type=_nonneg_int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--measure", choices=MEASURES + ["both"], default="both")

    p = sub.add_parser("wager", parents=[source, common, question], help="expected value of a bet")
    p.add_argument("--q", type=_rational_arg, required=True, metavar="P/Q")
    p.add_argument("--stake", type=_rational_arg, default=parse_rational("1"), metavar="P/Q")
    p.add_argument("--settlement", choices=MEASURES + ["both"], default="both")

    p = sub.add_parser("score", parents=[source, common, question], help="Brier score of a constant report")
    p.add_argument("--report", type=_rational_arg, required=True, metavar="P/Q")
    p.add_argument("--measure", choices=MEASURES + ["both"], default="both")

    p = sub.add_parser("sum-check", parents=[source, common], help="sum credences across questions")
    p.add_argument("--measure", choices=MEASURES + ["both"], default="both")
    p.add_argument("--ask", action="append", default=[], metavar="AGENT:LABELS",
                   help="question to include, e.g. SB1:heads (repeatable; default: the protocol's questions)")
    return parser


def _load_protocol(args) -> ExperimentProtocol:
    if (args.preset is None) == (args.protocol is None):
        raise UsageError("exactly one of --preset or --protocol is required")
    if args.protocol is not None:
        if args.k is not None or args.heads_prob is not None:
            raise UsageError("--k and --heads-prob only apply to --preset")
        try:
            text = args.protocol.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {args.protocol}: {exc.strerror}")
        return _call("parse_protocol", parse_protocol, text)
    if args.k is not None and args.preset != "chain":
        raise UsageError("--k only applies to --preset chain")
    kwargs = {} if args.heads_prob is None else {"heads_prob": args.heads_prob}
    try:
        return preset(args.preset, k=args.k, **kwargs)
    except SleepingBeautyError as exc:
        raise UsageError(f"{type(exc).__name__}: {exc}")


def _parse_prop(p: ExperimentProtocol, text: str) -> frozenset[str]:
    labels = frozenset(s.strip() for s in text.split(",") if s.strip())
    if not labels:
        raise UsageError("--prop needs at least one outcome label")
    unknown = labels - set(p.labels)
    if unknown:
        raise UsageError(f"unknown outcome(s) {','.join(sorted(unknown))}; protocol has {','.join(p.labels)}")
    return labels


def _check_agent(p: ExperimentProtocol, agent: str) -> str:
    if agent not in p.agents:
        raise UsageError(f"unknown agent {agent!r}; protocol has {','.join(p.agents)}")
    return agent


def _questions(args, p: ExperimentProtocol) -> list[tuple[str, frozenset[str]]]:
    if args.agent is None and args.prop is None:
        if not p.questions:
            raise UsageError(f"protocol {p.name!r} has no questions; pass --agent and --prop")
        return [(q.agent, q.proposition) for q in p.questions]
    if args.prop is None:
        raise UsageError("--agent requires --prop")
    if args.agent is None:
        if len(p.agents) != 1:
            raise UsageError("--prop requires --agent when the protocol has several agents")
        args.agent = p.agents[0]
    return [(_check_agent(p, args.agent), _parse_prop(p, args.prop))]


def _measures(choice: str) -> list[Measure]:
    # per-awakening first, matching the order results are usually discussed in
    return [Measure.PER_AWAKENING, Measure.PER_EXPERIMENT] if choice == "both" else [Measure(choice)]


def _execute(args, p: ExperimentProtocol | None) -> str:
    fmt = args.format
    if args.command == "presets":
        rows = [{"name": n, "description": d} for n, d in PRESETS.items()]
        return render_table(("name", "description"), rows, fmt)
    if args.command == "show":
        return serialize_protocol(p)

    if args.command == "sum-check":
        if args.ask:
            qs = []
            for spec in args.ask:
                agent, sep, labels = spec.partition(":")
                if not sep:
                    raise UsageError(f"--ask expects AGENT:LABELS, got {spec!r}")
                qs.append((_check_agent(p, agent), _parse_prop(p, labels)))
        elif p.questions:
            qs = [(q.agent, q.proposition) for q in p.questions]
        else:
            raise UsageError(f"protocol {p.name!r} has no questions; pass --ask")
        checks = [_call("credence_sum_check", engine.credence_sum_check, p, qs, m) for m in _measures(args.measure)]
        return emit_report(checks, fmt)

    qs = _questions(args, p)
    if args.command == "credence":
        reports = [
            _call(f"{m.value}_credence", engine.credence, p, agent, prop, m)
            for m in _measures(args.measure) for agent, prop in qs
        ]
        return emit_report(reports, fmt)

    if args.command == "simulate":
        if args.workers < 1:
            raise UsageError(f"--workers must be >= 1, got {args.workers}")
        if args.seed >= 1 << 64:
            raise UsageError("--seed must be below 2**64")
        result = _call("run_trials", montecarlo.run_trials, p, args.trials, args.seed, args.workers)
        estimates = [
            _call("estimate_credence", montecarlo.estimate_credence, result, p, agent, prop, m)
            for m in _measures(args.measure) for agent, prop in qs
        ]
        title = f"simulate {p.name}: trials={result.trials} seed={result.seed}"
        return emit_report(estimates, fmt, title=title)

    if args.command == "wager":
        try:
            specs = [
                wager.WagerSpec(agent, prop, args.stake, args.q, s)
                for s in _measures(args.settlement) for agent, prop in qs
            ]
        except SleepingBeautyError as exc:
            raise UsageError(str(exc))
        outcomes = [_call("evaluate_wager", wager.evaluate_wager, p, w) for w in specs]
        return emit_report(outcomes, fmt)

    if args.command == "score":
        if not 0 <= args.report <= 1:
            raise UsageError(f"--report must lie in [0, 1], got {args.report}")
        scores = [
            _call("brier_score", wager.score_report, p, agent, prop, args.report, m)
            for m in _measures(args.measure) for agent, prop in qs
        ]
        return emit_report(scores, fmt)
    raise UsageError(f"unknown command {args.command!r}")


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        p = None if args.command == "presets" else _load_protocol(args)
        text = _execute(args, p)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except DomainFailure as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    if args.out == "-":
        stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
