"""Protocol documents and report rendering.

Protocol documents are JSON objects with keys in this fixed order::

    format, name, outcomes, agents, schedules, questions

Probabilities are strings ``"p/q"`` or ``"p"``; decimal floats are rejected
so that files carry exact values. :func:`serialize_protocol` is canonical:
reduced rationals, fixed key order, 2-space indentation, trailing newline.
"""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction
from typing import Any, Sequence

from .engine import CredenceReport, SumCheck, format_proposition, render_decimal
from .errors import EmptyReport, ProtocolSyntaxError, RationalFormatError
from .montecarlo import CredenceEstimate
from .protocol import (
    AwakeningSchedule,
    ExperimentProtocol,
    OutcomeSpec,
    Question,
    ValidatedProtocol,
    validate_protocol,
)
from .wager import ScoreReport, WagerOutcome

FORMAT_VERSION = 1
FORMATS = ("csv", "md", "markdown", "json")
_RATIONAL = re.compile(r"-?[0-9]+(/[0-9]+)?")
_DOC_KEYS = ("format", "name", "outcomes", "agents", "schedules", "questions")


def parse_rational(text: str, where: str = "value") -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` exactly; anything else raises."""
    if not isinstance(text, str):
        raise RationalFormatError(
            f"expected a rational string like \"1/2\", got {json.dumps(text)}", where
        )
    s = text.strip()
    if not _RATIONAL.fullmatch(s):
        hint = ""
        try:
            hint = f'; write "{Fraction(s)}" instead' if "." in s or "e" in s.lower() else ""
        except ValueError:
            pass
        raise RationalFormatError(f"{text!r} is not of the form p/q{hint}", where)
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise RationalFormatError(f"{text!r} has a zero denominator", where)
    return Fraction(int(num), int(den) if den else 1)


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


# -- protocol documents -----------------------------------------------------


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ProtocolSyntaxError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _expect(value, kind, path: str):
    if not isinstance(value, kind) or isinstance(value, bool):
        name = {dict: "an object", list: "a list", str: "a string"}.get(kind, kind.__name__)
        raise ProtocolSyntaxError(f"expected {name}, got {json.dumps(value)[:40]}", path)
    return value


def _strings(value, path: str) -> list[str]:
    return [_expect(v, str, f"{path}[{i}]") for i, v in enumerate(_expect(value, list, path))]


def parse_protocol(text: str) -> ExperimentProtocol:
    """Parse and validate a protocol document."""
    if not text or not text.strip():
        raise ProtocolSyntaxError("empty document", "line 1")
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ProtocolSyntaxError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    _expect(doc, dict, "$")

    unknown = [k for k in doc if k not in _DOC_KEYS]
    if unknown:
        raise ProtocolSyntaxError(f"unknown key {unknown[0]!r}", f"$.{unknown[0]}")
    for key in ("name", "outcomes", "agents", "schedules"):
        if key not in doc:
            raise ProtocolSyntaxError(f"missing required key {key!r}", "$")
    if "format" in doc and doc["format"] != FORMAT_VERSION:
        raise ProtocolSyntaxError(f"unsupported format {doc['format']!r}", "$.format")

    name = _expect(doc["name"], str, "$.name")
    outcomes = []
    for i, o in enumerate(_expect(doc["outcomes"], list, "$.outcomes")):
        path = f"$.outcomes[{i}]"
        _expect(o, dict, path)
        if set(o) != {"label", "prob"}:
            raise ProtocolSyntaxError("outcome needs exactly the keys 'label' and 'prob'", path)
        label = _expect(o["label"], str, f"{path}.label")
        outcomes.append(OutcomeSpec(label, parse_rational(o["prob"], f"{path}.prob")))

    agents = _strings(doc["agents"], "$.agents")

    raw_sched = _expect(doc["schedules"], dict, "$.schedules")
    schedules = []
    for agent, per in raw_sched.items():
        path = f"$.schedules.{agent}"
        per = _expect(per, dict, path)
        schedules.append(
            AwakeningSchedule(agent, {o: tuple(_strings(days, f"{path}.{o}")) for o, days in per.items()})
        )
    # canonical order: declared agents first, strays after (validation rejects them)
    rank = {a: i for i, a in enumerate(agents)}
    schedules.sort(key=lambda s: rank.get(s.agent, len(rank)))

    questions = []
    for i, q in enumerate(_expect(doc.get("questions", []), list, "$.questions")):
        path = f"$.questions[{i}]"
        _expect(q, dict, path)
        if set(q) != {"agent", "proposition"}:
            raise ProtocolSyntaxError("question needs exactly the keys 'agent' and 'proposition'", path)
        agent = _expect(q["agent"], str, f"{path}.agent")
        questions.append(Question(agent, frozenset(_strings(q["proposition"], f"{path}.proposition"))))

    p = ExperimentProtocol(name, tuple(outcomes), tuple(agents), tuple(schedules), tuple(questions))
    validate_protocol(p)
    return p


def protocol_document(p: ExperimentProtocol | ValidatedProtocol) -> dict[str, Any]:
    p = validate_protocol(p, warn=False).protocol
    order = {label: i for i, label in enumerate(p.labels)}

    def ordered(prop):
        return sorted(prop, key=lambda o: (order.get(o, len(order)), o))

    return {
        "format": FORMAT_VERSION,
        "name": p.name,
        "outcomes": [{"label": o.label, "prob": format_rational(o.prob)} for o in p.outcomes],
        "agents": list(p.agents),
        "schedules": {
            a: {o: list(p.schedule(a).days(o)) for o in p.labels} for a in p.agents
        },
        "questions": [{"agent": q.agent, "proposition": ordered(q.proposition)} for q in p.questions],
    }


def serialize_protocol(p: ExperimentProtocol | ValidatedProtocol) -> str:
    return json.dumps(protocol_document(p), indent=2, ensure_ascii=False) + "\n"


# -- reports ----------------------------------------------------------------

CREDENCE_COLUMNS = ("protocol", "agent", "proposition", "measure", "value_exact", "value_decimal")
ESTIMATE_COLUMNS = ("stderr", "ci_lo", "ci_hi", "trials", "seed")
SUM_COLUMNS = ("protocol", "measure", "questions", "sum_exact", "sum_decimal", "verdict")
WAGER_COLUMNS = (
    "protocol", "agent", "proposition", "settlement", "stake", "q",
    "ev_per_experiment", "ev_per_settlement", "ev_decimal", "breakeven", "breakeven_q",
)
SCORE_COLUMNS = (
    "protocol", "agent", "proposition", "measure", "report",
    "score_exact", "score_decimal", "minimizer", "min_score",
)


def _float(x: float) -> str:
    return f"{x:.6f}"


def _credence_row(r) -> dict[str, str]:
    if isinstance(r, CredenceEstimate):
        return {
            "protocol": r.protocol, "agent": r.agent,
            "proposition": format_proposition(r.proposition), "measure": r.measure.value,
            "value_exact": format_rational(r.frequency), "value_decimal": _float(r.point),
            "stderr": _float(r.stderr), "ci_lo": _float(r.ci95[0]), "ci_hi": _float(r.ci95[1]),
            "trials": str(r.trials), "seed": str(r.seed),
        }
    return {
        "protocol": r.protocol, "agent": r.agent,
        "proposition": format_proposition(r.proposition), "measure": r.measure.value,
        "value_exact": format_rational(r.value), "value_decimal": r.decimal,
    }


def _sum_row(s: SumCheck) -> dict[str, str]:
    qs = ";".join(f"{a}:{format_proposition(prop)}" for a, prop in s.questions)
    return {
        "protocol": s.protocol, "measure": s.measure.value, "questions": qs,
        "sum_exact": format_rational(s.sum), "sum_decimal": render_decimal(s.sum),
        "verdict": s.verdict.value,
    }


def _wager_row(w: WagerOutcome) -> dict[str, str]:
    spec = w.wager
    return {
        "protocol": w.protocol, "agent": spec.agent,
        "proposition": format_proposition(spec.proposition), "settlement": spec.settlement.value,
        "stake": format_rational(spec.stake), "q": format_rational(spec.implied_probability),
        "ev_per_experiment": format_rational(w.expected_value_per_experiment),
        "ev_per_settlement": format_rational(w.expected_value_per_settlement),
        "ev_decimal": render_decimal(w.expected_value_per_experiment),
        "breakeven": "true" if w.breakeven else "false",
        "breakeven_q": "" if w.breakeven_probability is None else format_rational(w.breakeven_probability),
    }


def _score_row(s: ScoreReport) -> dict[str, str]:
    return {
        "protocol": s.protocol, "agent": s.agent, "proposition": format_proposition(s.proposition),
        "measure": s.measure.value, "report": format_rational(s.report),
        "score_exact": format_rational(s.score), "score_decimal": render_decimal(s.score),
        "minimizer": format_rational(s.minimizer), "min_score": format_rational(s.minimum),
    }


def _json_item(item) -> dict[str, Any]:
    if isinstance(item, CredenceEstimate):
        return {
            "kind": "credence_estimate", "protocol": item.protocol, "agent": item.agent,
            "proposition": sorted(item.proposition), "measure": item.measure.value,
            "point": item.point, "stderr": item.stderr, "ci95": list(item.ci95),
            "n_effective": item.n_effective, "hits": item.hits,
            "trials": item.trials, "seed": item.seed,
        }
    if isinstance(item, CredenceReport):
        return {
            "kind": "credence_report", "protocol": item.protocol, "agent": item.agent,
            "proposition": sorted(item.proposition), "measure": item.measure.value,
            "value": format_rational(item.value), "decimal": item.decimal,
        }
    if isinstance(item, SumCheck):
        return {
            "kind": "sum_check", "protocol": item.protocol, "measure": item.measure.value,
            "questions": [{"agent": a, "proposition": sorted(prop)} for a, prop in item.questions],
            "sum": format_rational(item.sum), "verdict": item.verdict.value,
        }
    if isinstance(item, WagerOutcome):
        w = item.wager
        return {
            "kind": "wager_outcome", "protocol": item.protocol,
            "wager": {
                "agent": w.agent, "proposition": sorted(w.proposition),
                "stake": format_rational(w.stake),
                "implied_probability": format_rational(w.implied_probability),
                "settlement": w.settlement.value,
            },
            "expected_value_per_experiment": format_rational(item.expected_value_per_experiment),
            "expected_value_per_settlement": format_rational(item.expected_value_per_settlement),
            "breakeven": item.breakeven,
            "breakeven_probability": None if item.breakeven_probability is None
            else format_rational(item.breakeven_probability),
        }
    if isinstance(item, ScoreReport):
        return {
            "kind": "score_report", "protocol": item.protocol, "agent": item.agent,
            "proposition": sorted(item.proposition), "measure": item.measure.value,
            "report": format_rational(item.report), "score": format_rational(item.score),
            "minimizer": format_rational(item.minimizer), "minimum": format_rational(item.minimum),
        }
    raise TypeError(f"cannot render {type(item).__name__}")


def _table(items: Sequence) -> tuple[tuple[str, ...], list[dict[str, str]]]:
    if all(isinstance(i, (CredenceReport, CredenceEstimate)) for i in items):
        cols = CREDENCE_COLUMNS
        if any(isinstance(i, CredenceEstimate) for i in items):
            cols = cols + ESTIMATE_COLUMNS
        return cols, [_credence_row(i) for i in items]
    for kind, cols, row in (
        (SumCheck, SUM_COLUMNS, _sum_row),
        (WagerOutcome, WAGER_COLUMNS, _wager_row),
        (ScoreReport, SCORE_COLUMNS, _score_row),
    ):
        if all(isinstance(i, kind) for i in items):
            return cols, [row(i) for i in items]
    raise TypeError("a report must hold items of a single kind")


def render_table(columns: Sequence[str], rows: Sequence[dict[str, str]], fmt: str,
                 title: str | None = None) -> str:
    """Render rows of strings as csv, markdown or json."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(columns), restval="", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    if fmt in ("md", "markdown"):
        def line(cells):
            return "| " + " | ".join(str(c).replace("|", "\\|") for c in cells) + " |"
        out = [f"**{title}**", ""] if title else []
        out.append(line(columns))
        out.append("|" + "|".join("---" for _ in columns) + "|")
        out.extend(line(r.get(c, "") for c in columns) for r in rows)
        return "\n".join(out) + "\n"
    if fmt == "json":
        return json.dumps({"title": title, "items": list(rows)}, indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def emit_report(items: Sequence, fmt: str = "csv", title: str | None = None) -> str:
    """Render credence reports, estimates, sum checks, wagers or scores.

    csv and markdown share one table layout; json mirrors the domain types.
    """
    items = list(items)
    if not items:
        raise EmptyReport("nothing to report")
    if fmt == "json":
        return render_table((), [_json_item(i) for i in items], "json", title)
    cols, rows = _table(items)
    return render_table(cols, rows, fmt, title)


__all__ = [
    "FORMATS",
    "emit_report",
    "format_rational",
    "parse_protocol",
    "parse_rational",
    "protocol_document",
    "render_table",
    "serialize_protocol",
]
