"""Report documents: a versioned JSON schema and a plain-text rendering.

Expressions are stored as canonical strings, index tuples 1-based.  Data
values map as follows: Expr -> string, 1-forms -> list of strings, nested
dicts and lists recursively, tensors -> {"components": {"i,j,..": expr}}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .classify import ClassificationReport, Verdict
from .expr import Expr, to_string
from .symbols import SymbolContext
from .tensor import ComponentTensor

SCHEMA_VERSION = 1


def _encode(value: Any) -> Any:
    if isinstance(value, Expr):
        return to_string(value)
    if isinstance(value, ComponentTensor):
        return {"components": {",".join(str(i + 1) for i in k): to_string(v) for k, v in sorted(value.items())}}
    if isinstance(value, dict):
        return {str(k): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    raise TypeError(f"cannot encode {type(value).__name__}")


def encode_verdict(v: Verdict) -> dict:
    out = {"name": v.name, "status": v.status}
    if v.identity:
        out["identity"] = v.identity
    if v.data:
        out["data"] = _encode(v.data)
    if v.witnesses:
        out["witnesses"] = [
            {"index": [i + 1 for i in w.index], "value": to_string(w.value), "context": w.context} for w in v.witnesses
        ]
    if v.flags:
        out["flags"] = list(v.flags)
    if v.note:
        out["note"] = v.note
    return out


@dataclass
class ReportDocument:
    metric: str
    settings: dict[str, Any]
    verdicts: list[dict]
    timing: float | None = None
    schema_version: int = SCHEMA_VERSION
    extras: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_report(cls, rep: ClassificationReport) -> "ReportDocument":
        timing = None if rep.timing is None else round(rep.timing, 3)
        return cls(rep.metric, dict(rep.settings), [encode_verdict(v) for v in rep.verdicts], timing)

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "metric": self.metric,
            "settings": self.settings,
            "verdicts": self.verdicts,
        }
        if self.timing is not None:
            out["timing_seconds"] = self.timing
        if self.extras:
            out["extras"] = self.extras
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        doc = json.loads(text)
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema version {version!r}")
        for key in ("metric", "settings", "verdicts"):
            if key not in doc:
                raise ValueError(f"report lacks {key!r}")
        return cls(doc["metric"], doc["settings"], doc["verdicts"], doc.get("timing_seconds"), version,
                   doc.get("extras", {}))

    def verdict(self, name: str) -> dict:
        for v in self.verdicts:
            if v["name"] == name:
                return v
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [f"metric: {self.metric}"]
        lines.append("settings: " + ", ".join(f"{k}={self.settings[k]}" for k in sorted(self.settings)))
        if self.timing is not None:
            lines.append(f"timing: {self.timing:.3f} s")
        width = max((len(v["name"]) for v in self.verdicts), default=0)
        for v in self.verdicts:
            lines.append(f"{v['name']:<{width}}  {v['status']}")
            if v.get("identity"):
                lines.append(f"    identity: {v['identity']}")
            for k, val in (v.get("data") or {}).items():
                lines.append(f"    {k} = {_text_value(val)}")
            for w in v.get("witnesses", []):
                idx = ",".join(map(str, w["index"]))
                ctx = f"  ({w['context']})" if w.get("context") else ""
                lines.append(f"    witness [{idx}] = {w['value']}{ctx}")
            if v.get("flags"):
                lines.append("    flags: " + ", ".join(v["flags"]))
            if v.get("note"):
                lines.append(f"    note: {v['note']}")
        return "\n".join(lines) + "\n"


def _text_value(val: Any) -> str:
    if isinstance(val, list):
        return "[" + ", ".join(_text_value(v) for v in val) + "]"
    if isinstance(val, dict):
        return "{" + ", ".join(f"{k}: {_text_value(v)}" for k, v in val.items()) + "}"
    return str(val)


def report_context(metric) -> SymbolContext:
    """A context in which every expression string of a report on ``metric`` parses."""
    from .energy import em_context

    return em_context(metric)


def parse_data(value: Any, ctx: SymbolContext) -> Any:
    """Re-parse the expression strings of an encoded data value."""
    if isinstance(value, str):
        return ctx.parse(value)
    if isinstance(value, list):
        return [parse_data(v, ctx) for v in value]
    if isinstance(value, dict):
        if set(value) == {"components"}:
            return {k: ctx.parse(v) for k, v in value["components"].items()}
        return {k: parse_data(v, ctx) for k, v in value.items()}
    return value
