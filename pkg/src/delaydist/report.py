"""Versioned JSON report document and the aligned-text fit table."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from . import __version__
from .fit import FitReport
from .models import quantile

SCHEMA_VERSION = 1

_NUM = {"type": "number"}
_MODEL_EXP = {"type": "object", "required": ["d_min_us", "lambda_per_us"]}
_MODEL_NOR = {"type": "object", "required": ["d_min_us", "sigma_us", "implied_mean_us"]}

# JSON Schema (draft 2020-12) for ReportDocument.to_json output
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "tool", "trace", "summary", "fit", "path_model", "headroom"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "tool": {"type": "object", "required": ["name", "version"]},
        "trace": {
            "type": "object",
            "required": ["source", "target", "delay_kind", "tool", "sizes", "n_ok", "n_lost"],
            "properties": {
                "delay_kind": {"enum": ["RTT", "OWD"]},
                "sizes": {"type": "array", "items": {"type": "integer"}},
                "n_ok": {"type": "integer", "minimum": 0},
                "n_lost": {"type": "integer", "minimum": 0},
            },
        },
        "summary": {
            "type": "object",
            "required": ["size_bytes", "n_ok", "n_lost", "d_min_us", "d_av_us"],
            "properties": {"d_min_us": _NUM, "d_av_us": _NUM,
                           "size_bytes": {"type": ["integer", "null"]}},
        },
        "fit": {
            "type": ["object", "null"],
            "required": ["k_nor", "k_exp", "selected", "n_samples", "loss_rate", "clamped",
                         "exp_model", "nor_model"],
            "properties": {
                "k_nor": {"type": "number", "minimum": -1, "maximum": 1},
                "k_exp": {"type": "number", "minimum": -1, "maximum": 1},
                "selected": {"enum": ["Exponential", "TruncatedNormal"]},
                "loss_rate": {"type": "number", "minimum": 0, "maximum": 1},
                "exp_model": _MODEL_EXP,
                "nor_model": _MODEL_NOR,
            },
        },
        "path_model": {
            "type": ["object", "null"],
            "required": ["d_min_us", "capacity_bytes_per_us", "method", "negative_dmin"],
        },
        "headroom": {
            "type": "array",
            "items": {"type": "object", "required": ["p", "delay_us"],
                      "properties": {"p": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                                     "delay_us": _NUM}},
        },
    },
}


@dataclass
class ReportDocument:
    trace: dict[str, Any]
    summary: dict[str, Any]
    fit: dict[str, Any] | None = None
    path_model: dict[str, Any] | None = None
    headroom: list[dict[str, float]] = field(default_factory=list)
    tool: dict[str, str] = field(default_factory=lambda: {"name": "delaydist", "version": __version__})
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ReportDocument:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {data.get('schema_version')!r}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ReportDocument:
        return cls.from_dict(json.loads(text))


def trace_info(trace) -> dict[str, Any]:
    md = trace.metadata
    return {
        "source": md.source,
        "target": md.target,
        "delay_kind": md.delay_kind.value,
        "tool": md.tool,
        "sizes": trace.sizes(),
        "n_ok": trace.n_ok,
        "n_lost": trace.n_lost,
    }


def summary_info(s) -> dict[str, Any]:
    return {
        "size_bytes": s.size_bytes,
        "n_ok": s.n_ok,
        "n_lost": s.n_lost,
        "d_min_us": float(s.d_min_us),
        "d_av_us": float(s.d_av_us),
    }


def path_info(p) -> dict[str, Any] | None:
    if p is None:
        return None
    return {
        "d_min_us": p.d_min_us,
        "capacity_bytes_per_us": p.capacity_bytes_per_us,
        "method": p.method,
        "negative_dmin": p.negative_dmin,
    }


def fit_info(r: FitReport) -> dict[str, Any]:
    return {
        "k_nor": r.k_nor,
        "k_exp": r.k_exp,
        "selected": r.selected.value,
        "n_samples": r.n_samples,
        "loss_rate": r.loss_rate,
        "clamped": r.clamped,
        "exp_model": {"d_min_us": r.exp_model.d_min_us, "lambda_per_us": r.exp_model.lambda_per_us},
        "nor_model": {
            "d_min_us": r.nor_model.d_min_us,
            "sigma_us": r.nor_model.sigma_us,
            # half-normal mean implied by sigma; differs from the fitted d_av
            "implied_mean_us": r.nor_model.mean_us,
        },
    }


def headroom_rows(model, percentiles: Sequence[float], w_bytes=None) -> list[dict[str, float]]:
    return [{"p": p, "delay_us": quantile(model, p, w_bytes)} for p in sorted(percentiles)]


def build_fit_report(trace, report: FitReport, percentiles: Sequence[float] = ()) -> ReportDocument:
    return ReportDocument(
        trace=trace_info(trace),
        summary=summary_info(report.summary),
        fit=fit_info(report),
        path_model=path_info(report.path_model),
        headroom=headroom_rows(report.exp_model, percentiles),
    )


def format_fit_table(rows: Sequence[tuple[str, str, float, float, str]]) -> str:
    """Rows of (host, W, K_nor, K_exp, selected) as an aligned table, K to 2 decimals."""
    header = ("host", "W (bytes)", "K_nor", "K_exp", "selected")
    body = [(h, str(w), f"{kn:.2f}", f"{ke:.2f}", sel) for h, w, kn, ke, sel in rows]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header, *body]]
    return "\n".join(lines) + "\n"
