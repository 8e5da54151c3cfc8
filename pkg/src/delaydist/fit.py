"""Empirical CDFs and Pearson-correlation comparison of the two delay models."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .decompose import PathModel, min_delay_by_size, path_model_from_points, variable_component
from .errors import ConstantVector, LengthMismatch, TooFewSamples
from .models import ExponentialDelayModel, Family, TruncatedNormalDelayModel
from .trace import DelayTrace, TraceSummary, summarize

MIN_FIT_SAMPLES = 10


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Distinct sorted delays with Hazen plotting positions (i - 0.5) / n.

    Tied delays collapse onto one point holding the highest rank among them.
    """

    delays: np.ndarray
    probs: np.ndarray
    n: int

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.delays.tolist(), self.probs.tolist()))

    def __len__(self):
        return len(self.delays)


def empirical_cdf_from_values(values: Sequence[float]) -> EmpiricalCdf:
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 2:
        raise TooFewSamples(f"need at least 2 delivered samples, got {n}")
    vals, counts = np.unique(x, return_counts=True)
    probs = (np.cumsum(counts) - 0.5) / n
    vals.flags.writeable = False
    probs.flags.writeable = False
    return EmpiricalCdf(vals, probs, n)


def empirical_cdf(trace: DelayTrace) -> EmpiricalCdf:
    return empirical_cdf_from_values(trace.delays())


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise LengthMismatch("need at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = math.fsum(dx * dx)
    syy = math.fsum(dy * dy)
    if sxx == 0 or syy == 0:
        raise ConstantVector("correlation undefined for a constant vector")
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def score_model(ecdf: EmpiricalCdf, model_cdf: Callable[[float], float]) -> float:
    """Correlation between empirical and model CDF at the empirical abscissae."""
    model = [model_cdf(d) for d in ecdf.delays.tolist()]
    return pearson(ecdf.probs, model)


class FitInput(NamedTuple):
    """What the models are fitted to, after any size reduction."""

    trace: DelayTrace
    summary: TraceSummary
    path_model: PathModel | None
    clamped: int


def reduce_for_fit(trace: DelayTrace) -> FitInput:
    """Single-size traces pass through; mixed sizes lose their fixed delay.

    For mixed sizes the per-size minima give a path model, each delivered
    delay is replaced by its variable component, and the models are fitted
    with location 0 and the mean variable delay.
    """
    sizes = trace.sizes()
    if len(sizes) <= 1:
        return FitInput(trace, summarize(trace), None, 0)
    path = path_model_from_points(min_delay_by_size(trace))
    reduced, clamped = variable_component(trace, path)
    delays = reduced.delays()
    summary = TraceSummary(
        size_bytes=None,
        n_ok=len(delays),
        n_lost=reduced.n_lost,
        d_min_us=0.0,
        d_av_us=math.fsum(delays) / len(delays),
    )
    return FitInput(reduced, summary, path, clamped)


@dataclass(frozen=True)
class FitReport:
    k_nor: float
    k_exp: float
    exp_model: ExponentialDelayModel
    nor_model: TruncatedNormalDelayModel
    selected: Family
    n_samples: int
    loss_rate: float
    summary: TraceSummary
    path_model: PathModel | None = None
    clamped: int = 0

    def __post_init__(self):
        expected = Family.EXPONENTIAL if self.k_exp >= self.k_nor else Family.TRUNCATED_NORMAL
        if self.selected is not expected:
            raise ValueError(f"selected={self.selected} disagrees with K values")


def compare_models(trace: DelayTrace, *, min_samples: int = MIN_FIT_SAMPLES) -> FitReport:
    n_ok = trace.n_ok
    if n_ok < min_samples:
        raise TooFewSamples(f"need at least {min_samples} delivered samples, got {n_ok}")
    fi = reduce_for_fit(trace)
    s = fi.summary
    exp_model = ExponentialDelayModel.from_moments(s.d_min_us, s.d_av_us)
    nor_model = TruncatedNormalDelayModel.from_moments(s.d_min_us, s.d_av_us)
    ecdf = empirical_cdf(fi.trace)
    k_exp = score_model(ecdf, exp_model.cdf)
    k_nor = score_model(ecdf, nor_model.cdf)
    # ties go to the exponential
    selected = Family.EXPONENTIAL if k_exp >= k_nor else Family.TRUNCATED_NORMAL
    return FitReport(
        k_nor=k_nor,
        k_exp=k_exp,
        exp_model=exp_model,
        nor_model=nor_model,
        selected=selected,
        n_samples=n_ok,
        loss_rate=trace.loss_rate,
        summary=s,
        path_model=fi.path_model,
        clamped=fi.clamped,
    )


class OverlayRow(NamedTuple):
    delay_us: float
    f_emp: float
    f_nor: float
    f_exp: float


OVERLAY_HEADER = ("delay_us", "F_emp", "F_nor", "F_exp")


def cdf_overlay(
    trace: DelayTrace, exp_model: ExponentialDelayModel, nor_model: TruncatedNormalDelayModel
) -> list[OverlayRow]:
    ecdf = empirical_cdf(trace)
    return [
        OverlayRow(d, p, nor_model.cdf(d), exp_model.cdf(d))
        for d, p in ecdf.points()
    ]


def format_overlay_tsv(rows: Sequence[OverlayRow]) -> str:
    lines = ["\t".join(OVERLAY_HEADER)]
    for r in rows:
        lines.append(f"{r.delay_us:.3f}\t{r.f_emp:.9f}\t{r.f_nor:.9f}\t{r.f_exp:.9f}")
    return "\n".join(lines) + "\n"


def write_overlay_tsv(rows: Sequence[OverlayRow], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(format_overlay_tsv(rows))
