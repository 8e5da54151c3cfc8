"""Fixed-delay law D_fixed(W) = d_min + W/C and the variable delay component."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import EqualSizes, NegativeDminWarning, NoSamples, NonPositiveCapacity
from .trace import DelaySample, DelayTrace


@dataclass(frozen=True)
class PathModel:
    """Minimum delay at zero size plus end-to-end capacity in bytes/µs.

    ``d_min_us`` may come out negative when fitted from noisy minima on a
    short path; such models carry ``negative_dmin=True`` instead of failing.
    """

    d_min_us: float
    capacity_bytes_per_us: float
    method: str = "two-point"

    def __post_init__(self):
        if not self.capacity_bytes_per_us > 0:
            raise NonPositiveCapacity(f"capacity must be > 0, got {self.capacity_bytes_per_us}")

    @property
    def negative_dmin(self) -> bool:
        return self.d_min_us < 0

    def fixed_delay(self, size_bytes: float) -> float:
        return self.d_min_us + size_bytes / self.capacity_bytes_per_us


@dataclass(frozen=True)
class SizeDelayPoint:
    size_bytes: int
    min_delay_us: float

    def __post_init__(self):
        if self.size_bytes < 1:
            raise ValueError(f"size_bytes must be >= 1, got {self.size_bytes}")
        if not self.min_delay_us > 0:
            raise ValueError(f"min_delay_us must be > 0, got {self.min_delay_us}")


def _flag_negative(model: PathModel) -> PathModel:
    if model.negative_dmin:
        warnings.warn(
            f"fitted d_min is negative ({model.d_min_us:.3f} us)", NegativeDminWarning, stacklevel=3
        )
    return model


def min_delay_by_size(trace: DelayTrace) -> list[SizeDelayPoint]:
    mins: dict[int, int] = {}
    for s in trace.samples:
        if s.lost:
            continue
        cur = mins.get(s.size_bytes)
        if cur is None or s.delay_us < cur:
            mins[s.size_bytes] = s.delay_us
    if not mins:
        raise NoSamples("trace has no delivered samples")
    return [SizeDelayPoint(w, d) for w, d in sorted(mins.items())]


def two_point_path_model(p1: SizeDelayPoint, p2: SizeDelayPoint) -> PathModel:
    w1, d1 = p1.size_bytes, p1.min_delay_us
    w2, d2 = p2.size_bytes, p2.min_delay_us
    if w1 == w2:
        raise EqualSizes(f"both points have size {w1}")
    if (d2 - d1) * (w2 - w1) <= 0:
        raise NonPositiveCapacity(
            f"minimum delay does not grow with size ({w1} B: {d1} us, {w2} B: {d2} us)"
        )
    d_min = (w2 * d1 - w1 * d2) / (w2 - w1)
    capacity = (w2 - w1) / (d2 - d1)
    return _flag_negative(PathModel(d_min, capacity, "two-point"))


def regression_path_model(points: Sequence[SizeDelayPoint]) -> PathModel:
    """Least-squares line through (size, min delay); intercept is d_min, 1/slope is C."""
    sizes = [p.size_bytes for p in points]
    if len(set(sizes)) < 2:
        raise EqualSizes(f"need at least two distinct sizes, got {sorted(set(sizes))}")
    n = len(points)
    w_mean = math.fsum(sizes) / n
    d_mean = math.fsum(p.min_delay_us for p in points) / n
    sxx = math.fsum((p.size_bytes - w_mean) ** 2 for p in points)
    sxy = math.fsum((p.size_bytes - w_mean) * (p.min_delay_us - d_mean) for p in points)
    slope = sxy / sxx
    if slope <= 0:
        raise NonPositiveCapacity(f"fitted slope {slope} us/byte is not positive")
    return _flag_negative(PathModel(d_mean - slope * w_mean, 1.0 / slope, "regression"))


def path_model_from_points(points: Sequence[SizeDelayPoint]) -> PathModel:
    """Two-point formula for exactly two sizes, regression for more."""
    if len(points) == 2:
        return two_point_path_model(points[0], points[1])
    return regression_path_model(points)


class VariableComponent(NamedTuple):
    trace: DelayTrace
    clamped: int


def variable_component(trace: DelayTrace, model: PathModel) -> VariableComponent:
    """Subtract the fixed delay from each delivered sample.

    Residuals are rounded half up to whole µs; those below zero are clamped
    to zero and counted.
    """
    clamped = 0
    out = []
    for s in trace.samples:
        if s.lost:
            out.append(s)
            continue
        resid = math.floor(s.delay_us - model.fixed_delay(s.size_bytes) + 0.5)
        if resid < 0:
            clamped += 1
            resid = 0
        out.append(DelaySample(s.seq, resid, s.size_bytes))
    return VariableComponent(trace.with_samples(out), clamped)
