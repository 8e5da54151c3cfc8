"""Candidate delay distributions: exponential and half-normal above d_min.

Both are parameterised from the minimum and mean delay only:

    exponential      F(d) = 1 - exp(-lam (d - d_min)),    lam = 1 / (d_av - d_min)
    truncated normal F(d) = erf((d - d_min) / (sigma sqrt 2)), sigma = d_av - d_min

The truncated normal keeps sigma equal to the mean excess even though a
half-normal with that scale has mean d_min + sigma sqrt(2/pi); reports expose
the implied mean so the mismatch is visible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import BadProbability, DegenerateScale
from .trace import TraceSummary

SQRT2 = math.sqrt(2.0)


class Family(str, Enum):
    EXPONENTIAL = "Exponential"
    TRUNCATED_NORMAL = "TruncatedNormal"


def _excess(d_min_us: float, d_av_us: float) -> float:
    excess = d_av_us - d_min_us
    if not excess > 0:
        raise DegenerateScale(
            f"mean delay {d_av_us} does not exceed minimum {d_min_us}; no spread to fit"
        )
    return excess


@dataclass(frozen=True)
class ExponentialDelayModel:
    d_min_us: float
    lambda_per_us: float

    def __post_init__(self):
        if not self.lambda_per_us > 0:
            raise ValueError(f"lambda_per_us must be > 0, got {self.lambda_per_us}")

    @classmethod
    def from_moments(cls, d_min_us: float, d_av_us: float) -> ExponentialDelayModel:
        return cls(float(d_min_us), 1.0 / _excess(d_min_us, d_av_us))

    @property
    def location(self) -> float:
        return self.d_min_us

    @property
    def mean_us(self) -> float:
        return self.d_min_us + 1.0 / self.lambda_per_us

    def cdf(self, d_us: float) -> float:
        return cdf_exponential(self, d_us)

    def quantile(self, p: float) -> float:
        return quantile(self, p)


@dataclass(frozen=True)
class TruncatedNormalDelayModel:
    d_min_us: float
    sigma_us: float

    def __post_init__(self):
        if not self.sigma_us > 0:
            raise ValueError(f"sigma_us must be > 0, got {self.sigma_us}")

    @classmethod
    def from_moments(cls, d_min_us: float, d_av_us: float) -> TruncatedNormalDelayModel:
        return cls(float(d_min_us), float(_excess(d_min_us, d_av_us)))

    @property
    def location(self) -> float:
        return self.d_min_us

    @property
    def mean_us(self) -> float:
        """Mean of the half-normal itself, not the d_av it was fitted from."""
        return self.d_min_us + self.sigma_us * math.sqrt(2.0 / math.pi)

    def cdf(self, d_us: float) -> float:
        return cdf_truncated_normal(self, d_us)

    def quantile(self, p: float) -> float:
        return quantile(self, p)


@dataclass(frozen=True)
class SizeAwareExponentialModel:
    d_min_us: float
    capacity_bytes_per_us: float
    lambda_per_us: float

    def __post_init__(self):
        if not self.lambda_per_us > 0:
            raise ValueError(f"lambda_per_us must be > 0, got {self.lambda_per_us}")
        if not self.capacity_bytes_per_us > 0:
            raise ValueError(f"capacity must be > 0, got {self.capacity_bytes_per_us}")

    def location(self, w_bytes: float) -> float:
        return self.d_min_us + w_bytes / self.capacity_bytes_per_us

    def at_size(self, w_bytes: float) -> ExponentialDelayModel:
        return ExponentialDelayModel(self.location(w_bytes), self.lambda_per_us)

    def cdf(self, d_us: float, w_bytes: float) -> float:
        return cdf_size_aware(self, d_us, w_bytes)


def fit_exponential(summary: TraceSummary) -> ExponentialDelayModel:
    return ExponentialDelayModel.from_moments(summary.d_min_us, summary.d_av_us)


def fit_truncated_normal(summary: TraceSummary) -> TruncatedNormalDelayModel:
    return TruncatedNormalDelayModel.from_moments(summary.d_min_us, summary.d_av_us)


def cdf_exponential(m: ExponentialDelayModel, d_us: float) -> float:
    x = d_us - m.d_min_us
    if x <= 0:
        return 0.0
    return -math.expm1(-m.lambda_per_us * x)


def cdf_truncated_normal(m: TruncatedNormalDelayModel, d_us: float) -> float:
    x = d_us - m.d_min_us
    if x <= 0:
        return 0.0
    return math.erf(x / (m.sigma_us * SQRT2))


def cdf_size_aware(m: SizeAwareExponentialModel, d_us: float, w_bytes: float) -> float:
    if w_bytes < 0:
        raise ValueError(f"w_bytes must be >= 0, got {w_bytes}")
    return cdf_exponential(m.at_size(w_bytes), d_us)


def erfinv(y: float) -> float:
    """Inverse error function on [0, 1).

    Starting point from Giles' single-precision rational approximation,
    refined by Newton steps on erf (or erfc near 1, where erf saturates).
    """
    if y < 0:
        return -erfinv(-y)
    if y == 0:
        return 0.0
    if y >= 1:
        raise ValueError("erfinv is unbounded at 1")
    w = -math.log((1.0 - y) * (1.0 + y))
    if w < 5.0:
        w -= 2.5
        p = 2.81022636e-08
        for c in (3.43273939e-07, -3.5233877e-06, -4.39150654e-06, 0.00021858087,
                  -0.00125372503, -0.00417768164, 0.246640727, 1.50140941):
            p = c + p * w
    else:
        w = math.sqrt(w) - 3.0
        p = -0.000200214257
        for c in (0.000100950558, 0.00134934322, -0.00367342844, 0.00573950773,
                  -0.0076224613, 0.00943887047, 1.00167406, 2.83297682):
            p = c + p * w
    x = p * y
    tail = 1.0 - y
    for _ in range(50):
        deriv = 2.0 / math.sqrt(math.pi) * math.exp(-x * x)
        if y < 0.5:
            step = (math.erf(x) - y) / deriv
        else:
            step = (tail - math.erfc(x)) / deriv
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _check_p(p: float) -> None:
    if not 0.0 <= p < 1.0:
        raise BadProbability(f"probability must lie in [0, 1), got {p}")


def quantile(m, p: float, w_bytes: float | None = None) -> float:
    """Delay below which a fraction ``p`` of packets arrive.

    ``w_bytes`` applies to size-aware models only (default 0 there).
    """
    _check_p(p)
    if isinstance(m, SizeAwareExponentialModel):
        m = m.at_size(w_bytes or 0)
    elif w_bytes:
        raise TypeError(f"{type(m).__name__} has no size dependence; drop w_bytes")
    if isinstance(m, ExponentialDelayModel):
        return m.d_min_us - math.log1p(-p) / m.lambda_per_us
    if isinstance(m, TruncatedNormalDelayModel):
        return m.d_min_us + m.sigma_us * SQRT2 * erfinv(p)
    raise TypeError(f"unsupported model {type(m).__name__}")


def buffer_headroom(m: SizeAwareExponentialModel, p: float, w_bytes: float) -> float:
    """Delay budget within which a fraction ``p`` of size-``w_bytes`` packets arrive."""
    return quantile(m, p, w_bytes)
