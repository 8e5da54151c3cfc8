"""Packet delay modelling: fixed/variable decomposition, exponential vs
truncated-normal fits scored by CDF correlation, and delay budgets."""

__version__ = "0.1.0"

from .decompose import (
    PathModel,
    SizeDelayPoint,
    min_delay_by_size,
    regression_path_model,
    two_point_path_model,
    variable_component,
)
from .fit import EmpiricalCdf, FitReport, cdf_overlay, compare_models, empirical_cdf, pearson, score_model
from .models import (
    ExponentialDelayModel,
    Family,
    SizeAwareExponentialModel,
    TruncatedNormalDelayModel,
    buffer_headroom,
    cdf_exponential,
    cdf_size_aware,
    cdf_truncated_normal,
    fit_exponential,
    fit_truncated_normal,
    quantile,
)
from .synth import SplitMix64, SynthSpec, generate, generate_two_size
from .trace import (
    DelayKind,
    DelaySample,
    DelayTrace,
    TraceMetadata,
    TraceSummary,
    parse_ping_text,
    read_trace_csv,
    rtt_to_owd,
    summarize,
    write_trace_csv,
)
