"""Seeded synthetic delay traces from either model family.

The uniform stream is SplitMix64 (Steele, Lea & Flood 2014): state advances
by 0x9E3779B97F4A7C15 and each output is mixed with multipliers
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB (shifts 30, 27, 31). Uniforms in
[0, 1) take the top 53 bits. Normals use Marsaglia's polar method on pairs of
uniforms mapped to (-1, 1), returning the cached second variate on alternate
calls. Anyone re-implementing these constants gets the same draws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .decompose import PathModel
from .errors import EqualSizes
from .models import Family
from .trace import DelayKind, DelaySample, DelayTrace, TraceMetadata

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK
        self._spare = None

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        f = math.sqrt(-2.0 * math.log(s) / s)
        self._spare = v * f
        return u * f


@dataclass(frozen=True)
class SynthSpec:
    family: Family
    d_min_us: float
    scale_us: float
    n: int
    size_bytes: int = 100
    seed: int = 0
    loss_rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.scale_us > 0:
            raise ValueError(f"scale_us must be > 0, got {self.scale_us}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.loss_rate < 1.0:
            raise ValueError(f"loss_rate must lie in [0, 1), got {self.loss_rate}")


def _round_us(x: float) -> int:
    return math.floor(x + 0.5)


def draw_variable(spec: SynthSpec, rng) -> float:
    """One variable-delay draw (excess over d_min) for ``spec.family``."""
    if spec.family is Family.EXPONENTIAL:
        return -spec.scale_us * math.log1p(-rng.uniform())
    return spec.scale_us * abs(rng.normal())


def _lost(spec: SynthSpec, rng) -> bool:
    # no draw at all when loss is off, so loss-free streams stay comparable
    return spec.loss_rate > 0 and rng.uniform() < spec.loss_rate


def _metadata(spec: SynthSpec) -> TraceMetadata:
    return TraceMetadata(
        source="synth",
        target=f"{spec.family.value}-seed{spec.seed}",
        delay_kind=DelayKind.OWD,
        tool="delaydist-synth",
    )


def generate(spec: SynthSpec, rng=None) -> DelayTrace:
    rng = rng if rng is not None else SplitMix64(spec.seed)
    samples = []
    for seq in range(1, spec.n + 1):
        if _lost(spec, rng):
            samples.append(DelaySample.lost_probe(seq, spec.size_bytes))
            continue
        d = _round_us(spec.d_min_us + draw_variable(spec, rng))
        samples.append(DelaySample(seq, d, spec.size_bytes))
    return DelayTrace(_metadata(spec), samples)


def generate_two_size(
    spec: SynthSpec, path: PathModel, w1: int, w2: int, *, noise: bool = True, rng=None
) -> DelayTrace:
    """Alternate sizes w1, w2 (``spec.n`` samples each) over a fixed-delay path.

    Each delay is the path's fixed delay for its size plus a variable draw
    from ``spec``'s family; ``spec.d_min_us`` and ``spec.size_bytes`` are
    ignored in favour of ``path`` and the two sizes.
    """
    if w1 == w2:
        raise EqualSizes(f"both sizes are {w1}")
    rng = rng if rng is not None else SplitMix64(spec.seed)
    samples = []
    for i in range(2 * spec.n):
        seq = i + 1
        w = w1 if i % 2 == 0 else w2
        if _lost(spec, rng):
            samples.append(DelaySample.lost_probe(seq, w))
            continue
        extra = draw_variable(spec, rng) if noise else 0.0
        samples.append(DelaySample(seq, _round_us(path.fixed_delay(w) + extra), w))
    return DelayTrace(_metadata(spec), samples)
