"""Live measurement through the system ``ping``.

Flag mapping per platform:

    platform        count  size  interval      per-reply timeout
    Linux iputils   -c     -s    -i seconds    -W seconds (rounded up)
    macOS / BSD     -c     -s    -i seconds    -W milliseconds
    Windows         -n     -l    (none)        -w milliseconds   (not parsed)

``-n`` (numeric output) is passed on Linux and BSD so replies carry plain
addresses. Sizes passed with ``-s`` are ICMP payload bytes; reply lines,
and therefore traces, report payload plus the 8-byte ICMP header.
"""
from __future__ import annotations

import math
import os
import platform
import re
import shutil
import subprocess
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Sequence

from .decompose import PathModel, SizeDelayPoint, min_delay_by_size, path_model_from_points
from .errors import AllLost, EqualSizes, HostUnresolvable, NonPositiveCapacity, PingUnavailable, ZeroParsedLines
from .trace import DelaySample, DelayTrace, parse_ping, summarize

PING_ENV = "DELAYDIST_PING"

_BSD_LIKE = {"darwin", "freebsd", "openbsd", "netbsd"}

_UNRESOLVED = re.compile(
    r"unknown host|cannot resolve|Name or service not known|"
    r"Temporary failure in name resolution|nodename nor servname|No address associated",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class ProbeSpec:
    host: str
    count: int = 10
    size_bytes: int = 100
    interval_ms: int = 200
    timeout_ms: int = 1000

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.timeout_ms <= 0:
            raise ValueError(f"timeout_ms must be > 0, got {self.timeout_ms}")
        if self.size_bytes < 0:
            raise ValueError(f"size_bytes must be >= 0, got {self.size_bytes}")


def ping_command(spec: ProbeSpec, system: str | None = None, ping: str = "ping") -> list[str]:
    system = (system or platform.system()).lower()
    interval = f"{spec.interval_ms / 1000:g}"
    if system == "linux":
        wait = str(max(1, math.ceil(spec.timeout_ms / 1000)))
        return [ping, "-n", "-c", str(spec.count), "-s", str(spec.size_bytes),
                "-i", interval, "-W", wait, spec.host]
    if system in _BSD_LIKE:
        return [ping, "-n", "-c", str(spec.count), "-s", str(spec.size_bytes),
                "-i", interval, "-W", str(spec.timeout_ms), spec.host]
    if system == "windows":
        raise PingUnavailable("Windows ping output is not supported")
    raise PingUnavailable(f"no ping flag mapping for platform {system!r}")


def _find_ping(ping: str | None) -> str:
    exe = ping or os.environ.get(PING_ENV) or shutil.which("ping")
    if not exe:
        raise PingUnavailable("no ping executable found on PATH")
    return exe


def probe(spec: ProbeSpec, *, ping: str | None = None, system: str | None = None) -> DelayTrace:
    """Run one ping burst and return its round-trip trace.

    Probes that ping never reported (iputils prints nothing for silent
    losses) are added as lost samples, so delivered plus lost equals
    ``spec.count``.
    """
    system = (system or platform.system()).lower()
    argv = ping_command(spec, system, _find_ping(ping))
    budget = spec.count * (spec.interval_ms + spec.timeout_ms) / 1000 + 10
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=budget)
    except FileNotFoundError as exc:
        raise PingUnavailable(str(exc)) from None
    except subprocess.TimeoutExpired:
        raise AllLost(f"ping to {spec.host} did not finish within {budget:.0f} s") from None
    if _UNRESOLVED.search(proc.stderr) or _UNRESOLVED.search(proc.stdout):
        raise HostUnresolvable(f"cannot resolve host {spec.host!r}")
    try:
        trace = parse_ping(proc.stdout, spec.size_bytes, source="local", tool="ping").trace
    except ZeroParsedLines:
        detail = proc.stderr.strip() or "no replies"
        raise AllLost(f"no replies from {spec.host}: {detail}") from None

    first = 0 if system in _BSD_LIKE else 1
    size = trace.samples[0].size_bytes
    have = {s.seq: s for s in trace.samples}
    samples = [
        have.get(seq) or DelaySample.lost_probe(seq, size)
        for seq in range(first, first + spec.count)
    ]
    if not any(not s.lost for s in samples):
        raise AllLost(f"all {spec.count} probes to {spec.host} were lost")
    md = replace(trace.metadata, target=spec.host, collected_at=datetime.now(timezone.utc))
    return DelayTrace(md, samples)


def quick_estimate(host: str, **kwargs) -> tuple[float, float]:
    """(d_min_us, d_av_us) from a 10-probe burst."""
    kwargs.setdefault("count", 10)
    ping = kwargs.pop("ping", None)
    system = kwargs.pop("system", None)
    s = summarize(probe(ProbeSpec(host, **kwargs), ping=ping, system=system))
    return s.d_min_us, s.d_av_us


def multi_size_probe(
    host: str, sizes: Sequence[int], *, ping: str | None = None, system: str | None = None, **kwargs
) -> PathModel:
    """Path model from one burst per size, run one after another."""
    if len(set(sizes)) < 2:
        raise EqualSizes(f"need at least two distinct sizes, got {list(sizes)}")
    if len(set(sizes)) != len(sizes):
        raise EqualSizes(f"sizes repeat: {list(sizes)}")
    points: list[SizeDelayPoint] = []
    for w in sizes:
        trace = probe(ProbeSpec(host, size_bytes=w, **kwargs), ping=ping, system=system)
        points.extend(min_delay_by_size(trace))
    points.sort(key=lambda p: p.size_bytes)
    try:
        return path_model_from_points(points)
    except NonPositiveCapacity as exc:
        raise NonPositiveCapacity(
            f"{exc}; minima are too noisy, raise --count to sharpen them"
        ) from None
