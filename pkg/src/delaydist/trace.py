"""Delay traces: data model, ping transcript parsing, canonical CSV, summaries.

Delays are held as integer microseconds. Lost probes carry no delay.
"""
from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Iterable, NamedTuple

from .errors import KindError, MixedSizes, NoSamples, SchemaError, ZeroParsedLines


class DelayKind(str, Enum):
    RTT = "RTT"
    OWD = "OWD"


@dataclass(frozen=True)
class DelaySample:
    seq: int
    delay_us: int | None
    size_bytes: int

    def __post_init__(self):
        if self.size_bytes < 1:
            raise ValueError(f"size_bytes must be >= 1, got {self.size_bytes}")
        if self.delay_us is not None and self.delay_us < 0:
            raise ValueError(f"delay_us must be >= 0, got {self.delay_us}")

    @property
    def lost(self) -> bool:
        return self.delay_us is None

    @classmethod
    def lost_probe(cls, seq: int, size_bytes: int) -> DelaySample:
        return cls(seq, None, size_bytes)


@dataclass(frozen=True)
class TraceMetadata:
    source: str = ""
    target: str = ""
    delay_kind: DelayKind = DelayKind.RTT
    collected_at: datetime | None = None
    tool: str = ""

    def __post_init__(self):
        object.__setattr__(self, "delay_kind", DelayKind(self.delay_kind))


@dataclass(frozen=True)
class DelayTrace:
    metadata: TraceMetadata
    samples: tuple[DelaySample, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        prev = None
        for s in self.samples:
            if prev is not None and s.seq <= prev:
                raise ValueError(f"seq values must be strictly increasing ({prev} then {s.seq})")
            prev = s.seq

    def __len__(self):
        return len(self.samples)

    @property
    def n_ok(self) -> int:
        return sum(1 for s in self.samples if not s.lost)

    @property
    def n_lost(self) -> int:
        return sum(1 for s in self.samples if s.lost)

    @property
    def loss_rate(self) -> float:
        return self.n_lost / len(self.samples) if self.samples else 0.0

    def delays(self, size_bytes: int | None = None) -> list[int]:
        """Delivered delays, optionally restricted to one packet size."""
        return [
            s.delay_us
            for s in self.samples
            if not s.lost and (size_bytes is None or s.size_bytes == size_bytes)
        ]

    def sizes(self) -> list[int]:
        """Distinct sizes among delivered samples, ascending."""
        return sorted({s.size_bytes for s in self.samples if not s.lost})

    def with_samples(self, samples: Iterable[DelaySample], **meta) -> DelayTrace:
        metadata = replace(self.metadata, **meta) if meta else self.metadata
        return DelayTrace(metadata, tuple(samples))


@dataclass(frozen=True)
class TraceSummary:
    size_bytes: int | None
    n_ok: int
    n_lost: int
    d_min_us: float
    d_av_us: float


def summarize(trace: DelayTrace, size_bytes: int | None = None) -> TraceSummary:
    """Minimum and mean delay over delivered samples of one size.

    ``size_bytes=None`` is accepted for single-size traces.
    """
    if size_bytes is None:
        sizes = trace.sizes()
        if len(sizes) > 1:
            raise MixedSizes(f"trace mixes sizes {sizes}; pass size_bytes")
        if not sizes:
            raise NoSamples("trace has no delivered samples")
        size_bytes = sizes[0]
    delays = trace.delays(size_bytes)
    if not delays:
        raise NoSamples(f"no delivered samples of size {size_bytes}")
    n_lost = sum(1 for s in trace.samples if s.lost and s.size_bytes == size_bytes)
    return TraceSummary(
        size_bytes=size_bytes,
        n_ok=len(delays),
        n_lost=n_lost,
        d_min_us=min(delays),
        d_av_us=sum(delays) / len(delays),
    )


def rtt_to_owd(trace: DelayTrace) -> DelayTrace:
    """Halve every round-trip delay (round half up) and relabel the trace OWD."""
    if trace.metadata.delay_kind is not DelayKind.RTT:
        raise KindError(f"expected an RTT trace, got {trace.metadata.delay_kind.value}")
    samples = (
        s if s.lost else DelaySample(s.seq, (s.delay_us + 1) // 2, s.size_bytes)
        for s in trace.samples
    )
    return trace.with_samples(samples, delay_kind=DelayKind.OWD)


# --- ping transcripts -------------------------------------------------------
#
# Two reply grammars are handled, iputils (Linux) and BSD/macOS. They share the
# "N bytes from ADDR: icmp_seq=K ttl=T time=X ms" reply shape and differ in how
# losses are reported:
#   iputils:  "From GW icmp_seq=K Destination Host Unreachable"
#             "no answer yet for icmp_seq=K"            (with -O)
#   BSD:      "Request timeout for icmp_seq K"
# Busybox's "seq=K" spelling is accepted too. Windows output is not supported.

_REPLY = re.compile(
    r"^(?P<size>\d+) bytes from .*?[:\s](?:icmp_[sr]eq|seq)=(?P<seq>\d+)\b"
    r".*?\btime[=<]\s*(?P<time>\d+(?:\.\d+)?)\s*(?P<unit>ms|msec|us|usec|µs|s)?\b"
)
_LOST = [
    re.compile(r"^Request timeout for icmp_seq[\s=](?P<seq>\d+)"),
    re.compile(r"^no answer yet for icmp_seq=(?P<seq>\d+)"),
    re.compile(r"^From \S+.*?\bicmp_seq=(?P<seq>\d+)\s+\S"),
]
_HEADER = re.compile(r"^PING\s+(?P<target>\S+)")
_STRUCTURAL = re.compile(
    r"^(PING\s|---\s.*statistics|\d+ packets transmitted|rtt |round-trip |pipe \d+)"
)
_UNIT_US = {None: 1000, "ms": 1000, "msec": 1000, "us": 1, "usec": 1, "µs": 1, "s": 1_000_000}


def _to_us(value: str, unit: str | None) -> int:
    us = Decimal(value) * _UNIT_US[unit]
    return int(us.quantize(Decimal(1), rounding=ROUND_HALF_UP))


class PingParse(NamedTuple):
    trace: DelayTrace
    skipped: int


def parse_ping(text: str, fallback_size: int, *, source: str = "", tool: str = "ping") -> PingParse:
    """Parse a ping transcript into a trace plus a count of skipped lines.

    Reply sizes come from the reply lines (ICMP bytes as printed by ping).
    Lost probes take the transcript's reply size, or ``fallback_size`` when
    no reply was seen. The first report of a sequence number wins; repeats
    (DUP!, late replies after a timeout) are skipped.
    """
    target = ""
    skipped = 0
    found: dict[int, int | None] = {}
    reply_size = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = _REPLY.match(line)
        if m:
            seq = int(m["seq"])
            if seq in found or "DUP!" in line:
                skipped += 1
                continue
            found[seq] = _to_us(m["time"], m["unit"])
            if reply_size is None:
                reply_size = int(m["size"])
            continue
        for pat in _LOST:
            m = pat.match(line)
            if m:
                seq = int(m["seq"])
                if seq in found:
                    skipped += 1
                else:
                    found[seq] = None
                break
        else:
            h = _HEADER.match(line)
            if h and not target:
                target = h["target"]
            elif not _STRUCTURAL.match(line):
                skipped += 1
    if not found:
        raise ZeroParsedLines("no ping reply or timeout lines found")
    size = reply_size if reply_size is not None else fallback_size
    samples = [DelaySample(seq, found[seq], size) for seq in sorted(found)]
    meta = TraceMetadata(source=source, target=target, delay_kind=DelayKind.RTT, tool=tool)
    return PingParse(DelayTrace(meta, samples), skipped)


def parse_ping_text(text: str, fallback_size: int) -> DelayTrace:
    return parse_ping(text, fallback_size).trace


# --- canonical CSV ------------------------------------------------------------

CSV_COLUMNS = ("seq", "delay_us", "size_bytes", "lost")
_META_KEYS = ("source", "target", "kind", "tool", "collected_at")


def format_trace_csv(trace: DelayTrace) -> str:
    md = trace.metadata
    meta = {
        "source": md.source,
        "target": md.target,
        "kind": md.delay_kind.value,
        "tool": md.tool,
    }
    if md.collected_at is not None:
        meta["collected_at"] = md.collected_at.isoformat()
    buf = io.StringIO()
    for key, value in meta.items():
        if "\n" in value or "\r" in value:
            raise ValueError(f"metadata {key} must be a single line")
        buf.write(f"# {key}={value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for s in trace.samples:
        w.writerow((s.seq, "" if s.lost else s.delay_us, s.size_bytes, int(s.lost)))
    return buf.getvalue()


def write_trace_csv(trace: DelayTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(format_trace_csv(trace))


def _int_field(row, name, lineno, minimum=0):
    value = row[name]
    try:
        out = int(value)
    except (TypeError, ValueError):
        raise SchemaError(f"{name} is not an integer: {value!r}", lineno) from None
    if out < minimum:
        raise SchemaError(f"{name} must be >= {minimum}, got {out}", lineno)
    return out


def parse_trace_csv(text: str) -> DelayTrace:
    meta: dict[str, str] = {}
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in text.split("\n")]
    if lines and lines[-1] == "":
        lines.pop()
    start = 0
    for start, line in enumerate(lines):
        if not line.startswith("#"):
            break
        comment = line[1:]
        if comment.startswith(" "):
            comment = comment[1:]
        key, sep, value = comment.partition("=")
        if sep and key in _META_KEYS:
            meta[key] = value
    else:
        start = len(lines)
    body = lines[start:]
    if not body:
        raise SchemaError("missing header row", start + 1)
    reader = csv.DictReader(body)
    missing = [c for c in CSV_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise SchemaError(f"missing column(s): {', '.join(missing)}", start + 1)

    try:
        kind = DelayKind(meta.get("kind", "RTT"))
    except ValueError:
        raise SchemaError(f"kind must be RTT or OWD, got {meta['kind']!r}") from None
    collected_at = None
    if meta.get("collected_at"):
        try:
            collected_at = datetime.fromisoformat(meta["collected_at"])
        except ValueError:
            raise SchemaError(f"bad collected_at: {meta['collected_at']!r}") from None

    samples = []
    seen = set()
    prev = None
    for offset, row in enumerate(reader):
        lineno = start + 2 + offset
        if None in row.values():
            raise SchemaError("too few fields", lineno)
        seq = _int_field(row, "seq", lineno, minimum=-(2**63))
        size = _int_field(row, "size_bytes", lineno, minimum=1)
        lost = row["lost"].strip()
        if lost not in ("0", "1"):
            raise SchemaError(f"lost must be 0 or 1, got {lost!r}", lineno)
        if lost == "1":
            if row["delay_us"].strip():
                raise SchemaError("lost sample must have an empty delay_us", lineno)
            delay = None
        else:
            if not row["delay_us"].strip():
                raise SchemaError("delivered sample is missing delay_us", lineno)
            delay = _int_field(row, "delay_us", lineno)
        if seq in seen:
            raise SchemaError(f"duplicate seq {seq}", lineno)
        if prev is not None and seq < prev:
            raise SchemaError(f"seq {seq} out of order", lineno)
        seen.add(seq)
        prev = seq
        samples.append(DelaySample(seq, delay, size))

    md = TraceMetadata(
        source=meta.get("source", ""),
        target=meta.get("target", ""),
        delay_kind=kind,
        collected_at=collected_at,
        tool=meta.get("tool", ""),
    )
    return DelayTrace(md, samples)


def read_trace_csv(path) -> DelayTrace:
    with open(path, encoding="utf-8", newline="") as f:
        return parse_trace_csv(f.read())
