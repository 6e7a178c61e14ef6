"""Operand diversification: execution versions as logical-to-physical lane maps.

A :class:`Transform` splits the logical word into significance-contiguous
segments.  Each segment owns a *window* of physical lanes: the constant-zero
fill lanes directly below its data followed by its data lanes.  Executing a
version runs the shared ALU once per segment window, lowest significance
first, feeding each segment's carry (or borrow) into the next one at the
position of its lowest data bit.  Lanes numbered ``>= width`` are extension
lanes (ALU headroom) and are never faulted.

Faults live on physical lanes and are applied after encoding, so the same
stuck lane hits different logical bits in different versions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigurationError
from .faults import FaultMasks, FaultSet
from .word import AluOp, Word, alu_raw, check_width, mask


class TransformKind(enum.Enum):
    IDENTITY = "IDENTITY"
    RESO = "RESO"
    RESWO = "RESWO"
    E_RESO = "E_RESO"
    E_RESWO = "E_RESWO"
    ROT_RESO = "ROT_RESO"
    ROT_E_RESO = "ROT_E_RESO"

    @property
    def halves(self) -> bool:
        """Whether the kind swaps operand halves."""
        return self in (TransformKind.RESWO, TransformKind.E_RESWO)

    @classmethod
    def parse(cls, name: str | TransformKind) -> TransformKind:
        if isinstance(name, TransformKind):
            return name
        key = name.strip().upper().replace("-", "_")
        aliases = {"BASIC": "IDENTITY", "ORIGINAL": "IDENTITY"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ConfigurationError(f"unknown transform {name!r}") from None


def _runs(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int, int], ...]:
    """Group (src, dst) bit moves into (src, dst, length) runs of consecutive positions."""
    runs: list[list[int]] = []
    for s, d in pairs:
        if runs and runs[-1][0] + runs[-1][2] == s and runs[-1][1] + runs[-1][2] == d:
            runs[-1][2] += 1
        else:
            runs.append([s, d, 1])
    return tuple((s, d, n) for s, d, n in runs)


def _move(x, runs):
    out = x & 0
    for s, d, n in runs:
        out = out | (((x >> s) & mask(n)) << d)
    return out


@dataclass(frozen=True)
class Segment:
    logical_lo: int
    logical_hi: int
    lanes: tuple[int, ...]
    window: tuple[int, ...]
    exec_order: int

    @property
    def logical_range(self) -> range:
        return range(self.logical_lo, self.logical_hi + 1)

    @property
    def physical_base(self) -> int:
        return self.lanes[0]

    @property
    def size(self) -> int:
        return len(self.lanes)

    @property
    def fill_below(self) -> int:
        return len(self.window) - len(self.lanes)

    def __post_init__(self):
        if len(self.lanes) != self.logical_hi - self.logical_lo + 1:
            raise ConfigurationError("segment lane count does not match its logical range")
        if self.window[self.fill_below:] != self.lanes:
            raise ConfigurationError("segment window must end with its data lanes")
        object.__setattr__(self, "_encode_runs",
                           _runs(zip(self.logical_range, self.lanes)))
        object.__setattr__(self, "_gather_runs",
                           _runs((lane, pos) for pos, lane in enumerate(self.window)))
        object.__setattr__(self, "_scatter_runs",
                           _runs((pos, lane) for pos, lane in enumerate(self.window)))


@dataclass(frozen=True)
class Transform:
    kind: TransformKind
    width: int
    segments: tuple[Segment, ...]
    fill_lanes: frozenset[int]

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def n_lanes(self) -> int:
        """Physical image width, extension lanes included."""
        return 1 + max(max(s.window) for s in self.segments)

    @property
    def extension_lanes(self) -> tuple[int, ...]:
        return tuple(range(self.width, self.n_lanes))

    def lane_of(self, logical_bit: int) -> int:
        for seg in self.segments:
            if seg.logical_lo <= logical_bit <= seg.logical_hi:
                return seg.lanes[logical_bit - seg.logical_lo]
        raise ConfigurationError(f"bit {logical_bit} outside width {self.width}")

    def __str__(self) -> str:
        return self.name


def _segment(lo, hi, lanes, fill=(), order=0) -> Segment:
    lanes = tuple(lanes)
    return Segment(lo, hi, lanes, tuple(fill) + lanes, order)


def make_transform(kind: TransformKind | str, width: int) -> Transform:
    kind = TransformKind.parse(kind)
    w = check_width(width)
    h = w // 2
    if kind is TransformKind.IDENTITY:
        segs = [_segment(0, w - 1, range(w))]
    elif kind is TransformKind.RESO:
        segs = [_segment(0, w - 1, range(1, w + 1), fill=(0,))]
    elif kind is TransformKind.E_RESO:
        segs = [_segment(0, w - 1, range(2, w + 2), fill=(0, 1))]
    elif kind is TransformKind.RESWO:
        segs = [_segment(0, h - 1, range(h, w)),
                _segment(h, w - 1, range(0, h))]
    elif kind is TransformKind.E_RESWO:
        # each half shifted left by one inside the other half; the bit pushed
        # out of a half lands on its own extension lane
        segs = [_segment(0, h - 1, tuple(range(h + 1, w)) + (w,), fill=(h,)),
                _segment(h, w - 1, tuple(range(1, h)) + (w + 1,), fill=(0,))]
    elif kind is TransformKind.ROT_RESO:
        segs = [_segment(0, w - 2, range(1, w)),
                _segment(w - 1, w - 1, (0,))]
    elif kind is TransformKind.ROT_E_RESO:
        segs = [_segment(0, w - 3, range(2, w)),
                _segment(w - 2, w - 1, (0, 1))]
    else:  # pragma: no cover
        raise ConfigurationError(f"unsupported transform {kind}")

    segs = [s for s in segs if s.lanes]
    segs = tuple(Segment(s.logical_lo, s.logical_hi, s.lanes, s.window, i)
                 for i, s in enumerate(segs))
    covered = {lane for s in segs for lane in s.lanes}
    fill = frozenset(lane for lane in range(w) if lane not in covered)
    return Transform(kind, w, segs, fill)


def encode(t: Transform, x):
    """Place each logical bit of ``x`` on its physical lane (Word, int, or int64 array)."""
    v = x.value if isinstance(x, Word) else x
    out = v & 0
    for seg in t.segments:
        out = out | _move(v, seg._encode_runs)
    return out


def _decode_raw(t: Transform, image):
    out = image & 0
    for seg in t.segments:
        out = out | _move(image, tuple((d, s, n) for s, d, n in seg._encode_runs))
    return out


def decode(t: Transform, image) -> Word:
    """Inverse of :func:`encode`; fill and unmapped lanes are ignored."""
    return Word(t.width, int(_decode_raw(t, int(image))))


def decode_batch(t: Transform, image: np.ndarray) -> np.ndarray:
    return _decode_raw(t, np.asarray(image, dtype=np.int64))


@dataclass(frozen=True)
class VersionResult:
    version_id: int
    decoded: Word
    raw_physical: int


def _run_segments(op: AluOp, ia, ib, t: Transform, want_raw: bool):
    decoded = ia & 0
    raw = ia & 0 if want_raw else None
    carry = 0
    for seg in t.segments:
        k = seg.fill_below
        wa = _move(ia, seg._gather_runs)
        wb = _move(ib, seg._gather_runs)
        r = alu_raw(op, wa, wb, carry << k if op.is_arithmetic else 0)
        decoded = decoded | (((r >> k) & mask(seg.size)) << seg.logical_lo)
        if op.is_arithmetic:
            carry = (r >> (k + seg.size)) & 1
        if want_raw:
            raw = raw | _move(r & mask(len(seg.window)), seg._scatter_runs)
    return decoded, raw


def execute_batch(op: AluOp, a, b, t: Transform, masks: FaultMasks | None = None,
                  version_id: int = 0, want_raw: bool = False):
    """Encode, fault, execute and decode one version over operand arrays.

    Returns ``(decoded, raw)`` int64 arrays; ``raw`` is None unless requested.
    """
    ia = encode(t, np.asarray(a, dtype=np.int64))
    ib = encode(t, np.asarray(b, dtype=np.int64))
    if masks is not None:
        ia, ib = masks.apply(ia, ib, version_id)
    return _run_segments(op, ia, ib, t, want_raw)


def execute_version(op: AluOp, a: Word, b: Word, t: Transform,
                    faults: FaultSet | None = None, version_id: int = 0) -> VersionResult:
    if a.width != b.width or a.width != t.width:
        raise ConfigurationError("operand and transform widths differ")
    ia, ib = encode(t, a.value), encode(t, b.value)
    if faults is not None:
        ia, ib = faults.apply(ia, ib, version_id)
    decoded, raw = _run_segments(op, ia, ib, t, want_raw=True)
    return VersionResult(version_id, Word(t.width, int(decoded)), int(raw))
