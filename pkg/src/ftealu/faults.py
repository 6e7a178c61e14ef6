"""Fault hypotheses and the scenario space they span.

Permanent faults are stuck-at values on physical operand lanes ``0..width-1``;
they hit every execution version at the same lane.  A transient fault flips
one lane of one operand image in a single version only.

Scenario files are line oriented::

    width=<w>
    <op>,<a_hex>,<b_hex>,<fault_spec>

``a_hex``/``b_hex`` are lowercase hex zero-padded to ``ceil(w/4)`` digits.
``fault_spec`` is ``-`` for a fault-free scenario, otherwise ``|``-joined
tokens: ``A3@1`` (operand A, lane 3, stuck at 1) or ``T2:B0`` (transient flip
of operand B lane 0 in version 2).  Lines end with ``\\n``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, UsageError
from .rng import splitmix64
from .word import AluOp, Word, check_width, mask

OPERANDS = ("A", "B")

# fault class codes carried by ScenarioSet
NONE, SINGLE, DOUBLE, TRANSIENT = 0, 1, 2, 3
CLASS_NAMES = {NONE: "none", SINGLE: "single", DOUBLE: "double", TRANSIENT: "transient"}


@dataclass(frozen=True, order=True)
class StuckAt:
    operand: str
    lane: int
    value: int

    def __post_init__(self):
        if self.operand not in OPERANDS:
            raise ConfigurationError(f"operand must be A or B, got {self.operand!r}")
        if self.value not in (0, 1) or self.lane < 0:
            raise ConfigurationError(f"bad stuck-at {self}")

    def __str__(self) -> str:
        return f"{self.operand}{self.lane}@{self.value}"


@dataclass(frozen=True)
class Transient:
    version_id: int
    operand: str
    lane: int

    def __str__(self) -> str:
        return f"T{self.version_id}:{self.operand}{self.lane}"


@dataclass(frozen=True)
class FaultSet:
    permanent: frozenset[StuckAt] = frozenset()
    transient: Transient | None = None

    def __post_init__(self):
        object.__setattr__(self, "permanent", frozenset(self.permanent))
        positions = [(f.operand, f.lane) for f in self.permanent]
        if len(set(positions)) != len(positions):
            raise ConfigurationError("two stuck-at faults on one lane")
        if len(self.permanent) > 2:
            raise ConfigurationError("at most two permanent faults per set")

    @property
    def fault_class(self) -> int:
        if self.permanent:
            return SINGLE if len(self.permanent) == 1 else DOUBLE
        return TRANSIENT if self.transient else NONE

    def lane_masks(self) -> tuple[int, int, int, int]:
        """(sa0_a, sa1_a, sa0_b, sa1_b) lane masks."""
        m = {("A", 0): 0, ("A", 1): 0, ("B", 0): 0, ("B", 1): 0}
        for f in self.permanent:
            m[f.operand, f.value] |= 1 << f.lane
        return m["A", 0], m["A", 1], m["B", 0], m["B", 1]

    def apply(self, ia: int, ib: int, version_id: int) -> tuple[int, int]:
        sa0_a, sa1_a, sa0_b, sa1_b = self.lane_masks()
        ia = (ia & ~sa0_a) | sa1_a
        ib = (ib & ~sa0_b) | sa1_b
        t = self.transient
        if t is not None and t.version_id == version_id:
            if t.operand == "A":
                ia ^= 1 << t.lane
            else:
                ib ^= 1 << t.lane
        return ia, ib

    def check_width(self, width: int) -> None:
        lanes = [f.lane for f in self.permanent]
        if self.transient is not None:
            lanes.append(self.transient.lane)
        if any(lane >= width for lane in lanes):
            raise ConfigurationError(f"fault lane outside 0..{width - 1}")

    def spec(self) -> str:
        tokens = [str(f) for f in sorted(self.permanent)]
        if self.transient is not None:
            tokens.append(str(self.transient))
        return "|".join(tokens) or "-"

    @classmethod
    def parse(cls, spec: str) -> FaultSet:
        spec = spec.strip()
        if spec in ("", "-"):
            return cls()
        permanent, transient = [], None
        for tok in spec.split("|"):
            try:
                if tok.startswith("T"):
                    vid, rest = tok[1:].split(":")
                    transient = Transient(int(vid), rest[0].upper(), int(rest[1:]))
                else:
                    where, value = tok.split("@")
                    permanent.append(StuckAt(where[0].upper(), int(where[1:]), int(value)))
            except (ValueError, IndexError):
                raise ConfigurationError(f"bad fault token {tok!r}") from None
        return cls(frozenset(permanent), transient)

    def __str__(self) -> str:
        return self.spec()


@dataclass(frozen=True)
class FaultMasks:
    """Per-scenario fault masks, vectorized; scalars broadcast."""

    sa0_a: np.ndarray
    sa1_a: np.ndarray
    sa0_b: np.ndarray
    sa1_b: np.ndarray
    flip_a: np.ndarray
    flip_b: np.ndarray
    flip_version: np.ndarray

    def apply(self, ia, ib, version_id: int):
        ia = (ia & ~self.sa0_a) | self.sa1_a
        ib = (ib & ~self.sa0_b) | self.sa1_b
        hit = self.flip_version == version_id
        if np.any(hit):
            ia = ia ^ np.where(hit, self.flip_a, 0)
            ib = ib ^ np.where(hit, self.flip_b, 0)
        return ia, ib

    @classmethod
    def from_faultsets(cls, faultsets: Sequence[FaultSet]) -> FaultMasks:
        rows = []
        for fs in faultsets:
            t = fs.transient
            flip_a = 1 << t.lane if t is not None and t.operand == "A" else 0
            flip_b = 1 << t.lane if t is not None and t.operand == "B" else 0
            rows.append(fs.lane_masks() + (flip_a, flip_b, -1 if t is None else t.version_id))
        cols = np.array(rows, dtype=np.int64).reshape(-1, 7).T
        return cls(*cols)

    def take(self, idx) -> FaultMasks:
        return FaultMasks(*(getattr(self, f)[idx] for f in self.__dataclass_fields__))


def enumerate_single_faults(width: int) -> list[FaultSet]:
    return [FaultSet(frozenset([StuckAt(op, lane, v)]))
            for op in OPERANDS for lane in range(width) for v in (0, 1)]


def enumerate_double_faults(width: int) -> list[FaultSet]:
    positions = [(op, lane) for op in OPERANDS for lane in range(width)]
    out = []
    for (o1, l1), (o2, l2) in itertools.combinations(positions, 2):
        for v1, v2 in itertools.product((0, 1), repeat=2):
            out.append(FaultSet(frozenset([StuckAt(o1, l1, v1), StuckAt(o2, l2, v2)])))
    return out


def enumerate_transient_faults(width: int, n_versions: int = 3) -> list[FaultSet]:
    return [FaultSet(transient=Transient(v, op, lane))
            for v in range(n_versions) for op in OPERANDS for lane in range(width)]


def vulnerable_bit_faults(transforms: Iterable, width: int) -> list[FaultSet]:
    """Single faults on lanes the given transforms make fragile.

    Lane 0 and lane ``width-1`` for every transform, plus its fill lanes and,
    for half-swapping kinds, the two lanes at the half boundary.
    """
    transforms = list(transforms)
    if not transforms:
        raise ConfigurationError("need at least one transform")
    h = width // 2
    lanes = {0, width - 1}
    for t in transforms:
        lanes |= set(t.fill_lanes)
        if t.kind.halves:
            lanes |= {h - 1, h}
    return [fs for fs in enumerate_single_faults(width)
            if next(iter(fs.permanent)).lane in lanes]


def sample_operands(width: int, count: int, seed: int, exhaustive: bool = False):
    """Operand arrays ``(a, b)``.

    Random pairs take stream elements ``2i`` and ``2i+1`` of ``splitmix64(seed)``
    masked to ``width`` bits.  ``exhaustive`` ignores ``count`` and returns every
    pair in a-major order.
    """
    if exhaustive:
        if width > 10:
            raise UsageError(f"exhaustive operand pairs at width {width} is {4 ** width} pairs")
        idx = np.arange(1 << (2 * width), dtype=np.int64)
        return idx >> width, idx & mask(width)
    if count < 1:
        raise UsageError("count must be >= 1")
    stream = splitmix64(seed, 2 * count) & np.uint64(mask(width))
    stream = stream.astype(np.int64)
    return stream[0::2], stream[1::2]


def sample_inputs(width: int, count: int, seed: int, exhaustive: bool = False) -> list[tuple[Word, Word]]:
    check_width(width)
    a, b = sample_operands(width, count, seed, exhaustive)
    return [(Word(width, int(x)), Word(width, int(y))) for x, y in zip(a, b)]


@dataclass(frozen=True)
class Scenario:
    op: AluOp
    a: Word
    b: Word
    faults: FaultSet = field(default_factory=FaultSet)

    def __post_init__(self):
        if self.a.width != self.b.width:
            raise ConfigurationError("operand widths differ")
        self.faults.check_width(self.a.width)

    def line(self) -> str:
        digits = (self.a.width + 3) // 4
        return f"{self.op.name},{self.a.value:0{digits}x},{self.b.value:0{digits}x},{self.faults.spec()}"


@dataclass
class ScenarioSet:
    """Column-oriented scenario collection used by the batch pipeline."""

    width: int
    op: np.ndarray          # AluOp.value per scenario
    a: np.ndarray
    b: np.ndarray
    masks: FaultMasks
    fault_class: np.ndarray
    specs: tuple[FaultSet, ...] = ()   # distinct fault sets, indexed by fault_id
    fault_id: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.a)

    def take(self, idx) -> ScenarioSet:
        return ScenarioSet(self.width, self.op[idx], self.a[idx], self.b[idx],
                           self.masks.take(idx), self.fault_class[idx], self.specs,
                           None if self.fault_id is None else self.fault_id[idx])

    def __getitem__(self, i: int) -> Scenario:
        w = self.width
        if self.fault_id is not None:
            fs = self.specs[int(self.fault_id[i])]
        else:
            fs = _faultset_from_masks(self.masks.take(i))
        return Scenario(AluOp(int(self.op[i])), Word(w, int(self.a[i])), Word(w, int(self.b[i])), fs)

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @classmethod
    def from_scenarios(cls, scenarios: Sequence[Scenario], width: int | None = None) -> ScenarioSet:
        scenarios = list(scenarios)
        if width is None:
            if not scenarios:
                raise UsageError("cannot infer width of an empty scenario list")
            width = scenarios[0].a.width
        specs = tuple(dict.fromkeys(s.faults for s in scenarios))
        index = {fs: i for i, fs in enumerate(specs)}
        fid = np.array([index[s.faults] for s in scenarios], dtype=np.int64)
        m = FaultMasks.from_faultsets(specs) if specs else None
        return cls(
            width,
            np.array([s.op.value for s in scenarios], dtype=np.int8),
            np.array([s.a.value for s in scenarios], dtype=np.int64),
            np.array([s.b.value for s in scenarios], dtype=np.int64),
            m.take(fid) if m is not None else FaultMasks.from_faultsets([]),
            np.array([s.faults.fault_class for s in scenarios], dtype=np.int8),
            specs, fid,
        )

    @classmethod
    def product(cls, width: int, ops: Sequence[AluOp], a: np.ndarray, b: np.ndarray,
                faultsets: Sequence[FaultSet]) -> ScenarioSet:
        """Cross product ops x operand pairs x fault sets, in that nesting order."""
        n_pairs, n_faults = len(a), len(faultsets)
        per_op = n_pairs * n_faults
        fid = np.tile(np.arange(n_faults, dtype=np.int64), n_pairs * len(ops))
        base = FaultMasks.from_faultsets(faultsets)
        classes = np.array([fs.fault_class for fs in faultsets], dtype=np.int8)
        return cls(
            width,
            np.repeat(np.array([op.value for op in ops], dtype=np.int8), per_op),
            np.tile(np.repeat(np.asarray(a, dtype=np.int64), n_faults), len(ops)),
            np.tile(np.repeat(np.asarray(b, dtype=np.int64), n_faults), len(ops)),
            base.take(fid), classes[fid], tuple(faultsets), fid,
        )

    @classmethod
    def concat(cls, parts: Sequence[ScenarioSet]) -> ScenarioSet:
        parts = [p for p in parts if len(p)]
        if not parts:
            raise UsageError("nothing to concatenate")
        specs: list[FaultSet] = []
        index: dict[FaultSet, int] = {}
        fids = []
        for p in parts:
            remap = np.array([index.setdefault(fs, len(index)) for fs in p.specs], dtype=np.int64)
            fids.append(remap[p.fault_id])
        specs = list(index)
        cat = np.concatenate
        return cls(
            parts[0].width, cat([p.op for p in parts]), cat([p.a for p in parts]),
            cat([p.b for p in parts]),
            FaultMasks(*(cat([getattr(p.masks, f) for p in parts]) for f in FaultMasks.__dataclass_fields__)),
            cat([p.fault_class for p in parts]), tuple(specs), cat(fids),
        )


def _faultset_from_masks(m: FaultMasks) -> FaultSet:
    perm = []
    for name, operand, value in (("sa0_a", "A", 0), ("sa1_a", "A", 1), ("sa0_b", "B", 0), ("sa1_b", "B", 1)):
        bits = int(getattr(m, name))
        perm += [StuckAt(operand, lane, value) for lane in range(bits.bit_length()) if bits >> lane & 1]
    transient = None
    if int(m.flip_version) >= 0:
        operand = "A" if int(m.flip_a) else "B"
        bits = int(m.flip_a) or int(m.flip_b)
        transient = Transient(int(m.flip_version), operand, bits.bit_length() - 1)
    return FaultSet(frozenset(perm), transient)


def write_scenarios(path, scenarios: Iterable[Scenario], width: int) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"width={width}\n")
        for s in scenarios:
            fh.write(s.line() + "\n")


def read_scenarios(path) -> list[Scenario]:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("width="):
            raise ConfigurationError(f"scenario file must start with width=<w>, got {header!r}")
        width = check_width(int(header[len("width="):]))
        out = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                op, a, b, spec = line.split(",")
            except ValueError:
                raise ConfigurationError(f"line {lineno}: expected 4 fields") from None
            out.append(Scenario(AluOp.parse(op), Word(width, int(a, 16)), Word(width, int(b, 16)),
                                FaultSet.parse(spec)))
    return out
