"""Bitwise voters that fuse the execution versions into one result word.

Weight table files::

    width=<w> versions=<name>,<name>,...
    <bit>,<version name>,<weight with 9 decimals>

one row per (bit, version), bit-major, versions in header order, ``\\n`` line
endings.  Saving a loaded table reproduces the file byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diversify import Transform, TransformKind, execute_version, make_transform
from .errors import ConfigurationError
from .faults import FaultSet
from .word import AluOp, Word

THRESHOLD = 0.5
EPS_TOTAL = 1e-9

MAJORITY = "MAJORITY"

T = TransformKind
COMBOS = {
    1: (T.IDENTITY, T.RESO, T.RESWO),
    2: (T.IDENTITY, T.E_RESO, T.E_RESWO),
    3: (T.IDENTITY, T.ROT_RESO, T.E_RESWO),
    4: (T.IDENTITY, T.ROT_E_RESO, T.E_RESWO),
    5: (T.IDENTITY, T.ROT_E_RESO, T.RESWO),
    6: (T.IDENTITY, T.RESO, T.E_RESWO),
}
DEFAULT_COMBO = 6
# one version per transform family; a shift and its rotation fault the same logical bits
FIVE_VERSION = (T.IDENTITY, T.RESO, T.E_RESWO, T.RESWO, T.E_RESO)
del T


def combo_kinds(spec) -> tuple[TransformKind, ...]:
    """Resolve ``6``, ``"combo6"``, ``"5mr"`` or ``"IDENTITY,RESO,E_RESWO"`` to transform kinds."""
    if isinstance(spec, (list, tuple)):
        return tuple(TransformKind.parse(k) for k in spec)
    s = str(spec).strip().lower()
    if s.startswith("combo"):
        s = s[len("combo"):]
    if s.isdigit():
        try:
            return COMBOS[int(s)]
        except KeyError:
            raise ConfigurationError(f"combo number must be 1..6, got {spec!r}") from None
    if s == "5mr":
        return FIVE_VERSION
    return tuple(TransformKind.parse(k) for k in str(spec).replace("|", ",").split(","))


def make_combo(spec, width: int) -> tuple[Transform, ...]:
    kinds = combo_kinds(spec)
    if len(kinds) not in (3, 5):
        raise ConfigurationError(f"a combo needs 3 or 5 versions, got {len(kinds)}")
    return tuple(make_transform(k, width) for k in kinds)


def combo_label(transforms: Sequence[Transform | TransformKind]) -> str:
    return "|".join(t.name if isinstance(t, Transform) else t.value for t in transforms)


@dataclass(frozen=True)
class WeightTable:
    width: int
    versions: tuple[str, ...]
    weights: np.ndarray   # shape (len(versions), width)

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "versions", tuple(self.versions))
        if w.shape != (len(self.versions), self.width):
            raise ConfigurationError(f"weights shape {w.shape} does not match "
                                     f"{len(self.versions)} versions x {self.width} bits")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ConfigurationError("weights must be finite and non-negative")

    @classmethod
    def uniform(cls, width: int, versions: Sequence[str], value: float = 1.0) -> WeightTable:
        return cls(width, tuple(versions), np.full((len(versions), width), value))

    def dumps(self) -> str:
        lines = [f"width={self.width} versions={','.join(self.versions)}"]
        for bit in range(self.width):
            for j, name in enumerate(self.versions):
                lines.append(f"{bit},{name},{self.weights[j, bit]:.9f}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> WeightTable:
        rows = text.splitlines()
        try:
            head = dict(kv.split("=", 1) for kv in rows[0].split())
            width = int(head["width"])
            versions = tuple(head["versions"].split(","))
        except (IndexError, KeyError, ValueError):
            raise ConfigurationError("weight table header must be 'width=<w> versions=<names>'") from None
        weights = np.full((len(versions), width), np.nan)
        for row in rows[1:]:
            if not row.strip():
                continue
            bit, name, value = row.split(",")
            weights[versions.index(name), int(bit)] = float(value)
        if np.isnan(weights).any():
            raise ConfigurationError("weight table is missing entries")
        return cls(width, versions, weights)

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> WeightTable:
        with open(path) as fh:
            return cls.loads(fh.read())


@dataclass(frozen=True)
class VoteTrace:
    weighted_sums: tuple[float, ...]
    totals: tuple[float, ...]
    scores: tuple[float, ...]
    chosen: tuple[int, ...]


def _check_results(results: Sequence[Word]) -> int:
    if not results:
        raise ConfigurationError("nothing to vote on")
    widths = {r.width for r in results}
    if len(widths) != 1:
        raise ConfigurationError(f"result widths differ: {sorted(widths)}")
    return widths.pop()


def majority_vote(results: Sequence[Word]) -> Word:
    width = _check_results(results)
    n = len(results)
    if n % 2 == 0:
        raise ConfigurationError(f"majority vote needs an odd number of results, got {n}")
    bits = [int(sum(r.bit(i) for r in results) * 2 > n) for i in range(width)]
    return Word.from_bits(bits)


def weighted_vote(results: Sequence[Word], table: WeightTable) -> tuple[Word, VoteTrace]:
    width = _check_results(results)
    if len(results) != len(table.versions) or width != table.width:
        raise ConfigurationError(f"{len(results)} results of width {width} do not match "
                                 f"a {len(table.versions)}x{table.width} weight table")
    sums, totals, scores, chosen = [], [], [], []
    for i in range(width):
        num = tot = 0.0
        for j, r in enumerate(results):
            wj = float(table.weights[j, i])
            num += wj * r.bit(i)
            tot += wj
        if tot < EPS_TOTAL:
            ones = sum(r.bit(i) for r in results)
            s = ones / len(results)
            bit = int(2 * ones > len(results))
        else:
            s = num / tot
            bit = int(s >= THRESHOLD)
        sums.append(num)
        totals.append(tot)
        scores.append(s)
        chosen.append(bit)
    return Word.from_bits(chosen), VoteTrace(tuple(sums), tuple(totals), tuple(scores), tuple(chosen))


def majority_batch(decoded: np.ndarray, width: int) -> np.ndarray:
    """Vectorized :func:`majority_vote` over an ``(n, versions)`` int64 array."""
    n_versions = decoded.shape[1]
    if n_versions % 2 == 0:
        raise ConfigurationError(f"majority vote needs an odd number of results, got {n_versions}")
    out = np.zeros(decoded.shape[0], dtype=np.int64)
    for i in range(width):
        ones = ((decoded >> i) & 1).sum(axis=1)
        out |= (2 * ones > n_versions).astype(np.int64) << i
    return out


def weighted_batch(decoded: np.ndarray, table: WeightTable) -> np.ndarray:
    """Vectorized :func:`weighted_vote`; same summation order, so identical decisions."""
    n_versions = decoded.shape[1]
    if n_versions != len(table.versions):
        raise ConfigurationError("decoded columns do not match the weight table")
    out = np.zeros(decoded.shape[0], dtype=np.int64)
    for i in range(table.width):
        bits = (decoded >> i) & 1
        num = np.zeros(decoded.shape[0])
        tot = 0.0
        for j in range(n_versions):
            wj = float(table.weights[j, i])
            num = num + wj * bits[:, j]
            tot += wj
        if tot < EPS_TOTAL:
            chosen = 2 * bits.sum(axis=1) > n_versions
        else:
            chosen = num / tot >= THRESHOLD
        out |= chosen.astype(np.int64) << i
    return out


def ft_ealu(op: AluOp, a: Word, b: Word, faults: FaultSet | None,
            combo: Sequence[Transform], table: WeightTable | str = MAJORITY) -> Word:
    """Run every version of ``combo`` on the one ALU, then vote."""
    if len(combo) not in (3, 5):
        raise ConfigurationError(f"a combo needs 3 or 5 versions, got {len(combo)}")
    results = [execute_version(op, a, b, t, faults, version_id=j).decoded
               for j, t in enumerate(combo)]
    if isinstance(table, str):
        if table != MAJORITY:
            raise ConfigurationError(f"unknown voter {table!r}")
        return majority_vote(results)
    return weighted_vote(results, table)[0]
