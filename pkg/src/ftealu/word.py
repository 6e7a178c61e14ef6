"""Fixed-width words and the reference ALU.

Values are unsigned; ADD and SUB wrap modulo ``2**width`` and report the
carry (or borrow) out separately.  Every diversified execution version runs
on :func:`alu_raw`, the one shared datapath.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

MAX_WIDTH = 32


class AluOp(enum.Enum):
    AND = 0
    OR = 1
    XOR = 2
    NOT = 3
    ADD = 4
    SUB = 5

    @property
    def is_arithmetic(self) -> bool:
        return self in (AluOp.ADD, AluOp.SUB)

    @property
    def is_unary(self) -> bool:
        return self is AluOp.NOT

    @classmethod
    def parse(cls, name: str | AluOp) -> AluOp:
        if isinstance(name, AluOp):
            return name
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ConfigurationError(f"unknown ALU operation {name!r}") from None


ALL_OPS = tuple(AluOp)
LOGIC_OPS = (AluOp.AND, AluOp.OR, AluOp.XOR, AluOp.NOT)
ARITH_OPS = (AluOp.ADD, AluOp.SUB)


def check_width(width: int) -> int:
    if not isinstance(width, (int, np.integer)) or width < 2 or width > MAX_WIDTH or width % 2:
        raise ConfigurationError(f"width must be an even integer in 2..{MAX_WIDTH}, got {width!r}")
    return int(width)


def mask(width: int) -> int:
    return (1 << width) - 1


@dataclass(frozen=True)
class Word:
    """An unsigned ``width``-bit value; bit 0 is the LSB."""

    width: int
    value: int

    def __post_init__(self):
        check_width(self.width)
        if not 0 <= int(self.value) <= mask(self.width):
            raise ConfigurationError(f"value {self.value} does not fit in {self.width} bits")
        object.__setattr__(self, "value", int(self.value))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> Word:
        if any(b not in (0, 1) for b in bits):
            raise ConfigurationError("bits must be 0 or 1")
        return cls(len(bits), sum(b << i for i, b in enumerate(bits)))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.width))

    def bit(self, i: int) -> int:
        return (self.value >> i) & 1

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b")


@dataclass(frozen=True)
class CarryIO:
    carry_in: int = 0
    carry_out: int = 0


def alu_raw(op: AluOp, a, b, carry_term=0):
    """Unmasked datapath output.

    ``carry_term`` is added (ADD) or subtracted (SUB) alongside the operands and
    ignored by logic ops.  Works on Python ints and int64 arrays alike; callers
    slice the result field and the carry bit out of the raw value.
    """
    if op is AluOp.ADD:
        return a + b + carry_term
    if op is AluOp.SUB:
        return a - b - carry_term
    if op is AluOp.AND:
        return a & b
    if op is AluOp.OR:
        return a | b
    if op is AluOp.XOR:
        return a ^ b
    if op is AluOp.NOT:
        return ~a
    raise ConfigurationError(f"unsupported op {op!r}")


def _same_width(a: Word, b: Word) -> int:
    if a.width != b.width:
        raise ConfigurationError(f"operand widths differ: {a.width} vs {b.width}")
    return a.width


def alu_exec(op: AluOp, a: Word, b: Word, carry: CarryIO = CarryIO()) -> tuple[Word, CarryIO]:
    width = _same_width(a, b)
    if not op.is_arithmetic:
        raw = alu_raw(op, a.value, b.value)
        return Word(width, raw & mask(width)), CarryIO(0, 0)
    cin = carry.carry_in & 1
    raw = alu_raw(op, a.value, b.value, cin)
    return Word(width, raw & mask(width)), CarryIO(cin, (raw >> width) & 1)


def golden(op: AluOp, a: Word, b: Word) -> Word:
    width = _same_width(a, b)
    return Word(width, alu_raw(op, a.value, b.value) & mask(width))


def golden_batch(op: AluOp, a: np.ndarray, b: np.ndarray, width: int) -> np.ndarray:
    """Vectorized :func:`golden` over int64 operand arrays."""
    return alu_raw(op, np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) & mask(width)
