"""Arithmetic in Z_m and the random tapes that feed every sampling step.

All randomness in a protocol run is read from a single :class:`RandomTape`.
A tape is either an explicit finite sequence (used when enumerating every
possible execution) or an unbounded stream produced by a seeded PRNG.
"""

from __future__ import annotations

import random
from typing import Callable, Iterable, Sequence

from .errors import ModulusMismatch, TapeExhausted

DEFAULT_MODULUS = 5


class RingElem:
    """A residue ``value`` in ``Z_modulus``. Immutable.

    Elements of small rings are interned, so equal values are usually the
    same object; equality never relies on that.
    """

    __slots__ = ("value", "modulus")

    def __new__(cls, value: int, modulus: int):
        if modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {modulus}")
        if not 0 <= value < modulus:
            raise ValueError(f"{value} is not a residue mod {modulus}")
        return _make(value, modulus)

    @classmethod
    def of(cls, value: int, modulus: int) -> "RingElem":
        """Reduce an arbitrary integer into the ring."""
        if modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {modulus}")
        return _make(value % modulus, modulus)

    def _check(self, other: "RingElem") -> None:
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"Z_{self.modulus} vs Z_{other.modulus}")

    def __add__(self, other: "RingElem") -> "RingElem":
        if self.modulus != other.modulus:
            self._check(other)
        return _make((self.value + other.value) % self.modulus, self.modulus)

    def __sub__(self, other: "RingElem") -> "RingElem":
        if self.modulus != other.modulus:
            self._check(other)
        return _make((self.value - other.value) % self.modulus, self.modulus)

    def __mul__(self, other: "RingElem") -> "RingElem":
        if self.modulus != other.modulus:
            self._check(other)
        return _make((self.value * other.value) % self.modulus, self.modulus)

    def __neg__(self) -> "RingElem":
        return _make(-self.value % self.modulus, self.modulus)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.value == other.value and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash((self.value, self.modulus))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.modulus})"

    def __reduce__(self):
        return (RingElem, (self.value, self.modulus))


_INTERN_MAX = 1 << 12
_TABLES: dict[int, tuple[RingElem, ...]] = {}


def _raw(value: int, modulus: int) -> RingElem:
    e = object.__new__(RingElem)
    e.value = value
    e.modulus = modulus
    return e


def _make(value: int, modulus: int) -> RingElem:
    # Skips validation; callers guarantee 0 <= value < modulus.
    table = _TABLES.get(modulus)
    if table is not None:
        return table[value]
    if modulus <= _INTERN_MAX:
        table = _TABLES[modulus] = tuple(_raw(v, modulus) for v in range(modulus))
        return table[value]
    return _raw(value, modulus)


def zero(modulus: int) -> RingElem:
    return _make(0, modulus)


def add(a: RingElem, b: RingElem) -> RingElem:
    return a + b


def sub(a: RingElem, b: RingElem) -> RingElem:
    return a - b


def mul(a: RingElem, b: RingElem) -> RingElem:
    return a * b


def ring_sum(values: Iterable[RingElem], modulus: int | None = None) -> RingElem:
    """Sum a sequence of ring elements.

    The modulus is taken from the elements; an empty sequence needs it
    passed explicitly and sums to zero.
    """
    total = 0
    m = modulus
    for v in values:
        if m is None:
            m = v.modulus
        elif v.modulus != m:
            raise ModulusMismatch(f"Z_{m} vs Z_{v.modulus}")
        total += v.value
    if m is None:
        raise ValueError("sum of an empty sequence needs an explicit modulus")
    return _make(total % m, m)


class RandomTape:
    """Ordered source of uniform ring elements, consumed front to back.

    ``elements`` may be extended lazily by ``refill`` (seeded mode); without a
    refill function, reading past the end raises :class:`TapeExhausted`.
    """

    def __init__(self, elements: Sequence[RingElem | int], modulus: int,
                 refill: Callable[[], int] | None = None):
        self.modulus = modulus
        self.elements: list[RingElem] = [
            e if isinstance(e, RingElem) else RingElem(e, modulus) for e in elements
        ]
        for e in self.elements:
            if e.modulus != modulus:
                raise ModulusMismatch(f"tape over Z_{modulus} holds {e!r}")
        self.cursor = 0
        self._refill = refill

    @classmethod
    def seeded(cls, seed: int, modulus: int) -> "RandomTape":
        if not 0 <= seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        rng = random.Random(seed)
        return cls((), modulus, refill=lambda: rng.randrange(modulus))

    @classmethod
    def zeros(cls, modulus: int) -> "RandomTape":
        """Unbounded all-zero tape; its cursor counts how many draws a run makes."""
        return cls((), modulus, refill=lambda: 0)

    def draw(self) -> RingElem:
        if self.cursor >= len(self.elements):
            if self._refill is None:
                raise TapeExhausted(f"tape of length {len(self.elements)} exhausted")
            self.elements.append(_make(self._refill(), self.modulus))
        e = self.elements[self.cursor]
        self.cursor += 1
        return e

    def draws(self, k: int) -> list[RingElem]:
        return [self.draw() for _ in range(k)]

    @property
    def consumed(self) -> tuple[RingElem, ...]:
        return tuple(self.elements[: self.cursor])


def draw(tape: RandomTape) -> RingElem:
    return tape.draw()
