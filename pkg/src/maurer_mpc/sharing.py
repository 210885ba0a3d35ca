"""Additive, replicated and verifiable secret sharing for one corrupted party.

Conventions:

* An additive sharing of ``s`` over ``n`` parties is ``(s - sum(r), r_1, ..., r_{n-1})``
  where ``r`` are the ``n - 1`` tape draws, so the adjusting share sits at index 0.
* Party ``i``'s replicated share is the additive vector with a :data:`HOLE`
  at position ``i``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    IncompleteCover,
    InconsistentShares,
    ModulusMismatch,
    NoMajority,
    OwnerMismatch,
    PartyCountTooSmall,
)
from .ring import RandomTape, RingElem, _make, ring_sum

MIN_VSS_PARTIES = 4


class _Hole:
    """Marker for the additive share a party must not know."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "HOLE"

    def __reduce__(self):
        return (_Hole, ())


HOLE = _Hole()


@dataclass(frozen=True, slots=True)
class AdditiveSharing:
    shares: tuple[RingElem, ...]

    def __len__(self) -> int:
        return len(self.shares)

    def __getitem__(self, i: int) -> RingElem:
        return self.shares[i]


@dataclass(frozen=True, slots=True)
class ReplicatedShare:
    owner: int
    entries: tuple  # RingElem everywhere except HOLE at ``owner``

    def __post_init__(self):
        if not 0 <= self.owner < len(self.entries):
            raise ValueError(f"owner {self.owner} out of range for {len(self.entries)} entries")
        for k, e in enumerate(self.entries):
            if (k == self.owner) != (e is HOLE):
                raise ValueError(f"replicated share of party {self.owner} must have its hole "
                                 f"exactly at {self.owner}: {self.entries!r}")

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def _trusted(cls, owner: int, entries: tuple) -> "ReplicatedShare":
        # For entries built here with the hole already in place.
        share = object.__new__(cls)
        object.__setattr__(share, "owner", owner)
        object.__setattr__(share, "entries", entries)
        return share

    def __getitem__(self, column: int):
        return self.entries[column]

    def with_entry(self, column: int, value: RingElem) -> "ReplicatedShare":
        if column == self.owner:
            raise ValueError("cannot fill the owner's hole")
        entries = list(self.entries)
        entries[column] = value
        return ReplicatedShare._trusted(self.owner, tuple(entries))

    @classmethod
    def from_additive(cls, shares: Sequence[RingElem], owner: int) -> "ReplicatedShare":
        if not 0 <= owner < len(shares):
            raise ValueError(f"owner {owner} out of range for {len(shares)} shares")
        entries = tuple(HOLE if k == owner else v for k, v in enumerate(shares))
        return cls._trusted(owner, entries)

    @classmethod
    def zeros(cls, owner: int, n: int, modulus: int) -> "ReplicatedShare":
        z = _make(0, modulus)
        return cls(owner, tuple(HOLE if k == owner else z for k in range(n)))


@dataclass(frozen=True)
class ShareMatrix:
    """One party's knowledge after the input phase: row ``d`` came from dealer ``d``."""

    owner: int
    rows: tuple[ReplicatedShare, ...]

    def __post_init__(self):
        for row in self.rows:
            if row.owner != self.owner:
                raise OwnerMismatch(f"row owned by {row.owner} in matrix of party {self.owner}")

    def column(self, c: int) -> tuple[RingElem, ...]:
        return tuple(row.entries[c] for row in self.rows)


def ass_share(s: RingElem, n: int, tape: RandomTape) -> AdditiveSharing:
    if n < 2:
        raise ValueError("additive sharing needs at least 2 parties")
    rest = tape.draws(n - 1)
    return AdditiveSharing((s - ring_sum(rest, s.modulus), *rest))


def ass_reconstruct(a: AdditiveSharing | Sequence[RingElem]) -> RingElem:
    shares = a.shares if isinstance(a, AdditiveSharing) else tuple(a)
    if not shares:
        raise ValueError("cannot reconstruct an empty sharing")
    return ring_sum(shares)


def replicate(a: AdditiveSharing) -> list[ReplicatedShare]:
    return [ReplicatedShare.from_additive(a.shares, i) for i in range(len(a))]


def rep_share(s: RingElem, n: int, tape: RandomTape) -> list[ReplicatedShare]:
    return replicate(ass_share(s, n, tape))


def assemble(shares: Iterable[ReplicatedShare]) -> AdditiveSharing:
    """Recover the additive sharing jointly covered by ``shares``."""
    shares = list(shares)
    if not shares:
        raise IncompleteCover("no shares given")
    n = shares[0].n
    columns: list = [None] * n
    for share in shares:
        if share.n != n:
            raise InconsistentShares("shares of different lengths")
        for c, v in enumerate(share.entries):
            if v is HOLE:
                continue
            if columns[c] is None:
                columns[c] = v
            elif columns[c] != v:
                raise InconsistentShares(f"column {c}: {columns[c]!r} vs {v!r}")
    missing = [c for c, v in enumerate(columns) if v is None]
    if missing:
        raise IncompleteCover(f"columns {missing} not covered")
    return AdditiveSharing(tuple(columns))


def rep_reconstruct(shares: Iterable[ReplicatedShare]) -> RingElem:
    return ass_reconstruct(assemble(shares))


def majority(values: Sequence[RingElem]) -> RingElem:
    """The value occurring strictly more than ``len(values) / 2`` times."""
    if not values:
        raise NoMajority("no values")
    values = list(values)
    first = values[0]
    if 2 * values.count(first) > len(values):
        return first
    value, count = Counter(values).most_common(1)[0]
    if 2 * count <= len(values):
        raise NoMajority(f"no strict majority among {list(values)!r}")
    return value


def vss_reconstruct(collected: Sequence[ReplicatedShare] | Mapping[int, ReplicatedShare]) -> RingElem:
    """Majority-vote every column over its ``n - 1`` copies, then sum.

    ``collected[k]`` is the share sent by party ``k`` and must be owned by ``k``.
    """
    if isinstance(collected, Mapping):
        collected = [collected[k] for k in range(len(collected))]
    n = len(collected)
    if n < MIN_VSS_PARTIES:
        raise PartyCountTooSmall(f"majority reconstruction needs n >= {MIN_VSS_PARTIES}, got {n}")
    for k, share in enumerate(collected):
        if share.owner != k or share.n != n:
            raise OwnerMismatch(f"slot {k} holds a share of party {share.owner}")
    rows = [share.entries for share in collected]
    m = rows[1][0].modulus
    total = 0
    for c in range(n):
        v = majority([rows[k][c] for k in range(n) if k != c])
        if v.modulus != m:
            raise ModulusMismatch(f"Z_{m} vs Z_{v.modulus}")
        total += v.value
    return _make(total % m, m)


def rep_linear_combine(rows: Sequence[ReplicatedShare], coeffs: Sequence[RingElem]) -> ReplicatedShare:
    if len(rows) != len(coeffs):
        raise ValueError(f"{len(rows)} rows but {len(coeffs)} coefficients")
    if not rows:
        raise ValueError("nothing to combine")
    owner = rows[0].owner
    n = rows[0].n
    for row in rows:
        if row.owner != owner or row.n != n:
            raise OwnerMismatch(f"cannot combine shares of parties {owner} and {row.owner}")
    m = coeffs[0].modulus
    entries = []
    for c in range(n):
        if c == owner:
            entries.append(HOLE)
            continue
        acc = 0
        for row, k in zip(rows, coeffs):
            v = row.entries[c]
            if v.modulus != m or k.modulus != m:
                raise ValueError("mixed moduli in linear combination")
            acc += k.value * v.value
        entries.append(_make(acc % m, m))
    return ReplicatedShare._trusted(owner, tuple(entries))


def rep_add(a: ReplicatedShare, b: ReplicatedShare) -> ReplicatedShare:
    if a.owner != b.owner:
        raise OwnerMismatch(f"cannot add shares of parties {a.owner} and {b.owner}")
    return ReplicatedShare._trusted(a.owner, tuple(
        HOLE if x is HOLE else x + y for x, y in zip(a.entries, b.entries)))


def rep_sub(a: ReplicatedShare, b: ReplicatedShare) -> ReplicatedShare:
    if a.owner != b.owner:
        raise OwnerMismatch(f"cannot subtract shares of parties {a.owner} and {b.owner}")
    return ReplicatedShare._trusted(a.owner, tuple(
        HOLE if x is HOLE else x - y for x, y in zip(a.entries, b.entries)))


def canonical_term_sharing(p: RingElem, owner: int, n: int) -> ReplicatedShare:
    """Party ``owner``'s share of the deterministic additive vector ``(p, 0, ..., 0)``."""
    if n < 2:
        raise ValueError("need at least 2 parties")
    z = _make(0, p.modulus)
    return ReplicatedShare.from_additive((p,) + (z,) * (n - 1), owner)


def vss_share(s: RingElem, n: int, tape: RandomTape) -> list[ReplicatedShare]:
    """Dealer side of verifiable sharing; the consistency checks run in the protocol."""
    if n < MIN_VSS_PARTIES:
        raise PartyCountTooSmall(f"verifiable sharing needs n >= {MIN_VSS_PARTIES}, got {n}")
    return rep_share(s, n, tape)
