"""Pure functions relating the adversary's view to the honest parties' state."""

from __future__ import annotations

from typing import Mapping, Sequence

from .errors import PreconditionError
from .ring import RingElem, _make, ring_sum
from .sharing import HOLE, ReplicatedShare, majority


def extract_input(honest_rows: Mapping[int, ReplicatedShare], advid: int) -> RingElem:
    """The input the corrupted dealer is committed to.

    ``honest_rows[p]`` is honest party ``p``'s stored share from dealer
    ``advid`` after complaints were resolved. Each additive share is the
    majority over the honest parties holding it.
    """
    if not honest_rows:
        raise PreconditionError("no honest rows to extract from")
    n = next(iter(honest_rows.values())).n
    columns = []
    for c in range(n):
        copies = [honest_rows[p].entries[c] for p in sorted(honest_rows) if p != c and p != advid]
        columns.append(majority(copies))
    return ring_sum(columns)


def finalmsg(advid: int, y: RingElem, pviewadv: Sequence) -> tuple[tuple, ...]:
    """Honest final messages implied by the output ``y`` and the adversary's result share.

    Row ``i`` is what honest party ``i`` sends in the output phase. The one
    additive share the adversary lacks is fixed by the sum constraint.
    """
    n = len(pviewadv)
    if pviewadv[advid] is not HOLE:
        raise PreconditionError(f"adversary share must have its hole at {advid}")
    missing = y - ring_sum((v for k, v in enumerate(pviewadv) if k != advid), y.modulus)
    rows = []
    for i in range(n):
        if i == advid:
            rows.append((HOLE,) * n)
            continue
        rows.append(tuple(HOLE if j == i else missing if j == advid else pviewadv[j]
                          for j in range(n)))
    return tuple(rows)


def comp_matrix(honest_results: Mapping[int, ReplicatedShare], advid: int, n: int) -> tuple[tuple, ...]:
    """The honest result shares arranged as an n x n matrix; the adversary's row is empty."""
    return tuple((HOLE,) * n if i == advid else honest_results[i].entries for i in range(n))


def zero_share(owner: int, n: int, modulus: int) -> ReplicatedShare:
    z = _make(0, modulus)
    return ReplicatedShare(owner, tuple(HOLE if k == owner else z for k in range(n)))
