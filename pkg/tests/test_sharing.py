import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from maurer_mpc.errors import (
    IncompleteCover,
    InconsistentShares,
    NoMajority,
    OwnerMismatch,
    PartyCountTooSmall,
)
from maurer_mpc.ring import RandomTape, RingElem
from maurer_mpc.sharing import (
    HOLE,
    AdditiveSharing,
    ReplicatedShare,
    ShareMatrix,
    ass_reconstruct,
    ass_share,
    canonical_term_sharing,
    majority,
    rep_add,
    rep_linear_combine,
    rep_reconstruct,
    rep_share,
    replicate,
    vss_reconstruct,
    vss_share,
)


def R(v, m=7):
    return RingElem(v, m)


def vals(share):
    return tuple(None if e is HOLE else e.value for e in share.entries)


def test_ass_example():
    a = ass_share(R(3), 4, RandomTape((2, 5, 1), 7))
    assert [x.value for x in a.shares] == [2, 2, 5, 1]
    assert ass_reconstruct(a) == R(3)


def test_ass_zero_tape():
    a = ass_share(R(0), 4, RandomTape.zeros(7))
    assert all(x == R(0) for x in a.shares)


def test_ass_marginals_uniform():
    for s in (0, 3):
        counts = [Counter() for _ in range(4)]
        for tape in itertools.product(range(7), repeat=3):
            for i, x in enumerate(ass_share(R(s), 4, RandomTape(tape, 7)).shares):
                counts[i][x.value] += 1
        for c in counts:
            assert c == Counter({v: 49 for v in range(7)})


def test_rep_example():
    shares = rep_share(R(3), 4, RandomTape((2, 5, 1), 7))
    assert vals(shares[1]) == (2, None, 5, 1) and shares[1].owner == 1
    assert all(s.entries[s.owner] is HOLE for s in shares)


def test_replicated_share_invariant():
    with pytest.raises(ValueError):
        ReplicatedShare(1, (R(1), R(2), R(3)))
    with pytest.raises(ValueError):
        ReplicatedShare(0, (HOLE, HOLE, R(3)))


def test_any_n_minus_one_shares_determine_all():
    rng = random.Random(1)
    for _ in range(50):
        tape = RandomTape([rng.randrange(7) for _ in range(3)], 7)
        s = R(rng.randrange(7))
        a = ass_share(s, 4, RandomTape(tape.elements, 7))
        shares = replicate(a)
        for missing in range(4):
            subset = [x for k, x in enumerate(shares) if k != missing]
            assert rep_reconstruct(subset) == s


def test_rep_reconstruct_errors():
    shares = rep_share(R(3), 4, RandomTape((2, 5, 1), 7))
    assert rep_reconstruct(shares[:2]) == R(3)
    with pytest.raises(IncompleteCover):
        rep_reconstruct(shares[:1])
    bad = shares[1].with_entry(2, R(0))
    with pytest.raises(InconsistentShares):
        rep_reconstruct([shares[0], bad])


def test_majority():
    assert majority([R(4, 11), R(4, 11), R(9, 11)]) == R(4, 11)
    assert majority([R(7, 11)] * 3) == R(7, 11)
    with pytest.raises(NoMajority):
        majority([R(1), R(2), R(3)])
    with pytest.raises(NoMajority):
        majority([R(1), R(1), R(2), R(2)])
    with pytest.raises(NoMajority):
        majority([])


def test_vss_reconstruct_tolerates_one_bad_row():
    rng = random.Random(7)
    for _ in range(100):
        s = R(rng.randrange(7))
        shares = vss_share(s, 4, RandomTape.seeded(rng.randrange(2**32), 7))
        for k in range(4):
            junk = tuple(HOLE if c == k else R(rng.randrange(7)) for c in range(4))
            corrupted = list(shares)
            corrupted[k] = ReplicatedShare(k, junk)
            assert vss_reconstruct(corrupted) == s


def test_vss_needs_four_parties():
    shares = rep_share(R(1), 3, RandomTape.zeros(7))
    with pytest.raises(PartyCountTooSmall):
        vss_reconstruct(shares)
    with pytest.raises(PartyCountTooSmall):
        vss_share(R(1), 3, RandomTape.zeros(7))


def test_vss_owner_check():
    shares = rep_share(R(1), 4, RandomTape.zeros(7))
    with pytest.raises(OwnerMismatch):
        vss_reconstruct([shares[1], shares[0], shares[2], shares[3]])
    assert vss_reconstruct({k: shares[k] for k in range(4)}) == R(1)


def test_linear_combine():
    m = 5
    a = rep_share(R(2, m), 4, RandomTape((1, 4, 3), m))
    b = rep_share(R(3, m), 4, RandomTape((0, 2, 2), m))
    one = R(1, m)
    combined = [rep_linear_combine([a[i], b[i]], [one, one]) for i in range(4)]
    assert rep_reconstruct(combined) == R(0, m)
    assert rep_linear_combine([a[1]], [one]) == a[1]
    assert rep_add(a[2], b[2]) == combined[2]
    with pytest.raises(OwnerMismatch):
        rep_linear_combine([a[0], b[1]], [one, one])


def test_canonical_term_sharing():
    assert vals(canonical_term_sharing(R(3), 1, 4)) == (3, None, 0, 0)
    assert vals(canonical_term_sharing(R(0), 2, 4)) == (0, 0, None, 0)
    shares = [canonical_term_sharing(R(5), k, 4) for k in range(4)]
    assert vss_reconstruct(shares) == R(5)


def test_share_matrix_owner():
    shares = rep_share(R(1), 4, RandomTape.zeros(7))
    mat = ShareMatrix(2, (shares[2], shares[2]))
    assert mat.column(0) == (R(1), R(1))  # zero tape: share 0 is the secret
    with pytest.raises(OwnerMismatch):
        ShareMatrix(1, (shares[2],))


@given(st.sampled_from([2, 3, 5, 7, 101]), st.integers(4, 6), st.data())
def test_roundtrip_property(m, n, data):
    s = RingElem.of(data.draw(st.integers()), m)
    tape = RandomTape([data.draw(st.integers(0, m - 1)) for _ in range(n - 1)], m)
    shares = rep_share(s, n, tape)
    assert vss_reconstruct(shares) == s
    assert rep_reconstruct(shares[:2]) == s
    additive = shares[1].entries[:1] + shares[0].entries[1:]
    assert ass_reconstruct(AdditiveSharing(additive)) == s
