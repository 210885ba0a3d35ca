"""Local behaviour of one protocol participant.

A :class:`Party` never talks to the network itself. The engine asks it for
outgoing messages, feeds it what it sent and received, and signals local
steps through :meth:`Party.on_event`. Because its state is a function of that
stream alone, replaying any transcript through a fresh ``Party`` recomputes
what an honest party would hold in that position (see :func:`replay`).

Sharing ids (``sid``) name every verifiably shared value:

* ``(0, d)``: dealer ``d``'s input;
* ``(1, g, i, j, d)``: dealer ``d``'s sharing of the term ``a_i * b_j`` of
  multiplication gate ``g``.

A VSS batch groups the sharings checked together: ``(0,)`` for the inputs,
``(1, g)`` for the terms of gate ``g``.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache

from .circuit import Add, Circuit, Input, Mul
from .network import BROADCAST, NOTIFY, RECEIVED, SENT, Transcript
from .ring import RandomTape, RingElem, _make
from .sharing import (
    HOLE,
    ReplicatedShare,
    canonical_term_sharing,
    majority,
    rep_add,
    rep_share,
    rep_sub,
    vss_reconstruct,
)

INPUT_BATCH = (0,)
DEAL_KINDS = ("share", "term")


def input_sid(dealer: int) -> tuple:
    return (0, dealer)


def term_sid(gate: int, i: int, j: int, dealer: int) -> tuple:
    return (1, gate, i, j, dealer)


def term_batch(gate: int) -> tuple:
    return (1, gate)


def term_dealers(n: int, i: int, j: int) -> tuple[int, ...]:
    """Parties that know both a_i and b_j."""
    return tuple(d for d in range(n) if d != i and d != j)


@lru_cache(maxsize=None)
def batch_sids(n: int, batch: tuple) -> tuple[tuple, ...]:
    if batch == INPUT_BATCH:
        return tuple(input_sid(d) for d in range(n))
    g = batch[1]
    return tuple(term_sid(g, i, j, d)
                 for i in range(n) for j in range(n) for d in term_dealers(n, i, j))


@lru_cache(maxsize=None)
def mult_pairs(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """Every (i, j, d1, d2) with d1 < d2 both dealers of term (i, j)."""
    pairs = []
    for i in range(n):
        for j in range(n):
            ds = term_dealers(n, i, j)
            for x, d1 in enumerate(ds):
                for d2 in ds[x + 1:]:
                    pairs.append((i, j, d1, d2))
    return tuple(pairs)


class Party:
    def __init__(self, index: int, n: int, modulus: int, circuit: Circuit,
                 input_value: RingElem | None = None, tape: RandomTape | None = None):
        self.index = index
        self.n = n
        self.modulus = modulus
        self.circuit = circuit
        self.input = input_value
        self.tape = tape
        self.rows: dict[tuple, ReplicatedShare] = {}
        self.sent_deals: dict[tuple, dict[int, ReplicatedShare]] = {}
        self.copies: dict[tuple, dict[int, tuple]] = {}
        self.complaints: dict[tuple, dict[int, tuple]] = {}
        self.reveals: dict[tuple, dict[int, tuple]] = {}
        self.diffs: dict[tuple, dict[int, tuple]] = {}
        self.reports: dict[tuple, dict[int, tuple]] = {}
        self.results: dict[int, ReplicatedShare] = {}
        self.other: list = []
        self.wires: dict[int, ReplicatedShare] = {}
        self.opened: dict[int, tuple[RingElem, ...]] = {}
        self.disputed: dict[int, tuple[tuple[int, int], ...]] = {}
        self.aborted = False
        self._diff_cache: dict[int, tuple] = {}

    # -- message intake -------------------------------------------------

    def receive(self, messages) -> None:
        for m in messages:
            self._store(m.sender, m)

    def record_sent(self, messages) -> None:
        for m in messages:
            if m.kind in DEAL_KINDS:
                self.sent_deals.setdefault(m.slot, {})[m.receiver] = m.payload
            elif m.receiver == BROADCAST:
                self._store(self.index, m)

    def _store(self, sender: int, m) -> None:
        kind = m.kind
        if kind in DEAL_KINDS:
            self.rows[m.slot] = m.payload
        elif kind == "copy":
            self.copies.setdefault(m.slot, {})[sender] = m.payload
        elif kind == "complaint":
            self.complaints.setdefault(m.slot, {})[sender] = m.payload
        elif kind == "reveal":
            self.reveals.setdefault(m.slot, {})[sender] = m.payload
        elif kind == "diff":
            self.diffs.setdefault(m.slot, {})[sender] = m.payload
        elif kind == "report":
            self.reports.setdefault(m.slot, {})[sender] = m.payload
        elif kind == "result":
            self.results[sender] = m.payload
        else:
            self.other.append(m)

    def on_event(self, kind: str, slot: tuple) -> None:
        if kind == "vss_done":
            self.finish_vss(slot)
        elif kind == "localsum":
            self.add_gate(slot[0])
        elif kind == "diff_open":
            self.open_diffs(slot[0])
        elif kind == "localmultsum":
            self.finish_mul(slot[0])

    # -- sharings this party holds --------------------------------------

    def row(self, sid: tuple) -> ReplicatedShare:
        r = self.rows.get(sid)
        if r is None and sid[-1] == self.index:
            r = self.rows[sid] = self._derive_own(sid)
        return r

    def _derive_own(self, sid: tuple) -> ReplicatedShare:
        # What the holders of each column were sent; for an honest dealer this
        # is just its own replicated share.
        return ReplicatedShare(self.index, tuple(HOLE if c == self.index else self.answer(sid, c)
                                                 for c in range(self.n)))

    def answer(self, sid: tuple, column: int) -> RingElem:
        """Value of ``column`` this party dealt for ``sid`` (lowest holder's copy)."""
        sent = self.sent_deals[sid]
        for r in sorted(sent):
            if r != column:
                return sent[r].entries[column]
        raise KeyError((sid, column))

    # -- input phase ------------------------------------------------------

    def deal_input(self) -> list:
        shares = rep_share(self.input, self.n, self.tape)
        sid = input_sid(self.index)
        return [(r, "share", sid, shares[r]) for r in range(self.n) if r != self.index]

    def copy_messages(self, batch: tuple) -> list:
        """Send every other holder the columns both of us know, for every sharing."""
        rows = [self.row(sid).entries for sid in batch_sids(self.n, batch)]
        out = []
        for q in range(self.n):
            if q == self.index:
                continue
            payload = tuple(row[:q] + (HOLE,) + row[q + 1:] for row in rows)
            out.append((q, "copy", batch, payload))
        return out

    def complaint_messages(self, batch: tuple) -> list:
        sids = batch_sids(self.n, batch)
        mine = [self.row(sid).entries for sid in sids]
        me = self.index
        found = set()
        for q, payload in self.copies.get(batch, {}).items():
            for sid, own, copy in zip(sids, mine, payload):
                for c in range(self.n):
                    x, y = copy[c], own[c]
                    if x is not y and c != me and c != q and x != y:
                        found.add(sid + (c,))
        if not found:
            return []
        return [(BROADCAST, "complaint", batch, tuple(sorted(found)))]

    def requests(self, batch: tuple) -> dict[tuple, tuple[int, ...]]:
        """Shares the dealers must broadcast: a strict majority of their holders complained."""
        valid = set(batch_sids(self.n, batch))
        counts: Counter = Counter()
        for sender, items in self.complaints.get(batch, {}).items():
            for item in set(items):
                if not isinstance(item, tuple) or len(item) < 2:
                    continue
                sid, c = item[:-1], item[-1]
                if sid in valid and isinstance(c, int) and 0 <= c < self.n and sender != c:
                    counts[(sid, c)] += 1
        req: dict[tuple, list[int]] = {}
        for (sid, c), k in counts.items():
            if 2 * k > self.n - 1:
                req.setdefault(sid, []).append(c)
        return {sid: tuple(sorted(cs)) for sid, cs in sorted(req.items())}

    def reveal_messages(self, batch: tuple) -> list:
        items = tuple(sid + (c, self.answer(sid, c))
                      for sid, cols in self.requests(batch).items() if sid[-1] == self.index
                      for c in cols)
        if not items:
            return []
        return [(BROADCAST, "reveal", batch, items)]

    def finish_vss(self, batch: tuple) -> None:
        sids = batch_sids(self.n, batch)
        for sid in sids:
            if sid[-1] == self.index:
                self.rows[sid] = self.row(sid)
        revealed = {}
        for dealer, items in self.reveals.get(batch, {}).items():
            for item in items:
                sid, c, v = item[:-2], item[-2], item[-1]
                if sid[-1] == dealer and isinstance(v, RingElem) and v.modulus == self.modulus:
                    revealed[(sid, c)] = v
        zero = _make(0, self.modulus)
        for sid, cols in self.requests(batch).items():
            for c in cols:
                v = revealed.get((sid, c))
                if v is None:
                    if batch == INPUT_BATCH:
                        self.aborted = True
                        continue
                    v = zero
                if c != self.index:
                    self.rows[sid] = self.rows[sid].with_entry(c, v)
        if batch == INPUT_BATCH and not self.aborted:
            for g, gate in enumerate(self.circuit.gates):
                if isinstance(gate, Input):
                    self.wires[g] = self.rows[input_sid(gate.party)]

    def share_matrix_rows(self) -> tuple[ReplicatedShare, ...]:
        return tuple(self.rows[input_sid(d)] for d in range(self.n))

    # -- computation --------------------------------------------------------

    def add_gate(self, g: int) -> None:
        gate = self.circuit.gates[g]
        self.wires[g] = rep_add(self.wires[gate.left], self.wires[gate.right])

    def _operands(self, g: int) -> tuple[ReplicatedShare, ReplicatedShare]:
        gate = self.circuit.gates[g]
        return self.wires[gate.left], self.wires[gate.right]

    def term_product(self, g: int, i: int, j: int) -> RingElem:
        a, b = self._operands(g)
        return a.entries[i] * b.entries[j]

    def deal_term(self, g: int, i: int, j: int, value: RingElem | None = None) -> list:
        if value is None:
            value = self.term_product(g, i, j)
        shares = rep_share(value, self.n, self.tape)
        sid = term_sid(g, i, j, self.index)
        return [(r, "term", sid, shares[r]) for r in range(self.n) if r != self.index]

    def deal_terms(self, g: int) -> list:
        out = []
        me = self.index
        for i in range(self.n):
            for j in range(self.n):
                if i != me and j != me:
                    out.extend(self.deal_term(g, i, j))
        return out

    def own_diffs(self, g: int) -> tuple[ReplicatedShare, ...]:
        cached = self._diff_cache.get(g)
        if cached is not None:
            return cached
        rows = self.rows
        cached = tuple(rep_sub(rows[term_sid(g, i, j, d1)], rows[term_sid(g, i, j, d2)])
                       for i, j, d1, d2 in mult_pairs(self.n))
        self._diff_cache[g] = cached
        return cached

    def diff_messages(self, g: int) -> list:
        diffs = self.own_diffs(g)
        return [(r, "diff", (g,), diffs) for r in range(self.n) if r != self.index]

    def open_diffs(self, g: int) -> None:
        own = self.own_diffs(g)
        received = self.diffs.get((g,), {})
        opened = []
        for k in range(len(own)):
            collected = [own[k] if s == self.index else received[s][k] for s in range(self.n)]
            opened.append(vss_reconstruct(collected))
        self.opened[g] = tuple(opened)
        self.disputed[g] = tuple(sorted({(i, j) for (i, j, _, _), v in zip(mult_pairs(self.n), opened)
                                         if v.value != 0}))

    def report_needs(self, g: int) -> tuple[tuple[int, int], ...]:
        """(operand, column) values to be reported; operand 0 is a, 1 is b."""
        needs = set()
        for i, j in self.disputed.get(g, ()):
            needs.add((0, i))
            needs.add((1, j))
        return tuple(sorted(needs))

    def report_messages(self, g: int) -> list:
        a, b = self._operands(g)
        items = tuple((w, c, (a if w == 0 else b).entries[c])
                      for w, c in self.report_needs(g) if c != self.index)
        if not items:
            return []
        return [(r, "report", (g,), items) for r in range(self.n) if r != self.index]

    def agreed_value(self, g: int, which: int, column: int) -> RingElem:
        """Majority over everything reported for one operand column (own copy included)."""
        values = []
        if column != self.index:
            values.append(self._operands(g)[which].entries[column])
        for sender, items in sorted(self.reports.get((g,), {}).items()):
            if sender == column or sender == self.index:
                continue
            for item in items:
                if len(item) == 3 and item[0] == which and item[1] == column:
                    values.append(item[2])
                    break
        return majority(values)

    def finish_mul(self, g: int) -> None:
        n, me, m = self.n, self.index, self.modulus
        disputed = set(self.disputed.get(g, ()))
        acc = [0] * n
        for i in range(n):
            for j in range(n):
                if (i, j) in disputed:
                    p = self.agreed_value(g, 0, i) * self.agreed_value(g, 1, j)
                    share = canonical_term_sharing(p, me, n)
                else:
                    share = self.rows[term_sid(g, i, j, term_dealers(n, i, j)[0])]
                for c, v in enumerate(share.entries):
                    if c != me:
                        acc[c] += v.value
        self.wires[g] = ReplicatedShare(me, tuple(HOLE if c == me else _make(acc[c] % m, m)
                                                  for c in range(n)))

    # -- output ---------------------------------------------------------------

    def result_share(self) -> ReplicatedShare:
        return self.wires[self.circuit.output]

    def result_messages(self) -> list:
        share = self.result_share()
        return [(r, "result", (), share) for r in range(self.n) if r != self.index]

    def output(self) -> RingElem:
        own = self.result_share()
        collected = [own if s == self.index else self.results[s] for s in range(self.n)]
        return vss_reconstruct(collected)


def replay(transcript: Transcript, n: int, modulus: int, circuit: Circuit) -> Party:
    """Run the honest local computation over a recorded transcript."""
    party = Party(transcript.owner, n, modulus, circuit)
    for direction, m in transcript.log:
        if direction == SENT:
            party.record_sent((m,))
        elif direction == RECEIVED:
            party.receive((m,))
        elif direction == NOTIFY:
            party.on_event(m.kind, m.slot)
    return party
