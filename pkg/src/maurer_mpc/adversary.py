"""The corrupted party: hook interface and the shipped cheating strategies.

The engine never lets a strategy touch honest state. It calls hooks with the
information the corrupted party legitimately has and delivers whatever they
return. Every :class:`Adversary` keeps an internal honest :class:`Party`
(``self.party``) that is fed exactly the corrupted party's messages and local
steps, so strategies can ask "what would an honest party send here" and
then perturb it.

Hooks return per-receiver maps ``{receiver: payload}``; a receiver missing
from the map gets nothing (or a zero default where the protocol needs a
value), and the entry for the corrupted party itself is ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Circuit
from .errors import ConfigError
from .network import Transcript
from .party import Party
from .ring import RandomTape, RingElem, _make
from .sharing import HOLE, ReplicatedShare, rep_share


class _Refuse:
    def __repr__(self) -> str:
        return "REFUSE"


REFUSE = _Refuse()


@dataclass
class AdversaryContext:
    advid: int
    n: int
    modulus: int
    circuit: Circuit
    input: RingElem
    tape: RandomTape


@dataclass
class AdversaryState:
    advid: int
    input: RingElem
    log: Transcript
    scratch: dict = field(default_factory=dict)


class Adversary:
    """Honest behaviour; subclasses override individual hooks."""

    name = "honest"

    def setup(self, ctx: AdversaryContext, log: Transcript) -> None:
        self.ctx = ctx
        self.state = AdversaryState(ctx.advid, ctx.input, log)
        self.party = Party(ctx.advid, ctx.n, ctx.modulus, ctx.circuit, self.dealt_input(), ctx.tape)

    def dealt_input(self) -> RingElem:
        """The value the corrupted party feeds into the input phase."""
        return self.ctx.input

    @property
    def advid(self) -> int:
        return self.ctx.advid

    def _others(self):
        return [r for r in range(self.ctx.n) if r != self.ctx.advid]

    # -- delivery (called by the network) ---------------------------------

    def observe(self, messages) -> None:
        self.party.receive(messages)
        by_kind: dict[str, list] = {}
        for m in messages:
            by_kind.setdefault(m.kind, []).append(m)
        for kind, msgs in by_kind.items():
            if kind in ("share", "term"):
                self.recv_shares(msgs)
            elif kind == "complaint":
                self.recv_rx(msgs)
            elif kind == "reveal":
                self.recv_bx(msgs)
            else:
                self.recv_other(msgs)

    def observe_sent(self, messages) -> None:
        self.party.record_sent(messages)

    def notify(self, kind: str, slot: tuple) -> None:
        self.party.on_event(kind, slot)
        if kind in ("localsum", "localmultsum"):
            self.localsum(kind, slot)

    def recv_shares(self, messages) -> None:
        pass

    def recv_rx(self, messages) -> None:
        pass

    def recv_bx(self, messages) -> None:
        pass

    def recv_other(self, messages) -> None:
        pass

    def localsum(self, kind: str, slot: tuple) -> None:
        pass

    # -- input phase ------------------------------------------------------

    def deal_input_shares(self) -> dict[int, ReplicatedShare]:
        return {r: p for r, _, _, p in self.party.deal_input()}

    def consistency_copies(self, batch: tuple) -> dict[int, tuple]:
        return {r: p for r, _, _, p in self.party.copy_messages(batch)}

    def complaints(self, batch: tuple) -> tuple:
        """(sid..., column) items to broadcast as complaints."""
        msgs = self.party.complaint_messages(batch)
        return msgs[0][3] if msgs else ()

    def answer_complaints(self, batch: tuple, requests: dict[tuple, tuple[int, ...]]):
        """Values to broadcast for complained-about shares, or :data:`REFUSE`."""
        return {sid: {c: self.party.answer(sid, c) for c in cols} for sid, cols in requests.items()}

    # -- multiplication -----------------------------------------------------

    def term_share(self, gate: int, i: int, j: int) -> dict[int, ReplicatedShare]:
        return {r: p for r, _, _, p in self.party.deal_term(gate, i, j)}

    def open_difference(self, gate: int, values: tuple) -> dict[int, tuple]:
        """``values`` are the honest shares of every term difference."""
        return {r: values for r in self._others()}

    def dispute_report(self, gate: int, which: int, column: int) -> dict[int, RingElem]:
        a, b = self.party._operands(gate)
        v = (a if which == 0 else b).entries[column]
        return {r: v for r in self._others()}

    # -- output -------------------------------------------------------------

    def bxshareofres(self, psums: dict[int, ReplicatedShare]) -> dict[int, ReplicatedShare]:
        share = self.party.result_share()
        return {r: share for r in self._others()}

    def getres(self):
        return self.party.output()


class HonestPassive(Adversary):
    name = "honest"


class InputSubstitution(Adversary):
    """Follows the protocol on a substituted input."""

    name = "input-substitution"

    def __init__(self, value: int):
        self.value = value

    def dealt_input(self) -> RingElem:
        return RingElem.of(self.value, self.ctx.modulus)


def _bump(share: ReplicatedShare, column: int, delta: int) -> ReplicatedShare:
    v = share.entries[column]
    return share.with_entry(column, _make((v.value + delta) % v.modulus, v.modulus))


class InconsistentDealer(Adversary):
    """Hands the first two honest parties different copies of the third one's column."""

    name = "inconsistent-dealer"

    def deal_input_shares(self):
        shares = super().deal_input_shares()
        r1, r2, c = self._others()[:3]
        shares[r2] = _bump(shares[r2], c, 1)
        return shares


class RefuseBroadcast(InconsistentDealer):
    name = "refuse-broadcast"

    def answer_complaints(self, batch, requests):
        return REFUSE


class WrongResultShare(Adversary):
    """Sends every honest party a differently corrupted result share."""

    name = "wrong-result-share"

    def bxshareofres(self, psums):
        share = self.party.result_share()
        rows = {}
        for r in self._others():
            entries = tuple(HOLE if e is HOLE else _make((e.value + r + 1) % e.modulus, e.modulus)
                            for e in share.entries)
            rows[r] = ReplicatedShare(share.owner, entries)
        return rows


class WrongTermSharing(Adversary):
    """Shares a_i * b_j + 1 instead of the true product for every term it deals."""

    name = "wrong-term-sharing"

    def term_share(self, gate, i, j):
        p = self.party.term_product(gate, i, j)
        shares = rep_share(p + _make(1 % p.modulus, p.modulus), self.ctx.n, self.ctx.tape)
        return {r: shares[r] for r in self._others()}


class WrongDisputeReport(WrongTermSharing):
    """Forces disputes, then reports a different operand value to each party."""

    name = "wrong-dispute-report"

    def dispute_report(self, gate, which, column):
        honest = super().dispute_report(gate, which, column)
        return {r: _make((v.value + r + 1) % v.modulus, v.modulus) for r, v in honest.items()}


STRATEGIES = {
    cls.name: cls
    for cls in (HonestPassive, InputSubstitution, InconsistentDealer, RefuseBroadcast,
                WrongResultShare, WrongTermSharing, WrongDisputeReport)
}

# Representative parameters for strategies that take one, used when sweeping
# over every shipped strategy.
SHIPPED = ("honest", "input-substitution:2", "inconsistent-dealer", "refuse-broadcast",
           "wrong-result-share", "wrong-term-sharing", "wrong-dispute-report")


def make_strategy(spec: str) -> Adversary:
    """Build a strategy from ``name`` or ``name:param`` (e.g. ``input-substitution:2``)."""
    name, _, param = spec.partition(":")
    cls = STRATEGIES.get(name)
    if cls is None:
        raise ConfigError(f"unknown strategy {name!r}; choose from {', '.join(STRATEGIES)}")
    if cls is InputSubstitution:
        try:
            return InputSubstitution(int(param))
        except ValueError:
            raise ConfigError("input-substitution needs an integer, e.g. input-substitution:2") from None
    if param:
        raise ConfigError(f"strategy {name!r} takes no parameter")
    return cls()
