"""Synchronous rounds over authenticated point-to-point channels plus broadcast.

Each round follows the rushing schedule: honest messages are fixed first, the
ones visible to the corrupted party are handed to the adversary, and only
then is the adversary asked for its own messages. Everything is delivered
at the end of the round in canonical order (sender, receiver, kind, slot).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .errors import ProtocolViolation
from .ring import RingElem
from .sharing import HOLE, AdditiveSharing, ReplicatedShare

BROADCAST = -1
SENT, RECEIVED, NOTIFY = "sent", "received", "notify"

# (receiver, kind, slot, payload) as produced by a party before the network
# stamps round and sender on it.
Outgoing = tuple


@dataclass(frozen=True, slots=True)
class Message:
    round: int
    sender: int
    receiver: int  # BROADCAST for the broadcast channel
    kind: str
    slot: tuple
    payload: object

    @property
    def key(self) -> tuple:
        return (self.sender, self.receiver, self.kind, self.slot)


@dataclass
class Transcript:
    owner: int
    input: RingElem
    log: list = field(default_factory=list)  # (direction, Message), append-only

    def append(self, direction: str, message: Message) -> None:
        self.log.append((direction, message))

    def __len__(self) -> int:
        return len(self.log)

    def to_json(self) -> list[dict]:
        return [entry_to_json(d, m) for d, m in self.log]


def encode(obj):
    """Map protocol values onto plain JSON data (ring values become ints, HOLE null)."""
    t = type(obj)
    # Exact-type checks first: this runs for every logged value.
    if t is RingElem:
        return obj.value
    if t is ReplicatedShare:
        return [None if e is HOLE else e.value for e in obj.entries]
    if t is tuple or t is list:
        return [encode(e) for e in obj]
    if obj is HOLE or obj is None:
        return None
    if isinstance(obj, RingElem):
        return obj.value
    if isinstance(obj, ReplicatedShare):
        return encode(obj.entries)
    if isinstance(obj, AdditiveSharing):
        return [e.value for e in obj.shares]
    if isinstance(obj, (tuple, list)):
        return [encode(e) for e in obj]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (bool, int, str, float)):
        return obj
    raise TypeError(f"cannot encode {obj!r}")


def entry_to_json(direction: str, m: Message) -> dict:
    return {
        "round": m.round,
        "direction": direction,
        "sender": m.sender,
        "receiver": None if m.receiver == BROADCAST else m.receiver,
        "kind": m.kind,
        "slot": list(m.slot),
        "payload": encode(m.payload),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _sorted(messages: Iterable[Message]) -> list[Message]:
    return sorted(messages, key=lambda m: m.key)


class Network:
    """Round scheduler and transcript keeper for ``n`` parties, one corrupted.

    ``adversary`` must offer ``observe(messages)``, ``observe_sent(messages)``
    and ``notify(kind, slot)``; the adversary's log is ``transcripts[advid]``.
    """

    def __init__(self, n: int, advid: int, inputs, adversary):
        self.n = n
        self.advid = advid
        self.adversary = adversary
        self.round = 0
        self.transcripts = [Transcript(p, inputs[p]) for p in range(n)]

    def _stamp(self, sender: int, outs: Iterable[Outgoing]) -> list[Message]:
        msgs = []
        for receiver, kind, slot, payload in outs:
            if receiver != BROADCAST and not 0 <= receiver < self.n:
                raise ProtocolViolation(f"party {sender} addressed unknown party {receiver}")
            if receiver == sender:
                if sender == self.advid:
                    continue  # the adversary's row for itself is never delivered
                raise ProtocolViolation(f"party {sender} sent a {kind} message to itself")
            msgs.append(Message(self.round, sender, receiver, kind, tuple(slot), payload))
        return msgs

    def exchange_round(self, honest_out: dict[int, list[Outgoing]],
                       respond: Callable[[list[Message]], Iterable[Outgoing]],
                       rushing: bool = True):
        """Run one round; returns ``(received, sent)`` maps for the honest parties.

        ``respond`` is the adversary's move. It receives the messages addressed
        to the corrupted party (empty when ``rushing`` is false, in which case
        the adversary commits before seeing anything).
        """
        advid = self.advid
        adv_log = self.transcripts[advid]
        honest = []
        for sender in sorted(honest_out):
            if sender == advid:
                raise ProtocolViolation("honest output attributed to the corrupted party")
            honest.extend(self._stamp(sender, honest_out[sender]))
        to_adv = _sorted(m for m in honest if m.receiver in (advid, BROADCAST))

        if rushing:
            for m in to_adv:
                adv_log.append(RECEIVED, m)
            self.adversary.observe(to_adv)
            adv_msgs = _sorted(self._stamp(advid, respond(to_adv)))
            for m in adv_msgs:
                adv_log.append(SENT, m)
            self.adversary.observe_sent(adv_msgs)
        else:
            adv_msgs = _sorted(self._stamp(advid, respond([])))
            for m in adv_msgs:
                adv_log.append(SENT, m)
            self.adversary.observe_sent(adv_msgs)
            for m in to_adv:
                adv_log.append(RECEIVED, m)
            self.adversary.observe(to_adv)

        everything = _sorted(honest + adv_msgs)
        seen = set()
        for m in everything:
            if m.key in seen:
                raise ProtocolViolation(f"party {m.sender} sent two {m.kind} messages "
                                        f"for slot {m.slot} to {m.receiver} in round {m.round}")
            seen.add(m.key)

        received: dict[int, list[Message]] = {p: [] for p in range(self.n) if p != advid}
        sent: dict[int, list[Message]] = {p: [] for p in range(self.n) if p != advid}
        # Honest logs follow the canonical order of the round's messages.
        for m in everything:
            if m.sender != advid:
                sent[m.sender].append(m)
                self.transcripts[m.sender].append(SENT, m)
            if m.receiver == BROADCAST:
                for p in received:
                    if p != m.sender:
                        received[p].append(m)
                        self.transcripts[p].append(RECEIVED, m)
            elif m.receiver != advid:
                received[m.receiver].append(m)
                self.transcripts[m.receiver].append(RECEIVED, m)
        self.round += 1
        return received, sent

    def notify(self, kind: str, slot: tuple = ()) -> None:
        """Tell the adversary that a local (communication-free) step happens now."""
        self.transcripts[self.advid].append(
            NOTIFY, Message(self.round, self.advid, self.advid, kind, tuple(slot), ()))
        self.adversary.notify(kind, tuple(slot))


def broadcast(sender: int, payload, kind: str = "broadcast", slot: tuple = ()) -> Outgoing:
    """An outgoing broadcast; the channel delivers the same payload to everyone."""
    return (BROADCAST, kind, slot, payload)
