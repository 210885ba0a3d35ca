"""Running the three protocol phases for n parties with one corrupted.

:class:`Engine` drives the honest :class:`~maurer_mpc.party.Party` objects and
the adversary's hooks round by round. Whatever the adversary returns is
coerced into something an honest party can process: a malformed or missing
share becomes the all-zero share, a malformed report or reveal is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .adversary import REFUSE, Adversary, AdversaryContext, make_strategy
from .circuit import Add, Circuit, Mul, eval_plain
from .errors import ConfigError, PartyCountTooSmall
from .extraction import comp_matrix, extract_input, zero_share
from .network import BROADCAST, Network, Transcript, dumps, encode
from .party import (
    INPUT_BATCH,
    Party,
    batch_sids,
    input_sid,
    mult_pairs,
    term_batch,
    term_sid,
)
from .ring import RandomTape, RingElem
from .sharing import HOLE, MIN_VSS_PARTIES, ReplicatedShare, ShareMatrix, rep_linear_combine


@dataclass(frozen=True)
class ProtocolConfig:
    n: int
    m: int
    advid: int
    circuit: Circuit
    inputs: tuple[RingElem, ...]
    strategy: str = "honest"
    seed: int | None = 0
    tape: tuple[int, ...] | None = None  # explicit tape; overrides ``seed``

    def __post_init__(self):
        if self.n < MIN_VSS_PARTIES:
            raise PartyCountTooSmall(f"need n >= {MIN_VSS_PARTIES} parties for one active corruption, got {self.n}")
        if self.m < 2:
            raise ConfigError(f"modulus must be >= 2, got {self.m}")
        if not 0 <= self.advid < self.n:
            raise ConfigError(f"advid {self.advid} out of range for {self.n} parties")
        if self.circuit.n_inputs != self.n:
            raise ConfigError(f"circuit takes {self.circuit.n_inputs} inputs but n = {self.n}")
        if len(self.inputs) != self.n:
            raise ConfigError(f"expected {self.n} inputs, got {len(self.inputs)}")
        for x in self.inputs:
            if not isinstance(x, RingElem) or x.modulus != self.m:
                raise ConfigError(f"input {x!r} is not an element of Z_{self.m}")
        if self.tape is None and self.seed is None:
            raise ConfigError("either a seed or a tape is required")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.tape is not None and any(not 0 <= t < self.m for t in self.tape):
            raise ConfigError(f"tape entries must lie in [0, {self.m})")

    @classmethod
    def create(cls, n: int, m: int, advid: int, circuit: Circuit, inputs: Sequence[int],
               strategy: str = "honest", seed: int | None = 0,
               tape: Sequence[int] | None = None) -> "ProtocolConfig":
        """Like the constructor, but takes plain integers for inputs (reduced mod m)."""
        if m < 2:
            raise ConfigError(f"modulus must be >= 2, got {m}")
        return cls(n, m, advid, circuit, tuple(RingElem.of(int(x), m) for x in inputs),
                   strategy, seed, None if tape is None else tuple(tape))

    def with_inputs(self, inputs: Sequence[int]) -> "ProtocolConfig":
        return ProtocolConfig.create(self.n, self.m, self.advid, self.circuit, inputs,
                                     self.strategy, self.seed, self.tape)

    def with_randomness(self, seed: int | None = None, tape: Sequence[int] | None = None) -> "ProtocolConfig":
        return ProtocolConfig(self.n, self.m, self.advid, self.circuit, self.inputs, self.strategy,
                              seed, None if tape is None else tuple(tape))

    def make_tape(self) -> RandomTape:
        if self.tape is not None:
            return RandomTape(self.tape, self.m)
        return RandomTape.seeded(self.seed, self.m)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "advid": self.advid,
            "circuit": self.circuit.to_text(),
            "inputs": [x.value for x in self.inputs],
            "strategy": self.strategy,
            "seed": self.seed,
            "tape": None if self.tape is None else list(self.tape),
        }


@dataclass
class RunRecord:
    config: ProtocolConfig
    transcripts: list[Transcript]
    extracted_input: RingElem | None
    secrets: tuple[RingElem, ...] | None
    aborted: bool
    outputs: tuple  # RingElem or None (abort) per party
    comp: tuple | None  # n x n honest final messages
    adversary_scratch: dict = field(default_factory=dict)

    @property
    def honest(self) -> list[int]:
        return [p for p in range(self.config.n) if p != self.config.advid]

    def expected_output(self) -> RingElem | None:
        if self.secrets is None:
            return None
        return eval_plain(self.config.circuit, self.secrets)

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "aborted": self.aborted,
            "extracted_input": encode(self.extracted_input),
            "secrets": encode(self.secrets),
            "outputs": encode(self.outputs),
            "comp": encode(self.comp),
            "transcripts": [{"owner": t.owner, "input": t.input.value, "log": t.to_json()}
                            for t in self.transcripts],
        }

    def dumps(self) -> str:
        return dumps(self.to_json())


def _is_elem(x, m: int) -> bool:
    return isinstance(x, RingElem) and x.modulus == m


def _valid_share(x, owner: int, n: int, m: int) -> bool:
    return (isinstance(x, ReplicatedShare) and x.owner == owner and x.n == n
            and all(e is HOLE or _is_elem(e, m) for e in x.entries))


class Engine:
    def __init__(self, config: ProtocolConfig, adversary: Adversary | None = None,
                 party_cls: type[Party] = Party, tape: RandomTape | None = None):
        self.config = config
        n, m, advid = config.n, config.m, config.advid
        self.n, self.m, self.advid = n, m, advid
        self.circuit = config.circuit
        self.tape = tape if tape is not None else config.make_tape()
        self.adversary = adversary if adversary is not None else make_strategy(config.strategy)
        self.net = Network(n, advid, config.inputs, self.adversary)
        self.parties = {p: party_cls(p, n, m, config.circuit, config.inputs[p], self.tape)
                        for p in range(n) if p != advid}
        self.adversary.setup(AdversaryContext(advid, n, m, config.circuit, config.inputs[advid], self.tape),
                             self.net.transcripts[advid])
        self.aborted = False
        self.abort_round: int | None = None
        self.extracted: RingElem | None = None

    @property
    def honest(self) -> list[int]:
        return sorted(self.parties)

    def _others(self):
        return [r for r in range(self.n) if r != self.advid]

    def _round(self, honest_fn, respond, rushing: bool = True) -> None:
        out = {p: honest_fn(party) for p, party in self.parties.items()}
        received, sent = self.net.exchange_round(out, respond, rushing)
        for p, party in self.parties.items():
            party.record_sent(sent[p])
            party.receive(received[p])

    def _event(self, kind: str, slot: tuple) -> None:
        for party in self.parties.values():
            party.on_event(kind, slot)
        self.net.notify(kind, slot)

    def _deals(self, kind: str, sid: tuple, shares) -> list:
        shares = shares if isinstance(shares, dict) else {}
        out = []
        for r in self._others():
            s = shares.get(r)
            if not _valid_share(s, r, self.n, self.m):
                s = zero_share(r, self.n, self.m)
            out.append((r, kind, sid, s))
        return out

    # -- input phase ------------------------------------------------------

    def input_phase(self) -> dict[int, ShareMatrix] | None:
        """Verifiably share every input; ``None`` if the run aborted."""
        # The corrupted dealer commits to its shares before seeing anything.
        adv_out = self._deals("share", input_sid(self.advid), self.adversary.deal_input_shares())
        self._round(lambda p: p.deal_input(), lambda _: adv_out, rushing=False)
        self._vss(INPUT_BATCH)
        if self.aborted:
            return None
        self.extracted = self.extract()
        return {p: ShareMatrix(p, party.share_matrix_rows()) for p, party in self.parties.items()}

    def extract(self) -> RingElem:
        return extract_input({p: party.rows[input_sid(self.advid)] for p, party in self.parties.items()},
                             self.advid)

    def _vss(self, batch: tuple) -> None:
        self._round(lambda p: p.copy_messages(batch), lambda _: self._adv_copies(batch))
        self._round(lambda p: p.complaint_messages(batch), lambda _: self._adv_complaints(batch))
        self._round(lambda p: p.reveal_messages(batch), lambda _: self._adv_reveals(batch))
        self._event("vss_done", batch)
        if any(party.aborted for party in self.parties.values()):
            self.aborted = True
            self.abort_round = self.net.round

    def _adv_copies(self, batch: tuple) -> list:
        k = len(batch_sids(self.n, batch))
        copies = self.adversary.consistency_copies(batch) or {}
        out = []
        for r in self._others():
            payload = copies.get(r)
            if (isinstance(payload, tuple) and len(payload) == k
                    and all(isinstance(row, tuple) and len(row) == self.n
                            and all(e is HOLE or _is_elem(e, self.m) for e in row) for row in payload)):
                out.append((r, "copy", batch, payload))
        return out

    def _adv_complaints(self, batch: tuple) -> list:
        items = self.adversary.complaints(batch)
        if not items:
            return []
        return [(BROADCAST, "complaint", batch, tuple(sorted(set(items), key=repr)))]

    def _adv_reveals(self, batch: tuple) -> list:
        # Complaints are public, so any honest party's view of them will do.
        view = self.parties[self.honest[0]]
        requests = {sid: cols for sid, cols in view.requests(batch).items() if sid[-1] == self.advid}
        if not requests:
            return []
        answer = self.adversary.answer_complaints(batch, requests)
        if answer is REFUSE or not isinstance(answer, dict):
            return []
        items = []
        for sid, cols in requests.items():
            values = answer.get(sid) or {}
            for c in cols:
                v = values.get(c)
                if _is_elem(v, self.m):
                    items.append(sid + (c, v))
        if not items:
            return []
        return [(BROADCAST, "reveal", batch, tuple(items))]

    # -- computation ------------------------------------------------------

    def computation(self) -> None:
        for g, gate in enumerate(self.circuit.gates):
            if isinstance(gate, Add):
                self._event("localsum", (g,))
            elif isinstance(gate, Mul):
                self.multiply(g)

    def multiply(self, g: int) -> None:
        self._round(lambda p: p.deal_terms(g), lambda _: self._adv_terms(g))
        self._vss(term_batch(g))
        self._round(lambda p: p.diff_messages(g), lambda _: self._adv_diffs(g))
        self._event("diff_open", (g,))
        self._round(lambda p: p.report_messages(g), lambda _: self._adv_reports(g))
        self._event("localmultsum", (g,))

    def _adv_terms(self, g: int) -> list:
        out = []
        a = self.advid
        for i in range(self.n):
            for j in range(self.n):
                if a not in (i, j):
                    out.extend(self._deals("term", term_sid(g, i, j, a), self.adversary.term_share(g, i, j)))
        return out

    def _adv_diffs(self, g: int) -> list:
        values = self.adversary.party.own_diffs(g)
        payloads = self.adversary.open_difference(g, values) or {}
        k = len(mult_pairs(self.n))
        zero = zero_share(self.advid, self.n, self.m)
        out = []
        for r in self._others():
            p = payloads.get(r)
            if not isinstance(p, tuple) or len(p) != k:
                p = (zero,) * k
            else:
                p = tuple(s if _valid_share(s, self.advid, self.n, self.m) else zero for s in p)
            out.append((r, "diff", (g,), p))
        return out

    def _adv_reports(self, g: int) -> list:
        per_receiver: dict[int, list] = {r: [] for r in self._others()}
        for which, column in self.adversary.party.report_needs(g):
            if column == self.advid:
                continue
            values = self.adversary.dispute_report(g, which, column) or {}
            for r in per_receiver:
                v = values.get(r)
                if _is_elem(v, self.m):
                    per_receiver[r].append((which, column, v))
        return [(r, "report", (g,), tuple(items)) for r, items in per_receiver.items() if items]

    # -- output -------------------------------------------------------------

    def output_phase(self) -> tuple:
        def respond(to_adv):
            psums = {msg.sender: msg.payload for msg in to_adv if msg.kind == "result"}
            rows = self.adversary.bxshareofres(psums) or {}
            return self._deals_owned("result", rows)

        self._round(lambda p: p.result_messages(), respond)
        outputs = [None] * self.n
        for p, party in self.parties.items():
            outputs[p] = party.output()
        outputs[self.advid] = self.adversary.getres()
        return tuple(outputs)

    def _deals_owned(self, kind: str, rows) -> list:
        # Shares that must carry the sender's own hole (result shares).
        out = []
        for r in self._others():
            s = rows.get(r) if isinstance(rows, dict) else None
            if not _valid_share(s, self.advid, self.n, self.m):
                s = zero_share(self.advid, self.n, self.m)
            out.append((r, kind, (), s))
        return out

    def comp(self) -> tuple:
        return comp_matrix({p: party.result_share() for p, party in self.parties.items()},
                           self.advid, self.n)

    # -- whole runs -----------------------------------------------------------

    def pi1(self) -> bool:
        """Input and computation phases; returns False if the run aborted."""
        if self.input_phase() is None:
            return False
        self.computation()
        return True

    def run(self) -> RunRecord:
        cfg = self.config
        if not self.pi1():
            return RunRecord(cfg, self.net.transcripts, None, None, True, (None,) * self.n, None,
                             self.adversary.state.scratch)
        secrets = tuple(self.extracted if p == self.advid else x for p, x in enumerate(cfg.inputs))
        comp = self.comp()
        outputs = self.output_phase()
        return RunRecord(cfg, self.net.transcripts, self.extracted, secrets, False, outputs, comp,
                         self.adversary.state.scratch)


def run_protocol(config: ProtocolConfig, adversary: Adversary | None = None,
                 party_cls: type[Party] = Party) -> RunRecord:
    return Engine(config, adversary, party_cls).run()


def computation_add(matrices: dict[int, ShareMatrix]) -> dict[int, ReplicatedShare]:
    """Each party's share of the sum of all inputs: add up its rows."""
    out = {}
    for p, mat in matrices.items():
        one = RingElem.of(1, mat.rows[0].entries[(p + 1) % len(mat.rows)].modulus)
        out[p] = rep_linear_combine(mat.rows, [one] * len(mat.rows))
    return out
