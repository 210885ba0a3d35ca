import pytest

from maurer_mpc.adversary import (
    REFUSE,
    SHIPPED,
    STRATEGIES,
    Adversary,
    InconsistentDealer,
    InputSubstitution,
    make_strategy,
)
from maurer_mpc.circuit import mul_circuit, sum_circuit
from maurer_mpc.errors import ConfigError
from maurer_mpc.network import NOTIFY, SENT
from maurer_mpc.party import DEAL_KINDS, Party, input_sid
from maurer_mpc.protocol import Engine, ProtocolConfig, run_protocol
from maurer_mpc.sharing import HOLE, rep_reconstruct


def config(strategy="honest", advid=0, circuit=None, seed=1, inputs=(3, 4, 1, 2)):
    return ProtocolConfig.create(4, 5, advid, circuit or mul_circuit(4), inputs, strategy, seed=seed)


def test_make_strategy():
    assert set(STRATEGIES) == {s.split(":")[0] for s in SHIPPED}
    for spec in SHIPPED:
        assert isinstance(make_strategy(spec), Adversary)
    assert make_strategy("input-substitution:3").value == 3
    for bad in ("nope", "input-substitution", "input-substitution:x", "honest:1"):
        with pytest.raises(ConfigError):
            make_strategy(bad)


def _honest_party_from_prefix(transcript, upto, n, m, circuit):
    party = Party(transcript.owner, n, m, circuit)
    for direction, msg in transcript.log[:upto]:
        if direction == SENT:
            party.record_sent((msg,))
        elif direction == NOTIFY:
            party.on_event(msg.kind, msg.slot)
        else:
            party.receive((msg,))
    return party


EXPECTED = {
    "copy": lambda p, slot: p.copy_messages(slot),
    "complaint": lambda p, slot: p.complaint_messages(slot),
    "reveal": lambda p, slot: p.reveal_messages(slot),
    "diff": lambda p, slot: p.diff_messages(slot[0]),
    "report": lambda p, slot: p.report_messages(slot[0]),
    "result": lambda p, slot: p.result_messages(),
}


@pytest.mark.parametrize("advid", range(4))
@pytest.mark.parametrize("circuit", [sum_circuit(4), mul_circuit(4)], ids=["sum", "mul"])
def test_honest_passive_sends_what_an_honest_party_sends(advid, circuit):
    run = run_protocol(config(advid=advid, circuit=circuit))
    t = run.transcripts[advid]
    first_sent = {}
    by_round: dict = {}
    for k, (direction, msg) in enumerate(t.log):
        if direction == SENT:
            first_sent.setdefault(msg.round, k)
            by_round.setdefault(msg.round, []).append(msg)
    assert by_round
    for rnd, msgs in by_round.items():
        kinds = {m.kind for m in msgs}
        assert len(kinds) == 1
        kind = kinds.pop()
        if kind in DEAL_KINDS:
            # fresh sharings: check they are consistent sharings of the right value
            for slot in {m.slot for m in msgs}:
                shares = [m.payload for m in msgs if m.slot == slot]
                assert len(shares) == 3
                rep_reconstruct(shares)
            continue
        party = _honest_party_from_prefix(t, first_sent[rnd], 4, 5, circuit)
        expected = sorted(EXPECTED[kind](party, msgs[0].slot), key=lambda o: o[0])
        got = sorted(((m.receiver, m.kind, m.slot, m.payload) for m in msgs), key=lambda o: o[0])
        assert got == expected, (rnd, kind)


def test_honest_deal_commits_assigned_input():
    run = run_protocol(config(advid=2))
    shares = [m.payload for d, m in run.transcripts[2].log if d == SENT and m.kind == "share"]
    assert rep_reconstruct(shares) == run.config.inputs[2]


def test_inconsistent_dealer_conflicting_copies():
    run = run_protocol(config("inconsistent-dealer", advid=0))
    got = {m.receiver: m.payload for d, m in run.transcripts[0].log if d == SENT and m.kind == "share"}
    assert got[1].entries[3] != got[2].entries[3]
    assert got[1].entries[0] == got[2].entries[0]
    complaints = [m for d, m in run.transcripts[1].log if m.kind == "complaint"]
    assert complaints, "honest holders must complain"
    reveals = [m for d, m in run.transcripts[1].log if m.kind == "reveal"]
    assert reveals and reveals[0].sender == 0


def test_inconsistent_dealer_is_fixed():
    engine = Engine(config("inconsistent-dealer", advid=0))
    engine.input_phase()
    rows = {p: party.rows[input_sid(0)] for p, party in engine.parties.items()}
    for c in range(4):
        copies = {rows[p].entries[c] for p in rows if p != c}
        assert len(copies) == 1
    assert engine.extracted == engine.config.inputs[0]


def test_refuse_broadcast_aborts():
    run = run_protocol(config("refuse-broadcast", advid=1))
    assert run.aborted and all(o is None for o in run.outputs)


def test_refuse_is_singleton_marker():
    assert repr(REFUSE) == "REFUSE"


def test_wrong_term_sharing_opens_nonzero():
    engine = Engine(config("wrong-term-sharing", advid=0))
    engine.pi1()
    for party in engine.parties.values():
        assert any(v.value != 0 for v in party.opened[4])
        assert party.disputed[4]


def test_honest_differences_all_zero():
    for advid in range(4):
        engine = Engine(config(advid=advid))
        engine.pi1()
        for party in engine.parties.values():
            assert all(v.value == 0 for v in party.opened[4])
            assert party.disputed[4] == ()


def test_wrong_dispute_report_majority_agrees():
    engine = Engine(config("wrong-dispute-report", advid=0))
    engine.pi1()
    parties = list(engine.parties.values())
    needs = parties[0].report_needs(4)
    assert needs
    for which, col in needs:
        values = {p.agreed_value(4, which, col) for p in parties}
        assert len(values) == 1
    sent = [m for d, m in engine.net.transcripts[0].log if d == SENT and m.kind == "report"]
    assert len({m.payload for m in sent}) == 3  # a different report to every party


def test_wrong_result_share_rows_differ():
    run = run_protocol(config("wrong-result-share", advid=3))
    rows = [m.payload for d, m in run.transcripts[3].log if d == SENT and m.kind == "result"]
    assert len(set(rows)) == 3
    assert all(run.outputs[p] == run.expected_output() for p in run.honest)


def test_getres_honest():
    run = run_protocol(config(advid=1))
    assert run.outputs[1] == run.expected_output()


def test_input_substitution_extracts_substitute():
    engine = Engine(config("input-substitution:2", advid=0, inputs=(4, 1, 1, 1)))
    engine.input_phase()
    assert engine.extracted.value == 2


class Garbage(Adversary):
    """Returns malformed payloads from every hook."""

    def deal_input_shares(self):
        return {1: "junk", 2: None}

    def consistency_copies(self, batch):
        return {1: ("bad",)}

    def complaints(self, batch):
        return (("nonsense",), (0, 99, 1))

    def term_share(self, gate, i, j):
        return {}

    def open_difference(self, gate, values):
        return {1: (1, 2)}

    def dispute_report(self, gate, which, column):
        return {1: "x"}

    def bxshareofres(self, psums):
        return None

    def getres(self):
        return None


@pytest.mark.parametrize("advid", range(4))
def test_malformed_adversary_output_is_tolerated(advid):
    run = run_protocol(config(advid=advid), adversary=Garbage())
    assert not run.aborted
    assert all(run.outputs[p] == run.expected_output() for p in run.honest)
    assert run.outputs[advid] is None
