import dataclasses

import pytest
from doubles import LeakyParty

from maurer_mpc.adversary import SHIPPED
from maurer_mpc.analysis import (
    advresshares,
    check_output_simulation,
    enumerate_views,
    ni_exact,
    ni_sampled,
    secrecy_check,
    tape_length,
)
from maurer_mpc.circuit import mul_circuit, sum_circuit
from maurer_mpc.errors import BudgetExceeded, PreconditionError
from maurer_mpc.extraction import extract_input, finalmsg
from maurer_mpc.party import input_sid
from maurer_mpc.protocol import Engine, ProtocolConfig, run_protocol
from maurer_mpc.ring import RingElem
from maurer_mpc.sharing import HOLE, ReplicatedShare, vss_reconstruct


def R(v, m=5):
    return RingElem(v, m)


def sum2(advid=0):
    return ProtocolConfig.create(4, 2, advid, sum_circuit(4), (1, 0, 1, 0))


class TestFinalmsg:
    def test_example(self):
        rows = finalmsg(0, R(2), (HOLE, R(1), R(3), R(4)))
        assert rows[1] == (R(4), HOLE, R(3), R(4))
        assert rows[0] == (HOLE,) * 4

    def test_zero_missing_share(self):
        rows = finalmsg(2, R(3), (R(1), R(2), HOLE, R(0)))
        assert rows[0][2] == R(0)

    def test_rejects_misplaced_hole(self):
        with pytest.raises(PreconditionError):
            finalmsg(1, R(2), (HOLE, R(1), R(3), R(4)))


@pytest.mark.parametrize("circuit", [sum_circuit(4), mul_circuit(4)], ids=["sum", "mul"])
def test_output_simulation_all_strategies(circuit):
    for strategy in SHIPPED:
        for seed in range(8):
            run = run_protocol(ProtocolConfig.create(4, 5, seed % 4, circuit, (1, 2, 3, 4), strategy, seed=seed))
            if run.aborted:
                with pytest.raises(PreconditionError):
                    check_output_simulation(run)
                continue
            assert check_output_simulation(run)


def test_output_simulation_detects_mutation():
    run = run_protocol(ProtocolConfig.create(4, 5, 1, mul_circuit(4), (1, 2, 3, 4), seed=5))
    rows = [list(r) for r in run.comp]
    rows[2][0] = rows[2][0] + R(1)
    mutated = dataclasses.replace(run, comp=tuple(tuple(r) for r in rows))
    assert not check_output_simulation(mutated)


def test_advresshares_matches_adversary_state():
    engine = Engine(ProtocolConfig.create(4, 5, 2, mul_circuit(4), (1, 2, 3, 4), "wrong-term-sharing", seed=9))
    run = engine.run()
    assert advresshares(run) == engine.adversary.party.result_share()


@pytest.mark.parametrize("strategy", [s for s in SHIPPED if s != "refuse-broadcast"])
def test_extraction_binding(strategy):
    for seed in range(10):
        advid = seed % 4
        engine = Engine(ProtocolConfig.create(4, 5, advid, mul_circuit(4), (1, 2, 3, 4), strategy, seed=seed))
        engine.input_phase()
        first = engine.extracted
        rows = {p: party.rows[input_sid(advid)] for p, party in engine.parties.items()}
        junk = ReplicatedShare(advid, tuple(HOLE if c == advid else R((seed + c) % 5) for c in range(4)))
        assert first == vss_reconstruct({**rows, advid: junk})
        engine.computation()
        assert engine.extract() == first
        if strategy.startswith("input-substitution"):
            assert first == R(2)
        else:
            assert first == engine.config.inputs[advid]


def test_extract_input_direct():
    rows = {1: ReplicatedShare(1, (R(1), HOLE, R(2), R(3))),
            2: ReplicatedShare(2, (R(1), R(4), HOLE, R(3))),
            3: ReplicatedShare(3, (R(1), R(4), R(2), HOLE))}
    assert extract_input(rows, 0) == R(0)  # 1 + 4 + 2 + 3


class TestEnumeration:
    def test_tape_length(self):
        assert tape_length(sum2()) == 12

    def test_counts(self):
        d = enumerate_views(sum2())
        assert d.total == 4096 == sum(d.counts.values())
        assert d == enumerate_views(sum2())

    def test_budget(self, monkeypatch):
        with pytest.raises(BudgetExceeded):
            enumerate_views(sum2(), budget=4095)
        monkeypatch.setenv("MPC_ENUM_BUDGET", "10")
        with pytest.raises(BudgetExceeded):
            enumerate_views(sum2())


class TestNIExact:
    def test_pass_and_symmetric(self):
        a, b = (1, 0, 1, 0), (1, 1, 0, 1)
        assert ni_exact(a, b, sum2()).passed
        assert ni_exact(b, a, sum2()).passed

    def test_precondition(self):
        r = ni_exact((1, 0, 1, 0), (0, 1, 0, 1), sum2())
        assert r.verdict == "precondition" and not r.passed

    def test_leaky_double_fails(self):
        r = ni_exact((1, 0, 1, 0), (1, 1, 0, 1), sum2(), party_cls=LeakyParty)
        assert r.verdict == "fail"
        assert r.first_difference["count_a"] != r.first_difference["count_b"]
        assert ni_exact((1, 0, 1, 0), (1, 1, 0, 1), sum2(), party_cls=LeakyParty).verdict == \
            ni_exact((1, 1, 0, 1), (1, 0, 1, 0), sum2(), party_cls=LeakyParty).verdict


class TestNISampled:
    def test_leaky_double(self):
        cfg = ProtocolConfig.create(4, 5, 0, sum_circuit(4), (1, 2, 3, 4))
        r = ni_sampled((1, 2, 3, 4), (1, 3, 4, 0), cfg, 300, party_cls=LeakyParty)
        assert r.verdict == "fail" and r.p_value < 1e-6

    def test_identical_inputs_do_not_fail(self):
        cfg = ProtocolConfig.create(4, 5, 0, sum_circuit(4), (1, 2, 3, 4))
        r = ni_sampled((1, 2, 3, 4), (1, 2, 3, 4), cfg, 300, tv_max=1.0)
        assert r.passed and r.p_value > 0.01

    def test_precondition(self):
        cfg = ProtocolConfig.create(4, 5, 1, sum_circuit(4), (1, 2, 3, 4))
        assert ni_sampled((1, 2, 3, 4), (1, 3, 3, 4), cfg, 10).verdict == "precondition"


def test_secrecy_check():
    assert secrecy_check(3, 4)["passed"]
