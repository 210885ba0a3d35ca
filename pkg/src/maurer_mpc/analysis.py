"""Executable security checks: correctness, output simulation, non-interference.

The non-interference checks compare the distribution of the corrupted
party's state after the input and computation phases across two input
vectors that agree at the corrupted position. :func:`ni_exact` enumerates
every random tape; :func:`ni_sampled` draws seeded runs and applies
chi-square two-sample tests.
"""

from __future__ import annotations

import itertools
import os
import re
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.stats import chi2_contingency

from .adversary import Adversary
from .circuit import eval_plain
from .errors import BudgetExceeded, PreconditionError
from .extraction import extract_input, finalmsg
from .network import dumps, encode
from .party import Party, replay
from .protocol import Engine, ProtocolConfig, RunRecord, run_protocol
from .ring import RandomTape, RingElem, _make
from .sharing import rep_share

__all__ = [
    "NIReport", "ViewDistribution", "advresshares", "check_output_simulation", "enumerate_views",
    "enum_budget", "extract_input", "finalmsg", "ni_exact", "ni_sampled", "secrecy_check",
    "sharing_marginals", "tape_length", "view_object",
]

DEFAULT_BUDGET = 10**6


def enum_budget() -> int:
    raw = os.environ.get("MPC_ENUM_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


# -- output simulation ------------------------------------------------------

def advresshares(run: RunRecord):
    """The corrupted party's result share, recomputed from its own view."""
    cfg = run.config
    party = replay(run.transcripts[cfg.advid], cfg.n, cfg.m, cfg.circuit)
    return party.wires[cfg.circuit.output]


def check_output_simulation(run: RunRecord) -> bool:
    if run.aborted:
        raise PreconditionError("output simulation is only defined for runs that did not abort")
    cfg = run.config
    y = eval_plain(cfg.circuit, run.secrets)
    return finalmsg(cfg.advid, y, advresshares(run).entries) == run.comp


# -- views --------------------------------------------------------------------

def view_object(engine: Engine) -> dict:
    state = engine.adversary.state
    return {
        "advid": state.advid,
        "input": state.input.value,
        "log": state.log.to_json(),
        "scratch": encode(state.scratch),
    }


def pi1_view(config: ProtocolConfig, adversary_factory: Callable[[], Adversary] | None = None,
             party_cls: type[Party] = Party) -> dict:
    engine = Engine(config, adversary_factory() if adversary_factory else None, party_cls)
    engine.pi1()
    return view_object(engine)


@dataclass
class ViewDistribution:
    counts: Counter
    total: int

    def __eq__(self, other) -> bool:
        return isinstance(other, ViewDistribution) and self.counts == other.counts


def tape_length(config: ProtocolConfig, adversary_factory=None, party_cls: type[Party] = Party) -> int:
    """Number of draws one run of the first two phases makes (from an all-zero dry run)."""
    tape = RandomTape.zeros(config.m)
    Engine(config, adversary_factory() if adversary_factory else None, party_cls, tape=tape).pi1()
    return tape.cursor


def enumerate_views(config: ProtocolConfig, inputs: Sequence[int] | None = None, *,
                    budget: int | None = None, adversary_factory=None,
                    party_cls: type[Party] = Party) -> ViewDistribution:
    """Exact distribution of the corrupted party's state over every possible tape."""
    if inputs is not None:
        config = config.with_inputs(inputs)
    budget = enum_budget() if budget is None else budget
    length = tape_length(config, adversary_factory, party_cls)
    runs = config.m ** length
    if runs > budget:
        raise BudgetExceeded(f"{config.m}^{length} = {runs} runs exceeds the budget of {budget}")
    counts: Counter = Counter()
    for tape in itertools.product(range(config.m), repeat=length):
        view = pi1_view(config.with_randomness(tape=tape), adversary_factory, party_cls)
        counts[dumps(view)] += 1
    return ViewDistribution(counts, runs)


# -- non-interference reports ----------------------------------------------

@dataclass
class NIReport:
    mode: str  # "exact" or "sampled"
    verdict: str  # "pass", "fail" or "precondition"
    runs_per_side: int = 0
    first_difference: dict | None = None
    statistic: float | None = None
    dof: int | None = None
    p_value: float | None = None
    tv: float | None = None
    features: int | None = None
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _precondition(config: ProtocolConfig, inputs1, inputs2) -> str | None:
    a = config.advid
    if len(inputs1) != config.n or len(inputs2) != config.n:
        return f"both input vectors need {config.n} entries"
    if int(inputs1[a]) % config.m != int(inputs2[a]) % config.m:
        return f"input vectors differ at the corrupted position {a}"
    return None


def ni_exact(inputs1: Sequence[int], inputs2: Sequence[int], config: ProtocolConfig, *,
             budget: int | None = None, adversary_factory=None,
             party_cls: type[Party] = Party) -> NIReport:
    problem = _precondition(config, inputs1, inputs2)
    if problem:
        return NIReport("exact", "precondition", message=problem)
    d1 = enumerate_views(config, inputs1, budget=budget, adversary_factory=adversary_factory,
                         party_cls=party_cls)
    d2 = enumerate_views(config, inputs2, budget=budget, adversary_factory=adversary_factory,
                         party_cls=party_cls)
    if d1 == d2:
        return NIReport("exact", "pass", runs_per_side=d1.total)
    keys = sorted(set(d1.counts) | set(d2.counts))
    for k in keys:
        if d1.counts[k] != d2.counts[k]:
            diff = {"view": k, "count_a": d1.counts[k], "count_b": d2.counts[k]}
            break
    return NIReport("exact", "fail", runs_per_side=d1.total, first_difference=diff,
                    message="view distributions differ")


_STRING = re.compile(r'"(?:[^"\\]|\\.)*"')
_PUNCT = str.maketrans("[]{},:", "      ")


def _flatten(text: str) -> list[int]:
    """The numeric scalars of a canonical JSON document, in order (null as -1).

    Strings are dropped; in a view they are field names and message kinds,
    which the whole-view comparison already covers.
    """
    text = _STRING.sub(" ", text).replace("null", "-1").replace("true", "1").replace("false", "0")
    return list(map(int, text.translate(_PUNCT).split()))


def _merge_sparse(table: np.ndarray) -> np.ndarray:
    """Pool the columns with the smallest expected counts until every expected count is >= 5."""
    order = np.argsort(table.sum(axis=0))
    table = table[:, order]
    while table.shape[1] > 1:
        col = table.sum(axis=0)
        expected = np.outer(table.sum(axis=1), col) / table.sum()
        if expected.min() >= 5:
            break
        merged = table[:, 0] + table[:, 1]
        table = np.column_stack([merged, table[:, 2:]]) if table.shape[1] > 2 else merged[:, None]
        table = table[:, np.argsort(table.sum(axis=0))]
    return table


def _chi2(sample1: Sequence, sample2: Sequence) -> tuple[float, int, float] | None:
    cats = {v: k for k, v in enumerate(sorted(set(sample1) | set(sample2)))}
    if len(cats) < 2:
        return None
    table = np.zeros((2, len(cats)), dtype=np.int64)
    np.add.at(table[0], [cats[v] for v in sample1], 1)
    np.add.at(table[1], [cats[v] for v in sample2], 1)
    table = _merge_sparse(table)
    if table.shape[1] < 2:
        return None
    stat, p, dof, _ = chi2_contingency(table, correction=False)
    return float(stat), int(dof), float(p)


def _tv(sample1: np.ndarray, sample2: np.ndarray) -> float:
    c1, c2 = Counter(sample1.tolist()), Counter(sample2.tolist())
    return 0.5 * sum(abs(c1[k] / len(sample1) - c2[k] / len(sample2)) for k in set(c1) | set(c2))


def ni_sampled(inputs1: Sequence[int], inputs2: Sequence[int], config: ProtocolConfig, trials: int,
               *, alpha: float = 0.01, pairs: int = 1, tv_max: float = 0.05, base_seed: int = 0,
               adversary_factory=None, party_cls: type[Party] = Party) -> NIReport:
    """Two-sample comparison of the corrupted party's views over seeded runs.

    Side one uses seeds ``base_seed .. base_seed + trials - 1``, side two the
    next ``trials`` seeds. Each position of the flattened view is tested with
    a chi-square test of homogeneity, and so is the view as a whole; p-values
    are Bonferroni-adjusted across those tests. The verdict is pass when the
    smallest adjusted p-value exceeds ``alpha / pairs`` and the largest
    per-position total-variation distance stays below ``tv_max``.
    """
    problem = _precondition(config, inputs1, inputs2)
    if problem:
        return NIReport("sampled", "precondition", message=problem)
    samples = []
    for side, inputs in enumerate((inputs1, inputs2)):
        cfg = config.with_inputs(inputs)
        views = []
        for t in range(trials):
            seed = base_seed + side * trials + t
            views.append(pi1_view(cfg.with_randomness(seed=seed), adversary_factory, party_cls))
        samples.append(views)

    flat = [[], []]
    keys = [[], []]
    for side in (0, 1):
        for view in samples[side]:
            text = dumps(view)
            flat[side].append(_flatten(text))
            keys[side].append(zlib.crc32(text.encode()))
    width = max(len(v) for side in flat for v in side)
    arrays = [np.full((trials, width), -2, dtype=np.int64) for _ in (0, 1)]
    for side in (0, 1):
        for r, vec in enumerate(flat[side]):
            arrays[side][r, :len(vec)] = vec

    results = []
    tv = 0.0
    for k in range(width):
        x, y = arrays[0][:, k], arrays[1][:, k]
        if x[0] == y[0] and (x == x[0]).all() and (y == y[0]).all():
            continue
        tv = max(tv, _tv(x, y))
        res = _chi2(x.tolist(), y.tolist())
        if res is not None:
            results.append(res)
    whole = _chi2(keys[0], keys[1])
    if whole is not None:
        results.append(whole)

    if not results:
        return NIReport("sampled", "pass", runs_per_side=trials, p_value=1.0, tv=tv, features=0,
                        message="no varying positions")
    tests = len(results)
    stat, dof, p = min(results, key=lambda r: r[2])
    p_adj = min(1.0, p * tests)
    ok = p_adj > alpha / pairs and tv < tv_max
    return NIReport("sampled", "pass" if ok else "fail", runs_per_side=trials, statistic=stat, dof=dof,
                    p_value=p_adj, tv=tv, features=tests,
                    message=f"threshold p > {alpha / pairs:g}, tv < {tv_max:g}")


# -- sharing checks -----------------------------------------------------------

def sharing_marginals(s: RingElem, n: int) -> list[Counter]:
    """For each party, the multiset of its replicated share over every tape."""
    m = s.modulus
    out = [Counter() for _ in range(n)]
    for tape in itertools.product(range(m), repeat=n - 1):
        shares = rep_share(s, n, RandomTape(tape, m))
        for i, share in enumerate(shares):
            out[i][tuple(encode(share))] += 1
    return out


def secrecy_check(m: int, n: int) -> dict:
    """Every party's share distribution is the same for every secret."""
    marginals = {s: sharing_marginals(_make(s, m), n) for s in range(m)}
    ok = all(marginals[s][i] == marginals[0][i] for s in range(m) for i in range(n))
    return {"m": m, "n": n, "tapes": m ** (n - 1), "passed": ok}


def correctness_failures(runs: Iterable[RunRecord]) -> list[tuple[int | None, str]]:
    """(seed, reason) for every run whose honest outputs disagree with the committed-input oracle."""
    bad = []
    for run in runs:
        if run.aborted:
            if any(o is not None for o in run.outputs):
                bad.append((run.config.seed, "output after abort"))
            continue
        y = run.expected_output()
        for p in run.honest:
            if run.outputs[p] != y:
                bad.append((run.config.seed, f"party {p} output {run.outputs[p]!r}, expected {y!r}"))
                break
    return bad


def seeded_runs(config: ProtocolConfig, seeds: Iterable[int]):
    for s in seeds:
        yield run_protocol(config.with_randomness(seed=s))
