"""Actively secure n-party computation over Z_m with one corrupted party."""

from .adversary import REFUSE, STRATEGIES, Adversary, make_strategy
from .circuit import BUILTIN, Circuit, eval_plain, mul_circuit, parse_circuit, sum_circuit
from .errors import MPCError
from .protocol import Engine, ProtocolConfig, RunRecord, run_protocol
from .ring import RandomTape, RingElem
from .sharing import HOLE, ReplicatedShare

__all__ = [
    "REFUSE", "STRATEGIES", "Adversary", "make_strategy",
    "BUILTIN", "Circuit", "eval_plain", "mul_circuit", "parse_circuit", "sum_circuit",
    "MPCError", "Engine", "ProtocolConfig", "RunRecord", "run_protocol",
    "RandomTape", "RingElem", "HOLE", "ReplicatedShare",
]
