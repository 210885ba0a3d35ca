"""Arithmetic circuits over Z_m: text format, validation, plain evaluation.

The text format has one gate per line, gates numbered from 0 in order::

    # sum of two inputs
    in 0
    in 1
    add 0 1
    out 2

``in <party>`` reads a party's input, ``add``/``mul`` combine two earlier
gates, and the single ``out <gate>`` line names the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import ArityMismatch, ParseError
from .ring import RingElem


@dataclass(frozen=True)
class Input:
    party: int


@dataclass(frozen=True)
class Add:
    left: int
    right: int


@dataclass(frozen=True)
class Mul:
    left: int
    right: int


Gate = Union[Input, Add, Mul]


@dataclass(frozen=True)
class Circuit:
    n_inputs: int
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        parties = []
        for g, gate in enumerate(self.gates):
            if isinstance(gate, Input):
                parties.append(gate.party)
            elif not (0 <= gate.left < g and 0 <= gate.right < g):
                raise ValueError(f"gate {g} refers to a later or missing gate")
        if sorted(parties) != list(range(self.n_inputs)):
            raise ValueError(f"need exactly one input gate per party 0..{self.n_inputs - 1}, got {parties}")
        if not 0 <= self.output < len(self.gates):
            raise ValueError(f"output gate {self.output} does not exist")

    def input_gate(self, party: int) -> int:
        for g, gate in enumerate(self.gates):
            if isinstance(gate, Input) and gate.party == party:
                return g
        raise KeyError(party)

    def to_text(self) -> str:
        lines = []
        for gate in self.gates:
            if isinstance(gate, Input):
                lines.append(f"in {gate.party}")
            else:
                op = "add" if isinstance(gate, Add) else "mul"
                lines.append(f"{op} {gate.left} {gate.right}")
        lines.append(f"out {self.output}")
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    gates: list[Gate] = []
    output = None
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *args = line.split()
        try:
            nums = [int(a) for a in args]
        except ValueError:
            raise ParseError(lineno, f"non-integer argument in {line!r}") from None
        if output is not None:
            raise ParseError(lineno, "nothing may follow the out line")
        if op == "in":
            if len(nums) != 1:
                raise ParseError(lineno, "in takes one party index")
            if nums[0] < 0:
                raise ParseError(lineno, "negative party index")
            if any(isinstance(g, Input) and g.party == nums[0] for g in gates):
                raise ParseError(lineno, f"second input gate for party {nums[0]}")
            gates.append(Input(nums[0]))
        elif op in ("add", "mul"):
            if len(nums) != 2:
                raise ParseError(lineno, f"{op} takes two gate references")
            for ref in nums:
                if not 0 <= ref < len(gates):
                    raise ParseError(lineno, f"reference to gate {ref} before it is defined")
            gates.append((Add if op == "add" else Mul)(*nums))
        elif op == "out":
            if len(nums) != 1:
                raise ParseError(lineno, "out takes one gate reference")
            if not 0 <= nums[0] < len(gates):
                raise ParseError(lineno, f"output refers to undefined gate {nums[0]}")
            output = nums[0]
        else:
            raise ParseError(lineno, f"unknown gate {op!r}")
    if output is None:
        raise ParseError(last_line, "missing out line")
    n_inputs = sum(isinstance(g, Input) for g in gates)
    try:
        return Circuit(n_inputs, tuple(gates), output)
    except ValueError as exc:
        raise ParseError(last_line, str(exc)) from None


def eval_plain(c: Circuit, inputs: Sequence[RingElem]) -> RingElem:
    """Evaluate the circuit in the clear; this is the trusted-party reference."""
    if len(inputs) != c.n_inputs:
        raise ArityMismatch(f"circuit takes {c.n_inputs} inputs, got {len(inputs)}")
    wires: list[RingElem] = []
    for gate in c.gates:
        if isinstance(gate, Input):
            wires.append(inputs[gate.party])
        elif isinstance(gate, Add):
            wires.append(wires[gate.left] + wires[gate.right])
        else:
            wires.append(wires[gate.left] * wires[gate.right])
    return wires[c.output]


def sum_circuit(n: int) -> Circuit:
    """x_0 + x_1 + ... + x_{n-1}, as a chain of additions."""
    gates: list[Gate] = [Input(p) for p in range(n)]
    acc = 0
    for p in range(1, n):
        gates.append(Add(acc, p))
        acc = len(gates) - 1
    return Circuit(n, tuple(gates), acc)


def mul_circuit(n: int) -> Circuit:
    """x_0 * x_1; the remaining parties contribute inputs that are not used."""
    gates: list[Gate] = [Input(p) for p in range(n)]
    gates.append(Mul(0, 1))
    return Circuit(n, tuple(gates), n)


BUILTIN = {"sum": sum_circuit, "mul": mul_circuit}
