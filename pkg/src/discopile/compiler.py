"""Lowering of string diagrams to circuits.

Each wire gets ``width`` consecutive qubits in wire order. Word boxes become
their ansatz circuits, a copy spider becomes a CNOT onto a fresh |0> ancilla,
and a cup between qubits ``a < b`` becomes ``CNOT(a, b); H(a)`` followed by
postselecting both qubits onto |0>, which is the Bell effect <Φ+| up to the
scalar 1/√2 on the amplitude.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ansatz import AnsatzConfig, word_subcircuit
from .circuit import CNOT, Circuit, Gate, H, PostselectZero, Unitary, gate_matrix, prepare
from .diagram import CopySpider, Cup, Diagram, Swap, validate
from .errors import InvalidDiagram
from .pregroup import Base, SimpleType


@dataclass
class Lowered:
    """A diagram lowered into stages; ``compile`` concatenates them in order."""

    n_qubits: int
    wire_qubits: dict[int, tuple[int, ...]]
    word_gates: list[list[Gate]]
    spider_gates: list[Gate]
    cup_events: list
    labels: dict[int, str] = field(default_factory=dict)

    def events(self) -> list:
        out: list = []
        for gates in self.word_gates:
            out += [Unitary(g) for g in gates]
        out += [Unitary(g) for g in self.spider_gates]
        out += self.cup_events
        return out

    def circuit(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(self.events()), self.labels)


def cup_events(a: int, b: int) -> list:
    return [Unitary(CNOT(a, b)), Unitary(H(a)), PostselectZero(a), PostselectZero(b)]


def lower(d: Diagram, cfg: AnsatzConfig = AnsatzConfig(), offset: int = 0,
          skip_words: Sequence[int] = ()) -> Lowered:
    """Assign qubits and lower every generator.

    Words listed in ``skip_words`` keep their qubits but get no preparation,
    leaving those qubits in |0> for a caller to fill.
    """
    problems = validate(d)
    if problems:
        raise InvalidDiagram(problems)
    types = d.wire_types()
    wire_qubits: dict[int, tuple[int, ...]] = {}
    nxt = offset
    for wire in sorted(types):
        w = cfg.width(types[wire])
        wire_qubits[wire] = tuple(range(nxt, nxt + w))
        nxt += w

    labels: dict[int, str] = {}
    word_gates: list[list[Gate]] = []
    for wi, box in enumerate(d.words):
        qubits = [q for wire in box.output_wires for q in wire_qubits[wire]]
        gates, local_labels = word_subcircuit(box, cfg)
        for q, lab in zip(qubits, local_labels):
            labels[q] = lab
        if wi in skip_words:
            word_gates.append([])
            continue
        word_gates.append([g.remapped(lambda x, qs=qubits: qs[x]) for g in gates])

    current = dict(wire_qubits)
    spider_gates: list[Gate] = []
    cups: list = []
    for g in d.wiring.generators:
        if isinstance(g, CopySpider):
            src = d.owner(g.src)
            token = src.token if src is not None else f"wire{g.src}"
            for s_q, d_q in zip(current[g.src], current[g.dst]):
                spider_gates.append(CNOT(s_q, d_q))
                labels[d_q] = f"copy:{token}"
        elif isinstance(g, Swap):
            current[g.a], current[g.b] = current[g.b], current[g.a]
        elif isinstance(g, Cup):
            left, right = current[g.left], current[g.right]
            # nested pairing across multi-qubit wires keeps the cups planar
            for a, b in zip(reversed(left), right):
                cups += cup_events(a, b)

    s_open = [w for w, t in d.wiring.open if t == SimpleType(Base.S)]
    if len(s_open) > 1:
        for i, wire in enumerate(s_open):
            for j, q in enumerate(current[wire]):
                labels[q] = f"sentence:{i}" + ("" if len(current[wire]) == 1 else f".{j}")
    return Lowered(nxt, wire_qubits, word_gates, spider_gates, cups, labels)


def compile(d: Diagram, cfg: AnsatzConfig = AnsatzConfig()) -> Circuit:
    return lower(d, cfg).circuit()


def sentence_qubits(c: Circuit) -> list[int]:
    return [q for q, lab in sorted(c.labels.items()) if lab.startswith("sentence")]


def snake_test_circuit(word_state: Sequence[complex]) -> Circuit:
    """``ψ ⊗ cap`` followed by a cup on the first two wires; ψ comes out on qubit 2."""
    amps = np.asarray(word_state, dtype=complex)
    amps = amps / np.linalg.norm(amps)
    events = [
        Unitary(prepare([0], amps)),
        Unitary(H(1)),
        Unitary(CNOT(1, 2)),
        *cup_events(0, 1),
    ]
    return Circuit(3, tuple(events), {0: "word", 1: "cap", 2: "out"})


def cup_effect() -> np.ndarray:
    """The 1x4 row vector implemented by the cup lowering on two qubits."""
    u = (np.kron(gate_matrix(H(0)), np.eye(2))) @ gate_matrix(CNOT(0, 1))
    return u[0:1, :]


def spider_equivalence_check(states: Sequence[np.ndarray] | None = None) -> float:
    """Max deviation between ``CNOT (x ⊗ |0>)`` and the copy map ``|x> -> |xx>``.

    The copy map is the linear one, so ``|+>`` goes to a Bell state and not
    to ``|+>|+>``: only basis states are cloned.
    """
    cnot = gate_matrix(CNOT(0, 1))
    zero = np.array([1, 0], dtype=complex)
    if states is None:
        states = [np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)]
    worst = 0.0
    for x in states:
        got = cnot @ np.kron(x, zero)
        bits = np.zeros(4, dtype=complex)
        bits[0], bits[3] = x[0], x[1]
        worst = max(worst, float(np.max(np.abs(got - bits))))
    return worst
