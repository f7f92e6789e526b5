"""Controlled-mixture circuits: a discarded control register selects which branch acted.

Every builder appends its control qubits after the target register, so a
branch circuit without controls uses the same qubit indices. At the end of
each construction the control register holds ``|i>`` exactly when branch
``i`` acted, which is how ``run_mixture`` reads off posterior branch weights.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ansatz import AnsatzConfig
from .circuit import (
    CNOT,
    Circuit,
    Discard,
    Gate,
    H,
    Ry,
    Unitary,
    X,
    controlled,
    prepare,
)
from .compiler import lower
from .diagram import diagram_from_sentence
from .errors import AllBranchesZeroMass, IncompatibleShapes, TooManyBranches, ZeroPostselectMass
from .pregroup import Lexicon
from .sim import DensityMatrix, partial_trace, run_density
from .workers import ordered_map

MAX_BRANCHES = 8
PRIOR_TOL = 1e-9


@dataclass(frozen=True)
class Branch:
    label: str
    operations: tuple[Gate, ...]
    prior: float

    def __post_init__(self):
        object.__setattr__(self, "operations", tuple(self.operations))


@dataclass(frozen=True, eq=False)
class MixtureResult:
    rho: DensityMatrix
    branch_weights: tuple[float, ...]
    success_probability: float
    labels: tuple[str, ...] = ()

    def position(self, label: str) -> int:
        return self.labels.index(label)

    def to_dict(self) -> dict:
        m = self.rho.matrix
        return {
            "rho": [[[float(z.real), float(z.imag)] for z in row] for row in m],
            "branch_weights": list(self.branch_weights),
            "success_probability": self.success_probability,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def _check_priors(branches: Sequence[Branch]) -> None:
    total = math.fsum(b.prior for b in branches)
    if abs(total - 1.0) > PRIOR_TOL or any(b.prior < 0 for b in branches):
        raise ValueError(f"branch priors must be a probability vector, got sum {total!r}")


def _target_count(op_lists: Sequence[Sequence[Gate]]) -> int:
    qs = [q for ops in op_lists for g in ops for q in g.qubits]
    return max(qs) + 1 if qs else 1


def two_way_events(o1: Sequence[Gate], o2: Sequence[Gate], control: int, prior: float = 0.5) -> list:
    """Control prep, ``o1`` on control |1>, X on the control, ``o2`` on control |1>.

    ``prior`` is the probability of ``o1``; the Hadamard is used for ½.
    """
    prep = H(control) if prior == 0.5 else Ry(control, 2 * math.asin(math.sqrt(prior)))
    return [
        Unitary(prep),
        Unitary(controlled(control, tuple(o1))),
        Unitary(X(control)),
        Unitary(controlled(control, tuple(o2))),
    ]


def build_two_way(o1: Sequence[Gate], o2: Sequence[Gate], n_targets: int | None = None,
                  prior: float = 0.5) -> Circuit:
    n = n_targets if n_targets is not None else _target_count([o1, o2])
    control = n
    events = two_way_events(o1, o2, control, prior) + [Discard(control)]
    return Circuit(n + 1, tuple(events), {control: "control:0"})


def n_control_qubits(m: int) -> int:
    return max(1, math.ceil(math.log2(m)))


def m_way_events(branches: Sequence[Branch], controls: Sequence[int]) -> list:
    """Amplitude-prepare ``sqrt(prior_i)`` on ``|i>``, then run branch ``i`` on ``|i>``."""
    r = len(controls)
    amps = np.zeros(2 ** r, dtype=complex)
    for i, b in enumerate(branches):
        amps[i] = math.sqrt(b.prior)
    amps /= np.linalg.norm(amps)
    events: list = [Unitary(prepare(controls, amps))]
    for i, b in enumerate(branches):
        flips = [Unitary(X(controls[j])) for j in range(r) if not (i >> (r - 1 - j)) & 1]
        events += flips
        events.append(Unitary(controlled(tuple(controls), b.operations)))
        events += flips
    return events


def build_m_way(branches: Sequence[Branch], n_targets: int | None = None) -> Circuit:
    m = len(branches)
    if m > MAX_BRANCHES:
        raise TooManyBranches(f"{m} branches; at most {MAX_BRANCHES} are supported")
    if m < 2:
        raise ValueError("a mixture needs at least two branches")
    _check_priors(branches)
    n = n_targets if n_targets is not None else _target_count([b.operations for b in branches])
    controls = list(range(n, n + n_control_qubits(m)))
    events = m_way_events(branches, controls) + [Discard(c) for c in controls]
    labels = {c: f"control:{j}" for j, c in enumerate(controls)}
    return Circuit(n + len(controls), tuple(events), labels)


def splice(base: Circuit, at: int, ops: Sequence[Gate]) -> Circuit:
    events = base.events[:at] + tuple(Unitary(g) for g in ops) + base.events[at:]
    return Circuit(base.n_qubits, events, base.labels)


def mixture_oracle(branches: Sequence[Branch], base_circuit: Circuit | None = None,
                   at: int | None = None, binding: Mapping[str, float] | None = None) -> MixtureResult:
    """Simulate each branch on its own and mix the results by ``p_i q_i``.

    ``q_i`` is the branch's postselection success probability, so the weights
    are the posterior probabilities that branch ``i`` acted.
    """
    _check_priors(branches)
    if base_circuit is None:
        base_circuit = Circuit(_target_count([b.operations for b in branches]))
    at = len(base_circuit.events) if at is None else at

    def one(b: Branch):
        try:
            res = run_density(splice(base_circuit, at, b.operations), binding)
        except ZeroPostselectMass:
            return None, 0.0, None
        return res.rho, res.success_probability, res.kept_qubits

    outs = ordered_map(one, branches)
    labels = next((lab for _, _, lab in outs if lab is not None), ())
    masses = [b.prior * q for b, (_, q, _) in zip(branches, outs)]
    total = math.fsum(masses)
    if total <= 0.0:
        raise AllBranchesZeroMass("every branch annihilates the state under postselection")
    rho = sum((w / total) * r for w, (r, _, _) in zip(masses, outs) if w > 0)
    weights = tuple(w / total for w in masses)
    return MixtureResult(DensityMatrix(rho, total), weights, total, labels)


def control_qubits(c: Circuit) -> list[int]:
    return sorted(q for q, lab in c.labels.items() if lab.startswith("control"))


def run_mixture(c: Circuit, binding: Mapping[str, float] | None = None,
                n_branches: int | None = None) -> MixtureResult:
    """Run a mixture circuit keeping the controls, to report branch weights too."""
    controls = control_qubits(c)
    events = tuple(e for e in c.events if not (isinstance(e, Discard) and e.qubit in controls))
    res = run_density(Circuit(c.n_qubits, events, c.labels), binding)
    if not controls:
        return MixtureResult(res.state, (1.0,), res.success_probability, res.kept_qubits)
    cpos = [res.position(q) for q in controls]
    tpos = [i for i in range(len(res.qubits)) if i not in cpos]
    weights = np.real(np.diag(partial_trace(res.state, cpos).matrix))
    m = n_branches if n_branches is not None else len(weights)
    rho = partial_trace(res.state, tpos)
    return MixtureResult(
        DensityMatrix(rho.matrix, res.success_probability),
        tuple(float(w) for w in weights[:m]),
        res.success_probability,
        tuple(res.kept_qubits[i] for i in tpos),
    )


@dataclass(frozen=True)
class MixturePlan:
    """A base circuit plus the branches to insert at event index ``at``."""

    base: Circuit
    at: int
    branches: tuple[Branch, ...]
    two_way: bool = True
    labels: Mapping[int, str] = field(default_factory=dict)

    @property
    def trivial(self) -> bool:
        return all(not b.operations for b in self.branches)

    def circuit(self) -> Circuit:
        if self.trivial:
            return self.base
        n = self.base.n_qubits
        if self.two_way and len(self.branches) == 2:
            controls = [n]
            b1, b2 = self.branches
            mix = two_way_events(b1.operations, b2.operations, n, b1.prior)
        else:
            controls = list(range(n, n + n_control_qubits(len(self.branches))))
            mix = m_way_events(self.branches, controls)
        events = (
            self.base.events[: self.at]
            + tuple(mix)
            + tuple(Discard(q) for q in controls)
            + self.base.events[self.at:]
        )
        labels = dict(self.base.labels)
        labels.update({q: f"control:{j}" for j, q in enumerate(controls)})
        return Circuit(n + len(controls), events, labels)

    def run(self, binding: Mapping[str, float] | None = None) -> MixtureResult:
        res = run_mixture(self.circuit(), binding, len(self.branches))
        if self.trivial:
            return MixtureResult(res.rho, tuple(b.prior for b in self.branches),
                                 res.success_probability, res.labels)
        return res

    def oracle(self, binding: Mapping[str, float] | None = None) -> MixtureResult:
        return mixture_oracle(self.branches, self.base, self.at, binding)


def pronoun_plan(subject: str, verb: str, obj: str, verb2: str, adjective: str,
                 lex: Lexicon, cfg: AnsatzConfig = AnsatzConfig(),
                 priors: tuple[float, float] = (0.5, 0.5)) -> MixturePlan:
    """"subject verb obj. it verb2 adjective" with "it" a mixture of two noun copies."""
    d1 = diagram_from_sentence([subject, verb, obj], lex)
    d2 = diagram_from_sentence([subject, verb2, adjective], lex)
    low1 = lower(d1, cfg)
    low2 = lower(d2, cfg, offset=low1.n_qubits, skip_words=(0,))
    if cfg.qubits_per_n != 1:
        raise ValueError("pronoun mixtures assume one qubit per noun wire")
    subj_q = low1.wire_qubits[d1.words[0].output_wires[0]][0]
    obj_q = low1.wire_qubits[d1.words[2].output_wires[0]][0]
    it_q = low2.wire_qubits[d2.words[0].output_wires[0]][0]

    preps1 = [Unitary(g) for gates in low1.word_gates for g in gates]
    rest = low1.cup_events + [Unitary(g) for gates in low2.word_gates for g in gates] + low2.cup_events
    labels = {**low1.labels, **low2.labels}
    s1 = [q for q, lab in low1.labels.items() if lab == "sentence"]
    s2 = [q for q, lab in low2.labels.items() if lab == "sentence"]
    for q in s1:
        labels[q] = "sentence:0"
    for q in s2:
        labels[q] = "sentence:1"
    labels[it_q] = "it"
    base = Circuit(low2.n_qubits, tuple(preps1 + rest), labels)
    branches = (
        Branch(f"it={subject}", (CNOT(subj_q, it_q),), priors[0]),
        Branch(f"it={obj}", (CNOT(obj_q, it_q),), priors[1]),
    )
    return MixturePlan(base, len(preps1), branches)


def build_pronoun_mixture(subject, verb, obj, verb2, adjective, lex, cfg=AnsatzConfig()) -> Circuit:
    return pronoun_plan(subject, verb, obj, verb2, adjective, lex, cfg).circuit()


def differing_positions(sentence_a: Sequence[str], sentence_b: Sequence[str], lex: Lexicon) -> list[int]:
    if len(sentence_a) != len(sentence_b):
        raise IncompatibleShapes("sentences differ in length")
    out = []
    for i, (a, b) in enumerate(zip(sentence_a, sentence_b)):
        if lex[a] != lex[b]:
            raise IncompatibleShapes(f"position {i}: {a!r} and {b!r} have different types")
        if lex.canonical(a) != lex.canonical(b):
            out.append(i)
    return out


def prediction_plan(sentence_a: Sequence[str], sentence_b: Sequence[str], lex: Lexicon,
                    cfg: AnsatzConfig = AnsatzConfig(),
                    probs: tuple[float, float] = (0.5, 0.5)) -> MixturePlan:
    """Shared words prepared once; the differing words of each sentence form one branch."""
    diff = differing_positions(sentence_a, sentence_b, lex)
    da = diagram_from_sentence(list(sentence_a), lex)
    db = diagram_from_sentence(list(sentence_b), lex)
    la, lb = lower(da, cfg), lower(db, cfg)
    shared = [Unitary(g) for i, gates in enumerate(la.word_gates) if i not in diff for g in gates]
    base = Circuit(la.n_qubits, tuple(shared + la.cup_events), la.labels)
    ops_a = tuple(g for i in diff for g in la.word_gates[i])
    ops_b = tuple(g for i in diff for g in lb.word_gates[i])
    p = float(probs[0])
    branches = (
        Branch(" ".join(sentence_a), ops_a, p),
        Branch(" ".join(sentence_b), ops_b, 1.0 - p if len(probs) < 2 else float(probs[1])),
    )
    return MixturePlan(base, len(shared), branches)


def build_prediction_mixture(sentence_a, sentence_b, lex, cfg=AnsatzConfig(), probs=(0.5, 0.5)) -> Circuit:
    return prediction_plan(sentence_a, sentence_b, lex, cfg, probs).circuit()
