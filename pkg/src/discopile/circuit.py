"""Circuit IR: gates with literal or named angles, postselection and discard events.

Qubit 0 is the most significant bit of every basis-state index, both for full
registers and for the local index of a multi-qubit gate matrix.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import kernels
from .errors import InvalidCircuit, UnboundParam

MAX_QUBITS = 12


class GateKind(str, enum.Enum):
    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    RX = "Rx"
    RY = "Ry"
    RZ = "Rz"
    CRZ = "CRz"
    CNOT = "CNOT"
    CCNOT = "CCNOT"
    CONTROLLED = "ControlledBlock"
    PREPARE = "PrepareAmplitudes"


ROTATIONS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CRZ})
_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.Y: 1, GateKind.Z: 1,
    GateKind.RX: 1, GateKind.RY: 1, GateKind.RZ: 1,
    GateKind.CRZ: 2, GateKind.CNOT: 2, GateKind.CCNOT: 3,
}


@dataclass(frozen=True)
class ParamRef:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("parameter name must be nonempty")


Angle = Union[float, ParamRef]


@dataclass(frozen=True)
class Gate:
    """A unitary on ``qubits``.

    For ``ControlledBlock`` the first ``n_controls`` entries of ``qubits`` are
    the controls and the rest are the targets touched by ``block``.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    angle: Angle | None = None
    block: tuple[Gate, ...] | None = None
    amplitudes: tuple[complex, ...] | None = None
    n_controls: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise InvalidCircuit(f"{self.kind.value} repeats a qubit: {self.qubits}")
        if self.kind in ROTATIONS:
            if self.angle is None:
                raise InvalidCircuit(f"{self.kind.value} needs an angle")
            if not isinstance(self.angle, ParamRef):
                object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise InvalidCircuit(f"{self.kind.value} takes no angle")
        if self.kind in _ARITY and len(self.qubits) != _ARITY[self.kind]:
            raise InvalidCircuit(f"{self.kind.value} acts on {_ARITY[self.kind]} qubits")
        if self.kind is GateKind.CONTROLLED:
            if self.block is None or self.n_controls < 1:
                raise InvalidCircuit("ControlledBlock needs controls and a block")
            object.__setattr__(self, "block", tuple(self.block))
            targets = set(self.targets)
            touched = {q for g in self.block for q in g.qubits}
            if touched - targets:
                raise InvalidCircuit(f"block touches {sorted(touched - targets)} outside its targets")
            if targets & set(self.controls):
                raise InvalidCircuit("ControlledBlock controls overlap its targets")
        elif self.block is not None:
            raise InvalidCircuit(f"{self.kind.value} takes no block")
        if self.kind is GateKind.PREPARE:
            if self.amplitudes is None:
                raise InvalidCircuit("PrepareAmplitudes needs amplitudes")
            amps = tuple(complex(a) for a in self.amplitudes)
            if len(amps) != 2 ** len(self.qubits):
                raise InvalidCircuit("PrepareAmplitudes length must be 2**(register size)")
            norm = math.fsum(abs(a) ** 2 for a in amps)
            if abs(norm - 1.0) > 1e-12:
                raise InvalidCircuit(f"PrepareAmplitudes vector has norm^2 {norm!r}")
            object.__setattr__(self, "amplitudes", amps)
        elif self.amplitudes is not None:
            raise InvalidCircuit(f"{self.kind.value} takes no amplitudes")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[: self.n_controls]

    @property
    def targets(self) -> tuple[int, ...]:
        return self.qubits[self.n_controls:]

    def param_names(self) -> set[str]:
        names = {self.angle.name} if isinstance(self.angle, ParamRef) else set()
        for g in self.block or ():
            names |= g.param_names()
        return names

    def shifted(self, offset: int) -> Gate:
        return self.remapped(lambda q: q + offset)

    def remapped(self, fn) -> Gate:
        block = tuple(g.remapped(fn) for g in self.block) if self.block is not None else None
        return replace(self, qubits=tuple(fn(q) for q in self.qubits), block=block)


# -- constructors -----------------------------------------------------------

def H(q):
    return Gate(GateKind.H, (q,))


def X(q):
    return Gate(GateKind.X, (q,))


def Y(q):
    return Gate(GateKind.Y, (q,))


def Z(q):
    return Gate(GateKind.Z, (q,))


def Rx(q, angle):
    return Gate(GateKind.RX, (q,), angle)


def Ry(q, angle):
    return Gate(GateKind.RY, (q,), angle)


def Rz(q, angle):
    return Gate(GateKind.RZ, (q,), angle)


def CRz(control, target, angle):
    return Gate(GateKind.CRZ, (control, target), angle)


def CNOT(control, target):
    return Gate(GateKind.CNOT, (control, target))


def CCNOT(c1, c2, target):
    return Gate(GateKind.CCNOT, (c1, c2, target))


def controlled(controls: int | Sequence[int], block: Sequence[Gate], targets: Sequence[int] | None = None) -> Gate:
    if isinstance(controls, int):
        controls = (controls,)
    if targets is None:
        targets = sorted({q for g in block for q in g.qubits})
    return Gate(GateKind.CONTROLLED, tuple(controls) + tuple(targets), block=tuple(block), n_controls=len(controls))


def prepare(qubits: Sequence[int], amplitudes: Sequence[complex]) -> Gate:
    return Gate(GateKind.PREPARE, tuple(qubits), amplitudes=tuple(amplitudes))


# -- events and circuits ----------------------------------------------------

@dataclass(frozen=True)
class Unitary:
    gate: Gate

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.gate.qubits


@dataclass(frozen=True)
class PostselectZero:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


@dataclass(frozen=True)
class Discard:
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


Event = Union[Unitary, PostselectZero, Discard]


def as_event(item: Gate | Event) -> Event:
    return Unitary(item) if isinstance(item, Gate) else item


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    events: tuple[Event, ...] = ()
    labels: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(as_event(e) for e in self.events))
        object.__setattr__(self, "labels", dict(self.labels))
        if not 0 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidCircuit(f"register size {self.n_qubits} outside [0, {MAX_QUBITS}]")
        closed: dict[int, str] = {}
        for e in self.events:
            for q in e.qubits:
                if not 0 <= q < self.n_qubits:
                    raise InvalidCircuit(f"qubit {q} outside register of {self.n_qubits}")
                if q in closed:
                    raise InvalidCircuit(f"qubit {q} used after {closed[q]}")
            if isinstance(e, PostselectZero):
                closed[e.qubit] = "postselection"
            elif isinstance(e, Discard):
                closed[e.qubit] = "discard"

    @property
    def gates(self) -> list[Gate]:
        return [e.gate for e in self.events if isinstance(e, Unitary)]

    def param_names(self) -> set[str]:
        names: set[str] = set()
        for g in self.gates:
            names |= g.param_names()
        return names

    @property
    def has_discard(self) -> bool:
        return any(isinstance(e, Discard) for e in self.events)

    def terminated(self) -> set[int]:
        return {e.qubit for e in self.events if isinstance(e, (PostselectZero, Discard))}

    def surviving(self) -> list[int]:
        gone = self.terminated()
        return [q for q in range(self.n_qubits) if q not in gone]

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "events": [_event_to_dict(e) for e in self.events],
            "labels": {str(q): lab for q, lab in sorted(self.labels.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> Circuit:
        return cls(
            data["n_qubits"],
            tuple(_event_from_dict(e) for e in data["events"]),
            {int(q): lab for q, lab in data.get("labels", {}).items()},
        )

    @classmethod
    def loads(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def _gate_to_dict(g: Gate) -> dict:
    out: dict = {"op": g.kind.value, "qubits": list(g.qubits)}
    if isinstance(g.angle, ParamRef):
        out["param"] = g.angle.name
    elif g.angle is not None:
        out["angle"] = g.angle
    if g.amplitudes is not None:
        out["amps"] = [[a.real, a.imag] for a in g.amplitudes]
    if g.block is not None:
        out["n_controls"] = g.n_controls
        out["block"] = [_gate_to_dict(b) for b in g.block]
    return out


def _gate_from_dict(d: dict) -> Gate:
    angle: Angle | None = None
    if "param" in d:
        angle = ParamRef(d["param"])
    elif "angle" in d:
        angle = float(d["angle"])
    amps = tuple(complex(re, im) for re, im in d["amps"]) if "amps" in d else None
    block = tuple(_gate_from_dict(b) for b in d["block"]) if "block" in d else None
    return Gate(GateKind(d["op"]), tuple(d["qubits"]), angle, block, amps, d.get("n_controls", 0))


def _event_to_dict(e: Event) -> dict:
    if isinstance(e, PostselectZero):
        return {"op": "PostselectZero", "qubits": [e.qubit]}
    if isinstance(e, Discard):
        return {"op": "Discard", "qubits": [e.qubit]}
    return _gate_to_dict(e.gate)


def _event_from_dict(d: dict) -> Event:
    if d["op"] == "PostselectZero":
        return PostselectZero(d["qubits"][0])
    if d["op"] == "Discard":
        return Discard(d["qubits"][0])
    return Unitary(_gate_from_dict(d))


# -- matrices ---------------------------------------------------------------

_S2 = 1 / math.sqrt(2)
_FIXED = {
    GateKind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}
_CCNOT = np.eye(8, dtype=complex)
_CCNOT[6:, 6:] = [[0, 1], [1, 0]]
_FIXED[GateKind.CCNOT] = _CCNOT
for _m in _FIXED.values():
    _m.flags.writeable = False


def resolve_angle(angle: Angle, binding: Mapping[str, float] | None) -> float:
    if isinstance(angle, ParamRef):
        if binding is None or angle.name not in binding:
            raise UnboundParam(angle.name)
        return float(binding[angle.name])
    return angle


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    e = complex(math.cos(theta / 2), math.sin(theta / 2))
    return np.array([[e.conjugate(), 0], [0, e]], dtype=complex)


def crz(theta: float) -> np.ndarray:
    e = complex(math.cos(theta / 2), math.sin(theta / 2))
    return np.diag([1, 1, e.conjugate(), e]).astype(complex)


_ROT = {GateKind.RX: rx, GateKind.RY: ry, GateKind.RZ: rz, GateKind.CRZ: crz}


def isometry_completion(amplitudes: Sequence[complex]) -> np.ndarray:
    """A unitary whose first column is exactly ``amplitudes``."""
    a = np.asarray(amplitudes, dtype=complex)
    dim = a.size
    q, _ = np.linalg.qr(np.column_stack([a, np.eye(dim, dtype=complex)]), mode="complete")
    q = q[:, :dim].copy()
    # the first QR column is a times a phase, so the rest stays orthogonal to a
    q[:, 0] = a
    return q


def block_matrix(block: Sequence[Gate], targets: Sequence[int], binding=None) -> np.ndarray:
    """Product of ``block`` (applied in order) as a matrix on ``targets``."""
    index = {q: i for i, q in enumerate(targets)}
    k = len(targets)
    dim = 2 ** k
    u = np.eye(dim, dtype=complex)
    for g in block:
        m = gate_matrix(g, binding)
        local = np.array([index[q] for q in g.qubits], dtype=np.intp)
        # apply to every column of u: treat u^T rows as states
        cols = [kernels.apply_unitary(np.ascontiguousarray(u[:, c]), k, local, m) for c in range(dim)]
        u = np.column_stack(cols)
    return u


def gate_matrix(g: Gate, binding: Mapping[str, float] | None = None) -> np.ndarray:
    kind = g.kind
    if kind in _FIXED:
        return _FIXED[kind]
    if kind in _ROT:
        return _ROT[kind](resolve_angle(g.angle, binding))
    if kind is GateKind.PREPARE:
        return isometry_completion(g.amplitudes)
    # ControlledBlock: identity everywhere except the all-ones control sector
    inner = block_matrix(g.block, g.targets, binding)
    dt = inner.shape[0]
    full = np.eye(dt * 2 ** g.n_controls, dtype=complex)
    full[-dt:, -dt:] = inner
    return full


def unitarity_check(g: Gate, binding: Mapping[str, float] | None = None) -> float:
    u = gate_matrix(g, binding)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def bind(c: Circuit, params: Mapping[str, float]) -> Circuit:
    """Replace every parameter reference with its literal value."""

    def lit(g: Gate) -> Gate:
        angle = g.angle
        if isinstance(angle, ParamRef):
            angle = resolve_angle(angle, params)
        block = tuple(lit(b) for b in g.block) if g.block is not None else None
        return replace(g, angle=angle, block=block)

    events = tuple(Unitary(lit(e.gate)) if isinstance(e, Unitary) else e for e in c.events)
    return Circuit(c.n_qubits, events, c.labels)


def concat_events(*parts: Iterable[Gate | Event]) -> tuple[Event, ...]:
    out: list[Event] = []
    for part in parts:
        out.extend(as_event(e) for e in part)
    return tuple(out)
