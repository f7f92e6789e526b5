"""Exact statevector and density-matrix engines.

Qubits enter the working register lazily: a qubit that no event has touched
yet is a |0> factor and is materialised on first use. Postselected and
discarded qubits leave the register immediately, so the working size stays
small for the cup-heavy circuits the compiler produces. Results are reported
over the surviving qubits in ascending original-index order.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .circuit import Circuit, Discard, PostselectZero, Unitary, gate_matrix
from .errors import ZeroPostselectMass

ZERO_MASS = 1e-14
DEBUG = os.environ.get("DISCOPILE_DEBUG", "") not in ("", "0")


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    norm_sq: float = 1.0

    @property
    def n_qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    def density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.norm_sq)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    trace_pre_norm: float = 1.0

    @property
    def n_qubits(self) -> int:
        return int(self.matrix.shape[0]).bit_length() - 1

    def density(self) -> DensityMatrix:
        return self


@dataclass(frozen=True, eq=False)
class SimResult:
    state: PureState | DensityMatrix
    success_probability: float
    kept_qubits: tuple[str, ...]
    qubits: tuple[int, ...]

    def position(self, qubit: int | str) -> int:
        """Register position of an original qubit index or a label."""
        if isinstance(qubit, str):
            return self.kept_qubits.index(qubit)
        return self.qubits.index(qubit)

    @property
    def rho(self) -> np.ndarray:
        return self.state.density().matrix


def check_density(m: np.ndarray, tol: float = 1e-10) -> None:
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise AssertionError("density matrix is not Hermitian")
    w = np.linalg.eigvalsh((m + m.conj().T) / 2) if m.size else np.zeros(0)
    if w.size and w.min() < -1e-9:
        raise AssertionError(f"density matrix has eigenvalue {w.min()!r}")


class _Register:
    def __init__(self, circuit: Circuit):
        self.circuit = circuit
        self.live: list[int] = []
        self.gone: set[int] = set()

    def positions(self, qubits: Iterable[int], grow) -> list[int]:
        out = []
        for q in qubits:
            if q not in self.live:
                grow()
                self.live.append(q)
            out.append(self.live.index(q))
        return out

    def remaining(self) -> list[int]:
        return [q for q in range(self.circuit.n_qubits) if q not in self.gone and q not in self.live]

    def labels(self, order: Sequence[int]) -> tuple[str, ...]:
        return tuple(self.circuit.labels.get(q, f"q{q}") for q in order)


def _sorted_perm(live: list[int]) -> list[int]:
    return sorted(range(len(live)), key=lambda i: live[i])


def run_pure(c: Circuit, binding: Mapping[str, float] | None = None) -> SimResult:
    if c.has_discard:
        raise ValueError("run_pure cannot execute Discard; use run_density")
    reg = _Register(c)
    box = [np.ones(1, dtype=complex)]

    def grow():
        v = box[0]
        new = np.zeros(2 * v.size, dtype=complex)
        new[0::2] = v
        box[0] = new

    for e in c.events:
        if isinstance(e, Unitary):
            pos = reg.positions(e.gate.qubits, grow)
            box[0] = kernels.apply_unitary(box[0], len(reg.live), pos, gate_matrix(e.gate, binding))
        else:
            (p,) = reg.positions(e.qubits, grow)
            v = box[0].reshape(2 ** p, 2, -1)[:, 0, :].reshape(-1)
            if float(np.vdot(v, v).real) <= ZERO_MASS:
                raise ZeroPostselectMass(f"postselecting qubit {e.qubit} onto |0> annihilates the state")
            box[0] = np.ascontiguousarray(v)
            reg.live.remove(e.qubit)
            reg.gone.add(e.qubit)

    for q in reg.remaining():
        grow()
        reg.live.append(q)
    v = box[0]
    n = len(reg.live)
    perm = _sorted_perm(reg.live)
    if n:
        v = np.transpose(v.reshape((2,) * n), perm).reshape(-1)
    order = [reg.live[i] for i in perm]
    mass = float(np.vdot(v, v).real)
    v = v / np.sqrt(mass)
    return SimResult(PureState(v, mass), mass, reg.labels(order), tuple(order))


def _apply_density(rho: np.ndarray, n: int, pos: list[int], u: np.ndarray) -> np.ndarray:
    vec = rho.reshape(-1)
    vec = kernels.apply_unitary(vec, 2 * n, pos, u)
    vec = kernels.apply_unitary(vec, 2 * n, [p + n for p in pos], np.ascontiguousarray(u.conj()))
    return vec.reshape(rho.shape)


def run_density(c: Circuit, binding: Mapping[str, float] | None = None) -> SimResult:
    reg = _Register(c)
    box = [np.ones((1, 1), dtype=complex)]

    def grow():
        r = box[0]
        d = r.shape[0]
        new = np.zeros((2 * d, 2 * d), dtype=complex)
        new[0::2, 0::2] = r
        box[0] = new

    for e in c.events:
        if isinstance(e, Unitary):
            pos = reg.positions(e.gate.qubits, grow)
            box[0] = _apply_density(box[0], len(reg.live), pos, gate_matrix(e.gate, binding))
        else:
            (p,) = reg.positions(e.qubits, grow)
            n = len(reg.live)
            r = box[0].reshape(2 ** p, 2, 2 ** (n - p - 1), 2 ** p, 2, 2 ** (n - p - 1))
            if isinstance(e, PostselectZero):
                r = r[:, 0, :, :, 0, :]
                if float(np.trace(r.reshape(2 ** (n - 1), -1)).real) <= ZERO_MASS:
                    raise ZeroPostselectMass(f"postselecting qubit {e.qubit} onto |0> annihilates the state")
            else:
                r = r[:, 0, :, :, 0, :] + r[:, 1, :, :, 1, :]
            d = 2 ** (n - 1)
            box[0] = np.ascontiguousarray(r.reshape(d, d))
            reg.live.remove(e.qubit)
            reg.gone.add(e.qubit)
        if DEBUG:
            check_density(box[0])

    for q in reg.remaining():
        grow()
        reg.live.append(q)
    rho = box[0]
    n = len(reg.live)
    perm = _sorted_perm(reg.live)
    if n:
        rho = np.transpose(rho.reshape((2,) * (2 * n)), perm + [p + n for p in perm]).reshape(2 ** n, 2 ** n)
    order = [reg.live[i] for i in perm]
    mass = float(np.trace(rho).real)
    rho = rho / mass
    return SimResult(DensityMatrix(np.ascontiguousarray(rho), mass), mass, reg.labels(order), tuple(order))


def partial_trace(rho: DensityMatrix | np.ndarray, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every register position not in ``keep`` (positions, ascending)."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    mass = rho.trace_pre_norm if isinstance(rho, DensityMatrix) else 1.0
    n = int(m.shape[0]).bit_length() - 1
    keep = sorted(set(keep))
    drop = [q for q in range(n) if q not in keep]
    t = m.reshape((2,) * (2 * n))
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n:2 * n])
    for q in drop:
        cols[q] = rows[q]
    out = "".join(rows[q] for q in keep) + "".join(cols[q] for q in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d = 2 ** len(keep)
    return DensityMatrix(np.ascontiguousarray(red.reshape(d, d)), mass)


def reduced(s: SimResult, qubits: Sequence[int | str]) -> DensityMatrix:
    return partial_trace(s.state.density(), [s.position(q) for q in qubits])


def born_distribution(s: SimResult, qubit: int | str) -> tuple[float, float]:
    p = s.position(qubit)
    n = len(s.qubits)
    if isinstance(s.state, PureState):
        probs = np.abs(s.state.amplitudes) ** 2
    else:
        probs = np.real(np.diag(s.state.matrix))
    probs = probs.reshape(2 ** p, 2, -1)
    p0 = float(probs[:, 0, :].sum())
    p1 = float(probs[:, 1, :].sum())
    total = p0 + p1
    return p0 / total, p1 / total


def sample_shots(s: SimResult, qubit: int | str, shots: int, seed) -> tuple[int, int]:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    _, p1 = born_distribution(s, qubit)
    rng = np.random.default_rng(seed)
    n1 = int(rng.binomial(shots, min(max(p1, 0.0), 1.0)))
    return shots - n1, n1


def dump_state(s: SimResult) -> str:
    """Nonzero entries as ``[index, re, im]`` triples (row-major for densities)."""
    if isinstance(s.state, PureState):
        flat = s.state.amplitudes
        kind = "pure"
    else:
        flat = s.state.matrix.reshape(-1)
        kind = "density"
    entries = [[int(i), float(z.real), float(z.imag)] for i, z in enumerate(flat) if z != 0]
    return json.dumps({"kind": kind, "qubits": list(s.qubits), "labels": list(s.kept_qubits),
                       "success_probability": s.success_probability, "entries": entries})
