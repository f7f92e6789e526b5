"""IQP-style word circuits and the named-parameter store."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, MutableMapping, Sequence

import numpy as np

from .circuit import CRz, Gate, H, ParamRef, Rx, Rz
from .pregroup import Base, Lexicon, PregroupType, SimpleType


@dataclass(frozen=True)
class AnsatzConfig:
    qubits_per_n: int = 1
    qubits_per_s: int = 1
    layers: int = 1
    single_qubit_rotations: int = 3

    def __post_init__(self):
        for name in ("qubits_per_n", "qubits_per_s", "layers", "single_qubit_rotations"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def width(self, t: SimpleType) -> int:
        return self.qubits_per_n if t.base is Base.N else self.qubits_per_s

    def n_qubits(self, t: PregroupType) -> int:
        return sum(self.width(f) for f in t.factors)


def n_params(t: PregroupType, cfg: AnsatzConfig) -> int:
    k = cfg.n_qubits(t)
    if k == 0:
        return 0
    if k == 1:
        return cfg.single_qubit_rotations
    return cfg.layers * (k - 1)


def word_gates(token: str, t: PregroupType, cfg: AnsatzConfig) -> list[Gate]:
    """The word's preparation circuit on local qubits ``0..k-1``.

    One qubit: alternating Rx/Rz Euler chain. Several qubits: per layer a
    Hadamard on every qubit then a CRz ladder on neighbouring pairs.
    """
    k = cfg.n_qubits(t)
    if k == 0:
        return []
    if k == 1:
        return [
            (Rx if i % 2 == 0 else Rz)(0, ParamRef(f"{token}/{i}"))
            for i in range(cfg.single_qubit_rotations)
        ]
    gates: list[Gate] = []
    for layer in range(cfg.layers):
        gates += [H(q) for q in range(k)]
        gates += [
            CRz(i, i + 1, ParamRef(f"{token}/{layer * (k - 1) + i}")) for i in range(k - 1)
        ]
    return gates


def word_subcircuit(w, cfg: AnsatzConfig) -> tuple[list[Gate], list[str]]:
    """Gates and per-qubit labels for a word box (local qubit indices)."""
    gates = word_gates(w.token, w.type, cfg)
    labels = []
    for fi, f in enumerate(w.type.factors):
        for j in range(cfg.width(f)):
            suffix = "" if cfg.width(f) == 1 else f".{j}"
            if f == SimpleType(Base.S):
                labels.append("sentence" + suffix)
            elif f == SimpleType(Base.N):
                labels.append(f"noun:{w.token}" + suffix)
            else:
                labels.append(f"{w.token}:{fi}:{f}" + suffix)
    return gates, labels


def _vocab_items(vocab) -> Iterable[tuple[str, PregroupType]]:
    if isinstance(vocab, (Lexicon, Mapping)):
        return vocab.items()
    return vocab


def param_names(vocab, cfg: AnsatzConfig) -> list[str]:
    """All parameter names of a vocabulary, ordered by (token, index)."""
    keys = []
    for token, t in _vocab_items(vocab):
        keys += [(token, i) for i in range(n_params(t, cfg))]
    return [f"{tok}/{i}" for tok, i in sorted(set(keys))]


class ParamStore(MutableMapping[str, float]):
    """Parameter name to angle (radians)."""

    def __init__(self, values: Mapping[str, float] | None = None):
        self._values: dict[str, float] = {}
        for k, v in (values or {}).items():
            self[k] = v

    def __getitem__(self, name: str) -> float:
        return self._values[name]

    def __setitem__(self, name: str, value: float) -> None:
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"parameter {name!r} is not finite: {value!r}")
        self._values[name] = value

    def __delitem__(self, name: str) -> None:
        del self._values[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"ParamStore({self._values!r})"

    def copy(self) -> ParamStore:
        return ParamStore(self._values)

    def vector(self, names: Sequence[str]) -> np.ndarray:
        return np.array([self._values[n] for n in names], dtype=float)

    @classmethod
    def from_vector(cls, names: Sequence[str], values: Sequence[float]) -> ParamStore:
        return cls(dict(zip(names, (float(v) for v in values))))

    def dumps(self) -> str:
        return json.dumps(dict(sorted(self._values.items())), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> ParamStore:
        return cls(json.loads(text))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> ParamStore:
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def init_params(vocab, cfg: AnsatzConfig, seed) -> ParamStore:
    names = param_names(vocab, cfg)
    rng = np.random.default_rng(seed)
    return ParamStore.from_vector(names, rng.uniform(0.0, 2 * np.pi, size=len(names)))
