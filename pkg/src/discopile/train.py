"""Binary cross-entropy training with SPSA.

A sentence is True when its sentence qubit reads |0>. Exact mode uses Born
probabilities directly; shot mode replaces them with seeded binomial
frequencies.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .ansatz import AnsatzConfig, ParamStore, init_params
from .circuit import Circuit
from .compiler import compile as compile_diagram
from .diagram import diagram_from_sentence
from .errors import NanLoss
from .pregroup import Lexicon, builtin_lexicon
from .sim import born_distribution, run_pure, sample_shots

CLAMP = 1e-9

Dataset = Sequence[tuple[Sequence[str], bool]]


@dataclass(frozen=True)
class SpsaConfig:
    iterations: int = 300
    a: float = 2.0
    c: float = 0.06
    A: float | None = None
    alpha: float = 0.602
    gamma: float = 0.101
    seed: int = 0
    shots: int | None = None

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not (self.a > 0 and self.c > 0):
            raise ValueError("a and c must be positive")
        if not (0 < self.alpha <= 1 and 0 < self.gamma <= 1):
            raise ValueError("alpha and gamma must lie in (0, 1]")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be positive")

    @property
    def stability(self) -> float:
        return 0.01 * self.iterations if self.A is None else self.A

    def a_k(self, k: int) -> float:
        return self.a / (k + 1 + self.stability) ** self.alpha

    def c_k(self, k: int) -> float:
        return self.c / (k + 1) ** self.gamma


@dataclass
class TrainLog:
    loss: list[float] = field(default_factory=list)
    accuracy: list[float] = field(default_factory=list)
    final: tuple[float, float, float] | None = None
    best_iteration: int = -1

    def __len__(self) -> int:
        return len(self.loss)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("iter,loss,accuracy\n")
        for i, (l, a) in enumerate(zip(self.loss, self.accuracy)):
            buf.write(f"{i},{l!r},{a!r}\n")
        return buf.getvalue()


@lru_cache(maxsize=4096)
def sentence_circuit(tokens: tuple[str, ...], lex: Lexicon, cfg: AnsatzConfig) -> Circuit:
    return compile_diagram(diagram_from_sentence(list(tokens), lex), cfg)


def sentence_probability(sentence: Sequence[str], params, cfg: AnsatzConfig = AnsatzConfig(),
                         shots: int | None = None, lex: Lexicon | None = None,
                         seed=0) -> tuple[float, float]:
    """``(p_True, p_False)`` for the sentence qubit."""
    lex = lex if lex is not None else builtin_lexicon()
    res = run_pure(sentence_circuit(tuple(sentence), lex, cfg), params)
    if shots is None:
        return born_distribution(res, "sentence")
    n0, n1 = sample_shots(res, "sentence", shots, seed)
    return n0 / shots, n1 / shots


def _bce_term(p_true: float, label: bool) -> float:
    p = min(max(p_true, CLAMP), 1.0 - CLAMP)
    return -math.log(p) if label else -math.log(1.0 - p)


def predictions(dataset: Dataset, params, cfg=AnsatzConfig(), shots=None, lex=None, seed=0) -> list[float]:
    return [
        sentence_probability(toks, params, cfg, shots, lex, seed=[*np.atleast_1d(seed), i])[0]
        for i, (toks, _) in enumerate(dataset)
    ]


def bce_from_probabilities(p_true: Sequence[float], labels: Sequence[bool]) -> float:
    return math.fsum(_bce_term(p, y) for p, y in zip(p_true, labels)) / len(labels)


def bce_loss(dataset: Dataset, params, cfg=AnsatzConfig(), shots=None, lex=None, seed=0) -> float:
    p = predictions(dataset, params, cfg, shots, lex, seed)
    return bce_from_probabilities(p, [y for _, y in dataset])


def classification_metrics(predicted: Sequence[bool], gold: Sequence[bool]) -> tuple[float, float, float]:
    """Accuracy, Cohen's kappa, and F1 on the True class."""
    n = len(gold)
    if n == 0:
        return 0.0, 0.0, 0.0
    tp = sum(p and g for p, g in zip(predicted, gold))
    tn = sum((not p) and (not g) for p, g in zip(predicted, gold))
    fp = sum(p and not g for p, g in zip(predicted, gold))
    fn = sum((not p) and g for p, g in zip(predicted, gold))
    p_o = (tp + tn) / n
    pred_t, gold_t = (tp + fp) / n, (tp + fn) / n
    p_e = pred_t * gold_t + (1 - pred_t) * (1 - gold_t)
    if p_e >= 1.0:
        kappa = 1.0 if p_o >= 1.0 else 0.0
    else:
        kappa = (p_o - p_e) / (1 - p_e)
    f1 = 0.0 if tp == 0 else 2 * tp / (2 * tp + fp + fn)
    return p_o, kappa, f1


def metrics(dataset: Dataset, params, cfg=AnsatzConfig(), lex=None) -> tuple[float, float, float]:
    p = predictions(dataset, params, cfg, None, lex)
    return classification_metrics([x >= 0.5 for x in p], [y for _, y in dataset])


def spsa_step(theta: np.ndarray, k: int, loss_fn: Callable[[np.ndarray], float],
              cfg: SpsaConfig) -> np.ndarray:
    """One SPSA update; calls ``loss_fn`` exactly twice."""
    theta = np.asarray(theta, dtype=float)
    rng = np.random.default_rng([cfg.seed, k])
    delta = rng.choice(np.array([-1.0, 1.0]), size=theta.shape)
    ck = cfg.c_k(k)
    lp = loss_fn(theta + ck * delta)
    lm = loss_fn(theta - ck * delta)
    if math.isnan(lp) or math.isnan(lm):
        raise NanLoss(f"loss is NaN at iteration {k}")
    grad = (lp - lm) / (2.0 * ck * delta)
    return theta - cfg.a_k(k) * grad


def vocabulary(dataset: Dataset, lex: Lexicon) -> dict:
    vocab = {}
    for toks, _ in dataset:
        for t in toks:
            vocab[lex.canonical(t)] = lex[t]
    return vocab


def train(dataset: Dataset, cfg: AnsatzConfig = AnsatzConfig(), spsa: SpsaConfig = SpsaConfig(),
          lex: Lexicon | None = None, init: ParamStore | None = None) -> tuple[ParamStore, TrainLog]:
    """SPSA from a seeded uniform start; returns the lowest-loss iterate seen.

    The starting point counts as a candidate, and ties go to the earliest
    iterate.
    """
    if not dataset:
        raise ValueError("training needs a nonempty dataset")
    lex = lex if lex is not None else builtin_lexicon()
    start = init if init is not None else init_params(vocabulary(dataset, lex), cfg, spsa.seed)
    names = sorted(start)
    labels = [bool(y) for _, y in dataset]
    evals = [0]

    def probs(theta: np.ndarray) -> list[float]:
        binding = dict(zip(names, theta.tolist()))
        evals[0] += 1
        return predictions(dataset, binding, cfg, spsa.shots, lex, seed=[spsa.seed, evals[0]])

    def loss_fn(theta: np.ndarray) -> float:
        return bce_from_probabilities(probs(theta), labels)

    theta = start.vector(names)
    best_theta, best_loss = theta, loss_fn(theta)
    log = TrainLog()
    for k in range(spsa.iterations):
        theta = spsa_step(theta, k, loss_fn, spsa)
        p = probs(theta)
        loss = bce_from_probabilities(p, labels)
        if math.isnan(loss):
            raise NanLoss(f"loss is NaN at iteration {k}")
        acc = classification_metrics([x >= 0.5 for x in p], labels)[0]
        log.loss.append(loss)
        log.accuracy.append(acc)
        if loss < best_loss:
            best_theta, best_loss, log.best_iteration = theta, loss, k
    out = start.copy() if log.best_iteration < 0 else ParamStore.from_vector(names, best_theta)
    log.final = metrics(dataset, out, cfg, lex)
    return out, log
