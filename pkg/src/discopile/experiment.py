"""Prediction mixtures over cross-category sentence pairs, with entropy and fidelity averages."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzConfig
from .corpus import EXPERIMENT_ANSATZ, Corpus, cross_category_pairs
from .mixer import prediction_plan
from .pregroup import Lexicon, builtin_lexicon
from .semantics import RHO_FALSE, RHO_TRUE, fidelity, rho_references, von_neumann_entropy
from .sim import partial_trace, reduced, run_pure
from .train import sentence_circuit
from .workers import ordered_map

__all__ = ["PairResult", "Report", "run_experiment", "rho_references", "sentence_density"]


@dataclass(frozen=True)
class PairResult:
    nouns: tuple[str, str]
    adjective: str
    entropy: float
    fid_true: float
    fid_false: float
    branch_weights: tuple[float, ...]
    rho: np.ndarray = field(repr=False, compare=False)
    oracle_deviation: float = 0.0

    def to_dict(self) -> dict:
        return {
            "nouns": list(self.nouns),
            "adjective": self.adjective,
            "entropy": self.entropy,
            "fid_true": self.fid_true,
            "fid_false": self.fid_false,
            "branch_weights": list(self.branch_weights),
        }


@dataclass(frozen=True)
class Report:
    avg_entropy: float
    avg_fid_true: float
    avg_fid_false: float
    diag_true_vs_true: float
    diag_false_vs_false: float
    diag_false_vs_true: float
    diag_true_vs_false: float
    pairs: tuple[PairResult, ...]

    @property
    def max_oracle_deviation(self) -> float:
        return max((p.oracle_deviation for p in self.pairs), default=0.0)

    def to_dict(self) -> dict:
        return {
            "avg_entropy": self.avg_entropy,
            "avg_fid_true": self.avg_fid_true,
            "avg_fid_false": self.avg_fid_false,
            "diagnostics": {
                "diag_true_vs_true": self.diag_true_vs_true,
                "diag_false_vs_false": self.diag_false_vs_false,
                "diag_false_vs_true": self.diag_false_vs_true,
                "diag_true_vs_false": self.diag_true_vs_false,
            },
            "pairs": [p.to_dict() for p in self.pairs],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _mean(xs) -> float:
    xs = list(xs)
    return math.fsum(xs) / len(xs) if xs else float("nan")


def sentence_density(tokens, params, cfg: AnsatzConfig, lex: Lexicon) -> np.ndarray:
    res = run_pure(sentence_circuit(tuple(tokens), lex, cfg), params)
    return reduced(res, ["sentence"]).matrix


def run_experiment(corpus: Corpus, params, cfg: AnsatzConfig = EXPERIMENT_ANSATZ,
                   lex: Lexicon | None = None, probs: tuple[float, float] = (0.5, 0.5)) -> Report:
    lex = lex if lex is not None else builtin_lexicon()

    def one(pair) -> PairResult:
        plan = prediction_plan(pair.true_sentence, pair.false_sentence, lex, cfg, probs)
        res = plan.run(params)
        oracle = plan.oracle(params)
        pos = res.position("sentence")
        rho = res.rho.matrix
        if len(res.labels) > 1:
            rho = partial_trace(res.rho, [pos]).matrix
            orho = partial_trace(oracle.rho, [oracle.position("sentence")]).matrix
        else:
            orho = oracle.rho.matrix
        return PairResult(
            pair.nouns,
            pair.adjective,
            von_neumann_entropy(rho),
            fidelity(rho, RHO_TRUE),
            fidelity(rho, RHO_FALSE),
            res.branch_weights,
            rho,
            float(np.max(np.abs(rho - orho))),
        )

    pairs = tuple(ordered_map(one, cross_category_pairs(corpus)))
    pure = {t: sentence_density(t, params, cfg, lex) for t, _ in corpus.sentences}
    true_s = [pure[t] for t, y in corpus.sentences if y]
    false_s = [pure[t] for t, y in corpus.sentences if not y]
    return Report(
        avg_entropy=_mean(p.entropy for p in pairs),
        avg_fid_true=_mean(p.fid_true for p in pairs),
        avg_fid_false=_mean(p.fid_false for p in pairs),
        diag_true_vs_true=_mean(fidelity(r, RHO_TRUE) for r in true_s),
        diag_false_vs_false=_mean(fidelity(r, RHO_FALSE) for r in false_s),
        diag_false_vs_true=_mean(fidelity(r, RHO_TRUE) for r in false_s),
        diag_true_vs_false=_mean(fidelity(r, RHO_FALSE) for r in true_s),
        pairs=pairs,
    )
