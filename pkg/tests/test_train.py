import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discopile.ansatz import AnsatzConfig, init_params
from discopile.corpus import builtin_corpus
from discopile.errors import NanLoss
from discopile.pregroup import builtin_lexicon
from discopile.train import (
    SpsaConfig,
    TrainLog,
    bce_from_probabilities,
    bce_loss,
    classification_metrics,
    sentence_probability,
    spsa_step,
    train,
    vocabulary,
)

LEX = builtin_lexicon()
CORPUS = builtin_corpus()


def test_bce_examples():
    assert bce_from_probabilities([0.5], [True]) == pytest.approx(math.log(2), abs=1e-15)
    assert bce_from_probabilities([0.9], [True]) == pytest.approx(0.10536, abs=1e-5)
    assert bce_from_probabilities([0.9], [False]) == pytest.approx(-math.log(0.1), abs=1e-12)
    assert math.isfinite(bce_from_probabilities([0.0, 1.0], [True, False]))


def test_metrics_examples():
    gold = [True] * 8 + [False] * 8
    acc, kappa, f1 = classification_metrics([True] * 16, gold)
    assert (acc, kappa) == (0.5, 0.0)
    assert f1 == pytest.approx(2 / 3)
    assert classification_metrics([False] * 16, gold) == (0.5, 0.0, 0.0)
    assert classification_metrics(gold, gold) == (1.0, 1.0, 1.0)
    assert classification_metrics([True], [True]) == (1.0, 1.0, 1.0)
    flipped = [not g for g in gold]
    acc, kappa, f1 = classification_metrics(flipped, gold)
    assert (acc, kappa, f1) == (0.0, -1.0, 0.0)


def test_schedule():
    cfg = SpsaConfig(iterations=100, a=1.0, c=0.5)
    assert cfg.stability == 1.0
    assert cfg.a_k(0) == pytest.approx(1.0 / 2 ** 0.602)
    assert cfg.c_k(9) == pytest.approx(0.5 / 10 ** 0.101)
    with pytest.raises(ValueError):
        SpsaConfig(iterations=-1)
    with pytest.raises(ValueError):
        SpsaConfig(c=0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 10))
def test_spsa_minimises_a_quadratic(seed, d):
    theta0 = np.random.default_rng(seed).uniform(-3, 3, size=d)
    cfg = SpsaConfig(a=0.2, c=0.1, seed=seed)
    calls = [0]

    def loss(t):
        calls[0] += 1
        return float(t @ t)

    theta = theta0
    for k in range(300):
        theta = spsa_step(theta, k, loss, cfg)
    assert calls[0] == 600
    assert np.linalg.norm(theta) < 0.1 * np.linalg.norm(theta0)


def test_spsa_step_is_deterministic_and_rejects_nan():
    cfg = SpsaConfig(seed=5)
    t = np.arange(4.0)
    f = lambda x: float(np.sum(np.sin(x)))
    assert np.array_equal(spsa_step(t, 3, f, cfg), spsa_step(t, 3, f, cfg))
    assert not np.array_equal(spsa_step(t, 3, f, cfg), spsa_step(t, 4, f, cfg))
    with pytest.raises(NanLoss):
        spsa_step(t, 0, lambda x: float("nan"), cfg)


def test_single_sentence_is_learned_quickly():
    data = [(("pancakes", "are", "tasty"), True)]
    params, log = train(data, spsa=SpsaConfig(iterations=50, seed=1))
    assert len(log) == 50
    assert log.final[0] == 1.0
    assert sentence_probability(data[0][0], params)[0] > 0.5


def test_zero_iterations_returns_initial_parameters():
    data = list(CORPUS.sentences)
    params, log = train(data, spsa=SpsaConfig(iterations=0, seed=2))
    assert params == init_params(vocabulary(data, LEX), AnsatzConfig(), 2)
    assert len(log) == 0 and log.best_iteration == -1
    assert log.to_csv() == "iter,loss,accuracy\n"


def test_training_is_deterministic_and_returns_best_iterate():
    data = list(CORPUS.sentences)[:6]
    spsa = SpsaConfig(iterations=15, seed=3)
    p1, l1 = train(data, spsa=spsa)
    p2, l2 = train(data, spsa=spsa)
    assert p1 == p2 and l1.to_csv() == l2.to_csv()
    start = bce_loss(data, init_params(vocabulary(data, LEX), AnsatzConfig(), 3))
    assert bce_loss(data, p1) == pytest.approx(min([start] + l1.loss), abs=1e-12)


def test_loss_is_permutation_invariant():
    data = list(CORPUS.sentences)
    params = init_params(vocabulary(data, LEX), AnsatzConfig(), 8)
    order = np.random.default_rng(0).permutation(len(data))
    shuffled = [data[i] for i in order]
    assert bce_loss(data, params) == pytest.approx(bce_loss(shuffled, params), abs=1e-12)


def test_shot_estimate_is_close_to_exact():
    toks = ("women", "are", "hungry")
    params = init_params(vocabulary([(toks, True)], LEX), AnsatzConfig(), 6)
    exact = sentence_probability(toks, params)[0]
    shot = sentence_probability(toks, params, shots=200_000, seed=1)[0]
    assert abs(exact - shot) <= 0.005
    assert shot == sentence_probability(toks, params, shots=200_000, seed=1)[0]


def test_log_csv_is_exact():
    log = TrainLog([0.1 + 2e-17, 0.5], [0.25, 1.0])
    rows = log.to_csv().splitlines()
    assert rows[0] == "iter,loss,accuracy"
    assert float(rows[1].split(",")[1]) == 0.1 + 2e-17
    assert rows[2] == "1,0.5,1.0"


def test_train_rejects_empty_dataset():
    with pytest.raises(ValueError):
        train([], spsa=SpsaConfig(iterations=1))
