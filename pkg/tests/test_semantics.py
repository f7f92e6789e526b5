import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _oracle as O
from discopile.errors import InvalidDistribution, NotHermitian, ZeroMass
from discopile.semantics import (
    RHO_FALSE,
    RHO_OPTIMAL,
    RHO_TRUE,
    fidelity,
    fuzz,
    phaser,
    project_true,
    purity,
    rho_references,
    shannon_entropy,
    spectral,
    von_neumann_entropy,
)

seeds = st.integers(0, 2 ** 32 - 1)


def brute_force_fidelity_sqrt(a, b):
    """Nuclear norm of sqrt(a) sqrt(b), with numpy's eigh and svd."""
    def root(m):
        w, v = np.linalg.eigh(m)
        return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    return float(np.sum(np.linalg.svd(root(a) @ root(b), compute_uv=False)))


def test_reference_matrices():
    t, f, opt = rho_references()
    assert np.array_equal(t, [[1, 0], [0, 0]])
    assert np.array_equal(f, [[0, 0], [0, 1]])
    assert np.array_equal(opt, np.eye(2) / 2)
    for m in (t, f, opt):
        assert np.trace(m) == 1
    t[0, 0] = 5
    assert RHO_TRUE[0, 0] == 1


def test_entropy_values():
    assert von_neumann_entropy(RHO_OPTIMAL) == pytest.approx(1.0, abs=1e-12)
    assert von_neumann_entropy(RHO_TRUE) == 0.0
    assert von_neumann_entropy(np.diag([0.9, 0.1])) == pytest.approx(0.4690, abs=1e-3)
    assert von_neumann_entropy(RHO_OPTIMAL, base="e") == pytest.approx(math.log(2), abs=1e-12)
    assert von_neumann_entropy(np.eye(4) / 4, base=4) == pytest.approx(1.0, abs=1e-12)


def test_shannon_entropy():
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert shannon_entropy([1.0, 0.0]) == 0.0
    with pytest.raises(InvalidDistribution):
        shannon_entropy([0.7, 0.7])
    with pytest.raises(InvalidDistribution):
        shannon_entropy([1.2, -0.2])
    p = [0.1, 0.2, 0.3, 0.4]
    assert shannon_entropy(p) == pytest.approx(von_neumann_entropy(np.diag(p)), abs=1e-12)


def test_fidelity_values():
    assert fidelity(RHO_OPTIMAL, RHO_TRUE) == pytest.approx(0.5, abs=1e-12)
    assert fidelity(RHO_TRUE, RHO_FALSE) == 0.0
    rng = np.random.default_rng(1)
    rho = O.random_density(rng, 2)
    for conv in ("sqrt", "squared"):
        assert fidelity(rho, rho, conv) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(ValueError):
        fidelity(rho, rho, "linear")


@settings(max_examples=200, deadline=None)
@given(seeds, st.sampled_from([2, 4]), st.booleans())
def test_fidelity_against_svd_oracle_and_symmetric(seed, d, pure):
    rng = np.random.default_rng(seed)
    a = O.random_density(rng, d, rank=1 if pure else None)
    b = O.random_density(rng, d)
    ref = brute_force_fidelity_sqrt(a, b)
    assert fidelity(a, b, "sqrt") == pytest.approx(ref, abs=1e-7)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-9)
    assert 0.0 <= fidelity(a, b) <= 1.0


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_fidelity_with_pure_projector_is_expectation(seed):
    rng = np.random.default_rng(seed)
    rho = O.random_density(rng, 2)
    psi = O.random_state(rng, 2)
    p = np.outer(psi, psi.conj())
    assert fidelity(rho, p) == pytest.approx(float(np.real(np.trace(rho @ p))), abs=1e-9)
    assert fidelity(rho, RHO_TRUE) + fidelity(rho, RHO_FALSE) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from([2, 3, 4, 8]))
def test_entropy_bounds_and_purity(seed, d):
    rng = np.random.default_rng(seed)
    rho = O.random_density(rng, d)
    s = von_neumann_entropy(rho)
    assert 0.0 <= s <= math.log2(d) + 1e-12
    pure = O.random_density(rng, d, rank=1)
    assert purity(pure) == pytest.approx(1.0, abs=1e-9)
    assert von_neumann_entropy(pure) == pytest.approx(0.0, abs=1e-9)


def test_spectral_examples():
    dec = spectral(np.diag([0.3, 0.7]))
    assert dec.eigenvalues == pytest.approx((0.7, 0.3))
    assert np.allclose(dec.projectors[0], np.diag([0, 1]))
    deg = spectral(np.eye(2) / 2)
    assert deg.eigenvalues == pytest.approx((0.5,))
    assert np.allclose(deg.projectors[0], np.eye(2))
    with pytest.raises(NotHermitian):
        spectral(np.array([[0, 1], [0, 0]]))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_spectral_reconstructs_with_orthogonal_projectors(seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = (z + z.conj().T) / 2
    dec = spectral(a)
    assert np.max(np.abs(dec.reconstruct() - a)) <= 1e-9
    for i, p in enumerate(dec.projectors):
        assert np.max(np.abs(p @ p - p)) <= 1e-9
        for q in dec.projectors[i + 1:]:
            assert np.max(np.abs(p @ q)) <= 1e-9


def test_fuzz_kronecker_delta_identity():
    out, mass = fuzz(np.diag([0.5, 0.5]), np.diag([0.7, 0.3]))
    assert mass == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(out.matrix, np.diag([0.7, 0.3]), atol=1e-12)
    ph, _ = phaser(np.diag([0.5, 0.5]), np.diag([0.7, 0.3]))
    assert np.allclose(ph.matrix, np.diag([0.7, 0.3]), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(seeds, st.sampled_from([2, 4]))
def test_fuzz_on_diagonals_matches_brute_force(seed, d):
    rng = np.random.default_rng(seed)
    x = rng.dirichlet(np.ones(d))
    y = rng.dirichlet(np.ones(d))
    expected = np.diag(x * y) / np.sum(x * y)
    for op in (fuzz, phaser):
        out, mass = op(np.diag(y), np.diag(x))
        assert mass == pytest.approx(float(np.sum(x * y)), abs=1e-12)
        assert np.max(np.abs(out.matrix - expected)) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_fuzz_equals_phaser_when_commuting(seed):
    rng = np.random.default_rng(seed)
    u = O.random_unitary(rng, 3)
    rho = u @ np.diag(rng.dirichlet(np.ones(3))) @ u.conj().T
    sigma = u @ np.diag(rng.dirichlet(np.ones(3))) @ u.conj().T
    a, _ = fuzz(rho, sigma)
    b, _ = phaser(rho, sigma)
    assert np.max(np.abs(a.matrix - b.matrix)) <= 1e-9
    for m in (a.matrix, b.matrix):
        assert np.trace(m).real == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(m - m.conj().T)) <= 1e-12
        assert np.linalg.eigvalsh(m).min() >= -1e-12


def test_fuzz_and_phaser_differ_when_not_commuting():
    plus = np.full((2, 2), 0.5)
    sigma = np.diag([0.8, 0.2])
    a, _ = fuzz(plus, sigma)
    b, _ = phaser(plus, sigma)
    assert np.max(np.abs(a.matrix - b.matrix)) > 0.1


def test_fuzz_special_cases():
    rng = np.random.default_rng(0)
    rho = O.random_density(rng, 2)
    out, _ = fuzz(rho, np.eye(2) / 2)
    assert np.allclose(out.matrix, rho, atol=1e-12)
    with pytest.raises(ZeroMass):
        fuzz(RHO_TRUE, RHO_FALSE)
    p, _ = phaser(rho, RHO_TRUE)
    assert np.allclose(p.matrix, RHO_TRUE, atol=1e-12)


def test_project_true():
    out, w = project_true(RHO_OPTIMAL)
    assert w == pytest.approx(0.5) and np.allclose(out.matrix, RHO_TRUE)
    out, w = project_true(np.diag([0.7, 0.3]))
    assert w == pytest.approx(0.7) and np.allclose(out.matrix, RHO_TRUE)
    with pytest.raises(ZeroMass):
        project_true(RHO_FALSE)
