import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _oracle as O
from discopile import _pykernels, kernels
from discopile.circuit import CNOT, CRz, Circuit, Discard, H, PostselectZero, Ry, Rz, Unitary, X, controlled
from discopile.errors import ZeroPostselectMass
from discopile.sim import (
    DensityMatrix,
    born_distribution,
    dump_state,
    partial_trace,
    run_density,
    run_pure,
    sample_shots,
)


def random_circuit(rng, n, n_gates, terminal=()):
    events, oracle_ops = [], []
    for _ in range(n_gates):
        kind = rng.integers(4)
        if kind == 0:
            q = int(rng.integers(n))
            t = float(rng.uniform(0, 2 * math.pi))
            events.append(Unitary(Ry(q, t)))
            oracle_ops.append(("U", O.ry(t), [q]))
        elif kind == 1:
            q = int(rng.integers(n))
            events.append(Unitary(H(q)))
            oracle_ops.append(("U", O.LITERAL["H"], [q]))
        elif kind == 2 and n > 1:
            a, b = (int(x) for x in rng.choice(n, 2, replace=False))
            events.append(Unitary(CNOT(a, b)))
            oracle_ops.append(("U", O.LITERAL["CNOT"], [a, b]))
        elif n > 1:
            a, b = (int(x) for x in rng.choice(n, 2, replace=False))
            t = float(rng.uniform(0, 2 * math.pi))
            events.append(Unitary(CRz(a, b, t)))
            oracle_ops.append(("U", O.crz(t), [a, b]))
    for kind, q in terminal:
        events.append(PostselectZero(q) if kind == "P" else Discard(q))
        oracle_ops.append((kind, q))
    return Circuit(n, tuple(events)), oracle_ops


def test_hadamard_on_zero():
    r = run_pure(Circuit(1, (Unitary(H(0)),)))
    assert np.allclose(r.state.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)


def test_x_then_cnot_gives_11():
    r = run_pure(Circuit(2, (Unitary(X(0)), Unitary(CNOT(0, 1)))))
    assert np.allclose(r.state.amplitudes, [0, 0, 0, 1])


def test_bell_effect_on_bell_state_has_unit_success():
    ev = (Unitary(H(0)), Unitary(CNOT(0, 1)), Unitary(CNOT(0, 1)), Unitary(H(0)), PostselectZero(0), PostselectZero(1))
    assert run_pure(Circuit(2, ev)).success_probability == pytest.approx(1.0, abs=1e-12)


def test_discarded_half_of_bell_pair_is_maximally_mixed():
    r = run_density(Circuit(2, (Unitary(H(0)), Unitary(CNOT(0, 1)), Discard(0))))
    assert np.allclose(r.rho, np.eye(2) / 2, atol=1e-15)


def test_two_way_mixture_x_identity():
    c = Circuit(2, (Unitary(H(0)), Unitary(controlled(0, [X(1)])), Unitary(X(0)), Discard(0)))
    r = run_density(c)
    assert np.allclose(r.rho, np.eye(2) / 2, atol=1e-15)


def test_zero_postselect_mass_raises():
    with pytest.raises(ZeroPostselectMass):
        run_pure(Circuit(1, (Unitary(X(0)), PostselectZero(0))))
    with pytest.raises(ZeroPostselectMass):
        run_density(Circuit(1, (Unitary(X(0)), PostselectZero(0))))


def test_pure_rejects_discard():
    with pytest.raises(ValueError):
        run_pure(Circuit(1, (Discard(0),)))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_engines_agree_on_discard_free_circuits(seed, n):
    rng = np.random.default_rng(seed)
    c, ops = random_circuit(rng, n, 8)
    psi = run_pure(c).state.amplitudes
    rho = run_density(c).rho
    assert np.max(np.abs(rho - np.outer(psi, psi.conj()))) <= 1e-10
    ref, _ = O.run(n, ops)
    assert np.max(np.abs(rho - ref)) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_density_engine_matches_oracle_with_terminal_events(seed):
    rng = np.random.default_rng(seed)
    n = 4
    c, ops = random_circuit(rng, n, 10, terminal=[("P", 1), ("D", 3)])
    try:
        r = run_density(c)
    except ZeroPostselectMass:
        return
    ref, mass = O.run(n, ops)
    assert r.qubits == (0, 2)
    assert np.max(np.abs(r.rho - ref)) <= 1e-10
    assert r.success_probability == pytest.approx(mass, abs=1e-12)


def test_deferred_discard_is_equivalent():
    rng = np.random.default_rng(7)
    head, _ = random_circuit(rng, 3, 8)
    tail = (Unitary(Ry(1, 0.7)), Unitary(CNOT(1, 2)), Unitary(Rz(2, 1.9)))
    early = Circuit(3, head.events + (Discard(0),) + tail)
    late = Circuit(3, head.events + tail + (Discard(0),))
    assert np.max(np.abs(run_density(early).rho - run_density(late).rho)) <= 1e-12


def test_postselection_masses_multiply():
    a, b = 0.4, 1.3
    c = Circuit(2, (Unitary(Ry(0, a)), Unitary(Ry(1, b)), PostselectZero(0), PostselectZero(1)))
    r = run_pure(c)
    assert r.success_probability == pytest.approx(math.cos(a / 2) ** 2 * math.cos(b / 2) ** 2, abs=1e-12)


def test_untouched_qubits_are_zero_and_in_order():
    r = run_pure(Circuit(3, (Unitary(X(2)),), {0: "a", 1: "b", 2: "c"}))
    assert r.qubits == (0, 1, 2) and r.kept_qubits == ("a", "b", "c")
    assert np.allclose(r.state.amplitudes, np.eye(8)[1])


def test_partial_trace():
    rng = np.random.default_rng(3)
    ra, rb = O.random_density(rng, 2), O.random_density(rng, 2)
    prod = np.kron(ra, rb)
    assert np.max(np.abs(partial_trace(prod, [0]).matrix - ra)) <= 1e-12
    assert np.max(np.abs(partial_trace(prod, [1]).matrix - rb)) <= 1e-12
    assert np.array_equal(partial_trace(prod, [0, 1]).matrix, prod)
    bell = np.zeros((4, 4)); bell[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(partial_trace(bell, [1]).matrix, np.eye(2) / 2)


def test_born_and_shots():
    plus = run_pure(Circuit(1, (Unitary(H(0)),)))
    assert born_distribution(plus, 0) == pytest.approx((0.5, 0.5), abs=1e-12)
    one = run_pure(Circuit(1, (Unitary(X(0)),)))
    assert born_distribution(one, 0) == (0.0, 1.0)
    zero = run_pure(Circuit(1))
    assert sample_shots(zero, 0, 100, seed=1) == (100, 0)
    assert sample_shots(plus, 0, 1000, 5) == sample_shots(plus, 0, 1000, 5)
    mixed = run_density(Circuit(2, (Unitary(H(0)), Unitary(CNOT(0, 1)), Discard(0))))
    assert born_distribution(mixed, 1) == pytest.approx((0.5, 0.5), abs=1e-12)


def test_shot_frequencies_concentrate():
    plus = run_pure(Circuit(1, (Unitary(H(0)),)))
    hits = sum(abs(sample_shots(plus, 0, 100_000, s)[0] / 100_000 - 0.5) < 0.01 for s in range(40))
    assert hits >= 38


def test_dump_state_triples():
    r = run_pure(Circuit(1, (Unitary(X(0)),)))
    data = json.loads(dump_state(r))
    assert data["entries"] == [[1, 1.0, 0.0]]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(1, 3))
def test_backends_agree(seed, n, k):
    if k > n:
        return
    rng = np.random.default_rng(seed)
    psi = O.random_state(rng, 2 ** n)
    targets = [int(q) for q in rng.choice(n, k, replace=False)]
    u = O.random_unitary(rng, 2 ** k)
    ref = O.embed(u, targets, n) @ psi
    assert np.max(np.abs(_pykernels.apply_unitary(psi, n, targets, u) - ref)) <= 1e-12
    assert np.max(np.abs(kernels.apply_unitary(psi, n, targets, u) - ref)) <= 1e-12


@pytest.mark.parametrize("d", [1, 2, 3, 4, 8, 16])
def test_jacobi_backends(d):
    rng = np.random.default_rng(d)
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    a = (z + z.conj().T) / 2
    for impl in (_pykernels.jacobi_eigh, kernels.jacobi_eigh):
        w, v = impl(a)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs(a @ v - v * w)) <= 1e-12
        assert np.max(np.abs(v.conj().T @ v - np.eye(d))) <= 1e-12
        assert np.max(np.abs(w - np.linalg.eigvalsh(a))) <= 1e-12


def test_debug_checks_run(monkeypatch):
    import discopile.sim as sim
    monkeypatch.setattr(sim, "DEBUG", True)
    r = run_density(Circuit(2, (Unitary(H(0)), Unitary(CNOT(0, 1)), Discard(0))))
    assert isinstance(r.state, DensityMatrix)
