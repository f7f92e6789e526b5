"""Density-matrix measures and meaning updates.

Eigen-decompositions go through the Jacobi kernel. Entropy defaults to
base 2 so that the maximally mixed qubit scores exactly one bit, and fidelity
defaults to the squared convention, under which ``F(ρ, P) = Tr(ρP)`` for a
pure projector ``P``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidDistribution, NotHermitian, ZeroMass
from .kernels import jacobi_eigh
from .sim import DensityMatrix

MERGE_TOL = 1e-9
EIG_FLOOR = 1e-12
HERMITIAN_TOL = 1e-10
PURE_TOL = 1e-13

RHO_TRUE = np.array([[1, 0], [0, 0]], dtype=complex)
RHO_FALSE = np.array([[0, 0], [0, 1]], dtype=complex)
RHO_OPTIMAL = np.eye(2, dtype=complex) / 2
for _m in (RHO_TRUE, RHO_FALSE, RHO_OPTIMAL):
    _m.flags.writeable = False


def as_matrix(x) -> np.ndarray:
    if isinstance(x, DensityMatrix):
        return x.matrix
    if hasattr(x, "state"):
        return x.state.density().matrix
    return np.asarray(x, dtype=complex)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]

    def reconstruct(self) -> np.ndarray:
        return sum(x * p for x, p in zip(self.eigenvalues, self.projectors))

    def apply(self, fn) -> np.ndarray:
        """``Σ fn(x_i) P_i``."""
        return sum(fn(x) * p for x, p in zip(self.eigenvalues, self.projectors))


def spectral(sigma, merge_tol: float = MERGE_TOL) -> SpectralDecomposition:
    """Distinct eigenvalues (descending) with their eigenspace projectors."""
    m = as_matrix(sigma)
    if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NotHermitian("spectral decomposition needs a Hermitian matrix")
    w, v = jacobi_eigh((m + m.conj().T) / 2)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    values: list[float] = []
    groups: list[list[int]] = []
    for i, x in enumerate(w):
        if values and abs(values[-1] - x) <= merge_tol:
            groups[-1].append(i)
        else:
            values.append(float(x))
            groups.append([i])
    projectors = []
    for g, grp in enumerate(groups):
        vs = v[:, grp]
        projectors.append(vs @ vs.conj().T)
        values[g] = float(np.mean(w[grp]))
    return SpectralDecomposition(tuple(values), tuple(projectors))


def _eigvals(rho) -> np.ndarray:
    m = as_matrix(rho)
    w, _ = jacobi_eigh((m + m.conj().T) / 2)
    return w


def von_neumann_entropy(rho, base: float | str = 2) -> float:
    w = _eigvals(rho)
    w = w[w > EIG_FLOOR]
    if base == 2:
        logs = np.log2(w)
    elif base == "e":
        logs = np.log(w)
    else:
        logs = np.log(w) / math.log(base)
    return float(max(0.0, -np.sum(w * logs)))


def shannon_entropy(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if p.size == 0 or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise InvalidDistribution(f"not a probability vector: {p.tolist()}")
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def purity(rho) -> float:
    m = as_matrix(rho)
    return float(np.real(np.trace(m @ m)))


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = jacobi_eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _rank_one(m: np.ndarray) -> np.ndarray | None:
    """``sqrt(λ) v`` if ``m = λ v v†`` up to round-off, else None."""
    w, v = jacobi_eigh((m + m.conj().T) / 2)
    top = float(w[-1])
    if top <= 0 or np.any(np.abs(w[:-1]) > PURE_TOL * top):
        return None
    return math.sqrt(top) * v[:, -1]


def fidelity(rho, sigma, convention: str = "squared") -> float:
    """``Tr sqrt(sqrt(ρ) σ sqrt(ρ))``, squared unless ``convention='sqrt'``.

    If either side is rank one the closed form ``sqrt(<ψ|σ|ψ>)`` is used:
    the general route takes square roots of round-off eigenvalues and loses
    about 1e-10 of accuracy exactly where the projector identity is needed.
    """
    if convention not in ("sqrt", "squared"):
        raise ValueError(f"unknown fidelity convention {convention!r}")
    a, b = as_matrix(rho), as_matrix(sigma)
    for pure, other in ((a, b), (b, a)):
        psi = _rank_one(pure)
        if psi is not None:
            f2 = min(max(float(np.real(np.vdot(psi, other @ psi))), 0.0), 1.0)
            return f2 if convention == "squared" else math.sqrt(f2)
    r = psd_sqrt(a)
    inner = r @ b @ r
    f = float(np.sum(np.sqrt(np.clip(_eigvals(inner), 0.0, None))))
    f = min(f, 1.0)
    return f * f if convention == "squared" else f


def _normalised(m: np.ndarray, what: str) -> tuple[DensityMatrix, float]:
    mass = float(np.real(np.trace(m)))
    if mass <= EIG_FLOOR:
        raise ZeroMass(f"{what} has zero trace")
    out = m / mass
    return DensityMatrix((out + out.conj().T) / 2, mass), mass


def fuzz(rho, sigma) -> tuple[DensityMatrix, float]:
    """``Σ x_i P_i ρ P_i`` over the spectral decomposition ``σ = Σ x_i P_i``, renormalised."""
    m = as_matrix(rho)
    dec = spectral(sigma)
    out = sum(x * (p @ m @ p) for x, p in zip(dec.eigenvalues, dec.projectors))
    return _normalised(out, "fuzz result")


def phaser(rho, sigma) -> tuple[DensityMatrix, float]:
    """``M ρ M`` with ``M = Σ sqrt(x_i) P_i`` the square root of ``σ``, renormalised."""
    m = as_matrix(rho)
    dec = spectral(sigma)
    root = dec.apply(lambda x: math.sqrt(max(x, 0.0)))
    return _normalised(root @ m @ root, "phaser result")


def project_true(rho_sentence) -> tuple[DensityMatrix, float]:
    m = as_matrix(rho_sentence)
    if m.shape != (2, 2):
        raise ValueError("project_true expects a single-qubit density matrix")
    out = RHO_TRUE @ m @ RHO_TRUE
    mass = float(np.real(out[0, 0]))
    if mass <= EIG_FLOOR:
        raise ZeroMass("the state has no True component")
    return DensityMatrix(out / mass, mass), mass


def rho_references() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return RHO_TRUE.copy(), RHO_FALSE.copy(), RHO_OPTIMAL.copy()
