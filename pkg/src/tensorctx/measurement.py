"""Observables, projective measurement and seeded sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .numerics import DEGENERACY_TOL, EPS, as_matrix, as_vector, dagger, eig_hermitian
from .rng import generator


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    spectrum: tuple[tuple[float, np.ndarray], ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> list[float]:
        return [lam for lam, _ in self.spectrum]

    def projector(self, outcome: float, tol: float = DEGENERACY_TOL) -> np.ndarray:
        for lam, p in self.spectrum:
            if abs(lam - outcome) <= tol:
                return p
        raise KeyError(f"{outcome} is not an eigenvalue")


@dataclass(frozen=True, eq=False)
class MeasurementResult:
    outcome: float
    probability: float
    post_state: np.ndarray | None  # None when the branch has (numerically) zero probability

    @property
    def defined(self) -> bool:
        return self.post_state is not None


def observable_from(matrix, tol: float = EPS) -> Observable:
    """Spectral decomposition with degenerate eigenvalues sharing one projector."""
    m = as_matrix(matrix, "observable")
    pairs = eig_hermitian(m, tol)
    spectrum: list[tuple[float, np.ndarray]] = []
    group: list[tuple[float, np.ndarray]] = []
    for lam, vec in pairs + [(None, None)]:
        if group and (lam is None or abs(group[-1][0] - lam) > DEGENERACY_TOL):
            vals = np.array([g[0] for g in group])
            vecs = np.stack([g[1] for g in group], axis=1)
            p = vecs @ dagger(vecs)
            p.setflags(write=False)
            spectrum.append((float(vals.mean()), p))
            group = []
        if lam is not None:
            group.append((lam, vec))
    return Observable(m, tuple(spectrum))


def _check(state, obs: Observable) -> np.ndarray:
    v = as_vector(state, "state")
    if v.size != obs.dim:
        raise DimensionMismatch(f"state has dim {v.size}, observable acts on C^{obs.dim}")
    return v


def measure(state, obs: Observable, tol: float = EPS) -> list[MeasurementResult]:
    """All branches of a projective measurement, in descending eigenvalue order."""
    v = _check(state, obs)
    out = []
    for lam, p in obs.spectrum:
        pv = p @ v
        prob = min(max(float(np.real(np.vdot(v, pv))), 0.0), 1.0)
        post = pv / np.sqrt(prob) if prob > tol else None
        out.append(MeasurementResult(lam, prob, post))
    return out


def sample(state, obs: Observable, seed: int, tol: float = EPS) -> MeasurementResult:
    """Draw one branch of ``measure`` using a stream seeded by ``seed`` alone."""
    branches = measure(state, obs, tol)
    u = generator(seed).random()
    acc = 0.0
    total = sum(b.probability for b in branches)
    live = [b for b in branches if b.defined]
    for b in live:
        acc += b.probability / total
        if u < acc:
            return b
    return live[-1]
