"""Dense complex linear algebra at small dimension.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Matrices are 2-D, vectors 1-D.  The Kronecker convention is lexicographic:
the basis pair ``(i, j)`` of ``C^d1 x C^d2`` lands on flat index ``i*d2 + j``,
which is what :func:`numpy.kron` produces.

SVD and the Hermitian eigensolver delegate to LAPACK through
:mod:`numpy.linalg`; this module adds the deterministic ordering and phase
conventions the rest of the package relies on for reproducible output.
"""

from __future__ import annotations

import numpy as np

from .errors import DecompositionError, DimensionMismatch, NotHermitian, NotUnitary

EPS = 1e-10
RECONSTRUCTION_TOL = 1e-9
UNITARY_TOL = 1e-8
DEGENERACY_TOL = 1e-8
RANK_RTOL = 1e-8
RANK_ATOL = 1e-12


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    m.setflags(write=False)
    return m


def as_vector(v, name: str = "vector") -> np.ndarray:
    x = np.array(v, dtype=np.complex128)
    if x.ndim == 2 and 1 in x.shape:
        x = x.reshape(-1)
    if x.ndim != 1 or x.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    x.setflags(write=False)
    return x


def kron(a, b) -> np.ndarray:
    """Kronecker product with lexicographic block layout.

    Works for two matrices or two vectors (vectors give a vector).
    """
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=np.complex128)).T


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0])))) <= tol


def require_unitary(u, dim: int | None = None, name: str = "matrix", tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate ``u`` as a unitary (optionally of a fixed dimension) and return it."""
    m = as_matrix(u, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimensionMismatch(f"{name} must be {dim}x{dim}, got {m.shape}")
    if not is_unitary(m, tol):
        dev = float(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))))
        raise NotUnitary(f"{name} is not unitary: max|U^dag U - I| = {dev:.3e}")
    return m


def is_hermitian(m, tol: float = EPS) -> bool:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m - dagger(m)))) <= tol


def _lead_index(v: np.ndarray) -> int:
    # first index whose magnitude is within rounding of the maximum
    mags = np.abs(v)
    return int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])


def _phase_fix(v: np.ndarray) -> np.ndarray:
    # make the leading (largest-magnitude) component real and positive
    k = _lead_index(v)
    if abs(v[k]) == 0:
        return v
    return v * (abs(v[k]) / v[k])


def _clusters(values: np.ndarray, gap: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for idx, val in enumerate(values):
        if groups and abs(values[groups[-1][-1]] - val) <= gap:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def _canonical_basis(vectors: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis for the span of the columns of ``vectors``.

    The span's projector is applied to the standard basis vectors in order and
    the images are Gram-Schmidt orthogonalized, so the result does not depend
    on which basis LAPACK happened to return.
    """
    k = vectors.shape[1]
    if k == 1:
        return _phase_fix(vectors[:, 0])[:, None]
    proj = vectors @ dagger(vectors)
    chosen: list[np.ndarray] = []
    for i in range(proj.shape[0]):
        w = proj[:, i].copy()
        for c in chosen:
            w -= c * np.vdot(c, w)
        nrm = np.linalg.norm(w)
        if nrm > 1e-6:
            chosen.append(w / nrm)
        if len(chosen) == k:
            break
    basis = [_phase_fix(c) for c in chosen]
    basis.sort(key=_lead_index)
    return np.stack(basis, axis=1)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``M = U @ diag(sigma) @ V^dag``.

    ``sigma`` is descending.  Each left singular vector is phase-fixed so its
    largest-magnitude entry is real positive (the matching right vector is
    rotated with it); within blocks of equal singular values the pairs are
    ordered by the index of that entry.
    """
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise DecompositionError(f"SVD did not converge for {a.shape} input") from exc
    v = dagger(vh)
    for k in range(len(s)):
        j = _lead_index(u[:, k])
        if abs(u[j, k]) > 0:
            ph = abs(u[j, k]) / u[j, k]
            u[:, k] *= ph
            v[:, k] *= ph
    order: list[int] = []
    for group in _clusters(s, DEGENERACY_TOL * max(1.0, float(s[0]) if len(s) else 1.0)):
        order.extend(sorted(group, key=lambda k: _lead_index(u[:, k])))
    return u[:, order], s[order], v[:, order]


def eig_hermitian(m, tol: float = EPS) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of a Hermitian matrix sorted by descending eigenvalue.

    Degenerate eigenspaces get a canonical basis (see ``_canonical_basis``);
    every eigenvector has its largest-magnitude entry real and positive.

    Raises:
        NotHermitian: if ``max|M - M^dag| > tol``.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"eigendecomposition needs a square matrix, got {a.shape}")
    if not is_hermitian(a, tol):
        dev = float(np.max(np.abs(a - dagger(a))))
        raise NotHermitian(f"matrix is not Hermitian: max|M - M^dag| = {dev:.3e}")
    try:
        w, v = np.linalg.eigh((a + dagger(a)) / 2)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise DecompositionError("Hermitian eigendecomposition did not converge") from exc
    w, v = w[::-1], v[:, ::-1]
    pairs: list[tuple[float, np.ndarray]] = []
    for group in _clusters(w, DEGENERACY_TOL):
        basis = _canonical_basis(v[:, group])
        for k, idx in enumerate(group):
            pairs.append((float(w[idx]), basis[:, k]))
    return pairs


def numerical_rank(sigma, rtol: float = RANK_RTOL, atol: float = RANK_ATOL) -> int:
    """Count singular values above ``max(rtol * sigma_max, atol)``."""
    s = np.asarray(sigma, dtype=float)
    if s.size == 0:
        return 0
    cut = max(rtol * float(s.max()), atol)
    return int(np.count_nonzero(s > cut))


def approx_eq_phase(x, y, tol: float = EPS) -> bool:
    """True iff ``x`` equals ``y`` up to a global phase, within ``tol`` in 2-norm.

    The phase is read off the largest-magnitude entry of ``y``.
    """
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if x.shape != y.shape:
        raise DimensionMismatch(f"cannot compare vectors of dims {x.size} and {y.size}")
    k = int(np.argmax(np.abs(y)))
    c = 1.0 + 0j
    if abs(y[k]) > 0 and abs(x[k]) > 0:
        r = x[k] / y[k]
        c = r / abs(r)
    return float(np.linalg.norm(x - c * y)) <= tol


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0
