"""Small complex linear-algebra helpers used by the quantum solvers."""

from __future__ import annotations

import numpy as np


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def herm(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


def is_hermitian(m: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(m - dagger(m))) <= tol)


def partial_trace(mat: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one tensor factor of an operator on C^dA (x) C^dB.

    keep=0 returns the dA x dA operator traced over B; keep=1 the reverse.
    """
    dA, dB = dims
    four = mat.reshape(dA, dB, dA, dB)
    if keep == 0:
        return np.einsum("ijkj->ik", four)
    if keep == 1:
        return np.einsum("ijil->jl", four)
    raise ValueError("keep must be 0 or 1")


def top_eigenvector(mat: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a deterministic eigenvector of a Hermitian matrix.

    Degenerate top eigenvalues are resolved by projecting the standard basis
    vectors onto the top eigenspace and keeping the first one with a
    non-negligible projection, so ties prefer low basis indices.  The global
    phase makes the first entry of magnitude above 1e-12 real and positive.
    Both choices keep repeated runs bit-identical.
    """
    vals, vecs = np.linalg.eigh(herm(mat))
    top = vals[-1]
    tol = 1e-10 * max(1.0, abs(top))
    space = vecs[:, vals >= top - tol]  # columns span the top eigenspace
    dim = mat.shape[0]
    v = None
    for j in range(dim):
        weights = space.conj()[j, :]  # <e_j | column>
        q = space @ weights
        norm = np.linalg.norm(q)
        if norm > 1e-8:
            v = q / norm
            break
    if v is None:  # numerically empty projections; fall back to eigh's choice
        v = vecs[:, -1].copy()
    for entry in v:
        if abs(entry) > 1e-12:
            v *= entry.conjugate() / abs(entry)
            break
    return float(top), v


def projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def inv_sqrt_psd(mat: np.ndarray, ridge: float) -> np.ndarray:
    """Inverse square root of a PSD matrix after adding ridge * identity."""
    vals, vecs = np.linalg.eigh(herm(mat))
    vals = np.maximum(vals + ridge, ridge * 1e-3)
    return (vecs / np.sqrt(vals)) @ dagger(vecs)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases
