"""Dense complex linear algebra on bipartite systems.

Composite indices follow ``a * dim_b + b``: subsystem A is the slow index.
Matrices are plain ``numpy`` arrays; nothing here mutates its inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionOverflow, NotHermitian, NotPSD, ShapeError

HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9

#: Largest number of matrix entries any constructed operator may hold.
ELEMENT_CAP = 2**22


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"shape error: expected a matrix, got ndim={m.ndim}")
    return m


def tensor_product(a, b, *, cap: int = ELEMENT_CAP) -> np.ndarray:
    """Kronecker product ``a ⊗ b``.

    Entry ``a[i, j] * b[k, l]`` lands at ``(i * rows_b + k, j * cols_b + l)``.
    Raises :class:`DimensionOverflow` if the result would exceed ``cap`` entries.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    size = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if size > cap:
        raise DimensionOverflow(f"dimension overflow: {size} entries exceeds cap {cap}")
    return np.kron(a, b)


def _check_bipartite(rho: np.ndarray, dim_a: int, dim_b: int) -> None:
    if dim_a < 1 or dim_b < 1:
        raise ShapeError(f"shape error: dimensions must be positive, got ({dim_a}, {dim_b})")
    n = dim_a * dim_b
    if rho.shape != (n, n):
        raise ShapeError(
            f"shape error: matrix of shape {rho.shape} does not match dims ({dim_a}, {dim_b})"
        )


def check_density_matrix(rho, *, tol: float = TRACE_TOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array."""
    rho = as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ShapeError(f"shape error: density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian("not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ShapeError(f"shape error: trace {tr!r} is not 1")
    if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
        raise NotPSD("not PSD")
    return rho


def partial_trace(rho, dim_a: int, dim_b: int, keep: str = "A") -> np.ndarray:
    """Reduced state of subsystem ``keep`` (``"A"`` or ``"B"``)."""
    rho = as_matrix(rho)
    _check_bipartite(rho, dim_a, dim_b)
    t = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    if keep == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose(rho, dim_a: int, dim_b: int) -> np.ndarray:
    """Transpose the B indices of a bipartite operator."""
    rho = as_matrix(rho)
    _check_bipartite(rho, dim_a, dim_b)
    t = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    return t.transpose(0, 3, 2, 1).reshape(rho.shape)


def hermitian_eigenvalues(m) -> np.ndarray:
    """Real spectrum of a Hermitian matrix, sorted descending.

    The input is symmetrized as ``(M + M†) / 2`` before diagonalization.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"shape error: matrix must be square, got {m.shape}")
    if m.size and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian("not Hermitian")
    m = 0.5 * (m + m.conj().T)
    return np.linalg.eigvalsh(m)[::-1]


def clamp_spectrum(eigenvalues, tol: float = PSD_TOL) -> np.ndarray:
    """Zero out eigenvalues in ``[-tol, 0)``; anything more negative is an error."""
    ev = np.asarray(eigenvalues, dtype=float)
    if ev.size and ev.min() < -tol:
        raise NotPSD(f"not PSD: eigenvalue {ev.min()!r}")
    return np.clip(ev, 0.0, None)


def schmidt_probs(amps, dim_a: int, dim_b: int) -> np.ndarray:
    """Squared Schmidt coefficients of a bipartite pure state, descending."""
    amps = np.asarray(amps, dtype=complex)
    if amps.shape != (dim_a * dim_b,):
        raise ShapeError(
            f"shape error: {amps.shape[0] if amps.ndim == 1 else amps.shape} amplitudes "
            f"for dims ({dim_a}, {dim_b})"
        )
    s = np.linalg.svd(amps.reshape(dim_a, dim_b), compute_uv=False)
    return s**2


def projector(amps) -> np.ndarray:
    amps = np.asarray(amps, dtype=complex)
    return np.outer(amps, amps.conj())


def regroup_axes(n_copies: int) -> list[int]:
    """Axis order taking ``(a1, b1, ..., aN, bN)`` to ``(a1, ..., aN, b1, ..., bN)``."""
    return [2 * i for i in range(n_copies)] + [2 * i + 1 for i in range(n_copies)]


def regroup_vector(vec, dim_a: int, dim_b: int, n_copies: int) -> np.ndarray:
    """Reorder an N-fold product vector so that all A factors come first."""
    vec = np.asarray(vec)
    t = vec.reshape((dim_a, dim_b) * n_copies)
    return t.transpose(regroup_axes(n_copies)).reshape(-1)


def regroup_operator(op, dim_a: int, dim_b: int, n_copies: int) -> np.ndarray:
    """Apply :func:`regroup_vector`'s permutation to both indices of an operator."""
    op = as_matrix(op)
    axes = regroup_axes(n_copies)
    t = op.reshape((dim_a, dim_b) * (2 * n_copies))
    full = axes + [2 * n_copies + ax for ax in axes]
    return t.transpose(full).reshape(op.shape)
