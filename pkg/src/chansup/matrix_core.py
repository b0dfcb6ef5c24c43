"""Dense complex linear algebra shared by the rest of the package.

Matrices and state vectors are plain ``numpy`` arrays of dtype complex128.
All functions are pure and never modify their inputs.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import ContractError, DimensionError

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_RECON = 1e-10
TOL_SUPP = 1e-9

#: Value returned by :func:`rel_entropy` when the support condition fails.
INFINITE = math.inf


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-d complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError(f"{name} has non-finite entries")
    return arr


def as_square(m, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``(a (x) b)[i*rb + k, j*cb + l] = a[i, j] b[k, l]``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def kron_all(factors: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> None:
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionError(f"dims {list(dims)} do not match matrix shape {m.shape}")


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists the subsystem dimensions in tensor order; the kept
    subsystems stay in their original relative order.
    """
    m = as_square(m)
    dims = [int(x) for x in dims]
    _check_dims(m, dims)
    keep = sorted({int(k) for k in np.atleast_1d(keep)})
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    t = m.reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out_idx = keep + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out_idx)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(dk, dk)


def partial_transpose(m, dims: Sequence[int], sys) -> np.ndarray:
    """Transpose the subsystems listed in ``sys``."""
    m = as_square(m)
    dims = [int(x) for x in dims]
    _check_dims(m, dims)
    n = len(dims)
    sys = {int(s) for s in np.atleast_1d(sys)}
    t = m.reshape(dims + dims)
    perm = list(range(2 * n))
    for s in sys:
        perm[s], perm[n + s] = perm[n + s], perm[s]
    return t.transpose(perm).reshape(m.shape)


def is_hermitian(m, tol: float = TOL_HERM) -> bool:
    m = np.asarray(m)
    return bool(np.abs(m - dag(m)).max(initial=0.0) <= tol)


def herm_eig(m, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvector columns of a Hermitian matrix."""
    m = as_square(m)
    if not is_hermitian(m, tol):
        raise ContractError("herm_eig needs a Hermitian matrix")
    w, v = np.linalg.eigh((m + dag(m)) / 2)
    return w[::-1].copy(), v[:, ::-1].copy()


def is_psd(m, tol: float = TOL_PSD) -> bool:
    m = np.asarray(m)
    if not is_hermitian(m, tol):
        return False
    return bool(np.linalg.eigvalsh((m + dag(m)) / 2).min() >= -tol)


def _psd_eig(m: np.ndarray, name: str) -> tuple[np.ndarray, np.ndarray]:
    w, v = herm_eig(m, TOL_HERM)
    if w.size and w[-1] < -TOL_PSD:
        raise ContractError(f"{name} has eigenvalue {w[-1]:.3e} below -{TOL_PSD}")
    return w, v


def rel_entropy(rho, sigma) -> float:
    """Quantum relative entropy ``Tr(rho ln rho) - Tr(rho ln sigma)`` in nats.

    Logarithms are taken on the support (eigenvalues below ``TOL_SUPP``
    count as zero, and ``0 ln 0 = 0``). Returns :data:`INFINITE` when the
    support of ``rho`` is not contained in the support of ``sigma``.
    """
    rho = as_square(rho, "rho")
    sigma = as_square(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise DimensionError(f"shapes differ: {rho.shape} vs {sigma.shape}")
    p, _ = _psd_eig(rho, "rho")
    q, vq = _psd_eig(sigma, "sigma")
    # weight of rho on each eigenvector of sigma
    overlap = np.real(np.einsum("ij,ik,kj->j", vq.conj(), rho, vq))
    kernel = q <= TOL_SUPP
    if overlap[kernel].sum() > TOL_SUPP:
        return INFINITE
    p = p[p > TOL_SUPP]
    first = float(np.sum(p * np.log(p)))
    second = float(np.sum(overlap[~kernel] * np.log(q[~kernel])))
    return first - second


def entropy(rho) -> float:
    """Von Neumann entropy in nats."""
    w, _ = _psd_eig(as_square(rho), "rho")
    w = w[w > TOL_SUPP]
    return float(max(0.0, -np.sum(w * np.log(w))))


def check_orthonormal_columns(basis, tol: float = TOL_RECON) -> np.ndarray:
    basis = as_matrix(basis, "basis")
    gram = dag(basis) @ basis
    if np.abs(gram - np.eye(gram.shape[0])).max() > tol:
        raise ContractError("basis columns are not orthonormal")
    return basis


def l1_offdiag(m, basis) -> float:
    """Sum of moduli of the off-diagonal entries of ``m`` in the column basis."""
    m = as_square(m)
    basis = check_orthonormal_columns(basis)
    if basis.shape[0] != m.shape[0]:
        raise DimensionError("basis and matrix dimensions differ")
    coeffs = dag(basis) @ m @ basis
    return float(np.abs(coeffs).sum() - np.abs(np.diag(coeffs)).sum())


def trace_norm(m) -> float:
    return float(np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False).sum())


def trace_distance(a, b) -> float:
    return 0.5 * trace_norm(np.asarray(a) - np.asarray(b))


def is_unitary(u, tol: float = TOL_RECON) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(dag(u) @ u - np.eye(u.shape[0])).max() <= tol)


def require_unitary(u, name: str = "operator", tol: float = TOL_RECON) -> np.ndarray:
    u = as_square(u, name)
    if not is_unitary(u, tol):
        raise ContractError(f"{name} is not unitary")
    return u


def canonical_phase(v) -> np.ndarray:
    """Rotate a vector so its first entry with non-negligible modulus is real positive."""
    v = np.asarray(v, dtype=complex).copy()
    mags = np.abs(v)
    if mags.max(initial=0.0) == 0.0:
        return v
    idx = int(np.argmax(mags > 1e-12 * mags.max()))
    v *= np.conj(v[idx]) / mags[idx]
    v[idx] = mags[idx]
    return v


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())
