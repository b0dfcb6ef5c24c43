"""Quantum operations in Kraus form and their Choi / process-matrix pictures.

Choi matrices live on input (x) output with the channel acting on the
second slot, ``C = sum_m (I (x) E_m)|psi><psi|(I (x) E_m)^dag`` and
``|psi> = sum_k |kk> / sqrt(d)``. A trace-preserving channel therefore has
unit-trace Choi matrix with ``Tr_O C = I/d``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .bases import BasisSet, choi_vector_to_op, op_to_choi_vector
from .errors import DimensionError, InvalidChannelError, NotAChannelError
from .matrix_core import (
    TOL_PSD,
    TOL_RECON,
    as_square,
    dag,
    herm_eig,
    is_hermitian,
    partial_trace,
)


@dataclass(frozen=True, eq=False)
class Channel:
    """A completely positive map given by its Kraus operators ``(n, d, d)``."""

    kraus: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[0] == 0 or k.shape[1] != k.shape[2]:
            raise DimensionError(f"Kraus operators must be a nonempty (n, d, d) stack, got {k.shape}")
        if not np.all(np.isfinite(k)):
            raise InvalidChannelError("Kraus operators contain non-finite entries")
        k.setflags(write=False)
        object.__setattr__(self, "kraus", k)

    @classmethod
    def unitary(cls, u) -> "Channel":
        return cls(np.asarray(u, dtype=complex)[None])

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    @cached_property
    def completeness_defect(self) -> np.ndarray:
        """``I - sum_m E_m^dag E_m``."""
        return np.eye(self.dim) - np.einsum("mji,mjk->ik", self.kraus.conj(), self.kraus)

    @property
    def is_trace_preserving(self) -> bool:
        return bool(np.abs(self.completeness_defect).max() <= TOL_PSD)

    @property
    def is_trace_non_increasing(self) -> bool:
        return bool(np.linalg.eigvalsh(self.completeness_defect).min() >= -TOL_PSD)

    def __call__(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return (self.kraus @ rho @ dag(self.kraus)).sum(axis=0)


@dataclass(frozen=True)
class ValidationReport:
    cp: bool
    tp: bool
    tni: bool
    defect_norm: float
    marginal_defect: float
    min_choi_eigenvalue: float


def identity_channel(d: int) -> Channel:
    return Channel(np.eye(d, dtype=complex)[None])


def to_choi(ch: Channel) -> np.ndarray:
    vecs = np.stack([op_to_choi_vector(e) for e in ch.kraus], axis=1)
    return vecs @ dag(vecs)


def choi_dim(c) -> int:
    c = np.asarray(c)
    d = int(round(np.sqrt(c.shape[0])))
    if c.ndim != 2 or c.shape != (d * d, d * d):
        raise DimensionError(f"Choi matrix must be d^2 x d^2, got shape {c.shape}")
    return d


def output_marginal_defect(c) -> float:
    """``max |Tr_O C - I/d|``, zero for trace-preserving channels."""
    d = choi_dim(c)
    return float(np.abs(partial_trace(c, [d, d], [0]) - np.eye(d) / d).max())


def validate_choi(c, tol: float = TOL_PSD) -> ValidationReport:
    """CP and TP status read off a Choi matrix."""
    c = as_square(c, "Choi matrix")
    d = choi_dim(c)
    herm = is_hermitian(c)
    w = np.linalg.eigvalsh((c + dag(c)) / 2)
    cp = herm and w.min() >= -tol
    marginal = partial_trace(c, [d, d], [0])
    mdef = float(np.abs(marginal - np.eye(d) / d).max())
    tp = mdef <= tol
    # trace non-increasing <=> d Tr_O C <= I
    tni = bool(np.linalg.eigvalsh(np.eye(d) - d * (marginal + dag(marginal)) / 2).min() >= -tol)
    return ValidationReport(bool(cp), bool(tp), tni, float(d * mdef), mdef, float(w.min()))


def validate(ch: Channel) -> ValidationReport:
    """Check complete positivity, trace preservation and trace non-increase.

    Raises :class:`InvalidChannelError` when ``sum E^dag E`` exceeds the identity.
    """
    if not ch.is_trace_non_increasing:
        lam = np.linalg.eigvalsh(ch.completeness_defect).min()
        raise InvalidChannelError(f"sum E^dag E exceeds identity (defect eigenvalue {lam:.3e})")
    c = to_choi(ch)
    rep = validate_choi(c)
    defect = float(np.linalg.norm(ch.completeness_defect))
    return ValidationReport(rep.cp, rep.tp, True, defect, rep.marginal_defect, rep.min_choi_eigenvalue)


def apply_choi(c, rho) -> np.ndarray:
    """Channel action recovered from the Choi matrix, ``d Tr_I[(rho^T (x) I) C]``."""
    d = choi_dim(c)
    rho = as_square(rho, "rho")
    if rho.shape != (d, d):
        raise DimensionError(f"state is {rho.shape}, channel acts on dimension {d}")
    t = np.asarray(c, dtype=complex).reshape(d, d, d, d)
    # sum_{k,l} rho_kl C[(k, i), (l, j)]
    return d * np.einsum("kl,kilj->ij", rho, t)


def from_choi(c, tol: float = TOL_PSD) -> Channel:
    """Minimal Kraus decomposition from the spectrum of a Choi matrix."""
    d = choi_dim(c)
    w, v = herm_eig(as_square(c, "Choi matrix"))
    if w[-1] < -tol:
        raise NotAChannelError(f"Choi matrix has negative eigenvalue {w[-1]:.3e}")
    keep = w > tol
    if not np.any(keep):
        return Channel(np.zeros((1, d, d), dtype=complex))
    kraus = [np.sqrt(wx) * choi_vector_to_op(v[:, x]) for x, wx in zip(np.flatnonzero(keep), w[keep])]
    return Channel(np.stack(kraus))


def process_matrix(ch: Channel, b: BasisSet) -> np.ndarray:
    """Process matrix ``xi`` with ``Phi(s) = sum_ij xi_ij F_i s F_j^dag``.

    Kraus operators are expanded as ``E_m = sum_i a_mi F_i``, ``a_mi = Tr(F_i^dag E_m)/d``,
    and ``xi_ij = sum_m a_mi conj(a_mj)``.
    """
    if b.dim != ch.dim:
        raise DimensionError(f"basis dimension {b.dim} differs from channel dimension {ch.dim}")
    a = np.einsum("kij,mij->mk", b.ops.conj(), ch.kraus) / b.dim
    return a.T @ a.conj()


def apply_process_matrix(xi, b: BasisSet, rho) -> np.ndarray:
    return np.einsum("ij,iab,bc,jdc->ad", xi, b.ops, np.asarray(rho, dtype=complex), b.ops.conj())


def compose(a: Channel, b: Channel) -> Channel:
    """``a`` after ``b``: Kraus set ``{A_i B_j}``."""
    if a.dim != b.dim:
        raise DimensionError(f"cannot compose dimensions {a.dim} and {b.dim}")
    return Channel(np.einsum("iab,jbc->ijac", a.kraus, b.kraus).reshape(-1, a.dim, a.dim))


def tensor(a: Channel, b: Channel) -> Channel:
    return Channel(np.stack([np.kron(x, y) for x in a.kraus for y in b.kraus]))


def mix(channels: Sequence[Channel], weights: Sequence[float]) -> Channel:
    """Probabilistic mixture, Kraus operators scaled by ``sqrt(weight)``."""
    parts = [np.sqrt(w) * ch.kraus for ch, w in zip(channels, weights) if w > 0]
    return Channel(np.concatenate(parts))


def depolarizing(p: float) -> Channel:
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0 + 0j, -1.0])
    return Channel(np.stack([np.sqrt(1 - 3 * p / 4) * np.eye(2), *(np.sqrt(p / 4) * s for s in (sx, sy, sz))]))


def is_choi_close(a, b, tol: float = TOL_RECON) -> bool:
    return bool(np.abs(np.asarray(a) - np.asarray(b)).max() <= tol)
