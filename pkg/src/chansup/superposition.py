"""Superposition-free operations and the two superposition measures.

Everything is read off the Choi matrix expressed in the Choi basis
``{|psi_i>}`` of a reference family. A channel is superposition free when
that matrix is diagonal; the dephased matrix is the closest free point for
both measures.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bases import BasisSet, choi_basis, fourier_a
from .channels import Channel
from .errors import InvalidPhaseError
from .matrix_core import INFINITE, TOL_RECON, dag, is_unitary, rel_entropy

TOL_FREE = 1e-9


@dataclass(frozen=True, eq=False)
class SfoDecomposition:
    """Weights ``p_i`` of a free channel ``sum_i p_i F_i . F_i^dag``."""

    basis: BasisSet
    weights: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True, eq=False)
class MeasureResult:
    value: float
    measure_kind: str
    basis: BasisSet
    closest_free: np.ndarray

    @property
    def is_infinite(self) -> bool:
        return self.value == INFINITE


def choi_coefficients(c, b: BasisSet) -> np.ndarray:
    """``<psi_i| C |psi_j>`` for the Choi basis of ``b``."""
    return choi_basis(b).coefficients(c)


def offdiag_max(c, b: BasisSet) -> float:
    coeffs = choi_coefficients(c, b)
    return float(np.abs(coeffs - np.diag(np.diag(coeffs))).max(initial=0.0))


def is_superposition_free(c, b: BasisSet, tol: float = TOL_FREE) -> Optional[SfoDecomposition]:
    """Diagonal weights when every off-diagonal Choi-basis entry is below ``tol``."""
    coeffs = choi_coefficients(c, b)
    off = coeffs - np.diag(np.diag(coeffs))
    if np.abs(off).max(initial=0.0) >= tol:
        return None
    return SfoDecomposition(b, np.real(np.diag(coeffs)).copy())


def dephase(c, b: BasisSet) -> np.ndarray:
    """``sum_i <psi_i|C|psi_i> |psi_i><psi_i|``."""
    cb = choi_basis(b)
    weights = np.einsum("ki,kl,li->i", cb.vectors.conj(), np.asarray(c, dtype=complex), cb.vectors)
    return (cb.vectors * weights) @ dag(cb.vectors)


def measure_l1(c, b: BasisSet) -> MeasureResult:
    coeffs = choi_coefficients(c, b)
    value = float(np.abs(coeffs).sum() - np.abs(np.diag(coeffs)).sum())
    return MeasureResult(value, "l1", b, dephase(c, b))


def measure_rel_entropy(c, b: BasisSet) -> MeasureResult:
    """Relative entropy of superposition; the minimiser is the dephased matrix.

    Trace-non-increasing channels are handled on their unnormalized Choi
    matrix. A support mismatch yields the infinite sentinel.
    """
    closest = dephase(c, b)
    return MeasureResult(rel_entropy(c, closest), "relative_entropy", b, closest)


def default_max_phases(b: BasisSet) -> np.ndarray:
    """Unit-modulus ``f_i`` making ``(1/d) sum_i f_i F_i`` unitary.

    * ``non_unitary``: ``r_kl = exp(-2 pi i k l / d)``, a discrete Fourier transform.
    * ``schwinger`` with ``d = 2``: ``(1, i, i, 1)``, i.e. ``(I + i sx + i sy + i sz)/2``
      since ``S_11 = i sy``.
    * ``schwinger`` with odd ``d``: Weyl coefficients of the Fourier unitary above.
    * ``schwinger`` with even ``d > 2``: Weyl coefficients of the chirped Fourier
      matrix ``exp(-i pi k^2 / d) exp(2 pi i k l / d) / sqrt(d)``.
    """
    d = b.dim
    if b.kind == "non_unitary":
        k = np.arange(d)
        return np.exp(-2j * np.pi * np.outer(k, k) / d).reshape(-1)
    if b.kind == "schwinger":
        if d == 2:
            return np.array([1, 1j, 1j, 1], dtype=complex)
        if d % 2:
            u = fourier_a(d)
        else:
            k = np.arange(d)
            u = np.exp(-1j * np.pi * k[:, None] ** 2 / d) * np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
        raw = np.einsum("kij,ij->k", b.ops.conj(), u)
        return raw / np.abs(raw)
    raise InvalidPhaseError("custom bases need explicit phases")


def max_superposed_operator(b: BasisSet, phases: Optional[Sequence[complex]] = None) -> np.ndarray:
    d = b.dim
    if phases is None:
        phases = default_max_phases(b) if b.phases is None else np.ones(len(b))
    f = np.asarray(phases, dtype=complex).reshape(-1)
    if f.shape != (len(b),):
        raise InvalidPhaseError(f"need {len(b)} phases, got {f.size}")
    if np.abs(np.abs(f) - 1).max() > TOL_RECON:
        raise InvalidPhaseError("phases must have unit modulus")
    u = np.einsum("k,kij->ij", f, b.ops) / d
    if not is_unitary(u):
        raise InvalidPhaseError("phases do not give a unitary operator")
    return u


def max_superposed(b: BasisSet, phases: Optional[Sequence[complex]] = None) -> Channel:
    """Maximally superposed unitary channel ``U_max = (1/d) sum_i f_i F_i``.

    Without explicit phases an already primed basis (``b.phases`` set) is
    used as is; otherwise :func:`default_max_phases` supplies them.
    """
    return Channel.unitary(max_superposed_operator(b, phases))


def primed_basis(b: BasisSet, phases: Optional[Sequence[complex]] = None) -> BasisSet:
    """Absorb the maximal-superposition phases so ``U_max = (1/d) sum_i F'_i``."""
    if phases is None and b.phases is not None:
        max_superposed_operator(b)
        return b
    f = default_max_phases(b) if phases is None else phases
    primed = b.with_phases(f)
    max_superposed_operator(primed)
    return primed
