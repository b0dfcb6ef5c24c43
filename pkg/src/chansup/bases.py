"""Reference operator bases and their Choi basis states.

A basis is a list of ``d**2`` operators ``F_i`` with ``Tr(F_i^dag F_j) = d delta_ij``.
Two canonical families are provided: the matrix units ``sqrt(d)|i><j|``
(``non_unitary``) and the clock-and-shift unitaries ``Z^m X^n``
(``schwinger``). The pair ``(m, n)`` is flattened to ``i = m*d + n``
everywhere in the package.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError, DimensionError, UnsupportedConversionError
from .matrix_core import TOL_RECON, dag

KINDS = ("non_unitary", "schwinger", "custom")


@dataclass(frozen=True, eq=False)
class BasisSet:
    """``d**2`` Hilbert-Schmidt orthonormal operators, stacked as ``(d**2, d, d)``.

    ``phases`` records the unit-modulus factors ``f_i`` when the operators
    are a primed family ``F'_i = f_i F_i``; ``ops`` always holds the
    operators actually in use.
    """

    dim: int
    ops: np.ndarray
    kind: str = "custom"
    phases: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=complex)
        d = int(self.dim)
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if ops.shape != (d * d, d, d):
            raise DimensionError(f"expected {d * d} operators of shape {d}x{d}, got {ops.shape}")
        if not np.all(np.isfinite(ops)):
            raise ContractError("basis operators contain non-finite entries")
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "dim", d)
        if self.phases is not None:
            ph = np.asarray(self.phases, dtype=complex)
            ph.setflags(write=False)
            object.__setattr__(self, "phases", ph)

    def __len__(self) -> int:
        return self.ops.shape[0]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.ops[i]

    def gram(self) -> np.ndarray:
        """``G_ij = Tr(F_i^dag F_j) / d``; the identity for a valid basis."""
        flat = self.ops.reshape(len(self), -1)
        return flat.conj() @ flat.T / self.dim

    def gram_residual(self) -> float:
        return float(np.abs(self.gram() - np.eye(len(self))).max())

    def validate(self, tol: float = TOL_RECON) -> "BasisSet":
        res = self.gram_residual()
        if res > tol:
            raise ContractError(f"basis is not Hilbert-Schmidt orthonormal (residual {res:.3e})")
        return self

    def with_phases(self, phases: Sequence[complex]) -> "BasisSet":
        """Primed family ``f_i F_i``; phases must have unit modulus."""
        ph = np.asarray(phases, dtype=complex).reshape(-1)
        if ph.shape != (len(self),):
            raise DimensionError(f"need {len(self)} phases, got {ph.size}")
        if np.abs(np.abs(ph) - 1).max() > TOL_RECON:
            raise ContractError("phases must have unit modulus")
        base = self.ops if self.phases is None else self.ops * np.conj(self.phases)[:, None, None]
        return BasisSet(self.dim, base * ph[:, None, None], self.kind, ph)

    def expand(self, op) -> np.ndarray:
        """Coefficients ``c_i = Tr(F_i^dag op) / d`` so that ``op = sum_i c_i F_i``."""
        op = np.asarray(op, dtype=complex)
        return np.einsum("kij,ij->k", self.ops.conj(), op) / self.dim


def _check_dim(d: int) -> int:
    d = int(d)
    if d < 2:
        raise DimensionError(f"dimension must be at least 2, got {d}")
    return d


def non_unitary_basis(d: int) -> BasisSet:
    """Scaled matrix units ``R_ij = sqrt(d) |i><j|`` in lexicographic order."""
    d = _check_dim(d)
    ops = np.zeros((d * d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            ops[i * d + j, i, j] = np.sqrt(d)
    return BasisSet(d, ops, "non_unitary")


def clock(d: int) -> np.ndarray:
    """Generalized phase flip ``Z = sum_k xi^k |k><k|`` with ``xi = exp(2 pi i / d)``."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def shift(d: int) -> np.ndarray:
    """Generalized bit flip ``X|k> = |k+1 mod d>``."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def weyl(m: int, n: int, d: int) -> np.ndarray:
    """``Z^m X^n`` built entrywise: ``<k| Z^m X^n |l> = xi^(m k) delta(k, l+n)``."""
    k = np.arange(d)
    out = np.zeros((d, d), dtype=complex)
    out[k, (k - n) % d] = np.exp(2j * np.pi * m * k / d)
    return out


def schwinger_basis(d: int) -> BasisSet:
    """Clock-and-shift unitaries ``S_mn = Z^m X^n`` with index ``m*d + n``."""
    d = _check_dim(d)
    ops = np.stack([weyl(m, n, d) for m in range(d) for n in range(d)])
    return BasisSet(d, ops, "schwinger")


def fourier_a(d: int) -> np.ndarray:
    """``a_lj = exp(-2 pi i l j / d) / sqrt(d)``."""
    k = np.arange(d)
    return np.exp(-2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


def fourier_b(d: int) -> np.ndarray:
    """``b_kn = exp(2 pi i k n / d) / sqrt(d)``."""
    return fourier_a(d).conj()


def convert_basis(frm: BasisSet) -> tuple[BasisSet, np.ndarray]:
    """Switch between the two canonical families.

    Returns ``(to, T)`` with ``frm[i] = sum_j T[i, j] to[j]``. The
    coefficient matrix is assembled from the Fourier matrices:

    * ``R_jk = sum_l a_lj S_(l, (j-k) mod d)``
    * ``S_mn = sum_k b_mk R_(k, (k-n) mod d)``

    ``T`` is unitary. Phases of a primed input family are ignored; the
    unprimed canonical family is used on both sides.
    """
    d = frm.dim
    T = np.zeros((d * d, d * d), dtype=complex)
    if frm.kind == "non_unitary":
        a = fourier_a(d)
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    T[j * d + k, l * d + (j - k) % d] = a[l, j]
        return schwinger_basis(d), T
    if frm.kind == "schwinger":
        b = fourier_b(d)
        for m in range(d):
            for n in range(d):
                for k in range(d):
                    T[m * d + n, k * d + (k - n) % d] = b[m, k]
        return non_unitary_basis(d), T
    raise UnsupportedConversionError(f"no canonical conversion for kind {frm.kind!r}")


def custom_basis(ops) -> BasisSet:
    """Wrap user operators; orthonormality is checked, never repaired."""
    ops = np.asarray(ops, dtype=complex)
    if ops.ndim != 3 or ops.shape[1] != ops.shape[2]:
        raise DimensionError(f"operators must be stacked as (n, d, d), got {ops.shape}")
    return BasisSet(ops.shape[1], ops, "custom").validate()


def max_entangled(d: int) -> np.ndarray:
    """``|psi> = sum_k |k>_I |k>_O / sqrt(d)``."""
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def op_to_choi_vector(op) -> np.ndarray:
    """``(I (x) op)|psi>``; entry ``[k*d + j]`` equals ``op[j, k] / sqrt(d)``."""
    op = np.asarray(op, dtype=complex)
    return op.T.reshape(-1) / np.sqrt(op.shape[0])


def choi_vector_to_op(vec) -> np.ndarray:
    """Inverse of :func:`op_to_choi_vector`."""
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    d = int(round(np.sqrt(vec.size)))
    return vec.reshape(d, d).T * np.sqrt(d)


@dataclass(frozen=True, eq=False)
class ChoiBasis:
    """Orthonormal Choi states ``|psi_i> = (I (x) F_i)|psi>`` as matrix columns."""

    basis: BasisSet
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.dim

    def state(self, i: int) -> np.ndarray:
        return self.vectors[:, i]

    def coefficients(self, m) -> np.ndarray:
        """Matrix elements ``<psi_i| m |psi_j>``."""
        return dag(self.vectors) @ np.asarray(m, dtype=complex) @ self.vectors

    def gram(self) -> np.ndarray:
        return dag(self.vectors) @ self.vectors


def choi_basis(b: BasisSet) -> ChoiBasis:
    b.validate()
    vecs = np.stack([op_to_choi_vector(f) for f in b.ops], axis=1)
    vecs.setflags(write=False)
    return ChoiBasis(b, vecs)


def canonical_basis(kind: str, d: int) -> BasisSet:
    if kind in ("non_unitary", "nonunitary"):
        return non_unitary_basis(d)
    if kind == "schwinger":
        return schwinger_basis(d)
    raise UnsupportedConversionError(f"unknown canonical family {kind!r}")
