"""Local versus non-local superposition of joint operations on A (x) B.

Kraus elements are split across the A|B cut by operator-Schmidt
decomposition (realignment followed by an SVD). The structure of the
resulting local families decides the class; the correlation state
``gamma`` of the channel gives entanglement and classicality witnesses.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bases import BasisSet
from .channels import Channel, from_choi, to_choi
from .errors import ContractError, DimensionError
from .matrix_core import (
    TOL_RECON,
    dag,
    entropy,
    herm_eig,
    partial_trace,
    partial_transpose,
    trace_norm,
)
from .protocols import embed
from .superposition import measure_l1

TOL_SCHMIDT = 1e-9
MAX_GAMMA_PRODUCT_DIM = 4


class ClassLabel(str, enum.Enum):
    L1_UNCORRELATED = "L1_uncorrelated"
    L2_CLASSICAL = "L2_classical"
    G1_CLASSICAL_QUANTUM = "G1_classical_quantum"
    G2_QUANTUM_CLASSICAL = "G2_quantum_classical"
    G3_QUANTUM_QUANTUM = "G3_quantum_quantum"
    G4_ENTANGLEMENT_LIKE = "G4_entanglement_like"
    UNRESOLVED = "unresolved"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, eq=False)
class BipartiteChannel(Channel):
    """A channel on ``A (x) B`` with local dimensions and optional declared factors.

    ``factors[k] = (A_k, B_k)`` must satisfy ``kraus[k] = A_k (x) B_k``.
    """

    dims: tuple = (2, 2)
    factors: Optional[tuple] = None

    def __post_init__(self):
        super().__post_init__()
        dims = tuple(int(x) for x in self.dims)
        if len(dims) != 2 or min(dims) < 1:
            raise DimensionError(f"need two local dimensions, got {self.dims}")
        if dims[0] * dims[1] != self.dim:
            raise DimensionError(f"local dims {dims} do not multiply to {self.dim}")
        object.__setattr__(self, "dims", dims)
        if self.factors is not None:
            if len(self.factors) != len(self.kraus):
                raise ContractError("one factor pair is needed per Kraus element")
            pairs = []
            for k, (a, b) in zip(self.kraus, self.factors):
                a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
                if a.shape != (dims[0],) * 2 or b.shape != (dims[1],) * 2:
                    raise DimensionError("declared factors have the wrong local shape")
                if np.abs(np.kron(a, b) - k).max() > TOL_RECON:
                    raise ContractError("declared factors do not reproduce the Kraus element")
                pairs.append((a, b))
            object.__setattr__(self, "factors", tuple(pairs))

    @classmethod
    def from_channel(cls, ch: Channel, dims: Sequence[int]) -> "BipartiteChannel":
        return cls(ch.kraus, tuple(dims))

    @classmethod
    def from_products(cls, pairs: Sequence[tuple]) -> "BipartiteChannel":
        a0, b0 = pairs[0]
        kraus = np.stack([np.kron(a, b) for a, b in pairs])
        return cls(kraus, (np.shape(a0)[0], np.shape(b0)[0]), tuple(pairs))


@dataclass(frozen=True, eq=False)
class OperatorSchmidt:
    """``K = sum_k s_k A_k (x) B_k`` with HS-orthonormal ``A_k``, ``B_k``."""

    values: np.ndarray
    a_ops: np.ndarray
    b_ops: np.ndarray

    def rank(self, tol: float = TOL_SCHMIDT) -> int:
        return int(np.count_nonzero(self.values > tol))


@dataclass(frozen=True, eq=False)
class Classification:
    label: ClassLabel
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CorrelationReport:
    product: bool
    ppt: bool
    negativity: float
    classical_diag: bool
    pure: bool
    entanglement_entropy: Optional[float]


def realign(m, dims: Sequence[int]) -> np.ndarray:
    """``R[(a a'), (b b')] = M[(a b), (a' b')]`` for ``M`` on ``A (x) B``."""
    da, db = dims
    return np.asarray(m, dtype=complex).reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)


def operator_schmidt(m, dims: Sequence[int]) -> OperatorSchmidt:
    da, db = dims
    u, s, vh = np.linalg.svd(realign(m, dims))
    n = len(s)
    a_ops = u[:, :n].T.reshape(n, da, da)
    b_ops = vh[:n].reshape(n, db, db)
    return OperatorSchmidt(s, a_ops, b_ops)


def product_factors(m, dims: Sequence[int], tol: float = TOL_SCHMIDT) -> Optional[tuple[np.ndarray, np.ndarray]]:
    """``(A, B)`` with ``m = A (x) B`` when the operator-Schmidt rank is 1, else ``None``."""
    osd = operator_schmidt(m, dims)
    if osd.values[0] <= tol:
        da, db = dims
        return np.zeros((da, da), complex), np.zeros((db, db), complex)
    if osd.rank(tol * max(1.0, osd.values[0])) != 1:
        return None
    s = np.sqrt(osd.values[0])
    return s * osd.a_ops[0], s * osd.b_ops[0]


def gamma_state(ch: BipartiteChannel) -> np.ndarray:
    """``(Phi_AB (x) I_A'B')(|psi><psi|_AA' (x) |psi><psi|_BB')`` ordered ``A, A', B, B'``."""
    da, db = ch.dims
    if da * db > MAX_GAMMA_PRODUCT_DIM:
        raise DimensionError(f"gamma is limited to dA*dB <= {MAX_GAMMA_PRODUCT_DIM}, got {da}*{db}")
    psi_a = np.eye(da, dtype=complex).reshape(-1) / np.sqrt(da)
    psi_b = np.eye(db, dtype=complex).reshape(-1) / np.sqrt(db)
    rho = np.outer(np.kron(psi_a, psi_b), np.kron(psi_a, psi_b).conj())
    dims = [da, da, db, db]
    lifted = np.stack([embed(k, [0, 2], dims) for k in ch.kraus])
    return (lifted @ rho @ dag(lifted)).sum(axis=0)


def _is_product(gamma: np.ndarray, dims: Sequence[int], tol: float) -> bool:
    t = np.trace(gamma).real
    if t <= tol:
        return True
    ga = partial_trace(gamma, dims, [0])
    gb = partial_trace(gamma, dims, [1])
    return bool(np.abs(t * gamma - np.kron(ga, gb)).max() <= tol)


def _mutually_commuting(ops: Sequence[np.ndarray], tol: float) -> bool:
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if np.abs(ops[i] @ ops[j] - ops[j] @ ops[i]).max() > tol:
                return False
    return True


def correlation_witness(gamma, dims: Sequence[int], tol: float = 1e-9) -> CorrelationReport:
    """Witnesses for ``gamma`` across ``AA'|BB'``; ``dims = (dA, dB)``.

    * ``product``: ``gamma Tr(gamma) = gamma_AA' (x) gamma_BB'`` entrywise.
    * ``negativity``: ``(||gamma^(T_BB')||_1 - Tr gamma) / 2``.
    * ``classical_diag``: the operator-Schmidt factors on each side commute
      pairwise, so ``gamma`` is diagonal in a product basis.
    * pure ``gamma``: entropy of the ``AA'`` marginal is reported as well.
    """
    gamma = np.asarray(gamma, dtype=complex)
    da, db = dims
    cut = [da * da, db * db]
    if gamma.shape != (cut[0] * cut[1],) * 2:
        raise DimensionError(f"gamma shape {gamma.shape} does not match dims {tuple(dims)}")
    t = float(np.trace(gamma).real)
    pt = partial_transpose(gamma, cut, 1)
    w = np.linalg.eigvalsh((pt + dag(pt)) / 2)
    negativity = max(0.0, (trace_norm(pt) - t) / 2)
    osd = operator_schmidt(gamma, cut)
    keep = osd.values > tol
    classical = _mutually_commuting(osd.a_ops[keep], tol) and _mutually_commuting(osd.b_ops[keep], tol)
    ev = np.linalg.eigvalsh((gamma + dag(gamma)) / 2)
    pure = bool(t > tol and np.count_nonzero(ev > tol * max(t, 1.0)) == 1)
    ent = entropy(partial_trace(gamma, cut, [0]) / t) if pure else None
    return CorrelationReport(
        product=_is_product(gamma, cut, tol),
        ppt=bool(w.min() >= -tol),
        negativity=float(negativity),
        classical_diag=bool(classical),
        pure=pure,
        entanglement_entropy=ent,
    )


def _merge_proportional(pairs: list, tol: float) -> list:
    """Combine Kraus products that are scalar multiples of each other."""
    merged: list = []
    for a, b in pairs:
        k = np.kron(a, b)
        nk = np.linalg.norm(k)
        if nk <= tol:
            continue
        for idx, (ma, mb, mk) in enumerate(merged):
            overlap = np.vdot(mk, k) / np.linalg.norm(mk)
            if abs(abs(overlap) - nk) <= tol * max(1.0, nk):
                # k = c * mk/|mk|; fold the weight into the stored element
                scale = np.sqrt(np.linalg.norm(mk) ** 2 + nk**2) / np.linalg.norm(mk)
                merged[idx] = (ma * scale, mb, mk * scale)
                break
        else:
            merged.append((a, b, k))
    return [(a, b) for a, b, _ in merged]


def _family_orthogonal(ops: Sequence[np.ndarray], tol: float) -> bool:
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            ni, nj = np.linalg.norm(ops[i]), np.linalg.norm(ops[j])
            if abs(np.vdot(ops[j], ops[i])) > tol * max(1.0, ni * nj):
                return False
    return True


def _product_basis(a: BasisSet, b: BasisSet) -> BasisSet:
    ops = np.stack([np.kron(x, y) for x in a.ops for y in b.ops])
    return BasisSet(a.dim * b.dim, ops, "custom")


def _split(kraus: np.ndarray, dims, tol: float):
    pairs, ranks = [], []
    for k in kraus:
        osd = operator_schmidt(k, dims)
        ranks.append(osd.rank(tol * max(1.0, osd.values[0])))
        f = product_factors(k, dims, tol)
        pairs.append(f)
    return pairs, ranks


def classify(ch: BipartiteChannel, basisA: Optional[BasisSet] = None, basisB: Optional[BasisSet] = None,
             tol: float = TOL_SCHMIDT) -> Classification:
    """Assign one of the local/non-local superposition classes.

    Tests run in order: a product correlation state gives ``L1``; otherwise
    every Kraus element must factor across A|B and the pairwise HS
    orthogonality of the A and B families picks ``L2``, ``G1``, ``G2`` or
    ``G3``. When some element does not factor, the canonical (spectral)
    Kraus set is tried; if it still does not factor the label is ``G4``,
    unless its spectrum is degenerate, in which case the canonical set is
    not unique and the result is ``unresolved``.

    ``basisA`` and ``basisB`` feed the diagnostics: the l1 superposition of
    the channel in the product reference basis.
    """
    da, db = ch.dims
    diag: dict = {}
    if basisA is not None and basisB is not None:
        if (basisA.dim, basisB.dim) != (da, db):
            raise DimensionError("reference bases do not match the local dimensions")
        diag["product_basis_l1"] = measure_l1(to_choi(ch), _product_basis(basisA, basisB)).value
    choi = to_choi(ch)
    # Choi on (A B)_in (x) (A B)_out, regrouped as (A_in A_out) (x) (B_in B_out)
    regroup = choi.reshape(da, db, da, db, da, db, da, db).transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(choi.shape)
    if _is_product(regroup, [da * da, db * db], tol):
        diag["kraus_set"] = "any"
        return Classification(ClassLabel.L1_UNCORRELATED, diag)

    if ch.factors is not None:
        pairs, ranks = list(ch.factors), [1] * len(ch.factors)
        diag["kraus_set"] = "declared"
    else:
        pairs, ranks = _split(ch.kraus, ch.dims, tol)
        diag["kraus_set"] = "given"
    if any(p is None for p in pairs):
        w, _ = herm_eig(choi)
        keep = w > tol
        canon = from_choi(choi, tol)
        pairs, ranks = _split(canon.kraus, ch.dims, tol)
        diag["kraus_set"] = "canonical"
        diag["schmidt_ranks"] = ranks
        if any(p is None for p in pairs):
            wk = w[keep]
            gaps = np.abs(wk[:, None] - wk[None, :]) + np.eye(len(wk))
            if len(wk) > 1 and gaps.min() <= tol:
                diag["reason"] = "degenerate Choi spectrum, canonical Kraus set not unique"
                return Classification(ClassLabel.UNRESOLVED, diag)
            return Classification(ClassLabel.G4_ENTANGLEMENT_LIKE, diag)
    diag["schmidt_ranks"] = ranks
    pairs = _merge_proportional(pairs, tol)
    a_orth = _family_orthogonal([a for a, _ in pairs], tol)
    b_orth = _family_orthogonal([b for _, b in pairs], tol)
    diag["a_orthogonal"] = a_orth
    diag["b_orthogonal"] = b_orth
    if a_orth and b_orth:
        label = ClassLabel.L2_CLASSICAL
    elif a_orth:
        label = ClassLabel.G1_CLASSICAL_QUANTUM
    elif b_orth:
        label = ClassLabel.G2_QUANTUM_CLASSICAL
    else:
        label = ClassLabel.G3_QUANTUM_QUANTUM
    return Classification(label, diag)


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
