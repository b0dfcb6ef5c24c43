"""Super-operations acting on Choi matrices and resource constructions.

A super-operation is a list of elements ``S_n`` acting on ``d^2 x d^2``
Choi matrices, ``C -> sum_n S_n C S_n^dag``. The constructions here show
that a maximally superposed unitary, consumed as a resource, lets
superposition-free super-operations produce any channel and any
super-operation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .bases import BasisSet, choi_basis, weyl
from .channels import Channel, choi_dim, to_choi
from .errors import ContractError, DimensionError, UnsupportedTargetError, ZeroProbabilityBranchError
from .matrix_core import TOL_PSD, TOL_RECON, as_square, dag, herm_eig, is_unitary, partial_trace, proj
from .superposition import TOL_FREE, max_superposed_operator


@dataclass(frozen=True, eq=False)
class SuperOp:
    """Elements stacked as ``(n, D, D)``; ``D`` is the dimension of the space acted on."""

    elements: np.ndarray

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        if el.ndim == 2:
            el = el[None]
        if el.ndim != 3 or el.shape[0] == 0 or el.shape[1] != el.shape[2]:
            raise DimensionError(f"super-operation elements must be a nonempty (n, D, D) stack, got {el.shape}")
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)

    @property
    def space_dim(self) -> int:
        return self.elements.shape[1]

    @property
    def dim(self) -> int:
        """System dimension ``d`` when the elements act on ``d^2 x d^2`` Choi matrices."""
        return int(round(np.sqrt(self.space_dim)))

    def completeness(self) -> np.ndarray:
        return np.einsum("nji,njk->ik", self.elements.conj(), self.elements)

    def completeness_residual(self) -> float:
        """Frobenius norm of ``sum_n S_n^dag S_n - I``."""
        return float(np.linalg.norm(self.completeness() - np.eye(self.space_dim)))

    @property
    def deterministic(self) -> bool:
        return bool(np.abs(self.completeness() - np.eye(self.space_dim)).max() <= TOL_PSD)

    def __len__(self) -> int:
        return self.elements.shape[0]


@dataclass(frozen=True)
class SfsoReport:
    is_free: bool
    elementwise: tuple
    witness: Optional[tuple] = None  # (element index, free input, output off-diagonal mass)


def apply_superop(s: SuperOp, c) -> np.ndarray:
    c = as_square(c, "Choi matrix")
    if c.shape[0] != s.space_dim:
        raise DimensionError(f"super-operation acts on dimension {s.space_dim}, matrix is {c.shape}")
    return (s.elements @ c @ dag(s.elements)).sum(axis=0)


def apply_selective(s: SuperOp, n: int, c) -> tuple[np.ndarray, float]:
    """Outcome ``n``: ``(S_n C S_n^dag / q_n, q_n)`` with ``q_n = Tr(S_n C S_n^dag) / Tr(C)``.

    For unit-trace ``C`` the deterministic output equals ``sum_n q_n`` times
    the selective outputs.
    """
    c = as_square(c, "Choi matrix")
    if not 0 <= n < len(s):
        raise IndexError(f"element {n} out of range for {len(s)} elements")
    if c.shape[0] != s.space_dim:
        raise DimensionError(f"super-operation acts on dimension {s.space_dim}, matrix is {c.shape}")
    out = s.elements[n] @ c @ dag(s.elements[n])
    q = float(np.real(np.trace(out) / np.trace(c)))
    if q < TOL_PSD:
        raise ZeroProbabilityBranchError(f"branch {n} has probability {q:.3e}")
    return out / (q * np.real(np.trace(c))), q


def _choi_columns(basis: Union[BasisSet, np.ndarray]) -> np.ndarray:
    if isinstance(basis, BasisSet):
        return choi_basis(basis).vectors
    return np.asarray(basis, dtype=complex)


def check_sfso(s: SuperOp, basis: Union[BasisSet, np.ndarray], tol: float = TOL_FREE) -> SfsoReport:
    """Strict freeness: every element maps every free Choi matrix to a free one.

    Testing the extreme points ``|psi_i><psi_i|`` is enough: they are free
    inputs themselves, and any free input is a nonnegative combination of
    them, so by linearity its image is diagonal once theirs are. The image
    of ``|psi_i><psi_i|`` is diagonal iff ``S_n|psi_i>`` has at most one
    nonzero Choi-basis coefficient. ``basis`` is either a reference family
    or an explicit matrix whose columns are the free basis states (e.g. a
    product basis on a joint space).
    """
    vecs = _choi_columns(basis)
    if vecs.shape[0] != s.space_dim:
        raise DimensionError(f"basis states have dimension {vecs.shape[0]}, super-operation acts on {s.space_dim}")
    flags = []
    witness = None
    for n, el in enumerate(s.elements):
        # images[j, i] = <psi_j| S_n |psi_i>
        images = dag(vecs) @ el @ vecs
        ok = True
        for i in range(images.shape[1]):
            col = images[:, i]
            out = np.outer(col, col.conj())
            mass = float(np.abs(out - np.diag(np.diag(out))).max(initial=0.0))
            if mass >= tol:
                ok = False
                if witness is None:
                    witness = (n, proj(vecs[:, i]), float(np.abs(out).sum() - np.abs(np.diag(out)).sum()))
                break
        flags.append(ok)
    return SfsoReport(all(flags), tuple(flags), witness)


def cyclic_index(y: int, d2: int) -> int:
    """``m_y = y - floor((y - 1) / d2) * d2``, a 1-based cyclic index in ``1..d2``."""
    return y - ((y - 1) // d2) * d2


def _shift_element(coeffs: np.ndarray, n: int, vecs: np.ndarray) -> np.ndarray:
    # sum_i c_i |phi_i><phi_{m(i+n-1)}| with 1-based i, n mapped to 0-based columns
    d2 = vecs.shape[1]
    out = np.zeros((d2, d2), dtype=complex)
    for i in range(d2):
        j = cyclic_index((i + 1) + (n + 1) - 1, d2) - 1
        out += coeffs[i] * np.outer(vecs[:, i], vecs[:, j].conj())
    return out


def _require_primed(b: BasisSet) -> np.ndarray:
    u = max_superposed_operator(b, np.ones(len(b)))
    return u


def umax_choi(b: BasisSet) -> np.ndarray:
    """Choi matrix of ``U_max = (1/d) sum_i F'_i`` for a primed basis."""
    return to_choi(Channel.unitary(_require_primed(b)))


def synthesize_channel_from_umax(target: Channel, b: BasisSet) -> SuperOp:
    """Free super-operation turning ``C_max`` into the Choi matrix of ``target``.

    ``b`` must be primed so that ``(1/d) sum_i F'_i`` is unitary (see
    :func:`chansup.superposition.primed_basis`). With the spectral form
    ``C_target = sum_x p_x |psi_x><psi_x|`` and ``|psi_x> = sum_i c_xi |phi_i>``
    the elements are ``sqrt(p_x) sum_i c_xi |phi_i><phi_(i+n mod d^2)|``.
    """
    if b.dim != target.dim:
        raise DimensionError(f"basis dimension {b.dim} differs from target dimension {target.dim}")
    if not target.is_trace_preserving:
        raise UnsupportedTargetError("target channel must be trace preserving")
    _require_primed(b)
    vecs = choi_basis(b).vectors
    w, v = herm_eig(to_choi(target))
    elements = []
    for x in np.flatnonzero(w > 0):
        coeffs = dag(vecs) @ v[:, x]
        for n in range(len(b)):
            elements.append(np.sqrt(w[x]) * _shift_element(coeffs, n, vecs))
    return SuperOp(np.stack(elements))


def implement_superop_unitary(u_coeffs, b: BasisSet) -> SuperOp:
    """Elements on Choi (x) resource realizing ``C -> U C U^dag`` from ``C (x) C_max``.

    ``U = sum_ij U_ij |phi_i><phi_j|`` and
    ``S_a = sum_ij U_ij |phi_i><phi_j| (x) |phi_a><phi_(i+a mod d^2)|``. The
    resource shift runs modulo ``d^2``; the elements then sum to the identity.
    """
    u = as_square(u_coeffs, "coefficient matrix")
    d2 = len(b)
    if u.shape != (d2, d2):
        raise DimensionError(f"coefficients must be {d2}x{d2}, got {u.shape}")
    if not is_unitary(u):
        raise ContractError("coefficient matrix is not unitary")
    _require_primed(b)
    vecs = choi_basis(b).vectors
    elements = []
    for a in range(d2):
        s = np.zeros((d2 * d2, d2 * d2), dtype=complex)
        for i in range(d2):
            left = vecs[:, [i]] @ (u[i] @ dag(vecs))[None, :]  # |phi_i> sum_j U_ij <phi_j|
            right = np.outer(vecs[:, a], vecs[:, (i + a) % d2].conj())
            s += np.kron(left, right)
        elements.append(s)
    return SuperOp(np.stack(elements))


def coefficient_operator(u_coeffs, b: BasisSet) -> np.ndarray:
    """``sum_ij U_ij |phi_i><phi_j|`` on the Choi space."""
    vecs = choi_basis(b).vectors
    return vecs @ np.asarray(u_coeffs, dtype=complex) @ dag(vecs)


def trace_resource(joint, d2: int) -> np.ndarray:
    """Trace out the second ``d2``-dimensional factor."""
    return partial_trace(joint, [d2, d2], [0])


@dataclass(frozen=True, eq=False)
class TeleportationResource:
    """The maximally entangled ``|psi_D> = (1/d) sum_i |phi_i>|phi_i>`` on A (x) B."""

    state: np.ndarray
    via_cnot: np.ndarray
    cnot: np.ndarray


def choi_space_weyl(j: int, k: int, vecs: np.ndarray) -> np.ndarray:
    """``Z^j X^k`` of the ``d^2``-dimensional Choi space, written in the ``phi`` basis."""
    d2 = vecs.shape[1]
    return vecs @ weyl(j, k, d2) @ dag(vecs)


def teleportation_resource(b: BasisSet) -> TeleportationResource:
    """Build ``rho_D`` directly and through the free CNOT on ``C_max (x) |phi_0><phi_0|``.

    The CNOT permutes product Choi states, ``|phi_i>|phi_j> -> |phi_i>|phi_(i+j)>``.
    """
    vecs = choi_basis(b).vectors
    d2 = vecs.shape[1]
    d = b.dim
    direct = sum(np.kron(vecs[:, i], vecs[:, i]) for i in range(d2)) / d
    cnot = np.zeros((d2 * d2, d2 * d2), dtype=complex)
    for i in range(d2):
        for j in range(d2):
            cnot += np.outer(np.kron(vecs[:, i], vecs[:, (i + j) % d2]), np.kron(vecs[:, i], vecs[:, j]).conj())
    psi_max = vecs.sum(axis=1) / d
    via = cnot @ np.kron(psi_max, vecs[:, 0])
    return TeleportationResource(proj(direct), proj(via), cnot)


def implement_superop_general(target: SuperOp, b: BasisSet) -> tuple[SuperOp, TeleportationResource]:
    """Free teleportation elements ``L_jkm`` on S (x) A (x) B realizing ``target``.

    Each element projects S A on ``(U_jk (x) I)|psi_D>`` after applying
    ``E_m`` to S, applies ``U_jk = Z^j X^k`` to B, then moves the corrected
    state into S and stores the outcome ``(j, k)`` as ``|phi_j>_A |phi_k>_B``.
    Tracing A and B therefore returns ``sum_m E_m C E_m^dag``.
    """
    _require_primed(b)
    vecs = choi_basis(b).vectors
    d2 = vecs.shape[1]
    if target.space_dim != d2:
        raise DimensionError(f"target acts on dimension {target.space_dim}, basis gives {d2}")
    resource = teleportation_resource(b)
    psi_d = sum(np.kron(vecs[:, i], vecs[:, i]) for i in range(d2)) / b.dim
    eye = np.eye(d2)
    elements = []
    for j in range(d2):
        for k in range(d2):
            w = choi_space_weyl(j, k, vecs)
            bra = (np.kron(w, eye) @ psi_d).conj()[None, :]  # <psi^(jk)| on S A
            flag = np.kron(vecs[:, j], vecs[:, k])[:, None]
            for e in target.elements:
                measured = bra @ np.kron(e, eye)
                # |s a b> -> measured[s a] W|b>, placed on S, outcome flag on A B
                core = np.kron(measured, w)
                elements.append(np.kron(core, flag))
    return SuperOp(np.stack(elements)), resource


def trace_ancillas(joint, d2: int) -> np.ndarray:
    """Reduce an S (x) A (x) B matrix to S."""
    return partial_trace(joint, [d2, d2, d2], [0])


def choi_marginal_preserved(s: SuperOp, inputs: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    """``Tr_O`` of the output equals ``I/d`` for each trace-preserving input."""
    for c in inputs:
        out = apply_superop(s, c)
        d = choi_dim(out)
        if np.abs(partial_trace(out, [d, d], [0]) - np.eye(d) / d).max() > tol:
            return False
    return True


def permutation_superop(perm: Sequence[int], b: BasisSet) -> SuperOp:
    """Single element ``sum_i |psi_perm(i)><psi_i|``."""
    vecs = choi_basis(b).vectors
    el = sum(np.outer(vecs[:, p], vecs[:, i].conj()) for i, p in enumerate(perm))
    return SuperOp(el[None])


def dephasing_superop(b: BasisSet) -> SuperOp:
    """Elements ``|psi_i><psi_i|``; realizes the dephasing map on Choi matrices."""
    vecs = choi_basis(b).vectors
    return SuperOp(np.stack([np.outer(vecs[:, i], vecs[:, i].conj()) for i in range(vecs.shape[1])]))
