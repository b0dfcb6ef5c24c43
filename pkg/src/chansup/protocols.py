"""Exact statevector simulations of switch, collapse, temporal-order and signaling protocols.

Control-qubit labels ``|1>, |2>`` of the switch are mapped to ``|0>, |1>``.
Post-measurement states are normalized and carry a canonical global phase
(first non-negligible amplitude real positive).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bases import BasisSet, clock, schwinger_basis, shift
from .channels import Channel
from .errors import ContractError, DimensionError, ProtocolInconsistencyError
from .matrix_core import (
    TOL_RECON,
    canonical_phase,
    dag,
    entropy,
    ket,
    partial_trace,
    proj,
    require_unitary,
    trace_distance,
)

TOL_SIGNAL = 1e-9

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class ProtocolOutcome:
    label: str
    probability: float
    post_state: np.ndarray
    effective_operator: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class TemporalBellOutcome:
    outcome: ProtocolOutcome
    entanglement_entropy: float
    chsh_max: Optional[float]


@dataclass(frozen=True, eq=False)
class SignalingReport:
    a_to_b: bool
    b_to_a: bool
    # (state, state', partner state, marginal trace distance) per direction
    a_witness: Optional[tuple] = None
    b_witness: Optional[tuple] = None


def _state(v, name: str = "state") -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if abs(n - 1) > 1e-9:
        raise ContractError(f"{name} must be normalized (norm {n:.6g})")
    return v


def _control_vector(projector) -> np.ndarray:
    p = np.asarray(projector, dtype=complex)
    if p.ndim == 1:
        return _state(p, "control projector")
    if p.shape != (2, 2):
        raise DimensionError("control projector must act on a qubit")
    w, v = np.linalg.eigh((p + dag(p)) / 2)
    if np.abs(p @ p - p).max() > 1e-9 or abs(w[-1] - 1) > 1e-9 or abs(w[0]) > 1e-9:
        raise ContractError("control projector must be a rank-1 projector")
    return v[:, -1]


ZERO_BRANCH = 1e-20


def _outcome(label: str, amp: np.ndarray, effective=None) -> ProtocolOutcome:
    prob = float(np.real(np.vdot(amp, amp)))
    # below this the amplitude is rounding noise and has no meaningful direction
    post = canonical_phase(amp / np.sqrt(prob)) if prob > ZERO_BRANCH else np.zeros_like(amp)
    return ProtocolOutcome(label, prob, post, effective)


def switch_superpose(u1, u2, control: Sequence[complex], sys, control_projector) -> ProtocolOutcome:
    """Controlled ``|0><0| (x) U1 + |1><1| (x) U2`` then a rank-1 control projection.

    The returned ``effective_operator`` is ``c1 <p|0> U1 + c2 <p|1> U2``; it maps the
    input to the unnormalized post-measurement system state.
    """
    u1 = require_unitary(u1, "u1")
    u2 = require_unitary(u2, "u2")
    if u1.shape != u2.shape:
        raise DimensionError("branch unitaries differ in dimension")
    c = _state(control, "control state")
    if c.shape != (2,):
        raise DimensionError("control state must be a qubit")
    psi = _state(sys, "system state")
    p = _control_vector(control_projector)
    u_cs = np.kron(proj(ket(0, 2)), u1) + np.kron(proj(ket(1, 2)), u2)
    out = u_cs @ np.kron(c, psi)
    amp = np.kron(p.conj()[None, :], np.eye(len(psi))) @ out
    eff = c[0] * np.conj(p[0]) * u1 + c[1] * np.conj(p[1]) * u2
    return _outcome("proj", amp, eff)


def controlled(ops: Sequence[np.ndarray]) -> np.ndarray:
    """``sum_k |k><k| (x) ops[k]``."""
    n = len(ops)
    return sum(np.kron(proj(ket(k, n)), op) for k, op in enumerate(ops))


def embed(op: np.ndarray, pos: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Lift an operator on the listed subsystems (in that order) to the full space."""
    dims = list(dims)
    n = len(dims)
    rest = [i for i in range(n) if i not in pos]
    order = list(pos) + rest
    full = np.kron(op, np.eye(int(np.prod([dims[i] for i in rest])) if rest else 1))
    sub = [dims[i] for i in order]
    t = full.reshape(sub + sub)
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    total = int(np.prod(dims))
    return t.reshape(total, total)


PAULI_LABELS = ("++", "+-", "--", "-+")


def collapse_qubit(v, sys) -> list[ProtocolOutcome]:
    """Collapse a qubit unitary onto ``(I, sx, sy, sz)`` with two ancillas.

    Simulates ``U_A U_B V U_B U_A`` on ``|+>_A |+>_B |phi>`` where ``U_A``
    is a controlled ``sz`` and ``U_B`` a controlled ``sx``, then measures
    A and B in the ``+/-`` basis. A reads ``-`` when ``V``'s branch
    anticommutes with ``sz``, B reads ``-`` when it anticommutes with
    ``sx``. Outcomes are returned in the order ``I, sx, sy, sz`` under the
    conventional keys ``++, +-, --, -+``; each key lists B's sign before A's.
    """
    v = require_unitary(v, "v")
    if v.shape != (2, 2):
        raise DimensionError("collapse_qubit needs a 2x2 unitary")
    phi = _state(sys, "system state")
    dims = [2, 2, 2]
    u_a = embed(controlled([ID2, SZ]), [0, 2], dims)
    u_b = embed(controlled([ID2, SX]), [1, 2], dims)
    v_s = embed(v, [2], dims)
    final = u_a @ u_b @ v_s @ u_b @ u_a @ np.kron(np.kron(PLUS, PLUS), phi)
    outcomes = []
    # (sign_A, sign_B) per branch I, sx, sy, sz
    for label, (a, b), f in zip(PAULI_LABELS, [(PLUS, PLUS), (MINUS, PLUS), (MINUS, MINUS), (PLUS, MINUS)], (ID2, SX, SY, SZ)):
        amp = np.kron(np.kron(a, b).conj()[None, :], np.eye(2)) @ final
        coeff = np.trace(dag(f) @ v) / 2
        outcomes.append(_outcome(label, amp, coeff * f))
    return outcomes


def pauli_coefficients(v) -> np.ndarray:
    """``c_i = Tr(F_i^dag V) / 2`` for ``F = (I, sx, sy, sz)``."""
    return np.array([np.trace(dag(f) @ v) / 2 for f in (ID2, SX, SY, SZ)])


def _collapse_circuit(d: int) -> tuple[np.ndarray, np.ndarray]:
    z, x = clock(d), shift(d)
    dims = [d, d, d]
    u_az = embed(controlled([np.linalg.matrix_power(z, k) for k in range(d)]), [0, 2], dims)
    u_bx = embed(controlled([np.linalg.matrix_power(x, k) for k in range(d)]), [1, 2], dims)
    pre = u_bx @ u_az
    post = dag(u_az) @ dag(u_bx)
    return pre, post


def collapse_ancilla_states(d: int, tol: float = 1e-9) -> np.ndarray:
    """Ancilla measurement vectors ``(d^2, d^2)``; column ``m*d + n`` flags ``S_mn``.

    Each column is extracted by running the circuit on ``S_mn`` and
    factoring off the system; the resulting set must be orthonormal.
    """
    pre, post = _collapse_circuit(d)
    psi0 = np.ones(d, dtype=complex) / np.sqrt(d)
    probe = ket(0, d)
    basis = schwinger_basis(d)
    cols = []
    for idx, s in enumerate(basis.ops):
        out = post @ embed(s, [2], [d, d, d]) @ pre @ np.kron(np.kron(psi0, psi0), probe)
        mat = out.reshape(d * d, d)
        sys_part = s @ probe
        anc = mat @ sys_part.conj()
        if np.abs(mat - np.outer(anc, sys_part)).max() > tol:
            raise ProtocolInconsistencyError(f"circuit output for S_{idx // d}{idx % d} is not a product state")
        cols.append(anc)
    anc = np.stack(cols, axis=1)
    gram = dag(anc) @ anc
    if np.abs(gram - np.eye(d * d)).max() > tol:
        raise ProtocolInconsistencyError("ancilla states are not orthonormal")
    return anc


def collapse_general(v, sys, tol: float = 1e-9) -> list[ProtocolOutcome]:
    """Collapse a ``d``-dimensional unitary onto the clock-and-shift family.

    Runs ``U_A^(Z dag) U_B^(X dag) V U_B^X U_A^Z`` on ``|psi_0>|psi_0>|phi>``
    and projects the ancillas on the derived orthonormal vectors. Outcome
    ``(m, n)`` has probability ``|Tr(S_mn^dag V)/d|^2`` and post state
    ``S_mn|phi>`` up to phase.
    """
    v = require_unitary(v, "v")
    d = v.shape[0]
    if d < 2:
        raise DimensionError("need d >= 2")
    phi = _state(sys, "system state")
    if phi.shape != (d,):
        raise DimensionError("system state dimension does not match the unitary")
    anc = collapse_ancilla_states(d, tol)
    pre, post = _collapse_circuit(d)
    psi0 = np.ones(d, dtype=complex) / np.sqrt(d)
    final = post @ embed(v, [2], [d, d, d]) @ pre @ np.kron(np.kron(psi0, psi0), phi)
    mat = final.reshape(d * d, d)
    basis = schwinger_basis(d)
    outcomes = []
    for idx in range(d * d):
        amp = anc[:, idx].conj() @ mat
        coeff = np.trace(dag(basis.ops[idx]) @ v) / d
        outcomes.append(_outcome(f"({idx // d},{idx % d})", amp, coeff * basis.ops[idx]))
    return outcomes


def _check_probs(p0: float, p1: float) -> None:
    if p0 < 0 or p1 < 0 or abs(p0 + p1 - 1) > 1e-12:
        raise ContractError(f"control weights must be probabilities summing to 1, got {p0}, {p1}")


def temporal_order(u1, u2, p0: float, p1: float, sys, control_projector=None) -> ProtocolOutcome:
    """Switch between the orders ``U12 = U1 U2`` and ``U21 = U2 U1``.

    The control starts in ``sqrt(p0)|0> + sqrt(p1)|1>`` and is projected on
    ``control_projector`` (``|+><+|`` by default). For ``|+>`` the effective
    operator is ``sqrt(p0/2x) U12 + sqrt(p1/2x) U21`` with ``x`` the success
    probability.
    """
    _check_probs(p0, p1)
    u1 = require_unitary(u1, "u1")
    u2 = require_unitary(u2, "u2")
    if control_projector is None:
        control_projector = proj(PLUS)
    res = switch_superpose(u1 @ u2, u2 @ u1, (np.sqrt(p0), np.sqrt(p1)), sys, control_projector)
    x = res.probability
    eff = res.effective_operator / np.sqrt(x) if x > 0 else res.effective_operator
    return ProtocolOutcome("proj", x, res.post_state, eff)


def chsh_max(rho) -> float:
    """Largest CHSH value of a two-qubit state from its correlation matrix.

    ``2 sqrt(s1^2 + s2^2)`` with ``s1 >= s2`` the top singular values of
    ``T_ij = Tr(rho s_i (x) s_j)``.
    """
    paulis = (SX, SY, SZ)
    t = np.array([[np.real(np.trace(rho @ np.kron(a, b))) for b in paulis] for a in paulis])
    s = np.linalg.svd(t, compute_uv=False)
    return float(2 * np.sqrt(s[0] ** 2 + s[1] ** 2))


def temporal_bell(ua1, ua2, ub1, ub2, p0: float, p1: float, sys_a, sys_b) -> TemporalBellOutcome:
    """Joint temporal-order switch on A and B with the control projected on ``|+>``."""
    _check_probs(p0, p1)
    ua1, ua2 = require_unitary(ua1, "uA1"), require_unitary(ua2, "uA2")
    ub1, ub2 = require_unitary(ub1, "uB1"), require_unitary(ub2, "uB2")
    a12, a21 = ua1 @ ua2, ua2 @ ua1
    b12, b21 = ub1 @ ub2, ub2 @ ub1
    psi = np.kron(_state(sys_a, "sysA"), _state(sys_b, "sysB"))
    res = switch_superpose(np.kron(a12, b12), np.kron(a21, b21), (np.sqrt(p0), np.sqrt(p1)), psi, proj(PLUS))
    x = res.probability
    eff = res.effective_operator / np.sqrt(x)
    out = ProtocolOutcome("proj", x, res.post_state, eff)
    da, db = ua1.shape[0], ub1.shape[0]
    rho = proj(res.post_state)
    ent = entropy(partial_trace(rho, [da, db], [0]))
    chsh = chsh_max(rho) if (da, db) == (2, 2) else None
    return TemporalBellOutcome(out, ent, chsh)


def tomographic_states(d: int) -> list[np.ndarray]:
    """``|k>``, ``(|k>+|l>)/sqrt2``, ``(|k>+i|l>)/sqrt2``: ``d^2`` pure states spanning operator space."""
    states = [ket(k, d) for k in range(d)]
    for k in range(d):
        for l in range(k + 1, d):
            states.append((ket(k, d) + ket(l, d)) / np.sqrt(2))
            states.append((ket(k, d) + 1j * ket(l, d)) / np.sqrt(2))
    flat = np.stack([proj(s).reshape(-1) for s in states])
    if np.linalg.matrix_rank(flat) != d * d:
        raise ProtocolInconsistencyError("tomographic state set is not complete")
    return states


def state_difference_pairs(d: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pure-state pairs whose differences span the traceless operators."""
    pairs = []
    for k in range(d):
        for l in range(k + 1, d):
            a, b = ket(k, d), ket(l, d)
            pairs.append((a, b))
            pairs.append(((a + b) / np.sqrt(2), (a - b) / np.sqrt(2)))
            pairs.append(((a + 1j * b) / np.sqrt(2), (a - 1j * b) / np.sqrt(2)))
    return pairs


def _one_way(ch: Channel, dims: tuple[int, int], sender: int, tol: float):
    receiver = 1 - sender
    best = None
    for partner in tomographic_states(dims[receiver]):
        sig = proj(partner)
        for s1, s2 in state_difference_pairs(dims[sender]):
            pieces = [None, None]
            pieces[receiver] = sig
            pieces[sender] = proj(s1)
            m1 = partial_trace(ch(np.kron(*pieces)), list(dims), [receiver])
            pieces[sender] = proj(s2)
            m2 = partial_trace(ch(np.kron(*pieces)), list(dims), [receiver])
            dist = trace_distance(m1, m2)
            if dist > tol and (best is None or dist > best[3]):
                best = (s1, s2, partner, dist)
    return best


def signaling_test(ch: Channel, dims: Optional[Sequence[int]] = None, tol: float = TOL_SIGNAL) -> SignalingReport:
    """Decide A->B and B->A signaling of a bipartite channel.

    The receiver's marginal is bilinear in (sender input, partner input), so
    it suffices to probe sender state differences spanning the traceless
    operators against a tomographically complete set of partner states.
    The witness is the probe with the largest marginal trace distance.
    """
    if dims is None:
        dims = getattr(ch, "dims", None)
    if dims is None:
        raise ContractError("signaling_test needs the local dimensions (dA, dB)")
    dims = (int(dims[0]), int(dims[1]))
    if dims[0] * dims[1] != ch.dim:
        raise DimensionError(f"local dims {dims} do not multiply to channel dimension {ch.dim}")
    a_w = _one_way(ch, dims, 0, tol)
    b_w = _one_way(ch, dims, 1, tol)
    return SignalingReport(a_w is not None, b_w is not None, a_w, b_w)
