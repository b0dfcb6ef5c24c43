import math

import numpy as np
import pytest

from chansup.bases import schwinger_basis
from chansup.channels import Channel, to_choi
from chansup.errors import ContractError
from chansup.matrix_core import ket, proj
from chansup.protocols import (
    HADAMARD,
    ID2,
    MINUS,
    PLUS,
    SX,
    SY,
    SZ,
    chsh_max,
    collapse_ancilla_states,
    collapse_general,
    collapse_qubit,
    pauli_coefficients,
    signaling_test,
    switch_superpose,
    temporal_bell,
    temporal_order,
    tomographic_states,
)
from chansup.sampling import random_state, random_unitary
from chansup.superposition import dephase

R2 = 1 / np.sqrt(2)
P0, P1 = proj(ket(0, 2)), proj(ket(1, 2))
ACAUSAL = np.stack([np.kron(P0, SX), np.kron(P1, SY), np.kron(SX, P0), np.kron(SY, P1)]) * R2


def fid(a, b):
    return abs(np.vdot(a, b))


def test_switch_examples(rng):
    u1, u2 = random_unitary(2, rng), random_unitary(2, rng)
    c = np.array([0.6, 0.8j])
    psi = random_state(2, rng)
    o = switch_superpose(u1, u2, c, psi, P0)
    assert abs(o.probability - 0.36) < 1e-12 and abs(fid(o.post_state, u1 @ psi) - 1) < 1e-12
    o = switch_superpose(ID2, SZ, (R2, R2), PLUS, proj(PLUS))
    assert abs(o.probability - 0.5) < 1e-12 and np.abs(o.post_state - [1, 0]).max() < 1e-12
    for pr in (P0, proj(PLUS), proj(random_state(2, rng))):
        o = switch_superpose(u1, u1, c, psi, pr)
        p = np.linalg.eigh(pr)[1][:, -1]
        assert abs(o.probability - abs(np.vdot(p, c)) ** 2) < 1e-12
        assert abs(fid(o.post_state, u1 @ psi) - 1) < 1e-12


def test_switch_effective_operator(rng):
    u1, u2 = random_unitary(3, rng), random_unitary(3, rng)
    psi = random_state(3, rng)
    o = switch_superpose(u1, u2, (R2, R2), psi, proj(MINUS))
    amp = o.effective_operator @ psi
    assert abs(np.vdot(amp, amp) - o.probability) < 1e-12
    assert abs(fid(amp / np.linalg.norm(amp), o.post_state) - 1) < 1e-12


def test_switch_rejects_non_unitary():
    with pytest.raises(ContractError):
        switch_superpose(ID2, 2 * ID2, (1, 0), PLUS, P0)
    with pytest.raises(ContractError):
        switch_superpose(ID2, SX, (1, 1), PLUS, P0)


def test_switch_consistency(rng):
    # summing branches over an orthonormal control pair gives the mixture of orders
    for _ in range(10):
        u1, u2 = random_unitary(2, rng), random_unitary(2, rng)
        c = random_state(2, rng)
        psi = random_state(2, rng)
        q = random_state(2, rng)
        q_perp = np.array([-np.conj(q[1]), np.conj(q[0])])
        total = sum(o.probability * proj(o.post_state) for o in
                    (switch_superpose(u1, u2, c, psi, proj(v)) for v in (q, q_perp)))
        rho = proj(psi)
        expected = abs(c[0]) ** 2 * u1 @ rho @ u1.conj().T + abs(c[1]) ** 2 * u2 @ rho @ u2.conj().T
        assert np.abs(total - expected).max() < 1e-10


def test_collapse_qubit_examples(rng):
    phi = random_state(2, rng)
    outs = collapse_qubit(SZ, phi)
    assert [o.label for o in outs] == ["++", "+-", "--", "-+"]
    assert abs(outs[3].probability - 1) < 1e-12 and abs(fid(outs[3].post_state, SZ @ phi) - 1) < 1e-12
    outs = collapse_qubit((ID2 + 1j * SX) * R2, phi)
    probs = [o.probability for o in outs]
    assert np.abs(np.array(probs) - [0.5, 0.5, 0, 0]).max() < 1e-12
    assert abs(fid(outs[0].post_state, phi) - 1) < 1e-12
    assert abs(fid(outs[1].post_state, SX @ phi) - 1) < 1e-12


def test_collapse_qubit_random(rng):
    for _ in range(50):
        v, phi = random_unitary(2, rng), random_state(2, rng)
        outs = collapse_qubit(v, phi)
        c = pauli_coefficients(v)
        assert abs(sum(o.probability for o in outs) - 1) < 1e-10
        for o, ci, f in zip(outs, c, (ID2, SX, SY, SZ)):
            assert abs(o.probability - abs(ci) ** 2) < 1e-10
            if o.probability > 1e-12:
                assert abs(fid(o.post_state, f @ phi) - 1) < 1e-9
                assert abs(np.linalg.norm(o.post_state) - 1) < 1e-10


def test_collapse_rejects_non_unitary():
    with pytest.raises(ContractError):
        collapse_qubit(np.diag([1, 0.5]), PLUS)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_ancilla_states_orthonormal(d):
    anc = collapse_ancilla_states(d)
    assert np.abs(anc.conj().T @ anc - np.eye(d * d)).max() < 1e-9


def test_collapse_general_examples(rng):
    s = schwinger_basis(3).ops
    phi = random_state(3, rng)
    outs = collapse_general(s[1 * 3 + 2], phi)
    assert abs(outs[5].probability - 1) < 1e-12 and outs[5].label == "(1,2)"
    v = random_unitary(3, rng)
    outs = collapse_general(v, phi)
    assert abs(sum(o.probability for o in outs) - 1) < 1e-10
    for o, f in zip(outs, s):
        assert abs(o.probability - abs(np.trace(f.conj().T @ v) / 3) ** 2) < 1e-10
        assert abs(fid(o.post_state, f @ phi) - 1) < 1e-9


def test_collapse_general_matches_qubit_case(rng):
    # schwinger index (m, n) -> Pauli: (0,0) I, (0,1) X, (1,0) Z, (1,1) iY
    order = [0, 1, 3, 2]
    for _ in range(10):
        v, phi = random_unitary(2, rng), random_state(2, rng)
        q = collapse_qubit(v, phi)
        g = collapse_general(v, phi)
        for qi, gi in zip(q, (g[k] for k in order)):
            assert abs(qi.probability - gi.probability) < 1e-10
            if qi.probability > 1e-12:
                assert abs(fid(qi.post_state, gi.post_state) - 1) < 1e-9


def test_collapse_consistency_is_dephasing(rng):
    b = schwinger_basis(3)
    v, phi = random_unitary(3, rng), random_state(3, rng)
    outs = collapse_general(v, phi)
    reassembled = sum(o.probability * proj(o.post_state) for o in outs)
    kraus = np.stack([o.effective_operator for o in outs])
    dephased = Channel(kraus)
    # the dephased channel has Kraus set c_mn S_mn
    assert np.abs(to_choi(dephased) - dephase(to_choi(Channel.unitary(v)), b)).max() < 1e-10
    assert np.abs(dephased(proj(phi)) - reassembled).max() < 1e-10


def test_temporal_order_examples(rng):
    u = random_unitary(2, rng)
    u2 = u @ u
    psi = random_state(2, rng)
    # identical orderings interfere constructively: the |+> outcome is certain
    o = temporal_order(u, u2, 0.5, 0.5, psi)
    assert abs(o.probability - 1) < 1e-12
    assert np.abs(o.effective_operator - u @ u2).max() < 1e-12
    o = temporal_order(u, u2, 0.5, 0.5, psi, proj(random_state(2, rng)))
    assert abs(fid(o.post_state, u @ u2 @ psi) - 1) < 1e-12
    o = temporal_order(HADAMARD, SZ, 0.5, 0.5, ket(0, 2))
    assert abs(o.probability - 0.5) < 1e-12 and np.abs(o.post_state - [1, 0]).max() < 1e-12
    u1, u2 = random_unitary(2, rng), random_unitary(2, rng)
    psi = random_state(2, rng)
    o = temporal_order(u1, u2, 0.3, 0.7, psi, P0)
    assert abs(o.probability - 0.3) < 1e-12 and abs(fid(o.post_state, u1 @ u2 @ psi) - 1) < 1e-12
    o = temporal_order(u1, u2, 0.3, 0.7, psi, P1)
    assert abs(o.probability - 0.7) < 1e-12 and abs(fid(o.post_state, u2 @ u1 @ psi) - 1) < 1e-12


def test_temporal_order_effective_operator(rng):
    u1, u2 = random_unitary(2, rng), random_unitary(2, rng)
    psi = random_state(2, rng)
    p0, p1 = 0.4, 0.6
    o = temporal_order(u1, u2, p0, p1, psi)
    x = o.probability
    expected = np.sqrt(p0 / (2 * x)) * u1 @ u2 + np.sqrt(p1 / (2 * x)) * u2 @ u1
    assert np.abs(o.effective_operator - expected).max() < 1e-12


def test_temporal_order_rejects_bad_probabilities():
    with pytest.raises(ContractError):
        temporal_order(ID2, SX, 0.5, 0.6, PLUS)
    with pytest.raises(ContractError):
        temporal_order(ID2, SX, -0.1, 1.1, PLUS)


def test_temporal_bell_examples(rng):
    t = temporal_bell(HADAMARD, SZ, HADAMARD, SZ, 0.5, 0.5, ket(0, 2), ket(0, 2))
    bell = (np.kron(PLUS, PLUS) + np.kron(MINUS, MINUS)) * R2
    assert abs(t.outcome.probability - 0.5) < 1e-12
    assert abs(fid(t.outcome.post_state, bell) - 1) < 1e-12
    assert abs(t.entanglement_entropy - math.log(2)) < 1e-9
    assert abs(t.chsh_max - 2 * math.sqrt(2)) < 1e-9
    a = random_unitary(2, rng)
    b = random_unitary(2, rng)
    t = temporal_bell(a, a @ a, b, b.conj().T, 0.5, 0.5, random_state(2, rng), random_state(2, rng))
    assert t.entanglement_entropy < 1e-9 and t.chsh_max <= 2 + 1e-9
    t = temporal_bell(HADAMARD, SZ, HADAMARD, SZ, 1.0, 0.0, ket(0, 2), ket(0, 2))
    assert abs(fid(t.outcome.post_state, np.kron(HADAMARD @ SZ @ [1, 0], HADAMARD @ SZ @ [1, 0])) - 1) < 1e-12
    assert t.entanglement_entropy < 1e-9


def test_chsh_separable_bound(rng):
    for _ in range(50):
        rho = proj(np.kron(random_state(2, rng), random_state(2, rng)))
        assert chsh_max(rho) <= 2 + 1e-9
    # output of the two-way signaling channel on product inputs
    ch = Channel(ACAUSAL)
    for _ in range(20):
        rho = ch(proj(np.kron(random_state(2, rng), random_state(2, rng))))
        assert chsh_max(rho) <= 2 + 1e-9


def test_tomographic_states_complete():
    for d in (2, 3):
        states = tomographic_states(d)
        flat = np.stack([proj(s).reshape(-1) for s in states])
        assert len(states) == d * d and np.linalg.matrix_rank(flat) == d * d


def test_signaling_examples(rng):
    u0, u1 = ID2, SX
    one_way = Channel(np.stack([np.kron(P0, u0), np.kron(P1, u1)]))
    r = signaling_test(one_way, (2, 2))
    assert r.a_to_b and not r.b_to_a and r.a_witness[3] > 1e-6
    r = signaling_test(Channel(ACAUSAL), (2, 2))
    assert r.a_to_b and r.b_to_a and min(r.a_witness[3], r.b_witness[3]) > 1e-6
    prod = Channel.unitary(np.kron(random_unitary(2, rng), random_unitary(3, rng)))
    r = signaling_test(prod, (2, 3))
    assert not r.a_to_b and not r.b_to_a


def test_signaling_witness_is_genuine():
    r = signaling_test(Channel(ACAUSAL), (2, 2))
    s1, s2, partner, dist = r.a_witness
    ch = Channel(ACAUSAL)
    from chansup.matrix_core import partial_trace, trace_distance
    m1 = partial_trace(ch(np.kron(proj(s1), proj(partner))), [2, 2], [1])
    m2 = partial_trace(ch(np.kron(proj(s2), proj(partner))), [2, 2], [1])
    assert abs(trace_distance(m1, m2) - dist) < 1e-12


def test_signaling_invariant_under_local_rotation(rng):
    base = Channel(np.stack([np.kron(P0, ID2), np.kron(P1, SX)]))
    for _ in range(5):
        v = np.kron(np.eye(2), random_unitary(2, rng))
        rotated = Channel(base.kraus @ v)
        r = signaling_test(rotated, (2, 2))
        assert r.a_to_b and not r.b_to_a


def test_signaling_needs_dims():
    with pytest.raises(ContractError):
        signaling_test(Channel(np.eye(4)))
