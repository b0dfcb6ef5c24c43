import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chansup.bases import (
    BasisSet,
    choi_basis,
    clock,
    convert_basis,
    custom_basis,
    fourier_a,
    fourier_b,
    non_unitary_basis,
    schwinger_basis,
    shift,
)
from chansup.errors import ContractError, DimensionError, UnsupportedConversionError

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0 + 0j, -1.0])
DIMS = [2, 3, 4, 5]


@pytest.mark.parametrize("d", DIMS)
@pytest.mark.parametrize("make", [non_unitary_basis, schwinger_basis])
def test_gram_is_identity(make, d):
    b = make(d)
    assert len(b) == d * d
    assert b.gram_residual() < 1e-10
    assert np.abs(choi_basis(b).gram() - np.eye(d * d)).max() < 1e-10


def test_non_unitary_d2_elements():
    b = non_unitary_basis(2)
    r = np.sqrt(2)
    expected = [[[r, 0], [0, 0]], [[0, r], [0, 0]], [[0, 0], [r, 0]], [[0, 0], [0, r]]]
    assert np.abs(b.ops - np.array(expected)).max() < 1e-15


def test_non_unitary_single_entry():
    b = non_unitary_basis(3)
    for f in b.ops:
        nz = np.flatnonzero(np.abs(f) > 0)
        assert len(nz) == 1 and abs(abs(f.reshape(-1)[nz[0]]) - np.sqrt(3)) < 1e-15
    hs = np.einsum("iab,jab->ij", b.ops, b.ops.conj())
    assert np.abs(hs - 3 * np.eye(9)).max() < 1e-12


def test_schwinger_qubit_paulis():
    s = schwinger_basis(2).ops
    for got, want in zip(s, [np.eye(2), SX, SZ, 1j * SY]):
        assert np.abs(got - want).max() < 1e-12


def test_clock_d3():
    xi = np.exp(2j * np.pi / 3)
    assert np.abs(clock(3) - np.diag([1, xi, xi**2])).max() < 1e-15


@pytest.mark.parametrize("d", DIMS)
def test_clock_shift_relations(d):
    z, x = clock(d), shift(d)
    xi = np.exp(2j * np.pi / d)
    assert np.abs(z @ x - xi * x @ z).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(z, d) - np.eye(d)).max() < 1e-12
    assert np.abs(np.linalg.matrix_power(x, d) - np.eye(d)).max() < 1e-12
    for u in schwinger_basis(d).ops:
        assert np.abs(u.conj().T @ u - np.eye(d)).max() < 1e-12


@pytest.mark.parametrize("d", DIMS)
def test_conversion_identities(d):
    nu, sw = non_unitary_basis(d), schwinger_basis(d)
    a, b = fourier_a(d), fourier_b(d)
    # independent loop oracle for both reconstruction formulas
    for j in range(d):
        for k in range(d):
            rebuilt = sum(a[l, j] * sw.ops[l * d + (j - k) % d] for l in range(d))
            assert np.abs(rebuilt - nu.ops[j * d + k]).max() < 1e-10
    for m in range(d):
        for n in range(d):
            rebuilt = sum(b[m, k] * nu.ops[k * d + (k - n) % d] for k in range(d))
            assert np.abs(rebuilt - sw.ops[m * d + n]).max() < 1e-10
    for frm in (nu, sw):
        to, t = convert_basis(frm)
        assert np.abs(np.einsum("ij,jab->iab", t, to.ops) - frm.ops).max() < 1e-10
        assert np.abs(t.conj().T @ t - np.eye(d * d)).max() < 1e-10
    assert np.abs(a.conj().T @ a - np.eye(d)).max() < 1e-12


def test_conversion_d2_single_element():
    # sqrt2 |0><1| = (S_01 + S_11) / sqrt2 at d = 2
    nu, sw = non_unitary_basis(2), schwinger_basis(2)
    assert np.abs((sw.ops[1] + sw.ops[3]) / np.sqrt(2) - nu.ops[1]).max() < 1e-12


def test_round_trip_conversion():
    nu = non_unitary_basis(3)
    sw, t1 = convert_basis(nu)
    back, t2 = convert_basis(sw)
    assert np.abs(np.einsum("ij,jk,kab->iab", t1, t2, back.ops) - nu.ops).max() < 1e-12


def test_custom_conversion_unsupported():
    with pytest.raises(UnsupportedConversionError):
        convert_basis(custom_basis(schwinger_basis(2).ops))


def test_dimension_errors():
    with pytest.raises(DimensionError):
        non_unitary_basis(1)
    with pytest.raises(DimensionError):
        schwinger_basis(0)


def test_custom_basis_not_repaired():
    ops = schwinger_basis(2).ops.copy()
    ops[1] = ops[1] + 0.1 * ops[0]
    with pytest.raises(ContractError):
        custom_basis(ops)
    with pytest.raises(ContractError):
        choi_basis(BasisSet(2, ops))


def test_choi_states_examples():
    sw = choi_basis(schwinger_basis(3))
    assert np.abs(sw.state(0) - np.eye(3).reshape(-1) / np.sqrt(3)).max() < 1e-15
    nu = choi_basis(non_unitary_basis(2))
    assert np.abs(nu.state(1) - np.array([0, 0, 1, 0])).max() < 1e-15
    bell = choi_basis(schwinger_basis(2)).vectors
    assert np.abs(bell.conj().T @ bell - np.eye(4)).max() < 1e-12
    # each state maximally entangled: reduced state I/2
    for v in bell.T:
        m = v.reshape(2, 2)
        assert np.abs(m @ m.conj().T - np.eye(2) / 2).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]))
def test_phased_basis_stays_orthonormal(seed, d):
    rng = np.random.default_rng(seed)
    ph = np.exp(2j * np.pi * rng.random(d * d))
    b = schwinger_basis(d).with_phases(ph)
    assert b.gram_residual() < 1e-10
    assert np.abs(b.with_phases(np.ones(d * d)).ops - schwinger_basis(d).ops).max() < 1e-12


def test_expand_reconstructs(rng):
    b = non_unitary_basis(3)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.abs(np.einsum("k,kab->ab", b.expand(m), b.ops) - m).max() < 1e-12
