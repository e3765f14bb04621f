import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bowtie_mbqc import qcore
from bowtie_mbqc.errors import BranchImpossibleError, ConfigurationError
from bowtie_mbqc.qcore import (
    CNOT_12,
    H,
    I2,
    X,
    Z,
    MeasurementRecord,
    PauliBasis,
    StateVector,
    apply_ccz,
    apply_cz,
    apply_single,
    apply_unitary,
    fidelity,
    is_product,
    kron_local,
    kron_states,
    measure,
    prepare_product,
    random_state,
)


def test_little_endian_labels():
    # qubit 1 is the least significant bit of the index
    psi = StateVector.from_bits([1, 0, 0])
    assert np.argmax(np.abs(psi.amps)) == 1
    psi = StateVector.from_bits([0, 0, 1])
    assert np.argmax(np.abs(psi.amps)) == 4


def test_kron_local_matches_apply_single():
    psi = random_state(3, 5)
    u = kron_local([I2, H, I2])
    assert np.allclose(u @ psi.amps, apply_single(psi, 2, H).amps)


@pytest.mark.parametrize("bits", range(8))
def test_ccz_on_basis(bits):
    out = apply_ccz(StateVector.basis(3, bits), 1, 2, 3).amps
    assert out[bits] == (-1 if bits == 7 else 1)
    assert np.count_nonzero(out) == 1


@pytest.mark.parametrize("perm", [(1, 2, 3), (3, 1, 2), (2, 3, 1), (3, 2, 1)])
def test_ccz_symmetric_in_sites(perm):
    psi = random_state(3, 11)
    assert np.array_equal(apply_ccz(psi, *perm).amps, apply_ccz(psi, 1, 2, 3).amps)


def test_cz_is_diagonal_dense():
    psi = random_state(2, 3)
    assert np.allclose(apply_cz(psi, 1, 2).amps, np.diag([1, 1, 1, -1]) @ psi.amps)


def test_gate_sites_must_be_distinct():
    psi = random_state(3, 0)
    with pytest.raises(ValueError):
        apply_ccz(psi, 1, 1, 2)
    with pytest.raises(ValueError):
        apply_cz(psi, 1, 4)


def test_state_validation():
    with pytest.raises(ValueError):
        StateVector(1, np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        StateVector(2, np.array([1.0, 0.0]))
    psi = random_state(2, 0)
    with pytest.raises(ValueError):
        psi.amps[0] = 0
    with pytest.raises(ValueError):
        StateVector.basis(2, 4)


def test_prepare_product_errors():
    with pytest.raises(ConfigurationError):
        prepare_product({1: "plus", 3: "zero"})
    with pytest.raises(ConfigurationError):
        prepare_product({1: "bogus"})


def test_prepare_product_plus_fast_path():
    psi = prepare_product({k: "plus" for k in range(1, 6)})
    assert np.allclose(psi.amps, np.full(32, 32**-0.5))


def test_apply_unitary_two_site_order():
    # CNOT_12 has qubit 1 as control; placed on (3, 1) the control is qubit 3
    psi = StateVector.from_bits([0, 1, 1])
    out = apply_unitary(psi, [3, 1], CNOT_12)
    assert np.isclose(abs(out.amps[0b111]), 1)


def test_apply_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        apply_unitary(random_state(1, 0), [1], np.array([[1, 1], [0, 1]]))


@pytest.mark.parametrize("basis", list(PauliBasis))
@pytest.mark.parametrize("s", [0, 1])
def test_measure_eigenstate_is_deterministic(basis, s):
    psi = kron_states(random_state(1, 2), StateVector(1, basis.eigenvector(s)))
    got, post, p = measure(psi, 2, basis)
    assert got == s and np.isclose(p, 1)
    with pytest.raises(BranchImpossibleError):
        measure(psi, 2, basis, outcome=1 - s)


def test_measure_keeps_qubit_in_eigenstate():
    psi = random_state(3, 9)
    s, post, p = measure(psi, 2, "X", outcome=1)
    assert post.n_qubits == 3
    rho = qcore.reduced_density(post, 2)
    minus = PauliBasis.X.eigenvector(1)
    assert np.allclose(rho, np.outer(minus, minus.conj()))


def test_branch_probabilities_sum_to_one(rng):
    psi = random_state(4, rng)
    for basis in PauliBasis:
        assert np.isclose(sum(qcore.branch_probabilities(psi, 3, basis)), 1)


def test_sampling_is_seeded():
    psi = random_state(4, 1)
    a = [measure(psi, k, "Y", rng=np.random.default_rng(7))[0] for k in (1, 2, 3)]
    b = [measure(psi, k, "Y", rng=np.random.default_rng(7))[0] for k in (1, 2, 3)]
    assert a == b


def test_record_rejects_repeat_site():
    rec = MeasurementRecord()
    psi = random_state(2, 0)
    _, psi, _ = measure(psi, 1, "Z", record=rec, rng=0)
    with pytest.raises(ValueError):
        measure(psi, 1, "Z", record=rec, rng=0)


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError):
        fidelity(random_state(1, 0), random_state(2, 0))


def test_is_product():
    bell = apply_cz(prepare_product({1: "plus", 2: "plus"}), 1, 2)
    assert not is_product(bell, 1)
    assert is_product(prepare_product({1: "plus", 2: "one"}), 2)


def test_json_roundtrip():
    psi = random_state(3, 4)
    assert np.array_equal(StateVector.from_json(psi.to_json()).amps, psi.amps)


@given(st.integers(0, 2**32 - 1), st.integers(3, 6))
def test_ccz_is_an_involution(seed, n):
    psi = random_state(n, seed)
    sites = np.random.default_rng(seed).choice(np.arange(1, n + 1), 3, replace=False)
    assert np.array_equal(apply_ccz(apply_ccz(psi, *sites), *sites).amps, psi.amps)


@given(st.integers(0, 2**32 - 1))
def test_measurement_probabilities_match_born_rule(seed):
    psi = random_state(3, seed)
    _, _, p0 = measure(psi, 2, "Z", outcome=0)
    p_dense = np.sum(np.abs(psi.amps.reshape(2, 2, 2)[:, 0, :]) ** 2)
    assert np.isclose(p0, p_dense)
