import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bowtie_mbqc import frame as fr
from bowtie_mbqc.errors import PreconditionError
from bowtie_mbqc.frame import ByproductFrame
from bowtie_mbqc.qcore import H, I2, X, Z, apply_ccz, apply_cz, equal_up_to_phase, kron_local, operator_of, random_state

SITES = (1, 2, 3, 4)
PAIRS = list(itertools.combinations(SITES, 2))


def dense(f: ByproductFrame, n: int) -> np.ndarray:
    """Textbook X^x Z^z CZ^cp, built without the library's apply_frame."""
    out = kron_local([X if s in f.x else I2 for s in range(1, n + 1)])
    out = out @ kron_local([Z if s in f.z else I2 for s in range(1, n + 1)])
    for i, j in f.cp:
        out = out @ operator_of(lambda st, i=i, j=j: apply_cz(st, i, j), n)
    return out


frames = st.builds(
    ByproductFrame,
    st.frozensets(st.sampled_from(SITES)),
    st.frozensets(st.sampled_from(SITES)),
    st.frozensets(st.sampled_from(PAIRS)),
)
pauli_frames = st.builds(ByproductFrame, st.frozensets(st.sampled_from(SITES)), st.frozensets(st.sampled_from(SITES)))


@given(frames)
def test_apply_frame_matches_dense(f):
    assert np.allclose(fr.frame_matrix(f, 4), dense(f, 4))


@given(frames, frames)
def test_compose_is_exact(a, b):
    got = dense(fr.compose(a, b), 4)
    assert equal_up_to_phase(dense(a, 4) @ dense(b, 4), got) < 1e-14


@given(pauli_frames)
def test_pauli_frames_are_involutions(f):
    assert fr.compose(f, f).is_identity()


@given(st.frozensets(st.sampled_from(PAIRS)))
def test_cp_frames_are_involutions(cp):
    f = ByproductFrame(cp=cp)
    assert fr.compose(f, f).is_identity()


def test_mixed_frame_squares_to_a_z():
    # (X1 CZ12)^2 = X1 CZ12 X1 CZ12 = Z2, not the identity
    f = ByproductFrame(x=frozenset({1}), cp=frozenset({(1, 2)}))
    assert fr.compose(f, f) == fr.pauli_z(2)
    assert equal_up_to_phase(dense(f, 2) @ dense(f, 2), dense(fr.pauli_z(2), 2)) < 1e-15


@pytest.mark.parametrize("f", list(fr.frames_on((1, 2, 3))), ids=str)
def test_ccz_conjugation_exhaustive(f):
    ccz = operator_of(lambda st: apply_ccz(st, 1, 2, 3), 3)
    g = fr.conjugate_through_ccz(f, (1, 2, 3))
    assert equal_up_to_phase(ccz @ dense(f, 3), dense(g, 3) @ ccz) < 1e-14


@pytest.mark.parametrize("f", list(fr.frames_on((1, 2))), ids=str)
def test_cz_conjugation_exhaustive(f):
    cz = operator_of(lambda st: apply_cz(st, 1, 2), 2)
    g = fr.conjugate_through_cz(f, (1, 2))
    assert equal_up_to_phase(cz @ dense(f, 2), dense(g, 2) @ cz) < 1e-14


@pytest.mark.parametrize("f", list(fr.frames_on((1,))), ids=str)
def test_h_conjugation_exhaustive(f):
    g = fr.conjugate_through_h(f, 1)
    assert equal_up_to_phase(H @ dense(f, 1), dense(g, 1) @ H) < 1e-15


@given(frames)
def test_ccz_conjugation_with_spectator_cp(f):
    # CP pairs touching at most one triangle site are allowed and must stay exact
    f = ByproductFrame(f.x, f.z, frozenset(p for p in f.cp if not set(p) <= {1, 2, 3}))
    ccz = operator_of(lambda st: apply_ccz(st, 1, 2, 3), 4)
    g = fr.conjugate_through_ccz(f, (1, 2, 3))
    assert equal_up_to_phase(ccz @ dense(f, 4), dense(g, 4) @ ccz) < 1e-14


def test_ccz_rule_examples():
    g = fr.conjugate_through_ccz(fr.pauli_x(1), (1, 2, 3))
    assert g == ByproductFrame(x=frozenset({1}), cp=frozenset({(2, 3)}))
    g = fr.conjugate_through_ccz(fr.pauli_x(1, 2), (1, 2, 3))
    assert g.z == {3} and g.cp == {(1, 3), (2, 3)}
    assert fr.conjugate_through_ccz(fr.pauli_z(2), (1, 2, 3)) == fr.pauli_z(2)


def test_preconditions():
    with pytest.raises(PreconditionError):
        fr.conjugate_through_ccz(ByproductFrame(cp=frozenset({(1, 2)})), (1, 2, 3))
    with pytest.raises(PreconditionError):
        fr.conjugate_through_h(ByproductFrame(cp=frozenset({(1, 2)})), 2)
    with pytest.raises(ValueError):
        fr.conjugate_through_ccz(fr.identity_frame(), (1, 1, 2))


@pytest.mark.parametrize("bits", list(itertools.product((0, 1), repeat=4)))
def test_enlargement_frame_table(bits):
    s7, s8, s9, s10 = bits
    f = fr.enlargement_frame(*bits)
    assert not f.x
    assert [f.z_exp(k) for k in (4, 5, 6)] == [s8, s9, s7 * s10]
    assert f.cp_exp(4, 6) == s10 and f.cp_exp(5, 6) == s7 and f.cp_exp(4, 5) == 0


def test_from_bits_reduces_mod_two():
    f = ByproductFrame.from_bits({1: 3, 2: 2}, {1: 1}, {(2, 1): 1})
    assert f == ByproductFrame(frozenset({1}), frozenset({1}), frozenset({(1, 2)}))


@given(frames)
def test_json_roundtrip(f):
    assert ByproductFrame.from_json(f.to_json()) == f


def test_json_shape():
    f = ByproductFrame.from_bits({2: 1}, {1: 1}, {(1, 3): 1})
    assert f.to_json() == {"x": {"2": 1}, "z": {"1": 1}, "cp": [[1, 3, 1]]}


def test_apply_frame_with_site_map():
    psi = random_state(2, 3)
    f = fr.pauli_x(11)
    out = fr.apply_frame(psi, f, {11: 2})
    assert np.allclose(out.amps, kron_local([I2, X]) @ psi.amps)
