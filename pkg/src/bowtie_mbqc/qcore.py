"""Dense state-vector engine.

Qubits carry 1-based labels and the amplitude index is little-endian in the
label: ``index = sum_i b_i * 2**(i - 1)``.  Reshaped to ``(2,) * n`` in C order,
qubit ``i`` therefore lives on tensor axis ``n - i``.

All gate functions are pure: they return a new :class:`StateVector`.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from bowtie_mbqc.errors import BranchImpossibleError, ConfigurationError

MAX_QUBITS = 24
NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
BRANCH_TOL = 1e-12
PURITY_TOL = 1e-10

SQRT1_2 = 1.0 / np.sqrt(2.0)

ZERO = np.array([1.0, 0.0], dtype=complex)
ONE = np.array([0.0, 1.0], dtype=complex)
PLUS = np.array([SQRT1_2, SQRT1_2], dtype=complex)
MINUS = np.array([SQRT1_2, -SQRT1_2], dtype=complex)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
# control qubit 1, target qubit 2 (little-endian index b1 + 2 b2)
CNOT_12 = np.eye(4, dtype=complex)[[0, 3, 2, 1]]

SINGLE_STATES = {"zero": ZERO, "one": ONE, "plus": PLUS, "minus": MINUS}


def rz(angle: float) -> np.ndarray:
    """Rotation about z by ``angle`` on the Bloch sphere, ``exp(-i angle Z / 2)``."""
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


class PauliBasis(str, enum.Enum):
    """Single-qubit measurement basis.  Outcome 0 is the +1 eigenvector."""

    X = "X"
    Y = "Y"
    Z = "Z"

    def eigenvector(self, s: int) -> np.ndarray:
        return _EIGENVECTORS[self][s]


_EIGENVECTORS = {
    PauliBasis.X: (PLUS, MINUS),
    PauliBasis.Y: (
        np.array([SQRT1_2, 1j * SQRT1_2], dtype=complex),
        np.array([SQRT1_2, -1j * SQRT1_2], dtype=complex),
    ),
    PauliBasis.Z: (ZERO, ONE),
}


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over ``n_qubits`` labelled qubits."""

    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.n_qubits
        if not 1 <= n <= MAX_QUBITS:
            raise ConfigurationError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != 2**n:
            raise ConfigurationError(f"expected {2**n} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > UNITARY_TOL:
            raise ConfigurationError(f"state is not normalized (norm^2 = {norm})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size)))
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        if not 0 <= index < 2**n:
            raise ValueError(f"basis index {index} out of range for {n} qubits")
        amps = np.zeros(2**n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "StateVector":
        """Computational basis state; ``bits[0]`` is the bit of qubit 1."""
        return cls.basis(len(bits), sum(int(b) << q for q, b in enumerate(bits)))

    @property
    def dim(self) -> int:
        return self.amps.size

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.n_qubits)

    def to_json(self) -> dict:
        return {"n": self.n_qubits, "amps": [[float(a.real), float(a.imag)] for a in self.amps]}

    @classmethod
    def from_json(cls, data: dict | str) -> "StateVector":
        if isinstance(data, str):
            data = json.loads(data)
        amps = np.array([complex(re, im) for re, im in data["amps"]])
        return cls(int(data["n"]), amps)


_BRAS = {b: np.stack([v.conj() for v in vecs]) for b, vecs in _EIGENVECTORS.items()}


def _trusted(n: int, amps: np.ndarray) -> StateVector:
    """Wrap amplitudes produced by a norm-preserving kernel without re-validating."""
    sv = object.__new__(StateVector)
    amps.flags.writeable = False
    object.__setattr__(sv, "n_qubits", n)
    object.__setattr__(sv, "amps", amps)
    return sv


def _axis(n: int, site: int) -> int:
    if not 1 <= site <= n:
        raise ConfigurationError(f"site {site} out of range 1..{n}")
    return n - site


def _check_distinct(sites: Sequence[int], n: int) -> None:
    if len(set(sites)) != len(sites):
        raise ValueError(f"sites must be distinct, got {tuple(sites)}")
    for s in sites:
        _axis(n, s)


@lru_cache(maxsize=256)
def _mask_positions(n: int, mask: int) -> np.ndarray:
    idx = np.arange(2**n)
    return np.flatnonzero((idx & mask) == mask)


def _phase_flip(state: StateVector, sites: Sequence[int]) -> StateVector:
    _check_distinct(sites, state.n_qubits)
    mask = 0
    for s in sites:
        mask |= 1 << (s - 1)
    amps = state.amps.copy()
    amps[_mask_positions(state.n_qubits, mask)] *= -1
    return _trusted(state.n_qubits, amps)


def prepare_product(assignment: Mapping[int, str], n: int | None = None) -> StateVector:
    """Tensor product of ``zero``/``one``/``plus`` (or ``minus``) single-qubit states.

    ``assignment`` must cover sites ``1..n`` exactly once.  Values may also be
    length-2 amplitude pairs.
    """
    if n is None:
        n = len(assignment)
    sites = sorted(assignment)
    if sites != list(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - set(sites))
        extra = sorted(set(sites) - set(range(1, n + 1)))
        raise ConfigurationError(f"assignment must cover sites 1..{n}: missing {missing}, extra {extra}")
    values = [assignment[site] for site in sites]
    if all(isinstance(v, str) and v == "plus" for v in values):
        return StateVector(n, np.full(2**n, 2.0 ** (-n / 2), dtype=complex))
    amps = np.ones(1, dtype=complex)
    for v in values:
        amps = np.kron(_single(v), amps)
    return StateVector(n, amps)


def _single(value) -> np.ndarray:
    if isinstance(value, str):
        try:
            return SINGLE_STATES[value]
        except KeyError:
            raise ConfigurationError(f"unknown single-qubit state {value!r}") from None
    vec = np.asarray(value, dtype=complex).reshape(-1)
    if vec.size != 2:
        raise ConfigurationError("single-qubit state needs two amplitudes")
    return vec / np.linalg.norm(vec)


def kron_states(*states: StateVector) -> StateVector:
    """Join registers; the first argument occupies the lowest labels."""
    amps = np.ones(1, dtype=complex)
    for st in states:
        amps = np.kron(st.amps, amps)
    return StateVector(sum(st.n_qubits for st in states), amps)


def kron_local(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of per-qubit operators, ``ops[0]`` on qubit 1."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(op, out)
    return out


def apply_ccz(state: StateVector, i: int, j: int, k: int) -> StateVector:
    """Negate every amplitude with qubits ``i``, ``j`` and ``k`` all set."""
    return _phase_flip(state, (i, j, k))


def apply_cz(state: StateVector, i: int, j: int) -> StateVector:
    return _phase_flip(state, (i, j))


def apply_diagonal(state: StateVector, phases: np.ndarray) -> StateVector:
    return StateVector(state.n_qubits, state.amps * phases)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=tol, rtol=0)


def apply_unitary(state: StateVector, sites: Sequence[int], u: np.ndarray) -> StateVector:
    """Apply a ``2**k`` square unitary to ``sites``.

    ``u`` is indexed little-endian in ``sites``: ``sites[0]`` is its least
    significant bit.
    """
    n = state.n_qubits
    k = len(sites)
    _check_distinct(sites, n)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2**k, 2**k) or not is_unitary(u):
        raise ValueError(f"expected a {2**k}x{2**k} unitary")
    axes = [_axis(n, s) for s in reversed(sites)]
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, state.tensor(), axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return StateVector(n, out.reshape(-1))


def apply_single(state: StateVector, site: int, u: np.ndarray) -> StateVector:
    return apply_unitary(state, (site,), u)


class MeasurementEntry(NamedTuple):
    site: int
    basis: PauliBasis
    s: int
    probability: float


@dataclass
class MeasurementRecord:
    """Ordered measurement outcomes of one protocol run."""

    entries: list[MeasurementEntry] = field(default_factory=list)

    def append(self, entry: MeasurementEntry) -> None:
        if entry.site in self.sites():
            raise ValueError(f"site {entry.site} already measured")
        self.entries.append(entry)

    def sites(self) -> list[int]:
        return [e.site for e in self.entries]

    def outcome(self, site: int) -> int:
        for e in self.entries:
            if e.site == site:
                return e.s
        raise KeyError(site)

    def outcomes(self) -> dict[int, int]:
        return {e.site: e.s for e in self.entries}

    def probability(self) -> float:
        """Joint probability of the recorded branch."""
        return float(np.prod([e.probability for e in self.entries]))

    def to_json(self) -> list:
        return [
            {"site": e.site, "basis": e.basis.value, "s": e.s, "probability": e.probability}
            for e in self.entries
        ]


def branch_probabilities(state: StateVector, site: int, basis: PauliBasis | str) -> tuple[float, float]:
    basis = PauliBasis(basis)
    n = state.n_qubits
    _axis(n, site)
    psi = state.amps.reshape(2 ** (n - site), 2, 2 ** (site - 1))
    probs = []
    for s in (0, 1):
        c = np.tensordot(psi, basis.eigenvector(s).conj(), axes=([1], [0]))
        probs.append(float(np.vdot(c, c).real))
    return probs[0], probs[1]


def measure(
    state: StateVector,
    site: int,
    basis: PauliBasis | str,
    *,
    outcome: int | None = None,
    rng: np.random.Generator | int | None = None,
    record: MeasurementRecord | None = None,
) -> tuple[int, StateVector, float]:
    """Projective Pauli measurement of one qubit.

    Pass ``outcome`` to force a branch, otherwise one is sampled from ``rng``
    (a ``numpy`` generator or an integer seed).  The measured qubit stays in the
    register, left in the eigenvector of its outcome.

    Returns ``(s, collapsed_state, probability_of_s)``.
    """
    basis = PauliBasis(basis)
    n = state.n_qubits
    _axis(n, site)
    if record is not None and site in record.sites():
        raise ValueError(f"site {site} already measured")
    psi = state.amps.reshape(2 ** (n - site), 2, 2 ** (site - 1))
    bras = _BRAS[basis]
    lo, hi = psi[:, 0, :], psi[:, 1, :]
    comps = [bras[s, 0] * lo + bras[s, 1] * hi for s in (0, 1)]
    weights = [float(np.vdot(c, c).real) for c in comps]
    total = weights[0] + weights[1]
    probs = [weights[0] / total, weights[1] / total]

    if outcome is None:
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        s = int(rng.random() >= probs[0])
    else:
        s = int(outcome)
        if s not in (0, 1):
            raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    if probs[s] <= BRANCH_TOL:
        raise BranchImpossibleError(f"outcome {s} of {basis.value} on site {site} has probability {probs[s]:.3g}")

    kept = comps[s] / np.sqrt(probs[s] * total)
    new = kept[:, None, :] * basis.eigenvector(s)[None, :, None]
    if record is not None:
        record.append(MeasurementEntry(site, basis, s, probs[s]))
    return s, _trusted(n, new.reshape(-1)), probs[s]


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|**2``."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))


def reduced_density(state: StateVector, site: int) -> np.ndarray:
    psi = np.moveaxis(state.tensor(), _axis(state.n_qubits, site), 0).reshape(2, -1)
    return psi @ psi.conj().T


def is_product(state: StateVector, site: int) -> bool:
    """True iff ``site`` is unentangled from the rest of the register."""
    rho = reduced_density(state, site)
    purity = float(np.trace(rho @ rho).real)
    return purity >= 1.0 - PURITY_TOL


def extract_sites(state: StateVector, sites: Sequence[int], tol: float = 1e-9) -> StateVector:
    """State of ``sites`` (in the given order) when they factor off from the rest.

    The global phase is fixed by the largest amplitude block, so the result is
    deterministic.  Raises if ``sites`` are entangled with the remainder.
    """
    n = state.n_qubits
    _check_distinct(sites, n)
    rest = [q for q in range(1, n + 1) if q not in sites]
    kept_axes = [_axis(n, s) for s in reversed(sites)]
    rest_axes = [_axis(n, s) for s in reversed(rest)]
    m = np.transpose(state.tensor(), kept_axes + rest_axes).reshape(2 ** len(sites), -1)
    col = int(np.argmax(np.einsum("ij,ij->j", m.conj(), m).real))
    u = m[:, col] / np.linalg.norm(m[:, col])
    resid = m - np.outer(u, u.conj() @ m)
    if np.linalg.norm(resid) > tol:
        raise ValueError(f"sites {list(sites)} are entangled with the rest of the register")
    return StateVector(len(sites), u)


def random_state(n: int, rng: np.random.Generator | int | None = None) -> StateVector:
    """Haar-random pure state."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(n, v / np.linalg.norm(v))


def operator_of(fn, n: int) -> np.ndarray:
    """Matrix of a linear state map by feeding it every basis state."""
    cols = [fn(StateVector.basis(n, b)).amps for b in range(2**n)]
    return np.stack(cols, axis=1)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """Max entrywise deviation after aligning the global phase of ``b`` to ``a``."""
    a = np.asarray(a)
    b = np.asarray(b)
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(b[idx]) < 1e-15:
        return float(np.max(np.abs(a - b)))
    phase = a[idx] / b[idx]
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))


def iter_bits(k: int) -> Iterable[tuple[int, ...]]:
    """All ``k``-bit tuples, first element least significant."""
    for v in range(2**k):
        yield tuple((v >> q) & 1 for q in range(k))
