"""Measurement patterns on CCZ/CZ resources, simulated exactly.

Every pattern entangles its whole register first and measures afterwards;
the entangling gates are all diagonal, so this is equivalent to any
interleaved order.  Byproducts are tracked with :mod:`bowtie_mbqc.frame`
and removed from the output at the end.  Controlled-phase byproducts that
would otherwise have to cross a Hadamard are applied to the register as soon
as they appear.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from bowtie_mbqc import frame as fr
from bowtie_mbqc.errors import ConfigurationError
from bowtie_mbqc.frame import ByproductFrame
from bowtie_mbqc.lattice import (
    LatticeGraph,
    assignment_from_path,
    bowtie_cell_sites,
    build_bowtie,
    custom_graph,
    enlargement_graph,
    toffoli_graph,
)
from bowtie_mbqc.qcore import (
    CNOT_12,
    H,
    I2,
    MeasurementRecord,
    PauliBasis,
    StateVector,
    apply_ccz,
    apply_cz,
    apply_unitary,
    equal_up_to_phase,
    iter_bits,
    extract_sites,
    kron_local,
    kron_states,
    measure,
    prepare_product,
    rz,
)

# Local dressing of the compact Toffoli network, pinned by the reference-qubit
# oracle (scripts/pin_toffoli_dressing.py): network = DRESS_OUT . TOFFOLI . DRESS_IN
# with the third wire as target.
TOFFOLI_DRESS_IN = (H, H, I2)
TOFFOLI_DRESS_OUT = (H, H, I2)

TOFFOLI_MEASURED = tuple(range(1, 11))
TOFFOLI_OUTPUTS = (11, 12, 13)
ENLARGEMENT_ANCILLAS = (7, 8, 9, 10)


@dataclass
class ProtocolRun:
    """Outcome of one pattern execution.

    ``raw_output`` is the output register before byproduct removal and
    ``output_state`` after it; both are ordered as ``output_sites``.
    """

    graph: LatticeGraph
    assignment: dict[int, str]
    plan: list[tuple[int, str, str]]
    record: MeasurementRecord
    frame: ByproductFrame
    output_sites: tuple[int, ...]
    raw_output: StateVector
    output_state: StateVector

    def outcomes(self) -> dict[int, int]:
        return self.record.outcomes()

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "assignment": {str(k): v for k, v in sorted(self.assignment.items())},
            "plan": [list(p) for p in self.plan],
            "record": self.record.to_json(),
            "frame": self.frame.to_json(),
            "output_sites": list(self.output_sites),
            "output": self.output_state.to_json(),
        }


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _forced(outcomes, sites: Sequence[int]) -> dict[int, int | None]:
    """Normalize forced outcomes (None, bit string, sequence or mapping) to a per-site map."""
    if outcomes is None:
        return {s: None for s in sites}
    if isinstance(outcomes, dict):
        return {s: outcomes.get(s) for s in sites}
    outcomes = list(outcomes)
    if len(outcomes) != len(sites):
        raise ConfigurationError(f"expected {len(sites)} outcome bits, got {len(outcomes)}")
    if any(str(b) not in ("0", "1") for b in outcomes):
        raise ConfigurationError(f"outcomes must be 0/1, got {outcomes}")
    return dict(zip(sites, (int(b) for b in outcomes)))


def entangle_all(state: StateVector, g: LatticeGraph, qubits: dict[int, int] | None = None) -> StateVector:
    """CCZ on every triangle and CZ on every link of ``g``."""
    q = qubits or {s: s for s in g.labels}
    if max(q[s] for s in g.labels) > state.n_qubits:
        raise ConfigurationError("register is smaller than the graph")
    for i, j, k in g.triangles:
        state = apply_ccz(state, q[i], q[j], q[k])
    for i, j in g.links:
        state = apply_cz(state, q[i], q[j])
    return state


def teleport_frame(f: ByproductFrame, src: int, dst: int, s: int) -> ByproductFrame:
    """Frame after X-measuring ``src`` (outcome ``s``) to move its qubit onto ``dst`` through a CZ."""
    moved = fr.conjugate_through_h(f, src).relabel({src: dst})
    return fr.compose(fr.ByproductFrame.from_bits(x={dst: s}), moved)


def clear_cp(state: StateVector, f: ByproductFrame, qubits=None) -> tuple[StateVector, ByproductFrame]:
    """Apply the pending controlled-phase byproducts to the register and drop them from ``f``."""
    if not f.cp:
        return state, f
    cp = f.cp_part()
    return fr.apply_frame(state, cp, qubits), fr.compose(cp, f)


# ---------------------------------------------------------------- wire


def run_wire(input_state: StateVector, length: int, outcomes=None, rng=None) -> ProtocolRun:
    """Propagate one qubit along a ``length + 1`` site CZ chain by X measurements.

    The corrected output equals ``H**length`` applied to the input.
    """
    if length < 1:
        raise ConfigurationError("wire length must be >= 1")
    if input_state.n_qubits != 1:
        raise ConfigurationError("wire input must be a single qubit")
    n = length + 1
    g = custom_graph(range(1, n + 1), links=[(k, k + 1) for k in range(1, n)])
    forced = _forced(outcomes, range(1, n))
    rng = _rng(rng)
    state = kron_states(input_state, prepare_product({k: "plus" for k in range(1, n)}))
    state = entangle_all(state, g)
    record = MeasurementRecord()
    f = fr.identity_frame()
    for k in range(1, n):
        s, state, _ = measure(state, k, PauliBasis.X, outcome=forced[k], rng=rng, record=record)
        f = teleport_frame(f, k, k + 1, s)
    raw = extract_sites(state, [n])
    local = f.relabel({n: 1})
    return ProtocolRun(
        graph=g,
        assignment={1: "input", **{k: "plus" for k in range(2, n + 1)}},
        plan=[(k, "X", "sampled" if forced[k] is None else "forced") for k in range(1, n)],
        record=record,
        frame=f,
        output_sites=(n,),
        raw_output=raw,
        output_state=fr.apply_frame(raw, local),
    )


# ---------------------------------------------------------------- bridging qubit


@dataclass
class BridgeResult:
    output: StateVector
    s: int
    probability: float
    classification: dict


def _triangle_bridge(input_state: StateVector, basis: PauliBasis, outcome, rng):
    if input_state.n_qubits != 2:
        raise ConfigurationError("bridging gadgets act on two qubits")
    state = kron_states(input_state, prepare_product({1: "plus"}))
    state = apply_ccz(state, 1, 2, 3)
    s, state, p = measure(state, 3, basis, outcome=outcome, rng=_rng(rng))
    return extract_sites(state, [1, 2]), s, p


def bridging_gate(input_state: StateVector, outcome: int | None = None, rng=None) -> BridgeResult:
    """Two-qubit gate from a bridging qubit sharing a triangle with both logical qubits.

    The bridge starts in |+>, one CCZ entangles the triangle and the bridge is
    measured in Y.  Branch ``s`` applies ``(1 -/+ i CZ) / sqrt(2)``.
    """
    out, s, p = _triangle_bridge(input_state, PauliBasis.Y, outcome, rng)
    return BridgeResult(out, s, p, classify_bridge())


def break_link(input_state: StateVector, outcome: int | None = None, rng=None) -> tuple[StateVector, int]:
    """Z-measure the bridging qubit: identity for ``s = 0``, CZ for ``s = 1``."""
    out, s, _ = _triangle_bridge(input_state, PauliBasis.Z, outcome, rng)
    return out, s


def bowtie_bridge(input_state: StateVector, outcome: int | None = None, rng=None) -> BridgeResult:
    """Bridging gate on one bowtie cell, with the shared centre site as bridge.

    Logical qubits sit on the two outer vertices, both apex vertices are
    pre-set to |1>, so each triangle reduces to a CZ between the bridge and
    one logical qubit.  Y-measuring the centre then applies
    ``exp(-/+ i pi/4 Z Z) = CNOT (1 x Rz(+/-pi/2)) CNOT`` to the logical pair.
    """
    if input_state.n_qubits != 2:
        raise ConfigurationError("bridging gadgets act on two qubits")
    g = build_bowtie(1, 1)
    centre, left, left_apex, right, right_apex = bowtie_cell_sites(g)
    assignment = assignment_from_path(g, active={centre}, bridge_ones={left_apex, right_apex})
    others = sorted(s for s in g.labels if s not in (left, right))
    perm = {site: pos for pos, site in enumerate([left, right, *others], start=1)}
    state = kron_states(input_state, prepare_product({perm[s] - 2: assignment[s] for s in others}))
    state = entangle_all(state, g, perm)
    s, state, p = measure(state, perm[centre], PauliBasis.Y, outcome=outcome, rng=_rng(rng))
    for apex in (left_apex, right_apex):
        _, state, _ = measure(state, perm[apex], PauliBasis.Z, outcome=1)
    out = extract_sites(state, [perm[left], perm[right]])
    return BridgeResult(out, s, p, classify_bridge(topology="bowtie"))


def branch_map(gadget, s: int) -> np.ndarray:
    """4x4 map of a bridging gadget on branch ``s``, with consistent column phases.

    Runs the gadget on the logical pair entangled with a two-qubit reference,
    so no per-input phase convention leaks into the matrix.
    """
    bell = np.zeros(16, dtype=complex)
    for b in range(4):
        bell[b + 4 * b] = 0.5
    choi = StateVector(4, bell)
    if gadget == "triangle":
        state = kron_states(choi, prepare_product({1: "plus"}))
        state = apply_ccz(state, 1, 2, 5)
        _, state, _ = measure(state, 5, PauliBasis.Y, outcome=s)
        out = extract_sites(state, [1, 2, 3, 4])
    elif gadget == "bowtie":
        # logical 1, 2; reference 3, 4; bridge 5; apexes 6, 7
        state = kron_states(choi, prepare_product({1: "plus", 2: "one", 3: "one"}))
        state = apply_ccz(state, 5, 1, 6)
        state = apply_ccz(state, 5, 2, 7)
        _, state, _ = measure(state, 5, PauliBasis.Y, outcome=s)
        out = extract_sites(state, [1, 2, 3, 4])
    else:
        raise ValueError(f"unknown gadget {gadget!r}")
    return 2 * out.amps.reshape(4, 4).T


MAGIC = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex) / math.sqrt(2)


def makhlin_invariants(u: np.ndarray) -> tuple[complex, float]:
    """Local-equivalence invariants ``(G1, G2)`` of a two-qubit unitary."""
    u = np.asarray(u, dtype=complex)
    ub = MAGIC.conj().T @ u @ MAGIC
    m = ub.T @ ub
    det = np.linalg.det(u)
    tr = np.trace(m)
    g1 = tr**2 / (16 * det)
    g2 = (tr**2 - np.trace(m @ m)) / (4 * det)
    return complex(g1), float(g2.real)


def locally_equivalent(u: np.ndarray, v: np.ndarray, tol: float = 1e-10) -> bool:
    g1u, g2u = makhlin_invariants(u)
    g1v, g2v = makhlin_invariants(v)
    return abs(g1u - g1v) <= tol and abs(g2u - g2v) <= tol


def cnot_rz_cnot(angle: float = math.pi / 2) -> np.ndarray:
    """``CNOT (1 x Rz(angle)) CNOT`` with qubit 1 as control."""
    return CNOT_12 @ np.kron(rz(angle), I2) @ CNOT_12


@lru_cache(maxsize=None)
def _classify(topology: str) -> tuple:
    maps = [branch_map(topology, s) for s in (0, 1)]
    info = {"topology": topology}
    info["diagonal"] = all(np.allclose(m, np.diag(np.diag(m)), atol=1e-12) for m in maps)
    phases = []
    for m in maps:
        d = np.diag(m)
        phases.append(d[3] / d[0])
    info["phase_11_over_00"] = [[float(p.real), float(p.imag)] for p in phases]
    cp_angles = []
    for m in maps:
        d = np.diag(m)
        cp_angles.append(float(np.angle(d[0] * d[3] / (d[1] * d[2]))))
    info["controlled_phase_angle"] = cp_angles
    info["makhlin"] = [[g1.real, g1.imag, g2] for g1, g2 in (makhlin_invariants(m) for m in maps)]
    target = cnot_rz_cnot(math.pi / 2)
    info["equivalent_to_cnot_rz_half_pi"] = all(locally_equivalent(m, target) for m in maps)
    info["equivalent_to_cnot_rz_quarter_pi"] = all(locally_equivalent(m, cnot_rz_cnot(math.pi / 4)) for m in maps)
    return tuple(sorted(info.items()))


def classify_bridge(topology: str = "triangle") -> dict:
    """Oracle classification of the bridging gadget's two branch maps."""
    return dict(_classify(topology))


# ---------------------------------------------------------------- enlargement


def triangle_enlargement(input_state: StateVector, outcomes=None, rng=None) -> ProtocolRun:
    """Enlarged CCZ between slots 4, 5, 6 via X measurements of ancillas 7-10.

    ``input_state`` holds slots 4, 5, 6 (in that qubit order).  The corrected
    output equals ``CCZ . input`` up to global phase on every branch.
    """
    if input_state.n_qubits != 3:
        raise ConfigurationError("enlargement input must be a three-qubit state")
    g = enlargement_graph()
    q = g.qubit_map()
    forced = _forced(outcomes, ENLARGEMENT_ANCILLAS)
    rng = _rng(rng)
    state = kron_states(input_state, prepare_product({k: "plus" for k in range(1, 5)}))
    state = entangle_all(state, g, q)
    record = MeasurementRecord()
    bits = []
    for site in ENLARGEMENT_ANCILLAS:
        s, state, _ = measure(state, q[site], PauliBasis.X, outcome=forced[site], rng=rng, record=record)
        bits.append(s)
    record.entries = [e._replace(site=site) for e, site in zip(record.entries, ENLARGEMENT_ANCILLAS)]
    f = fr.enlargement_frame(*bits)
    raw = extract_sites(state, [q[4], q[5], q[6]])
    return ProtocolRun(
        graph=g,
        assignment={4: "input", 5: "input", 6: "input", **{k: "plus" for k in ENLARGEMENT_ANCILLAS}},
        plan=[(k, "X", "sampled" if forced[k] is None else "forced") for k in ENLARGEMENT_ANCILLAS],
        record=record,
        frame=f,
        output_sites=(4, 5, 6),
        raw_output=raw,
        output_state=fr.apply_frame(raw, f.relabel({4: 1, 5: 2, 6: 3})),
    )


# ---------------------------------------------------------------- compact Toffoli


def _toffoli_input(inputs) -> StateVector:
    if isinstance(inputs, StateVector):
        if inputs.n_qubits != 3:
            raise ConfigurationError("Toffoli input must be three qubits")
        return inputs
    inputs = list(inputs)
    if len(inputs) != 3:
        raise ConfigurationError("Toffoli needs three input states")
    return kron_states(*(s if isinstance(s, StateVector) else prepare_product({1: s}) for s in inputs))


TOFFOLI_ORDER = (1, 2, 3, 7, 8, 9, 10, 4, 5, 6)


def _toffoli_step(site: int, s: int, state: StateVector, f: ByproductFrame, bits: dict[int, int]):
    """Classical processing after the X outcome ``s`` of ``site``.

    Inputs 1-3 and slots 4-6 teleport onto the next column.  Once ancillas
    7-10 are all known the frame is pushed through the CCZ, the enlargement
    byproduct is added and its CP part is applied to the register, since a
    CP cannot cross the Hadamards of the outgoing wires.
    """
    if site in (1, 2, 3):
        return state, teleport_frame(f, site, site + 3, s)
    if site in (4, 5, 6):
        return state, teleport_frame(f, site, site + 7, s)
    if site == 10:
        e = fr.enlargement_frame(bits[7], bits[8], bits[9], s)
        f = fr.compose(e, fr.conjugate_through_ccz(f, (4, 5, 6)))
        return clear_cp(state, f)
    return state, f


def _toffoli_register(inputs) -> StateVector:
    inp = _toffoli_input(inputs)
    state = kron_states(inp, prepare_product({k: "plus" for k in range(1, 11)}))
    return entangle_all(state, toffoli_graph())


def _toffoli_result(state, f, record, forced) -> ProtocolRun:
    raw = extract_sites(state, list(TOFFOLI_OUTPUTS))
    return ProtocolRun(
        graph=toffoli_graph(),
        assignment={1: "input", 2: "input", 3: "input", **{k: "plus" for k in range(4, 14)}},
        plan=[(k, "X", "sampled" if forced.get(k) is None else "forced") for k in TOFFOLI_ORDER],
        record=record,
        frame=f,
        output_sites=TOFFOLI_OUTPUTS,
        raw_output=raw,
        output_state=fr.apply_frame(raw, f.relabel({11: 1, 12: 2, 13: 3})),
    )


def toffoli_pattern(inputs, outcomes=None, rng=None) -> ProtocolRun:
    """The 13-qubit compact Toffoli network.

    ``inputs`` is three single-qubit states (``StateVector`` or ``"zero"`` /
    ``"one"`` / ``"plus"``) for sites 1, 2, 3, or one three-qubit state.
    ``outcomes`` forces the X outcomes of sites 1-10 (bit string indexed by
    site, sequence, or ``{site: bit}``).  The corrected output on sites
    11, 12, 13 equals ``dressed_toffoli() . input`` up to global phase.
    """
    forced = _forced(outcomes, TOFFOLI_MEASURED)
    rng = _rng(rng)
    state = _toffoli_register(inputs)
    record = MeasurementRecord()
    f = fr.identity_frame()
    bits: dict[int, int] = {}
    for site in TOFFOLI_ORDER:
        s, state, _ = measure(state, site, PauliBasis.X, outcome=forced[site], rng=rng, record=record)
        bits[site] = s
        state, f = _toffoli_step(site, s, state, f, bits)
    return _toffoli_result(state, f, record, forced)


def iter_toffoli_branches(inputs, branches=None):
    """Yield ``(bits, ProtocolRun)`` for many forced branches of one input.

    ``branches`` is an iterable of ``{site: bit}`` maps (default: all 1024).
    Branches are walked as a tree over the measurement order so that shared
    prefixes are simulated once; each yielded run is identical to
    ``toffoli_pattern(inputs, bits)``.
    """
    if branches is None:
        branches = [dict(zip(TOFFOLI_MEASURED, b)) for b in iter_bits(10)]
    tree: dict = {}
    for b in branches:
        node = tree
        for site in TOFFOLI_ORDER:
            node = node.setdefault(int(b[site]), {})
    root = _toffoli_register(inputs)

    def walk(node, depth, state, f, bits, entries):
        if depth == len(TOFFOLI_ORDER):
            record = MeasurementRecord(list(entries))
            yield dict(bits), _toffoli_result(state, f, record, bits)
            return
        site = TOFFOLI_ORDER[depth]
        for s in sorted(node):
            record = MeasurementRecord()
            _, st, _ = measure(state, site, PauliBasis.X, outcome=s, record=record)
            bits[site] = s
            st, g = _toffoli_step(site, s, st, f, bits)
            yield from walk(node[s], depth + 1, st, g, bits, entries + record.entries)
            del bits[site]

    yield from walk(tree, 0, root, fr.identity_frame(), {}, [])


def toffoli_branch_map(outcomes) -> np.ndarray:
    """Uncorrected 8x8 map of the network on one forced branch.

    Oracle route independent of the frame rules: the three inputs are
    maximally entangled with three reference qubits (14-16) and the raw
    output register is read off as a Choi matrix.
    """
    forced = _forced(outcomes, TOFFOLI_MEASURED)
    choi = np.zeros(64, dtype=complex)
    for b in range(8):
        choi[b + 8 * b] = 1 / math.sqrt(8)
    state = kron_states(StateVector(6, choi), prepare_product({k: "plus" for k in range(1, 11)}))
    # register: inputs 1-3, reference 4-6, network sites 4-13 on qubits 7-16
    q = {1: 1, 2: 2, 3: 3, **{s: s + 3 for s in range(4, 14)}}
    state = entangle_all(state, toffoli_graph(), q)
    for site in (1, 2, 3, 7, 8, 9, 10, 4, 5, 6):
        _, state, _ = measure(state, q[site], PauliBasis.X, outcome=forced[site])
    out = extract_sites(state, [14, 15, 16, 4, 5, 6])
    return math.sqrt(8) * out.amps.reshape(8, 8).T


def toffoli_matrix() -> np.ndarray:
    """Textbook Toffoli, controls on wires 1 and 2, target wire 3 (little-endian)."""
    t = np.eye(8, dtype=complex)
    t[[3, 7]] = t[[7, 3]]
    return t


def dressed_toffoli() -> np.ndarray:
    return kron_local(TOFFOLI_DRESS_OUT) @ toffoli_matrix() @ kron_local(TOFFOLI_DRESS_IN)


def undress_input(state: StateVector) -> StateVector:
    """Input to feed the network so that it acts as a bare Toffoli."""
    return apply_unitary(state, (1, 2, 3), kron_local(TOFFOLI_DRESS_IN).conj().T)


def undress_output(state: StateVector) -> StateVector:
    return apply_unitary(state, (1, 2, 3), kron_local(TOFFOLI_DRESS_OUT).conj().T)


def pin_dressing(branch: np.ndarray | None = None) -> dict:
    """Check a branch map against the frozen dressing; returns the diagnostics."""
    if branch is None:
        branch = toffoli_branch_map([0] * 10)
    u = branch / np.linalg.norm(branch[:, 0])
    return {
        "unitary": bool(np.allclose(u @ u.conj().T, np.eye(8), atol=1e-10)),
        "deviation_from_dressed_toffoli": equal_up_to_phase(dressed_toffoli(), u),
        "deviation_from_bare_toffoli": equal_up_to_phase(toffoli_matrix(), u),
    }


# ---------------------------------------------------------------- resources


@dataclass(frozen=True)
class ResourceReport:
    n: int
    toffolis_per_nCNOT: int
    cluster_qubits_per_toffoli: int
    compact_qubits_per_toffoli: int
    grover_steps: int
    three_qubit_search_cluster_qubits: int

    def to_json(self) -> dict:
        return asdict(self)


def resource_estimates(n: int) -> ResourceReport:
    """Qubit bookkeeping for an ``n``-qubit marked-entry search.

    An n-controlled NOT costs ``4 (n - 3)`` Toffolis for ``n > 3``; ``n = 3``
    is taken as a single Toffoli.
    """
    if n < 3:
        raise ConfigurationError(f"n must be >= 3, got {n}")
    return ResourceReport(
        n=n,
        toffolis_per_nCNOT=4 * (n - 3) if n > 3 else 1,
        cluster_qubits_per_toffoli=65,
        compact_qubits_per_toffoli=len(toffoli_graph().labels),
        grover_steps=math.ceil(math.sqrt(2**n)),
        three_qubit_search_cluster_qubits=245,
    )
