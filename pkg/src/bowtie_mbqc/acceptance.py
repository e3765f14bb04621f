"""Exit-criteria checks, shared by the test suite and ``bowtie-mbqc verify``.

Each check returns a :class:`CheckResult`; a check passes only if its
numerical condition holds *and* it finished inside its runtime budget.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from bowtie_mbqc import frame as fr
from bowtie_mbqc import heff, protocols
from bowtie_mbqc.parallel import parallel_map
from bowtie_mbqc.qcore import (
    H,
    I2,
    X,
    Z,
    StateVector,
    apply_ccz,
    apply_cz,
    equal_up_to_phase,
    fidelity,
    is_product,
    iter_bits,
    kron_local,
    kron_states,
    measure,
    prepare_product,
    random_state,
)

FIDELITY_TOL = 1e-10


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:>2} {self.name:<12} {self.seconds:8.3f}s (< {self.budget:g}s)  {self.detail}"


def _timed(number: int, name: str, budget: float, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if dt >= budget:
        ok = False
        detail += f"; over runtime budget ({dt:.3g}s)"
    return CheckResult(number, name, bool(ok), detail, dt, budget)


# ---------------------------------------------------------------- 1


def check_c2p() -> CheckResult:
    apply_ccz(StateVector.basis(3, 0), 1, 2, 3)  # warm the index cache

    def run():
        bad = []
        for b in range(8):
            out = apply_ccz(StateVector.basis(3, b), 1, 2, 3).amps
            expected = np.zeros(8)
            expected[b] = -1.0 if b == 7 else 1.0
            if not np.array_equal(out, expected):
                bad.append(b)
        return not bad, "only |111> negated" if not bad else f"wrong action on basis states {bad}"

    return _timed(1, "c2p", 1e-3, run)


# ---------------------------------------------------------------- 2


def check_commutation() -> CheckResult:
    def run():
        worst = 0.0
        count = 0
        rng = np.random.default_rng(2)
        for n in range(3, 7):
            psi = random_state(n, rng)
            for tri in itertools.combinations(range(1, n + 1), 3):
                for pair in itertools.combinations(range(1, n + 1), 2):
                    a = apply_cz(apply_ccz(psi, *tri), *pair).amps
                    b = apply_ccz(apply_cz(psi, *pair), *tri).amps
                    worst = max(worst, float(np.max(np.abs(a - b))))
                    count += 1
        return worst <= 1e-14, f"{count} placements, max deviation {worst:.2e}"

    return _timed(2, "commutation", 1.0, run)


# ---------------------------------------------------------------- 3


def _pauli_matrix(x: dict, z: dict, cp: dict, n: int) -> np.ndarray:
    """Dense ``X^x Z^z CZ^cp`` from textbook matrices (independent of apply_frame)."""
    xm = kron_local([X if x.get(q) else I2 for q in range(1, n + 1)])
    zm = kron_local([Z if z.get(q) else I2 for q in range(1, n + 1)])
    d = np.ones(2**n, dtype=complex)
    for (i, j), bit in cp.items():
        if bit:
            for idx in range(2**n):
                if (idx >> (i - 1)) & 1 and (idx >> (j - 1)) & 1:
                    d[idx] *= -1
    return xm @ zm @ np.diag(d)


def _frame_dense(f: fr.ByproductFrame, n: int) -> np.ndarray:
    return _pauli_matrix({s: 1 for s in f.x}, {s: 1 for s in f.z}, {p: 1 for p in f.cp}, n)


def _ccz_matrix() -> np.ndarray:
    return np.diag([1.0] * 7 + [-1.0]).astype(complex)


def _cz_matrix() -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def check_byproduct() -> CheckResult:
    def run():
        worst = 0.0
        ccz = _ccz_matrix()
        for bits in iter_bits(6):
            f = fr.ByproductFrame.from_bits(dict(zip((1, 2, 3), bits[:3])), dict(zip((1, 2, 3), bits[3:])))
            g = fr.conjugate_through_ccz(f, (1, 2, 3))
            worst = max(worst, equal_up_to_phase(ccz @ _frame_dense(f, 3), _frame_dense(g, 3) @ ccz))
        cz = _cz_matrix()
        for bits in iter_bits(4):
            f = fr.ByproductFrame.from_bits(dict(zip((1, 2), bits[:2])), dict(zip((1, 2), bits[2:])))
            g = fr.conjugate_through_cz(f, (1, 2))
            worst = max(worst, equal_up_to_phase(cz @ _frame_dense(f, 2), _frame_dense(g, 2) @ cz))
        for bits in iter_bits(2):
            f = fr.ByproductFrame.from_bits({1: bits[0]}, {1: bits[1]})
            g = fr.conjugate_through_h(f, 1)
            worst = max(worst, equal_up_to_phase(H @ _frame_dense(f, 1), _frame_dense(g, 1) @ H))
        return worst <= 1e-14, f"64 CCZ + 16 CZ + 4 H patterns, max deviation {worst:.2e}"

    return _timed(3, "byproduct", 1.0, run)


# ---------------------------------------------------------------- 4


def check_enlargement(n_inputs: int = 20) -> CheckResult:
    def run():
        rng = np.random.default_rng(4)
        worst = 1.0
        for _ in range(n_inputs):
            psi = random_state(3, rng)
            ideal = apply_ccz(psi, 1, 2, 3)
            for bits in iter_bits(4):
                out = protocols.triangle_enlargement(psi, bits).output_state
                worst = min(worst, fidelity(out, ideal))
        return worst >= 1 - FIDELITY_TOL, f"16 branches x {n_inputs} inputs, min fidelity {worst:.15f}"

    return _timed(4, "enlargement", 5.0, run)


# ---------------------------------------------------------------- 5


def _branch_subset(k: int = 128, seed: int = 5) -> list[dict[int, int]]:
    rng = np.random.default_rng(seed)
    picks = sorted(rng.choice(1024, size=k, replace=False).tolist())
    return [{s: (v >> (s - 1)) & 1 for s in protocols.TOFFOLI_MEASURED} for v in picks]


def _min_toffoli_fidelity(inp: StateVector, branches) -> tuple[float, int]:
    ideal = StateVector(3, protocols.dressed_toffoli() @ inp.amps)
    worst, count = 1.0, 0
    for _, run in protocols.iter_toffoli_branches(inp, branches):
        worst = min(worst, fidelity(run.output_state, ideal))
        count += 1
    return worst, count


def check_toffoli(exhaustive: bool = True) -> CheckResult:
    def run():
        pin = protocols.pin_dressing()
        pinned = pin["unitary"] and pin["deviation_from_dressed_toffoli"] <= 1e-12
        # G = D_out . TOFFOLI . D_in with single-qubit D's: locally equivalent by construction
        local = all(op.shape == (2, 2) for op in protocols.TOFFOLI_DRESS_IN + protocols.TOFFOLI_DRESS_OUT)
        subset = _branch_subset()
        basis_branches = None if exhaustive else subset
        jobs = [(StateVector.basis(3, b), basis_branches) for b in range(8)]
        rng = np.random.default_rng(55)
        jobs += [(random_state(3, rng), subset) for _ in range(10)]
        results = parallel_map(lambda job: _min_toffoli_fidelity(*job), jobs)
        worst = min(r[0] for r in results)
        runs = sum(r[1] for r in results)
        ok = pinned and local and worst >= 1 - FIDELITY_TOL
        mode = "exhaustive" if exhaustive else "subset"
        return ok, (
            f"{mode}: {runs} runs, min fidelity {worst:.15f}; "
            f"zero-branch oracle deviation {pin['deviation_from_dressed_toffoli']:.1e}"
        )

    return _timed(5, "toffoli", 120.0 if exhaustive else 5.0, run)


# ---------------------------------------------------------------- 6


def check_bridging() -> CheckResult:
    def run():
        maps = [protocols.branch_map("triangle", s) for s in (0, 1)]
        diagonal = all(np.array_equal(m, np.diag(np.diag(m))) or np.allclose(m, np.diag(np.diag(m)), atol=1e-14) for m in maps)
        ratios = [np.diag(m)[3] / np.diag(m)[0] for m in maps]
        others = [np.diag(m)[1:3] / np.diag(m)[0] for m in maps]
        phase_ok = (
            abs(ratios[0] - 1j) <= 1e-12
            and abs(ratios[1] + 1j) <= 1e-12
            and all(np.allclose(o, 1, atol=1e-12) for o in others)
        )
        cls = protocols.classify_bridge("triangle")
        equiv = cls["equivalent_to_cnot_rz_half_pi"]
        detail = (
            f"diagonal={diagonal}, |11> phase {['%+.0fi' % r.imag for r in ratios]}, "
            f"locally equivalent to CNOT(1xRz(pi/2))CNOT={equiv} "
            f"(equivalent to CNOT(1xRz(pi/4))CNOT={cls['equivalent_to_cnot_rz_quarter_pi']})"
        )
        return diagonal and phase_ok and equiv, detail

    return _timed(6, "bridging", 1.0, run)


# ---------------------------------------------------------------- 7


def check_ideal(n_states: int = 100) -> CheckResult:
    def run():
        u = heff.gate(heff.ideal_params(1.0))
        rng = np.random.default_rng(7)
        worst = 1.0
        for _ in range(n_states):
            psi = random_state(3, rng)
            worst = min(worst, fidelity(StateVector(3, u @ psi.amps), apply_ccz(psi, 1, 2, 3)))
        return worst >= 1 - 1e-12, f"{n_states} random states, min fidelity {worst:.15f}"

    return _timed(7, "ideal", 1.0, run)


# ---------------------------------------------------------------- 8


def fig3_summary() -> dict:
    """Numbers behind the qualitative surface claims, on the default grids."""
    surf = heff.fidelity_surface(which_eps=2)
    taus, eps = surf.tau_grid, surf.eps_grid
    i1 = int(np.flatnonzero(taus == 1.0)[0])
    k0 = int(np.flatnonzero(eps == 0.0)[0])
    at_one = surf.F[i1]
    pos = at_one[k0:]
    neg = at_one[: k0 + 1][::-1]
    early = taus < 1.0
    maxima = {float(e): float(surf.F[early, k].max()) for k, e in enumerate(eps) if e > 0}
    best_eps = max(maxima, key=maxima.get)
    best_k = int(np.flatnonzero(eps == best_eps)[0])
    return {
        "F_ideal": float(surf.F[i1, k0]),
        "nonincreasing": bool(np.all(np.diff(pos) <= 1e-12) and np.all(np.diff(neg) <= 1e-12)),
        "best_eps": best_eps,
        "best_tau": float(taus[early][np.argmax(surf.F[early, best_k])]),
        "best_F_early": maxima[best_eps],
        "early_maxima": maxima,
    }


def check_fig3() -> CheckResult:
    def run():
        s = fig3_summary()
        ok_a = abs(s["F_ideal"] - 1.0) <= 1e-12
        ok_b = s["nonincreasing"]
        ok_c = s["best_F_early"] >= 0.999
        detail = (
            f"(a) F(1,0)={s['F_ideal']:.15f} {ok_a}; (b) non-increasing {ok_b}; "
            f"(c) max F(tau<1)={s['best_F_early']:.12f} at eps2={s['best_eps']:.6f}, tau={s['best_tau']:.2f} {ok_c}"
        )
        return ok_a and ok_b and ok_c, detail

    return _timed(8, "fig3", 10.0, run)


# ---------------------------------------------------------------- 9


def check_regime() -> CheckResult:
    def run():
        m = heff.mott_check(2e3, 120e3, 6)
        lam = heff.lambda_scale_estimate(2e3, 120e3)
        ok = m.valid and abs(m.bound - 0.0287) <= 1e-4 and 0.1 <= lam <= 1.0
        return ok, f"valid={m.valid}, J/U={m.ratio:.4f}, bound={m.bound:.5f}, J^3/U^2={lam:.3f} Hz"

    return _timed(9, "regime", 1e-3, run)


# ---------------------------------------------------------------- 10


def check_resources() -> CheckResult:
    protocols.resource_estimates(3)

    def run():
        ok = True
        for n in range(3, 12):
            r = protocols.resource_estimates(n)
            ok &= r.cluster_qubits_per_toffoli == 65
            ok &= r.compact_qubits_per_toffoli == 13
            ok &= r.three_qubit_search_cluster_qubits == 245
            ok &= r.toffolis_per_nCNOT == (4 * (n - 3) if n > 3 else 1)
        return bool(ok), "65 / 245 / 4(n-3) / 13 for n = 3..11"

    return _timed(10, "resources", 1e-3, run)


# ---------------------------------------------------------------- 11


def check_removal() -> CheckResult:
    def run():
        rng = np.random.default_rng(11)
        worst_one = worst_zero = 0.0
        for _ in range(20):
            pair = random_state(2, rng)
            with_one = kron_states(pair, prepare_product({1: "one"}))
            with_zero = kron_states(pair, prepare_product({1: "zero"}))
            worst_one = max(worst_one, float(np.max(np.abs(apply_ccz(with_one, 1, 2, 3).amps - apply_cz(with_one, 1, 2).amps))))
            worst_zero = max(worst_zero, float(np.max(np.abs(apply_ccz(with_zero, 1, 2, 3).amps - with_zero.amps))))
        resource = apply_ccz(prepare_product({1: "plus", 2: "plus", 3: "plus"}), 1, 2, 3)
        _, s0, _ = measure(resource, 3, "Z", outcome=0)
        _, s1, _ = measure(resource, 3, "Z", outcome=1)
        product0 = is_product(s0, 1) and is_product(s0, 2)
        entangled1 = not is_product(s1, 1) and not is_product(s1, 2)
        ok = worst_one == 0.0 and worst_zero == 0.0 and product0 and entangled1
        return ok, (
            f"|1> -> CZ dev {worst_one:.1e}, |0> -> identity dev {worst_zero:.1e}, "
            f"Z outcome 0 product={product0}, outcome 1 entangled={entangled1}"
        )

    return _timed(11, "removal", 1.0, run)


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "c2p": check_c2p,
    "commutation": check_commutation,
    "byproduct": check_byproduct,
    "enlargement": check_enlargement,
    "toffoli": check_toffoli,
    "bridging": check_bridging,
    "ideal": check_ideal,
    "fig3": check_fig3,
    "regime": check_regime,
    "resources": check_resources,
    "removal": check_removal,
}


def run_checks(only=None, exhaustive: bool = False) -> list[CheckResult]:
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; choose from {sorted(CHECKS)}")
    out = []
    for name in names:
        if name == "toffoli":
            out.append(check_toffoli(exhaustive=exhaustive))
        else:
            out.append(CHECKS[name]())
    return out
