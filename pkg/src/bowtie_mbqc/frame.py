"""Byproduct-operator bookkeeping.

A frame stands for the operator

    op(f) = prod X^x  .  prod Z^z  .  prod CZ^cp

acting on a state right to left: the CZ factors first, then Z, then X.  With
this order, conjugating the frame through any diagonal gate only produces
diagonal factors on the right of the X block, so every propagation rule below
holds as an exact operator identity up to a global sign.

Frames are immutable; each set holds the sites (or sorted site pairs) whose
exponent is 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from bowtie_mbqc.errors import PreconditionError
from bowtie_mbqc.qcore import StateVector, apply_cz, apply_diagonal, _mask_positions, _axis


def _pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"controlled-phase needs two distinct sites, got ({i}, {j})")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class ByproductFrame:
    x: frozenset[int] = field(default_factory=frozenset)
    z: frozenset[int] = field(default_factory=frozenset)
    cp: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    @classmethod
    def from_bits(
        cls,
        x: Mapping[int, int] | None = None,
        z: Mapping[int, int] | None = None,
        cp: Mapping[tuple[int, int], int] | None = None,
    ) -> "ByproductFrame":
        """Build a frame from exponent maps; exponents are reduced mod 2."""
        xs = _odd(x or {})
        zs = _odd(z or {})
        cps: set[tuple[int, int]] = set()
        for (i, j), bit in (cp or {}).items():
            if int(bit) % 2:
                cps ^= {_pair(i, j)}
        return cls(frozenset(xs), frozenset(zs), frozenset(cps))

    def x_exp(self, site: int) -> int:
        return int(site in self.x)

    def z_exp(self, site: int) -> int:
        return int(site in self.z)

    def cp_exp(self, i: int, j: int) -> int:
        return int(_pair(i, j) in self.cp)

    def is_identity(self) -> bool:
        return not (self.x or self.z or self.cp)

    def support(self) -> set[int]:
        sites = set(self.x) | set(self.z)
        for i, j in self.cp:
            sites |= {i, j}
        return sites

    def pauli_part(self) -> "ByproductFrame":
        return ByproductFrame(self.x, self.z)

    def cp_part(self) -> "ByproductFrame":
        return ByproductFrame(cp=self.cp)

    def relabel(self, mapping: Mapping[int, int]) -> "ByproductFrame":
        """Rename sites; sites missing from ``mapping`` keep their label."""
        m = lambda s: mapping.get(s, s)  # noqa: E731
        return ByproductFrame(
            frozenset(m(s) for s in self.x),
            frozenset(m(s) for s in self.z),
            frozenset(_pair(m(i), m(j)) for i, j in self.cp),
        )

    def to_json(self) -> dict:
        return {
            "x": {str(s): 1 for s in sorted(self.x)},
            "z": {str(s): 1 for s in sorted(self.z)},
            "cp": [[i, j, 1] for i, j in sorted(self.cp)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ByproductFrame":
        return cls.from_bits(
            {int(k): v for k, v in data.get("x", {}).items()},
            {int(k): v for k, v in data.get("z", {}).items()},
            {(int(i), int(j)): b for i, j, b in data.get("cp", [])},
        )

    def __str__(self) -> str:
        parts = [f"X{s}" for s in sorted(self.x)] + [f"Z{s}" for s in sorted(self.z)]
        parts += [f"CZ{i},{j}" for i, j in sorted(self.cp)]
        return " ".join(parts) or "I"


def _odd(bits: Mapping[int, int]) -> set[int]:
    return {int(s) for s, b in bits.items() if int(b) % 2}


def identity_frame() -> ByproductFrame:
    return ByproductFrame()


def pauli_x(*sites: int) -> ByproductFrame:
    return ByproductFrame(x=frozenset(sites))


def pauli_z(*sites: int) -> ByproductFrame:
    return ByproductFrame(z=frozenset(sites))


def compose(a: ByproductFrame, b: ByproductFrame) -> ByproductFrame:
    """Frame for ``op(a) . op(b)`` (apply ``b`` first), exact up to global phase.

    Moving the X block of ``b`` left through the CZ block of ``a`` leaves a Z
    on the partner site of every CZ it crosses; those are folded into ``z``.
    """
    z = set(a.z ^ b.z)
    for i, j in a.cp:
        if i in b.x:
            z ^= {j}
        if j in b.x:
            z ^= {i}
    return ByproductFrame(a.x ^ b.x, frozenset(z), a.cp ^ b.cp)


def conjugate_through_ccz(f: ByproductFrame, triple: tuple[int, int, int]) -> ByproductFrame:
    """Frame ``g`` with ``CCZ . op(f) = op(g) . CCZ`` on ``triple``.

    For each role ``j`` with partners ``k, l``: ``z[j] ^= x[k] x[l]`` and
    ``cp[k, l] ^= x[j]``.  X exponents are untouched.
    """
    a1, a2, a3 = triple
    if len({a1, a2, a3}) != 3:
        raise ValueError(f"CCZ needs three distinct sites, got {triple}")
    inside = {_pair(a1, a2), _pair(a1, a3), _pair(a2, a3)}
    if f.cp & inside:
        raise PreconditionError(
            f"pending controlled-phase {sorted(f.cp & inside)} inside {triple} must be cleared first"
        )
    z = set(f.z)
    cp = set(f.cp)
    for j, k, l in ((a1, a2, a3), (a2, a3, a1), (a3, a1, a2)):
        if k in f.x and l in f.x:
            z ^= {j}
        if j in f.x:
            cp ^= {_pair(k, l)}
    return ByproductFrame(f.x, frozenset(z), frozenset(cp))


def conjugate_through_cz(f: ByproductFrame, pair: tuple[int, int]) -> ByproductFrame:
    """Frame ``g`` with ``CZ . op(f) = op(g) . CZ``."""
    i, j = _pair(*pair)
    z = set(f.z)
    if i in f.x:
        z ^= {j}
    if j in f.x:
        z ^= {i}
    return ByproductFrame(f.x, frozenset(z), f.cp)


def conjugate_through_h(f: ByproductFrame, site: int) -> ByproductFrame:
    """Frame ``g`` with ``H . op(f) = op(g) . H`` on ``site`` (swaps its X and Z)."""
    if any(site in p for p in f.cp):
        raise PreconditionError(f"cannot move a controlled-phase on site {site} through a Hadamard")
    x = set(f.x) - {site}
    z = set(f.z) - {site}
    if site in f.z:
        x.add(site)
    if site in f.x:
        z.add(site)
    return ByproductFrame(frozenset(x), frozenset(z), f.cp)


def enlargement_frame(s7: int, s8: int, s9: int, s10: int) -> ByproductFrame:
    """Byproduct left on slots 4, 5, 6 by X-measuring ancillas 7-10 of the enlarged triangle."""
    return ByproductFrame.from_bits(
        z={4: s8, 5: s9, 6: s7 * s10},
        cp={(4, 6): s10, (5, 6): s7},
    )


def apply_frame(state: StateVector, f: ByproductFrame, sites: Mapping[int, int] | None = None) -> StateVector:
    """Apply ``op(f)`` to ``state``: CZ factors, then Z, then X.

    ``sites`` optionally maps frame labels to register qubits.
    """
    m = (lambda s: sites[s]) if sites is not None else (lambda s: s)
    n = state.n_qubits
    for s in f.support():
        _axis(n, m(s))
    out = state
    for i, j in sorted(f.cp):
        out = apply_cz(out, m(i), m(j))
    if f.z:
        signs = np.ones(2**n)
        for s in f.z:
            signs[_mask_positions(n, 1 << (m(s) - 1))] *= -1
        out = apply_diagonal(out, signs)
    if f.x:
        flip = 0
        for s in f.x:
            flip |= 1 << (m(s) - 1)
        out = StateVector(n, out.amps[np.arange(2**n) ^ flip])
    return out


def frame_matrix(f: ByproductFrame, n: int) -> np.ndarray:
    """Dense ``2**n`` matrix of ``op(f)``."""
    from bowtie_mbqc.qcore import operator_of

    return operator_of(lambda st: apply_frame(st, f), n)


def frames_on(sites: Iterable[int]) -> Iterable[ByproductFrame]:
    """Every pure-Pauli frame on ``sites`` (``4**k`` of them)."""
    sites = list(sites)
    k = len(sites)
    for v in range(4**k):
        x = {s for q, s in enumerate(sites) if (v >> q) & 1}
        z = {s for q, s in enumerate(sites) if (v >> (k + q)) & 1}
        yield ByproductFrame(frozenset(x), frozenset(z))
