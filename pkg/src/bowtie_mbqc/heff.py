"""Effective three-site spin Hamiltonian of one lattice triangle.

Sites 1, 2, 3 are cyclic (``j + 1`` and ``j + 2`` taken mod 3) and couplings
are uniform in ``j``:

    H = sum_j [ A + l0 Z_j + l1 Z_j Z_{j+1} + l2 (X_j X_{j+1} + Y_j Y_{j+1})
                + l3 Z_j Z_{j+1} Z_{j+2} + l4 (X_j Z_{j+1} X_{j+2} + Y_j Z_{j+1} Y_{j+2}) ]

Every term except the three-body ``Z Z Z`` visits each distinct operator once
in the ``j`` sum; ``Z Z Z`` is visited three times, so its total coefficient is
``3 l3``.

Units: time is the rescaled time ``tau`` (the gate time is 1), so a coupling
equals its accumulated phase per unit ``tau``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from bowtie_mbqc.errors import ConfigurationError
from bowtie_mbqc.qcore import I2, X, Y, Z, StateVector, apply_ccz, kron_local, prepare_product

# Mott-insulator condition U / (z J) >= MOTT_RATIO for unit filling.
MOTT_RATIO = 5.8
PHASE = math.pi / 8

DEFAULT_TAU_GRID = np.arange(101) / 50.0
DEFAULT_EPS_GRID = np.arange(-20, 21) * (math.pi / 160)


@dataclass(frozen=True)
class HeffParams:
    lambda0: float = 0.0
    lambda1: float = 0.0
    lambda2: float = 0.0
    lambda3: float = 0.0
    lambda4: float = 0.0
    A: float = 0.0
    epsilon0: float = 0.0
    epsilon1: float = 0.0
    epsilon2: float = 0.0
    epsilon3: float = 0.0
    epsilon4: float = 0.0
    tau: float = 1.0

    def couplings(self) -> tuple[float, ...]:
        """Perturbed per-``j`` couplings ``lambda_i + epsilon_i``."""
        return tuple(getattr(self, f"lambda{i}") + getattr(self, f"epsilon{i}") for i in range(5))

    def with_epsilon(self, which: int, value: float) -> "HeffParams":
        if which not in range(5):
            raise ConfigurationError(f"epsilon index must be 0..4, got {which}")
        return replace(self, **{f"epsilon{which}": float(value)})


def _op(*factors) -> np.ndarray:
    """``factors`` are (site, matrix) pairs on the 3-site register."""
    ops = [I2, I2, I2]
    for site, m in factors:
        ops[site - 1] = m
    return kron_local(ops)


def _cyc(j: int, k: int) -> int:
    return (j - 1 + k) % 3 + 1


def _terms() -> list[np.ndarray]:
    zs, zz, xy, zzz, xzx = (np.zeros((8, 8), dtype=complex) for _ in range(5))
    for j in (1, 2, 3):
        j1, j2 = _cyc(j, 1), _cyc(j, 2)
        zs += _op((j, Z))
        zz += _op((j, Z), (j1, Z))
        xy += _op((j, X), (j1, X)) + _op((j, Y), (j1, Y))
        zzz += _op((j, Z), (j1, Z), (j2, Z))
        xzx += _op((j, X), (j1, Z), (j2, X)) + _op((j, Y), (j1, Z), (j2, Y))
    return [zs, zz, xy, zzz, xzx]


_TERMS = _terms()


def build_heff(p: HeffParams) -> np.ndarray:
    """8x8 Hermitian matrix of the (perturbed) effective Hamiltonian."""
    h = 3 * p.A * np.eye(8, dtype=complex)
    for lam, term in zip(p.couplings(), _TERMS):
        h = h + lam * term
    return h


def total_z() -> np.ndarray:
    return _TERMS[0].copy()


def evolve(h: np.ndarray, t: float, psi0: StateVector) -> StateVector:
    """``exp(-i h t) psi0`` by spectral decomposition."""
    h = np.asarray(h, dtype=complex)
    if not np.allclose(h, h.conj().T, atol=1e-10, rtol=0):
        raise ValueError("Hamiltonian is not Hermitian")
    return StateVector(psi0.n_qubits, propagator(h, t) @ psi0.amps)


def propagator(h: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def ideal_params(tau: float = 1.0) -> HeffParams:
    """Couplings whose phases accumulate to ``Lambda_0 = Lambda_3 = -Lambda_1 = (pi/8) tau``.

    ``lambda3`` carries a factor 1/3 for the triple-counted three-body term.
    """
    if tau < 0:
        raise ConfigurationError("tau must be non-negative")
    return HeffParams(lambda0=PHASE, lambda1=-PHASE, lambda3=PHASE / 3, tau=float(tau))


def gate(p: HeffParams) -> np.ndarray:
    """Evolution operator over ``p.tau``."""
    return propagator(build_heff(p), p.tau)


def default_input() -> StateVector:
    """Uniform superposition, every amplitude ``1 / (2 sqrt 2)``."""
    return prepare_product({1: "plus", 2: "plus", 3: "plus"})


@dataclass(frozen=True)
class FidelitySurface:
    tau_grid: np.ndarray = field(repr=False)
    eps_grid: np.ndarray = field(repr=False)
    which_eps: int = 2
    F: np.ndarray = field(repr=False, default=None)  # shape (len(tau_grid), len(eps_grid))

    def at(self, tau: float, eps: float) -> float:
        i = int(np.argmin(np.abs(self.tau_grid - tau)))
        k = int(np.argmin(np.abs(self.eps_grid - eps)))
        return float(self.F[i, k])

    def to_csv(self) -> str:
        lines = ["tau,epsilon,fidelity"]
        for i, t in enumerate(self.tau_grid):
            for k, e in enumerate(self.eps_grid):
                lines.append(f"{t:.12g},{e:.12g},{self.F[i, k]:.12f}")
        return "\n".join(lines) + "\n"


def fidelity_surface(
    tau_grid=None,
    eps_grid=None,
    which_eps: int = 2,
    psi0: StateVector | None = None,
) -> FidelitySurface:
    """``F(tau, eps) = |<CCZ psi0| exp(-i H(eps) tau) |psi0>|**2``.

    ``H(eps)`` is the ideal Hamiltonian with only ``epsilon_{which_eps}`` set.
    """
    tau_grid = DEFAULT_TAU_GRID if tau_grid is None else np.asarray(tau_grid, dtype=float)
    eps_grid = DEFAULT_EPS_GRID if eps_grid is None else np.asarray(eps_grid, dtype=float)
    for name, grid in (("tau", tau_grid), ("epsilon", eps_grid)):
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ConfigurationError(f"{name} grid must be non-empty and strictly ascending")
    if which_eps not in range(5):
        raise ConfigurationError(f"epsilon index must be 0..4, got {which_eps}")
    psi0 = default_input() if psi0 is None else psi0
    target = apply_ccz(psi0, 1, 2, 3).amps
    base = ideal_params(1.0)
    F = np.empty((tau_grid.size, eps_grid.size))
    for k, eps in enumerate(eps_grid):
        w, v = np.linalg.eigh(build_heff(base.with_epsilon(which_eps, eps)))
        a = v.conj().T @ psi0.amps
        b = v.conj().T @ target
        # overlap(tau) = sum_m conj(b_m) a_m exp(-i w_m tau)
        amp = np.exp(-1j * np.outer(tau_grid, w)) @ (b.conj() * a)
        F[:, k] = np.abs(amp) ** 2
    return FidelitySurface(tau_grid, eps_grid, which_eps, F)


def lambda_scale_estimate(J: float, U: float) -> float:
    """Order of magnitude ``J**3 / U**2`` of the two- and three-body couplings."""
    if U <= 0:
        raise ConfigurationError("U must be positive")
    return J**3 / U**2


@dataclass(frozen=True)
class MottCheck:
    valid: bool
    ratio: float  # J / U
    bound: float  # largest J / U allowed


def mott_check(J: float, U: float, z: int = 6) -> MottCheck:
    """Unit-filling Mott regime test ``U / (z J) >= 5.8``."""
    if U <= 0:
        raise ConfigurationError("U must be positive")
    if J < 0 or z < 1:
        raise ConfigurationError("need J >= 0 and z >= 1")
    bound = 1.0 / (MOTT_RATIO * z)
    valid = J == 0 or U / (z * J) >= MOTT_RATIO
    return MottCheck(valid, J / U, bound)
