"""Branch maps and local-equivalence class of the two bridging gadgets."""

import math

import numpy as np

from bowtie_mbqc import protocols as pr


def main():
    np.set_printoptions(precision=4, suppress=True)
    for topology in ("triangle", "bowtie"):
        print(f"== {topology}")
        for s in (0, 1):
            m = pr.branch_map(topology, s)
            d = np.diag(m) / np.diag(m)[0]
            print(f"  s={s}: diag / d00 = {d}")
        for key, val in pr.classify_bridge(topology).items():
            print(f"  {key}: {val}")
    for name, angle in (("pi/2", math.pi / 2), ("pi/4", math.pi / 4)):
        g1, g2 = pr.makhlin_invariants(pr.cnot_rz_cnot(angle))
        print(f"CNOT(1 x Rz({name}))CNOT: G1 = {g1.real:.4f}{g1.imag:+.4f}i, G2 = {g2:.4f}")


if __name__ == "__main__":
    main()
