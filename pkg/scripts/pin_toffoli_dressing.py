"""Derive the Toffoli network's single-qubit dressing from the Choi oracle.

Builds the uncorrected all-zero branch map of the 13-qubit network with three
reference qubits, then searches products of {1, H} on each wire for D_in,
D_out such that the map equals D_out . TOFFOLI . D_in up to global phase.
"""

import itertools

import numpy as np

from bowtie_mbqc import protocols as pr
from bowtie_mbqc.qcore import H, I2, equal_up_to_phase, kron_local


def main():
    branch = pr.toffoli_branch_map([0] * 10)
    branch = branch / np.linalg.norm(branch[:, 0])
    toff = pr.toffoli_matrix()
    hits = []
    for din in itertools.product((I2, H), repeat=3):
        for dout in itertools.product((I2, H), repeat=3):
            g = kron_local(list(dout)) @ toff @ kron_local(list(din))
            dev = equal_up_to_phase(g, branch)
            if dev < 1e-12:
                name = lambda ops: "".join("H" if o is H else "1" for o in ops)  # noqa: E731
                hits.append((name(din), name(dout), dev))
    for din, dout, dev in hits:
        print(f"D_in = {din}  D_out = {dout}  deviation {dev:.2e}")
    print("pinned:", pr.pin_dressing())


if __name__ == "__main__":
    main()
