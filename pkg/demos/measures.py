"""How much superposition do familiar qubit channels carry?

Prints the l1 and relative-entropy measures in both qubit reference bases
for a few channels, then the maximally superposed unitary of each basis.
"""
import numpy as np

from chansup import Channel, max_superposed, measure_l1, measure_rel_entropy, non_unitary_basis, schwinger_basis, to_choi
from chansup.protocols import HADAMARD, SX, SY, SZ

channels = {
    "identity": Channel.unitary(np.eye(2)),
    "hadamard": Channel.unitary(HADAMARD),
    "pauli mix": Channel(np.stack([np.eye(2), SX, SY, SZ]) / 2),
    "dephasing": Channel(np.stack([np.diag([1.0, 0]), np.diag([0, 1.0])])),
}

for make in (non_unitary_basis, schwinger_basis):
    b = make(2)
    print(f"basis {b.kind}")
    for name, ch in {**channels, "U_max": max_superposed(b)}.items():
        c = to_choi(ch)
        print(f"  {name:10s} l1={measure_l1(c, b).value:.6f} relent={measure_rel_entropy(c, b).value:.6f}")
