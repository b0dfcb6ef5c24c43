"""Superposing evolutions and their temporal orders.

Walks through the switch, the Pauli collapse of a random unitary and the
two-party temporal-order protocol that leaves a Bell state behind.
"""
import numpy as np

from chansup.matrix_core import ket, proj
from chansup.protocols import HADAMARD, ID2, PLUS, SZ, collapse_qubit, switch_superpose, temporal_bell, temporal_order
from chansup.sampling import default_rng, random_state, random_unitary

rng = default_rng()
zero = ket(0, 2)

o = switch_superpose(ID2, SZ, PLUS, PLUS, proj(PLUS))
print(f"switch I/Z on |+>: p={o.probability:.3f} post={np.round(o.post_state, 6)}")

v, phi = random_unitary(2, rng), random_state(2, rng)
for b in collapse_qubit(v, phi):
    print(f"collapse {b.label}: p={b.probability:.6f}")

o = temporal_order(HADAMARD, SZ, 0.5, 0.5, zero)
print(f"temporal order HZ/ZH: x={o.probability:.3f} post={np.round(o.post_state, 6)}")

t = temporal_bell(HADAMARD, SZ, HADAMARD, SZ, 0.5, 0.5, zero, zero)
print(f"two parties: entropy={t.entanglement_entropy:.6f} chsh_max={t.chsh_max:.6f}")
