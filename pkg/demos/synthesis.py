"""Turn the maximal resource into an arbitrary channel with free operations.

A random qubit channel is synthesized from C_max; the super-operation is
checked for freeness and completeness, then a random super-operation is
run through the teleportation construction on a random channel input.
"""
import numpy as np

from chansup import SuperOp, apply_superop, check_sfso, primed_basis, schwinger_basis, synthesize_channel_from_umax, to_choi
from chansup.sampling import default_rng, random_channel
from chansup.superops import implement_superop_general, trace_ancillas, umax_choi

rng = default_rng()
pb = primed_basis(schwinger_basis(2))

target = random_channel(2, rng, 2)
s = synthesize_channel_from_umax(target, pb)
err = np.linalg.norm(apply_superop(s, umax_choi(pb)) - to_choi(target))
print(f"synthesis: {len(s)} elements, free={check_sfso(s, pb).is_free}, "
      f"completeness={s.completeness_residual():.2e}, error={err:.2e}")

q, _ = np.linalg.qr(rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4)))
omega = SuperOp(q.reshape(2, 4, 4))
tele, res = implement_superop_general(omega, pb)
c = to_choi(random_channel(2, rng))
out = trace_ancillas(apply_superop(tele, np.kron(c, res.state)), 4)
print(f"teleportation: {len(tele)} elements, error={np.linalg.norm(out - apply_superop(omega, c)):.2e}")
