"""Random states, unitaries and channels for property runs.

The default generator is seeded from the ``CHANSUP_SEED`` environment
variable (0 when unset) so every randomized run is reproducible.
"""
from __future__ import annotations

import os
from typing import Optional

import numpy as np

from .bases import BasisSet
from .channels import Channel
from .errors import ContractError

SEED_ENV = "CHANSUP_SEED"


def env_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def default_rng(seed: Optional[int] = None) -> np.random.Generator:
    return np.random.default_rng(env_seed() if seed is None else seed)


def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR decomposition with the phase of ``R`` removed."""
    q, r = np.linalg.qr(ginibre(d, d, rng))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = ginibre(d, 1, rng)[:, 0]
    return v / np.linalg.norm(v)


def random_density(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    g = ginibre(d, rank or d, rng)
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_channel(d: int, rng: np.random.Generator, n_kraus: Optional[int] = None) -> Channel:
    """Trace-preserving channel from a random isometry ``C^d -> C^(n d)``."""
    n = n_kraus or d
    q, _ = np.linalg.qr(ginibre(n * d, d, rng))
    return Channel(q.reshape(n, d, d))


def random_subchannel(d: int, rng: np.random.Generator, n_kraus: Optional[int] = None) -> Channel:
    """Trace-non-increasing channel: a random channel with its Kraus set scaled by ``[0.2, 1)``."""
    ch = random_channel(d, rng, n_kraus)
    return Channel(ch.kraus * np.sqrt(rng.uniform(0.2, 1.0)))


def random_sfo_weights(b: BasisSet, rng: np.random.Generator) -> np.ndarray:
    """Diagonal Choi-basis weights of a random trace-preserving free channel.

    For unitary families any probability vector works. For matrix units
    ``sqrt(d)|i><j|`` trace preservation needs ``sum_i w_ij = 1/d`` for every ``j``.
    """
    d = b.dim
    if b.kind == "schwinger":
        return rng.dirichlet(np.ones(d * d))
    if b.kind == "non_unitary":
        cols = rng.dirichlet(np.ones(d), size=d).T / d  # cols[i, j], sums over i are 1/d
        return cols.reshape(-1)
    raise ContractError("random free channels need a canonical basis family")


def random_sfo(b: BasisSet, rng: np.random.Generator) -> Channel:
    w = random_sfo_weights(b, rng)
    keep = w > 0
    return Channel(np.sqrt(w[keep])[:, None, None] * b.ops[keep])


def random_sfso_elements(vecs: np.ndarray, rng: np.random.Generator, n_elements: int = 3) -> np.ndarray:
    """Elements ``S_n = sum_i a_ni |v_(pi_n(i))><v_i|``, ``pi_n`` permutations, ``sum_n |a_ni|^2 = 1``.

    ``vecs`` holds the free basis states as columns. Each element sends every
    free basis state to a multiple of another one, so the strict freeness
    condition holds, and the column normalization makes the elements complete.
    """
    dim = vecs.shape[1]
    amps = ginibre(n_elements, dim, rng)
    amps /= np.linalg.norm(amps, axis=0)
    out = np.zeros((n_elements, vecs.shape[0], vecs.shape[0]), dtype=complex)
    for n in range(n_elements):
        perm = rng.permutation(dim)
        out[n] = (vecs[:, perm] * amps[n]) @ vecs.conj().T
    return out
