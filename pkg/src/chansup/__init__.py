"""Coherent superposition of quantum operations.

Reference operator bases, Choi-matrix channels, superposition-free
operations and super-operations, the l1 and relative-entropy measures,
maximally superposed resources, and exact simulations of switch,
collapse, temporal-order and bipartite protocols.
"""
from .bases import (
    BasisSet,
    ChoiBasis,
    canonical_basis,
    choi_basis,
    convert_basis,
    custom_basis,
    non_unitary_basis,
    schwinger_basis,
)
from .bipartite import BipartiteChannel, ClassLabel, classify, correlation_witness, gamma_state
from .channels import (
    Channel,
    apply_choi,
    from_choi,
    process_matrix,
    to_choi,
    validate,
    validate_choi,
)
from .errors import *  # noqa: F401,F403
from .superops import (
    SuperOp,
    apply_superop,
    check_sfso,
    implement_superop_general,
    implement_superop_unitary,
    synthesize_channel_from_umax,
)
from .superposition import (
    dephase,
    is_superposition_free,
    max_superposed,
    measure_l1,
    measure_rel_entropy,
    primed_basis,
)

__version__ = "0.1.0"
