"""Bi-parameter Haar analysis, block bases and factorization of the identity.

The heavy lifting lives in the compiled extension ``hpq._hpq``; this package
re-exports its public surface.
"""

from ._hpq import (
    BlockFamily,
    Operator,
    __version__,
    build_blocks,
    capon_check_json,
    factor,
    fredholm,
    gen_test_operator,
    mixed_norm,
    ordering_index,
    rectangle_at,
    rectangle_count,
)

__all__ = [
    "BlockFamily",
    "Operator",
    "__version__",
    "build_blocks",
    "capon_check_json",
    "factor",
    "fredholm",
    "gen_test_operator",
    "mixed_norm",
    "ordering_index",
    "rectangle_at",
    "rectangle_count",
]
