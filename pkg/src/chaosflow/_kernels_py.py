"""Pure NumPy implementations of the hot evaluation kernels.

Mirrors the arithmetic order of the compiled versions (term-by-term
accumulation, left-to-right run products) so both backends agree to
floating-point roundoff.
"""

from __future__ import annotations

import numpy as np


def eval_plan(herm, offsets, cells, counts, weights):
    """Accumulate sum_i w_i * prod_r herm[:, cells[r], counts[r]].

    herm: (n, m, N+1) Hermite table; the remaining arrays encode the runs of
    each multi-index (see chaos._build_eval_plan).
    """
    n = herm.shape[0]
    out = np.zeros(n)
    for i in range(len(weights)):
        lo, hi = offsets[i], offsets[i + 1]
        term = np.full(n, weights[i])
        for r in range(lo, hi):
            term *= herm[:, cells[r], counts[r]]
        out += term
    return out
