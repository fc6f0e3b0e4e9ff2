"""Gauss-Hermite expectation oracles for the standard normal model."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_QUAD_DIM = 4


@lru_cache(maxsize=None)
def gh_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights with E f(Z) ~= sum w_i f(z_i), Z ~ N(0,1).

    Exact for polynomials of degree <= 2*order - 1.
    """
    z, w = np.polynomial.hermite_e.hermegauss(order)
    return z, w / np.sqrt(2.0 * np.pi)


def gh_expect(f, dim: int, order: int) -> float:
    """Tensor-product quadrature of E f(xi) for xi ~ N(0, I_dim).

    ``f`` must accept a batch (n, dim) and return (n,).  Cost is order**dim;
    dimensions above MAX_QUAD_DIM are refused.
    """
    if dim > MAX_QUAD_DIM:
        raise ValueError(f"gh_expect limited to dim <= {MAX_QUAD_DIM} (cost order**dim)")
    z, w = gh_nodes(order)
    grids = np.meshgrid(*([z] * dim), indexing="ij")
    nodes = np.stack([g.reshape(-1) for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    weights = np.prod(np.stack([g.reshape(-1) for g in wgrids], axis=1), axis=1)
    vals = np.asarray(f(nodes), dtype=float)
    return float(weights @ vals)
