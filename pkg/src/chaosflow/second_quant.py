"""Second quantization Gamma(C) on chaos expansions.

Gamma(C) maps the degree-k coefficient A_k to A_k(C., ..., C.), so that
Gamma(C) WickExp(phi) = WickExp(C^T phi) on the discrete model.  Its
Monte-Carlo form evaluates functionals at eta = sqrt(I - C C^T) xi' + C xi
and averages over xi', which agrees with the coefficient action in
conditional mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chaos import ChaosVector, HChaosVector
from .rng import MCEstimate, mc_accumulate

PSD_TOL = 1e-10
NORM_TOL = 1e-9


class OperatorNormError(ValueError):
    """Operator norm exceeds 1, so Gamma(C) is not defined."""


@dataclass(frozen=True)
class BoundedOp:
    """Operator on the discrete basis; second quantization needs norm <= 1."""

    matrix: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "norm", float(np.linalg.norm(m, 2)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def require_contraction(self):
        if self.norm > 1.0 + NORM_TOL:
            raise OperatorNormError(f"operator norm {self.norm:.6g} > 1")

    def complement_sqrt(self) -> np.ndarray:
        """Symmetric PSD square root of I - C C^T.

        Eigenvalues in [-1e-12, 0) are clamped to zero; anything below the
        PSD tolerance is an error.
        """
        cached = getattr(self, "_comp_sqrt", None)
        if cached is not None:
            return cached
        m = np.eye(self.dim) - self.matrix @ self.matrix.T
        vals, vecs = np.linalg.eigh(m)
        if vals.min() < -PSD_TOL:
            raise OperatorNormError(f"I - CC^T has eigenvalue {vals.min():.3e} < -{PSD_TOL}")
        vals = np.clip(vals, 0.0, None)
        root = (vecs * np.sqrt(vals)) @ vecs.T
        object.__setattr__(self, "_comp_sqrt", root)
        return root


def identity_op(dim: int) -> BoundedOp:
    return BoundedOp(np.eye(dim))


def ou_operator(t: float, dim: int) -> BoundedOp:
    """Ornstein-Uhlenbeck semigroup generator: C = e^{-t} I.

    Gamma(C) scales the degree-k coefficient by e^{-kt}; at t = log(2)/2 the
    factor is 2^{-k/2}.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    return BoundedOp(np.exp(-t) * np.eye(dim))


def projector_op(e: np.ndarray) -> BoundedOp:
    """Rank-one projector e (x) e; Gamma of it conditions on (e, xi)."""
    e = np.asarray(e, dtype=float)
    if abs(e @ e - 1.0) > 1e-10:
        raise ValueError("projector direction must be a unit vector")
    return BoundedOp(np.outer(e, e))


def gamma_apply(C: BoundedOp, c: ChaosVector) -> ChaosVector:
    """Gamma(C) alpha: contract every tensor slot against C (degree-preserving)."""
    C.require_contraction()
    if C.dim != c.dim:
        raise ValueError("dimension mismatch")
    return ChaosVector(tuple(A.map_slots(C.matrix) for A in c.coeffs), c.grid)


def gamma_apply_h(C: BoundedOp, x: HChaosVector) -> HChaosVector:
    """Gamma(C) on an H-valued expansion (slots contracted, free index kept)."""
    C.require_contraction()
    return x.map_slots(C.matrix)


def gamma_mc(C: BoundedOp, F, xi: np.ndarray, n: int, seed: int) -> MCEstimate:
    """Monte-Carlo Gamma(C)F at the noise point xi.

    Averages F(sqrt(I - CC^T) xi' + C xi) over n fresh standard normals xi';
    F maps a (chunk, m) batch to (chunk,).
    """
    C.require_contraction()
    xi = np.asarray(xi, dtype=float)
    root = C.complement_sqrt()
    base = C.matrix @ xi

    def g(z):
        return F(z @ root.T + base)

    return mc_accumulate(g, seed=seed, n=n, dim=C.dim)


@dataclass(frozen=True)
class ParticleMeasure:
    """Weighted atoms approximating a random probability measure."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.atoms):
            raise ValueError("weights must align with atoms")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")

    def pair(self, f) -> float:
        """Integral of f against the measure."""
        return float(self.weights @ np.asarray(f(self.atoms), dtype=float))

    def mean(self) -> float:
        return float(self.weights @ self.atoms)


def random_measure(C: BoundedOp, X, xi: np.ndarray, n: int, seed: int) -> ParticleMeasure:
    """Particle form of the random measure of Corollary-type conditioning.

    Atoms are X(eta_i) for the eta draws of gamma_mc, with equal weights;
    pairing with a bounded f is then the gamma_mc estimate of Gamma(C) f(X).
    """
    from .rng import chunk_generator, chunk_sizes

    C.require_contraction()
    xi = np.asarray(xi, dtype=float)
    root = C.complement_sqrt()
    base = C.matrix @ xi
    parts = []
    for i, sz in enumerate(chunk_sizes(n)):
        z = chunk_generator(seed, i).standard_normal((sz, C.dim))
        parts.append(np.asarray(X(z @ root.T + base), dtype=float))
    atoms = np.concatenate(parts)
    return ParticleMeasure(atoms=atoms, weights=np.full(n, 1.0 / n))
