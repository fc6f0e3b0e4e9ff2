"""Dense symmetric tensors stored by sorted multi-index.

A degree-k symmetric tensor over R^m keeps one value per sorted multi-index
(i_1 <= ... <= i_k).  The full tensor entry at any permutation of the index
equals that value; norms and contractions therefore carry the multinomial
multiplicity k!/prod(counts!) of each sorted index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial

import numpy as np

# Guard for operations that materialize the full m**k tensor.
MAX_FULL_SIZE = 20_000_000


def table_size(degree: int, dim: int) -> int:
    return comb(dim + degree - 1, degree)


@lru_cache(maxsize=None)
def multi_indices(degree: int, dim: int) -> np.ndarray:
    """All sorted multi-indices of the given degree, lexicographic, (L, degree)."""
    if degree == 0:
        return np.zeros((1, 0), dtype=np.int64)
    out = np.array(list(combinations_with_replacement(range(dim), degree)), dtype=np.int64)
    return out


@lru_cache(maxsize=None)
def multiplicities(degree: int, dim: int) -> np.ndarray:
    """Number of distinct permutations of each sorted multi-index."""
    idx = multi_indices(degree, dim)
    out = np.empty(len(idx), dtype=float)
    for r, row in enumerate(idx):
        counts = np.bincount(row, minlength=dim)
        denom = 1
        for c in counts:
            denom *= factorial(int(c))
        out[r] = factorial(degree) / denom
    return out


def _encode(idx: np.ndarray, degree: int, dim: int) -> np.ndarray:
    """Integer key of each sorted multi-index (rows of ``idx``).

    The leading position is most significant, so lexicographic row order
    maps to ascending keys (required by the searchsorted lookups).
    """
    if degree == 0:
        return np.zeros(len(idx), dtype=np.int64)
    weights = dim ** np.arange(degree - 1, -1, -1, dtype=np.int64)
    return idx @ weights


@lru_cache(maxsize=None)
def _keys(degree: int, dim: int) -> np.ndarray:
    return _encode(multi_indices(degree, dim), degree, dim)


def lookup(idx: np.ndarray, degree: int, dim: int) -> np.ndarray:
    """Positions of sorted multi-indices (rows) in the canonical table."""
    keys = _keys(degree, dim)
    pos = np.searchsorted(keys, _encode(np.asarray(idx, dtype=np.int64), degree, dim))
    return pos


@lru_cache(maxsize=None)
def insertion_table(degree: int, dim: int) -> np.ndarray:
    """(dim, L_{degree-1}) positions in the degree table of sorted(J + (j,)).

    Row j maps each degree-1-lower index J to the index obtained by inserting
    cell j.  Shared by vector contraction, the stochastic derivative and the
    symmetrizing raise.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    low = multi_indices(degree - 1, dim)
    out = np.empty((dim, len(low)), dtype=np.int64)
    for j in range(dim):
        ext = np.concatenate([low, np.full((len(low), 1), j, dtype=np.int64)], axis=1)
        ext.sort(axis=1)
        out[j] = lookup(ext, degree, dim)
    return out


@lru_cache(maxsize=None)
def occurrence_plus_one(degree: int, dim: int) -> np.ndarray:
    """(dim, L_{degree-1}) with entry [j, J] = (#occurrences of j in J) + 1."""
    low = multi_indices(degree - 1, dim)
    out = np.empty((dim, len(low)), dtype=float)
    for j in range(dim):
        out[j] = (low == j).sum(axis=1) + 1
    return out


@lru_cache(maxsize=None)
def full_to_compressed(degree: int, dim: int) -> np.ndarray:
    """Flat map from positions of the full m**k tensor to compressed indices."""
    if dim**degree > MAX_FULL_SIZE:
        raise ValueError(f"full tensor of degree {degree} over dim {dim} too large")
    if degree == 0:
        return np.zeros(1, dtype=np.int64)
    grids = np.indices((dim,) * degree).reshape(degree, -1).T
    grids = np.sort(grids, axis=1)
    return lookup(grids, degree, dim)


@dataclass(frozen=True)
class SymmetricTensor:
    """Symmetric k-linear form over R^dim, compressed storage."""

    degree: int
    dim: int
    values: np.ndarray

    def __post_init__(self):
        expected = table_size(self.degree, self.dim)
        if self.values.shape != (expected,):
            raise ValueError(f"values must have shape ({expected},)")

    @classmethod
    def zeros(cls, degree: int, dim: int) -> "SymmetricTensor":
        return cls(degree, dim, np.zeros(table_size(degree, dim)))

    @classmethod
    def scalar(cls, value: float, dim: int) -> "SymmetricTensor":
        return cls(0, dim, np.array([float(value)]))

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "SymmetricTensor":
        v = np.asarray(v, dtype=float)
        return cls(1, len(v), v.copy())

    @classmethod
    def outer_power(cls, v: np.ndarray, degree: int) -> "SymmetricTensor":
        """v^{(x) degree}: value at a sorted index is prod_j v_j^{n_j}."""
        v = np.asarray(v, dtype=float)
        if degree == 0:
            return cls.scalar(1.0, len(v))
        idx = multi_indices(degree, len(v))
        return cls(degree, len(v), np.prod(v[idx], axis=1))

    @classmethod
    def from_full(cls, full: np.ndarray, dim: int | None = None) -> "SymmetricTensor":
        """Read the values at the canonical sorted positions of a full tensor."""
        degree = full.ndim
        if degree == 0:
            if dim is None:
                raise ValueError("dim required for a degree-0 tensor")
            return cls(0, dim, np.array([float(full)]))
        dim = full.shape[0]
        idx = multi_indices(degree, dim)
        flat = np.ravel_multi_index(tuple(idx.T), (dim,) * degree)
        return cls(degree, dim, full.reshape(-1)[flat].astype(float))

    def to_full(self) -> np.ndarray:
        if self.degree == 0:
            return np.array(self.values[0])
        fmap = full_to_compressed(self.degree, self.dim)
        return self.values[fmap].reshape((self.dim,) * self.degree)

    def norm2(self) -> float:
        """Squared Hilbert-Schmidt norm of the full tensor."""
        return float(np.dot(multiplicities(self.degree, self.dim), self.values**2))

    def inner(self, other: "SymmetricTensor") -> float:
        self._check_like(other)
        return float(np.dot(multiplicities(self.degree, self.dim) * self.values, other.values))

    def contract(self, v: np.ndarray) -> "SymmetricTensor":
        """Contract one slot against the vector v (degree drops by one)."""
        if self.degree == 0:
            raise ValueError("cannot contract a scalar")
        ins = insertion_table(self.degree, self.dim)
        return SymmetricTensor(self.degree - 1, self.dim, np.asarray(v, float) @ self.values[ins])

    def apply_form(self, v: np.ndarray) -> float:
        """A(v, ..., v): full contraction against one vector."""
        idx = multi_indices(self.degree, self.dim)
        if self.degree == 0:
            return float(self.values[0])
        powers = np.prod(np.asarray(v, float)[idx], axis=1)
        return float(np.dot(multiplicities(self.degree, self.dim) * self.values, powers))

    def map_slots(self, C: np.ndarray) -> "SymmetricTensor":
        """A(C., ..., C.): contract every slot against the matrix C.

        New full tensor is A'[j...] = sum_i A[i...] prod_l C[i_l, j_l].
        Moderate sizes expand to the full tensor; high degrees use the
        polynomial-substitution route on compressed storage.
        """
        if self.degree == 0:
            return self
        if self.dim**self.degree <= 400_000:
            full = self.to_full()
            for _ in range(self.degree):
                # Contract leading axis with C's first index; the axis cycles to
                # the end, so after `degree` applications the order is restored.
                full = np.tensordot(full, C, axes=([0], [0]))
            return SymmetricTensor.from_full(full)
        return self._map_slots_poly(C)

    def _map_slots_poly(self, C: np.ndarray) -> "SymmetricTensor":
        """Substitute x -> Cx in the generating polynomial A(x, ..., x).

        The compressed values of a symmetric tensor are the coefficients (up
        to multiplicity) of a homogeneous polynomial; contracting every slot
        with C substitutes the linear forms l_i(x) = (Cx)_i.
        """
        k, m = self.degree, self.dim
        mult_in = multiplicities(k, m)
        idx_in = multi_indices(k, m)
        # Powers of each linear form, computed on demand.
        pows: dict[tuple[int, int], np.ndarray] = {}

        def power(i: int, n: int) -> np.ndarray:
            if n == 0:
                return np.ones(1)
            got = pows.get((i, n))
            if got is None:
                got = _poly_mul(power(i, n - 1), n - 1, C[i, :], 1, m)
                pows[(i, n)] = got
            return got

        out = np.zeros(table_size(k, m))
        for row, m_, v in zip(idx_in, mult_in, self.values):
            if v == 0.0:
                continue
            counts = np.bincount(row, minlength=m)
            poly = np.ones(1)
            deg = 0
            for i in range(m):
                n = int(counts[i])
                if n:
                    poly = _poly_mul(poly, deg, power(i, n), n, m)
                    deg += n
            out += (m_ * v) * poly
        return SymmetricTensor(k, m, out / multiplicities(k, m))

    def _check_like(self, other: "SymmetricTensor"):
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise ValueError("tensor shape mismatch")

    def __add__(self, other: "SymmetricTensor") -> "SymmetricTensor":
        self._check_like(other)
        return SymmetricTensor(self.degree, self.dim, self.values + other.values)

    def __sub__(self, other: "SymmetricTensor") -> "SymmetricTensor":
        self._check_like(other)
        return SymmetricTensor(self.degree, self.dim, self.values - other.values)

    def __mul__(self, c: float) -> "SymmetricTensor":
        return SymmetricTensor(self.degree, self.dim, self.values * c)

    __rmul__ = __mul__


def raise_symmetrized(coeff: np.ndarray, dim: int) -> SymmetricTensor:
    """Symmetrize an H-valued form over all slots and return the raised tensor.

    ``coeff`` has shape (dim, L_k): free index first, then the compressed
    symmetric part.  Output degree is k+1 with
    (Lambda B)[K] = (1/(k+1)) * sum_{d distinct in K} count_d(K) * B[d, K - d].
    """
    L = coeff.shape[1]
    # Recover k from L: table_size(k, dim) == L.
    k = 0
    while table_size(k, dim) < L:
        k += 1
    if table_size(k, dim) != L:
        raise ValueError("coefficient shape does not match any degree")
    out_degree = k + 1
    ins = insertion_table(out_degree, dim)
    occ = occurrence_plus_one(out_degree, dim)
    values = np.zeros(table_size(out_degree, dim))
    for j in range(dim):
        np.add.at(values, ins[j], occ[j] * coeff[j])
    values /= out_degree
    return SymmetricTensor(out_degree, dim, values)
