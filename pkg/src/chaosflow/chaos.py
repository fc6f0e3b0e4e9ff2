"""Truncated Ito-Wiener expansions over the discrete Gaussian model.

A random variable with finite second moment is represented as

    alpha = sum_k A_k(xi, ..., xi),      A_k symmetric k-form,

where the evaluation of the degree-k term at a concrete noise vector is the
Wick monomial sum_idx mult(idx) * A_k[idx] * prod_j H_{n_j}(xi_j) with n_j the
multiplicity of coordinate j in the sorted index.  Second moments satisfy
E alpha^2 = sum_k k! |A_k|_k^2 exactly in this finite model.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from . import backend
from .grid import TimeGrid
from .tensors import (
    SymmetricTensor,
    insertion_table,
    lookup,
    multi_indices,
    multiplicities,
    raise_symmetrized,
    table_size,
)

DEFAULT_WICK_TOL = 1e-10


class TruncationError(RuntimeError):
    """An operation would push mass past the truncation degree."""


def hermite(k: int, x):
    """Probabilists' Hermite polynomial H_k with leading coefficient 1.

    Stable three-term recurrence H_{k+1}(x) = x H_k(x) - k H_{k-1}(x).
    """
    if k < 0:
        raise ValueError("order must be >= 0")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if k == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = x.copy()
    for n in range(1, k):
        h, h_prev = x * h - n * h_prev, h
    return h if h.ndim else float(h)


def hermite_table(x: np.ndarray, max_degree: int) -> np.ndarray:
    """H_0..H_max evaluated entrywise; output shape x.shape + (max_degree+1,)."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (max_degree + 1,))
    out[..., 0] = 1.0
    if max_degree >= 1:
        out[..., 1] = x
    for n in range(1, max_degree):
        out[..., n + 1] = x * out[..., n] - n * out[..., n - 1]
    return out


@dataclass(frozen=True)
class ChaosVector:
    """Truncated chaos expansion: coefficient tensors of degrees 0..N."""

    coeffs: tuple[SymmetricTensor, ...]
    grid: TimeGrid | None = None

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("need at least the degree-0 coefficient")
        for k, A in enumerate(self.coeffs):
            if A.degree != k or A.dim != self.dim:
                raise ValueError("coefficients must have degrees 0..N over one dim")

    @property
    def dim(self) -> int:
        return self.coeffs[0].dim

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value: float, dim: int, grid: TimeGrid | None = None) -> "ChaosVector":
        return cls((SymmetricTensor.scalar(value, dim),), grid)

    @classmethod
    def linear(cls, kernel: np.ndarray, grid: TimeGrid | None = None) -> "ChaosVector":
        kernel = np.asarray(kernel, dtype=float)
        return cls(
            (SymmetricTensor.scalar(0.0, len(kernel)), SymmetricTensor.from_vector(kernel)),
            grid,
        )

    @classmethod
    def from_tensors(cls, tensors, grid: TimeGrid | None = None) -> "ChaosVector":
        return cls(tuple(tensors), grid)

    def coeff(self, k: int) -> SymmetricTensor:
        if k <= self.degree:
            return self.coeffs[k]
        return SymmetricTensor.zeros(k, self.dim)

    def expectation(self) -> float:
        return float(self.coeffs[0].values[0])

    def _eval_plan(self):
        plan = getattr(self, "_plan", None)
        if plan is None:
            plan = _build_eval_plan(self)
            object.__setattr__(self, "_plan", plan)
        return plan

    def __call__(self, xi: np.ndarray) -> np.ndarray | float:
        return chaos_eval(self, xi)

    def truncated(self, degree: int) -> "ChaosVector":
        if degree >= self.degree:
            return self
        return ChaosVector(self.coeffs[: degree + 1], self.grid)

    def padded(self, degree: int) -> "ChaosVector":
        if degree <= self.degree:
            return self
        extra = tuple(
            SymmetricTensor.zeros(k, self.dim) for k in range(self.degree + 1, degree + 1)
        )
        return ChaosVector(self.coeffs + extra, self.grid)

    def __add__(self, other: "ChaosVector") -> "ChaosVector":
        n = max(self.degree, other.degree)
        a, b = self.padded(n), other.padded(n)
        return ChaosVector(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), self.grid)

    def __sub__(self, other: "ChaosVector") -> "ChaosVector":
        return self + other * (-1.0)

    def __mul__(self, c: float) -> "ChaosVector":
        return ChaosVector(tuple(A * c for A in self.coeffs), self.grid)

    __rmul__ = __mul__


@dataclass(frozen=True)
class HChaosVector:
    """H-valued expansion: degree-k coefficient carries one free index.

    ``coeffs[k]`` has shape (free_dim, L_k); fixing the free index yields the
    compressed values of a valid SymmetricTensor in the remaining k slots.
    """

    coeffs: tuple[np.ndarray, ...]
    dim: int
    free_dim: int
    grid: TimeGrid | None = None

    def __post_init__(self):
        for k, B in enumerate(self.coeffs):
            if B.shape != (self.free_dim, table_size(k, self.dim)):
                raise ValueError(f"degree-{k} coefficient has wrong shape")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def deterministic(cls, v: np.ndarray, dim: int, grid=None) -> "HChaosVector":
        v = np.asarray(v, dtype=float)
        return cls((v.reshape(-1, 1).copy(),), dim, len(v), grid)

    @classmethod
    def from_components(cls, components, grid=None) -> "HChaosVector":
        """Stack scalar ChaosVectors along a new free index."""
        components = list(components)
        dim = components[0].dim
        n = max(c.degree for c in components)
        coeffs = []
        for k in range(n + 1):
            coeffs.append(np.stack([c.coeff(k).values for c in components]))
        return cls(tuple(coeffs), dim, len(components), grid)

    def component(self, i: int) -> ChaosVector:
        tensors = [SymmetricTensor(k, self.dim, B[i].copy()) for k, B in enumerate(self.coeffs)]
        return ChaosVector(tuple(tensors), self.grid)

    def moment2(self) -> float:
        """E |x|^2 = sum_k k! |B_k|^2 with the free index as an extra
        Euclidean index in the Frobenius norm."""
        total = 0.0
        for k, B in enumerate(self.coeffs):
            mult = multiplicities(k, self.dim)
            total += factorial(k) * float(np.sum(mult * B**2))
        return total

    def eval(self, xi: np.ndarray) -> np.ndarray:
        """Componentwise evaluation; returns shape (..., free_dim)."""
        vals = [chaos_eval(self.component(i), xi) for i in range(self.free_dim)]
        return np.stack(vals, axis=-1)

    def map_free(self, M: np.ndarray) -> "HChaosVector":
        """Apply a matrix to the free index of every coefficient."""
        M = np.asarray(M, dtype=float)
        return HChaosVector(tuple(M @ B for B in self.coeffs), self.dim, M.shape[0], self.grid)

    def map_slots(self, C: np.ndarray) -> "HChaosVector":
        """Contract every symmetric slot (not the free index) against C."""
        out = []
        for k, B in enumerate(self.coeffs):
            if k == 0:
                out.append(B.copy())
                continue
            rows = [SymmetricTensor(k, self.dim, B[i]).map_slots(C).values
                    for i in range(self.free_dim)]
            out.append(np.stack(rows))
        return HChaosVector(tuple(out), self.dim, self.free_dim, self.grid)

    def __add__(self, other: "HChaosVector") -> "HChaosVector":
        if (self.dim, self.free_dim) != (other.dim, other.free_dim):
            raise ValueError("shape mismatch")
        n = max(self.degree, other.degree)
        coeffs = []
        for k in range(n + 1):
            zero = np.zeros((self.free_dim, table_size(k, self.dim)))
            a = self.coeffs[k] if k <= self.degree else zero
            b = other.coeffs[k] if k <= other.degree else zero
            coeffs.append(a + b)
        return HChaosVector(tuple(coeffs), self.dim, self.free_dim, self.grid)

    def __mul__(self, c: float) -> "HChaosVector":
        return HChaosVector(tuple(B * c for B in self.coeffs), self.dim, self.free_dim, self.grid)

    __rmul__ = __mul__


def _build_eval_plan(c: ChaosVector):
    """Flatten (cell, multiplicity-count) runs of every multi-index for the
    evaluation kernels."""
    offsets = [0]
    cells: list[int] = []
    counts: list[int] = []
    weights: list[float] = []
    for k in range(c.degree + 1):
        idx = multi_indices(k, c.dim)
        mult = multiplicities(k, c.dim)
        vals = c.coeffs[k].values
        for row, m_, v in zip(idx, mult, vals):
            if v == 0.0:
                continue
            cnt = Counter(row.tolist())
            for cell, count in sorted(cnt.items()):
                cells.append(cell)
                counts.append(count)
            offsets.append(len(cells))
            weights.append(m_ * v)
    return (
        np.asarray(offsets, dtype=np.int64),
        np.asarray(cells, dtype=np.int64),
        np.asarray(counts, dtype=np.int64),
        np.asarray(weights, dtype=float),
    )


def chaos_eval(c: ChaosVector, xi: np.ndarray):
    """Evaluate the discrete multiple Wiener integral at a noise vector.

    ``xi`` may be a single vector (m,) or a batch (n, m).
    """
    xi = np.asarray(xi, dtype=float)
    single = xi.ndim == 1
    batch = xi[None, :] if single else xi
    if batch.shape[1] != c.dim:
        raise ValueError(f"noise dimension {batch.shape[1]} != chaos dimension {c.dim}")
    herm = hermite_table(batch, c.degree)  # (n, m, N+1)
    out = backend.eval_plan(herm, *c._eval_plan())
    return float(out[0]) if single else out


def moment2(c: ChaosVector) -> float:
    """E alpha^2 = sum_k k! |A_k|_k^2 (exact on the discrete model)."""
    return sum(factorial(k) * A.norm2() for k, A in enumerate(c.coeffs))


def expect_product(a: ChaosVector, b: ChaosVector) -> float:
    """E[a*b] = sum_k k! <A_k, B_k> by orthogonality of the chaoses."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    n = min(a.degree, b.degree)
    return sum(factorial(k) * a.coeffs[k].inner(b.coeffs[k]) for k in range(n + 1))


def wick_tail_bound(phi_norm2: float, degree: int) -> float:
    """e^{|phi|^2} * sum_{k>degree} |phi|^{2k} / k!"""
    tail = 0.0
    term = phi_norm2 ** (degree + 1) / factorial(degree + 1)
    k = degree + 1
    while term > 1e-300 and k < degree + 400:
        tail += term
        k += 1
        term *= phi_norm2 / k
    return float(np.exp(phi_norm2) * tail)


def wick_degree_for(phi_norm2: float, tol: float = DEFAULT_WICK_TOL, max_degree: int = 60) -> int:
    for n in range(max_degree + 1):
        if wick_tail_bound(phi_norm2, n) < tol:
            return n
    raise TruncationError(f"Wick tail bound {tol} unreachable below degree {max_degree}")


def wick_exp(
    phi: np.ndarray,
    degree: int | None = None,
    tol: float = DEFAULT_WICK_TOL,
    grid: TimeGrid | None = None,
) -> ChaosVector:
    """Wick exponent exp{(phi, xi) - |phi|^2/2}: coefficients phi^{(x)k}/k!.

    The truncation degree must satisfy the quantified tail bound
    e^{|phi|^2} sum_{k>N} |phi|^{2k}/k! < tol; raises TruncationError otherwise.
    """
    phi = np.asarray(phi, dtype=float)
    n2 = float(phi @ phi)
    if degree is None:
        degree = wick_degree_for(n2, tol)
    elif wick_tail_bound(n2, degree) >= tol:
        raise TruncationError(
            f"degree {degree} leaves Wick tail {wick_tail_bound(n2, degree):.3e} >= {tol}"
        )
    tensors = [SymmetricTensor.outer_power(phi, k) * (1.0 / factorial(k)) for k in range(degree + 1)]
    return ChaosVector(tuple(tensors), grid)


def pair_wick(c: ChaosVector, phi: np.ndarray) -> float:
    """sum_k A_k(phi, ..., phi) = E[alpha * WickExp(phi)] (the S-transform)."""
    phi = np.asarray(phi, dtype=float)
    return sum(A.apply_form(phi) for A in c.coeffs)


def stoch_derivative(c: ChaosVector) -> HChaosVector:
    """D alpha: degree-k output coefficient (free index s) is (k+1) A_{k+1}(s, .)."""
    out = []
    for k in range(max(c.degree, 1)):
        if k + 1 > c.degree:
            break
        ins = insertion_table(k + 1, c.dim)
        out.append((k + 1) * c.coeffs[k + 1].values[ins])
    if not out:
        out = [np.zeros((c.dim, 1))]
    return HChaosVector(tuple(out), c.dim, c.dim, c.grid)


def skorokhod(x: HChaosVector, max_degree: int | None = None) -> ChaosVector:
    """Extended stochastic integral: degree-(k+1) coefficient is Lambda B_k.

    The free index must range over the noise coordinates (free_dim == dim).
    """
    if x.free_dim != x.dim:
        raise ValueError("integrand free index must match the noise dimension")
    tensors = [SymmetricTensor.scalar(0.0, x.dim)]
    for k, B in enumerate(x.coeffs):
        tensors.append(raise_symmetrized(B, x.dim))
    if max_degree is not None and len(tensors) - 1 > max_degree:
        for t in tensors[max_degree + 1 :]:
            if np.any(t.values):
                raise TruncationError(
                    f"integrand degree {x.degree} would exceed truncation {max_degree}"
                )
        tensors = tensors[: max_degree + 1]
    return ChaosVector(tuple(tensors), x.grid)


def derivative_pairing(c: ChaosVector, h: np.ndarray) -> ChaosVector:
    """(D alpha, h): contract the stochastic derivative's free index with h."""
    h = np.asarray(h, dtype=float)
    d = stoch_derivative(c)
    tensors = [SymmetricTensor(k, c.dim, h @ B) for k, B in enumerate(d.coeffs)]
    return ChaosVector(tuple(tensors), c.grid)


def _hermite_product_1d(a: int, b: int):
    """H_a * H_b = sum_r r! C(a,r) C(b,r) H_{a+b-2r} (probabilists')."""
    return [(a + b - 2 * r, factorial(r) * comb(a, r) * comb(b, r)) for r in range(min(a, b) + 1)]


def _monomials(c: ChaosVector) -> dict:
    """Map sorted index tuple -> coefficient of prod_j H_{n_j}(xi_j)."""
    out: dict = {}
    for k in range(c.degree + 1):
        idx = multi_indices(k, c.dim)
        mult = multiplicities(k, c.dim)
        vals = c.coeffs[k].values
        for row, m_, v in zip(idx, mult, vals):
            if v != 0.0:
                out[tuple(row.tolist())] = m_ * v
    return out


def chaos_mul(a: ChaosVector, b: ChaosVector, max_degree: int | None = None) -> ChaosVector:
    """Exact product of two chaos expansions (per-coordinate Hermite algebra).

    Intended for symbolic identities on small models; cost grows with the
    number of nonzero coefficients on both sides.
    """
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    dim = a.dim
    acc: dict = defaultdict(float)
    mono_b = list(_monomials(b).items())
    for alpha, ca in _monomials(a).items():
        ka = Counter(alpha)
        for beta, cb in mono_b:
            kb = Counter(beta)
            parts = [((), ca * cb)]
            for cell in sorted(set(ka) | set(kb)):
                na, nb = ka.get(cell, 0), kb.get(cell, 0)
                expl = _hermite_product_1d(na, nb)
                parts = [
                    (key + (cell,) * deg, w * coef) for key, w in parts for deg, coef in expl
                ]
            for key, w in parts:
                acc[tuple(sorted(key))] += w
    top = max((len(k) for k in acc), default=0)
    if max_degree is not None and top > max_degree:
        if any(abs(v) > 1e-300 for k, v in acc.items() if len(k) > max_degree):
            raise TruncationError(f"product degree {top} exceeds truncation {max_degree}")
        top = max_degree
    arrays = [np.zeros(table_size(k, dim)) for k in range(top + 1)]
    mults = [multiplicities(k, dim) for k in range(top + 1)]
    for key, w in acc.items():
        k = len(key)
        if k > top or w == 0.0:
            continue
        pos = int(lookup(np.array([key], dtype=np.int64), k, dim)[0])
        arrays[k][pos] += w / mults[k][pos]
    tensors = [SymmetricTensor(k, dim, arr) for k, arr in enumerate(arrays)]
    return ChaosVector(tuple(tensors), a.grid)


def refine_chaos(c: ChaosVector, factor: int, grid: TimeGrid | None = None) -> ChaosVector:
    """Prolong a chaos vector to a grid refined by an integer factor.

    Each indicator basis cell splits into ``factor`` children with coordinate
    weight factor^{-1/2} per tensor slot; second moments are preserved.
    """
    dim_f = c.dim * factor
    tensors = []
    for k in range(c.degree + 1):
        idx_f = multi_indices(k, dim_f)
        parent = idx_f // factor  # still sorted rowwise
        pos = lookup(parent, k, c.dim) if k else np.zeros(1, dtype=np.int64)
        vals = c.coeffs[k].values[pos] * factor ** (-k / 2)
        tensors.append(SymmetricTensor(k, dim_f, vals))
    new_grid = grid
    if new_grid is None and c.grid is not None:
        new_grid = c.grid.refine(factor)
    return ChaosVector(tuple(tensors), new_grid)


def gaussian_function_chaos(
    g,
    e: np.ndarray,
    degree: int,
    quad_order: int = 80,
    grid: TimeGrid | None = None,
) -> ChaosVector:
    """Chaos expansion of g((e, xi)) for a unit vector e.

    Coefficients a_n e^{(x)n} with a_n = E[g(Z) H_n(Z)]/n!, computed by
    Gauss-Hermite quadrature.
    """
    e = np.asarray(e, dtype=float)
    if abs(e @ e - 1.0) > 1e-10:
        raise ValueError("direction must be a unit vector")
    from .quadrature import gh_nodes

    z, w = gh_nodes(quad_order)
    gz = np.asarray([g(zi) for zi in z], dtype=float)
    herm = hermite_table(z, degree)  # (q, degree+1)
    tensors = []
    for n in range(degree + 1):
        a_n = float(np.sum(w * gz * herm[:, n])) / factorial(n)
        tensors.append(SymmetricTensor.outer_power(e, n) * a_n)
    return ChaosVector(tuple(tensors), grid)
