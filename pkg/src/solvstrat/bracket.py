"""Skew-symmetric bilinear brackets on R^n and the natural GL_n actions.

A bracket mu assigns to each ordered basis pair (e_i, e_j) a vector
mu(e_i, e_j) = sum_k mu_ij^k e_k with mu(e_j, e_i) = -mu(e_i, e_j).  Only the
coefficients with i < j are stored (1-based indices, zero coefficients
dropped).  Two arithmetic modes coexist: "exact" (all coefficients are
Fractions) and "float".

Group and Lie algebra actions:

    act(g, mu)(x, y) = g mu(g^-1 x, g^-1 y)
    rep(a, mu)       = a mu(. , .) - mu(a . , .) - mu(. , a .)

rep is the derivative of act at the identity, so rep(I, mu) = -mu.  The inner
product sums over all ordered pairs (i, j), i.e. each stored coefficient
counts twice:

    inner(mu, lam) = 2 * sum_{i<j,k} mu_ij^k lam_ij^k
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .linalg import Scalar, frac, is_exact

Key = tuple[int, int, int]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class BracketTensor:
    """Sparse skew bilinear map; treat instances as immutable."""

    dim: int
    coeffs: Mapping[Key, Scalar] = field(default_factory=dict)
    scalar_mode: str = "exact"

    @staticmethod
    def make(dim: int, coeffs: Mapping[Key, Scalar] | None = None) -> "BracketTensor":
        """Normalize arbitrary (i, j, k) keys to i < j, drop zeros, set mode."""
        norm: dict[Key, Scalar] = {}
        for (i, j, k), c in (coeffs or {}).items():
            for idx in (i, j, k):
                if not 1 <= idx <= dim:
                    raise ValueError(f"index {idx} out of range 1..{dim}")
            if i == j:
                raise ValueError(f"repeated slot index in ({i},{j},{k}); "
                                 "antisymmetry forces this coefficient to 0")
            if isinstance(c, int):
                c = Fraction(c)
            if i > j:
                i, j, c = j, i, -c
            norm[(i, j, k)] = norm.get((i, j, k), Fraction(0)) + c
        norm = {key: c for key, c in norm.items() if c != 0}
        mode = "exact" if all(is_exact(c) for c in norm.values()) else "float"
        if mode == "float":
            norm = {key: float(c) for key, c in norm.items()}
        return BracketTensor(dim, norm, mode)

    @property
    def is_exact_mode(self) -> bool:
        return self.scalar_mode == "exact"

    def coeff(self, i: int, j: int, k: int) -> Scalar:
        if i < j:
            return self.coeffs.get((i, j, k), 0)
        if i > j:
            return -self.coeffs.get((j, i, k), 0)
        return 0

    def support(self) -> list[Key]:
        return sorted(self.coeffs)

    @property
    def nnz(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def eval(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> list[Scalar]:
        """mu(x, y) for coordinate vectors x, y."""
        zero = Fraction(0) if self.is_exact_mode else 0.0
        out = [zero] * self.dim
        for (i, j, k), c in self.coeffs.items():
            w = x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1]
            if w:
                out[k - 1] = out[k - 1] + c * w
        return out

    def pair(self, i: int, j: int) -> list[Scalar]:
        """mu(e_i, e_j) as a coordinate vector."""
        zero = Fraction(0) if self.is_exact_mode else 0.0
        out = [zero] * self.dim
        for k in range(1, self.dim + 1):
            c = self.coeff(i, j, k)
            if c:
                out[k - 1] = c
        return out

    def to_array(self) -> np.ndarray:
        """Dense (n, n, n) float array, arr[i-1, j-1, k-1] = mu_ij^k."""
        arr = np.zeros((self.dim,) * 3)
        for (i, j, k), c in self.coeffs.items():
            arr[i - 1, j - 1, k - 1] = float(c)
            arr[j - 1, i - 1, k - 1] = -float(c)
        return arr

    @staticmethod
    def from_array(arr: np.ndarray, chop: float = 0.0) -> "BracketTensor":
        n = arr.shape[0]
        coeffs: dict[Key, Scalar] = {}
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    c = 0.5 * (arr[i, j, k] - arr[j, i, k])
                    if abs(c) > chop:
                        coeffs[(i + 1, j + 1, k + 1)] = float(c)
        return BracketTensor(n, coeffs, "float")

    def to_float(self) -> "BracketTensor":
        if not self.is_exact_mode:
            return self
        return BracketTensor(self.dim, {k: float(c) for k, c in self.coeffs.items()},
                             "float")

    def scaled(self, c: Scalar) -> "BracketTensor":
        return BracketTensor.make(self.dim, {k: v * c for k, v in self.coeffs.items()})


def bracket_eval(mu: BracketTensor, x: Sequence[Scalar], y: Sequence[Scalar]) -> list[Scalar]:
    return mu.eval(x, y)


def inner(mu: BracketTensor, lam: BracketTensor) -> Scalar:
    """<mu, lam> summed over all ordered pairs (each i<j key counts twice)."""
    if mu.dim != lam.dim:
        raise ValueError("dimension mismatch")
    small, big = (mu.coeffs, lam.coeffs) if mu.nnz <= lam.nnz else (lam.coeffs, mu.coeffs)
    s = sum(c * big[k] for k, c in small.items() if k in big)
    return 2 * s


def norm_sq(mu: BracketTensor) -> Scalar:
    return inner(mu, mu)


def _is_exact_matrix(g) -> bool:
    if isinstance(g, np.ndarray):
        return False
    return all(is_exact(x) for row in g for x in row)


def act(g, mu: BracketTensor) -> "BracketTensor":
    """Base-change action (g.mu)(x, y) = g mu(g^-1 x, g^-1 y).

    Exact when both g and mu are exact; float otherwise.  g must be
    invertible (exact: raises on singular, float: relies on numpy solve).
    """
    if mu.is_exact_mode and _is_exact_matrix(g):
        gg = [[frac(x) for x in row] for row in g]
        ginv = linalg.invert(gg)
        cols = linalg.transpose(ginv)
        coeffs: dict[Key, Scalar] = {}
        for i in range(1, mu.dim + 1):
            for j in range(i + 1, mu.dim + 1):
                v = linalg.matvec(gg, mu.eval(cols[i - 1], cols[j - 1]))
                for k, c in enumerate(v, start=1):
                    if c != 0:
                        coeffs[(i, j, k)] = c
        return BracketTensor(mu.dim, coeffs, "exact")
    garr = np.asarray(g, dtype=float)
    ginv = np.linalg.inv(garr)
    out = act_array(garr, ginv, mu.to_array())
    return BracketTensor.from_array(out)


def act_array(g: np.ndarray, ginv: np.ndarray, arr: np.ndarray) -> np.ndarray:
    return np.einsum("pi,qj,pqr,kr->ijk", ginv, ginv, arr, g, optimize=True)


def rep(alpha, mu: BracketTensor) -> "BracketTensor":
    """Derived action rep(a, mu) = a mu(.,.) - mu(a ., .) - mu(., a .)."""
    exact = mu.is_exact_mode and _is_exact_matrix(alpha)
    if not exact:
        a = np.asarray(alpha, dtype=float)
        return BracketTensor.from_array(rep_array(a, mu.to_array()))
    a = [[frac(x) for x in row] for row in alpha]
    cols = linalg.transpose(a)
    n = mu.dim
    unit = linalg.identity(n)
    coeffs: dict[Key, Scalar] = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            v = linalg.matvec(a, mu.pair(i, j))
            t2 = mu.eval(cols[i - 1], unit[j - 1])
            t3 = mu.eval(unit[i - 1], cols[j - 1])
            for k in range(n):
                c = v[k] - t2[k] - t3[k]
                if c != 0:
                    coeffs[(i, j, k + 1)] = c
    return BracketTensor(n, coeffs, "exact")


def rep_array(alpha: np.ndarray, arr: np.ndarray) -> np.ndarray:
    t1 = np.einsum("kr,ijr->ijk", alpha, arr)
    t2 = np.einsum("pi,pjk->ijk", alpha, arr)
    t3 = np.einsum("qj,iqk->ijk", alpha, arr)
    return t1 - t2 - t3


def permutation_act(sigma: Sequence[int], mu: BracketTensor) -> BracketTensor:
    """Action of the permutation matrix sending e_i to e_sigma(i).

    sigma is given 1-based: sigma[i-1] is the image of i.
    """
    n = mu.dim
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{sigma!r} is not a permutation of 1..{n}")
    coeffs: dict[Key, Scalar] = {}
    for (i, j, k), c in mu.coeffs.items():
        ni, nj, nk = sigma[i - 1], sigma[j - 1], sigma[k - 1]
        if ni > nj:
            ni, nj, c = nj, ni, -c
        coeffs[(ni, nj, nk)] = c
    return BracketTensor(n, coeffs, mu.scalar_mode)


def jacobi_residual(mu: BracketTensor) -> Scalar:
    """Max absolute component of the Jacobiator over basis triples.

    Zero iff mu is a Lie bracket (exact mode gives an exact zero).
    """
    n = mu.dim
    unit = ([[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            if mu.is_exact_mode else [[float(i == j) for j in range(n)] for i in range(n)])
    worst: Scalar = Fraction(0) if mu.is_exact_mode else 0.0
    for i, j, k in itertools.combinations(range(n), 3):
        a = mu.eval(mu.eval(unit[i], unit[j]), unit[k])
        b = mu.eval(mu.eval(unit[j], unit[k]), unit[i])
        c = mu.eval(mu.eval(unit[k], unit[i]), unit[j])
        for x, y, z in zip(a, b, c):
            s = x + y + z
            if s < 0:
                s = -s
            if s > worst:
                worst = s
    return worst


def _span_rank(vectors, exact: bool, tol: float) -> int:
    if not vectors:
        return 0
    if exact:
        return linalg.rank(vectors)
    m = np.asarray(vectors, dtype=float)
    return int(np.linalg.matrix_rank(m, tol=tol * max(1.0, float(np.abs(m).max()))))


def _next_term(mu: BracketTensor, basis):
    """Spanning vectors of [g, span(basis)]."""
    n = mu.dim
    unit = ([[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            if mu.is_exact_mode else [[float(i == j) for j in range(n)] for i in range(n)])
    return [mu.eval(unit[i], b) for i in range(n) for b in basis]


def _reduce_basis(vectors, exact: bool, tol: float):
    """Linearly independent subset spanning the same space."""
    if exact:
        r, pivots = linalg.rref(vectors) if vectors else ([], [])
        return [row for row in r[: len(pivots)]]
    if not vectors:
        return []
    m = np.asarray(vectors, dtype=float)
    _, s, vh = np.linalg.svd(m)
    cutoff = tol * max(1.0, s[0] if len(s) else 1.0)
    return [vh[i] for i in range(len(s)) if s[i] > cutoff]


def lower_central_series(mu: BracketTensor, tol: float = DEFAULT_TOL) -> list[int]:
    """Dimensions [dim g, dim [g,g], dim [g,[g,g]], ...].

    Stops at 0 (nilpotent) or repeats the first stabilized dimension once.
    Requires a Lie bracket; raises ValueError otherwise.
    """
    res = jacobi_residual(mu)
    if (res != 0) if mu.is_exact_mode else (float(res) > tol):
        raise ValueError(f"Jacobi identity fails (residual {float(res):g})")
    exact = mu.is_exact_mode
    n = mu.dim
    dims = [n]
    unit = ([[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            if exact else [[float(i == j) for j in range(n)] for i in range(n)])
    basis = unit
    while True:
        gens = _next_term(mu, basis)
        basis = _reduce_basis(gens, exact, tol)
        d = len(basis)
        dims.append(d)
        if d == 0 or d == dims[-2]:
            return dims


def is_nilpotent(mu: BracketTensor, tol: float = DEFAULT_TOL) -> bool:
    return lower_central_series(mu, tol)[-1] == 0


def derivations(mu: BracketTensor, tol: float = DEFAULT_TOL):
    """Basis of {a : rep(a, mu) = 0}, the derivation algebra of mu.

    Exact mode: canonical rational basis from the reduced echelon null space.
    Float mode: orthonormal basis from an SVD.  Returns a list of n x n
    matrices (rows of Fractions, or numpy arrays).
    """
    n = mu.dim
    slots = [(i, j, k) for i in range(1, n + 1) for j in range(i + 1, n + 1)
             for k in range(1, n + 1)]
    slot_index = {s: r for r, s in enumerate(slots)}
    if mu.is_exact_mode:
        rows = [[Fraction(0)] * (n * n) for _ in slots]
        for r in range(n):
            for c in range(n):
                e = [[Fraction(int(a == r and b == c)) for b in range(n)] for a in range(n)]
                image = rep(e, mu)
                for key, val in image.coeffs.items():
                    rows[slot_index[key]][r * n + c] = val
        return [[vec[r * n: (r + 1) * n] for r in range(n)] for vec in linalg.nullspace(rows)]
    arr = mu.to_array()
    m = np.zeros((len(slots), n * n))
    for r in range(n):
        for c in range(n):
            e = np.zeros((n, n))
            e[r, c] = 1.0
            image = rep_array(e, arr)
            for (i, j, k) in slots:
                m[slot_index[(i, j, k)], r * n + c] = image[i - 1, j - 1, k - 1]
    _, s, vh = np.linalg.svd(m)
    cutoff = tol * max(1.0, s[0] if len(s) else 1.0)
    null_dim = int(np.sum(s <= cutoff)) + (n * n - len(s) if len(s) < n * n else 0)
    basis = vh[len(vh) - null_dim:] if null_dim else vh[:0]
    return [v.reshape(n, n) for v in basis]


def direct_sum(*parts: BracketTensor) -> BracketTensor:
    """Block direct sum of brackets (basis concatenated in order)."""
    dim = sum(p.dim for p in parts)
    coeffs: dict[Key, Scalar] = {}
    off = 0
    for p in parts:
        for (i, j, k), c in p.coeffs.items():
            coeffs[(i + off, j + off, k + off)] = c
        off += p.dim
    return BracketTensor.make(dim, coeffs)
