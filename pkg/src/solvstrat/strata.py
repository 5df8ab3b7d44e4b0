"""Stratum data attached to a bracket: weights, optimal direction, certificates.

Each nonzero coefficient mu_ij^k carries the diagonal weight

    a_ij^k = E_kk - E_ii - E_jj,

a vector with entries -1, -1, +1 at slots i, j, k (k = i or k = j is allowed
and merges entries; the trace is always -1).  The stratum label beta of mu is
the minimum-norm point of the convex hull of its weights.  Its defining
inequalities and the degeneration/derivation conditions below are what the
certificate records:

    W_beta : <beta, a> >= |beta|^2 for every supported weight a
    Z_beta : equality for every supported weight
    m(mu, beta/|beta|^2) = 1, tr beta = -1
    <[beta, D], D> >= 0 and tr(beta D) = 0 for every derivation D of mu
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import linalg
from .bracket import BracketTensor, derivations
from .linalg import Scalar, frac, is_exact
from .minnorm import PointSet, min_norm_point

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class DiagonalWeight:
    """Diagonal matrix identified with its entry vector."""

    entries: tuple[Scalar, ...]

    @staticmethod
    def make(entries: Sequence) -> "DiagonalWeight":
        vals = tuple(frac(x) if is_exact(x) or isinstance(x, int) else float(x)
                     for x in entries)
        return DiagonalWeight(vals)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def is_exact_mode(self) -> bool:
        return all(is_exact(x) for x in self.entries)

    def trace(self) -> Scalar:
        return sum(self.entries)

    def norm_sq(self) -> Scalar:
        return sum(x * x for x in self.entries)

    def shifted(self) -> tuple[Scalar, ...]:
        """Entries of beta + |beta|^2 I."""
        nsq = self.norm_sq()
        return tuple(x + nsq for x in self.entries)

    def as_matrix(self):
        n = self.dim
        zero = Fraction(0) if self.is_exact_mode else 0.0
        return [[self.entries[i] if i == j else zero for j in range(n)] for i in range(n)]

    def is_sorted(self) -> bool:
        return all(a <= b for a, b in zip(self.entries, self.entries[1:]))


class Membership(NamedTuple):
    ok: bool
    residual: Scalar


def weight_vector(i: int, j: int, k: int, dim: int) -> tuple[Fraction, ...]:
    v = [Fraction(0)] * dim
    v[i - 1] -= 1
    v[j - 1] -= 1
    v[k - 1] += 1
    return tuple(v)


def weights(mu: BracketTensor) -> PointSet:
    """Distinct weight vectors of the support, sorted lexicographically."""
    if mu.is_zero():
        raise ValueError("the zero bracket has no weights")
    vecs = sorted({weight_vector(i, j, k, mu.dim) for (i, j, k) in mu.coeffs})
    return PointSet.make(vecs)


def _entries(alpha) -> Sequence[Scalar]:
    return alpha.entries if isinstance(alpha, DiagonalWeight) else alpha


def m_degree(mu: BracketTensor, alpha) -> Scalar:
    """min over supported weights a of <alpha, a>; the degree of mu along alpha."""
    a = _entries(alpha)
    if mu.is_zero():
        raise ValueError("the zero bracket has no degree")
    return min(a[k - 1] - a[i - 1] - a[j - 1] for (i, j, k) in mu.coeffs)


def beta_of(mu: BracketTensor) -> DiagonalWeight:
    """Minimum-norm point of the convex hull of the supported weights."""
    return DiagonalWeight(min_norm_point(weights(mu)).point)


def sort_to_weyl_chamber(beta: DiagonalWeight) -> tuple[DiagonalWeight, tuple[int, ...]]:
    """Nondecreasing representative plus the (stable) sorting permutation.

    The permutation p is 0-based with sorted.entries[i] = beta.entries[p[i]].
    """
    order = sorted(range(beta.dim), key=lambda i: (beta.entries[i], i))
    return DiagonalWeight(tuple(beta.entries[i] for i in order)), tuple(order)


def _gaps(mu: BracketTensor, beta: DiagonalWeight) -> list[Scalar]:
    b = beta.entries
    nsq = beta.norm_sq()
    return [b[k - 1] - b[i - 1] - b[j - 1] - nsq for (i, j, k) in mu.support()]


def in_W(mu: BracketTensor, beta: DiagonalWeight, tol: float = 0.0) -> Membership:
    """Minimal slack of <beta, a> - |beta|^2 over the support; ok iff >= -tol."""
    g = min(_gaps(mu, beta))
    return Membership(g >= -tol if not is_exact(g) else g >= 0, g)


def in_Z(mu: BracketTensor, beta: DiagonalWeight, tol: float = 0.0) -> Membership:
    """Largest absolute slack; ok iff every supported weight sits at equality."""
    g = max(abs(x) for x in _gaps(mu, beta))
    return Membership(g <= tol if not is_exact(g) else g == 0, g)


def in_Y(mu: BracketTensor, beta: DiagonalWeight, tol: float = 0.0) -> Membership:
    """In W with at least one weight at equality; residual is the minimal slack."""
    g = min(_gaps(mu, beta))
    if is_exact(g):
        return Membership(g == 0, g)
    return Membership(abs(g) <= tol, g)


def project_Z(mu: BracketTensor, beta: DiagonalWeight, tol: float = 0.0) -> BracketTensor:
    """Keep only the coefficients whose weight sits at equality for beta.

    This is the limit of e^{-t(beta + |beta|^2 I)} . mu as t -> oo when mu
    lies in W_beta.
    """
    b = beta.entries
    nsq = beta.norm_sq()
    kept = {}
    for (i, j, k), c in mu.coeffs.items():
        gap = b[k - 1] - b[i - 1] - b[j - 1] - nsq
        if (gap == 0) if is_exact(gap) else (abs(gap) <= tol):
            kept[(i, j, k)] = c
    return BracketTensor(mu.dim, kept, mu.scalar_mode)


class EigenvalueType(NamedTuple):
    values: tuple[int, ...]
    scale: Fraction


def eigenvalue_type(beta: DiagonalWeight) -> EigenvalueType:
    """Coprime positive integers proportional to sorted(beta + |beta|^2 I).

    Defined only for exact beta with strictly positive shifted entries.
    """
    if not beta.is_exact_mode:
        raise TypeError("eigenvalue type requires exact rational entries")
    shifted = sorted(beta.shifted())
    if shifted[0] <= 0:
        raise ValueError("beta + |beta|^2 I has non-positive entries; no eigenvalue type")
    den = math.lcm(*(x.denominator for x in shifted))
    ints = [x.numerator * (den // x.denominator) for x in shifted]
    g = math.gcd(*ints)
    return EigenvalueType(tuple(v // g for v in ints), Fraction(g, den))


def positivity_check(beta: DiagonalWeight, tol: float = 0.0) -> bool:
    lo = min(beta.shifted())
    return lo > 0 if is_exact(lo) else lo > tol


def parabolic_membership(d, beta: DiagonalWeight, tol: float = 0.0) -> bool:
    """Whether d lies in the parabolic subalgebra attached to sorted beta.

    Entry (i, j) must vanish whenever beta_i < beta_j.  beta must be
    nondecreasing so that the chamber convention applies.
    """
    if not beta.is_sorted():
        raise ValueError("parabolic membership requires sorted beta")
    b = beta.entries
    n = beta.dim
    for i in range(n):
        for j in range(n):
            if b[i] < b[j]:
                v = d[i][j] if not isinstance(d, np.ndarray) else d[i, j]
                if (v != 0) if is_exact(v) else (abs(v) > tol):
                    return False
    return True


@dataclass(frozen=True)
class DerivationCertificates:
    """Checks of <[beta, D], D> >= 0 and tr(beta D) = 0 over Der(mu)."""

    dim_der: int
    adbeta_nonneg: bool
    betaort_zero: bool
    parabolic_all: bool
    quadratic_min_sampled: float
    trace_max_abs: float


def _quadratic_value(d, beta_entries) -> Scalar:
    """<[beta, D], D> = sum_ij (beta_i - beta_j) D_ij^2 for diagonal beta."""
    n = len(beta_entries)
    get = (lambda i, j: d[i, j]) if isinstance(d, np.ndarray) else (lambda i, j: d[i][j])
    return sum((beta_entries[i] - beta_entries[j]) * get(i, j) ** 2
               for i in range(n) for j in range(n))


def _trace_value(d, beta_entries) -> Scalar:
    get = (lambda i: d[i, i]) if isinstance(d, np.ndarray) else (lambda i: d[i][i])
    return sum(b * get(i) for i, b in enumerate(beta_entries))


def derivation_certificates(
    mu: BracketTensor,
    beta: DiagonalWeight,
    tol: float = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
    basis=None,
) -> DerivationCertificates:
    """Evaluate the derivation-side stratum conditions for a sorted beta.

    The quadratic condition is decided exactly (positive semidefiniteness of
    the restricted Gram form) when everything is rational, and by the minimal
    eigenvalue of the Gram matrix in float mode.  Random unit combinations
    are sampled either way and the worst value reported, normalized by the
    Frobenius norm of the combination.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if basis is None:
        basis = derivations(mu, tol=min(tol, 1e-9))
    b = beta.entries
    exact = beta.is_exact_mode and mu.is_exact_mode and basis and not isinstance(basis[0], np.ndarray)
    n = beta.dim

    if not basis:
        return DerivationCertificates(0, True, True, True, 0.0, 0.0)

    traces = [_trace_value(d, b) for d in basis]
    if exact:
        betaort = all(t == 0 for t in traces)
    else:
        betaort = all(abs(float(t)) <= tol for t in traces)
    trace_max = max(abs(float(t)) for t in traces)

    parabolic = all(parabolic_membership(d, beta, tol) for d in basis)

    # Gram matrix of the quadratic form restricted to span(basis)
    def form(d1, d2):
        g1 = (lambda i, j: d1[i, j]) if isinstance(d1, np.ndarray) else (lambda i, j: d1[i][j])
        g2 = (lambda i, j: d2[i, j]) if isinstance(d2, np.ndarray) else (lambda i, j: d2[i][j])
        return sum((b[i] - b[j]) * g1(i, j) * g2(i, j) for i in range(n) for j in range(n))

    k = len(basis)
    gram = [[form(basis[a], basis[c]) for c in range(k)] for a in range(k)]
    if exact:
        adbeta = linalg.is_psd(gram)
    else:
        adbeta = float(np.linalg.eigvalsh(np.asarray(gram, dtype=float)).min()) >= -tol

    float_basis = [np.array([[float(d[i, j] if isinstance(d, np.ndarray) else d[i][j])
                              for j in range(n)] for i in range(n)]) for d in basis]
    bf = np.array([float(x) for x in b])
    worst = math.inf
    samples = [np.eye(k)[i] for i in range(k)] + list(rng.standard_normal((2 * k, k)))
    for coeffs in samples:
        d = sum(c * m for c, m in zip(coeffs, float_basis))
        nsq = float(np.sum(d * d))
        if nsq < 1e-30:
            continue
        q = float(np.sum((bf[:, None] - bf[None, :]) * d * d)) / nsq
        worst = min(worst, q)
    if worst is math.inf:
        worst = 0.0

    return DerivationCertificates(k, bool(adbeta), bool(betaort), bool(parabolic),
                                  float(worst), float(trace_max))


def delta_check(mu: BracketTensor, beta: DiagonalWeight, tol: float = DEFAULT_TOL) -> Scalar:
    """<pi(beta + |beta|^2 I) mu, mu> = 2 sum_{i<j,k} (mu_ij^k)^2 (<beta,a> - |beta|^2).

    Requires mu in W_beta, where every term is nonnegative; the total is zero
    exactly when mu lies in Z_beta.
    """
    w = in_W(mu, beta, tol)
    if not w.ok:
        raise ValueError(f"mu is not in W_beta (minimal slack {float(w.residual):g})")
    return _delta_value(mu, beta)


def _delta_value(mu: BracketTensor, beta: DiagonalWeight) -> Scalar:
    b = beta.entries
    nsq = beta.norm_sq()
    return 2 * sum(c * c * (b[k - 1] - b[i - 1] - b[j - 1] - nsq)
                   for (i, j, k), c in mu.coeffs.items())


@dataclass(frozen=True)
class StratumCertificate:
    """Bundle of the stratum conditions for a candidate label beta.

    checks maps condition names to booleans; residuals carries the matching
    numeric slack.  q_value is 1/|beta|^2, the GIT weight of the stratum.
    """

    beta: DiagonalWeight
    q_value: Scalar
    eigenvalue_type: tuple[int, ...] | None
    type_scale: Fraction | None
    checks: dict[str, bool]
    residuals: dict[str, Scalar]

    @property
    def all_passed(self) -> bool:
        return all(self.checks.values())

    def to_json_dict(self) -> dict:
        return {
            "beta": [linalg.format_scalar(x) for x in self.beta.entries],
            "q_value": linalg.format_scalar(self.q_value),
            "eigenvalue_type": list(self.eigenvalue_type) if self.eigenvalue_type else None,
            "type_scale": linalg.format_scalar(self.type_scale) if self.type_scale else None,
            "checks": dict(sorted(self.checks.items())),
            "residuals": {k: (linalg.format_scalar(v) if is_exact(v) else float(v))
                          for k, v in sorted(self.residuals.items())},
            "all_passed": self.all_passed,
        }


def certify_candidate(
    mu: BracketTensor,
    beta: DiagonalWeight,
    tol: float = DEFAULT_TOL,
    rng: np.random.Generator | None = None,
    der_basis=None,
) -> StratumCertificate:
    """Evaluate every stratum condition of beta against mu.

    beta must be the sorted chamber representative.  Exact inputs give exact
    verdicts; float inputs are judged against tol.
    """
    nsq = beta.norm_sq()
    if nsq == 0:
        raise ValueError("beta = 0 labels no stratum")
    checks: dict[str, bool] = {}
    residuals: dict[str, Scalar] = {}

    tr = beta.trace()
    tr_res = tr + 1
    checks["trace_minus_one"] = (tr_res == 0) if is_exact(tr_res) else abs(tr_res) <= tol
    residuals["trace_minus_one"] = tr_res

    w = in_W(mu, beta, tol)
    z = in_Z(mu, beta, tol)
    checks["in_W"], residuals["in_W"] = w.ok, w.residual
    checks["in_Z"], residuals["in_Z"] = z.ok, z.residual

    m_val = m_degree(mu, [x / nsq for x in beta.entries])
    m_res = m_val - 1
    checks["m_equals_one"] = (m_res == 0) if is_exact(m_res) else abs(m_res) <= tol
    residuals["m_equals_one"] = m_res

    delta = _delta_value(mu, beta)
    checks["delta_nonneg"] = (delta >= 0) if is_exact(delta) else delta >= -tol
    residuals["delta_nonneg"] = delta

    checks["beta_positive_shift"] = positivity_check(beta)
    residuals["beta_positive_shift"] = min(beta.shifted())

    der = derivation_certificates(mu, beta, tol=tol, rng=rng, basis=der_basis)
    checks["derivations_in_parabolic"] = der.parabolic_all
    checks["adbeta_nonneg"] = der.adbeta_nonneg
    checks["betaort_zero"] = der.betaort_zero
    residuals["adbeta_quadratic_min"] = der.quadratic_min_sampled
    residuals["betaort_trace_max"] = der.trace_max_abs

    etype = scale = None
    if checks["beta_positive_shift"] and beta.is_exact_mode:
        etype, scale = eigenvalue_type(beta)

    q = 1 / nsq if is_exact(nsq) else 1.0 / float(nsq)
    return StratumCertificate(beta, q, etype, scale, checks, residuals)
