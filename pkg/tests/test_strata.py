"""Weight systems, stratum labels, memberships, certificates."""

from fractions import Fraction

import numpy as np
import pytest

from generators import rand_frac, random_nilpotent
from solvstrat.bracket import BracketTensor, act, inner, permutation_act, rep
from solvstrat.catalog import filiform4, heisenberg3, so3
from solvstrat.strata import (DiagonalWeight, beta_of, certify_candidate,
                              delta_check, derivation_certificates,
                              eigenvalue_type, in_W, in_Y, in_Z, m_degree,
                              parabolic_membership, positivity_check,
                              project_Z, sort_to_weyl_chamber, weight_vector,
                              weights)

F = Fraction
H3 = heisenberg3()
N4 = filiform4()
B3 = DiagonalWeight.make([-1, -1, 1])
B4 = DiagonalWeight.make([-1, F(-1, 2), 0, F(1, 2)])


def test_weight_vector_shape():
    assert weight_vector(1, 2, 3, 3) == (F(-1), F(-1), F(1))
    # k coinciding with a slot index merges entries but keeps trace -1
    assert weight_vector(1, 2, 2, 3) == (F(-1), F(0), F(0))
    assert sum(weight_vector(2, 4, 1, 5)) == -1


def test_weights_goldens():
    assert weights(H3).points == ((F(-1), F(-1), F(1)),)
    assert set(weights(N4).points) == {(F(-1), F(-1), F(1), F(0)),
                                       (F(-1), F(0), F(-1), F(1))}
    assert set(weights(so3()).points) == {(F(-1), F(-1), F(1)),
                                          (F(-1), F(1), F(-1)),
                                          (F(1), F(-1), F(-1))}
    with pytest.raises(ValueError):
        weights(BracketTensor.make(3, {}))


def test_weights_deduplicate():
    # two coefficients sharing one weight matrix
    mu = BracketTensor.make(4, {(1, 2, 3): 1, (1, 2, 4): 1, (3, 4, 4): 1})
    assert len(weights(mu)) == 3


def test_m_degree_goldens():
    assert m_degree(H3, B3) == 3
    assert m_degree(H3, DiagonalWeight.make([F(-1, 3), F(-1, 3), F(1, 3)])) == 1
    assert m_degree(N4, DiagonalWeight.make([0, 0, 0, 1])) == 0
    assert m_degree(H3, [2 * x for x in B3.entries]) == 6  # positive homogeneity


def test_beta_goldens():
    assert beta_of(H3).entries == (F(-1), F(-1), F(1))
    assert beta_of(N4).entries == (F(-1), F(-1, 2), F(0), F(1, 2))
    assert beta_of(so3()).entries == (F(-1, 3), F(-1, 3), F(-1, 3))


def test_beta_trace_and_degree_laws():
    rng = np.random.default_rng(0)
    for _ in range(20):
        mu = random_nilpotent(rng, int(rng.integers(3, 7)))
        beta = beta_of(mu)
        assert beta.trace() == -1
        nsq = beta.norm_sq()
        assert m_degree(mu, [x / nsq for x in beta.entries]) == 1


def test_beta_optimality_among_admissible_directions():
    # any diagonal alpha with m(mu, alpha) >= 1 satisfies |alpha|^2 >= 1/|beta|^2
    rng = np.random.default_rng(1)
    for mu in (H3, N4, random_nilpotent(rng, 5)):
        beta = beta_of(mu)
        nsq_b = beta.norm_sq()
        bound = 1 / nsq_b
        base = [x / nsq_b for x in beta.entries]
        hits = 0
        for _ in range(400):
            if rng.integers(0, 2):
                alpha = [rand_frac(rng, 3, 3) for _ in range(mu.dim)]
            else:
                alpha = [b + rand_frac(rng, 1, 4) for b in base]
            if m_degree(mu, alpha) < 1:
                continue
            hits += 1
            assert sum(x * x for x in alpha) >= bound
        assert hits > 10


def test_beta_permutation_equivariance():
    rng = np.random.default_rng(2)
    for _ in range(15):
        dim = int(rng.integers(3, 7))
        mu = random_nilpotent(rng, dim)
        sigma = [int(x) + 1 for x in rng.permutation(dim)]
        b = beta_of(mu).entries
        moved = beta_of(permutation_act(sigma, mu)).entries
        expected = [None] * dim
        for i in range(dim):
            expected[sigma[i] - 1] = b[i]
        assert list(moved) == expected


def test_sort_to_weyl_chamber():
    sorted_b, perm = sort_to_weyl_chamber(DiagonalWeight.make([1, -1, 0]))
    assert sorted_b.entries == (F(-1), F(0), F(1))
    assert perm == (1, 2, 0)
    tied, perm2 = sort_to_weyl_chamber(DiagonalWeight.make([0, -1, -1]))
    assert tied.entries == (F(-1), F(-1), F(0))
    assert perm2 == (1, 2, 0)  # stable on the tie
    already, perm3 = sort_to_weyl_chamber(B4)
    assert already.entries == B4.entries and perm3 == (0, 1, 2, 3)


def test_membership_nesting_and_goldens():
    assert in_Z(H3, B3).ok and in_Y(H3, B3).ok and in_W(H3, B3).ok
    assert in_Z(N4, B4).ok
    assert not in_W(H3, DiagonalWeight.make([0, 0, -1])).ok
    v124 = BracketTensor.make(4, {(1, 2, 4): 1})
    assert in_W(v124, B4).ok and not in_Y(v124, B4).ok and not in_Z(v124, B4).ok
    assert in_W(v124, B4).residual == F(1, 2)
    mixed = BracketTensor.make(4, {(1, 2, 3): 1, (1, 3, 4): 1, (1, 2, 4): 1})
    assert in_W(mixed, B4).ok and in_Y(mixed, B4).ok and not in_Z(mixed, B4).ok


def test_membership_nesting_random():
    rng = np.random.default_rng(3)
    for _ in range(25):
        mu = random_nilpotent(rng, int(rng.integers(3, 7)))
        beta = beta_of(mu)
        z, y, w = in_Z(mu, beta), in_Y(mu, beta), in_W(mu, beta)
        if z.ok:
            assert y.ok
        if y.ok:
            assert w.ok


def test_project_z_filters_support():
    noisy = BracketTensor.make(3, {(1, 2, 3): 1, (1, 3, 2): 1})
    assert project_Z(noisy, B3).coeffs == H3.coeffs
    combo = BracketTensor.make(4, {(1, 2, 3): 1, (1, 3, 4): 1, (1, 2, 4): 1})
    assert project_Z(combo, B4).coeffs == N4.coeffs
    # idempotence
    once = project_Z(combo, B4)
    assert project_Z(once, B4).coeffs == once.coeffs


def test_project_z_is_the_scaling_flow_limit():
    # e^{-t(beta + |beta|^2 I)}.mu converges to the projection as t grows
    combo = BracketTensor.make(4, {(1, 2, 3): 1, (1, 3, 4): 1, (1, 2, 4): 1})
    t = 40.0
    g = np.diag(np.exp(-t * np.array([float(x) for x in B4.shifted()])))
    flowed = act(g, combo.to_float())
    target = project_Z(combo, B4)
    diff = flowed.to_array() - target.to_array()
    assert np.max(np.abs(diff)) <= 1e-8


def test_eigenvalue_type_goldens():
    t3 = eigenvalue_type(B3)
    assert t3.values == (1, 1, 2) and t3.scale == 2
    t4 = eigenvalue_type(B4)
    assert t4.values == (1, 2, 3, 4) and t4.scale == F(1, 2)
    with pytest.raises(ValueError):
        eigenvalue_type(beta_of(so3()))  # zero shift
    with pytest.raises(TypeError):
        eigenvalue_type(DiagonalWeight.make([-0.5, -0.5]))


def test_positivity_check():
    assert positivity_check(B3) and positivity_check(B4)
    assert not positivity_check(beta_of(so3()))
    assert min(B3.shifted()) == 2
    assert min(B4.shifted()) == F(1, 2)


def test_parabolic_membership():
    sorted_b3 = DiagonalWeight.make([-1, -1, 1])
    e13 = [[0, 0, 1], [0, 0, 0], [0, 0, 0]]
    lower = [[1, 0, 0], [2, 3, 0], [4, 5, 6]]
    assert not parabolic_membership(e13, sorted_b3)
    assert parabolic_membership(lower, sorted_b3)
    with pytest.raises(ValueError):
        parabolic_membership(lower, DiagonalWeight.make([1, -1, 0]))


def test_derivation_certificates_goldens():
    der3 = derivation_certificates(H3, B3)
    assert der3.dim_der == 6
    assert der3.adbeta_nonneg and der3.betaort_zero and der3.parabolic_all
    assert der3.trace_max_abs == 0.0
    assert der3.quadratic_min_sampled >= -1e-12
    der4 = derivation_certificates(N4, B4)
    assert der4.dim_der == 7
    assert der4.adbeta_nonneg and der4.betaort_zero and der4.parabolic_all


def test_delta_check_worked_value():
    combo = BracketTensor.make(4, {(1, 2, 3): 1, (1, 3, 4): 1, (1, 2, 4): 1})
    assert delta_check(combo, B4) == 1  # only the (1,2,4) term contributes: 2 * 1 * 1/2
    assert delta_check(N4, B4) == 0
    with pytest.raises(ValueError):
        delta_check(BracketTensor.make(4, {(2, 3, 4): 1}), B4)


def test_delta_matches_rep_route():
    rng = np.random.default_rng(4)
    for _ in range(10):
        mu = random_nilpotent(rng, int(rng.integers(3, 6)))
        beta = beta_of(mu)
        shift = [[beta.shifted()[i] if i == j else F(0) for j in range(mu.dim)]
                 for i in range(mu.dim)]
        assert delta_check(mu, beta) == inner(rep(shift, mu), mu)


def test_certificate_goldens():
    cert = certify_candidate(H3, B3)
    assert cert.all_passed
    assert cert.q_value == F(1, 3)
    assert cert.eigenvalue_type == (1, 1, 2) and cert.type_scale == 2
    assert set(cert.checks) == {"trace_minus_one", "in_W", "in_Z", "m_equals_one",
                                "delta_nonneg", "beta_positive_shift",
                                "derivations_in_parabolic", "adbeta_nonneg",
                                "betaort_zero"}
    cert4 = certify_candidate(N4, B4)
    assert cert4.all_passed and cert4.q_value == F(2, 3)
    assert cert4.eigenvalue_type == (1, 2, 3, 4)


def test_certificate_flags_so3():
    b = sort_to_weyl_chamber(beta_of(so3()))[0]
    cert = certify_candidate(so3(), b)
    assert not cert.checks["beta_positive_shift"]
    assert cert.eigenvalue_type is None and cert.type_scale is None
    assert not cert.all_passed


def test_certificate_rejects_zero_beta():
    with pytest.raises(ValueError):
        certify_candidate(H3, DiagonalWeight.make([0, 0, 0]))


def test_certificate_exact_on_float_support():
    # float coefficients on an exact-support bracket: memberships stay exact
    mu = BracketTensor.make(3, {(1, 2, 3): 0.9999999}).to_float()
    cert = certify_candidate(mu, B3)
    assert cert.checks["in_Z"] and cert.checks["m_equals_one"]
    assert cert.residuals["in_Z"] == 0


def test_certificate_json_round_trip_shape():
    d = certify_candidate(N4, B4).to_json_dict()
    assert d["beta"] == ["-1", "-1/2", "0", "1/2"]
    assert d["q_value"] == "2/3"
    assert d["eigenvalue_type"] == [1, 2, 3, 4]
    assert d["type_scale"] == "1/2"
    assert d["all_passed"] is True
