"""Metric solvable algebras: curvature, Einstein checks, extensions, audit."""

from fractions import Fraction

import numpy as np
import pytest

from generators import rand_frac, random_solvable
from solvstrat.bracket import BracketTensor, act, jacobi_residual
from solvstrat.catalog import (abelian, ch2, filiform4, heisenberg3,
                               nonstandard_heisenberg, rh_space, so3)
from solvstrat.flow import ricci_moment
from solvstrat.solvable import (MetricSolvableAlgebra, curvature_report,
                                einstein_check, is_standard, killing_form,
                                mean_curvature, orthonormalize_basis,
                                r_operator, rank_one_extension, ricci_operator,
                                s_ad_h, standardness_audit,
                                trace_identity_check)
from solvstrat.strata import DiagonalWeight

F = Fraction


def _diag(*xs):
    n = len(xs)
    return [[F(xs[i]) if i == j else F(0) for j in range(n)] for i in range(n)]


def test_create_rejects_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        MetricSolvableAlgebra.create(1, 3, heisenberg3())


def test_create_rejects_bracket_escaping_n():
    with pytest.raises(ValueError, match="escapes n"):
        MetricSolvableAlgebra.create(1, 2, BracketTensor.make(3, {(2, 3, 1): 1}))


def test_create_rejects_jacobi_failure():
    with pytest.raises(ValueError, match="Jacobi"):
        MetricSolvableAlgebra.create(0, 3, BracketTensor.make(3, {(1, 2, 3): 1, (1, 3, 1): 1}))


def test_create_rejects_non_solvable():
    with pytest.raises(ValueError, match="not solvable"):
        MetricSolvableAlgebra.create(0, 3, so3())


def test_restriction_and_ad_blocks():
    s = ch2()
    assert s.mu_n().coeffs == {(1, 2, 3): F(1)}
    assert s.ad(1) == _diag(0, F(1, 2), F(1, 2), 1)
    assert s.ad_on_n(1) == _diag(F(1, 2), F(1, 2), 1)


def test_orthonormalize_identity_gram_is_noop():
    s = ch2()
    out = orthonormalize_basis(1, 3, s.bracket, np.eye(4))
    for key, val in s.bracket.coeffs.items():
        assert abs(out.coeff(*key) - float(val)) < 1e-12


def test_orthonormalize_scaled_gram_rescales_curvature():
    # metric scaled by 4 divides the Einstein constant by 4
    gram = _diag(4, 4, 4)
    s = MetricSolvableAlgebra.create(1, 2, rh_space(2).bracket, gram=gram)
    ec = einstein_check(s)
    assert ec.ok and abs(float(ec.c) + 0.5) < 1e-12


def test_orthonormalize_rejects_bad_gram():
    b = rh_space(2).bracket
    with pytest.raises(ValueError, match="must be 3 x 3"):
        orthonormalize_basis(1, 2, b, np.eye(4))
    with pytest.raises(ValueError, match="symmetric"):
        orthonormalize_basis(1, 2, b, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError, match="positive definite"):
        orthonormalize_basis(1, 2, b, _diag(1, -1, 1))


def test_hyperbolic_space_curvature_goldens():
    s = rh_space(2)
    assert mean_curvature(s) == [F(2)]
    assert killing_form(s) == _diag(2, 0, 0)
    assert r_operator(s) == _diag(-1, 0, 0)
    assert ricci_operator(s) == _diag(-2, -2, -2)
    ec = einstein_check(s)
    assert ec.ok and ec.c == F(-2) and ec.residual == 0.0


def test_complex_hyperbolic_curvature_goldens():
    s = ch2()
    assert mean_curvature(s) == [F(2)]
    assert killing_form(s)[0][0] == F(3, 2)
    assert s_ad_h(s) == _diag(0, 1, 1, 2)
    assert ricci_operator(s) == _diag(F(-3, 2), F(-3, 2), F(-3, 2), F(-3, 2))
    ec = einstein_check(s)
    assert ec.ok and ec.c == F(-3, 2)
    assert ec.c_formula_residual == 0.0


def test_r_operator_matches_moment_ricci_when_a_is_trivial():
    s = MetricSolvableAlgebra.create(0, 3, heisenberg3())
    assert r_operator(s) == ricci_moment(heisenberg3()).ric
    assert mean_curvature(s) == []
    assert einstein_check(s).c_formula_residual is None  # unimodular


def test_flat_abelian_is_einstein_with_zero_constant():
    s = MetricSolvableAlgebra.create(0, 2, abelian(2))
    ec = einstein_check(s)
    assert ec.ok and ec.c == 0


def test_unequal_rates_break_einstein():
    coeffs = {(1, 2, 2): F(1), (1, 3, 3): F(2)}
    s = MetricSolvableAlgebra.create(1, 2, BracketTensor.make(3, coeffs))
    assert not einstein_check(s).ok


def test_is_standard():
    assert is_standard(ch2()).ok
    st = is_standard(nonstandard_heisenberg())
    assert not st.ok and st.max_violation == 1.0


def test_curvature_report_shape():
    rep = curvature_report(ch2())
    assert rep.einstein.ok and rep.standard.ok
    assert rep.killing_n_max == 0.0
    d = rep.to_json_dict()
    assert d["einstein"]["c"] == "-3/2"
    assert d["ricci"][0][0] == "-3/2"


def test_trace_identity_exact_on_random_algebras():
    rng = np.random.default_rng(11)
    hit_nonzero = False
    for _ in range(10):
        s = random_solvable(rng)
        d = s.dim
        e = [[rand_frac(rng) for _ in range(d)] for _ in range(d)]
        ti = trace_identity_check(s, e)
        assert ti.tr_re == ti.pairing
        assert ti.residual == 0.0
        hit_nonzero = hit_nonzero or ti.tr_re != 0
    assert hit_nonzero


def test_trace_identity_needs_no_jacobi():
    # the identity is linear-algebraic, so it holds for arbitrary tensors;
    # build the algebra directly to bypass the create() validation
    bad = BracketTensor.make(3, {(1, 2, 3): 1, (1, 3, 1): 1})
    assert jacobi_residual(bad) == 1
    s = MetricSolvableAlgebra(0, 3, bad)
    e = [[F(1), F(2), F(-1)], [F(3), F(0), F(1, 2)], [F(0), F(1), F(2)]]
    ti = trace_identity_check(s, e)
    assert ti.residual == 0.0


def test_rank_one_extension_of_heisenberg_is_complex_hyperbolic():
    ext = rank_one_extension(heisenberg3())
    assert ext.bracket.is_exact_mode
    assert ext.bracket.coeffs == ch2().bracket.coeffs
    assert einstein_check(ext).ok


def test_rank_one_extension_of_filiform():
    ext = rank_one_extension(filiform4())
    root5 = float(np.sqrt(5.0))
    expect = {(2, 3, 4): 1.0, (2, 4, 5): 1.0,
              (1, 2, 2): 0.5 / root5, (1, 3, 3): 1.0 / root5,
              (1, 4, 4): 1.5 / root5, (1, 5, 5): 2.0 / root5}
    assert set(ext.bracket.coeffs) == set(expect)
    for key, val in expect.items():
        assert abs(ext.bracket.coeffs[key] - val) < 1e-12
    ec = einstein_check(ext)
    assert ec.ok and abs(float(ec.c) + 1.5) < 1e-12


def test_rank_one_extension_of_abelian_is_hyperbolic():
    ext = rank_one_extension(abelian(3))
    assert ext.bracket.coeffs == rh_space(3).bracket.coeffs
    ext2 = rank_one_extension(abelian(2), c=F(-1, 2))
    assert ext2.bracket.coeffs == {(1, 2, 2): F(1, 2), (1, 3, 3): F(1, 2)}
    assert einstein_check(ext2).c == F(-1, 2)


def test_rank_one_extension_rejections():
    with pytest.raises(ValueError, match="negative"):
        rank_one_extension(abelian(2), c=0)
    stretched = act(np.diag([1.0, 1.0, 1.0, 2.0]), filiform4().to_float())
    with pytest.raises(ValueError, match="not a nilsoliton"):
        rank_one_extension(stretched)


def test_audit_on_complex_hyperbolic_is_exactly_zero():
    aud = standardness_audit(ch2())
    assert not aud.mu_zero_branch
    assert aud.beta.entries == (F(-1), F(-1), F(1))
    assert aud.shift_factor == F(3)
    assert aud.c == F(-3, 2)
    assert aud.lhs == 0 and aud.term1 == 0 and aud.term2 == 0 and aud.term3 == 0
    assert aud.identity_residual == 0.0
    assert aud.tr_e_sq_residual == 0.0 and aud.tr_adh_residual == 0.0
    assert aud.in_w_ok and aud.nonneg_ok
    assert aud.einstein.ok and aud.standard.ok and aud.forces_standard
    d = aud.to_json_dict()
    assert d["beta"] == ["-1", "-1", "1"] and d["terms"] == ["0", "0", "0"]


def test_audit_on_filiform_extension():
    aud = standardness_audit(rank_one_extension(filiform4()))
    assert aud.beta.entries == (F(-1), F(-1, 2), F(0), F(1, 2))
    assert abs(float(aud.lhs)) < 1e-12
    assert aud.identity_residual < 1e-12
    assert aud.forces_standard


def test_audit_zero_branch_on_hyperbolic_space():
    aud = standardness_audit(rh_space(2))
    assert aud.mu_zero_branch and aud.beta is None
    assert aud.shift_factor == F(1)
    assert aud.lhs == 0 and aud.identity_residual == 0.0
    assert aud.forces_standard


def test_audit_flags_nonstandard_complement():
    aud = standardness_audit(nonstandard_heisenberg())
    assert aud.mu_zero_branch
    assert aud.lhs == F(-1, 6)
    assert aud.term2 == F(1, 2)
    assert aud.identity_residual == pytest.approx(2 / 3)
    assert not aud.einstein.ok
    assert not aud.standard.ok
    assert not aud.forces_standard


def test_audit_detects_broken_einstein_metric():
    # stretching ad A by 11/10 leaves standardness but destroys Einstein
    coeffs = {(2, 3, 4): F(1), (1, 2, 2): F(11, 20),
              (1, 3, 3): F(11, 20), (1, 4, 4): F(11, 10)}
    s = MetricSolvableAlgebra.create(1, 3, BracketTensor.make(4, coeffs))
    aud = standardness_audit(s)
    assert aud.lhs == F(21, 100)
    assert aud.term1 == 0 and aud.term2 == 0 and aud.term3 == 0
    assert not aud.einstein.ok
    assert not aud.forces_standard


def test_audit_rejects_wrong_label_via_membership():
    aud = standardness_audit(ch2(), beta=DiagonalWeight.make([0, 0, -1]))
    assert not aud.in_w_ok
