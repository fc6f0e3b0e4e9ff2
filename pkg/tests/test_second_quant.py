"""Second quantization: coefficient action, Monte-Carlo representation via
the auxiliary noise eta, and random measures."""

import numpy as np
import pytest

from chaosflow.chaos import chaos_eval, expect_product, moment2, pair_wick, wick_exp
from chaosflow.quadrature import gh_expect
from chaosflow.rng import standard_normal
from chaosflow.second_quant import (
    BoundedOp,
    OperatorNormError,
    gamma_apply,
    gamma_mc,
    identity_op,
    ou_operator,
    projector_op,
    random_measure,
)

from conftest import random_chaos, random_contraction


def test_gamma_identity_and_zero(rng):
    c = random_chaos(rng, dim=3, degree=3)
    same = gamma_apply(identity_op(3), c)
    assert moment2(same - c) == pytest.approx(0.0, abs=1e-24)
    killed = gamma_apply(BoundedOp(np.zeros((3, 3))), c)
    assert killed.expectation() == c.expectation()
    assert moment2(killed) == pytest.approx(c.expectation() ** 2, rel=1e-12)


def test_gamma_norm_guard(rng):
    c = random_chaos(rng, dim=3, degree=2)
    with pytest.raises(OperatorNormError):
        gamma_apply(BoundedOp(1.5 * np.eye(3)), c)


def test_gamma_wick_intertwining(rng):
    # Gamma(C) WickExp(phi) = WickExp(C^T phi): pins the slot convention.
    for _ in range(10):
        C = random_contraction(rng, 3)
        phi = rng.standard_normal(3) * 0.5
        lhs = gamma_apply(BoundedOp(C), wick_exp(phi))
        rhs = wick_exp(C.T @ phi, degree=lhs.degree, tol=np.inf)
        assert moment2(lhs - rhs) == pytest.approx(0.0, abs=1e-20)


def test_gamma_contraction_and_degree(rng):
    c = random_chaos(rng, dim=4, degree=3)
    C = random_contraction(rng, 4)
    out = gamma_apply(BoundedOp(C), c)
    assert moment2(out) <= moment2(c) + 1e-12
    # Degree-k output depends only on the degree-k input.
    for k in range(c.degree + 1):
        got = out.coeff(k).values
        expect = c.coeff(k).map_slots(C).values
        np.testing.assert_allclose(got, expect, atol=1e-15)
    assert out.expectation() == c.expectation()


def test_ou_operator_scaling(rng):
    c = random_chaos(rng, dim=3, degree=3)
    t = 0.5 * np.log(2.0)
    out = gamma_apply(ou_operator(t, 3), c)
    np.testing.assert_allclose(out.coeff(2).values, 0.5 * c.coeff(2).values, rtol=1e-12)
    # Semigroup property.
    s = 0.3
    once = gamma_apply(ou_operator(t + s, 3), c)
    twice = gamma_apply(ou_operator(s, 3), gamma_apply(ou_operator(t, 3), c))
    assert moment2(once - twice) == pytest.approx(0.0, abs=1e-24)
    assert ou_operator(0.0, 3).matrix == pytest.approx(np.eye(3))


def test_projector_is_conditional_expectation(rng):
    e = rng.standard_normal(3)
    e /= np.linalg.norm(e)
    C = projector_op(e)
    phi = rng.standard_normal(3)
    lin = gamma_apply(C, wick_exp(phi, degree=1, tol=np.inf))
    np.testing.assert_allclose(lin.coeff(1).values, (phi @ e) * e, atol=1e-14)
    c = random_chaos(rng, dim=3, degree=3)
    once = gamma_apply(C, c)
    twice = gamma_apply(C, once)
    assert moment2(once - twice) == pytest.approx(0.0, abs=1e-22)
    assert once.expectation() == pytest.approx(c.expectation(), rel=1e-14)


def test_gamma_mc_identity_and_zero(rng):
    c = random_chaos(rng, dim=3, degree=2)
    F = lambda z: chaos_eval(c, z)
    xi = rng.standard_normal(3)
    est = gamma_mc(identity_op(3), F, xi, n=500, seed=1)
    assert est.std_error == pytest.approx(0.0, abs=1e-13)
    assert est.mean == pytest.approx(chaos_eval(c, xi), rel=1e-12)
    est0 = gamma_mc(BoundedOp(np.zeros((3, 3))), F, xi, n=200_000, seed=2)
    assert est0.within(c.expectation(), 3.0)


def test_gamma_mc_matches_coefficient_action(rng):
    """Conditional-mean representation vs the chaos-coefficient action."""
    for trial in range(5):
        C = BoundedOp(random_contraction(rng, 3))
        c = random_chaos(rng, dim=3, degree=3)
        xi = rng.standard_normal(3)
        oracle = chaos_eval(gamma_apply(C, c), xi)
        est = gamma_mc(C, lambda z: chaos_eval(c, z), xi, n=100_000, seed=100 + trial)
        assert est.within(oracle, 3.5), (est, oracle)


def test_gamma_mc_squared_functional(rng):
    # A nonlinear functional: F = (chaos)^2; oracle by exact conditional law.
    # eta | xi ~ N(C xi, I - C C^T), so E[F(eta)|xi] is a 3-dim quadrature.
    C = BoundedOp(random_contraction(rng, 3, norm=0.8))
    c = random_chaos(rng, dim=3, degree=2)
    xi = rng.standard_normal(3)
    root = C.complement_sqrt()
    base = C.matrix @ xi
    F = lambda z: chaos_eval(c, z) ** 2
    oracle = gh_expect(lambda z: F(z @ root.T + base), 3, 10)
    est = gamma_mc(C, F, xi, n=150_000, seed=9)
    assert est.within(oracle, 3.5)


def test_random_measure_identity_atoms(rng):
    C = identity_op(3)
    xi = rng.standard_normal(3)
    X = lambda z: z[:, 0] + z[:, 1] ** 2
    mu = random_measure(C, X, xi, n=100, seed=3)
    np.testing.assert_allclose(mu.atoms, X(xi[None, :])[0], rtol=1e-12)
    assert mu.pair(lambda a: a) == pytest.approx(X(xi[None, :])[0], rel=1e-12)


def test_random_measure_zero_op_is_sampling(rng):
    C = BoundedOp(np.zeros((2, 2)))
    xi = rng.standard_normal(2)
    mu = random_measure(C, lambda z: z[:, 0], xi, n=100_000, seed=4)
    assert abs(mu.mean()) < 3.0 / np.sqrt(100_000) * 1.2
    # Pairing agrees with gamma_mc by construction.
    est = gamma_mc(C, lambda z: np.cos(z[:, 0]), xi, n=50_000, seed=5)
    mu2 = random_measure(C, lambda z: z[:, 0], xi, n=50_000, seed=5)
    assert mu2.pair(np.cos) == pytest.approx(est.mean, rel=1e-12)


def test_lemma_1_1_coverage(rng):
    """|gamma_mc - coefficient oracle| <= 3 SE in at least 99 of 100 trials."""
    hits = 0
    n_trials = 100
    for trial in range(n_trials):
        C = BoundedOp(random_contraction(rng, 3))
        c = random_chaos(rng, dim=3, degree=3)
        xi = standard_normal(seed=5000 + trial, n=1, dim=3)[0]
        oracle = chaos_eval(gamma_apply(C, c), xi)
        est = gamma_mc(C, lambda z: chaos_eval(c, z), xi, n=100_000, seed=7000 + trial)
        if est.within(oracle, 3.0):
            hits += 1
    assert hits >= 99, f"only {hits}/100 trials within 3 SE"


def test_expectation_preserved_under_gamma(rng):
    for _ in range(5):
        C = BoundedOp(random_contraction(rng, 4))
        c = random_chaos(rng, dim=4, degree=3)
        assert gamma_apply(C, c).expectation() == c.expectation()
