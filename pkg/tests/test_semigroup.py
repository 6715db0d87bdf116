import numpy as np
import pytest
import scipy.integrate

from evolver import (
    ChernoffScheme,
    ChernoffSequence,
    ContractionSemigroup,
    InvalidInputError,
    InvalidMetricError,
    PreconditionError,
    chernoff_defect,
    chernoff_power_limit,
    chernoff_sum_limit,
    dissipativity_rate,
    exponential_scheme,
    mat_exp,
    metric_cholesky,
    metric_norm,
    metric_operator_norm,
    resolvent_scheme,
)

from oracles import svd_norm


def test_metric_cholesky_validation():
    with pytest.raises(InvalidMetricError):
        metric_cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))  # not symmetric
    with pytest.raises(InvalidMetricError):
        metric_cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))  # indefinite
    L = metric_cholesky(np.array([[4.0, 0.0], [0.0, 9.0]]))
    assert np.allclose(L @ L.T, np.diag([4.0, 9.0]))


def test_metric_norm_and_operator_norm():
    G = np.array([[4.0, 0.0], [0.0, 1.0]])
    assert metric_norm([1.0, 0.0], G) == pytest.approx(2.0)
    # congruence: G-norm of M equals Euclidean norm of L^T M L^{-T}
    rng = np.random.default_rng(5)
    for _ in range(20):
        M = rng.standard_normal((2, 2))
        L = np.linalg.cholesky(G)
        ref = svd_norm(L.T @ M @ np.linalg.inv(L).T)
        assert metric_operator_norm(M, G) == pytest.approx(ref, abs=1e-12)


def test_dissipativity_rate_frozen_example():
    A = np.array([[0.0, 1.0], [-1.0, -2.0]])
    assert dissipativity_rate(A) == pytest.approx(0.0, abs=1e-12)
    assert dissipativity_rate(np.diag([-1.0, -3.0])) == pytest.approx(1.0)


def test_dissipativity_rate_certifies_decay():
    # e^{tA} must contract at the certified rate in the G norm
    rng = np.random.default_rng(6)
    for _ in range(20):
        d = int(rng.integers(1, 5))
        B = rng.standard_normal((d, d))
        A = B - (svd_norm(B) + 0.1) * np.eye(d)
        W = rng.standard_normal((d, d))
        G = W @ W.T + d * np.eye(d)
        w = dissipativity_rate(A, G)
        for t in (0.1, 0.5, 1.7):
            nrm = metric_operator_norm(mat_exp(A, t), G)
            assert nrm <= np.exp(-w * t) + 1e-9


def test_contraction_semigroup_validate():
    A = np.diag([-1.0, -2.0])
    assert ContractionSemigroup(A, omega=0.5).validate() == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        ContractionSemigroup(A, omega=1.5).validate()


def test_chernoff_defect_scalar_frozen():
    lhs, rhs = chernoff_defect(np.array([[0.5]]), np.array([1.0]), 4)
    assert lhs == pytest.approx(abs(np.exp(-2.0) - 0.0625), abs=1e-14)
    assert rhs == pytest.approx(1.0, abs=1e-14)


def test_chernoff_defect_bound_random_sweep():
    rng = np.random.default_rng(7)
    for _ in range(60):
        d = int(rng.integers(1, 7))
        G = rng.standard_normal((d, d))
        T = G * (rng.uniform(0.2, 0.999) / svd_norm(G))
        x = rng.standard_normal(d)
        n = int(rng.integers(0, 65))
        lhs, rhs = chernoff_defect(T, x, n)
        assert lhs <= rhs + 1e-9


def test_chernoff_defect_preconditions():
    with pytest.raises(PreconditionError):
        chernoff_defect(np.array([[1.5]]), np.array([1.0]), 3)
    with pytest.raises(InvalidInputError):
        chernoff_defect(np.array([[0.5]]), np.array([1.0]), -1)


def _scalar_scheme():
    # L(lam) = 1 - lam: the classic Euler factor with limit generator -1
    return ChernoffScheme(
        L=lambda lam, mu: np.array([[1.0 - lam]]),
        limit_generator=lambda mu: np.array([[-1.0]]),
        dim=1,
    )


def test_power_limit_euler_factor():
    seq = ChernoffSequence(t=1.0, mu0=0.0, ns=(64, 256, 1024, 4096))
    table = chernoff_power_limit(_scalar_scheme(), seq, [1.0])
    # (1 - 1/n)^n -> e^{-1}, error ~ e^{-1}/(2n)
    assert table.errors == sorted(table.errors, reverse=True)
    assert table.errors[-1] < 1e-3
    assert table.converged
    assert table.rate == pytest.approx(1.0, abs=0.1)


def test_power_limit_exact_scheme_has_zero_error():
    A = np.array([[0.0, -1.0], [1.0, -0.5]])
    scheme = exponential_scheme(lambda mu: A, 2)
    seq = ChernoffSequence(t=0.8, mu0=0.0, ns=(4, 16, 64))
    table = chernoff_power_limit(scheme, seq, [1.0, 0.0])
    assert max(table.errors) <= 1e-13


def test_sum_limit_scalar_closed_form():
    seq = ChernoffSequence(t=1.0, mu0=0.0, ns=(16, 64, 256, 1024))
    table = chernoff_sum_limit(_scalar_scheme(), seq, [1.0])
    assert table.target[0] == pytest.approx(1.0 - np.exp(-1.0), abs=1e-10)
    assert table.errors[-1] < 1e-3
    assert table.converged


def test_resolvent_scheme_random_stable_generator():
    rng = np.random.default_rng(8)
    B = rng.standard_normal((3, 3))
    A = B - 1.1 * svd_norm(B) * np.eye(3)
    scheme = resolvent_scheme(lambda mu: A, 3)
    x = rng.standard_normal(3)
    x /= np.linalg.norm(x)
    seq = ChernoffSequence(t=1.0, mu0=0.0, ns=(16, 64, 256, 1024, 4096))
    power = chernoff_power_limit(scheme, seq, x)
    total = chernoff_sum_limit(scheme, seq, x)
    assert power.converged and total.converged
    assert 0.7 <= power.rate <= 1.3  # first-order scheme
    ref, _ = scipy.integrate.quad_vec(lambda s: mat_exp(A, s) @ x, 0.0, 1.0,
                                      epsabs=1e-12, epsrel=1e-12)
    assert np.allclose(total.target, ref, atol=1e-10)


def test_sequence_mu_drift_converges_to_limit_parameter():
    # A(mu) = -(1 + mu) I; mu_n = mu0 + 1/n must still converge to exp(t A(mu0))
    scheme = exponential_scheme(lambda mu: np.array([[-(1.0 + mu)]]), 1)
    seq = ChernoffSequence(t=1.0, mu0=0.5, ns=(16, 64, 256, 1024), mu_drift=1.0)
    table = chernoff_power_limit(scheme, seq, [1.0])
    assert table.target[0] == pytest.approx(np.exp(-1.5), abs=1e-14)
    assert table.errors == sorted(table.errors, reverse=True)
    assert table.errors[-1] < 1e-3


def test_non_contractive_scheme_rejected():
    bad = ChernoffScheme(
        L=lambda lam, mu: np.array([[1.0 + lam]]),
        limit_generator=lambda mu: np.array([[1.0]]),
        dim=1,
    )
    seq = ChernoffSequence(t=1.0, mu0=0.0, ns=(8,))
    with pytest.raises(PreconditionError):
        chernoff_power_limit(bad, seq, [1.0])
    with pytest.raises(PreconditionError):
        chernoff_sum_limit(bad, seq, [1.0])


def test_sequence_validation():
    with pytest.raises(InvalidInputError):
        ChernoffSequence(t=0.0, mu0=0.0, ns=(4,))
    with pytest.raises(InvalidInputError):
        ChernoffSequence(t=1.0, mu0=0.0, ns=(0,))
    with pytest.raises(InvalidInputError):
        ChernoffSequence(t=1.0, mu0=0.0, ns=(4,), kind="bogus")


def test_sequence_ceil_kind_effective_time():
    seq = ChernoffSequence(t=0.25, mu0=0.0, ns=(8, 32), kind="kn=ceil")
    assert seq.effective_time == 1.0
    for n, k, lam, mu in seq.triples():
        assert k == int(np.ceil(n / 0.25))
        assert lam == pytest.approx(0.25 / n)
