"""Contraction semigroups and product-formula approximation schemes.

A scheme is a parametrized family of contractions L(lam, mu) whose
derivative at lam = 0 is a generator A^(mu).  Powers L(lam_n, mu_n)^{k_n}
approximate the limit semigroup exp(t A^(mu0)) when k_n -> infinity,
k_n * lam_n -> t and mu_n -> mu0; the matching Riemann sums approximate
the time integral of the semigroup orbit.  This module tabulates both
limits and the square-root defect bound for single contractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.linalg

from .errors import InvalidInputError, InvalidMetricError, PreconditionError
from .linop import as_matrix, as_vector, mat_exp, operator_norm

CONTRACTION_SLACK = 1e-12


def metric_cholesky(G) -> np.ndarray:
    """Cholesky factor L (G = L L^T) of an SPD metric; raises InvalidMetricError."""
    A = as_matrix(G)
    if not np.allclose(A, A.T, atol=1e-12, rtol=0.0):
        raise InvalidMetricError("metric is not symmetric")
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise InvalidMetricError("metric is not positive definite") from None


def metric_operator_norm(M, G) -> float:
    """Operator norm of M acting on (R^d, <.,.>_G), via congruence to Euclidean."""
    A = as_matrix(M)
    L = metric_cholesky(G)
    return float(np.linalg.norm(L.T @ A @ np.linalg.inv(L).T, 2))


def metric_norm(x, G) -> float:
    """sqrt(x^T G x)."""
    v = np.asarray(x, dtype=float)
    return float(np.sqrt(max(v @ (np.asarray(G, dtype=float) @ v), 0.0)))


def dissipativity_rate(M, G=None) -> float:
    """Largest omega with <x, M x>_G <= -omega <x, x>_G for all x.

    Equals minus the top eigenvalue of the G-symmetrized generator,
    i.e. the generalized eigenproblem for (G M + M^T G)/2 against G.
    G defaults to the identity.
    """
    A = as_matrix(M)
    d = A.shape[0]
    G = np.eye(d) if G is None else np.asarray(G, dtype=float)
    if G.shape != (d, d):
        raise InvalidInputError("metric dimension does not match the generator")
    metric_cholesky(G)
    S = 0.5 * (G @ A + A.T @ G)
    top = scipy.linalg.eigh(S, G, eigvals_only=True)[-1]
    return float(-top)


@dataclass(frozen=True)
class ContractionSemigroup:
    """A generator with a claimed decay rate in a (possibly weighted) metric.

    generator: square matrix M
    omega: claimed rate, <x, Mx>_G <= -omega |x|_G^2
    metric: SPD matrix G, identity when None
    """

    generator: np.ndarray
    omega: float = 0.0
    metric: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "generator", as_matrix(self.generator))
        if self.metric is not None:
            object.__setattr__(self, "metric", as_matrix(self.metric))
            metric_cholesky(self.metric)
        if not np.isfinite(self.omega):
            raise InvalidInputError("omega must be finite")

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    def validate(self) -> float:
        """Return the actual dissipativity rate; raises if below the claimed omega."""
        actual = dissipativity_rate(self.generator, self.metric)
        if actual < self.omega - 1e-10:
            raise PreconditionError(
                f"claimed rate {self.omega} exceeds actual rate {actual}"
            )
        return actual


@dataclass(frozen=True)
class ChernoffScheme:
    """Product-formula scheme L(lam, mu) with parametrized limit generator.

    L: (lam, mu) -> contraction matrix, defined for small lam >= 0
    limit_generator: mu -> matrix A^(mu), the lam-derivative of L at 0
    dim: state dimension
    """

    L: Callable[[float, float], np.ndarray]
    limit_generator: Callable[[float], np.ndarray]
    dim: int


@dataclass(frozen=True)
class ChernoffSequence:
    """Index sequences (k_n, lam_n, mu_n) for the power and sum limits.

    kind "kn=n": k_n = n, lam_n = t/n, effective time t.
    kind "kn=ceil": lam_n = t/n, k_n = ceil(1/lam_n), effective time 1.
    mu_n = mu0 + mu_drift/n drifts toward mu0.
    """

    t: float
    mu0: float
    ns: tuple[int, ...]
    kind: str = "kn=n"
    mu_drift: float = 0.0

    def __post_init__(self):
        if self.kind not in ("kn=n", "kn=ceil"):
            raise InvalidInputError(f"unknown sequence kind {self.kind!r}")
        if self.t <= 0 or not np.isfinite(self.t):
            raise InvalidInputError("sequence time must be positive and finite")
        if any(n < 1 for n in self.ns):
            raise InvalidInputError("sequence indices must be >= 1")

    @property
    def effective_time(self) -> float:
        """lim k_n * lam_n: t for kind 'kn=n', 1 for kind 'kn=ceil'."""
        return self.t if self.kind == "kn=n" else 1.0

    def triples(self):
        """Yield (n, k_n, lam_n, mu_n)."""
        for n in self.ns:
            lam = self.t / n
            k = n if self.kind == "kn=n" else int(np.ceil(1.0 / lam))
            yield n, k, lam, self.mu0 + self.mu_drift / n


@dataclass
class ConvergenceTable:
    """Tabulated approximation errors along a sequence.

    converged: last error below tol and the last three errors nonincreasing.
    rate: least-squares slope of log(error) against log(n) (nan if degenerate).
    """

    ns: list[int] = field(default_factory=list)
    errors: list[float] = field(default_factory=list)
    tol: float = 1e-3
    target: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        if not self.errors or not np.isfinite(self.errors[-1]):
            return False
        if self.errors[-1] >= self.tol:
            return False
        tail = self.errors[-3:]
        return all(a >= b - 1e-15 for a, b in zip(tail, tail[1:]))

    @property
    def rate(self) -> float:
        pos = [(n, e) for n, e in zip(self.ns, self.errors) if e > 0]
        if len(pos) < 2:
            return float("nan")
        ln = np.log([n for n, _ in pos])
        le = np.log([e for _, e in pos])
        return float(-np.polyfit(ln, le, 1)[0])


def chernoff_defect(T_op, x, n: int) -> tuple[float, float]:
    """Square-root defect bound for a single contraction T.

    Returns (lhs, rhs) with
        lhs = ||exp(n (T - I)) x - T^n x||,
        rhs = sqrt(n) ||x - T x||.
    The bound lhs <= rhs holds for every contraction; callers get both
    sides so tests can assert it.  Raises PreconditionError when
    ||T|| > 1 + 1e-12 and InvalidInputError for n < 0.
    """
    T = as_matrix(T_op)
    v = as_vector(x, T.shape[0])
    if n < 0:
        raise InvalidInputError("power n must be nonnegative")
    if operator_norm(T) > 1.0 + CONTRACTION_SLACK:
        raise PreconditionError("T is not a contraction")
    E = mat_exp(n * (T - np.eye(T.shape[0])), 1.0)
    Tn = np.linalg.matrix_power(T, n)
    lhs = float(np.linalg.norm(E @ v - Tn @ v))
    rhs = float(np.sqrt(n) * np.linalg.norm(v - T @ v))
    return lhs, rhs


def _scheme_power(scheme: ChernoffScheme, lam: float, mu: float, k: int, x):
    Lm = as_matrix(scheme.L(lam, mu))
    if operator_norm(Lm) > 1.0 + CONTRACTION_SLACK:
        raise PreconditionError(
            f"scheme is not contractive at lam={lam}, mu={mu}"
        )
    v = np.array(x, dtype=float)
    for _ in range(k):
        v = Lm @ v
    return Lm, v


def chernoff_power_limit(scheme: ChernoffScheme, seq: ChernoffSequence, x) -> ConvergenceTable:
    """Tabulate ||L(lam_n, mu_n)^{k_n} x - exp(t A^(mu0)) x|| along seq.

    t is the sequence's effective time.  Each L(lam_n, mu_n) is checked
    to be a contraction (PreconditionError otherwise).
    """
    v = as_vector(x, scheme.dim)
    t = seq.effective_time
    A0 = as_matrix(scheme.limit_generator(seq.mu0))
    target = mat_exp(A0, t) @ v
    table = ConvergenceTable(target=target)
    for n, k, lam, mu in seq.triples():
        _, approx = _scheme_power(scheme, lam, mu, k, v)
        table.ns.append(n)
        table.errors.append(float(np.linalg.norm(approx - target)))
    return table


def chernoff_sum_limit(scheme: ChernoffScheme, seq: ChernoffSequence, x) -> ConvergenceTable:
    """Tabulate the Riemann-sum limit toward the integrated orbit.

    Compares lam_n * sum_{k < k_n} L(lam_n, mu_n)^k x against
    integral_0^t exp(tau A^(mu0)) x dtau (adaptive quadrature, 1e-12).
    """
    v = as_vector(x, scheme.dim)
    t = seq.effective_time
    A0 = as_matrix(scheme.limit_generator(seq.mu0))
    target, _ = scipy.integrate.quad_vec(
        lambda tau: mat_exp(A0, tau) @ v, 0.0, t, epsabs=1e-12, epsrel=1e-12
    )
    table = ConvergenceTable(target=target)
    for n, k, lam, mu in seq.triples():
        Lm = as_matrix(scheme.L(lam, mu))
        if operator_norm(Lm) > 1.0 + CONTRACTION_SLACK:
            raise PreconditionError(f"scheme is not contractive at lam={lam}, mu={mu}")
        acc = np.zeros_like(v)
        w = v.copy()
        for _ in range(k):
            acc += w
            w = Lm @ w
        table.ns.append(n)
        table.errors.append(float(np.linalg.norm(lam * acc - target)))
    return table


def exponential_scheme(A_of_mu: Callable[[float], np.ndarray], dim: int) -> ChernoffScheme:
    """Scheme L(lam, mu) = exp(lam A^(mu))."""
    return ChernoffScheme(
        L=lambda lam, mu: mat_exp(as_matrix(A_of_mu(mu)), lam),
        limit_generator=A_of_mu,
        dim=dim,
    )


def resolvent_scheme(A_of_mu: Callable[[float], np.ndarray], dim: int) -> ChernoffScheme:
    """Scheme L(lam, mu) = (I - lam A^(mu))^{-1} (implicit Euler step)."""

    def L(lam, mu):
        A = as_matrix(A_of_mu(mu))
        return np.linalg.solve(np.eye(dim) - lam * A, np.eye(dim))

    return ChernoffScheme(L=L, limit_generator=A_of_mu, dim=dim)
