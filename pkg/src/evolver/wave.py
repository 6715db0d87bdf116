"""Galerkin sections of a damped wave equation with periodic coefficients.

The scalar model is

    u_tt + beta(t) u_t + A u + f(t, u) = 0,   u(0) = u(ell) = 0,

truncated to the first k Dirichlet sine modes of A = -d^2/dx^2 on (0, ell)
(eigenvalues lam_i = (i pi / ell)^2).  In mode coordinates z = (a, b) the
first-order form has the block family

    A(t) = [[0, I], [-Lam, -beta(t) I]],

which is dissipative in the shifted energy inner product

    <(u1, v1), (u2, v2)>_eta = (u1, u2)_{1/2} + (v1 + eta u1, v2 + eta u2)_0

for suitable eta in (0, 1].  The nonlinearity enters the velocity slot,
F(t, (u, v)) = (0, -N_f(t, u)), with N_f projected onto the modes by
sine collocation at 4k interior nodes (exact on the resolved modes).

The module selects eta, certifies decay rates, checks the energy balance
and the eigenmode invariance of the evolution system, runs linearized
nondegeneracy diagnostics, and locates T-periodic states by shooting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .averaging import average_generator, monodromy, unit_eigenvalue_gap
from .errors import ConfigError, InvalidInputError
from .evolsys import GeneratorFamily, build_evolution, scale_family
from .mild import (
    DEFAULT_GRID,
    FixedPointResult,
    NonlinearField,
    Trajectory,
    fixed_point,
    mild_solve,
)
from .semigroup import dissipativity_rate

MAX_MODES = 64


@dataclass(frozen=True)
class EtaMetric:
    """Shifted energy metric in mode coordinates.

    G realizes the eta-inner product; c_lo/c_hi are the equivalence
    constants to the plain energy norm |u|_{1/2}^2 + |v|_0^2:
    c_lo ||z||_E <= ||z||_eta <= c_hi ||z||_E.
    """

    eta: float
    G: np.ndarray
    c_lo: float
    c_hi: float


def eta_metric_matrix(eigs, eta: float) -> np.ndarray:
    """G with z^T G z = sum_i lam_i a_i^2 + sum_i (b_i + eta a_i)^2."""
    lam = np.asarray(eigs, dtype=float)
    k = len(lam)
    G = np.zeros((2 * k, 2 * k))
    G[:k, :k] = np.diag(lam + eta ** 2)
    G[:k, k:] = eta * np.eye(k)
    G[k:, :k] = eta * np.eye(k)
    G[k:, k:] = np.eye(k)
    return G


def _eta_metric(eigs, eta: float) -> EtaMetric:
    lam = np.asarray(eigs, dtype=float)
    G = eta_metric_matrix(lam, eta)
    G0 = np.diag(np.concatenate([lam, np.ones(len(lam))]))
    gen = scipy.linalg.eigh(G, G0, eigvals_only=True)
    return EtaMetric(eta=float(eta), G=G, c_lo=float(np.sqrt(gen[0])),
                     c_hi=float(np.sqrt(gen[-1])))


@dataclass(frozen=True)
class WaveModel:
    """A k-mode Galerkin section of the damped wave problem."""

    ell: float
    k: int
    eigs: np.ndarray
    beta: Callable[[float], float]
    T: float
    f: Callable | None
    f_inf: float
    lipschitz: float
    growth: float
    beta0: float
    gamma: float
    eta_metric: EtaMetric
    family: GeneratorFamily
    colloc_nodes: np.ndarray
    colloc_matrix: np.ndarray
    colloc_weight: float

    @property
    def dim(self) -> int:
        return 2 * self.k


@dataclass(frozen=True)
class EtaSelection:
    """Result of the damping-shift optimization."""

    eta: float
    rate_analytic: float
    rate_numeric: float
    beta0: float
    gamma: float


def _analytic_rate(eta: float, beta0: float, gamma: float) -> float:
    return min(eta / 2.0, beta0 - eta - eta * gamma ** 2 / 2.0)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _block_family(eigs, beta, T: float, metric=None, omega: float = 0.0,
                  coupling=None) -> GeneratorFamily:
    lam = np.asarray(eigs, dtype=float)
    k = len(lam)
    top = np.hstack([np.zeros((k, k)), np.eye(k)])

    def A(t):
        damp = beta(t) * np.eye(k)
        if coupling is not None:
            damp = damp + coupling
        return np.vstack([top, np.hstack([-np.diag(lam), -damp])])

    return GeneratorFamily(dim=2 * k, A=A, T=T, omega=omega, metric=metric,
                           periodic=True)


def build_wave_model(ell: float, k: int, beta, T: float, f=None,
                     f_inf: float = 0.0, lipschitz: float = 0.0,
                     growth: float = 0.0, eta: float | None = None,
                     time_samples: int = 2049):
    """Assemble the k-mode model and its generator family.

    beta: callable t -> damping coefficient, must stay positive on [0, T]
    f: callable (t, s) -> scalar nonlinearity, broadcasting over arrays s
    f_inf: asymptotic slope of f; must keep distance > 1e-6 from both
    {lam_i} and {-lam_i}, else the linearized problem can be resonant
    eta: damping shift; selected by maximizing the analytic rate if None

    Returns (model, family); the family carries the eta metric.
    """
    if not (np.isfinite(ell) and ell > 0):
        raise InvalidInputError("domain length ell must be positive")
    if k < 1 or k > MAX_MODES:
        raise InvalidInputError(f"mode count k must lie in [1, {MAX_MODES}]")
    if not (np.isfinite(T) and T > 0):
        raise InvalidInputError("period T must be positive")
    idx = np.arange(1, k + 1)
    eigs = (idx * np.pi / ell) ** 2

    ts = np.linspace(0.0, T, time_samples)
    beta_vals = np.array([float(beta(t)) for t in ts])
    if not np.all(np.isfinite(beta_vals)):
        raise InvalidInputError("damping beta produced non-finite values")
    beta0 = float(np.min(beta_vals))
    if beta0 <= 0.0:
        raise InvalidInputError(
            f"damping must stay positive: min beta = {beta0} on the sampled grid"
        )
    gamma = float(np.max(beta_vals + 1.0) / np.sqrt(eigs[0]))

    dist = min(float(np.min(np.abs(f_inf - eigs))),
               float(np.min(np.abs(f_inf + eigs))))
    if dist <= 1e-6:
        raise InvalidInputError(
            f"asymptotic slope f_inf = {f_inf} is within 1e-6 of the spectrum"
        )

    if eta is None:
        eta = _select_eta_value(beta0, gamma)
    if not (0.0 < eta <= 1.0):
        raise InvalidInputError("eta must lie in (0, 1]")
    metric = _eta_metric(eigs, eta)

    family = _block_family(eigs, beta, T, metric=metric.G)
    rate_numeric = min(
        dissipativity_rate(family.A(t), metric.G) for t in ts[:: max(1, len(ts) // 129)]
    )
    family = _block_family(eigs, beta, T, metric=metric.G,
                           omega=float(rate_numeric))

    M = 4 * k
    nodes = ell * np.arange(1, M + 1) / (M + 1)
    Phi = np.sqrt(2.0 / ell) * np.sin(
        np.outer(np.arange(1, M + 1), idx) * np.pi / (M + 1)
    )
    model = WaveModel(
        ell=float(ell), k=int(k), eigs=eigs, beta=beta, T=float(T), f=f,
        f_inf=float(f_inf), lipschitz=float(lipschitz), growth=float(growth),
        beta0=beta0, gamma=gamma, eta_metric=metric, family=family,
        colloc_nodes=nodes, colloc_matrix=Phi, colloc_weight=ell / (M + 1),
    )
    return model, family


def _select_eta_value(beta0: float, gamma: float) -> float:
    ub = min(1.0, beta0 / (1.0 + gamma ** 2 / 2.0))
    if not (np.isfinite(ub) and ub > 0):
        raise ConfigError(f"no admissible damping shift: beta0 = {beta0}")
    return _golden_max(lambda e: _analytic_rate(e, beta0, gamma),
                       1e-9 * ub, ub * (1.0 - 1e-12))


def select_eta(model: WaveModel, time_grid=None) -> EtaSelection:
    """Optimal damping shift for the model's beta profile.

    Maximizes the analytic rate min(eta/2, beta0 - eta - eta gamma^2/2)
    over eta in (0, min(1, beta0/(1 + gamma^2/2))) by golden section and
    reports the numerically exact rate of the family in the resulting
    metric (minimum of the dissipativity rate over time_grid, default
    257 uniform nodes).  The numeric rate is authoritative; the analytic
    one is its certified lower bound.
    """
    eta = _select_eta_value(model.beta0, model.gamma)
    rate_a = _analytic_rate(eta, model.beta0, model.gamma)
    G = eta_metric_matrix(model.eigs, eta)
    if time_grid is None:
        time_grid = np.linspace(0.0, model.T, 257)
    fam = _block_family(model.eigs, model.beta, model.T)
    rate_n = min(dissipativity_rate(fam.A(t), G) for t in np.asarray(time_grid))
    return EtaSelection(eta=float(eta), rate_analytic=float(rate_a),
                        rate_numeric=float(rate_n), beta0=model.beta0,
                        gamma=model.gamma)


def eta_inner(z1, z2, model: WaveModel) -> float:
    """The eta-inner product of two states in mode coordinates."""
    a = np.asarray(z1, dtype=float)
    b = np.asarray(z2, dtype=float)
    if a.shape != (model.dim,) or b.shape != (model.dim,):
        raise InvalidInputError("states must be vectors of length 2k")
    return float(a @ (model.eta_metric.G @ b))


def eta_norm(z, model: WaveModel) -> float:
    return float(np.sqrt(max(eta_inner(z, z, model), 0.0)))


def project_nonlinearity(model: WaveModel, t, a):
    """Mode coefficients of x -> f(t, u(x)) for u = sum a_i phi_i.

    Collocation at the 4k sine nodes; exact for integrands in the span
    of the resolved modes.  Batched over leading axes of a.
    """
    if model.f is None:
        raise InvalidInputError("model has no nonlinearity")
    a = np.asarray(a, dtype=float)
    u_vals = a @ model.colloc_matrix.T
    f_vals = np.asarray(model.f(t, u_vals), dtype=float)
    return model.colloc_weight * (f_vals @ model.colloc_matrix)


def nonlinear_field(model: WaveModel) -> NonlinearField:
    """The state-space lift F(t, (a, b)) = (0, -N_f(t, a)) of the nonlinearity."""
    k = model.k

    def F(t, z):
        z = np.asarray(z, dtype=float)
        c = project_nonlinearity(model, t, z[..., :k])
        out = np.zeros_like(z)
        out[..., k:] = -c
        return out

    # the collocation projector is nonexpansive on the resolved modes
    return NonlinearField(F=F, lipschitz=model.lipschitz,
                          growth=model.growth * max(1.0, np.sqrt(model.ell)),
                          periodic=True)


@dataclass
class EnergyReport:
    """Finite-difference audit of the energy balance along a trajectory.

    energy_residual[i] compares d/dt (|u|_{1/2}^2 + |v|_0^2)/2 with
    -beta(t) |v|_0^2 + (f, v)_0 at interior nodes; position_residual
    audits d/dt |u|_0^2 / 2 = (u, v)_0.
    """

    times: np.ndarray
    energy_residual: np.ndarray
    position_residual: np.ndarray

    @property
    def max_energy_residual(self) -> float:
        return float(np.max(np.abs(self.energy_residual)))

    @property
    def max_position_residual(self) -> float:
        return float(np.max(np.abs(self.position_residual)))


def energy_residual(traj: Trajectory, model: WaveModel, f_path=None) -> EnergyReport:
    """Check the energy identity on a computed trajectory.

    f_path: (m+1, k) mode coefficients of the velocity-slot forcing
    (zero if None).  The residual scales like O(grid step) plus the
    frozen-coefficient error of the evolution build.
    """
    z = np.asarray(traj.states, dtype=float)
    if z.ndim != 2 or z.shape[1] != model.dim:
        raise InvalidInputError("trajectory must be a single path of 2k states")
    k = model.k
    a = z[:, :k]
    b = z[:, k:]
    times = traj.times
    h = times[1] - times[0]
    lam = model.eigs
    E = 0.5 * ((a ** 2) @ lam + np.sum(b ** 2, axis=1))
    P = 0.5 * np.sum(a ** 2, axis=1)
    dE = (E[2:] - E[:-2]) / (2.0 * h)
    dP = (P[2:] - P[:-2]) / (2.0 * h)
    beta_vals = np.array([float(model.beta(t)) for t in times[1:-1]])
    rhs = -beta_vals * np.sum(b[1:-1] ** 2, axis=1)
    if f_path is not None:
        f_path = np.asarray(f_path, dtype=float)
        if f_path.shape != (len(times), k):
            raise InvalidInputError("forcing path must have shape (m+1, k)")
        rhs = rhs + np.sum(f_path[1:-1] * b[1:-1], axis=1)
    pos_rhs = np.sum(a[1:-1] * b[1:-1], axis=1)
    return EnergyReport(
        times=times[1:-1],
        energy_residual=dE - rhs,
        position_residual=dP - pos_rhs,
    )


def _embed(z: np.ndarray, k_small: int, k_big: int) -> np.ndarray:
    out = np.zeros(2 * k_big)
    out[:k_small] = z[:k_small]
    out[k_big:k_big + k_small] = z[k_small:]
    return out


def spectral_invariance_gap(model_k: WaveModel, model_kp: WaveModel,
                            t: float, s: float, n: int = 256,
                            coupling=None) -> float:
    """How far the larger section fails to restrict to the smaller one.

    Builds both evolution systems at subdivision n and returns
    max over the 2k basis states e of || R_kp(t, s) embed(e) - embed(R_k(t, s) e) ||.
    For the diagonal damped wave family the modes never couple, so the
    gap is roundoff-level; a nonzero coupling matrix (applied to the
    damping block of both sections) destroys the invariance and serves
    as a negative control.
    """
    if model_k.k >= model_kp.k:
        raise InvalidInputError("need k < k'")
    if abs(model_k.ell - model_kp.ell) > 1e-12 or abs(model_k.T - model_kp.T) > 1e-12:
        raise InvalidInputError("sections must share domain length and period")
    ka, kb = model_k.k, model_kp.k
    Ca = None if coupling is None else np.asarray(coupling, dtype=float)[:ka, :ka]
    Cb = None if coupling is None else np.asarray(coupling, dtype=float)
    fam_a = _block_family(model_k.eigs, model_k.beta, model_k.T, coupling=Ca)
    fam_b = _block_family(model_kp.eigs, model_kp.beta, model_kp.T, coupling=Cb)
    Ra = build_evolution(fam_a, n)
    Rb = build_evolution(fam_b, n)
    gap = 0.0
    for j in range(2 * ka):
        e = np.zeros(2 * ka)
        e[j] = 1.0
        big = Rb.apply(t, s, _embed(e, ka, kb))
        small = Ra.apply(t, s, e)
        gap = max(gap, float(np.linalg.norm(big - _embed(small, ka, kb))))
    return gap


@dataclass
class NondegeneracyRow:
    lam: float
    unit_gap: float
    ok: bool


@dataclass
class NondegeneracyReport:
    """Linearized-at-infinity diagnostics for the periodic problem.

    kernel_sigma_min is the smallest singular value of A_hat + F_inf_hat
    (zero means the averaged linearization has a kernel); each row holds
    the distance of the monodromy spectrum from 1 at one lam.
    """

    f_inf: float
    kernel_sigma_min: float
    kernel_ok: bool
    rows: list

    @property
    def verdict(self) -> bool:
        return self.kernel_ok and all(r.ok for r in self.rows)


def linear_nondegeneracy(model: WaveModel, lambdas: Sequence[float],
                         f_inf: float | None = None, n: int = 1024,
                         unit_tol: float = 1e-8) -> NondegeneracyReport:
    """Monodromy and averaged-kernel checks for the linearization at infinity.

    The lift of the asymptotic slope is F_inf(u, v) = (0, -f_inf u).
    A detected resonance yields a failing verdict, not an exception.
    """
    fi = model.f_inf if f_inf is None else float(f_inf)
    k = model.k
    B = np.zeros((2 * k, 2 * k))
    B[k:, :k] = -fi * np.eye(k)
    A_hat = average_generator(model.family)
    sig = np.linalg.svd(A_hat + B, compute_uv=False)
    kernel_sigma_min = float(sig[-1])
    kernel_ok = kernel_sigma_min > unit_tol
    rows = []
    for lam in lambdas:
        M = monodromy(model.family, lambda t: B, float(lam), n=n)
        gap = unit_eigenvalue_gap(M)
        rows.append(NondegeneracyRow(lam=float(lam), unit_gap=gap,
                                     ok=gap > unit_tol))
    return NondegeneracyReport(f_inf=fi, kernel_sigma_min=kernel_sigma_min,
                               kernel_ok=kernel_ok, rows=rows)


@dataclass
class WavePeriodicResult:
    """A located T-periodic state with its trajectory and eta-norm residual."""

    trajectory: Trajectory
    fixed_point: FixedPointResult
    residual_eta: float


def find_periodic_wave(model: WaveModel, lam: float = 1.0, x_init=None,
                       n: int = 2048, grid: int = DEFAULT_GRID,
                       fp_tol: float = 1e-10) -> WavePeriodicResult:
    """Locate a T-periodic state of z' = lam (A(t) z + F(t, z)) by shooting.

    Newton-on-the-period-map from x_init (origin by default); the
    reported residual is ||z(T) - z(0)|| in the eta metric.
    """
    if model.f is None:
        raise InvalidInputError("model has no nonlinearity to solve with")
    field = nonlinear_field(model)
    R = build_evolution(scale_family(model.family, lam), n)
    x0 = np.zeros(model.dim) if x_init is None else np.asarray(x_init, dtype=float)
    fp = fixed_point(R, field, lam, x0, method="newton-on-map",
                     tol=fp_tol, grid=grid)
    traj = mild_solve(R, field, fp.x, lam=lam, grid=grid)
    gap = traj.final - fp.x
    residual = float(np.sqrt(max(gap @ (model.eta_metric.G @ gap), 0.0)))
    return WavePeriodicResult(trajectory=traj, fixed_point=fp,
                              residual_eta=residual)
