"""Averaging of periodic families and the small-period degree principle.

For a T-periodic pair (A(t), F(t, x)) the averaged pair is

    A_hat = (1/T) integral_0^T A(t) dt,
    F_hat(x) = (1/T) integral_0^T F(t, x) dt.

Zeros of A_hat x + F_hat(x) organize the T-periodic states of
u' = lam (A(t) u + F(t, u)) for small lam > 0: fixed points of the period
map branch from them, and the degree of I - Phi_T^lam on a region U
agrees with the degree of the averaged field once lam is below an
empirically detected threshold.  This module tabulates both effects and
computes monodromy matrices for linearized nondegeneracy checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .degree import DegreeReport, Region, brouwer_degree, deg_hat
from .errors import (
    ConvergenceError,
    EvolverError,
    InvalidInputError,
    OracleFailureError,
)
from .evolsys import EvolutionSystem, GeneratorFamily, build_evolution, scale_family
from .mild import DEFAULT_GRID, FixedPointResult, fixed_point, mild_solve

QUAD_TOL = 1e-10


def _simpson_doubling(sample, T: float, tol: float, m0: int = 16,
                      m_max: int = 2 ** 20):
    """Composite Simpson with interval doubling until two levels agree.

    sample(ts) -> stacked values at the nodes ts; returns (mean, m_used).
    """
    def level(m):
        ts = np.linspace(0.0, T, m + 1)
        vals = sample(ts)
        w = np.ones(m + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w = w.reshape((m + 1,) + (1,) * (vals.ndim - 1))
        # composite Simpson divided by T: the mean is sum(w v) / (3 m)
        return np.sum(w * vals, axis=0) / (3.0 * m)

    m = m0
    prev = level(m)
    while m <= m_max:
        m *= 2
        cur = level(m)
        if float(np.max(np.abs(cur - prev))) <= tol:
            return cur, m
        prev = cur
    raise OracleFailureError(
        f"Simpson refinement did not reach {tol:.1e} by m = {m_max}"
    )


def average_generator(family: GeneratorFamily, tol: float = QUAD_TOL) -> np.ndarray:
    """Time average (1/T) integral of A(t), adaptive Simpson to tol."""
    def sample(ts):
        return np.stack([np.asarray(family.A(t), dtype=float) for t in ts])

    mean, _ = _simpson_doubling(sample, family.T, tol)
    return mean


def average_field(F, x, T: float, tol: float = QUAD_TOL) -> np.ndarray:
    """Time average (1/T) integral of F(t, x) at fixed x (batched over x)."""
    x = np.asarray(x, dtype=float)

    def sample(ts):
        return np.stack([np.asarray(F(float(t), x), dtype=float) for t in ts])

    mean, _ = _simpson_doubling(sample, T, tol)
    return mean


@dataclass(frozen=True)
class AveragedField:
    """Averaged pair with a frozen quadrature rule for fast re-evaluation.

    The Simpson node count is fixed at construction (doubled until two
    levels agree at the probe states), so F_hat is pure and deterministic.
    """

    A_hat: np.ndarray
    F_hat: Callable
    T: float
    nodes: int


def averaged_pair(family: GeneratorFamily, F, probes=None,
                  tol: float = QUAD_TOL) -> AveragedField:
    """Build the averaged pair (A_hat, F_hat) for a family and field."""
    A_hat = average_generator(family, tol)
    if probes is None:
        probes = np.zeros((1, family.dim))
    probes = np.atleast_2d(np.asarray(probes, dtype=float))

    def sample(ts):
        return np.stack([np.asarray(F(float(t), probes), dtype=float) for t in ts])

    _, m = _simpson_doubling(sample, family.T, tol)
    ts = np.linspace(0.0, family.T, m + 1)
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w /= 3.0 * m

    def _mean_at(x):
        tcol = ts.reshape((-1,) + (1,) * x.ndim)
        try:
            vals = np.asarray(F(tcol, x[None, ...]), dtype=float)
            if vals.shape == (len(ts),) + x.shape:
                return np.tensordot(w, vals, axes=(0, 0))
        except Exception:
            pass
        acc = w[0] * np.asarray(F(float(ts[0]), x), dtype=float)
        for wi, ti in zip(w[1:], ts[1:]):
            acc = acc + wi * np.asarray(F(float(ti), x), dtype=float)
        return acc

    def F_hat(x):
        x = np.asarray(x, dtype=float)
        if x.ndim <= 1:
            return _mean_at(x)
        # chunk large batches so the (nodes, batch, d) intermediate stays small
        flat = x.reshape(-1, x.shape[-1])
        step = max(1, 2_000_000 // (len(ts) * x.shape[-1]))
        parts = [_mean_at(flat[i:i + step]) for i in range(0, len(flat), step)]
        return np.concatenate(parts).reshape(x.shape)

    return AveragedField(A_hat=A_hat, F_hat=F_hat, T=family.T, nodes=m)


def mu_rescale(family: GeneratorFamily, mu: float) -> GeneratorFamily:
    """The deformation A_mu(t) = -mu I + (1 - mu) A(t), mu in [0, 1].

    Interpolates the family toward -I while keeping dissipativity: the
    rate of A_mu is at least mu + (1 - mu) * rate(A) >= min(mu, rate(A)).
    """
    if not (0.0 <= mu <= 1.0):
        raise InvalidInputError(f"mu must lie in [0, 1], got {mu}")
    base = family.A
    d = family.dim
    return GeneratorFamily(
        dim=d,
        A=lambda t: -mu * np.eye(d) + (1.0 - mu) * np.asarray(base(t), dtype=float),
        T=family.T,
        omega=mu + (1.0 - mu) * family.omega,
        metric=family.metric,
        periodic=family.periodic,
    )


@dataclass
class BranchingRow:
    lam: float
    ok: bool
    x: np.ndarray | None = None
    defect: float = float("nan")
    residual: float = float("nan")
    iterations: int = 0
    error: str = ""


@dataclass
class BranchingReport:
    """Fixed points of the period map along a descending lam ladder."""

    rows: list
    averaged: AveragedField

    @property
    def defects(self) -> list[float]:
        return [r.defect for r in self.rows if r.ok]

    @property
    def defect_ratio(self) -> float:
        ds = self.defects
        if len(ds) < 2 or ds[0] == 0:
            return float("nan")
        return ds[-1] / ds[0]


def branching_experiment(family: GeneratorFamily, F, lambdas: Sequence[float],
                         U: Region, n: int = 1024, grid: int = DEFAULT_GRID,
                         fp_tol: float = 1e-10, fp_method: str = "newton-on-map",
                         averaged: AveragedField | None = None) -> BranchingReport:
    """Track the period-map fixed point as lam decreases and measure
    its averaged-field defect ||A_hat x_lam + F_hat(x_lam)||.

    The defect decays like O(lam): fixed points accumulate on the zero
    of the averaged field.  A failed solve marks its row and the sweep
    continues (warm starts skip the failed rung).
    """
    lams = [float(l) for l in lambdas]
    if any(l <= 0 for l in lams):
        raise InvalidInputError("lambda values must be positive")
    if any(a <= b for a, b in zip(lams, lams[1:])):
        raise InvalidInputError("lambda ladder must be strictly descending")
    avg = averaged if averaged is not None else averaged_pair(family, F, probes=U.midpoint)
    rows: list[BranchingRow] = []
    x_start = U.midpoint
    for lam in lams:
        R = build_evolution(scale_family(family, lam), n)
        try:
            fp = fixed_point(R, F, lam, x_start, method=fp_method,
                             tol=fp_tol, grid=grid)
        except EvolverError as exc:
            rows.append(BranchingRow(lam=lam, ok=False, error=str(exc)))
            continue
        defect = float(np.linalg.norm(avg.A_hat @ fp.x + avg.F_hat(fp.x)))
        rows.append(BranchingRow(lam=lam, ok=True, x=fp.x, defect=defect,
                                 residual=fp.residual, iterations=fp.iterations))
        x_start = fp.x
    return BranchingReport(rows=rows, averaged=avg)


def monodromy(family: GeneratorFamily, F_inf, lam: float, n: int = 1024) -> np.ndarray:
    """Fundamental matrix over [0, T] of z' = lam (A(t) + F_inf(t)) z.

    F_inf: map t -> matrix (the linearization of the field at infinity).
    Built with the frozen-coefficient product at subdivision n.
    """
    if lam < 0:
        raise InvalidInputError("lam must be nonnegative")
    base = family.A
    combined = GeneratorFamily(
        dim=family.dim,
        A=lambda t: lam * (np.asarray(base(t), dtype=float)
                           + np.asarray(F_inf(t), dtype=float)),
        T=family.T,
        omega=0.0,
        metric=family.metric,
        periodic=family.periodic,
    )
    system = build_evolution(combined, n)
    return system.prefix[n].copy()


def unit_eigenvalue_gap(M) -> float:
    """min |eig(M) - 1|: distance of the spectrum from the periodicity eigenvalue."""
    eigs = np.linalg.eigvals(np.asarray(M, dtype=float))
    return float(np.min(np.abs(eigs - 1.0)))


@dataclass
class AveragingRow:
    lam: float
    boundary_ok: bool
    boundary_min: float
    degree: int | None = None
    agrees: bool | None = None
    error: str = ""


@dataclass
class AveragingDegreeReport:
    """Degree of I - Phi_T^lam against the averaged degree, per lam."""

    d0: int
    d0_report: DegreeReport
    rows: list
    lambda0: float | None

    @property
    def verdict(self) -> bool:
        if self.lambda0 is None:
            return False
        return all(
            r.degree == self.d0 for r in self.rows
            if r.boundary_ok and r.lam <= self.lambda0 + 1e-15
        )


def averaging_degree_check(family: GeneratorFamily, F, U: Region,
                           lambdas: Sequence[float], n: int = 256,
                           grid: int = 256, degree_grid: int = 8,
                           boundary_m: int = 128,
                           picard_tol: float = 1e-10,
                           averaged: AveragedField | None = None) -> AveragingDegreeReport:
    """Compare deg(I - Phi_T^lam, U) with the averaged degree along lambdas.

    d0 = deg(x + A_hat^{-1} F_hat(x), U).  For each lam the boundary of U
    is screened for fixed points of Phi_T (margin 1e-6 * (1 + field
    scale)); when clear, the degree of x - Phi_T(x) is computed.  The
    empirical threshold lambda0 is the largest sampled lam such that it
    and every smaller sampled lam pass the boundary screen.  Equality
    with d0 is expected for all sampled lam <= lambda0.
    """
    avg = averaged if averaged is not None else averaged_pair(family, F, probes=U.midpoint)
    d0_report = deg_hat(avg.A_hat, avg.F_hat, U,
                        grid=degree_grid, boundary_m=boundary_m)
    rows: list[AveragingRow] = []
    for lam in lambdas:
        R = build_evolution(scale_family(family, float(lam)), n)

        def g(x):
            x = np.asarray(x, dtype=float)
            single = x.ndim == 1
            batch = x[None, :] if single else x
            traj = mild_solve(R, F, batch, lam=float(lam), grid=grid, tol=picard_tol)
            out = batch - traj.final
            return out[0] if single else out

        samples = U.boundary_samples(boundary_m)
        vals = np.asarray(g(samples), dtype=float)
        norms = np.linalg.norm(vals, axis=-1)
        scale = float(np.max(norms))
        delta = 1e-6 * (1.0 + scale)
        bmin = float(np.min(norms))
        if bmin <= delta:
            rows.append(AveragingRow(lam=float(lam), boundary_ok=False,
                                     boundary_min=bmin,
                                     error="boundary fixed point suspected"))
            continue
        try:
            rep = brouwer_degree(g, U, grid=degree_grid, boundary_m=boundary_m,
                                 delta=delta)
            rows.append(AveragingRow(lam=float(lam), boundary_ok=True,
                                     boundary_min=bmin, degree=rep.value,
                                     agrees=(rep.value == d0_report.value)))
        except EvolverError as exc:
            rows.append(AveragingRow(lam=float(lam), boundary_ok=True,
                                     boundary_min=bmin, error=str(exc)))
    lambda0 = None
    for lam in sorted(r.lam for r in rows):
        row = next(r for r in rows if r.lam == lam)
        if row.boundary_ok and row.degree is not None:
            lambda0 = lam
        else:
            break
    return AveragingDegreeReport(d0=d0_report.value, d0_report=d0_report,
                                 rows=rows, lambda0=lambda0)
