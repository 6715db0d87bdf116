"""Mild solutions of semilinear problems and their period maps.

For an evolution system R built from a dissipative family and a
nonlinear field F, the mild solution with initial state x solves

    u(t) = R(t, 0) x + lam * integral_0^t R(t, s) F(s, u(s)) ds.

The integral is evaluated by composite trapezoid on a uniform grid and
the fixed point is found by Picard iteration in the sup norm.  The
translation-by-t map Phi_t(x) follows, and T-periodic states are the
fixed points of Phi_T, located either by direct iteration or by a damped
Newton method on the period map with finite-difference Jacobians.

All state-space operations broadcast over leading axes, so a batch of
initial states (B, d) is propagated in one sweep; field callables are
expected to broadcast the same way (a per-node fallback handles those
that cannot).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateFixedPointError,
    InvalidInputError,
    PreconditionError,
)
from .evolsys import EvolutionSystem
from .linop import as_vector

DEFAULT_GRID = 2048

PICARD_TOL = 1e-10
PICARD_MAX_ITER = 200


@dataclass(frozen=True)
class NonlinearField:
    """Nonlinearity F(t, x) with Lipschitz and growth metadata.

    F: (t, x) -> array shaped like x; should broadcast over leading axes
       of x (with t scalar or broadcast-compatible).
    lipschitz: L with ||F(t, x) - F(t, y)|| <= L ||x - y||
    growth: c with ||F(t, x)|| <= c (1 + ||x||)
    periodic: whether F(t + T, .) = F(t, .) is part of the contract
    """

    F: Callable
    lipschitz: float
    growth: float
    periodic: bool = True

    def __call__(self, t, x):
        return self.F(t, x)


@dataclass
class Trajectory:
    """A state path on a uniform time grid.

    states has shape (m+1, d) for a single initial state or (m+1, B, d)
    for a batch.  iterations/residual record the Picard solve that
    produced it (zero for directly assembled paths).
    """

    times: np.ndarray
    states: np.ndarray
    lam: float = 1.0
    iterations: int = 0
    residual: float = 0.0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation between grid nodes (first-order dense output)."""
        times = self.times
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise PreconditionError(f"time {t} outside [{times[0]}, {times[-1]}]")
        i = int(np.clip(np.searchsorted(times, t) - 1, 0, len(times) - 2))
        h = times[i + 1] - times[i]
        a = (t - times[i]) / h
        return (1.0 - a) * self.states[i] + a * self.states[i + 1]


def _eval_field(F, times: np.ndarray, states: np.ndarray) -> np.ndarray:
    """F evaluated at every node; tries one broadcast call, falls back to a loop."""
    tcol = times.reshape((-1,) + (1,) * (states.ndim - 1))
    try:
        w = np.asarray(F(tcol, states), dtype=float)
        if w.shape == states.shape:
            return w
    except Exception:
        pass
    w = np.empty_like(states)
    for i, t in enumerate(times):
        w[i] = F(float(t), states[i])
    return w


def _sweep(E: np.ndarray, x: np.ndarray, w: np.ndarray, lam: float, h: float) -> np.ndarray:
    """One trapezoid pass of the variation-of-constants formula.

    E: (m, d, d) one-step evolution operators on the grid.
    x: (..., d) initial states; w: (m+1, ..., d) forcing samples.
    """
    m = E.shape[0]
    out = np.empty((m + 1,) + x.shape)
    out[0] = x
    z = x
    J = np.zeros_like(x)
    for i in range(m):
        weight = 0.5 * h if i == 0 else h
        J = (J + weight * w[i]) @ E[i].T
        z = z @ E[i].T
        out[i + 1] = z + lam * (J + 0.5 * h * w[i + 1])
    return out


def sigma_apply(R: EvolutionSystem, x, w, lam: float = 1.0) -> Trajectory:
    """Assemble R(t, 0) x + lam * integral_0^t R(t, s) w(s) ds on w's grid.

    w: array (m+1, d) of forcing samples on the uniform grid over [0, T].
    """
    w = np.asarray(w, dtype=float)
    if w.ndim < 2 or w.shape[-1] != R.dim:
        raise InvalidInputError("forcing must have shape (m+1, ..., d)")
    m = w.shape[0] - 1
    if m < 1:
        raise InvalidInputError("forcing needs at least two samples")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != R.dim:
        raise InvalidInputError("state dimension mismatch")
    times = np.linspace(0.0, R.T, m + 1)
    E = R.step_operators(times)
    states = _sweep(E, x, w, lam, R.T / m)
    return Trajectory(times=times, states=states, lam=lam)


def mild_solve(R: EvolutionSystem, F, x0, lam: float = 1.0,
               grid: int = DEFAULT_GRID, tol: float = PICARD_TOL,
               max_iter: int = PICARD_MAX_ITER) -> Trajectory:
    """Picard iteration for the mild solution on [0, T].

    Starts from the constant path and iterates u <- Sigma(x0, F(., u), lam)
    until the sup-norm update is below tol.  Raises ConvergenceError
    (with the last update size) after max_iter sweeps or on blow-up.
    """
    x = np.asarray(x0, dtype=float)
    if x.shape[-1] != R.dim:
        raise InvalidInputError("state dimension mismatch")
    times = np.linspace(0.0, R.T, grid + 1)
    E = R.step_operators(times)
    h = R.T / grid
    states = np.broadcast_to(x, (grid + 1,) + x.shape).copy()
    gap = np.inf
    blowup = 1e8 * (1.0 + float(np.max(np.linalg.norm(x, axis=-1))))
    for it in range(1, max_iter + 1):
        w = _eval_field(F, times, states)
        new = _sweep(E, x, w, lam, h)
        gap = float(np.max(np.linalg.norm(new - states, axis=-1)))
        states = new
        if gap < tol:
            return Trajectory(times=times, states=states, lam=lam,
                              iterations=it, residual=gap)
        if not np.isfinite(gap) or gap > blowup:
            raise ConvergenceError(
                f"Picard iteration diverged after {it} sweeps (update {gap:.3e})",
                residual=gap,
            )
    raise ConvergenceError(
        f"Picard iteration did not reach {tol:.1e} in {max_iter} sweeps "
        f"(last update {gap:.3e})",
        residual=gap,
    )


def translate(R: EvolutionSystem, F, t: float, x, lam: float = 1.0,
              grid: int = DEFAULT_GRID, tol: float = PICARD_TOL) -> np.ndarray:
    """The translation map Phi_t(x): mild-solution state at time t (t <= T)."""
    if t < -1e-12 or t > R.T + 1e-12:
        raise PreconditionError(f"time {t} outside [0, T]")
    traj = mild_solve(R, F, x, lam=lam, grid=grid, tol=tol)
    return traj.at(min(max(t, 0.0), R.T))


@dataclass
class FixedPointResult:
    """Outcome of a period-map fixed-point solve."""

    x: np.ndarray
    residual: float
    iterations: int
    method: str
    history: list = field(default_factory=list)


def fixed_point(R: EvolutionSystem, F, lam: float, x_init,
                method: str = "newton-on-map", tol: float = 1e-8,
                max_iter: int = 60, grid: int = DEFAULT_GRID,
                picard_tol: float = PICARD_TOL) -> FixedPointResult:
    """Fixed point of the period map Phi_T, i.e. a T-periodic initial state.

    method "picard": direct iteration x <- Phi_T(x); suits contractive
    period maps.  method "newton-on-map" (alias "newton"): damped Newton
    on Phi_T(x) - x with central finite-difference Jacobians, batch
    evaluated.  Raises DegenerateFixedPointError when DPhi - I is
    numerically singular and ConvergenceError when the residual
    ||Phi_T(x) - x|| does not reach tol.
    """
    x = as_vector(x_init, R.dim)
    d = R.dim

    def phi(batch):
        traj = mild_solve(R, F, batch, lam=lam, grid=grid, tol=picard_tol)
        return traj.final

    history = []
    if method == "picard":
        for it in range(1, max_iter + 1):
            fx = phi(x)
            res = float(np.linalg.norm(fx - x))
            history.append(res)
            x = fx
            if res <= tol:
                return FixedPointResult(x=x, residual=res, iterations=it,
                                        method=method, history=history)
        raise ConvergenceError(
            f"picard fixed-point iteration stalled at residual {history[-1]:.3e}",
            residual=history[-1],
        )

    if method not in ("newton-on-map", "newton"):
        raise InvalidInputError(f"unknown fixed-point method {method!r}")

    res = np.inf
    for it in range(1, max_iter + 1):
        hstep = 1e-6 * (1.0 + float(np.linalg.norm(x)))
        probes = np.concatenate([
            x[None, :],
            x[None, :] + hstep * np.eye(d),
            x[None, :] - hstep * np.eye(d),
        ])
        values = phi(probes)
        fx = values[0]
        g = fx - x
        res = float(np.linalg.norm(g))
        history.append(res)
        if res <= tol:
            return FixedPointResult(x=x, residual=res, iterations=it,
                                    method=method, history=history)
        Dphi = (values[1:d + 1] - values[d + 1:]).T / (2.0 * hstep)
        J = Dphi - np.eye(d)
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > 1e12:
            raise DegenerateFixedPointError(
                f"period-map Jacobian is singular at iteration {it} "
                f"(cond = {cond:.3e})",
                residual=res,
            )
        step = np.linalg.solve(J, -g)
        # backtrack if the full step does not reduce the defect
        alpha = 1.0
        for _ in range(8):
            cand = x + alpha * step
            cres = float(np.linalg.norm(phi(cand) - cand))
            if cres < res:
                break
            alpha *= 0.5
        x = x + alpha * step
    raise ConvergenceError(
        f"newton-on-map stalled at residual {res:.3e} after {max_iter} iterations",
        residual=res,
    )
