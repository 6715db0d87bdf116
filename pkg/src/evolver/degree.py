"""Brouwer degree on balls and boxes via the regular-value representation.

deg(g, U) = sum of sign det Dg(z) over the zeros z of g in U, provided g
does not vanish on the boundary and every zero is regular.  Zeros are
located by damped Newton iterations started on an interior lattice and
then clustered; the boundary condition is certified on a sample cloud.
For planar fields winding_number_2d gives an independent value by
accumulating the argument of g along the boundary loop.

Fields must be vectorized: g applied to an (..., d) array of points
returns an (..., d) array of values.  Degree computations are capped at
d <= 4 (the lattice of Newton starts grows like grid^d).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateZeroError,
    InadmissibleRegionError,
    InvalidInputError,
    OracleFailureError,
    SingularResolventError,
)

MAX_DEGREE_DIM = 4

CLUSTER_RADIUS = 1e-6
FD_STEP = 1e-6
DET_FLOOR = 1e-8
WINDING_MAX_SAMPLES = 2 ** 20


@dataclass(frozen=True)
class Region:
    """Open ball or axis-aligned open box in R^d."""

    kind: str
    center: np.ndarray | None = None
    radius: float = 0.0
    lo: np.ndarray | None = None
    hi: np.ndarray | None = None

    @staticmethod
    def ball(center, radius: float) -> "Region":
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if not (np.all(np.isfinite(c)) and np.isfinite(radius) and radius > 0):
            raise InvalidInputError("ball needs finite center and radius > 0")
        return Region(kind="ball", center=c, radius=float(radius))

    @staticmethod
    def box(lo, hi) -> "Region":
        a = np.atleast_1d(np.asarray(lo, dtype=float))
        b = np.atleast_1d(np.asarray(hi, dtype=float))
        if a.shape != b.shape or not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise InvalidInputError("box corners must be finite, same shape")
        if not np.all(b > a):
            raise InvalidInputError("box needs hi > lo componentwise")
        return Region(kind="box", lo=a, hi=b)

    @property
    def dim(self) -> int:
        return len(self.center) if self.kind == "ball" else len(self.lo)

    @property
    def midpoint(self) -> np.ndarray:
        return self.center.copy() if self.kind == "ball" else 0.5 * (self.lo + self.hi)

    def contains(self, x, margin: float = 0.0):
        """Strict membership, vectorized over leading axes of x."""
        p = np.asarray(x, dtype=float)
        if self.kind == "ball":
            return np.linalg.norm(p - self.center, axis=-1) < self.radius - margin
        return np.all((p > self.lo + margin) & (p < self.hi - margin), axis=-1)

    def boundary_samples(self, m: int, seed: int = 0) -> np.ndarray:
        """(M, d) boundary points.  Ordered as a closed loop when d == 2."""
        d = self.dim
        if self.kind == "ball":
            if d == 1:
                return np.array([[self.center[0] - self.radius],
                                 [self.center[0] + self.radius]])
            if d == 2:
                th = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
                return self.center + self.radius * np.stack(
                    [np.cos(th), np.sin(th)], axis=-1
                )
            rng = np.random.default_rng(seed)
            dirs = rng.standard_normal((m, d))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            axes = np.concatenate([np.eye(d), -np.eye(d)])
            return self.center + self.radius * np.concatenate([dirs, axes])
        # box
        if d == 1:
            return np.array([[self.lo[0]], [self.hi[0]]])
        if d == 2:
            per_edge = max(m // 4, 2)
            u = np.linspace(0.0, 1.0, per_edge, endpoint=False)
            (x0, y0), (x1, y1) = self.lo, self.hi
            bottom = np.stack([x0 + u * (x1 - x0), np.full_like(u, y0)], axis=-1)
            right = np.stack([np.full_like(u, x1), y0 + u * (y1 - y0)], axis=-1)
            top = np.stack([x1 - u * (x1 - x0), np.full_like(u, y1)], axis=-1)
            left = np.stack([np.full_like(u, x0), y1 - u * (y1 - y0)], axis=-1)
            return np.concatenate([bottom, right, top, left])
        rng = np.random.default_rng(seed)
        per_face = max(m // (2 * d), 1)
        pts = []
        for axis in range(d):
            for val in (self.lo[axis], self.hi[axis]):
                q = self.lo + rng.random((per_face, d)) * (self.hi - self.lo)
                q[:, axis] = val
                pts.append(q)
        return np.concatenate(pts)

    def interior_grid(self, res: int) -> np.ndarray:
        """(K, d) lattice of Newton starts: cell centers of a res^d grid."""
        d = self.dim
        if self.kind == "ball":
            lo = self.center - self.radius
            hi = self.center + self.radius
        else:
            lo, hi = self.lo, self.hi
        axes = [
            np.linspace(lo[i], hi[i], res, endpoint=False) + (hi[i] - lo[i]) / (2 * res)
            for i in range(d)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        if self.kind == "ball":
            pts = pts[np.linalg.norm(pts - self.center, axis=1) < 0.98 * self.radius]
        return pts


@dataclass
class DegreeReport:
    """Degree value with the evidence that produced it."""

    value: int
    zeros: np.ndarray
    signs: np.ndarray
    dets: np.ndarray
    boundary_min: float
    delta: float


def _fd_jacobians(g, X: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Jacobians at each row of X: (K, d, d)."""
    K, d = X.shape
    probes = np.concatenate([
        X[:, None, :] + h * np.eye(d)[None, :, :],
        X[:, None, :] - h * np.eye(d)[None, :, :],
    ], axis=1)                       # (K, 2d, d)
    vals = np.asarray(g(probes.reshape(-1, d)), dtype=float).reshape(K, 2 * d, d)
    return (vals[:, :d, :] - vals[:, d:, :]).transpose(0, 2, 1) / (2.0 * h)


def _boundary_check(g, U: Region, boundary_m: int, delta, seed: int):
    samples = U.boundary_samples(boundary_m, seed=seed)
    vals = np.asarray(g(samples), dtype=float)
    norms = np.linalg.norm(vals, axis=-1)
    scale = float(np.max(norms)) if norms.size else 0.0
    if delta is None:
        delta = 1e-6 * (1.0 + scale)
    worst = int(np.argmin(norms))
    if norms[worst] <= delta:
        raise InadmissibleRegionError(
            f"field nearly vanishes on the boundary: |g| = {norms[worst]:.3e} "
            f"<= delta = {delta:.3e} at {samples[worst]}",
            point=samples[worst],
            value=vals[worst],
        )
    return float(norms[worst]), float(delta), scale


def brouwer_degree(g, U: Region, grid: int = 16, boundary_m: int = 256,
                   delta: float | None = None, max_newton: int = 60,
                   zero_tol: float | None = None, seed: int = 0) -> DegreeReport:
    """Degree of g on U by multi-start damped Newton and sign-summed Jacobians.

    grid: Newton starts per axis (grid^d total).  delta: admissibility
    margin, default 1e-6 * (1 + max boundary |g|).  Raises
    InadmissibleRegionError on boundary (near-)zeros, DegenerateZeroError
    when a located zero has |det Dg| < 1e-8, InvalidInputError for d > 4.
    The computation is deterministic: fixed start lattice, zeros sorted
    before clustering and summation.
    """
    d = U.dim
    if d > MAX_DEGREE_DIM:
        raise InvalidInputError(
            f"degree computations are capped at d <= {MAX_DEGREE_DIM}, got {d}"
        )
    boundary_min, delta, scale = _boundary_check(g, U, boundary_m, delta, seed)
    if zero_tol is None:
        zero_tol = 1e-8 * (1.0 + scale)

    X = U.interior_grid(grid)
    alive = np.ones(len(X), dtype=bool)
    vals = np.asarray(g(X), dtype=float)
    res = np.linalg.norm(vals, axis=-1)
    span = float(np.max(U.hi - U.lo)) if U.kind == "box" else 2.0 * U.radius
    for _ in range(max_newton):
        todo = alive & (res > zero_tol)
        if not np.any(todo):
            break
        idx = np.where(todo)[0]
        J = _fd_jacobians(g, X[idx], FD_STEP)
        dets = np.linalg.det(J)
        ok = np.abs(dets) > 1e-300
        # kill starts whose Jacobian collapsed
        alive[idx[~ok]] = False
        idx = idx[ok]
        if idx.size == 0:
            break
        step = np.linalg.solve(J[ok], -vals[idx][..., None])[..., 0]
        improved = np.zeros(len(idx), dtype=bool)
        alpha = np.ones(len(idx))
        for _ in range(7):
            pending = ~improved
            if not np.any(pending):
                break
            cand = X[idx[pending]] + alpha[pending, None] * step[pending]
            cvals = np.asarray(g(cand), dtype=float)
            cres = np.linalg.norm(cvals, axis=-1)
            better = cres < res[idx[pending]]
            sel = np.where(pending)[0][better]
            X[idx[sel]] = cand[better]
            vals[idx[sel]] = cvals[better]
            res[idx[sel]] = cres[better]
            improved[sel] = True
            alpha[np.where(pending)[0][~better]] *= 0.5
        alive[idx[~improved]] = False
        # drop points that wandered far away
        far = np.linalg.norm(X - U.midpoint, axis=-1) > 4.0 * span
        alive &= ~far

    hits = X[alive & (res <= zero_tol)]
    hits = hits[U.contains(hits)]
    zeros = _cluster(hits)
    if zeros.size == 0:
        return DegreeReport(value=0, zeros=np.empty((0, d)), signs=np.empty(0, int),
                            dets=np.empty(0), boundary_min=boundary_min, delta=delta)
    zeros = _cluster(_polish(g, zeros, max_newton))
    zeros = zeros[U.contains(zeros)]
    if zeros.size == 0:
        return DegreeReport(value=0, zeros=np.empty((0, d)), signs=np.empty(0, int),
                            dets=np.empty(0), boundary_min=boundary_min, delta=delta)
    J = _fd_jacobians(g, zeros, FD_STEP)
    dets = np.linalg.det(J)
    small = np.abs(dets) < DET_FLOOR
    if np.any(small):
        z = zeros[int(np.where(small)[0][0])]
        raise DegenerateZeroError(
            f"zero at {z} has |det Dg| = {np.abs(dets).min():.3e} < {DET_FLOOR}"
        )
    signs = np.sign(dets).astype(int)
    return DegreeReport(value=int(signs.sum()), zeros=zeros, signs=signs,
                        dets=dets, boundary_min=boundary_min, delta=delta)


def _polish(g, Z: np.ndarray, max_newton: int) -> np.ndarray:
    """Drive located zeros down to the residual floor with full Newton steps.

    A regular zero reaches machine-level residual in a couple of steps and
    then stalls, which ends its polishing; a degenerate zero keeps creeping
    toward the true zero, where the collapsing Jacobian becomes visible to
    the determinant guard.
    """
    Z = Z.copy()
    done = np.zeros(len(Z), dtype=bool)
    vals = np.asarray(g(Z), dtype=float)
    res = np.linalg.norm(vals, axis=-1)
    for _ in range(max_newton):
        todo = ~done & (res > 0.0)
        if not np.any(todo):
            break
        idx = np.where(todo)[0]
        J = _fd_jacobians(g, Z[idx], FD_STEP)
        dets = np.linalg.det(J)
        ok = np.abs(dets) > 1e-300
        done[idx[~ok]] = True
        idx = idx[ok]
        if idx.size == 0:
            break
        step = np.linalg.solve(J[ok], -vals[idx][..., None])[..., 0]
        cand = Z[idx] + step
        cvals = np.asarray(g(cand), dtype=float)
        cres = np.linalg.norm(cvals, axis=-1)
        better = cres < res[idx]
        sel = idx[better]
        Z[sel] = cand[better]
        vals[sel] = cvals[better]
        res[sel] = cres[better]
        done[idx[~better]] = True
    return Z


def _cluster(points: np.ndarray) -> np.ndarray:
    """Greedy clustering with radius CLUSTER_RADIUS; deterministic order."""
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    reps: list[np.ndarray] = []
    members: list[list[np.ndarray]] = []
    for p in pts:
        for i, r in enumerate(reps):
            if np.linalg.norm(p - r) <= CLUSTER_RADIUS:
                members[i].append(p)
                break
        else:
            reps.append(p)
            members.append([p])
    return np.array([np.mean(ms, axis=0) for ms in members])


def winding_number_2d(g, U: Region, m: int = 256, delta: float | None = None,
                      seed: int = 0) -> int:
    """Winding number of a planar field along the boundary loop of U.

    Accumulates the argument increment of g between consecutive boundary
    samples, doubling the sample count until every step turns by less
    than pi/2.  Raises OracleFailureError beyond 2^20 samples and
    InadmissibleRegionError if |g| dips below delta on the loop.
    Independent of the Newton-based degree computation.
    """
    if U.dim != 2:
        raise InvalidInputError("winding numbers need d = 2")
    while True:
        loop = U.boundary_samples(m, seed=seed)
        vals = np.asarray(g(loop), dtype=float)
        norms = np.linalg.norm(vals, axis=-1)
        scale = float(np.max(norms))
        d_eff = 1e-6 * (1.0 + scale) if delta is None else delta
        if np.min(norms) <= d_eff:
            worst = int(np.argmin(norms))
            raise InadmissibleRegionError(
                f"field nearly vanishes on the boundary loop: |g| = "
                f"{norms[worst]:.3e} at {loop[worst]}",
                point=loop[worst],
                value=vals[worst],
            )
        ang = np.arctan2(vals[:, 1], vals[:, 0])
        ang = np.append(ang, ang[0])
        step = np.diff(ang)
        step = (step + np.pi) % (2.0 * np.pi) - np.pi
        if np.max(np.abs(step)) < 0.5 * np.pi:
            total = float(np.sum(step)) / (2.0 * np.pi)
            w = int(np.round(total))
            if abs(total - w) > 0.1:
                raise OracleFailureError(
                    f"winding accumulation did not close up: {total}"
                )
            return w
        m *= 2
        if m > WINDING_MAX_SAMPLES:
            raise OracleFailureError(
                f"winding refinement exceeded {WINDING_MAX_SAMPLES} samples"
            )


def deg_hat(A_hat, F_hat, U: Region, **kwargs) -> DegreeReport:
    """Degree of the averaged pair: deg(x + A_hat^{-1} F_hat(x), U).

    Raises SingularResolventError when A_hat is too ill conditioned to
    invert.  Extra keyword arguments go to brouwer_degree.
    """
    A = np.asarray(A_hat, dtype=float)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularResolventError(
            f"averaged generator is numerically singular (cond = {cond:.3e})"
        )

    def g(x):
        x = np.asarray(x, dtype=float)
        fx = np.asarray(F_hat(x), dtype=float)
        return x + np.linalg.solve(A, fx.reshape(-1, fx.shape[-1]).T).T.reshape(fx.shape)

    return brouwer_degree(g, U, **kwargs)
