"""Dense linear-operator substrate: exponentials, norms, resolvents.

Matrices and vectors are plain numpy arrays (float64).  Dimensions are
capped at MAX_DIM; everything here is small and dense by design.  Norms
are Euclidean/spectral; weighted metrics live with the modules that own
them.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import InvalidInputError, SingularResolventError

MAX_DIM = 256

COND_LIMIT = 1e12


def as_matrix(M) -> np.ndarray:
    """Validate and return M as a square float64 array.

    Raises InvalidInputError on non-square shapes, non-finite entries,
    or dimension outside [1, MAX_DIM].
    """
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {A.shape}")
    d = A.shape[0]
    if d < 1 or d > MAX_DIM:
        raise InvalidInputError(f"matrix dimension {d} outside [1, {MAX_DIM}]")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix has non-finite entries")
    return A


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Validate and return x as a 1-d float64 array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError(f"expected a vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("vector has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise InvalidInputError(f"vector length {v.shape[0]} != expected {dim}")
    return v


def mat_exp(M, t: float = 1.0) -> np.ndarray:
    """exp(t*M) by scaling-and-squaring with a Pade kernel.

    Satisfies the semigroup law mat_exp(M, s + t) = mat_exp(M, t) @ mat_exp(M, s)
    up to roundoff and mat_exp(M, 0) = I exactly.
    """
    A = as_matrix(M)
    if not np.isfinite(t):
        raise InvalidInputError("time argument must be finite")
    if t == 0.0:
        return np.eye(A.shape[0])
    return scipy.linalg.expm(t * A)


def operator_norm(M) -> float:
    """Spectral norm via power iteration on M^T M with a fixed-seed start.

    Deterministic; converges to 1e-12 relative tolerance (iteration cap 10_000).
    """
    A = as_matrix(M)
    d = A.shape[0]
    B = A.T @ A
    scale = np.max(np.abs(B))
    if scale == 0.0:
        return 0.0
    v = np.random.default_rng(0).standard_normal(d)
    v /= np.linalg.norm(v)
    prev = 0.0
    for _ in range(10_000):
        w = B @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        cur = float(v @ (B @ v))
        if abs(cur - prev) <= 1e-12 * max(cur, scale * 1e-30):
            prev = cur
            break
        prev = cur
    return float(np.sqrt(max(prev, 0.0)))


def resolvent(M, mu: float) -> np.ndarray:
    """(mu*I - M)^{-1}.

    Raises SingularResolventError when mu*I - M has 2-norm condition
    number above COND_LIMIT.  The result satisfies
    ||(mu*I - M) @ result - I|| <= 1e-10 for well-conditioned inputs.
    """
    A = as_matrix(M)
    if not np.isfinite(mu):
        raise InvalidInputError("resolvent parameter must be finite")
    d = A.shape[0]
    S = mu * np.eye(d) - A
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularResolventError(
            f"mu = {mu} is (numerically) in the spectrum: cond = {cond:.3e}"
        )
    return np.linalg.solve(S, np.eye(d))
