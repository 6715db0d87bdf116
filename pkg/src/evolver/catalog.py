"""Built-in example models and inline-config model assembly.

Four shipped models:

    scalar-linear      d=1, A = [[-1]], forcing 2 + sin(2 pi t / T); the
                       averaged zero is x* = 2 exactly
    rotation-damped-2d d=2 rotation with periodic damping and forcing
                       plus a small tanh nonlinearity
    wave-k1            1-mode damped wave section, affine nonlinearity
                       (closed-form linear-algebra cross-checks)
    wave-k3            3-mode damped wave section, periodic damping and
                       saturating nonlinearity

Time coefficients and nonlinearities are expression-language strings
compiled to numpy callables, the same path inline JSON configs use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degree import Region
from .errors import ConfigError
from .evolsys import GeneratorFamily
from .exprlang import eval_expr, free_vars, parse_expr
from .mild import NonlinearField
from .wave import WaveModel, build_wave_model

MODEL_KEYS = ("scalar-linear", "rotation-damped-2d", "wave-k1", "wave-k3")

BRANCHING_LADDER = (1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3)
AVERAGING_LADDER = (1.0, 0.3, 0.1, 0.03, 0.01)
WAVE_LADDER = tuple(np.round(np.linspace(0.1, 1.0, 10), 10))


@dataclass(frozen=True)
class CatalogModel:
    """A ready-to-run model: generator family plus optional extras."""

    key: str
    kind: str
    dim: int
    T: float
    family: GeneratorFamily
    field: NonlinearField | None
    region: Region | None
    lambdas: tuple
    wave: WaveModel | None = None


def compile_time_coefficient(src: str, T: float):
    """Expression in t (and T) -> scalar callable of t."""
    ast = parse_expr(src)
    extra = free_vars(ast) - {"t", "T"}
    if extra:
        raise ConfigError(f"time coefficient may only use t and T, got {sorted(extra)}")

    def coeff(t):
        return eval_expr(ast, {"t": t, "T": T})

    return coeff


def compile_matrix(entries, T: float):
    """Matrix of numbers / expression strings -> callable t -> ndarray."""
    rows = []
    for row in entries:
        rows.append([
            parse_expr(cell) if isinstance(cell, str) else float(cell)
            for cell in row
        ])
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise ConfigError("matrix spec must be square")
    for r in rows:
        for cell in r:
            if not isinstance(cell, float):
                extra = free_vars(cell) - {"t", "T"}
                if extra:
                    raise ConfigError(
                        f"matrix entries may only use t and T, got {sorted(extra)}"
                    )

    def A(t):
        out = np.empty((d, d))
        for i, r in enumerate(rows):
            for j, cell in enumerate(r):
                out[i, j] = cell if isinstance(cell, float) else eval_expr(
                    cell, {"t": t, "T": T}
                )
        return out

    return A, d


def compile_field(exprs, T: float):
    """Componentwise field spec -> batched callable F(t, x).

    Component i is an expression in t, T and s, where s binds to x[..., i].
    """
    asts = [parse_expr(src) for src in exprs]
    for ast in asts:
        extra = free_vars(ast) - {"t", "s", "T"}
        if extra:
            raise ConfigError(f"field components may only use t, s, T, got {sorted(extra)}")

    def F(t, x):
        x = np.asarray(x, dtype=float)
        tt = np.asarray(t, dtype=float)
        # drop trailing broadcast axes so t aligns with component slices
        while tt.ndim >= x.ndim and tt.ndim > 0:
            tt = tt[..., 0]
        out = np.empty_like(x)
        for i, ast in enumerate(asts):
            out[..., i] = eval_expr(ast, {"t": tt, "s": x[..., i], "T": T})
        return out

    return F


def _scalar_linear() -> CatalogModel:
    T = 1.0
    A = np.array([[-1.0]])
    family = GeneratorFamily(dim=1, A=lambda t: A, T=T, omega=1.0, periodic=True)
    F = compile_field(["2+sin(2*pi*t/T)"], T)
    field = NonlinearField(F=F, lipschitz=0.0, growth=3.0, periodic=True)
    region = Region.ball(np.array([2.0]), 1.5)
    return CatalogModel(key="scalar-linear", kind="ode", dim=1, T=T,
                        family=family, field=field, region=region,
                        lambdas=BRANCHING_LADDER)


def _rotation_damped() -> CatalogModel:
    T = 1.0
    A, d = compile_matrix(
        [["-(1+0.3*sin(2*pi*t/T))", "-1"],
         ["1", "-(1+0.3*sin(2*pi*t/T))"]], T,
    )
    # dissipativity rate of the rotation block is the damping itself
    family = GeneratorFamily(dim=d, A=A, T=T, omega=0.7, periodic=True)
    F = compile_field(
        ["1+0.2*cos(2*pi*t/T)+0.1*tanh(s)",
         "0.5+0.2*sin(2*pi*t/T)+0.1*tanh(s)"], T,
    )
    field = NonlinearField(F=F, lipschitz=0.1, growth=1.6, periodic=True)
    region = Region.ball(np.array([0.25, 0.75]), 1.5)
    return CatalogModel(key="rotation-damped-2d", kind="ode", dim=d, T=T,
                        family=family, field=field, region=region,
                        lambdas=BRANCHING_LADDER)


def _wave(key: str) -> CatalogModel:
    T = 2.0 * np.pi
    if key == "wave-k1":
        k = 1
        beta = compile_time_coefficient("1", T)
        f_src = "0.2*s+0.3*cos(t)"
        f_inf, lip, growth = 0.2, 0.2, 0.5
    else:
        k = 3
        beta = compile_time_coefficient("1+0.5*cos(t)", T)
        f_src = "tanh(s)+cos(t)"
        f_inf, lip, growth = 0.0, 1.0, 2.0
    ast = parse_expr(f_src)

    def f(t, s):
        return eval_expr(ast, {"t": t, "s": s, "T": T})

    model, family = build_wave_model(ell=np.pi, k=k, beta=beta, T=T, f=f,
                                     f_inf=f_inf, lipschitz=lip, growth=growth)
    return CatalogModel(key=key, kind="wave", dim=model.dim, T=T,
                        family=family, field=None, region=None,
                        lambdas=WAVE_LADDER, wave=model)


_BUILDERS = {
    "scalar-linear": _scalar_linear,
    "rotation-damped-2d": _rotation_damped,
    "wave-k1": lambda: _wave("wave-k1"),
    "wave-k3": lambda: _wave("wave-k3"),
}


def list_models():
    return list(MODEL_KEYS)


def get_model(key: str) -> CatalogModel:
    if key not in _BUILDERS:
        raise ConfigError(f"unknown catalog model {key!r}; known: {', '.join(MODEL_KEYS)}")
    return _BUILDERS[key]()


def model_from_config(spec) -> CatalogModel:
    """Catalog key or inline dict -> CatalogModel.

    Inline schema: {"A": matrix spec, "T": period, optional "F": [expr per
    component], "lipschitz", "growth", "omega", "region": {"kind": "ball",
    "center": [...], "radius": r} or {"kind": "box", "lo": [...], "hi": [...]},
    "lambdas": [...]}.
    """
    if isinstance(spec, str):
        return get_model(spec)
    if not isinstance(spec, dict):
        raise ConfigError("model must be a catalog key or an inline object")
    if "A" not in spec:
        raise ConfigError("inline model needs an A matrix spec")
    T = float(spec.get("T", 1.0))
    if not (np.isfinite(T) and T > 0):
        raise ConfigError("model period T must be positive")
    A, d = compile_matrix(spec["A"], T)
    omega = float(spec.get("omega", 0.0))
    family = GeneratorFamily(dim=d, A=A, T=T, omega=omega, periodic=True)
    field = None
    if "F" in spec:
        exprs = spec["F"]
        if not isinstance(exprs, list) or len(exprs) != d:
            raise ConfigError(f"F must list {d} component expressions")
        F = compile_field(exprs, T)
        field = NonlinearField(F=F, lipschitz=float(spec.get("lipschitz", 1.0)),
                               growth=float(spec.get("growth", 1.0)),
                               periodic=True)
    region = None
    if "region" in spec:
        r = spec["region"]
        kind = r.get("kind", "ball")
        if kind == "ball":
            region = Region.ball(np.asarray(r["center"], dtype=float),
                                 float(r["radius"]))
        elif kind == "box":
            region = Region.box(np.asarray(r["lo"], dtype=float),
                                np.asarray(r["hi"], dtype=float))
        else:
            raise ConfigError(f"unknown region kind {kind!r}")
    lambdas = tuple(float(v) for v in spec.get("lambdas", BRANCHING_LADDER))
    return CatalogModel(key="inline", kind="ode", dim=d, T=T, family=family,
                        field=field, region=region, lambdas=lambdas)
