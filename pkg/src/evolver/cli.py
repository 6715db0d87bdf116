"""Experiment runner: JSON configs in, CSV tables and JSON summaries out.

Usage:
    evolver <experiment> --config cfg.json [--out DIR] [--seed N]

Experiments: chernoff, evolsys, branching, degree, averaging,
continuation, wave-periodic, wave-energy.  Each writes
<out>/<experiment>.csv and <out>/<experiment>.summary.json, prints a
verdict line, and exits 0 on pass, 1 on a numeric failure (the failing
metric is named on stderr), 2 on a config problem.

Outputs are byte-deterministic for a fixed config and seed: floats are
printed with %.17g, JSON keys are sorted, and wall time goes to stderr
only (the summary carries "wall_time": null).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import catalog
from .averaging import (
    averaged_pair,
    averaging_degree_check,
    branching_experiment,
)
from .degree import Region, brouwer_degree, winding_number_2d
from .errors import ConfigError, EvolverError
from .evolsys import (
    GeneratorFamily,
    build_evolution,
    cocycle_defect,
    contraction_check,
    family_continuity_gap,
    scale_family,
)
from .mild import fixed_point, mild_solve
from .semigroup import (
    ChernoffSequence,
    chernoff_defect,
    chernoff_power_limit,
    chernoff_sum_limit,
    dissipativity_rate,
    resolvent_scheme,
)
from .wave import (
    build_wave_model,
    energy_residual,
    find_periodic_wave,
    linear_nondegeneracy,
    nonlinear_field,
    select_eta,
    spectral_invariance_gap,
)

EXPERIMENT_NAMES = (
    "chernoff", "evolsys", "branching", "degree",
    "averaging", "continuation", "wave-periodic", "wave-energy",
)

DEFAULT_MODEL = {
    "evolsys": "wave-k3",
    "branching": "scalar-linear",
    "averaging": "scalar-linear",
    "continuation": "rotation-damped-2d",
    "wave-periodic": "wave-k3",
    "wave-energy": "wave-k3",
}

_TOP_KEYS = {"experiment", "model", "numeric", "output"}
_NUMERIC_KEYS = {
    "n", "grid", "ns", "lambdas", "seed", "samples", "dim",
    "power_m", "f_inf", "eta", "boundary_zero", "n_continuity",
}
_ERROR_SLUGS = {
    "InvalidInputError": "invalid-input",
    "InvalidMetricError": "invalid-metric",
    "PreconditionError": "precondition",
    "SingularResolventError": "singular-resolvent",
    "ResourceLimitError": "resource-guard",
    "ConvergenceError": "no-convergence",
    "DegenerateFixedPointError": "degenerate-fixed-point",
    "InadmissibleRegionError": "inadmissible-region",
    "DegenerateZeroError": "degenerate-zero",
    "OracleFailureError": "oracle-failure",
    "ExprError": "expression",
    "ConfigError": "config",
}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(v)
        return f if np.isfinite(f) else None
    return v


def _load_config(path):
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON config: {exc}")
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    return obj


def _validate_config(cfg, experiment):
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" in cfg and cfg["experiment"] != experiment:
        raise ConfigError(
            f"config is for experiment {cfg['experiment']!r}, not {experiment!r}"
        )
    num = cfg.get("numeric", {})
    if not isinstance(num, dict):
        raise ConfigError("numeric section must be an object")
    bad = set(num) - _NUMERIC_KEYS
    if bad:
        raise ConfigError(f"unknown numeric keys: {sorted(bad)}")
    for key in ("n", "grid", "samples", "dim", "power_m", "seed", "n_continuity"):
        if key in num:
            v = num[key]
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"numeric.{key} must be a nonnegative integer")
    for key in ("f_inf", "eta"):
        if key in num and not isinstance(num[key], (int, float)):
            raise ConfigError(f"numeric.{key} must be a number")
    for key in ("ns", "lambdas"):
        if key in num:
            v = num[key]
            if (not isinstance(v, list) or not v
                    or not all(isinstance(x, (int, float)) and x > 0 for x in v)):
                raise ConfigError(f"numeric.{key} must be a list of positive numbers")
    out = cfg.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output section must be an object")
    if set(out) - {"dir", "format"}:
        raise ConfigError(f"unknown output keys: {sorted(set(out) - {'dir', 'format'})}")
    if out.get("format", "csv") != "csv":
        raise ConfigError("output.format must be 'csv'")
    return num, out


def _resolve_model(cfg, experiment):
    spec = cfg.get("model", DEFAULT_MODEL.get(experiment))
    if spec is None:
        return None
    return catalog.model_from_config(spec)


def _require_wave(cm):
    if cm is None or cm.wave is None:
        raise ConfigError("this experiment needs a wave-* catalog model")
    return cm.wave


# ---------------------------------------------------------------------------
# experiment runners: each returns a dict with header, rows, metrics,
# thresholds, ok, failing


def run_chernoff(cm, num, seed):
    rng = np.random.default_rng(seed)
    samples = num.get("samples", 200)
    rows = []
    violations = 0
    min_margin = np.inf
    for i in range(samples):
        d = int(rng.integers(1, 7))
        G = rng.standard_normal((d, d))
        nrm = np.linalg.norm(G, 2)
        T_op = G * (rng.uniform(0.3, 0.999) / nrm)
        x = rng.standard_normal(d)
        x /= np.linalg.norm(x)
        n = int(rng.integers(1, 65))
        lhs, rhs = chernoff_defect(T_op, x, n)
        ok = lhs <= rhs + 1e-9
        violations += 0 if ok else 1
        min_margin = min(min_margin, rhs + 1e-9 - lhs)
        rows.append(["defect", i, d, n, lhs, rhs, ok])
    B = rng.standard_normal((3, 3))
    A = B - 1.1 * np.linalg.norm(B, 2) * np.eye(3)
    scheme = resolvent_scheme(lambda mu: A, 3)
    x3 = rng.standard_normal(3)
    x3 /= np.linalg.norm(x3)
    ns = tuple(int(v) for v in num.get("ns", (16, 64, 256, 1024, 4096)))
    seq = ChernoffSequence(t=1.0, mu0=0.0, ns=ns)
    power = chernoff_power_limit(scheme, seq, x3)
    total = chernoff_sum_limit(scheme, seq, x3)
    for n, e in zip(power.ns, power.errors):
        rows.append(["power", "", 3, n, e, "", ""])
    for n, e in zip(total.ns, total.errors):
        rows.append(["sum", "", 3, n, e, "", ""])
    ok = violations == 0 and power.converged and total.converged
    failing = None
    if violations:
        failing = "defect_violations"
    elif not power.converged:
        failing = "power_convergence"
    elif not total.converged:
        failing = "sum_convergence"
    return {
        "header": ["section", "sample", "dim", "n", "lhs_or_error", "rhs", "ok"],
        "rows": rows,
        "metrics": {
            "defect_violations": violations,
            "defect_min_margin": min_margin,
            "power_final_error": power.errors[-1],
            "power_rate": power.rate,
            "sum_final_error": total.errors[-1],
        },
        "thresholds": {"defect_slack": 1e-9, "convergence_tol": 1e-3},
        "ok": ok,
        "failing": failing,
    }


def run_evolsys(cm, num, seed):
    fam = cm.family
    T = fam.T
    n = num.get("n", 256)
    if n < 16:
        raise ConfigError("evolsys needs numeric.n >= 16")
    R = build_evolution(fam, n)
    rows = []
    fractions = [
        (1.0, 0.5, 0.0), (1.0, 0.75, 0.25), (0.9, 0.6, 0.3),
        (0.8, 0.5, 0.1), (2.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
    ]
    triples = [(a * T, b * T, c * T) for a, b, c in fractions]
    triples += [
        (R.nodes[n], R.nodes[n // 2], R.nodes[0]),
        (R.nodes[n], R.nodes[3 * n // 4], R.nodes[n // 4]),
        (R.nodes[7 * n // 8], R.nodes[n // 2], R.nodes[n // 8]),
    ]
    coc_max = 0.0
    for t, r, s in triples:
        d = cocycle_defect(R, t, r, s)
        coc_max = max(coc_max, d)
        rows.append(["cocycle", "%.6g,%.6g,%.6g" % (t, r, s), d, 1e-12, d <= 1e-12])

    ref = build_evolution(fam, min(16 * n, 2 ** 14))
    M_ref = ref.operator(T, 0.0)
    ref_ns = [n // 4, n // 2, n, 2 * n]
    errs = []
    for m in ref_ns:
        M = build_evolution(fam, m).operator(T, 0.0)
        e = float(np.linalg.norm(M - M_ref, 2))
        errs.append(e)
        rows.append(["refine", str(m), e, "", ""])
    order = float(-np.polyfit(np.log(ref_ns), np.log(errs), 1)[0])
    rows.append(["order", "", order, 0.9, order >= 0.9])

    G = fam.metric if fam.metric is not None else np.eye(fam.dim)
    rate_min = min(dissipativity_rate(fam.A(t), G) for t in R.nodes)
    excess = contraction_check(R, rate_min)
    rows.append(["contraction", "omega=%.6g" % rate_min, excess, 1e-9, excess <= 1e-9])

    base_A = fam.A
    eps_sweep = [1e-1, 1e-2, 1e-3, 1e-4]
    v = np.zeros(fam.dim)
    v[0] = 1.0
    lhss = []
    cont_ok = True
    for eps in eps_sweep:
        def A2(t, _e=eps):
            return np.asarray(base_A(t), dtype=float) + (
                _e * np.cos(2.0 * np.pi * t / T)
            ) * np.eye(fam.dim)

        fam2 = GeneratorFamily(dim=fam.dim, A=A2, T=T, omega=0.0,
                               metric=fam.metric, periodic=fam.periodic)
        lhs, rhs = family_continuity_gap(fam, fam2, num.get("n_continuity", 128), v)
        lhss.append(lhs)
        cont_ok = cont_ok and lhs <= rhs
        rows.append(["continuity", "eps=%g" % eps, lhs, rhs, lhs <= rhs])
    scaling_ok = True
    for a, b in zip(lhss, lhss[1:]):
        ratio = a / b if b > 0 else np.inf
        good = 10.0 / 3.0 <= ratio <= 30.0
        scaling_ok = scaling_ok and good
        rows.append(["continuity-scaling", "", ratio, "10/3..30", good])

    checks = [
        ("cocycle_defect", coc_max <= 1e-12),
        ("refinement_order", order >= 0.9),
        ("contraction_excess", excess <= 1e-9),
        ("continuity_bound", cont_ok),
        ("continuity_scaling", scaling_ok),
    ]
    failing = next((name for name, good in checks if not good), None)
    return {
        "header": ["section", "label", "value", "bound", "ok"],
        "rows": rows,
        "metrics": {
            "cocycle_defect_max": coc_max,
            "refinement_order": order,
            "contraction_excess": excess,
            "continuity_lhs": lhss,
        },
        "thresholds": {"cocycle": 1e-12, "order": 0.9, "contraction": 1e-9},
        "ok": failing is None,
        "failing": failing,
    }


def run_branching(cm, num, seed):
    if cm.field is None or cm.region is None:
        raise ConfigError("branching needs a model with a field and a region")
    lambdas = [float(v) for v in num.get("lambdas", cm.lambdas)]
    report = branching_experiment(
        cm.family, cm.field, lambdas, cm.region,
        n=num.get("n", 512), grid=num.get("grid", 1024),
    )
    d = cm.dim
    header = (["lambda"] + ["x_star_%d" % i for i in range(d)]
              + ["defect", "picard_iters", "residual", "ok", "error"])
    rows = []
    for r in report.rows:
        xs = list(r.x) if r.x is not None else [""] * d
        rows.append([r.lam] + xs + [r.defect, r.iterations, r.residual, r.ok, r.error])
    defects = report.defects
    trend_ok = all(
        b <= a * (1.0 + 1e-6) + 1e-12 for a, b in zip(defects, defects[1:])
    )
    ratio = report.defect_ratio
    all_ok = all(r.ok for r in report.rows)
    checks = [
        ("fixed_point_failures", all_ok),
        ("defect_ratio", bool(ratio <= 1e-2)),
        ("defect_trend", trend_ok),
    ]
    failing = next((name for name, good in checks if not good), None)
    return {
        "header": header,
        "rows": rows,
        "metrics": {
            "defect_ratio": ratio,
            "defect_first": defects[0] if defects else None,
            "defect_last": defects[-1] if defects else None,
            "x_star_last": report.rows[-1].x if report.rows and report.rows[-1].ok else None,
        },
        "thresholds": {"defect_ratio": 1e-2},
        "ok": failing is None,
        "failing": failing,
    }


def _power_field(m):
    def g(x):
        x = np.asarray(x, dtype=float)
        z = x[..., 0] + 1j * x[..., 1]
        w = z ** m - 0.1
        return np.stack([w.real, w.imag], axis=-1)

    return g


def run_degree(cm, num, seed):
    if num.get("boundary_zero"):
        U = Region.ball(np.array([1.0, 0.0]), 1.0)
        brouwer_degree(lambda x: np.asarray(x, dtype=float), U)
        raise ConfigError("boundary-zero run unexpectedly passed the screen")
    rows = []
    all_ok = True
    for d in (1, 2, 3):
        U = Region.ball(np.zeros(d), 1.0)
        for name, g, expected in (
            ("identity", lambda x: np.asarray(x, dtype=float), 1),
            ("antipodal", lambda x: -np.asarray(x, dtype=float), (-1) ** d),
        ):
            rep = brouwer_degree(g, U, grid=8)
            wind = ""
            ok = rep.value == expected
            if d == 2:
                wind = winding_number_2d(g, U)
                ok = ok and wind == expected
            all_ok = all_ok and ok
            rows.append([name, d, "", rep.value, expected, wind, ok])
    U2 = Region.ball(np.zeros(2), 1.0)
    for m in (2, int(num.get("power_m", 3))):
        g = _power_field(m)
        rep = brouwer_degree(g, U2, grid=12)
        wind = winding_number_2d(g, U2)
        ok = rep.value == m and wind == m
        all_ok = all_ok and ok
        rows.append(["complex-power", 2, m, rep.value, m, wind, ok])
    return {
        "header": ["field", "dim", "param", "degree", "expected", "winding", "ok"],
        "rows": rows,
        "metrics": {"fields_checked": len(rows)},
        "thresholds": {},
        "ok": all_ok,
        "failing": None if all_ok else "degree_mismatch",
    }


def run_averaging(cm, num, seed):
    if cm.field is None or cm.region is None:
        raise ConfigError("averaging needs a model with a field and a region")
    lambdas = [float(v) for v in num.get("lambdas", catalog.AVERAGING_LADDER)]
    report = averaging_degree_check(
        cm.family, cm.field, cm.region, lambdas,
        n=num.get("n", 256), grid=num.get("grid", 256),
    )
    rows = [["averaged", "", True, "", report.d0, "", ""]]
    for r in report.rows:
        rows.append(["period-map", r.lam, r.boundary_ok, r.boundary_min,
                     r.degree, r.agrees, r.error])
    wind = None
    wind_ok = True
    if cm.dim == 2:
        avg = averaged_pair(cm.family, cm.field, probes=cm.region.midpoint)

        def g_hat(x):
            x = np.asarray(x, dtype=float)
            corr = np.linalg.solve(avg.A_hat, np.asarray(avg.F_hat(x)).T).T
            return x + corr

        wind = winding_number_2d(g_hat, cm.region)
        wind_ok = wind == report.d0
        rows.append(["winding", "", True, "", wind, wind_ok, ""])
    checks = [
        ("degree_equality", report.verdict),
        ("winding_crosscheck", wind_ok),
    ]
    failing = next((name for name, good in checks if not good), None)
    return {
        "header": ["section", "lambda", "boundary_ok", "boundary_min",
                   "degree", "agrees", "error"],
        "rows": rows,
        "metrics": {"d0": report.d0, "lambda0": report.lambda0,
                    "winding_d0": wind},
        "thresholds": {},
        "ok": failing is None,
        "failing": failing,
    }


def run_continuation(cm, num, seed):
    if cm.field is None or cm.region is None:
        raise ConfigError("continuation needs a model with a field and a region")
    lambdas = sorted(float(v) for v in num.get("lambdas", (0.01, 0.03, 0.1, 0.3, 1.0)))
    n = num.get("n", 256)
    grid = num.get("grid", 256)
    report = averaging_degree_check(cm.family, cm.field, cm.region, lambdas,
                                    n=n, grid=grid)
    rows = [["averaged", "", True, report.d0, ""]]
    boundary_clear = True
    degrees_ok = True
    for r in report.rows:
        boundary_clear = boundary_clear and r.boundary_ok
        degrees_ok = degrees_ok and (r.degree == report.d0)
        rows.append(["sweep", r.lam, r.boundary_ok, r.degree, r.error])
    lam_top = lambdas[-1]
    R = build_evolution(scale_family(cm.family, lam_top), n)
    fp = fixed_point(R, cm.field, lam_top, cm.region.midpoint,
                     tol=1e-8, grid=grid)
    inside = bool(cm.region.contains(fp.x))
    rows.append(["fixed-point", lam_top, inside, fp.residual, ""])
    checks = [
        ("averaged_degree_nonzero", report.d0 != 0),
        ("boundary_clear", boundary_clear),
        ("degree_constant", degrees_ok),
        ("endpoint_fixed_point", inside and fp.residual <= 1e-8),
    ]
    failing = next((name for name, good in checks if not good), None)
    return {
        "header": ["section", "lambda", "ok", "value", "error"],
        "rows": rows,
        "metrics": {"d0": report.d0, "x_star": fp.x,
                    "fp_residual": fp.residual},
        "thresholds": {"fp_residual": 1e-8},
        "ok": failing is None,
        "failing": failing,
    }


def run_wave_periodic(cm, num, seed):
    model = _require_wave(cm)
    if "f_inf" in num:
        f_inf = float(num["f_inf"])
    elif model.k >= 2:
        f_inf = float(0.5 * (model.eigs[0] + model.eigs[1]))
    else:
        f_inf = float(model.eigs[0] + 1.0)
    lambdas = [float(v) for v in num.get("lambdas", cm.lambdas)]
    nondeg = linear_nondegeneracy(model, lambdas, f_inf=f_inf,
                                  n=num.get("n", 512))
    rows = [["kernel", "", nondeg.kernel_sigma_min, 1e-8, nondeg.kernel_ok]]
    for r in nondeg.rows:
        rows.append(["monodromy", r.lam, r.unit_gap, 1e-8, r.ok])
    result = find_periodic_wave(model, lam=1.0,
                                n=num.get("grid", 1024) * 2,
                                grid=num.get("grid", 1024))
    rows.append(["periodic", 1.0, result.residual_eta, 1e-6,
                 result.residual_eta <= 1e-6])
    checks = [
        ("nondegeneracy", nondeg.verdict),
        ("periodic_residual", result.residual_eta <= 1e-6),
    ]
    failing = next((name for name, good in checks if not good), None)
    return {
        "header": ["section", "lambda", "value", "bound", "ok"],
        "rows": rows,
        "metrics": {
            "f_inf_checked": f_inf,
            "kernel_sigma_min": nondeg.kernel_sigma_min,
            "unit_gap_min": min(r.unit_gap for r in nondeg.rows),
            "periodic_residual_eta": result.residual_eta,
            "newton_iterations": result.fixed_point.iterations,
        },
        "thresholds": {"unit_gap": 1e-8, "residual": 1e-6},
        "ok": failing is None,
        "failing": failing,
    }


def run_wave_energy(cm, num, seed):
    model = _require_wave(cm)
    rows = []

    sel = select_eta(model)
    rate_ok = sel.rate_numeric >= sel.rate_analytic - 1e-9
    rows.append(["rate", "analytic", sel.rate_analytic, "", ""])
    rows.append(["rate", "numeric", sel.rate_numeric,
                 sel.rate_analytic - 1e-9, rate_ok])

    grid0 = num.get("grid", 2048)
    n0 = num.get("n", 2 * grid0)
    field = nonlinear_field(model) if model.f is not None else None
    x0 = np.zeros(model.dim)
    x0[0] = 0.5
    x0[model.k] = -0.2

    def residual_at(grid, n):
        R = build_evolution(model.family, n)
        if field is None:
            traj = mild_solve(R, lambda t, z: np.zeros_like(z), x0, grid=grid)
            f_path = None
        else:
            traj = mild_solve(R, field, x0, grid=grid)
            vals = field(traj.times[:, None], traj.states)
            f_path = vals[:, model.k:]
        rep = energy_residual(traj, model, f_path=f_path)
        return rep.max_energy_residual, rep.max_position_residual

    res0, pos0 = residual_at(grid0, n0)
    res1, _ = residual_at(2 * grid0, 2 * n0)
    factor = res1 / res0 if res0 > 0 else 0.0
    halving_ok = (0.3 <= factor <= 0.7) or res1 <= 1e-6
    rows.append(["energy", "grid=%d,n=%d" % (grid0, n0), res0, 1e-3, res0 < 1e-3])
    rows.append(["energy", "grid=%d,n=%d" % (2 * grid0, 2 * n0), res1, "", ""])
    rows.append(["energy-halving", "", factor, "0.3..0.7", halving_ok])
    rows.append(["position", "grid=%d,n=%d" % (grid0, n0), pos0, "", ""])

    inv_ok = True
    for ka, kb in ((1, 3), (3, 8)):
        small, _ = build_wave_model(model.ell, ka, model.beta, model.T)
        big, _ = build_wave_model(model.ell, kb, model.beta, model.T)
        gap = 0.0
        for ft, fs in ((0.17, 0.0), (0.35, 0.1), (0.5, 0.25), (0.63, 0.2),
                       (0.77, 0.4), (0.88, 0.3), (1.0, 0.0), (0.95, 0.6),
                       (0.42, 0.4), (0.29, 0.05)):
            gap = max(gap, spectral_invariance_gap(
                small, big, ft * model.T, fs * model.T, n=256))
        good = gap <= 1e-10
        inv_ok = inv_ok and good
        rows.append(["invariance", "k=%d,k'=%d" % (ka, kb), gap, 1e-10, good])
        C = 0.1 * np.ones((kb, kb))
        gap_c = spectral_invariance_gap(small, big, 0.5 * model.T, 0.0,
                                        n=256, coupling=C)
        coupled_good = gap_c > 1e-8
        inv_ok = inv_ok and coupled_good
        rows.append(["invariance-coupled", "k=%d,k'=%d" % (ka, kb),
                     gap_c, "> 1e-8", coupled_good])

    checks = [
        ("dissipativity_rate", rate_ok),
        ("energy_residual", bool(res0 < 1e-3)),
        ("energy_halving", halving_ok),
        ("eigenmode_invariance", inv_ok),
    ]
    failing = next((name for name, good in checks if not good), None)
    return {
        "header": ["section", "label", "value", "bound", "ok"],
        "rows": rows,
        "metrics": {
            "eta": sel.eta,
            "rate_analytic": sel.rate_analytic,
            "rate_numeric": sel.rate_numeric,
            "energy_residual": res0,
            "energy_halving_factor": factor,
        },
        "thresholds": {"energy": 1e-3, "halving": [0.3, 0.7],
                       "invariance": 1e-10},
        "ok": failing is None,
        "failing": failing,
    }


RUNNERS = {
    "chernoff": run_chernoff,
    "evolsys": run_evolsys,
    "branching": run_branching,
    "degree": run_degree,
    "averaging": run_averaging,
    "continuation": run_continuation,
    "wave-periodic": run_wave_periodic,
    "wave-energy": run_wave_energy,
}


def _write_outputs(out_dir, experiment, result, summary):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{experiment}.csv"
    if result is not None:
        with csv_path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(result["header"])
            for row in result["rows"]:
                writer.writerow([_fmt(c) for c in row])
    json_path = out / f"{experiment}.summary.json"
    json_path.write_text(
        json.dumps(_jsonable(summary), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return csv_path, json_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="evolver",
        description="Run a named experiment from a JSON config.",
    )
    parser.add_argument("experiment", choices=EXPERIMENT_NAMES)
    parser.add_argument("--config", default=None, help="JSON config path")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed override")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        num, out_cfg = _validate_config(cfg, args.experiment)
        cm = None
        if args.experiment in DEFAULT_MODEL or "model" in cfg:
            cm = _resolve_model(cfg, args.experiment)
    except EvolverError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    seed = args.seed if args.seed is not None else int(num.get("seed", 0))
    out_dir = args.out or out_cfg.get("dir", "out")
    model_key = cm.key if cm is not None else None
    summary = {
        "schema": 1,
        "experiment": args.experiment,
        "model": model_key,
        "seed": seed,
        "wall_time": None,
    }

    t0 = time.perf_counter()
    try:
        result = RUNNERS[args.experiment](cm, num, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EvolverError as exc:
        slug = _ERROR_SLUGS.get(type(exc).__name__, "error")
        summary.update({"verdict": "fail", "error": slug, "message": str(exc)})
        _write_outputs(out_dir, args.experiment, None, summary)
        print(f"numeric failure: {slug}: {exc}", file=sys.stderr)
        return 1
    finally:
        print(f"[timing] {args.experiment}: {time.perf_counter() - t0:.2f}s",
              file=sys.stderr)

    summary.update({
        "verdict": "pass" if result["ok"] else "fail",
        "metrics": result["metrics"],
        "thresholds": result["thresholds"],
        "failing": result["failing"],
    })
    csv_path, json_path = _write_outputs(out_dir, args.experiment, result, summary)
    print(f"{args.experiment}: {summary['verdict']} ({csv_path}, {json_path})")
    if not result["ok"]:
        print(f"numeric failure: {result['failing']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
