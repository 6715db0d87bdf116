import numpy as np
import pytest

from evolver import (
    ConvergenceError,
    DegenerateFixedPointError,
    GeneratorFamily,
    InvalidInputError,
    NonlinearField,
    PreconditionError,
    build_evolution,
    fixed_point,
    get_model,
    mild_solve,
    sigma_apply,
    translate,
)

from oracles import rk4_path

# periodic solution of u' = lam(-u + 2 + sin(2 pi t)) starts at
# x_lam = 2 - 2 pi lam / (lam^2 + 4 pi^2)
def _scalar_periodic_start(lam):
    return 2.0 - 2.0 * np.pi * lam / (lam ** 2 + 4.0 * np.pi ** 2)


def test_sigma_zero_forcing_is_linear_flow():
    cm = get_model("rotation-damped-2d")
    R = build_evolution(cm.family, 256)
    x = np.array([0.4, -0.3])
    w = np.zeros((257, 2))
    traj = sigma_apply(R, x, w)
    for i in (0, 64, 128, 256):
        ref = R.apply(traj.times[i], 0.0, x)
        assert np.allclose(traj.states[i], ref, atol=1e-12)


def test_sigma_is_affine_in_forcing():
    cm = get_model("rotation-damped-2d")
    R = build_evolution(cm.family, 128)
    rng = np.random.default_rng(31)
    x = rng.standard_normal(2)
    w1 = rng.standard_normal((129, 2))
    w2 = rng.standard_normal((129, 2))
    both = sigma_apply(R, x, w1 + w2, lam=0.7).states
    split = (sigma_apply(R, x, w1, lam=0.7).states
             + sigma_apply(R, np.zeros(2), w2, lam=0.7).states)
    assert np.allclose(both, split, atol=1e-12)


def test_sigma_input_validation():
    R = build_evolution(get_model("scalar-linear").family, 16)
    with pytest.raises(InvalidInputError):
        sigma_apply(R, [0.0], np.zeros((1, 1)))  # single sample
    with pytest.raises(InvalidInputError):
        sigma_apply(R, [0.0], np.zeros(5))  # not (m+1, d)
    with pytest.raises(InvalidInputError):
        sigma_apply(R, [0.0, 0.0], np.zeros((9, 1)))


def test_mild_scalar_closed_form():
    cm = get_model("scalar-linear")
    R = build_evolution(cm.family, 4096)
    lam = 0.7
    traj = mild_solve(R, cm.field, np.array([1.0]), lam=lam, grid=2048)
    t = traj.times
    w = 2.0 * np.pi
    exact = (np.exp(-t)
             + lam * (2.0 * (1.0 - np.exp(-t))
                      + (np.sin(w * t) - w * np.cos(w * t) + w * np.exp(-t))
                      / (1.0 + w * w)))
    assert np.max(np.abs(traj.states[:, 0] - exact)) < 1e-5
    assert traj.iterations >= 2
    assert traj.residual < 1e-10


def test_mild_matches_rk4_oracle_nonlinear():
    cm = get_model("rotation-damped-2d")
    R = build_evolution(cm.family, 2048)
    x0 = np.array([0.3, -0.2])
    traj = mild_solve(R, cm.field, x0, grid=2048)
    ref = rk4_path(cm.family.A, cm.field, x0, cm.family.T, 20000)
    assert np.linalg.norm(traj.final - ref) < 2e-4


def test_mild_batch_matches_loop():
    cm = get_model("rotation-damped-2d")
    R = build_evolution(cm.family, 128)
    rng = np.random.default_rng(33)
    X = rng.standard_normal((4, 2))
    batch = mild_solve(R, cm.field, X, grid=256).final
    for i in range(4):
        single = mild_solve(R, cm.field, X[i], grid=256).final
        assert np.allclose(batch[i], single, atol=1e-12)


def test_mild_gronwall_contraction():
    # ||Phi_t(x) - Phi_t(y)|| <= e^{(lam L - omega) t} ||x - y||
    cm = get_model("rotation-damped-2d")
    R = build_evolution(cm.family, 512)
    factor = np.exp(cm.field.lipschitz - cm.family.omega)  # lam = 1, t = T = 1
    rng = np.random.default_rng(34)
    for _ in range(5):
        x, y = rng.standard_normal((2, 2))
        fx = mild_solve(R, cm.field, x, grid=512).final
        fy = mild_solve(R, cm.field, y, grid=512).final
        assert np.linalg.norm(fx - fy) <= factor * np.linalg.norm(x - y) * (1.0 + 1e-3)


def test_mild_divergence_guard():
    fam = GeneratorFamily(dim=1, A=lambda t: np.array([[0.0]]), T=1.0)
    R = build_evolution(fam, 64)
    explosive = NonlinearField(F=lambda t, x: x ** 3, lipschitz=np.inf, growth=np.inf)
    with pytest.raises(ConvergenceError):
        mild_solve(R, explosive, np.array([4.0]), grid=128, max_iter=50)


def test_translate_interpolates():
    cm = get_model("scalar-linear")
    R = build_evolution(cm.family, 1024)
    lam = 1.0
    x = np.array([_scalar_periodic_start(lam)])
    # the periodic orbit returns to its start at t = T
    back = translate(R, cm.field, 1.0, x, lam=lam, grid=1024)
    assert abs(back[0] - x[0]) < 1e-5
    with pytest.raises(PreconditionError):
        translate(R, cm.field, 2.0, x)


def test_fixed_point_picard_scalar():
    cm = get_model("scalar-linear")
    R = build_evolution(cm.family, 1024)
    fp = fixed_point(R, cm.field, 1.0, [0.0], method="picard", tol=1e-10)
    assert fp.x[0] == pytest.approx(_scalar_periodic_start(1.0), abs=1e-5)
    assert fp.residual <= 1e-10
    assert fp.method == "picard"


def test_fixed_point_newton_matches_picard():
    cm = get_model("scalar-linear")
    R = build_evolution(cm.family, 1024)
    newton = fixed_point(R, cm.field, 1.0, [0.0], method="newton-on-map", tol=1e-10)
    picard = fixed_point(R, cm.field, 1.0, [0.0], method="picard", tol=1e-10)
    assert abs(newton.x[0] - picard.x[0]) < 1e-8
    assert newton.iterations <= picard.iterations


def test_fixed_point_rotation_2d():
    cm = get_model("rotation-damped-2d")
    R = build_evolution(cm.family, 1024)
    fp = fixed_point(R, cm.field, 1.0, cm.region.midpoint, tol=1e-10)
    # the solve certifies periodicity of the resulting orbit
    orbit = mild_solve(R, cm.field, fp.x, grid=2048)
    assert np.linalg.norm(orbit.final - fp.x) <= 1e-8


def test_fixed_point_degenerate_jacobian():
    # lam = 0 makes Phi exactly R(T,0) = diag(1, 1/e): unit eigenvalue,
    # so DPhi - I has an exactly-zero column and Newton must refuse
    A = np.array([[0.0, 0.0], [0.0, -1.0]])
    fam = GeneratorFamily(dim=2, A=lambda t: A, T=1.0)
    R = build_evolution(fam, 64)
    field = NonlinearField(F=lambda t, x: np.ones_like(x), lipschitz=0.0, growth=1.0)
    with pytest.raises(DegenerateFixedPointError):
        fixed_point(R, field, 0.0, [0.0, 1.0], method="newton-on-map", grid=128)


def test_fixed_point_free_translation_map_fails_loudly():
    # Phi(x) = x + 1 has no fixed point; the solver must raise, not return
    fam = GeneratorFamily(dim=1, A=lambda t: np.array([[0.0]]), T=1.0)
    R = build_evolution(fam, 64)
    const = NonlinearField(F=lambda t, x: np.ones_like(x), lipschitz=0.0, growth=1.0)
    with pytest.raises((ConvergenceError, DegenerateFixedPointError)):
        fixed_point(R, const, 1.0, [0.0], method="newton-on-map", grid=128)


def test_fixed_point_unknown_method():
    R = build_evolution(get_model("scalar-linear").family, 64)
    with pytest.raises(InvalidInputError):
        fixed_point(R, get_model("scalar-linear").field, 1.0, [0.0], method="bogus")
