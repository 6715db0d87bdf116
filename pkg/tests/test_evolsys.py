import numpy as np
import pytest

from evolver import (
    GeneratorFamily,
    InvalidInputError,
    PreconditionError,
    ResourceLimitError,
    build_evolution,
    cocycle_defect,
    contraction_check,
    evolution_apply,
    family_continuity_gap,
    get_model,
    scale_family,
    shift_family,
    validate_family,
)

from oracles import rk4_transition


def _scalar_family():
    # A(t) = -(2 + sin(2 pi t)): closed-form evolution via the antiderivative
    return GeneratorFamily(
        dim=1,
        A=lambda t: np.array([[-(2.0 + np.sin(2.0 * np.pi * t))]]),
        T=1.0,
        omega=1.0,
    )


def _scalar_exact(t, s):
    anti = lambda u: 2.0 * u - np.cos(2.0 * np.pi * u) / (2.0 * np.pi)
    return np.exp(-(anti(t) - anti(s)))


def test_family_validation():
    with pytest.raises(InvalidInputError):
        GeneratorFamily(dim=0, A=lambda t: np.zeros((0, 0)), T=1.0)
    with pytest.raises(InvalidInputError):
        GeneratorFamily(dim=1, A=lambda t: np.array([[-1.0]]), T=-1.0)
    with pytest.raises(InvalidInputError):
        GeneratorFamily(dim=2, A=lambda t: np.array([[-1.0]]), T=1.0)


def test_build_guards():
    fam = _scalar_family()
    with pytest.raises(InvalidInputError):
        build_evolution(fam, 0)
    with pytest.raises(ResourceLimitError):
        build_evolution(fam, 2 ** 14 + 1)


def test_identity_and_ordering():
    R = build_evolution(_scalar_family(), 64)
    assert np.array_equal(R.operator(0.37, 0.37), np.eye(1))
    with pytest.raises(PreconditionError):
        R.operator(0.2, 0.5)
    with pytest.raises(PreconditionError):
        R.operator(1.5, 0.0)


def test_scalar_closed_form_and_order():
    fam = _scalar_family()
    pairs = [(1.0, 0.0), (0.77, 0.13), (0.5, 0.25)]
    errs = []
    for n in (256, 1024, 4096):
        R = build_evolution(fam, n)
        errs.append(max(abs(R.operator(t, s)[0, 0] - _scalar_exact(t, s))
                        for t, s in pairs))
    assert errs[1] < 1e-3
    order = np.polyfit(np.log([256, 1024, 4096]), np.log(errs), 1)[0]
    assert -order >= 0.9  # first order in 1/n


def test_cocycle_identity_on_grid():
    cm = get_model("rotation-damped-2d")
    R = build_evolution(cm.family, 128)
    nodes = R.nodes
    worst = 0.0
    for (i, j, k) in [(0, 17, 64), (5, 40, 101), (32, 64, 128), (0, 64, 128)]:
        worst = max(worst, cocycle_defect(R, nodes[k], nodes[j], nodes[i]))
    assert worst <= 1e-12
    with pytest.raises(PreconditionError):
        cocycle_defect(R, 0.1, 0.5, 0.2)


def test_cocycle_identity_off_grid():
    # fractional times inside cells are still exact for the frozen family
    R = build_evolution(_scalar_family(), 64)
    worst = max(cocycle_defect(R, t, r, s)
                for (s, r, t) in [(0.013, 0.41, 0.97), (0.2, 0.50001, 0.7)])
    assert worst <= 1e-12


def test_matches_rk4_oracle():
    cm = get_model("rotation-damped-2d")
    fam = cm.family
    R = build_evolution(fam, 4096)
    ref = rk4_transition(fam.A, fam.T, 0.0, 20000)
    assert np.linalg.norm(R.operator(fam.T, 0.0) - ref, 2) < 1e-3


def test_apply_matches_operator_and_batches():
    R = build_evolution(get_model("rotation-damped-2d").family, 64)
    rng = np.random.default_rng(21)
    X = rng.standard_normal((5, 2))
    M = R.operator(0.9, 0.1)
    got = R.apply(0.9, 0.1, X)
    assert np.allclose(got, X @ M.T, atol=1e-12)
    assert np.allclose(evolution_apply(R, 0.9, 0.1, X[0]), M @ X[0], atol=1e-12)
    with pytest.raises(InvalidInputError):
        R.apply(0.9, 0.1, np.zeros(3))


def test_contraction_check_certifies_rate():
    fam = _scalar_family()  # actual rate is 1 at the worst node
    R = build_evolution(fam, 256)
    assert contraction_check(R, 1.0) <= 1e-9
    # a rate above the true one must show positive excess
    assert contraction_check(R, 3.5) > 1e-3


def test_scale_and_shift_family():
    fam = _scalar_family()
    assert scale_family(fam, 0.5).A(0.25)[0, 0] == pytest.approx(-1.5)
    assert scale_family(fam, 0.5).omega == pytest.approx(0.5)
    with pytest.raises(InvalidInputError):
        scale_family(fam, -1.0)
    shifted = shift_family(fam, lambda t: np.array([[1.0]]), omega=0.0)
    assert shifted.A(0.25)[0, 0] == pytest.approx(-2.0)


def test_validate_family_report():
    rep = validate_family(_scalar_family())
    assert rep["passed"]
    assert rep["rate_min"] == pytest.approx(1.0, abs=1e-9)
    assert rep["periodic_defect"] <= 1e-12
    # a genuinely discontinuous family is flagged
    jump = GeneratorFamily(
        dim=1,
        A=lambda t: np.array([[-1.0 if t < 0.5 else -2.0]]),
        T=1.0,
        omega=0.0,
        periodic=False,
    )
    rep = validate_family(jump)
    assert not rep["continuity_ok"]
    assert not rep["passed"]


def test_continuity_gap_inequality_and_scaling():
    fam = _scalar_family()
    v = np.array([1.0])
    lhss = []
    for eps in (1e-1, 1e-2, 1e-3):
        pert = shift_family(fam, lambda t, e=eps: np.array([[e * np.cos(2.0 * np.pi * t)]]))
        lhs, rhs = family_continuity_gap(fam, pert, 512, v)
        assert lhs <= rhs
        # rhs = ||v||_V * eps * int |cos| = 3 * eps * (2/pi)
        assert rhs == pytest.approx(3.0 * eps * 2.0 / np.pi, rel=1e-6)
        lhss.append(lhs)
    assert lhss[0] / lhss[1] == pytest.approx(10.0, rel=0.2)
    assert lhss[1] / lhss[2] == pytest.approx(10.0, rel=0.2)


def test_continuity_gap_identical_families_is_zero():
    fam = _scalar_family()
    lhs, rhs = family_continuity_gap(fam, _scalar_family(), 128, [1.0])
    assert lhs == 0.0
    assert rhs <= 1e-12


def test_continuity_gap_requires_matching_shapes():
    fam = _scalar_family()
    other = GeneratorFamily(dim=1, A=lambda t: np.array([[-1.0]]), T=2.0)
    with pytest.raises(PreconditionError):
        family_continuity_gap(fam, other, 64, [1.0])
