import numpy as np
import pytest

from evolver import (
    DegenerateZeroError,
    InadmissibleRegionError,
    InvalidInputError,
    Region,
    SingularResolventError,
    brouwer_degree,
    deg_hat,
    winding_number_2d,
)


def _complex_power(m, c=0.1):
    # planar field z -> z^m - c with m simple zeros inside the unit ball
    def g(x):
        x = np.asarray(x, dtype=float)
        z = x[..., 0] + 1j * x[..., 1]
        w = z ** m - c
        return np.stack([w.real, w.imag], axis=-1)
    return g


def test_region_validation():
    with pytest.raises(InvalidInputError):
        Region.ball([0.0], 0.0)
    with pytest.raises(InvalidInputError):
        Region.ball([np.inf], 1.0)
    with pytest.raises(InvalidInputError):
        Region.box([0.0, 0.0], [1.0, -1.0])
    with pytest.raises(InvalidInputError):
        Region.box([0.0], [1.0, 2.0])


def test_region_membership_and_midpoint():
    U = Region.ball([1.0, 0.0], 2.0)
    assert U.contains([1.0, 1.0])
    assert not U.contains([4.0, 0.0])
    assert np.allclose(U.midpoint, [1.0, 0.0])
    B = Region.box([0.0, -1.0], [2.0, 1.0])
    assert B.contains([1.0, 0.0])
    assert not B.contains([1.0, 2.0])
    assert np.allclose(B.midpoint, [1.0, 0.0])
    assert B.dim == 2


def test_boundary_samples_on_circle():
    U = Region.ball([0.5, -0.5], 2.0)
    pts = U.boundary_samples(64)
    radii = np.linalg.norm(pts - U.center, axis=1)
    assert np.allclose(radii, 2.0, atol=1e-12)


def test_identity_field_degree_one():
    for d in (1, 2, 3):
        U = Region.ball(np.zeros(d), 1.0)
        rep = brouwer_degree(lambda x: np.asarray(x, dtype=float), U, grid=6)
        assert rep.value == 1
        assert len(rep.zeros) == 1
        assert np.allclose(rep.zeros[0], np.zeros(d), atol=1e-6)


def test_antipodal_field_degree():
    for d in (1, 2, 3):
        U = Region.ball(np.zeros(d), 1.0)
        rep = brouwer_degree(lambda x: -np.asarray(x, dtype=float), U, grid=6)
        assert rep.value == (-1) ** d


def test_complex_power_degrees():
    U = Region.ball([0.0, 0.0], 1.0)
    for m in (2, 3, 4):
        rep = brouwer_degree(_complex_power(m), U, grid=12)
        assert rep.value == m
        assert len(rep.zeros) == m
        assert winding_number_2d(_complex_power(m), U) == m


def test_winding_matches_newton_degree_on_random_products():
    # fields prod (z - z_i): degree = number of roots, all signs +1
    rng = np.random.default_rng(41)
    U = Region.ball([0.0, 0.0], 1.0)
    for _ in range(5):
        k = int(rng.integers(1, 4))
        roots = (rng.uniform(-0.5, 0.5, size=k)
                 + 1j * rng.uniform(-0.5, 0.5, size=k))
        if k > 1 and np.min(np.abs(np.subtract.outer(roots, roots))
                            + np.eye(k)) < 0.2:
            continue  # keep the zeros well separated

        def g(x, roots=roots):
            x = np.asarray(x, dtype=float)
            z = x[..., 0] + 1j * x[..., 1]
            w = np.ones_like(z, dtype=complex)
            for r in roots:
                w = w * (z - r)
            return np.stack([w.real, w.imag], axis=-1)

        rep = brouwer_degree(g, U, grid=14)
        assert rep.value == k
        assert np.all(rep.signs == 1)
        assert winding_number_2d(g, U) == k


def test_degree_on_box_region():
    U = Region.box([-1.0, -1.0], [1.0, 1.0])
    assert brouwer_degree(_complex_power(2), U, grid=12).value == 2
    assert winding_number_2d(_complex_power(2), U) == 2


def test_homotopy_invariance():
    # moving the target value never crosses zero on the boundary
    U = Region.ball([0.0, 0.0], 1.0)
    for tau in np.linspace(0.0, 1.0, 5):
        rep = brouwer_degree(_complex_power(2, c=0.1 + 0.4 * tau), U, grid=12)
        assert rep.value == 2


def test_additivity_over_subregions():
    g = _complex_power(2, c=0.25)  # zeros at +-0.5
    whole = brouwer_degree(g, Region.ball([0.0, 0.0], 1.0), grid=12).value
    left = brouwer_degree(g, Region.ball([-0.5, 0.0], 0.2), grid=8).value
    right = brouwer_degree(g, Region.ball([0.5, 0.0], 0.2), grid=8).value
    assert whole == left + right == 2


def test_boundary_zero_raises():
    U = Region.ball([1.0, 0.0], 1.0)  # boundary passes through the origin
    with pytest.raises(InadmissibleRegionError):
        brouwer_degree(lambda x: np.asarray(x, dtype=float), U)
    with pytest.raises(InadmissibleRegionError):
        winding_number_2d(lambda x: np.asarray(x, dtype=float), U)


def test_degenerate_zero_raises():
    def g(x):
        return np.asarray(x, dtype=float) ** 2

    with pytest.raises(DegenerateZeroError):
        brouwer_degree(g, Region.ball([0.1], 0.5), grid=8)


def test_dimension_cap():
    U = Region.ball(np.zeros(5), 1.0)
    with pytest.raises(InvalidInputError):
        brouwer_degree(lambda x: np.asarray(x, dtype=float), U)
    with pytest.raises(InvalidInputError):
        winding_number_2d(_complex_power(2), Region.ball(np.zeros(3), 1.0))


def test_deg_hat_linearized_field():
    # x + A^{-1} F with A = diag(-1,-2), F = const: single zero, degree 1
    A = np.diag([-1.0, -2.0])
    F = lambda x: np.broadcast_to([0.3, -0.4], np.asarray(x).shape).copy()
    rep = deg_hat(A, F, Region.ball([0.0, 0.0], 2.0), grid=8)
    assert rep.value == 1
    assert np.allclose(rep.zeros[0], [0.3, -0.2], atol=1e-6)


def test_deg_hat_singular_generator():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(SingularResolventError):
        deg_hat(A, lambda x: np.asarray(x), Region.ball([0.0, 0.0], 1.0))
