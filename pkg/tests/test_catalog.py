import numpy as np
import pytest

from evolver import ConfigError, ExprError
from evolver.catalog import (
    AVERAGING_LADDER,
    BRANCHING_LADDER,
    WAVE_LADDER,
    compile_field,
    compile_matrix,
    compile_time_coefficient,
    get_model,
    list_models,
    model_from_config,
)


def test_list_and_get():
    assert list_models() == ["scalar-linear", "rotation-damped-2d", "wave-k1", "wave-k3"]
    with pytest.raises(ConfigError):
        get_model("nope")


def test_ladders_frozen():
    assert BRANCHING_LADDER == (1.0, 0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3)
    assert AVERAGING_LADDER == (1.0, 0.3, 0.1, 0.03, 0.01)
    assert len(WAVE_LADDER) == 10
    assert WAVE_LADDER[0] == 0.1 and WAVE_LADDER[-1] == 1.0


def test_scalar_linear_model():
    m = get_model("scalar-linear")
    assert m.kind == "ode" and m.dim == 1 and m.T == 1.0
    assert np.array_equal(m.family.A(0.37), [[-1.0]])
    assert m.family.omega == 1.0
    # forcing peaks at quarter period: 2 + sin(pi/2) = 3
    assert np.allclose(m.field(0.25, np.zeros(1)), [3.0], atol=1e-14)
    assert m.region.contains(np.array([2.0]))
    assert m.lambdas == BRANCHING_LADDER
    assert m.wave is None


def test_rotation_model_frozen():
    m = get_model("rotation-damped-2d")
    assert m.dim == 2 and m.family.omega == 0.7
    assert np.allclose(m.family.A(0.25), [[-1.3, -1.0], [1.0, -1.3]], atol=1e-14)
    assert np.allclose(m.field(0.0, np.zeros(2)), [1.2, 0.5], atol=1e-14)
    assert m.region.contains(np.array([0.25, 0.75]))


def test_wave_models():
    m1 = get_model("wave-k1")
    assert m1.kind == "wave" and m1.dim == 2
    assert m1.wave is not None and m1.field is None
    assert np.isclose(m1.T, 2.0 * np.pi)
    m3 = get_model("wave-k3")
    assert m3.dim == 6
    assert m3.lambdas == WAVE_LADDER


def test_time_coefficient():
    beta = compile_time_coefficient("1+0.5*cos(2*pi*t/T)", 2.0)
    assert beta(0.0) == 1.5
    assert np.isclose(beta(1.0), 0.5, atol=1e-14)
    with pytest.raises(ConfigError):
        compile_time_coefficient("s+1", 1.0)


def test_compile_matrix():
    A, d = compile_matrix([[-2.0, "0.5*sin(2*pi*t/T)"], [0.0, "-1"]], 1.0)
    assert d == 2
    assert np.allclose(A(0.25), [[-2.0, 0.5], [0.0, -1.0]], atol=1e-14)
    with pytest.raises(ConfigError):
        compile_matrix([[-1.0, 0.0]], 1.0)  # not square
    with pytest.raises(ConfigError):
        compile_matrix([["s"]], 1.0)  # state variable in a coefficient


def test_field_broadcast_shapes():
    rng = np.random.default_rng(61)
    F = compile_field(["s+t", "2*s"], 1.0)
    t = np.linspace(0.0, 1.0, 5).reshape(5, 1, 1)
    x = rng.normal(size=(5, 4, 2))
    out = F(t, x)
    assert out.shape == (5, 4, 2)
    for i in range(5):
        for b in range(4):
            want = [x[i, b, 0] + t[i, 0, 0], 2.0 * x[i, b, 1]]
            assert np.allclose(out[i, b], want, atol=1e-14)
    # scalar time against a batch of states
    out1 = F(0.5, x[0])
    assert out1.shape == (4, 2)
    assert np.allclose(out1[:, 0], x[0, :, 0] + 0.5, atol=1e-14)
    with pytest.raises(ExprError):
        compile_field(["q+1"], 1.0)  # parser rejects unknown identifiers


def test_inline_model():
    spec = {
        "A": [[-2.0, "0.5*sin(2*pi*t/T)"], [0.0, -1.0]],
        "T": 1.0,
        "F": ["1+s", "cos(2*pi*t)"],
        "lipschitz": 1.0,
        "growth": 2.0,
        "omega": 0.9,
        "region": {"kind": "ball", "center": [0.0, 0.0], "radius": 2.0},
        "lambdas": [1.0, 0.5],
    }
    m = model_from_config(spec)
    assert m.key == "inline" and m.dim == 2
    assert m.family.omega == 0.9
    assert np.allclose(m.family.A(0.25), [[-2.0, 0.5], [0.0, -1.0]], atol=1e-14)
    assert np.allclose(m.field(0.0, np.array([1.0, 0.0])), [2.0, 1.0], atol=1e-14)
    assert m.lambdas == (1.0, 0.5)
    assert m.region.contains(np.zeros(2))


def test_inline_box_region_and_key_passthrough():
    m = model_from_config({"A": [[-1.0]],
                           "region": {"kind": "box", "lo": [0.0], "hi": [1.0]}})
    assert m.region.contains(np.array([0.5]))
    assert m.field is None
    assert model_from_config("wave-k1").key == "wave-k1"


def test_inline_config_errors():
    with pytest.raises(ConfigError):
        model_from_config(42)
    with pytest.raises(ConfigError):
        model_from_config({"T": 1.0})
    with pytest.raises(ConfigError):
        model_from_config({"A": [[-1.0]], "T": -1.0})
    with pytest.raises(ConfigError):
        model_from_config({"A": [[-1.0]], "F": ["1", "2"]})
    with pytest.raises(ConfigError):
        model_from_config({"A": [[-1.0]], "region": {"kind": "torus"}})
