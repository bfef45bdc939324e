import numpy as np
import pytest
from hypothesis import given, strategies as st

from magorlicz.errors import DomainError, ParseError, ValidationError
from magorlicz.fields import (bump, constant_potential, eval_potential, eval_scalar,
                              expression_field, lipschitz_estimate, linear_potential,
                              parse_field, parse_potential, parse_prescription, ray_exit_radius,
                              sup_modulus, tent, zero_potential)


def test_tent_and_bump_values():
    assert eval_scalar(tent(1.0), 0.0) == 1.0
    assert eval_scalar(tent(2.0), 1.0) == 0.5
    assert eval_scalar(tent(1.0), 1.5) == 0.0
    assert eval_scalar(bump(1.0), 0.0) == pytest.approx(1.0)
    assert eval_scalar(bump(1.0), 0.5) == pytest.approx(np.exp(1 - 1 / 0.75))
    assert eval_scalar(bump(1.0), [1.0]) == 0.0
    assert eval_scalar(bump(1.0, dim=2), [0.6, 0.8]) == 0.0


def test_expression_field_truncated():
    u = expression_field("exp(-x1^2) * (1 + i*x1)", 1.0)
    assert u.is_complex
    assert eval_scalar(u, 0.5) == pytest.approx(np.exp(-0.25) * (1 + 0.5j))
    assert eval_scalar(u, 1.0001) == 0.0


def test_vectorised_shapes():
    x = np.linspace(-2, 2, 11)
    assert tent(1.0)(x).shape == (11,)
    pts = np.zeros((3, 4, 2))
    assert bump(1.0, dim=2)(pts).shape == (3, 4)
    assert linear_potential([[0, -1], [1, 0]])(pts).shape == (3, 4, 2)


def test_potentials():
    A = linear_potential([[0.0, -0.5], [0.5, 0.0]])
    np.testing.assert_allclose(eval_potential(A, [2.0, 4.0]), [-2.0, 1.0])
    assert eval_potential(constant_potential(5.0), 0.3) == 5.0
    assert eval_potential(zero_potential(1), 7.0) == 0.0
    B = parse_potential("expr:x2;-x1", 2)
    np.testing.assert_allclose(B(np.array([1.0, 3.0])), [3.0, -1.0])
    np.testing.assert_allclose(constant_potential([1, 2]).shifted([3, 4])([0.0, 0.0]), [4, 6])


def test_gauged_field_multiplies_phase():
    u = tent(1.0).gauged(3.0)
    x = 0.4
    assert eval_scalar(u, x) == pytest.approx(0.6 * np.exp(-3j * x))
    assert eval_scalar(u.modulus(), x) == pytest.approx(0.6)


def test_descriptors_round_trip():
    for d in ("tent:1", "bump:2.5", "expr:1:1 - x1^2"):
        assert parse_field(d, 1).descriptor == d
    for d in ("zero", "const:5", "linear:0,-1,1,0"):
        dim = 2 if d.startswith("linear") else 1
        assert parse_potential(d, dim).descriptor == d
    assert parse_prescription("averaged:4") == ("averaged", 4)
    assert parse_potential("const:1", 1, "averaged:3").prescription_descriptor == "averaged:3"


@pytest.mark.parametrize("desc, dim", [
    ("tent", 1), ("tent:-1", 1), ("tent:a", 1), ("cone:1", 1), ("expr:1", 1),
    ("expr:1,2:x1", 1), ("tent:1", 3),
])
def test_bad_field_descriptors(desc, dim):
    with pytest.raises(ValidationError):
        parse_field(desc, dim)


@pytest.mark.parametrize("desc, dim", [
    ("const:1,2", 1), ("linear:1,2,3", 2), ("expr:x1", 2), ("expr:i;x1", 2), ("curl", 1),
])
def test_bad_potential_descriptors(desc, dim):
    with pytest.raises(ValidationError):
        parse_potential(desc, dim)


def test_bad_expression_reports_offset():
    with pytest.raises(ParseError, match="offset"):
        parse_field("expr:1:x1 +* 2", 1)


@pytest.mark.parametrize("p", ["middle", "averaged:0", "averaged:k"])
def test_bad_prescription(p):
    with pytest.raises(ValidationError):
        parse_prescription(p)


def test_exit_radius_examples():
    assert ray_exit_radius(tent(1.0), 0.0, 1.0) == pytest.approx(1.0)
    assert ray_exit_radius(tent(1.0), 0.5, -1.0) == pytest.approx(1.5)
    assert ray_exit_radius(bump(2.0, dim=2), [0.0, 0.0], [0.6, 0.8]) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        ray_exit_radius(tent(1.0), 1.5, 1.0)


@given(st.floats(0, 0.999), st.floats(0, 2 * np.pi), st.floats(0, 2 * np.pi))
def test_exit_radius_lands_on_sphere(rho, a, b):
    u = tent(1.3, dim=2)
    x = 1.3 * rho * np.array([np.cos(a), np.sin(a)])
    th = np.array([np.cos(b), np.sin(b)])
    r = ray_exit_radius(u, x, th)
    assert r > 0
    assert np.linalg.norm(x + r * th) == pytest.approx(1.3, rel=1e-10)


def test_sampled_helpers():
    assert sup_modulus(tent(1.0)) == pytest.approx(1.0)
    assert lipschitz_estimate(tent(2.0)) == pytest.approx(0.5, rel=1e-3)
