import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magorlicz.errors import ConvergenceError, DomainError, ValidationError
from magorlicz.fields import (bump, constant_potential, expression_field, expression_potential,
                              linear_potential, tent, zero_potential)
from magorlicz.integrals import (QuadratureSpec, luxemburg_norm, luxemburg_seminorm, modular_IG,
                                 modular_IsGA, outer_rule, sphere_rule, tail_selftest)
from magorlicz.young import parse_young, power

from oracles import tent_double_integral


def test_outer_rule_integrates_polynomials():
    x, w = outer_rule(1, 2.0, QuadratureSpec())
    assert w.sum() == pytest.approx(4.0)
    assert w @ np.abs(x[:, 0]) == pytest.approx(4.0)
    x, w = outer_rule(2, 1.0, QuadratureSpec())
    assert w.sum() == pytest.approx(np.pi, rel=1e-13)
    assert w @ np.sum(x ** 2, axis=1) == pytest.approx(np.pi / 2, rel=1e-13)
    th, wt = sphere_rule(2, QuadratureSpec())
    assert wt.sum() == pytest.approx(2 * np.pi)


def test_IG_exact_for_tent():
    m = modular_IG(tent(1.0), power(2))
    assert m.value == pytest.approx(2 / 3, rel=1e-13)
    assert modular_IG(tent(1.0), power(2), use_Gbar=True).value == pytest.approx(1 / 3, rel=1e-13)


def test_IG_bump_2d_resolved():
    a = modular_IG(bump(1.0, dim=2), power(2)).value
    b = modular_IG(bump(1.0, dim=2), power(2), QuadratureSpec(outer_points=128)).value
    assert a == pytest.approx(b, rel=1e-10)


def test_IsGA_against_closed_form():
    # s = 1/2, p = 2: the double integral of the tent equals 8 log 2
    m = modular_IsGA(tent(1.0), zero_potential(1), power(2), 0.5)
    assert m.value == pytest.approx(8 * math.log(2), rel=1e-6)
    assert m.converged and m.est_error < 1e-5


@pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
def test_IsGA_against_double_quadrature(s):
    m = modular_IsGA(tent(1.0), zero_potential(1), power(2), s)
    assert m.value == pytest.approx(tent_double_integral(s), rel=1e-5)


def test_IsGA_scaling_for_powers():
    # G = t^p is homogeneous: I(c u) = c^p I(u)
    u, F = tent(1.0), power(3)
    a = modular_IsGA(u, constant_potential(2.0), F, 0.4).value
    b = modular_IsGA(u.scaled(0.5), constant_potential(2.0), F, 0.4).value
    assert b == pytest.approx(a / 8, rel=1e-6)


@pytest.mark.parametrize("A", [zero_potential(1), constant_potential(5.0),
                               expression_potential(["x1^2"], 1)])
@pytest.mark.parametrize("s", [0.2, 0.5])
def test_gauge_covariance(A, s):
    a = modular_IsGA(tent(1.0), A.shifted(3.0), power(2), s)
    b = modular_IsGA(tent(1.0).gauged(3.0), A, power(2), s)
    assert abs(a.value - b.value) <= 2 * (a.est_error + b.est_error)


@settings(max_examples=10)
@given(st.floats(0.1, 0.9), st.floats(-20, 20))
def test_magnetic_modular_dominates_modulus(s, a):
    # integrated diamagnetic inequality with u = |u| >= 0
    u = tent(1.0)
    plain = modular_IsGA(u, zero_potential(1), power(2), s)
    mag = modular_IsGA(u, constant_potential(a), power(2), s)
    assert mag.value >= plain.value - (mag.est_error + plain.est_error)


def test_two_dimensional_rotation_runs():
    spec = QuadratureSpec(outer_points=16, angular_points=16, radial_rel_tol=1e-5)
    u = bump(1.0, dim=2)
    a = modular_IsGA(u, zero_potential(2), power(2), 0.5, spec)
    b = modular_IsGA(u, linear_potential([[0, -1], [1, 0]]), power(2), 0.5, spec)
    assert a.converged and b.value >= a.value


def test_complex_expression_field():
    u = expression_field("(1 - x1^2) * exp(i * 2 * x1)", 1.0)
    m = modular_IsGA(u, zero_potential(1), parse_young("powlog:1,1,1"), 0.3)
    assert np.isfinite(m.value) and m.value > 0


def test_budget_exhaustion_raises_with_partial():
    spec = QuadratureSpec(radial_rel_tol=1e-14, max_panels=1)
    with pytest.raises(ConvergenceError) as info:
        modular_IsGA(tent(1.0), zero_potential(1), power(2), 0.5, spec)
    assert info.value.partial is not None


@pytest.mark.parametrize("s", [0.0, 1.0, 1.2])
def test_s_validated(s):
    with pytest.raises(DomainError, match=r"\(0,1\)"):
        modular_IsGA(tent(1.0), zero_potential(1), power(2), s)


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        modular_IsGA(tent(1.0), zero_potential(2), power(2), 0.5)


def test_zero_field():
    u = tent(1.0).scaled(0.0)
    assert modular_IsGA(u, constant_potential(1.0), power(2), 0.5).value == 0.0
    assert luxemburg_norm(u, power(2)) == 0.0


def test_luxemburg_power_closed_forms():
    assert luxemburg_norm(tent(1.0), power(2)) == pytest.approx(math.sqrt(2 / 3), rel=1e-6)
    semi = luxemburg_seminorm(tent(1.0), zero_potential(1), power(2), 0.5)
    assert semi == pytest.approx(math.sqrt(8 * math.log(2)), rel=1e-6)


def test_luxemburg_is_homogeneous():
    F = parse_young("powlog:1,1,1")
    a = luxemburg_norm(tent(1.0), F)
    b = luxemburg_norm(tent(1.0).scaled(3.0), F)
    assert b == pytest.approx(3 * a, rel=1e-5)
    # the defining property
    assert modular_IG(tent(1.0).scaled(1 / a), F).value == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("desc", ["pow:2", "pow:3", "powlog:1,1,1", "custom:t*log(1+t)"])
def test_tail_identity(desc):
    F = parse_young(desc)
    for c in (1.0, 2.0):
        for s in (0.1, 0.5):
            for R in (1.0, 3.0):
                assert tail_selftest(F, c, s, R).discrepancy <= 1e-6


def test_tail_selftest_edges():
    assert tail_selftest(power(2), 0.0, 0.5, 1.0).discrepancy == 0.0
    with pytest.raises(DomainError):
        tail_selftest(power(2), 1.0, 0.5, -1.0)


def test_quadrature_spec_file(tmp_path):
    f = tmp_path / "q.txt"
    f.write_text("# tighter\nouter_points = 32\nradial_rel_tol=1e-8\n")
    spec = QuadratureSpec.from_file(f)
    assert spec.outer_points == 32 and spec.radial_rel_tol == 1e-8
    f.write_text("outer_points=32\nbogus=1\n")
    with pytest.raises(ValidationError, match=":2:"):
        QuadratureSpec.from_file(f)
    with pytest.raises(ValidationError):
        QuadratureSpec(outer_points=0)
    with pytest.raises(ValidationError):
        QuadratureSpec(radial_floor=2.0)
