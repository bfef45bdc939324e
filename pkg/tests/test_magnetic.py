import numpy as np
import pytest
from hypothesis import given, strategies as st

from magorlicz.errors import DomainError
from magorlicz.fields import (bump, constant_potential, expression_field, expression_potential,
                              linear_potential, tent, zero_potential)
from magorlicz.magnetic import diamagnetic_scan, phase, phase_angle, quotient

ROT = linear_potential([[0.0, -0.5], [0.5, 0.0]])


def test_phase_constant_potential():
    A = constant_potential(5.0)
    assert phase(A, 0.3, 0.1) == pytest.approx(np.exp(1j * 5.0 * 0.2))
    assert phase(zero_potential(1), 0.3, 0.1) == 1.0


def test_averaged_equals_midpoint_for_linear_potential():
    # the segment average of an affine field is its midpoint value
    x, y = np.array([0.3, -0.2]), np.array([-0.4, 0.5])
    a = phase_angle(ROT, x, y)
    b = phase_angle(ROT.with_prescription("averaged", 3), x, y)
    assert a == pytest.approx(b, abs=1e-15)


def test_averaged_prescription_quadratic_potential():
    A = expression_potential(["x1^2"], 1).with_prescription("averaged", 4)
    x, y = 1.0, 0.0
    # int_0^1 (1 - t)^2 dt = 1/3
    assert float(phase_angle(A, x, y)) == pytest.approx(1 / 3, rel=1e-14)
    assert float(phase_angle(A.with_prescription("midpoint"), x, y)) == pytest.approx(0.25)


def test_quotient_value():
    q = quotient(tent(1.0), constant_potential(2.0), 0.5, 0.2, -0.3)
    expected = (0.8 - np.exp(1j * 2.0 * 0.5) * 0.7) / 0.5 ** 0.5
    assert q.value == pytest.approx(expected)
    assert q.modulus == pytest.approx(abs(expected))


@pytest.mark.parametrize("s", [0.0, 1.0, -0.1])
def test_quotient_rejects_bad_s(s):
    with pytest.raises(DomainError, match=r"\(0,1\)"):
        quotient(tent(1.0), zero_potential(1), s, 0.1, 0.2)


def test_quotient_rejects_diagonal():
    with pytest.raises(DomainError):
        quotient(tent(1.0), zero_potential(1), 0.5, 0.1, 0.1)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.01, 0.99), st.floats(-50, 50))
def test_pointwise_diamagnetic(x, y, s, a):
    if x == y:
        return
    u = expression_field("(1 - x1^2) * (1 + i * x1)", 1.0)
    q = quotient(u, constant_potential(a), s, x, y)
    plain = abs(abs(complex(u(x))) - abs(complex(u(y)))) / abs(x - y) ** s
    assert q.modulus >= plain - 1e-12 * max(1.0, plain)


def test_diamagnetic_scan_passes_and_is_reproducible():
    r1 = diamagnetic_scan(bump(1.0, dim=2), ROT, 0.5, samples=50_000, seed=7, block=20_000)
    r2 = diamagnetic_scan(bump(1.0, dim=2), ROT, 0.5, samples=50_000, seed=7, block=20_000)
    assert r1.passed and r1 == r2
    assert r1.min_slack >= -1e-12


def test_diamagnetic_scan_zero_potential_is_tight():
    rep = diamagnetic_scan(tent(1.0), zero_potential(1), 0.3, samples=10_000)
    # with A = 0 and u >= 0 both sides coincide
    assert abs(rep.min_slack) < 1e-14
