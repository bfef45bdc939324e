import numpy as np
import pytest

from magorlicz.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gauss_legendre, integrate_rays


def test_rule_weights():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Kronrod integrates x^22 exactly
    assert KRONROD_WEIGHTS @ NODES ** 22 == pytest.approx(2 / 23, rel=1e-13)
    x, w = gauss_legendre(5, 0.0, 2.0)
    assert w @ x ** 9 == pytest.approx(2 ** 10 / 10, rel=1e-13)


def test_many_rays_with_kinks():
    c = np.linspace(0.1, 0.9, 9)
    f = lambda ids, t: np.sqrt(np.abs(t - c[ids]))
    res = integrate_rays(f, np.zeros(9), np.ones(9), 1e-10, 0.0, 2000,
                         breaks=c[:, None])
    exact = (2 / 3) * (c ** 1.5 + (1 - c) ** 1.5)
    np.testing.assert_allclose(res.value, exact, rtol=1e-12)
    assert not res.failed.any()


def test_budget_exhaustion_is_flagged():
    f = lambda ids, t: 1.0 / np.sqrt(np.abs(t - 0.5) + 1e-300)
    res = integrate_rays(f, np.zeros(1), np.ones(1), 1e-14, 0.0, 8, min_width=0.0)
    assert res.failed[0]


def test_deterministic():
    f = lambda ids, t: np.exp(-t * (1 + ids))
    a = integrate_rays(f, np.zeros(50), np.full(50, 3.0), 1e-9, 0.0, 500)
    b = integrate_rays(f, np.zeros(50), np.full(50, 3.0), 1e-9, 0.0, 500)
    assert np.array_equal(a.value, b.value)
    k = 1 + np.arange(50)
    np.testing.assert_allclose(a.value, (1 - np.exp(-3 * k)) / k, rtol=1e-10)
