"""Magnetic phase, the twisted Hoelder quotient and the diamagnetic check.

For a potential A the quotient is

    D_s^A u(x, y) = (u(x) - exp(i (x - y).A(x, y)) u(y)) / |x - y|^s

where A(x, y) is A((x + y)/2) (midpoint prescription) or the average of A
along the segment [x, y] (averaged prescription).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .fields import ScalarField, VectorPotential, as_points


def _segment_rule(K):
    x, w = np.polynomial.legendre.leggauss(K)
    return 0.5 * (x + 1.0), 0.5 * w


def phase_angle(A: VectorPotential, x, y):
    """Phi(x, y) = (x - y) . A(x, y) for arrays of points (..., n)."""
    x = as_points(x, A.dim)
    y = as_points(y, A.dim)
    if A.is_zero:
        return np.zeros(np.broadcast_shapes(x.shape, y.shape)[:-1])
    d = x - y
    if A.prescription == "midpoint":
        a = A(0.5 * (x + y))
    else:
        nodes, weights = _segment_rule(A.points)
        a = 0.0
        for t, w in zip(nodes, weights):
            a = a + w * A((1.0 - t) * x + t * y)
    return np.sum(d * a, axis=-1)


def phase(A: VectorPotential, x, y):
    """exp(i Phi) assembled from (cos Phi, sin Phi)."""
    phi = phase_angle(A, x, y)
    out = np.cos(phi) + 1j * np.sin(phi)
    return complex(out) if np.ndim(out) == 0 else out


def quotient_values(u: ScalarField, A: VectorPotential, s, x, y, ux=None, r=None):
    """Vectorised D_s^A u(x, y).

    ``ux`` may carry precomputed u(x) and ``r`` the known distance |x - y|.
    """
    x = as_points(x, u.dim)
    y = as_points(y, u.dim)
    if ux is None:
        ux = u(x)
    uy = u(y)
    if A.is_zero:
        num = ux - uy
    else:
        phi = phase_angle(A, x, y)
        num = ux - (np.cos(phi) + 1j * np.sin(phi)) * uy
    if r is None:
        r = np.linalg.norm(x - y, axis=-1)
    return num / r ** s


@dataclass(frozen=True)
class QuotientSample:
    x: tuple
    y: tuple
    s: float
    value: complex

    @property
    def modulus(self) -> float:
        return abs(self.value)


def _check_s(s):
    if not (0.0 < s < 1.0):
        raise DomainError(f"s must lie in (0,1), got {s}")


def quotient(u: ScalarField, A: VectorPotential, s: float, x, y) -> QuotientSample:
    """D_s^A u at one pair of distinct points."""
    _check_s(s)
    xp = as_points(x, u.dim).reshape(u.dim)
    yp = as_points(y, u.dim).reshape(u.dim)
    if np.array_equal(xp, yp):
        raise DomainError("the quotient is singular at x = y")
    v = complex(quotient_values(u, A, s, xp, yp))
    return QuotientSample(tuple(xp.tolist()), tuple(yp.tolist()), float(s), v)


@dataclass(frozen=True)
class DiamagneticReport:
    """Minimum of |D_s^A u| - |D_s |u|| over sampled pairs."""

    s: float
    samples: int
    seed: int
    min_slack: float
    witness_x: tuple
    witness_y: tuple
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tolerance


def _sample_ball(rng, n, radius, count):
    if n == 1:
        return rng.uniform(-radius, radius, size=(count, 1))
    rho = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    ang = rng.uniform(0.0, 2.0 * np.pi, count)
    return np.stack([rho * np.cos(ang), rho * np.sin(ang)], axis=-1)


def diamagnetic_scan(u: ScalarField, A: VectorPotential, s: float, samples: int = 100_000,
                     seed: int = 42, block: int = 100_000, tolerance: float = 1e-12
                     ) -> DiamagneticReport:
    """Sample pairs uniformly in the ball of radius 2R and record the worst
    slack of ||u(x)| - |u(y)|| <= |u(x) - e^{i Phi} u(y)| (both over |x-y|^s)."""
    _check_s(s)
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    if A.dim != u.dim:
        raise ValidationError("field and potential dimensions differ")
    n, radius = u.dim, 2.0 * u.support_radius
    nblocks = -(-samples // block)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    best, wx, wy = np.inf, None, None
    for b, child in enumerate(children):
        count = min(block, samples - b * block)
        rng = np.random.default_rng(child)
        x = _sample_ball(rng, n, radius, count)
        y = _sample_ball(rng, n, radius, count)
        ux, uy = u(x), u(y)
        r = np.linalg.norm(x - y, axis=-1)
        keep = r > 0
        phi = phase_angle(A, x, y)
        twisted = np.abs(ux - (np.cos(phi) + 1j * np.sin(phi)) * uy)
        plain = np.abs(np.abs(ux) - np.abs(uy))
        slack = np.where(keep, (twisted - plain) / np.where(keep, r, 1.0) ** s, np.inf)
        k = int(np.argmin(slack))
        if slack[k] < best:
            best, wx, wy = float(slack[k]), tuple(x[k].tolist()), tuple(y[k].tolist())
    return DiamagneticReport(float(s), int(samples), int(seed), best, wx, wy, tolerance)
