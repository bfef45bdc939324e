"""Modulars and Luxemburg (semi)norms.

The double-integral modular

    I(u) = iint G(|D_s^A u(x, y)|) dx dy / |x - y|^n

is computed in polar coordinates around each outer node x in the support
ball B_R: dy / |x - y|^n = dr/r dsigma(theta). Along a ray the field
vanishes beyond the exit radius r*(x, theta), where the integrand is exactly
G(|u(x)| / r^s); substituting tau = |u(x)| / r^s gives the closed form

    int_{r*}^inf G(|u(x)| / r^s) dr/r = Gbar(|u(x)| / r*^s) / s.

Pairs with x outside B_R and y inside contribute the same amount again
because |D_s^A u(x, y)| = |D_s^A u(y, x)|. The remaining radial integral on
(0, r*) is done in t = log r by batched adaptive Gauss-Kronrod, from a lower
cutoff whose omitted mass is bounded in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict, fields as dc_fields

import numpy as np
from scipy import integrate as sp_integrate, optimize

from .errors import ConvergenceError, DomainError, RangeError, ValidationError
from .fields import (ScalarField, VectorPotential, lipschitz_estimate, ray_exit_radius,
                     sup_modulus, sup_potential)
from .magnetic import quotient_values
from .quadrature import gauss_legendre, integrate_rays
from .young import YoungFunction

RAY_CHUNK = 8192


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretisation parameters shared by every integration.

    ``outer_points`` is the Gauss-Legendre count per axis of each outer cell
    (n = 1: the half-lines [-R, 0] and [0, R]; n = 2: the radial axis of a
    polar grid). ``angular_points`` is the number of uniform angles for n = 2.
    """

    outer_points: int = 64
    angular_points: int = 64
    radial_rel_tol: float = 1e-6
    radial_floor: float = 1e-8
    max_panels: int = 4096

    def __post_init__(self):
        for name in ("outer_points", "angular_points", "max_panels"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ValidationError(f"{name} must be an integer >= 1, got {v!r}")
        for name in ("radial_rel_tol", "radial_floor"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be a positive number, got {v!r}")
        if self.radial_floor >= 1:
            raise ValidationError("radial_floor must be < 1")

    @classmethod
    def keys(cls):
        return tuple(f.name for f in dc_fields(cls))

    @classmethod
    def from_mapping(cls, mapping):
        kwargs = {}
        for key, value in mapping.items():
            if key not in cls.keys():
                raise ValidationError(f"unknown quadrature key {key!r}")
            typ = int if key in ("outer_points", "angular_points", "max_panels") else float
            try:
                kwargs[key] = typ(value)
            except (TypeError, ValueError):
                raise ValidationError(f"bad value for {key}: {value!r}") from None
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        """Read flat ``key=value`` lines; ``#`` starts a comment."""
        mapping = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValidationError(f"{path}:{lineno}: expected key=value")
                key = key.strip()
                if key not in cls.keys():
                    raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
                mapping[key] = value.strip()
        return cls.from_mapping(mapping)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ModularValue:
    value: float
    est_error: float
    radial_evals: int = 0
    converged: bool = True

    def __float__(self):
        return self.value


# ---------------------------------------------------------------------------
# Discretisation of the outer integral and of the sphere


def outer_rule(n, R, spec: QuadratureSpec):
    """Nodes (N, n) and weights (N,) for integrals over the ball of radius R."""
    if n == 1:
        xl, wl = gauss_legendre(spec.outer_points, -R, 0.0)
        xr, wr = gauss_legendre(spec.outer_points, 0.0, R)
        return np.concatenate([xl, xr])[:, None], np.concatenate([wl, wr])
    rho, wr = gauss_legendre(spec.outer_points, 0.0, R)
    M = spec.angular_points
    ang = 2.0 * np.pi * (np.arange(M) + 0.5) / M
    P, A = np.meshgrid(rho, ang, indexing="ij")
    pts = np.stack([(P * np.cos(A)).ravel(), (P * np.sin(A)).ravel()], axis=-1)
    w = (wr[:, None] * rho[:, None] * np.full((1, M), 2.0 * np.pi / M)).ravel()
    return pts, w


def sphere_rule(n, spec: QuadratureSpec):
    """Directions (M, n) and weights (M,) summing to |S^{n-1}|."""
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    M = spec.angular_points
    ang = 2.0 * np.pi * np.arange(M) / M
    return np.stack([np.cos(ang), np.sin(ang)], axis=-1), np.full(M, 2.0 * np.pi / M)


def _check_s(s):
    if not (0.0 < s < 1.0):
        raise DomainError(f"s must lie in (0,1), got {s}")


# ---------------------------------------------------------------------------
# Single integrals


def _zero_order_sum(absu, w, F, use_Gbar):
    g = F.Gbar(absu) if use_Gbar else F.G(absu)
    return float(np.sum(w * g))


def modular_IG(u: ScalarField, F: YoungFunction, spec: QuadratureSpec = QuadratureSpec(),
               use_Gbar: bool = False) -> ModularValue:
    """int G(|u|) dx (or int Gbar(|u|) dx) over the support ball.

    The error estimate is the difference to the rule with half as many
    outer points per axis.
    """
    x, w = outer_rule(u.dim, u.support_radius, spec)
    value = _zero_order_sum(np.abs(u(x)), w, F, use_Gbar)
    coarse = QuadratureSpec(max(1, spec.outer_points // 2), max(1, spec.angular_points // 2),
                            spec.radial_rel_tol, spec.radial_floor, spec.max_panels)
    xc, wc = outer_rule(u.dim, u.support_radius, coarse)
    err = abs(value - _zero_order_sum(np.abs(u(xc)), wc, F, use_Gbar))
    return ModularValue(value, err, radial_evals=0)


# ---------------------------------------------------------------------------
# The double-integral modular


@dataclass
class _RayProblem:
    """Everything needed to evaluate the radial integrals of one modular."""

    x: np.ndarray        # (M, n) ray origins
    theta: np.ndarray    # (M, n) unit directions
    weight: np.ndarray   # (M,) outer weight times angular weight
    ux: np.ndarray       # (M,) u at the origin
    rstar: np.ndarray    # (M,) exit radius


def _rays(u, spec):
    x, wx = outer_rule(u.dim, u.support_radius, spec)
    th, wt = sphere_rule(u.dim, spec)
    X = np.repeat(x, len(th), axis=0)
    T = np.tile(th, (len(x), 1))
    W = np.repeat(wx, len(th)) * np.tile(wt, len(x))
    ux = u(X)
    return _RayProblem(X, T, W, ux, ray_exit_radius(u, X, T))


def analytic_tail(F: YoungFunction, absu, rstar, s):
    """2/s * Gbar(|u(x)| / r*^s): both half-spaces of the outside-support mass."""
    return 2.0 / s * F.Gbar(np.asarray(absu) / np.asarray(rstar) ** s)


def radial_cutoff(F: YoungFunction, s, lip, budget, floor):
    """Lower radius eps and a bound on the mass omitted below it.

    Near r = 0 the integrand is at most G(L r^{1-s}) / r; its integral over
    (0, eps) equals Gbar(L eps^{1-s}) / (1-s) <= (L eps^{1-s})^{p-} / (1-s)
    when L eps^{1-s} <= 1.
    """
    pm = F.p_minus
    if lip <= 0:
        return floor, 0.0
    target = (budget * (1.0 - s)) ** (1.0 / pm) / lip
    eps = min(floor, min(target, 1.0 / lip) ** (1.0 / (1.0 - s)))
    eps = max(eps, 1e-300)
    w = lip * eps ** (1.0 - s)
    return eps, float(F.Gbar(w)) / (1.0 - s)


def radial_integrand(u, A, F, s, x, theta, r, ux=None):
    """G(|D_s^A u(x, x + r theta)|): the radial integrand in the variable log r."""
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    r = np.asarray(r, dtype=float)
    y = x + r[..., None] * theta
    q = quotient_values(u, A, s, x, y, ux=ux, r=r)
    return F.G(np.abs(q))


def modular_IsGA(u: ScalarField, A: VectorPotential, F: YoungFunction, s: float,
                 spec: QuadratureSpec = QuadratureSpec()) -> ModularValue:
    """The magnetic modular iint G(|D_s^A u|) dmu."""
    _check_s(s)
    if A.dim != u.dim:
        raise ValidationError("field and potential dimensions differ")
    supu = sup_modulus(u)
    if supu == 0.0:
        return ModularValue(0.0, 0.0, 0)

    rays = _rays(u, spec)
    absux = np.abs(rays.ux)
    tails = analytic_tail(F, absux, rays.rstar, s)
    tail_total = float(np.sum(rays.weight * tails))

    # Per-ray absolute floor: a share of the (strictly positive) tail mass.
    mass = float(np.sum(rays.weight))
    floor_abs = spec.radial_rel_tol * max(tail_total, 1e-300) / mass
    lip = lipschitz_estimate(u)
    if not A.is_zero:
        lip += sup_potential(A, u.support_radius) * supu
    eps, omitted = radial_cutoff(F, s, 2.0 * lip, 0.1 * floor_abs, spec.radial_floor)

    M = rays.x.shape[0]
    radial = np.zeros(M)
    radial_err = np.zeros(M)
    failed = np.zeros(M, dtype=bool)
    evals = 0
    log_eps = math.log(eps)
    for start in range(0, M, RAY_CHUNK):
        sl = slice(start, min(M, start + RAY_CHUNK))
        x, th, ux, rs = rays.x[sl], rays.theta[sl], rays.ux[sl], rays.rstar[sl]
        active = rs > eps
        lo = np.full(rs.shape, log_eps)
        hi = np.where(active, np.log(np.maximum(rs, eps)), log_eps)
        cross = -np.sum(x * th, axis=-1)
        breaks = np.where((cross > eps) & (cross < rs), np.log(np.maximum(cross, eps)), np.nan)

        def f(ids, t, x=x, th=th, ux=ux):
            return radial_integrand(u, A, F, s, x[ids], th[ids], np.exp(t), ux=ux[ids])

        res = integrate_rays(f, lo, hi, spec.radial_rel_tol, floor_abs, spec.max_panels,
                             breaks=breaks[:, None])
        radial[sl], radial_err[sl], failed[sl] = res.value, res.error, res.failed
        evals += res.evaluations

    value = float(np.sum(rays.weight * (radial + tails)))
    err = float(np.sum(rays.weight * (radial_err + omitted)))
    result = ModularValue(value, err, evals, converged=not failed.any())
    if failed.any():
        raise ConvergenceError(
            f"{int(failed.sum())} radial integral(s) exceeded max_panels={spec.max_panels}",
            partial=result)
    return result


# ---------------------------------------------------------------------------
# Luxemburg norms


def _luxemburg(modular, F: YoungFunction, tol=1e-6):
    """inf{lam > 0 : modular(lam) <= 1} for a modular that is strictly
    decreasing in lam, bracketed with the index bounds."""
    I1 = modular(1.0)
    if I1 == 0.0:
        return 0.0
    pm, pp = F.indices
    lo = min(I1 ** (1.0 / pm), I1 ** (1.0 / pp))
    hi = max(I1 ** (1.0 / pm), I1 ** (1.0 / pp))
    lo, hi = lo / 1.01, hi * 1.01

    def f(lam):
        return modular(lam) - 1.0

    flo, fhi = f(lo), f(hi)
    for _ in range(60):
        if flo >= 0:
            break
        lo /= 2.0
        flo = f(lo)
    for _ in range(60):
        if fhi <= 0:
            break
        hi *= 2.0
        fhi = f(hi)
    if flo < 0 or fhi > 0:
        raise RangeError("could not bracket the Luxemburg norm")
    lam = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=tol / (10.0 * pp), maxiter=200)
    if abs(f(lam)) > tol:
        # tighten by plain bisection on the bracket found by brentq
        a, b = lam * (1 - 1e-6), lam * (1 + 1e-6)
        for _ in range(100):
            m = 0.5 * (a + b)
            fm = f(m)
            if abs(fm) <= tol:
                return m
            a, b = (m, b) if fm > 0 else (a, m)
        raise ConvergenceError("Luxemburg bisection did not reach |I - 1| <= tol", partial=lam)
    return lam


def luxemburg_norm(u: ScalarField, F: YoungFunction,
                   spec: QuadratureSpec = QuadratureSpec()) -> float:
    """||u||_G = inf{lam > 0 : int G(|u| / lam) <= 1}."""
    x, w = outer_rule(u.dim, u.support_radius, spec)
    absu = np.abs(u(x))
    if not np.any(absu > 0):
        return 0.0
    return _luxemburg(lambda lam: _zero_order_sum(absu / lam, w, F, False), F)


def luxemburg_seminorm(u: ScalarField, A: VectorPotential, F: YoungFunction, s: float,
                       spec: QuadratureSpec = QuadratureSpec()) -> float:
    """|u|_{s,G}^A = inf{lam > 0 : I_{s,G}^A(u / lam) <= 1}."""
    _check_s(s)
    if sup_modulus(u) == 0.0:
        return 0.0
    return _luxemburg(lambda lam: modular_IsGA(u.scaled(1.0 / lam), A, F, s, spec).value, F)


# ---------------------------------------------------------------------------
# Tail identity


@dataclass(frozen=True)
class TailCheck:
    numeric: float
    analytic: float
    discrepancy: float


def tail_selftest(F: YoungFunction, c: float, s: float, R: float, R_prime: float = 1e6
                  ) -> TailCheck:
    """Compare int_R^R' G(c / r^s) dr/r (adaptive quadrature in log r) with
    (Gbar(c / R^s) - Gbar(c / R'^s)) / s."""
    _check_s(s)
    if c < 0 or R <= 0 or R_prime <= R:
        raise DomainError("tail_selftest needs c >= 0 and 0 < R < R'")
    if c == 0:
        return TailCheck(0.0, 0.0, 0.0)
    lo, hi = math.log(R), math.log(R_prime)
    numeric, _ = sp_integrate.quad(lambda t: float(F.G(c * math.exp(-s * t))), lo, hi,
                                   epsabs=0.0, epsrel=1e-13, limit=500)
    analytic = float(F.Gbar(c / R ** s) - F.Gbar(c / R_prime ** s)) / s
    disc = abs(numeric - analytic) / abs(analytic) if analytic != 0 else abs(numeric)
    return TailCheck(numeric, analytic, disc)
