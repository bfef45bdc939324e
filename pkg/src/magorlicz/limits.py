"""Small-s limit scans and the magnetic Hardy check.

``ms_scan`` evaluates s * I_{s,G}^A(u) on a decreasing grid of s and
extrapolates to s = 0 with the model s I = T_est + b s^q (q fitted in
[0.5, 2]). The reference value is

    T = 2 |S^{n-1}| int Gbar(|u|) dx,

which for G = t^p reduces to the classical constant 2 |S^{n-1}| / p int |u|^p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import ConvergenceError, DomainError, ValidationError
from .fields import ScalarField, VectorPotential, sup_modulus
from .integrals import QuadratureSpec, modular_IG, modular_IsGA, sphere_rule
from .quadrature import integrate_rays
from .young import YoungFunction

Q_BOUNDS = (0.5, 2.0)
DEFAULT_S_GRID = (0.2, 0.1, 0.05, 0.02, 0.01, 0.005)


def sphere_measure(n: int) -> float:
    """|S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)."""
    if n < 1:
        raise DomainError("dimension must be >= 1")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass
class ScanRow:
    s: float
    I: float
    s_times_I: float
    est_error: float
    ok: bool = True
    message: str = ""


@dataclass
class LimitReport:
    rows: list
    target: float
    target_error: float
    extrapolated: float
    fit_order: float
    fit_slope: float
    rel_gap: float
    rel_gap_band: float
    partial: bool = False

    def as_dict(self):
        return {
            "rows": [{"s": r.s, "I": r.I, "s_times_I": r.s_times_I, "est_error": r.est_error,
                      "ok": r.ok, **({"message": r.message} if r.message else {})}
                     for r in self.rows],
            "target": self.target,
            "target_error": self.target_error,
            "extrapolated": self.extrapolated,
            "fit_order": self.fit_order,
            "fit_slope": self.fit_slope,
            "rel_gap": self.rel_gap,
            "rel_gap_band": self.rel_gap_band,
            "partial": self.partial,
        }


def fit_extrapolation(s, y, q_bounds=Q_BOUNDS):
    """Least-squares fit of y = T + b s^q with q in ``q_bounds``.

    Returns (T, b, q). With two points q is fixed to 1; with one point T = y.
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    if s.size == 0:
        raise ValidationError("nothing to extrapolate")
    if s.size == 1:
        return float(y[0]), 0.0, float("nan")

    def solve(q):
        X = np.stack([np.ones_like(s), s ** q], axis=1)
        coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        resid = y - X @ coef
        return coef, float(resid @ resid)

    if s.size == 2:
        (T, b), _ = solve(1.0)
        return float(T), float(b), 1.0

    # coarse scan then bounded Brent refinement around the best grid point
    grid = np.linspace(q_bounds[0], q_bounds[1], 151)
    costs = np.array([solve(q)[1] for q in grid])
    k = int(np.argmin(costs))
    a = grid[max(k - 1, 0)]
    b_ = grid[min(k + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(lambda q: solve(q)[1], bounds=(a, b_), method="bounded",
                                   options={"xatol": 1e-12})
    q = float(res.x) if res.fun <= costs[k] else float(grid[k])
    (T, b), _ = solve(q)
    return float(T), float(b), q


def target_value(u: ScalarField, F: YoungFunction, spec: QuadratureSpec = QuadratureSpec()):
    """(T, error) with T = 2 |S^{n-1}| int Gbar(|u|)."""
    m = modular_IG(u, F, spec, use_Gbar=True)
    c = 2.0 * sphere_measure(u.dim)
    return c * m.value, c * m.est_error


def ms_scan(u: ScalarField, A: VectorPotential, F: YoungFunction, s_grid=DEFAULT_S_GRID,
            spec: QuadratureSpec = QuadratureSpec(), fit_points: int = 3) -> LimitReport:
    """Scan s * I_{s,G}^A(u) along ``s_grid`` and extrapolate to s = 0."""
    s_grid = [float(s) for s in s_grid]
    if not s_grid:
        raise ValidationError("s_grid must not be empty")
    for s in s_grid:
        if not (0.0 < s < 1.0):
            raise DomainError(f"s must lie in (0,1), got {s}")
    if any(b >= a for a, b in zip(s_grid, s_grid[1:])):
        raise ValidationError("s_grid must be strictly decreasing")

    target, target_err = target_value(u, F, spec)
    rows = []
    for s in s_grid:
        try:
            m = modular_IsGA(u, A, F, s, spec)
            rows.append(ScanRow(s, m.value, s * m.value, m.est_error))
        except ConvergenceError as exc:
            p = exc.partial
            val = p.value if p is not None else float("nan")
            err = p.est_error if p is not None else float("nan")
            rows.append(ScanRow(s, val, s * val, err, ok=False, message=str(exc)))
    partial = not all(r.ok for r in rows)

    good = [r for r in rows if r.ok]
    if target == 0.0:
        return LimitReport(rows, 0.0, target_err, 0.0, float("nan"), 0.0, 0.0, 0.0, partial)
    if not good:
        nan = float("nan")
        return LimitReport(rows, target, target_err, nan, nan, nan, nan, nan, True)
    tail = sorted(good, key=lambda r: r.s)[:fit_points]
    ss = np.array([r.s for r in tail])
    ys = np.array([r.s_times_I for r in tail])
    T, b, q = fit_extrapolation(ss, ys)
    rel_gap = abs(T - target) / abs(target)
    # propagate the quadrature error of the fitted rows and of the target
    band = (max(r.s * r.est_error for r in tail) + target_err) / abs(target)
    return LimitReport(rows, target, target_err, T, q, b, rel_gap, band, partial)


# ---------------------------------------------------------------------------
# Hardy


@dataclass
class HardyReport:
    s: float
    threshold_ok: bool
    lhs: float = float("nan")
    lhs_Gbar: float = float("nan")
    modular: float = float("nan")
    ratio: float = float("nan")
    lhs_error: float = float("nan")
    modular_error: float = float("nan")
    sandwich_ok: bool = False

    def as_dict(self):
        return dict(self.__dict__)


def hardy_lhs(u: ScalarField, F: YoungFunction, s: float,
              spec: QuadratureSpec = QuadratureSpec(), use_Gbar: bool = False):
    """int G(|u(x)| / |x|^s) dx in polar coordinates about the origin.

    The radial variable is log(rho); below a cutoff eps the omitted mass is
    at most sup|u|^{p+} eps^{n - s p+} / (n - s p+) |S^{n-1}| (valid for
    s p+ < n and sup|u| eps^{-s} >= 1). Returns (value, error).
    """
    n = u.dim
    pp = F.p_plus
    if not s * pp < n:
        raise DomainError("hardy_lhs needs s < n / p+")
    supu = sup_modulus(u)
    if supu == 0.0:
        return 0.0, 0.0
    th, wt = sphere_rule(n, spec)
    R = u.support_radius
    k = n - s * pp
    budget = 1e-2 * spec.radial_rel_tol * modular_IG(u, F, spec).value
    eps = (budget * k / (supu ** pp * wt.sum())) ** (1.0 / k)
    eps = min(eps, spec.radial_floor * R, supu ** (1.0 / s))
    omitted = wt.sum() * supu ** pp * eps ** k / k
    G = F.Gbar if use_Gbar else F.G
    M = th.shape[0]

    def f(ids, t):
        rho = np.exp(t)
        pts = rho[..., None] * th[ids]
        return G(np.abs(u(pts)) / rho ** s) * rho ** n

    res = integrate_rays(f, np.full(M, math.log(eps)), np.full(M, math.log(R)),
                         spec.radial_rel_tol * 1e-2, 0.0, spec.max_panels)
    if res.failed.any():
        raise ConvergenceError("Hardy radial integral exceeded max_panels",
                               partial=float(np.sum(wt * res.value)))
    return float(np.sum(wt * res.value)), float(np.sum(wt * res.error) + omitted)


def hardy_check(u: ScalarField, A: VectorPotential, F: YoungFunction, s: float,
                spec: QuadratureSpec = QuadratureSpec()) -> HardyReport:
    """Left side of the Hardy inequality, the magnetic modular, and their ratio.

    Nothing is computed when s >= n / p+ (``threshold_ok`` is False).
    """
    if not (0.0 < s < 1.0):
        raise DomainError(f"s must lie in (0,1), got {s}")
    if not s < u.dim / F.p_plus:
        return HardyReport(s=float(s), threshold_ok=False)
    lhs, lhs_err = hardy_lhs(u, F, s, spec)
    lhs_bar, lhs_bar_err = hardy_lhs(u, F, s, spec, use_Gbar=True)
    m = modular_IsGA(u, A, F, s, spec)
    ratio = lhs / m.value if m.value > 0 else 0.0
    sandwich_ok = lhs_bar <= lhs + lhs_err + lhs_bar_err
    return HardyReport(s=float(s), threshold_ok=True, lhs=lhs, lhs_Gbar=lhs_bar,
                       modular=m.value, ratio=ratio, lhs_error=lhs_err,
                       modular_error=m.est_error, sandwich_ok=bool(sandwich_ok))
