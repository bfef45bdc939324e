"""Young functions G, the associated function Gbar(t) = int_0^t G(tau) dtau/tau,
inverses and growth indices.

Every Young function is normalised so that G(1) = 1 by rescaling its density.
Three families are supported:

* ``power(p)``         G(t) = t^p
* ``power_log(a,b,c)`` G'(t) proportional to t^a log(b + c t)
* ``custom(expr)``     G'(t) given by an expression in ``t``

All evaluators are vectorised and pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import AdmissibilityError, DomainError, RangeError, ValidationError
from . import expr as _expr

# Log-spaced table used for quadrature-backed evaluation.
_TABLE_LO = 1e-12
_TABLE_HI = 1e12
_PER_DECADE = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)

INDEX_GRID = (1e-6, 1e6, 2000)


def _as_nonneg(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError("Young functions are defined for t >= 0 only")
    return t


class _CumulativeTable:
    """Cumulative integral of ``f(tau) dtau`` on a log grid, via sigma = log(tau).

    ``f`` must be vectorised. Values below the grid follow a power law with the
    local index at the lowest node; values above the grid likewise.
    """

    def __init__(self, f, start_value, start_index):
        sig = np.arange(math.log(_TABLE_LO), math.log(_TABLE_HI) + 1e-9,
                        math.log(10.0) / _PER_DECADE)
        self.sig = sig
        self.f = f
        a, b = sig[:-1], sig[1:]
        half = 0.5 * (b - a)
        nodes = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
        tau = np.exp(nodes)
        panel = np.sum(f(tau) * tau * _GL_W[None, :], axis=1) * half
        cum = np.empty_like(sig)
        cum[0] = start_value
        cum[1:] = start_value + np.cumsum(panel)
        self.cum = cum
        self.lo_index = start_index
        t_hi = _TABLE_HI
        self.hi_index = t_hi * float(f(np.array([t_hi]))[0]) / cum[-1]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        lo = t < _TABLE_LO
        hi = t >= _TABLE_HI
        mid = ~(lo | hi) & (t > 0)
        if np.any(lo & (t > 0)):
            m = lo & (t > 0)
            out[m] = self.cum[0] * (t[m] / _TABLE_LO) ** self.lo_index
        if np.any(hi):
            out[hi] = self.cum[-1] * (t[hi] / _TABLE_HI) ** self.hi_index
        if np.any(mid):
            tm = t[mid]
            ls = np.log(tm)
            k = np.clip(np.searchsorted(self.sig, ls, side="right") - 1, 0, len(self.sig) - 2)
            a = self.sig[k]
            half = 0.5 * (ls - a)
            nodes = (0.5 * (a + ls))[:, None] + half[:, None] * _GL_X[None, :]
            tau = np.exp(nodes)
            part = np.sum(self.f(tau) * tau * _GL_W[None, :], axis=1) * half
            out[mid] = self.cum[k] + part
        return out


@dataclass(frozen=True)
class StructureReport:
    """Worst relative slack of each structural inequality family.

    A slack is ``(rhs - lhs) / max(|lhs|, |rhs|)``; negative means violated.
    """

    samples: int
    seed: int
    p_minus: float
    p_plus: float
    slack: dict
    witness: dict
    tolerance: float = 1e-12

    @property
    def passed(self) -> bool:
        return all(v >= -self.tolerance for v in self.slack.values())

    def failures(self):
        return {k: self.witness[k] for k, v in self.slack.items() if v < -self.tolerance}


class YoungFunction:
    """A normalised Young function with its derived objects.

    Subclasses provide ``_density``, ``_G``, ``_Gbar`` and ``_indices``.
    """

    kind = "abstract"
    exact_indices = False

    def __init__(self):
        self._index_cache = None

    # -- public evaluators -------------------------------------------------
    def density(self, t):
        """G'(t)."""
        return self._density(_as_nonneg(t))

    def G(self, t):
        t = _as_nonneg(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, self._G(t), 0.0)

    def Gbar(self, t):
        t = _as_nonneg(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, self._Gbar(t), 0.0)

    def inverse(self, y, tol=1e-13):
        """G^{-1}(y) by bracketing and bracketed root finding on increasing G."""
        y = float(y)
        if y < 0 or math.isnan(y):
            raise DomainError("G^{-1} is defined for y >= 0 only")
        if y == 0.0:
            return 0.0
        if y == 1.0:
            return 1.0
        lo, hi = (1.0, 2.0) if y > 1 else (0.5, 1.0)
        for _ in range(200):
            if y > 1 and float(self.G(hi)) < y:
                lo, hi = hi, hi * 2.0
            elif y < 1 and float(self.G(lo)) > y:
                hi, lo = lo, lo * 0.5
            else:
                break
        else:
            raise RangeError(f"could not bracket G^{{-1}}({y})")
        if not (float(self.G(lo)) <= y <= float(self.G(hi))):
            raise RangeError(f"could not bracket G^{{-1}}({y})")
        return optimize.brentq(lambda t: float(self.G(t)) - y, lo, hi,
                               xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    @property
    def indices(self):
        """(p-, p+): exact where known, otherwise estimated on a log grid."""
        if self._index_cache is None:
            self._index_cache = self._indices()
        return self._index_cache

    @property
    def p_minus(self):
        return self.indices[0]

    @property
    def p_plus(self):
        return self.indices[1]

    def index_ratio(self, t):
        """t G'(t) / G(t)."""
        t = np.asarray(t, dtype=float)
        return t * self._density(t) / self._G(t)

    def sampled_index_bounds(self, lo=INDEX_GRID[0], hi=INDEX_GRID[1], count=INDEX_GRID[2]):
        t = np.geomspace(lo, hi, count)
        r = self.index_ratio(t)
        if not np.all(np.isfinite(r)):
            raise AdmissibilityError(f"{self.descriptor}: index ratio not finite on the grid")
        if np.min(r) < 1.0 - 1e-12:
            k = int(np.argmin(r))
            raise AdmissibilityError(
                f"{self.descriptor}: tG'(t)/G(t) = {r[k]:.6g} < 1 at t = {t[k]:.6g}")
        return float(np.min(r)), float(np.max(r))

    def _indices(self):
        return self.sampled_index_bounds()

    def __repr__(self):
        return f"YoungFunction({self.descriptor!r})"


class PowerYoung(YoungFunction):
    kind = "power"
    exact_indices = True

    def __init__(self, p):
        super().__init__()
        p = float(p)
        if not p > 1:
            raise ValidationError(f"power Young function needs p > 1, got {p}")
        self.p = p
        self.descriptor = f"pow:{_fmt(p)}"

    def _density(self, t):
        return self.p * t ** (self.p - 1)

    def _G(self, t):
        return t ** self.p

    def _Gbar(self, t):
        return t ** self.p / self.p

    def _indices(self):
        return (self.p, self.p)


class PowerLogYoung(YoungFunction):
    """G'(t) = t^a log(b + c t) / G_raw(1).

    Requires b >= 1 so that the density is positive for every t > 0.
    """

    kind = "power_log"
    exact_indices = True

    def __init__(self, a, b, c):
        super().__init__()
        a, b, c = float(a), float(b), float(c)
        if not (a > 0 and b > 0 and c > 0):
            raise ValidationError("power_log needs a, b, c > 0")
        if b < 1:
            raise ValidationError(
                f"power_log needs b >= 1 (log(b + c t) < 0 near t = 0 for b = {b})")
        self.a, self.b, self.c = a, b, c
        self.descriptor = f"powlog:{_fmt(a)},{_fmt(b)},{_fmt(c)}"
        self.norm = float(self._G_raw(np.array([1.0]))[0])
        t0 = np.array([_TABLE_LO])
        k0 = float(self.index_ratio(t0)[0])
        self._gbar_table = _CumulativeTable(lambda tau: self._G(tau) / tau,
                                            float(self._G(t0)[0]) / k0, k0)

    def _log_term(self, t):
        return math.log(self.b) + np.log1p(self.c * t / self.b)

    def _G_raw(self, t):
        a, b, c = self.a, self.b, self.c
        m = a + 1.0
        z = c * t / b
        # int_0^t tau^(a+1)/(b + c tau) dtau
        rest = t ** (a + 2) / (b * (a + 2)) * special.hyp2f1(1.0, a + 2, a + 3, -z)
        return (t ** m * self._log_term(t) - c * rest) / m

    def _density(self, t):
        return t ** self.a * self._log_term(t) / self.norm

    def _G(self, t):
        return self._G_raw(t) / self.norm

    def _Gbar(self, t):
        return self._gbar_table(t)

    def _indices(self):
        return (1.0 + self.a, 2.0 + self.a)


class CustomYoung(YoungFunction):
    """Young function from a density expression in ``t``.

    The density must be positive for t > 0 and right-continuous; only sampled
    checks are made. G and Gbar are evaluated by log-substituted Gauss-Legendre
    quadrature over a cumulative table.
    """

    kind = "custom"

    def __init__(self, source):
        super().__init__()
        self.source = source
        self.ast = _expr.parse_expression(source, variables=("t",))
        if self.ast.is_complex():
            raise ValidationError("a Young density must be real-valued")
        self.descriptor = f"custom:{source}"
        probe = np.geomspace(_TABLE_LO, _TABLE_HI, 97)
        vals = self._raw_density(probe)
        if np.any(vals <= 0):
            k = int(np.argmax(vals <= 0))
            raise ValidationError(f"density must be positive for t > 0; G'({probe[k]:.3g}) = {vals[k]:.3g}")
        self.norm = 1.0
        # below the table G is taken as a power law with the density's local slope
        t0 = np.array([_TABLE_LO, 10 * _TABLE_LO])
        g_lo, g_hi = self._raw_density(t0)
        k0 = max(1.0, 1.0 + math.log(g_hi / g_lo) / math.log(10.0))
        g0 = _TABLE_LO * g_lo / k0
        raw = _CumulativeTable(self._raw_density, g0, k0)
        self.norm = float(raw(np.array([1.0]))[0])
        self._g_table = _CumulativeTable(self._raw_density_normed, g0 / self.norm, k0)
        self._gbar_table = _CumulativeTable(lambda tau: self._g_table(tau) / tau,
                                            g0 / self.norm / k0, k0)

    def _raw_density(self, t):
        t = np.asarray(t, dtype=float)
        v = _expr.evaluate(self.ast, {"t": t})
        return np.broadcast_to(np.real(v), t.shape).astype(float)

    def _raw_density_normed(self, t):
        return self._raw_density(t) / self.norm

    def _density(self, t):
        return self._raw_density(t) / self.norm

    def _G(self, t):
        return self._g_table(t)

    def _Gbar(self, t):
        return self._gbar_table(t)


def _fmt(x):
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text


def power(p) -> PowerYoung:
    return PowerYoung(p)


def power_log(a, b, c) -> PowerLogYoung:
    return PowerLogYoung(a, b, c)


def custom(source: str) -> CustomYoung:
    return CustomYoung(source)


def parse_young(descriptor: str) -> YoungFunction:
    """Build a Young function from ``pow:<p>``, ``powlog:<a>,<b>,<c>`` or
    ``custom:<density in t>``."""
    kind, sep, rest = descriptor.partition(":")
    if not sep:
        raise ValidationError(f"malformed Young descriptor {descriptor!r}; expected kind:params")
    kind = kind.strip().lower()
    try:
        if kind == "pow":
            return power(float(rest))
        if kind == "powlog":
            parts = [float(v) for v in rest.split(",")]
            if len(parts) != 3:
                raise ValidationError("powlog needs three parameters a,b,c")
            return power_log(*parts)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed Young descriptor {descriptor!r}: {exc}") from None
    if kind == "custom":
        return custom(rest)
    raise ValidationError(f"unknown Young function kind {kind!r} (use pow, powlog or custom)")


# ---------------------------------------------------------------------------
# Operation-level API


def eval_G(F: YoungFunction, t):
    out = F.G(t)
    return float(out) if np.ndim(out) == 0 else out


def eval_Gbar(F: YoungFunction, t):
    out = F.Gbar(t)
    return float(out) if np.ndim(out) == 0 else out


def inverse_G(F: YoungFunction, y) -> float:
    return F.inverse(y)


def estimate_indices(F: YoungFunction):
    """(p-, p+). Exact for power and power_log; grid estimate otherwise.

    Raises :class:`AdmissibilityError` if tG'/G < 1 anywhere on the grid.
    """
    if F.exact_indices:
        return F.indices
    return F.sampled_index_bounds()


def _slack(lhs, rhs):
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(scale > 0, (rhs - lhs) / scale, 0.0)
    return out


def verify_structure(F: YoungFunction, samples: int = 10_000, seed: int = 42,
                     lo: float = 1e-3, hi: float = 1e3, tolerance: float = 1e-12) -> StructureReport:
    """Sample the growth inequalities G1, G2, Delta_2 (C = 2^p+) and the
    sandwich G(t/2) <= Gbar(t) <= G(t) at log-uniform points.

    ``s`` and ``t`` are drawn from [lo, hi]; the default keeps every product
    ``s t`` inside the grid on which estimated indices are computed.
    """
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    pm, pp = estimate_indices(F)
    rng = np.random.default_rng(seed)
    s = np.exp(rng.uniform(math.log(lo), math.log(hi), samples))
    t = np.exp(rng.uniform(math.log(lo), math.log(hi), samples))

    Gt, Gs = F.G(t), F.G(s)
    s_lo = np.minimum(s ** pm, s ** pp)
    s_hi = np.maximum(s ** pm, s ** pp)
    Gst = F.G(s * t)
    Gbar_t = F.Gbar(t)
    families = {
        "G1_lower": _slack(s_lo * Gt, Gst),
        "G1_upper": _slack(Gst, s_hi * Gt),
        "G2": _slack(F.G(s + t), 2.0 ** pp / 2.0 * (Gs + Gt)),
        "delta2": _slack(F.G(2 * t), 2.0 ** pp * Gt),
        "sandwich_lower": _slack(F.G(t / 2), Gbar_t),
        "sandwich_upper": _slack(Gbar_t, Gt),
    }
    slack, witness = {}, {}
    for name, values in families.items():
        k = int(np.argmin(values))
        slack[name] = float(values[k])
        witness[name] = {"s": float(s[k]), "t": float(t[k])}
    return StructureReport(samples=samples, seed=seed, p_minus=float(pm), p_plus=float(pp),
                           slack=slack, witness=witness, tolerance=tolerance)


def delta2_table(F: YoungFunction, points=(1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e3)):
    """Rows (t, G(t), G(2t), G(2t)/G(t)) for display."""
    t = np.asarray(points, dtype=float)
    g, g2 = F.G(t), F.G(2 * t)
    return [(float(a), float(b), float(c), float(c / b)) for a, b, c in zip(t, g, g2)]
