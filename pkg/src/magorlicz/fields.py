"""Test functions u: R^n -> C and vector potentials A: R^n -> R^n (n = 1, 2).

Points are arrays whose last axis has length n. Every field is supported in
the closed ball of radius ``support_radius`` centred at the origin and is
exactly zero outside it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import expr as _expr
from .errors import DomainError, ValidationError

DIMENSIONS = (1, 2)


def _check_dim(n):
    if n not in DIMENSIONS:
        raise ValidationError(f"dimension must be 1 or 2, got {n}")
    return n


def as_points(x, n):
    """Coerce ``x`` to a float array of shape (..., n).

    In one dimension a bare scalar or an array without a trailing axis of
    length 1 is accepted as a set of points on the line.
    """
    x = np.asarray(x, dtype=float)
    if n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != n:
        raise DomainError(f"points must have {n} coordinate(s), got shape {x.shape}")
    return x


def _env(x):
    return {f"x{k + 1}": x[..., k] for k in range(x.shape[-1])}


@dataclass(frozen=True)
class ScalarField:
    """A compactly supported complex field.

    ``kind`` is ``tent``, ``bump`` or ``expression``. The evaluated value is
    ``scale * exp(-i gauge.x) * base(x)`` (or its modulus if ``absolute``),
    forced to zero for ``|x| > support_radius``.
    """

    dim: int
    kind: str
    support_radius: float
    ast: Optional[_expr.Node] = None
    source: Optional[str] = None
    scale: complex = 1.0
    gauge: Optional[tuple] = None
    absolute: bool = False

    def __post_init__(self):
        _check_dim(self.dim)
        if not (np.isfinite(self.support_radius) and self.support_radius > 0):
            raise ValidationError("support radius must be a positive number")
        if self.kind == "expression" and self.ast is None:
            raise ValidationError("expression field needs an AST")
        if self.gauge is not None and len(self.gauge) != self.dim:
            raise ValidationError("gauge vector has the wrong dimension")

    @property
    def descriptor(self):
        if self.kind == "expression":
            base = f"expr:{_num(self.support_radius)}:{self.source}"
        else:
            base = f"{self.kind}:{_num(self.support_radius)}"
        mods = []
        if self.scale != 1.0:
            mods.append(f"scale={self.scale!r}")
        if self.gauge is not None:
            mods.append("gauge=" + ",".join(_num(c) for c in self.gauge))
        if self.absolute:
            mods.append("abs")
        return base + ("" if not mods else " [" + "; ".join(mods) + "]")

    @property
    def is_complex(self):
        return (self.gauge is not None or np.iscomplexobj(np.asarray(self.scale))
                or (self.ast is not None and self.ast.is_complex())) and not self.absolute

    def scaled(self, c) -> "ScalarField":
        return replace(self, scale=self.scale * c)

    def gauged(self, c) -> "ScalarField":
        """The field ``exp(-i c.x) u(x)`` for a constant vector ``c``."""
        c = tuple(float(v) for v in np.atleast_1d(c))
        if self.gauge is not None:
            c = tuple(a + b for a, b in zip(self.gauge, c))
        return replace(self, gauge=c)

    def modulus(self) -> "ScalarField":
        return replace(self, absolute=True)

    def _base(self, x):
        r = np.linalg.norm(x, axis=-1)
        R = self.support_radius
        if self.kind == "tent":
            return np.maximum(0.0, 1.0 - r / R)
        if self.kind == "bump":
            q = (r / R) ** 2
            inside = q < 1.0
            out = np.zeros_like(r)
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside]))
            return out
        inside = r <= R
        out = np.zeros(r.shape, dtype=complex if self.ast.is_complex() else float)
        if np.any(inside):
            xin = x[inside]
            val = _expr.evaluate(self.ast, _env(xin))
            out[inside] = np.broadcast_to(val, xin.shape[:-1])
        return out

    def __call__(self, x):
        """Evaluate at points of shape (..., n); returns complex (...)."""
        x = as_points(x, self.dim)
        v = self._base(x).astype(complex)
        if self.scale != 1.0:
            v = v * self.scale
        if self.gauge is not None:
            phi = x @ np.asarray(self.gauge, dtype=float)
            v = v * (np.cos(phi) - 1j * np.sin(phi))
        if self.absolute:
            v = np.abs(v).astype(complex)
        outside = np.linalg.norm(x, axis=-1) > self.support_radius
        if np.any(outside):
            v = np.where(outside, 0.0, v)
        return v


def tent(R, dim=1) -> ScalarField:
    return ScalarField(dim, "tent", float(R))


def bump(R, dim=1) -> ScalarField:
    return ScalarField(dim, "bump", float(R))


def expression_field(source: str, R, dim=1) -> ScalarField:
    return ScalarField(dim, "expression", float(R), ast=_expr.parse_expression(source, dim),
                       source=source)


@dataclass(frozen=True)
class VectorPotential:
    """A real vector potential with a prescription for the magnetic phase.

    ``kind`` is ``zero``, ``constant``, ``linear`` (A(x) = M x) or
    ``expression``; ``offset`` is a constant vector added to any kind.
    ``prescription`` is ``midpoint`` or ``averaged`` (K-point Gauss-Legendre
    along the segment).
    """

    dim: int
    kind: str
    vector: Optional[tuple] = None
    matrix: Optional[tuple] = None
    asts: Optional[tuple] = None
    sources: Optional[tuple] = None
    offset: Optional[tuple] = None
    prescription: str = "midpoint"
    points: int = 8

    def __post_init__(self):
        _check_dim(self.dim)
        if self.prescription not in ("midpoint", "averaged"):
            raise ValidationError(f"unknown prescription {self.prescription!r}")
        if self.points < 1:
            raise ValidationError("averaged prescription needs K >= 1 points")

    @property
    def descriptor(self):
        if self.kind == "zero":
            base = "zero"
        elif self.kind == "constant":
            base = "const:" + ",".join(_num(v) for v in self.vector)
        elif self.kind == "linear":
            base = "linear:" + ",".join(_num(v) for row in self.matrix for v in row)
        else:
            base = "expr:" + ";".join(self.sources)
        if self.offset is not None:
            base += " [+" + ",".join(_num(v) for v in self.offset) + "]"
        return base

    @property
    def prescription_descriptor(self):
        return "midpoint" if self.prescription == "midpoint" else f"averaged:{self.points}"

    @property
    def is_zero(self):
        return self.kind == "zero" and self.offset is None

    def shifted(self, c) -> "VectorPotential":
        """A + c for a constant vector c."""
        c = np.atleast_1d(np.asarray(c, dtype=float))
        if c.shape != (self.dim,):
            raise ValidationError("shift vector has the wrong dimension")
        if self.offset is not None:
            c = c + np.asarray(self.offset)
        return replace(self, offset=tuple(float(v) for v in c))

    def with_prescription(self, prescription, points=None) -> "VectorPotential":
        return replace(self, prescription=prescription,
                       points=self.points if points is None else int(points))

    def __call__(self, x):
        """Evaluate at points of shape (..., n); returns real (..., n)."""
        x = as_points(x, self.dim)
        if self.kind == "zero":
            out = np.zeros_like(x)
        elif self.kind == "constant":
            out = np.broadcast_to(np.asarray(self.vector, dtype=float), x.shape).copy()
        elif self.kind == "linear":
            out = x @ np.asarray(self.matrix, dtype=float).T
        else:
            env = _env(x)
            comps = [np.broadcast_to(np.real(_expr.evaluate(a, env)), x.shape[:-1])
                     for a in self.asts]
            out = np.stack(comps, axis=-1).astype(float)
        if self.offset is not None:
            out = out + np.asarray(self.offset, dtype=float)
        return out


def zero_potential(dim=1) -> VectorPotential:
    return VectorPotential(dim, "zero")


def constant_potential(a) -> VectorPotential:
    a = tuple(float(v) for v in np.atleast_1d(a))
    return VectorPotential(len(a), "constant", vector=a)


def linear_potential(M) -> VectorPotential:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValidationError("linear potential needs a square matrix")
    return VectorPotential(M.shape[0], "linear", matrix=tuple(map(tuple, M.tolist())))


def expression_potential(sources, dim) -> VectorPotential:
    sources = tuple(s.strip() for s in sources)
    if len(sources) != dim:
        raise ValidationError(f"expression potential needs {dim} component(s), got {len(sources)}")
    asts = tuple(_expr.parse_expression(s, dim) for s in sources)
    for s, a in zip(sources, asts):
        if a.is_complex():
            raise ValidationError(f"potential component {s!r} must be real-valued")
    return VectorPotential(dim, "expression", asts=asts, sources=sources)


# ---------------------------------------------------------------------------
# Descriptors


def _num(v):
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"malformed numbers in {what} descriptor: {text!r}") from None


def parse_field(descriptor: str, dim: int) -> ScalarField:
    """``tent:<R>``, ``bump:<R>`` or ``expr:<R>:<expression>``."""
    _check_dim(dim)
    kind, sep, rest = descriptor.partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise ValidationError(f"malformed field descriptor {descriptor!r}")
    if kind in ("tent", "bump"):
        vals = _floats(rest, "field")
        if len(vals) != 1:
            raise ValidationError(f"{kind} takes one radius, got {rest!r}")
        return ScalarField(dim, kind, vals[0])
    if kind == "expr":
        radius, sep, source = rest.partition(":")
        if not sep:
            raise ValidationError("expression field must be expr:<R>:<expression>")
        vals = _floats(radius, "field")
        if len(vals) != 1:
            raise ValidationError(f"expression field takes one radius, got {radius!r}")
        return expression_field(source, vals[0], dim)
    raise ValidationError(f"unknown field kind {kind!r} (use tent, bump or expr)")


def parse_potential(descriptor: str, dim: int, prescription: str = "midpoint") -> VectorPotential:
    """``zero``, ``const:<a1,..>``, ``linear:<m11,m12,..>`` or ``expr:<e1>;<e2>``."""
    _check_dim(dim)
    kind, _, rest = descriptor.partition(":")
    kind = kind.strip().lower()
    if kind == "zero":
        A = zero_potential(dim)
    elif kind == "const":
        a = _floats(rest, "potential")
        if len(a) != dim:
            raise ValidationError(f"const potential needs {dim} component(s), got {len(a)}")
        A = constant_potential(a)
    elif kind == "linear":
        m = _floats(rest, "potential")
        if len(m) != dim * dim:
            raise ValidationError(f"linear potential needs {dim * dim} entries, got {len(m)}")
        A = linear_potential(np.reshape(m, (dim, dim)))
    elif kind == "expr":
        A = expression_potential(rest.split(";"), dim)
    else:
        raise ValidationError(f"unknown potential kind {kind!r} (use zero, const, linear or expr)")
    name, points = parse_prescription(prescription)
    return A.with_prescription(name, points)


def parse_prescription(text: str):
    """``midpoint`` or ``averaged:<K>`` -> (name, K)."""
    name, sep, k = text.strip().partition(":")
    if name == "midpoint" and not sep:
        return "midpoint", 8
    if name == "averaged":
        try:
            K = int(k) if sep else 8
        except ValueError:
            raise ValidationError(f"malformed prescription {text!r}") from None
        if K < 1:
            raise ValidationError("averaged prescription needs K >= 1")
        return "averaged", K
    raise ValidationError(f"prescription must be midpoint or averaged:<K>, got {text!r}")


# ---------------------------------------------------------------------------
# Operations


def eval_scalar(u: ScalarField, x):
    v = u(x)
    return complex(v) if np.ndim(v) == 0 else v


def eval_potential(A: VectorPotential, x):
    v = A(x)
    if A.dim == 1 and np.ndim(x) == 0:
        return float(v[0])
    return v


def ray_exit_radius(u: ScalarField, x, theta):
    """Radius r* at which x + r theta leaves the support ball (larger root of
    |x + r theta| = R). Vectorised over leading axes."""
    n = u.dim
    x = as_points(x, n)
    theta = as_points(theta, n)
    R = u.support_radius
    xx = np.sum(x * x, axis=-1)
    if np.any(xx > R * R * (1 + 1e-12)):
        raise DomainError("ray_exit_radius needs |x| <= R")
    xt = np.sum(x * theta, axis=-1)
    r = -xt + np.sqrt(np.maximum(xt * xt + R * R - xx, 0.0))
    return float(r) if np.ndim(r) == 0 else r


def sup_modulus(u: ScalarField, count=4001):
    """Sampled sup |u| over the support ball."""
    pts = _ball_grid(u.dim, u.support_radius, count)
    return float(np.max(np.abs(u(pts))))


def lipschitz_estimate(u: ScalarField, count=4001):
    """Sampled Lipschitz scale of u on a grid covering the support ball."""
    n, R = u.dim, u.support_radius
    pts = _ball_grid(n, 1.05 * R, count)
    h = 1e-4 * R
    v0 = u(pts)
    best = 0.0
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        best = max(best, float(np.max(np.abs(u(pts + e) - v0))) / h)
    return best


def sup_potential(A: VectorPotential, radius, count=4001):
    pts = _ball_grid(A.dim, radius, count)
    return float(np.max(np.linalg.norm(A(pts), axis=-1)))


def _ball_grid(n, R, count):
    if n == 1:
        return np.linspace(-R, R, count)[:, None]
    m = int(np.sqrt(count)) + 1
    g = np.linspace(-R, R, m)
    X, Y = np.meshgrid(g, g, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
    return pts[np.linalg.norm(pts, axis=-1) <= R]
