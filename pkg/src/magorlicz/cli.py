"""Command-line entry point.

    magorlicz ms-scan --dim 1 --u tent:1 --A zero --G pow:2 --out report.json

Every subcommand accepts ``--config FILE`` (flat ``key=value`` lines, ``#``
comments); explicit flags override file values. Exit codes: 0 success,
2 invalid input, 3 quadrature did not converge, 4 property violated.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .errors import (AdmissibilityError, ConvergenceError, MagOrliczError, PointEvaluationError,
                     RangeError, ValidationError)
from .fields import parse_field, parse_potential, parse_prescription
from .integrals import (QuadratureSpec, luxemburg_norm, luxemburg_seminorm, modular_IG,
                        modular_IsGA, tail_selftest)
from .limits import DEFAULT_S_GRID, hardy_check, ms_scan
from .magnetic import diamagnetic_scan
from .report import write_csv, write_json
from .young import delta2_table, parse_young, verify_structure

COMMANDS = ("inspect-young", "seminorm", "ms-scan", "hardy", "check-diamagnetic", "tail-selftest")
EXIT_OK, EXIT_INVALID, EXIT_CONVERGENCE, EXIT_PROPERTY = 0, 2, 3, 4

HARDY_S = (0.3, 0.2, 0.1, 0.05)
TAIL_C, TAIL_S, TAIL_R = (1.0, 2.0), (0.1, 0.5), (1.0, 3.0)
TAIL_TOL = 1e-6
DIAMAGNETIC_TOL = 1e-12

_LIST_KEYS = ("s", "s_grid", "c", "R")
_INT_KEYS = ("dim", "samples", "seed")
_STR_KEYS = ("u", "A", "prescription", "G", "quad", "out")
CONFIG_KEYS = _INT_KEYS + _STR_KEYS + _LIST_KEYS + QuadratureSpec.keys()


@dataclass
class RunConfig:
    """Resolved settings of one run. ``None`` means "not given"."""

    dim: int | None = None
    u: str | None = None
    A: str | None = None
    prescription: str | None = None
    G: str | None = None
    s: tuple | None = None
    s_grid: tuple | None = None
    samples: int | None = None
    seed: int | None = None
    c: tuple | None = None
    R: tuple | None = None
    quad: str | None = None
    out: str | None = None
    quadrature: dict = field(default_factory=dict)

    def merged(self, other: "RunConfig") -> "RunConfig":
        """Values set in ``other`` win."""
        upd = {k: v for k, v in asdict(other).items() if v is not None and k != "quadrature"}
        return replace(self, **upd, quadrature={**self.quadrature, **other.quadrature})

    def spec(self) -> QuadratureSpec:
        base = QuadratureSpec.from_file(self.quad).as_dict() if self.quad else {}
        return QuadratureSpec.from_mapping({**base, **self.quadrature})


def _float_list(text, key):
    try:
        vals = tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise ValidationError(f"{key} must be a comma-separated list of numbers, got {text!r}") from None
    if not vals:
        raise ValidationError(f"{key} must not be empty")
    return vals


def _check_dim(n):
    if n not in (1, 2):
        raise ValidationError(f"dim must be 1 or 2, got {n}")
    return n


def _coerce(key, value):
    if key in _INT_KEYS:
        try:
            v = int(value)
        except ValueError:
            raise ValidationError(f"{key} must be an integer, got {value!r}") from None
        return _check_dim(v) if key == "dim" else v
    if key in _LIST_KEYS:
        return _float_list(value, key)
    return value


def load_config(path) -> RunConfig:
    """Parse a flat ``key=value`` file into a RunConfig."""
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    cfg = RunConfig()
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            if key not in CONFIG_KEYS:
                raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                if key in QuadratureSpec.keys():
                    cfg.quadrature[key] = value
                else:
                    setattr(cfg, key, _coerce(key, value))
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--dim", type=int)
    common.add_argument("--u", help="field: tent:R, bump:R or expr:R:<expression>")
    common.add_argument("--A", help="potential: zero, const:a1,.., linear:m11,.. or expr:e1;e2")
    common.add_argument("--prescription", help="midpoint or averaged:K")
    common.add_argument("--G", help="Young function: pow:p, powlog:a,b,c or custom:<density in t>")
    common.add_argument("--s", action="append", type=float, help="fractional order (repeatable)")
    common.add_argument("--s-grid", dest="s_grid", help="comma-separated decreasing s values")
    common.add_argument("--c", action="append", type=float, help="tail self-test amplitude")
    common.add_argument("--R", action="append", type=float, help="tail self-test radius")
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--quad", help="key=value file with quadrature settings")
    for key in QuadratureSpec.keys():
        common.add_argument("--" + key.replace("_", "-"), dest=key)
    common.add_argument("--out", help="JSON report path (ms-scan also writes a .csv beside it)")

    parser = argparse.ArgumentParser(prog="magorlicz",
                                     description="Magnetic fractional Orlicz-Sobolev modulars.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    flags = RunConfig(
        dim=_check_dim(args.dim) if args.dim is not None else None,
        u=args.u, A=args.A, prescription=args.prescription, G=args.G,
        s=tuple(args.s) if args.s else None,
        s_grid=_float_list(args.s_grid, "s_grid") if args.s_grid else None,
        samples=args.samples, seed=args.seed,
        c=tuple(args.c) if args.c else None, R=tuple(args.R) if args.R else None,
        quad=args.quad, out=args.out,
        quadrature={k: getattr(args, k) for k in QuadratureSpec.keys()
                    if getattr(args, k) is not None},
    )
    defaults = RunConfig(dim=1, A="zero", prescription="midpoint", seed=42)
    cfg = defaults.merged(cfg).merged(flags)
    for v in (cfg.s or ()) + (cfg.s_grid or ()):
        if not (0.0 < v < 1.0):
            raise ValidationError(f"s must lie in (0,1), got {v:g}")
    if cfg.samples is not None and cfg.samples < 1:
        raise ValidationError("samples must be >= 1")
    return cfg


def _require(cfg, command, *keys):
    missing = [k for k in keys if getattr(cfg, k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise ValidationError(f"{command} needs {flags}")


def _config_record(command, cfg: RunConfig, spec: QuadratureSpec):
    """The config embedded in reports (output paths left out so that reports
    written to different places compare equal)."""
    rec = {"command": command}
    for k, v in asdict(cfg).items():
        if k in ("out", "quad", "quadrature"):
            continue
        rec[k] = list(v) if isinstance(v, tuple) else v
    rec["quadrature"] = spec.as_dict()
    return rec


# ---------------------------------------------------------------------------
# subcommands


def _objects(cfg):
    u = parse_field(cfg.u, cfg.dim)
    parse_prescription(cfg.prescription)
    A = parse_potential(cfg.A, cfg.dim, cfg.prescription)
    return u, A


def cmd_inspect_young(cfg, spec):
    _require(cfg, "inspect-young", "G")
    F = parse_young(cfg.G)
    pm, pp = F.indices
    samples = cfg.samples or 10_000
    rep = verify_structure(F, samples=samples, seed=cfg.seed)
    table = delta2_table(F)
    print(f"G = {F.descriptor}")
    print(f"(p-, p+) = ({pm:.6g}, {pp:.6g})")
    print(f"{'t':>10} {'G(t)':>14} {'G(2t)':>14} {'ratio':>10}   (bound 2^p+ = {2 ** pp:.6g})")
    for t, g, g2, r in table:
        print(f"{t:>10.4g} {g:>14.6e} {g2:>14.6e} {r:>10.6f}")
    print(f"structure check on {samples} samples (seed {cfg.seed}):")
    for name, v in rep.slack.items():
        print(f"  {name:<16} min slack {v: .3e}  {'ok' if v >= -rep.tolerance else 'FAIL'}")
    body = {
        "p_minus": pm, "p_plus": pp,
        "delta2_table": [{"t": t, "G": g, "G2t": g2, "ratio": r} for t, g, g2, r in table],
        "structure": {"samples": rep.samples, "seed": rep.seed, "slack": rep.slack,
                      "witness": rep.witness, "passed": rep.passed},
    }
    return body, EXIT_OK if rep.passed else EXIT_PROPERTY


def cmd_seminorm(cfg, spec):
    _require(cfg, "seminorm", "u", "G", "s")
    u, A = _objects(cfg)
    F = parse_young(cfg.G)
    IG = modular_IG(u, F, spec)
    norm = luxemburg_norm(u, F, spec)
    print(f"I_G(u) = {IG.value:.12g}  (+/- {IG.est_error:.2e})   ||u||_G = {norm:.10g}")
    print(f"{'s':>8} {'I_s,G^A(u)':>20} {'est_error':>12} {'seminorm':>16}")
    rows = []
    for s in cfg.s:
        m = modular_IsGA(u, A, F, s, spec)
        semi = luxemburg_seminorm(u, A, F, s, spec)
        print(f"{s:>8.4g} {m.value:>20.12g} {m.est_error:>12.3e} {semi:>16.10g}")
        rows.append({"s": s, "I": m.value, "est_error": m.est_error, "seminorm": semi})
    body = {"I_G": IG.value, "I_G_error": IG.est_error, "norm": norm, "rows": rows}
    return body, EXIT_OK


def cmd_ms_scan(cfg, spec):
    _require(cfg, "ms-scan", "u", "G")
    u, A = _objects(cfg)
    F = parse_young(cfg.G)
    grid = cfg.s_grid or DEFAULT_S_GRID
    rep = ms_scan(u, A, F, grid, spec)
    print(f"{'s':>8} {'I':>20} {'s*I':>16} {'est_error':>12}")
    for r in rep.rows:
        flag = "" if r.ok else "  (not converged)"
        print(f"{r.s:>8.4g} {r.I:>20.12g} {r.s_times_I:>16.10g} {r.est_error:>12.3e}{flag}")
    print(f"target       {rep.target:.10g}")
    print(f"extrapolated {rep.extrapolated:.10g}  (order {rep.fit_order:.4g})")
    print(f"rel_gap      {rep.rel_gap:.3e}  (+/- {rep.rel_gap_band:.1e})")
    body = rep.as_dict()
    body["csv_rows"] = rep.rows
    return body, EXIT_CONVERGENCE if rep.partial else EXIT_OK


def cmd_hardy(cfg, spec):
    _require(cfg, "hardy", "u", "G")
    u, A = _objects(cfg)
    F = parse_young(cfg.G)
    s_values = cfg.s or HARDY_S
    reps = [hardy_check(u, A, F, s, spec) for s in s_values]
    print(f"{'s':>8} {'lhs':>16} {'lhs (Gbar)':>16} {'modular':>16} {'ratio':>12}")
    for r in reps:
        if not r.threshold_ok:
            print(f"{r.s:>8.4g}   s >= n/p+ : nothing computed")
            continue
        print(f"{r.s:>8.4g} {r.lhs:>16.10g} {r.lhs_Gbar:>16.10g} {r.modular:>16.10g} {r.ratio:>12.6g}")
    ratios = [r.ratio for r in reps if r.threshold_ok and r.ratio > 0]
    spread = max(ratios) / min(ratios) if ratios else float("nan")
    print(f"ratio spread (max/min) {spread:.4g}")
    ok = all(r.sandwich_ok for r in reps if r.threshold_ok)
    body = {"rows": [r.as_dict() for r in reps], "ratio_spread": spread, "sandwich_ok": ok}
    return body, EXIT_OK if ok else EXIT_PROPERTY


def cmd_check_diamagnetic(cfg, spec):
    _require(cfg, "check-diamagnetic", "u", "s")
    u, A = _objects(cfg)
    samples = cfg.samples or 100_000
    rows, ok = [], True
    print(f"{'s':>8} {'samples':>10} {'min slack':>14}")
    for s in cfg.s:
        rep = diamagnetic_scan(u, A, s, samples=samples, seed=cfg.seed, tolerance=DIAMAGNETIC_TOL)
        ok &= rep.passed
        print(f"{s:>8.4g} {samples:>10d} {rep.min_slack:>14.4e}  {'ok' if rep.passed else 'FAIL'}")
        rows.append({"s": s, "samples": rep.samples, "min_slack": rep.min_slack,
                     "witness_x": list(rep.witness_x), "witness_y": list(rep.witness_y),
                     "passed": rep.passed})
    return {"rows": rows, "passed": ok}, EXIT_OK if ok else EXIT_PROPERTY


def cmd_tail_selftest(cfg, spec):
    _require(cfg, "tail-selftest", "G")
    F = parse_young(cfg.G)
    rows, ok = [], True
    print(f"{'c':>6} {'s':>6} {'R':>6} {'numeric':>20} {'analytic':>20} {'rel diff':>10}")
    for c in cfg.c or TAIL_C:
        for s in cfg.s or TAIL_S:
            for R in cfg.R or TAIL_R:
                t = tail_selftest(F, c, s, R)
                good = t.discrepancy <= TAIL_TOL
                ok &= good
                print(f"{c:>6.3g} {s:>6.3g} {R:>6.3g} {t.numeric:>20.14g} {t.analytic:>20.14g} "
                      f"{t.discrepancy:>10.2e}")
                rows.append({"c": c, "s": s, "R": R, "numeric": t.numeric,
                             "analytic": t.analytic, "discrepancy": t.discrepancy,
                             "passed": good})
    return {"rows": rows, "tolerance": TAIL_TOL, "passed": ok}, EXIT_OK if ok else EXIT_PROPERTY


HANDLERS = {
    "inspect-young": cmd_inspect_young,
    "seminorm": cmd_seminorm,
    "ms-scan": cmd_ms_scan,
    "hardy": cmd_hardy,
    "check-diamagnetic": cmd_check_diamagnetic,
    "tail-selftest": cmd_tail_selftest,
}


def _emit(path, command, cfg, spec, body):
    csv_rows = body.pop("csv_rows", None)
    write_json(path, {"config": _config_record(command, cfg, spec), **body})
    if csv_rows is not None:
        write_csv(Path(path).with_suffix(".csv"), csv_rows)


def run(argv=None) -> int:
    """Execute one subcommand and return the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        spec = cfg.spec()
        body, code = HANDLERS[args.command](cfg, spec)
        if cfg.out:
            _emit(cfg.out, args.command, cfg, spec, body)
        return code
    except (ConvergenceError, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ValidationError, AdmissibilityError, PointEvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    except MagOrliczError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
