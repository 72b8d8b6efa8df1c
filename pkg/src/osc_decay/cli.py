"""Command-line front end: ``osc-decay <subcommand>``.

Settings come from a flat ``key = value`` file (``--config``) overridden by
flags.  Every CSV starts with the resolved settings as ``#`` comments.
Exit codes: 0 pass, 1 verdict fail, 2 usage or config error, 3 analysis
refused.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import math
import os
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import decay_lab as lab
from .integrator import QuadConfig, integrate_classical, integrate_envelope, integrate_ml
from .ml_special import MLParams, SectorConditionViolated, UnsupportedParameters, ml_bound_ratio, ml_eval
from .newton_geometry import UnboundedPrincipalFace, analyze
from .phase_algebra import NotNormalized, PhaseSyntaxError, format_phase, parse_amplitude, parse_phase

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3
THREADS_ENV = "OSC_DECAY_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    phase: str = "x^2*y^2"
    amplitude: str = "bump:0.5"
    alpha: float = 0.5
    beta: float = 1.0
    lambda_min: float = 4.0
    lambda_max: float = 16000.0
    lambda_points: int = 12
    epsilon_min: float = 1e-6
    epsilon_max: float = 1e-1
    epsilon_points: int = 11
    rho: float = 1.0
    rel_tol: float = 1e-4
    max_cells: int = 4_000_000
    points_per_wavelength: float = 4.0
    rule_order: int = 15
    max_depth: int = 24
    sublevel_rel_tol: float = 2e-3
    adapted_declared: bool = True
    output: str = "-"

    # not echoed: results must not depend on it
    threads: int = 1

    def validate(self) -> None:
        if self.lambda_min < 2:
            raise ConfigError("lambda_min must be >= 2")
        if self.lambda_max < self.lambda_min:
            raise ConfigError("lambda_max must be >= lambda_min")
        if self.lambda_points < 1 or self.epsilon_points < 1:
            raise ConfigError("grid sizes must be positive")
        if not 0 < self.epsilon_min <= self.epsilon_max:
            raise ConfigError("need 0 < epsilon_min <= epsilon_max")
        if not self.rho > 0:
            raise ConfigError("rho must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be positive")

    def quad(self) -> QuadConfig:
        try:
            return QuadConfig(self.rel_tol, self.max_cells, self.points_per_wavelength, self.rule_order, self.threads)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def echo(self, keys: Sequence[str]) -> dict:
        return {k: getattr(self, k) for k in keys}


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
SWEEP_KEYS = ("phase", "amplitude", "alpha", "beta", "lambda_min", "lambda_max", "lambda_points", "rho",
              "rel_tol", "max_cells", "points_per_wavelength", "rule_order", "adapted_declared")
SUBLEVEL_KEYS = ("phase", "epsilon_min", "epsilon_max", "epsilon_points", "rho", "max_depth", "sublevel_rel_tol",
                 "adapted_declared")


def _coerce(name: str, raw):
    typ = _FIELDS[name].type
    if typ in ("bool", bool):
        if isinstance(raw, bool):
            return raw
        low = str(raw).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        if typ in ("int", int):
            return int(float(raw)) if isinstance(raw, str) and "e" in raw.lower() else int(raw)
        if typ in ("float", float):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from None
    return str(raw)


def read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip()
            if not sep or key not in _FIELDS:
                raise ConfigError(f"{path}:{n}: expected 'key = value' with a known key")
            out[key] = val.strip()
    return out


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    env = os.environ.get(THREADS_ENV)
    if env:
        values["threads"] = env
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    cfg = ExperimentConfig(**{k: _coerce(k, v) for k, v in values.items()})
    cfg.validate()
    return cfg


def _add_config_flags(p: argparse.ArgumentParser, names: Sequence[str]) -> None:
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--threads", type=int, help=f"worker threads (also {THREADS_ENV})")
    for name in names:
        flag = "--" + name.replace("_", "-")
        if name == "adapted_declared":
            p.add_argument("--adapted", dest=name, action="store_const", const=True)
            p.add_argument("--not-adapted", dest=name, action="store_const", const=False)
        else:
            p.add_argument(flag, dest=name)
    if "output" not in names:
        p.add_argument("--output", "-o", dest="output")


def _open_out(path: str):
    if path in ("-", ""):
        return contextlib.nullcontext(sys.stdout)
    return open(path, "w", newline="")


def _complex_str(z: complex) -> str:
    return f"{lab.fmt(z.real)}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{lab.fmt(abs(z.imag))}i"


def _parse_z(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def _invariants(phase: str, adapted: bool):
    f = parse_phase(phase)
    return f, analyze(f, adapted)


# ---------------------------------------------------------------- commands


def cmd_ml(args) -> int:
    z = _parse_z(args.z)
    params = MLParams(float(args.alpha), float(args.beta))
    val = ml_eval(params, z, float(args.tol))
    print(f"value={_complex_str(val)}")
    print(f"abs={lab.fmt(abs(val))}")
    if args.bound_ratio:
        if z.real != 0:
            raise ConfigError("--bound-ratio needs z on the imaginary axis")
        print(f"bound_ratio={lab.fmt(ml_bound_ratio(params, z.imag))}")
    return EXIT_PASS


def cmd_newton(args) -> int:
    f = parse_phase(args.phase)
    try:
        inv = analyze(f, not args.not_adapted)
    except NotNormalized as exc:
        print(f"warning: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except UnboundedPrincipalFace as exc:
        part = exc.partial
        print(f"phase={format_phase(f)}")
        print(f"d={part.distance_d}")
        print(f"principal_face={part.principal_face}")
        print(f"hull_vertices={' '.join(f'({a},{b})' for a, b in part.hull_vertices)}")
        print(f"refused={exc}", file=sys.stderr)
        return EXIT_REFUSED
    print(f"phase={format_phase(f)}")
    print(f"d={inv.distance_d}")
    print(f"nu={inv.nu}")
    print(f"m={inv.multiplicity_m}")
    print(f"principal_face={inv.principal_face}")
    print(f"principal_part={format_phase(inv.principal_part)}")
    print(f"hull_vertices={' '.join(f'({a},{b})' for a, b in inv.hull_vertices)}")
    for flag in inv.flags:
        print(f"flag={flag}")
    print("phase,d,nu,m,principal_face,adapted_declared")
    print(f"\"{format_phase(f)}\",{inv.distance_d},{inv.nu},{inv.multiplicity_m},\"{inv.principal_face}\","
          f"{str(inv.adapted_declared).lower()}")
    return EXIT_PASS


def cmd_integrate(args) -> int:
    cfg = resolve_config(args)
    if args.lam is None:
        raise ConfigError("--lambda is required")
    lam = float(args.lam)
    f = parse_phase(cfg.phase)
    psi = parse_amplitude(cfg.amplitude)
    q = cfg.quad()
    if args.kernel == "ml":
        r = integrate_ml(f, psi, MLParams(cfg.alpha, cfg.beta), lam, q, cfg.rho)
    elif args.kernel == "classical":
        r = integrate_classical(f, psi, lam, q, cfg.rho)
    else:
        r = integrate_envelope(f, psi, lam, q, cfg.rho)
    keys = ("phase", "amplitude", "alpha", "beta", "rho", "rel_tol", "max_cells", "points_per_wavelength", "rule_order")
    header = {**cfg.echo(keys), "kernel": args.kernel}
    with _open_out(cfg.output) as out:
        out.write(lab.header_lines(header))
        for flag in r.flags:
            out.write(f"# flag = {flag}\n")
        v = complex(r.value)
        out.write("lambda,re,im,abs,error_estimate,cells\n")
        out.write(f"{lab.fmt(lam)},{lab.fmt(v.real)},{lab.fmt(v.imag)},{lab.fmt(abs(v))},"
                  f"{lab.fmt(r.abs_error_estimate)},{r.cells_used}\n")
    return EXIT_PASS if r.converged else EXIT_FAIL


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    f, inv = _invariants(cfg.phase, cfg.adapted_declared)
    psi = parse_amplitude(cfg.amplitude)
    grid = lab.geometric_grid(cfg.lambda_min, cfg.lambda_max, cfg.lambda_points)
    report = lab.lambda_sweep(f, psi, MLParams(cfg.alpha, cfg.beta), grid, cfg.quad(), cfg.rho,
                              h=inv.distance_d, m=inv.multiplicity_m)
    header = {**cfg.echo(SWEEP_KEYS), "h": inv.distance_d, "m": inv.multiplicity_m}
    with _open_out(cfg.output) as out:
        lab.write_sweep_csv(out, report, header)
    verdict = lab.verify_theorem1(report)
    sys.stdout.write(verdict.to_text())
    if report.fit_note and len(report.samples) < 2:
        return EXIT_REFUSED
    if report.excluded:
        return EXIT_FAIL
    return EXIT_PASS if verdict.passed else EXIT_FAIL


def sublevel_verdict(report: lab.SublevelReport) -> lab.Verdict:
    """Fitted exponents against the sublevel trichotomy.

    delta < 1: fitted delta within 0.1 of 1/h.  delta = 1: fitted delta
    within 0.1 of 1 and log power at most m + 1 (+0.5 slack).  delta > 1 is
    not reachable with normalised phases and is reported as such.
    """
    fields = {
        "regime": report.regime,
        "delta_expected": str(report.delta),
        "m": report.m,
        "samples": len(report.samples),
        "fitted_delta": float(report.fitted_delta),
        "fitted_logpow": float(report.fitted_logpow),
    }
    if report.fit_note:
        fields["note"] = report.fit_note
        return lab.Verdict("sublevel", False, fields)
    d = float(report.delta)
    if report.regime == "delta<1":
        ok = abs(report.fitted_delta - d) <= 0.1
    elif report.regime == "delta=1":
        ok = abs(report.fitted_delta - 1.0) <= 0.1 and report.fitted_logpow <= report.m + 1.5
    else:
        fields["note"] = "not applicable"
        ok = True
    return lab.Verdict("sublevel", bool(ok), fields)


def cmd_sublevel(args) -> int:
    cfg = resolve_config(args)
    f, inv = _invariants(cfg.phase, cfg.adapted_declared)
    grid = lab.geometric_grid(cfg.epsilon_min, cfg.epsilon_max, cfg.epsilon_points)
    delta = 1 / Fraction(inv.distance_d)
    report = lab.epsilon_sweep(f, grid, cfg.rho, cfg.max_depth, cfg.sublevel_rel_tol, delta, inv.multiplicity_m)
    header = {**cfg.echo(SUBLEVEL_KEYS), "delta": delta, "m": inv.multiplicity_m}
    with _open_out(cfg.output) as out:
        lab.write_sublevel_csv(out, report, header)
    verdict = sublevel_verdict(report)
    sys.stdout.write(verdict.to_text())
    if report.fit_note:
        return EXIT_REFUSED
    return EXIT_PASS if verdict.passed else EXIT_FAIL


def cmd_morse(args) -> int:
    lam_min = float(args.lambda_min)
    if lam_min < 2:
        raise ConfigError("lambda_min must be >= 2")
    grid = lab.geometric_grid(lam_min, float(args.lambda_max), int(args.lambda_points))
    threads = args.threads or int(os.environ.get(THREADS_ENV) or 1)
    q = QuadConfig(rel_tol=float(args.rel_tol), threads=threads)
    verdict, rows = lab.morse_case_check(args.sign, grid, q, M=float(args.M), rho=float(args.rho))
    if args.output:
        with _open_out(args.output) as out:
            out.write(lab.header_lines({"sign": args.sign, "M": args.M, "rho": args.rho, "rel_tol": args.rel_tol}))
            cols = ["lam", "measure", "measure_error", "envelope", "envelope_error", "measure_ratio", "envelope_ratio"]
            out.write("lambda," + ",".join(cols[1:]) + "\n")
            for r in rows:
                out.write(",".join(lab.fmt(r[c]) for c in cols) + "\n")
    sys.stdout.write(verdict.to_text())
    return EXIT_PASS if verdict.passed else EXIT_FAIL


def cmd_report(args) -> int:
    with open(args.csv) as fh:
        config, cols, rows, comments = lab.read_csv(fh.read())
    excluded = [float(c.split("=")[1].split()[0]) for c in comments if c.startswith("excluded lambda")]
    if cols[:2] == ["lambda", "abs_value"]:
        h, m = Fraction(config["h"]), int(config["m"])
        report = lab.build_report([(r[0], r[1]) for r in rows], [r[2] for r in rows], excluded, h, m)
        verdict = lab.verify_theorem1(report)
        sys.stdout.write(verdict.to_text())
        if report.fit_note and len(report.samples) < 2:
            return EXIT_REFUSED
    elif cols[:2] == ["epsilon", "measure"]:
        report = lab.build_sublevel_report([(r[0], r[1]) for r in rows], [r[2] for r in rows],
                                           Fraction(config["delta"]), int(config["m"]))
        verdict = sublevel_verdict(report)
        sys.stdout.write(verdict.to_text())
        if report.fit_note:
            return EXIT_REFUSED
    else:
        raise ConfigError(f"{args.csv}: not a sweep or sublevel CSV")
    return EXIT_PASS if verdict.passed and not excluded else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="osc-decay", description="Mittag-Leffler oscillatory integrals and decay checks")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ml", help="evaluate E_{alpha,beta}(z)")
    s.add_argument("--alpha", required=True)
    s.add_argument("--beta", required=True)
    s.add_argument("--z", required=True, help="complex number such as 1+0i or 0+1000000i")
    s.add_argument("--tol", default="1e-12")
    s.add_argument("--bound-ratio", action="store_true", help="also print |E(it)| (1 + |t|)")
    s.set_defaults(func=cmd_ml)

    s = sub.add_parser("newton", help="Newton polyhedron invariants of a phase")
    s.add_argument("phase")
    s.add_argument("--not-adapted", action="store_true", help="mark m as provisional")
    s.set_defaults(func=cmd_newton)

    s = sub.add_parser("integrate", help="one oscillatory or envelope integral")
    _add_config_flags(s, ("phase", "amplitude", "alpha", "beta", "rho", "rel_tol", "max_cells",
                          "points_per_wavelength", "rule_order"))
    s.add_argument("--lambda", dest="lam", required=True)
    s.add_argument("--kernel", choices=("ml", "classical", "envelope"), default="ml")
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("sweep", help="lambda sweep with the decay-bound verdict")
    _add_config_flags(s, SWEEP_KEYS)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("sublevel", help="epsilon sweep of sublevel-set measures")
    _add_config_flags(s, SUBLEVEL_KEYS)
    s.set_defaults(func=cmd_sublevel)

    s = sub.add_parser("morse", help="non-degenerate critical point checks")
    s.add_argument("--sign", choices=("+", "-"), required=True)
    s.add_argument("--lambda-min", default="4")
    s.add_argument("--lambda-max", default="1e4")
    s.add_argument("--lambda-points", default="10")
    s.add_argument("--M", default="1")
    s.add_argument("--rho", default="1")
    s.add_argument("--rel-tol", default="1e-4")
    s.add_argument("--threads", type=int)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_morse)

    s = sub.add_parser("report", help="recompute the verdict stored in a sweep or sublevel CSV")
    s.add_argument("csv")
    s.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                return args.func(args)
            finally:
                for w in caught:
                    print(f"warning: {w.message}", file=sys.stderr)
    except (UnboundedPrincipalFace, NotNormalized) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ConfigError, PhaseSyntaxError, UnsupportedParameters, SectorConditionViolated, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
