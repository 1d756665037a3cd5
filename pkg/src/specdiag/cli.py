"""Command-line runner: ``specdiag {transform,radius,resolvent,verify}``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from .bases import Hermite, Jacobi, Laguerre, Torus
from .core import DEFAULT_MAX_DEGREE, DEFAULT_THRESHOLD, CoefficientSequence
from .errors import ConfigError, NumericalError, ParameterError
from .norms import require_admissible
from .spectral import verify_lsrf, verify_resolvent
from .suite import DEFAULT_MODES, parse_mode_sum, run_suite
from .transforms import SmoothFunction, analyze, coefficient_function, decay_report

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
MODE_SUM = re.compile(r"^\s*-?\d+\s*,[^;]+(;\s*-?\d+\s*,[^;]+)*;?\s*$")


# ---------------------------------------------------------------------------
# deterministic JSON


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k), ensure_ascii=False)}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    """JSON with fixed field order and 17-significant-digit floats."""
    return _fmt(obj) + "\n"


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    alpha: float
    beta: float
    poly: tuple
    func: str | None
    p: float
    N: int
    n_max: int
    threshold: float
    z: complex | None
    out: str | None

    def basis(self):
        if self.family == "torus":
            return Torus(self.poly)
        if self.family == "jacobi":
            return Jacobi(self.alpha, self.beta)
        if self.family == "hermite":
            return Hermite()
        if self.family == "laguerre":
            return Laguerre(self.alpha)
        raise ParameterError(f"unknown family {self.family!r}")


def _parse_p(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "∞"):
        return math.inf
    try:
        p = float(t)
    except ValueError:
        raise ParameterError(f"p must be a number or 'inf', got {text!r}") from None
    if not p >= 1:
        raise ParameterError(f"p must lie in [1, ∞], got {text}")
    return p


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParameterError(f"cannot read {text!r} as a complex number") from None


def config_from_args(args) -> ExperimentConfig:
    poly = tuple(_parse_complex(a) for a in args.poly.split(",")) if args.poly else (0, 1)
    if args.family == "jacobi" and min(args.alpha, args.beta) < -0.5:
        raise ParameterError("Jacobi parameters must satisfy α, β ≥ -1/2")
    if args.N < 0:
        raise ParameterError("--N must be non-negative")
    if args.nmax < 1:
        raise ParameterError("--nmax must be positive")
    if not (args.threshold >= 0 and math.isfinite(args.threshold)):
        raise ParameterError("--threshold must be finite and non-negative")
    return ExperimentConfig(
        family=args.family, alpha=args.alpha, beta=args.beta, poly=poly, func=args.func,
        p=_parse_p(args.p), N=args.N, n_max=args.nmax, threshold=args.threshold,
        z=_parse_complex(args.z) if getattr(args, "z", None) is not None else None,
        out=args.out,
    )


def catalog_function(name: str, b) -> SmoothFunction:
    """Closed-form test functions by name.

    cos:k (or cosKt), inv2mcos = 1/(2 - cos t) on the torus; gauss:k =
    t^k e^{-t²/2} on the line; lagmono:k = smooth part t^k e^{-t/2} on the
    half-line; basis:n; zero.
    """
    key = name.strip().lower().replace(" ", "")
    m = re.fullmatch(r"cos(?::)?(\d+)t?", key)
    if m:
        k = int(m.group(1))
        _need(b, Torus, name)
        return SmoothFunction(lambda t: np.cos(k * t), b.domain, name=name)
    if key in ("inv2mcos", "1/(2-cost)"):
        _need(b, Torus, name)
        return SmoothFunction(lambda t: 1.0 / (2.0 - np.cos(t)), b.domain, name=name)
    m = re.fullmatch(r"gauss(?::(\d+))?", key)
    if m:
        k = int(m.group(1) or 0)
        _need(b, Hermite, name)
        return SmoothFunction(lambda t: t**k * np.exp(-0.5 * t * t), b.domain, name=name)
    m = re.fullmatch(r"lagmono(?::(\d+))?", key)
    if m:
        k = int(m.group(1) or 0)
        _need(b, Laguerre, name)
        return SmoothFunction(lambda t: t**k * np.exp(-0.5 * t), b.domain, smooth_part=True, name=name)
    m = re.fullmatch(r"basis:(-?\d+)", key)
    if m:
        n = int(m.group(1))
        c = CoefficientSequence.delta(b.index_set(abs(n)), n)
        return coefficient_function(c, b, name=name)
    if key == "zero":
        return SmoothFunction(lambda t: np.zeros(np.shape(t)), b.domain,
                              smooth_part=isinstance(b, Laguerre), name=name)
    raise ParameterError(f"unknown function {name!r}")


def _need(b, cls, name):
    if not isinstance(b, cls):
        raise ParameterError(f"function {name!r} is only available for the {cls.kind} family")


def _input(cfg: ExperimentConfig, b, default: str | None = None):
    """Coefficients for a mode-sum, otherwise a catalog SmoothFunction."""
    spec = cfg.func or default
    if spec is None:
        raise ParameterError("--func is required")
    if MODE_SUM.match(spec):
        try:
            return parse_mode_sum(spec, b, cfg.N)
        except (IndexError, ValueError) as exc:
            raise ParameterError(f"bad mode-sum {spec!r}: {exc}") from None
    return catalog_function(spec, b)


def _write(cfg: ExperimentConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_transform(cfg: ExperimentConfig) -> int:
    b = cfg.basis()
    require_admissible(b, cfg.p)
    f = _input(cfg, b)
    if isinstance(f, CoefficientSequence):
        f = coefficient_function(f, b)
    c = analyze(f, b, cfg.N)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im", "abs"])
    for n, v in c.items():
        w.writerow([n, format(v.real, ".17g"), format(v.imag, ".17g"), format(abs(v), ".17g")])
    report = decay_report(c).as_dict() if c.max_abs() > 0 else None
    buf.write("# decay_report " + dumps(report))
    _write(cfg, buf.getvalue())
    return EXIT_OK


def cmd_radius(cfg: ExperimentConfig) -> int:
    b = cfg.basis()
    require_admissible(b, cfg.p)
    f = _input(cfg, b)
    rep = verify_lsrf(f, b, cfg.p, cfg.n_max, cfg.N, cfg.threshold)
    out = rep.as_dict()
    out["possibly_unbounded"] = rep.possibly_unbounded
    _write(cfg, dumps(out))
    return EXIT_OK


def cmd_resolvent(cfg: ExperimentConfig) -> int:
    if cfg.z is None:
        raise ParameterError("--z is required")
    b = cfg.basis()
    f = _input(cfg, b)
    N = min(cfg.N, 64)
    if isinstance(f, CoefficientSequence):
        top = int(np.max(np.abs(f.indices[f.values != 0]), initial=0))
        f = f.truncated(max(top, 1))
        N = f.index_set.max_degree
    rep = verify_resolvent(f, b, cfg.z, N=N, threshold=cfg.threshold)
    out = {"family": b.describe()}
    out.update(rep.as_dict())
    _write(cfg, dumps(out))
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig) -> int:
    b = cfg.basis()
    seed = int(os.environ.get("SPECDIAG_SEED", "0"))
    rows = run_suite(b, cfg.N, cfg.n_max, cfg.p, cfg.threshold, cfg.func, seed)
    lines = [f"# verify {b.kind} {dumps(b.describe()).strip()}"]
    lines += [r.line() for r in rows]
    ok = all(r.passed for r in rows)
    lines.append(f"# {'ALL PASS' if ok else 'FAILURES'}: {sum(r.passed for r in rows)}/{len(rows)}")
    _write(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if ok else 1


COMMANDS = {"transform": cmd_transform, "radius": cmd_radius,
            "resolvent": cmd_resolvent, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--family", choices=["torus", "jacobi", "hermite", "laguerre"], default="torus")
    common.add_argument("--alpha", type=float, default=0.0)
    common.add_argument("--beta", type=float, default=0.0)
    common.add_argument("--poly", default="0,1", help="coefficients of P, ascending powers (torus)")
    common.add_argument("--func", default=None, help='mode-sum "k1,c1;k2,c2" or catalog name')
    common.add_argument("--p", default="2")
    common.add_argument("--N", type=int, default=DEFAULT_MAX_DEGREE)
    common.add_argument("--nmax", type=int, default=60)
    common.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    common.add_argument("--out", default=None)
    parser = _Parser(prog="specdiag", description="Local spectral radius experiments for diagonalizable operators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("transform", "radius", "verify"):
        sub.add_parser(name, parents=[common])
    res = sub.add_parser("resolvent", parents=[common])
    res.add_argument("--z", required=True)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"specdiag: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"specdiag: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
