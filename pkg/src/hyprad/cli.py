"""Command-line front end: ``hyprad classify|radon|verify|table``.

Every command emits one document, JSON by default::

    {"space": {...}, "command": "...", "rows": [...], "checks": [...]}

or CSV (rows only, 17 significant digits).  Exit codes: 0 success,
1 failed verification, 2 invalid input, 3 quadrature failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .model_functions import bump_profile, point_function, psi_tilde
from .quadrature import QuadConfig, QuadratureError
from .reference import radon_shape_closed
from .spaces import (
    InvalidSpaceError,
    SpaceParams,
    _base_lambda,
    derive_constants,
    enumerate_series,
    noncuspidal_parameters,
)
from .transforms import MAX_FULL_DIM, ConvergenceError, abel, radon_full, radon_reduced
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_QUAD = 0, 1, 2, 3

CONFIG_KEYS = ("d", "p", "q", "projective", "lambda", "mu", "bump", "mode", "s", "tol",
               "format", "out", "suite", "lambda_max", "max_sum")
DEFAULTS = {"d": 1, "p": 0, "q": 1, "projective": True, "mode": 0, "format": "json",
            "lambda_max": 10, "max_sum": 6, "suite": "all"}


class UsageError(ValueError):
    """Invalid command-line or config input (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    space: Optional[SpaceParams]
    lam: Optional[Fraction] = None
    bump: Optional[float] = None
    mode: int = 0
    s_grid: Optional[np.ndarray] = None
    tol: Optional[float] = None
    fmt: str = "json"
    out: Optional[str] = None
    suite: str = "all"
    lambda_max: float = 10
    max_sum: int = 6
    workers: int = 1


# --- parsing --------------------------------------------------------------------------

def parse_grid(spec: str) -> np.ndarray:
    """``START:STOP:STEP`` (inclusive stop) to an array; rejects empty grids."""
    parts = str(spec).split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be START:STOP:STEP, got {spec!r}")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from None
    if not step > 0:
        raise UsageError("grid step must be positive")
    if stop < start:
        raise UsageError(f"empty grid {spec!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def parse_fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _workers() -> int:
    raw = os.environ.get("HYPRAD_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"HYPRAD_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("HYPRAD_THREADS must be positive")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyprad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, space=True):
        if space:
            p.add_argument("--d", type=int, help="real dimension of the field (1, 2, 4, 8)")
            p.add_argument("--p", type=int)
            p.add_argument("--q", type=int)
            p.add_argument("--projective", action=argparse.BooleanOptionalAction, default=None,
                           help="projective space (default) or the real non-projective variant")
        p.add_argument("--tol", type=float, help="relative tolerance of the adaptive quadrature")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--out", help="write the document here instead of stdout")
        p.add_argument("--config", help="JSON file with default values for these flags")

    p = sub.add_parser("classify", help="enumerate the discrete series of a space")
    common(p)
    p.add_argument("--lambda-max", dest="lambda_max", type=float)

    p = sub.add_parser("radon", help="Radon and Abel transforms on an s-grid")
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lambda_", help="generating function psi_tilde_lambda")
    g.add_argument("--mu", help="generating function with this mu (lambda derived)")
    g.add_argument("--bump", type=float, help="bump profile of this support radius")
    p.add_argument("--mode", type=int, help="K-type mode m of the bump profile")
    p.add_argument("--s", help="grid START:STOP:STEP")

    p = sub.add_parser("verify", help="run the verification suites")
    common(p, space=False)
    p.add_argument("--suite", help=f"one of {', '.join(SUITES)}")

    p = sub.add_parser("table", help="structural constants over a range of spaces")
    common(p)
    p.add_argument("--max-sum", dest="max_sum", type=int, help="largest p + q listed")
    return parser


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = set(data) - set(CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _glue_negative_values(argv: list) -> list:
    """Turn ``--s -2:2:0.5`` into ``--s=-2:2:0.5`` so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--s", "--lambda", "--mu") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def resolve(argv=None) -> RunConfig:
    """Parse flags, merge the optional config file (flags win) and validate."""
    args = build_parser().parse_args(_glue_negative_values(sys.argv[1:] if argv is None else list(argv)))
    flags = {k: v for k, v in vars(args).items() if v is not None}
    if "lambda_" in flags:
        flags["lambda"] = flags.pop("lambda_")
    merged = dict(DEFAULTS)
    config = _load_config(flags.pop("config", None))
    if any(k in flags for k in ("lambda", "mu", "bump")):
        # a function chosen on the command line replaces the config's choice
        for k in ("lambda", "mu", "bump"):
            config.pop(k, None)
    merged.update(config)
    merged.update(flags)
    cmd = merged["command"]

    space = None
    if cmd != "verify":
        try:
            space = SpaceParams(int(merged["d"]), int(merged["p"]), int(merged["q"]),
                                bool(merged["projective"]))
        except InvalidSpaceError as exc:
            raise UsageError(str(exc)) from None

    tol = merged.get("tol")
    if tol is not None and not float(tol) > 0:
        raise UsageError("--tol must be positive")
    cfg = RunConfig(command=cmd, space=space, tol=None if tol is None else float(tol),
                    fmt=merged["format"], out=merged.get("out"), mode=int(merged["mode"]),
                    suite=str(merged["suite"]), lambda_max=float(merged["lambda_max"]),
                    max_sum=int(merged["max_sum"]))
    if cfg.fmt not in ("json", "csv"):
        raise UsageError(f"unknown format {cfg.fmt!r}")

    if cmd == "radon":
        given = [k for k in ("lambda", "mu", "bump") if merged.get(k) is not None]
        if len(given) != 1:
            raise UsageError("radon needs exactly one of --lambda, --mu, --bump")
        if "lambda" in given:
            cfg.lam = parse_fraction(merged["lambda"])
        elif "mu" in given:
            mu = parse_fraction(merged["mu"])
            if space.real_q1:
                raise UsageError("the q = d = 1 family is not parametrized by mu")
            cfg.lam = _base_lambda(space) + mu
        else:
            cfg.bump = float(merged["bump"])
            if not cfg.bump > 0:
                raise UsageError("bump radius must be positive")
        if merged.get("s") is None:
            raise UsageError("radon needs --s START:STOP:STEP")
        cfg.s_grid = parse_grid(merged["s"])
        cfg.workers = _workers()
    if cmd == "verify" and cfg.suite not in SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    if cmd == "classify" and not cfg.lambda_max > 0:
        raise UsageError("--lambda-max must be positive")
    return cfg


# --- documents --------------------------------------------------------------------------

def _num(x) -> str:
    return format(float(x), ".17g")


def _jsonable(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def space_doc(space: Optional[SpaceParams]) -> Optional[dict]:
    if space is None:
        return None
    dc = derive_constants(space)
    doc = {"d": space.d, "p": space.p, "q": space.q, "projective": space.projective,
           "rho_q": float(dc.rho_q), "rho_1": float(dc.rho_1), "alpha": dc.alpha,
           "beta": dc.beta, "k0": dc.k0, "nstar_dim": dc.nstar_dim,
           "block_dims": list(dc.block_dims)}
    if space.projective:
        doc["noncuspidal_parameters"] = [float(x) for x in noncuspidal_parameters(space)]
    return doc


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(doc), indent=2) + "\n"
    rows = doc["rows"] or doc["checks"]
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0])
    for r in rows[1:]:
        cols += [c for c in r if c not in cols]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in rows:
        writer.writerow([_csv_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def _csv_cell(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating, Fraction)):
        return _num(x) if math.isfinite(float(x)) else str(float(x))
    if isinstance(x, (list, tuple)):
        return " ".join(str(_csv_cell(v)) for v in x)
    if isinstance(x, dict):
        return json.dumps(_jsonable(x), sort_keys=True)
    return x


# --- commands ---------------------------------------------------------------------------

def cmd_classify(cfg: RunConfig):
    rows = []
    for ser in enumerate_series(cfg.space, cfg.lambda_max):
        row = ser.as_dict()
        row["lambda"] = float(ser.lam)
        if row.get("m") is not None:
            row["m"] = float(row["m"])
        rows.append(row)
    doc = {"space": space_doc(cfg.space), "command": "classify", "rows": rows, "checks": []}
    return EXIT_OK, doc


def _radon_row(cfg: RunConfig, s: float, profile, quad: QuadConfig):
    space = cfg.space
    row = {"s": s, "radon": None, "abel": None, "shape_closed": None, "ratio": None, "err_estimate": None}
    try:
        if space.p_less_q:
            val, err = radon_reduced(space, profile, s, quad, full_output=True)
        else:
            val, err = radon_full(space, point_function(profile), s, quad,
                                  support_radius=profile.support_radius, full_output=True)
    except QuadratureError as exc:
        row["error"] = str(exc)
        return row
    row["radon"] = float(val)
    row["abel"] = float(abel(space, val, s))
    row["err_estimate"] = float(err)
    if cfg.lam is not None and space.p_less_q:
        shape = radon_shape_closed(space, cfg.lam, s)
        row["shape_closed"] = shape
        row["ratio"] = float(val) / shape
    return row


def cmd_radon(cfg: RunConfig):
    space = cfg.space
    if cfg.bump is not None:
        try:
            profile = bump_profile(cfg.bump, cfg.mode)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        try:
            profile = psi_tilde(space, cfg.lam)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if not space.p_less_q:
        dim = derive_constants(space).nstar_dim
        if dim > MAX_FULL_DIM:
            raise UsageError(f"full quadrature path limited to {MAX_FULL_DIM} chart dimensions, got {dim}")
    if cfg.lam is not None and space.p_less_q:
        try:
            radon_shape_closed(space, cfg.lam, 0.0)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"closed form unavailable: {exc}") from None
    quad = QuadConfig() if cfg.tol is None else QuadConfig(rel_tol=cfg.tol)
    s_vals = [float(s) for s in cfg.s_grid]
    try:
        if cfg.workers > 1 and len(s_vals) > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                rows = list(pool.map(lambda s: _radon_row(cfg, s, profile, quad), s_vals))
        else:
            rows = [_radon_row(cfg, s, profile, quad) for s in s_vals]
    except ConvergenceError as exc:
        raise UsageError(str(exc)) from None
    checks = []
    failed = [r["s"] for r in rows if "error" in r]
    if failed:
        checks.append({"name": "quadrature", "passed": False, "failed_s": failed})
    doc = {"space": space_doc(space), "command": "radon", "rows": rows, "checks": checks}
    return (EXIT_QUAD if failed else EXIT_OK), doc


def cmd_verify(cfg: RunConfig):
    results = run_suite(cfg.suite, cfg.tol)
    checks = [r.as_dict() for r in results]
    for c in checks:
        c["details"] = {k: v for k, v in c["details"].items() if k != "rows"}
    ok = all(r.passed for r in results)
    doc = {"space": None, "command": "verify", "rows": [], "checks": checks}
    for r in results:
        print(r.line(), file=sys.stderr)
    return (EXIT_OK if ok else EXIT_VERIFY), doc


def cmd_table(cfg: RunConfig):
    """Constants and classification for every space with ``p + q <= max_sum`` at the given d."""
    d = cfg.space.d
    rows = []
    pairs = [(0, 1)] if d == 8 else [(p, q) for n in range(1, cfg.max_sum + 1)
                                     for p in range(0, n) for q in [n - p] if q >= 1]
    for p, q in pairs:
        space = SpaceParams(d, p, q, cfg.space.projective)
        doc = space_doc(space)
        sph = [s for s in enumerate_series(space, cfg.lambda_max) if s.spherical]
        rows.append({"d": d, "p": p, "q": q, "rho_q": doc["rho_q"], "rho_1": doc["rho_1"],
                     "k0": doc["k0"], "nstar_dim": doc["nstar_dim"],
                     "spherical_lambdas": [float(s.lam) for s in sph],
                     "noncuspidal_parameters": doc.get("noncuspidal_parameters")})
    return EXIT_OK, {"space": {"d": d, "projective": cfg.space.projective}, "command": "table",
                     "rows": rows, "checks": []}


COMMANDS = {"classify": cmd_classify, "radon": cmd_radon, "verify": cmd_verify, "table": cmd_table}


def main(argv=None) -> int:
    try:
        cfg = resolve(argv)
        code, doc = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"hyprad: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QuadratureError as exc:
        print(f"hyprad: quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUAD
    text = render(doc, cfg.fmt)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
