"""Command-line harness.

Subcommands: trace-check, xi, doi-check, mult-norm, ol-growth, path-check,
nu-density, translate. Options come from a flat key=value config file plus
command-line overrides; identical config and seed produce byte-identical
output regardless of --threads. Exit codes: 0 success, 1 tolerance or
feasibility failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import campaigns, funcat
from .funcat import loewner_matrix
from .linalg import load_matrix
from .multiplier import geometric_grid, uniform_grid


class ConfigError(Exception):
    pass


def parse_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, val = line.split("=", 1)
                out[key.strip()] = val.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return out


def resolve_function(spec: str, domain: str | None = None) -> funcat.ScalarFunction:
    spec = spec.strip()
    if spec.startswith("poly:"):
        try:
            coeffs = json.loads(spec[len("poly:"):])
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad polynomial spec {spec!r}: {exc}") from exc
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(f"bad polynomial spec {spec!r}: need a coefficient list")
        f = funcat.polynomial(coeffs)
    else:
        try:
            f = funcat.get_function(spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if domain:
        try:
            lo, hi = (float(v) for v in domain.split(","))
            f = funcat.restrict(f, lo, hi)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad domain {domain!r}: expected 'lo,hi'") from exc
    return f


class Settings:
    """Merged view of defaults, config file and CLI overrides."""

    def __init__(self, args: argparse.Namespace, defaults: dict):
        cfg = parse_config_file(args.config) if args.config else {}
        self._values: dict = dict(defaults)
        for key, raw in cfg.items():
            if key not in defaults:
                raise ConfigError(f"unknown config key {key!r}")
            self._values[key] = self._coerce(key, raw, defaults[key])
        for key in defaults:
            flag = key.replace("-", "_")
            if getattr(args, flag, None) is not None:
                self._values[key] = getattr(args, flag)

    @staticmethod
    def _coerce(key: str, raw: str, default):
        kind = type(default) if default is not None else str
        try:
            if kind is bool:
                return raw.lower() in ("1", "true", "yes")
            if kind is int:
                return int(raw)
            if kind is float:
                return float(raw)
            return raw
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc

    def __getitem__(self, key: str):
        return self._values[key]


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--threads", type=int)
    p.add_argument("--f", dest="f", help="catalog function name or poly:[c0,c1,...]")
    p.add_argument("--domain", help="restrict the function domain: 'lo,hi'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specshift")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("trace-check", "xi", "doi-check", "mult-norm", "ol-growth",
                 "path-check", "nu-density", "translate"):
        p = sub.add_parser(name)
        _add_shared(p)
        if name == "trace-check":
            p.add_argument("--nodes", type=int)
        elif name == "xi":
            p.add_argument("--matrix-a", help="JSON matrix file for the unperturbed operator")
            p.add_argument("--matrix-b", help="JSON matrix file for the perturbed operator")
        elif name == "mult-norm":
            p.add_argument("--matrix", help="JSON matrix file holding the kernel")
            p.add_argument("--grid", choices=("uniform", "geometric"))
        elif name == "ol-growth":
            p.add_argument("--kmax", type=int)
        elif name == "path-check":
            p.add_argument("--depth", type=int)
            p.add_argument("--bins", type=int)
        elif name == "nu-density":
            p.add_argument("--depth", type=int)
            p.add_argument("--bins", type=int)
        elif name == "translate":
            p.add_argument("--t-min", type=float)
            p.add_argument("--t-max", type=float)
            p.add_argument("--t-count", type=int)
    return ap


_DEFAULTS = {
    "trace-check": {"f": "x3", "n": 8, "trials": 50, "seed": 5, "nodes": 32,
                    "tol": 1e-8, "threads": 1, "domain": None, "out": None},
    "xi": {"n": 6, "seed": 1, "matrix-a": None, "matrix-b": None, "out": None},
    "doi-check": {"f": "x3", "n": 8, "trials": 50, "seed": 7, "tol": 1e-8,
                  "threads": 1, "domain": None, "out": None},
    "mult-norm": {"f": None, "n": 8, "tol": 1e-4, "seed": 7, "matrix": None,
                  "grid": None, "domain": None, "out": None},
    "ol-growth": {"f": "abs", "kmax": 10, "tol": 1e-4, "seed": 7, "domain": None,
                  "out": None},
    "path-check": {"f": "sin", "n": 6, "seed": 11, "depth": 10, "bins": 128,
                   "tol": 1e-5, "domain": None, "out": None},
    "nu-density": {"n": 6, "seed": 19, "depth": 10, "bins": 256, "out": None},
    "translate": {"f": "x2", "n": 6, "seed": 3, "t-min": -0.1, "t-max": 0.1,
                  "t-count": 21, "domain": None, "out": None},
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cmd = args.command
    try:
        st = Settings(args, _DEFAULTS[cmd])
        if cmd == "trace-check":
            f = resolve_function(st["f"], st["domain"])
            code, text = campaigns.run_trace_check(
                f, st["n"], st["trials"], st["seed"], st["nodes"], st["tol"], st["threads"])
        elif cmd == "xi":
            eigs_a = eigs_b = None
            if st["matrix-a"] or st["matrix-b"]:
                if not (st["matrix-a"] and st["matrix-b"]):
                    raise ConfigError("xi needs both --matrix-a and --matrix-b (or neither)")
                from .linalg import as_hermitian, eigh
                eigs_a = eigh(as_hermitian(load_matrix(st["matrix-a"]))).eigenvalues
                eigs_b = eigh(as_hermitian(load_matrix(st["matrix-b"]))).eigenvalues
            code, text = campaigns.run_xi(st["n"], st["seed"], eigs_a, eigs_b)
        elif cmd == "doi-check":
            f = resolve_function(st["f"], st["domain"])
            code, text = campaigns.run_doi_check(
                f, st["n"], st["trials"], st["seed"], st["tol"], st["threads"])
        elif cmd == "mult-norm":
            if st["matrix"]:
                kern = np.real_if_close(load_matrix(st["matrix"]))
            elif st["f"]:
                f = resolve_function(st["f"], st["domain"])
                grid_kind = st["grid"] or ("geometric" if f.nondifferentiable else "uniform")
                grid = geometric_grid(st["n"]) if grid_kind == "geometric" else uniform_grid(f, st["n"])
                kern = loewner_matrix(f, grid, grid)
            else:
                raise ConfigError("mult-norm needs --matrix or --f")
            code, text = campaigns.run_mult_norm(kern, st["tol"], st["seed"])
        elif cmd == "ol-growth":
            f = resolve_function(st["f"], st["domain"])
            code, text = campaigns.run_ol_growth(f, st["kmax"], st["tol"], st["seed"])
        elif cmd == "path-check":
            f = resolve_function(st["f"], st["domain"])
            code, text = campaigns.run_path_check(
                f, st["n"], st["seed"], st["depth"], st["tol"], st["bins"])
        elif cmd == "nu-density":
            code, text = campaigns.run_nu_density(st["n"], st["seed"], st["depth"], st["bins"])
        elif cmd == "translate":
            f = resolve_function(st["f"], st["domain"])
            code, text = campaigns.run_translate(
                f, st["n"], st["seed"], st["t-min"], st["t-max"], st["t-count"])
        else:  # pragma: no cover - argparse rejects unknown commands
            raise ConfigError(f"unknown command {cmd!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(text, st["out"])
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
