"""Command-line frontend.

Subcommands: ``partitions`` (build the partition cache), ``xi`` (dump
Xi(zeta, n) as CSV), ``eval`` (one outcome probability), ``sweep`` (full
mu-grid CSV), ``validate`` (parse and echo the configuration).  Defaults
reproduce the reference operating point: eta_det 0.1 on all modes,
transmission 0.1 on the b modes, dark counts 5e-5, vsq 0.25, Renyi order
1.1, zeta curves {1, 10, 100, 1000} plus the 0 and infinity envelopes.

Configuration is a flat INI file (sections mirror the library modules);
command-line flags override file values.  The environment variable
``QKD_PART_CACHE`` may point to a partition cache file to reuse.

Exit codes: 0 success, 2 configuration/validation error, 3 I/O error.
Errors print a single line starting with ``QKD-CONFIG-ERROR`` or
``QKD-IO-ERROR``.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .detection import (DetectorParams, OutcomeCode, TapParams, completions,
                        f_value, kernel_args, t_value, t_value_km)
from .errors import CacheFormatError, ConfigurationError
from .gfunctions import Custom, EnergyDistribution, FixedN, Poisson
from .kernel import DEFAULT_INF_THRESHOLD, ZetaSpec, compute_xi
from .partitions import enumerate_partitions, load_partitions, save_partitions
from .sweep import ModelParams, MuGrid, required_n_cap, run_sweep, write_csv

PART_CACHE_ENV = "QKD_PART_CACHE"

CONFIG_ERROR = "QKD-CONFIG-ERROR"
IO_ERROR = "QKD-IO-ERROR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


@dataclass(frozen=True)
class Config:
    """Flat configuration; defaults are the reference operating point."""

    eta_det: tuple[float, float, float, float] = (0.1, 0.1, 0.1, 0.1)
    eta_trans: tuple[float, float, float, float] = (1.0, 1.0, 0.1, 0.1)
    p_dark: tuple[float, float, float, float] = (5e-5, 5e-5, 5e-5, 5e-5)
    vsq: float = 0.25
    zetas: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0)
    n_cap: int = 32
    inf_threshold: float = DEFAULT_INF_THRESHOLD
    renyi_order: float = 1.1
    kmax: int | None = None
    basis_match_factor: bool = False
    fine_incr: float = 1e-4
    mu_fine_max: float = 0.007
    coarse_incr: float = 2e-3
    mu_max: float = 0.04
    mu_begin: float = 0.0
    energy_kind: str = "poisson"
    energy_mu: float = 0.0
    energy_photons: int = 0
    energy_weights: tuple[float, ...] = (1.0,)
    out: str = "sweep.csv"


# section -> {key: config field}
_SCHEMA = {
    "detector": {"eta_det": "eta_det", "eta_trans": "eta_trans", "p_dark": "p_dark"},
    "tap": {"vsq": "vsq"},
    "entanglement": {"zetas": "zetas", "n_cap": "n_cap", "inf_threshold": "inf_threshold"},
    "entropy": {"renyi_order": "renyi_order", "kmax": "kmax"},
    "sift": {"basis_match_factor": "basis_match_factor"},
    "grid": {"fine_incr": "fine_incr", "mu_fine_max": "mu_fine_max",
             "coarse_incr": "coarse_incr", "mu_max": "mu_max", "mu_begin": "mu_begin"},
    "energy": {"kind": "energy_kind", "mu": "energy_mu",
               "photons": "energy_photons", "weights": "energy_weights"},
    "output": {"out": "out"},
}


def _parse_floats(text: str, field_name: str, count: int | None = None) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigurationError(f"{field_name}: {exc}") from exc
    if count is not None and len(values) != count:
        raise ConfigurationError(f"{field_name}: expected {count} values, got {len(values)}")
    return values


def _parse_bool(text: str, field_name: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"{field_name}: expected a boolean, got {text!r}")


def _coerce(field_name: str, text: str) -> object:
    text = text.strip()
    if field_name in ("eta_det", "eta_trans", "p_dark"):
        return _parse_floats(text, field_name, count=4)
    if field_name in ("zetas", "energy_weights"):
        return _parse_floats(text, field_name)
    if field_name in ("n_cap", "energy_photons"):
        return int(text)
    if field_name == "kmax":
        return None if text.lower() in ("", "none") else int(text)
    if field_name == "basis_match_factor":
        return _parse_bool(text, field_name)
    if field_name in ("energy_kind", "out"):
        return text
    return float(text)


def load_config_file(path: str | Path) -> Config:
    """Parse an INI config file, rejecting unknown sections and keys."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except configparser.Error as exc:
        raise ConfigurationError(f"config: {exc}") from exc
    values: dict[str, object] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"config: unknown section [{section}]")
        for key, text in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigurationError(f"config: unknown key {section}.{key}")
            field_name = _SCHEMA[section][key]
            try:
                values[field_name] = _coerce(field_name, text)
            except (ValueError, ConfigurationError) as exc:
                raise ConfigurationError(f"{section}.{key}: {exc}") from exc
    return Config(**values)


def dump_config(cfg: Config) -> str:
    """Canonical INI rendering; re-parsing reproduces the config exactly."""
    def fmt(value: object) -> str:
        if isinstance(value, tuple):
            return ",".join(repr(float(v)) for v in value)
        if isinstance(value, bool):
            return "true" if value else "false"
        if value is None:
            return "none"
        if isinstance(value, float):
            return repr(value)
        return str(value)

    lines = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        for key, field_name in keys.items():
            lines.append(f"{key} = {fmt(getattr(cfg, field_name))}")
        lines.append("")
    return "\n".join(lines)


def build_detector(cfg: Config) -> DetectorParams:
    try:
        return DetectorParams(eta_det=cfg.eta_det, eta_trans=cfg.eta_trans,
                              p_dark=cfg.p_dark)
    except ValueError as exc:
        raise ConfigurationError(f"detector: {exc}") from exc


def build_tap(cfg: Config) -> TapParams:
    try:
        return TapParams(vsq=cfg.vsq)
    except ValueError as exc:
        raise ConfigurationError(f"tap.vsq: {exc}") from exc


def build_grid(cfg: Config) -> MuGrid:
    try:
        return MuGrid(fine_incr=cfg.fine_incr, mu_fine_max=cfg.mu_fine_max,
                      coarse_incr=cfg.coarse_incr, mu_max=cfg.mu_max,
                      mu_begin=cfg.mu_begin)
    except ValueError as exc:
        raise ConfigurationError(f"grid: {exc}") from exc


def build_model(cfg: Config) -> ModelParams:
    """Model for a sweep; the 0 and infinity envelopes are always included,
    so those entries in the zeta list are dropped rather than duplicated."""
    finite = tuple(z for z in cfg.zetas if 0.0 < abs(z) < cfg.inf_threshold)
    try:
        return ModelParams(det=build_detector(cfg), tap=build_tap(cfg),
                           zetas=finite, renyi_order=cfg.renyi_order,
                           n_cap=cfg.n_cap, inf_threshold=cfg.inf_threshold,
                           basis_match_factor=cfg.basis_match_factor,
                           kmax=cfg.kmax)
    except ConfigurationError:
        raise
    except ValueError as exc:
        raise ConfigurationError(f"model: {exc}") from exc


def validate_config(cfg: Config) -> tuple[ModelParams, MuGrid]:
    """Build every model object, surfacing invariant violations by field."""
    params = build_model(cfg)
    grid = build_grid(cfg)
    if cfg.energy_kind not in ("poisson", "fixed", "custom"):
        raise ConfigurationError(
            f"energy.kind: expected poisson/fixed/custom, got {cfg.energy_kind!r}")
    return params, grid


def energy_distribution(cfg: Config) -> EnergyDistribution:
    try:
        if cfg.energy_kind == "poisson":
            return Poisson(cfg.energy_mu)
        if cfg.energy_kind == "fixed":
            return FixedN(cfg.energy_photons)
        return Custom(cfg.energy_weights)
    except ValueError as exc:
        raise ConfigurationError(f"energy: {exc}") from exc


def _load_parts(n_cap: int):
    """Partition table from QKD_PART_CACHE when set, else a fresh enumeration."""
    cache = os.environ.get(PART_CACHE_ENV)
    if cache:
        try:
            parts = load_partitions(cache)
        except OSError as exc:
            raise OSError(f"partition cache {cache}: {exc}") from exc
        except CacheFormatError as exc:
            raise ConfigurationError(f"partition cache {cache}: {exc}") from exc
        if parts.n_cap < n_cap:
            raise ConfigurationError(
                f"partition cache {cache} covers n <= {parts.n_cap}, need {n_cap}")
        return parts
    return enumerate_partitions(n_cap)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="INI configuration file")
    parser.add_argument("--eta-det", metavar="A1,A2,B1,B2")
    parser.add_argument("--eta-trans", metavar="A1,A2,B1,B2")
    parser.add_argument("--p-dark", metavar="A1,A2,B1,B2")
    parser.add_argument("--vsq", type=float, metavar="F")
    parser.add_argument("--zeta", metavar="LIST", help="comma-separated zeta values")
    parser.add_argument("--renyi", type=float, metavar="R")
    parser.add_argument("--kmax", type=int, metavar="N")
    parser.add_argument("--n-cap", type=int, metavar="N")
    parser.add_argument("--mu-grid", metavar="FINE,FMAX,COARSE,MAX")
    parser.add_argument("--basis-match-factor", action="store_true", default=None)
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--verbose", action="store_true")


def _apply_overrides(cfg: Config, args: argparse.Namespace) -> Config:
    updates: dict[str, object] = {}
    if args.eta_det is not None:
        updates["eta_det"] = _parse_floats(args.eta_det, "--eta-det", count=4)
    if args.eta_trans is not None:
        updates["eta_trans"] = _parse_floats(args.eta_trans, "--eta-trans", count=4)
    if args.p_dark is not None:
        updates["p_dark"] = _parse_floats(args.p_dark, "--p-dark", count=4)
    if args.vsq is not None:
        updates["vsq"] = args.vsq
    if args.zeta is not None:
        updates["zetas"] = tuple(
            math.inf if tok.strip().lower() in ("inf", "infinity") else float(tok)
            for tok in args.zeta.split(","))
    if args.renyi is not None:
        updates["renyi_order"] = args.renyi
    if args.kmax is not None:
        updates["kmax"] = args.kmax
    if args.n_cap is not None:
        updates["n_cap"] = args.n_cap
    if args.mu_grid is not None:
        fine, fmax, coarse, mmax = _parse_floats(args.mu_grid, "--mu-grid", count=4)
        updates.update(fine_incr=fine, mu_fine_max=fmax,
                       coarse_incr=coarse, mu_max=mmax)
    if args.basis_match_factor is not None:
        updates["basis_match_factor"] = args.basis_match_factor
    if args.out is not None:
        updates["out"] = args.out
    if getattr(args, "mu", None) is not None:
        updates.update(energy_kind="poisson", energy_mu=args.mu)
    if getattr(args, "photons", None) is not None:
        updates.update(energy_kind="fixed", energy_photons=args.photons)
    if getattr(args, "weights", None) is not None:
        updates.update(energy_kind="custom",
                       energy_weights=_parse_floats(args.weights, "--weights"))
    return replace(cfg, **updates)


def _resolve_config(args: argparse.Namespace) -> Config:
    cfg = Config()
    if args.config is not None:
        cfg = load_config_file(args.config)
    return _apply_overrides(cfg, args)


def _cmd_partitions(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    n_cap = cfg.n_cap
    if n_cap < 1:
        raise ConfigurationError(f"n_cap: must be >= 1, got {n_cap}")
    if args.out is None:
        raise ConfigurationError("out: --out PATH is required for partitions")
    table = enumerate_partitions(n_cap)
    save_partitions(table, args.out)
    total = sum(len(table.per_n[n]) for n in range(1, n_cap + 1))
    print(f"wrote {total} partitions for n <= {n_cap} to {args.out}")
    return EXIT_OK


def _zeta_specs_from_tokens(cfg: Config) -> list[ZetaSpec]:
    return [ZetaSpec(z, cfg.inf_threshold) for z in cfg.zetas]


def _cmd_xi(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if args.out is None:
        raise ConfigurationError("out: --out PATH is required for xi")
    specs = _zeta_specs_from_tokens(cfg)
    parts = _load_parts(cfg.n_cap)
    table = compute_xi(specs, cfg.n_cap, parts)
    lines = ["zeta,n,xi"]
    for i, spec in enumerate(specs):
        for n in range(cfg.n_cap + 1):
            lines.append(f"{spec.label},{n},{float(table.xi[i, n])!r}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote Xi table for {len(specs)} zeta values to {args.out}")
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    det = build_detector(cfg)
    tap = build_tap(cfg)
    dist = energy_distribution(cfg)
    try:
        outcome = OutcomeCode.from_string(args.outcome)
    except ValueError as exc:
        raise ConfigurationError(f"outcome: {exc}") from exc
    if len(cfg.zetas) != 1:
        raise ConfigurationError(
            f"zeta: eval needs exactly one zeta value, got {len(cfg.zetas)}")
    spec = ZetaSpec(cfg.zetas[0], cfg.inf_threshold)
    parts = _load_parts(cfg.n_cap)
    xi = compute_xi([spec], cfg.n_cap, parts)

    km = None
    if (args.k is None) != (args.m is None):
        raise ConfigurationError("k/m: give both --k and --m or neither")
    if args.k is not None:
        km = (args.k, args.m)

    if args.verbose:
        for comp in completions(outcome):
            ka = kernel_args(comp, det, tap)
            term = f_value(dist, spec, comp, det, tap, xi, km=km)
            print(f"F({comp}): w={ka.w!r} x={ka.x!r} y={ka.y!r} z={ka.z!r} "
                  f"value={term!r}")
    if km is None:
        value = t_value(dist, spec, outcome, det, tap, xi)
    else:
        value = t_value_km(dist, spec, outcome, km[0], km[1], det, tap, xi)
    print(repr(value))
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    params, grid = validate_config(cfg)
    parts = _load_parts(max(cfg.n_cap, required_n_cap(grid.mu_max)))
    result = run_sweep(params, grid, parts=parts)
    write_csv(result, cfg.out)
    print(f"wrote {len(result.rows)} rows to {cfg.out}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    validate_config(cfg)
    energy_distribution(cfg)
    sys.stdout.write(dump_config(cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entqkd",
        description="Detection statistics and eavesdropper entropy for a "
                    "polarization-entangled QKD link.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_part = sub.add_parser("partitions", help="build and save a partition cache")
    _add_common_flags(p_part)

    p_xi = sub.add_parser("xi", help="dump Xi(zeta, n) as CSV")
    _add_common_flags(p_xi)

    p_eval = sub.add_parser("eval", help="evaluate one outcome probability")
    _add_common_flags(p_eval)
    p_eval.add_argument("--outcome", required=True, metavar="BITS",
                        help="4-bit outcome code, 1 = no detect (e.g. 1001)")
    p_eval.add_argument("--mu", type=float, metavar="F", help="Poisson mean")
    p_eval.add_argument("--photons", type=int, metavar="N", help="fixed photon number")
    p_eval.add_argument("--weights", metavar="W0,W1,...", help="custom weights")
    p_eval.add_argument("--k", type=int, metavar="K")
    p_eval.add_argument("--m", type=int, metavar="M")

    p_sweep = sub.add_parser("sweep", help="run the mu sweep and write CSV")
    _add_common_flags(p_sweep)

    p_val = sub.add_parser("validate", help="validate and echo the configuration")
    _add_common_flags(p_val)

    return parser


_HANDLERS = {
    "partitions": _cmd_partitions,
    "xi": _cmd_xi,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ConfigurationError, ValueError) as exc:
        print(f"{CONFIG_ERROR}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"{IO_ERROR}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
