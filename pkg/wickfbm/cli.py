"""Command-line interface.

Every subcommand reads a configuration (defaults, then an optional
``key=value`` file, then flags), runs one task, and writes rows as CSV or JSON.
"""

import argparse
import csv
import json
import logging
import math
import sys

from wickfbm import __version__, hermite, kernel, montecarlo, schemes, walsh
from wickfbm.backend import containers
from wickfbm.backend.typing import Optional

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CHECK = 2
EXIT_QUADRATURE = 3
EXIT_CAPACITY = 4


class ConfigError(ValueError):
    """Raised for unknown keys and malformed or out-of-range values."""


class CliConfig(containers.NamedTuple):
    """Resolved command-line configuration."""

    hurst: float = 0.75
    n: int = 64
    n_list: tuple = (16, 32, 64)
    scheme: str = "geometric"
    mu: float = 0.0
    sigma: float = 1.0
    s0: float = 1.0
    a1: float = 0.0
    a2: float = 1.0
    b1: float = -1.0
    b2: float = 0.0
    x0: float = 0.0
    y0: float = 1.0
    paths: int = 10_000
    seed: int = 0
    times: tuple = (1.0,)
    tol: float = 1e-9
    out: Optional[str] = None
    format: str = "csv"
    cache_dir: Optional[str] = None
    chunk_size: int = 4096


def _int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _optional_str(text):
    return text or None


_PARSERS = {
    "hurst": float,
    "n": int,
    "n_list": _int_list,
    "scheme": str,
    "mu": float,
    "sigma": float,
    "s0": float,
    "a1": float,
    "a2": float,
    "b1": float,
    "b2": float,
    "x0": float,
    "y0": float,
    "paths": int,
    "seed": int,
    "times": _float_list,
    "tol": float,
    "out": _optional_str,
    "format": str,
    "cache_dir": _optional_str,
    "chunk_size": int,
}


def parse_value(key: str, text: str, /):
    """Convert the text of one configuration entry."""
    if key not in _PARSERS:
        msg = f"Unknown configuration key '{key}'."
        raise ConfigError(msg)
    try:
        return _PARSERS[key](text.strip())
    except ValueError as err:
        msg = f"Malformed value for '{key}': {text!r}."
        raise ConfigError(msg) from err


def read_config_file(path: str, /) -> dict:
    """Read ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    values = {}
    try:
        with open(path, encoding="utf-8") as stream:
            lines = stream.read().splitlines()
    except OSError as err:
        msg = f"Cannot read the configuration file '{path}'."
        raise ConfigError(msg) from err

    for number, line in enumerate(lines, start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            msg = f"{path}:{number}: expected 'key=value'; received {line!r}."
            raise ConfigError(msg)
        key, text = content.split("=", 1)
        values[key.strip()] = parse_value(key.strip(), text)
    return values


def resolve_config(file_values: dict, flag_values: dict, /) -> CliConfig:
    """Merge defaults, file entries and flags (in increasing precedence)."""
    merged = {**file_values, **flag_values}
    return validate_config(CliConfig()._replace(**merged))


def validate_config(cfg: CliConfig, /) -> CliConfig:
    """Check every numeric range and every choice."""
    problems = []
    if not 0.5 < cfg.hurst < 1:
        problems.append(f"hurst={cfg.hurst} must satisfy 1/2 < H < 1")
    if cfg.n < 1:
        problems.append(f"n={cfg.n} must be positive")
    n_list = cfg.n_list
    if not n_list or n_list[0] < 1 or any(a >= b for a, b in zip(n_list, n_list[1:])):
        problems.append(f"n_list={n_list} must be positive and strictly increasing")
    if cfg.scheme not in schemes.VARIANTS:
        problems.append(f"scheme='{cfg.scheme}' must be one of {schemes.VARIANTS}")
    if cfg.scheme == "drift" and not cfg.sigma > 0:
        problems.append(f"sigma={cfg.sigma} must be positive")
    if cfg.scheme == "drift" and any(cfg.mu == -m for m in (cfg.n, *n_list)):
        problems.append(f"mu={cfg.mu} must differ from -n")
    if cfg.paths < 1:
        problems.append(f"paths={cfg.paths} must be positive")
    if any(not 0 <= t <= 1 for t in cfg.times):
        problems.append(f"times={cfg.times} must lie in [0, 1]")
    if not cfg.tol > 0:
        problems.append(f"tol={cfg.tol} must be positive")
    if cfg.format not in ("csv", "json"):
        problems.append(f"format='{cfg.format}' must be 'csv' or 'json'")
    if cfg.chunk_size < 1:
        problems.append(f"chunk_size={cfg.chunk_size} must be positive")
    if problems:
        msg = "Invalid configuration: " + "; ".join(problems) + "."
        raise ConfigError(msg)
    return cfg


def scheme_spec(cfg: CliConfig, /) -> schemes.SchemeSpec:
    """Build the scheme named in the configuration."""
    keys = ("mu", "sigma", "s0", "a1", "a2", "b1", "b2", "x0", "y0")
    params = {k: getattr(cfg, k) for k in keys}
    return schemes.scheme_from_name(cfg.scheme, **params)


def _build_grid(cfg, n):
    return kernel.build_grid(cfg.hurst, n, cfg.tol, cache_dir=cfg.cache_dir)


def cmd_grid(cfg: CliConfig, /) -> int:
    """Build (or load) the grid and report its quadrature profile."""
    grid = _build_grid(cfg, cfg.n)
    profile = grid.quad_profile
    row = {
        "hurst": grid.hurst,
        "n": grid.n,
        "tol": grid.tol,
        "outer_nodes": profile["outer_nodes"],
        "inner_nodes": profile["inner_nodes"],
        "max_relative_change": profile["max_relative_change"],
    }
    if cfg.cache_dir is not None:
        row["cache_file"] = kernel.grid_filename(grid.hurst, grid.n, grid.tol)
    write_rows([row], cfg)
    return EXIT_OK


def cmd_selftest(cfg: CliConfig, /) -> int:
    """Run the invariant suites at n <= 12 and fail if any of them fails."""
    results = montecarlo.selftest(
        cfg.hurst, seed=cfg.seed, tol=cfg.tol, cache_dir=cfg.cache_dir
    )
    rows = [r._asdict() for r in results]
    write_rows(rows, cfg)
    failed = [r.name for r in results if not r.passed]
    if failed:
        msg = f"Failed checks: {sorted(set(failed))}."
        raise montecarlo.CheckFailure(msg)
    return EXIT_OK


def cmd_simulate(cfg: CliConfig, /) -> int:
    """Write one row per (time, path, component) with the scheme value."""
    grid = _build_grid(cfg, cfg.n)
    spec = scheme_spec(cfg)
    names = schemes.components(spec)
    rows = []
    for t in cfg.times:
        samples = montecarlo.scheme_samples(
            grid, spec, t, cfg.paths, cfg.seed, chunk_size=cfg.chunk_size
        )
        for name, values in zip(names, samples):
            for path, value in enumerate(values.tolist()):
                row = {"n": cfg.n, "t": t, "path": path, "component": name}
                rows.append({**row, "value": value})
    write_rows(rows, cfg)
    return EXIT_OK


def cmd_converge(cfg: CliConfig, /) -> int:
    """Run the weak-convergence study over ``n_list``."""
    study = montecarlo.StudyConfig(
        hurst=cfg.hurst,
        n_list=cfg.n_list,
        spec=scheme_spec(cfg),
        times=cfg.times,
        paths=cfg.paths,
        seed=cfg.seed,
        tol=cfg.tol,
        cache_dir=cfg.cache_dir,
        chunk_size=cfg.chunk_size,
    )
    write_rows(montecarlo.run_study(study), cfg)
    return EXIT_OK


def cmd_rate(cfg: CliConfig, /) -> int:
    """Compute exact substitution errors over ``n_list`` and their log-log slope."""
    n_max = max(cfg.n_list)
    if n_max > walsh.POINTWISE_CAP:
        msg = f"The rate study is exact and supports n <= {walsh.POINTWISE_CAP}."
        raise walsh.CapacityError(msg)
    times = [t for t in cfg.times if t > 0] or [1.0]
    rows = []
    for t in times:
        study = montecarlo.run_rate_study(
            cfg.hurst,
            cfg.n_list,
            scheme_spec(cfg),
            t,
            tol=cfg.tol,
            cache_dir=cfg.cache_dir,
        )
        rows.extend(study.rows)
    write_rows(rows, cfg)
    return EXIT_OK


COMMANDS = {
    "grid": cmd_grid,
    "selftest": cmd_selftest,
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "rate": cmd_rate,
}


def _format_value(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return value


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_rows(rows: list, cfg: CliConfig, /) -> None:
    """Write rows (with version columns) to ``cfg.out`` or stdout."""
    stamped = [
        {**row, "wickfbm_version": __version__, "schema_version": SCHEMA_VERSION}
        for row in rows
    ]
    if cfg.out is None:
        _write(stamped, cfg.format, sys.stdout)
        return
    with open(cfg.out, "w", encoding="utf-8", newline="") as stream:
        _write(stamped, cfg.format, stream)
    logger.info("Wrote %d rows to %s", len(stamped), cfg.out)


def _write(rows, fmt, stream):
    if fmt == "json":
        data = [{k: _json_value(v) for k, v in row.items()} for row in rows]
        json.dump(data, stream, indent=1)
        stream.write("\n")
        return
    if not rows:
        return
    writer = csv.DictWriter(stream, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _format_value(v) for k, v in row.items()})


class _ArgumentParser(argparse.ArgumentParser):
    # Usage errors are validation errors, not failed checks
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    """Construct the argument parser with one subparser per command."""
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", help="File with key=value lines.")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="Repeat for debug output."
    )
    for key in _PARSERS:
        flag = "--" + key.replace("_", "-")
        common.add_argument(flag, dest=key, default=None, metavar="VALUE")

    description = "Discrete Wick calculus for fractional Brownian motion."
    parser = _ArgumentParser(prog="wickfbm", description=description)
    version = f"%(prog)s {__version__}"
    parser.add_argument("--version", action="version", version=version)
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=command.__doc__)
    return parser


def configure_logging(verbosity: int, /) -> None:
    """Send log records to stderr so that stdout only carries data."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def exit_code(error: Exception, /) -> int:
    """Map an exception to the documented exit code."""
    if isinstance(error, montecarlo.CheckFailure):
        return EXIT_CHECK
    if isinstance(error, (kernel.QuadratureError, kernel.GridInvariantError)):
        return EXIT_QUADRATURE
    if isinstance(error, (walsh.CapacityError, hermite.TruncationError)):
        return EXIT_CAPACITY
    if isinstance(error, ValueError):
        return EXIT_INVALID
    raise error


def main(argv=None) -> int:
    """Run the command-line interface and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        file_values = read_config_file(args.config) if args.config else {}
        flag_values = {
            key: parse_value(key, getattr(args, key))
            for key in _PARSERS
            if getattr(args, key) is not None
        }
        cfg = resolve_config(file_values, flag_values)
        logger.info("Running '%s'", args.command)
        return COMMANDS[args.command](cfg)
    except Exception as error:
        code = exit_code(error)
        logger.error("%s: %s", type(error).__name__, error)
        return code


if __name__ == "__main__":
    sys.exit(main())
