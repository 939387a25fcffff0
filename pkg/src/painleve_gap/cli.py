"""Command line interface of painleve-gap."""
import argparse
import json
import logging
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from packaging.specifiers import InvalidSpecifier, SpecifierSet

from painleve_gap import __version__
from painleve_gap.acceptance import SelftestBudget, hard_failures, run_selftest
from painleve_gap.app_data import AppData
from painleve_gap.consts import (
    APP_NAME,
    CSV_FLOAT_FORMAT,
    CSV_HEADER_PREFIX,
    DEFAULT_L,
    DEFAULT_L_PLUS,
    DEFAULT_M,
    DEFAULT_MC_N,
    DEFAULT_MC_SAMPLES,
    DEFAULT_N_COLLOC,
    DEFAULT_SEED,
    ENCODING,
)
from painleve_gap.coupled_p2 import (
    backlund_residuals,
    hamiltonian_shift_residual,
    solve_coupled,
    sum_identity_residual,
)
from painleve_gap.exceptions import ConfigError, NumericError, PainleveGapException
from painleve_gap.fredholm import LogDetResult
from painleve_gap.gapstats import (
    asym_p2,
    asym_p2_reduction_residual,
    asym_p34,
    diffid_residual,
    factorization_residual,
    logdet_airy_nystrom,
    logdet_p2_nystrom,
    logdet_p2_ode,
    logdet_p34_hamiltonian,
    logdet_p34_nystrom,
    logdet_p34_ode,
    logdet_tw,
    total_integral_residual,
)
from painleve_gap.logging import create_logger, verbosity_level
from painleve_gap.painleve import (
    check_p34_p2_relation,
    solve_hastings_mcleod,
    solve_p34_u,
    tw_cdf,
)
from painleve_gap.rmt_mc import edge_cdf_vs_tw
from painleve_gap.util import parse_grid, thread_count, value_or_none

logger = logging.getLogger(__name__)

ACTIONS = {
    "tw": ("table",),
    "p34": ("gap",),
    "p2": ("gap",),
    "asym": ("check",),
    "identity": ("check",),
    "mc": ("gue",),
    "dump": ("hm", "u", "coupled"),
    "selftest": (),
}
METHODS = ("nystrom", "ode", "both")
IDENTITIES = (
    "total-integral",
    "factorization",
    "backlund",
    "hamiltonian-shift",
    "sum",
    "diffid",
    "reduction",
    "p34p2-relation",
)
GAP_COLUMNS = [
    "s",
    "t",
    "alpha",
    "omega_re",
    "omega_im",
    "logdet_nystrom",
    "logdet_ode",
    "logdet_asym",
    "residual_routes",
    "residual_asym",
    "m",
    "runtime_ms",
]
EXIT_NUMERIC_ERROR = 1
EXIT_CONFIG_ERROR = 2

Result = Tuple[pd.DataFrame, Dict[str, Any], int]


@dataclass(frozen=True)
class RunConfig:  # pylint: disable=too-many-instance-attributes
    """Everything a run needs, after merging defaults, files and flags."""

    command: str = "selftest"
    action: str = ""
    alpha: float = 0.0
    omega: complex = 1.0
    t: float = 0.0
    s_grid: Tuple[float, ...] = (-2.0, -1.0, 0.0, 1.0)
    t_grid: Tuple[float, ...] = (-1.0, 1.0, 3.0)
    x_grid: Tuple[float, ...] = tuple(np.linspace(-3.0, 6.0, 91))
    method: str = "both"
    hamiltonian: bool = False
    kernel: str = "p34"
    which: str = "total-integral"
    m: int = DEFAULT_M
    L: float = DEFAULT_L
    L_plus: float = DEFAULT_L_PLUS
    n_colloc: int = DEFAULT_N_COLLOC
    h: float = 0.02
    n: int = DEFAULT_MC_N
    samples: int = DEFAULT_MC_SAMPLES
    seed: int = DEFAULT_SEED
    threads: Optional[int] = None
    output: Optional[Path] = None
    format: str = "csv"

    def validate(self):
        """
        Check budgets and choices.

        :raises ConfigError: on non-positive budgets or unknown choices
        """
        for name in ("m", "L", "L_plus", "n_colloc", "h", "n", "samples"):
            if getattr(self, name) <= 0:
                raise ConfigError(
                    f"{name} should be positive, got {getattr(self, name)}", key=name
                )
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads should be positive, got {self.threads}")
        if self.method not in METHODS:
            raise ConfigError(f'Unknown method "{self.method}"', key="method")
        if self.which not in IDENTITIES:
            raise ConfigError(f'Unknown identity "{self.which}"', key="which")
        if self.kernel not in ("p34", "p2"):
            raise ConfigError(f'Unknown kernel "{self.kernel}"', key="kernel")
        if self.format not in ("csv", "json"):
            raise ConfigError(f'Unknown format "{self.format}"', key="format")
        if self.hamiltonian and self.method == "nystrom":
            logger.warning("--hamiltonian has no effect with --method nystrom")

    def budget_dict(self) -> Dict[str, Any]:
        """Numeric budgets written with JSON results."""
        return {
            "m": self.m,
            "L": self.L,
            "L_plus": self.L_plus,
            "n_colloc": self.n_colloc,
        }

    def params_dict(self) -> Dict[str, Any]:
        """Kernel parameters written with JSON results."""
        return {
            "alpha": self.alpha,
            "omega": self.omega.real,
            "t": self.t,
            "s_grid": list(self.s_grid),
        }


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _parse_optional_int(text: str) -> Optional[int]:
    return None if value_or_none(text) is None else int(text)


CONFIG_PARSERS: Dict[str, Callable[[str], Any]] = {
    "alpha": float,
    "omega": complex,
    "t": float,
    "s_grid": lambda text: tuple(parse_grid(text)),
    "t_grid": lambda text: tuple(parse_grid(text)),
    "x_grid": lambda text: tuple(parse_grid(text)),
    "method": str.strip,
    "hamiltonian": _parse_bool,
    "kernel": str.strip,
    "which": str.strip,
    "m": int,
    "L": float,
    "L_plus": float,
    "n_colloc": int,
    "h": float,
    "n": int,
    "samples": int,
    "seed": int,
    "threads": _parse_optional_int,
    "format": str.strip,
}


def parse_config_text(text: str, source: str) -> Dict[str, Any]:
    """
    Parse ``key = value`` lines, ignoring blank lines and ``#`` comments.

    A ``requires`` key holds a version specifier that the package version
    must satisfy.

    :param text: File content
    :type text: str
    :param source: Name of the file, used in error messages
    :type source: str
    :return: Parsed values by key
    :rtype: Dict[str, Any]
    :raises ConfigError: on malformed lines, unknown keys or bad values
    """
    values: Dict[str, Any] = {}
    for number, key, value in _config_lines(text, source):
        if key == "requires":
            _check_requires(value, source)
            continue
        if key not in CONFIG_PARSERS:
            raise ConfigError(f'{source}:{number}: unknown key "{key}"', key=key)
        try:
            values[key] = CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(
                f'{source}:{number}: bad value "{value}" for {key}', key=key
            ) from exc
    return values


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read and parse a configuration file."""
    try:
        with open(path, mode="r", encoding=ENCODING) as fd:
            text = fd.read()
    except OSError as exc:
        raise ConfigError(f"Cannot read configuration file {path}") from exc
    return parse_config_text(text, str(path))


def build_config(
    args: argparse.Namespace, app_data: Optional[AppData] = None
) -> RunConfig:
    """
    Merge defaults, the per-user file, the ``--config`` file and the flags.

    :param args: Parsed command line
    :type args: argparse.Namespace
    :param app_data: Per-user directories, skipped when None
    :type app_data: Optional[AppData]
    :return: The validated configuration
    :rtype: RunConfig
    :raises ConfigError: on any invalid value
    """
    values: Dict[str, Any] = {}
    if app_data is not None:
        values.update(
            parse_config_text(app_data.load_config_text(), str(app_data.config_path))
        )
    if args.config is not None:
        values.update(load_config_file(Path(args.config)))
    for key, parser in CONFIG_PARSERS.items():
        flag = getattr(args, key, None)
        if flag is None:
            continue
        try:
            values[key] = parser(flag) if isinstance(flag, str) else flag
        except ValueError as exc:
            raise ConfigError(f'Bad value "{flag}" for --{key}', key=key) from exc
    if args.command == "p2" and getattr(args, "hamiltonian", None):
        raise ConfigError(
            "--hamiltonian selects the P34 Hamiltonian route, p2 has none",
            key="hamiltonian",
        )
    values["command"] = args.command
    values["action"] = getattr(args, "action", "") or ""
    if args.output is not None:
        values["output"] = Path(args.output)
    config = replace(RunConfig(), **values)
    config.validate()
    return config


def save_flags(args: argparse.Namespace, app_data: AppData) -> Dict[str, str]:
    """
    Store the parameter flags of a run in the per-user configuration file.

    Keys already in the file are kept unless a flag overrides them.

    :param args: Parsed command line
    :type args: argparse.Namespace
    :param app_data: Per-user directories
    :type app_data: AppData
    :return: Content written, by key
    :rtype: Dict[str, str]
    """
    source = str(app_data.config_path)
    saved = {
        key: value
        for _, key, value in _config_lines(app_data.load_config_text(), source)
    }
    for key in CONFIG_PARSERS:
        flag = getattr(args, key, None)
        if flag is None:
            continue
        saved[key] = ("yes" if flag else "no") if isinstance(flag, bool) else flag
    app_data.save_config(saved)
    logger.info("Saved %d keys to %s", len(saved), source)
    return saved


# Commands


def run(config: RunConfig) -> Result:
    """
    Run a configured command.

    :param config: The configuration
    :type config: RunConfig
    :return: Result table, extra JSON fields and exit status
    :rtype: Tuple[pandas.DataFrame, Dict[str, Any], int]
    """
    runner = COMMANDS[config.command]
    return runner(config)


def run_tw_table(config: RunConfig) -> Result:
    """F_TW over the s-grid by both routes."""

    def row(s: float) -> Dict[str, float]:
        ode = logdet_tw(s).log_value
        nystrom = logdet_airy_nystrom(s, config.m).log_value
        return {
            "s": s,
            "F_tw": tw_cdf(s),
            "logdet_ode": ode,
            "logdet_nystrom": nystrom,
            "residual": abs(ode - nystrom),
        }

    return pd.DataFrame(_sweep(row, config.s_grid, config.threads)), {}, 0


def run_gap(config: RunConfig) -> Result:
    """Log-determinants of the P34 or P2 kernel over the s-grid."""
    kernel = config.command if config.command != "asym" else config.kernel
    with_asym = config.command == "asym"
    method = "nystrom" if with_asym else config.method
    omega = config.omega

    def row(s: float) -> Dict[str, float]:
        start = time.perf_counter()
        nystrom = ode = asym = math.nan
        if method in ("nystrom", "both"):
            nystrom = _nystrom_route(kernel, s, config).log_value
        if method in ("ode", "both"):
            ode = _ode_route(kernel, s, config).log_value
        if with_asym:
            if kernel == "p34":
                asym = asym_p34(s, config.t, config.alpha, omega)
            else:
                asym = asym_p2(s, config.t, config.alpha)
        reference = nystrom if not math.isnan(nystrom) else ode
        return {
            "s": s,
            "t": config.t,
            "alpha": config.alpha,
            "omega_re": omega.real,
            "omega_im": omega.imag,
            "logdet_nystrom": nystrom,
            "logdet_ode": ode,
            "logdet_asym": asym,
            "residual_routes": abs(nystrom - ode),
            "residual_asym": abs(asym - reference),
            "m": config.m,
            "runtime_ms": 1000.0 * (time.perf_counter() - start),
        }

    frame = pd.DataFrame(_sweep(row, config.s_grid, config.threads))
    return frame.reindex(columns=GAP_COLUMNS), {"kernel": kernel}, 0


def run_identity(config: RunConfig) -> Result:
    """Residual reports of the exact identities."""
    which = config.which
    alpha, omega, t = config.alpha, config.omega, config.t
    if which == "total-integral":
        rows = [
            {"t": value, "residual": total_integral_residual(value)}
            for value in config.t_grid
        ]
    elif which == "factorization":
        rows = _sweep(
            lambda s: {
                "s": s,
                "t": t,
                "alpha": alpha,
                "residual": factorization_residual(s, t, alpha, config.m),
            },
            config.s_grid,
            config.threads,
        )
    elif which == "backlund":
        rows = []
        for s in config.s_grid:
            first, second = backlund_residuals(s, alpha, omega, config.x_grid)
            rows.append({"s": s, "alpha": alpha, "r1": first, "r2": second})
    elif which == "hamiltonian-shift":
        rows = [
            {
                "s": s,
                "alpha": alpha,
                "residual": hamiltonian_shift_residual(
                    s, alpha, omega, config.x_grid
                ),
            }
            for s in config.s_grid
        ]
    elif which == "sum":
        rows = [
            {
                "s": s,
                "alpha": alpha,
                "residual": sum_identity_residual(s, alpha, omega, config.x_grid),
            }
            for s in config.s_grid
        ]
    elif which == "diffid":
        rows = [
            {
                "s": s,
                "t": t,
                "alpha": alpha,
                "residual": diffid_residual(s, t, alpha, omega, config.h),
            }
            for s in config.s_grid
        ]
    elif which == "reduction":
        rows = [
            {"s": s, "t": t, "residual": asym_p2_reduction_residual(s, t)}
            for s in config.s_grid
        ]
    else:
        residual = check_p34_p2_relation(alpha, omega, config.x_grid)
        rows = [{"alpha": alpha, "residual": residual}]
    return pd.DataFrame(rows), {"identity": which}, 0


def run_mc(config: RunConfig) -> Result:
    """Empirical CDF of the scaled GUE largest eigenvalue against F_TW."""
    empirical, theory, distance = edge_cdf_vs_tw(
        config.n, config.samples, config.seed, config.s_grid, config.threads
    )
    frame = pd.DataFrame(
        {"s": list(config.s_grid), "empirical_cdf": empirical, "tw_cdf": theory}
    )
    extra = {"kernel": "airy", "ks": distance, "n": config.n, "seed": config.seed}
    return frame, extra, 0


def run_dump(config: RunConfig) -> Result:
    """Solver trajectories as tables."""
    if config.action == "hm":
        solution = solve_hastings_mcleod(config.alpha, config.L, config.n_colloc)
        return solution.to_frame(), {"kernel": "p2"}, 0
    if config.action == "u":
        transcendent = solve_p34_u(
            config.alpha, config.omega, config.L, config.L_plus, config.n_colloc
        )
        return transcendent.to_frame(), {"kernel": "p34"}, 0
    frames = []
    for s in config.s_grid:
        frame = solve_coupled(
            s, config.alpha, config.omega, n_colloc=config.n_colloc
        ).to_frame()
        frame.insert(0, "s", s)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True), {"kernel": "p34"}, 0


def run_selftest_command(config: RunConfig) -> Result:
    """All acceptance checks, failing when a hard check fails."""
    budget = SelftestBudget(
        m=config.m,
        mc_n=config.n,
        mc_samples=config.samples,
        seed=config.seed,
        threads=config.threads,
    )
    results = run_selftest(budget)
    frame = pd.DataFrame([result.as_row() for result in results])
    status = EXIT_NUMERIC_ERROR if hard_failures(results) else 0
    return frame, {"kernel": "all"}, status


COMMANDS: Dict[str, Callable[[RunConfig], Result]] = {
    "tw": run_tw_table,
    "p34": run_gap,
    "p2": run_gap,
    "asym": run_gap,
    "identity": run_identity,
    "mc": run_mc,
    "dump": run_dump,
    "selftest": run_selftest_command,
}


# Output


def render_csv(frame: pd.DataFrame) -> str:
    """CSV text with a version header, 17 significant digits and LF endings."""
    body = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return f"{CSV_HEADER_PREFIX}{__version__}\n{body}"


def render_json(frame: pd.DataFrame, config: RunConfig, extra: Dict[str, Any]) -> str:
    """JSON document with kernel, params, rows, budgets and version."""
    extra = dict(extra)
    document = {
        "kernel": extra.pop("kernel", config.command),
        "params": {**config.params_dict(), **extra},
        "rows": json.loads(frame.to_json(orient="records", double_precision=15)),
        "budgets": config.budget_dict(),
        "version": __version__,
    }
    return json.dumps(document, indent=2) + "\n"


def write_output(text: str, output: Optional[Path]):
    """Write to the output file, or to stdout when there is none."""
    if output is None:
        sys.stdout.write(text)
        return
    with open(output, mode="w", encoding=ENCODING, newline="\n") as fd:
        fd.write(text)
    logger.info("Results are saved in %s", output)


# Entry point


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per command."""
    parser = argparse.ArgumentParser(
        prog="painleve-gap",
        description="Gap probabilities and Tracy-Widom type distributions.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("-o", "--output", help="Output file, stdout by default")
    parser.add_argument("--format", choices=("csv", "json"), help="Output format")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    parser.add_argument(
        "--save-config",
        action="store_true",
        help="Store this run's parameter flags as per-user defaults",
    )
    parser.add_argument(
        "--log-file",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="Also write logs to the per-user log file",
    )

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--alpha")
    params.add_argument("--omega")
    params.add_argument("--t")
    params.add_argument("--s-grid", dest="s_grid", help="a:b:n or comma list")
    params.add_argument("--t-grid", dest="t_grid", help="a:b:n or comma list")
    params.add_argument("--x-grid", dest="x_grid", help="a:b:n or comma list")
    params.add_argument("--m", help="Number of Nystrom nodes")
    params.add_argument("--L", dest="L")
    params.add_argument("--L-plus", dest="L_plus")
    params.add_argument("--n-colloc", dest="n_colloc")
    params.add_argument("--h", help="Step of the second difference")
    params.add_argument("--n", help="Matrix size")
    params.add_argument("--samples", help="Number of sampled matrices")
    params.add_argument("--seed")
    params.add_argument("--threads")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, actions in ACTIONS.items():
        subparser = subparsers.add_parser(command, parents=[params])
        if actions:
            subparser.add_argument("action", choices=actions)
        if command in ("p34", "p2"):
            subparser.add_argument("--method", choices=METHODS)
            subparser.add_argument(
                "--hamiltonian",
                action="store_true",
                default=None,
                help="Use the Hamiltonian form for the P34 ODE route",
            )
        if command == "asym":
            subparser.add_argument("--kernel", choices=("p34", "p2"))
        if command == "identity":
            subparser.add_argument("--which", choices=IDENTITIES)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line interface.

    :param argv: Arguments, sys.argv[1:] when None
    :type argv: Optional[Sequence[str]]
    :return: Exit status
    :rtype: int
    """
    args = build_parser().parse_args(argv)
    level = verbosity_level(args.verbose, args.quiet)
    app_data = AppData(APP_NAME)
    log_file = app_data.log_path if args.log_file else None
    create_logger("painleve_gap", level=level, log_file=log_file)
    try:
        config = build_config(args, app_data)
        if args.save_config:
            save_flags(args, app_data)
        frame, extra, status = run(config)
    except ConfigError as exc:
        _report(exc)
        return EXIT_CONFIG_ERROR
    except PainleveGapException as exc:
        _report(exc)
        return EXIT_NUMERIC_ERROR
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        logger.debug("Untranslated numeric failure", exc_info=exc)
        _report(NumericError(str(exc) or type(exc).__name__, type(exc).__name__))
        return EXIT_NUMERIC_ERROR
    if config.format == "json":
        text = render_json(frame, config, extra)
    else:
        text = render_csv(frame)
    write_output(text, config.output)
    return status


def _nystrom_route(kernel: str, s: float, config: RunConfig) -> LogDetResult:
    if kernel == "p2":
        return logdet_p2_nystrom(s, config.t, config.alpha, config.m)
    return logdet_p34_nystrom(s, config.t, config.alpha, config.omega, config.m)


def _ode_route(kernel: str, s: float, config: RunConfig) -> LogDetResult:
    if kernel == "p2":
        return logdet_p2_ode(s, config.t, config.alpha)
    if config.hamiltonian:
        return logdet_p34_hamiltonian(s, config.t, config.alpha, config.omega)
    return logdet_p34_ode(s, config.t, config.alpha, config.omega)


def _sweep(
    function: Callable[[float], Dict[str, Any]],
    grid: Sequence[float],
    threads: Optional[int],
) -> List[Dict[str, Any]]:
    with ThreadPoolExecutor(max_workers=thread_count(threads)) as executor:
        return list(executor.map(function, grid))


def _config_lines(text: str, source: str) -> Iterator[Tuple[int, str, str]]:
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if line == "":
            continue
        if "=" not in line:
            raise ConfigError(f'{source}:{number}: expected "key = value"')
        key, value = (part.strip() for part in line.split("=", 1))
        yield number, key, value


def _check_requires(specifier: str, source: str):
    try:
        accepted = SpecifierSet(specifier)
    except InvalidSpecifier as exc:
        raise ConfigError(f'{source}: invalid requirement "{specifier}"') from exc
    if __version__ not in accepted:
        raise ConfigError(
            f"{source} requires painleve-gap {specifier}, this is {__version__}",
            requires=specifier,
        )


def _report(exc: PainleveGapException):
    logger.debug("Run failed", exc_info=exc)
    sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
