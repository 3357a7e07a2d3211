"""
Command Line Module.

This module runs a JSON run configuration and writes its report.

Usage:
    conedual --config wiener.json --out results/ --seed 0 --workers 4

Outputs in --out:
    - report.json: Deterministic report (sorted keys, no clock data).
    - bracket.csv: Level table, a projection of the report.
    - timing.json: Timestamp and wall clock per level.

Exit codes:
    - 0: Success.
    - 1: Configuration error; nothing is written, an error record goes to stderr.
    - 2: Soundness assertion or solver failure; the report carries an error record.
"""

import argparse
import csv
import itertools
import json
import logging
import math
import os
import sys
import time
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from dotenv import load_dotenv  # type: ignore

from conedual import __version__
from conedual.cones import (
    CertificateRecheckException,
    DecompositionWindowException,
    is_positive_definite,
    solve_decomposition,
)
from conedual.conedual_base import (
    LOG_LEVELS,
    ConeDualConfigException,
    Settings,
    SolverFailureException,
    SoundnessException,
)
from conedual.enumerations.command import Command
from conedual.lp import LpException
from conedual.oracle import OracleException
from conedual.revesz import ReveszProblem, ReveszProblemException, ReveszSolver, default_schedule
from conedual.seqcore import SeqCoreException, SymmetricSequence, canonical
from conedual.trig import AtomicMeasure, TorusGrid, TrigException, parseval_check
from conedual.utils.data_types import Timestamp, dumps_report, format_float
from conedual.wiener import WienerProblem, WienerProblemException, WienerSolver

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1
REPORT_VERSION = 1
PARSEVAL_TOL = 1e-10
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOUNDNESS = 2

CONFIG_ERRORS = (
    ConeDualConfigException,
    ReveszProblemException,
    WienerProblemException,
    SeqCoreException,
    TrigException,
    OracleException,
    LpException,
    DecompositionWindowException,
)
SOUNDNESS_ERRORS = (SoundnessException, SolverFailureException, CertificateRecheckException)


def _error_record(error: Exception) -> dict:
    return {"type": type(error).__name__, "message": str(error)}


def load_config(path: str) -> dict:
    """
    Reads and validates a run configuration.

    Raises:
        ConeDualConfigException: If the file cannot be read, is not JSON or is invalid.
    """
    try:
        with open(path, "r", encoding="utf-8") as stream:
            config = json.load(stream)
    except OSError as e:
        raise ConeDualConfigException(f"Cannot read config {path!r}; {e}") from e
    except json.JSONDecodeError as e:
        raise ConeDualConfigException(f"Malformed JSON in {path!r}; {e}") from e
    validate_config(config)
    return config


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConeDualConfigException(message)


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _require_grid_size(problem: dict) -> None:
    size = problem.get("points_per_axis", 1024)
    _require(_is_int(size) and size >= 4, f"'points_per_axis' must be an integer >= 4, got {size!r}")


def validate_config(config: Any) -> None:
    """
    Checks a configuration against the version 1 run-config schema.

    Raises:
        ConeDualConfigException: On the first violation found.
    """
    _require(isinstance(config, dict), "The config must be a JSON object")
    _require(config.get("version", CONFIG_VERSION) == CONFIG_VERSION, f"Unsupported config version {config.get('version')!r}")
    command = config.get("command")
    _require(command in Command.ALL, f"Unknown command {command!r}; expected one of {', '.join(Command.ALL)}")
    problem = config.get("problem")
    _require(isinstance(problem, dict), "'problem' must be an object")
    seed = config.get("seed", 0)
    _require(_is_int(seed) and seed >= 0, f"'seed' must be a nonnegative integer, got {seed!r}")
    schedule = config.get("schedule")
    if command == Command.REVESZ:
        _require("r" in problem, "revesz problem needs 'r'")
        for key in ("M", "L"):
            _require(isinstance(problem.get(key, []), list), f"'{key}' must be a list of indices")
        _require(_is_int(problem.get("dim", 1)) and problem.get("dim", 1) >= 1, "'dim' must be a positive integer")
        halfwidth = problem.get("window_halfwidth")
        _require(halfwidth is None or (_is_int(halfwidth) and halfwidth >= 0), "'window_halfwidth' must be >= 0")
        if schedule is not None:
            _require(
                isinstance(schedule, list) and schedule and all(_is_int(g) and g >= 4 for g in schedule),
                "'schedule' must be a nonempty list of grid sizes >= 4",
            )
            _require(schedule == sorted(schedule), f"'schedule' must be nondecreasing, got {schedule}")
    elif command == Command.WIENER:
        for key, least in (("L", 2), ("N", 1)):
            value = problem.get(key)
            _require(_is_int(value) and value >= least, f"wiener problem needs an integer '{key}' >= {least}")
        sizes = [problem.get("R"), problem.get("G")]
        _require(
            all(isinstance(s, list) and s and all(_is_int(v) for v in s) for s in sizes),
            "'R' and 'G' must be nonempty integer lists",
        )
        _require(len(sizes[0]) == len(sizes[1]), "'R' and 'G' must have the same length")
        _require(all(g >= 4 for g in sizes[1]), "'G' entries must be >= 4")
        for key, least in (("budget", 0), ("max_length", 1), ("restarts", 0)):
            value = problem.get(key)
            _require(value is None or (_is_int(value) and value >= least), f"'{key}' must be an integer >= {least}")
    elif command == Command.CHECK_PD:
        _require(isinstance(problem.get("sequence"), dict), "check-pd problem needs a 'sequence' literal")
        _require_grid_size(problem)
    elif command == Command.DECOMPOSE:
        _require(isinstance(problem.get("phi"), dict), "decompose problem needs a 'phi' literal")
        window = problem.get("window")
        _require(_is_int(window) and window >= 0, "decompose problem needs an integer 'window' >= 0")
        _require_grid_size(problem)
    else:
        for key in ("trials", "support", "atoms", "dim"):
            value = problem.get(key, 1)
            _require(_is_int(value) and value >= 1, f"'{key}' must be a positive integer")


def check_pd(literal: Mapping, points_per_axis: int, settings: Optional[Settings] = None, echo: bool = True) -> dict:
    """
    Checks one sequence literal for positive definiteness and prints the report.

    Returns:
        dict: The status, the deciding method and, on refutation, the witness x and h^(x).
    """
    settings = settings or Settings.from_env()
    h = SymmetricSequence.from_literal(literal)
    status = is_positive_definite(h, TorusGrid(h.dim, points_per_axis), settings.cert_options())
    report = {"sequence": h, "points_per_axis": points_per_axis}
    report.update(status.as_dict())
    if status.is_refuted:
        report["witness"] = {"x": list(status.witness), "value": status.witness_value}
    result = json.loads(dumps_report(report))
    if echo:
        print(dumps_report(result), end="")
    return result


def parseval_trials(trials: int, support: int, atoms: int, dim: int, seed: int) -> dict:
    """
    Compares both sides of the Parseval identity on random (f, nu) pairs.

    Trial k draws from numpy.random.default_rng([seed, k]): f on the box
    |n|_inf <= support with N(0, 1) values, nu with `atoms` uniform points and
    uniform weights in [0, 1).
    """
    rows = []
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        box = itertools.product(range(-support, support + 1), repeat=dim)
        keys = [n for n in box if canonical(n) == n]
        f = SymmetricSequence(dim, dict(zip(keys, rng.standard_normal(len(keys)).tolist())))
        nu = AtomicMeasure.from_points(
            rng.uniform(0.0, 2.0 * math.pi, size=(atoms, dim)).tolist(), rng.uniform(0.0, 1.0, size=atoms).tolist(), dim
        )
        lhs, rhs = parseval_check(f, nu)
        rows.append({"trial": k, "lhs": lhs, "rhs": rhs, "error": abs(lhs - rhs) / (1.0 + abs(lhs))})
    worst = max((row["error"] for row in rows), default=0.0)
    return {"trials": rows, "max_error": worst, "tolerance": PARSEVAL_TOL, "passed": worst <= PARSEVAL_TOL}


def _run_revesz(config: dict, settings: Settings) -> Tuple[dict, List[dict], List[dict]]:
    problem = config["problem"]
    dim = int(problem.get("dim", 1))
    solver = ReveszSolver(settings)
    solver.check_dim(dim)
    schedule = config.get("schedule") or default_schedule(dim)
    p = ReveszProblem.from_dict(problem, schedule[0])
    bracket = solver.run_bracket(p, schedule)
    rows = [
        {
            "level": i,
            "points_per_axis": level.points_per_axis,
            "alpha_relaxed": level.alpha_relaxed,
            "alpha_certified": level.alpha_certified,
            "omega_relaxed": level.omega_relaxed,
            "omega_certified": level.omega_certified,
            "gap": level.gap,
        }
        for i, level in enumerate(bracket.levels)
    ]
    return bracket.as_dict(), rows, bracket.timing()


def _run_wiener(config: dict, settings: Settings, seed: int) -> Tuple[dict, List[dict], List[dict]]:
    problem = config["problem"]
    schedule = list(zip(problem["R"], problem["G"]))
    solver = WienerSolver(settings)
    p = WienerProblem.create(int(problem["L"]), int(problem["N"]), schedule[0][0], schedule[0][1])
    bracket = solver.run_wiener_bracket(
        p,
        schedule,
        budget=int(problem.get("budget", 1000)),
        seed=seed,
        max_length=problem.get("max_length"),
        restarts=int(problem.get("restarts", 16)),
    )
    rows = [
        {
            "level": i,
            "R": level.R,
            "points_per_axis": level.points_per_axis,
            "lower": bracket.lower.value,
            "upper": level.upper.value,
            "lp_value": level.upper.lp_value,
            "deficit": level.upper.deficit,
        }
        for i, level in enumerate(bracket.levels)
    ]
    return bracket.as_dict(), rows, bracket.timing()


def _run_decompose(config: dict, settings: Settings) -> Tuple[dict, List[dict], List[dict]]:
    problem = config["problem"]
    phi = SymmetricSequence.from_literal(problem["phi"])
    points = int(problem.get("points_per_axis", 1024))
    started = time.perf_counter()
    attempt = solve_decomposition(
        phi, int(problem["window"]), TorusGrid(phi.dim, points), settings.cert_options(), settings.lp_options()
    )
    result = attempt.as_dict()
    result["phi"] = phi
    result["verdict"] = "decomposable" if attempt.succeeded else "not decomposable at this window/grid"
    row = {
        "level": 0,
        "window": int(problem["window"]),
        "points_per_axis": points,
        "lp_status": attempt.lp_status,
        "slack": attempt.slack,
        "decomposable": attempt.succeeded,
    }
    return result, [row], [{"points_per_axis": points, "seconds": time.perf_counter() - started}]


def _run_check_pd(config: dict, settings: Settings) -> Tuple[dict, List[dict], List[dict]]:
    problem = config["problem"]
    points = int(problem.get("points_per_axis", 1024))
    started = time.perf_counter()
    result = check_pd(problem["sequence"], points, settings)
    row = {
        "level": 0,
        "points_per_axis": points,
        "status": result["status"],
        "method": result["method"],
        "lower_bound": result["certified"]["lower_bound"],
    }
    return result, [row], [{"points_per_axis": points, "seconds": time.perf_counter() - started}]


def _run_parseval(config: dict, seed: int) -> Tuple[dict, List[dict], List[dict]]:
    problem = config["problem"]
    started = time.perf_counter()
    result = parseval_trials(
        int(problem.get("trials", 1000)),
        int(problem.get("support", 4)),
        int(problem.get("atoms", 8)),
        int(problem.get("dim", 1)),
        seed,
    )
    rows = [{"level": row["trial"], "lhs": row["lhs"], "rhs": row["rhs"], "error": row["error"]} for row in result["trials"]]
    return result, rows, [{"trials": len(rows), "seconds": time.perf_counter() - started}]


def execute(config: dict, settings: Settings, seed: int) -> Tuple[dict, List[dict], List[dict]]:
    """Runs the configured command; returns (result, csv rows, timing rows)."""
    command = config["command"]
    if command == Command.REVESZ:
        return _run_revesz(config, settings)
    if command == Command.WIENER:
        return _run_wiener(config, settings, seed)
    if command == Command.CHECK_PD:
        return _run_check_pd(config, settings)
    if command == Command.DECOMPOSE:
        return _run_decompose(config, settings)
    return _run_parseval(config, seed)


def _write_csv(path: str, rows: Sequence[Dict[str, Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as stream:
        if not rows:
            return
        writer = csv.DictWriter(stream, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format_float(v) if isinstance(v, float) else v for k, v in row.items()})


def write_outputs(out_dir: str, report: dict, rows: Sequence[dict], timing: Sequence[dict]) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as stream:
        stream.write(dumps_report(report))
    _write_csv(os.path.join(out_dir, "bracket.csv"), rows)
    with open(os.path.join(out_dir, "timing.json"), "w", encoding="utf-8") as stream:
        stream.write(dumps_report({"timestamp": Timestamp.now(), "levels": list(timing)}))


def run(
    config_path: str,
    out_dir: str = ".",
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    eps_pd: Optional[float] = None,
) -> int:
    """
    Runs a configuration file and writes the outputs.

    Returns:
        int: 0 on success, 1 on a configuration error, 2 on a soundness or solver failure.
    """
    try:
        settings = Settings.from_env(workers=workers, eps_pd=eps_pd)
        config = load_config(config_path)
    except CONFIG_ERRORS as e:
        print(dumps_report({"error": _error_record(e)}), end="", file=sys.stderr)
        return EXIT_CONFIG

    run_seed = config.get("seed", 0) if seed is None else seed
    report = {
        "report_version": REPORT_VERSION,
        "tool": {"name": "conedual", "version": __version__},
        "config": config,
        "seed": run_seed,
        "tolerances": settings.tolerances(),
        "result": None,
        "error": None,
    }
    try:
        result, rows, timing = execute(config, settings, run_seed)
    except SOUNDNESS_ERRORS as e:
        logger.error("%s: %s", type(e).__name__, e)
        report["error"] = _error_record(e)
        write_outputs(out_dir, report, [], [])
        return EXIT_SOUNDNESS
    except CONFIG_ERRORS as e:
        print(dumps_report({"error": _error_record(e)}), end="", file=sys.stderr)
        return EXIT_CONFIG
    report["result"] = result
    write_outputs(out_dir, report, rows, timing)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conedual",
        description="Certified primal-dual brackets for sign-support and positive-definite extremal problems.",
    )
    parser.add_argument("--config", required=True, help="Path of the JSON run configuration")
    parser.add_argument("--out", default=".", help="Output directory (default: current directory)")
    parser.add_argument("--seed", type=int, default=None, help="Seed, overrides the config's seed")
    parser.add_argument("--workers", type=int, default=None, help="Worker-pool size (default: number of cores)")
    parser.add_argument("--eps-pd", type=float, default=None, help="Positive-definiteness tolerance")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    load_dotenv()
    level = os.getenv("CONEDUAL_LOG", "WARNING").upper()
    logging.basicConfig(level=level if level in LOG_LEVELS else "WARNING", format=LOG_FORMAT)
    return run(args.config, args.out, args.seed, args.workers, args.eps_pd)
