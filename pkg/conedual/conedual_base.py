"""
ConeDual Base.

This module provides the configuration and the base class shared by the
solvers. Tolerances, refinement caps and the worker-pool size are read from the
environment (a .env file is honoured), so every solver of one run works with
the same settings.

Classes:
    - Settings: Every tunable of a run.
    - ConeDualBase: The base class for the problem solvers.
    - ConeDualException: Root of the package's run-level exceptions.
    - ConeDualConfigException: An invalid configuration value.
    - SoundnessException: A certified bracket contradicts weak duality or a recheck.
    - SolverFailureException: The LP solver broke down.

Usage:
    >>> from conedual.conedual_base import ConeDualBase, Settings
    >>> base = ConeDualBase(Settings(eps_pd=1e-9, workers=1))
    >>> outcome = base.solve_lp(program, "alpha_G64")
"""

import logging
import os
from dataclasses import asdict, dataclass, replace
from typing import Callable, Iterable, List, Optional, TypeVar

from dotenv import load_dotenv  # type: ignore

from conedual import lp, trig
from conedual.cones import PdStatus, is_positive_definite
from conedual.enumerations.status import LpStatus
from conedual.seqcore import SymmetricSequence
from conedual.utils.parallel import parallel_map, resolve_workers

T = TypeVar("T")
R = TypeVar("R")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConeDualException(Exception):
    """Root of the package's run-level exceptions."""


class ConeDualConfigException(ConeDualException):
    """Exception for invalid configuration values."""


class SoundnessException(ConeDualException):
    """Exception for certified results that contradict weak duality or a recheck."""


class SolverFailureException(ConeDualException):
    """Exception for numerical breakdowns and impossible LP outcomes."""


def _optional_int(raw: str) -> Optional[int]:
    return None if raw.lower() in ("", "none", "auto") else int(raw)


def _optional_path(raw: str) -> Optional[str]:
    return raw or None


_ENVIRONMENT = {
    "log_level": ("CONEDUAL_LOG", str.upper),
    "eps_pd": ("CONEDUAL_EPS_PD", float),
    "eps_feas": ("CONEDUAL_EPS_FEAS", float),
    "pivot_tol": ("CONEDUAL_PIVOT_TOL", float),
    "workers": ("CONEDUAL_WORKERS", _optional_int),
    "max_dim": ("CONEDUAL_MAX_DIM", int),
    "refine_levels": ("CONEDUAL_REFINE_LEVELS", int),
    "lp_dump_dir": ("CONEDUAL_LP_DUMP_DIR", _optional_path),
}


@dataclass(frozen=True)
class Settings:
    """
    Settings of a run.

    Attributes:
        eps_pd (float): Tolerance of the positive-definiteness certificates.
        eps_feas (float): LP feasibility tolerance.
        pivot_tol (float): Smallest admissible LP pivot.
        opt_tol (float): LP reduced-cost tolerance.
        max_iterations (int): LP pivot budget.
        degeneracy_limit (int): Degenerate pivots before Bland's rule.
        refactor_every (int): Pivots between refactorisations.
        max_dim (int): Largest accepted torus dimension.
        workers (int, optional): Worker-pool size, None for the number of cores.
        refine_levels (int): Branch-and-bound levels of certified minima.
        refine_factor (int): Subdivision factor per axis and level.
        refine_cells (int): Cells subdivided per level at most.
        sweep_cap (int): Largest admissible oracle sweep.
        lp_dump_dir (str, optional): Directory receiving a text dump of every LP.
        log_level (str): Logging level name.
    """

    eps_pd: float = trig.EPS_PD
    eps_feas: float = lp.EPS_FEAS
    pivot_tol: float = lp.PIVOT_TOL
    opt_tol: float = lp.OPT_TOL
    max_iterations: int = 50_000
    degeneracy_limit: int = 50
    refactor_every: int = 64
    max_dim: int = 2
    workers: Optional[int] = None
    refine_levels: int = 12
    refine_factor: int = 4
    refine_cells: int = 4096
    sweep_cap: int = 10**8
    lp_dump_dir: Optional[str] = None
    log_level: str = "WARNING"

    def __post_init__(self) -> None:
        for name in ("eps_pd", "eps_feas", "pivot_tol", "opt_tol"):
            if not getattr(self, name) >= 0.0:
                raise ConeDualConfigException(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("max_iterations", "degeneracy_limit", "refactor_every", "max_dim", "sweep_cap"):
            if getattr(self, name) < 1:
                raise ConeDualConfigException(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.refine_levels < 0 or self.refine_factor < 2 or self.refine_cells < 1:
            raise ConeDualConfigException(
                f"Invalid refinement caps: levels {self.refine_levels}, "
                f"factor {self.refine_factor}, cells {self.refine_cells}"
            )
        if self.workers is not None and self.workers < 1:
            raise ConeDualConfigException(f"workers must be >= 1, got {self.workers}")
        if self.log_level not in LOG_LEVELS:
            raise ConeDualConfigException(f"Unknown log level {self.log_level!r}")

    @staticmethod
    def from_env(**overrides) -> "Settings":
        """
        Reads the settings from the environment.

        Calls load_dotenv() first, so a .env file in the working directory
        supplies defaults for the CONEDUAL_* variables.

        Args:
            **overrides: Values taking precedence over the environment.

        Returns:
            Settings: The validated settings.

        Raises:
            ConeDualConfigException: If a variable cannot be parsed or is out of range.
        """
        load_dotenv()
        values = {}
        for name, (variable, parse) in _ENVIRONMENT.items():
            raw = os.getenv(variable)
            if raw is None or raw == "":
                continue
            try:
                values[name] = parse(raw)
            except ValueError as e:
                raise ConeDualConfigException(f"Invalid value for {variable}: {raw!r}; {e}") from e
        values.update({k: v for k, v in overrides.items() if v is not None})
        return Settings(**values)

    def with_overrides(self, **overrides) -> "Settings":
        """Returns a copy with the given non-None values replaced."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def lp_options(self) -> lp.LpOptions:
        return lp.LpOptions(
            eps_feas=self.eps_feas,
            pivot_tol=self.pivot_tol,
            opt_tol=self.opt_tol,
            max_iterations=self.max_iterations,
            degeneracy_limit=self.degeneracy_limit,
            refactor_every=self.refactor_every,
        )

    def cert_options(self) -> trig.CertOptions:
        return trig.CertOptions(
            eps_pd=self.eps_pd,
            refine_levels=self.refine_levels,
            refine_factor=self.refine_factor,
            refine_cells=self.refine_cells,
        )

    def tolerances(self) -> dict:
        return {
            "eps_pd": self.eps_pd,
            "eps_feas": self.eps_feas,
            "pivot_tol": self.pivot_tol,
            "opt_tol": self.opt_tol,
        }

    def as_dict(self) -> dict:
        return asdict(self)


class ConeDualBase:
    """Base class for the problem solvers."""

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings if settings is not None else Settings.from_env()
        self._logger = logging.getLogger(type(self).__module__)

    def check_dim(self, dim: int) -> None:
        """
        Rejects torus dimensions above the configured maximum.

        Raises:
            ConeDualConfigException: If dim > settings.max_dim.
        """
        if dim > self.settings.max_dim:
            raise ConeDualConfigException(
                f"Dimension {dim} exceeds the configured maximum {self.settings.max_dim}"
            )

    def solve_lp(self, program: lp.LinearProgram, label: str) -> lp.LpOutcome:
        """
        Solves an LP with the configured tolerances.

        The program is dumped to settings.lp_dump_dir first when that is set.

        Args:
            program (LinearProgram): The program.
            label (str): File-name-safe label used for the dump and in messages.

        Returns:
            LpOutcome: OPTIMAL, INFEASIBLE or UNBOUNDED outcomes.

        Raises:
            SolverFailureException: On NUMERICAL_FAILURE or ITERATION_LIMIT.
        """
        if self.settings.lp_dump_dir:
            os.makedirs(self.settings.lp_dump_dir, exist_ok=True)
            path = os.path.join(self.settings.lp_dump_dir, f"{label}.lp")
            with open(path, "w", encoding="utf-8") as stream:
                lp.dump_lp(program, stream)
            self._logger.debug("Dumped %s to %s", label, path)
        outcome = lp.solve(program, self.settings.lp_options())
        self._logger.debug(
            "%s: %s after %d pivots (%d in phase one, %d Bland)",
            label,
            outcome.status,
            outcome.iterations,
            outcome.phase_one_iterations,
            outcome.bland_pivots,
        )
        if outcome.status in (LpStatus.NUMERICAL_FAILURE, LpStatus.ITERATION_LIMIT):
            raise SolverFailureException(f"{label}: {outcome.status}; {outcome.message}")
        return outcome

    def certify(self, f: SymmetricSequence, grid: trig.TorusGrid) -> trig.CertifiedValue:
        """Certified minimum of f^ with the configured tolerance and refinement caps."""
        return trig.certified_min(f, grid, self.settings.cert_options())

    def pd_status(self, h: SymmetricSequence, grid: trig.TorusGrid) -> PdStatus:
        """Positive-definiteness check with the configured tolerance and refinement caps."""
        return is_positive_definite(h, grid, self.settings.cert_options())

    @property
    def workers(self) -> int:
        return resolve_workers(self.settings.workers)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Ordered map over the configured worker pool."""
        return parallel_map(fn, items, self.settings.workers)
