"""
Linear Programming Module.

This module provides the deterministic dense linear-program solver used by every
problem builder.

A program

    min/max c.x + constant  s.t.  a_i.x (<=, =, >=) b_i,  lower <= x <= upper

is first rewritten as max c^.x s.t. A^ x <= b^ with x free (bounds and
equalities become rows, >= rows are negated, a MIN objective is negated).
The revised simplex method then runs on the standard-form dual

    min b^.y  s.t.  A^T y = c^,  y >= 0,

whose basis has one row per variable. The builders produce few variables and
many grid rows, so this keeps the basis small. The primal solution is read
from the simplex multipliers.

Classes:
    - LpOptions: Tolerances and limits.
    - LinearProgram: A program in row form.
    - LpOutcome: Status, primal and dual solutions, and self-check residuals.

Exceptions:
    - LpException: Base class for this module.
    - LpDimensionException: A malformed program, rejected before solving.

Functions:
    - solve: Solves a LinearProgram.
    - dump_lp: Writes a program in a fixed-layout text format.

Usage:
    >>> from conedual.lp import LinearProgram, solve
    >>> program = LinearProgram.build("MIN", [1.0], [([1.0], ">=", 1.0)])
    >>> solve(program).objective
    1.0
"""

import logging
import math
from dataclasses import dataclass, field
from typing import IO, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from conedual.enumerations.lp_terms import Relation, Sense
from conedual.enumerations.status import LpStatus

logger = logging.getLogger(__name__)

EPS_FEAS = 1e-9
PIVOT_TOL = 1e-10
OPT_TOL = 1e-9

DUMP_FORMAT_VERSION = 1


class LpException(Exception):
    """Base class for linear-programming errors."""


class LpDimensionException(LpException):
    """Exception for malformed programs."""


@dataclass(frozen=True)
class LpOptions:
    """
    Solver tolerances and limits.

    Attributes:
        eps_feas (float): Scaled feasibility tolerance.
        pivot_tol (float): Smallest admissible pivot element.
        opt_tol (float): Scaled reduced-cost tolerance.
        max_iterations (int): Pivot budget over both phases.
        degeneracy_limit (int): Consecutive degenerate pivots before Bland's rule.
        refactor_every (int): Pivots between two refactorisations of the basis inverse.
    """

    eps_feas: float = EPS_FEAS
    pivot_tol: float = PIVOT_TOL
    opt_tol: float = OPT_TOL
    max_iterations: int = 50_000
    degeneracy_limit: int = 50
    refactor_every: int = 64

    def as_dict(self) -> dict:
        return {
            "eps_feas": self.eps_feas,
            "pivot_tol": self.pivot_tol,
            "opt_tol": self.opt_tol,
            "max_iterations": self.max_iterations,
            "degeneracy_limit": self.degeneracy_limit,
            "refactor_every": self.refactor_every,
        }


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """
    Linear program in row form.

    Attributes:
        sense (str): Sense.MIN or Sense.MAX.
        objective (np.ndarray): Objective coefficients, shape (n,).
        matrix (np.ndarray): Constraint rows, shape (m, n).
        relations (tuple): One of Relation.ALL per row.
        rhs (np.ndarray): Right-hand sides, shape (m,).
        lower (np.ndarray): Lower bounds, -inf allowed.
        upper (np.ndarray): Upper bounds, +inf allowed.
        constant (float): Objective offset.
        name (str): Label used by dump_lp.
    """

    sense: str
    objective: np.ndarray
    matrix: np.ndarray
    relations: Tuple[str, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    constant: float = 0.0
    name: str = "lp"

    def __post_init__(self) -> None:
        if self.sense not in (Sense.MIN, Sense.MAX):
            raise LpDimensionException(f"Unknown sense {self.sense!r}")
        objective = np.asarray(self.objective, dtype=float).reshape(-1)
        n = objective.size
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.ndim == 1 and matrix.size == 0:
            matrix = matrix.reshape(0, n)
        if matrix.ndim != 2 or matrix.shape[1] != n:
            raise LpDimensionException(
                f"Constraint matrix of shape {matrix.shape} for {n} variables"
            )
        m = matrix.shape[0]
        rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        relations = tuple(self.relations)
        if rhs.size != m or len(relations) != m:
            raise LpDimensionException(
                f"{m} rows, {rhs.size} right-hand sides and {len(relations)} relations"
            )
        for relation in relations:
            if relation not in Relation.ALL:
                raise LpDimensionException(f"Unknown relation {relation!r}")
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if lower.size != n or upper.size != n:
            raise LpDimensionException(
                f"{lower.size} lower and {upper.size} upper bounds for {n} variables"
            )
        for label, array in (("objective", objective), ("matrix", matrix), ("rhs", rhs)):
            if not np.all(np.isfinite(array)):
                raise LpDimensionException(f"Non-finite entries in {label}")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)) or np.any(lower == np.inf) or np.any(upper == -np.inf):
            raise LpDimensionException("Invalid variable bounds")
        if np.any(lower > upper):
            raise LpDimensionException("Lower bound above upper bound")
        if not math.isfinite(float(self.constant)):
            raise LpDimensionException("Non-finite objective constant")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "relations", relations)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "constant", float(self.constant))

    @staticmethod
    def build(
        sense: str,
        objective: Sequence[float],
        rows: Iterable[Tuple[Sequence[float], str, float]],
        lower: Optional[Sequence[float]] = None,
        upper: Optional[Sequence[float]] = None,
        constant: float = 0.0,
        name: str = "lp",
    ) -> "LinearProgram":
        """
        Creates a program from (coefficients, relation, rhs) triples.

        Variables are free unless bounds are given.
        """
        n = len(objective)
        rows = list(rows)
        matrix = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), n)
        return LinearProgram(
            sense=sense,
            objective=np.asarray(objective, dtype=float),
            matrix=matrix,
            relations=tuple(r[1] for r in rows),
            rhs=np.array([r[2] for r in rows], dtype=float),
            lower=np.full(n, -np.inf) if lower is None else np.asarray(lower, dtype=float),
            upper=np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float),
            constant=constant,
            name=name,
        )

    @property
    def num_variables(self) -> int:
        return self.objective.size

    @property
    def num_rows(self) -> int:
        return self.matrix.shape[0]

    def violation(self, x: np.ndarray) -> float:
        """Returns the largest constraint or bound violation of x, scaled by max(1, |rhs|)."""
        worst = 0.0
        if self.num_rows:
            activity = self.matrix @ x
            scale = np.maximum(1.0, np.abs(self.rhs))
            relations = np.array(self.relations)
            excess = np.where(relations == Relation.LE, activity - self.rhs, 0.0)
            excess = np.where(relations == Relation.GE, self.rhs - activity, excess)
            excess = np.where(relations == Relation.EQ, np.abs(activity - self.rhs), excess)
            worst = max(worst, float(np.max(excess / scale)))
        if x.size:
            worst = max(worst, float(np.max(self.lower - x)), float(np.max(x - self.upper)))
        return max(worst, 0.0)


@dataclass(frozen=True, eq=False)
class LpOutcome:
    """
    Result of a solve.

    Duals follow the original row convention: for a MIN problem, >= rows carry
    nonnegative and <= rows nonpositive multipliers; MAX problems mirror this.
    bound_duals holds the multiplier of each variable's active bound.
    """

    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals: Optional[np.ndarray] = None
    bound_duals: Optional[np.ndarray] = None
    dual_objective: Optional[float] = None
    duality_gap: Optional[float] = None
    complementary_slackness: Optional[float] = None
    dual_residual: Optional[float] = None
    primal_residual: Optional[float] = None
    iterations: int = 0
    phase_one_iterations: int = 0
    bland_pivots: int = 0
    tolerances: Mapping[str, float] = field(default_factory=dict)
    message: str = ""

    @property
    def is_optimal(self) -> bool:
        return self.status == LpStatus.OPTIMAL

    def as_dict(self) -> dict:
        """Returns the scalar part of the outcome for reports."""
        return {
            "status": self.status,
            "objective": self.objective,
            "dual_objective": self.dual_objective,
            "duality_gap": self.duality_gap,
            "complementary_slackness": self.complementary_slackness,
            "dual_residual": self.dual_residual,
            "primal_residual": self.primal_residual,
            "iterations": self.iterations,
            "phase_one_iterations": self.phase_one_iterations,
            "bland_pivots": self.bland_pivots,
            "tolerances": dict(self.tolerances),
            "message": self.message,
        }


@dataclass
class _InequalityForm:
    """max c.x s.t. A x <= b with x free, plus the origin of every row."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    le_rows: np.ndarray
    ge_rows: np.ndarray
    lower_vars: np.ndarray
    upper_vars: np.ndarray


def _inequality_form(program: LinearProgram) -> _InequalityForm:
    sign = -1.0 if program.sense == Sense.MIN else 1.0
    relations = np.array(program.relations, dtype=object)
    le_rows = np.flatnonzero((relations == Relation.LE) | (relations == Relation.EQ))
    ge_rows = np.flatnonzero((relations == Relation.GE) | (relations == Relation.EQ))
    lower_vars = np.flatnonzero(np.isfinite(program.lower))
    upper_vars = np.flatnonzero(np.isfinite(program.upper))
    n = program.num_variables
    identity = np.eye(n)
    A = np.vstack(
        [
            program.matrix[le_rows],
            -program.matrix[ge_rows],
            -identity[lower_vars],
            identity[upper_vars],
        ]
    ).reshape(-1, n)
    b = np.concatenate(
        [
            program.rhs[le_rows],
            -program.rhs[ge_rows],
            -program.lower[lower_vars],
            program.upper[upper_vars],
        ]
    )
    return _InequalityForm(sign * program.objective, A, b, le_rows, ge_rows, lower_vars, upper_vars)


@dataclass
class _SimplexResult:
    status: str
    y: Optional[np.ndarray] = None
    multipliers: Optional[np.ndarray] = None
    iterations: int = 0
    phase_one_iterations: int = 0
    bland_pivots: int = 0
    message: str = ""


class _RevisedSimplex:
    """
    Two-phase revised simplex for min c.y s.t. A y = b, y >= 0.

    Columns n..n+m-1 are artificials. The basis inverse is kept explicitly,
    updated by eta transformations and refactorised every refactor_every pivots.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, c: np.ndarray, options: LpOptions) -> None:
        self.options = options
        self.m, self.n = A.shape
        self.flip = b < 0
        self.A = np.where(self.flip[:, None], -A, A)
        self.b = np.abs(b)
        self.c = c
        self.basis = np.arange(self.n, self.n + self.m)
        self.B_inv = np.eye(self.m)
        self.x_B = self.b.copy()
        self.iterations = 0
        self.bland_pivots = 0
        self._since_refactor = 0
        self._scale_b = max(1.0, float(np.max(self.b, initial=0.0)))

    def _column(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.A[:, j]
        column = np.zeros(self.m)
        column[j - self.n] = 1.0
        return column

    def _refactor(self) -> bool:
        B = np.column_stack([self._column(int(j)) for j in self.basis]) if self.m else np.zeros((0, 0))
        try:
            B_inv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            return False
        if not np.all(np.isfinite(B_inv)):
            return False
        self.B_inv = B_inv
        self.x_B = B_inv @ self.b
        self._since_refactor = 0
        return True

    def _pivot(self, row: int, entering: int, u: np.ndarray) -> None:
        theta = self.x_B[row] / u[row]
        self.x_B -= theta * u
        self.x_B[row] = theta
        pivot_row = self.B_inv[row] / u[row]
        self.B_inv -= np.outer(u, pivot_row)
        self.B_inv[row] = pivot_row
        self.basis[row] = entering
        self._since_refactor += 1

    def _iterate(self, cost: np.ndarray, allow_artificial: bool) -> str:
        """Runs pivots for the full cost vector (originals then artificials)."""
        opts = self.options
        degenerate_run = 0
        bland = False
        cost_scale = max(1.0, float(np.max(np.abs(cost), initial=0.0)))
        entering_limit = self.n + self.m if allow_artificial else self.n
        while True:
            if self.iterations >= opts.max_iterations:
                return LpStatus.ITERATION_LIMIT
            if self._since_refactor >= opts.refactor_every and not self._refactor():
                return LpStatus.NUMERICAL_FAILURE
            multipliers = cost[self.basis] @ self.B_inv
            reduced = np.empty(entering_limit)
            reduced[: self.n] = cost[: self.n] - multipliers @ self.A
            if allow_artificial:
                reduced[self.n:] = cost[self.n:] - multipliers
            reduced[self.basis[self.basis < entering_limit]] = 0.0
            candidates = np.flatnonzero(reduced < -opts.opt_tol * cost_scale)
            if candidates.size == 0:
                return LpStatus.OPTIMAL
            if bland:
                entering = int(candidates[0])
            else:
                entering = int(candidates[np.argmin(reduced[candidates])])
            u = self.B_inv @ self._column(entering)
            eligible = np.flatnonzero(u > opts.pivot_tol)
            if eligible.size == 0:
                return LpStatus.UNBOUNDED
            ratios = np.maximum(self.x_B[eligible], 0.0) / u[eligible]
            theta = float(ratios.min())
            ties = eligible[ratios <= theta + opts.pivot_tol * max(1.0, theta)]
            if bland:
                row = int(ties[np.argmin(self.basis[ties])])
            else:
                row = int(ties[np.argmax(u[ties])])
            if self.x_B[row] < 0.0:
                self.x_B[row] = 0.0
            self._pivot(row, entering, u)
            self.iterations += 1
            if bland:
                self.bland_pivots += 1
            if theta <= opts.eps_feas * self._scale_b:
                degenerate_run += 1
                if degenerate_run >= opts.degeneracy_limit and not bland:
                    logger.debug("Switching to Bland's rule after %d degenerate pivots", degenerate_run)
                    bland = True
            else:
                degenerate_run = 0
                bland = False

    def _drive_out_artificials(self) -> bool:
        for row in range(self.m):
            if self.basis[row] < self.n:
                continue
            coefficients = self.B_inv[row] @ self.A
            coefficients[self.basis[self.basis < self.n]] = 0.0
            candidates = np.flatnonzero(np.abs(coefficients) > self.options.pivot_tol)
            if candidates.size == 0:
                # redundant row, the artificial stays basic at zero
                continue
            entering = int(candidates[np.argmax(np.abs(coefficients[candidates]))])
            self._pivot(row, entering, self.B_inv @ self.A[:, entering])
        return self._refactor()

    def run(self) -> _SimplexResult:
        if self.m == 0:
            return _SimplexResult(LpStatus.OPTIMAL, np.zeros(self.n), np.zeros(0))
        phase_one_cost = np.concatenate([np.zeros(self.n), np.ones(self.m)])
        status = self._iterate(phase_one_cost, allow_artificial=True)
        phase_one_iterations = self.iterations
        if status != LpStatus.OPTIMAL:
            return _SimplexResult(status, iterations=self.iterations, message="phase one")
        infeasibility = float(np.sum(self.x_B[self.basis >= self.n]))
        if infeasibility > self.options.eps_feas * self._scale_b:
            return _SimplexResult(
                LpStatus.INFEASIBLE,
                iterations=self.iterations,
                phase_one_iterations=phase_one_iterations,
                message=f"phase one infeasibility {infeasibility:.3e}",
            )
        if not self._drive_out_artificials():
            return _SimplexResult(LpStatus.NUMERICAL_FAILURE, iterations=self.iterations, message="singular basis")
        logger.debug("Phase one done after %d pivots", phase_one_iterations)
        phase_two_cost = np.concatenate([self.c, np.zeros(self.m)])
        status = self._iterate(phase_two_cost, allow_artificial=False)
        if status == LpStatus.OPTIMAL and not self._refactor():
            status = LpStatus.NUMERICAL_FAILURE
        result = _SimplexResult(
            status,
            iterations=self.iterations,
            phase_one_iterations=phase_one_iterations,
            bland_pivots=self.bland_pivots,
        )
        if status != LpStatus.OPTIMAL:
            return result
        y = np.zeros(self.n)
        basic = self.basis < self.n
        y[self.basis[basic]] = np.maximum(self.x_B[basic], 0.0)
        multipliers = phase_two_cost[self.basis] @ self.B_inv
        result.y = y
        result.multipliers = np.where(self.flip, -multipliers, multipliers)
        return result


def _solve_without_variables(program: LinearProgram, options: LpOptions) -> LpOutcome:
    violation = program.violation(np.zeros(0))
    tolerances = options.as_dict()
    if violation > options.eps_feas:
        return LpOutcome(LpStatus.INFEASIBLE, tolerances=tolerances, message="no variables")
    return LpOutcome(
        LpStatus.OPTIMAL,
        x=np.zeros(0),
        objective=program.constant,
        duals=np.zeros(program.num_rows),
        bound_duals=np.zeros(0),
        dual_objective=program.constant,
        duality_gap=0.0,
        complementary_slackness=0.0,
        dual_residual=0.0,
        primal_residual=violation,
        tolerances=tolerances,
    )


def solve(program: LinearProgram, options: Optional[LpOptions] = None) -> LpOutcome:
    """
    Solves a linear program.

    Args:
        program (LinearProgram): The program.
        options (LpOptions, optional): Tolerances and limits. Defaults to LpOptions().

    Returns:
        LpOutcome: OPTIMAL with primal and dual solutions and self-check residuals,
        INFEASIBLE, UNBOUNDED, or one of the failure statuses NUMERICAL_FAILURE and
        ITERATION_LIMIT. Identical inputs give bit-identical outcomes.
    """
    opts = options or LpOptions()
    tolerances = opts.as_dict()
    if program.num_variables == 0:
        return _solve_without_variables(program, opts)
    form = _inequality_form(program)
    logger.debug(
        "Solving %s: %d variables, %d inequality rows", program.name, program.num_variables, form.b.size
    )
    result = _RevisedSimplex(form.A.T, form.c, form.b, opts).run()
    if result.status == LpStatus.UNBOUNDED:
        return LpOutcome(
            LpStatus.INFEASIBLE,
            iterations=result.iterations,
            phase_one_iterations=result.phase_one_iterations,
            tolerances=tolerances,
            message="dual unbounded",
        )
    if result.status == LpStatus.INFEASIBLE:
        # the dual has no point: the primal is infeasible or unbounded
        dual_check = _RevisedSimplex(form.A.T, np.zeros_like(form.c), form.b, opts).run()
        if dual_check.status == LpStatus.OPTIMAL:
            status = LpStatus.UNBOUNDED
        elif dual_check.status == LpStatus.UNBOUNDED:
            status = LpStatus.INFEASIBLE
        else:
            status = dual_check.status
        return LpOutcome(
            status,
            iterations=result.iterations + dual_check.iterations,
            phase_one_iterations=result.phase_one_iterations,
            tolerances=tolerances,
            message="dual infeasible",
        )
    if result.status != LpStatus.OPTIMAL:
        logger.warning("LP %s failed: %s (%s)", program.name, result.status, result.message)
        return LpOutcome(
            result.status,
            iterations=result.iterations,
            phase_one_iterations=result.phase_one_iterations,
            bland_pivots=result.bland_pivots,
            tolerances=tolerances,
            message=result.message,
        )
    return _assemble(program, form, result, opts)


def _assemble(program: LinearProgram, form: _InequalityForm, result: _SimplexResult, options: LpOptions) -> LpOutcome:
    x = result.multipliers
    y = result.y
    sign = -1.0 if program.sense == Sense.MIN else 1.0
    objective = float(program.objective @ x) + program.constant
    dual_objective = sign * math.fsum(form.b * y) + program.constant

    sections = np.cumsum([0, form.le_rows.size, form.ge_rows.size, form.lower_vars.size, form.upper_vars.size])
    y_le, y_ge, y_lower, y_upper = (y[sections[k]:sections[k + 1]] for k in range(4))
    duals = np.zeros(program.num_rows)
    np.add.at(duals, form.le_rows, y_le)
    np.add.at(duals, form.ge_rows, -y_ge)
    bound_duals = np.zeros(program.num_variables)
    np.add.at(bound_duals, form.upper_vars, y_upper)
    np.add.at(bound_duals, form.lower_vars, -y_lower)

    slack = form.b - form.A @ x
    scale_b = np.maximum(1.0, np.abs(form.b))
    primal_residual = program.violation(x)
    complementary = float(np.max(np.abs(y * slack) / scale_b, initial=0.0))
    dual_residual = float(np.max(np.abs(form.A.T @ y - form.c), initial=0.0))
    if primal_residual > options.eps_feas:
        logger.warning("LP %s: primal residual %.3e above eps_feas", program.name, primal_residual)
    return LpOutcome(
        LpStatus.OPTIMAL,
        x=x,
        objective=objective,
        duals=sign * duals,
        bound_duals=sign * bound_duals,
        dual_objective=dual_objective,
        duality_gap=abs(dual_objective - objective),
        complementary_slackness=complementary,
        dual_residual=dual_residual,
        primal_residual=primal_residual,
        iterations=result.iterations,
        phase_one_iterations=result.phase_one_iterations,
        bland_pivots=result.bland_pivots,
        tolerances=options.as_dict(),
    )


def _format_float(value: float) -> str:
    if value == np.inf:
        return "+inf"
    if value == -np.inf:
        return "-inf"
    return f"{value:+.17e}"


def dump_lp(program: LinearProgram, stream: IO[str]) -> None:
    """
    Writes a program in a fixed-layout text format.

    One record per line: a 6-character tag, right-aligned integer fields of
    width 8 and floats as %+.17e, so the dump round-trips every bit.
    """
    lines: List[str] = [
        f"{'CDLP':<6}{DUMP_FORMAT_VERSION:>8}",
        f"{'NAME':<6} {program.name}",
        f"{'SENSE':<6} {program.sense}",
        f"{'SIZE':<6}{program.num_rows:>8}{program.num_variables:>8}",
        f"{'CONST':<6} {_format_float(program.constant)}",
    ]
    for j, value in enumerate(program.objective):
        lines.append(f"{'OBJ':<6}{j:>8} {_format_float(float(value))}")
    for j in range(program.num_variables):
        lines.append(
            f"{'BOUND':<6}{j:>8} {_format_float(float(program.lower[j]))} "
            f"{_format_float(float(program.upper[j]))}"
        )
    for i in range(program.num_rows):
        lines.append(f"{'ROW':<6}{i:>8} {program.relations[i]:>2} {_format_float(float(program.rhs[i]))}")
        for j in np.flatnonzero(program.matrix[i]):
            lines.append(f"{'COEF':<6}{i:>8}{int(j):>8} {_format_float(float(program.matrix[i, j]))}")
    lines.append("END")
    stream.write("\n".join(lines) + "\n")


def read_lp(stream: IO[str]) -> LinearProgram:
    """Reads a program written by dump_lp."""
    header: Dict[str, str] = {}
    objective: Dict[int, float] = {}
    bounds: Dict[int, Tuple[float, float]] = {}
    rows: Dict[int, Tuple[str, float]] = {}
    coefficients: List[Tuple[int, int, float]] = []
    for raw in stream:
        line = raw.rstrip("\n")
        if not line or line == "END":
            continue
        tag, rest = line[:6].strip(), line[6:].split()
        if tag in ("CDLP", "NAME", "SENSE", "CONST"):
            header[tag] = " ".join(rest)
        elif tag == "SIZE":
            header["SIZE"] = line[6:]
        elif tag == "OBJ":
            objective[int(rest[0])] = float(rest[1])
        elif tag == "BOUND":
            bounds[int(rest[0])] = (float(rest[1]), float(rest[2]))
        elif tag == "ROW":
            rows[int(rest[0])] = (rest[1], float(rest[2]))
        elif tag == "COEF":
            coefficients.append((int(rest[0]), int(rest[1]), float(rest[2])))
        else:
            raise LpDimensionException(f"Unknown record {tag!r}")
    try:
        m, n = (int(part) for part in header["SIZE"].split())
    except (KeyError, ValueError) as e:
        raise LpDimensionException("Missing or malformed SIZE record") from e
    matrix = np.zeros((m, n))
    for i, j, value in coefficients:
        matrix[i, j] = value
    return LinearProgram(
        sense=header.get("SENSE", Sense.MIN),
        objective=np.array([objective.get(j, 0.0) for j in range(n)]),
        matrix=matrix,
        relations=tuple(rows[i][0] for i in range(m)),
        rhs=np.array([rows[i][1] for i in range(m)]),
        lower=np.array([bounds.get(j, (-np.inf, np.inf))[0] for j in range(n)]),
        upper=np.array([bounds.get(j, (-np.inf, np.inf))[1] for j in range(n)]),
        constant=float(header.get("CONST", "0")),
        name=header.get("NAME", "lp"),
    )
