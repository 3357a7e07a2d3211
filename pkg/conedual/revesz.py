"""
Revesz Duality Module.

This module brackets the pair of extremal quantities

    alpha = inf { sum_n f(n) r(n) : f in C & P, f(0) = 1 }
    omega = sup { delta : r + t - delta chi_0 positive definite for some t in C^- }

for a sign-support pattern (M, L) and a finitely supported r with r(0) = 1.
Both are discretized on a torus grid, solved as linear programs and then
certified: alpha from above by shifting the primal optimum into P, omega from
below by shifting the dual optimum into P+, and also by reading the primal
LP's row multipliers as a nonnegative measure whose cosine transform is
positive definite outright. omega <= alpha holds for every pair of certified
values, and the bracket closes as the grid is refined.

Classes:
    - ReveszProblem: Pattern, r, dual window and grid.
    - AlphaSolution: Relaxed primal optimum and its grid-row multipliers.
    - Certificate: A certified value with its adjusted witness.
    - SpectralDual: Lower bound on omega carried by an atomic measure.
    - BracketLevel: Every value computed at one grid size.
    - DualityBracket: Levels and the overall certified bracket.
    - ReveszSolver: The solver.

Exceptions:
    - ReveszProblemException: The problem violates its invariants.
    - WindowDegeneracyException: The dual LP is unbounded.

Functions:
    - adjusted_alpha: (value + s r(0)) / (1 + s) for a deficit -s.
    - adjusted_omega: delta + min(0, deficit).
    - weak_duality_pairing: pairing(f, delta chi_0 - r).
    - default_schedule: Default grid sizes per dimension.

Usage:
    >>> from conedual.revesz import ReveszProblem, ReveszSolver
    >>> from conedual.seqcore import SignSupportPattern, SymmetricSequence
    >>> from conedual.trig import TorusGrid
    >>> problem = ReveszProblem.create(
    ...     SignSupportPattern.from_lists(1, [1], [1]),
    ...     SymmetricSequence.from_values([1.0, 1.0]),
    ...     TorusGrid(1, 64),
    ... )
    >>> bracket = ReveszSolver().run_bracket(problem, [64, 256, 1024])
    >>> bracket.gap <= 1e-3
    True
"""

import itertools
import math
import time
from dataclasses import dataclass, field, replace
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from conedual.conedual_base import ConeDualBase, SolverFailureException, SoundnessException
from conedual.enumerations.lp_terms import Relation, Sense
from conedual.enumerations.status import BoundDirection, LpStatus
from conedual.lp import LinearProgram
from conedual.seqcore import (
    IndexSet,
    MultiIndex,
    SeqCoreException,
    SignSupportPattern,
    SymmetricSequence,
    is_positive_index,
    pairing,
    project_to_C,
    project_to_Cminus,
    zero_index,
)
from conedual.trig import (
    AtomicMeasure,
    CertifiedValue,
    TorusGrid,
    TrigException,
    grid_phases,
    grid_values,
)

# LP pricing accuracy allowed on top of 2 eps_pd in weak-duality assertions
WEAK_DUALITY_SLACK = 1e-7


class ReveszProblemException(Exception):
    """Exception for problems that violate their invariants."""


class WindowDegeneracyException(ReveszProblemException):
    """Exception for an unbounded dual LP."""


def default_schedule(dim: int) -> List[int]:
    """Returns G = 2^6 .. 2^12 for d = 1 and 2^4 .. 2^8 per axis otherwise."""
    if dim == 1:
        return [2**k for k in range(6, 13)]
    return [2**k for k in range(4, 9)]


def _box_indices(dim: int, halfwidth: int) -> List[MultiIndex]:
    box = itertools.product(range(-halfwidth, halfwidth + 1), repeat=dim)
    return [n for n in box if is_positive_index(n)]


@dataclass(frozen=True)
class ReveszProblem:
    """
    A discretized alpha / omega problem.

    Attributes:
        pattern (SignSupportPattern): The pattern (M, L).
        r (SymmetricSequence): Finitely supported, r(0) = 1.
        window (tuple): Canonical positive indices of the dual window W.
        grid (TorusGrid): Discretization of T^d.
    """

    pattern: SignSupportPattern
    r: SymmetricSequence
    window: Tuple[MultiIndex, ...]
    grid: TorusGrid

    def __post_init__(self) -> None:
        dim = self.pattern.dim
        if self.r.dim != dim or self.grid.dim != dim:
            raise ReveszProblemException(
                f"Pattern, r and grid live in dimensions {dim}, {self.r.dim}, {self.grid.dim}"
            )
        if self.r.value_at(zero_index(dim)) != 1.0:
            raise ReveszProblemException(f"r(0) must be 1, got {self.r.value_at(zero_index(dim))}")
        window = tuple(sorted(set(tuple(n) for n in self.window)))
        for n in window:
            if len(n) != dim or not is_positive_index(n):
                raise ReveszProblemException(f"Window index {n} is not in Z_+^{dim}")
        missing = (set(self.r.positive_support()) | set(self.pattern.union.elements)) - set(window)
        if missing:
            raise ReveszProblemException(f"Window misses {sorted(missing)}")
        radius = max((max(abs(c) for c in n) for n in window), default=0)
        if self.grid.points_per_axis <= 2 * radius:
            raise ReveszProblemException(
                f"Grid G = {self.grid.points_per_axis} must exceed 2 * radius(W) = {2 * radius}"
            )
        object.__setattr__(self, "window", window)

    @staticmethod
    def create(
        pattern: SignSupportPattern,
        r: SymmetricSequence,
        grid: TorusGrid,
        window_halfwidth: Optional[int] = None,
    ) -> "ReveszProblem":
        """
        Creates a problem with the window {|n|_inf <= H} u supp r u M u L.

        H defaults to twice the largest index of M u L u supp r.
        """
        if window_halfwidth is None:
            window_halfwidth = 2 * max(pattern.union.max_index(), r.radius())
        if window_halfwidth < 0:
            raise ReveszProblemException(f"Negative window half-width {window_halfwidth}")
        window = set(_box_indices(pattern.dim, window_halfwidth))
        window |= set(r.positive_support()) | set(pattern.union.elements)
        return ReveszProblem(pattern, r, tuple(window), grid)

    @staticmethod
    def from_dict(payload: Mapping, points_per_axis: int) -> "ReveszProblem":
        """
        Creates a problem from its config payload.

        Raises:
            ReveszProblemException: If the payload is malformed.
        """
        try:
            dim = int(payload.get("dim", 1))
            pattern = SignSupportPattern.from_lists(dim, payload.get("M", []), payload.get("L", []))
            r = SymmetricSequence.from_literal(payload["r"])
            halfwidth = payload.get("window_halfwidth")
            return ReveszProblem.create(
                pattern,
                r,
                TorusGrid(dim, points_per_axis),
                None if halfwidth is None else int(halfwidth),
            )
        except (KeyError, TypeError, ValueError, SeqCoreException, TrigException) as e:
            raise ReveszProblemException(f"Invalid revesz problem; {e}") from e

    @property
    def dim(self) -> int:
        return self.pattern.dim

    def with_grid(self, grid: TorusGrid) -> "ReveszProblem":
        return replace(self, grid=grid)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "M": self.pattern.M.as_list(),
            "L": self.pattern.L.as_list(),
            "r": self.r,
            "window": IndexSet(self.dim, frozenset(self.window)).as_list(),
        }


@dataclass(frozen=True)
class AlphaSolution:
    """Relaxed primal optimum with the multipliers of the grid rows."""

    value: float
    f_star: SymmetricSequence
    multipliers: np.ndarray
    lp: Mapping


@dataclass(frozen=True)
class Certificate:
    """
    A certified value and the feasible point behind it.

    Attributes:
        value (float): The certified bound.
        witness (SymmetricSequence): f' for alpha, h' for omega.
        deficit (float): Certified lower bound of the unadjusted polynomial.
        certified (CertifiedValue): The certificate of the unadjusted polynomial.
        polar_part (SymmetricSequence, optional): t in C^- for omega.
    """

    value: float
    witness: SymmetricSequence
    deficit: float
    certified: CertifiedValue
    polar_part: Optional[SymmetricSequence] = None

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": self.witness,
            "deficit": self.deficit,
            "certified": self.certified,
            "polar_part": self.polar_part,
        }


@dataclass(frozen=True)
class SpectralDual:
    """delta with r + t - delta chi_0 = nu^ for a nonnegative atomic measure nu and t in C^-."""

    value: float
    measure: AtomicMeasure
    residual: float

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "residual": self.residual,
            "atoms": len(self.measure.atoms),
            "total_mass": self.measure.total_mass,
        }


@dataclass(frozen=True)
class BracketLevel:
    """Values of one grid size; seconds is wall clock and stays out of as_dict."""

    points_per_axis: int
    alpha_relaxed: float
    alpha_certified: float
    omega_relaxed: float
    omega_window_certified: float
    omega_spectral: float
    spectral_residual: float
    alpha_certificate: Certificate
    omega_certificate: Certificate
    alpha_lp: Mapping
    omega_lp: Mapping
    seconds: float = field(default=0.0, compare=False)

    @property
    def omega_certified(self) -> float:
        return max(self.omega_window_certified, self.omega_spectral)

    @property
    def gap(self) -> float:
        return self.alpha_certified - self.omega_certified

    def as_dict(self) -> dict:
        return {
            "points_per_axis": self.points_per_axis,
            "alpha_relaxed": self.alpha_relaxed,
            "alpha_certified": self.alpha_certified,
            "omega_relaxed": self.omega_relaxed,
            "omega_window_certified": self.omega_window_certified,
            "omega_spectral": self.omega_spectral,
            "spectral_residual": self.spectral_residual,
            "omega_certified": self.omega_certified,
            "gap": self.gap,
            "alpha_deficit": self.alpha_certificate.deficit,
            "omega_deficit": self.omega_certificate.deficit,
            "alpha_lp": dict(self.alpha_lp),
            "omega_lp": dict(self.omega_lp),
        }


@dataclass(frozen=True)
class DualityBracket:
    """Certified bracket omega_certified <= omega = alpha <= alpha_certified over a schedule."""

    problem: ReveszProblem
    levels: Tuple[BracketLevel, ...]
    eps_pd: float

    @property
    def alpha_certified(self) -> float:
        return min(level.alpha_certified for level in self.levels)

    @property
    def omega_certified(self) -> float:
        return max(level.omega_certified for level in self.levels)

    @property
    def alpha_relaxed(self) -> float:
        return self.levels[-1].alpha_relaxed

    @property
    def omega_relaxed(self) -> float:
        return self.levels[-1].omega_relaxed

    @property
    def gap(self) -> float:
        return self.alpha_certified - self.omega_certified

    def gap_trace(self) -> List[float]:
        return [level.gap for level in self.levels]

    def _best(self, key) -> BracketLevel:
        return min(self.levels, key=key)

    def as_dict(self) -> dict:
        alpha_level = self._best(lambda level: level.alpha_certified)
        omega_level = self._best(lambda level: -level.omega_certified)
        omega_method = (
            "spectral_measure"
            if omega_level.omega_spectral >= omega_level.omega_window_certified
            else "window_certificate"
        )
        return {
            "problem": self.problem,
            "eps_pd": self.eps_pd,
            "levels": [level.as_dict() for level in self.levels],
            "gap": self.gap,
            "alpha_relaxed": self.alpha_relaxed,
            "omega_relaxed": self.omega_relaxed,
            "bounds": [
                {
                    "name": "alpha",
                    "value": self.alpha_certified,
                    "direction": BoundDirection.UPPER,
                    "method": "shifted_primal_certificate",
                    "points_per_axis": alpha_level.points_per_axis,
                },
                {
                    "name": "omega",
                    "value": self.omega_certified,
                    "direction": BoundDirection.LOWER,
                    "method": omega_method,
                    "points_per_axis": omega_level.points_per_axis,
                },
            ],
            "witnesses": {
                "f": alpha_level.alpha_certificate.witness,
                "h": omega_level.omega_certificate.witness,
                "t": omega_level.omega_certificate.polar_part,
            },
        }

    def timing(self) -> List[dict]:
        return [{"points_per_axis": level.points_per_axis, "seconds": level.seconds} for level in self.levels]


def adjusted_alpha(value: float, deficit: float, r0: float = 1.0) -> float:
    """Returns (value + s r0) / (1 + s) with s = max(0, -deficit)."""
    s = max(0.0, -deficit)
    return (value + s * r0) / (1.0 + s)


def adjusted_omega(delta: float, deficit: float) -> float:
    """Returns delta - s with s = max(0, -deficit)."""
    return delta + min(0.0, deficit)


def weak_duality_pairing(f: SymmetricSequence, delta: float, r: SymmetricSequence) -> float:
    """Returns pairing(f, delta chi_0 - r), which is <= 0 for f in C & P with f(0) = 1 and delta <= omega."""
    return pairing(f, SymmetricSequence.chi0(f.dim).scaled(delta) - r)


def _lp_summary(outcome) -> dict:
    return {
        "status": outcome.status,
        "iterations": outcome.iterations,
        "duality_gap": outcome.duality_gap,
        "primal_residual": outcome.primal_residual,
        "dual_residual": outcome.dual_residual,
    }


class ReveszSolver(ConeDualBase):
    """Solver for the alpha / omega pair."""

    def _label(self, kind: str, p: ReveszProblem) -> str:
        return f"revesz_{kind}_d{p.dim}_G{p.grid.points_per_axis}"

    def _grid_cosines(self, p: ReveszProblem, indices: Sequence[MultiIndex]) -> Tuple[np.ndarray, np.ndarray]:
        """Half-grid indices and the matrix 2 cos(n.x_j), shape (points, len(indices))."""
        idx = p.grid.half_indices()
        if not indices:
            return idx, np.zeros((idx.shape[0], 0))
        support = np.array(indices, dtype=np.int64).reshape(len(indices), p.dim)
        return idx, 2.0 * np.cos(grid_phases(support, idx, p.grid.points_per_axis))

    def _alpha_program(self, p: ReveszProblem) -> Tuple[LinearProgram, Tuple[MultiIndex, ...], np.ndarray]:
        variables = tuple(p.pattern.union)
        idx, cosines = self._grid_cosines(p, variables)
        nonneg, nonpos = p.pattern.nonneg, p.pattern.nonpos
        lower = np.array([0.0 if n in nonneg else -np.inf for n in variables])
        upper = np.array([0.0 if n in nonpos else np.inf for n in variables])
        program = LinearProgram(
            sense=Sense.MIN,
            objective=np.array([2.0 * p.r.value_at(n) for n in variables]),
            matrix=cosines,
            relations=(Relation.GE,) * idx.shape[0],
            rhs=np.full(idx.shape[0], -1.0),
            lower=lower,
            upper=upper,
            constant=p.r.value_at(zero_index(p.dim)),
            name=self._label("alpha", p),
        )
        return program, variables, idx

    def solve_alpha(self, p: ReveszProblem) -> AlphaSolution:
        """
        Solves the grid relaxation of alpha.

        Variables are f(n), n in M u L, with f(0) = 1 fixed, f free on M & L,
        f >= 0 on M - L and f <= 0 on L - M; every half-grid point carries
        f^(x_j) >= 0; the objective is pairing(f, r).

        Raises:
            SolverFailureException: If the LP is infeasible or unbounded, which chi_0 and
                G > 2 radius(W) rule out.
        """
        self.check_dim(p.dim)
        program, variables, _ = self._alpha_program(p)
        outcome = self.solve_lp(program, program.name)
        if not outcome.is_optimal:
            raise SolverFailureException(f"{program.name}: impossible status {outcome.status}")
        values = {n: float(v) for n, v in zip(variables, outcome.x)}
        values[zero_index(p.dim)] = 1.0
        self._logger.info("%s: alpha_relaxed = %.12g", program.name, outcome.objective)
        return AlphaSolution(
            value=float(outcome.objective),
            f_star=SymmetricSequence(p.dim, values),
            multipliers=outcome.duals,
            lp=_lp_summary(outcome),
        )

    def solve_alpha_relaxed(self, p: ReveszProblem) -> Tuple[float, SymmetricSequence]:
        """Returns (value, f_star) of the grid relaxation; value <= alpha."""
        solution = self.solve_alpha(p)
        return solution.value, solution.f_star

    def certify_alpha(self, p: ReveszProblem, f_star: SymmetricSequence, value: float) -> Certificate:
        """
        Converts a relaxed optimum into a certified upper bound on alpha.

        f_star is projected onto C; with m the certified lower bound of its
        cosine polynomial and s = max(0, -m), f' = (f + s chi_0) / (1 + s) lies in
        C & P & {f(0) = 1}, and pairing(f', r) is returned.
        """
        projected = project_to_C(f_star, p.pattern)
        certified = self.certify(projected, p.grid)
        deficit = certified.lower_bound
        s = max(0.0, -deficit)
        shifted = SymmetricSequence(
            p.dim,
            {n: (v + s) / (1.0 + s) if not any(n) else v / (1.0 + s) for n, v in projected.entries.items()},
        )
        bound = pairing(shifted, p.r)
        self._logger.debug(
            "certify_alpha: relaxed %.12g, deficit %.3e, certified %.12g", value, deficit, bound
        )
        return Certificate(value=bound, witness=shifted, deficit=deficit, certified=certified)

    def _omega_program(self, p: ReveszProblem) -> Tuple[LinearProgram, Tuple[MultiIndex, ...]]:
        free = p.pattern.free
        variables = tuple(n for n in p.window if n not in free)
        idx, cosines = self._grid_cosines(p, variables)
        nonneg, nonpos = p.pattern.nonneg, p.pattern.nonpos
        lower = np.array([0.0 if n in nonpos else -np.inf for n in variables] + [-np.inf])
        upper = np.array([0.0 if n in nonneg else np.inf for n in variables] + [np.inf])
        objective = np.zeros(len(variables) + 1)
        objective[-1] = 1.0
        matrix = np.hstack([cosines, -np.ones((idx.shape[0], 1))])
        return (
            LinearProgram(
                sense=Sense.MAX,
                objective=objective,
                matrix=matrix,
                relations=(Relation.GE,) * idx.shape[0],
                rhs=-grid_values(p.r, p.grid, idx),
                lower=lower,
                upper=upper,
                name=self._label("omega", p),
            ),
            variables,
        )

    def solve_omega(self, p: ReveszProblem) -> Tuple[float, SymmetricSequence, SymmetricSequence, dict]:
        """
        Solves the grid relaxation of omega on the window.

        Variables are delta and t(n) for n in W (t = 0 on M & L, t <= 0 on M - L,
        t >= 0 on L - M); h = r + t - delta chi_0 must satisfy h^(x_j) >= 0 on the
        grid; delta is maximised. The value is >= omega.

        Returns:
            tuple: (delta, t_star, h_star, LP summary).

        Raises:
            WindowDegeneracyException: If the LP is unbounded.
            SolverFailureException: If the LP is infeasible.
        """
        self.check_dim(p.dim)
        program, variables = self._omega_program(p)
        outcome = self.solve_lp(program, program.name)
        if outcome.status == LpStatus.UNBOUNDED:
            raise WindowDegeneracyException(
                f"{program.name}: dual LP unbounded with window {list(p.window)} "
                f"and {program.num_rows} grid rows"
            )
        if not outcome.is_optimal:
            raise SolverFailureException(f"{program.name}: impossible status {outcome.status}")
        delta = float(outcome.x[-1])
        t_star = SymmetricSequence(p.dim, {n: float(v) for n, v in zip(variables, outcome.x[:-1])})
        h_star = p.r + t_star - SymmetricSequence.chi0(p.dim).scaled(delta)
        self._logger.info("%s: omega_relaxed = %.12g", program.name, delta)
        return delta, t_star, h_star, _lp_summary(outcome)

    def solve_omega_relaxed(
        self, p: ReveszProblem
    ) -> Tuple[float, SymmetricSequence, SymmetricSequence]:
        """Returns (delta, t_star, h_star) of the grid relaxation; delta >= omega."""
        delta, t_star, h_star, _ = self.solve_omega(p)
        return delta, t_star, h_star

    def certify_omega(
        self,
        p: ReveszProblem,
        delta: float,
        t_star: SymmetricSequence,
        h_star: SymmetricSequence,
    ) -> Certificate:
        """
        Converts a relaxed dual optimum into a certified lower bound on omega.

        t_star is projected onto C^- and h = r + t - delta chi_0 rebuilt; with m
        the certified lower bound of h^, delta' = delta + min(0, m) and
        h' = h + max(0, -m) chi_0 is certified positive definite.
        """
        t = project_to_Cminus(t_star, p.pattern)
        h = p.r + t - SymmetricSequence.chi0(p.dim).scaled(delta)
        certified = self.certify(h, p.grid)
        deficit = certified.lower_bound
        bound = adjusted_omega(delta, deficit)
        shifted = h + SymmetricSequence.chi0(p.dim).scaled(delta - bound)
        return Certificate(value=bound, witness=shifted, deficit=deficit, certified=certified, polar_part=t)

    def omega_from_measure(self, p: ReveszProblem, multipliers: np.ndarray) -> SpectralDual:
        """
        Reads the alpha LP's grid-row multipliers as a certified lower bound on omega.

        The multipliers w_j >= 0 define nu = sum_j w_j delta_{x_j}, and
        h(n) = sum_j w_j cos(n.x_j) is positive definite. With
        delta = r(0) - nu(T^d), t = h - r + delta chi_0 satisfies t(0) = 0 and the
        C^- sign rules on M u L up to the LP's pricing error; that error is
        measured in l1 and subtracted from delta, so the result is <= omega.
        """
        idx = p.grid.half_indices()
        weights = np.maximum(np.asarray(multipliers, dtype=float), 0.0)
        points = idx * p.grid.spacing
        measure = AtomicMeasure.from_points(points.tolist(), weights.tolist(), dim=p.dim)
        mass = math.fsum(weights)
        delta = p.r.value_at(zero_index(p.dim)) - mass
        variables = tuple(p.pattern.union)
        violations = []
        if variables and weights.size:
            _, cosines = self._grid_cosines(p, variables)
            h = 0.5 * (weights @ cosines)
            nonneg, nonpos = p.pattern.nonneg, p.pattern.nonpos
            for n, h_n in zip(variables, h):
                t_n = float(h_n) - p.r.value_at(n)
                if n in nonneg:
                    violations.append(max(t_n, 0.0))
                elif n in nonpos:
                    violations.append(max(-t_n, 0.0))
                else:
                    violations.append(abs(t_n))
        residual = 2.0 * math.fsum(violations)
        return SpectralDual(value=delta - residual, measure=measure, residual=residual)

    def run_level(self, p: ReveszProblem) -> BracketLevel:
        """
        Solves and certifies both sides and computes the spectral dual on one grid.

        Raises:
            SoundnessException: If omega_certified > alpha_certified + tolerance.
        """
        started = time.perf_counter()
        alpha = self.solve_alpha(p)
        alpha_certificate = self.certify_alpha(p, alpha.f_star, alpha.value)
        delta, t_star, h_star, omega_lp = self.solve_omega(p)
        omega_certificate = self.certify_omega(p, delta, t_star, h_star)
        spectral = self.omega_from_measure(p, alpha.multipliers)
        level = BracketLevel(
            points_per_axis=p.grid.points_per_axis,
            alpha_relaxed=alpha.value,
            alpha_certified=alpha_certificate.value,
            omega_relaxed=delta,
            omega_window_certified=omega_certificate.value,
            omega_spectral=spectral.value,
            spectral_residual=spectral.residual,
            alpha_certificate=alpha_certificate,
            omega_certificate=omega_certificate,
            alpha_lp=alpha.lp,
            omega_lp=omega_lp,
            seconds=time.perf_counter() - started,
        )
        tolerance = 2.0 * self.settings.eps_pd + WEAK_DUALITY_SLACK
        if level.omega_certified > level.alpha_certified + tolerance:
            raise SoundnessException(
                f"Weak duality violated at G = {level.points_per_axis}: omega_certified "
                f"{level.omega_certified!r} > alpha_certified {level.alpha_certified!r}"
            )
        self._logger.info(
            "G = %d: alpha in [%.12g, %.12g], omega in [%.12g, %.12g]",
            level.points_per_axis,
            level.alpha_relaxed,
            level.alpha_certified,
            level.omega_certified,
            level.omega_relaxed,
        )
        return level

    def run_bracket(self, p: ReveszProblem, schedule: Sequence[int]) -> DualityBracket:
        """
        Runs every grid size of the schedule and assembles the bracket.

        Levels run on the worker pool; the result is ordered by the schedule.

        Raises:
            ReveszProblemException: If the schedule is empty.
            SoundnessException: If weak duality fails at a level or overall.
        """
        if not schedule:
            raise ReveszProblemException("Empty refinement schedule")
        problems = [p.with_grid(TorusGrid(p.dim, int(size))) for size in schedule]
        levels = tuple(self.map(self.run_level, problems))
        bracket = DualityBracket(p, levels, self.settings.eps_pd)
        if bracket.omega_certified > bracket.alpha_certified + 2.0 * self.settings.eps_pd + WEAK_DUALITY_SLACK:
            raise SoundnessException(
                f"Weak duality violated across levels: {bracket.omega_certified!r} > {bracket.alpha_certified!r}"
            )
        return bracket
