"""
Wiener Problem Module.

This module brackets C(L, N) = K(L, N), where

    C(L, N) = sup over nonzero f >= 0 with f^ >= 0 of
              sum_{|k| <= LN} f(k) / sum_{|k| <= N} f(k) - 1,
    K(L, N) = inf { h(0) : h positive definite, h(k) <= -1 for N < |k| <= LN,
                   h(k) <= 0 for |k| > LN }.

Upper bounds come from a truncated, grid-relaxed LP for K whose optimum is
certified positive definite; lower bounds come from autocorrelations u * u~
of nonnegative u, which lie in C & P exactly.

Classes:
    - WienerProblem: L, N, truncation R and grid.
    - WienerUpper: A certified upper bound on K and its witness.
    - WienerLower: A lower bound on C and its witness.
    - WienerLevel: One (R, G) entry of a bracket.
    - WienerBracket: Lower and upper bounds over a schedule.
    - WienerSolver: The solver.

Exceptions:
    - WienerProblemException: L, N, R, u or a denominator violates its invariant.

Functions:
    - witness_w: The explicit dual witness w_{L,N}.
    - autocorrelation_candidate: u * u~ for nonnegative u.
    - ratio: The C(L, N) quotient of f, minus one.
    - start_set: Deterministic starting points of the lower-bound search.

Usage:
    >>> from conedual.wiener import WienerProblem, WienerSolver
    >>> solver = WienerSolver()
    >>> value, h = solver.solve_K_upper(WienerProblem.create(2, 1, R=2, points_per_axis=64))
    >>> round(value, 6)
    2.0
"""

import math
import time
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from conedual.cones import DualDecomposition, exact_split
from conedual.conedual_base import ConeDualBase, SolverFailureException, SoundnessException
from conedual.enumerations.lp_terms import Relation, Sense
from conedual.enumerations.status import BoundDirection
from conedual.lp import LinearProgram
from conedual.seqcore import SymmetricSequence, indicator_interval
from conedual.trig import CertifiedValue, TorusGrid, autocorrelation, grid_phases

SANDWICH_SLACK = 1e-7


class WienerProblemException(Exception):
    """Exception for parameters and sequences that violate the problem's invariants."""


@dataclass(frozen=True)
class WienerProblem:
    """
    Truncated, discretized K(L, N) problem.

    Attributes:
        L (int): L >= 2.
        N (int): N >= 1.
        R (int): Support half-width of h, R >= L N.
        grid (TorusGrid): Grid on T with G > 2 R.
    """

    L: int
    N: int
    R: int
    grid: TorusGrid

    def __post_init__(self) -> None:
        if self.L < 2 or self.N < 1:
            raise WienerProblemException(f"Need L >= 2 and N >= 1, got L = {self.L}, N = {self.N}")
        if self.R < self.L * self.N:
            raise WienerProblemException(f"R = {self.R} is below L N = {self.L * self.N}")
        if self.grid.dim != 1:
            raise WienerProblemException("The Wiener problem lives on Z")
        if self.grid.points_per_axis <= 2 * self.R:
            raise WienerProblemException(
                f"Grid G = {self.grid.points_per_axis} must exceed 2 R = {2 * self.R}"
            )

    @staticmethod
    def create(L: int, N: int, R: Optional[int] = None, points_per_axis: int = 1024) -> "WienerProblem":
        """Creates a problem; R defaults to 4 L N."""
        return WienerProblem(L, N, 4 * L * N if R is None else R, TorusGrid(1, points_per_axis))

    @staticmethod
    def from_dict(payload: Mapping) -> "WienerProblem":
        """Creates the first (R, G) problem of a config payload."""
        try:
            L, N = int(payload["L"]), int(payload["N"])
            R = payload.get("R")
            G = payload.get("G")
            first_R = int(R[0]) if isinstance(R, list) and R else (None if R is None else int(R))
            first_G = int(G[0]) if isinstance(G, list) and G else (1024 if G is None else int(G))
            return WienerProblem.create(L, N, first_R, first_G)
        except (KeyError, TypeError, ValueError) as e:
            raise WienerProblemException(f"Invalid wiener problem; {e}") from e

    @property
    def annulus(self) -> Tuple[int, int]:
        return self.N + 1, self.L * self.N

    def as_dict(self) -> dict:
        return {"L": self.L, "N": self.N, "R": self.R, "G": self.grid.points_per_axis}


def witness_w(L: int, N: int) -> SymmetricSequence:
    """Returns w(0) = 2(L-1)N, w(k) = -1 for N < |k| <= LN, and 0 elsewhere."""
    if L < 2 or N < 1:
        raise WienerProblemException(f"Need L >= 2 and N >= 1, got L = {L}, N = {N}")
    values = {(0,): 2.0 * (L - 1) * N}
    values.update({(k,): -1.0 for k in range(N + 1, L * N + 1)})
    return SymmetricSequence(1, values)


def autocorrelation_candidate(u: Sequence[float]) -> SymmetricSequence:
    """
    Returns f(k) = sum_i u(i) u(i + |k|).

    For u >= 0, f >= 0 entrywise and f^ = |u^|^2 >= 0, so f lies in C & P exactly.

    Raises:
        WienerProblemException: If u has a negative entry or is all zero.
    """
    values = np.asarray(list(u), dtype=float)
    if values.size == 0 or np.any(values < 0) or not np.any(values > 0):
        raise WienerProblemException(f"u must be nonnegative and nonzero, got {values.tolist()}")
    return autocorrelation(values)


def _window_sum(f: SymmetricSequence, radius: int) -> float:
    return math.fsum([f.value_at(0)] + [2.0 * f.value_at(k) for k in range(1, radius + 1)])


def ratio(f: SymmetricSequence, L: int, N: int) -> float:
    """
    Returns sum_{|k| <= LN} f(k) / sum_{|k| <= N} f(k) - 1.

    Raises:
        WienerProblemException: If the denominator is not positive.
    """
    denominator = _window_sum(f, N)
    if not denominator > 0:
        raise WienerProblemException(f"Denominator {denominator} is not positive")
    return _window_sum(f, L * N) / denominator - 1.0


def start_set(L: int, N: int, max_length: int) -> List[np.ndarray]:
    """
    Returns the deterministic starting points of the lower-bound search.

    These are chi_0, the boxes of lengths N+1 .. LN+1 and combs with tooth
    spacing N+1 and at least two teeth, all within max_length.
    """
    starts = [np.ones(1)]
    for length in range(N + 1, min(L * N + 1, max_length) + 1):
        starts.append(np.ones(length))
    teeth = 2
    while (teeth - 1) * (N + 1) + 1 <= max_length:
        comb = np.zeros((teeth - 1) * (N + 1) + 1)
        comb[:: N + 1] = 1.0
        starts.append(comb)
        teeth += 1
    return starts


@dataclass(frozen=True)
class WienerUpper:
    """Certified upper bound on K(L, N) with the positive definite witness h."""

    value: float
    h: SymmetricSequence
    lp_value: float
    deficit: float
    certified: Optional[CertifiedValue]
    source: str

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "h": self.h,
            "lp_value": self.lp_value,
            "deficit": self.deficit,
            "certified": self.certified,
            "source": self.source,
        }


@dataclass(frozen=True)
class WienerLower:
    """Lower bound ratio(u * u~) on C(L, N)."""

    value: float
    u: Tuple[float, ...]
    f: SymmetricSequence
    start_index: int
    line_searches: int

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "u": list(self.u),
            "f": self.f,
            "start_index": self.start_index,
            "line_searches": self.line_searches,
        }


@dataclass(frozen=True)
class WienerLevel:
    """One (R, G) entry; seconds is wall clock and stays out of as_dict."""

    R: int
    points_per_axis: int
    upper: WienerUpper
    seconds: float = field(default=0.0, compare=False)

    def as_dict(self) -> dict:
        return {
            "R": self.R,
            "points_per_axis": self.points_per_axis,
            "upper": self.upper.value,
            "lp_value": self.upper.lp_value,
            "deficit": self.upper.deficit,
            "source": self.upper.source,
        }


@dataclass(frozen=True)
class WienerBracket:
    """lower <= C(L, N) = K(L, N) <= upper, with witnesses."""

    L: int
    N: int
    lower: WienerLower
    levels: Tuple[WienerLevel, ...]
    eps_pd: float

    @property
    def upper(self) -> float:
        return min(level.upper.value for level in self.levels)

    @property
    def width(self) -> float:
        return self.upper - self.lower.value

    def best_level(self) -> WienerLevel:
        return min(self.levels, key=lambda level: level.upper.value)

    def as_dict(self) -> dict:
        best = self.best_level()
        return {
            "L": self.L,
            "N": self.N,
            "eps_pd": self.eps_pd,
            "levels": [level.as_dict() for level in self.levels],
            "width": self.width,
            "bounds": [
                {
                    "name": "C",
                    "value": self.lower.value,
                    "direction": BoundDirection.LOWER,
                    "method": "autocorrelation_search",
                },
                {
                    "name": "K",
                    "value": self.upper,
                    "direction": BoundDirection.UPPER,
                    "method": "certified_dual_lp" if best.upper.source == "lp" else "explicit_witness",
                    "R": best.R,
                    "points_per_axis": best.points_per_axis,
                },
            ],
            "witnesses": {
                "u_star": list(self.lower.u),
                "f_star": self.lower.f,
                "h_star": best.upper.h,
                "w": witness_w(self.L, self.N),
            },
            "baseline_w0": 2.0 * (self.L - 1) * self.N,
            "primal_window_lp": "not reported: a truncated grid LP for C(L, N) bounds it in neither direction",
        }

    def timing(self) -> List[dict]:
        return [
            {"R": level.R, "points_per_axis": level.points_per_axis, "seconds": level.seconds}
            for level in self.levels
        ]


class WienerSolver(ConeDualBase):
    """Solver for the C(L, N) / K(L, N) bracket."""

    def _upper_program(self, p: WienerProblem) -> LinearProgram:
        idx = p.grid.half_indices()
        orders = np.arange(p.R + 1, dtype=np.int64).reshape(-1, 1)
        matrix = 2.0 * np.cos(grid_phases(orders, idx, p.grid.points_per_axis))
        matrix[:, 0] = 1.0
        upper = np.full(p.R + 1, np.inf)
        low, high = p.annulus
        upper[low:high + 1] = -1.0
        upper[high + 1:] = 0.0
        objective = np.zeros(p.R + 1)
        objective[0] = 1.0
        return LinearProgram(
            sense=Sense.MIN,
            objective=objective,
            matrix=matrix,
            relations=(Relation.GE,) * idx.shape[0],
            rhs=np.zeros(idx.shape[0]),
            lower=np.full(p.R + 1, -np.inf),
            upper=upper,
            name=f"wiener_K_L{p.L}_N{p.N}_R{p.R}_G{p.grid.points_per_axis}",
        )

    def upper_bound(self, p: WienerProblem) -> WienerUpper:
        """
        Certified upper bound on K(L, N) from the truncated grid LP.

        The LP optimum is clipped to its bounds, its cosine polynomial certified,
        and h(0) raised by the certified deficit. w_{L,N} is exactly feasible, so
        the smaller of the two values is returned with its witness.

        Raises:
            SolverFailureException: If the LP is not optimal, which w_{L,N} rules out.
        """
        program = self._upper_program(p)
        outcome = self.solve_lp(program, program.name)
        if not outcome.is_optimal:
            raise SolverFailureException(f"{program.name}: impossible status {outcome.status}")
        x = np.minimum(outcome.x, program.upper)
        h = SymmetricSequence.from_values(x.tolist())
        certified = self.certify(h, p.grid)
        deficit = certified.lower_bound
        if deficit < 0:
            h = h + SymmetricSequence.chi0(1).scaled(-deficit)
        value = h.value_at(0)
        baseline = 2.0 * (p.L - 1) * p.N
        self._logger.info("%s: LP %.12g, certified %.12g", program.name, outcome.objective, value)
        if baseline <= value:
            return WienerUpper(baseline, witness_w(p.L, p.N), float(outcome.objective), deficit, certified, "witness")
        return WienerUpper(value, h, float(outcome.objective), deficit, certified, "lp")

    def solve_K_upper(self, p: WienerProblem) -> Tuple[float, SymmetricSequence]:
        """Returns (value, h_star) with value >= K(L, N) - eps_pd."""
        upper = self.upper_bound(p)
        return upper.value, upper.h

    def _ascend(
        self,
        u: np.ndarray,
        L: int,
        N: int,
        budget: int,
        u_max: float,
    ) -> Tuple[float, np.ndarray, int]:
        """Cyclic coordinate ascent with bounded scalar line searches on [0, u_max]."""
        u = u_max * u / np.max(u)

        def score(vector: np.ndarray) -> float:
            if not np.any(vector > 0):
                return -math.inf
            return ratio(autocorrelation(vector), L, N)

        best = score(u)
        used = 0
        while used < budget:
            improved = False
            for i in range(u.size):
                if used >= budget:
                    break
                trial = u.copy()

                def negative(v: float, position: int = i) -> float:
                    trial[position] = v
                    value = score(trial)
                    return math.inf if value == -math.inf else -value

                result = minimize_scalar(negative, bounds=(0.0, u_max), method="bounded")
                used += 1
                candidates = [(float(result.x), -float(result.fun)), (0.0, -negative(0.0)), (u_max, -negative(u_max))]
                v, value = max(candidates, key=lambda pair: pair[1])
                if value > best + 1e-12:
                    u[i] = v
                    u = u_max * u / np.max(u)
                    best = score(u)
                    improved = True
            if not improved:
                break
        return best, u, used

    def search_C_lower(
        self,
        p: WienerProblem,
        budget: int,
        seed: int = 0,
        max_length: Optional[int] = None,
        restarts: int = 16,
        u_max: float = 1.0,
    ) -> WienerLower:
        """
        Searches ratio(u * u~) over nonnegative u by multi-start coordinate ascent.

        Starts are the deterministic start set plus `restarts` random vectors,
        restart k drawing from numpy.random.default_rng([seed, k]). The budget
        counts line searches and is split evenly over the starts; budget 0
        scores the deterministic start set only. Every returned value is a
        valid lower bound.

        Raises:
            WienerProblemException: If budget < 0, max_length < 1, restarts < 0 or u_max <= 0.
        """
        if budget < 0 or restarts < 0 or not u_max > 0:
            raise WienerProblemException(
                f"Invalid search budget {budget}, restarts {restarts} or u_max {u_max}"
            )
        if max_length is not None and max_length < 1:
            raise WienerProblemException(f"max_length must be >= 1, got {max_length}")
        cap = 8 * p.L * p.N if max_length is None else max_length
        starts = start_set(p.L, p.N, cap)
        for k in range(restarts if budget > 0 else 0):
            rng = np.random.default_rng([seed, k])
            length = int(rng.integers(p.N + 1, max(cap, p.N + 1) + 1))
            starts.append(rng.random(min(length, cap)) * u_max + 1e-3)
        shares = [budget // len(starts) + (1 if i < budget % len(starts) else 0) for i in range(len(starts))]

        def run(item: Tuple[np.ndarray, int]) -> Tuple[float, np.ndarray, int]:
            start, share = item
            return self._ascend(np.array(start, dtype=float), p.L, p.N, share, u_max)

        results = self.map(run, list(zip(starts, shares)))
        index = max(range(len(results)), key=lambda i: (results[i][0], -i))
        value, u, _ = results[index]
        f = autocorrelation_candidate(u)
        self._logger.info("search_C_lower(L=%d, N=%d): %.12g from start %d", p.L, p.N, value, index)
        return WienerLower(
            value=ratio(f, p.L, p.N),
            u=tuple(float(c) for c in u),
            f=f,
            start_index=index,
            line_searches=sum(r[2] for r in results),
        )

    def run_level(self, p: WienerProblem) -> WienerLevel:
        started = time.perf_counter()
        upper = self.upper_bound(p)
        return WienerLevel(p.R, p.grid.points_per_axis, upper, time.perf_counter() - started)

    def run_wiener_bracket(
        self,
        p: WienerProblem,
        schedule: Optional[Sequence[Tuple[int, int]]] = None,
        budget: int = 1000,
        seed: int = 0,
        max_length: Optional[int] = None,
        restarts: int = 16,
    ) -> WienerBracket:
        """
        Brackets C(L, N) = K(L, N) over a nondecreasing (R, G) schedule.

        The schedule defaults to the single level (p.R, p.grid.points_per_axis).

        Raises:
            WienerProblemException: If the schedule is empty or decreasing.
            SoundnessException: If the lower bound exceeds the upper bound.
        """
        L, N = p.L, p.N
        if schedule is None:
            schedule = [(p.R, p.grid.points_per_axis)]
        if not schedule:
            raise WienerProblemException("Empty (R, G) schedule")
        for (r0, g0), (r1, g1) in zip(schedule, schedule[1:]):
            if r1 < r0 or g1 < g0:
                raise WienerProblemException(f"Schedule must be nondecreasing: {list(schedule)}")
        problems = [WienerProblem(L, N, int(R), TorusGrid(1, int(G))) for R, G in schedule]
        levels = tuple(self.map(self.run_level, problems))
        lower = self.search_C_lower(problems[-1], budget, seed, max_length, restarts)
        bracket = WienerBracket(L, N, lower, levels, self.settings.eps_pd)
        if lower.value > bracket.upper + self.settings.eps_pd + SANDWICH_SLACK:
            raise SoundnessException(
                f"C({L},{N}) lower bound {lower.value!r} exceeds K upper bound {bracket.upper!r}"
            )
        return bracket

    def dual_decomposition(self, h: SymmetricSequence, L: int, N: int) -> DualDecomposition:
        """
        Splits phi = (h(0) + 1) chi_[-N,N] - chi_[-LN,LN] as g + h with g >= 0.

        For h positive definite and feasible for K(L, N), g = phi - h is
        nonnegative because h(0) >= h(k).

        Raises:
            WienerProblemException: If h is not certified positive definite or some g(k) < 0,
                or phi - h is not exact in floating point.
        """
        pd = self.pd_status(h, TorusGrid(1, max(64, 4 * (h.radius() + 1))))
        if not pd.is_positive_definite:
            raise WienerProblemException(f"h is not certified positive definite ({pd.certified.status})")
        # phi(k) = h(0) on |k| <= N is (h(0) + 1) - 1 without the rounding
        level = h.value_at(0)
        phi = SymmetricSequence(1, {(k,): level if k <= N else -1.0 for k in range(L * N + 1)})
        split = exact_split(phi, h, shifts=0)
        if split is None:
            raise WienerProblemException(f"phi has no exact split with h = {h.as_dict()}")
        g = split[1]
        negative = [k for k, v in g.entries.items() if v < 0]
        if negative:
            raise WienerProblemException(f"g is negative at {negative}")
        return DualDecomposition(g, h, pd.lower_bound, pd)

    def upper_from_decomposition(self, decomposition: DualDecomposition, L: int, N: int) -> float:
        """
        Returns h(0), an upper bound on K(L, N), for phi = g + h of the form (C+1) chi_N - chi_LN.

        Raises:
            WienerProblemException: If phi has the wrong shape, g < 0 somewhere, or
                h is not certified positive definite.
        """
        g, h = decomposition.g, decomposition.h
        phi = g + h
        level = phi.value_at(N) + 1.0
        expected = indicator_interval(N).scaled(level) - indicator_interval(L * N)
        keys = set(phi.entries) | set(expected.entries)
        if any(abs(phi.value_at(k) - expected.value_at(k)) > 1e-12 * max(1.0, level) for k in keys):
            raise WienerProblemException("phi is not of the form (C+1) chi_N - chi_LN")
        if any(v < 0 for v in g.entries.values()):
            raise WienerProblemException("g has a negative entry")
        if not decomposition.pd.is_positive_definite:
            raise WienerProblemException("h is not certified positive definite")
        return h.value_at(0)
