"""
Oracle Module.

This module provides brute-force verifiers that are independent of the LP
solvers: exhaustive parameter sweeps with grid feasibility, and finite
Toeplitz-section checks of positive definiteness.

Classes:
    - SweepAxis: One swept coefficient.
    - SweepSpec: A full sweep.
    - SweepResult: Best point of a sweep, or none feasible.

Exceptions:
    - OracleException: Base class for this module.
    - SweepCapException: The sweep has more points than its cap.

Functions:
    - sweep_optimize: Exhaustive sweep over a product grid of coefficients.
    - toeplitz_necessary_check: Positive semidefiniteness of a Toeplitz section.
    - nonpd_witness: f in P with pairing(f, h) < 0 from a negative Toeplitz eigenvalue.

Usage:
    >>> from conedual.oracle import SweepAxis, SweepSpec, sweep_optimize
    >>> from conedual.seqcore import SymmetricSequence
    >>> from conedual.trig import TorusGrid
    >>> spec = SweepSpec(
    ...     axes=(SweepAxis(1, -1.0, 1.0, 1e-2),),
    ...     fixed=SymmetricSequence.chi0(1),
    ...     objective="pairing",
    ...     reference=SymmetricSequence.from_values([1.0, 1.0]),
    ...     grid=TorusGrid(1, 1024),
    ... )
    >>> sweep_optimize(spec).value
    0.0
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import eigh, ldl, toeplitz

from conedual.enumerations.lp_terms import Sense
from conedual.seqcore import (
    DimensionMismatchException,
    IndexLike,
    MultiIndex,
    SymmetricSequence,
    as_index,
    canonical,
    pairing,
    zero_index,
)
from conedual.trig import TorusGrid, autocorrelation, grid_values
from conedual.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

SWEEP_CAP = 10**8
FEASIBILITY_TOL = 1e-12
TOEPLITZ_TOL = 1e-10
PREDICATES = ("nonneg_on_grid",)
OBJECTIVES = ("pairing", "value_at_zero")

_CHUNK_ELEMENTS = 1 << 22


class OracleException(Exception):
    """Base class for oracle errors."""


class SweepCapException(OracleException):
    """Exception for sweeps with more points than the configured cap."""


@dataclass(frozen=True)
class SweepAxis:
    """
    Swept coefficient f(index) in start, start + step, ... up to stop.

    Points are computed as start + i * step, never by accumulation.
    """

    index: IndexLike
    start: float
    stop: float
    step: float

    def __post_init__(self) -> None:
        if not self.step > 0 or self.stop < self.start:
            raise OracleException(f"Invalid axis [{self.start}, {self.stop}] step {self.step}")

    @property
    def count(self) -> int:
        return int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1

    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count, dtype=float)


@dataclass(frozen=True)
class SweepSpec:
    """
    Exhaustive sweep over the product of the axes.

    Attributes:
        axes (tuple): Swept coefficients; indices are distinct up to sign.
        fixed (SymmetricSequence): Coefficients that are not swept.
        grid (TorusGrid): Feasibility grid.
        predicate (str): Feasibility predicate, one of PREDICATES.
        objective (str): "pairing" with the reference or "value_at_zero".
        reference (SymmetricSequence, optional): The second argument of the pairing.
        sense (str): Sense.MIN or Sense.MAX.
        cap (int): Largest admissible number of sweep points.
    """

    axes: Tuple[SweepAxis, ...]
    fixed: SymmetricSequence
    grid: TorusGrid
    predicate: str = "nonneg_on_grid"
    objective: str = "value_at_zero"
    reference: Optional[SymmetricSequence] = None
    sense: str = Sense.MIN
    cap: int = SWEEP_CAP

    def __post_init__(self) -> None:
        if not self.axes:
            raise OracleException("A sweep needs at least one axis")
        if self.predicate not in PREDICATES:
            raise OracleException(f"Unknown predicate {self.predicate!r}")
        if self.objective not in OBJECTIVES:
            raise OracleException(f"Unknown objective {self.objective!r}")
        if self.objective == "pairing" and self.reference is None:
            raise OracleException("The pairing objective needs a reference sequence")
        if self.sense not in (Sense.MIN, Sense.MAX):
            raise OracleException(f"Unknown sense {self.sense!r}")
        if self.fixed.dim != self.grid.dim:
            raise DimensionMismatchException("Fixed coefficients and grid differ in dimension")
        keys = self.keys()
        if len(set(keys)) != len(keys):
            raise OracleException(f"Axes repeat an index: {keys}")
        if any(key in self.fixed.entries for key in keys):
            raise OracleException("An axis index is also fixed")

    @property
    def dim(self) -> int:
        return self.grid.dim

    def keys(self) -> List[MultiIndex]:
        return [canonical(as_index(axis.index, self.dim)) for axis in self.axes]

    @property
    def size(self) -> int:
        return math.prod(axis.count for axis in self.axes)


@dataclass(frozen=True)
class SweepResult:
    """Best feasible sweep point; value and point are None when none is feasible."""

    value: Optional[float]
    point: Optional[Tuple[float, ...]]
    evaluated: int
    feasible_count: int
    sequence: Optional[SymmetricSequence] = field(default=None, compare=False)

    @property
    def feasible(self) -> bool:
        return self.point is not None

    def as_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "value": self.value,
            "point": None if self.point is None else list(self.point),
            "evaluated": self.evaluated,
            "feasible_count": self.feasible_count,
        }


def _objective_terms(spec: SweepSpec) -> Tuple[np.ndarray, float]:
    """Linear objective: value = constant + coefficients . point."""
    keys = spec.keys()
    if spec.objective == "value_at_zero":
        zero = zero_index(spec.dim)
        return np.array([1.0 if key == zero else 0.0 for key in keys]), spec.fixed.value_at(zero)
    weights = [1.0 if key == zero_index(spec.dim) else 2.0 for key in keys]
    coefficients = np.array([w * spec.reference.value_at(key) for w, key in zip(weights, keys)])
    return coefficients, pairing(spec.fixed, spec.reference)


def sweep_optimize(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """
    Sweeps every point of the product grid of the axes.

    A point is feasible when the cosine polynomial it defines is >= -1e-12 on
    every half-grid point. Chunks of points are evaluated as matrix products
    on the worker pool; among equally good points the first in sweep order
    (last axis fastest) wins.

    Args:
        spec (SweepSpec): The sweep.
        workers (int, optional): Worker-pool size.

    Returns:
        SweepResult: The best point, or a result with feasible == False.

    Raises:
        SweepCapException: If spec.size > spec.cap.
    """
    total = spec.size
    if total > spec.cap:
        raise SweepCapException(f"Sweep of {total} points exceeds the cap {spec.cap}")
    idx = spec.grid.half_indices()
    keys = spec.keys()
    basis = np.stack(
        [grid_values(SymmetricSequence(spec.dim, {key: 1.0}), spec.grid, idx) for key in keys]
    )
    offset = grid_values(spec.fixed, spec.grid, idx)
    coefficients, constant = _objective_terms(spec)
    axis_values = [axis.values() for axis in spec.axes]
    shape = tuple(values.size for values in axis_values)
    rows = max(1, _CHUNK_ELEMENTS // max(1, idx.shape[0]))
    bounds = [(start, min(start + rows, total)) for start in range(0, total, rows)]
    maximize = spec.sense == Sense.MAX

    def evaluate(chunk: Tuple[int, int]) -> Tuple[Optional[float], Optional[int], int]:
        flat = np.arange(chunk[0], chunk[1])
        positions = np.unravel_index(flat, shape)
        points = np.stack([values[pos] for values, pos in zip(axis_values, positions)], axis=1)
        minima = (points @ basis + offset).min(axis=1)
        feasible = minima >= -FEASIBILITY_TOL
        count = int(np.count_nonzero(feasible))
        if count == 0:
            return None, None, 0
        objective = constant + points @ coefficients
        masked = np.where(feasible, objective, -np.inf if maximize else np.inf)
        best = int(np.argmax(masked) if maximize else np.argmin(masked))
        return float(objective[best]), int(flat[best]), count

    best_value: Optional[float] = None
    best_flat: Optional[int] = None
    feasible_count = 0
    for value, flat, count in parallel_map(evaluate, bounds, workers):
        feasible_count += count
        if value is None:
            continue
        if best_value is None or (value > best_value if maximize else value < best_value):
            best_value, best_flat = value, flat
    logger.debug("Sweep of %d points: %d feasible, best %s", total, feasible_count, best_value)
    if best_flat is None:
        return SweepResult(None, None, total, 0)
    positions = np.unravel_index(best_flat, shape)
    point = tuple(float(values[pos]) for values, pos in zip(axis_values, positions))
    sequence = spec.fixed + SymmetricSequence(spec.dim, dict(zip(keys, point)))
    return SweepResult(best_value, point, total, feasible_count, sequence)


def _toeplitz_section(h: SymmetricSequence, order: int) -> np.ndarray:
    if h.dim != 1:
        raise DimensionMismatchException("Toeplitz sections are defined for d = 1 only")
    if order < 1:
        raise OracleException(f"Order must be >= 1, got {order}")
    return toeplitz([h.value_at(k) for k in range(order + 1)])


def toeplitz_necessary_check(h: SymmetricSequence, order: int, tol: float = TOEPLITZ_TOL) -> bool:
    """
    Tests the (order+1) x (order+1) section T_ij = h(|i - j|) for positive semidefiniteness.

    T is factored as P L D L^T P^T by Bunch-Kaufman pivoted symmetric
    elimination; T and the block-diagonal D are congruent, so T is positive
    semidefinite iff the eigenvalues of D are >= -tol.

    False proves that h is not positive definite; True is only necessary.
    """
    _, d, _ = ldl(_toeplitz_section(h, order))
    return bool(np.all(np.linalg.eigvalsh(d) >= -tol))


def nonpd_witness(h: SymmetricSequence, order: int) -> Optional[Tuple[SymmetricSequence, float]]:
    """
    Returns (f, lambda) with f = c * c~ in P and pairing(f, h) = lambda < 0, or None.

    c is the eigenvector of the smallest eigenvalue lambda of the Toeplitz
    section; None means that section is positive semidefinite.
    """
    values, vectors = eigh(_toeplitz_section(h, order))
    if values[0] >= 0:
        return None
    f = autocorrelation(vectors[:, 0])
    return f, float(values[0])
