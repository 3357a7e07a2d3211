"""
Trigonometric Polynomials Module.

This module evaluates cosine polynomials f^(x) = f(0) + 2 sum_{n in Z_+^d} f(n) cos(n.x)
of symmetric sequences on the torus T^d, discretizes the torus by uniform grids
and turns grid minima into certified global lower bounds.

Classes:
    - TorusGrid: Uniform product grid x_j = 2 pi j / G on T^d.
    - CertOptions: Tolerance and refinement caps used by certified_min.
    - CertifiedValue: Grid minimum, rigor margin and status.
    - AtomicMeasure: Nonnegative atomic measure on T^d.

Exceptions:
    - TrigException: Base class for this module.
    - TorusGridException: Invalid grid parameters.
    - NegativeWeightException: An atom carries a negative weight.

Functions:
    - fourier_eval: f^(x) at one point.
    - fourier_values: f^ at many points.
    - grid_values: f^ at integer grid indices, with exact phases.
    - gradient_bound / curvature_bound: Global bounds on the first and second derivative.
    - certified_min: Certified minimum of f^ over the torus.
    - l1_lower_bound: f(0) - 2 sum |f(n)|.
    - synthesize_from_measure: Positive definite sequence from a measure.
    - parseval_check: Both sides of sum f(n) nu^(n) = integral of f^ d nu.
    - autocorrelation: x * x~ for a real sequence on Z.

Usage:
    >>> from conedual.seqcore import SymmetricSequence
    >>> from conedual.trig import TorusGrid, certified_min
    >>> value = certified_min(SymmetricSequence.from_values([1.0, 0.6]), TorusGrid(1, 4096))
    >>> value.status
    'REFUTED'
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from conedual.enumerations.status import CertStatus
from conedual.seqcore import (
    DimensionMismatchException,
    IndexLike,
    SymmetricSequence,
    as_index,
    canonical,
    pairing,
    zero_index,
)

logger = logging.getLogger(__name__)

EPS_PD = 1e-9

# upper bound on the number of cosines held in memory per chunk
_CHUNK_ELEMENTS = 1 << 22

Point = Union[float, Sequence[float]]


class TrigException(Exception):
    """Base class for trigonometric evaluation errors."""


class TorusGridException(TrigException):
    """Exception for invalid grid parameters."""


class NegativeWeightException(TrigException):
    """Exception for atomic measures with negative weights."""


@dataclass(frozen=True)
class TorusGrid:
    """
    Uniform product grid on T^d.

    Attributes:
        dim (int): Dimension d.
        points_per_axis (int): Number of points G per axis, G >= 4.
    """

    dim: int
    points_per_axis: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise TorusGridException(f"Dimension must be >= 1, got {self.dim}")
        if int(self.points_per_axis) != self.points_per_axis or self.points_per_axis < 4:
            raise TorusGridException(
                f"points_per_axis must be an integer >= 4, got {self.points_per_axis}"
            )

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.points_per_axis

    @property
    def mesh_radius(self) -> float:
        """Half-diagonal of one grid cell, (pi / G) * sqrt(d)."""
        return math.pi / self.points_per_axis * math.sqrt(self.dim)

    def indices(self) -> np.ndarray:
        """Returns all integer grid indices in row-major order, shape (G^d, d)."""
        axes = np.indices((self.points_per_axis,) * self.dim)
        return axes.reshape(self.dim, -1).T.astype(np.int64)

    def half_indices(self) -> np.ndarray:
        """
        Returns one index per pair {j, -j mod G}.

        A cosine polynomial takes the same value at x and -x, so these points
        carry every grid constraint.
        """
        idx = self.indices()
        weights = self.points_per_axis ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)
        key = idx @ weights
        mirrored = ((-idx) % self.points_per_axis) @ weights
        return idx[key <= mirrored]

    def points(self, half: bool = False) -> np.ndarray:
        """Returns grid points as floats, shape (count, d)."""
        idx = self.half_indices() if half else self.indices()
        return idx * self.spacing

    def refined(self, factor: int) -> "TorusGrid":
        """Returns the nested grid with factor times as many points per axis."""
        return TorusGrid(self.dim, self.points_per_axis * factor)

    def contains(self, other: "TorusGrid") -> bool:
        """Returns True iff every point of other is a point of this grid."""
        return self.dim == other.dim and self.points_per_axis % other.points_per_axis == 0

    def as_dict(self) -> dict:
        return {"dim": self.dim, "points_per_axis": self.points_per_axis}


@dataclass(frozen=True)
class CertOptions:
    """
    Options of certified_min.

    Attributes:
        eps_pd (float): Tolerance of the status rules.
        refine_levels (int): Maximum number of branch-and-bound levels, 0 disables refinement.
        refine_factor (int): Subdivision factor per axis and level.
        refine_cells (int): Maximum number of cells subdivided on one level.
    """

    eps_pd: float = EPS_PD
    refine_levels: int = 0
    refine_factor: int = 4
    refine_cells: int = 4096


@dataclass(frozen=True)
class CertifiedValue:
    """
    Certified minimum of a cosine polynomial.

    The true global minimum lies in [grid_min - margin, grid_min].
    """

    grid_min: float
    margin: float
    status: str
    witness: Tuple[float, ...]
    eps_pd: float = EPS_PD
    levels: int = 0
    evaluations: int = 0

    @property
    def lower_bound(self) -> float:
        return self.grid_min - self.margin

    @property
    def is_certified(self) -> bool:
        return self.status == CertStatus.CERTIFIED_NONNEG

    @staticmethod
    def classify(grid_min: float, margin: float, eps_pd: float) -> str:
        """Assigns the status from the bracket [grid_min - margin, grid_min]."""
        if grid_min - margin >= -eps_pd:
            return CertStatus.CERTIFIED_NONNEG
        if grid_min < -eps_pd:
            return CertStatus.REFUTED
        return CertStatus.INCONCLUSIVE

    def as_dict(self) -> dict:
        return {
            "grid_min": self.grid_min,
            "margin": self.margin,
            "lower_bound": self.lower_bound,
            "status": self.status,
            "witness": list(self.witness),
            "eps_pd": self.eps_pd,
            "levels": self.levels,
            "evaluations": self.evaluations,
        }


def _coefficients(f: SymmetricSequence) -> Tuple[float, np.ndarray, np.ndarray]:
    """Splits f into f(0), positive support (K, d) and values (K,)."""
    support = f.positive_support()
    if not support:
        return f.value_at(zero_index(f.dim)), np.zeros((0, f.dim), dtype=np.int64), np.zeros(0)
    indices = np.array(support, dtype=np.int64).reshape(len(support), f.dim)
    values = np.array([f.entries[n] for n in support])
    return f.value_at(zero_index(f.dim)), indices, values


def _as_points(points: Union[np.ndarray, Iterable[Point]], dim: int) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    if array.ndim == 1 and dim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2 or array.shape[1] != dim:
        raise DimensionMismatchException(
            f"Points of shape {array.shape} on a torus of dimension {dim}"
        )
    return array


def _chunk_rows(terms: int) -> int:
    return max(1, _CHUNK_ELEMENTS // max(1, terms))


def fourier_eval(f: SymmetricSequence, x: Point) -> float:
    """
    Returns f(0) + 2 sum_{n in supp_+(f)} f(n) cos(n.x).

    Args:
        f (SymmetricSequence): Finitely supported symmetric sequence.
        x (float or sequence of floats): A point of T^d (a float is accepted for d = 1).

    Returns:
        float: The value f^(x).
    """
    return float(fourier_values(f, [x])[0])


def fourier_values(f: SymmetricSequence, points: Union[np.ndarray, Iterable[Point]]) -> np.ndarray:
    """Returns f^ at every row of points, shape (count, d)."""
    pts = _as_points(points, f.dim)
    f0, indices, values = _coefficients(f)
    out = np.full(pts.shape[0], f0, dtype=float)
    if values.size == 0:
        return out
    step = _chunk_rows(values.size)
    for start in range(0, pts.shape[0], step):
        phases = pts[start:start + step] @ indices.T
        out[start:start + step] = f0 + 2.0 * (np.cos(phases) @ values)
    return out


def grid_phases(indices: np.ndarray, grid_index: np.ndarray, points_per_axis: int) -> np.ndarray:
    """
    Returns the phases n.x_j for integer grid indices j.

    The phase is 2 pi ((n.j) mod G) / G, so x = pi and other special points are
    represented exactly.
    """
    return (2.0 * math.pi / points_per_axis) * ((grid_index @ indices.T) % points_per_axis)


def grid_values(f: SymmetricSequence, grid: TorusGrid, grid_index: Optional[np.ndarray] = None) -> np.ndarray:
    """Returns f^ at integer grid indices (all points when grid_index is None)."""
    if f.dim != grid.dim:
        raise DimensionMismatchException(f"Sequence of dimension {f.dim} on a grid of dimension {grid.dim}")
    idx = grid.indices() if grid_index is None else grid_index
    f0, indices, values = _coefficients(f)
    out = np.full(idx.shape[0], f0, dtype=float)
    if values.size == 0:
        return out
    step = _chunk_rows(values.size)
    for start in range(0, idx.shape[0], step):
        phases = grid_phases(indices, idx[start:start + step], grid.points_per_axis)
        out[start:start + step] = f0 + 2.0 * (np.cos(phases) @ values)
    return out


def gradient_bound(f: SymmetricSequence) -> float:
    """Returns B = 2 sum |f(n)| |n|_2, a global bound on |grad f^|_2."""
    _, indices, values = _coefficients(f)
    if values.size == 0:
        return 0.0
    return 2.0 * math.fsum(np.abs(values) * np.linalg.norm(indices, axis=1))


def curvature_bound(f: SymmetricSequence) -> float:
    """Returns 2 sum |f(n)| |n|_2^2, a global bound on the Hessian operator norm of f^."""
    _, indices, values = _coefficients(f)
    if values.size == 0:
        return 0.0
    return 2.0 * math.fsum(np.abs(values) * np.sum(indices.astype(float) ** 2, axis=1))


def _margin(gradient: float, curvature: float, radius: float) -> float:
    # the minimiser is a critical point, so the quadratic term alone is also valid
    return min(gradient * radius, 0.5 * curvature * radius * radius)


def _cell_offsets(dim: int, factor: int, half_width: float) -> np.ndarray:
    centers = (2.0 * np.arange(factor) + 1.0 - factor) / factor * half_width
    mesh = np.meshgrid(*([centers] * dim), indexing="ij")
    return np.stack([axis.ravel() for axis in mesh], axis=1)


def certified_min(
    f: SymmetricSequence, grid: TorusGrid, options: Optional[CertOptions] = None
) -> CertifiedValue:
    """
    Certifies the global minimum of f^ on T^d.

    Every half-grid point is evaluated. Each grid cell (a box of side 2 pi / G)
    gets the lower bound value - margin with margin = min(B rho, B2 rho^2 / 2),
    where rho is the cell half-diagonal. With options.refine_levels > 0, cells
    whose lower bound is below min(-eps_pd, best - eps_pd) are subdivided
    refine_factor^d-fold, level by level, until every cell clears the target or
    a cap is hit.

    Args:
        f (SymmetricSequence): Finitely supported symmetric sequence.
        grid (TorusGrid): Base grid.
        options (CertOptions, optional): Tolerance and refinement caps. Defaults to
            CertOptions() (eps_pd = 1e-9, no refinement).

    Returns:
        CertifiedValue: grid_min is the smallest evaluated value, grid_min - margin
        is the certified lower bound.
    """
    opts = options or CertOptions()
    if f.dim != grid.dim:
        raise DimensionMismatchException(f"Sequence of dimension {f.dim} on a grid of dimension {grid.dim}")
    dim = grid.dim
    gradient = gradient_bound(f)
    curvature = curvature_bound(f)
    idx = grid.half_indices()
    values = grid_values(f, grid, idx)
    centers = idx * grid.spacing
    evaluations = values.size
    if gradient == 0.0:
        best = float(values[0])
        return CertifiedValue(
            grid_min=best,
            margin=0.0,
            status=CertifiedValue.classify(best, 0.0, opts.eps_pd),
            witness=(0.0,) * dim,
            eps_pd=opts.eps_pd,
            evaluations=evaluations,
        )

    half_width = math.pi / grid.points_per_axis
    radius = grid.mesh_radius
    position = int(np.argmin(values))
    best = float(values[position])
    witness = centers[position].copy()
    floor = math.inf
    level = 0
    while True:
        margin = _margin(gradient, curvature, radius)
        lower = values - margin
        target = min(-opts.eps_pd, best - opts.eps_pd)
        refine = lower < target
        if not refine.all():
            floor = min(floor, float(lower[~refine].min()))
        count = int(np.count_nonzero(refine))
        if count == 0:
            break
        if level >= opts.refine_levels or count > opts.refine_cells:
            floor = min(floor, float(lower[refine].min()))
            break
        offsets = _cell_offsets(dim, opts.refine_factor, half_width)
        centers = (centers[refine][:, None, :] + offsets[None, :, :]).reshape(-1, dim)
        values = fourier_values(f, centers)
        evaluations += values.size
        half_width /= opts.refine_factor
        radius /= opts.refine_factor
        level += 1
        position = int(np.argmin(values))
        if values[position] < best:
            best = float(values[position])
            witness = centers[position].copy()
        logger.debug("certified_min level %d: %d cells, best %.3e", level, values.size, best)

    margin = max(0.0, best - floor)
    return CertifiedValue(
        grid_min=best,
        margin=margin,
        status=CertifiedValue.classify(best, margin, opts.eps_pd),
        witness=tuple(float(c) for c in np.mod(witness, 2.0 * math.pi)),
        eps_pd=opts.eps_pd,
        levels=level,
        evaluations=evaluations,
    )


def l1_lower_bound(f: SymmetricSequence) -> float:
    """Returns f(0) - 2 sum_{n in supp_+(f)} |f(n)|, a global lower bound of f^."""
    f0, _, values = _coefficients(f)
    return math.fsum([f0] + [-2.0 * abs(v) for v in values])


@dataclass(frozen=True)
class AtomicMeasure:
    """
    Nonnegative atomic measure on T^d.

    An atom at x with x != -x stands for the symmetric pair {x, -x}, each half
    of the weight; cosine synthesis makes this implicit.
    """

    dim: int
    atoms: Tuple[Tuple[Tuple[float, ...], float], ...] = ()

    def __post_init__(self) -> None:
        normalized = []
        for point, weight in self.atoms:
            coords = (float(point),) if np.ndim(point) == 0 else tuple(float(c) for c in point)
            if len(coords) != self.dim:
                raise DimensionMismatchException(
                    f"Atom {point!r} does not lie on T^{self.dim}"
                )
            w = float(weight)
            if not math.isfinite(w) or not all(math.isfinite(c) for c in coords):
                raise TrigException(f"Non-finite atom {point!r} with weight {weight!r}")
            if w < 0:
                raise NegativeWeightException(f"Negative weight {w} at {coords}")
            normalized.append((coords, w))
        object.__setattr__(self, "atoms", tuple(normalized))

    @staticmethod
    def from_points(points: Iterable[Point], weights: Iterable[float], dim: int = 1) -> "AtomicMeasure":
        """Creates a measure from parallel lists of points and weights."""
        return AtomicMeasure(dim, tuple(zip(points, weights)))

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    def points_array(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms], dtype=float).reshape(len(self.atoms), self.dim)

    def weights_array(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [{"point": list(p), "weight": w} for p, w in self.atoms],
        }


def synthesize_from_measure(nu: AtomicMeasure, support: Iterable[IndexLike]) -> SymmetricSequence:
    """
    Returns h(n) = sum_j w_j cos(n.x_j) on the requested support.

    h is positive definite for every nonnegative measure.
    """
    keys = sorted({canonical(as_index(n, nu.dim)) for n in support})
    if not keys or not nu.atoms:
        return SymmetricSequence.zero(nu.dim)
    indices = np.array(keys, dtype=np.int64).reshape(len(keys), nu.dim)
    values = np.cos(indices @ nu.points_array().T) @ nu.weights_array()
    return SymmetricSequence(nu.dim, dict(zip(keys, values.tolist())))


def parseval_check(f: SymmetricSequence, nu: AtomicMeasure) -> Tuple[float, float]:
    """
    Returns both sides of the Parseval identity.

    lhs = pairing(f, synthesize_from_measure(nu, supp f)) and
    rhs = sum_j w_j f^(x_j).
    """
    if f.dim != nu.dim:
        raise DimensionMismatchException(f"Sequence of dimension {f.dim} against a measure on T^{nu.dim}")
    lhs = pairing(f, synthesize_from_measure(nu, f.support()))
    if not nu.atoms:
        return lhs, 0.0
    rhs = math.fsum(nu.weights_array() * fourier_values(f, nu.points_array()))
    return lhs, rhs


def autocorrelation(u: Iterable[float]) -> SymmetricSequence:
    """Returns x * x~ (k -> sum_i u_i u_{i+k}) for a real finite sequence on Z."""
    values = np.asarray(list(u), dtype=float)
    if values.size == 0:
        return SymmetricSequence.zero(1)
    full = np.correlate(values, values, mode="full")
    return SymmetricSequence.from_values(full[values.size - 1:].tolist())
