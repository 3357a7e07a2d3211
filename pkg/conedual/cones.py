"""
Cones Module.

This module decides membership in the cone P of nonnegative cosine
polynomials and in its dual P+ of positive definite sequences, and searches
decompositions phi = g + h with g >= 0 and h positive definite, the form every
element of (C & P)+ = C+ + P+ takes on Z.

Classes:
    - PdStatus: Outcome of a positive-definiteness check.
    - DualDecomposition: A certified split phi = g + h.
    - DecompositionAttempt: The Chebyshev LP result behind decompose_dual.

Exceptions:
    - ConesException: Base class for this module.
    - DecompositionWindowException: The window does not fit phi or the grid.
    - CertificateRecheckException: A refutation witness failed its direct recheck.

Functions:
    - is_positive_definite: Certifies or refutes h in P+.
    - in_cone_P: Certifies or refutes f in P.
    - decompose_dual: Searches g >= 0 on the window with phi - g positive definite.
    - exact_split: Rounds a split so that g + h reproduces phi bitwise.
    - has_dominant_center: h(0) >= |h(n)|, a property of every positive definite h.

Usage:
    >>> from conedual.cones import is_positive_definite
    >>> from conedual.seqcore import SymmetricSequence
    >>> from conedual.trig import TorusGrid
    >>> is_positive_definite(SymmetricSequence.chi0(1), TorusGrid(1, 16)).method
    'L1_BOUND'
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from conedual.enumerations.lp_terms import Relation, Sense
from conedual.enumerations.status import CertStatus, LpStatus, PdMethod
from conedual.lp import LinearProgram, LpOptions, solve
from conedual.seqcore import SymmetricSequence, zero_index
from conedual.trig import (
    CertifiedValue,
    CertOptions,
    TorusGrid,
    certified_min,
    fourier_eval,
    grid_phases,
    grid_values,
    l1_lower_bound,
)

logger = logging.getLogger(__name__)


class ConesException(Exception):
    """Base class for cone membership errors."""


class DecompositionWindowException(ConesException):
    """Exception for windows that do not contain supp phi or do not fit the grid."""


class CertificateRecheckException(ConesException):
    """Exception for refutation witnesses that do not survive direct evaluation."""


@dataclass(frozen=True)
class PdStatus:
    """
    Outcome of a positive-definiteness check.

    Attributes:
        certified (CertifiedValue): Bracket of min h^ that decided the question.
        method (str): PdMethod.L1_BOUND or PdMethod.GRID_CERTIFICATE.
        l1_bound (float): h(0) - 2 sum |h(n)|.
        witness_value (float, optional): h^ at the witness, re-evaluated directly on refutation.
    """

    certified: CertifiedValue
    method: str
    l1_bound: float
    witness_value: Optional[float] = None

    @property
    def is_positive_definite(self) -> bool:
        return self.certified.status == CertStatus.CERTIFIED_NONNEG

    @property
    def is_refuted(self) -> bool:
        return self.certified.status == CertStatus.REFUTED

    @property
    def witness(self) -> Tuple[float, ...]:
        return self.certified.witness

    @property
    def lower_bound(self) -> float:
        return self.certified.lower_bound

    def as_dict(self) -> dict:
        return {
            "status": self.certified.status,
            "method": self.method,
            "l1_bound": self.l1_bound,
            "certified": self.certified.as_dict(),
            "witness_value": self.witness_value,
        }


def is_positive_definite(
    h: SymmetricSequence, grid: TorusGrid, options: Optional[CertOptions] = None
) -> PdStatus:
    """
    Certifies or refutes that h is positive definite.

    For finitely supported h, positive definiteness is equivalent to h^ >= 0 on
    T^d. The l1 bound is tried first; otherwise the grid certificate decides.

    Args:
        h (SymmetricSequence): Finitely supported symmetric sequence.
        grid (TorusGrid): Base grid of the certificate.
        options (CertOptions, optional): Tolerance and refinement caps.

    Returns:
        PdStatus: CERTIFIED_NONNEG means positive definite up to eps_pd, REFUTED
        comes with a witness x where h^(x) < -eps_pd.

    Raises:
        CertificateRecheckException: If direct evaluation at a refutation witness is not negative.
    """
    opts = options or CertOptions()
    bound = l1_lower_bound(h)
    if bound >= 0.0:
        at_zero = fourier_eval(h, (0.0,) * h.dim)
        certified = CertifiedValue(
            grid_min=at_zero,
            margin=max(0.0, at_zero - bound),
            status=CertStatus.CERTIFIED_NONNEG,
            witness=(0.0,) * h.dim,
            eps_pd=opts.eps_pd,
            evaluations=1,
        )
        return PdStatus(certified, PdMethod.L1_BOUND, bound)
    certified = certified_min(h, grid, opts)
    witness_value = None
    if certified.status == CertStatus.REFUTED:
        witness_value = fourier_eval(h, certified.witness)
        if not witness_value < 0.0:
            raise CertificateRecheckException(
                f"Witness {certified.witness} gives h^ = {witness_value}, "
                f"grid minimum was {certified.grid_min}"
            )
    return PdStatus(certified, PdMethod.GRID_CERTIFICATE, bound, witness_value)


def in_cone_P(f: SymmetricSequence, grid: TorusGrid, options: Optional[CertOptions] = None) -> CertifiedValue:
    """Certifies or refutes f^ >= 0 on T^d; CERTIFIED_NONNEG means f in P up to eps_pd."""
    return certified_min(f, grid, options)


def has_dominant_center(h: SymmetricSequence, tol: float = 0.0) -> bool:
    """Returns True iff h(0) >= |h(n)| - tol for every n."""
    center = h.value_at(zero_index(h.dim))
    return all(abs(v) <= center + tol for v in h.entries.values())


def _split_entry(target: float, part: float, shifts: int) -> Optional[Tuple[float, float]]:
    """Finds (p, r) with p + r == target in floating point and p within shifts ulps of part."""
    candidates = [part]
    up = down = part
    for _ in range(shifts):
        up = float(np.nextafter(up, np.inf))
        down = float(np.nextafter(down, -np.inf))
        candidates.extend((up, down))
    for p in candidates:
        if part >= 0.0 > p:
            continue
        rest = target - p
        for _ in range(4):
            total = p + rest
            if total == target:
                return p, rest
            rest = float(np.nextafter(rest, np.inf if total < target else -np.inf))
    return None


def exact_split(
    phi: SymmetricSequence, g: SymmetricSequence, shifts: int = 8
) -> Optional[Tuple[SymmetricSequence, SymmetricSequence]]:
    """
    Returns (g', h) with g'(n) + h(n) == phi(n) in floating point for every n, or None.

    g' stays within shifts ulps of g and keeps its sign where g >= 0; with
    shifts = 0, g' == g. None means no such pair exists nearby, which happens
    when |g(n)| is much larger than |phi(n)| and phi(n) has bits below ulp(g(n)).
    """
    keys = sorted(set(phi.entries) | set(g.entries))
    parts, rests = {}, {}
    for n in keys:
        found = _split_entry(phi.entries.get(n, 0.0), g.entries.get(n, 0.0), shifts)
        if found is None:
            logger.debug("No exact split of %r with g = %r", phi.entries.get(n, 0.0), g.entries.get(n, 0.0))
            return None
        parts[n], rests[n] = found
    return SymmetricSequence(phi.dim, parts), SymmetricSequence(phi.dim, rests)



@dataclass(frozen=True)
class DualDecomposition:
    """A split phi = g + h with g >= 0 entrywise and h certified positive definite."""

    g: SymmetricSequence
    h: SymmetricSequence
    slack: float
    pd: PdStatus

    def reconstructs(self, phi: SymmetricSequence) -> bool:
        """Returns True iff g(n) + h(n) == phi(n) bitwise on the union of supports."""
        keys = set(phi.entries) | set(self.g.entries) | set(self.h.entries)
        return all(self.g.value_at(n) + self.h.value_at(n) == phi.value_at(n) for n in keys)

    def as_dict(self) -> dict:
        return {"g": self.g, "h": self.h, "slack": self.slack, "pd": self.pd}


@dataclass(frozen=True)
class DecompositionAttempt:
    """Chebyshev LP outcome; decomposition is None when no certified split was found."""

    lp_status: str
    slack: Optional[float]
    decomposition: Optional[DualDecomposition]

    @property
    def succeeded(self) -> bool:
        return self.decomposition is not None

    def as_dict(self) -> dict:
        return {
            "lp_status": self.lp_status,
            "slack": self.slack,
            "decomposable": self.succeeded,
            "decomposition": self.decomposition,
        }


def _decomposition_program(phi: SymmetricSequence, window: int, grid: TorusGrid) -> LinearProgram:
    """maximise tau s.t. phi^(x_j) - sum_k g(k) c_k(x_j) >= tau, g >= 0; variables (g(0..W), tau)."""
    idx = grid.half_indices()
    orders = np.arange(window + 1, dtype=np.int64).reshape(-1, 1)
    basis = 2.0 * np.cos(grid_phases(orders, idx, grid.points_per_axis))
    basis[:, 0] = 1.0
    matrix = np.hstack([basis, np.ones((idx.shape[0], 1))])
    lower = np.concatenate([np.zeros(window + 1), [-np.inf]])
    objective = np.zeros(window + 2)
    objective[-1] = 1.0
    return LinearProgram(
        sense=Sense.MAX,
        objective=objective,
        matrix=matrix,
        relations=(Relation.LE,) * idx.shape[0],
        rhs=grid_values(phi, grid, idx),
        lower=lower,
        upper=np.full(window + 2, np.inf),
        name=f"decompose_W{window}_G{grid.points_per_axis}",
    )


def solve_decomposition(
    phi: SymmetricSequence,
    window: int,
    grid: TorusGrid,
    options: Optional[CertOptions] = None,
    lp_options: Optional[LpOptions] = None,
) -> DecompositionAttempt:
    """
    Searches phi = g + h with g >= 0 on {-W..W} and h positive definite.

    The Chebyshev LP maximises the grid minimum tau of h^; its solution is
    clipped to g >= 0, split exactly, and h is then certified on the torus.
    The split succeeds iff an exact split exists near g and h is certified;
    tau is reported either way.

    Raises:
        DecompositionWindowException: If d != 1, supp phi is not inside the
            window, or the grid does not satisfy G > 2 W.
    """
    if phi.dim != 1 or grid.dim != 1:
        raise DecompositionWindowException("Decomposition is defined on Z only")
    if window < 0 or phi.radius() > window:
        raise DecompositionWindowException(
            f"Window {window} does not contain supp phi (radius {phi.radius()})"
        )
    if grid.points_per_axis <= 2 * window:
        raise DecompositionWindowException(
            f"Grid G = {grid.points_per_axis} must exceed 2 * window = {2 * window}"
        )
    outcome = solve(_decomposition_program(phi, window, grid), lp_options)
    if not outcome.is_optimal:
        logger.info("Decomposition LP ended with %s", outcome.status)
        return DecompositionAttempt(outcome.status, None, None)
    slack = float(outcome.x[-1])
    g = SymmetricSequence.from_values(np.maximum(outcome.x[:-1], 0.0).tolist())
    split = exact_split(phi, g)
    if split is None:
        logger.info("Decomposition slack %.3e, but phi has no exact split near g", slack)
        return DecompositionAttempt(LpStatus.OPTIMAL, slack, None)
    g, h = split
    pd = is_positive_definite(h, grid, options)
    logger.debug("Decomposition slack %.3e, h status %s", slack, pd.certified.status)
    if not pd.is_positive_definite:
        return DecompositionAttempt(LpStatus.OPTIMAL, slack, None)
    return DecompositionAttempt(LpStatus.OPTIMAL, slack, DualDecomposition(g, h, slack, pd))


def decompose_dual(
    phi: SymmetricSequence,
    window: int,
    grid: TorusGrid,
    options: Optional[CertOptions] = None,
    lp_options: Optional[LpOptions] = None,
) -> Optional[DualDecomposition]:
    """
    Returns a certified split phi = g + h, or None.

    None only means that no split was found at this window and grid; it does
    not prove that phi lies outside (C & P)+.
    """
    return solve_decomposition(phi, window, grid, options, lp_options).decomposition
