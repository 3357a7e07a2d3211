"""
Sequence Core Module.

This module provides the data model shared by every solver: symmetric, finitely
supported real sequences on Z^d, index sets in Z_+^d, and the sign-support cone
C together with its polar cone.

Classes:
    - IndexSet: Finite subset of Z_+^d.
    - SymmetricSequence: Symmetric finitely supported sequence, stored by canonical index.
    - SignSupportPattern: The pair (M, L) and its derived partitions.

Exceptions:
    - SeqCoreException: Base class for data-model errors.
    - DimensionMismatchException: Arguments live on different Z^d.
    - IndexSetException: An index is not in Z_+^d.
    - SequenceLiteralException: A sequence literal cannot be parsed.

Functions:
    - canonical: Representative of the pair {n, -n}.
    - is_positive_index: Membership in Z_+^d.
    - indicator_interval: The sequence chi_{[-a, a]} on Z.
    - in_cone_C: Membership in the sign-support cone C.
    - in_polar_cone_Cminus: Membership in the polar cone C^-.
    - pairing: The symmetric duality pairing sum_n f(n) h(n).
    - project_to_C / project_to_Cminus: Nearest points of C and C^-.

Usage:
    >>> from conedual.seqcore import SymmetricSequence, pairing
    >>> f = SymmetricSequence.from_values([1.0, 0.5])
    >>> h = SymmetricSequence.from_values([2.0, -1.0])
    >>> pairing(f, h)
    1.0
"""

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np

MultiIndex = Tuple[int, ...]
IndexLike = Union[int, Sequence[int]]


class SeqCoreException(Exception):
    """Base class for data-model errors."""


class DimensionMismatchException(SeqCoreException):
    """Exception for arguments that live on different Z^d."""


class IndexSetException(SeqCoreException):
    """Exception for indices outside Z_+^d."""


class SequenceLiteralException(SeqCoreException):
    """Exception for malformed sequence literals."""


def zero_index(dim: int) -> MultiIndex:
    """Returns the origin of Z^d."""
    return (0,) * dim


def as_index(value: IndexLike, dim: int) -> MultiIndex:
    """
    Converts an integer or a sequence of integers into a MultiIndex of length dim.

    Raises:
        DimensionMismatchException: If the index has the wrong length.
    """
    if isinstance(value, (int, np.integer)):
        index: MultiIndex = (int(value),)
    else:
        index = tuple(int(c) for c in value)
    if len(index) != dim:
        raise DimensionMismatchException(
            f"Index {value!r} has length {len(index)}, expected {dim}"
        )
    return index


def is_positive_index(n: MultiIndex) -> bool:
    """Returns True iff the first nonzero coordinate of n is strictly positive."""
    for c in n:
        if c != 0:
            return c > 0
    return False


def canonical(n: MultiIndex) -> MultiIndex:
    """Returns the representative of {n, -n} lying in {0} u Z_+^d."""
    if is_positive_index(n) or not any(n):
        return tuple(n)
    return tuple(-c for c in n)


def _index_key(n: MultiIndex) -> str:
    return ",".join(str(c) for c in n)


@dataclass(frozen=True)
class IndexSet:
    """Finite subset of Z_+^d (the origin is excluded)."""

    dim: int
    elements: FrozenSet[MultiIndex] = frozenset()

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise IndexSetException(f"Dimension must be >= 1, got {self.dim}")
        normalized = frozenset(as_index(n, self.dim) for n in self.elements)
        for n in normalized:
            if not is_positive_index(n):
                raise IndexSetException(f"Index {n} is not in Z_+^{self.dim}")
        object.__setattr__(self, "elements", normalized)

    @staticmethod
    def from_list(dim: int, items: Iterable[IndexLike]) -> "IndexSet":
        """Creates an IndexSet from integers (d = 1) or coordinate lists."""
        return IndexSet(dim, frozenset(as_index(item, dim) for item in items))

    def __contains__(self, n: object) -> bool:
        return tuple(n) in self.elements  # type: ignore[arg-type]

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(sorted(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def _check(self, other: "IndexSet") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchException(
                f"Index sets of dimension {self.dim} and {other.dim}"
            )

    def __and__(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(self.dim, self.elements & other.elements)

    def __or__(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(self.dim, self.elements | other.elements)

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        self._check(other)
        return IndexSet(self.dim, self.elements - other.elements)

    def max_index(self) -> int:
        """Returns max |n|_inf over the set (0 for the empty set)."""
        return max((max(abs(c) for c in n) for n in self.elements), default=0)

    def as_list(self) -> list:
        """Returns the elements as integers (d = 1) or coordinate lists."""
        if self.dim == 1:
            return [n[0] for n in self]
        return [list(n) for n in self]


@dataclass(frozen=True)
class SymmetricSequence:
    """
    Symmetric finitely supported real sequence on Z^d.

    Only canonical representatives ({0} u Z_+^d) are stored, so f(-n) = f(n)
    holds by construction. Exact zeros are not stored.
    """

    dim: int
    entries: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise SeqCoreException(f"Dimension must be >= 1, got {self.dim}")
        stored: Dict[MultiIndex, float] = {}
        for n, v in self.entries.items():
            key = canonical(as_index(n, self.dim))
            value = float(v)
            if not math.isfinite(value):
                raise SequenceLiteralException(f"Non-finite value {v!r} at {n!r}")
            if key in stored and stored[key] != value:
                raise SequenceLiteralException(
                    f"Inconsistent values {stored[key]} and {value} at +-{key}"
                )
            stored[key] = value
        cleaned = {k: v for k, v in sorted(stored.items()) if v != 0.0}
        object.__setattr__(self, "entries", MappingProxyType(cleaned))

    def __hash__(self) -> int:
        return hash((self.dim, tuple(self.entries.items())))

    @staticmethod
    def chi0(dim: int = 1) -> "SymmetricSequence":
        """Returns the indicator of the origin."""
        return SymmetricSequence(dim, {zero_index(dim): 1.0})

    @staticmethod
    def zero(dim: int = 1) -> "SymmetricSequence":
        """Returns the zero sequence."""
        return SymmetricSequence(dim, {})

    @staticmethod
    def from_dict(dim: int, mapping: Mapping[IndexLike, float]) -> "SymmetricSequence":
        """Creates a sequence from {index: value}; n and -n may both appear if equal."""
        return SymmetricSequence(dim, {as_index(k, dim): v for k, v in mapping.items()})

    @staticmethod
    def from_values(values: Iterable[float]) -> "SymmetricSequence":
        """Creates a sequence on Z with f(k) = values[k] for k >= 0."""
        return SymmetricSequence(1, {(k,): v for k, v in enumerate(values)})

    @staticmethod
    def from_literal(obj: Mapping) -> "SymmetricSequence":
        """
        Parses a sequence literal.

        The literal format is ``{"dim": 1, "entries": {"0": 1.0, "1": 0.5}}``: keys
        are comma-joined indices, symmetry is implied.

        Raises:
            SequenceLiteralException: If the literal is malformed.
        """
        if not isinstance(obj, Mapping) or "entries" not in obj:
            raise SequenceLiteralException(f"Not a sequence literal: {obj!r}")
        dim = obj.get("dim", 1)
        entries = obj["entries"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise SequenceLiteralException(f"Invalid dimension {dim!r}")
        if not isinstance(entries, Mapping):
            raise SequenceLiteralException(f"Entries must be an object, got {entries!r}")
        parsed: Dict[MultiIndex, float] = {}
        for key, value in entries.items():
            try:
                index = tuple(int(part) for part in str(key).split(","))
            except ValueError as e:
                raise SequenceLiteralException(f"Invalid index key {key!r}") from e
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SequenceLiteralException(f"Invalid value {value!r} at {key!r}")
            try:
                parsed[as_index(index, dim)] = float(value)
            except DimensionMismatchException as e:
                raise SequenceLiteralException(str(e)) from e
        return SymmetricSequence(dim, parsed)

    def as_dict(self) -> dict:
        """Returns the sequence literal representation."""
        return {
            "dim": self.dim,
            "entries": {_index_key(n): v for n, v in self.entries.items()},
        }

    def value_at(self, n: IndexLike) -> float:
        """Returns f(n); zero outside the stored support."""
        return self.entries.get(canonical(as_index(n, self.dim)), 0.0)

    def __getitem__(self, n: IndexLike) -> float:
        return self.value_at(n)

    def support(self) -> Tuple[MultiIndex, ...]:
        """Returns the canonical indices with nonzero value."""
        return tuple(self.entries.keys())

    def positive_support(self) -> Tuple[MultiIndex, ...]:
        """Returns the canonical support without the origin."""
        return tuple(n for n in self.entries if any(n))

    def radius(self) -> int:
        """Returns max |n|_inf over the support."""
        return max((max(abs(c) for c in n) for n in self.entries), default=0)

    def l1_norm(self) -> float:
        """Returns sum over all n in Z^d of |f(n)|."""
        return math.fsum(
            abs(v) if not any(n) else 2.0 * abs(v) for n, v in self.entries.items()
        )

    def _check(self, other: "SymmetricSequence") -> None:
        if self.dim != other.dim:
            raise DimensionMismatchException(
                f"Sequences of dimension {self.dim} and {other.dim}"
            )

    def __add__(self, other: "SymmetricSequence") -> "SymmetricSequence":
        self._check(other)
        keys = set(self.entries) | set(other.entries)
        return SymmetricSequence(
            self.dim, {n: self.entries.get(n, 0.0) + other.entries.get(n, 0.0) for n in keys}
        )

    def __sub__(self, other: "SymmetricSequence") -> "SymmetricSequence":
        self._check(other)
        keys = set(self.entries) | set(other.entries)
        return SymmetricSequence(
            self.dim, {n: self.entries.get(n, 0.0) - other.entries.get(n, 0.0) for n in keys}
        )

    def __neg__(self) -> "SymmetricSequence":
        return self.scaled(-1.0)

    def scaled(self, factor: float) -> "SymmetricSequence":
        """Returns factor * f."""
        return SymmetricSequence(self.dim, {n: factor * v for n, v in self.entries.items()})

    def to_array(self, length: int) -> np.ndarray:
        """Returns [f(0), ..., f(length - 1)] for a sequence on Z."""
        if self.dim != 1:
            raise DimensionMismatchException("to_array is defined for d = 1 only")
        return np.array([self.entries.get((k,), 0.0) for k in range(length)])


def indicator_interval(a: int) -> SymmetricSequence:
    """Returns chi_{{-a, ..., a}} on Z."""
    return SymmetricSequence.from_values([1.0] * (a + 1))


@dataclass(frozen=True)
class SignSupportPattern:
    """
    Sign-support pattern (M, L).

    Positive values may sit on {0} u +-M, negative values on {0} u +-L. The
    derived partitions are M & L (free sign), M - L (nonnegative) and L - M
    (nonpositive).
    """

    M: IndexSet
    L: IndexSet

    def __post_init__(self) -> None:
        if self.M.dim != self.L.dim:
            raise DimensionMismatchException(
                f"M has dimension {self.M.dim}, L has dimension {self.L.dim}"
            )

    @staticmethod
    def from_lists(
        dim: int, m_items: Iterable[IndexLike], l_items: Iterable[IndexLike]
    ) -> "SignSupportPattern":
        """Creates a pattern from two index lists."""
        return SignSupportPattern(IndexSet.from_list(dim, m_items), IndexSet.from_list(dim, l_items))

    @property
    def dim(self) -> int:
        return self.M.dim

    @property
    def free(self) -> IndexSet:
        return self.M & self.L

    @property
    def nonneg(self) -> IndexSet:
        return self.M - self.L

    @property
    def nonpos(self) -> IndexSet:
        return self.L - self.M

    @property
    def union(self) -> IndexSet:
        return self.M | self.L

    def as_dict(self) -> dict:
        """Returns a dictionary representation of the pattern."""
        return {"dim": self.dim, "M": self.M.as_list(), "L": self.L.as_list()}


def _check_pattern(seq: SymmetricSequence, pattern: SignSupportPattern) -> None:
    if seq.dim != pattern.dim:
        raise DimensionMismatchException(
            f"Sequence of dimension {seq.dim} against pattern of dimension {pattern.dim}"
        )


def in_cone_C(f: SymmetricSequence, pattern: SignSupportPattern, tol: float = 0.0) -> bool:
    """
    Tests f in C.

    f(0) is free, f is free on +-(M & L), nonnegative on +-(M - L), nonpositive
    on +-(L - M) and zero everywhere else.

    Args:
        f (SymmetricSequence): The sequence to test.
        pattern (SignSupportPattern): The pattern (M, L).
        tol (float, optional): Absolute slack for the sign tests. Defaults to 0 (exact).

    Returns:
        bool: Membership.

    Raises:
        DimensionMismatchException: If f and the pattern have different dimensions.
    """
    _check_pattern(f, pattern)
    free, nonneg, nonpos = pattern.free, pattern.nonneg, pattern.nonpos
    for n in f.positive_support():
        v = f.entries[n]
        if n in free:
            continue
        if n in nonneg:
            if v < -tol:
                return False
        elif n in nonpos:
            if v > tol:
                return False
        elif abs(v) > tol:
            return False
    return True


def in_polar_cone_Cminus(
    t: SymmetricSequence, pattern: SignSupportPattern, tol: float = 0.0
) -> bool:
    """
    Tests t in C^- for a finitely supported t.

    t(0) = 0, t = 0 on +-(M & L), t <= 0 on +-(M - L), t >= 0 on +-(L - M), and
    t is unrestricted outside M u L.

    Raises:
        DimensionMismatchException: If t and the pattern have different dimensions.
    """
    _check_pattern(t, pattern)
    if abs(t.value_at(zero_index(t.dim))) > tol:
        return False
    free, nonneg, nonpos = pattern.free, pattern.nonneg, pattern.nonpos
    for n in t.positive_support():
        v = t.entries[n]
        if n in free:
            if abs(v) > tol:
                return False
        elif n in nonneg:
            if v > tol:
                return False
        elif n in nonpos:
            if v < -tol:
                return False
    return True


def pairing(f: SymmetricSequence, h: SymmetricSequence) -> float:
    """
    Returns sum over n in Z^d of f(n) h(n) = f(0)h(0) + 2 sum_{n in Z_+^d} f(n)h(n).

    Raises:
        DimensionMismatchException: If f and h have different dimensions.
    """
    if f.dim != h.dim:
        raise DimensionMismatchException(
            f"Sequences of dimension {f.dim} and {h.dim}"
        )
    terms: List[float] = []
    for n, v in f.entries.items():
        w = h.entries.get(n)
        if w is None:
            continue
        terms.append(v * w if not any(n) else 2.0 * v * w)
    return math.fsum(terms)


def project_to_C(f: SymmetricSequence, pattern: SignSupportPattern) -> SymmetricSequence:
    """Returns the nearest element of C: signs clipped, entries outside M u L dropped."""
    _check_pattern(f, pattern)
    free, nonneg, nonpos = pattern.free, pattern.nonneg, pattern.nonpos
    values: Dict[MultiIndex, float] = {}
    for n, v in f.entries.items():
        if not any(n) or n in free:
            values[n] = v
        elif n in nonneg:
            values[n] = max(v, 0.0)
        elif n in nonpos:
            values[n] = min(v, 0.0)
    return SymmetricSequence(f.dim, values)


def project_to_Cminus(t: SymmetricSequence, pattern: SignSupportPattern) -> SymmetricSequence:
    """Returns the nearest element of C^-: t(0) and t on M & L zeroed, signs clipped."""
    _check_pattern(t, pattern)
    nonneg, nonpos, union = pattern.nonneg, pattern.nonpos, pattern.union
    values: Dict[MultiIndex, float] = {}
    for n, v in t.entries.items():
        if not any(n):
            continue
        if n not in union:
            values[n] = v
        elif n in nonneg:
            values[n] = min(v, 0.0)
        elif n in nonpos:
            values[n] = max(v, 0.0)
    return SymmetricSequence(t.dim, values)
