"""
Point configurations on the line, windows, restriction, counting,
discrepancy and the W1 matching distance.
"""
import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence

import numpy as np

from config.settings import MAX_BRUTEFORCE_POINTS
from loggas.errors import (
    CardinalityMismatch,
    DomainError,
    DuplicatePoint,
    NonFinite,
    TooLarge,
)


@dataclass(frozen=True)
class Window:
    """Closed segment [lo, hi] of the real line."""
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"window bounds must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise DomainError(f"empty window [{self.lo}, {self.hi}]")

    @classmethod
    def centered(cls, p: float) -> "Window":
        """The window Lambda_p = [-p/2, p/2]."""
        return cls(-p / 2.0, p / 2.0)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def mask(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership mask for an array of coordinates."""
        return (points >= self.lo) & (points <= self.hi)

    def contains_window(self, other: "Window") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def distance(self, x):
        """Distance from x (scalar or array) to the window."""
        return np.maximum(np.maximum(self.lo - x, x - self.hi), 0.0)

    def scaled(self, factor: float) -> "Window":
        """Window dilated by factor around the origin."""
        return Window(self.lo * factor, self.hi * factor)


class PointConfiguration:
    """
    Finite simple point set on the line.

    Coordinates are stored once as a sorted, read-only float64 array.
    """

    __slots__ = ("_points",)

    def __init__(self, points: np.ndarray):
        arr = np.array(points, dtype=np.float64)
        arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def count(self) -> int:
        return int(self._points.size)

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[float]:
        return iter(self._points.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointConfiguration):
            return NotImplemented
        return np.array_equal(self._points, other._points)

    def __hash__(self) -> int:
        return hash(self._points.tobytes())

    def __repr__(self) -> str:
        return f"PointConfiguration({self._points.tolist()})"

    def union(self, other: "PointConfiguration") -> "PointConfiguration":
        """Union of two configurations; raises DuplicatePoint on a shared coordinate."""
        return make_configuration(np.concatenate([self._points, other._points]))

    def without(self, w: Window) -> "PointConfiguration":
        """Points lying outside the closed window w."""
        return PointConfiguration(self._points[~w.mask(self._points)])

    def to_json(self) -> str:
        """JSON array of numbers, ascending."""
        return json.dumps(self._points.tolist())

    @classmethod
    def from_json(cls, text: str) -> "PointConfiguration":
        return make_configuration(json.loads(text))


@dataclass(frozen=True)
class Discrepancy:
    """Count of a window minus its length."""
    value: float
    count: int
    length: float


def make_configuration(coords: Iterable[float]) -> PointConfiguration:
    """
    Build a sorted simple configuration.

    Args:
        coords: Real coordinates in any order

    Returns:
        PointConfiguration with strictly increasing points

    Raises:
        NonFinite: If a coordinate is NaN or infinite
        DuplicatePoint: If two coordinates are equal
    """
    arr = np.asarray(list(coords) if not isinstance(coords, np.ndarray) else coords, dtype=np.float64).ravel()
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFinite("configuration coordinates must be finite")
    arr = np.sort(arr)
    if arr.size > 1 and np.any(np.diff(arr) == 0.0):
        dup = arr[:-1][np.diff(arr) == 0.0][0]
        raise DuplicatePoint(f"coordinate {dup!r} appears more than once")
    return PointConfiguration(arr)


def empty_configuration() -> PointConfiguration:
    return PointConfiguration(np.empty(0))


def restrict(gamma: PointConfiguration, w: Window) -> PointConfiguration:
    """Restriction gamma_Lambda, closed-interval convention."""
    pts = gamma.points
    lo = np.searchsorted(pts, w.lo, side="left")
    hi = np.searchsorted(pts, w.hi, side="right")
    return PointConfiguration(pts[lo:hi])


def count_in(gamma: PointConfiguration, w: Window) -> int:
    pts = gamma.points
    return int(np.searchsorted(pts, w.hi, side="right") - np.searchsorted(pts, w.lo, side="left"))


def exterior(gamma: PointConfiguration, inner: Window, outer: Window) -> PointConfiguration:
    """Points of gamma in outer but not in inner."""
    return restrict(gamma, outer).without(inner)


def discrepancy(gamma: PointConfiguration, w: Window) -> Discrepancy:
    count = count_in(gamma, w)
    return Discrepancy(value=count - w.length, count=count, length=w.length)


def w1_distance(a: PointConfiguration, b: PointConfiguration) -> float:
    """
    Minimal total displacement pairing two equal-size configurations.

    On the line the monotone (sorted-order) coupling is optimal for |x - y|.
    """
    if a.count != b.count:
        raise CardinalityMismatch(f"W1 needs equal counts, got {a.count} and {b.count}")
    return math.fsum(np.abs(a.points - b.points).tolist())


def w1_distance_bruteforce(a: PointConfiguration, b: PointConfiguration) -> float:
    """Minimum over all permutations; an oracle for small configurations."""
    if a.count != b.count:
        raise CardinalityMismatch(f"W1 needs equal counts, got {a.count} and {b.count}")
    if a.count > MAX_BRUTEFORCE_POINTS:
        raise TooLarge(f"brute-force W1 limited to {MAX_BRUTEFORCE_POINTS} points")
    xs, ys = a.points.tolist(), b.points.tolist()
    best = math.inf
    for perm in itertools.permutations(range(len(ys))):
        best = min(best, math.fsum(abs(x - ys[j]) for x, j in zip(xs, perm)))
    return 0.0 if best is math.inf else best


def read_jsonl(lines: Iterable[str]) -> List[PointConfiguration]:
    """Parse one configuration per non-empty line."""
    return [PointConfiguration.from_json(line) for line in lines if line.strip()]


def to_jsonl(configs: Sequence[PointConfiguration]) -> str:
    return "".join(c.to_json() + "\n" for c in configs)
