"""Smith-Volterra-Cantor set on [0, 1] in exact rational arithmetic.

Stage ``g`` removes an open interval of length ``ratio * 4**-g`` from the
centre of each of the ``2**(g-1)`` closed intervals left by the previous
stage. Removed intervals are numbered generation by generation and left to
right within a generation, so their lengths never increase with the index.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DepthExhaustedError, ParameterDomainError, PreconditionError


def as_fraction(value, name: str = "value") -> Fraction:
    """Coerce ints, Fractions, floats (exactly) and ``"p/q"`` strings."""
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParameterDomainError(f"{name}: not a rational number: {value!r}") from exc


@dataclass(frozen=True)
class Interval:
    n: int
    a: Fraction
    b: Fraction
    g: int

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    @property
    def midpoint(self) -> Fraction:
        return (self.a + self.b) / 2

    def __contains__(self, y) -> bool:
        return self.a < y < self.b


@dataclass(frozen=True)
class CantorSet:
    depth: int
    ratio: Fraction
    intervals: tuple[Interval, ...]
    removed_measure: Fraction
    _by_left: tuple[Interval, ...] = field(init=False, repr=False, compare=False)
    _lefts: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_left = tuple(sorted(self.intervals, key=lambda iv: iv.a))
        object.__setattr__(self, "_by_left", by_left)
        object.__setattr__(self, "_lefts", tuple(iv.a for iv in by_left))

    def __len__(self) -> int:
        return len(self.intervals)

    def __getitem__(self, n: int) -> Interval:
        """1-based access: ``c[n]`` is I_n."""
        if not 1 <= n <= len(self.intervals):
            raise IndexError(f"interval index {n} outside 1..{len(self.intervals)}")
        return self.intervals[n - 1]

    @property
    def measure(self) -> Fraction:
        """Lebesgue measure of the depth-K approximant of B."""
        return 1 - self.removed_measure

    def generation(self, g: int) -> tuple[Interval, ...]:
        lo, hi = 2 ** (g - 1), 2**g - 1
        return self.intervals[lo - 1 : hi]

    def containing(self, y) -> Interval | None:
        """The removed interval containing ``y``, or None when ``y`` is in B."""
        i = bisect_right(self._lefts, y) - 1
        if i >= 0 and y < self._by_left[i].b:
            cand = self._by_left[i]
            if cand.a < y:
                return cand
        return None

    def components(self) -> list[tuple[Fraction, Fraction]]:
        """Closed intervals making up the depth-K approximant of B, left to right."""
        out = []
        left = Fraction(0)
        for iv in self._by_left:
            out.append((left, iv.a))
            left = iv.b
        out.append((left, Fraction(1)))
        return out


def build_cantor(depth: int, ratio=1) -> CantorSet:
    if not isinstance(depth, int) or isinstance(depth, bool) or depth < 1:
        raise ParameterDomainError(f"depth must be a positive integer, got {depth!r}")
    ratio = as_fraction(ratio, "ratio")
    if not 0 < ratio <= 1:
        raise ParameterDomainError(f"ratio must lie in (0, 1], got {ratio}")

    pieces = [(Fraction(0), Fraction(1))]
    intervals: list[Interval] = []
    for g in range(1, depth + 1):
        gap = ratio / 4**g
        nxt = []
        for lo, hi in pieces:
            # ratio <= 1 keeps every stage-g piece longer than 2**-g > gap
            assert hi - lo > gap
            c = (lo + hi) / 2
            a, b = c - gap / 2, c + gap / 2
            intervals.append(Interval(len(intervals) + 1, a, b, g))
            nxt += [(lo, a), (b, hi)]
        pieces = nxt
    removed = sum((iv.length for iv in intervals), Fraction(0))
    return CantorSet(depth, ratio, tuple(intervals), removed)


def removed_measure_closed_form(depth: int, ratio=1) -> Fraction:
    """ratio * sum_{g=1..K} 2**(g-1) 4**-g = (ratio/2)(1 - 2**-K)."""
    return Fraction(ratio) / 2 * (1 - Fraction(1, 2**depth))


def in_B(c: CantorSet, y) -> bool:
    y = as_fraction(y, "y")
    if not 0 <= y <= 1:
        raise ParameterDomainError(f"y must lie in [0, 1], got {y}")
    return c.containing(y) is None


def find_interval_near(c: CantorSet, y0, delta, m: int) -> Interval:
    """Smallest-index I_k with k > m lying inside (y0 - delta, y0 + delta)."""
    y0 = as_fraction(y0, "y0")
    delta = as_fraction(delta, "delta")
    if not in_B(c, y0):
        raise PreconditionError(f"y0 = {y0} lies inside a removed interval")
    if delta <= 0:
        raise ParameterDomainError("delta must be positive")
    if m < 1:
        raise ParameterDomainError("m must be >= 1")
    lo, hi = y0 - delta, y0 + delta
    for iv in c.intervals[m:]:
        if lo <= iv.a and iv.b <= hi:
            return iv
    raise DepthExhaustedError(
        f"no interval with index > {m} inside ({lo}, {hi}) at depth {c.depth}"
    )


def largest_component(c: CantorSet) -> Fraction:
    """Length of the longest closed piece of B; every longer interval meets the complement."""
    return max(hi - lo for lo, hi in c.components())


def nearest_other_interval(c: CantorSet, e: Fraction, own: Interval) -> Fraction:
    """Distance from endpoint ``e`` of ``own`` to the closest other removed interval."""
    best = None
    for iv in c.intervals:
        if iv is own:
            continue
        d = iv.a - e if iv.a >= e else (e - iv.b if iv.b <= e else Fraction(0))
        best = d if best is None else min(best, d)
    return best
