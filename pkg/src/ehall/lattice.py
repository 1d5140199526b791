"""Exact lattice-path combinatorics on segments in Z^2.

A segment is a nonzero pair (p, q): p is the rank component, q the degree
component.  Slopes are direction angles in the half-open interval
(-pi/2, 3pi/2], compared exactly through quadrant classification and cross
products; no floating point is used anywhere.
"""

from __future__ import annotations

import enum
import functools
import math
from fractions import Fraction

from .errors import (
    AlreadyConvex,
    CollinearPair,
    EmptyWindow,
    InvalidIndex,
    NoMinimalPath,
    SegmentOutsideRegion,
    ZeroSegment,
)

Segment = tuple  # (p, q), nonzero


def check_segment(x) -> None:
    if x == (0, 0):
        raise ZeroSegment("(0, 0) is not a segment")


def det(x: Segment, y: Segment) -> int:
    return x[0] * y[1] - x[1] * y[0]


def deg(x: Segment) -> int:
    """gcd of the absolute coordinates; deg((0, -5)) = 5."""
    check_segment(x)
    return math.gcd(abs(x[0]), abs(x[1]))


def epsilon(x: Segment, y: Segment) -> int:
    """Sign of det(x, y) for a non-collinear pair."""
    d = det(x, y)
    if d == 0:
        raise CollinearPair(f"{x} and {y} are collinear")
    return 1 if d > 0 else -1


def sector(x: Segment) -> int:
    """Index of the slope's position along (-pi/2, 3pi/2], increasing with angle.

    0: (-pi/2, 0)   1: 0       2: (0, pi/2)
    3: pi/2         4: (pi/2, pi)   5: pi   6: (pi, 3pi/2)   7: 3pi/2
    """
    check_segment(x)
    p, q = x
    if p > 0:
        return 0 if q < 0 else (1 if q == 0 else 2)
    if p == 0:
        return 3 if q > 0 else 7
    return 4 if q > 0 else (5 if q == 0 else 6)


def slope_cmp(x: Segment, y: Segment) -> int:
    """-1, 0, +1 as the slope of x is less than, equal to, greater than y's."""
    sx, sy = sector(x), sector(y)
    if sx != sy:
        return -1 if sx < sy else 1
    d = det(x, y)
    if d > 0:
        return -1
    if d < 0:
        return 1
    return 0


def segment_sort_key(x: Segment):
    """Total order: by slope, then lexicographically inside an equal-slope class."""
    return _SLOPE_LEX_KEY(x)


def _slope_lex_cmp(x, y):
    c = slope_cmp(x, y)
    if c:
        return c
    return -1 if x < y else (0 if x == y else 1)


_SLOPE_LEX_KEY = functools.cmp_to_key(_slope_lex_cmp)


class Region(enum.Enum):
    """The five index sets for generators: (Z^2)^>, ^<, ^+, ^-, ^*."""

    GT = "gt"
    LT = "lt"
    PLUS = "plus"
    MINUS = "minus"
    ALL = "all"

    def contains(self, x: Segment) -> bool:
        check_segment(x)
        p, q = x
        if self is Region.GT:
            return p > 0
        if self is Region.LT:
            return p < 0
        if self is Region.PLUS:
            return p > 0 or (p == 0 and q > 0)
        if self is Region.MINUS:
            return p < 0 or (p == 0 and q < 0)
        return True

    def sector_range(self):
        """Closed sector window matching the convexity conditions for the region."""
        if self is Region.GT:
            return (0, 2)
        if self is Region.PLUS:
            return (0, 3)
        if self is Region.LT:
            return (4, 6)
        if self is Region.MINUS:
            return (4, 7)
        return (0, 7)


class Path:
    """An equivalence class of segment sequences, stored canonically.

    Adjacent segments of equal slope may be permuted freely, so the canonical
    representative sorts every maximal run of equal-slope segments
    lexicographically.
    """

    __slots__ = ("segments",)

    def __init__(self, segments):
        segs = [tuple(s) for s in segments]
        for s in segs:
            check_segment(s)
        out = []
        i = 0
        while i < len(segs):
            j = i + 1
            while j < len(segs) and slope_cmp(segs[i], segs[j]) == 0:
                j += 1
            out.extend(sorted(segs[i:j]))
            i = j
        self.segments = tuple(out)

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, i):
        return self.segments[i]

    def __eq__(self, other):
        return isinstance(other, Path) and self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __lt__(self, other):
        return self.segments < other.segments

    def weight(self) -> Segment:
        p = sum(s[0] for s in self.segments)
        q = sum(s[1] for s in self.segments)
        return (p, q)

    def subpath(self, i, j) -> "Path":
        if not (0 <= i < j <= len(self.segments)):
            raise InvalidIndex(f"bad subpath range [{i}, {j})")
        return Path(self.segments[i:j])

    def to_json(self):
        return [list(s) for s in self.segments]

    def __repr__(self):
        return "Path(" + ", ".join(map(str, self.segments)) + ")"


def interior_count(x: Segment, y: Segment) -> int:
    """Lattice points strictly inside the triangle with vertices 0, x, x+y.

    Computed by Pick's theorem: I = A - B/2 + 1 with A the area and B the
    number of boundary lattice points.
    """
    d = abs(det(x, y))
    if d == 0:
        raise CollinearPair(f"{x} and {y} are collinear")
    boundary = deg(x) + deg(y) + deg((x[0] + y[0], x[1] + y[1]))
    twice = d - boundary + 2
    assert twice % 2 == 0 and twice >= 0
    return twice // 2


def is_convex(p: Path, region: Region = Region.ALL) -> bool:
    """Slopes nondecreasing and inside the region's slope window.

    A segment whose slope leaves the window (equivalently, which leaves the
    region) makes the path non-convex for that region.
    """
    lo, hi = region.sector_range()
    prev = None
    for s in p:
        if not lo <= sector(s) <= hi:
            return False
        if prev is not None and slope_cmp(prev, s) > 0:
            return False
        prev = s
    return True


def area(p: Path) -> Fraction:
    """Area between p and its convex rearrangement.

    Equals the sum of |det(x_i, x_j)| over inverted pairs i < j with
    slope(x_i) > slope(x_j); zero exactly on convex paths.
    """
    for s in p:
        if not Region.PLUS.contains(s):
            raise SegmentOutsideRegion(f"{s} is outside (Z^2)^+")
    segs = p.segments
    total = 0
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if slope_cmp(segs[i], segs[j]) > 0:
                total += abs(det(segs[i], segs[j]))
    return Fraction(total)


def _point_in_closed_triangle(pt, a, b, c) -> bool:
    d1 = (b[0] - a[0]) * (pt[1] - a[1]) - (b[1] - a[1]) * (pt[0] - a[0])
    d2 = (c[0] - b[0]) * (pt[1] - b[1]) - (c[1] - b[1]) * (pt[0] - b[0])
    d3 = (a[0] - c[0]) * (pt[1] - c[1]) - (a[1] - c[1]) * (pt[0] - c[0])
    neg = d1 < 0 or d2 < 0 or d3 < 0
    pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (neg and pos)


def triangle_lattice_points(x: Segment, y: Segment):
    """All lattice points in the closed triangle with vertices 0, x, x+y."""
    a, b, c = (0, 0), x, (x[0] + y[0], x[1] + y[1])
    plo = min(a[0], b[0], c[0])
    phi = max(a[0], b[0], c[0])
    qlo = min(a[1], b[1], c[1])
    qhi = max(a[1], b[1], c[1])
    pts = []
    for pp in range(plo, phi + 1):
        for qq in range(qlo, qhi + 1):
            if _point_in_closed_triangle((pp, qq), a, b, c):
                pts.append((pp, qq))
    return pts


def local_convexifications(x: Segment, y: Segment, window=None) -> set:
    """Convex replacements of the non-convex pair (x, y) inside its triangle.

    Returns every convex path from 0 to x+y whose vertices lie in the closed
    triangle with sides x, y, x+y, with segments in (Z^2)^+ and, when a
    window (lo, hi) is given, degree components within it.  The one-segment
    path (x+y,) is always a member.
    """
    if slope_cmp(x, y) <= 0:
        raise AlreadyConvex(f"({x}, {y}) is already convex")
    target = (x[0] + y[0], x[1] + y[1])
    pts = triangle_lattice_points(x, y)
    results = set()

    def extend(current, last_seg, chain):
        if current == target:
            results.add(Path(chain))
            return
        for nxt in pts:
            seg = (nxt[0] - current[0], nxt[1] - current[1])
            if seg == (0, 0) or not Region.PLUS.contains(seg):
                continue
            if window is not None and not (window[0] <= seg[1] <= window[1]):
                continue
            if last_seg is not None and slope_cmp(last_seg, seg) > 0:
                continue
            extend(nxt, seg, chain + [seg])

    extend((0, 0), None, [])
    return results


def _candidate_segments(weight: Segment, region: Region, window):
    lo, hi = window
    cands = []
    if region in (Region.GT, Region.PLUS):
        rmax = weight[0]
        for p in range(1, rmax + 1):
            for q in range(lo, hi + 1):
                cands.append((p, q))
        if region is Region.PLUS:
            for q in range(max(lo, 1), hi + 1):
                cands.append((0, q))
    elif region in (Region.LT, Region.MINUS):
        rmin = weight[0]
        for p in range(rmin, 0):
            for q in range(lo, hi + 1):
                cands.append((p, q))
        if region is Region.MINUS:
            for q in range(lo, min(hi, -1) + 1):
                cands.append((0, q))
    else:
        raise InvalidIndex("enumerate_convex needs one of the four half regions")
    cands.sort(key=_SLOPE_LEX_KEY)
    return cands


def enumerate_convex(weight: Segment, region: Region, window) -> list:
    """All convex paths of the given weight in the region, segment degree
    components within window, in lexicographic order of canonical forms.
    """
    check_segment(weight)
    if window[0] > window[1]:
        raise EmptyWindow(f"empty window {window}")
    if not region.contains(weight):
        return []
    cands = _candidate_segments(weight, region, window)
    results = []

    def extend(start, rem_p, rem_q, chain):
        if rem_p == 0 and rem_q == 0 and chain:
            results.append(Path(chain))
            # a longer path could still close later only via zero-weight tails,
            # which do not exist; stop this branch
            return
        for i in range(start, len(cands)):
            s = cands[i]
            np, nq = rem_p - s[0], rem_q - s[1]
            if region in (Region.GT, Region.PLUS) and np < 0:
                continue
            if region in (Region.LT, Region.MINUS) and np > 0:
                continue
            extend(i, np, nq, chain + [s])

    extend(0, weight[0], weight[1], [])
    uniq = sorted(set(results), key=lambda pa: pa.segments)
    return uniq


def convex_paths_between(x: Segment, y: Segment) -> list:
    """Convex paths of weight x+y with slopes inside [slope(y), slope(x)].

    For a non-convex pair (x, y) in (Z^2)^+ these are the replacement paths
    staying inside the parallelogram spanned by x and y; the reversed pair
    (y, x) and the one-segment path are always members.
    """
    if slope_cmp(x, y) <= 0:
        raise AlreadyConvex(f"({x}, {y}) is already convex")
    target = (x[0] + y[0], x[1] + y[1])
    qspan = abs(x[1]) + abs(y[1])
    cands = []
    for p in range(0, target[0] + 1):
        for q in range(-qspan, qspan + 1):
            s = (p, q)
            if s == (0, 0) or not Region.PLUS.contains(s):
                continue
            if slope_cmp(s, y) < 0 or slope_cmp(s, x) > 0:
                continue
            cands.append(s)
    cands.sort(key=_SLOPE_LEX_KEY)
    results = []

    def extend(start, rem_p, rem_q, chain):
        if rem_p == 0 and rem_q == 0 and chain:
            results.append(Path(chain))
            return
        for i in range(start, len(cands)):
            s = cands[i]
            np, nq = rem_p - s[0], rem_q - s[1]
            if np < 0 or abs(nq) > 2 * qspan:
                continue
            extend(i, np, nq, chain + [s])

    extend(0, target[0], target[1], [])
    return sorted(set(results), key=lambda pa: pa.segments)


def _line_base_point(w: Segment) -> Segment:
    """A lattice point y with det(w, y) = 1, for primitive w."""
    p0, q0 = w
    g, u, v = _ext_gcd(p0, q0)
    assert g == 1
    # p0*u + q0*v = 1; choose y = (-v, u) so p0*u - q0*(-v) = 1
    return (-v, u)


def _ext_gcd(a, b):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, u, v = _ext_gcd(b, a % b)
    return g, v, u - (a // b) * v


def minimal_paths(z: Segment) -> list:
    """All minimal two-segment paths (x, z - x) of weight z in (Z^2)^>.

    x runs over the lattice points of the line parallel to the ray through z,
    one lattice step above it, inside the open vertical strip 0 < rank < rank(z).
    Every returned pair has both legs primitive and an empty triangle, the
    characterization that is also asserted defensively here.
    """
    check_segment(z)
    if z[0] <= 0:
        raise NoMinimalPath(f"{z} is not in (Z^2)^>")
    g = deg(z)
    w = (z[0] // g, z[1] // g)
    y0 = _line_base_point(w)
    # x = y0 + t*w with 0 < x_rank < z_rank
    results = []
    if w[0] > 0:
        t_lo = math.floor(Fraction(-y0[0], w[0])) + 1
        t_hi = math.ceil(Fraction(z[0] - y0[0], w[0])) - 1
        for t in range(t_lo, t_hi + 1):
            x = (y0[0] + t * w[0], y0[1] + t * w[1])
            if 0 < x[0] < z[0]:
                rest = (z[0] - x[0], z[1] - x[1])
                assert deg(x) == 1 and deg(rest) == 1
                assert interior_count(x, rest) == 0
                results.append((x, rest))
    results.sort()
    if not results:
        raise NoMinimalPath(f"no minimal path of weight {z}")
    return results


def is_minimal_pair(x: Segment, rest: Segment) -> bool:
    """The two-segment characterization: both legs primitive, empty triangle,
    first leg above the line through the total weight."""
    z = (x[0] + rest[0], x[1] + rest[1])
    if x[0] <= 0 or rest[0] <= 0:
        return False
    if deg(x) != 1 or deg(rest) != 1:
        return False
    if det(z, x) <= 0:
        return False
    return interior_count(x, rest) == 0
