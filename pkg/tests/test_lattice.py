import math
import random
from fractions import Fraction

import pytest

from ehall.errors import (
    AlreadyConvex,
    CollinearPair,
    NoMinimalPath,
    SegmentOutsideRegion,
    ZeroSegment,
)
from ehall.lattice import (
    Path,
    Region,
    area,
    deg,
    enumerate_convex,
    epsilon,
    interior_count,
    is_convex,
    is_minimal_pair,
    local_convexifications,
    minimal_paths,
    slope_cmp,
)


# ---------------------------------------------------------------- oracles

def interior_count_bruteforce(x, y):
    """Scan the bounding box and test strict interiority by sign triples."""
    a, b, c = (0, 0), x, (x[0] + y[0], x[1] + y[1])

    def cross(o, u, pt):
        return (u[0] - o[0]) * (pt[1] - o[1]) - (u[1] - o[1]) * (pt[0] - o[0])

    count = 0
    for p in range(min(a[0], b[0], c[0]), max(a[0], b[0], c[0]) + 1):
        for q in range(min(a[1], b[1], c[1]), max(a[1], b[1], c[1]) + 1):
            d1 = cross(a, b, (p, q))
            d2 = cross(b, c, (p, q))
            d3 = cross(c, a, (p, q))
            if (d1 > 0 and d2 > 0 and d3 > 0) or (d1 < 0 and d2 < 0 and d3 < 0):
                count += 1
    return count


def area_shoelace(path):
    """Area between the path and its convex rearrangement via the shoelace
    formula on the closed polygon path + reversed rearrangement."""
    sorted_segs = sorted(path.segments, key=lambda s: (slope_key(s)))
    verts = [(0, 0)]
    for s in path.segments:
        verts.append((verts[-1][0] + s[0], verts[-1][1] + s[1]))
    back = [verts[-1]]
    for s in reversed(sorted_segs):
        back.append((back[-1][0] - s[0], back[-1][1] - s[1]))
    poly = verts + back[1:]
    twice = 0
    for i in range(len(poly) - 1):
        (x1, y1), (x2, y2) = poly[i], poly[i + 1]
        twice += x1 * y2 - x2 * y1
    return Fraction(abs(twice), 2)


def slope_key(s):
    import functools
    from ehall.lattice import _SLOPE_LEX_KEY
    return _SLOPE_LEX_KEY(s)


def random_plus_segment(rng, span=4):
    while True:
        p = rng.randint(0, span)
        q = rng.randint(-span, span)
        if p > 0 or (p == 0 and q > 0):
            return (p, q)


def random_plus_path(rng, max_len=6, span=4):
    return Path([random_plus_segment(rng, span) for _ in range(rng.randint(1, max_len))])


# ------------------------------------------------------------------ tests

def test_slope_cmp_examples():
    assert slope_cmp((1, -1), (1, 0)) == -1
    assert slope_cmp((1, 1), (2, 2)) == 0
    assert slope_cmp((0, 1), (-1, 0)) == -1
    assert slope_cmp((0, -1), (-1, -1)) == 1  # 3pi/2 is maximal
    assert slope_cmp((1, 1), (1, 0)) == 1


def test_slope_total_preorder():
    rng = random.Random(3)
    segs = [(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(60)]
    segs = [s for s in segs if s != (0, 0)]
    for x in segs[:20]:
        for y in segs[:20]:
            c = slope_cmp(x, y)
            assert c == -slope_cmp(y, x)
            if c == 0:
                assert x[0] * y[1] - x[1] * y[0] == 0
                # same direction half-line
                assert x[0] * y[0] + x[1] * y[1] > 0


def test_deg_examples():
    assert deg((4, 6)) == 2
    assert deg((0, -5)) == 5
    assert deg((3, 7)) == 1
    with pytest.raises(ZeroSegment):
        deg((0, 0))


def test_epsilon_examples():
    assert epsilon((1, 0), (0, 1)) == 1
    assert epsilon((0, 1), (1, 0)) == -1
    assert epsilon((1, 0), (1, 1)) == 1
    with pytest.raises(CollinearPair):
        epsilon((1, 1), (2, 2))


def test_interior_count_examples():
    assert interior_count((1, 0), (0, 1)) == 0
    assert interior_count((2, 0), (0, 2)) == interior_count_bruteforce((2, 0), (0, 2)) == 0
    assert interior_count((3, 0), (0, 3)) == interior_count_bruteforce((3, 0), (0, 3)) == 1


def test_interior_count_matches_bruteforce():
    rng = random.Random(5)
    done = 0
    while done < 200:
        x = (rng.randint(-8, 8), rng.randint(-8, 8))
        y = (rng.randint(-8, 8), rng.randint(-8, 8))
        if x == (0, 0) or y == (0, 0) or x[0] * y[1] - x[1] * y[0] == 0:
            continue
        assert interior_count(x, y) == interior_count_bruteforce(x, y)
        done += 1


def test_path_canonical_representative():
    # equal-slope runs sort lexicographically
    assert Path([(2, 2), (1, 1)]).segments == ((1, 1), (2, 2))
    assert Path([(1, 1), (1, 0)]).segments == ((1, 1), (1, 0))
    # separated runs do not merge
    assert Path([(2, 2), (1, 0), (1, 1)]).segments == ((2, 2), (1, 0), (1, 1))


def test_is_convex_examples():
    assert is_convex(Path([(1, 0), (1, 1), (0, 1)]), Region.PLUS)
    assert not is_convex(Path([(1, 1), (1, 0)]), Region.GT)
    assert not is_convex(Path([(0, 1)]), Region.GT)  # pi/2 excluded from Conv^>
    assert is_convex(Path([(0, 1)]), Region.PLUS)


def test_area_examples():
    convex = Path([(1, 0), (1, 1), (0, 1)])
    assert area(convex) == 0
    assert area(Path([(1, 1), (1, 0)])) == 1
    assert area(Path([(1, 2), (1, 0), (1, 1)])) == 3
    with pytest.raises(SegmentOutsideRegion):
        area(Path([(-1, 0)]))


def test_area_agrees_with_shoelace_oracle():
    rng = random.Random(9)
    for _ in range(300):
        p = random_plus_path(rng)
        assert area(p) == area_shoelace(p)


def test_area_lemma_properties():
    rng = random.Random(13)
    for _ in range(300):
        p = random_plus_path(rng)
        a = area(p)
        assert (a == 0) == is_convex(p, Region.PLUS)
        for i in range(len(p)):
            for j in range(i + 1, len(p) + 1):
                assert area(p.subpath(i, j)) <= a


def test_local_convexifications_examples():
    got = local_convexifications((1, 1), (1, -1))
    assert got == {Path([(2, 0)]), Path([(1, 0), (1, 0)])}
    with pytest.raises(AlreadyConvex):
        local_convexifications((1, 0), (1, 1))
    assert local_convexifications((1, 1), (1, 0)) == {Path([(2, 1)])}
    got = local_convexifications((1, 2), (2, -2))
    assert Path([(3, 0)]) in got
    for q in got:
        assert is_convex(q, Region.PLUS)
        assert q.weight() == (3, 0)


def test_local_convexification_strictly_decreases_area():
    rng = random.Random(17)
    checked = 0
    while checked < 150:
        p = random_plus_path(rng)
        segs = p.segments
        found = None
        for i in range(len(segs) - 1):
            if slope_cmp(segs[i], segs[i + 1]) > 0:
                found = i
                break
        if found is None:
            continue
        x, y = segs[found], segs[found + 1]
        a = area(p)
        for q in local_convexifications(x, y):
            new = Path(segs[:found] + q.segments + segs[found + 2:])
            assert area(new) < a
        checked += 1


def test_enumerate_convex_examples():
    got = enumerate_convex((2, 1), Region.GT, (-1, 2))
    expect = {Path([(2, 1)]), Path([(1, 0), (1, 1)]), Path([(1, -1), (1, 2)])}
    assert set(got) == expect
    assert enumerate_convex((1, 5), Region.GT, (0, 5)) == [Path([(1, 5)])]
    got = enumerate_convex((2, 0), Region.GT, (-1, 1))
    expect = {Path([(2, 0)]), Path([(1, 0), (1, 0)]), Path([(1, -1), (1, 1)])}
    assert set(got) == expect


def test_enumerate_convex_bruteforce_cross_check():
    # every returned path is convex, of the right weight, within window;
    # brute force over candidate words of length <= 3 finds no extras
    window = (-2, 2)
    weight = (3, 1)
    got = set(enumerate_convex(weight, Region.GT, window))
    for p in got:
        assert is_convex(p, Region.GT)
        assert p.weight() == weight
        assert all(window[0] <= s[1] <= window[1] for s in p)
    brute = set()
    import itertools
    segs = [(p, q) for p in (1, 2, 3) for q in range(-2, 3)]
    for n in (1, 2, 3):
        for combo in itertools.product(segs, repeat=n):
            if sum(s[0] for s in combo) == 3 and sum(s[1] for s in combo) == 1:
                pa = Path(combo)
                if is_convex(pa, Region.GT) and Path(combo).segments == combo:
                    brute.add(pa)
    assert got == brute


def test_minimal_paths_examples():
    got = minimal_paths((3, 0))
    assert got == [((1, 1), (2, -1)), ((2, 1), (1, -1))]
    got = minimal_paths((2, 1))
    assert ((1, 1), (1, 0)) in got
    for x, rest in got:
        assert interior_count(x, rest) == 0
        assert deg(x) == 1 and deg(rest) == 1
    with pytest.raises(NoMinimalPath):
        minimal_paths((1, 4))
    with pytest.raises(NoMinimalPath):
        minimal_paths((-2, 1))


def test_minimal_paths_match_predicate_bruteforce():
    for r in range(2, 8):
        for d in range(-6, 7):
            z = (r, d)
            try:
                got = set(minimal_paths(z))
            except NoMinimalPath:
                got = set()
            brute = set()
            for p in range(1, r):
                for q in range(-30, 31):
                    x = (p, q)
                    rest = (r - p, d - q)
                    if is_minimal_pair(x, rest):
                        brute.add((x, rest))
            assert got == brute


def test_minimal_paths_exist_in_range():
    for r in range(3, 13):
        for d in range(-12, 13):
            assert minimal_paths((r, d))
