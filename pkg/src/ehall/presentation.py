"""Drinfeld generator modes, triangular normal forms, and relation certifiers.

The algebra is generated by modes u(1, l), u(-1, l) and u(0, l); words in
these straighten into the triangular order (positive, zero, negative) using
three rewriting moves:

  * a negative mode passes a positive one at the cost of a cross commutator
    valued in the zero subalgebra,
  * a zero mode passes a positive or negative mode at the cost of an index
    shift (theta transport),
  * theta modes convert to polynomials in the u(0, l) through the
    exponential change of generators along a ray.

The positive and negative parts of a normal form are canonicalized in the
shuffle model (the negative half through the mirror that reverses products),
so normal forms are exact K-linear coordinates.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import NamedTuple

from . import linalg, zpoly
from .errors import (
    DerivationStuck,
    InvalidIndex,
    WindowExhausted,
)
from .lattice import (
    Path,
    Region,
    area,
    convex_paths_between,
    deg as seg_deg,
    enumerate_convex,
    interior_count,
    is_convex,
    is_minimal_pair,
    slope_cmp,
)
from .shuffle import (
    ShuffleAlgebra,
    partition_multiplicity_factorial,
    partitions_of,
    ray_series_coeff,
)

UPOS = "u+"
UNEG = "u-"
UZERO = "u0"
THETA_PLUS = "th+"
THETA_MINUS = "th-"

_KIND_ORDER = {UPOS: 0, UZERO: 1, UNEG: 2}


class GenMode(NamedTuple):
    kind: str
    index: int

    def weight(self):
        if self.kind == UPOS:
            return (1, self.index)
        if self.kind == UNEG:
            return (-1, self.index)
        if self.kind == UZERO:
            return (0, self.index)
        if self.kind == THETA_PLUS:
            return (0, self.index)
        if self.kind == THETA_MINUS:
            return (0, -self.index)
        raise InvalidIndex(f"unknown mode kind {self.kind}")


def upos(l):
    return GenMode(UPOS, l)


def uneg(l):
    return GenMode(UNEG, l)


def uzero(l):
    if l == 0:
        raise InvalidIndex("u(0, 0) is not a generator")
    return GenMode(UZERO, l)


def theta_plus(l):
    if l < 1:
        raise InvalidIndex("theta_plus index must be >= 1")
    return GenMode(THETA_PLUS, l)


def theta_minus(l):
    if l < 1:
        raise InvalidIndex("theta_minus index must be >= 1")
    return GenMode(THETA_MINUS, l)


class Word(NamedTuple):
    letters: tuple
    coeff: object

    def weight(self):
        p = sum(m.weight()[0] for m in self.letters)
        q = sum(m.weight()[1] for m in self.letters)
        return (p, q)


class TriangularElement:
    """Normal form: K-linear combination of (positive, zero, negative) keys.

    Positive and negative parts are indexed by canonical shuffle coordinates
    (alternant labels); the zero part by the sorted multiset of u(0, l)
    indices.  ``words`` optionally remembers an ordered-word expansion that
    multiplication can reuse without re-decomposing.
    """

    __slots__ = ("alg", "coords", "words")

    def __init__(self, alg, coords, words=None):
        self.alg = alg
        self.coords = coords
        self.words = words

    def is_zero(self):
        return not self.coords

    def __bool__(self):
        return bool(self.coords)

    def __eq__(self, other):
        if not isinstance(other, TriangularElement):
            return NotImplemented
        return self.coords == other.coords

    def __add__(self, other):
        coords = dict(self.coords)
        zpoly.zp_add_into(coords, other.coords)
        words = None
        if self.words is not None and other.words is not None:
            words = dict(self.words)
            zpoly.zp_add_into(words, other.words)
        return TriangularElement(self.alg, coords, words)

    def __sub__(self, other):
        return self + other.scale(-self.alg.dom.one)

    def scale(self, c):
        if not c:
            return TriangularElement(self.alg, {}, {})
        words = None if self.words is None else zpoly.zp_scale(self.words, c)
        return TriangularElement(self.alg, zpoly.zp_scale(self.coords, c), words)

    def bidegrees(self):
        out = set()
        for (pos, zero, neg) in self.coords:
            rp, rn = len(pos), len(neg)
            dp = sum(pos) - rp * (rp - 1) // 2
            dn = sum(neg) - rn * (rn - 1) // 2
            out.add((rp - rn, dp + sum(zero) + dn))
        return sorted(out)

    def monomial_coords(self):
        """Coordinates with the positive and negative parts in the
        monomial-symmetric basis (for rendering and serialization)."""
        dom = self.alg.dom
        by_tail = {}
        for (pos, zero, neg), c in self.coords.items():
            by_tail.setdefault((zero, neg), {})[pos] = c
        half = {}
        for (zero, neg), alt in by_tail.items():
            rank = len(next(iter(alt)))
            for lab, c in zpoly.alternant_to_monomial(alt, rank, dom).items():
                half[(lab, zero, neg)] = c
        out = {}
        by_head = {}
        for (pos, zero, neg), c in half.items():
            by_head.setdefault((pos, zero), {})[neg] = c
        for (pos, zero), alt in by_head.items():
            rank = len(next(iter(alt)))
            for lab, c in zpoly.alternant_to_monomial(alt, rank, dom).items():
                if c:
                    out[(pos, zero, lab)] = c
        return out

    def to_json(self):
        dom = self.alg.dom
        terms = []
        for (pos, zero, neg), c in sorted(self.monomial_coords().items()):
            terms.append({
                "pos": list(pos),
                "zero": list(zero),
                "neg": list(neg),
                "coeff": dom.render(c),
            })
        return {"terms": terms}

    def render(self):
        if not self.coords:
            return "0"
        dom = self.alg.dom
        parts = []
        for (pos, zero, neg), c in sorted(self.monomial_coords().items(), reverse=True):
            bits = [f"({dom.render(c)})"]
            if pos:
                bits.append("m+" + str(list(pos)).replace(" ", ""))
            if zero:
                bits.append("u0" + str(list(zero)).replace(" ", ""))
            if neg:
                bits.append("m-" + str(list(neg)).replace(" ", ""))
            parts.append("*".join(bits))
        return " + ".join(parts)

    def __repr__(self):
        return f"TriangularElement({self.render()})"


class DerivationLog:
    """Audit trail of a rewriting derivation."""

    def __init__(self, subject):
        self.subject = subject
        self.steps = []
        self.result = None
        self.status = "PASS"

    def record(self, rule, **data):
        entry = {"rule": rule}
        entry.update(data)
        self.steps.append(entry)

    def to_json(self):
        return {
            "subject": self.subject,
            "status": self.status,
            "steps": self.steps,
            "result": self.result,
        }


class VerificationReport:
    def __init__(self, suite, cell, status, details=None, steps=None):
        self.suite = suite
        self.cell = cell
        self.status = status
        self.details = details or {}
        self.steps = steps or []

    def to_json(self):
        return {
            "suite": self.suite,
            "cell": self.cell,
            "status": self.status,
            "steps": self.steps,
            "ranks": self.details,
        }


def _path_key(path):
    return tuple(path.segments)


class DrinfeldAlgebra:
    """Context for normal forms and certifiers over a coefficient domain."""

    def __init__(self, dom=None, rank_bound=6, paranoid=True):
        self.shuffle = ShuffleAlgebra(dom, rank_bound)
        self.dom = self.shuffle.dom
        self.paranoid = paranoid
        self._pair_cache = {}
        self._reduce_cache = {}
        self._theta_u = {}
        self._atom_cache = {}
        self._plus_path_cache = {}

    # ------------------------------------------------------- zero modes

    def theta_in_u(self, l):
        """theta(0, l) as a polynomial in the u(0, *): {sorted index tuple: coeff}."""
        if l == 0:
            raise InvalidIndex("theta(0, 0) is the unit")
        hit = self._theta_u.get(l)
        if hit is not None:
            return hit
        out = {}
        sign = 1 if l > 0 else -1
        for lam in partitions_of(abs(l)):
            mono = tuple(sorted(sign * part for part in lam))
            out[mono] = ray_series_coeff(self.dom, lam)
        self._theta_u[l] = out
        return out

    def u_in_theta(self, l):
        """u(0, l) as a polynomial in the theta(0, *): {sorted index tuple: coeff}.

        Inverts the alternating ray series: alpha_n u_n is the degree-n
        coefficient of sum_k Theta(s)^k / k, all signs positive.
        """
        if l == 0:
            raise InvalidIndex("u(0, 0) is not a generator")
        dom = self.dom
        sign = 1 if l > 0 else -1
        out = {}
        n = abs(l)
        for lam in partitions_of(n):
            k = len(lam)
            coeff = dom.from_fraction(Fraction(_factorial(k - 1),
                                               partition_multiplicity_factorial(lam)))
            mono = tuple(sorted(sign * part for part in lam))
            out[mono] = coeff * (dom.one / dom.alpha(n))
        return out

    def theta_u_convert(self, direction, bound):
        """Change-of-generators table for degrees up to ``bound``."""
        if bound < 1:
            raise InvalidIndex("bound must be >= 1")
        table = {}
        for l in range(1, bound + 1):
            for signed in (l, -l):
                if direction == "theta->u":
                    table[signed] = self.theta_in_u(signed)
                elif direction == "u->theta":
                    table[signed] = self.u_in_theta(signed)
                else:
                    raise InvalidIndex(f"unknown direction {direction!r}")
        return table

    def cross_commutator(self, a, b):
        """[u(-1, a), u(1, b)] as a zero-part polynomial {index tuple: coeff}.

        The two unit terms of the zero-mode series cancel at a + b = 0;
        otherwise a single theta mode survives with sign -sgn(a + b).
        """
        n = a + b
        if n == 0:
            return {}
        theta = self.theta_in_u(n)
        scale = -(self.dom.one / self.dom.alpha(1)) if n > 0 else (
            self.dom.one / self.dom.alpha(1))
        return {mono: c * scale for mono, c in theta.items()}

    def theta_transport(self, l, side, n):
        """The commutator [u(0, l), u(+-1, n)] -> (coefficient, mode)."""
        if l == 0:
            raise InvalidIndex("transport index must be nonzero")
        sgn = 1 if l > 0 else -1
        if side == "pos-gen":
            return (self.dom.from_fraction(sgn), upos(n + l))
        if side == "neg-gen":
            return (self.dom.from_fraction(-sgn), uneg(n + l))
        raise InvalidIndex(f"unknown side {side!r}")

    # ------------------------------------------------------ normal form

    def _expand_thetas(self, letters, coeff):
        """Replace theta modes by zero-mode polynomials; yields (letters, coeff)."""
        stack = [(tuple(letters), coeff)]
        while stack:
            word, c = stack.pop()
            for i, mode in enumerate(word):
                if mode.kind in (THETA_PLUS, THETA_MINUS):
                    signed = mode.index if mode.kind == THETA_PLUS else -mode.index
                    for mono, tc in self.theta_in_u(signed).items():
                        repl = tuple(uzero(m) for m in mono)
                        stack.append((word[:i] + repl + word[i + 1:], c * tc))
                    break
            else:
                yield word, c

    def normalize_words(self, letters, coeff=None):
        """Straighten a word into ordered words {(pos, zero, neg): coeff}.

        Keys hold the positive letter indices in order, the sorted zero
        indices, and the negative letter indices in order.
        """
        if coeff is None:
            coeff = self.dom.one
        out = {}
        stack = list(self._expand_thetas(letters, coeff))
        while stack:
            word, c = stack.pop()
            if not c:
                continue
            pos = None
            for i in range(len(word) - 1):
                a, b = word[i], word[i + 1]
                if _KIND_ORDER[a.kind] > _KIND_ORDER[b.kind]:
                    pos = i
                    break
            if pos is None:
                key = (
                    tuple(m.index for m in word if m.kind == UPOS),
                    tuple(sorted(m.index for m in word if m.kind == UZERO)),
                    tuple(m.index for m in word if m.kind == UNEG),
                )
                cur = out.get(key)
                if cur is None:
                    out[key] = c
                else:
                    cur = cur + c
                    if cur:
                        out[key] = cur
                    else:
                        del out[key]
                continue
            a, b = word[pos], word[pos + 1]
            head, tail = word[:pos], word[pos + 2:]
            stack.append((head + (b, a) + tail, c))
            if a.kind == UNEG and b.kind == UPOS:
                for mono, cc in self.cross_commutator(a.index, b.index).items():
                    repl = tuple(uzero(m) for m in mono)
                    stack.append((head + repl + tail, c * cc))
            elif a.kind == UZERO and b.kind == UPOS:
                cc, mode = self.theta_transport(a.index, "pos-gen", b.index)
                stack.append((head + (mode,) + tail, c * cc))
            elif a.kind == UNEG and b.kind == UZERO:
                # u(-1,n) u(0,l) = u(0,l) u(-1,n) + sgn(l) u(-1, n+l)
                sgn = 1 if b.index > 0 else -1
                stack.append((head + (uneg(a.index + b.index),) + tail,
                              c * self.dom.from_fraction(sgn)))
            else:
                raise DerivationStuck(f"unexpected disorder {a} {b}")
        return out

    def materialize(self, words) -> TriangularElement:
        """Turn ordered words into canonical triangular coordinates."""
        coords = {}
        for (pos, zero, neg), c in words.items():
            pos_alt = self.shuffle.word_image(pos).alt
            neg_alt = self.shuffle.word_image(tuple(reversed(neg))).alt
            for lp, a in pos_alt.items():
                ca = c * a
                for ln, b in neg_alt.items():
                    v = ca * b
                    if not v:
                        continue
                    key = (lp, zero, ln)
                    cur = coords.get(key)
                    if cur is None:
                        coords[key] = v
                    else:
                        cur = cur + v
                        if cur:
                            coords[key] = cur
                        else:
                            del coords[key]
        return TriangularElement(self, coords, dict(words))

    def normalize(self, word: Word) -> TriangularElement:
        """Normal form of a word of generator modes."""
        return self.materialize(self.normalize_words(word.letters, word.coeff))

    def one(self) -> TriangularElement:
        return self.materialize({((), (), ()): self.dom.one})

    def atom(self, kind, r, d) -> TriangularElement:
        """Generator as a normal form: kind 'u' or 'theta', bidegree (r, d).

        Cached; the cached element also accumulates its word expansion, so
        repeated products avoid re-decomposition.
        """
        key = (kind, r, d)
        hit = self._atom_cache.get(key)
        if hit is not None:
            return hit
        out = self._atom(kind, r, d)
        self._atom_cache[key] = out
        return out

    def _atom(self, kind, r, d) -> TriangularElement:
        dom = self.dom
        if kind == "u":
            if r == 0:
                return self.materialize({((), (d,), ()): dom.one})
            if r == 1:
                return self.materialize({((d,), (), ()): dom.one})
            if r == -1:
                return self.materialize({((), (), (d,)): dom.one})
            if r > 1:
                sym = self.shuffle.u_image((r, d))
                return TriangularElement(
                    self, {(lab, (), ()): c for lab, c in sym.alt.items()})
            sym = self.shuffle.u_image((-r, d))
            return TriangularElement(
                self, {((), (), lab): c for lab, c in sym.alt.items()})
        if kind == "theta":
            if r == 0:
                return self.materialize({
                    ((), mono, ()): c for mono, c in self.theta_in_u(d).items()})
            if r > 0:
                sym = self.shuffle.theta_image((r, d))
                return TriangularElement(
                    self, {(lab, (), ()): c for lab, c in sym.alt.items()})
            sym = self.shuffle.theta_image((-r, d))
            return TriangularElement(
                self, {((), (), lab): c for lab, c in sym.alt.items()})
        raise InvalidIndex(f"unknown atom kind {kind!r}")

    def _decompose_adaptive(self, sym, window):
        """Word decomposition with a tight window grown on demand."""
        if window is not None:
            return self.shuffle.decompose_to_words(sym, window)
        if sym.rank == 0:
            return self.shuffle.decompose_to_words(sym, (0, 0))
        exps = [e for lab in sym.terms for e in lab]
        lo, hi = min(exps), max(exps)
        last = None
        for pad in (0, 1, 2, 4):
            try:
                return self.shuffle.decompose_to_words(sym, (lo - pad, hi + pad))
            except WindowExhausted as exc:
                last = exc
        raise last

    def words_of(self, tri: TriangularElement, window=None):
        """An ordered-word expansion of a normal form, via decomposition of
        the positive and negative parts into generator words.

        The expansion is remembered on the element.  With window None a
        tight window is derived from the support and grown as needed.
        """
        if tri.words is not None:
            return tri.words
        out = {}
        by_tail = {}
        for (pos, zero, neg), c in tri.coords.items():
            by_tail.setdefault((zero, neg), {})[pos] = c
        for (zero, neg), alt in by_tail.items():
            rank = len(next(iter(alt)))
            pos_sym = _sym_from_alt(self.shuffle, rank, alt)
            pos_combo = self._decompose_adaptive(pos_sym, window)
            for wpos, c in pos_combo.items():
                zpoly.zp_add_into(out, {(wpos, zero, neg): c})
        final = {}
        by_head = {}
        for (wpos, zero, neg), c in out.items():
            by_head.setdefault((wpos, zero), {})[neg] = c
        for (wpos, zero), alt in by_head.items():
            rank = len(next(iter(alt)))
            neg_sym = _sym_from_alt(self.shuffle, rank, alt)
            neg_combo = self._decompose_adaptive(neg_sym, window)
            for wneg, c in neg_combo.items():
                zpoly.zp_add_into(final, {(wpos, zero, tuple(reversed(wneg))): c})
        tri.words = final
        return final

    def _word_letters(self, key):
        pos, zero, neg = key
        return tuple(itertools.chain(
            (upos(l) for l in pos),
            (uzero(l) for l in zero),
            (uneg(l) for l in neg),
        ))

    def multiply(self, x: TriangularElement, y: TriangularElement,
                 window=None) -> TriangularElement:
        """Product of normal forms; bilinear and associative.

        Uses the remembered word expansions when present, otherwise
        decomposes adaptively (or within ``window`` when given;
        WindowExhausted propagates).
        """
        wx = self.words_of(x, window)
        wy = self.words_of(y, window)
        acc = {}
        for kx, cx in wx.items():
            lx = self._word_letters(kx)
            for ky, cy in wy.items():
                letters = lx + self._word_letters(ky)
                zpoly.zp_add_into(acc, self.normalize_words(letters, cx * cy))
        return self.materialize(acc)

    def commutator(self, x, y, window=None):
        return self.multiply(x, y, window) - self.multiply(y, x, window)

    # ------------------------------------------------------- certifiers

    def _quadratic_rhs(self, n, m):
        """Rewrite of the word u(1,n)u(1,m) by the quadratic mode relation.

        Derived from the chi polynomials:
        u_n u_m = e1 u_{n-1}u_{m+1} - e2 u_{n-2}u_{m+2} + u_{n-3}u_{m+3}
                + u_m u_n - e2 u_{m+1}u_{n-1} + e1 u_{m+2}u_{n-2} - u_{m+3}u_{n-3}.
        """
        dom = self.dom
        rhs = {}
        for key, c in (
            ((n - 1, m + 1), dom.e1), ((n - 2, m + 2), -dom.e2),
            ((n - 3, m + 3), dom.one), ((m, n), dom.one),
            ((m + 1, n - 1), -dom.e2), ((m + 2, n - 2), dom.e1),
            ((m + 3, n - 3), -dom.one),
        ):
            zpoly.zp_add_into(rhs, {key: c})
        self_c = rhs.pop((n, m), None)
        if self_c is not None:
            scale = dom.one / (dom.one - self_c)
            rhs = zpoly.zp_scale(rhs, scale)
        return rhs

    def _verify_word_rewrite(self, word, rhs):
        target = self.shuffle.word_image(word)
        total = self.shuffle.zero(2)
        for w, c in rhs.items():
            total = total + self.shuffle.word_image(w).scale(c)
        return (target - total).is_zero()

    def span_certify(self, d, window) -> DerivationLog:
        """Reduce every windowed length-2 word into the spanning family
        (gap at most 1 for odd degree, 2 for even) by quadratic rewrites."""
        lo, hi = window
        log = DerivationLog({"suite": "span", "r": 2, "d": d,
                             "window": [lo, hi]})
        bound = 1 if d % 2 else 2
        for n in range(lo, hi + 1):
            m = d - n
            if not lo <= m <= hi:
                continue
            combo = {(n, m): self.dom.one}
            guard = 64
            while True:
                worst = None
                for (a, b) in combo:
                    gap = a - b
                    if gap > bound and (worst is None or gap > worst[0]):
                        worst = (gap, (a, b))
                if worst is None:
                    break
                guard -= 1
                if guard < 0:
                    log.status = "FAIL"
                    raise DerivationStuck(f"no progress reducing {(n, m)}")
                word = worst[1]
                c = combo.pop(word)
                rhs = self._quadratic_rhs(*word)
                verified = self._verify_word_rewrite(word, rhs) if self.paranoid else None
                if verified is False:
                    log.status = "FAIL"
                    raise DerivationStuck(f"unsound rewrite at {word}")
                log.record("quadratic-swap", word=list(word),
                           replacement={str(list(w)): self.dom.render(cc)
                                        for w, cc in rhs.items()},
                           verified=verified)
                zpoly.zp_add_into(combo, zpoly.zp_scale(rhs, c))
            assert all(a - b <= bound for (a, b) in combo)
            if self.paranoid:
                ok = self._verify_word_rewrite((n, m), combo)
                if not ok:
                    log.status = "FAIL"
                    raise DerivationStuck(f"endpoint verification failed at {(n, m)}")
            log.record("family-member", word=[n, m],
                       family={str(list(w)): self.dom.render(c)
                               for w, c in combo.items()})
        log.result = "all windowed words inside the spanning family"
        return log

    def pair_expand(self, a, b):
        """Expansion of the non-convex product u_a u_b over the convex
        replacements, solved in the shuffle model.

        Candidates are the convex paths of the same weight whose slopes stay
        inside the pair's slope interval (the parallelogram replacements;
        the reversed pair and the one-segment path are always members).
        Replacing the pair by any expansion member strictly decreases the
        area of an ambient path, which the reducer checks at each step.
        """
        key = (a, b)
        hit = self._pair_cache.get(key)
        if hit is not None:
            return hit
        candidates = convex_paths_between(a, b)
        target = self.shuffle.shuffle_mul(
            self.shuffle.u_image(a), self.shuffle.u_image(b))
        images = [self.shuffle.path_image(q) for q in candidates]
        labels = set(target.alt)
        for img in images:
            labels.update(img.alt)
        labels = sorted(labels)
        matrix = [[img.alt.get(lab, self.dom.zero) for img in images]
                  for lab in labels]
        rhs = [target.alt.get(lab, self.dom.zero) for lab in labels]
        sol = linalg.solve(matrix, rhs, self.dom.zero)
        if sol is None:
            raise DerivationStuck(f"pair {a}, {b} does not expand over its triangle")
        combo = {q: c for q, c in zip(candidates, sol) if c}
        self._pair_cache[key] = combo
        return combo

    def _theta_path_combo(self, z):
        """theta_z / alpha_1 as a combination of collinear convex paths."""
        dom = self.dom
        g = seg_deg(z)
        x0 = (z[0] // g, z[1] // g)
        combo = {}
        for lam in partitions_of(g):
            path = Path([(part * x0[0], part * x0[1]) for part in lam])
            zpoly.zp_add_into(combo, {path: ray_series_coeff(dom, lam)})
        return zpoly.zp_scale(combo, dom.one / dom.alpha(1))

    def _interior_points(self, x, z):
        """Strict-interior lattice points of the two flanking triangles of
        the parallelogram over the pair (x, z - x), ranks 1..z1-1 only."""
        x1, x2 = x
        r, dd = z
        out = []
        for p in range(1, r):
            if p == x1:
                continue
            # the top side passes through x with the direction of z
            hi_line = x2 + Fraction(dd * (p - x1), r)
            if p < x1:
                # left triangle: strictly above [0, x]
                lo_line = Fraction(x2 * p, x1)
            else:
                # right triangle: strictly above [x, z]
                lo_line = x2 + Fraction((dd - x2) * (p - x1), r - x1)
            for q in range(_ceil_strict(lo_line), _floor_strict(hi_line) + 1):
                out.append((p, q))
        return sorted(out)

    def _reduce_path(self, path, log, depth=0):
        """Express u_path over the convex family, by the area induction."""
        key = _path_key(path)
        hit = self._reduce_cache.get(key)
        if hit is not None:
            return hit
        if depth > 64:
            raise DerivationStuck(f"reduction depth exceeded at {path}")
        if is_convex(path, Region.GT):
            return {path: self.dom.one}
        segs = path.segments
        if len(segs) > 2:
            idx = None
            for i in range(len(segs) - 1):
                if slope_cmp(segs[i], segs[i + 1]) > 0:
                    idx = i
                    break
            a, b = segs[idx], segs[idx + 1]
            expansion = self.pair_expand(a, b)
            before = area(path)
            combo = {}
            for q, c in expansion.items():
                new_path = Path(segs[:idx] + q.segments + segs[idx + 2:])
                after = area(new_path)
                if after >= before:
                    raise DerivationStuck(
                        f"area failed to drop substituting {q} into {path}")
                sub = self._reduce_path(new_path, log, depth + 1)
                zpoly.zp_add_into(combo, zpoly.zp_scale(sub, c))
            log.record("pair-convexify", path=[list(s) for s in segs],
                       pair=[list(a), list(b)],
                       area_before=str(before), area_after="<" + str(before),
                       verified=True)
            self._reduce_cache[key] = combo
            return combo
        x, w = segs
        z = (x[0] + w[0], x[1] + w[1])
        if interior_count(x, w) == 0 and (seg_deg(x) == 1 or seg_deg(w) == 1):
            return self._endgame(path, x, w, z, log)
        interior = self._interior_points(x, z)
        if interior:
            return self._triangle_reroute(path, x, w, z, interior[0], log, depth)
        return self._edge_reroute(path, x, w, z, log)

    def _endgame(self, path, x, w, z, log):
        """u_x u_w = u_w u_x + theta_z / alpha_1 (empty triangle, one leg
        primitive); theta expands over the collinear ray."""
        combo = {Path((w, x)): self.dom.one}
        theta = self._theta_path_combo(z)
        zpoly.zp_add_into(combo, theta)
        if self.paranoid:
            lhs = self.shuffle.shuffle_mul(self.shuffle.u_image(x),
                                           self.shuffle.u_image(w))
            rhs = self.shuffle.zero(z[0])
            for q, c in combo.items():
                rhs = rhs + self.shuffle.path_image(q).scale(c)
            if not (lhs - rhs).is_zero():
                log.status = "FAIL"
                raise DerivationStuck(f"endgame verification failed at {path}")
        log.record("minimal-endgame", path=[list(s) for s in path.segments],
                   minimal=is_minimal_pair(x, w),
                   primitive_leg=list(x if seg_deg(x) == 1 else w),
                   verified=self.paranoid or None)
        self._reduce_cache[_path_key(path)] = combo
        return combo

    def _triangle_reroute(self, path, x, w, z, y, log, depth):
        """Reroute through a lattice point of a flanking triangle; the
        rerouted two-segment path strictly decreases the area."""
        before = area(path)
        if y[0] < x[0]:
            first = self.pair_expand(y, (x[0] - y[0], x[1] - y[1]))
            beta = first.get(Path((x,)))
            if not beta:
                raise DerivationStuck(f"reroute at {y} lost the target segment")
            second = self.pair_expand((x[0] - y[0], x[1] - y[1]), w)
            rest = (z[0] - y[0], z[1] - y[1])
            beta2 = second.get(Path((rest,)))
            if not beta2:
                raise DerivationStuck(f"reroute at {y} lost the rerouted segment")
            combo = {}
            q = Path((y, rest))
            assert area(q) < before
            zpoly.zp_add_into(combo, zpoly.zp_scale(
                self._reduce_path(q, log, depth + 1), beta2))
            for m, c in second.items():
                if m == Path((rest,)):
                    continue
                joined = Path((y,) + m.segments)
                zpoly.zp_add_into(combo, zpoly.zp_scale(
                    self._reduce_path(joined, log, depth + 1), c))
            for m, c in first.items():
                if m == Path((x,)):
                    continue
                joined = Path(m.segments + (w,))
                zpoly.zp_add_into(combo, zpoly.zp_scale(
                    self._reduce_path(joined, log, depth + 1), -c))
            combo = zpoly.zp_scale(combo, self.dom.one / beta)
        else:
            ymx = (y[0] - x[0], y[1] - x[1])
            zmy = (z[0] - y[0], z[1] - y[1])
            first = self.pair_expand(ymx, zmy)
            beta = first.get(Path((w,)))
            if not beta:
                raise DerivationStuck(f"reroute at {y} lost the target segment")
            second = self.pair_expand(x, ymx)
            beta2 = second.get(Path((y,)))
            if not beta2:
                raise DerivationStuck(f"reroute at {y} lost the rerouted segment")
            combo = {}
            q = Path((y, zmy))
            assert area(q) < before
            zpoly.zp_add_into(combo, zpoly.zp_scale(
                self._reduce_path(q, log, depth + 1), beta2))
            for m, c in second.items():
                if m == Path((y,)):
                    continue
                joined = Path(m.segments + (zmy,))
                zpoly.zp_add_into(combo, zpoly.zp_scale(
                    self._reduce_path(joined, log, depth + 1), c))
            for m, c in first.items():
                if m == Path((w,)):
                    continue
                joined = Path((x,) + m.segments)
                zpoly.zp_add_into(combo, zpoly.zp_scale(
                    self._reduce_path(joined, log, depth + 1), -c))
            combo = zpoly.zp_scale(combo, self.dom.one / beta)
        if self.paranoid:
            lhs = self.shuffle.shuffle_mul(self.shuffle.u_image(x),
                                           self.shuffle.u_image(w))
            rhs = self.shuffle.zero(z[0])
            for q2, c in combo.items():
                rhs = rhs + self.shuffle.path_image(q2).scale(c)
            if not (lhs - rhs).is_zero():
                log.status = "FAIL"
                raise DerivationStuck(f"reroute verification failed at {path}")
        log.record("triangle-reroute", path=[list(s) for s in path.segments],
                   through=list(y), area_before=str(before),
                   verified=self.paranoid or None)
        self._reduce_cache[_path_key(path)] = combo
        return combo

    def plus_path_image(self, segments) -> TriangularElement:
        """Normal form of the ordered product of segment generators for a
        path in (Z^2)^+ (zero-rank segments become zero modes)."""
        segments = tuple(tuple(s) for s in segments)
        hit = self._plus_path_cache.get(segments)
        if hit is not None:
            return hit
        out = self.one()
        for (p, q) in segments:
            out = self.multiply(out, self.atom("u", p, q))
        self._plus_path_cache[segments] = out
        return out

    def _decompose_over_family(self, tri, weight, log):
        """Write a purely positive normal form over convex-path words."""
        alt = {}
        for (pos, zero, neg), c in tri.coords.items():
            if zero or neg:
                raise DerivationStuck("zero modes failed to cancel in reroute")
            alt[pos] = c
        if not alt:
            return {}
        entries = [e for lab in alt for e in lab]
        window = (min(entries) - 1, max(entries) + 1)
        for _ in range(3):
            family = enumerate_convex(weight, Region.GT, window)
            images = [self.shuffle.path_image(q) for q in family]
            labels = set(alt)
            for img in images:
                labels.update(img.alt)
            labels = sorted(labels)
            matrix = [[img.alt.get(lab, self.dom.zero) for img in images]
                      for lab in labels]
            rhs = [alt.get(lab, self.dom.zero) for lab in labels]
            sol = linalg.solve(matrix, rhs, self.dom.zero)
            if sol is not None:
                return {q: c for q, c in zip(family, sol) if c}
            window = (window[0] - 2, window[1] + 2)
        raise DerivationStuck(f"family decomposition failed at weight {weight}")

    def _edge_reroute(self, path, x, w, z, log):
        """Reroute through the boundary point (0, 1) of the left flanking
        triangle when neither triangle has an interior lattice point.

        The rerouted pieces pass through the zero modes, so the congruences
        are assembled and cancelled in the triangular normal form before the
        remaining positive part is decomposed over the convex family.
        """
        before = area(path)
        if before <= z[0]:
            raise DerivationStuck(
                f"no reroute boundary point for {path} (area {before} <= rank {z[0]})")
        y = (0, 1)
        v = (x[0], x[1] - 1)
        first = self._mixed_pair_expand(y, v)
        beta = first.get(Path((x,)))
        if not beta:
            raise DerivationStuck("edge reroute lost the target segment")
        second = self.pair_expand(v, w)
        total = None
        for s, c in second.items():
            piece = self.multiply(self.atom("u", 0, 1),
                                  self.plus_path_image(s.segments)).scale(c)
            total = piece if total is None else total + piece
        for m, c in first.items():
            if m == Path((x,)):
                continue
            piece = self.plus_path_image(m.segments + (w,)).scale(c)
            total = total - piece
        total = total.scale(self.dom.one / beta)
        combo = self._decompose_over_family(total, z, log)
        if self.paranoid:
            lhs = self.shuffle.shuffle_mul(self.shuffle.u_image(x),
                                           self.shuffle.u_image(w))
            rhs = self.shuffle.zero(z[0])
            for q, c in combo.items():
                rhs = rhs + self.shuffle.path_image(q).scale(c)
            if not (lhs - rhs).is_zero():
                log.status = "FAIL"
                raise DerivationStuck(f"edge reroute verification failed at {path}")
        log.record("edge-reroute", path=[list(s) for s in path.segments],
                   through=list(y), area_before=str(before),
                   verified=self.paranoid or None)
        self._reduce_cache[_path_key(path)] = combo
        return combo

    def _mixed_pair_expand(self, a, b):
        """Expansion of u_a u_b when the pair may involve zero-rank segments,
        solved over triangular normal forms of the candidate paths."""
        key = ("mixed", a, b)
        hit = self._pair_cache.get(key)
        if hit is not None:
            return hit
        candidates = convex_paths_between(a, b)
        target = self.multiply(self.atom("u", *a), self.atom("u", *b))
        images = [self.plus_path_image(q.segments) for q in candidates]
        keys = set(target.coords)
        for img in images:
            keys.update(img.coords)
        keys = sorted(keys)
        matrix = [[img.coords.get(k, self.dom.zero) for img in images]
                  for k in keys]
        rhs = [target.coords.get(k, self.dom.zero) for k in keys]
        sol = linalg.solve(matrix, rhs, self.dom.zero)
        if sol is None:
            raise DerivationStuck(f"mixed pair {a}, {b} does not expand")
        combo = {q: c for q, c in zip(candidates, sol) if c}
        self._pair_cache[key] = combo
        return combo

    def case_reduce(self, path, window=None) -> DerivationLog:
        """Derivation expressing a path word over the convex family."""
        if not isinstance(path, Path):
            path = Path(path)
        log = DerivationLog({"suite": "reduce",
                             "path": [list(s) for s in path.segments]})
        combo = self._reduce_path(path, log)
        for q in combo:
            if not is_convex(q, Region.GT):
                log.status = "FAIL"
                raise DerivationStuck(f"reduction left a non-convex path {q}")
        if self.paranoid:
            lhs = self.shuffle.path_image(path)
            rhs = self.shuffle.zero(path.weight()[0])
            for q, c in combo.items():
                rhs = rhs + self.shuffle.path_image(q).scale(c)
            if not (lhs - rhs).is_zero():
                log.status = "FAIL"
                raise DerivationStuck("endpoint verification failed")
            log.record("endpoint-verified", paths=len(combo))
        log.result = {str(list(map(list, q.segments))): self.dom.render(c)
                      for q, c in sorted(combo.items(),
                                         key=lambda item: _path_key(item[0]))}
        return log

    def isomorphism_certify(self, r, d, window) -> VerificationReport:
        """Spanning from relations plus independence in the shuffle model."""
        lo, hi = window
        cell = {"r": r, "d": d, "window": [lo, hi]}
        family = enumerate_convex((r, d), Region.GT, window)
        images = [self.shuffle.path_image(q) for q in family]
        labels = sorted({lab for img in images for lab in img.alt})
        matrix = [[img.alt.get(lab, self.dom.zero) for img in images]
                  for lab in labels]
        rank = linalg.rank(matrix)
        details = {"convex_count": len(family), "independence_rank": rank}
        steps = []
        status = "PASS" if rank == len(family) else "FAIL"
        words = 0
        try:
            if r == 1:
                words = 1 if lo <= d <= hi else 0
            elif r == 2:
                log = self.span_certify(d, window)
                steps.extend(log.steps)
                words = sum(1 for n in range(lo, hi + 1) if lo <= d - n <= hi)
            else:
                for combo in itertools.product(range(lo, hi + 1), repeat=r):
                    if sum(combo) != d:
                        continue
                    words += 1
                    log = self.case_reduce(Path([(1, c) for c in combo]), window)
                    steps.append({"word": list(combo), "steps": len(log.steps)})
        except DerivationStuck as exc:
            status = "FAIL"
            details["error"] = str(exc)
        details["words_reduced"] = words
        return VerificationReport("isomorphism", cell, status, details, steps)


def _sym_from_alt(shuffle_alg, rank, alt):
    from .shuffle import SymLaurent
    return SymLaurent(shuffle_alg, rank, dict(alt), None)


def _factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _ceil_strict(q):
    """Smallest integer strictly greater than the rational q."""
    from math import floor
    return floor(q) + 1


def _floor_strict(q):
    """Largest integer strictly smaller than the rational q."""
    from math import ceil
    return ceil(q) - 1
