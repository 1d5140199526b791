"""The shuffle model of the positive half of the elliptic Hall algebra.

Elements live in A = K + sum_r A_r, where A_r is the image of the twisted
symmetrization

    Psi_r(P) = sum_{g in S_r} g . ( prod_{i<j} zeta(z_i/z_j) * P ),
    zeta(z)  = (1 - sigma z)(1 - sigmabar z)(1 - (sigma sigmabar)^{-1} z)
               / ( z (1 - z) ),

and the product of Psi_r(P) and Psi_s(Q) is Psi_{r+s}(P * Q-shifted).  The
kernel carries the 1/z making it degree-balanced,

    zeta(x) / zeta(1/x)  =  chi_minus(x, 1) / chi_plus(x, 1),

which is exactly what the quadratic and cubic generator relations require;
the unbalanced variant (without the 1/z) fails them by a monomial twist.

Each SymLaurent carries, besides its canonical coordinates, an optional
preimage seed; products of seeded elements reduce to seed concatenation,
which is what makes exact computation at rank 5 and 6 affordable.

Canonical coordinates are alternant coordinates: writing
zeta(z_i/z_j) = N(z_i, z_j) / (z_i z_j (z_j - z_i)) one gets

    Psi_r(P) = AntiSym( K * P * prod_k z_k^{-(n-1)} ) / prod_{i<j} (z_j - z_i)

with K the expanded kernel numerator, so the signed collection of the
numerator over strictly decreasing exponent labels determines the element.
The monomial-symmetric expansion is recovered on demand through Schur
polynomials (a staircase-quotient of alternants).
"""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction

from . import linalg, zpoly
from .errors import (
    DenominatorNotCleared,
    InvalidIndex,
    RankBoundExceeded,
    WindowExhausted,
)
from .kfield import SymbolicDomain
from .lattice import Path, Region, deg as seg_deg, det, minimal_paths


def partitions_of(n):
    """Weakly decreasing positive tuples summing to n."""
    if n == 0:
        return [()]
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        for part in range(min(rest, cap), 0, -1):
            rec(rest - part, part, acc + [part])

    rec(n, n, [])
    return out


def partition_multiplicity_factorial(lam):
    """Product of the multiplicity factorials m_j! of a partition."""
    out = 1
    run = 1
    for i in range(1, len(lam) + 1):
        if i < len(lam) and lam[i] == lam[i - 1]:
            run += 1
        else:
            for k in range(2, run + 1):
                out *= k
            run = 1
    return out


def ray_series_coeff(dom, lam):
    """Coefficient of the u-monomial over a partition in the ray element.

    The change of generators along a primitive ray is
    sum_{i>=1} theta_i s^i = 1 - exp(-sum_r alpha_r u_r s^r), so the
    theta of degree n expands as
    sum over partitions of n of (-1)^(length-1) prod(alpha) / prod(mult!)
    times the corresponding product of u's.  The plain exponential without
    the alternating sign is inconsistent with the commutation relation for
    pairs with an empty triangle and one non-primitive leg.
    """
    coeff = dom.one
    for part in lam:
        coeff = coeff * dom.alpha(part)
    coeff = coeff / partition_multiplicity_factorial(lam)
    if len(lam) % 2 == 0:
        coeff = -coeff
    return coeff


class ZetaKernel:
    """The kernel as an explicit rational expression in one variable.

    ``numerator_coeffs`` lists the coefficients of
    (1 - sigma z)(1 - sigmabar z)(1 - (sigma sigmabar)^{-1} z)
    by ascending power of z; ``evaluate`` divides by (1 - z).  The
    symmetrization weight used by the algebra carries an extra 1/z on top
    of this (see the module docstring); ``evaluate_balanced`` includes it.
    """

    def __init__(self, dom):
        self.dom = dom
        # (1 - s z)(1 - t z)(1 - (st)^-1 z) = 1 - E1 z + E2 z^2 - z^3
        self.numerator_coeffs = (dom.one, -dom.e1, dom.e2, -dom.one)
        self.denominator_coeffs = (dom.one, -dom.one)

    def evaluate(self, zval):
        """Value at a coefficient-domain point zval (with 1 - zval invertible)."""
        num = self.dom.zero
        for k, c in enumerate(self.numerator_coeffs):
            num = num + c * zval ** k
        den = self.dom.one - zval
        return num / den

    def evaluate_balanced(self, zval):
        """The degree-balanced weight zeta(z)/z used in the symmetrization."""
        return self.evaluate(zval) / zval


class SymLaurent:
    """A symmetric Laurent polynomial in ``rank`` variables over K.

    ``alt`` holds the canonical alternant coordinates; ``terms`` exposes the
    monomial-symmetric expansion, computed lazily.  ``seed`` is an optional
    preimage under the symmetrization map, preserved through linear
    operations and used for fast products.
    """

    __slots__ = ("alg", "rank", "alt", "_terms", "seed")

    def __init__(self, alg, rank, alt, seed=None):
        self.alg = alg
        self.rank = rank
        self.alt = alt
        self.seed = seed
        self._terms = None

    @property
    def terms(self):
        if self._terms is None:
            self._terms = zpoly.alternant_to_monomial(self.alt, self.rank, self.alg.dom)
        return self._terms

    def is_zero(self):
        return not self.alt

    def __bool__(self):
        return bool(self.alt)

    def __eq__(self, other):
        if not isinstance(other, SymLaurent):
            return NotImplemented
        return self.rank == other.rank and self.alt == other.alt

    def __add__(self, other):
        self._check(other)
        alt = dict(self.alt)
        zpoly.zp_add_into(alt, other.alt)
        seed = None
        if self.seed is not None and other.seed is not None:
            seed = dict(self.seed)
            zpoly.zp_add_into(seed, other.seed)
        return SymLaurent(self.alg, self.rank, alt, seed)

    def __sub__(self, other):
        self._check(other)
        alt = dict(self.alt)
        zpoly.zp_add_into(alt, other.alt, -self.alg.dom.one)
        seed = None
        if self.seed is not None and other.seed is not None:
            seed = dict(self.seed)
            zpoly.zp_add_into(seed, other.seed, -self.alg.dom.one)
        return SymLaurent(self.alg, self.rank, alt, seed)

    def scale(self, c):
        if not c:
            return SymLaurent(self.alg, self.rank, {}, {})
        alt = zpoly.zp_scale(self.alt, c)
        seed = None if self.seed is None else zpoly.zp_scale(self.seed, c)
        return SymLaurent(self.alg, self.rank, alt, seed)

    def _check(self, other):
        if self.rank != other.rank:
            raise InvalidIndex(f"rank mismatch: {self.rank} vs {other.rank}")
        if self.alg is not other.alg:
            raise InvalidIndex("elements belong to different algebra contexts")

    def degrees(self):
        """Total degrees present (bigrading: (rank, degree))."""
        offset = self.rank * (self.rank - 1) // 2
        return sorted({sum(lab) - offset for lab in self.alt})

    def to_json(self):
        dom = self.alg.dom
        items = sorted(self.terms.items(), reverse=True)
        return {
            "rank": self.rank,
            "terms": [{"label": list(lab), "coeff": dom.render(c)} for lab, c in items],
        }

    def __repr__(self):
        if not self.alt:
            return "SymLaurent(0)"
        parts = [f"m{list(lab)}*({c})" for lab, c in sorted(self.terms.items(), reverse=True)]
        return f"SymLaurent(rank={self.rank}, " + " + ".join(parts) + ")"


class ShuffleAlgebra:
    """Context object: coefficient domain, kernel caches, generator images."""

    def __init__(self, dom=None, rank_bound=6):
        self.dom = dom if dom is not None else SymbolicDomain()
        self.rank_bound = rank_bound
        self.kcache = zpoly.KernelCache(self.dom)
        self.zeta = ZetaKernel(self.dom)
        self._u_seeds = {}
        self._mono_alt = {}
        self._word_cache = {}
        self._lock = threading.Lock()

    # ----------------------------------------------------------------- psi

    def psi_alt(self, seed, rank):
        """Alternant coordinates of Psi_rank(seed)."""
        if rank == 0:
            return dict(seed)
        K = zpoly.kernel_numerator_abstract(rank)
        return zpoly.antisym_image(seed, rank, K, self.kcache)

    def mono_alt(self, rank, mono):
        """Cached alternant coordinates of Psi(single monomial)."""
        key = (rank, mono)
        hit = self._mono_alt.get(key)
        if hit is None:
            hit = self.psi_alt({mono: self.dom.one}, rank)
            self._mono_alt[key] = hit
        return hit

    def symmetrize_psi(self, seed, rank) -> SymLaurent:
        """Psi_rank applied to a Laurent polynomial given as {exponents: coeff}.

        The result is a genuine Laurent polynomial: the simple poles at
        z_i = z_j cancel pairwise in the symmetrized sum.
        """
        if rank < 0:
            raise InvalidIndex("rank must be >= 0")
        for e in seed:
            if len(e) != rank:
                raise InvalidIndex(f"exponent tuple {e} does not have length {rank}")
        alt = self.psi_alt(seed, rank)
        return SymLaurent(self, rank, alt, dict(seed))

    def scalar(self, c) -> SymLaurent:
        if isinstance(c, (int, Fraction)):
            c = self.dom.from_fraction(c)
        alt = {(): c} if c else {}
        return SymLaurent(self, 0, alt, dict(alt))

    def one(self) -> SymLaurent:
        return self.scalar(1)

    def zero(self, rank=0) -> SymLaurent:
        return SymLaurent(self, rank, {}, {})

    def monomial(self, d) -> SymLaurent:
        """The rank-1 generator image z^d."""
        return self.symmetrize_psi({(d,): self.dom.one}, 1)

    def from_terms(self, rank, terms) -> SymLaurent:
        """Build from monomial-symmetric coordinates {weakly decreasing label: coeff}.

        No preimage seed is attached; products fall back to the symmetrized
        rational-function route.
        """
        for lab in terms:
            if list(lab) != sorted(lab, reverse=True):
                raise InvalidIndex(f"label {lab} is not weakly decreasing")
        expanded = zpoly.expand_monomial_terms(terms)
        if rank:
            V = zpoly.vandermonde(rank, self.dom.one)
            alt = zpoly.alternant_coords(zpoly.zp_mul(expanded, V))
        else:
            alt = dict(expanded)
        return SymLaurent(self, rank, alt, None)

    # ------------------------------------------------------------- product

    def shuffle_mul(self, h: SymLaurent, f: SymLaurent) -> SymLaurent:
        """Associative product on A; bigrading adds."""
        if h.alg is not self or f.alg is not self:
            raise InvalidIndex("operands belong to a different context")
        if h.rank == 0:
            c = h.alt.get((), self.dom.zero)
            return f.scale(c)
        if f.rank == 0:
            c = f.alt.get((), self.dom.zero)
            return h.scale(c)
        if h.seed is not None and f.seed is not None:
            seed = {}
            for eh, ch in h.seed.items():
                for ef, cf in f.seed.items():
                    e = eh + ef
                    v = ch * cf
                    cur = seed.get(e)
                    if cur is None:
                        seed[e] = v
                    else:
                        cur = cur + v
                        if cur:
                            seed[e] = cur
                        else:
                            del seed[e]
            return self.symmetrize_psi(seed, h.rank + f.rank)
        return self._shuffle_mul_expanded(h, f)

    def _shuffle_mul_expanded(self, h, f):
        """Product through the symmetrized rational expression.

        Every choice of which variables carry h contributes
        h(z_A) f(z_B) prod_{i in A, j in B} zeta(z_i/z_j); the terms are put
        over the common denominator prod_{i<j}(z_j - z_i) (a transient
        numerator/denominator pair) and the denominator is divided out
        exactly at the end.
        """
        r, s = h.rank, f.rank
        n = r + s
        dom = self.dom
        h_exp = zpoly.expand_monomial_terms(h.terms)
        f_exp = zpoly.expand_monomial_terms(f.terms)
        pair_cache = {}

        def pair_numerator(i, j):
            # N(z_i, z_j) = z_j^3 - E1 z_i z_j^2 + E2 z_i^2 z_j - z_i^3
            key = (i, j)
            hit = pair_cache.get(key)
            if hit is None:
                def mono(ei, ej):
                    e = [0] * n
                    e[i] = ei
                    e[j] = ej
                    return tuple(e)
                hit = {
                    mono(0, 3): dom.one,
                    mono(1, 2): -dom.e1,
                    mono(2, 1): dom.e2,
                    mono(3, 0): -dom.one,
                }
                pair_cache[key] = hit
            return hit

        total = {}
        for A in itertools.combinations(range(n), r):
            B = tuple(k for k in range(n) if k not in A)
            sign = 1
            term = {}
            for e, c in h_exp.items():
                vec = [0] * n
                for pos, exp in zip(A, e):
                    vec[pos] = exp
                term[tuple(vec)] = c
            fterm = {}
            for e, c in f_exp.items():
                vec = [0] * n
                for pos, exp in zip(B, e):
                    vec[pos] = exp
                fterm[tuple(vec)] = c
            term = zpoly.zp_mul(term, fterm)
            shift = [0] * n
            for i in A:
                shift[i] = -s
            for j in B:
                shift[j] = -r
            term = zpoly.zp_shift(term, tuple(shift))
            for i in A:
                for j in B:
                    term = zpoly.zp_mul(term, pair_numerator(i, j))
                    if i > j:
                        sign = -sign
            # complete the split-pair denominator to the full Vandermonde
            for block in (A, B):
                for a, b in itertools.combinations(block, 2):
                    fac = {}
                    eb = [0] * n
                    eb[b] = 1
                    fac[tuple(eb)] = dom.one
                    ea = [0] * n
                    ea[a] = 1
                    fac[tuple(ea)] = -dom.one
                    term = zpoly.zp_mul(term, fac)
            zpoly.zp_add_into(total, term, dom.one if sign > 0 else -dom.one)
        for i in range(n):
            for j in range(i + 1, n):
                total = zpoly.divide_binomial_exact(total, i, j)
        alt = zpoly.alternant_coords(zpoly.zp_mul(total, zpoly.vandermonde(n, dom.one)))
        return SymLaurent(self, n, alt, None)

    def commutator(self, h, f):
        return self.shuffle_mul(h, f) - self.shuffle_mul(f, h)

    # ------------------------------------------------------ generator tower

    def u_seed(self, seg):
        """Preimage seed of the generator image attached to a segment of (Z^2)^>.

        Rank 1 is the monomial z^d; higher ranks are built from the smallest
        minimal path through the commutator defining the ray elements, then
        solving the exponential change of generators along the primitive ray.
        """
        seg = (int(seg[0]), int(seg[1]))
        hit = self._u_seeds.get(seg)
        if hit is not None:
            return hit
        p, q = seg
        if p <= 0:
            raise InvalidIndex(f"{seg} is not in (Z^2)^>")
        if p > self.rank_bound:
            raise RankBoundExceeded(f"rank {p} exceeds bound {self.rank_bound}")
        dom = self.dom
        if p == 1:
            seed = {(q,): dom.one}
        else:
            g = seg_deg(seg)
            theta = self._theta_commutator_seed(seg)
            if g == 1:
                seed = zpoly.zp_scale(theta, dom.one / dom.alpha(1))
            else:
                x0 = (p // g, q // g)
                acc = dict(theta)
                for lam in partitions_of(g):
                    if lam == (g,):
                        continue
                    coeff = ray_series_coeff(dom, lam)
                    prod = self._ray_product_seed(x0, lam)
                    zpoly.zp_add_into(acc, prod, -coeff)
                seed = zpoly.zp_scale(acc, dom.one / dom.alpha(g))
        with self._lock:
            self._u_seeds.setdefault(seg, seed)
        return self._u_seeds[seg]

    def _ray_product_seed(self, x0, lam):
        """Seed of the product of u_{part * x0} over the parts of a partition."""
        seed = {(): self.dom.one}
        for part in lam:
            factor = self.u_seed((part * x0[0], part * x0[1]))
            out = {}
            for e1, c1 in seed.items():
                for e2, c2 in factor.items():
                    e = e1 + e2
                    v = c1 * c2
                    cur = out.get(e)
                    if cur is None:
                        out[e] = v
                    else:
                        cur = cur + v
                        if cur:
                            out[e] = cur
                        else:
                            del out[e]
            seed = out
        return seed

    def _theta_commutator_seed(self, seg):
        """Seed of theta(seg) = eps * alpha_1 * [u(x), u(seg - x)], x the
        lexicographically smallest point on the adjacent lattice line."""
        pairs = minimal_paths(seg)
        x, rest = pairs[0]
        return self._theta_from_pair(x, rest)

    def _theta_from_pair(self, x, rest):
        dom = self.dom
        sign = 1 if det(rest, x) > 0 else -1
        a = self.u_seed(x)
        b = self.u_seed(rest)
        comm = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                zpoly.zp_add_into(comm, {e1 + e2: c1 * c2})
        for e1, c1 in b.items():
            for e2, c2 in a.items():
                zpoly.zp_add_into(comm, {e1 + e2: -(c1 * c2)})
        scale = dom.alpha(1) if sign > 0 else -dom.alpha(1)
        return zpoly.zp_scale(comm, scale)

    def u_image(self, seg) -> SymLaurent:
        """Image of the generator u_seg; independent of the minimal path used."""
        seed = self.u_seed(seg)
        return self.symmetrize_psi(seed, seg[0])

    def theta_image(self, seg) -> SymLaurent:
        """The ray element theta_seg through the exponential change of generators."""
        p, q = seg
        if p <= 0:
            raise InvalidIndex(f"{seg} is not in (Z^2)^>")
        g = seg_deg(seg)
        x0 = (p // g, q // g)
        acc = {}
        for lam in partitions_of(g):
            zpoly.zp_add_into(acc, self._ray_product_seed(x0, lam),
                              ray_series_coeff(self.dom, lam))
        return self.symmetrize_psi(acc, p)

    def word_image(self, word) -> SymLaurent:
        """Image of an ordered product of rank-1 generators z^{d_1} ... z^{d_r}."""
        word = tuple(int(d) for d in word)
        hit = self._word_cache.get(word)
        if hit is None:
            rank = len(word)
            alt = self.mono_alt(rank, word) if rank else {(): self.dom.one}
            hit = SymLaurent(self, rank, alt, {word: self.dom.one})
            self._word_cache[word] = hit
        return hit

    def path_image(self, path) -> SymLaurent:
        """Image of an ordered product of generators along a path in (Z^2)^>."""
        if not isinstance(path, Path):
            path = Path(path)
        result = self.one()
        for seg in path:
            result = self.shuffle_mul(result, self.u_image(seg))
        return result

    # -------------------------------------------------------- decomposition

    def decompose_to_words(self, f: SymLaurent, window):
        """Write f as a combination of ordered products of rank-1 generators.

        Words use letter degrees inside [window[0], window[1]]; the exact
        linear system is solved degree by degree over K.  Raises
        WindowExhausted when f is not in the windowed span.
        """
        lo, hi = window
        if lo > hi:
            raise WindowExhausted(f"empty window {window}")
        r = f.rank
        if r == 0:
            c = f.alt.get(())
            return {(): c} if c else {}
        offset = r * (r - 1) // 2
        by_degree = {}
        for lab, c in f.alt.items():
            by_degree.setdefault(sum(lab) - offset, {})[lab] = c
        out = {}
        for degree, alt_part in by_degree.items():
            words = [w for w in itertools.product(range(lo, hi + 1), repeat=r)
                     if sum(w) == degree]
            if not words:
                raise WindowExhausted(f"no words of degree {degree} in window {window}")
            columns = [self.mono_alt(r, w) for w in words]
            labels = set(alt_part)
            for col in columns:
                labels.update(col)
            labels = sorted(labels)
            matrix = [[col.get(lab, self.dom.zero) for col in columns] for lab in labels]
            rhs = [alt_part.get(lab, self.dom.zero) for lab in labels]
            sol = linalg.solve(matrix, rhs, self.dom.zero)
            if sol is None:
                raise WindowExhausted(
                    f"degree {degree} piece not in the span of window {window}")
            for w, c in zip(words, sol):
                if c:
                    out[w] = c
        return out

    def recompose_words(self, combo) -> SymLaurent:
        """Inverse of decompose_to_words for verification."""
        items = list(combo.items())
        if not items:
            return self.one().scale(self.dom.zero)
        rank = len(items[0][0])
        total = self.zero(rank)
        for w, c in items:
            total = total + self.word_image(w).scale(c)
        return total
