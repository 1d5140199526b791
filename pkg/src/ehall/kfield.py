"""Exact arithmetic in the coefficient field K = Q(sigma, sigmabar).

Elements are reduced-lazily fractions of Laurent polynomials in the two
formal parameters sigma and sigmabar (written ``s`` and ``t`` in textual
form).  Coefficients are exact rationals throughout; equality is decided
by cross-multiplication, so full multivariate GCD is never required.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .errors import (
    DegenerateSpecialization,
    DivisionByZero,
    InvalidIndex,
    PoleAtPoint,
    SamplingExhausted,
)


def _gcd_fractions(values):
    """gcd of a collection of Fractions: gcd of numerators / lcm of denominators."""
    num = 0
    den = 1
    for v in values:
        num = math.gcd(num, abs(v.numerator))
        den = den * v.denominator // math.gcd(den, v.denominator)
    if num == 0:
        return Fraction(1)
    return Fraction(num, den)


class LaurentPoly2:
    """A Laurent polynomial in sigma, sigmabar with Fraction coefficients.

    Stored as a map from exponent pairs (a, b) to nonzero coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        self.terms = {e: c for e, c in terms.items() if c != 0}

    @classmethod
    def constant(cls, q):
        q = Fraction(q)
        return cls({(0, 0): q}) if q else cls()

    @classmethod
    def monomial(cls, a, b, coeff=1):
        coeff = Fraction(coeff)
        return cls({(a, b): coeff}) if coeff else cls()

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly2):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return LaurentPoly2({e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        res = LaurentPoly2.__new__(LaurentPoly2)
        res.terms = out
        return res

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                return LaurentPoly2()
            return LaurentPoly2({e: c * q for e, c in self.terms.items()})
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                e = (a1 + a2, b1 + b2)
                v = out.get(e)
                if v is None:
                    out[e] = c1 * c2
                else:
                    v = v + c1 * c2
                    if v:
                        out[e] = v
                    else:
                        del out[e]
        res = LaurentPoly2.__new__(LaurentPoly2)
        res.terms = out
        return res

    __rmul__ = __mul__

    def shift(self, da, db):
        """Multiply by the monomial sigma^da * sigmabar^db."""
        if not (da or db):
            return self
        res = LaurentPoly2.__new__(LaurentPoly2)
        res.terms = {(a + da, b + db): c for (a, b), c in self.terms.items()}
        return res

    def min_exponents(self):
        ita = iter(self.terms)
        first = next(ita)
        ma, mb = first
        for a, b in ita:
            if a < ma:
                ma = a
            if b < mb:
                mb = b
        return ma, mb

    def content(self):
        return _gcd_fractions(self.terms.values())

    def evaluate(self, sv, tv):
        """Exact value at sigma = sv, sigmabar = tv (nonzero Fractions)."""
        total = Fraction(0)
        for (a, b), c in self.terms.items():
            total += c * sv ** a * tv ** b
        return total

    def leading_item(self):
        e = max(self.terms)
        return e, self.terms[e]

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b) in sorted(self.terms, reverse=True):
            c = self.terms[(a, b)]
            factors = []
            if a:
                factors.append("s" if a == 1 else f"s^{a}")
            if b:
                factors.append("t" if b == 1 else f"t^{b}")
            if not factors or abs(c) != 1:
                factors.insert(0, str(abs(c)))
            chunk = "*".join(factors)
            parts.append(("- " if c < 0 else "+ ") + chunk)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    __repr__ = __str__


ZERO_POLY = LaurentPoly2()
ONE_POLY = LaurentPoly2.constant(1)
SIGMA = LaurentPoly2.monomial(1, 0)
SIGMABAR = LaurentPoly2.monomial(0, 1)


def poly_exact_div(A: LaurentPoly2, B: LaurentPoly2):
    """Quotient A/B when B divides A exactly, else None.

    B must be normalized to minimal exponents (0, 0); A may be any Laurent
    polynomial.  Leading-term peeling under lex order; for exact division
    every peel step stays inside the quotient's support.
    """
    if A.is_zero():
        return A
    ma, mb = A.min_exponents()
    rem = dict(A.shift(-ma, -mb).terms)
    lead_b = max(B.terms)
    lead_bc = B.terms[lead_b]
    quot = {}
    guard = 4 * (len(rem) + 1) * (len(B.terms) + 1) + 64
    while rem:
        guard -= 1
        if guard < 0:
            return None
        lead_a = max(rem)
        qa = lead_a[0] - lead_b[0]
        qb = lead_a[1] - lead_b[1]
        if qa < 0 or qb < 0:
            return None
        qc = rem[lead_a] / lead_bc
        quot[(qa, qb)] = qc
        for (ba, bb), bc in B.terms.items():
            e = (ba + qa, bb + qb)
            v = rem.get(e, 0) - qc * bc
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
    res = LaurentPoly2.__new__(LaurentPoly2)
    res.terms = quot
    return res.shift(ma, mb)


def _normalize_factor(f: LaurentPoly2):
    """(normalized factor, compensation) with factor min-exp 0, content 1,
    positive leading coefficient; compensation c*s^a*t^b satisfies
    f = compensation * factor."""
    ma, mb = f.min_exponents()
    if ma or mb:
        f = f.shift(-ma, -mb)
    c = f.content()
    if f.terms[max(f.terms)] < 0:
        c = -c
    if c != 1:
        f = f * (1 / c)
    return f, (c, ma, mb)


class FieldElem:
    """An element of K = Q(sigma, sigmabar).

    Stored as an expanded numerator over a tuple of denominator factors;
    the factored form keeps the towers of alpha_i denominators produced by
    the algebra from being multiplied out, and lets sums over a common
    denominator cancel cheaply.  Equality is cross-multiplication after
    stripping shared factors; full GCD reduction is never needed.
    """

    __slots__ = ("num", "fac", "_den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction)):
            num = LaurentPoly2.constant(num)
        if den is None:
            factors = ()
        else:
            if isinstance(den, (int, Fraction)):
                den = LaurentPoly2.constant(den)
            if den.is_zero():
                raise DivisionByZero("field element with zero denominator")
            factors = (den,)
        self.num, self.fac = _reduce_fraction(num, factors)
        self._den = None

    @classmethod
    def _make(cls, num, factors):
        r = cls.__new__(cls)
        r.num, r.fac = _reduce_fraction(num, factors)
        r._den = None
        return r

    @property
    def den(self) -> LaurentPoly2:
        """The denominator, expanded from its factored form."""
        if self._den is None:
            d = ONE_POLY
            for f in self.fac:
                d = d * f
            self._den = d
        return self._den

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FieldElem(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if self.fac == other.fac:
            return self.num == other.num
        mine, theirs = _strip_common(self.fac, other.fac)
        left = self.num
        for f in theirs:
            left = left * f
        right = other.num
        for f in mine:
            right = right * f
        return left == right

    def __hash__(self):
        raise TypeError("FieldElem is not hashable (lazy reduction)")

    def __neg__(self):
        r = FieldElem.__new__(FieldElem)
        r.num = -self.num
        r.fac = self.fac
        r._den = self._den
        return r

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FieldElem(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if self.num.is_zero():
            return other
        if other.num.is_zero():
            return self
        if self.fac == other.fac:
            num = self.num + other.num
            r = FieldElem.__new__(FieldElem)
            r.num = num
            r.fac = self.fac if num else ()
            r._den = None
            return r
        mine, theirs = _strip_common(self.fac, other.fac)
        left = self.num
        for f in theirs:
            left = left * f
        right = other.num
        for f in mine:
            right = right * f
        return FieldElem._make(left + right, self.fac + theirs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = FieldElem(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return FieldElem(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                return K_ZERO
            r = FieldElem.__new__(FieldElem)
            r.num = self.num * q
            r.fac = self.fac
            r._den = self._den
            return r
        if not isinstance(other, FieldElem):
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return K_ZERO
        return FieldElem._make(self.num * other.num, self.fac + other.fac)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                raise DivisionByZero("division by zero")
            return self * (1 / q)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by zero field element")
        num = self.num
        for f in other.fac:
            num = num * f
        return FieldElem._make(num, self.fac + (other.num,))

    def __rtruediv__(self, other):
        return FieldElem(other) / self

    def __pow__(self, n):
        if n < 0:
            return FieldElem(1) / self ** (-n)
        result = K_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __str__(self):
        if not self.fac:
            if len(self.num.terms) <= 1:
                return str(self.num)
            return f"({self.num})"
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def _strip_common(fac_a, fac_b):
    """Remove shared factors; returns the leftovers of each side."""
    remaining = list(fac_b)
    extra_a = []
    for f in fac_a:
        try:
            remaining.remove(f)
        except ValueError:
            extra_a.append(f)
    return tuple(extra_a), tuple(remaining)


def _reduce_fraction(num, factors):
    """Normalize factors, fold their units into the numerator, cancel
    factors dividing the numerator exactly."""
    if num.is_zero():
        return ZERO_POLY, ()
    kept = []
    scale = Fraction(1)
    sa = sb = 0
    for f in factors:
        if f.is_zero():
            raise DivisionByZero("field element with zero denominator")
        fhat, (c, ma, mb) = _normalize_factor(f)
        scale *= c
        sa += ma
        sb += mb
        if fhat == ONE_POLY:
            continue
        kept.append(fhat)
    if scale != 1:
        num = num * (1 / scale)
    if sa or sb:
        num = num.shift(-sa, -sb)
    if kept and len(num.terms) <= _CANCEL_NUM_LIMIT:
        out = []
        for f in sorted(kept, key=lambda p: -len(p.terms)):
            q = poly_exact_div(num, f)
            if q is not None:
                num = q
            else:
                out.append(f)
        kept = out
    kept.sort(key=_factor_key)
    return num, tuple(kept)


_CANCEL_NUM_LIMIT = 512


def _factor_key(f):
    return (len(f.terms), sorted(f.terms.items()))


K_ZERO = FieldElem(0)
K_ONE = FieldElem(1)
K_SIGMA = FieldElem(SIGMA)
K_SIGMABAR = FieldElem(SIGMABAR)


def field_arith(x: FieldElem, y: FieldElem, op: str) -> FieldElem:
    """Apply one of {add, sub, mul, div} to two field elements."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise InvalidIndex(f"unknown operation {op!r}")


def alpha_poly(i: int) -> LaurentPoly2:
    """The Laurent polynomial i * alpha_i = (1-s^i)(1-t^i)(1-(st)^-i).

    The constant terms cancel, leaving six monomials.
    """
    if i <= 0:
        raise InvalidIndex(f"alpha index must be >= 1, got {i}")
    return LaurentPoly2({
        (i, 0): Fraction(-1),
        (0, i): Fraction(-1),
        (-i, -i): Fraction(-1),
        (i, i): Fraction(1),
        (0, -i): Fraction(1),
        (-i, 0): Fraction(1),
    })


def alpha(i: int) -> FieldElem:
    """alpha_i = (1-sigma^i)(1-sigmabar^i)(1-(sigma*sigmabar)^-i)/i."""
    return FieldElem(alpha_poly(i), LaurentPoly2.constant(i))


# Elementary symmetric values of the kernel roots {s, t, (st)^-1}:
#   E1 = s + t + (st)^-1,   E2 = st + s^-1 + t^-1   (the product is 1).
E1_POLY = LaurentPoly2({(1, 0): Fraction(1), (0, 1): Fraction(1), (-1, -1): Fraction(1)})
E2_POLY = LaurentPoly2({(1, 1): Fraction(1), (-1, 0): Fraction(1), (0, -1): Fraction(1)})


def is_degenerate_point(sv: Fraction, tv: Fraction) -> bool:
    """True where alpha_1 vanishes: sigma = 1, sigmabar = 1 or sigma*sigmabar = 1."""
    return sv == 1 or tv == 1 or sv * tv == 1


def specialize(x: FieldElem, sigma_val, sigmabar_val, nondegenerate=False) -> Fraction:
    """Exact value of x at sigma = sigma_val, sigmabar = sigmabar_val.

    Raises PoleAtPoint if the denominator vanishes there, and
    DegenerateSpecialization if a nondegenerate point was requested but
    alpha_1 vanishes at (sigma_val, sigmabar_val).
    """
    sv = Fraction(sigma_val)
    tv = Fraction(sigmabar_val)
    if sv == 0 or tv == 0:
        raise PoleAtPoint("sigma and sigmabar must be nonzero (negative exponents)")
    if nondegenerate and is_degenerate_point(sv, tv):
        raise DegenerateSpecialization(f"alpha_1 vanishes at ({sv}, {tv})")
    den = Fraction(1)
    for f in x.fac:
        v = f.evaluate(sv, tv)
        if v == 0:
            raise PoleAtPoint(f"denominator vanishes at ({sv}, {tv})")
        den *= v
    return x.num.evaluate(sv, tv) / den


def random_nondegenerate_point(rng: random.Random):
    """A random rational point where alpha_1 does not vanish."""
    while True:
        sv = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        tv = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        if sv and tv and not is_degenerate_point(sv, tv):
            return sv, tv


def equals_probabilistic(x: FieldElem, y: FieldElem, trials: int, seed: int) -> bool:
    """Monte-Carlo equality test at deterministic pseudorandom points.

    A ``False`` answer is always correct; ``True`` is correct with high
    probability.  Pole points are skipped and redrawn; after 100*trials
    redraws SamplingExhausted is raised.
    """
    if trials < 1:
        raise InvalidIndex("trials must be >= 1")
    rng = random.Random(seed)
    diff = x - y
    done = 0
    attempts = 0
    limit = 100 * trials
    while done < trials:
        if attempts >= limit:
            raise SamplingExhausted(f"{attempts} redraws without {trials} usable points")
        attempts += 1
        sv, tv = random_nondegenerate_point(rng)
        if any(f.evaluate(sv, tv) == 0 for f in diff.fac):
            continue
        if diff.num.evaluate(sv, tv) != 0:
            return False
        done += 1
    return True


class SymbolicDomain:
    """Coefficient domain K = Q(sigma, sigmabar) with FieldElem elements."""

    name = "symbolic"

    def __init__(self):
        self.zero = K_ZERO
        self.one = K_ONE
        self.sigma = K_SIGMA
        self.sigmabar = K_SIGMABAR
        self.e1 = FieldElem(E1_POLY)
        self.e2 = FieldElem(E2_POLY)
        self._alpha = {}

    def alpha(self, i):
        a = self._alpha.get(i)
        if a is None:
            a = alpha(i)
            self._alpha[i] = a
        return a

    def from_fraction(self, q):
        return FieldElem(q)

    def render(self, c):
        return str(c)


class RationalDomain:
    """K specialized at rational sigma, sigmabar; elements are Fractions.

    The point must be nondegenerate (alpha_1 nonzero) so that relation
    coefficients such as 1/alpha_1 stay defined.
    """

    name = "rational"

    def __init__(self, sigma_val, sigmabar_val):
        sv = Fraction(sigma_val)
        tv = Fraction(sigmabar_val)
        if sv == 0 or tv == 0:
            raise DegenerateSpecialization("sigma and sigmabar must be nonzero")
        if is_degenerate_point(sv, tv):
            raise DegenerateSpecialization(
                f"alpha_1 vanishes at ({sv}, {tv}); pick a nondegenerate point")
        self.sigma = sv
        self.sigmabar = tv
        self.zero = Fraction(0)
        self.one = Fraction(1)
        self.e1 = sv + tv + 1 / (sv * tv)
        self.e2 = sv * tv + 1 / sv + 1 / tv
        self._alpha = {}

    def alpha(self, i):
        a = self._alpha.get(i)
        if a is None:
            if i <= 0:
                raise InvalidIndex(f"alpha index must be >= 1, got {i}")
            sv, tv = self.sigma, self.sigmabar
            a = Fraction(1 - sv ** i) * (1 - tv ** i) * (1 - (sv * tv) ** -i) / i
            self._alpha[i] = a
        return a

    def from_fraction(self, q):
        return Fraction(q)

    def render(self, c):
        return str(c)
