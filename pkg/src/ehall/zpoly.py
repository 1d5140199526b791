"""Sparse Laurent polynomials in n variables z_1..z_n over a coefficient domain.

Polynomials are plain dicts mapping exponent tuples to nonzero coefficients.
The module also houses the machinery shared by the shuffle layer:

* the expanded kernel numerator  prod_{i<j} (z_j^3 - E1 z_i z_j^2 + E2 z_i^2 z_j - z_i^3),
  kept with abstract integer coefficients in E1, E2 so one build serves every
  coefficient domain;
* signed collection of a polynomial into alternant coordinates (coefficients
  on the antisymmetrized monomials A_lambda with strictly decreasing lambda);
* expansion of Schur polynomials in the monomial-symmetric basis via
  semistandard-tableau counts, used to materialize alternant coordinates;
* exact division by a binomial z_j - z_i, used by the rational-function route.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .errors import DenominatorNotCleared


def zp_scale(A, c):
    if not c:
        return {}
    return {e: q * c for e, q in A.items()}


def zp_add_into(acc, B, scale=None):
    """acc += scale * B, pruning zeros; mutates and returns acc."""
    for e, q in B.items():
        v = q if scale is None else q * scale
        cur = acc.get(e)
        if cur is None:
            acc[e] = v
        else:
            cur = cur + v
            if cur:
                acc[e] = cur
            else:
                del acc[e]
    return acc


def zp_mul(A, B):
    out = {}
    for ea, ca in A.items():
        for eb, cb in B.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = ca * cb
            cur = out.get(e)
            if cur is None:
                out[e] = v
            else:
                cur = cur + v
                if cur:
                    out[e] = cur
                else:
                    del out[e]
    return out


def zp_shift(A, vec):
    return {tuple(x + y for x, y in zip(e, vec)): c for e, c in A.items()}


def zp_permute(A, perm):
    """Relabel variables: z_k -> z_perm[k]."""
    out = {}
    for e, c in A.items():
        ne = [0] * len(e)
        for k, exp in enumerate(e):
            ne[perm[k]] = exp
        out[tuple(ne)] = c
    return out


def zp_embed(A, n, offset):
    """View a polynomial in fewer variables inside n variables at position offset."""
    out = {}
    for e, c in A.items():
        ne = [0] * n
        ne[offset:offset + len(e)] = e
        out[tuple(ne)] = c
    return out


def sort_desc_with_sign(vec):
    """(sorted_descending, parity_sign) or (None, 0) when entries repeat."""
    lst = list(vec)
    sign = 1
    n = len(lst)
    for i in range(1, n):
        key = lst[i]
        j = i - 1
        while j >= 0 and lst[j] < key:
            lst[j + 1] = lst[j]
            j -= 1
            sign = -sign
        lst[j + 1] = key
    for i in range(1, n):
        if lst[i] == lst[i - 1]:
            return None, 0
    return tuple(lst), sign


# ---------------------------------------------------------------------------
# Kernel numerator with abstract coefficients.
#
# An abstract coefficient is a dict {(a, b): int} meaning
# sum int * E1^a * E2^b, where E1, E2 are the elementary symmetric values of
# the kernel roots {sigma, sigmabar, (sigma*sigmabar)^-1}.
# ---------------------------------------------------------------------------


def _abs_add_into(acc, B, scale=1):
    for k, v in B.items():
        nv = acc.get(k, 0) + v * scale
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)
    return acc


def _abs_mul(A, B):
    out = {}
    for (a1, b1), v1 in A.items():
        for (a2, b2), v2 in B.items():
            k = (a1 + a2, b1 + b2)
            nv = out.get(k, 0) + v1 * v2
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


def _pair_factor(n, i, j):
    """z_j^3 - E1 z_i z_j^2 + E2 z_i^2 z_j - z_i^3 as an n-variable dict."""
    def mono(ei, ej):
        e = [0] * n
        e[i] = ei
        e[j] = ej
        return tuple(e)

    return {
        mono(0, 3): {(0, 0): 1},
        mono(1, 2): {(1, 0): -1},
        mono(2, 1): {(0, 1): 1},
        mono(3, 0): {(0, 0): -1},
    }


@lru_cache(maxsize=None)
def kernel_numerator_abstract(n):
    """prod_{i<j} pair factor, divided by prod_k z_k^{n-1}.

    The kernel factor for an ordered pair is
    (z_j^3 - E1 z_i z_j^2 + E2 z_i^2 z_j - z_i^3) / (z_i z_j (z_j - z_i)),
    the degree-balanced form whose numerator-over-denominator degree
    difference vanishes; the monomial shift folds in the inverse of
    prod_{i<j} z_i z_j, so that
    Psi(P) = AntiSym(K * P) / prod_{i<j}(z_j - z_i) with K this polynomial.
    """
    K = {tuple([0] * n): {(0, 0): 1}}
    for i in range(n):
        for j in range(i + 1, n):
            fac = _pair_factor(n, i, j)
            out = {}
            for e1, c1 in K.items():
                for e2, c2 in fac.items():
                    e = tuple(x + y for x, y in zip(e1, e2))
                    cur = out.get(e)
                    prod = _abs_mul(c1, c2)
                    if cur is None:
                        if prod:
                            out[e] = prod
                    else:
                        _abs_add_into(cur, prod)
                        if not cur:
                            del out[e]
            K = out
    shift = tuple(-(n - 1) for _ in range(n))
    return zp_shift(K, shift)


class KernelCache:
    """Domain-expanded kernel numerators plus E1^a E2^b power tables."""

    def __init__(self, dom):
        self.dom = dom
        self._powers = {(0, 0): dom.one}

    def e_power(self, a, b):
        key = (a, b)
        val = self._powers.get(key)
        if val is None:
            if a > 0:
                val = self.e_power(a - 1, b) * self.dom.e1
            else:
                val = self.e_power(a, b - 1) * self.dom.e2
            self._powers[key] = val
        return val

    def expand(self, abstract):
        total = self.dom.zero
        for (a, b), v in abstract.items():
            total = total + self.e_power(a, b) * v
        return total


def antisym_collect(F, n):
    """Alternant coordinates of F: {strictly decreasing label: coefficient}.

    The coordinate on label L is sum over the orbit of sgn * coeff, i.e.
    AntiSym(F) = sum_L coeff_L * A_L with A_L = sum_g sgn(g) z^{g.L}.
    """
    acc = {}
    for e, c in F.items():
        label, sign = sort_desc_with_sign(e)
        if label is None:
            continue
        cur = acc.get(label)
        v = c if sign > 0 else -c
        if cur is None:
            acc[label] = v
        else:
            cur = cur + v
            if cur:
                acc[label] = cur
            else:
                del acc[label]
    return acc


def alternant_coords(G):
    """Coordinates of an antisymmetric polynomial on the A_label basis.

    For antisymmetric G the coefficient at the sorted-strictly-decreasing
    monomial of each orbit is the coordinate itself (no orbit sum).
    """
    out = {}
    for e, c in G.items():
        lst = list(e)
        if all(lst[i] > lst[i + 1] for i in range(len(lst) - 1)):
            out[e] = c
    return out


def antisym_image(seed, n, kernel_expanded, kcache):
    """Alternant coordinates of AntiSym(K * seed), with K the cached kernel.

    The inner accumulation runs over abstract integer coefficients and only
    expands into the domain once per produced label, which keeps domain
    arithmetic off the hot path.
    """
    result = {}
    for m, cm in seed.items():
        local = {}
        for e, q_abs in kernel_expanded.items():
            vec = tuple(x + y for x, y in zip(e, m))
            label, sign = sort_desc_with_sign(vec)
            if label is None:
                continue
            cur = local.get(label)
            if cur is None:
                local[label] = dict(q_abs) if sign > 0 else {k: -v for k, v in q_abs.items()}
            else:
                _abs_add_into(cur, q_abs, sign)
                if not cur:
                    del local[label]
        for label, q_abs in local.items():
            v = kcache.expand(q_abs) * cm
            if not v:
                continue
            cur = result.get(label)
            if cur is None:
                result[label] = v
            else:
                cur = cur + v
                if cur:
                    result[label] = cur
                else:
                    del result[label]
    return result


# ---------------------------------------------------------------------------
# Schur polynomials in the monomial basis (for materializing alternants).
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _partitions_at_most(total, parts, cap):
    """Weakly decreasing tuples with <= parts entries summing to total, first <= cap."""
    if total == 0:
        return ((),)
    if parts == 0:
        return ()
    out = []
    for first in range(min(total, cap), 0, -1):
        for rest in _partitions_at_most(total - first, parts - 1, first):
            out.append((first,) + rest)
    return tuple(out)


def _is_horizontal_strip(inner, outer):
    """inner subseteq outer with at most one added box per column."""
    for i in range(len(outer)):
        a = inner[i] if i < len(inner) else 0
        if a > outer[i]:
            return False
        nxt = outer[i + 1] if i + 1 < len(outer) else 0
        if a < nxt:
            return False
    return True


@lru_cache(maxsize=None)
def _ssyt_count(shape, content):
    """Number of semistandard tableaux of the given shape and content vector."""
    if not content:
        return 1 if not shape or sum(shape) == 0 else 0
    *head, last = content
    total = 0
    inner_size = sum(shape) - last
    if inner_size < 0:
        return 0
    for inner in _partitions_at_most(inner_size, len(shape), shape[0] if shape else 0):
        if len(inner) > len(shape):
            continue
        if all((inner[i] if i < len(inner) else 0) <= shape[i] for i in range(len(shape))):
            if _is_horizontal_strip(inner, shape):
                total += _ssyt_count(inner, tuple(head))
    return total


@lru_cache(maxsize=None)
def schur_in_monomial(nu, n):
    """Expansion of the Schur polynomial s_nu(z_1..z_n) in monomial labels.

    Returns a tuple of (label, kostka) pairs; labels are weakly decreasing
    tuples of length n (padded with zeros).
    """
    size = sum(nu)
    if len(nu) > n:
        return ()
    out = []
    for rho in _partitions_at_most(size, n, size if size else 1):
        content = tuple(rho) + (0,) * (n - len(rho))
        k = _ssyt_count(tuple(nu), content)
        if k:
            label = tuple(list(rho) + [0] * (n - len(rho)))
            out.append((label, k))
    return tuple(out)


def alternant_to_monomial(alt, n, dom):
    """Convert alternant coordinates to monomial-symmetric coordinates.

    AntiSym coordinates of a polynomial F satisfy F / V = sum of Schur
    expansions, with V = prod_{i<j}(z_j - z_i) and a global sign
    (-1)^{n(n-1)/2} relating V to the staircase alternant.
    """
    delta = tuple(range(n - 1, -1, -1))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    out = {}
    for label, c in alt.items():
        mu = tuple(label[k] - delta[k] for k in range(n))
        base = mu[-1]
        nu = tuple(x - base for x in mu)
        while nu and nu[-1] == 0:
            nu = nu[:-1]
        for mlabel, kostka in schur_in_monomial(nu, n):
            shifted = tuple(x + base for x in mlabel)
            v = c * (kostka * sign)
            cur = out.get(shifted)
            if cur is None:
                out[shifted] = v
            else:
                cur = cur + v
                if cur:
                    out[shifted] = cur
                else:
                    del out[shifted]
    return out


def monomial_orbit(label):
    """Distinct permutations of a weakly decreasing exponent label."""
    return set(itertools.permutations(label))


def expand_monomial_terms(terms):
    """Expand m-basis coordinates into a full exponent dict."""
    out = {}
    for label, c in terms.items():
        for e in monomial_orbit(label):
            out[e] = c
    return out


def monomial_from_expanded(F, n):
    """Collect a symmetric expanded polynomial into m-basis coordinates."""
    out = {}
    for e, c in F.items():
        lab = tuple(sorted(e, reverse=True))
        if lab == e:
            out[lab] = c
    return out


def divide_binomial_exact(F, i, j):
    """Exact division of F by (z_j - z_i); raises if the remainder is nonzero."""
    if not F:
        return {}
    buckets = {}
    for e, c in F.items():
        k = e[j]
        key = e[:j] + (0,) + e[j + 1:]
        buckets.setdefault(k, {})[key] = c
    kmax = max(buckets)
    kmin = min(buckets)
    quotient = {}
    carry = {}
    for k in range(kmax, kmin - 1, -1):
        level = buckets.get(k, {})
        # Q_{k-1} = F_k + z_i * Q_k
        q_here = dict(level)
        for e, c in carry.items():
            ne = e[:i] + (e[i] + 1,) + e[i + 1:]
            cur = q_here.get(ne)
            if cur is None:
                q_here[ne] = c
            else:
                cur = cur + c
                if cur:
                    q_here[ne] = cur
                else:
                    del q_here[ne]
        if k == kmin:
            if q_here:
                raise DenominatorNotCleared("binomial division left a remainder")
            break
        for e, c in q_here.items():
            quotient[e[:j] + (k - 1,) + e[j + 1:]] = c
        carry = q_here
    return quotient


def vandermonde(n, one):
    """prod_{i<j} (z_j - z_i) as an expanded dict with +-one coefficients."""
    V = {tuple([0] * n): one}
    for i in range(n):
        for j in range(i + 1, n):
            fac = {}
            ej = [0] * n
            ej[j] = 1
            fac[tuple(ej)] = one
            ei = [0] * n
            ei[i] = 1
            fac[tuple(ei)] = -one
            V = zp_mul(V, fac)
    return V
