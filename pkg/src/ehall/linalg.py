"""Exact dense linear algebra over K and over the rationals.

Rational-function systems are solved fraction-free: rows are cleared of
their denominator factors (row scaling leaves solutions untouched), the
cleared polynomial matrix is reduced by Bareiss two-step elimination whose
divisions are exact, and only the final back-substitution returns to field
elements.  Plain Fraction systems take an ordinary Gaussian path.

Large symbolic solves first discover the solution support at a rational
specialization point; the restricted system is then solved symbolically and
the full residual is verified exactly, so the shortcut never affects
correctness, only speed.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from .errors import PoleAtPoint
from .kfield import FieldElem, LaurentPoly2, ONE_POLY, poly_exact_div, specialize

_HINT_POINTS = ((Fraction(2), Fraction(5)), (Fraction(3), Fraction(7)),
                (Fraction(-5), Fraction(3)))


def _is_field_elem(matrix, rhs):
    for row in matrix:
        for x in row:
            if x:
                return isinstance(x, FieldElem)
    for x in rhs or ():
        if x:
            return isinstance(x, FieldElem)
    return False


def _clear_row(row):
    """Scale a row of FieldElems to LaurentPoly2 entries (common denominator)."""
    union = Counter()
    for x in row:
        if x:
            union |= Counter(x.fac)
    out = []
    for x in row:
        if not x:
            out.append(LaurentPoly2())
            continue
        extra = union - Counter(x.fac)
        poly = x.num
        for f, k in extra.items():
            for _ in range(k):
                poly = poly * f
        out.append(poly)
    return out


def _bareiss_echelon(rows, ncols):
    """Fraction-free row echelon over LaurentPoly2; returns pivot list.

    rows may have more columns than ncols (augmented part is carried along);
    pivoting is restricted to the first ncols columns.
    """
    m = len(rows)
    width = len(rows[0]) if m else 0
    prev = ONE_POLY
    pivots = []
    r = 0
    for col in range(ncols):
        best = None
        for i in range(r, m):
            if rows[i][col]:
                sz = len(rows[i][col].terms)
                if best is None or sz < best[1]:
                    best = (i, sz)
        if best is None:
            continue
        if best[0] != r:
            rows[r], rows[best[0]] = rows[best[0]], rows[r]
        piv = rows[r][col]
        for i in range(r + 1, m):
            head = rows[i][col]
            if not head and not any(rows[i][j] for j in range(width)):
                continue
            for j in range(width):
                if j == col:
                    continue
                num = piv * rows[i][j] - head * rows[r][j]
                if num.is_zero():
                    rows[i][j] = num
                else:
                    q = poly_exact_div(num, prev) if prev != ONE_POLY else num
                    if q is None:
                        raise ArithmeticError("Bareiss division failed")
                    rows[i][j] = q
            rows[i][col] = LaurentPoly2()
        prev = piv
        pivots.append((r, col))
        r += 1
    return pivots


def _verify_solution(matrix, rhs, x, zero):
    for row, b in zip(matrix, rhs):
        acc = zero
        for c in range(len(row)):
            if x[c] and row[c]:
                acc = acc + row[c] * x[c]
        if acc - b:
            return False
    return True


def _solve_field_hinted(matrix, rhs, zero):
    """Support discovery at a specialization point, then a small exact solve."""
    n = len(matrix[0])
    for sv, tv in _HINT_POINTS:
        try:
            num_matrix = [[specialize(x, sv, tv) if x else Fraction(0) for x in row]
                          for row in matrix]
            num_rhs = [specialize(b, sv, tv) if b else Fraction(0) for b in rhs]
        except PoleAtPoint:
            continue
        rows = [list(r) + [b] for r, b in zip(num_matrix, num_rhs)]
        pivots = _eliminate_fraction(rows, n)
        sol = [Fraction(0)] * n
        for r, c in pivots:
            sol[c] = rows[r][n]
        if not _verify_solution(num_matrix, num_rhs, sol, Fraction(0)):
            return None  # numerically inconsistent: exactly inconsistent too
        support = [c for c in range(n) if sol[c]]
        sub = [[row[c] for c in support] for row in matrix]
        x_sub = _solve_field(sub, rhs, zero) if support else []
        if x_sub is None:
            continue
        x = [zero] * n
        for c, v in zip(support, x_sub):
            x[c] = v
        if _verify_solution(matrix, rhs, x, zero):
            return x
    return _solve_field(matrix, rhs, zero)


def _solve_field(matrix, rhs, zero):
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    rows = []
    for row, b in zip(matrix, rhs):
        rows.append(_clear_row(list(row) + [b]))
    pivots = _bareiss_echelon(rows, n)
    pivot_rows = {r for r, _ in pivots}
    for i in range(m):
        if i not in pivot_rows and rows[i][n] and not any(rows[i][:n]):
            return None
    x = [zero] * n
    for r, col in reversed(pivots):
        acc = FieldElem(rows[r][n])
        for j in range(col + 1, n):
            if rows[r][j] and x[j]:
                acc = acc - FieldElem(rows[r][j]) * x[j]
        x[col] = acc / FieldElem(rows[r][col])
    # verify against the original system (guards rectangular edge cases)
    if not _verify_solution(matrix, rhs, x, zero):
        return None
    return x


def _eliminate_fraction(rows, ncols):
    pivots = []
    used = set()
    for col in range(ncols):
        r0 = None
        for r in range(len(rows)):
            if r not in used and rows[r][col]:
                r0 = r
                break
        if r0 is None:
            continue
        used.add(r0)
        pivots.append((r0, col))
        piv = rows[r0][col]
        rows[r0] = [x / piv for x in rows[r0]]
        for r in range(len(rows)):
            if r == r0 or not rows[r][col]:
                continue
            f = rows[r][col]
            rows[r] = [a - f * b for a, b in zip(rows[r], rows[r0])]
    return pivots


def rank(matrix) -> int:
    """Rank of a matrix given as a list of rows.

    A full-column-rank certificate at a rational specialization point is
    exact (specializing can only lower the rank); otherwise the rank is
    computed symbolically.
    """
    if not matrix or not matrix[0]:
        return 0
    n = len(matrix[0])
    if _is_field_elem(matrix, None):
        for sv, tv in _HINT_POINTS:
            try:
                rows = [[specialize(x, sv, tv) if x else Fraction(0) for x in row]
                        for row in matrix]
            except PoleAtPoint:
                continue
            if len(_eliminate_fraction(rows, n)) == n:
                return n
            break
        rows = [_clear_row(list(r)) for r in matrix]
        return len(_bareiss_echelon(rows, n))
    rows = [list(r) for r in matrix]
    return len(_eliminate_fraction(rows, n))


def solve(matrix, rhs, zero):
    """One solution x of matrix @ x = rhs, or None when inconsistent.

    Free variables are set to zero.
    """
    m = len(matrix)
    if m == 0:
        return []
    n = len(matrix[0])
    if _is_field_elem(matrix, rhs):
        if n > 8:
            return _solve_field_hinted(matrix, rhs, zero)
        return _solve_field(matrix, rhs, zero)
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    pivots = _eliminate_fraction(rows, n)
    pivot_rows = {r for r, _ in pivots}
    for r in range(m):
        if r not in pivot_rows and rows[r][n] and not any(rows[r][:n]):
            return None
    x = [zero] * n
    for r, c in pivots:
        x[c] = rows[r][n]
    if not _verify_solution(matrix, rhs, x, zero):
        return None
    return x
