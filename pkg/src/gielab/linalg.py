"""Exact rational linear algebra.

Dense routines use fraction-free (Bareiss) elimination on integer
matrices obtained by clearing denominators, so every intermediate value
stays an exact integer.  For the large, very sparse systems that arise
when counting Cartan characters there is an incremental sparse echelon
structure that accepts one row at a time.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _clear_denominators(rows):
    """Scale each row by the lcm of its denominators; returns int rows."""
    out = []
    for row in rows:
        lcm = 1
        for x in row:
            f = Fraction(x)
            lcm = lcm * f.denominator // gcd(lcm, f.denominator)
        out.append([int(Fraction(x) * lcm) for x in row])
    return out


def bareiss_echelon(rows):
    """Fraction-free row echelon form.

    Returns (echelon_rows, pivot_columns).  Row scaling does not change
    rank or pivot structure, so denominators are cleared first.
    """
    m = _clear_denominators(rows)
    if not m:
        return [], []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    prev = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pr = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        for i in range(r + 1, n_rows):
            for j in range(c + 1, n_cols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows) -> int:
    """Exact rank of a matrix of Fractions/ints."""
    _, pivots = bareiss_echelon(rows)
    return len(pivots)


def det(rows) -> Fraction:
    """Exact determinant of a square matrix of Fractions/ints."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    scale = Fraction(1)
    m = []
    for row in rows:
        lcm = 1
        for x in row:
            f = Fraction(x)
            lcm = lcm * f.denominator // gcd(lcm, f.denominator)
        scale /= lcm
        m.append([int(Fraction(x) * lcm) for x in row])
    sign = 1
    prev = 1
    for c in range(n - 1):
        pr = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            m[c], m[pr] = m[pr], m[c]
            sign = -sign
        for i in range(c + 1, n):
            for j in range(c + 1, n):
                m[i][j] = (m[c][c] * m[i][j] - m[i][c] * m[c][j]) // prev
            m[i][c] = 0
        prev = m[c][c]
    return Fraction(sign * m[n - 1][n - 1]) * scale


def nullspace(rows, n_cols=None):
    """Basis of {x : A x = 0} as lists of Fractions."""
    if not rows:
        if n_cols is None:
            raise ValueError("nullspace of an empty system needs n_cols")
        return [[Fraction(int(i == j)) for j in range(n_cols)]
                for i in range(n_cols)]
    n_cols = len(rows[0])
    ech, pivots = bareiss_echelon(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        x = [Fraction(0)] * n_cols
        x[fc] = Fraction(1)
        # back-substitute pivot variables, bottom-up
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            s = sum((Fraction(ech[r][j]) * x[j] for j in range(pc + 1, n_cols)),
                    Fraction(0))
            x[pc] = -s / ech[r][pc]
        basis.append(x)
    return basis


def independent(vectors) -> bool:
    """True iff the given vectors are linearly independent."""
    vecs = list(vectors)
    if not vecs:
        return True
    return rank(vecs) == len(vecs)


class SparseEchelon:
    """Incremental exact rank over sparse rational rows.

    Rows are dicts {column: Fraction}.  Each inserted row is reduced
    against the stored pivots; a surviving row becomes a new pivot.
    """

    def __init__(self):
        self.pivots = {}  # column -> reduced row (leading coefficient 1)

    def insert(self, row) -> bool:
        """Reduce `row` and keep it if independent; returns True if kept."""
        work = {c: Fraction(v) for c, v in row.items() if v}
        while work:
            lead = min(work)
            piv = self.pivots.get(lead)
            if piv is None:
                coeff = work[lead]
                self.pivots[lead] = {c: v / coeff for c, v in work.items()}
                return True
            factor = work[lead]
            for c, v in piv.items():
                nv = work.get(c, Fraction(0)) - factor * v
                if nv:
                    work[c] = nv
                else:
                    work.pop(c, None)
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)
