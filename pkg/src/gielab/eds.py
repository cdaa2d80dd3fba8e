"""Pointwise exterior-ideal machinery.

Everything here works at a single point: ideals have constant rational
coefficients in an ambient coframe split into base covectors (the first
`n_base` coordinates) and fiber covectors.  Integral elements, polar
spaces, the extension rank, Cartan characters by the expansion method,
and the one-sided Cartan test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import linalg
from .errors import InputError, VerificationError
from .exterior import ExteriorForm, evaluate


@dataclass(frozen=True)
class SigmaCoframe:
    """Labels for a split coframe: base labels then fiber labels."""
    base_labels: tuple
    fiber_labels: tuple

    def __post_init__(self):
        labels = self.base_labels + self.fiber_labels
        if len(set(labels)) != len(labels):
            raise InputError("coframe labels are not distinct")

    @property
    def n_base(self):
        return len(self.base_labels)

    @property
    def n_fiber(self):
        return len(self.fiber_labels)

    @property
    def dim(self):
        return self.n_base + self.n_fiber


class AlgebraicIdeal:
    """Exterior ideal generated algebraically by constant-coefficient
    forms over a split coframe (no 0-form generators allowed)."""

    def __init__(self, coframe: SigmaCoframe, generators):
        self.coframe = coframe
        self.generators = list(generators)
        for g in self.generators:
            if g.degree == 0:
                raise InputError("ideal generators must have positive degree")
            if g.dim != coframe.dim:
                raise InputError("generator dimension does not match the coframe")

    @property
    def dim(self):
        return self.coframe.dim


class IntegralElement:
    """A p-dimensional subspace given by an independent basis."""

    def __init__(self, basis):
        self.basis = [list(map(Fraction, v)) for v in basis]
        if self.basis and not linalg.independent(self.basis):
            raise InputError("integral-element basis is linearly dependent")

    @property
    def dimension(self):
        return len(self.basis)

    @property
    def ambient_dim(self):
        return len(self.basis[0]) if self.basis else None


def is_integral_element(element: IntegralElement, ideal: AlgebraicIdeal) -> bool:
    """True iff every generator of degree <= p vanishes on every
    sub-tuple of the basis (multilinearity extends this to the whole
    ideal)."""
    p = element.dimension
    for g in ideal.generators:
        if g.degree > p:
            continue
        for subset in combinations(element.basis, g.degree):
            if evaluate(g, subset):
                return False
    return True


def polar_space(element: IntegralElement, ideal: AlgebraicIdeal):
    """Polar space H(E) = {v : phi(v, e_1..e_p) = 0 for phi in I_{p+1}},
    returned as a basis of the linear polar system's solution space.

    For a generator g of degree d and any (d-1)-subset S of the basis,
    v -> g(v, S) is one polar equation; these span all of I_{p+1}
    evaluated against E.
    """
    p = element.dimension
    dim = ideal.dim
    unit = [[Fraction(int(i == k)) for i in range(dim)] for k in range(dim)]
    rows = []
    for g in ideal.generators:
        if g.degree > p + 1:
            continue
        for subset in combinations(element.basis, g.degree - 1):
            row = [evaluate(g, (unit[k],) + subset) for k in range(dim)]
            if any(row):
                rows.append(row)
    return linalg.nullspace(rows, n_cols=dim)


def extension_rank(element: IntegralElement, ideal: AlgebraicIdeal) -> int:
    """r(E) = dim H(E) - (p + 1); r = -1 means no extension exists."""
    h = polar_space(element, ideal)
    return len(h) - (element.dimension + 1)


@dataclass
class CartanReport:
    """Cartan characters plus the test outcome."""
    characters: list
    observed_codimension: int | None = None
    verdict: str = "unevaluated"

    @property
    def character_sum(self):
        return sum(self.characters)


def _expansion_rows(ideal: AlgebraicIdeal):
    """Split every generator into its single-fiber-factor expansion.

    Yields (sup_J, row) where row maps fiber coordinates to the
    coefficient of the corresponding pi covector in the 1-form pi_rho^J.
    Raises VerificationError if a generator has a nonzero pure-base term
    (the expansion shape then fails at this point).
    """
    n_base = ideal.coframe.n_base
    out = []
    for gi, g in enumerate(ideal.generators):
        for key, val in g.coefficients.items():
            fiber = [k for k in key if k > n_base]
            if len(fiber) == 0:
                raise VerificationError(
                    f"generator {gi} has pure-base term {key} with coefficient {val}; "
                    "the expansion shape does not apply")
            if len(fiber) > 1:
                continue  # quadratic or higher in pi: part of the remainder
            base = tuple(k for k in key if k <= n_base)
            # key is sorted with the single fiber index last; moving it to
            # the front across |J| base indices flips the sign |J| times
            sign = -1 if len(base) % 2 else 1
            sup = base[-1] if base else 0
            out.append((sup, gi, base, {fiber[0]: sign * val}))
    # merge rows belonging to the same (generator, J)
    merged = {}
    for sup, gi, base, row in out:
        acc = merged.setdefault((gi, base), (sup, {}))
        for c, v in row.items():
            acc[1][c] = acc[1].get(c, Fraction(0)) + v
    return sorted(((sup, row) for (gi, base), (sup, row) in merged.items()
                   if any(row.values())), key=lambda t: t[0])


def cartan_characters_by_expansion(ideal: AlgebraicIdeal) -> CartanReport:
    """Characters C_0..C_{m-1} by incremental ranks of the pi_rho^J
    systems collected level by level (sup J <= p)."""
    m = ideal.coframe.n_base
    rows = _expansion_rows(ideal)
    ech = linalg.SparseEchelon()
    characters = []
    idx = 0
    for p in range(m):
        while idx < len(rows) and rows[idx][0] <= p:
            ech.insert(rows[idx][1])
            idx += 1
        characters.append(ech.rank)
    return CartanReport(characters=characters)


def cartan_test(report: CartanReport, observed_codimension: int) -> CartanReport:
    """One-sided Cartan test: ordinary iff the character sum equals the
    observed codimension (it can never exceed it)."""
    report.observed_codimension = observed_codimension
    if report.character_sum == observed_codimension:
        report.verdict = "ordinary"
    else:
        report.verdict = "inconclusive"
    return report
