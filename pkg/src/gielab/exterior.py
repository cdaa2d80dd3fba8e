"""Exact alternating multilinear algebra over a labeled coframe.

Forms are stored sparsely: a mapping from strictly increasing index
tuples (1-based, bounded by the ambient dimension) to coefficients.
Coefficients are exact rationals by default, but any commutative ring
element supporting +, -, * and truthiness works (polynomial-coefficient
forms reuse this class).

All sign bookkeeping goes through :func:`sort_with_sign`.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .errors import InputError


def sort_with_sign(indices):
    """Sort an index tuple, counting transpositions.

    Returns (sorted_tuple, sign) where sign is +1/-1, or (None, 0) if an
    index repeats (the wedge monomial is zero).  This is the single sign
    source for the whole library.
    """
    idx = list(indices)
    sign = 1
    # insertion sort; counts inversions exactly
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return None, 0
    return tuple(idx), sign


class ExteriorForm:
    """A degree-p alternating form on an `dim`-dimensional space.

    coefficients: dict mapping strictly increasing tuples of length
    `degree` to nonzero coefficients.  Instances are immutable by
    convention; all operations return new forms.
    """

    __slots__ = ("dim", "degree", "coefficients")

    def __init__(self, dim, degree, coefficients=None):
        if degree < 0 or degree > dim:
            if degree < 0:
                raise InputError(f"negative form degree {degree}")
        self.dim = dim
        self.degree = degree
        coeffs = {}
        if coefficients:
            for key, val in coefficients.items():
                key = tuple(key)
                if len(key) != degree:
                    raise InputError(f"index {key} has wrong length for degree {degree}")
                if any(not (1 <= k <= dim) for k in key):
                    raise InputError(f"index {key} out of range 1..{dim}")
                if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                    raise InputError(f"index {key} is not strictly increasing")
                if val:
                    coeffs[key] = val
        self.coefficients = coeffs

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree, {})

    @classmethod
    def monomial(cls, dim, indices, coeff=Fraction(1)):
        """coeff * eta^{i1} ^ ... ^ eta^{ip} for arbitrary index order."""
        key, sign = sort_with_sign(indices)
        if sign == 0 or not coeff:
            return cls.zero(dim, len(indices))
        return cls(dim, len(indices), {key: coeff * sign})

    @classmethod
    def covector(cls, dim, k, coeff=Fraction(1)):
        return cls.monomial(dim, (k,), coeff)

    # -- ring structure -----------------------------------------------

    def __bool__(self):
        return bool(self.coefficients)

    def is_zero(self):
        return not self.coefficients

    def __eq__(self, other):
        if not isinstance(other, ExteriorForm):
            return NotImplemented
        return (self.dim == other.dim and self.degree == other.degree
                and self.coefficients == other.coefficients)

    def __hash__(self):
        return hash((self.dim, self.degree,
                     frozenset(self.coefficients.items())))

    def __add__(self, other):
        if self.dim != other.dim or self.degree != other.degree:
            raise InputError("form shape mismatch in addition")
        coeffs = dict(self.coefficients)
        for key, val in other.coefficients.items():
            acc = coeffs.get(key)
            new = val if acc is None else acc + val
            if new:
                coeffs[key] = new
            else:
                coeffs.pop(key, None)
        out = ExteriorForm.zero(self.dim, self.degree)
        out.coefficients = coeffs
        return out

    def __neg__(self):
        out = ExteriorForm.zero(self.dim, self.degree)
        out.coefficients = {k: -v for k, v in self.coefficients.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not c:
            return ExteriorForm.zero(self.dim, self.degree)
        out = ExteriorForm.zero(self.dim, self.degree)
        out.coefficients = {k: c * v for k, v in self.coefficients.items()}
        return out

    def __rmul__(self, c):
        return self.scale(c)

    def __repr__(self):
        if not self.coefficients:
            return f"ExteriorForm({self.dim}, {self.degree}, 0)"
        terms = " + ".join(f"({v})*eta^{''.join(map(str, k)) or '()'}"
                           for k, v in sorted(self.coefficients.items()))
        return f"ExteriorForm({self.dim}, {self.degree}, {terms})"


def wedge(a: ExteriorForm, b: ExteriorForm) -> ExteriorForm:
    """Exterior product; bilinear and graded-anticommutative."""
    if a.dim != b.dim:
        raise InputError(f"wedge of forms on different spaces ({a.dim} vs {b.dim})")
    out = ExteriorForm.zero(a.dim, a.degree + b.degree)
    if a.degree + b.degree > a.dim:
        return out
    coeffs = {}
    for ka, va in a.coefficients.items():
        for kb, vb in b.coefficients.items():
            key, sign = sort_with_sign(ka + kb)
            if sign == 0:
                continue
            val = va * vb if sign > 0 else -(va * vb)
            acc = coeffs.get(key)
            new = val if acc is None else acc + val
            if new:
                coeffs[key] = new
            else:
                coeffs.pop(key, None)
    out.coefficients = coeffs
    return out


def interior_product(v, a: ExteriorForm) -> ExteriorForm:
    """Contraction v -| a of a form by a vector (degree drops by one)."""
    if len(v) != a.dim:
        raise InputError(f"vector length {len(v)} != form dimension {a.dim}")
    if a.degree == 0:
        raise InputError("interior product of a 0-form")
    out = ExteriorForm.zero(a.dim, a.degree - 1)
    coeffs = {}
    for key, val in a.coefficients.items():
        for pos, k in enumerate(key):
            vk = v[k - 1]
            if not vk:
                continue
            rest = key[:pos] + key[pos + 1:]
            term = vk * val if pos % 2 == 0 else -(vk * val)
            acc = coeffs.get(rest)
            new = term if acc is None else acc + term
            if new:
                coeffs[rest] = new
            else:
                coeffs.pop(rest, None)
    out.coefficients = coeffs
    return out


def _minor_det(rows):
    """Determinant by expansion; entries are ring elements."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        head = rows[0][j]
        if not head:
            continue
        sub = [[r[c] for c in range(n) if c != j] for r in rows[1:]]
        term = head * _minor_det(sub)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else Fraction(0)


def evaluate(a: ExteriorForm, vectors):
    """Evaluate a degree-p form on p vectors (lists of coefficients)."""
    vectors = list(vectors)
    if len(vectors) != a.degree:
        raise InputError(f"evaluating degree-{a.degree} form on {len(vectors)} vectors")
    for v in vectors:
        if len(v) != a.dim:
            raise InputError("vector length does not match form dimension")
    total = Fraction(0)
    for key, val in a.coefficients.items():
        rows = [[v[k - 1] for k in key] for v in vectors]
        d = _minor_det(rows)
        if d:
            total = total + val * d
    return total


def substitute(a: ExteriorForm, images, new_dim=None) -> ExteriorForm:
    """Rewrite a form under a linear change of coframe.

    images[k] (1-based key) is the 1-form replacing the covector eta^k;
    the substitution extends multiplicatively over wedge monomials.
    """
    if new_dim is None:
        new_dim = next(iter(images.values())).dim if images else a.dim
    out = ExteriorForm.zero(new_dim, a.degree)
    for key, val in a.coefficients.items():
        term = None
        for k in key:
            img = images.get(k)
            if img is None:
                img = ExteriorForm.covector(new_dim, k)
            term = img if term is None else wedge(term, img)
        if term is None:  # degree 0
            term = ExteriorForm(new_dim, 0, {(): Fraction(1)})
        out = out + term.scale(val)
    return out


class VectorValuedForm:
    """A rank-n vector of exterior forms sharing (dim, degree)."""

    __slots__ = ("rank", "components")

    def __init__(self, components):
        components = list(components)
        if not components:
            raise InputError("vector-valued form needs at least one component")
        dim, degree = components[0].dim, components[0].degree
        for c in components:
            if c.dim != dim or c.degree != degree:
                raise InputError("vector-valued form components disagree in shape")
        self.rank = len(components)
        self.components = components

    @property
    def dim(self):
        return self.components[0].dim

    @property
    def degree(self):
        return self.components[0].degree

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def is_zero(self):
        return all(c.is_zero() for c in self.components)


def basis_multi_indices(dim, degree):
    """All strictly increasing index tuples of the given length."""
    return list(combinations(range(1, dim + 1), degree))
