"""Multivariate polynomials with exact rational coefficients.

These serve as chart functions: exterior derivatives of polynomial
coefficient functions stay in the ring, so all chart-level calculus is
exact.  Terms are stored sparsely as {exponent tuple: Fraction}.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError


class Polynomial:
    """Polynomial in `nvars` variables x1..x_nvars (exponent tuples are
    0-based positionally: term key (2, 0, 1) means x1^2 * x3)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, coeff in terms.items():
                exps = tuple(exps)
                if len(exps) != nvars or any(e < 0 for e in exps):
                    raise InputError(f"bad exponent tuple {exps} for {nvars} variables")
                coeff = Fraction(coeff)
                if coeff:
                    clean[exps] = clean.get(exps, Fraction(0)) + coeff
                    if not clean[exps]:
                        del clean[exps]
        self.terms = clean

    @classmethod
    def constant(cls, c, nvars):
        c = Fraction(c)
        return cls(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, i, nvars):
        """x_{i+1}, i 0-based."""
        exps = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {exps: Fraction(1)})

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in k) for k in self.terms)

    def constant_value(self):
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise InputError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise InputError("polynomial variable-count mismatch")
            return other
        return Polynomial.constant(other, self.nvars)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            nv = terms.get(k, Fraction(0)) + v
            if nv:
                terms[k] = nv
            else:
                terms.pop(k, None)
        out = Polynomial(self.nvars)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Polynomial(self.nvars)
        out.terms = {k: -v for k, v in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        terms = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                nv = terms.get(k, Fraction(0)) + va * vb
                if nv:
                    terms[k] = nv
                else:
                    terms.pop(k, None)
        out = Polynomial(self.nvars)
        out.terms = terms
        return out

    __rmul__ = __mul__

    def partial(self, i):
        """d/dx_{i+1}, i 0-based."""
        terms = {}
        for k, v in self.terms.items():
            e = k[i]
            if e == 0:
                continue
            nk = k[:i] + (e - 1,) + k[i + 1:]
            nv = terms.get(nk, Fraction(0)) + v * e
            if nv:
                terms[nk] = nv
            else:
                terms.pop(nk, None)
        out = Polynomial(self.nvars)
        out.terms = terms
        return out

    def eval(self, point):
        """Evaluate at a point (exact for Fractions, float for floats)."""
        if len(point) != self.nvars:
            raise InputError("evaluation point has wrong length")
        total = 0
        for k, v in self.terms.items():
            term = v
            for x, e in zip(point, k):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def degree(self):
        return max((sum(k) for k in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "Polynomial(0)"
        parts = []
        for k, v in sorted(self.terms.items()):
            mono = "*".join(f"x{i + 1}^{e}" for i, e in enumerate(k) if e)
            parts.append(f"({v}){'*' + mono if mono else ''}")
        return "Polynomial(" + " + ".join(parts) + ")"


def from_json_terms(items, nvars):
    """Build a polynomial from [{"exponents": [...], "coefficient": "p/q"}]."""
    terms = {}
    for item in items:
        exps = tuple(item["exponents"])
        coeff = Fraction(str(item["coefficient"]))
        terms[exps] = terms.get(exps, Fraction(0)) + coeff
    return Polynomial(nvars, terms)
