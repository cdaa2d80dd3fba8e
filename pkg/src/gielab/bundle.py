"""Chart-level bundle calculus.

Forms here carry polynomial coefficient functions (see poly.py), so the
exterior derivative is exact.  Connections are o(n)-valued 1-form
matrices; curvature comes from the second structure equation, and the
generalized torsion / Bianchi residuals follow the covariant-derivative
expansions d_grad phi = d phi^i + eta^i_j ^ phi^j.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError
from .exterior import ExteriorForm, VectorValuedForm, wedge
from .poly import Polynomial


def poly_form(dim, degree, coefficients=None):
    """ExteriorForm whose coefficients are Polynomials in `dim` chart
    variables; plain rationals in `coefficients` are promoted."""
    coeffs = {}
    for key, val in (coefficients or {}).items():
        if not isinstance(val, Polynomial):
            val = Polynomial.constant(val, dim)
        if val:
            coeffs[tuple(key)] = val
    return ExteriorForm(dim, degree, coeffs)


def constant_form(form: ExteriorForm) -> ExteriorForm:
    """Promote a rational-coefficient form to polynomial coefficients."""
    return poly_form(form.dim, form.degree, form.coefficients)


def exterior_derivative(form: ExteriorForm) -> ExteriorForm:
    """d on forms with polynomial coefficients.  d(f eta^K) expands as
    sum_l (df/dx_l) eta^l ^ eta^K."""
    dim = form.dim
    out = ExteriorForm.zero(dim, form.degree + 1)
    for key, coeff in form.coefficients.items():
        if not isinstance(coeff, Polynomial):
            continue  # constant rational coefficient: derivative is zero
        for l in range(dim):
            dc = coeff.partial(l)
            if not dc:
                continue
            mono = ExteriorForm.monomial(dim, (l + 1,) + key, Fraction(1))
            out = out + mono.scale(dc)
    return out


class ConnectionForm:
    """n x n matrix of degree-1 polynomial forms, o(n)-valued."""

    __slots__ = ("n", "dim", "entries")

    def __init__(self, entries):
        self.n = len(entries)
        if any(len(row) != self.n for row in entries):
            raise InputError("connection matrix is not square")
        self.dim = entries[0][0].dim
        for i in range(self.n):
            for j in range(self.n):
                e = entries[i][j]
                if e.degree != 1 or e.dim != self.dim:
                    raise InputError("connection entries must be 1-forms on a shared chart")
                if (e + entries[j][i]).coefficients:
                    raise InputError("connection form is not o(n)-valued (antisymmetry fails)")
        self.entries = [list(row) for row in entries]

    @classmethod
    def zero(cls, n, dim):
        z = poly_form(dim, 1)
        return cls([[z for _ in range(n)] for _ in range(n)])

    @classmethod
    def from_upper(cls, n, dim, upper):
        """Build from entries {(i, j): 1-form} with i < j (1-based)."""
        z = poly_form(dim, 1)
        entries = [[z for _ in range(n)] for _ in range(n)]
        for (i, j), form in upper.items():
            if not 1 <= i < j <= n:
                raise InputError(f"upper-triangular key {(i, j)} out of range")
            entries[i - 1][j - 1] = form
            entries[j - 1][i - 1] = -form
        return cls(entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][j - 1]


class Curvature2Form:
    """n x n matrix of degree-2 forms, antisymmetric in (i, j)."""

    __slots__ = ("n", "dim", "entries")

    def __init__(self, entries):
        self.n = len(entries)
        self.dim = entries[0][0].dim
        self.entries = [list(row) for row in entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][j - 1]

    def is_antisymmetric(self):
        return all(
            not (self.entries[i][j] + self.entries[j][i]).coefficients
            for i in range(self.n) for j in range(self.n))

    def is_zero(self):
        return all(not e.coefficients for row in self.entries for e in row)


def curvature_from_connection(eta: ConnectionForm) -> Curvature2Form:
    """Second structure equation: Omega^i_j = d eta^i_j + eta^i_k ^ eta^k_j."""
    n, dim = eta.n, eta.dim
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            omega = exterior_derivative(eta[i, j])
            for k in range(1, n + 1):
                omega = omega + wedge(eta[i, k], eta[k, j])
            row.append(omega)
        rows.append(row)
    return Curvature2Form(rows)


def generalized_torsion(phi: VectorValuedForm, eta: ConnectionForm) -> VectorValuedForm:
    """Theta^i = d phi^i + eta^i_j ^ phi^j; zero iff phi is covariantly closed."""
    if eta.n != phi.rank or eta.dim != phi.dim:
        raise InputError("connection and form shapes disagree")
    out = []
    for i in range(1, phi.rank + 1):
        theta = exterior_derivative(phi[i - 1])
        for j in range(1, phi.rank + 1):
            theta = theta + wedge(eta[i, j], phi[j - 1])
        out.append(theta)
    return VectorValuedForm(out)


def bianchi_residual(omega: Curvature2Form, phi: VectorValuedForm,
                     convention: str = "closure"):
    """Generalized Bianchi residuals, one (p+2)-form per component.

    convention="closure" contracts the column index (Omega^i_j ^ phi^j,
    the form arising from d_grad^2 = 0); convention="alt" contracts the
    row index (Omega^i_j ^ phi^i).  Both are exposed because the two
    appear interchangeably in the source identities.
    """
    if omega.n != phi.rank or omega.dim != phi.dim:
        raise InputError("curvature and form shapes disagree")
    n = phi.rank
    out = []
    for outer in range(1, n + 1):
        # degree p+2 above the chart dimension holds no terms (forms of
        # degree > dim are structurally zero), so p = m-1 residuals vanish
        acc = ExteriorForm.zero(phi.dim, phi.degree + 2)
        for inner in range(1, n + 1):
            if convention == "closure":
                acc = acc + wedge(omega[outer, inner], phi[inner - 1])
            elif convention == "alt":
                acc = acc + wedge(omega[inner, outer], phi[inner - 1])
            else:
                raise InputError(f"unknown Bianchi convention {convention!r}")
        out.append(acc)
    return out
