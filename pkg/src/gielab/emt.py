"""Energy-momentum audit on a metric chart.

From a metric chart g and a contravariant 2-tensor T this module builds
the vector-valued (m-1)-form tau^lam = T^{lam mu} (xi_mu -| vol), takes
its covariant exterior derivative, and verifies the identity

    d_grad tau^lam = (grad_mu T^{lam mu}) * vol

componentwise.  Two backends: an exact one over polynomial charts
(restricted to charts whose metric determinant is a nonzero constant
perfect rational square, so the inverse metric and the volume
coefficient stay in the polynomial ring) and a numeric one using central
finite differences and pointwise Cholesky factors of g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError, VerificationError
from .exterior import ExteriorForm, VectorValuedForm
from .bundle import exterior_derivative, poly_form
from .poly import Polynomial, from_json_terms

FD_STEP = 1e-5
TOLERANCE = 1e-6
DEFAULT_MARGIN = 0.05


def target_dimension(m):
    """Dimension of the receiving space of the conservation-law map."""
    return m + (m - 1) ** 2


def _is_poly(f):
    return isinstance(f, Polynomial)


def _eval(f, point):
    """Evaluate a chart function (Polynomial or callable) at a point."""
    if _is_poly(f):
        return f.eval(point)
    return f(point)


def _fd_partial(f, point, mu, h=FD_STEP):
    """Central finite difference d f / d x_mu (mu 1-based)."""
    hi = list(point)
    lo = list(point)
    hi[mu - 1] += h
    lo[mu - 1] -= h
    return (_eval(f, hi) - _eval(f, lo)) / (2 * h)


class MetricChart:
    """Metric components on a single chart.

    g is an m x m array of chart functions (Polynomials for the exact
    backend, floats-in/floats-out callables for the numeric one).  The
    box bounds the chart domain for sampling; the margin keeps sample
    points away from its boundary (and hence from declared coordinate
    singularities)."""

    def __init__(self, m, g, base_point=None, box=None, margin=DEFAULT_MARGIN):
        if len(g) != m or any(len(row) != m for row in g):
            raise InputError(f"metric must be an {m} x {m} array")
        self.m = m
        self.g = [list(row) for row in g]
        self.base_point = list(base_point) if base_point is not None else None
        self.box = [list(map(float, b)) for b in box] if box else [[0.0, 1.0]] * m
        if len(self.box) != m or any(len(b) != 2 or b[0] >= b[1] for b in self.box):
            raise InputError("chart box must give m ordered [lo, hi] pairs")
        self.margin = float(margin)
        if self.is_polynomial():
            for lam in range(m):
                for mu in range(m):
                    if self.g[lam][mu] != self.g[mu][lam]:
                        raise InputError("metric components are not symmetric")
        pt = self.base_point if self.base_point is not None else self.sample_points(1)[0]
        self.matrix_at(pt)  # positive-definiteness check

    def is_polynomial(self):
        return all(_is_poly(e) for row in self.g for e in row)

    def matrix_at(self, point):
        """Metric matrix at a point; raises InputError when it is not
        symmetric positive definite there."""
        mat = np.array([[float(_eval(self.g[i][j], point))
                         for j in range(self.m)] for i in range(self.m)])
        if not np.allclose(mat, mat.T, atol=1e-12):
            raise InputError(f"metric not symmetric at {point}")
        try:
            np.linalg.cholesky(mat)
        except np.linalg.LinAlgError:
            raise InputError(f"metric singular or indefinite at sample point {point}")
        return mat

    def cholesky_at(self, point):
        """Lower-triangular L with g = L L^T; the rows of L^T are the
        coefficients of a pointwise orthonormal coframe."""
        return np.linalg.cholesky(self.matrix_at(point))

    def volume_coefficient_at(self, point):
        """sqrt(det g) from the Cholesky diagonal."""
        L = self.cholesky_at(point)
        return float(np.prod(np.diag(L)))

    def sample_points(self, count=100):
        """Deterministic low-discrepancy grid in the margined box
        (additive Kronecker sequence with square-root-of-prime steps)."""
        primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        alphas = [math.sqrt(primes[d % len(primes)]) for d in range(self.m)]
        pts = []
        for k in range(1, count + 1):
            pt = []
            for d in range(self.m):
                lo, hi = self.box[d]
                lo, hi = lo + self.margin, hi - self.margin
                if lo >= hi:
                    raise InputError("margin swallows the chart box")
                frac = (k * alphas[d]) % 1.0
                pt.append(lo + frac * (hi - lo))
            pts.append(pt)
        return pts


class EnergyMomentum:
    """Contravariant 2-tensor components T^{lam mu} (symmetry is not
    assumed; the identity below holds without it)."""

    def __init__(self, m, components):
        if len(components) != m or any(len(row) != m for row in components):
            raise InputError(f"tensor must be an {m} x {m} array")
        self.m = m
        self.T = [list(row) for row in components]

    def is_polynomial(self):
        return all(_is_poly(e) for row in self.T for e in row)

    def matrix_at(self, point):
        return [[_eval(self.T[i][j], point) for j in range(self.m)]
                for i in range(self.m)]


# ---------------------------------------------------------------------------
# exact polynomial backend


def _require_exact(g: MetricChart, T: EnergyMomentum | None = None):
    if not g.is_polynomial():
        raise InputError("exact backend needs polynomial metric components")
    if T is not None and not T.is_polynomial():
        raise InputError("exact backend needs polynomial tensor components")


def _poly_det(rows):
    from .exterior import _minor_det
    return _minor_det(rows)


def _exact_volume_and_inverse(g: MetricChart):
    """(sqrt(det g) as a Fraction, polynomial inverse metric).

    Restricted to det g a nonzero constant perfect rational square;
    otherwise the inverse and the volume coefficient leave the
    polynomial ring and the numeric backend must be used."""
    m = g.m
    det = _poly_det(g.g)
    if not (isinstance(det, Polynomial) and det.is_constant()) and not isinstance(det, Fraction):
        raise InputError(
            "exact backend requires constant metric determinant; use the "
            "numeric backend for this chart")
    det_val = det.constant_value() if isinstance(det, Polynomial) else det
    if det_val <= 0:
        raise InputError("metric determinant must be positive")
    num = math.isqrt(det_val.numerator)
    den = math.isqrt(det_val.denominator)
    if num * num != det_val.numerator or den * den != det_val.denominator:
        raise InputError(
            "exact backend requires det g to be a perfect rational square; "
            "use the numeric backend for this chart")
    vol = Fraction(num, den)
    # adjugate / det stays polynomial because det is constant
    nv = g.g[0][0].nvars
    inv = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            minor = [[g.g[r][c] for c in range(m) if c != j]
                     for r in range(m) if r != i]
            cof = _poly_det(minor) if m > 1 else Polynomial.constant(1, nv)
            if not isinstance(cof, Polynomial):
                cof = Polynomial.constant(cof, nv)
            sign = 1 if (i + j) % 2 == 0 else -1
            inv[j][i] = cof * Fraction(sign, 1) * (Fraction(1) / det_val)
    return vol, inv


def christoffel(g: MetricChart):
    """Levi-Civita symbols Gamma^lam_{mu nu} as polynomials (exact
    backend).  Symmetric in the lower indices by construction."""
    _require_exact(g)
    m = g.m
    _, ginv = _exact_volume_and_inverse(g)
    half = Fraction(1, 2)
    gamma = [[[None] * m for _ in range(m)] for _ in range(m)]
    for lam in range(m):
        for mu in range(m):
            for nu in range(m):
                total = Polynomial.constant(0, g.g[0][0].nvars)
                for rho in range(m):
                    total = total + ginv[lam][rho] * (
                        g.g[rho][nu].partial(mu)
                        + g.g[rho][mu].partial(nu)
                        - g.g[mu][nu].partial(rho))
                gamma[lam][mu][nu] = half * total
    return gamma


def christoffel_at(g: MetricChart, point, h=FD_STEP):
    """Numeric Levi-Civita symbols at a point (central differences)."""
    m = g.m
    ginv = np.linalg.inv(g.matrix_at(point))
    dg = [[[_fd_partial(g.g[rho][nu], point, mu + 1, h)
            for nu in range(m)] for rho in range(m)] for mu in range(m)]
    gamma = np.empty((m, m, m))
    for lam in range(m):
        for mu in range(m):
            for nu in range(m):
                s = 0.0
                for rho in range(m):
                    s += ginv[lam][rho] * (dg[mu][rho][nu] + dg[nu][rho][mu]
                                           - dg[rho][mu][nu])
                gamma[lam][mu][nu] = 0.5 * s
    return gamma


def tensor_to_mform(T: EnergyMomentum, g: MetricChart) -> VectorValuedForm:
    """tau^lam = T^{lam mu} (xi_mu -| vol) with vol = sqrt(det g) eta^Lambda
    (exact backend).  xi_mu -| eta^Lambda = (-1)^(mu+1) eta^{Lambda minus mu}."""
    _require_exact(g, T)
    m = g.m
    vol, _ = _exact_volume_and_inverse(g)
    comps = []
    for lam in range(1, m + 1):
        coeffs = {}
        for mu in range(1, m + 1):
            key = tuple(k for k in range(1, m + 1) if k != mu)
            sign = vol if mu % 2 else -vol
            c = T.T[lam - 1][mu - 1] * sign
            if c:
                coeffs[key] = coeffs.get(key, Polynomial.constant(0, c.nvars)) + c
        comps.append(poly_form(m, m - 1, coeffs))
    return VectorValuedForm(comps)


def covariant_divergence(T: EnergyMomentum, gamma):
    """grad_mu T^{lam mu} = xi_mu(T^{lam mu}) + T^{lam mu} Gamma^nu_{nu mu}
    + T^{mu nu} Gamma^lam_{nu mu}, one polynomial per lam (exact backend)."""
    m = T.m
    out = []
    for lam in range(m):
        total = Polynomial.constant(0, T.T[0][0].nvars)
        for mu in range(m):
            total = total + T.T[lam][mu].partial(mu)
            for nu in range(m):
                total = total + T.T[lam][mu] * gamma[nu][nu][mu]
                total = total + T.T[mu][nu] * gamma[lam][nu][mu]
        out.append(total)
    return out


def covariant_exterior_derivative(tau: VectorValuedForm, gamma, vol_coeff=None):
    """d_grad tau^lam = d tau^lam + omega^lam_rho ^ tau^rho with the
    coordinate connection omega^lam_rho = Gamma^lam_{rho mu} eta^mu."""
    from .exterior import wedge
    m = tau.dim
    out = []
    for lam in range(m):
        acc = exterior_derivative(tau[lam])
        for rho in range(m):
            for mu in range(m):
                gm = gamma[lam][rho][mu]
                if not gm:
                    continue
                omega = poly_form(m, 1, {(mu + 1,): gm})
                acc = acc + wedge(omega, tau[rho])
        out.append(acc)
    return VectorValuedForm(out)


# ---------------------------------------------------------------------------
# numeric backend (pointwise)


def _numeric_sides_at(T: EnergyMomentum, g: MetricChart, point, h=FD_STEP):
    """(lhs, rhs) coefficients of eta^Lambda at one point.

    lhs^lam: coefficient of the volume monomial in d_grad tau^lam,
        sum_mu d_mu(T^{lam mu} sqrt(g)) + Gamma^lam_{rho mu} T^{rho mu} sqrt(g);
    rhs^lam: (grad_mu T^{lam mu}) sqrt(g).
    Both use only pointwise data and finite differences."""
    m = g.m
    gamma = christoffel_at(g, point, h)
    sqrtg = g.volume_coefficient_at(point)
    Tval = [[float(v) for v in row] for row in T.matrix_at(point)]
    lhs, rhs = [], []
    for lam in range(m):
        a = 0.0
        for mu in range(m):
            def flux(pt, lam=lam, mu=mu):
                return float(_eval(T.T[lam][mu], pt)) * g.volume_coefficient_at(pt)
            a += _fd_partial(flux, point, mu + 1, h)
        for rho in range(m):
            for mu in range(m):
                a += gamma[lam][rho][mu] * Tval[rho][mu] * sqrtg
        lhs.append(a)
        b = 0.0
        for mu in range(m):
            b += _fd_partial(T.T[lam][mu], point, mu + 1, h)
            for nu in range(m):
                b += Tval[lam][mu] * gamma[nu][nu][mu]
                b += Tval[mu][nu] * gamma[lam][nu][mu]
        rhs.append(b * sqrtg)
    return lhs, rhs


# ---------------------------------------------------------------------------
# verification report


@dataclass
class EquivalenceReport:
    backend: str                     # "exact" | "numeric"
    identity_holds: bool             # d_grad tau == divergence * vol
    max_identity_residual: float
    worst_point: list | None
    max_divergence: float            # conservation-law residual
    conserved: bool
    target_dimension: int
    exact: bool                      # residuals are exact rationals

    def as_dict(self):
        return {
            "backend": self.backend,
            "identity_holds": self.identity_holds,
            "max_identity_residual": self.max_identity_residual,
            "worst_point": self.worst_point,
            "max_divergence": self.max_divergence,
            "conserved": self.conserved,
            "target_dimension": self.target_dimension,
            "value_kind": "exact" if self.exact else "numeric",
        }


def verify_equivalence(T: EnergyMomentum, g: MetricChart, backend="exact",
                       count=100, h=FD_STEP, tolerance=TOLERANCE) -> EquivalenceReport:
    """Verify d_grad tau = (grad_mu T^{lam mu}) * vol componentwise.

    The exact backend proves the identity in the polynomial ring and
    reports exact residuals; the numeric backend checks it at `count`
    deterministic sample points within `tolerance`, raising
    VerificationError with the worst point when the two sides disagree.
    """
    m = g.m
    tdim = target_dimension(m)
    if backend == "exact":
        _require_exact(g, T)
        gamma = christoffel(g)
        tau = tensor_to_mform(T, g)
        lhs = covariant_exterior_derivative(tau, gamma)
        vol, _ = _exact_volume_and_inverse(g)
        div = covariant_divergence(T, gamma)
        vol_key = tuple(range(1, m + 1))
        worst = Fraction(0)
        for lam in range(m):
            coeff = lhs[lam].coefficients.get(vol_key, Polynomial.constant(0, div[lam].nvars))
            diff = coeff - div[lam] * vol
            for point in g.sample_points(count):
                val = abs(Fraction(diff.eval([Fraction(x).limit_denominator(10**6)
                                              for x in point])))
                worst = max(worst, val)
            if diff:
                # a nonzero polynomial difference is an identity violation
                raise VerificationError(
                    f"covariant derivative and divergence disagree as "
                    f"polynomials in component {lam + 1}")
        max_div = 0.0
        conserved = all(not d for d in div)
        for point in g.sample_points(count):
            for d in div:
                max_div = max(max_div, abs(float(d.eval(point))))
        return EquivalenceReport(backend="exact", identity_holds=True,
                                 max_identity_residual=float(worst),
                                 worst_point=None, max_divergence=max_div,
                                 conserved=conserved, target_dimension=tdim,
                                 exact=True)
    if backend != "numeric":
        raise InputError(f"unknown backend {backend!r}")
    worst_val, worst_point, max_div = 0.0, None, 0.0
    for point in g.sample_points(count):
        lhs, rhs = _numeric_sides_at(T, g, point, h)
        for lam in range(m):
            res = abs(lhs[lam] - rhs[lam])
            if res > worst_val:
                worst_val, worst_point = res, point
            max_div = max(max_div, abs(rhs[lam]) / max(g.volume_coefficient_at(point), 1e-300))
    holds = worst_val <= tolerance
    report = EquivalenceReport(backend="numeric", identity_holds=holds,
                               max_identity_residual=worst_val,
                               worst_point=worst_point,
                               max_divergence=max_div,
                               conserved=max_div <= tolerance,
                               target_dimension=tdim, exact=False)
    if not holds:
        raise VerificationError(
            f"backends disagree beyond tolerance: residual {worst_val:.3e} "
            f"at point {worst_point}")
    return report


# ---------------------------------------------------------------------------
# charts


def flat_chart(m, box=None, margin=DEFAULT_MARGIN) -> MetricChart:
    g = [[Polynomial.constant(1 if i == j else 0, m) for j in range(m)]
         for i in range(m)]
    return MetricChart(m, g, base_point=[Fraction(0)] * m, box=box, margin=margin)


def sphere_chart() -> MetricChart:
    """Round 2-sphere in polar coordinates (theta, phi):
    g = diag(1, sin^2 theta), boxed away from the poles."""
    g = [[lambda pt: 1.0, lambda pt: 0.0],
         [lambda pt: 0.0, lambda pt: math.sin(pt[0]) ** 2]]
    return MetricChart(2, g, base_point=[math.pi / 2, 1.0],
                       box=[[0.3, math.pi - 0.3], [0.0, 2 * math.pi]],
                       margin=0.05)


def inverse_metric_tensor(g: MetricChart) -> EnergyMomentum:
    """T = g^{-1} as callables; covariantly constant, hence conserved."""
    m = g.m

    def entry(i, j):
        return lambda pt: float(np.linalg.inv(g.matrix_at(pt))[i][j])

    return EnergyMomentum(m, [[entry(i, j) for j in range(m)] for i in range(m)])


def load_chart(doc):
    """(MetricChart, EnergyMomentum) from the JSON schema
    {"m", "g", "T", "box", "margin"} with polynomial entries given as
    lists of {"exponents", "coefficient"}."""
    try:
        m = int(doc["m"])
        g = [[from_json_terms(doc["g"][i][j], m) for j in range(m)]
             for i in range(m)]
        T = [[from_json_terms(doc["T"][i][j], m) for j in range(m)]
             for i in range(m)]
        box = doc.get("box")
        margin = float(doc.get("margin", DEFAULT_MARGIN))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed chart input: {exc}") from exc
    return MetricChart(m, g, box=box, margin=margin), EnergyMomentum(m, T)
