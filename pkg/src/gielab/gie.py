"""Generalized isometric embedding construction (conservation-law case).

Given psi-data (the coefficients of a covariantly closed vector-valued
(m-1)-form) this module builds second-fundamental-form coefficients H
satisfying the generalized Cartan identities with vanishing Gauss image,
certifies that the Gauss-map differential has maximal rank, assembles
the exterior ideal on the product space in the sigma-indexed coframe,
builds the explicit integral flag, and counts Cartan characters both by
the expansion method and through the Grassmannian pullback.

Index conventions (all 1-based): i, j, k = 1..n fiber; lam, mu, nu =
1..m base; a = 1..kappa normal directions.  psi[i][lam] stores the
coefficient of eta^{Lambda minus lam} in phi^i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .eds import (AlgebraicIdeal, CartanReport, IntegralElement, SigmaCoframe,
                  cartan_characters_by_expansion, cartan_test,
                  is_integral_element)
from .errors import InputError, VerificationError
from .exterior import ExteriorForm, evaluate, substitute


def _frac_sqrt(x: Fraction):
    """Exact square root of a rational, or None."""
    if x < 0:
        return None
    num = ISqrt(x.numerator)
    den = ISqrt(x.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def ISqrt(k: int):
    from math import isqrt
    r = isqrt(k)
    return r if r * r == k else None


# ---------------------------------------------------------------------------
# psi-data


class PsiData:
    """Coefficients psi^i_{Lambda minus lam} of the (m-1)-form phi."""

    def __init__(self, n, m, values):
        if n < 2 or m < 2:
            raise InputError("need fiber rank n >= 2 and base dimension m >= 2")
        values = [[Fraction(v) for v in row] for row in values]
        if len(values) != n or any(len(row) != m for row in values):
            raise InputError(f"psi values must form an {n} x {m} array")
        if all(not v for row in values for v in row):
            raise InputError("phi vanishes: all psi coefficients are zero")
        self.n = n
        self.m = m
        self.values = values

    def __getitem__(self, ilam):
        i, lam = ilam
        return self.values[i - 1][lam - 1]

    def is_normalized(self):
        col = [self.values[i][self.m - 1] for i in range(self.n)]
        return col[0] == 1 and all(not c for c in col[1:])

    def det2(self):
        """det psi for the n = m = 2 case."""
        if self.n != 2 or self.m != 2:
            raise InputError("det psi is only defined for n = m = 2")
        v = self.values
        return v[0][0] * v[1][1] - v[0][1] * v[1][0]


@dataclass
class FrameChange:
    """Record of the transformations applied during normalization."""
    base_permutation: list        # new position of each base index (1-based)
    fiber_matrix: list            # orthogonal n x n matrix applied to rows
    scale: Fraction               # overall factor applied to phi

    @classmethod
    def identity(cls, n, m):
        return cls(base_permutation=list(range(1, m + 1)),
                   fiber_matrix=[[Fraction(int(i == j)) for j in range(n)]
                                 for i in range(n)],
                   scale=Fraction(1))

    def is_identity(self):
        return (self.base_permutation == list(range(1, len(self.base_permutation) + 1))
                and self.scale == 1
                and all(self.fiber_matrix[i][j] == int(i == j)
                        for i in range(len(self.fiber_matrix))
                        for j in range(len(self.fiber_matrix))))


def _permute_base(psi: PsiData, perm):
    """Relabel base coordinates: new index of old lam is perm[lam-1].

    The complementary wedge eta^{Lambda minus lam} picks up the sign of
    sorting the permuted complementary index tuple.
    """
    from .exterior import sort_with_sign
    n, m = psi.n, psi.m
    out = [[Fraction(0)] * m for _ in range(n)]
    for lam in range(1, m + 1):
        comp = tuple(perm[k - 1] for k in range(1, m + 1) if k != lam)
        _, sign = sort_with_sign(comp)
        new_lam = perm[lam - 1]
        for i in range(n):
            out[i][new_lam - 1] = sign * psi.values[i][lam - 1]
    return PsiData(n, m, out)


def _apply_fiber(psi: PsiData, q):
    """psi'^i = sum_j q[i][j] psi^j (frame rotation acting on components)."""
    n, m = psi.n, psi.m
    out = [[sum((q[i][j] * psi.values[j][lam] for j in range(n)), Fraction(0))
            for lam in range(m)] for i in range(n)]
    return PsiData(n, m, out)


def normalize_psi(psi: PsiData):
    """Bring psi to the form psi^1_{Lambda minus m} = 1, psi^i_{Lambda minus m} = 0
    for i >= 2 using a base reordering, an exactly-rational orthogonal
    fiber change, and an overall rescaling of phi.

    Returns (normalized PsiData, FrameChange).  Raises InputError when no
    exact rational orthogonal change exists (the pivot column's squared
    norm is not a perfect rational square) or, for n = m = 2, when
    det psi = 0.
    """
    n, m = psi.n, psi.m
    if n == 2 and m == 2 and not psi.det2():
        raise InputError("n = m = 2 requires det psi != 0")
    if psi.is_normalized():
        return psi, FrameChange.identity(n, m)

    change = FrameChange.identity(n, m)
    work = psi
    # base reordering: move a nonzero column into slot m
    col_m = [work.values[i][m - 1] for i in range(n)]
    if all(not c for c in col_m):
        lam0 = max(lam for lam in range(1, m + 1)
                   if any(work.values[i][lam - 1] for i in range(n)))
        perm = list(range(1, m + 1))
        perm[lam0 - 1], perm[m - 1] = perm[m - 1], perm[lam0 - 1]
        work = _permute_base(work, perm)
        change.base_permutation = perm

    u = [work.values[i][m - 1] for i in range(n)]
    support = [i for i in range(n) if u[i]]
    if len(support) == 1:
        i0 = support[0]
        q = [[Fraction(0)] * n for _ in range(n)]
        # signed permutation swapping rows 1 and i0, fixing the rest
        for i in range(n):
            q[i][i] = Fraction(1)
        if i0 != 0:
            q[0][0] = q[i0][i0] = Fraction(0)
            q[0][i0] = Fraction(1)
            q[i0][0] = Fraction(-1) if n % 2 == 0 else Fraction(1)
            # determinant sign is irrelevant for orthogonality; keep +1 rows
            q[i0][0] = Fraction(1)
        r = u[i0]
    else:
        norm2 = sum((c * c for c in u), Fraction(0))
        r = _frac_sqrt(norm2)
        if r is None:
            raise InputError(
                "pivot column cannot be rotated to e1 exactly: |u|^2 is not a "
                "perfect rational square")
        # Householder reflection sending u to r*e1
        w = list(u)
        w[0] -= r
        ww = sum((c * c for c in w), Fraction(0))
        if not ww:  # u already r*e1
            q = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        else:
            q = [[Fraction(int(i == j)) - 2 * w[i] * w[j] / ww
                  for j in range(n)] for i in range(n)]
    work = _apply_fiber(work, q)
    change.fiber_matrix = q

    pivot = work.values[0][m - 1]
    if not pivot:
        raise InputError("normalization failed: pivot vanished")
    scaled = [[v / pivot for v in row] for row in work.values]
    work = PsiData(n, m, scaled)
    change.scale = Fraction(1) / pivot

    if not work.is_normalized():
        raise VerificationError("normalization postcondition failed")
    if n == 2 and m == 2 and not work.det2():
        raise InputError("n = m = 2 requires det psi != 0")
    return work, change


def random_normalized_psi(n, m, rng, bound=10):
    """Seeded random psi already in normalized form; entries have
    numerators and denominators bounded by `bound`."""
    while True:
        values = [[Fraction(rng.randint(-(bound - 1), bound - 1),
                            rng.randint(1, bound))
                   for _ in range(m)] for _ in range(n)]
        for i in range(n):
            values[i][m - 1] = Fraction(1 if i == 0 else 0)
        psi = PsiData(n, m, values)
        if n == 2 and m == 2 and not psi.det2():
            continue
        return psi


def load_psi(doc) -> PsiData:
    """psi-data from the JSON schema {"n", "m", "psi": [[str]]}."""
    try:
        n, m = int(doc["n"]), int(doc["m"])
        values = [[Fraction(str(v)) for v in row] for row in doc["psi"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed psi input: {exc}") from exc
    return PsiData(n, m, values)


# ---------------------------------------------------------------------------
# second fundamental form, curvature elements


class SecondFundamental:
    """Coefficients H^a_{i lam}; the columns H_{i lam} are vectors in the
    kappa-dimensional normal space W."""

    def __init__(self, n, m, kappa, entries):
        self.n = n
        self.m = m
        self.kappa = kappa
        # entries[a-1][i-1][lam-1]
        self.entries = [[[Fraction(entries[a][i][lam]) for lam in range(m)]
                         for i in range(n)] for a in range(kappa)]

    @classmethod
    def zero(cls, n, m, kappa):
        z = [[[Fraction(0)] * m for _ in range(n)] for _ in range(kappa)]
        return cls(n, m, kappa, z)

    def __getitem__(self, ail):
        a, i, lam = ail
        return self.entries[a - 1][i - 1][lam - 1]

    def set(self, a, i, lam, value):
        self.entries[a - 1][i - 1][lam - 1] = Fraction(value)

    def vector(self, i, lam):
        """H_{i lam} as a vector of W (length kappa)."""
        return [self.entries[a][i - 1][lam - 1] for a in range(self.kappa)]

    def dot(self, i, lam, j, mu):
        return sum((x * y for x, y in zip(self.vector(i, lam), self.vector(j, mu))),
                   Fraction(0))

    def scaled(self, rho):
        rho = Fraction(rho)
        out = SecondFundamental.zero(self.n, self.m, self.kappa)
        out.entries = [[[rho * v for v in row] for row in block]
                       for block in self.entries]
        return out

    def in_open_set(self):
        """Nonsingular Gram matrix of {H_{i lam} : i <= n-1, lam <= m-1}."""
        vecs = [self.vector(i, lam)
                for i in range(1, self.n) for lam in range(1, self.m)]
        gram = [[sum((x * y for x, y in zip(u, v)), Fraction(0)) for v in vecs]
                for u in vecs]
        return bool(linalg.det(gram)) if vecs else True


class CurvatureElement:
    """R^i_{j; lam mu} with both antisymmetries, stored for i<j, lam<mu."""

    def __init__(self, n, m, values=None):
        self.n = n
        self.m = m
        self.values = {}
        for key, val in (values or {}).items():
            i, j, lam, mu = key
            if not (1 <= i < j <= n and 1 <= lam < mu <= m):
                raise InputError(f"curvature key {key} violates i<j, lam<mu")
            val = Fraction(val)
            if val:
                self.values[key] = val

    def __getitem__(self, key):
        i, j, lam, mu = key
        sign = 1
        if i == j or lam == mu:
            return Fraction(0)
        if i > j:
            i, j, sign = j, i, -sign
        if lam > mu:
            lam, mu, sign = mu, lam, -sign
        return sign * self.values.get((i, j, lam, mu), Fraction(0))

    def is_zero(self):
        return not self.values

    def component_count(self):
        return self.n * (self.n - 1) * self.m * (self.m - 1) // 4

    def __eq__(self, other):
        return (isinstance(other, CurvatureElement) and self.n == other.n
                and self.m == other.m and self.values == other.values)


def load_curvature(n, m, items) -> CurvatureElement:
    """Curvature from JSON entries [{"i","j","lambda","mu","value"}]."""
    values = {}
    for item in items:
        key = (int(item["i"]), int(item["j"]),
               int(item["lambda"]), int(item["mu"]))
        values[key] = values.get(key, Fraction(0)) + Fraction(str(item["value"]))
    return CurvatureElement(n, m, values)


# ---------------------------------------------------------------------------
# core maps


def cartan_identity_residual(H: SecondFundamental, psi: PsiData):
    """Residual sum_{i,lam} (-1)^(lam+1) H^a_{i lam} psi^i_{Lambda minus lam}
    for each normal direction a; zero iff the identities hold."""
    if (H.n, H.m) != (psi.n, psi.m):
        raise InputError("H and psi shapes disagree")
    out = []
    for a in range(1, H.kappa + 1):
        total = Fraction(0)
        for i in range(1, H.n + 1):
            for lam in range(1, H.m + 1):
                term = H[a, i, lam] * psi[i, lam]
                total += term if lam % 2 else -term
        out.append(total)
    return out


def gauss_map(H: SecondFundamental) -> CurvatureElement:
    """(G(H))^i_{j; lam mu} = H_{i lam}.H_{j mu} - H_{i mu}.H_{j lam}."""
    values = {}
    for i in range(1, H.n + 1):
        for j in range(i + 1, H.n + 1):
            for lam in range(1, H.m + 1):
                for mu in range(lam + 1, H.m + 1):
                    v = H.dot(i, lam, j, mu) - H.dot(i, mu, j, lam)
                    if v:
                        values[(i, j, lam, mu)] = v
    return CurvatureElement(H.n, H.m, values)


def curvature_rows(n, m):
    """Row index order (i, j, lam, mu), i<j then lam<mu, lexicographic."""
    return [(i, j, lam, mu)
            for i in range(1, n + 1) for j in range(i + 1, n + 1)
            for lam in range(1, m + 1) for mu in range(lam + 1, m + 1)]


class GaussDifferential:
    """The linear map dG at H: rows (i,j,lam,mu), columns (a,k,nu)."""

    def __init__(self, H: SecondFundamental, drop_dependent=False):
        self.H = H
        self.rows = curvature_rows(H.n, H.m)
        self.columns = [(a, k, nu)
                        for a in range(1, H.kappa + 1)
                        for k in range(1, H.n + 1)
                        for nu in range(1, H.m + 1)
                        if not (drop_dependent and (k, nu) == (1, H.m))]

    def entry(self, row, col):
        i, j, lam, mu = row
        a, k, nu = col
        H = self.H
        v = Fraction(0)
        if k == i and nu == lam:
            v += H[a, j, mu]
        if k == j and nu == mu:
            v += H[a, i, lam]
        if k == i and nu == mu:
            v -= H[a, j, lam]
        if k == j and nu == lam:
            v -= H[a, i, mu]
        return v

    def dense(self):
        return [[self.entry(r, c) for c in self.columns] for r in self.rows]

    def apply(self, delta: SecondFundamental) -> CurvatureElement:
        """dG(H)[delta], for directional-derivative checks."""
        values = {}
        for row in self.rows:
            i, j, lam, mu = row
            total = Fraction(0)
            for a in range(1, self.H.kappa + 1):
                total += (self.H[a, j, mu] * delta[a, i, lam]
                          + self.H[a, i, lam] * delta[a, j, mu]
                          - self.H[a, j, lam] * delta[a, i, mu]
                          - self.H[a, i, mu] * delta[a, j, lam])
            if total:
                values[row] = total
        return CurvatureElement(self.H.n, self.H.m, values)


def gauss_differential(H: SecondFundamental) -> GaussDifferential:
    return GaussDifferential(H)


def reduced_gauss_differential(H: SecondFundamental, psi: PsiData) -> GaussDifferential:
    """dG with the dependent coordinate H^a_{1m} eliminated: its value is
    forced by the Cartan identity under the normalization, so the
    corresponding differentials drop out and the remaining entries are
    read off at the given H."""
    if not psi.is_normalized():
        raise InputError("identity elimination requires normalized psi")
    return GaussDifferential(H, drop_dependent=True)


def dependent_coefficient(H: SecondFundamental, psi: PsiData, a: int):
    """The value of H^a_{1m} dictated by the Cartan identity."""
    m = H.m
    total = Fraction(0)
    for i in range(1, H.n + 1):
        for lam in range(1, m):
            s = 1 if (m + lam + 1) % 2 == 0 else -1
            total += s * H[a, i, lam] * psi[i, lam]
    return total


@dataclass
class RankCertificate:
    """Outcome of the Jacobian maximal-rank check."""
    rank: int
    expected: int
    witness_columns: list
    failed_level: tuple | None = None

    @property
    def full(self):
        return self.rank == self.expected


def _flag_levels(n, m):
    """Column-group order (k, nu), nu outer, matching the interleaved
    flag of curvature subspaces."""
    return [(k, nu) for nu in range(2, m + 1) for k in range(2, n + 1)]


def jacobian_rank_certificate(H: SecondFundamental, psi: PsiData) -> RankCertificate:
    """Certify that dG restricted to the columns d/dH^a_{k nu}, k >= 2,
    nu >= 2, has rank dim K = n(n-1)m(m-1)/4.

    The restricted matrix is block lower triangular along the flag of
    curvature subspaces: row (i,j;lam,mu) belongs to level (j,mu), and
    its only entries at that level form the stacked matrix (H^a_{i lam})
    with i<j, lam<mu.  Full row rank of every diagonal block certifies
    full rank; the pivot columns of the blocks are the witness.  On a
    singular block, the first failing level is reported and the true
    rank is computed by sparse elimination.
    """
    n, m, kappa = H.n, H.m, H.kappa
    expected = n * (n - 1) * m * (m - 1) // 4
    levels = _flag_levels(n, m)
    failed = None
    witness = []
    for (k, nu) in levels:
        block = [[H[a, i, lam] for a in range(1, kappa + 1)]
                 for i in range(1, k) for lam in range(1, nu)]
        _, pivots = linalg.bareiss_echelon(block)
        if len(pivots) < (k - 1) * (nu - 1):
            failed = (k, nu)
            break
        witness.extend((a + 1, k, nu) for a in pivots)
    if failed is None:
        return RankCertificate(rank=expected, expected=expected,
                               witness_columns=witness)
    # honest fallback: exact rank of the whole restricted matrix
    diff = GaussDifferential(H)
    cols = [(a, k, nu) for (k, nu) in levels for a in range(1, kappa + 1)]
    col_index = {c: idx for idx, c in enumerate(cols)}
    ech = linalg.SparseEchelon()
    for row in diff.rows:
        sparse = {}
        for c in cols:
            v = diff.entry(row, c)
            if v:
                sparse[col_index[c]] = v
        ech.insert(sparse)
    return RankCertificate(rank=ech.rank, expected=expected,
                           witness_columns=[], failed_level=failed)


def construct_preimage(psi: PsiData, kappa=None) -> SecondFundamental:
    """Explicit pre-image of 0 under the Gauss map.

    The vectors H_{i lam} (i <= n-1, lam <= m-1) are standard basis
    vectors of W in (i, lam)-lexicographic order, the last fiber row is
    zero, and H_{j m} are symmetric-coefficient combinations whose first
    row carries the sign (-1)^(m+lam+1) psi^j_{Lambda minus lam} so that the
    Cartan identities hold exactly; symmetry of the coefficients makes
    G(H) = 0.
    """
    n, m = psi.n, psi.m
    min_kappa = (n - 1) * (m - 1)
    if kappa is None:
        kappa = min_kappa
    if kappa < min_kappa:
        raise InputError(f"kappa = {kappa} below the minimum {(n - 1)}*{(m - 1)} = {min_kappa}")
    if not psi.is_normalized():
        raise InputError("construct_preimage requires normalized psi")

    def widx(i, lam):  # 0-based W coordinate of the basis vector H_{i lam}
        return (i - 1) * (m - 1) + (lam - 1)

    H = SecondFundamental.zero(n, m, kappa)
    for i in range(1, n):
        for lam in range(1, m):
            H.set(widx(i, lam) + 1, i, lam, 1)

    def sign(lam):
        return 1 if (m + lam + 1) % 2 == 0 else -1

    # A^{1 lam}_j = (-1)^(m+lam+1) psi^j_{Lambda minus lam}; symmetric partner
    # A^{i lam}_1 fills the first column; all other coefficients are zero.
    for lam in range(1, m):
        s = sign(lam)
        # H_{1 m} collects contributions from every basis vector e_{i lam}
        for i in range(1, n):
            v = s * psi[i, lam]
            if v:
                H.set(widx(i, lam) + 1, 1, m, H[widx(i, lam) + 1, 1, m] + v)
        # H_{j m}, j >= 2, uses only the first-row basis vectors e_{1 lam}
        for j in range(2, n):
            v = s * psi[j, lam]
            if v:
                H.set(widx(1, lam) + 1, j, m, H[widx(1, lam) + 1, j, m] + v)
    return H


def flag_subspace_test(R: CurvatureElement, k: int, nu: int) -> bool:
    """Membership of R in the flag subspace E^k_nu: all components with
    i < j <= k and lam < mu <= nu vanish."""
    if not (1 <= k <= R.n and 1 <= nu <= R.m):
        raise InputError(f"flag level ({k}, {nu}) out of range")
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            for lam in range(1, nu + 1):
                for mu in range(lam + 1, nu + 1):
                    if R[i, j, lam, mu]:
                        return False
    return True


# ---------------------------------------------------------------------------
# sigma indexing and dimension ledger


class SigmaIndexMap:
    """Bijection from the fiber covector labels (omega^i_j - eta^i_j and
    omega^a_i) onto 1..(n(n-1)/2 + n*kappa); a is the absolute extension
    index n+1..n+kappa."""

    def __init__(self, n, kappa):
        self.n = n
        self.kappa = kappa

    def pair(self, i, j):
        n = self.n
        if not 1 <= i < j <= n:
            raise InputError(f"sigma(i,j) needs 1 <= i < j <= n, got {(i, j)}")
        return (j - i) + n * (n - 1) // 2 - (n - i) * (n - i + 1) // 2

    def normal(self, a, i):
        n = self.n
        if not (n + 1 <= a <= n + self.kappa and 1 <= i <= n):
            raise InputError(f"sigma(a,i) arguments out of range: {(a, i)}")
        return n * (n - 1) // 2 + (a - n - 1) * n + i

    @property
    def size(self):
        return self.n * (self.n - 1) // 2 + self.n * self.kappa

    def is_bijection(self):
        seen = set()
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                seen.add(self.pair(i, j))
        for a in range(self.n + 1, self.n + self.kappa + 1):
            for i in range(1, self.n + 1):
                seen.add(self.normal(a, i))
        return seen == set(range(1, self.size + 1))


@dataclass
class DimensionLedger:
    n: int
    m: int
    kappa: int
    dim_sigma: int
    dim_hset: int
    dim_z: int
    dim_k: int
    codim_v: int
    characters: list
    min_kappa: int

    @property
    def character_sum(self):
        return sum(self.characters)


def closed_form_characters(n, m, kappa):
    """C_lam = n(n-1)(lam+1)/2 for lam <= m-2; C_{m-1} = n(n-1)m/2 + kappa."""
    chars = [n * (n - 1) * (lam + 1) // 2 for lam in range(m - 1)]
    chars.append(n * (n - 1) * m // 2 + kappa)
    return chars


def dimension_ledger(n, m, kappa) -> DimensionLedger:
    min_kappa = (n - 1) * (m - 1)
    if kappa < min_kappa:
        raise InputError(f"kappa = {kappa} below the minimum (n-1)(m-1) = {min_kappa}")
    dim_k = n * (n - 1) * m * (m - 1) // 4
    dim_sigma = m + n * (n - 1) // 2 + n * kappa
    dim_hset = (n * m - 1) * kappa - dim_k
    codim_v = m * n * (n - 1) // 2 + dim_k + kappa
    characters = closed_form_characters(n, m, kappa)
    ledger = DimensionLedger(n=n, m=m, kappa=kappa, dim_sigma=dim_sigma,
                             dim_hset=dim_hset, dim_z=dim_sigma + dim_hset,
                             dim_k=dim_k, codim_v=codim_v,
                             characters=characters, min_kappa=min_kappa)
    if ledger.character_sum != codim_v:
        raise VerificationError(
            f"character sum {ledger.character_sum} != codimension {codim_v}")
    return ledger


# ---------------------------------------------------------------------------
# the exterior ideal on the product space, flags, characters


def gie_coframe(n, m, kappa) -> SigmaCoframe:
    sigma = SigmaIndexMap(n, kappa)
    fiber = [None] * sigma.size
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            fiber[sigma.pair(i, j) - 1] = f"w({i},{j})"
    for a in range(n + 1, n + kappa + 1):
        for i in range(1, n + 1):
            fiber[sigma.normal(a, i) - 1] = f"w({a},{i})"
    return SigmaCoframe(base_labels=tuple(f"eta{l}" for l in range(1, m + 1)),
                        fiber_labels=tuple(fiber))


def gie_ideal(psi: PsiData, R: CurvatureElement, kappa,
              H: SecondFundamental | None = None,
              adapted: bool = False) -> AlgebraicIdeal:
    """The exterior ideal on the product space in the sigma coframe.

    Generators: the coframe covectors omega^i_j - eta^i_j, the Gauss-type
    2-forms sum_a omega^a_i ^ omega^a_j - Omega^i_j, and the phi-type
    m-forms omega^a_i ^ phi^i.  With adapted=True the normal covectors
    are rewritten as pi^a_i + H^a_{i lam} eta^lam, the coframe adapted to
    the integral flag of H (required for the expansion-method character
    count).
    """
    n, m = psi.n, psi.m
    sigma = SigmaIndexMap(n, kappa)
    coframe = gie_coframe(n, m, kappa)
    N = coframe.dim
    gens = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            gens.append(ExteriorForm.covector(N, m + sigma.pair(i, j)))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            g = ExteriorForm.zero(N, 2)
            for a in range(n + 1, n + kappa + 1):
                g = g + ExteriorForm.monomial(
                    N, (m + sigma.normal(a, i), m + sigma.normal(a, j)))
            for lam in range(1, m + 1):
                for mu in range(lam + 1, m + 1):
                    v = R[i, j, lam, mu]
                    if v:
                        g = g + ExteriorForm.monomial(N, (lam, mu), -v)
            gens.append(g)
    for a in range(n + 1, n + kappa + 1):
        g = ExteriorForm.zero(N, m)
        for i in range(1, n + 1):
            for lam in range(1, m + 1):
                v = psi[i, lam]
                if v:
                    comp = tuple(k for k in range(1, m + 1) if k != lam)
                    g = g + ExteriorForm.monomial(
                        N, (m + sigma.normal(a, i),) + comp, v)
        gens.append(g)

    if adapted:
        if H is None:
            raise InputError("adapted coframe requires H")
        images = {}
        for a in range(n + 1, n + kappa + 1):
            for i in range(1, n + 1):
                coord = m + sigma.normal(a, i)
                img = ExteriorForm.covector(N, coord)
                for lam in range(1, m + 1):
                    v = H[a - n, i, lam]
                    if v:
                        img = img + ExteriorForm.covector(N, lam, v)
                images[coord] = img
        gens = [substitute(g, images, new_dim=N) for g in gens]
    return AlgebraicIdeal(coframe, gens)


def build_integral_flag(psi: PsiData, H: SecondFundamental,
                        R: CurvatureElement | None = None) -> IntegralElement:
    """The explicit m-dimensional integral element e_lam = X_lam +
    H^a_{i lam} Y_{sigma(a,i)}.  Verifies integrality, the vanishing of
    all Y_{sigma(i,j)} coefficients, and eta^Lambda(e_1..e_m) = 1."""
    n, m, kappa = H.n, H.m, H.kappa
    if R is None:
        R = gauss_map(H)
    sigma = SigmaIndexMap(n, kappa)
    ideal = gie_ideal(psi, R, kappa)
    N = ideal.dim
    basis = []
    for lam in range(1, m + 1):
        v = [Fraction(0)] * N
        v[lam - 1] = Fraction(1)
        for a in range(n + 1, n + kappa + 1):
            for i in range(1, n + 1):
                v[m + sigma.normal(a, i) - 1] = H[a - n, i, lam]
        basis.append(v)
    element = IntegralElement(basis)
    if not is_integral_element(element, ideal):
        _report_first_violation(element, ideal)
    vol = ExteriorForm.monomial(N, tuple(range(1, m + 1)))
    if evaluate(vol, basis) != 1:
        raise VerificationError("volume form does not evaluate to 1 on the flag")
    return element


def _report_first_violation(element, ideal):
    from itertools import combinations
    for gi, g in enumerate(ideal.generators):
        if g.degree > element.dimension:
            continue
        for subset in combinations(element.basis, g.degree):
            val = evaluate(g, subset)
            if val:
                raise VerificationError(
                    f"generator {gi} evaluates to {val} on the flag; "
                    "H violates the Gauss/Cartan preconditions")
    raise VerificationError("integrality check failed without a witness")


def gie_cartan_report(psi: PsiData, H: SecondFundamental,
                      R: CurvatureElement | None = None) -> CartanReport:
    """Characters of the constructed flag by the expansion method,
    tested against the codimension formula."""
    if R is None:
        R = gauss_map(H)
    ledger = dimension_ledger(psi.n, psi.m, H.kappa)
    ideal = gie_ideal(psi, R, H.kappa, H=H, adapted=True)
    report = cartan_characters_by_expansion(ideal)
    return cartan_test(report, ledger.codim_v)


# ---------------------------------------------------------------------------
# Grassmannian pullback (second-proof path)


class GrassmannPullback:
    """Pulled-back generator coefficients as polynomial functions of the
    Grassmannian chart coordinates P^A_lam."""

    def __init__(self, psi: PsiData, R: CurvatureElement, kappa):
        from .poly import Polynomial
        n, m = psi.n, psi.m
        self.psi = psi
        self.kappa = kappa
        sigma = SigmaIndexMap(n, kappa)
        self.sigma = sigma
        s = sigma.size
        self.nvars = s * m

        def P(A, lam):
            return Polynomial.variable((A - 1) * m + (lam - 1), self.nvars)

        linear, quadratic, phi_type = [], [], []
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for lam in range(1, m + 1):
                    linear.append(P(sigma.pair(i, j), lam))
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for lam in range(1, m + 1):
                    for mu in range(lam + 1, m + 1):
                        f = Polynomial.constant(-R[i, j, lam, mu], self.nvars)
                        for a in range(n + 1, n + kappa + 1):
                            Ai, Aj = sigma.normal(a, i), sigma.normal(a, j)
                            f = f + P(Ai, lam) * P(Aj, mu) - P(Ai, mu) * P(Aj, lam)
                        quadratic.append(f)
        for a in range(n + 1, n + kappa + 1):
            f = Polynomial.constant(0, self.nvars)
            for i in range(1, n + 1):
                for lam in range(1, m + 1):
                    c = psi[i, lam] if lam % 2 else -psi[i, lam]
                    if c:
                        f = f + c * P(sigma.normal(a, i), lam)
            phi_type.append(f)
        self.linear = linear
        self.quadratic = quadratic
        self.phi_type = phi_type

    @property
    def functions(self):
        return self.linear + self.quadratic + self.phi_type

    def point_from(self, H: SecondFundamental):
        """Chart coordinates of the plane spanned by the H-flag."""
        point = [Fraction(0)] * self.nvars
        n, m = self.psi.n, self.psi.m
        for a in range(n + 1, n + self.kappa + 1):
            for i in range(1, n + 1):
                A = self.sigma.normal(a, i)
                for lam in range(1, m + 1):
                    point[(A - 1) * m + (lam - 1)] = H[a - n, i, lam]
        return point

    def independent_differential_count(self, point) -> int:
        """Rank of the Jacobian of all pulled-back functions at `point`;
        this is the observed codimension of the integral-element variety."""
        ech = linalg.SparseEchelon()
        for f in self.functions:
            row = {}
            for exps, _ in f.terms.items():
                for v, e in enumerate(exps):
                    if e:
                        row.setdefault(v, None)
            grad = {}
            for v in row:
                d = f.partial(v).eval(point)
                if d:
                    grad[v] = d
            ech.insert(grad)
        return ech.rank


def grassmann_pullback(psi: PsiData, R: CurvatureElement, kappa) -> GrassmannPullback:
    return GrassmannPullback(psi, R, kappa)
