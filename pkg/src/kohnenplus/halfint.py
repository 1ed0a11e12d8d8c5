"""The plus subspace of weight k+1/2 cusp forms on Gamma_0(4).

Construction path: the graded ring of half-integral weight forms on
Gamma_0(4) is generated by the theta series (weight 1/2) and the weight-2
form F = sum over odd n of sigma_1(n) q^n, so monomials theta^(2k+1-4j) F^j
span the ambient weight-(k+1/2) space.  The plus-space cusp forms are cut
out by exact rational linear algebra (coefficient conditions a(n) = 0 for
(-1)^k n = 2,3 mod 4 up to a Sturm-style bound, plus a(0) = 0), then
re-verified against the full truncation.  The computed dimension must equal
dim S_2k(1); anything else raises, since that equality is the arithmetic
fact this construction leans on.

T(p^2) acts on raw coefficients in the normalization that makes its
eigenvalue on the plus space literally a_f(p) for the weight-2k lift f, so
every eigenvalue / lift statement downstream is an exact integer test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import divisors, is_prime, mobius, sigma_sieve
from .charsums import kronecker
from .classical import EigenData, dim_cusp_level1, eigenbasis_level1
from .errors import (DiagonalizationError, DimensionMismatchError,
                     NoLiftMatchError, TruncationError, VerificationError)
from .qseries import QSeries


def theta_series(trunc: int) -> QSeries:
    """theta = 1 + 2 sum_{n>=1} q^(n^2)."""
    coeffs = [0] * (trunc + 1)
    coeffs[0] = 1
    n = 1
    while n * n <= trunc:
        coeffs[n * n] = 2
        n += 1
    return QSeries.from_ints(coeffs)


def f_weight2(trunc: int) -> QSeries:
    """F = sum over odd n of sigma_1(n) q^n, the weight-2 generator."""
    s = sigma_sieve(1, trunc)
    return QSeries.from_ints(
        [s[n] if n % 2 else 0 for n in range(trunc + 1)])


def full_space_basis(k: int, trunc: int) -> list[QSeries]:
    """Monomials theta^(2k+1-4j) F^j, j = 0..floor((2k+1)/4).

    Leading terms are q^j, so the family is visibly independent; it spans
    the ambient weight-(k+1/2) space on Gamma_0(4).
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    theta = theta_series(trunc)
    f2 = f_weight2(trunc)
    j_max = (2 * k + 1) // 4
    e_min = 2 * k + 1 - 4 * j_max
    theta4 = theta.pow(4)
    theta_pows = {e_min: theta.pow(e_min)}
    e = e_min
    while e + 4 <= 2 * k + 1:
        theta_pows[e + 4] = theta_pows[e] * theta4
        e += 4
    out = []
    fpow = QSeries.one(trunc)
    for j in range(j_max + 1):
        out.append(theta_pows[2 * k + 1 - 4 * j] * fpow)
        if j < j_max:
            fpow = fpow * f2
    return out


def sturm_bound(k: int) -> int:
    """Number of initial coefficient conditions imposed when cutting the
    plus cusp space; certified a posteriori by the dimension match."""
    return 2 * k + 4


@dataclass(frozen=True)
class HalfIntegralForm:
    k: int
    series: QSeries
    plus: bool = True
    cusp: bool = True
    eigen: dict[int, Fraction | float] | None = None

    @property
    def weight(self) -> Fraction:
        return Fraction(2 * self.k + 1, 2)

    @property
    def trunc(self) -> int:
        return self.series.trunc

    def coefficient(self, n: int) -> Fraction:
        return self.series[n]


def _plus_kills(k: int, n: int) -> bool:
    return ((-1) ** k * n) % 4 in (2, 3)


def _rational_nullspace(rows: list[list[Fraction]], n_cols: int) -> list[list[Fraction]]:
    """Exact nullspace of a small rational matrix by Gauss elimination."""
    mat = [row[:] for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n_cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        basis.append(v)
    return basis


def _integer_scaled(series: QSeries) -> QSeries:
    """Scale so the first nonzero coefficient is a positive integer and the
    integer coefficient vector has content 1 (multiply by den * sign / content)."""
    lead = series.leading_index()
    if lead is None:
        return series
    nums = series.numerators()
    sign = 1 if nums[lead] > 0 else -1
    g = 0
    for v in nums:
        g = math.gcd(g, v)
        if g == 1:
            break
    return QSeries.from_ints([sign * v // g for v in nums])


def plus_cusp_basis(k: int, trunc: int) -> list[HalfIntegralForm]:
    """Exact-rational basis of the plus cusp space at weight k + 1/2.

    Imposes a(0) = 0 and the plus condition for n up to sturm_bound(k),
    checks the resulting dimension against dim S_2k(1), and re-verifies the
    plus condition on every returned series up to the full truncation.
    """
    sb = sturm_bound(k)
    if trunc < sb:
        raise TruncationError(f"plus_cusp_basis needs trunc >= {sb}")
    monos = full_space_basis(k, trunc)
    cond_rows = [0] + [n for n in range(1, sb + 1) if _plus_kills(k, n)]
    rows = [[m[n] for m in monos] for n in cond_rows]
    kernel = _rational_nullspace(rows, len(monos))
    target = dim_cusp_level1(2 * k)
    if len(kernel) != target:
        raise DimensionMismatchError(
            f"plus cusp space at k = {k}: got dim {len(kernel)}, "
            f"expected dim S_{2 * k}(1) = {target}")
    forms = []
    for v in kernel:
        combo = None
        for coef, mono in zip(v, monos):
            if coef == 0:
                continue
            term = mono.scale(coef)
            combo = term if combo is None else combo + term
        series = _integer_scaled(combo)
        if not series.is_integral():
            raise VerificationError("plus basis element failed integer scaling")
        nums = series.numerators()
        if nums[0] != 0:
            raise VerificationError("cusp condition violated at n = 0")
        for n in range(1, trunc + 1):
            if nums[n] != 0 and _plus_kills(k, n):
                raise VerificationError(
                    f"plus condition violated at n = {n} (k = {k})")
        forms.append(HalfIntegralForm(k, series))
    forms.sort(key=lambda g: g.series.leading_index())
    return forms


def hecke_Tp2(g: HalfIntegralForm, p: int,
              out_trunc: int | None = None) -> HalfIntegralForm:
    """T(p^2) on raw plus-space coefficients for odd prime p:

    b(n) = a(p^2 n) + chi((-1)^k n; p) p^(k-1) a(n) + p^(2k-1) a(n/p^2).

    This is the normalization under which the plus-space eigenvalue equals
    a_f(p) for the weight-2k lift exactly.
    """
    if p == 2 or not is_prime(p):
        raise ValueError("p must be an odd prime")
    k = g.k
    n_out = g.trunc // (p * p) if out_trunc is None else out_trunc
    if g.trunc < p * p * n_out:
        raise TruncationError(f"need trunc >= {p * p * n_out}, have {g.trunc}")
    pk1 = p ** (k - 1)
    pk2 = p ** (2 * k - 1)
    sign = (-1) ** k
    coeffs = []
    for n in range(n_out + 1):
        b = g.series[p * p * n]
        if n:
            b += kronecker(sign * n, p) * pk1 * g.series[n]
        if n % (p * p) == 0 and n:
            b += pk2 * g.series[n // (p * p)]
        coeffs.append(b)
    return HalfIntegralForm(k, QSeries(coeffs), plus=g.plus, cusp=g.cusp)


def hecke_Tp2_matrix(k: int, p: int,
                     basis: list[HalfIntegralForm]) -> list[list[Fraction]]:
    """Matrix of T(p^2) on a plus cusp basis, with span verification."""
    d = len(basis)
    leads = [g.series.leading_index() for g in basis]
    n_need = max(leads)
    if basis[0].trunc < p * p * n_need:
        raise TruncationError(
            f"T({p * p}) matrix needs trunc >= {p * p * n_need}")
    images = [hecke_Tp2(g, p, out_trunc=g.trunc // (p * p)) for g in basis]
    cols = []
    for img in images:
        # solve sum_j x_j basis_j = img on the leading positions
        x = [Fraction(0)] * d
        residual = {n: img.series[n] for n in leads}
        for j in range(d):
            lj = leads[j]
            cj = residual[lj] / basis[j].series[lj]
            x[j] = cj
            if cj:
                for n in leads:
                    residual[n] -= cj * basis[j].series[n]
        if any(residual[n] != 0 for n in leads):
            raise VerificationError("T(p^2) image solve failed on leads")
        # verify the combination matches everywhere available
        check_to = images[0].series.trunc
        for n in range(check_to + 1):
            s = sum(x[j] * basis[j].series[n] for j in range(d) if x[j])
            if s != img.series[n]:
                raise VerificationError(
                    f"T(p^2) image left the plus cusp span at n = {n}")
        cols.append(x)
    return [[cols[i][j] for i in range(d)] for j in range(d)]


@dataclass(frozen=True)
class EigenPair:
    """A plus-space Hecke eigenform bundled with its integral-weight lift."""
    g: HalfIntegralForm
    f: EigenData
    eigen_table: dict[int, Fraction | float]
    rational: bool = True

    @property
    def k(self) -> int:
        return self.g.k

    @property
    def label(self) -> str:
        return f"k{self.k}+->{self.f.label}"


def _eigen_split(mat: list[list[Fraction]], basis: list[HalfIntegralForm]):
    """Split a plus basis into T(9)-eigenvectors (exact where rational)."""
    import sympy

    d = len(basis)
    m_sym, cp, factors, lam = _sympy_mat(mat)
    if sympy.degree(sympy.gcd(cp.as_expr(), sympy.diff(cp.as_expr(), lam))) > 0:
        raise DiagonalizationError(
            "T(9) has repeated eigenvalues on the plus space; "
            "refinement by T(25) is not implemented at desk scale")
    vectors = []
    for fac, _ in factors:
        poly = sympy.Poly(fac, lam)
        if poly.degree() == 1:
            root = sympy.Rational(-poly.nth(0), poly.nth(1))
            null = (m_sym - root * sympy.eye(d)).nullspace()
            if len(null) != 1:
                raise DiagonalizationError("unexpected eigenspace dimension")
            vec = [Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
                   for c in null[0]]
            vectors.append((True, vec))
        else:
            mat_f = np.array([[float(x) for x in row] for row in mat])
            evals, evecs = np.linalg.eig(mat_f)
            for r in poly.all_roots():
                idx = int(np.argmin(np.abs(evals - complex(r))))
                vectors.append((False, np.real(evecs[:, idx])))
    return vectors


def _sympy_mat(mat):
    import sympy

    m = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                      for row in mat])
    lam = sympy.Symbol("x")
    cp = m.charpoly(lam)
    return m, cp, sympy.factor_list(cp.as_expr())[1], lam


def charpoly_Tp2(k: int, p: int, trunc: int | None = None) -> tuple[Fraction, ...]:
    """Exact characteristic polynomial of T(p^2) on the plus cusp space."""
    d = dim_cusp_level1(2 * k)
    need = p * p * (sturm_bound(k) + 1)
    basis = plus_cusp_basis(k, max(need, trunc or 0))
    mat = hecke_Tp2_matrix(k, p, basis)
    _, cp, _, _ = _sympy_mat(mat)
    import sympy
    return tuple(Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
                 for c in cp.all_coeffs())


def _first_nonzero(series_nums: list, start: int = 1) -> int:
    for i in range(start, len(series_nums)):
        if series_nums[i]:
            return i
    raise VerificationError("zero series where an eigenform was expected")


def eigenbasis_plus(k: int, trunc: int,
                    primes: tuple[int, ...] = (3, 5, 7, 11, 13),
                    lift_trunc: int | None = None) -> list[EigenPair]:
    """Simultaneous T(p^2) eigenbasis of the plus cusp space, each eigenform
    matched to the level-1 weight-2k eigenform carrying the same eigenvalue
    table (exact comparison in the rational case).

    Rational eigenforms are scaled so the first nonzero coefficient is a
    positive integer and the coefficient vector has content 1.
    """
    basis = plus_cusp_basis(k, trunc)
    if not basis:
        return []
    d = len(basis)
    mat9 = hecke_Tp2_matrix(k, 3, basis)
    vectors = _eigen_split(mat9, basis)
    lifts = eigenbasis_level1(2 * k, lift_trunc or max(16, max(primes) + 1))
    pairs = []
    for rational, vec in vectors:
        if rational:
            combo = None
            for coef, b in zip(vec, basis):
                if coef == 0:
                    continue
                term = b.series.scale(coef)
                combo = term if combo is None else combo + term
            series = _integer_scaled(combo)
            g = HalfIntegralForm(k, series)
            n0 = _first_nonzero(series.numerators())
            table = {}
            for p in primes:
                if p * p * n0 > trunc:
                    continue
                img = hecke_Tp2(g, p, out_trunc=min(trunc // (p * p),
                                                    max(30, n0)))
                ev = img.series[n0] / series[n0]
                for n in range(1, img.series.trunc + 1):
                    if img.series[n] != ev * series[n]:
                        raise DiagonalizationError(
                            f"not a T({p * p}) eigenform at n = {n}")
                table[p] = ev
            match = [f for f in lifts if f.rational and all(
                f.series[p] == table[p] for p in table)]
            if len(match) != 1:
                raise NoLiftMatchError(
                    f"k = {k}: eigenvalue table {table} matched "
                    f"{len(match)} lifts")
            pairs.append(EigenPair(
                HalfIntegralForm(k, series, eigen=dict(table)),
                match[0], table, rational=True))
        else:
            rows = np.array([np.array(b.series.numerators(), dtype=float)
                             / float(b.series.denominator) for b in basis])
            coeffs = np.asarray(vec, dtype=float) @ rows
            lead = int(np.flatnonzero(np.abs(coeffs) > 1e-9 *
                                      np.max(np.abs(coeffs)))[0])
            coeffs = coeffs / coeffs[lead]
            table = {}
            for p in primes:
                if p * p * lead > trunc:
                    continue
                pk1 = float(p ** (k - 1))
                pk2 = float(p ** (2 * k - 1))
                sign = (-1) ** k
                n0 = lead
                b0 = coeffs[p * p * n0] + kronecker(sign * n0, p) * pk1 * coeffs[n0]
                if n0 % (p * p) == 0:
                    b0 += pk2 * coeffs[n0 // (p * p)]
                table[p] = float(b0 / coeffs[n0])
            match = [f for f in lifts if all(
                abs(float(f.coefficient(p)) - table[p])
                <= 1e-6 * max(1.0, abs(table[p])) for p in table)]
            if len(match) != 1:
                raise NoLiftMatchError(
                    f"k = {k}: float eigenvalue table matched {len(match)} lifts")
            pairs.append(_FloatEigenPair(k, coeffs, match[0], table))
    pairs.sort(key=lambda pr: float(pr.eigen_table.get(3, 0.0)))
    return pairs


class _FloatEigenPair:
    """EigenPair-alike for irrational Galois orbits (floating coefficients)."""

    def __init__(self, k: int, coeffs: np.ndarray, f: EigenData, table: dict):
        self.k = k
        self.float_coeffs = coeffs
        self.f = f
        self.eigen_table = table
        self.rational = False
        self.g = None

    @property
    def label(self) -> str:
        return f"k{self.k}+->{self.f.label}"

    def coefficient(self, n: int) -> float:
        return float(self.float_coeffs[n])


def pair_coefficient(pair, n: int):
    """Raw a_g(n) for either pair flavor (Fraction or float)."""
    if getattr(pair, "rational", True):
        return pair.g.series[n]
    return pair.coefficient(n)


def normalized_coeff(pair, n: int) -> float:
    """c_g(n) = a_g(n) / n^(k/2 - 1/4), evaluated through logs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = pair_coefficient(pair, n)
    av = float(a)
    if av == 0.0:
        return 0.0
    k = pair.k
    return math.copysign(
        math.exp(math.log(abs(av)) - (k / 2 - 0.25) * math.log(n)), av)


def shimura_identity_check(pair: EigenPair, d: int, n: int):
    """Exact cleared-power identity between a_g at n^2|d| and the lift:

    a_g(n^2 |d|) = a_g(|d|) * sum over r | n of
                   mu(r) chi_d(r) r^(k-1) a_f(n/r).

    Returns (ok, lhs, rhs); both sides are exact integers for rational
    pairs.  Requires (-1)^k d > 0 and n^2 |d| within the truncation.
    """
    k = pair.k
    if ((-1) ** k) * d <= 0:
        raise ValueError("need (-1)^k d > 0")
    m = n * n * abs(d)
    if getattr(pair, "rational", True):
        if m > pair.g.trunc:
            raise TruncationError(f"need trunc >= {m}")
        lhs = pair.g.series[m]
        rhs = pair.g.series[abs(d)] * sum(
            mobius(r) * kronecker(d, r) * r ** (k - 1)
            * pair.f.coefficient(n // r)
            for r in divisors(n))
        return lhs == rhs, lhs, rhs
    lhs = pair.coefficient(m)
    rhs = pair.coefficient(abs(d)) * sum(
        mobius(r) * kronecker(d, r) * r ** (k - 1) * pair.f.coefficient(n // r)
        for r in divisors(n))
    ok = abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs))
    return ok, lhs, rhs
