"""Level-1 integral-weight cusp forms.

Graded-ring generators E4, E6, the discriminant form, an echelonized basis
of the weight-2k cusp space built from Delta^j E4^a E6^b monomials, exact
Hecke operators, and simultaneous eigenforms with their normalized
eigenvalues.

Raw coefficients stay exact integers/rationals throughout; the
n^((2k-1)/2) normalization is applied only at the floating boundary
(lambda_f), so every Hecke identity upstream is testable as integer
equality.  Spaces of dimension >= 2 whose eigenvalues are irrational are
carried as floating eigen-data next to the exact characteristic polynomials
of the Hecke matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import is_prime, sigma_sieve
from .errors import (DiagonalizationError, TruncationError,
                     VerificationError)
from .qseries import QSeries


def dim_cusp_level1(weight: int) -> int:
    """dim S_weight(SL_2(Z)) by the classical formula (even weight)."""
    if weight % 2 or weight < 0:
        return 0
    if weight < 12:
        return 0
    dim_m = weight // 12 + (0 if weight % 12 == 2 else 1)
    return dim_m - 1


@dataclass(frozen=True)
class IntegralForm:
    weight: int
    series: QSeries
    is_eigen: bool = False

    def coefficient(self, n: int) -> Fraction:
        return self.series[n]

    @property
    def trunc(self) -> int:
        return self.series.trunc


def eisenstein(weight: int, trunc: int) -> QSeries:
    """E4 or E6, exact: E4 = 1 + 240 sum sigma_3(n) q^n, E6 = 1 - 504 sum sigma_5(n) q^n."""
    if weight == 4:
        s = sigma_sieve(3, trunc)
        return QSeries.from_ints([1] + [240 * s[n] for n in range(1, trunc + 1)])
    if weight == 6:
        s = sigma_sieve(5, trunc)
        return QSeries.from_ints([1] + [-504 * s[n] for n in range(1, trunc + 1)])
    raise ValueError("eisenstein generator weight must be 4 or 6")


def delta(trunc: int) -> IntegralForm:
    """The weight-12 discriminant form (E4^3 - E6^2)/1728, a(1) = 1."""
    if trunc < 2:
        raise TruncationError("delta needs trunc >= 2")
    e4 = eisenstein(4, trunc)
    e6 = eisenstein(6, trunc)
    series = (e4.pow(3) - e6.pow(2)).scale(Fraction(1, 1728))
    if not series.is_integral():
        raise VerificationError("discriminant coefficients must be integral")
    return IntegralForm(12, series, is_eigen=True)


def _victor_miller_exponents(weight: int, j: int) -> tuple[int, int]:
    """(a, b) with 4a + 6b = weight - 12j, b in {0,1}."""
    rem = weight - 12 * j
    b = (rem % 4) // 2
    a = (rem - 6 * b) // 4
    if a < 0:
        raise ValueError(f"no monomial for weight {weight}, j = {j}")
    return a, b


def cusp_basis(weight: int, trunc: int) -> list[IntegralForm]:
    """Echelonized basis of the weight-2k level-1 cusp space.

    Basis element i has q-expansion q^i + O(q^(d+1)) with exact integer
    coefficients (the monomial matrix is unitriangular, so echelon
    reduction never divides).
    """
    d = dim_cusp_level1(weight)
    if d == 0:
        return []
    if trunc < d + 1:
        raise TruncationError(f"cusp_basis needs trunc >= dim + 1 = {d + 1}")
    e4 = eisenstein(4, trunc)
    e6 = eisenstein(6, trunc)
    delta_series = (e4.pow(3) - e6.pow(2)).scale(Fraction(1, 1728))
    rows: list[QSeries] = []
    dpow = delta_series
    for j in range(1, d + 1):
        a, b = _victor_miller_exponents(weight, j)
        mono = dpow * e4.pow(a)
        if b:
            mono = mono * e6
        rows.append(mono)
        if j < d:
            dpow = dpow * delta_series
    # unitriangular echelon reduction on leading positions 1..d
    for i in range(d):
        for j in range(d):
            if j == i:
                continue
            c = rows[j][i + 1]
            if c:
                rows[j] = rows[j] - rows[i].scale(c)
    basis = []
    for i, r in enumerate(rows):
        if r[i + 1] != 1 or any(r[j + 1] != 0 for j in range(d) if j != i):
            raise VerificationError("echelon reduction failed")
        basis.append(IntegralForm(weight, r))
    return basis


def hecke_Tp_integral(f: IntegralForm, p: int,
                      out_trunc: int | None = None) -> IntegralForm:
    """T_p on raw coefficients: b(n) = a(pn) + p^(2k-1) a(n/p)."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    n_out = f.trunc // p if out_trunc is None else out_trunc
    if f.trunc < p * n_out:
        raise TruncationError(f"need trunc >= {p * n_out}, have {f.trunc}")
    pk = p ** (f.weight - 1)
    coeffs = []
    for n in range(n_out + 1):
        b = f.series[p * n]
        if n % p == 0:
            b += pk * f.series[n // p]
        coeffs.append(b)
    return IntegralForm(f.weight, QSeries(coeffs))


def hecke_matrix(weight: int, p: int,
                 basis: list[IntegralForm] | None = None,
                 trunc: int | None = None) -> list[list[Fraction]]:
    """Matrix of T_p on the echelon basis: column i holds T_p f_i."""
    d = dim_cusp_level1(weight)
    if basis is None:
        basis = cusp_basis(weight, trunc if trunc else p * (d + 1))
    images = [hecke_Tp_integral(f, p, out_trunc=d) for f in basis]
    return [[images[i].series[j + 1] for i in range(d)] for j in range(d)]


@dataclass(frozen=True)
class EigenData:
    """A normalized Hecke eigenform of level 1 with its eigenvalue data.

    ``coeffs`` holds a(0..trunc): a QSeries when the form is rational, else
    a float array.  ``charpolys`` are the exact characteristic polynomials
    of T_p on the full space (shared between Galois conjugates).
    """
    weight: int
    rational: bool
    series: QSeries | None
    float_coeffs: np.ndarray | None
    eigen: dict[int, Fraction | float]
    charpolys: dict[int, tuple[Fraction, ...]] = field(default_factory=dict)
    label: str = ""

    @property
    def trunc(self) -> int:
        if self.rational:
            return self.series.trunc
        return len(self.float_coeffs) - 1

    def coefficient(self, n: int):
        if self.rational:
            return self.series[n]
        if n > self.trunc:
            raise TruncationError(f"coefficient {n} beyond trunc {self.trunc}")
        return float(self.float_coeffs[n])

    def lambda_value(self, n: int) -> float:
        return lambda_f(self, n)

    def lambda_array(self, m_max: int) -> np.ndarray:
        """lambda_f(1..m_max) as floats; index 0 unused (zero)."""
        if m_max > self.trunc:
            raise TruncationError(
                f"lambda table needs trunc >= {m_max}, have {self.trunc}")
        if self.rational:
            nums = self.series.numerators()[:m_max + 1]
            a = np.array(nums, dtype=float) / float(self.series.denominator)
        else:
            a = np.array(self.float_coeffs[:m_max + 1], dtype=float)
        n = np.arange(m_max + 1, dtype=float)
        n[0] = 1.0
        out = a * np.exp(-0.5 * (self.weight - 1) * np.log(n))
        out[0] = 0.0
        return out


def _charpoly_and_factors(mat: list[list[Fraction]]):
    import sympy

    m = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                      for row in mat])
    lam = sympy.Symbol("x")
    cp = m.charpoly(lam)
    factors = sympy.factor_list(cp.as_expr())[1]
    return m, cp, factors, lam


def eigenbasis_level1(weight: int, trunc: int,
                      primes: tuple[int, ...] = (2, 3, 5, 7, 11, 13),
                      charpoly_primes: tuple[int, ...] = (2, 3)) -> list[EigenData]:
    """Simultaneous T_p eigenforms normalized to a(1) = 1.

    Rational Galois orbits give exact rational coefficient series; larger
    orbits give floating eigen-data flagged irrational.  T_2 separates
    eigenforms at every level-1 weight in desk range (asserted: its
    characteristic polynomial must be squarefree).
    """
    import sympy

    d = dim_cusp_level1(weight)
    if d == 0:
        return []
    if trunc < max(13, 2 * (d + 1)):
        trunc = max(13, 2 * (d + 1))
    basis = cusp_basis(weight, trunc)
    if d == 1:
        f = basis[0]
        eigen = {p: f.series[p] for p in primes if p <= trunc}
        cps = {p: _exact_charpoly_coeffs(weight, p, basis)
               for p in charpoly_primes if p * (d + 1) <= trunc}
        return [EigenData(weight, True, f.series, None, eigen, cps,
                          label=f"w{weight}.0")]

    mat = hecke_matrix(weight, 2, basis=basis)
    m_sym, cp, factors, lam = _charpoly_and_factors(mat)
    if sympy.degree(sympy.gcd(cp.as_expr(), sympy.diff(cp.as_expr(), lam))) > 0:
        raise DiagonalizationError(
            f"T_2 on weight {weight} has repeated eigenvalues")
    cps = {p: _exact_charpoly_coeffs(weight, p, basis)
           for p in charpoly_primes if p * (d + 1) <= trunc}

    out: list[EigenData] = []
    for fac, mult in factors:
        poly = sympy.Poly(fac, lam)
        if poly.degree() == 1:
            root = sympy.Rational(-poly.nth(0), poly.nth(1))
            vecs = (m_sym - root * sympy.eye(d)).nullspace()
            if len(vecs) != 1:
                raise DiagonalizationError("unexpected eigenspace dimension")
            v = vecs[0]
            v = v / v[0]
            combo = None
            for i in range(d):
                ci = Fraction(int(sympy.numer(v[i])), int(sympy.denom(v[i])))
                term = basis[i].series.scale(ci)
                combo = term if combo is None else combo + term
            eigen = {p: combo[p] for p in primes if p <= trunc}
            out.append(EigenData(weight, True, combo, None, eigen, cps))
        else:
            mat_f = np.array([[float(x) for x in row] for row in mat])
            evals, evecs = np.linalg.eig(mat_f)
            roots = [complex(r) for r in poly.all_roots()]
            for r in roots:
                idx = int(np.argmin(np.abs(evals - complex(r))))
                v = np.real(evecs[:, idx])
                v = v / v[0]
                rows = np.array(
                    [np.array(b.series.numerators(), dtype=float)
                     / float(b.series.denominator) for b in basis])
                coeffs = v @ rows
                eigen = {p: float(coeffs[p]) for p in primes if p <= trunc}
                out.append(EigenData(weight, False, None, coeffs, eigen, cps))

    def sort_key(f: EigenData):
        return float(f.eigen[2])

    out.sort(key=sort_key)
    out = [EigenData(f.weight, f.rational, f.series, f.float_coeffs, f.eigen,
                     f.charpolys, label=f"w{weight}.{i}")
           for i, f in enumerate(out)]
    return out


def _exact_charpoly_coeffs(weight: int, p: int,
                           basis: list[IntegralForm]) -> tuple[Fraction, ...]:
    import sympy

    mat = hecke_matrix(weight, p, basis=basis)
    m_sym, cp, _, _ = _charpoly_and_factors(mat)
    return tuple(Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
                 for c in cp.all_coeffs())


def lambda_f(f: EigenData, n: int) -> float:
    """Normalized eigenvalue a_f(n)/n^((2k-1)/2); Deligne-checked at primes."""
    a = f.coefficient(n)
    val = float(a) * math.exp(-0.5 * (f.weight - 1) * math.log(n)) if n > 1 \
        else float(a)
    if is_prime(n) and abs(val) > 2.0 + 1e-9:
        raise VerificationError(
            f"Deligne bound violated at p = {n}: lambda = {val}")
    return val
