"""Chebyshev-polynomial algebra, Hurwitz class numbers and normalized
Hecke traces on level-1 cusp forms, computed by three independent routes:

* the Eichler-Selberg trace formula in exact rational arithmetic,
* the q-expansion of the discriminant cusp form (weight 12 only),
* inversion of brute-force curve averages (see the averages module).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import arith

__all__ = [
    "chebyshev_U",
    "linearization_coeffs",
    "ChebCoeffs",
    "lambda_prime_power",
    "hurwitz_class_number",
    "hurwitz_table6",
    "cusp_form_dimension",
    "trace_hecke_selberg",
    "tau_oracle",
    "trace_from_moments",
    "trace_from_moments_star",
    "TraceTable",
]


def chebyshev_U(n: int, x: float) -> float:
    """Second-kind Chebyshev value U_n(x) by the three-term recursion."""
    if n < 0:
        raise ValueError("n must be non-negative")
    u0, u1 = 1.0, 2.0 * x
    if n == 0:
        return u0
    for _ in range(n - 1):
        u0, u1 = u1, 2.0 * x * u1 - u0
    return u1


@dataclass(frozen=True)
class ChebCoeffs:
    """Integer coefficients c_l with U_{m1} U_{m2} = sum_l c_l U_l."""

    m1: int
    m2: int
    coeffs: dict[int, int] = field(hash=False)

    def __getitem__(self, ell: int) -> int:
        return self.coeffs.get(ell, 0)


def _u_poly(n: int) -> list[int]:
    """Coefficient list (ascending powers) of U_n."""
    u0, u1 = [1], [0, 2]
    if n == 0:
        return u0
    for _ in range(n - 1):
        nxt = [0] + [2 * c for c in u1]
        for i, c in enumerate(u0):
            nxt[i] -= c
        u0, u1 = u1, nxt
    return u1


def linearization_coeffs(m1: int, m2: int) -> ChebCoeffs:
    """Exact expansion of U_{m1} U_{m2} in the U-basis.

    Done by polynomial multiplication followed by a change of basis,
    peeling the top degree (lead coefficient of U_d is 2^d).
    """
    p1, p2 = _u_poly(m1), _u_poly(m2)
    prod = [0] * (m1 + m2 + 1)
    for i, c1 in enumerate(p1):
        if c1:
            for j, c2 in enumerate(p2):
                if c2:
                    prod[i + j] += c1 * c2
    coeffs: dict[int, int] = {}
    for d in range(m1 + m2, -1, -1):
        lead = prod[d]
        if lead == 0:
            continue
        c, rem = divmod(lead, 2 ** d)
        if rem:
            raise ArithmeticError("non-integral linearization coefficient")
        coeffs[d] = c
        for i, uc in enumerate(_u_poly(d)):
            prod[i] -= c * uc
    if any(prod):
        raise ArithmeticError("basis change left a remainder")
    return ChebCoeffs(m1=m1, m2=m2, coeffs=coeffs)


def lambda_prime_power(lambda_p: float, j: int, good: bool) -> float:
    """Coefficient at the j-th power of a prime: U_j(lambda_p/2) at good
    primes, lambda_p^j at bad ones."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if good:
        return chebyshev_U(j, lambda_p / 2.0)
    return lambda_p ** j


@lru_cache(maxsize=None)
def hurwitz_table6(nmax: int) -> tuple[int, ...]:
    """6*H(N) for 0 <= N <= nmax, by a sieve over reduced positive binary
    quadratic forms.  Forms (a,0,a) weigh 1/2 and (a,a,a) weigh 1/3;
    6*H(0) = -1/2 is kept as the rational -1/12 by the caller."""
    table = [0] * (nmax + 1)
    a = 1
    while 3 * a * a <= nmax:  # N = 4ac - b^2 >= 3a^2 for any reduced form
        for b in range(0, a + 1):
            c = a
            while True:
                n = 4 * a * c - b * b
                if n > nmax:
                    break
                if n > 0:
                    if b == 0:
                        w = 3 if a == c else 6
                    elif b == a:
                        w = 2 if a == c else 6
                    elif a == c:
                        w = 6
                    else:
                        w = 12
                    table[n] += w
                c += 1
        a += 1
    return tuple(table)


def hurwitz_class_number(n: int) -> Fraction:
    """Hurwitz class number H(n); H(0) = -1/12; n = 1, 2 mod 4 rejected."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(-1, 12)
    if n % 4 in (1, 2):
        raise ValueError("H(n) requires n = 0 or 3 mod 4")
    return Fraction(hurwitz_table6(n)[n], 6)


def cusp_form_dimension(j: int) -> int:
    """dim of weight-j level-1 cusp forms (j even)."""
    if j % 2 or j < 0:
        raise ValueError("weight must be even and non-negative")
    if j < 12:
        return 0
    return j // 12 - 1 if j % 12 == 2 else j // 12


def _gegenbauer(j: int, t: int, n: int) -> int:
    """P_j(t, n): the degree-(j-2) kernel of the elliptic term, integer.

    Satisfies C_0 = 1, C_1 = t, C_m = t C_{m-1} - n C_{m-2}; P_j = C_{j-2}.
    """
    c0, c1 = 1, t
    if j == 2:
        return c0
    for _ in range(j - 3):
        c0, c1 = c1, t * c1 - n * c0
    return c1


def trace_hecke_selberg(j: int, p: int) -> int:
    """Trace of the p-th Hecke operator on level-1 weight-j cusp forms.

    Elliptic term over t^2 < 4p with Hurwitz class numbers, hyperbolic term
    -1 for prime index, and the sigma correction at weight 2.  Exact.
    """
    if j % 2 or j < 2:
        raise ValueError("weight must be even and >= 2")
    if not arith.is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    table = hurwitz_table6(4 * p)
    six_elliptic = 0
    t = 0
    while t * t < 4 * p:
        term = _gegenbauer(j, t, p) * table[4 * p - t * t]
        six_elliptic += term if t == 0 else 2 * term
        t += 1
    tr = Fraction(-six_elliptic, 12) - 1
    if j == 2:
        tr += p + 1
    if tr.denominator != 1:
        raise ArithmeticError("trace came out non-integral")
    return int(tr)


def tau_oracle(n_max: int) -> dict[int, int]:
    """Coefficients of q prod_{n>=1} (1 - q^n)^24 up to q^n_max, exact.

    Independent oracle for the weight-12 traces at prime index.
    """
    if n_max > 10 ** 4:
        raise ValueError("n_max above 10^4 is not supported")
    coeff = [0] * (n_max + 1)
    if n_max >= 1:
        coeff[1] = 1
    # pentagonal-number expansion of prod (1 - q^n), applied 24 times
    pents: list[tuple[int, int]] = []
    m = 1
    while True:
        e1, e2 = m * (3 * m - 1) // 2, m * (3 * m + 1) // 2
        if e1 > n_max and e2 > n_max:
            break
        s = -1 if m % 2 else 1
        if e1 <= n_max:
            pents.append((e1, s))
        if e2 <= n_max:
            pents.append((e2, s))
        m += 1
    for _ in range(24):
        new = coeff[:]
        for e, s in pents:
            for i in range(n_max, e - 1, -1):
                c = coeff[i - e]
                if c:
                    new[i] += s * c
        coeff = new
    return {n: coeff[n] for n in range(1, n_max + 1)}


def trace_from_moments(j: int, p: int) -> int:
    """Weight-j trace at prime p recovered from the brute-force curve
    average over y^2 = x^3 + ax + b mod p.

    The average of the (j-2)-nd Hecke power over all residue classes equals
    -(p-1)/p^2 * p^{-(j-2)/2} * Tr_j(p) scaled, which inverts to the exact
    integer identity Tr_j(p) = -S/(p-1) with S the integer moment sum.
    """
    if j % 2 or j < 4:
        raise ValueError("weight must be even and >= 4")
    if p <= 3:
        raise ValueError("moment inversion requires p > 3")
    if not arith.is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    from . import averages

    m1 = j - 2
    s = averages.family1_moment_sums(p, m1)[m1][0]
    tr, rem = divmod(-s, p - 1)
    if rem:
        raise ArithmeticError("moment sum not divisible by p - 1")
    return tr


def trace_from_moments_star(j: int, p: int) -> float:
    """Normalized trace p^{(1-j)/2} Tr_j(p) from the moment route."""
    tr = trace_from_moments(j, p)
    return tr / p ** ((j - 2) // 2) / math.sqrt(p)


class TraceTable:
    """Write-once cache of exact traces with float normalized accessors.

    Populated lazily; precompute() fills a (j <= j_max, p <= p_max) block.
    """

    def __init__(self) -> None:
        self._tr: dict[tuple[int, int], int] = {}
        self._star: dict[tuple[int, int], float] = {}

    def trace(self, j: int, p: int) -> int:
        key = (j, p)
        if key not in self._tr:
            self._tr[key] = trace_hecke_selberg(j, p)
        return self._tr[key]

    def trace_star(self, j: int, p: int) -> float:
        """Normalized trace p^{(1-j)/2} Tr_j(p) as a float."""
        key = (j, p)
        if key not in self._star:
            tr = self.trace(j, p)
            self._star[key] = tr / p ** ((j - 2) // 2) / math.sqrt(p) if tr else 0.0
        return self._star[key]

    def trace_star_exact(self, j: int, p: int) -> tuple[Fraction, int]:
        """Normalized trace as (rational, 1) meaning rational * p^{-1/2}."""
        return Fraction(self.trace(j, p), p ** ((j - 2) // 2)), 1

    def precompute(self, j_max: int = 30, p_max: int = 600) -> "TraceTable":
        hurwitz_table6(4 * p_max)
        for p in arith.sieve_primes(p_max):
            for j in range(2, j_max + 1, 2):
                self.trace(j, p)
        return self

    def write_csv(self, path: str) -> None:
        """Audit dump: one row (j, p, numerator, denominator) per entry."""
        rows = sorted(self._tr.items())
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "p", "trace_numerator", "trace_denominator"])
            for (j, p), tr in rows:
                w.writerow([j, p, tr, 1])


_shared_table: TraceTable | None = None


def shared_trace_table() -> TraceTable:
    """Process-wide trace cache used by the Euler-product module."""
    global _shared_table
    if _shared_table is None:
        _shared_table = TraceTable()
    return _shared_table
