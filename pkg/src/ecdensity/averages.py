"""Family averages of coefficient products at prime powers: brute-force
definitions over residue classes, closed forms in terms of Hecke traces,
and exact identities used by the Euler-product module.

Values live in Q * p^{-1/2}: every average of normalized coefficients at a
single prime is a rational times an optional factor p^{-1/2}, and all
identity verification happens in that exact representation.  Floating point only
appears through explicit float() conversions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import arith, hecke

__all__ = [
    "SqrtScaled",
    "SqrtProduct",
    "AverageValue",
    "family1_moment_sums",
    "washington_moment_sums",
    "q_star_bruteforce",
    "q_star_closed",
    "q_rt",
    "q_t_bruteforce",
    "washington_root_count",
    "washington_diagonal_exact",
    "washington_first_moment_exact",
    "washington_second_moment_exact",
    "washington_q20_exact",
    "q_t_identity_check",
    "IdentityReport",
    "C_DIAG",
    "C_MICHEL",
]

# Frozen bound on |p (Q_t(p,p) + 1)| over odd primes.  The exact law
# Q_t(p,p) = -1 + (2 + 2(-3|p))/p + 1/p^2 gives supremum 4 + 1/5.
C_DIAG = 4.25

# Frozen bound on sqrt(p) |Q_t(p,p) + 1| (square-root-decay residual,
# recorded alongside the 1/p law; maximum occurs at p = 7).
C_MICHEL = 1.6


@dataclass(frozen=True)
class SqrtScaled:
    """Exact value frac * p^(-1/2) when half is True, else frac."""

    p: int
    frac: Fraction
    half: bool

    def __float__(self) -> float:
        v = float(self.frac)
        return v / math.sqrt(self.p) if self.half else v

    def is_zero(self) -> bool:
        return self.frac == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SqrtScaled):
            return NotImplemented
        if self.frac == 0 and other.frac == 0:
            return True
        return self.p == other.p and self.frac == other.frac and self.half == other.half

    def __hash__(self) -> int:
        return hash((self.p, self.frac, self.half))

    def __add__(self, other: "SqrtScaled") -> "SqrtScaled":
        if self.frac == 0:
            return other
        if other.frac == 0:
            return self
        if self.p != other.p or self.half != other.half:
            raise ValueError("can only add values at the same prime and parity")
        return SqrtScaled(self.p, self.frac + other.frac, self.half)

    def __neg__(self) -> "SqrtScaled":
        return SqrtScaled(self.p, -self.frac, self.half)

    def __mul__(self, other):
        if isinstance(other, SqrtScaled):
            if self.p != other.p:
                raise ValueError("mixed primes; use SqrtProduct")
            frac = self.frac * other.frac
            if self.half and other.half:
                return SqrtScaled(self.p, frac / self.p, False)
            return SqrtScaled(self.p, frac, self.half or other.half)
        return SqrtScaled(self.p, self.frac * Fraction(other), self.half)

    __rmul__ = __mul__


@dataclass
class SqrtProduct:
    """Exact value frac * prod_p p^(-h_p/2) across several primes."""

    frac: Fraction
    halves: dict[int, int]

    @staticmethod
    def one() -> "SqrtProduct":
        return SqrtProduct(Fraction(1), {})

    @staticmethod
    def zero() -> "SqrtProduct":
        return SqrtProduct(Fraction(0), {})

    def is_zero(self) -> bool:
        return self.frac == 0

    def times_scaled(self, s: SqrtScaled) -> "SqrtProduct":
        if s.frac == 0 or self.frac == 0:
            return SqrtProduct.zero()
        frac = self.frac * s.frac
        halves = dict(self.halves)
        if s.half:
            h = halves.get(s.p, 0) + 1
            if h == 2:
                frac /= s.p
                h = 0
            halves[s.p] = h
        return SqrtProduct(frac, {p: h for p, h in halves.items() if h})

    def times_fraction(self, f: Fraction) -> "SqrtProduct":
        return SqrtProduct(self.frac * f, dict(self.halves))

    def __float__(self) -> float:
        v = float(self.frac)
        for p, h in self.halves.items():
            if h:
                v /= math.sqrt(p)
        return v


@dataclass(frozen=True)
class AverageValue:
    """Average at prime-power exponents (m1, m2) with its exact value."""

    m1_exp: int
    m2_exp: int
    p: int
    value: SqrtScaled


def _bucketed(table: np.ndarray, good: np.ndarray) -> list[tuple[int, bool, int]]:
    """(a_p value, good flag, count) buckets of a residue sweep."""
    t = table.ravel().astype(np.int64)
    g = good.ravel()
    out = []
    for flag in (True, False):
        sel = t[g] if flag else t[~g]
        if sel.size == 0:
            continue
        shift = int(sel.min())
        counts = np.bincount(sel - shift)
        for i, c in enumerate(counts):
            if c:
                out.append((shift + i, flag, int(c)))
    return out


def _moment_sums(buckets: list[tuple[int, bool, int]], p: int, m1max: int) -> tuple:
    """S[m1][m2] = sum over classes of A_{m1} * B_{m2} with
    A_m = p^{m/2} lambda(p^m) (integer Hecke recursion) and
    B_m = p^{m/2} mu(p^m), so B_0 = 1, B_1 = -a_p, B_2 = p * good."""
    S = [[0, 0, 0] for _ in range(m1max + 1)]
    for ap, good, n in buckets:
        b1 = -ap * n
        b2 = n * p if good else 0
        prev, cur = 1, ap
        S[0][0] += n
        S[0][1] += b1
        S[0][2] += b2
        for m in range(1, m1max + 1):
            S[m][0] += cur * n
            S[m][1] += cur * b1
            S[m][2] += cur * b2 if good else 0
            if good:
                prev, cur = cur, ap * cur - p * prev
            else:
                prev, cur = cur, ap * cur
    return tuple(tuple(row) for row in S)


@lru_cache(maxsize=None)
def family1_moment_sums(p: int, m1max: int = 20) -> tuple:
    """Integer sums over all (a, b) mod p for family 1; cost O(p^3) once."""
    if p <= 3:
        raise ValueError("family-1 averages require p > 3")
    if not arith.is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    buckets = _bucketed(arith.family1_trace_table(p), arith.family1_good_table(p))
    return _moment_sums(buckets, p, m1max)


@lru_cache(maxsize=None)
def washington_moment_sums(p: int, m1max: int = 20) -> tuple:
    """Integer sums over t mod p for the one-parameter family; cost O(p^2)."""
    arith._require_odd_prime(p)
    buckets = _bucketed(arith.washington_trace_table(p), arith.washington_good_table(p))
    return _moment_sums(buckets, p, m1max)


def _scaled(S: int, p: int, m1: int, m2: int, denom_power: int) -> SqrtScaled:
    k = m1 + m2
    if k % 2 == 0:
        return SqrtScaled(p, Fraction(S, p ** (denom_power + k // 2)), False)
    return SqrtScaled(p, Fraction(S, p ** (denom_power + (k - 1) // 2)), True)


def q_star_bruteforce(m1_exp: int, m2_exp: int, p: int) -> AverageValue:
    """Family-1 average at (p^m1, p^m2) by the exact double sum over
    residue classes (a, b) mod p."""
    if m2_exp not in (0, 1, 2):
        raise ValueError("m2 exponent must be 0, 1, or 2 (higher powers vanish)")
    if p <= 3:
        raise ValueError("p must exceed 3")
    S = family1_moment_sums(p, 20 if m1_exp <= 20 else m1_exp)[m1_exp][m2_exp]
    return AverageValue(m1_exp, m2_exp, p, _scaled(S, p, m1_exp, m2_exp, 2))


def q_star_closed(m1_exp: int, m2_exp: int, p: int,
                  traces: hecke.TraceTable | None = None) -> AverageValue:
    """Family-1 average at (p^m1, p^m2) by the closed forms in normalized
    Hecke traces; exact, and equal to q_star_bruteforce on its domain."""
    if m2_exp not in (0, 1, 2):
        raise ValueError("m2 exponent must be 0, 1, or 2")
    if p <= 3:
        raise ValueError("p must exceed 3")
    if traces is None:
        traces = hecke.shared_trace_table()
    zero = SqrtScaled(p, Fraction(0), (m1_exp + m2_exp) % 2 == 1)
    if (m1_exp + m2_exp) % 2 == 1:
        return AverageValue(m1_exp, m2_exp, p, zero)

    def tr_term(j: int) -> Fraction:
        # (p-1)/p^{3/2} * Tr*_j(p) as an exact rational (j even)
        tr = traces.trace(j, p)
        return Fraction((p - 1) * tr, p ** (2 + (j - 2) // 2))

    if m2_exp == 0:
        if m1_exp == 0:
            val = SqrtScaled(p, Fraction(1), False)
        else:
            val = SqrtScaled(p, -tr_term(m1_exp + 2), False)
    elif m2_exp == 1:
        if m1_exp == 1:
            val = SqrtScaled(p, Fraction(1 - p, p), False)
        else:
            frac = Fraction(p - 1, p ** (2 + (m1_exp - 1) // 2))
            frac += tr_term(m1_exp + 1) + tr_term(m1_exp + 3)
            val = SqrtScaled(p, frac, False)
    else:
        if m1_exp == 0:
            val = SqrtScaled(p, Fraction(p - 1, p), False)
        else:
            frac = -tr_term(m1_exp + 2) - Fraction(p - 1, p ** (2 + m1_exp // 2))
            val = SqrtScaled(p, frac, False)
    return AverageValue(m1_exp, m2_exp, p, val)


def _lambda3_scaled(r: int, t: int, k: int) -> SqrtScaled:
    """lambda_{r,t}(3^k) exactly; the family-1 congruences force good
    reduction at 3."""
    a3 = arith.frobenius_trace_ab(r, t, 3)
    prev, cur = 1, a3
    if k == 0:
        return SqrtScaled(3, Fraction(1), False)
    for _ in range(k - 1):
        prev, cur = cur, a3 * cur - 3 * prev
    return SqrtScaled(3, Fraction(cur, 3 ** (k // 2)), k % 2 == 1)


def q_rt(m1: int, m2: int, r: int, t: int) -> SqrtProduct:
    """Composite family-1 average at general (m1, m2): the 2,3-part
    contributes fixed-curve coefficients, the coprime part multiplies
    per-prime averages with the (1 - p^-10)^-1 correction at p | m."""
    if m1 < 1 or m2 < 1:
        raise ValueError("m1, m2 must be positive integers")
    if math.gcd(r, 3) != 1 or math.gcd(t, 2) != 1:
        raise ValueError("residues must satisfy gcd(r,3)=1 and gcd(t,2)=1")

    def factorize(n: int) -> dict[int, int]:
        f: dict[int, int] = {}
        d = 2
        while d * d <= n:
            while n % d == 0:
                f[d] = f.get(d, 0) + 1
                n //= d
            d += 1
        if n > 1:
            f[n] = f.get(n, 0) + 1
        return f

    f1, f2 = factorize(m1), factorize(m2)
    out = SqrtProduct.one()
    # 2-part: all coefficient values vanish at 2
    if f1.get(2, 0) >= 1 or f2.get(2, 0) >= 1:
        return SqrtProduct.zero()
    # 3-part
    out = out.times_scaled(_lambda3_scaled(r, t, f1.get(3, 0)))
    k3 = f2.get(3, 0)
    if k3 == 1:
        out = out.times_scaled(-_lambda3_scaled(r, t, 1))
    elif k3 > 2:
        return SqrtProduct.zero()
    # coprime part
    for p in sorted(set(f1) | set(f2)):
        if p <= 3:
            continue
        e2 = f2.get(p, 0)
        if e2 > 2:
            return SqrtProduct.zero()
        e1 = f1.get(p, 0)
        av = q_star_bruteforce(e1, e2, p)
        out = out.times_scaled(av.value)
        out = out.times_fraction(Fraction(p ** 10, p ** 10 - 1))
        if out.is_zero():
            return out
    return out


def q_t_bruteforce(m1_exp: int, m2_exp: int, p: int) -> AverageValue:
    """Family-2 average at (p^m1, p^m2) by the exact sum over t mod p.

    At p = 2 every average with (m1, m2) != (0, 0) vanishes.
    """
    if m2_exp not in (0, 1, 2):
        raise ValueError("m2 exponent must be 0, 1, or 2")
    if p == 2:
        frac = Fraction(1) if (m1_exp, m2_exp) == (0, 0) else Fraction(0)
        return AverageValue(m1_exp, m2_exp, p, SqrtScaled(p, frac, False))
    S = washington_moment_sums(p, 20 if m1_exp <= 20 else m1_exp)[m1_exp][m2_exp]
    return AverageValue(m1_exp, m2_exp, p, _scaled(S, p, m1_exp, m2_exp, 1))


def washington_root_count(p: int) -> int:
    """rho(p) = #{t mod p : p | t^2 + 3t + 9}, which is 0, 1, or 2."""
    arith._require_odd_prime(p)
    return 1 + arith.legendre_symbol(-3, p)


def washington_first_moment_exact(p: int) -> SqrtScaled:
    """Closed form -(1 + chi4(p))/sqrt(p) for the (p, 1) average."""
    return SqrtScaled(p, Fraction(-(1 + arith.chi4(p)), 1), True)


def washington_diagonal_exact(p: int) -> Fraction:
    """Closed form for the (p, p) average:
    -1 + (2 + 2(-3|p))/p + 1/p^2, valid for every odd prime.

    Derived by resolving the degenerate-discriminant locus of the double
    character sum; verified against the brute-force sweep in the tests.
    """
    c = arith.legendre_symbol(-3, p)
    return Fraction(-1) + Fraction(2 + 2 * c, p) + Fraction(1, p * p)


def washington_second_moment_exact(p: int) -> Fraction:
    """Closed form 1 - rho(p)/p for the (1, p^2) average."""
    return Fraction(p - washington_root_count(p), p)


def washington_q20_exact(p: int) -> Fraction:
    """(p^2, 1) average via the exact relation with the diagonal and
    second-moment averages."""
    return -washington_diagonal_exact(p) - washington_second_moment_exact(p)


@dataclass(frozen=True)
class IdentityReport:
    kind: str
    p: int
    passed: bool
    residual: float
    detail: str


def q_t_identity_check(p: int, kind: str) -> IdentityReport:
    """Check one of the family-2 average identities at an odd prime.

    first:        exact equality of the (p,1) average with -(1+chi4(p))/sqrt(p)
    diagonal:     |p (Q(p,p) + 1)| <= C_DIAG
    secondmoment: exact equality of the (1,p^2) average with 1 - rho(p)/p
    """
    arith._require_odd_prime(p)
    if kind == "first":
        brute = q_t_bruteforce(1, 0, p).value
        closed = washington_first_moment_exact(p)
        ok = brute == closed
        res = abs(float(brute) - float(closed))
        return IdentityReport(kind, p, ok, res, f"brute={brute.frac}, closed={closed.frac}")
    if kind == "diagonal":
        brute = q_t_bruteforce(1, 1, p).value
        resid = abs(p * (brute.frac + 1))
        return IdentityReport(kind, p, float(resid) <= C_DIAG, float(resid),
                              f"p(Q+1)={resid}")
    if kind == "secondmoment":
        brute = q_t_bruteforce(0, 2, p).value
        closed = washington_second_moment_exact(p)
        ok = (not brute.half) and brute.frac == closed
        return IdentityReport(kind, p, ok, abs(float(brute.frac - closed)),
                              f"brute={brute.frac}, closed={closed}")
    raise ValueError(f"unknown identity kind {kind!r}")
