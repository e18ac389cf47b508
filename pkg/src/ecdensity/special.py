"""Complex special functions on and near the critical line: Riemann and
Hurwitz zeta with derivatives, the mod-4 Dirichlet L-function, log-gamma,
digamma, and the first two Stieltjes constants.

Everything is float64 Euler-Maclaurin / Stirling with explicit error
estimates.  Regularized combinations (zeta minus its pole, the logarithmic
derivative plus its pole, the reciprocal at reflected argument) are provided
as dedicated functions so that density integrands never subtract poles in
floating point.

Documented regime: |Im s| <= 50, Re s > 0, distance >= 1e-3 from poles
unless a regularized entry point is used.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "ComplexValue",
    "zeta",
    "zeta_pair",
    "zeta_logderiv",
    "hurwitz_zeta",
    "dirichlet_L_chi4",
    "digamma",
    "log_gamma",
    "gamma_ratio",
    "stieltjes",
    "zeta_reg",
    "zeta_reg_pair",
    "zetalog_reg",
    "inv_zeta_reg",
]

# B_{2k} for k = 1..14
_BERN = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
         Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
         Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
         Fraction(-236364091, 2730), Fraction(8553103, 6), Fraction(-23749461029, 870)]


def _fact(n: int) -> int:
    return math.factorial(n)


# B_{2k} / (2k)!
_B_OVER_FACT = [float(b) / _fact(2 * (k + 1)) for k, b in enumerate(_BERN)]
# B_{2k} / (2k (2k-1)) for Stirling series
_B_STIRLING = [float(b) / (2 * (k + 1) * (2 * (k + 1) - 1)) for k, b in enumerate(_BERN)]

_EM_K = 12       # correction terms used by the zeta engine
_DIG_K = 8       # asymptotic terms for digamma / log-gamma


@dataclass(frozen=True)
class ComplexValue:
    """Value with a propagated absolute-error estimate."""

    value: complex
    err: float

    @property
    def re(self) -> float:
        return self.value.real

    @property
    def im(self) -> float:
        return self.value.imag

    def __complex__(self) -> complex:
        return self.value


def _phi(z: complex) -> complex:
    """(1 - e^-z)/z, stable at 0."""
    if abs(z) < 0.75:
        term, total = 1.0 + 0j, 1.0 + 0j
        for n in range(1, 18):
            term *= -z / (n + 1)
            total += term
        return total
    return -(cmath.exp(-z) - 1.0) / z


def _phi_prime(z: complex) -> complex:
    """d/dz of (1 - e^-z)/z, stable at 0."""
    if abs(z) < 0.75:
        # sum_{n>=1} n (-z)^{n-1} / (n+1)!
        total = -0.5 + 0j
        term = -0.5 + 0j
        for n in range(2, 20):
            term *= -z * (n - 1) / (n * (n + 1))
            total += term
        return total
    return (cmath.exp(-z) * (1 + z) - 1) / (z * z)


def _em_nodes(s: complex) -> int:
    return 24 + int(1.4 * abs(s.imag))


def _hurwitz_em(s: complex, a: float, want_deriv: bool) -> tuple[complex, complex, float]:
    """Euler-Maclaurin Hurwitz zeta(s, a) (and s-derivative), with error est.

    Requires s != 1; the caller handles pole proximity.
    """
    M = _em_nodes(s)
    z = 0j
    dz = 0j
    for n in range(M):
        ln = math.log(n + a)
        t = cmath.exp(-s * ln)
        z += t
        if want_deriv:
            dz -= ln * t
    x = M + a
    lnx = math.log(x)
    xs = cmath.exp(-s * lnx)          # x^-s
    # boundary: x^{1-s}/(s-1) + x^-s/2
    bnd = x * xs / (s - 1)
    z += bnd + xs / 2
    if want_deriv:
        dz += -lnx * bnd - bnd / (s - 1) - lnx * xs / 2
    # Bernoulli corrections: sum_k B_2k/(2k)! poch(s, 2k-1) x^{-s-2k+1}
    poch = s                      # poch(s, 1)
    hsum = 1 / s                  # sum 1/(s+i), i < 2k-1
    xpow = xs / x                 # x^{-s-1}
    last = 0.0
    for k in range(1, _EM_K + 1):
        if k > 1:
            poch *= (s + 2 * k - 3) * (s + 2 * k - 2)
            hsum += 1 / (s + 2 * k - 3) + 1 / (s + 2 * k - 2)
            xpow /= x * x
        term = _B_OVER_FACT[k - 1] * poch * xpow  # xpow is x^{-s-2k+1}
        z += term
        if want_deriv:
            dz += term * (hsum - lnx)
        last = abs(term)
    # error: next correction at half the node count, with safety margin
    xh = M // 2 + a
    scale = (x / xh) ** (abs(s.real) + 2 * _EM_K + 1)
    err = 20.0 * last * scale + 3e-16 * (M + abs(z))
    return z, dz, err


def hurwitz_zeta(s: complex, a: float) -> ComplexValue:
    """Hurwitz zeta for 0 < a <= 1, Re s > 0, s away from 1."""
    s = complex(s)
    if abs(s - 1) < 1e-3:
        raise ValueError("argument within 1e-3 of the pole at s = 1")
    z, _, err = _hurwitz_em(s, a, False)
    return ComplexValue(z, err)


def zeta_reg_pair(w: complex) -> tuple[complex, complex, float]:
    """R(w) = zeta(1+w) - 1/w and R'(w), stable for all |w| < 1.

    The pole is removed analytically inside the Euler-Maclaurin boundary
    term, so w = 0 is a regular point (R(0) is Euler's constant).
    """
    w = complex(w)
    M = _em_nodes(w) + 1
    lnM = math.log(M)
    r = 0j
    dr = 0j
    for m in range(1, M):
        ln = math.log(m)
        t = cmath.exp(-(1 + w) * ln)
        r += t
        dr -= ln * t
    zar = w * lnM
    r += -lnM * _phi(zar)
    dr += -lnM * lnM * _phi_prime(zar)
    Ms = cmath.exp(-(1 + w) * lnM)    # M^{-1-w}
    r += Ms / 2
    dr += -lnM * Ms / 2
    s = 1 + w
    poch = s
    hsum = 1 / s
    xpow = Ms / M                     # M^{-s-1}
    last = 0.0
    for k in range(1, _EM_K + 1):
        if k > 1:
            poch *= (s + 2 * k - 3) * (s + 2 * k - 2)
            hsum += 1 / (s + 2 * k - 3) + 1 / (s + 2 * k - 2)
            xpow /= M * M
        term = _B_OVER_FACT[k - 1] * poch * xpow  # xpow is M^{-s-2k+1}
        r += term
        dr += term * (hsum - lnM)
        last = abs(term)
    err = 20.0 * last * 2.0 ** (2 * _EM_K + 1) + 3e-16 * (M + abs(r))
    return r, dr, err


def zeta_reg(w: complex) -> ComplexValue:
    """zeta(1+w) - 1/w, regular at w = 0 where it equals Euler's constant."""
    r, _, err = zeta_reg_pair(w)
    return ComplexValue(r, err)


def zetalog_reg(w: complex) -> ComplexValue:
    """zeta'/zeta(1+w) + 1/w, regular at w = 0 where it equals Euler's
    constant.  Computed as (R + w R')/(1 + w R) from the regularized pair."""
    r, dr, err = zeta_reg_pair(w)
    den = 1 + w * r
    val = (r + w * dr) / den
    return ComplexValue(val, (err * (1 + abs(w) * (1 + abs(val)))) / abs(den) + 1e-15)


def inv_zeta_reg(w: complex) -> ComplexValue:
    """-1/(w zeta(1-w)), regular at w = 0 with value 1.

    This is the analytic factor left after extracting the sign-flipped pole
    of the reflected zeta value; equals 1/(1 - w R(-w))."""
    r, _, err = zeta_reg_pair(-w)
    den = 1 - w * r
    val = 1 / den
    return ComplexValue(val, err * abs(w) * abs(val) ** 2 + 1e-16)


def zeta_pair(s: complex) -> tuple[ComplexValue, ComplexValue]:
    """(zeta(s), zeta'(s)) by term-wise differentiated Euler-Maclaurin."""
    s = complex(s)
    if abs(s - 1) < 1e-3:
        raise ValueError("argument within 1e-3 of the pole at s = 1")
    if abs(s - 1) < 0.5:
        w = s - 1
        r, dr, err = zeta_reg_pair(w)
        return (ComplexValue(1 / w + r, err + 1e-16 * abs(1 / w)),
                ComplexValue(-1 / (w * w) + dr, err + 1e-16 * abs(1 / (w * w))))
    z, dz, err = _hurwitz_em(s, 1.0, True)
    return ComplexValue(z, err), ComplexValue(dz, err * (1 + math.log(_em_nodes(s) + 1)))


def zeta(s: complex) -> ComplexValue:
    """Riemann zeta for Re s > 0, away from the pole at 1."""
    return zeta_pair(s)[0]


def zeta_logderiv(s: complex) -> ComplexValue:
    """zeta'(s)/zeta(s); the caller keeps s away from zeros of zeta."""
    s = complex(s)
    if abs(s - 1) < 0.5:
        if abs(s - 1) < 1e-3:
            raise ValueError("argument within 1e-3 of the pole at s = 1")
        w = s - 1
        cv = zetalog_reg(w)
        return ComplexValue(cv.value - 1 / w, cv.err)
    z, dz = zeta_pair(s)
    val = dz.value / z.value
    return ComplexValue(val, (dz.err + abs(val) * z.err) / abs(z.value))


def dirichlet_L_chi4(s: complex) -> ComplexValue:
    """L-function of the non-principal character mod 4, entire, Re s > 0.

    Evaluated as 4^-s (zeta(s, 1/4) - zeta(s, 3/4)) with the two
    Euler-Maclaurin boundary terms combined so the poles cancel exactly.
    """
    s = complex(s)
    M = _em_nodes(s)
    total = 0j
    for n in range(M):
        total += cmath.exp(-s * math.log(n + 0.25)) - cmath.exp(-s * math.log(n + 0.75))
    x1, x2 = M + 0.25, M + 0.75
    # [x1^{1-s} - x2^{1-s}]/(s-1) = -x2^{1-s} ln(x1/x2) phi((s-1) ln(x1/x2))
    lnr = math.log(x1 / x2)
    x2p = cmath.exp((1 - s) * math.log(x2))
    total += -x2p * lnr * _phi((s - 1) * lnr)
    err_terms = 0.0
    last = 0.0
    for x in (x1, x2):
        sign = 1.0 if x == x1 else -1.0
        lnx = math.log(x)
        xs = cmath.exp(-s * lnx)
        total += sign * xs / 2
        poch = s
        xpow = xs / x
        for k in range(1, _EM_K + 1):
            if k > 1:
                poch *= (s + 2 * k - 3) * (s + 2 * k - 2)
                xpow /= x * x
            term = _B_OVER_FACT[k - 1] * poch * xpow
            total += sign * term
            last = abs(term)
        err_terms += 20.0 * last * 2.0 ** (2 * _EM_K + 1)
    val = cmath.exp(-s * math.log(4)) * total
    scale4 = abs(cmath.exp(-s * math.log(4)))
    return ComplexValue(val, err_terms * scale4 + 4e-16 * scale4 * (M + abs(total)) + 2e-15 * (abs(val) + 1))


def _shift_count(s: complex) -> int:
    target = 12.0
    m = int(max(0.0, target - s.real)) + 1
    return m


def digamma(s: complex) -> ComplexValue:
    """Digamma for Re s > 0: recurrence shift then the asymptotic series."""
    s = complex(s)
    if s.real <= 0 and s.imag == 0 and s.real == int(s.real):
        raise ValueError("digamma pole at non-positive integer")
    m = _shift_count(s)
    shift = 0j
    for k in range(m):
        shift += 1 / (s + k)
    w = s + m
    inv2 = 1 / (w * w)
    val = cmath.log(w) - 1 / (2 * w)
    term_mag = 0.0
    invp = inv2
    for k in range(1, _DIG_K + 1):
        term = float(_BERN[k - 1]) / (2 * k) * invp
        val -= term
        term_mag = abs(term)
        invp *= inv2
    val -= shift
    return ComplexValue(val, 4.0 * term_mag + 4e-15 * (abs(val) + 1))


def log_gamma(s: complex) -> ComplexValue:
    """Principal log-gamma for Re s > 0, continuous on the half-plane."""
    s = complex(s)
    m = _shift_count(s)
    shift = 0j
    for k in range(m):
        shift += cmath.log(s + k)
    w = s + m
    lnw = cmath.log(w)
    val = (w - 0.5) * lnw - w + 0.5 * math.log(2 * math.pi)
    invp = 1 / w
    inv2 = invp * invp
    term_mag = 0.0
    for k in range(1, _DIG_K + 1):
        term = _B_STIRLING[k - 1] * invp
        val += term
        term_mag = abs(term)
        invp *= inv2
    val -= shift
    return ComplexValue(val, 4.0 * term_mag + 6e-15 * (abs(val) + 1))


def gamma_ratio(a: complex, b: complex) -> ComplexValue:
    """Gamma(a)/Gamma(b) via log-gamma differences, Re a, Re b > 0."""
    la, lb = log_gamma(a), log_gamma(b)
    val = cmath.exp(la.value - lb.value)
    return ComplexValue(val, abs(val) * (la.err + lb.err) + 1e-16 * abs(val))


@lru_cache(maxsize=None)
def stieltjes(n: int) -> float:
    """Stieltjes constants gamma_0, gamma_1 from the regularized zeta pair
    (Euler-Maclaurin limit evaluation); n >= 2 unsupported."""
    if n not in (0, 1):
        raise ValueError("only the first two Stieltjes constants are provided")
    r, dr, _ = zeta_reg_pair(0j)
    return r.real if n == 0 else -dr.real
