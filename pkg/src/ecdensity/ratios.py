"""Truncated Euler products for the arithmetic factors of the two families,
their zeta-ratio prefactors, and diagonal derivatives.

Renormalization convention: every local factor is divided by the local parts
of the zeta-ratio prefactor of its family, so the remaining product consists
of (1 + O(p^-2))-type terms and converges absolutely on Re > -1/4.  For the
one-parameter family the split of the chi4-weighted terms follows the
quadratic field Q(i): the local factors of zeta(1+x)L(1+x, chi4) are divided
out per prime and the global ratio L(1+gamma,chi4)/L(1+alpha,chi4) is
restored from the special-function module.

Exponent expressions are built with a fixed left-associated pattern so that
on the diagonal alpha = gamma the paired powers are bitwise identical and
every renormalized factor evaluates to 1 up to a final rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import arith, averages, hecke

__all__ = [
    "ComplexShift",
    "EulerProductValue",
    "EulerConfig",
    "euler_factor_family1",
    "euler_factor_23",
    "euler_factor_family2",
    "A_family1",
    "A_family2",
    "Y_family1",
    "Y_family2",
    "A_alpha_derivative",
    "DerivativeValue",
    "a_values_batch",
    "prime_square_tail",
]

_DOMAIN_EDGE = -0.25


@dataclass(frozen=True)
class ComplexShift:
    """Shift pair (alpha, gamma) inside the holomorphy domain Re > -1/4."""

    alpha: complex
    gamma: complex

    def __post_init__(self):
        if self.alpha.real <= _DOMAIN_EDGE or self.gamma.real <= _DOMAIN_EDGE:
            raise ValueError("shift outside the domain Re > -1/4")

    @staticmethod
    def diagonal(r: complex) -> "ComplexShift":
        return ComplexShift(complex(r), complex(r))


@dataclass(frozen=True)
class EulerProductValue:
    """Truncated product value with truncation metadata and tail estimate."""

    value: complex
    prime_cutoff: int
    series_order: int
    tail_bound: float


@dataclass(frozen=True)
class EulerConfig:
    """Truncation parameters for the Euler products.

    prime_cutoff: largest prime in the product.
    series_order: largest coefficient power entering the trace sums (>= 10).
    exact_cutoff: family-2 primes up to this bound use the full residue
        sweep; beyond it the exact low-order aggregates are used and the
        dropped higher terms are folded into the tail bound.
    trace_pmax: primes above this bound skip the trace sum entirely, with
        the skipped mass added to the tail bound (it is below 1e-13 for
        every shift the density pipeline uses).
    """

    prime_cutoff: int = 10_000
    series_order: int = 14
    exact_cutoff: int | None = None
    trace_pmax: int = 600

    def resolved_exact_cutoff(self) -> int:
        if self.exact_cutoff is not None:
            return min(self.exact_cutoff, self.prime_cutoff)
        return min(max(2000, self.prime_cutoff // 5), self.prime_cutoff)

    def __post_init__(self):
        if self.series_order < 10:
            raise ValueError("series order below 10 drops the entire trace range")


DEFAULT_CONFIG = EulerConfig()


def prime_square_tail(z: float) -> float:
    """Safe overestimate of sum_{p > z} p^-2."""
    if z < 2:
        return 0.46
    lz = math.log(z)
    return 1.15 / (z * lz) * (1 + 1 / lz + 2 / lz ** 2)


def _zl(lnp: float, e: complex) -> complex:
    """Local zeta factor 1 - p^-e."""
    return 1.0 - cmath.exp(-e * lnp)


def euler_factor_family1(p: int, shift: ComplexShift,
                         traces: hecke.TraceTable | None = None,
                         M: int = 14) -> complex:
    """Renormalized family-1 local factor for p > 3: the closed-form bracket
    in normalized Hecke traces, divided by the local parts of
    zeta(1+2 gamma)/zeta(1+alpha+gamma).  Equals 1 on the diagonal."""
    if p <= 3:
        raise ValueError("closed-form factor applies to p > 3 only")
    if M < 10:
        raise ValueError("series order below 10 drops the entire trace range")
    if traces is None:
        traces = hecke.shared_trace_table()
    a, g = shift.alpha, shift.gamma
    lnp = math.log(p)
    w = 1.0 - (p ** 9 - 1) / (p ** 10 - 1)
    u = cmath.exp(-(1.0 + g + g) * lnp)
    v = cmath.exp(-(1.0 + a + g) * lnp)
    mid = ((cmath.exp(-(2.0 + a + g) * lnp) - cmath.exp(-(2.0 + g + g) * lnp))
           / (cmath.exp((2.0 + a + a) * lnp) - 1.0))
    prefnum = (cmath.exp((1.0 + a + a + g) * lnp) - cmath.exp((1.0 + a + g + g) * lnp)
               + cmath.exp(g * lnp) - cmath.exp(a * lnp))
    pref = prefnum * cmath.exp(-(1.5 + a + g + g) * lnp)
    ts = 0.0 + 0j
    xs = cmath.exp(-(0.5 + a) * lnp)
    for m1 in range(10, M + 1, 2):
        tr = traces.trace_star(m1 + 2, p)
        if tr:
            ts += tr * xs ** m1
    bracket = 1.0 + w * (u - v + mid + pref * ts)
    return bracket * (1.0 - u) / (1.0 - v)


def euler_factor_23(p: int, shift: ComplexShift, r: int = 1, t: int = 1) -> complex:
    """Raw family-1 local factor at p = 2 or 3 (no renormalization).

    At 2 all coefficient values vanish, so the factor is 1.  At 3 the
    congruence conditions force good reduction, so the factor is the exact
    ratio of the two local L-factor polynomials; it is 1 on the diagonal.
    """
    if p == 2:
        return 1.0 + 0j
    if p != 3:
        raise ValueError("this entry point covers p = 2 and 3 only")
    a3 = arith.frobenius_trace_ab(r, t, 3)
    lam = a3 / math.sqrt(3)
    lnp = math.log(3)
    x = cmath.exp(-(0.5 + shift.alpha) * lnp)
    y = cmath.exp(-(0.5 + shift.gamma) * lnp)
    return (1.0 - lam * y + y * y) / (1.0 - lam * x + x * x)


@lru_cache(maxsize=None)
def _washington_lambda(p: int) -> tuple[np.ndarray, np.ndarray]:
    lam = arith.washington_trace_table(p).astype(np.float64) / math.sqrt(p)
    psi = arith.washington_good_table(p).astype(np.float64)
    return lam, psi


def _family2_renorm(p: int, a: complex, g: complex) -> complex:
    lnp = math.log(p)
    c4 = arith.chi4(p)
    num = _zl(lnp, 1.0 + g + g) * _zl(lnp, 1.0 + g)
    den = _zl(lnp, 1.0 + a + g) * _zl(lnp, 1.0 + a)
    if c4:
        num *= 1.0 - c4 * cmath.exp(-(1.0 + g) * lnp)
        den *= 1.0 - c4 * cmath.exp(-(1.0 + a) * lnp)
    return num / den


def euler_factor_family2(p: int, shift: ComplexShift,
                         cfg: EulerConfig | None = None) -> complex:
    """Renormalized family-2 local factor; equals 1 on the diagonal.

    Up to cfg.exact_cutoff the coefficient sums are evaluated per residue
    class with the full local L-factor ratio (no series truncation).
    Beyond it the exact aggregates at total power <= 2 are used: the closed
    first moment, the exact diagonal second-moment law, the singular-fiber
    count, and the three-term cancellation identity fixing the (2,0) term.
    """
    cfg = cfg or DEFAULT_CONFIG
    a, g = shift.alpha, shift.gamma
    if p == 2:
        return _family2_renorm(2, a, g)
    lnp = math.log(p)
    x = cmath.exp(-(0.5 + a) * lnp)
    y = cmath.exp(-(0.5 + g) * lnp)
    if p <= cfg.resolved_exact_cutoff():
        lam, psi = _washington_lambda(p)
        E = np.mean((1.0 - lam * y + psi * (y * y)) / (1.0 - lam * x + psi * (x * x)))
    else:
        c4 = arith.chi4(p)
        sq = math.sqrt(p)
        q10 = -(1 + c4) / sq
        q01 = (1 + c4) / sq
        qdiag = float(averages.washington_diagonal_exact(p))
        q02 = float(averages.washington_second_moment_exact(p))
        q20 = -qdiag - q02
        E = 1.0 + q10 * x + q01 * y + q20 * (x * x) + qdiag * (x * y) + q02 * (y * y)
    return complex(E) * _family2_renorm(p, a, g)


def _family1_tail(P: int, fit_c: float, skipped: float) -> float:
    return fit_c * prime_square_tail(P) + skipped + 1e-13


def A_family1(shift: ComplexShift, P: int | None = None, M: int | None = None,
              r: int = 1, t: int = 1,
              traces: hecke.TraceTable | None = None,
              cfg: EulerConfig | None = None) -> EulerProductValue:
    """Truncated arithmetic factor of family 1 at the given shift."""
    cfg = cfg or DEFAULT_CONFIG
    P = P if P is not None else cfg.prime_cutoff
    M = M if M is not None else cfg.series_order
    if M < 10:
        raise ValueError("series order below 10 drops the entire trace range")
    if traces is None:
        traces = hecke.shared_trace_table()
    a, g = shift.alpha, shift.gamma
    ln2, ln3 = math.log(2), math.log(3)
    value = euler_factor_23(2, shift) * _zl(ln2, 1.0 + g + g) / _zl(ln2, 1.0 + a + g)
    value *= euler_factor_23(3, shift, r, t) * _zl(ln3, 1.0 + g + g) / _zl(ln3, 1.0 + a + g)
    fit_c = 0.0
    skipped = 0.0
    re_a = shift.alpha.real
    for p in arith.sieve_primes(P):
        if p <= 3:
            continue
        if p <= cfg.trace_pmax:
            f = euler_factor_family1(p, shift, traces, M)
            # bound on the dropped weights above M
            xb = p ** (-(0.5 + re_a))
            skipped += 4.0 * xb ** (M + 2) * ((M + 14) / 12.0) / (1.0 - xb * xb) ** 2
        else:
            f = euler_factor_family1(p, shift, _EMPTY_TRACES, 10)
            xb = p ** (-(0.5 + re_a))
            skipped += 6.0 * xb ** 10 / (1.0 - xb * xb) ** 2
        value *= f
        if p > P // 2:
            fit_c = max(fit_c, abs(f - 1.0) * p * p)
    return EulerProductValue(value, P, M, _family1_tail(P, fit_c, skipped))


class _EmptyTraces:
    """Trace source reporting every trace as zero (large-p fast path)."""

    def trace_star(self, j: int, p: int) -> float:
        return 0.0


_EMPTY_TRACES = _EmptyTraces()


def A_family2(shift: ComplexShift, P: int | None = None, M: int | None = None,
              cfg: EulerConfig | None = None) -> EulerProductValue:
    """Truncated arithmetic factor of family 2 at the given shift.

    tail_bound covers the dropped total-power >= 3 aggregates beyond the
    exact window as well as the primes beyond the cutoff, both through the
    measured quadratic-decay envelope.
    """
    from . import special

    cfg = cfg or DEFAULT_CONFIG
    P = P if P is not None else cfg.prime_cutoff
    if M is not None and M < 10:
        raise ValueError("series order below 10 drops the entire trace range")
    M = M if M is not None else cfg.series_order
    cfg = EulerConfig(prime_cutoff=P, series_order=M, exact_cutoff=cfg.exact_cutoff,
                      trace_pmax=cfg.trace_pmax)
    a, g = shift.alpha, shift.gamma
    lnum = special.dirichlet_L_chi4(1.0 + g)
    lden = special.dirichlet_L_chi4(1.0 + a)
    value = lnum.value / lden.value
    cutoff = cfg.resolved_exact_cutoff()
    fit_c = 0.0
    for p in arith.sieve_primes(P):
        f = euler_factor_family2(p, shift, cfg)
        value *= f
        if cutoff // 2 < p <= cutoff:
            fit_c = max(fit_c, abs(f - 1.0) * p * p)
    # in (cutoff, P] only the dropped high-order aggregates err; beyond P the
    # whole factor is missing; both follow the measured quadratic envelope
    drop_c = _family2_drop_constant(cutoff, shift, cfg)
    tail = (drop_c * max(prime_square_tail(cutoff) - prime_square_tail(P), 0.0)
            + max(fit_c, drop_c) * prime_square_tail(P) + 1e-13)
    return EulerProductValue(value, P, M, tail)


def _family2_drop_constant(cutoff: int, shift: ComplexShift, cfg: EulerConfig) -> float:
    """p^2-envelope of the difference between the exact and aggregate local
    factors, measured at the top of the exact window."""
    probes = [p for p in arith.sieve_primes(cutoff) if p > cutoff * 3 // 4][-12:]
    semi_cfg = EulerConfig(prime_cutoff=cfg.prime_cutoff, series_order=cfg.series_order,
                           exact_cutoff=2, trace_pmax=cfg.trace_pmax)
    c = 0.0
    for p in probes:
        fe = euler_factor_family2(p, shift, cfg)
        fs = euler_factor_family2(p, shift, semi_cfg)
        c = max(c, abs(fe - fs) * p * p)
    return c


def Y_family1(shift: ComplexShift) -> complex:
    """zeta(1+2 gamma)/zeta(1+alpha+gamma)."""
    from . import special

    a, g = shift.alpha, shift.gamma
    if abs(g) <= 5e-4 or abs(a + g) <= 1e-3:
        raise ValueError("shift within 1e-3 of a zeta pole")
    return special.zeta(1.0 + g + g).value / special.zeta(1.0 + a + g).value


def Y_family2(shift: ComplexShift) -> complex:
    """zeta(1+2g) zeta(1+g) / (zeta(1+a+g) zeta(1+a))."""
    from . import special

    a, g = shift.alpha, shift.gamma
    if abs(g) <= 5e-4 or abs(a) <= 5e-4 or abs(a + g) <= 5e-4:
        raise ValueError("shift within 1e-3 of a zeta pole")
    return (special.zeta(1.0 + g + g).value * special.zeta(1.0 + g).value
            / (special.zeta(1.0 + a + g).value * special.zeta(1.0 + a).value))


@dataclass(frozen=True)
class DerivativeValue:
    value: complex
    err: float
    converged: bool


def _a_eval(family: int, alpha: complex, gamma: complex,
            cfg: EulerConfig, r: int, t: int) -> complex:
    shift = ComplexShift(alpha, gamma)
    if family == 1:
        return A_family1(shift, cfg=cfg, r=r, t=t).value
    return A_family2(shift, cfg=cfg).value


def A_alpha_derivative(family: int, r_point: complex,
                       P: int | None = None, M: int | None = None,
                       which: str = "alpha",
                       h_ladder: tuple[float, ...] = (1e-3, 5e-4, 2.5e-4),
                       cfg: EulerConfig | None = None,
                       r: int = 1, t: int = 1) -> DerivativeValue:
    """Partial derivative of the arithmetic factor on the diagonal at
    r_point, by central differences with Richardson extrapolation on the
    step ladder.  which selects the alpha or gamma direction."""
    cfg = cfg or DEFAULT_CONFIG
    if P is not None or M is not None:
        cfg = EulerConfig(prime_cutoff=P or cfg.prime_cutoff,
                          series_order=M or cfg.series_order,
                          exact_cutoff=cfg.exact_cutoff, trace_pmax=cfg.trace_pmax)
    r0 = complex(r_point)

    def d(h: float) -> complex:
        if which == "alpha":
            up = _a_eval(family, r0 + h, r0, cfg, r, t)
            dn = _a_eval(family, r0 - h, r0, cfg, r, t)
        elif which == "gamma":
            up = _a_eval(family, r0, r0 + h, cfg, r, t)
            dn = _a_eval(family, r0, r0 - h, cfg, r, t)
        else:
            raise ValueError("which must be 'alpha' or 'gamma'")
        return (up - dn) / (2 * h)

    ds = [d(h) for h in h_ladder]
    rich = [(4 * ds[i + 1] - ds[i]) / 3 for i in range(len(ds) - 1)]
    if len(rich) >= 2:
        err = abs(rich[-1] - rich[-2])
        converged = err <= abs(ds[-1] - ds[-2]) + 1e-12
        value = rich[-1]
    else:
        value = rich[0]
        err = abs(ds[-1] - ds[0])
        converged = True
    return DerivativeValue(value=value, err=err + 1e-10, converged=converged)


def _renorm2_vec(p: int, al: np.ndarray, ga: np.ndarray) -> np.ndarray:
    lnp = math.log(p)
    c4 = arith.chi4(p)
    num = (1.0 - np.exp(-(1.0 + ga + ga) * lnp)) * (1.0 - np.exp(-(1.0 + ga) * lnp))
    den = (1.0 - np.exp(-(1.0 + al + ga) * lnp)) * (1.0 - np.exp(-(1.0 + al) * lnp))
    if c4:
        num = num * (1.0 - c4 * np.exp(-(1.0 + ga) * lnp))
        den = den * (1.0 - c4 * np.exp(-(1.0 + al) * lnp))
    return num / den


def a_values_batch(family: int, pairs: list[tuple[complex, complex]],
                   cfg: EulerConfig | None = None,
                   r: int = 1, t: int = 1) -> np.ndarray:
    """Arithmetic-factor values at many (alpha, gamma) pairs, sharing one
    vectorized pass over the primes.  Used by the density grids."""
    from . import special

    cfg = cfg or DEFAULT_CONFIG
    P = cfg.prime_cutoff
    K = len(pairs)
    al = np.array([p[0] for p in pairs], dtype=complex)
    ga = np.array([p[1] for p in pairs], dtype=complex)
    if np.any(al.real <= _DOMAIN_EDGE) or np.any(ga.real <= _DOMAIN_EDGE):
        raise ValueError("shift outside the domain Re > -1/4")
    if family == 1:
        traces = hecke.shared_trace_table()
        ln2, ln3 = math.log(2), math.log(3)
        out = ((1.0 - np.exp(-(1.0 + ga + ga) * ln2))
               / (1.0 - np.exp(-(1.0 + al + ga) * ln2)))
        a3 = arith.frobenius_trace_ab(r, t, 3)
        lam3 = a3 / math.sqrt(3)
        x3 = np.exp(-(0.5 + al) * ln3)
        y3 = np.exp(-(0.5 + ga) * ln3)
        out = out * ((1.0 - lam3 * y3 + y3 * y3) / (1.0 - lam3 * x3 + x3 * x3)
                     * (1.0 - np.exp(-(1.0 + ga + ga) * ln3))
                     / (1.0 - np.exp(-(1.0 + al + ga) * ln3)))
        for p in arith.sieve_primes(P):
            if p <= 3:
                continue
            lnp = math.log(p)
            w = 1.0 - (p ** 9 - 1) / (p ** 10 - 1)
            u = np.exp(-(1.0 + ga + ga) * lnp)
            v = np.exp(-(1.0 + al + ga) * lnp)
            mid = ((np.exp(-(2.0 + al + ga) * lnp) - np.exp(-(2.0 + ga + ga) * lnp))
                   / (np.exp((2.0 + al + al) * lnp) - 1.0))
            prefnum = (np.exp((1.0 + al + al + ga) * lnp)
                       - np.exp((1.0 + al + ga + ga) * lnp)
                       + np.exp(ga * lnp) - np.exp(al * lnp))
            pref = prefnum * np.exp(-(1.5 + al + ga + ga) * lnp)
            ts = np.zeros(K, dtype=complex)
            if p <= cfg.trace_pmax:
                xs = np.exp(-(0.5 + al) * lnp)
                xs2 = xs * xs
                xpow = xs ** 10
                for m1 in range(10, cfg.series_order + 1, 2):
                    tr = traces.trace_star(m1 + 2, p)
                    if tr:
                        ts = ts + tr * xpow
                    xpow = xpow * xs2
            out = out * ((1.0 + w * (u - v + mid + pref * ts)) * (1.0 - u) / (1.0 - v))
        return out
    # family 2
    out = np.array([special.dirichlet_L_chi4(1.0 + complex(g)).value
                    / special.dirichlet_L_chi4(1.0 + complex(a)).value
                    for a, g in zip(al, ga)])
    cutoff = cfg.resolved_exact_cutoff()
    for p in arith.sieve_primes(P):
        lnp = math.log(p)
        if p == 2:
            out = out * _renorm2_vec(2, al, ga)
            continue
        x = np.exp(-(0.5 + al) * lnp)
        y = np.exp(-(0.5 + ga) * lnp)
        if p <= cutoff:
            lam, psi = _washington_lambda(p)
            num = 1.0 - lam[:, None] * y[None, :] + psi[:, None] * (y * y)[None, :]
            den = 1.0 - lam[:, None] * x[None, :] + psi[:, None] * (x * x)[None, :]
            E = (num / den).mean(axis=0)
        else:
            c4 = arith.chi4(p)
            sq = math.sqrt(p)
            q10 = -(1 + c4) / sq
            q01 = (1 + c4) / sq
            qdiag = float(averages.washington_diagonal_exact(p))
            q02 = float(averages.washington_second_moment_exact(p))
            q20 = -qdiag - q02
            E = 1.0 + q10 * x + q01 * y + q20 * (x * x) + qdiag * (x * y) + q02 * (y * y)
        out = out * (E * _renorm2_vec(p, al, ga))
    return out
