"""Acceptance suite: one test per criterion, one printed verdict line each.

Criteria 5 and 6 are implemented exactly as stated and currently fail for
mathematical reasons: the computed first-order density corrections (driven
by the diagonal derivatives of the arithmetic factors, independently
cross-validated) are an order of magnitude larger than the stated
tolerances at the pinned conductor scales.  The printed lines carry the
measured numbers plus the large-scale evidence that the limit shapes and
the second-order decay are genuinely reproduced.
"""

import math
import time

import numpy as np

from ecdensity import arith, averages, density, hecke, lfunc, ratios


def _verdict(n: int, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_closed_form_exactness():
    averages.family1_moment_sums.cache_clear()
    arith.family1_trace_table.cache_clear()
    arith.family1_good_table.cache_clear()
    start = time.time()
    mismatches = []
    primes = [p for p in arith.sieve_primes(97) if p > 3]
    for p in primes:
        for m1 in range(0, 9):
            for m2 in (0, 1, 2):
                brute = averages.q_star_bruteforce(m1, m2, p)
                closed = averages.q_star_closed(m1, m2, p)
                if brute.value != closed.value:
                    mismatches.append((p, m1, m2))
                if (m1 + m2) % 2 == 1 and not brute.value.is_zero():
                    mismatches.append((p, m1, m2, "parity"))
    elapsed = time.time() - start
    ok = not mismatches and elapsed <= 60.0
    _verdict(1, ok, f"exact closed=brute for {len(primes)} primes x 27 exponent "
                    f"pairs, odd cases zero; {elapsed:.1f}s (cap 60s)")
    assert not mismatches
    assert elapsed <= 60.0


def test_criterion_2_trace_triple_oracle():
    primes = [p for p in arith.sieve_primes(97) if p > 3]
    tau = hecke.tau_oracle(97)
    bad = []
    for p in primes:
        es12 = hecke.trace_hecke_selberg(12, p)
        if not (es12 == tau[p] == hecke.trace_from_moments(12, p)):
            bad.append((12, p))
        for j in (16, 18, 20, 22):
            if hecke.trace_hecke_selberg(j, p) != hecke.trace_from_moments(j, p):
                bad.append((j, p))
    anchors = (hecke.trace_hecke_selberg(12, 2) == tau[2] == -24
               and hecke.trace_hecke_selberg(12, 3) == tau[3] == 252)
    ok = not bad and anchors
    _verdict(2, ok, f"weights 12-22 agree exactly across oracles for p <= 97; "
                    f"anchor traces -24 and 252 reproduced")
    assert ok


def test_criterion_3_washington_identities():
    primes = [p for p in arith.sieve_primes(199) if p > 2]
    bad = []
    worst_diag = 0.0
    for p in primes:
        total = int(arith.washington_trace_table(p).sum())
        if total != -p * (1 + arith.chi4(p)):
            bad.append(("first", p))
        second = averages.q_t_bruteforce(0, 2, p).value
        rho = averages.washington_root_count(p)
        if rho not in (0, 1, 2) or second.half or \
           second.frac != averages.washington_second_moment_exact(p):
            bad.append(("second", p))
        resid = abs(float(p * (averages.q_t_bruteforce(1, 1, p).value.frac + 1)))
        worst_diag = max(worst_diag, resid)
        if resid > averages.C_DIAG:
            bad.append(("diag", p))
    ok = not bad
    _verdict(3, ok, f"trace-sum and singular-fiber identities exact for odd "
                    f"p <= 199; max |p(Q+1)| = {worst_diag:.3f} <= {averages.C_DIAG}")
    assert ok


def test_criterion_4_diagonal_identity():
    grid = (0.0, 0.05, 0.1, 0.1 + 0.2j, 0.2j)
    worst_factor = 0.0
    worst_product = 0.0
    ok = True
    for r in grid:
        sh = ratios.ComplexShift.diagonal(r)
        for p in arith.sieve_primes(100):
            if p > 3:
                worst_factor = max(worst_factor,
                                   abs(ratios.euler_factor_family1(p, sh) - 1))
            worst_factor = max(worst_factor,
                               abs(ratios.euler_factor_family2(p, sh) - 1))
        v1 = ratios.A_family1(sh, P=10 ** 4)
        v2 = ratios.A_family2(sh, P=10 ** 4)
        ok = ok and abs(v1.value - 1) <= v1.tail_bound
        ok = ok and abs(v2.value - 1) <= v2.tail_bound
        worst_product = max(worst_product, abs(v1.value - 1), abs(v2.value - 1))
    ok = ok and worst_factor < 1e-12
    _verdict(4, ok, f"renormalized local factors equal 1 to {worst_factor:.1e} "
                    f"(cap 1e-12); products within tail bound of 1 "
                    f"(worst {worst_product:.1e})")
    assert ok


def test_criterion_5_density_limit_shapes():
    tau = np.linspace(0.2, 3.0, 29)
    c1 = density.scaled_density(1, 1e12, tau)
    c2 = density.scaled_density(2, 1e12, tau)
    lim2 = 1 + np.sin(2 * np.pi * tau) / (2 * np.pi * tau)
    dev1 = float(np.abs(c1.smooth.real - 1).max())
    dev2 = float(np.abs(c2.smooth.real - lim2).max())
    masses_ok = c1.delta_mass == 0.5 and c2.delta_mass == 1.0
    ok = dev1 <= 5e-2 and dev2 <= 5e-2 and masses_ok
    # supporting evidence: the shapes do emerge once the computed 1/L terms
    # are out of the way
    f1 = density.scaled_density(1, 1e180, tau)
    f2 = density.scaled_density(2, 1e180, tau)
    far1 = float(np.abs(f1.smooth.real - 1).max())
    far2 = float(np.abs(f2.smooth.real - lim2).max())
    _verdict(5, ok,
             f"at X=1e12 family-1 dev {dev1:.3f}, family-2 dev {dev2:.3f} "
             f"(cap 5e-2, delta masses {c1.delta_mass}/{c2.delta_mass}); "
             f"the computed first-order terms are too large at this scale; "
             f"at X=1e180 the devs are {far1:.3f}/{far2:.3f}")
    assert masses_ok
    assert far1 <= 5e-2 and far2 <= 5e-2  # the limit shapes themselves
    assert ok, ("the pinned scale X=1e12 cannot meet 5e-2: the computed "
                "corrections are of size |A1|/L ~ 0.6-0.8, needing X beyond 1e168")


def test_criterion_6_lower_order_convergence():
    tau = np.linspace(0.2, 3.0, 29)
    stats = []
    for X in (1e6, 1e8, 1e10, 1e12):
        c = density.scaled_density(2, X, tau)
        stats.append(float((np.abs(c.smooth - c.taylor) * c.L ** 2).max()))
    ratios_seq = [stats[i + 1] / stats[i] for i in range(3)]
    ok = all(r <= 1.2 for r in ratios_seq)
    # extension evidence: the scaled gap levels off at larger L, i.e. the
    # remainder truly is second order
    ext = []
    for X in (1e20, 1e28):
        c = density.scaled_density(2, X, tau)
        ext.append(float((np.abs(c.smooth - c.taylor) * c.L ** 2).max()))
    _verdict(6, ok,
             f"max|full-taylor| L^2 along the pinned ladder: "
             + ", ".join(f"{s:.1f}" for s in stats)
             + f" (growth {', '.join(f'{100 * (r - 1):+.0f}%' for r in ratios_seq)}; "
             f"cap +20%); at X=1e20/1e28 the statistic is "
             + "/".join(f"{s:.1f}" for s in ext)
             + " - pre-asymptotic growth at the pinned scales")
    assert ext[1] < 1.25 * ext[0]  # levels off where the expansion applies
    assert ok, ("the pinned ladder sits before the asymptotic regime; "
                "the statistic grows toward its limit")


def test_criterion_7_central_zero_and_afe():
    start = time.time()
    exact_ts = [-11, 1, 13]
    confirmed_ts = [5, -4]
    rows = []
    ok = True
    for t in exact_ts + confirmed_ts:
        if t in exact_ts:
            cond = arith.washington_conductor(t)
            assert cond.exact
            N = cond.value
        else:
            N, res, confirmed = lfunc.confirm_conductor(t)
            ok = ok and confirmed
        assert N <= 10 ** 6
        ls = lfunc.coefficients(arith.WashingtonCurve(t),
                                int(12 * math.sqrt(N)) + 64, conductor=N)
        central = abs(lfunc.completed_L(0.5, ls, Y=1.25).value)
        cons = lfunc.afe_consistency(ls)
        zl = lfunc.find_zeros(ls, 10.0)
        count_gap = abs(len(zl.ordinates) - zl.count_estimate)
        rows.append((t, N, central, cons, len(zl.ordinates), zl.count_estimate))
        ok = ok and central < 1e-8 and cons < 1e-8 and count_gap <= 2
    elapsed = time.time() - start
    ok = ok and elapsed <= 600.0 and len(rows) >= 4
    detail = "; ".join(
        f"t={t}: N={N}, |center|={c:.1e}, consistency={co:.1e}, "
        f"zeros {nz} vs {est:.1f}" for (t, N, c, co, nz, est) in rows)
    _verdict(7, ok, f"{len(rows)} curves in {elapsed:.0f}s (cap 600s); {detail}")
    assert ok


def test_criterion_8_partial_product_decomposition():
    gaps = []
    for t in (1, 13, 25, 37):
        res = density.bsd_decomposition(arith.WashingtonCurve(t), 10 ** 6)
        gaps.append((t, res.slope_full - res.slope_shifted))
    hits = sum(1 for (_, g) in gaps if 0.6 <= g <= 1.4)
    ok = hits >= 3
    _verdict(8, ok, "slope gaps at x_max=1e6: "
             + ", ".join(f"t={t}: {g:.3f}" for (t, g) in gaps)
             + f"; {hits}/4 within [0.6, 1.4] (need 3)")
    assert ok
