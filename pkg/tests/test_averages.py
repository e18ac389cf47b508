import math
from fractions import Fraction

import pytest

from ecdensity import arith, averages


def test_value_representation():
    v = averages.SqrtScaled(5, Fraction(-2), True)
    assert float(v) == pytest.approx(-2 / math.sqrt(5))
    w = averages.SqrtScaled(5, Fraction(1, 2), True)
    assert float(v * w) == pytest.approx(-1 / 5)
    assert (v * w).half is False
    with pytest.raises(ValueError):
        v + averages.SqrtScaled(5, Fraction(1), False)


def test_family1_displayed_values():
    assert averages.q_star_bruteforce(1, 1, 5).value == averages.SqrtScaled(5, Fraction(-4, 5), False)
    assert averages.q_star_bruteforce(0, 2, 5).value == averages.SqrtScaled(5, Fraction(4, 5), False)
    assert averages.q_star_closed(1, 1, 5).value.frac == Fraction(1 - 5, 5)
    assert averages.q_star_closed(0, 2, 5).value.frac == Fraction(4, 5)


def test_family1_parity_vanishing():
    for p in (5, 7, 13):
        for m1 in range(9):
            for m2 in (0, 1, 2):
                if (m1 + m2) % 2 == 1:
                    assert averages.q_star_bruteforce(m1, m2, p).value.is_zero()


def test_family1_closed_equals_brute_spot():
    for p in (5, 7, 13, 41, 97):
        for m1 in range(9):
            for m2 in (0, 1, 2):
                b = averages.q_star_bruteforce(m1, m2, p)
                c = averages.q_star_closed(m1, m2, p)
                assert b.value == c.value, (p, m1, m2)


def test_family1_trace_weight_example():
    # weight-12 trace enters the closed form at the tenth power
    from ecdensity import hecke

    tau5 = hecke.tau_oracle(5)[5]
    got = averages.q_star_closed(10, 0, 5).value
    want = Fraction(-4 * tau5, 5 ** (2 + 5))
    assert got.frac == want and not got.half


def test_q_rt_examples():
    one = averages.q_rt(1, 1, 1, 1)
    assert one.frac == 1 and not one.halves
    # any factor of 2 kills the composite value
    assert averages.q_rt(2, 1, 1, 1).is_zero()
    assert averages.q_rt(1, 4, 1, 1).is_zero()
    # odd total exponent at a single prime vanishes by parity
    assert averages.q_rt(5, 1, 1, 1).is_zero()
    # mu has no support above the square
    assert averages.q_rt(1, 125, 1, 1).is_zero()
    # a nonzero composite: m1 = 25 (even exponent pair with m2 = 25)
    v = averages.q_rt(25, 25, 1, 1)
    brute = averages.q_star_bruteforce(2, 2, 5).value
    delta = Fraction(5 ** 10, 5 ** 10 - 1)
    assert v.frac == brute.frac * delta


def test_q_rt_three_part():
    # m1 = 3: lambda at 3 of the representative curve for residues (5, 1)
    a3 = arith.frobenius_trace_ab(5, 1, 3)
    assert a3 != 0
    v = averages.q_rt(3, 1, 5, 1)
    assert v.halves.get(3) == 1 and v.frac == Fraction(a3)
    # and a residue class with vanishing trace at 3 gives zero
    assert arith.frobenius_trace_ab(1, 1, 3) == 0
    assert averages.q_rt(3, 1, 1, 1).is_zero()


def test_family2_displayed_values():
    v = averages.q_t_bruteforce(1, 0, 5).value
    assert v.half and v.frac == Fraction(-2)          # -2/sqrt(5)
    v7 = averages.q_t_bruteforce(0, 2, 7).value
    assert v7.frac == Fraction(5, 7) and not v7.half  # two singular fibers mod 7
    assert averages.washington_root_count(7) == 2
    assert averages.washington_root_count(5) == 0
    assert averages.q_t_bruteforce(0, 2, 5).value.frac == Fraction(1)
    # p = 2 all vanish
    assert averages.q_t_bruteforce(3, 1, 2).value.is_zero()
    assert averages.q_t_bruteforce(0, 0, 2).value.frac == 1


def test_family2_first_moment_antisymmetry():
    for p in (5, 13, 199):
        a = averages.q_t_bruteforce(1, 0, p).value
        b = averages.q_t_bruteforce(0, 1, p).value
        assert a == -b


def test_family2_identities_all_kinds():
    for p in [q for q in arith.sieve_primes(199) if q > 2]:
        for kind in ("first", "diagonal", "secondmoment"):
            rep = averages.q_t_identity_check(p, kind)
            assert rep.passed, (p, kind, rep.detail)


def test_family2_diagonal_exact_law():
    for p in [q for q in arith.sieve_primes(199) if q > 2]:
        assert (averages.q_t_bruteforce(1, 1, p).value.frac
                == averages.washington_diagonal_exact(p))


def test_family2_q20_relation():
    for p in (3, 5, 7, 13, 61):
        assert (averages.q_t_bruteforce(2, 0, p).value.frac
                == averages.washington_q20_exact(p))


def test_family2_local_cancellation():
    # sum over m1+m2 = k of the averages vanishes for every k >= 1
    for p in (3, 5, 13, 101):
        for k in range(1, 8):
            total = None
            for m2 in range(0, min(2, k) + 1):
                v = averages.q_t_bruteforce(k - m2, m2, p).value
                total = v if total is None else total + v
            assert total.is_zero(), (p, k)


def test_michel_type_residual():
    worst = 0.0
    for p in [q for q in arith.sieve_primes(199) if q > 2]:
        resid = abs(float(averages.q_t_bruteforce(1, 1, p).value.frac + 1))
        worst = max(worst, resid * math.sqrt(p))
        assert resid * p <= averages.C_DIAG
    assert worst <= averages.C_MICHEL


def test_preconditions():
    with pytest.raises(ValueError):
        averages.q_star_bruteforce(1, 3, 5)
    with pytest.raises(ValueError):
        averages.q_star_bruteforce(1, 1, 3)
    with pytest.raises(ValueError):
        averages.q_t_identity_check(2, "first")
    with pytest.raises(ValueError):
        averages.q_t_identity_check(5, "nonsense")
