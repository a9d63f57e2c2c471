import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from verlinde.errors import ExceptionalPoint, NotNearInteger
from verlinde.scalar import (RationalPhase, Tolerance, lattice_distance,
                             low_discrepancy, phase, round_to_integer,
                             sample_points, sample_reals, trig_quotient)
from verlinde.singlet import SingletTheory
from verlinde.sl2 import Sl2Theory


def test_phase_identity_cases():
    assert phase(0) == 1
    assert phase(1) == -1
    assert phase(Fraction(1, 2)) == 1j
    assert phase(Fraction(3, 2)) == -1j


def test_phase_many_random_rationals_unit_modulus_and_multiplicative():
    rng = random.Random(1)
    for _ in range(10_000):
        q1 = Fraction(rng.randint(-500, 500), rng.randint(1, 200))
        q2 = Fraction(rng.randint(-500, 500), rng.randint(1, 200))
        assert abs(abs(phase(q1)) - 1.0) < 1e-15
        assert abs(phase(q1) * phase(q2) - phase(q1 + q2)) < 1e-12


@given(st.fractions(max_denominator=64), st.integers(-8, 8))
def test_rational_phase_power(q, n):
    rp = RationalPhase(q)
    assert abs((rp**n).value() - rp.value() ** n) < 1e-12


def test_rational_phase_reduced_and_mod_two():
    rp = RationalPhase(Fraction(10, 4))
    assert (rp.numerator, rp.denominator) == (1, 2)
    assert RationalPhase(Fraction(7, 3)) == RationalPhase(Fraction(1, 3))
    assert RationalPhase(Fraction(1, 3)).conjugate() * RationalPhase(Fraction(1, 3)) \
        == RationalPhase(0)


def test_trig_quotient_values():
    assert trig_quotient(1, 0.37) == pytest.approx(1.0)
    assert trig_quotient(2, 0.25) == pytest.approx(2 * math.cos(math.pi / 4))
    assert trig_quotient(3, 0.25) == pytest.approx(1.0)


def test_trig_quotient_exceptional():
    with pytest.raises(ExceptionalPoint):
        trig_quotient(2, 1.0)
    with pytest.raises(ValueError):
        trig_quotient(0, 0.3)


def test_trig_quotient_chebyshev_recurrence():
    rng = random.Random(7)
    for _ in range(100):
        x = rng.uniform(0.01, 0.99)
        if abs(math.sin(math.pi * x)) < 1e-3:
            continue
        for s in range(2, 51):
            lhs = trig_quotient(s + 1, x)
            rhs = 2 * math.cos(math.pi * x) * trig_quotient(s, x) - trig_quotient(s - 1, x)
            assert abs(lhs - rhs) < 1e-10


def test_round_to_integer():
    assert round_to_integer(0.9999999 + 2e-8j) == 1
    assert round_to_integer(-3.0000002) == -3
    with pytest.raises(NotNearInteger):
        round_to_integer(0.4)


def test_tolerance_positive():
    with pytest.raises(ValueError):
        Tolerance(eps_round=0.0)


def test_low_discrepancy_deterministic():
    a = [x for _, x in zip(range(50), low_discrepancy(42))]
    b = [x for _, x in zip(range(50), low_discrepancy(42))]
    assert a == b
    assert all(0.0 <= x < 1.0 for x in a)


def test_sample_reals_respects_exclusion():
    xs = sample_reals(40, 3, lo=0.0, hi=1.0,
                      exclusion=lambda x: lattice_distance(x, 0.25), margin=0.03)
    assert len(xs) == 40
    assert all(lattice_distance(x, 0.25) > 0.03 for x in xs)


def test_sample_points_singlet_avoids_exceptional_set():
    theory = SingletTheory(2)
    pts = sample_points(theory, 3, 7)
    assert len(pts) == 3
    for pt in pts:
        assert lattice_distance(pt.mu, 1 / theory.alpha_plus) > 1e-9


def test_sample_points_sl2_ranges():
    theory = Sl2Theory(3, 2)
    (pt,) = sample_points(theory, 1, 1)
    assert 1 <= pt.r <= 2
    assert pt.s == 1
    assert theory.exclusion_distance(pt.lam) > 1e-9


def test_sample_points_reproducible():
    theory = SingletTheory(3)
    assert sample_points(theory, 10, 5) == sample_points(theory, 10, 5)
    assert sample_points(theory, 10, 5) != sample_points(theory, 10, 6)


def test_sample_points_requires_positive_count():
    with pytest.raises(ValueError):
        sample_points(SingletTheory(2), 0, 1)
