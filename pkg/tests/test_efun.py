import math
import random
from fractions import Fraction

import numpy as np
import pytest

from mcwd.efun import (
    ClassicExp,
    Exclusion,
    MixedSumSpec,
    MixedTerm,
    Perturbed,
    ProductSpec,
    TailBound,
    TruncationError,
    ZeroTerm,
    dumps_spec,
    envelope,
    exact_max_min_modulus,
    get_truncation_factor,
    jensen_mean,
    loads_spec,
    log_modulus_bounds,
    max_modulus,
    min_modulus,
    modulus_interval,
    point_eval,
    poly_log_max_modulus,
    spec_from_dict,
    spec_to_dict,
    truncation_factor,
    zero_count_below,
)
from mcwd.xlog import XInterval, XReal, iv_ln

from oracles import circle_mean_numeric, dense_circle_log_modulus, jensen_closed_form


def point_zeros(log_zeros):
    return tuple(ZeroTerm(XInterval.point(XReal(la)), 1) for la in sorted(log_zeros))


def random_exact_spec(rng):
    """Product with dyadic log-zeros, so both Jensen sides are exact rationals."""
    p = rng.randint(0, 4)
    k = rng.randint(0, 8)
    las = sorted(Fraction(rng.randint(-64, 640), 16) for _ in range(k))
    return p, las, ProductSpec(p, point_zeros(las))


def test_jensen_exact_identity_on_random_specs():
    rng = random.Random(2024)
    for _ in range(1000):
        p, las, spec = random_exact_spec(rng)
        t = Fraction(rng.randint(-128, 1280), 32)
        assert jensen_mean(spec, XReal(t), exact=True) == jensen_closed_form(p, las, t)


def test_jensen_against_numeric_circle_mean():
    rng = random.Random(5)
    for _ in range(20):
        zeros = sorted(rng.uniform(0.5, 30) for _ in range(rng.randint(1, 5)))
        r = rng.uniform(0.3, 40)
        if min(abs(r - a) for a in zeros) < 0.2:
            continue
        spec = ProductSpec(1, tuple(ZeroTerm(iv_ln(XReal(a)), 1) for a in zeros))
        J = jensen_mean(spec, XReal(math.log(r)))
        num = circle_mean_numeric(1, zeros, r)
        assert float(J.lo) - 1e-9 <= num <= float(J.hi) + 1e-9


def test_exact_max_min_match_axis_values():
    spec = ProductSpec(1, (ZeroTerm(iv_ln(XReal(10)), 1),))
    M, m = exact_max_min_modulus(spec, iv_ln(XReal(20)).mid())
    # |z(1 - z/10)| at z = -20 and z = 20
    assert abs(float(M.mid()) - math.log(60)) < 1e-14
    assert abs(float(m.mid()) - math.log(20)) < 1e-14


@pytest.mark.parametrize("seed", range(6))
def test_modulus_bounds_enclose_dense_circle(seed):
    rng = random.Random(seed)
    las = sorted(rng.uniform(-2, 40) for _ in range(rng.randint(1, 6)))
    p = rng.randint(0, 3)
    spec = ProductSpec(p, point_zeros(las))
    for t in (rng.uniform(-3, 45) for _ in range(5)):
        if min(abs(t - la) for la in las) < 1e-3:
            continue
        lo, hi = dense_circle_log_modulus(p, las, t)
        B = log_modulus_bounds(spec, XReal(t))
        assert float(B.lo) <= lo + 1e-9 and hi - 1e-9 <= float(B.hi)
        M, m = exact_max_min_modulus(spec, XReal(t))
        assert float(M.lo) - 1e-9 <= hi <= float(M.hi) + 1e-9
        assert float(m.lo) - 1e-9 <= lo <= float(m.hi) + 1e-9
        # with every zero listed explicitly the axis values are sharp
        with truncation_factor(2 ** 80):
            M, m = exact_max_min_modulus(ProductSpec(p, point_zeros(las)), XReal(t))
        assert abs(float(M.mid()) - hi) < 1e-8 and abs(float(m.mid()) - lo) < 1e-8


def test_envelope_degree_counts_zeros_below():
    spec = ProductSpec(2, point_zeros([Fraction(1), Fraction(5), Fraction(9)]))
    env = envelope(spec, XInterval(XReal(6), XReal(8)))
    assert env.degree == 4
    assert zero_count_below(spec, XReal(6)) == 4
    assert zero_count_below(spec, XReal(0)) == 2


def test_truncation_respected():
    spec = ProductSpec(1, point_zeros([Fraction(2)]), TailBound(2, XReal(50)))
    with pytest.raises(TruncationError):
        jensen_mean(spec, XReal(60))
    with pytest.raises(TruncationError):
        zero_count_below(spec, XReal(60))
    B = log_modulus_bounds(spec, XReal(10))
    assert B.lo < B.hi


def test_truncation_factor_context():
    assert get_truncation_factor() == 16
    with truncation_factor(64):
        assert ProductSpec(1).truncation_factor == 64
    assert ProductSpec(1).truncation_factor == 16
    with pytest.raises(ValueError):
        with truncation_factor(1):
            pass


def test_exclusion_makes_lower_bound_finite():
    spec = ProductSpec(0, (ZeroTerm(XInterval(XReal(9.99), XReal(10.01)), 1),))
    T = XInterval(XReal(9.98), XReal(10.02))
    assert not log_modulus_bounds(spec, T).lo.is_finite()
    excl = Exclusion(0, XReal(Fraction(1, 100)))
    assert log_modulus_bounds(spec, T, [excl]).lo.is_finite()


def test_exp_and_perturbed_modulus():
    E = modulus_interval(ClassicExp(), XReal(math.log(3)))
    assert float(E.lo) <= -3 + 1e-12 and float(E.hi) >= 3 - 1e-12
    base = ProductSpec(3)
    t = XReal(5)
    P = Perturbed(base, (XReal(5), XReal(0), XReal(0), XReal(1)))
    M = max_modulus(P, t)
    # max |2 z^3 + 5| on |z| = e^5 is 2 e^15 + 5
    ref = math.log(2 * math.exp(15) + 5)
    assert float(M.lo) <= ref + 1e-9 and ref - 1e-9 <= float(M.hi)
    assert max_modulus(Perturbed(base, ()), t) == max_modulus(base, t)


def test_poly_max_modulus_bounds():
    assert poly_log_max_modulus((), XReal(3)) is None
    assert poly_log_max_modulus((XReal(0), XReal(0)), XReal(3)) is None
    B = poly_log_max_modulus((XReal(5), XReal(0), XReal(0), XReal(1)), XReal(2))
    ref = math.log(math.exp(6) + 5)
    assert float(B.lo) <= ref <= float(B.hi)


def test_point_eval_against_direct_product():
    zeros = [3.0, 7.0, 40.0]
    spec = ProductSpec(1, tuple(ZeroTerm(iv_ln(XReal(a)), 1) for a in zeros))
    for r, th in ((2.0, 0.3), (10.0, 2.0), (50.0, -1.0)):
        z = r * np.exp(1j * th)
        f = z * np.prod([1 - z / a for a in zeros])
        pv = point_eval(spec, XReal(math.log(r)), th)
        assert float(pv.log_abs.lo) - 1e-12 <= math.log(abs(f)) <= float(pv.log_abs.hi) + 1e-12


def test_min_modulus_on_zero_circle_is_minus_infinity():
    spec = ProductSpec(0, point_zeros([Fraction(3)]))
    m = min_modulus(spec, XReal(3))
    assert not m.lo.is_finite()


def test_mixed_sum_encloses_sampled_values():
    # a (exp(-(z/S)**m) - 1), log S = 4, m = 3, delta = 1/2 (delta log S = sqrt(log S))
    term = MixedTerm(XReal(4), XReal(3), XReal(Fraction(1, 2)))
    spec = MixedSumSpec((term,), ProductSpec(0))
    a, S, m = math.exp(6), math.exp(4), 3
    for t in (2.0, 3.0, 3.9, 4.3, 5.0):
        th = np.linspace(0, 2 * np.pi, 20000, endpoint=False)
        z = np.exp(t + 1j * th)
        g = a * (np.exp(-(z / S) ** m) - 1)
        vals = np.log(np.abs(g))
        E = modulus_interval(spec, XReal(t))
        assert float(E.lo) <= vals.min() + 1e-9
        assert vals.max() - 1e-9 <= float(E.hi)


def test_spec_serialization_round_trip():
    spec = ProductSpec(2, point_zeros([Fraction(1), Fraction(7, 2)]), TailBound(3, XReal(20), 2), label="demo")
    assert loads_spec(dumps_spec(spec)) == spec
    assert spec_from_dict(spec_to_dict(spec)) == spec
    assert dumps_spec(loads_spec(dumps_spec(spec))) == dumps_spec(spec)


def test_zero_term_sort_enforced():
    with pytest.raises(ValueError):
        ProductSpec(0, point_zeros([Fraction(2)])[::-1] + point_zeros([Fraction(1)]))
