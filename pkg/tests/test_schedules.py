import csv
import io
import math

import mpmath
import pytest

from mcwd.schedules import (
    EX3_DEFAULTS,
    ScheduleError,
    beta_limit_floor,
    example1_spec,
    example1_track_verdicts,
    example2_N2,
    example2_spec,
    example3_spec,
    example3_structure_verdicts,
    generate,
    generate_example1,
    generate_example2,
    generate_example3,
    rigorous_N2_example1,
    schedule_to_csv,
    validate,
)
from mcwd.verdict import FAIL, PASS
from mcwd.xlog import XReal

from conftest import EX1_N2, EX1_NSTAR


def exponents_oracle(n_max):
    """P_n with s_n = s_1**P_n, from s_{n+1} = s_n**(n + isqrt(n))."""
    P = [1]
    for n in range(1, n_max):
        P.append(P[-1] * (n + math.isqrt(n)))
    return P


def test_example1_log10_values():
    p = generate_example1(10, 2, n_max=8)
    got = [p.log10_s_exact(n) for n in range(1, 9)]
    assert got == [1, 2, 6, 24, 144, 1008, 8064, 72576]


def test_example1_exponents_match_recurrence_far_out():
    p = generate_example1(10, 2, n_max=300)
    assert list(p.exponents) == exponents_oracle(300)
    # s_300 has a log10 with hundreds of digits; still exact
    assert p.log10_s_exact(300) == exponents_oracle(300)[-1]


def test_example1_log_s_encloses_exact_value():
    p = generate_example1(10, 2, n_max=60)
    with mpmath.workdps(80):
        ref = exponents_oracle(60)[-1] * mpmath.log(10)
        I = p.log_s(60)
        assert mpmath.mp.make_mpf(I.lo._v) <= ref <= mpmath.mp.make_mpf(I.hi._v)


def test_rigorous_N2_is_sound():
    N = rigorous_N2_example1(2)
    assert N == 94
    with mpmath.workdps(30):
        lo = mpmath.nsum(lambda n: mpmath.log(1 - 4 / n ** 2), [N, mpmath.inf])
        hi = mpmath.nsum(lambda n: mpmath.log(1 + 4 / n ** 2), [N, mpmath.inf])
        assert lo > -mpmath.log(2) / 16 and hi < mpmath.log(2) / 16


def test_corrected_track_stays_in_range_from_start(ex1_params):
    vs = example1_track_verdicts(ex1_params, range(EX1_NSTAR, EX1_NSTAR + 8))
    assert vs and all(v.status == PASS for v in vs)


def test_literal_track_differs_only_at_squares():
    lit = generate_example1(10, 2, n_max=EX1_NSTAR + 3, N2=EX1_N2, track="literal")
    cor = generate_example1(10, 2, n_max=EX1_NSTAR + 3, N2=EX1_N2)
    # the literal track picks up the (1 - 2/i^2) factor one step early
    assert lit.alpha(EX1_NSTAR).hi < cor.alpha(EX1_NSTAR).lo
    a, b = lit.alpha(EX1_NSTAR + 1), cor.alpha(EX1_NSTAR + 1)
    assert a.lo <= b.hi and b.lo <= a.hi


def test_example1_spec_lists_both_families():
    p = generate_example1(10, 2, n_max=12)
    spec = example1_spec(p, 9)
    # 9 zeros s_i^c plus s_1, s_4, s_9
    assert sum(z.multiplicity for z in spec.zeros) == 12
    assert spec.tail is not None and spec.tail.log_modulus > spec.zeros[-1].log_modulus.hi


def test_example1_bad_inputs():
    with pytest.raises(ScheduleError):
        generate_example1(10, 1, n_max=5)
    with pytest.raises(ScheduleError):
        generate_example1(1, 2, n_max=5)
    with pytest.raises(ValueError):
        generate_example1(10, 2, n_max=5, track="other")
    p = generate_example1(10, 2, n_max=5)
    with pytest.raises(ScheduleError):
        p.log_s(6)


def test_example2_blocks_and_exponents():
    p = generate_example2(10, m_max=580)
    assert [p.block(m) for m in (4, 35, 36, 575, 576)] == [2, 2, 3, 3, 4]
    assert p.zero_power(100) == 6
    assert p.P(7) == 5040


def test_example2_N2_is_sound():
    N = example2_N2()
    assert N == 17
    with mpmath.workdps(30):
        assert 2 * mpmath.zeta(1.5, N) < 1


def test_example2_track_validates():
    p = generate_example2(10, m_max=600)
    vs = validate(p)
    assert vs and all(v.status == PASS for v in vs)
    assert p.a_track(600).lo >= XReal(1)


def test_example2_spec_zero_count():
    p = generate_example2(10, m_max=40)
    spec = example2_spec(p, 39)
    assert len(spec.zeros) == 39 and spec.power_at_zero == 2


def test_example3_defaults_validate():
    p = generate_example3(n_max=4)
    vs = validate(p, [1, 2, 3])
    assert vs and all(v.status == PASS for v in vs), [v.inequality for v in vs if v.status != PASS]
    assert p.m1 == EX3_DEFAULTS["m1"]


def test_example3_towers_saturate():
    p = generate_example3(n_max=4)
    assert not p.level(1).saturated
    assert p.level(4).saturated
    # the logs stay finite even when m itself is beyond range
    assert p.level(4).log_m.lo.is_finite() or p.level(4).log_log_m.lo.is_finite()


def test_example3_beta_structure_negative_control():
    with pytest.raises(ScheduleError):
        generate_example3(beta1="0.5635", n_max=4)
    p = generate_example3(beta1="0.5635", n_max=4, strict=False)
    vs = example3_structure_verdicts(p)
    bad = [v.n for v in vs if v.inequality == "beta>alpha" and v.status == FAIL]
    assert bad == [2, 3, 4]


def test_example3_beta_floor_below_every_beta():
    p = generate_example3(n_max=4)
    floor = beta_limit_floor(p)
    assert all(floor.hi <= lv.beta.lo for lv in p.levels)
    assert floor.lo > p.alpha


def test_example3_spec_shape():
    p = generate_example3(n_max=4)
    spec = example3_spec(p, 3)
    assert len(spec.terms) == 3


def test_generate_dispatch():
    assert generate(1, 5).n_max == 5
    assert generate(2, 5).m_max == 5
    assert len(generate(3, 3).levels) == 3
    with pytest.raises(ValueError):
        generate(4, 3)


def test_schedule_csv_columns():
    text = schedule_to_csv(generate_example1(10, 2, n_max=8))
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["log10_s_n"] for r in rows] == ["1", "2", "6", "24", "144", "1008", "8064", "72576"]
    for ex in (2, 3):
        text = schedule_to_csv(generate(ex, 4))
        assert len(text.strip().splitlines()) == 5


def test_example1_validate_small_schedule():
    vs = validate(generate_example1(10, 2, n_max=8))
    assert vs and all(v.status == PASS for v in vs)
