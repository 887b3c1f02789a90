import csv
import io
import json
import math
import random
from fractions import Fraction

import pytest

from mcwd.efun import ProductSpec, ZeroTerm, zero_count_below
from mcwd.orbits import (
    LogAnnulus,
    OrbitReport,
    example1_brackets,
    example1_degree_check,
    example1_h_estimate,
    h_estimate,
    propagate_annulus,
    scan_example3_defaults,
    stability_check,
    verify_example1,
    verify_example2,
    verify_example3,
)
from mcwd.schedules import generate_example2, generate_example3
from mcwd.verdict import FAIL, INCONCLUSIVE, PASS
from mcwd.xlog import XInterval, XReal

from conftest import EX1_NSTAR
from oracles import dense_circle_log_modulus


def test_log_annulus_validation():
    with pytest.raises(ValueError):
        LogAnnulus(XReal(2), XReal(1))
    with pytest.raises(ValueError):
        LogAnnulus(XReal.ninf(), XReal(1))
    A = LogAnnulus(1, 3)
    assert A.t_range == XInterval(XReal(1), XReal(3))


def test_monomial_propagation_is_exact():
    for d in (1, 2, 7):
        img = propagate_annulus(ProductSpec(d), LogAnnulus(XReal(Fraction(3, 2)), XReal(40)))
        assert img.lo == XReal(Fraction(3, 2) * d) and img.hi == XReal(40 * d)


@pytest.mark.parametrize("seed", range(8))
def test_propagation_encloses_dense_sampling(seed):
    rng = random.Random(100 + seed)
    las = sorted(rng.uniform(0, 30) for _ in range(rng.randint(1, 5)))
    p = rng.randint(0, 2)
    spec = ProductSpec(p, tuple(ZeroTerm(XInterval.point(XReal(la)), 1) for la in las))
    lo_t = rng.uniform(-2, 28)
    hi_t = lo_t + rng.uniform(0.1, 6)
    img = propagate_annulus(spec, LogAnnulus(XReal(lo_t), XReal(hi_t)))
    smin, smax = math.inf, -math.inf
    for k in range(60):
        t = lo_t + (hi_t - lo_t) * k / 59
        a, b = dense_circle_log_modulus(p, las, t, samples=1024)
        smin, smax = min(smin, a), max(smax, b)
    assert float(img.lo) <= smin + 1e-9
    assert smax - 1e-9 <= float(img.hi)


def test_zero_inside_annulus_gives_unbounded_minimum():
    spec = ProductSpec(1, (ZeroTerm(XInterval.point(XReal(5)), 1),))
    img = propagate_annulus(spec, LogAnnulus(4, 6))
    assert not img.lo.is_finite()


@pytest.fixture(scope="module")
def ex1_report(ex1_params, ex1_cache):
    return verify_example1(ex1_params, EX1_NSTAR, steps=2, spec_cache=ex1_cache)


def test_example1_two_steps_pass(ex1_report):
    assert ex1_report.status == PASS
    names = {v.inequality for v in ex1_report.verdicts}
    assert {"image:inner", "image:outer", "b/a<=c", "track:alpha<=beta"} <= names
    assert any(n.startswith("lemma:sq") for n in names) and any(n.startswith("lemma:notsq") for n in names)


def test_example1_ba_at_square_is_exactly_c(ex1_report):
    (v,) = ex1_report.by("b/a<=c")
    assert v.n == EX1_NSTAR and v.status == PASS
    assert v.slack.lo == XReal(0) and v.slack.hi == XReal(0)


def test_example1_inflated_beta_fails(ex1_params, ex1_cache):
    bov = ex1_params.c_power(Fraction(15, 16))
    rep = verify_example1(ex1_params, EX1_NSTAR, steps=1, beta_override=bov, spec_cache=ex1_cache)
    assert any(v.status == FAIL and v.inequality == "track:beta<=c^(7/8)" for v in rep.verdicts)


def test_example1_brackets_contain_verified_annulus(ex1_params, ex1_cache):
    spec, t, br = example1_brackets(ex1_params, EX1_NSTAR, ex1_cache)
    a, b = br["a"], br["b"]
    assert a.hi < XReal(1) < b.lo
    assert br["ratio"].lo > XReal(1)
    assert not br["flags"]


def test_example1_degree_check_and_controls(ex1_params, ex1_cache):
    spec, t, _ = example1_brackets(ex1_params, EX1_NSTAR, ex1_cache)
    d = zero_count_below(spec, t)
    assert d == EX1_NSTAR + 47
    assert all(v.status == PASS for v in example1_degree_check(ex1_params, EX1_NSTAR, spec_cache=ex1_cache))
    low = example1_degree_check(ex1_params, EX1_NSTAR, d - 1, ex1_cache)
    assert [v.status for v in low] == [FAIL, PASS]


def test_h_estimate_basepoint_and_positivity(ex1_params, ex1_cache):
    rep = example1_h_estimate(ex1_params, EX1_NSTAR, n_max=2, points=3, spec_cache=ex1_cache)
    z0 = [p for p in rep.points if p["point"] == "z0"]
    assert z0 and all(p["lo"] == "1" and p["hi"] == "1" for p in z0)
    others = [p for p in rep.points if p["point"] != "z0"]
    assert all(float(p["lo"]) > 0 for p in others)
    assert float(rep.info["a_bracket_upper"]) < 1 < float(rep.info["b_bracket_lower"])


def test_h_estimate_positions_override(ex1_params, ex1_cache):
    rep = example1_h_estimate(ex1_params, EX1_NSTAR, n_max=1, spec_cache=ex1_cache,
                              positions=[Fraction(1, 10), Fraction(9, 10)])
    last = [p for p in rep.points if p["point"] != "z0"]
    assert len(last) == 2 and float(last[0]["hi"]) < 1 < float(last[1]["lo"])
    with pytest.raises(ValueError):
        example1_h_estimate(ex1_params, EX1_NSTAR, n_max=1, spec_cache=ex1_cache, positions=[Fraction(3, 2)])


def test_h_estimate_monomial_is_exact():
    rep = h_estimate(ProductSpec(3), XReal(10), [XReal(5), XReal(20)], n_max=3)
    final = rep.info["h_final"]
    assert [float(x) for x in final[0]] == [0.5, 0.5] and [float(x) for x in final[1]] == [2.0, 2.0]


def test_stability_zero_polynomial_reproduces_base(ex1_params, ex1_cache, ex1_report):
    rep = stability_check(ex1_params, (), Fraction(1, 2), EX1_NSTAR, steps=1, spec_cache=ex1_cache)
    assert rep.status == PASS
    assert rep.steps[0]["image"] == ex1_report.steps[0]["image"]


def test_stability_cubic_passes_and_huge_degree_fails(ex1_params, ex1_cache):
    rep = stability_check(ex1_params, (XReal(5), XReal(0), XReal(0), XReal(1)), Fraction(1, 2), EX1_NSTAR,
                          steps=1, spec_cache=ex1_cache)
    assert rep.status == PASS
    coeffs = [XReal(0)] * 2000 + [XReal(1)]
    bad = stability_check(ex1_params, coeffs, Fraction(1, 2), EX1_NSTAR, steps=1, spec_cache=ex1_cache)
    assert any(v.status == FAIL and v.inequality.startswith("M-condition") for v in bad.verdicts)


@pytest.fixture(scope="module")
def ex2_params():
    return generate_example2(10, m_max=math.factorial(4) ** 2 + 3)


def test_example2_block3_passes(ex2_params):
    rep = verify_example2(ex2_params, 3, samples=12)
    assert rep.status == PASS
    assert len({v.n for v in rep.verdicts if v.inequality.startswith("(all)")}) >= 10
    assert rep.by("(bound)")


def test_example2_exclusion_is_load_bearing(ex2_params):
    rep = verify_example2(ex2_params, 3, samples=4, exclusion=False)
    (v,) = rep.by("(union):inner")
    assert v.status == INCONCLUSIVE and not v.slack.lo.is_finite()


def test_example3_defaults_pass_with_saturation():
    rep = verify_example3(generate_example3(n_max=4), (1, 2))
    assert rep.status == PASS
    assert rep.info["saturated_factors"]
    for name in ("(a):inner", "(a):outer", "(b):inner", "(b):outer", "(c)"):
        assert len(rep.by(name)) == 2


def test_example3_defaults_are_the_first_passing_pair():
    assert scan_example3_defaults() == (128, 64)


def test_report_serialization_is_deterministic(ex1_report):
    a, b = ex1_report.to_json(), ex1_report.to_json()
    assert a == b and json.loads(a)["status"] == PASS
    rows = list(csv.DictReader(io.StringIO(ex1_report.to_csv())))
    assert list(rows[0]) == ["report", "n", "inequality", "status", "margin_log10", "lo", "hi"]
    assert len(rows) == len(ex1_report.verdicts)


def test_empty_report_status():
    assert OrbitReport("x").status == PASS
