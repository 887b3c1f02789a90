"""Acceptance suite: eleven criteria, each run at 53 bits (timed against its
budget) and again at 113 bits, where every pass must still hold.

Run under pytest, or directly with ``python tests/test_acceptance.py`` for
the PASS/FAIL lines alone.
"""

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from mcwd.efun import ClassicExp, ProductSpec, ZeroTerm, jensen_mean, zero_count_below  # noqa: E402
from mcwd.orbits import (  # noqa: E402
    LogAnnulus,
    degree_check,
    example1_brackets,
    example1_degree_check,
    example1_h_estimate,
    scan_example1_start,
    scan_example3_defaults,
    stability_check,
    verify_example1,
    verify_example2,
    verify_example3,
)
from mcwd.schedules import (  # noqa: E402
    EX3_DEFAULTS,
    example1_spec,
    generate_example1,
    generate_example2,
    generate_example3,
    validate,
)
from mcwd.theorems import (  # noqa: E402
    CheckRequest,
    check_convexity,
    check_harnack,
    convexity_threshold,
    covering_lower_bound,
)
from mcwd.verdict import FAIL, INCONCLUSIVE, PASS  # noqa: E402
from mcwd.xlog import XInterval, XReal, iv_ln, iv_mul, working_precision  # noqa: E402

from conftest import EX1_N2, EX1_NSTAR  # noqa: E402
from oracles import containment_fuzz, covering_witnesses, jensen_closed_form  # noqa: E402

# frozen regression values, each re-derived by the criterion that uses it
EX1_CONVEXITY_THRESHOLD = "1.72693881975e+0"
EX3_DEFAULT_PAIR = (128, 64)


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)


def crit_schedule():
    p = generate_example1(10, 2, n_max=8)
    got = [p.log10_s_exact(n) for n in range(1, 9)]
    check(got == [1, 2, 6, 24, 144, 1008, 8064, 72576], f"log10 s_n = {got}")
    return "log10 s_1..s_8 exact"


def crit_example1():
    N2, rep = scan_example1_start(10, 2, steps=6, N2_max=EX1_N2 + 5)
    check(N2 == EX1_N2, f"scan found N2 = {N2}")
    check(rep.status == PASS, "six-step window does not pass")
    strict = [v for v in rep.verdicts if v.relation == "<"]
    check(len(strict) >= 24 and all(v.slack.lo > XReal(0) for v in strict), "non-positive margin")
    check(any(v.inequality.startswith("lemma:sq") for v in strict), "no (sq) containment judged")
    check(sum(v.inequality.startswith("image:") for v in strict) == 12, "image chain incomplete")
    ba = rep.by("b/a<=c")
    check(ba and all(v.status == PASS for v in ba), "b/a above c")
    params = generate_example1(10, 2, n_max=EX1_NSTAR + 8, N2=EX1_N2)
    bad = verify_example1(params, EX1_NSTAR, steps=1, beta_override=params.c_power(Fraction(15, 16)))
    nfail = sum(v.status == FAIL for v in bad.verdicts)
    check(nfail >= 1, "inflated beta track did not fail")
    return f"N* = {N2 * N2}, {len(strict)} strict verdicts, b/a checked at {[v.n for v in ba]}, control fails {nfail}"


def crit_example2():
    params = generate_example2(10, m_max=math.factorial(4) ** 2 + 3)
    rep = verify_example2(params, 3, samples=12)
    check(rep.status == PASS, "block n = 3 does not pass")
    ms = {v.n for v in rep.verdicts if v.inequality.startswith("(all)") and v.status == PASS}
    check(len(ms) >= 10, f"(all) on {len(ms)} values of m")
    check(rep.by("(bound)") and all(v.status == PASS for v in rep.by("(bound)")), "(bound) not passing")
    off = verify_example2(params, 3, samples=4, exclusion=False)
    u = off.by("(union):inner")
    check(u and u[0].status == INCONCLUSIVE and not u[0].slack.lo.is_finite(), "exclusion not load-bearing")
    return f"(all) on {len(ms)} m, (bound) pass, no-exclusion inconclusive"


def crit_example3():
    check(scan_example3_defaults() == EX3_DEFAULT_PAIR, "scan picks a different (m1, log S1)")
    check((EX3_DEFAULTS["m1"], EX3_DEFAULTS["log_S1"]) == EX3_DEFAULT_PAIR, "shipped defaults differ from the scan")
    p = generate_example3(n_max=4)
    vs = validate(p, [1, 2, 3])
    check(vs and all(v.status == PASS for v in vs), "(j)-(m) not passing")
    rep = verify_example3(p, (1, 2))
    check(rep.status == PASS, "(a)/(b) not passing")
    for name in ("(a):inner", "(a):outer", "(b):inner", "(b):outer"):
        check(sorted(v.n for v in rep.by(name)) == [1, 2], f"{name} missing")
    check(rep.info["saturated_factors"], "no saturated factor")
    return f"(j)-(m) n=1..3, (a),(b) n=1..2, {len(rep.info['saturated_factors'])} saturated factors"


def crit_convexity():
    cs = (XReal("1.1"), XReal(2), XReal(5))
    mono = check_convexity(CheckRequest(ProductSpec(5), (XReal(3), XReal(100)), cs))
    check(all(v.status == PASS and v.slack.lo == v.slack.hi == XReal(0) for v in mono), "monomial margin")
    radii = tuple(iv_ln(XReal(r)).mid() for r in (10, 100))
    ex = check_convexity(CheckRequest(ClassicExp(), radii, cs))
    check(len(ex) == 8 and all(v.status == PASS for v in ex), "exp fails")
    l10 = iv_ln(XReal(10))
    grid = tuple(iv_mul(XReal(Fraction(x)), l10).mid()
                 for x in ("0.25", "0.5", "0.75", "1.0", "1.25", "1.5", "2.0", "3.0", "5.0", "10.0"))
    spec = example1_spec(generate_example1(10, 2, n_max=10), 9)
    th = convexity_threshold(spec, grid, cs)
    check(th is not None and th.to_str(12) == EX1_CONVEXITY_THRESHOLD, f"threshold {th}")
    return f"monomial margin 0, exp pass, Example 1 threshold log r = {th.to_str(12)}"


def crit_harnack():
    vs = check_harnack(ProductSpec(3), 10000, "0.2", "0.8", eps_values=["0.1", "0.2"], points=5,
                       log_scale=iv_ln(XReal(2)).mid())
    body = [v for v in vs if v.inequality == "harnack"]
    check(len(body) == 10 and all(v.status == PASS for v in vs), "monomial harnack")
    worst = 0.0
    for v in body:
        eps = Fraction(v.data["eps"])
        logM = 3 * Fraction(v.data["log_rho"]) + Fraction(math.log(2))
        ref = 2 * math.pi / (float(eps) * 10000) * float(logM)
        worst = max(worst, abs(float(v.slack.mid()) - ref) / ref)
    check(worst < 1e-10, f"relative error {worst:.2e}")
    z = lambda la: ZeroTerm(XInterval.point(XReal(la)), 1)  # noqa: E731
    pb = check_harnack(ProductSpec(3, (z(5), z(20000))), 10000, "0.2", "0.8", points=5,
                       log_scale=iv_ln(XReal(2)).mid())
    check(sum(v.inequality == "harnack:b" for v in pb) == 5 and all(v.status == PASS for v in pb), "part (b)")
    return f"monomial margin rel. error {worst:.1e}, part (b) passes on perturbed product"


def crit_covering():
    spec = ProductSpec(1, (ZeroTerm(iv_ln(XReal(10)), 1),))
    A, _ = covering_lower_bound(spec, LogAnnulus(iv_ln(XReal(20)).mid(), iv_ln(XReal(100)).mid()))
    inner, outer = math.exp(float(A.log_inner)), math.exp(float(A.log_outer))
    check(abs(inner - 60) < 1e-9 and abs(outer - 900) < 1e-9, f"A({inner}, {outer})")
    count, missing = covering_witnesses([0, 1, -0.1], 20, 100, inner, outer)
    check(count == 4096 and not missing, f"{len(missing)} witnesses without preimage")
    return "A(60, 900), 4096/4096 witnesses covered"


def crit_h():
    params = generate_example1(10, 2, n_max=EX1_NSTAR + 12, N2=EX1_N2)
    rep = example1_h_estimate(params, EX1_NSTAR, n_max=6, points=5)
    z0 = [p for p in rep.points if p["point"] == "z0"]
    check(z0 and all(p["lo"] == "1" and p["hi"] == "1" for p in z0), "h_n(z0) != [1, 1]")
    last = [p for p in rep.points if p["point"] != "z0" and p["n"] == 6]
    check(len(last) == 5, "expected 5 points at n = 6")
    wmax = max(float(p["hi"]) - float(p["lo"]) for p in last)
    check(wmax < 0.05, f"width {wmax}")
    for d in rep.info["diffs"]:
        tail = [float(x) for x in d[-3:]]
        check(tail[0] > tail[1] > tail[2], f"differences not decreasing: {tail}")
    a_up, b_lo = float(rep.info["a_bracket_upper"]), float(rep.info["b_bracket_lower"])
    check(a_up < 1 < b_lo, "a/b brackets")
    return f"max width {wmax:.1e}, a < {a_up:.4f}, b > {b_lo:.4f}"


def crit_jensen_degree():
    rng = random.Random(2024)
    for _ in range(1000):
        p = rng.randint(0, 4)
        las = sorted(Fraction(rng.randint(-64, 640), 16) for _ in range(rng.randint(0, 8)))
        spec = ProductSpec(p, tuple(ZeroTerm(XInterval.point(XReal(la)), 1) for la in las))
        t = Fraction(rng.randint(-128, 1280), 32)
        check(jensen_mean(spec, XReal(t), exact=True) == jensen_closed_form(p, las, t), "Jensen mismatch")
    params = generate_example1(10, 2, n_max=EX1_NSTAR + 8, N2=EX1_N2)
    cache = {}
    spec, t, _ = example1_brackets(params, EX1_NSTAR, cache)
    d = zero_count_below(spec, t)
    ok = example1_degree_check(params, EX1_NSTAR, spec_cache=cache)
    check(all(v.status == PASS for v in ok), "degree check at N*")
    mono = degree_check(ProductSpec(5), XReal(40), XInterval(XReal(0), XReal(0)), count=6)
    check(any(v.status == FAIL for v in mono), "d+1 control on z^5 passed")
    low = example1_degree_check(params, EX1_NSTAR, d - 1, cache)
    check(any(v.status == FAIL for v in low), "d-1 control on Example 1 passed")
    return f"1000 exact Jensen identities, d = {d} at N*, d+1 (z^5) and d-1 (Example 1) fail"


def crit_stability():
    params = generate_example1(10, 2, n_max=EX1_NSTAR + 10, N2=EX1_N2)
    rep = stability_check(params, (XReal(5), XReal(0), XReal(0), XReal(1)), Fraction(1, 2), EX1_NSTAR, steps=4)
    check(rep.status == PASS, "perturbed run does not pass")
    check(any(v.inequality.startswith("M-condition") for v in rep.verdicts), "no M-condition verdict")
    check(len(rep.steps) == 4, "expected four (gA) steps")
    zero = stability_check(params, (), Fraction(1, 2), EX1_NSTAR, steps=4)
    base = verify_example1(params, EX1_NSTAR, steps=4)
    check([s["image"] for s in zero.steps] == [s["image"] for s in base.steps], "P = 0 differs from base")
    return "M-condition and 4 (gA) steps pass, P = 0 bit-identical"


def crit_kernel():
    n, bad = containment_fuzz(100_000, seed=11)
    check(n == 100_000 and not bad, f"{len(bad)} containment violations")
    return "100000 cases, 0 violations"


CRITERIA = [
    (1, "schedule", 1, crit_schedule),
    (2, "Example 1", 60, crit_example1),
    (3, "Example 2", 120, crit_example2),
    (4, "Example 3", 60, crit_example3),
    (5, "convexity", 10, crit_convexity),
    (6, "Harnack", 10, crit_harnack),
    (7, "covering", 30, crit_covering),
    (8, "h convergence", 60, crit_h),
    (9, "Jensen/degree", 10, crit_jensen_degree),
    (10, "stability", 60, crit_stability),
    (11, "kernel", 120, crit_kernel),
]


def run_criterion(fn, bits):
    t0 = time.perf_counter()
    with working_precision(bits):
        try:
            detail, ok = fn(), True
        except AssertionError as exc:
            detail, ok = str(exc), False
    return ok, detail, time.perf_counter() - t0


def evaluate(num, title, limit, fn):
    ok53, detail, t53 = run_criterion(fn, 53)
    ok113, detail113, t113 = run_criterion(fn, 113)
    ok = ok53 and ok113 and t53 < limit
    why = detail if ok53 else f"53-bit: {detail}"
    if ok53 and not ok113:
        why = f"113-bit: {detail113}"
    elif ok53 and t53 >= limit:
        why = f"{t53:.1f} s over the {limit} s budget"
    line = f"{'PASS' if ok else 'FAIL'} criterion {num:2d} ({title}): {why} [53-bit {t53:.1f} s, 113-bit {t113:.1f} s]"
    return ok, line


@pytest.mark.slow
@pytest.mark.parametrize("num,title,limit,fn", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, limit, fn, capsys):
    ok, line = evaluate(num, title, limit, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
