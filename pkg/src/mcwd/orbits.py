"""Annulus propagation and the containment chains of the three examples.

Radii are carried as log-moduli.  For the product examples the image of a
zero-free annulus is bounded through the affine envelope
``log|f| in d t - C + corr`` (see :func:`mcwd.efun.envelope`), so every
inequality whose two sides are linear in ``t = log|z|`` is judged over the
whole radius range by looking at its two endpoints.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .efun import (
    ClassicExp,
    Exclusion,
    LevelRadius,
    MixedSumSpec,
    Perturbed,
    ProductSpec,
    TruncationError,
    envelope,
    log_modulus_bounds,
    max_modulus,
    mixed_log_modulus,
    modulus_interval,
    poly_log_max_modulus,
    zero_count_below,
)
from .schedules import (
    Example1Params,
    Example2Params,
    Example3Params,
    ScheduleError,
    example1_spec,
    example1_track_verdicts,
    example2_spec,
    example3_spec,
    generate_example1,
    generate_example3,
)
from .verdict import FAIL, INCONCLUSIVE, PASS, CheckVerdict, judge, worst_status
from .xlog import (
    DomainError,
    XInterval,
    XReal,
    iv,
    iv_add,
    iv_div,
    iv_exp,
    iv_ln,
    iv_logsubexp,
    iv_logsumexp,
    iv_mul,
    iv_sub,
    ln2_interval,
    xr,
)

__all__ = [
    "LogAnnulus",
    "OrbitReport",
    "CheckVerdict",
    "propagate_annulus",
    "example1_lemma_verdicts",
    "verify_example1",
    "scan_example1_start",
    "verify_example2",
    "verify_example3",
    "scan_example3_defaults",
    "h_estimate",
    "example1_h_estimate",
    "maximal_annulus_brackets",
    "degree_check",
    "example1_brackets",
    "example1_degree_check",
    "stability_check",
]


@dataclass(frozen=True)
class LogAnnulus:
    """``A(exp(log_inner), exp(log_outer))``."""

    log_inner: XReal
    log_outer: XReal

    def __post_init__(self):
        object.__setattr__(self, "log_inner", xr(self.log_inner))
        object.__setattr__(self, "log_outer", xr(self.log_outer))
        if not (self.log_inner.is_finite() and self.log_outer.is_finite()):
            raise ValueError("annulus radii must be finite")
        if not self.log_inner < self.log_outer:
            raise ValueError("need log_inner < log_outer")

    @property
    def t_range(self) -> XInterval:
        return XInterval(self.log_inner, self.log_outer)


@dataclass
class OrbitReport:
    name: str
    verdicts: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    points: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return worst_status(self.verdicts)

    def by(self, inequality: str) -> list:
        return [v for v in self.verdicts if v.inequality == inequality]

    def sorted_verdicts(self) -> list:
        return sorted(self.verdicts, key=lambda v: (-1 if v.n is None else v.n, v.inequality))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "verdicts": [v.to_dict() for v in self.sorted_verdicts()],
            "steps": self.steps,
            "points": self.points,
            "info": self.info,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["report", "n", "inequality", "status", "margin_log10", "lo", "hi"])
        for v in self.sorted_verdicts():
            d = v.to_dict()
            w.writerow([self.name, d["n"], d["inequality"], d["status"], d["margin_log10"], d["lo"], d["hi"]])
        return buf.getvalue()


def _t_range(A) -> XInterval:
    if isinstance(A, LogAnnulus):
        return A.t_range
    return iv(A)


def _split_range(T: XInterval, pieces: int) -> list:
    if pieces <= 1 or T.is_point():
        return [T]
    w = iv_div(iv_sub(T.hi, T.lo), XReal(pieces))
    cuts = [T.lo] + [iv_add(T.lo, iv_mul(w, XReal(i))).mid() for i in range(1, pieces)] + [T.hi]
    return [XInterval(a, b) for a, b in zip(cuts, cuts[1:]) if a <= b]


def propagate_annulus(spec, A, exclusions=(), grid: int = 8) -> XInterval:
    """Enclosure ``[lower bound of min log|f|, upper bound of max log|f|]`` over
    the closed annulus ``A`` (a :class:`LogAnnulus` or a log-radius interval).

    The maximum is ``log M`` at the outer radius (M increases with r).  The
    minimum is bounded below on ``grid`` radius slices, split further at the
    moduli of zeros inside the range; a zero in the range (without an
    exclusion) gives ``-inf``.
    """
    T = _t_range(A)
    if isinstance(spec, MixedSumSpec):
        slices = _split_range(T, grid)
        encl = [modulus_interval(spec, s) for s in slices]
        lo = min((e.lo for e in encl), key=lambda x: x)
        hi = max((e.hi for e in encl), key=lambda x: x)
        return XInterval(lo, hi)
    if isinstance(spec, ProductSpec):
        hi = max_modulus(spec, T.hi).hi
        cuts = [T.lo]
        for z in spec.zeros:
            if T.lo < z.log_modulus.lo and z.log_modulus.hi < T.hi:
                cuts.extend([z.log_modulus.lo, z.log_modulus.hi])
        cuts.append(T.hi)
        lo = None
        for a, b in zip(cuts, cuts[1:]):
            for s in _split_range(XInterval(a, b), grid):
                e = log_modulus_bounds(spec, s, exclusions)
                lo = e.lo if lo is None or e.lo < lo else lo
        return XInterval(lo, hi)
    if isinstance(spec, Perturbed):
        base = propagate_annulus(spec.base, T, exclusions, grid)
        p = poly_log_max_modulus(spec.coefficients, T.hi)
        return _perturb(base, p)
    if isinstance(spec, ClassicExp):
        return modulus_interval(spec, T)
    raise TypeError(f"unsupported spec {type(spec).__name__}")


def _perturb(base: XInterval, p: XInterval | None) -> XInterval:
    """``|f| -/+ M(r, P)`` applied to a modulus enclosure; identity when P = 0."""
    if p is None:
        return base
    hi = iv_logsumexp(iv(base.hi), iv(p.hi)).hi
    if base.lo.is_finite() and base.lo > p.hi:
        lo = iv_logsubexp(iv(base.lo), iv(p.hi)).lo
    else:
        lo = XReal.ninf()
    return XInterval(lo, hi)


def _above(lo: XReal) -> XInterval:
    """Slack known only from below."""
    return XInterval(lo, XReal.inf())


def _guarded(name: str, n, slack_fn, relation: str = "<") -> CheckVerdict:
    """Judge ``slack_fn()``; an unbounded bound (log 0 or a saturated upper
    end) leaves the verdict inconclusive instead of raising."""
    try:
        s = slack_fn()
    except DomainError as exc:
        return judge(name, n, XInterval.whole(), relation, detail=f"unbounded: {exc}")
    return judge(name, n, s, relation)


def _linear_min(coef: XInterval, const: XInterval, T: XInterval) -> XInterval:
    """Enclosure of ``min_t (coef t + c(t))`` over t in T, where c(t) may be
    anywhere in ``const``: the minimum of a linear function is at an end."""
    vals = [iv_add(iv_mul(coef, iv(t)), const) for t in (T.lo, T.hi)]
    return XInterval(min(v.lo for v in vals), min(v.hi for v in vals))


def _step_slacks(spec: ProductSpec, T: XInterval, inner: XInterval, outer: XInterval, coeffs=()) -> tuple:
    """Image enclosure of ``A(T)`` under ``f + P`` and the two containment
    slacks ``min|g| - inner`` and ``outer - max|g|`` as two-sided enclosures.

    The envelope bounds log|f| at every radius, so ``min|f|`` lies below the
    envelope's top at the inner radius and ``max|f|`` above its bottom at the
    outer radius.  With P = 0 no perturbation arithmetic is done at all.
    """
    env = envelope(spec, T)
    at_in, at_out = env.at(T.lo), env.at(T.hi)
    min_lo, min_hi = at_in.lo, at_in.hi
    max_lo, max_hi = at_out.lo, at_out.hi
    p = poly_log_max_modulus(coeffs, T.hi) if coeffs else None
    if p is not None:
        p_in = poly_log_max_modulus(coeffs, T.lo)
        min_lo = _perturb(XInterval(min_lo, min_hi), p).lo
        min_hi = iv_logsumexp(iv(min_hi), iv(p_in.hi)).hi
        max_lo = _perturb(XInterval(max_lo, max_hi), p).lo
        max_hi = iv_logsumexp(iv(max_hi), iv(p.hi)).hi
    img = XInterval(min_lo, max_hi)
    s_in = iv_sub(XInterval(min_lo, min_hi), inner) if min_lo.is_finite() else XInterval(XReal.ninf(), iv_sub(iv(min_hi), inner).hi)
    s_out = iv_sub(outer, XInterval(max_lo, max_hi)) if max_lo.is_finite() else XInterval(iv_sub(outer, iv(max_hi)).lo, XReal.inf())
    return env, img, s_in, s_out


# ---------------------------------------------------------------------------
# Example 1


def _ex1_spec_for(params: Example1Params, n: int, cache: dict | None = None) -> ProductSpec:
    K = min(params.n_max - 1, n + 2)
    if cache is not None and K in cache:
        return cache[K]
    spec = example1_spec(params, K)
    if cache is not None:
        cache[K] = spec
    return spec


def _lemma_range(params: Example1Params, n: int) -> XInterval:
    L = params.log_s(n)
    return XInterval(iv_mul(params.c_power(Fraction(1, 8)), L).lo, iv_mul(params.c_power(Fraction(7, 8)), L).hi)


def _lemma_pair(params: Example1Params, n: int, spec: ProductSpec) -> list:
    """Per-radius form of the one-step lemma on ``k in [c^(1/8), c^(7/8)]``:
    ``k (1 - eps) log s_{n+1} < log|f(z)| < k (1 + eps) log s_{n+1}`` at
    ``|z| = s_n**k``.  Both slacks are linear in ``t = k log s_n``."""
    T = _lemma_range(params, n)
    eps = params.lemma_eps(n)
    D = XReal(params.P(n + 1) // params.P(n))
    branch = "sq" if math.isqrt(n) ** 2 == n else "notsq"
    names = (f"lemma:{branch}:lower", f"lemma:{branch}:upper")
    try:
        env = envelope(spec, T)
    except TruncationError as exc:
        return [judge(k, n, XInterval.whole(), detail=str(exc)) for k in names]
    except DomainError:
        # a zero on a circle of the range makes the lower inequality false there
        inside = any(T.lo <= z.log_modulus.lo and z.log_modulus.hi <= T.hi for z in spec.zeros)
        s = XInterval(XReal.ninf(), XReal(-1)) if inside else XInterval.whole()
        status = FAIL if inside else INCONCLUSIVE
        return [CheckVerdict(names[0], n, status, s, "<", None, "zero in range"),
                judge(names[1], n, XInterval.whole(), detail="zero in range")]
    e_lo = XInterval(XReal(Fraction(1) - eps, rnd="f"), XReal(Fraction(1) - eps, rnd="c"))
    e_hi = XInterval(XReal(Fraction(1) + eps, rnd="f"), XReal(Fraction(1) + eps, rnd="c"))
    d = iv(XReal(env.degree))
    # lower: d t - C + corr - (1-eps) D t
    lo_slack = _linear_min(iv_sub(d, iv_mul(e_lo, D)), iv_sub(env.corr, env.const), T)
    # upper: (1+eps) D t - d t + C - corr
    up_slack = _linear_min(iv_sub(iv_mul(e_hi, D), d), iv_sub(env.const, env.corr), T)
    return [
        judge(names[0], n, lo_slack, degree=env.degree),
        judge(names[1], n, up_slack, degree=env.degree),
    ]


def example1_lemma_verdicts(params: Example1Params, n_values) -> list:
    out = []
    cache: dict = {}
    for n in n_values:
        if n + 3 > params.n_max:
            raise ScheduleError("schedule too short for the lemma check", n + 3)
        out.extend(_lemma_pair(params, n, _ex1_spec_for(params, n, cache)))
    return out


def _ex1_annulus(params: Example1Params, n: int, beta_override: XInterval | None = None) -> tuple:
    """(inner, outer) log-radius enclosures of ``A(s_n**alpha_n, s_n**beta_n)``."""
    L = params.log_s(n)
    b = params.beta(n) if beta_override is None else beta_override
    return iv_mul(params.alpha(n), L), iv_mul(b, L)


def _ex1_step(params: Example1Params, n: int, spec: ProductSpec, bov=None, coeffs=(), prefix="image") -> tuple:
    """Verdicts and step record for ``g(A_n) in A_{n+1}``, g = f + P."""
    r_in, r_out = _ex1_annulus(params, n, bov)
    t_in, t_out = _ex1_annulus(params, n + 1, bov)
    T = XInterval(r_in.lo, r_out.hi)
    step = {"n": n, "input": [T.lo.to_str(), T.hi.to_str()], "target": [t_in.lo.to_str(), t_out.hi.to_str()]}
    try:
        env, img, s_in, s_out = _step_slacks(spec, T, t_in, t_out, coeffs)
    except DomainError as exc:
        w = XInterval.whole()
        return [judge(f"{prefix}:inner", n, w, detail=str(exc)), judge(f"{prefix}:outer", n, w, detail=str(exc))], step
    step["image"] = [img.lo.to_str(), img.hi.to_str()]
    step["degree"] = env.degree
    return [judge(f"{prefix}:inner", n, s_in), judge(f"{prefix}:outer", n, s_out)], step


def verify_example1(
    params: Example1Params,
    n_start: int,
    steps: int = 6,
    beta_override=None,
    spec_cache: dict | None = None,
) -> OrbitReport:
    """The (sq)/(notsq) containments, the track chain ``f(A_n) in A_{n+1}`` and the b/a
    bracket at square indices, for ``n_start <= n < n_start + steps``.

    ``beta_override`` replaces every beta_n by a constant (negative control).
    """
    rep = OrbitReport("example1")
    cache = {} if spec_cache is None else spec_cache
    bov = None if beta_override is None else iv(beta_override)
    ns = list(range(n_start, n_start + steps))
    if ns and ns[-1] + 4 > params.n_max:
        raise ScheduleError("schedule too short for the requested steps", ns[-1] + 4)
    lo8, hi8 = params.c_power(Fraction(1, 8)), params.c_power(Fraction(7, 8))
    for n in ns + [ns[-1] + 1] if ns else []:
        b = params.beta(n) if bov is None else bov
        a = params.alpha(n)
        rep.verdicts.append(judge("track:alpha>=c^(1/8)", n, iv_sub(a, lo8), "<="))
        rep.verdicts.append(judge("track:alpha<=beta", n, iv_sub(b, a), "<="))
        rep.verdicts.append(judge("track:beta<=c^(7/8)", n, iv_sub(hi8, b), "<="))
    for n in ns:
        spec = _ex1_spec_for(params, n, cache)
        rep.verdicts.extend(_lemma_pair(params, n, spec))
        vs, step = _ex1_step(params, n, spec, bov)
        rep.verdicts.extend(vs)
        r_in, r_out = _ex1_annulus(params, n, bov)
        T = XInterval(r_in.lo, r_out.hi)
        if math.isqrt(n) ** 2 == n:
            rep.verdicts.append(_ba_verdict(params, n, T))
        else:
            step["ba_bracket"] = _ba_bracket_exact(params, n, T)
        rep.steps.append(step)
    rep.info["n_start"] = n_start
    rep.info["steps"] = steps
    rep.info["N2"] = params.N2
    rep.info["track"] = params.track
    return rep


def _nearest_zero_exponents(params: Example1Params, n: int, T: XInterval) -> tuple:
    L = params.log_s(n)
    k_lo = iv_div(iv(T.lo), L).lo
    k_hi = iv_div(iv(T.hi), L).hi
    below = above = None
    for e, kind, i in params.zero_exponents(n):
        if XReal(e, rnd="c") < k_lo:
            below = (e, kind, i)
        elif XReal(e, rnd="f") > k_hi and above is None:
            above = (e, kind, i)
    return below, above


def _ba_bracket_exact(params: Example1Params, n: int, T: XInterval) -> dict:
    below, above = _nearest_zero_exponents(params, n, T)
    d = {"below": None if below is None else f"{below[1]}[{below[2]}]",
         "above": None if above is None else f"{above[1]}[{above[2]}]"}
    if below is not None and above is not None:
        d["ratio_upper"] = XReal(above[0] / below[0], rnd="c").to_str(12)
    return d


def _ba_verdict(params: Example1Params, n: int, T: XInterval) -> CheckVerdict:
    """b/a <= c at a square index: the annulus sits between the zeros s_n and
    s_n**c, so the bracket's upper end is their exponent ratio (exact)."""
    below, above = _nearest_zero_exponents(params, n, T)
    if below is None or above is None:
        return judge("b/a<=c", n, XInterval.whole(), "<=", detail="unbounded-in-scan")
    ratio = above[0] / below[0]
    slack = params.c_frac - ratio
    return judge("b/a<=c", n, iv(XReal(slack, rnd="f"), XReal(slack, rnd="c")), "<=",
                 below=f"{below[1]}[{below[2]}]", above=f"{above[1]}[{above[2]}]",
                 ratio_upper=XReal(ratio).to_str(12))


def scan_example1_start(
    s1=10, c=2, steps: int = 6, N2_min: int = 2, N2_max: int = 80, track: str = "corrected"
) -> tuple:
    """Smallest N2 such that the window ``N2**2 .. N2**2 + steps`` verifies.

    Track bounds are checked first (cheap); the product is evaluated only
    for candidates whose tracks stay in range.  Returns ``(N2, report)`` or
    ``(None, None)``.
    """
    for N2 in range(N2_min, N2_max + 1):
        start = N2 * N2
        params = generate_example1(s1, c, n_max=start + steps + 5, N2=N2, track=track)
        tv = example1_track_verdicts(params, range(start, start + steps + 1))
        if any(v.status != PASS for v in tv):
            continue
        rep = verify_example1(params, start, steps)
        if rep.status == PASS:
            rep.info["N_star"] = start
            return N2, rep
    return None, None


# ---------------------------------------------------------------------------
# brackets and degree


def maximal_annulus_brackets(spec: ProductSpec, verified: XInterval, log_r, scan_bound=None) -> dict:
    """Brackets for ``a_n, b_n`` of the maximal annulus around a verified one.

    The maximal annulus contains the verified range and meets no zero, so
    ``a_n log r_n`` lies between the nearest zero below and the verified inner
    radius, and ``b_n log r_n`` between the verified outer radius and the
    nearest zero above.  Without a zero above (up to ``scan_bound`` or the
    tail cutoff) the outer bracket is flagged ``unbounded-in-scan``.
    """
    T = iv(verified)
    t = iv(log_r)
    below = above = None
    for z in spec.zeros:
        if z.log_modulus.hi < T.lo:
            below = z.log_modulus
        elif z.log_modulus.lo > T.hi and above is None:
            above = z.log_modulus
    bound = scan_bound if scan_bound is not None else spec.cutoff()
    flags = []
    a_lo = iv_div(below, t).lo if below is not None else XReal(0)
    a_hi = iv_div(iv(T.lo), t).hi
    b_lo = iv_div(iv(T.hi), t).lo
    if above is not None and (bound is None or above.lo <= xr(bound)):
        b_hi = iv_div(above, t).hi
    else:
        b_hi = XReal.inf() if bound is None else iv_div(iv(xr(bound)), t).hi
        flags.append("unbounded-in-scan")
    ratio_lo = iv_div(iv(T.hi), iv(T.lo)).lo
    if above is not None and below is not None and "unbounded-in-scan" not in flags:
        ratio_hi = iv_div(above, below).hi
    else:
        ratio_hi = XReal.inf()
    return {
        "a": XInterval(a_lo, a_hi),
        "b": XInterval(b_lo, b_hi),
        "ratio": XInterval(ratio_lo, ratio_hi),
        "flags": flags,
    }


def degree_check(spec: ProductSpec, log_r, a_bracket: XInterval, count: int | None = None, delta=None) -> list:
    """Degree bounds ``(1 - 2 delta) log M / log r <= d <= log M / ((1 - a) log r)``.

    ``d`` defaults to the number of zeros in ``|z| < r`` (origin included);
    pass ``count`` to test a deliberately wrong value.  ``delta`` defaults to
    ``1/sqrt(log r)``.  The upper bound uses the smallest ``a`` in the
    bracket, which is the worst case.
    """
    t = xr(log_r)
    d = zero_count_below(spec, t) if count is None else int(count)
    logM = max_modulus(spec, t)
    T = iv(t)
    dl = iv_exp(iv_mul(XReal(-0.5), iv_ln(T))) if delta is None else iv(delta)
    lower = iv_div(iv_mul(iv_sub(XReal(1), iv_mul(XReal(2), dl)), logM), T)
    a = iv(a_bracket)
    upper = iv_div(logM, iv_mul(iv_sub(XReal(1), iv(a.lo)), T))
    return [
        judge("degree:lower", None, iv_sub(XReal(d), lower), "<=", d=d),
        judge("degree:upper", None, iv_sub(upper, XReal(d)), "<=", d=d),
    ]


def example1_brackets(params: Example1Params, n: int, spec_cache: dict | None = None) -> tuple:
    """(spec, log r, brackets) at step n, with r the middle circle of the
    tracked annulus ``A_n`` and the brackets of :func:`maximal_annulus_brackets`."""
    spec = _ex1_spec_for(params, n, {} if spec_cache is None else spec_cache)
    r_in, r_out = _ex1_annulus(params, n)
    T = XInterval(r_in.lo, r_out.hi)
    t = T.mid()
    return spec, t, maximal_annulus_brackets(spec, T, t)


def example1_degree_check(params: Example1Params, n: int, count: int | None = None,
                          spec_cache: dict | None = None) -> list:
    """:func:`degree_check` at the middle circle of ``A_n``."""
    spec, t, br = example1_brackets(params, n, spec_cache)
    return degree_check(spec, t, br["a"], count)


# ---------------------------------------------------------------------------
# h estimates


def _image_of_range(spec, T: XInterval) -> XInterval:
    if isinstance(spec, ProductSpec):
        try:
            env = envelope(spec, T)
            return XInterval(env.at(T.lo).lo, env.at(T.hi).hi)
        except DomainError:
            return propagate_annulus(spec, T)
    return propagate_annulus(spec, T)


def h_estimate(spec_for_level, log_z0, log_points, n_max: int, spec_key=None) -> OrbitReport:
    """Enclosures of ``h_n(z) = log|f^n(z)| / log|f^n(z0)|`` by modulus-only
    propagation of each point's log-modulus.

    ``spec_for_level`` is a spec or a callable ``t -> spec`` (large examples
    need a truncation adapted to the current radius).
    """
    get = spec_for_level if callable(spec_for_level) else (lambda t: spec_for_level)
    rep = OrbitReport("h_estimate")
    T0 = iv(xr(log_z0))
    pts = [iv(xr(p)) for p in log_points]
    prev = [None] * len(pts)
    diffs = [[] for _ in pts]
    width_fail = False
    for n in range(1, n_max + 1):
        T0 = _image_of_range(get(T0.hi), T0)
        new = []
        for j, P in enumerate(pts):
            P = _image_of_range(get(P.hi), P)
            new.append(P)
            h = iv_div(P, T0)
            hd = {"point": j, "n": n, "lo": h.lo.to_str(), "hi": h.hi.to_str(), "width": h.width().to_str(6)}
            if prev[j] is not None:
                dmax = max(abs(float(h.hi - prev[j].lo)), abs(float(h.lo - prev[j].hi)))
                diffs[j].append(dmax)
                hd["diff_upper"] = repr(dmax)
            if h.width() > XReal(1):
                width_fail = True
                hd["status"] = INCONCLUSIVE
            rep.points.append(hd)
            prev[j] = h
        pts = new
        rep.points.append({"point": "z0", "n": n, "lo": "1", "hi": "1", "width": "0"})
    last = [prev[j] for j in range(len(pts))]
    rep.info["a_bracket_upper"] = min((h.hi for h in last), key=lambda x: x).to_str(12) if last else None
    rep.info["b_bracket_lower"] = max((h.lo for h in last), key=lambda x: x).to_str(12) if last else None
    rep.info["diffs"] = [[repr(x) for x in d] for d in diffs]
    rep.info["width_blowup"] = width_fail
    rep.info["h_final"] = [[h.lo.to_str(), h.hi.to_str()] for h in last]
    return rep


def example1_h_estimate(params: Example1Params, N: int, n_max: int = 6, points: int = 5,
                        spec_cache: dict | None = None, positions=None) -> OrbitReport:
    """h-estimate on Example 1 for ``points`` radii spread evenly across the
    verified annulus ``A_N`` (none on the middle circle, which carries z0).

    ``positions`` overrides the spread: relative log-positions in (0, 1).
    """
    cache = {} if spec_cache is None else spec_cache
    if N + n_max + 3 > params.n_max:
        raise ScheduleError("schedule too short for the h-estimate", N + n_max + 3)
    r_in, r_out = _ex1_annulus(params, N)
    lo, hi = r_in.hi, r_out.lo
    # spacing 1/(points + 2) keeps every test circle off the middle one
    step = iv_div(iv_sub(hi, lo), XReal(points + 2))
    pts = [iv_add(lo, iv_mul(step, XReal(i))).mid() for i in range(1, points + 1)]
    if positions is not None:
        width = iv_sub(hi, lo)
        pts = []
        for u in positions:
            u = xr(u)
            if not XReal(0) < u < XReal(1):
                raise ValueError("positions must lie in (0, 1)")
            pts.append(iv_add(lo, iv_mul(width, u)).mid())
    z0 = XInterval(lo, hi).mid()
    logs = [params.log_s(n).lo for n in range(1, params.n_max + 1)]

    def spec_at(t):
        n = max(i + 1 for i, L in enumerate(logs) if L <= t)
        return _ex1_spec_for(params, n, cache)

    rep = h_estimate(spec_at, z0, pts, n_max)
    rep.info["N"] = N
    return rep


# ---------------------------------------------------------------------------
# stability


def stability_check(
    params: Example1Params,
    coefficients,
    alpha_exp,
    n_start: int,
    steps: int = 4,
    spec_cache: dict | None = None,
) -> OrbitReport:
    """g = f + P along the Example 1 track: the growth condition
    ``M(r, P) <= M(r, f)**alpha_exp`` at both radii of every track annulus,
    and ``g(A_n) in A_{n+1}`` for ``steps`` consecutive n.  Also reports
    ``(1/n) log log r_n``."""
    rep = OrbitReport("stability")
    cache = {} if spec_cache is None else spec_cache
    coeffs = tuple(coefficients)
    ae = iv(xr(alpha_exp))
    growth = []
    for n in range(n_start, n_start + steps):
        spec = _ex1_spec_for(params, n, cache)
        r_in, r_out = _ex1_annulus(params, n)
        for tag, t in (("inner", r_in.lo), ("outer", r_out.hi)):
            p = poly_log_max_modulus(coeffs, t)
            mf = max_modulus(spec, t)
            if p is None:
                # M(r, 0) = 0: the slack is infinite
                slack = XInterval(iv_mul(ae, iv(mf.lo)).lo, XReal.inf())
                rep.verdicts.append(CheckVerdict(f"M-condition:{tag}", n, PASS, slack, "<=", None, "P = 0"))
                continue
            rep.verdicts.append(judge(f"M-condition:{tag}", n, iv_sub(iv_mul(ae, mf), p), "<=", log_r=t.to_str(12)))
        vs, step = _ex1_step(params, n, spec, None, coeffs, "gA")
        rep.verdicts.extend(vs)
        rep.steps.append(step)
        T = XInterval(r_in.lo, r_out.hi)
        ll = iv_ln(iv(T.lo))
        growth.append({"n": n, "loglog_r_over_n": iv_div(ll, XReal(n)).mid().to_str(8)})
    rep.info["growth"] = growth
    rep.info["coefficients"] = [xr(c).to_str() for c in coeffs]
    rep.info["alpha_exp"] = ae.lo.to_str()
    return rep


# ---------------------------------------------------------------------------
# Example 2


def _ex2_lemma(params: Example2Params, n: int, m: int, spec: ProductSpec) -> list:
    """``(k - 2/m^1.5) log s_{m+1} < log|f| < k log s_{m+1}`` on ``|z| = s_m**k``,
    ``1 <= k <= n! - 1``."""
    L = params.log_s(m)
    b = params.b_track(n)
    T = XInterval(L.lo, iv_mul(XReal(b), L).hi)
    env = envelope(spec, T)
    D = XReal(m + 1)
    shift = iv_div(XReal(2), iv_exp(iv_mul(XReal(1.5), iv_ln(XReal(m)))))
    d = iv(XReal(env.degree))
    coef = iv_sub(d, D)
    const = iv_add(iv_sub(env.corr, env.const), iv_mul(iv_mul(shift, D), L))
    lo_slack = _linear_min(coef, const, T)
    up_slack = _linear_min(iv_sub(D, d), iv_sub(env.const, env.corr), T)
    return [judge("(all):lower", m, lo_slack, degree=env.degree),
            judge("(all):upper", m, up_slack, degree=env.degree)]


def _sample(lo: int, hi: int, count: int) -> list:
    if hi - lo + 1 <= count:
        return list(range(lo, hi + 1))
    return sorted({lo + round(i * (hi - lo) / (count - 1)) for i in range(count)})


def verify_example2(params: Example2Params, n: int = 3, samples: int = 12, exclusion: bool = True) -> OrbitReport:
    """(all) on sampled m of block n, (bound) for N = n and n + 1, and
    (union) for N = n + 1 (the step from the last index of block n into
    block n + 1) with or without its exclusion disk."""
    rep = OrbitReport("example2")
    N1 = n + 1
    m_union = math.factorial(N1) ** 2 - 1
    if m_union + 4 > params.m_max:
        raise ScheduleError("schedule too short for the requested block", m_union + 4)
    spec = example2_spec(params, min(params.m_max - 1, m_union + 3))
    m_lo, m_hi = math.factorial(n) ** 2, math.factorial(n + 1) ** 2 - 1
    for m in _sample(m_lo, m_hi, samples):
        rep.verdicts.extend(_ex2_lemma(params, n, m, spec))
        a = params.a_track(m)
        rep.verdicts.append(judge("a_track>=1", m, iv_sub(a, XReal(1)), "<="))
    # (bound): M(s_m^{(N-1)!}, f) < s_{m+1}^{(N-1)!+2}
    for N in (n, N1):
        m = math.factorial(N) ** 2 - 1
        e = math.factorial(N - 1)
        t = iv_mul(XReal(e), params.log_s(m))
        logM = max_modulus(spec, t.hi)
        target = iv_mul(XReal(e + 2), params.log_s(m + 1))
        rep.verdicts.append(judge("(bound)", N, iv_sub(target, logM), m=m))
    # (union) at N = n + 1
    N = N1
    m = m_union
    L = params.log_s(m)
    T = XInterval(iv_mul(XReal(3), L).lo, iv_mul(XReal(math.factorial(N) - 3), L).hi)
    ex_index = m - 1  # zero s_m^{(N-1)!} sits at list position m - 1
    excl = [Exclusion(ex_index, XReal(0.5))] if exclusion else []
    img = log_modulus_bounds(spec, T, excl)
    a_next = params.a_track(m + 1)
    L1 = params.log_s(m + 1)
    inner = iv_mul(a_next, L1)
    outer = iv_mul(XReal(math.factorial(N) - 1), L1)
    if img.lo.is_finite():
        rep.verdicts.append(judge("(union):inner", N, _above(iv_sub(iv(img.lo), inner).lo), exclusion=exclusion))
    else:
        rep.verdicts.append(CheckVerdict("(union):inner", N, INCONCLUSIVE, XInterval(XReal.ninf(), XReal.inf()),
                                         "<", None, "lower enclosure is -inf: a zero lies in the region",
                                         {"exclusion": exclusion}))
    rep.verdicts.append(judge("(union):outer", N, _above(iv_sub(outer, iv(img.hi)).lo), exclusion=exclusion))
    rep.steps.append({"n": N, "m": m, "image": [img.lo.to_str(), img.hi.to_str()],
                      "target": [inner.lo.to_str(), outer.hi.to_str()]})
    lo_e, hi_e = math.factorial(N - 1) + 2, math.factorial(N) - 3
    rep.info["A_prime"] = {"N": N, "m": m, "exponents": [lo_e, hi_e],
                           "ratio": str(Fraction(hi_e, lo_e)), "n_minus_1": N - 1}
    rep.info["N2"] = params.N2
    return rep


# ---------------------------------------------------------------------------
# Example 3


def _identity_log_r_next(params: Example3Params, n: int) -> XInterval:
    """``log r_{n+1} - log a_n`` without forming either term."""
    lv, nx = params.level(n), params.level(n + 1)
    ln2 = ln2_interval()
    one_m_delta = iv_sub(XReal(1), lv.delta)
    big = _mLc(iv_mul(iv_sub(XReal(1), nx.beta), one_m_delta), lv)
    small = iv_mul(iv_mul(nx.beta, XReal(n ** 3)), lv.L)
    ln2m = _ln2_over_m(ln2, nx)
    return iv_sub(iv_sub(small, big), iv_mul(nx.beta, ln2m))


def _identity_log_R_next(params: Example3Params, n: int) -> XInterval:
    """``log R_{n+1} - log a_n = n^3 log S_n - ln 2 / m_{n+1}``."""
    lv, nx = params.level(n), params.level(n + 1)
    return iv_sub(iv_mul(XReal(n ** 3), lv.L), _ln2_over_m(ln2_interval(), nx))


def _ln2_over_m(ln2: XInterval, lv) -> XInterval:
    if lv.m.hi.is_finite():
        return iv_div(ln2, lv.m)
    return iv_exp(iv_sub(iv_ln(ln2), lv.log_m))


def _mLc(coef: XInterval, lv) -> XInterval:
    return iv_exp(iv_add(iv_add(iv_ln(coef), lv.log_m), lv.log_L))


def _sum_logs(values) -> XInterval | None:
    acc = None
    for v in values:
        if v is None:
            continue
        acc = v if acc is None else iv_logsumexp(acc, v)
    return acc


def verify_example3(params: Example3Params, n_values=(1, 2)) -> OrbitReport:
    """The interval chain for (a) on ``r_n <= |z| <= R_n`` and (b) on
    ``[R_n, R_n^n]``, with every log-value taken relative to ``log a_n``;
    (c) in bracket form ``2 S_n < (S_n^alpha)^c``."""
    rep = OrbitReport("example3")
    K = len(params.levels) - 1
    spec = example3_spec(params, K)
    ln2 = ln2_interval()
    saturated = set()
    c = iv(params.c)
    alpha = iv(params.alpha)
    for n in n_values:
        if n + 1 > K:
            raise ScheduleError("generate more levels", n + 1)
        lv = params.level(n)
        B = lv.log_a
        lr_next = _identity_log_r_next(params, n)
        lR_next = _identity_log_R_next(params, n)
        # (a)
        enc = mixed_log_modulus(spec, LevelRadius(n, XInterval(lv.beta.lo, XReal(1))), anchored=True)
        for j in enc.saturated:
            saturated.add(f"g_{j}" if j != "tail" else "tail")
        # (n): |g_n| <= a_n (e^|w| - 1) <= a_n needs |w| <= ln 2; |w| is largest at R_n
        log_w_max = iv_sub(XReal(0), ln2)  # (lam - 1)(mL - ln 2) - ln 2 at lam = 1
        rep.verdicts.append(_guarded("(n)", n, lambda: iv_sub(ln2, iv_exp(log_w_max)), "<="))
        above = _sum_logs([iv(enc.term_logs[j].hi) for j in range(n, len(enc.term_logs))]
                          + ([iv(enc.tail_log.hi)] if enc.tail_log is not None else []))
        below = _sum_logs([iv(enc.term_logs[j].hi) for j in range(0, n - 1)])
        if above is not None:
            rep.verdicts.append(_guarded("(o)", n, lambda: _above(iv_sub(XReal(0), iv_add(above, B)).lo), "<="))
        if below is not None:
            rep.verdicts.append(_guarded("(p)", n, lambda: _above(iv_sub(iv_sub(lr_next, iv_mul(XReal(2), ln2)), below).lo), "<="))
        rep.verdicts.append(_guarded("(q)", n, lambda: _above(iv_sub(ln2, iv(enc.g_upper.hi)).lo), "<="))
        rep.verdicts.append(_guarded("(r)", n, lambda: _above(iv_sub(iv_add(ln2, iv_mul(XReal(n), lv.log_R)), iv(enc.log_h.hi)).lo), "<="))
        rep.verdicts.append(_guarded("(u)", n, lambda: iv(enc.log_h.lo), "<="))
        rep.verdicts.append(_guarded("(t)", n, lambda: _above(iv_sub(iv(enc.g_lower.lo), lr_next).lo), "<="))
        rep.verdicts.append(_guarded("(s)", n, lambda: _above(iv_sub(lR_next, iv(enc.log_f.hi)).lo), "<="))
        rep.verdicts.append(_guarded("(a):inner", n, lambda: _above(iv_sub(iv(enc.log_f.lo), lr_next).lo)))
        rep.verdicts.append(_guarded("(a):outer", n, lambda: _above(iv_sub(lR_next, iv(enc.log_f.hi)).lo)))
        rep.steps.append({"n": n, "part": "a", "log_f_minus_log_a": [enc.log_f.lo.to_str(), enc.log_f.hi.to_str()],
                          "target_minus_log_a": [lr_next.hi.to_str(), lR_next.lo.to_str()],
                          "saturated": sorted(str(s) for s in enc.saturated)})
        # (b)
        encb = mixed_log_modulus(spec, LevelRadius(n, XInterval(XReal(1), XReal(n))), real_axis=True, anchored=True)
        for j in encb.saturated:
            saturated.add(f"g_{j}" if j != "tail" else "tail")
        gn = encb.term_logs[n - 1]
        rep.verdicts.append(_guarded("(v):lower", n, lambda: iv_add(gn, iv_mul(XReal(2), ln2)), "<="))
        rep.verdicts.append(_guarded("(v):upper", n, lambda: iv_sub(XReal(0), gn), "<="))
        below = _sum_logs([iv(encb.term_logs[j].hi) for j in range(0, n - 1)])
        above = _sum_logs([iv(encb.term_logs[j].hi) for j in range(n, len(encb.term_logs))]
                          + ([iv(encb.tail_log.hi)] if encb.tail_log is not None else []))
        if below is not None:
            rep.verdicts.append(_guarded("(w)", n, lambda: _above(iv_sub(iv_sub(lr_next, iv_mul(XReal(2), ln2)), below).lo), "<="))
        if above is not None:
            rep.verdicts.append(_guarded("(x)", n, lambda: _above(iv_sub(XReal(0), iv_add(above, B)).lo), "<="))
        rep.verdicts.append(_guarded("(y)", n, lambda: _above(iv_sub(ln2, iv(encb.g_upper.hi)).lo), "<="))
        rep.verdicts.append(_guarded("(z)", n, lambda: _above(iv_sub(iv(encb.g_lower.lo), lr_next).lo), "<="))
        h_cap = iv_add(ln2, iv_mul(XReal(n * n), lv.log_R))
        rep.verdicts.append(_guarded("(z1):lower", n, lambda: iv(encb.log_h.lo), "<="))
        rep.verdicts.append(_guarded("(z1):upper", n, lambda: _above(iv_sub(h_cap, iv(encb.log_h.hi)).lo), "<="))
        rep.verdicts.append(_guarded("(b):inner", n, lambda: _above(iv_sub(iv(encb.log_f.lo), lr_next).lo)))
        rep.verdicts.append(_guarded("(b):outer", n, lambda: _above(iv_sub(lR_next, iv(encb.log_f.hi)).lo)))
        rep.steps.append({"n": n, "part": "b", "log_f_minus_log_a": [encb.log_f.lo.to_str(), encb.log_f.hi.to_str()],
                          "saturated": sorted(str(s) for s in encb.saturated)})
        # (c): T_n <= 2 S_n and t_n >= S_n^alpha, so ln 2 + log S_n < c alpha log S_n suffices
        rep.verdicts.append(_guarded("(c)", n, lambda: iv_sub(iv_mul(iv_mul(c, alpha), lv.L), iv_add(ln2, lv.L))))
    rep.info["saturated_factors"] = sorted(saturated)
    rep.info["defaults"] = {"m1": params.m1, "log_S1": params.log_S1.to_str(), "c": params.c.to_str(),
                            "alpha": params.alpha.to_str(), "beta1": params.beta1.to_str()}
    return rep


def scan_example3_defaults(powers=(16, 32, 64, 128, 256), n_values=(1, 2), n_max: int = 4, **base):
    """First ``(m1, log_S1)`` among powers of two, ordered by ``(log_S1, m1)``,
    for which the schedule checks pass on ``1..n_max-1`` and the chain for
    (a), (b) and (c) passes on ``n_values``.  Returns ``(m1, log_S1)`` or None."""
    from .schedules import validate

    for L in powers:
        for m1 in powers:
            try:
                params = generate_example3(m1=m1, log_S1=L, n_max=n_max, **base)
            except ScheduleError:
                continue
            if any(v.status != PASS for v in validate(params, range(1, n_max))):
                continue
            if verify_example3(params, n_values).status == PASS:
                return m1, L
    return None
