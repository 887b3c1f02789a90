"""Checkers for the general inequalities: convexity of log M, Harnack-type
min/max bounds, argument-principle covering, the hyperbolic preconditions
and the level-annulus formula."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .efun import (
    ClassicExp,
    ProductSpec,
    TruncationError,
    exact_max_min_modulus,
    log_modulus_bounds,
    max_modulus,
    min_modulus,
    zero_count_below,
)
from .hyperbolic import RoundAnnulus, arc_distance_bound, pi_interval, punctured_plane_density_bound
from .orbits import LogAnnulus
from .verdict import BELOW_THRESHOLD, FAIL, INCONCLUSIVE, PASS, CheckVerdict, judge
from .xlog import (
    DomainError,
    XInterval,
    XReal,
    iv,
    iv_add,
    iv_div,
    iv_exp,
    iv_ln,
    iv_mul,
    iv_sub,
    xr,
)

__all__ = [
    "CheckRequest",
    "iterated_log_max_modulus",
    "check_convexity",
    "convexity_threshold",
    "check_harnack",
    "check_min_max",
    "covering_lower_bound",
    "hyperbolic_precondition",
    "punctured_plane_delta",
    "level_annulus_report",
]


@dataclass(frozen=True)
class CheckRequest:
    """A spec (iterated ``depth`` times) and the grids to check it on."""

    target: object
    log_radii: tuple
    c_values: tuple = ()
    eps_values: tuple = ()
    l_values: tuple = ()
    depth: int = 1
    threshold: XReal | None = None  # log r below which failures are "below-threshold"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        radii = tuple(xr(t) for t in self.log_radii)
        if not radii:
            raise ValueError("empty radius grid")
        if any(b < a for a, b in zip(radii, radii[1:])):
            raise ValueError("radius grid must be sorted")
        object.__setattr__(self, "log_radii", radii)
        if self.depth not in (1, 2):
            raise ValueError("only depth 1 and 2 are supported")


def _monomial_power(spec) -> int | None:
    if isinstance(spec, ProductSpec) and not spec.zeros and spec.tail is None:
        return spec.power_at_zero
    return None


def iterated_log_max_modulus(spec, log_r, depth: int = 1) -> XInterval:
    """Bracket for ``log M(r, f^depth)``, depth 1 or 2.

    Depth 2: the upper end is ``log M(M(r, f), f)``.  The lower end is the
    exact value of ``|f(f(-r))|``: f(-r) is real with modulus M(r, f), so
    for odd p it equals ``-M(r, f)`` and gives M(M(r, f)) again, while for
    even p it is positive and only the circle bound at that radius is used.
    """
    T = iv(log_r)
    p = _monomial_power(spec)
    if p is not None:
        return iv_mul(XReal(p ** depth), T)
    if isinstance(spec, ClassicExp):
        v = iv_exp(T)
        return v if depth == 1 else iv_exp(v)
    if depth == 1:
        lo = max_modulus(spec, T.lo)
        hi = lo if T.is_point() else max_modulus(spec, T.hi)
        return XInterval(lo.lo, hi.hi)
    if not isinstance(spec, ProductSpec):
        raise TypeError("depth 2 needs a positive-zero product or exp")
    M1 = iterated_log_max_modulus(spec, T, 1)
    hi = max_modulus(spec, M1.hi).hi
    if spec.power_at_zero % 2 == 1:
        lo = max_modulus(spec, M1.lo).lo
    else:
        lo = log_modulus_bounds(spec, M1).lo
    return XInterval(lo, hi)


def _exact_monomial_slack(p: int, t: XReal, c: XReal, depth: int) -> XInterval:
    # d c t - c d t in exact rationals: zero
    v = Fraction(p ** depth) * c.to_fraction() * t.to_fraction()
    w = c.to_fraction() * (Fraction(p ** depth) * t.to_fraction())
    return XInterval.point(XReal(v - w))


def _below(v: CheckVerdict, t: XReal, threshold) -> CheckVerdict:
    if threshold is not None and v.status != PASS and t < xr(threshold):
        return CheckVerdict(v.inequality, v.n, BELOW_THRESHOLD, v.slack, v.relation, v.log_abs_margin,
                            v.detail, v.data)
    return v


def check_convexity(req: CheckRequest) -> list:
    """``log M(r^c, f^n) >= c log M(r, f^n)`` on the grid, plus the doubling
    form ``log M(2r, f^n) >= (1 + log 2 / log r) log M(r, f^n)``."""
    out = []
    spec = req.target
    p = _monomial_power(spec)
    ln2 = iv_ln(XReal(2))
    for t in req.log_radii:
        for c in req.c_values:
            c = xr(c)
            name = f"convexity:c={c.to_str(6)}"
            data = {"log_r": t.to_str(12), "c": c.to_str(12)}
            if p is not None:
                out.append(judge(name, req.depth, _exact_monomial_slack(p, t, c, req.depth), "<=", **data))
                continue
            try:
                lhs = iterated_log_max_modulus(spec, iv_mul(c, t), req.depth)
                rhs = iv_mul(c, iterated_log_max_modulus(spec, t, req.depth))
                v = judge(name, req.depth, iv_sub(lhs, rhs), "<=", **data)
            except TruncationError as exc:
                v = judge(name, req.depth, XInterval.whole(), "<=", detail=str(exc), **data)
            out.append(_below(v, t, req.threshold))
        if not t > XReal(0):
            continue
        data = {"log_r": t.to_str(12)}
        if p is not None:
            # d (t + log 2) - d t (1 + log 2 / t) vanishes identically
            out.append(judge("convexity:2r", req.depth, XInterval.point(XReal(0)), "<=",
                             detail="identity for z^d", **data))
            continue
        try:
            lhs = iterated_log_max_modulus(spec, iv_add(t, ln2), req.depth)
            base = iterated_log_max_modulus(spec, t, req.depth)
            rhs = iv_add(base, iv_div(iv_mul(ln2, base), t))
            v = judge("convexity:2r", req.depth, iv_sub(lhs, rhs), "<=", **data)
        except TruncationError as exc:
            v = judge("convexity:2r", req.depth, XInterval.whole(), "<=", detail=str(exc), **data)
        out.append(_below(v, t, req.threshold))
    return out


def convexity_threshold(spec, log_radii, c_values, depth: int = 1):
    """Smallest grid radius from which every convexity check passes on the
    rest of the grid; None if the largest one already fails."""
    radii = sorted(xr(t) for t in log_radii)
    best = None
    for t in reversed(radii):
        vs = check_convexity(CheckRequest(spec, (t,), tuple(c_values), depth=depth))
        if all(v.status == PASS for v in vs):
            best = t
        else:
            break
    return best


def _mod_pair(spec, t, log_scale) -> tuple:
    """(log m, log M) at radius e^t for a ProductSpec times e^log_scale."""
    M, m = exact_max_min_modulus(spec, t)
    if log_scale is not None:
        M, m = iv_add(M, log_scale), iv_add(m, log_scale)
    return m, M


def _grid(lo: XReal, hi: XReal, points: int) -> list:
    if points <= 1 or lo == hi:
        return [lo]
    step = iv_div(iv_sub(hi, lo), XReal(points - 1))
    out = [lo]
    for i in range(1, points - 1):
        out.append(iv_add(lo, iv_mul(step, XReal(i))).mid())
    out.append(hi)
    return out


def check_harnack(spec: ProductSpec, log_r, a, b, eps_values=(), points: int = 9, log_scale=None,
                  part_b: bool = True) -> list:
    """``log m(rho, g) >= (1 - 2 pi / (eps log r)) log M(rho, g)`` for rho on
    a grid of ``[r^(a+eps), r^(b-eps)]``, g = q * spec with ``log q = log_scale``.

    The precondition ``m(rho, g) > 1`` on ``(r^a, r^b)`` is checked first;
    if it fails no inequality is judged.  Each eps must lie in
    ``(pi / log r, (b - a) / 2)`` or ValueError is raised.  ``part_b`` adds
    the case ``eps = 2 pi delta``, ``delta = 1 / sqrt(log r)``.
    """
    t = xr(log_r)
    a, b = xr(a), xr(b)
    ls = None if log_scale is None else iv(xr(log_scale))
    pi = pi_interval()
    eps_list = [iv(xr(e)) for e in eps_values]
    lo_gate = iv_div(pi, t)
    hi_gate = iv_div(iv_sub(b, a), XReal(2))
    for e in eps_list:
        if not (e.lo > lo_gate.hi and e.hi < hi_gate.lo):
            raise ValueError(f"eps = {e.mid().to_str(8)} outside (pi/log r, (b-a)/2)")
    cases = [("harnack", e) for e in eps_list]
    if part_b:
        delta = iv_exp(iv_mul(XReal(-0.5), iv_ln(t)))
        e = iv_mul(iv_mul(XReal(2), pi), delta)
        if e.lo > lo_gate.hi and e.hi < hi_gate.lo:
            cases.append(("harnack:b", e))
        else:
            cases.append(("harnack:b-gate", None))
    # precondition on the open annulus, checked over the closed one (conservative)
    pre = log_modulus_bounds(spec, XInterval(iv_mul(a, t).lo, iv_mul(b, t).hi))
    if ls is not None:
        pre = iv_add(pre, ls)
    if not pre.lo > XReal(0):
        return [CheckVerdict("harnack:precondition", None, INCONCLUSIVE if pre.hi > XReal(0) else FAIL,
                             XInterval(pre.lo, pre.hi), "<", None, "m(rho, g) > 1 not certified; check skipped")]
    out = [judge("harnack:precondition", None, XInterval(pre.lo, XReal.inf()))]
    for name, e in cases:
        if e is None:
            out.append(CheckVerdict(name, None, INCONCLUSIVE, XInterval.whole(), "<=", None,
                                    "eps = 2 pi delta outside the admissible range"))
            continue
        k = iv_sub(XReal(1), iv_div(iv_mul(XReal(2), pi), iv_mul(e, t)))
        r_lo = iv_mul(iv_add(a, e), t).hi
        r_hi = iv_mul(iv_sub(b, e), t).lo
        for rho in _grid(r_lo, r_hi, points):
            m, M = _mod_pair(spec, rho, ls)
            slack = iv_sub(m, iv_mul(k, M))
            out.append(judge(name, None, slack, "<=", log_rho=rho.to_str(12), eps=e.mid().to_str(12),
                             predicted=iv_mul(iv_sub(XReal(1), k), M).mid().to_str(12)))
    return out


def check_min_max(spec: ProductSpec, log_r, a_bracket, b_bracket, delta=None, points: int = 9) -> list:
    """``log m(rho, f) >= (1 - delta) log M(rho, f)`` on a grid of
    ``[r^(a + 2 pi delta), r^(b - 2 pi delta)]`` using the conservative ends
    of the a/b brackets.  A grid radius on a zero gives ``m = 0``: the
    verdict fails and is flagged."""
    t = xr(log_r)
    d = iv_exp(iv_mul(XReal(-0.5), iv_ln(t))) if delta is None else iv(xr(delta))
    two_pi_d = iv_mul(iv_mul(XReal(2), pi_interval()), d)
    a, b = iv(a_bracket), iv(b_bracket)
    r_lo = iv_mul(iv_add(iv(a.hi), two_pi_d), t).hi
    r_hi = iv_mul(iv_sub(iv(b.lo), two_pi_d), t).lo
    if not r_lo < r_hi:
        return [CheckVerdict("minmax", None, INCONCLUSIVE, XInterval.whole(), "<=", None, "empty radius range")]
    out = []
    k = iv_sub(XReal(1), d)
    for rho in _grid(r_lo, r_hi, points):
        M, m = exact_max_min_modulus(spec, rho)
        if not m.lo.is_finite() and not m.hi.is_finite():
            out.append(CheckVerdict("minmax", None, FAIL, XInterval(XReal.ninf(), XReal(-1)), "<=", None,
                                    "grid touches zero", {"log_rho": rho.to_str(12)}))
            continue
        if not m.lo.is_finite() and m.hi.is_finite() and any(z.log_modulus.contains(rho) for z in spec.zeros):
            out.append(CheckVerdict("minmax", None, FAIL, XInterval(XReal.ninf(), XReal(-1)), "<=", None,
                                    "grid touches zero", {"log_rho": rho.to_str(12)}))
            continue
        out.append(judge("minmax", None, iv_sub(m, iv_mul(k, M)), "<=", log_rho=rho.to_str(12)))
    return out


def covering_lower_bound(spec: ProductSpec, A: LogAnnulus):
    """``f(A) contains A(M(r, f), m(R, f))`` for a zero-free closed annulus
    whose winding degree ``d = zero_count_below(r)`` is at least 1.

    Returns a :class:`LogAnnulus` with the conservative ends (upper end of
    log M(r), lower end of log m(R)) and the two enclosures, or None when
    ``M(r) >= m(R)``.
    """
    for z in spec.zeros:
        if not (z.log_modulus.hi < A.log_inner or z.log_modulus.lo > A.log_outer):
            raise DomainError("a zero lies in the closed annulus")
    d = zero_count_below(spec, A.log_inner)
    if d < 1:
        raise DomainError("winding degree is 0 on the inner circle")
    M_in = max_modulus(spec, A.log_inner)
    m_out = min_modulus(spec, A.log_outer)
    if not M_in.hi < m_out.lo:
        return None
    return LogAnnulus(M_in.hi, m_out.lo), {"degree": d, "log_M_inner": M_in, "log_m_outer": m_out}


def punctured_plane_delta() -> XInterval:
    """``delta`` implied on the closed annulus ``A(1/2, 2)``: half of the
    smallest value there of the density lower bound (attained at |z| = 2)."""
    b = punctured_plane_density_bound(iv_ln(XReal(2)).lo)
    b2 = punctured_plane_density_bound(iv_ln(XReal(2)).hi)
    lo = b.lo if b.lo < b2.lo else b2.lo
    hi = b.hi if b.hi > b2.hi else b2.hi
    return iv_div(XInterval(lo, hi), XReal(2))


def hyperbolic_precondition(A: LogAnnulus, z1: tuple, z2: tuple, delta=None) -> CheckVerdict:
    """Upper bound for the hyperbolic distance in A of two points on one
    circle (``(log|z|, arg)`` pairs), compared with ``delta``."""
    (s1, t1), (s2, t2) = z1, z2
    if xr(s1) != xr(s2):
        raise ValueError("points must lie on a common circle")
    ra = RoundAnnulus(A.log_inner, A.log_outer)
    d = arc_distance_bound(ra, s1, float(t2) - float(t1))
    dl = punctured_plane_delta() if delta is None else iv(xr(delta))
    return judge("hyperbolic:distance<delta", None, iv_sub(dl, d), "<", distance_upper=d.hi.to_str(12))


def level_annulus_report(log_r, delta, a_n, b_n, l_values, a_limit_lower=0) -> list:
    """Predicted closed annulus around the level set ``h = l`` at step n.

    ``l <= 1``: exponents ``[l (1 - delta), l + 3 eps]``;
    ``l > 1``: ``[l (1 - 3 eps / (1 - a)), l (1 + 2 delta)]``, with
    ``eps = max(delta, a_n - a)`` and the unknown limit a replaced by
    ``a_limit_lower`` (conservative).  l must lie strictly inside
    ``(a_n / (1 - delta), b_n (1 - 3 pi delta))``; the ends of the a_n/b_n
    brackets that shrink this range are used.
    """
    t = xr(log_r)
    d = iv(xr(delta))
    an, bn = iv(a_n), iv(b_n)
    a_lim = iv(xr(a_limit_lower))
    eps = iv_sub(an, a_lim)
    eps = XInterval(max(eps.lo, d.lo), max(eps.hi, d.hi))
    gate_lo = iv_div(iv(an.hi), iv_sub(XReal(1), d))
    gate_hi = iv_mul(iv(bn.lo), iv_sub(XReal(1), iv_mul(iv_mul(XReal(3), pi_interval()), d)))
    out = []
    for l in l_values:
        lv = iv(xr(l))
        if not (lv.lo > gate_lo.hi and lv.hi < gate_hi.lo):
            raise ValueError(f"l = {lv.mid().to_str(8)} outside the admissible open interval")
        if lv.hi <= XReal(1):
            lo = iv_mul(lv, iv_sub(XReal(1), d))
            hi = iv_add(lv, iv_mul(XReal(3), eps))
            branch = "l<=1"
        else:
            lo = iv_mul(lv, iv_sub(XReal(1), iv_div(iv_mul(XReal(3), eps), iv_sub(XReal(1), a_lim))))
            hi = iv_mul(lv, iv_add(XReal(1), iv_mul(XReal(2), d)))
            branch = "l>1"
        out.append({
            "l": lv.mid().to_str(12),
            "branch": branch,
            "exponent_lo": lo.lo.to_str(12),
            "exponent_hi": hi.hi.to_str(12),
            "log_inner": iv_mul(lo, t).lo.to_str(12),
            "log_outer": iv_mul(hi, t).hi.to_str(12),
            "width_exponent": iv_sub(iv(hi.hi), iv(lo.lo)).hi.to_str(12),
            "a_substituted": a_lim.lo.to_str(12),
        })
    return out
