"""Parameter sequences of the three worked examples.

Example 1: ``f(z) = z prod (1 - z/s_i**c)(1 - z/s_{i^2})`` with
``s_{n+1} = s_n**(n + isqrt(n))``.

Example 2: ``f(z) = z**2 prod_n prod_{m in block n} (1 - z/s_m**(n!))`` with
``s_{m+1} = s_m**(m+1)`` and block n covering ``(n!)**2 <= m < ((n+1)!)**2``.

Example 3: ``f = g h`` with ``g = sum a_n (exp(-(z/S_n)**m_n) - 1)`` and
``h = prod (1 - z/S_n**alpha)``; the sequences S_n, m_n grow like towers, so
all of them are carried as enclosures of their logarithms.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .efun import MixedSumSpec, MixedTerm, ProductSpec, TailBound, ZeroTerm
from .verdict import CheckVerdict, judge, judge_log
from .xlog import (
    DomainError,
    XInterval,
    XReal,
    iv,
    iv_add,
    iv_div,
    iv_exp,
    iv_ln,
    iv_logsumexp,
    iv_mul,
    iv_sub,
    ln2_interval,
    xr,
)

__all__ = [
    "ScheduleError",
    "Example1Params",
    "Example2Params",
    "Example3Level",
    "Example3Params",
    "generate",
    "generate_example1",
    "generate_example2",
    "generate_example3",
    "validate",
    "rigorous_N2_example1",
    "example2_N2",
    "example1_spec",
    "example2_spec",
    "example3_spec",
    "schedule_to_csv",
    "EX3_DEFAULTS",
]


class ScheduleError(DomainError):
    """A recursion invariant failed; ``index`` names the first bad level."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"{message} (n = {index})")
        self.index = index


def _frac(x) -> Fraction:
    return xr(x).to_fraction()


def _log10_exact(x: XReal) -> int | None:
    f = _frac(x)
    if f.denominator != 1 or f < 10:
        return None
    k, v = 0, f.numerator
    while v % 10 == 0:
        v //= 10
        k += 1
    return k if v == 1 else None


def _pow_iv(base_log: XInterval, q) -> XInterval:
    """exp(q * base_log) for a rational q."""
    return iv_exp(iv_mul(iv(xr(q)), base_log))


# ---------------------------------------------------------------------------
# Example 1


@dataclass(frozen=True)
class Example1Params:
    c: XReal
    s1: XReal
    n_max: int
    exponents: tuple  # P_n with log s_n = P_n log s_1; entry 0 is n = 1
    N2: int
    track: str = "corrected"

    @cached_property
    def log_s1(self) -> XInterval:
        return iv_ln(iv(self.s1))

    @cached_property
    def c_frac(self) -> Fraction:
        return _frac(self.c)

    @cached_property
    def log_c(self) -> XInterval:
        return iv_ln(iv(self.c))

    def P(self, n: int) -> int:
        if not 1 <= n <= self.n_max:
            raise ScheduleError("index outside generated range", n)
        return self.exponents[n - 1]

    def log_s(self, n: int) -> XInterval:
        return iv_mul(XReal(self.P(n)), self.log_s1)

    def log10_s(self, n: int) -> XInterval:
        return iv_div(self.log_s(n), iv_ln(XReal(10)))

    def log10_s_exact(self, n: int) -> Fraction | None:
        """Exact log10 s_n when s_1 is an integral power of 10, else None."""
        k = _log10_exact(self.s1)
        return None if k is None else k * self.P(n)

    def c_power(self, q) -> XInterval:
        return _pow_iv(self.log_c, q)

    def _sqrt_upper(self, n: int) -> int:
        return math.isqrt(n - 1) if self.track == "corrected" else math.isqrt(n)

    @cached_property
    def _tracks(self) -> dict:
        return {}

    def _track(self, n: int, sign: int) -> XInterval:
        cache = self._tracks
        if (n, sign) in cache:
            return cache[(n, sign)]
        two_c = iv_mul(XReal(2), iv(self.c))
        start = max([k for (k, s) in cache if s == sign and k <= n], default=None)
        if start is None:
            start = min(n, self.N2)
            acc = self.c_power(Fraction(1, 4) if sign < 0 else Fraction(3, 4))
            for i in range(self.N2, self._sqrt_upper(start) + 1):
                acc = iv_mul(acc, iv_add(XReal(1), iv(XReal(Fraction(2 * sign, i * i)))))
            cache[(start, sign)] = acc
        acc = cache[(start, sign)]
        for k in range(start, n):
            # step k -> k+1: one (1 +- 2c/k^2) factor, plus a square factor when isqrt grows
            if k >= self.N2:
                acc = iv_mul(acc, iv_add(XReal(1), iv_mul(XReal(sign), iv_div(two_c, XReal(k * k)))))
            i = self._sqrt_upper(k + 1)
            if i != self._sqrt_upper(k) and i >= self.N2:
                acc = iv_mul(acc, iv_add(XReal(1), iv(XReal(Fraction(2 * sign, i * i)))))
            cache[(k + 1, sign)] = acc
        return acc

    def alpha(self, n: int) -> XInterval:
        """Inner exponent of the tracked annulus ``A(s_n**alpha_n, s_n**beta_n)``."""
        return self._track(n, -1)

    def beta(self, n: int) -> XInterval:
        return self._track(n, +1)

    def lemma_eps(self, n: int) -> Fraction:
        r = math.isqrt(n)
        return Fraction(2, n) if r * r == n else 2 * self.c_frac / (n * n)

    def degree(self, n: int) -> int:
        """Zeros of f (with the origin) below ``|z| = s_n**k`` for k in the lemma range."""
        return n + math.isqrt(n)

    def zero_exponents(self, n: int) -> list:
        """(exponent relative to log s_n, kind, index) of all listed zeros, exact."""
        Pn = self.P(n)
        out = []
        for i in range(1, self.n_max + 1):
            out.append((self.c_frac * self.exponents[i - 1] / Pn, "s_i^c", i))
            if i * i <= self.n_max:
                out.append((Fraction(self.exponents[i * i - 1], Pn), "s_{i^2}", i))
        out.sort()
        return out


def _example1_exponents(n_max: int) -> tuple:
    P = [1]
    for j in range(1, n_max):
        P.append(P[-1] * (j + math.isqrt(j)))
    return tuple(P)


def rigorous_N2_example1(c) -> int:
    """Smallest N2 for which the tail products satisfy both conditions
    ``prod_{n>=N2}(1 - 2c/n**2) > c**(-1/16)`` and ``prod(1 + 2c/n**2) < c**(1/16)``.

    Uses ``sum_{n>=N} 1/n**2 < 1/(N-1)`` and ``log(1-x) >= -x/(1-x)``.
    """
    cf = _frac(c)
    target = math.log(float(cf)) / 16
    N = 2
    while True:
        x0 = 2 * float(cf) / (N * N)
        if x0 < 0.5:
            s = 2 * float(cf) / (N - 1)
            if s / (1 - x0) < target * (1 - 1e-12):
                return N
        N += 1


def generate_example1(s1=10, c=2, n_max: int = 8, N2: int | None = None, track: str = "corrected") -> Example1Params:
    """Schedule for Example 1.  ``N2`` defaults to the tail-product bound."""
    c = xr(c)
    s1 = xr(s1)
    if not c > XReal(1):
        raise ScheduleError("c must exceed 1")
    if not s1 > XReal(1):
        raise ScheduleError("s1 must exceed 1")
    if n_max < 1:
        raise ScheduleError("n_max must be positive")
    if track not in ("corrected", "literal"):
        raise ValueError("track must be 'corrected' or 'literal'")
    if N2 is None:
        N2 = rigorous_N2_example1(c)
    return Example1Params(c, s1, n_max, _example1_exponents(n_max), int(N2), track)


def example1_track_verdicts(params: Example1Params, n_values) -> list:
    """``c**(1/8) <= alpha_n <= beta_n <= c**(7/8)``, one verdict per bound."""
    lo = params.c_power(Fraction(1, 8))
    hi = params.c_power(Fraction(7, 8))
    out = []
    for n in n_values:
        a, b = params.alpha(n), params.beta(n)
        out.append(judge("track:alpha>=c^(1/8)", n, iv_sub(a, lo), "<="))
        out.append(judge("track:alpha<=beta", n, iv_sub(b, a), "<="))
        out.append(judge("track:beta<=c^(7/8)", n, iv_sub(hi, b), "<="))
    return out


def example1_spec(params: Example1Params, n_hi: int | None = None) -> ProductSpec:
    """Truncated product for Example 1, listing zeros up to index ``n_hi``.

    The tail descriptor covers every unlisted zero of both families; each
    family has ratio at least 2 between consecutive zeros, so the unlisted
    reciprocal sum is at most ``2 * 2 * exp(-first)``.
    """
    K = params.n_max - 1 if n_hi is None else n_hi
    if K + 1 > params.n_max:
        raise ScheduleError("schedule too short for the requested spec", K + 1)
    cf = params.c_frac
    keyed = {}
    for i in range(1, K + 1):
        k = cf * params.exponents[i - 1]
        keyed[k] = keyed.get(k, 0) + 1
        if i * i <= K:
            k2 = Fraction(params.exponents[i * i - 1])
            keyed[k2] = keyed.get(k2, 0) + 1
    zeros = []
    for k in sorted(keyed):
        zeros.append(ZeroTerm(iv_mul(iv(XReal(k, rnd="f"), XReal(k, rnd="c")), params.log_s1), keyed[k]))
    first_c = cf * params.exponents[K]
    nxt = (math.isqrt(K) + 1) ** 2
    first = min(first_c, Fraction(_example1_exponents(nxt)[-1]))
    tail_log = iv_mul(iv(XReal(first, rnd="f")), params.log_s1).lo
    return ProductSpec(1, tuple(zeros), TailBound(K + 1, tail_log, 2), label="example1")


# ---------------------------------------------------------------------------
# Example 2


@dataclass(frozen=True)
class Example2Params:
    s1: XReal
    m_max: int
    N2: int

    @cached_property
    def log_s1(self) -> XInterval:
        return iv_ln(iv(self.s1))

    def P(self, m: int) -> int:
        if not 1 <= m <= self.m_max:
            raise ScheduleError("index outside generated range", m)
        return math.factorial(m)

    def log_s(self, m: int) -> XInterval:
        return iv_mul(XReal(self.P(m)), self.log_s1)

    @staticmethod
    def block(m: int) -> int:
        n = 1
        while math.factorial(n + 1) ** 2 <= m:
            n += 1
        return n

    def zero_power(self, m: int) -> int:
        return math.factorial(self.block(m))

    @cached_property
    def _a_partial(self) -> list:
        return [iv(XReal(2))]

    def a_track(self, m: int) -> XInterval:
        """``2 - sum_{i=N2}^{m-1} 2 i**-1.5``."""
        acc = self._a_partial
        while len(acc) <= m - self.N2:
            i = self.N2 + len(acc) - 1
            term = iv_div(XReal(2), iv_exp(iv_mul(XReal(1.5), iv_ln(XReal(i)))))
            acc.append(iv_sub(acc[-1], term))
        return acc[max(m - self.N2, 0)]

    def b_track(self, n: int) -> int:
        return math.factorial(n) - 1


def example2_N2() -> int:
    """Smallest N with ``sum_{i>=N} 2/i**1.5 < 1`` via ``N**-1.5 + 2/sqrt(N)``."""
    N = 2
    while True:
        lhs = 2 * (N ** -1.5 + 2 / math.sqrt(N))
        if lhs * (1 + 1e-12) < 1:
            return N
        N += 1


def generate_example2(s1=10, m_max: int = 8, N2: int | None = None) -> Example2Params:
    s1 = xr(s1)
    if not s1 > XReal(1):
        raise ScheduleError("s1 must exceed 1")
    if m_max < 1:
        raise ScheduleError("m_max must be positive")
    return Example2Params(s1, m_max, example2_N2() if N2 is None else int(N2))


def example2_spec(params: Example2Params, m_hi: int | None = None) -> ProductSpec:
    K = params.m_max - 1 if m_hi is None else m_hi
    if K + 1 > params.m_max:
        raise ScheduleError("schedule too short for the requested spec", K + 1)
    zeros = []
    for m in range(1, K + 1):
        k = params.zero_power(m) * params.P(m)
        zeros.append(ZeroTerm(iv_mul(XReal(k), params.log_s1), 1))
    first = params.zero_power(K + 1) * params.P(K + 1)
    tail_log = iv_mul(XReal(first), params.log_s1).lo
    return ProductSpec(2, tuple(zeros), TailBound(K + 1, tail_log, 1), label="example2")


# ---------------------------------------------------------------------------
# Example 3


@dataclass(frozen=True)
class Example3Level:
    """Level n of Example 3.  Every field is an enclosure; ``m`` may be
    saturated (its log is always finite)."""

    n: int
    L: XInterval  # log S_n
    log_L: XInterval
    delta: XInterval
    m: XInterval
    log_m: XInterval
    log_log_m: XInterval
    log_a: XInterval
    log_R: XInterval
    beta: XInterval
    log_r: XInterval

    @property
    def saturated(self) -> bool:
        return not self.m.hi.is_finite()


# smallest power-of-two pair passing the checks; see orbits.scan_example3_defaults
EX3_DEFAULTS = {"m1": 128, "log_S1": 64, "c": 2, "alpha": "0.5625", "beta1": "0.95"}


@dataclass(frozen=True)
class Example3Params:
    c: XReal
    alpha: XReal
    beta1: XReal
    m1: int
    log_S1: XReal
    n_max: int
    levels: tuple

    def level(self, n: int) -> Example3Level:
        if not 1 <= n <= len(self.levels):
            raise ScheduleError("level outside generated range", n)
        return self.levels[n - 1]


def _log_of_affine(log_x: XInterval, coef: XInterval, add) -> XInterval:
    """log(coef * x + add) from log x, without forming x."""
    return iv_logsumexp(iv_add(iv_ln(coef), log_x), iv_ln(iv(xr(add))))


def generate_example3(
    m1=EX3_DEFAULTS["m1"],
    log_S1=EX3_DEFAULTS["log_S1"],
    c=EX3_DEFAULTS["c"],
    alpha=EX3_DEFAULTS["alpha"],
    beta1=EX3_DEFAULTS["beta1"],
    n_max: int = 4,
    strict: bool = True,
) -> Example3Params:
    """Sequences of Example 3 with ``m_{n+1} = ceil(S_{n+1}**(m_n + 1))``.

    With ``strict`` the first violated structural invariant (beta_n > alpha,
    beta decreasing, alpha in (1/c, 1)) raises :class:`ScheduleError`.
    """
    c, alpha, beta1, L1 = xr(c), xr(alpha), xr(beta1), xr(log_S1)
    m1 = int(m1)
    if strict:
        if not c > XReal(1):
            raise ScheduleError("c must exceed 1")
        if not (alpha * c > XReal(1) and alpha < XReal(1)):
            raise ScheduleError("alpha must lie in (1/c, 1)")
        if not (alpha < beta1 < XReal(1)):
            raise ScheduleError("beta1 must lie in (alpha, 1)")
        if m1 < 2 or not L1 > XReal(1):
            raise ScheduleError("need m1 >= 2 and S1 > e")
    ln2 = ln2_interval()
    levels = []
    L = iv(L1)
    log_L = iv_ln(L)
    m = iv(XReal(m1))
    log_m = iv_ln(m)
    log_log_m = iv_ln(log_m)
    beta = iv(beta1)
    for n in range(1, n_max + 1):
        delta = iv_exp(iv_mul(XReal(-0.5), log_L))
        one_m_delta = iv_sub(XReal(1), delta)
        log_a = _mul_logs(one_m_delta, log_m, L, log_L)
        log_R = iv_sub(L, _ln2_over(ln2, m, log_m))
        log_r = iv_mul(beta, log_R)
        levels.append(Example3Level(n, L, log_L, delta, m, log_m, log_log_m, log_a, log_R, beta, log_r))
        if strict and not beta.lo > alpha:
            raise ScheduleError("beta_n must stay above alpha", n)
        # next level
        log_coef = _log_of_affine(log_m, one_m_delta, n ** 3)
        log_L_next = iv_add(log_coef, log_L)
        L_next = iv_exp(log_L_next)
        if L_next.lo.is_finite() and not log_m.hi > XReal(60):
            L_next = iv_mul(iv_add(iv_mul(one_m_delta, m), XReal(n ** 3)), L)
        # log m_{n+1} = (m_n + 1) L_{n+1} + [0, exp(-that)]
        ll_base = iv_add(_log_plus_one(log_m, m), log_L_next)
        base = iv_exp(ll_base)
        bump = iv_exp(iv_sub(XReal(0), base))
        log_m_next = XInterval(base.lo, iv_add(base, XInterval(XReal(0), bump.hi)).hi)
        # the ceiling bump moves log log m by at most bump / base
        ll_bump = iv_exp(iv_sub(iv_sub(XReal(0), base), ll_base))
        log_log_m_next = XInterval(ll_base.lo, iv_add(ll_base, XInterval(XReal(0), ll_bump.hi)).hi)
        m_next = iv_exp(log_m_next)
        beta_next = iv_div(iv_sub(beta, iv_mul(XReal(3), delta)), one_m_delta)
        # beta_n - beta_{n+1} = delta (3 - beta_n) / (1 - delta) > 0 once beta_n < 3
        if strict and not (beta.hi < XReal(3) and delta.lo >= XReal(0)):
            raise ScheduleError("beta_n must decrease", n + 1)
        L, log_L, m, log_m, beta = L_next, log_L_next, m_next, log_m_next, beta_next
        log_log_m = log_log_m_next
    return Example3Params(c, alpha, beta1, m1, L1, n_max, tuple(levels))


def _ln2_over(ln2: XInterval, m: XInterval, log_m: XInterval) -> XInterval:
    if m.hi.is_finite():
        return iv_div(ln2, m)
    return iv_exp(iv_sub(iv_ln(ln2), log_m))


def _log_plus_one(log_m: XInterval, m: XInterval) -> XInterval:
    """log(m + 1)."""
    return iv_logsumexp(log_m, iv(XReal(0)))


def _mul_logs(coef: XInterval, log_m: XInterval, L: XInterval, log_L: XInterval) -> XInterval:
    """coef * m * L given log m and log L (m may be saturated)."""
    return iv_exp(iv_add(iv_add(iv_ln(coef), log_m), log_L))


def example3_spec(params: Example3Params, K: int | None = None) -> MixedSumSpec:
    """``f = g h`` with the first K terms of g and of h listed."""
    K = len(params.levels) - 1 if K is None else K
    if K + 1 > len(params.levels):
        raise ScheduleError("schedule too short for the requested spec", K + 1)
    terms = []
    for lv in params.levels[:K]:
        terms.append(MixedTerm(lv.L, lv.m, lv.delta, lv.log_m))
    nxt = params.levels[K]
    alpha = iv(params.alpha)
    zeros = []
    for lv in params.levels[:K]:
        if lv.L.hi.is_finite() and lv.L.width() < XReal(1) * lv.L.lo:
            zeros.append(ZeroTerm(iv_mul(alpha, lv.L), 1))
    tail_start = len(zeros) + 1
    tail_lv = params.levels[tail_start - 1]
    h = ProductSpec(0, tuple(zeros), TailBound(tail_start, iv_mul(alpha, tail_lv.L).lo, 1), label="example3-h")
    return MixedSumSpec(tuple(terms), h, nxt.m, nxt.log_L, label="example3")


def _judge_ln2_over_m(name: str, n: int, lv: Example3Level) -> CheckVerdict:
    """Slack ``ln 2 / m`` of a level; judged through log log m when m is a tower."""
    log_margin = iv_sub(iv_ln(ln2_interval()), lv.log_m)
    if log_margin.lo > XReal.ninf():
        return judge_log(name, n, log_margin)
    ok = lv.log_log_m.hi.is_finite()
    v = judge_log(name, n, log_margin, detail="margin ln2/m with log log m finite",
                  log_log_m=[lv.log_log_m.lo.to_str(), lv.log_log_m.hi.to_str()])
    if ok:
        return CheckVerdict(v.inequality, n, "pass", v.slack, v.relation, v.log_abs_margin, v.detail, v.data)
    return v


def beta_limit_floor(params: Example3Params) -> XInterval:
    """A certified lower bound for lim beta_n.

    beta_n - lim beta = sum_{k>=n} delta_k (3 - beta_k)/(1 - delta_k) <= 4 sum delta_k
    and past the last generated level the deltas are at most the last one
    squared, so ``beta_K - 2**-20`` is safe once ``8 delta_K < 2**-20``.
    """
    last = params.levels[-1]
    if not iv_mul(XReal(8), last.delta).hi < XReal.pow2(-20):
        raise ScheduleError("generate more levels before bounding the limit of beta", last.n)
    return iv(iv_sub(last.beta, XReal.pow2(-20)).lo)


def example3_verdicts(params: Example3Params, n_values, beta_floor: XInterval | None = None) -> list:
    """(j)-(m) of the construction for each n, with cancellation-free
    reduced forms; ``beta_floor`` replaces the unknown limit beta (defaults
    to :func:`beta_limit_floor`)."""
    ln2 = ln2_interval()
    beta_inf = beta_limit_floor(params) if beta_floor is None else iv(beta_floor)
    out = []
    for n in n_values:
        if n + 1 > len(params.levels):
            raise ScheduleError("need level n+1 for the sanity chain", n + 1)
        lv, nx = params.level(n), params.level(n + 1)
        # (j) S/2 <= R < S
        one_minus = iv_sub(XReal(1), _ln2_over(XInterval.point(XReal(1)), lv.m, lv.log_m))
        out.append(judge("(j):S/2<=R", n, iv_mul(ln2, one_minus), "<="))
        out.append(_judge_ln2_over_m("(j):R<S", n, lv))
        # (k) chain
        out.append(_judge_ln2_over_m("(k):R<=S", n, nx))
        out.append(judge("(k):r<=R", n, iv_mul(iv_sub(XReal(1), nx.beta), nx.log_R), "<="))
        out.append(judge("(k):R^beta<=r", n, iv_mul(iv_sub(nx.beta, beta_inf), nx.log_R), "<="))
        nx_one_minus = iv_sub(XReal(1), _ln2_over(XInterval.point(XReal(1)), nx.m, nx.log_m))
        out.append(judge("(k):S^beta/2^beta<=R^beta", n, iv_mul(beta_inf, iv_mul(ln2, nx_one_minus)), "<="))
        out.append(judge("(k):S_n^(beta(1-d)m)<=S^beta/2^beta", n,
                         iv_mul(beta_inf, iv_sub(iv_mul(XReal(n ** 3), lv.L), ln2)), "<="))
        one_m_delta = iv_sub(XReal(1), lv.delta)
        q = iv_sub(iv_mul(iv_mul(beta_inf, one_m_delta), lv.L), XReal(1))
        if q.lo > XReal(0):
            log_lhs = iv_add(lv.log_m, iv_ln(q))
            ln4 = iv_mul(XReal(2), ln2)
            out.append(judge("(k):4e^m<=S_n^(beta(1-d)m)", n, iv_sub(log_lhs, iv_ln(ln4)), "<=",
                             detail="log(m (beta(1-d)L - 1)) - log log 4"))
        else:
            out.append(judge("(k):4e^m<=S_n^(beta(1-d)m)", n, q, "<="))
        # (l) r_{n+1} <= a_n / 8
        main = _mul_logs(iv_mul(iv_sub(XReal(1), nx.beta), one_m_delta), lv.log_m, lv.L, lv.log_L)
        rest = iv_add(iv_mul(iv_mul(nx.beta, XReal(n ** 3)), lv.L), iv_mul(XReal(3), ln2))
        bonus = iv_mul(nx.beta, _ln2_over(ln2, nx.m, nx.log_m))
        out.append(judge("(l):r<=a/8", n, iv_add(iv_sub(main, rest), bonus), "<="))
        # (m) n <= a_n <= S_{n+1}/4 <= R_{n+1}/2
        out.append(judge("(m):n<=a", n, iv_sub(lv.log_a, iv_ln(XReal(n))), "<="))
        out.append(judge("(m):a<=S/4", n, iv_sub(iv_mul(XReal(n ** 3), lv.L), iv_mul(XReal(2), ln2)), "<="))
        out.append(judge("(m):S/4<=R/2", n, iv_mul(ln2, nx_one_minus), "<="))
    return out


def example3_structure_verdicts(params: Example3Params) -> list:
    """beta_n > alpha and beta_n decreasing across the generated levels."""
    out = []
    alpha = iv(params.alpha)
    prev = None
    for lv in params.levels:
        out.append(judge("beta>alpha", lv.n, iv_sub(lv.beta, alpha)))
        if prev is not None:
            # beta_{n-1} - beta_n = delta (3 - beta_{n-1}) / (1 - delta), judged through its log
            gap = iv_sub(iv_add(iv_mul(XReal(-0.5), prev.log_L), iv_ln(iv_sub(XReal(3), prev.beta))),
                         iv_ln(iv_sub(XReal(1), prev.delta)))
            out.append(judge_log("beta-decreasing", lv.n, gap))
        prev = lv
    return out


# ---------------------------------------------------------------------------
# dispatch


def generate(example: int, n_max: int, **base):
    if example == 1:
        return generate_example1(n_max=n_max, **base)
    if example == 2:
        return generate_example2(m_max=n_max, **base)
    if example == 3:
        return generate_example3(n_max=n_max, **base)
    raise ValueError(f"unknown example {example!r}")


def validate(params, n_values=None) -> list:
    """Verdicts for the schedule's own inequalities.

    Example 1: the one-step lemma on every generated step with enough room
    (evaluated on the truncated product) plus the exponent-track bounds from
    ``N2**2`` on.  Example 2: the a-track stays in [1, 2].  Example 3:
    (j)-(m) and the beta structure.
    """
    if isinstance(params, Example1Params):
        from .orbits import example1_lemma_verdicts

        ns = list(range(1, params.n_max - 2)) if n_values is None else list(n_values)
        out = example1_lemma_verdicts(params, ns)
        track_ns = [n for n in ns if n >= params.N2 ** 2 and n + 1 <= params.n_max]
        out.extend(example1_track_verdicts(params, track_ns))
        return out
    if isinstance(params, Example2Params):
        ms = list(range(params.N2, params.m_max + 1)) if n_values is None else list(n_values)
        out = []
        for m in ms:
            a = params.a_track(m)
            out.append(judge("a_track>=1", m, iv_sub(a, XReal(1)), "<="))
        return out
    if isinstance(params, Example3Params):
        ns = list(range(1, len(params.levels))) if n_values is None else list(n_values)
        return example3_structure_verdicts(params) + example3_verdicts(params, ns)
    raise TypeError("unknown schedule type")


# ---------------------------------------------------------------------------
# CSV


def _fmt(x: XInterval) -> str:
    if x.lo.is_finite() and x.hi.is_finite():
        return x.mid().to_str(12)
    return ">=" + x.lo.to_str(12)


def schedule_to_csv(params) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    ln10 = iv_ln(XReal(10))
    if isinstance(params, Example1Params):
        w.writerow(["n", "log10_s_n", "log_s_n_lo", "log_s_n_hi", "alpha_n", "beta_n"])
        for n in range(1, params.n_max + 1):
            ls = params.log_s(n)
            if n >= params.N2:
                a, b = params.alpha(n).mid().to_str(12), params.beta(n).mid().to_str(12)
            else:
                a = b = ""
            l10 = params.log10_s_exact(n)
            w.writerow([n, l10 if l10 is not None else iv_div(ls, ln10).mid().to_str(),
                        ls.lo.to_str(), ls.hi.to_str(), a, b])
    elif isinstance(params, Example2Params):
        w.writerow(["m", "block", "log10_s_m", "log_s_m_lo", "log_s_m_hi", "zero_power"])
        for m in range(1, params.m_max + 1):
            ls = params.log_s(m)
            k = _log10_exact(params.s1)
            l10 = k * params.P(m) if k is not None else iv_div(ls, ln10).mid().to_str()
            w.writerow([m, params.block(m), l10, ls.lo.to_str(), ls.hi.to_str(), params.zero_power(m)])
    elif isinstance(params, Example3Params):
        w.writerow(["n", "log_S_n", "log10_m_n", "delta_n", "log_a_n", "log_R_n", "beta_n", "log_r_n"])
        for lv in params.levels:
            w.writerow([lv.n] + [_fmt(x) for x in (lv.L, iv_div(lv.log_m, ln10), lv.delta, lv.log_a,
                                                    lv.log_R, lv.beta, lv.log_r)])
    else:
        raise TypeError("unknown schedule type")
    return buf.getvalue()
