"""Entire functions with structured zero sets, and rigorous modulus bounds.

Two families are supported:

* :class:`ProductSpec`: ``z**p * prod(1 - z/a_k)`` with positive real zeros
  ``a_k`` carried by their logarithms.  For such products the maximum and
  minimum modulus on ``|z| = r`` are attained at ``-r`` and ``+r``.
* :class:`MixedSumSpec`: ``g * h`` with ``g = sum a_j (exp(-(z/S_j)**m_j) - 1)``
  and ``h`` a positive-zero product; only modulus enclosures are available.

Radii are always given by ``log r`` (an XReal or an XInterval of log-radii).
"""

from __future__ import annotations

import cmath
import contextlib
import contextvars
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .xlog import (
    DomainError,
    XInterval,
    XReal,
    iv,
    iv_add,
    iv_exp,
    iv_ln,
    iv_log1mexp,
    iv_logsubexp,
    iv_logsumexp,
    iv_mul,
    iv_softplus,
    iv_sub,
    ln2_interval,
    log_abs_one_minus,
    xr,
    xr_ln,
)

__all__ = [
    "TruncationError",
    "truncation_factor",
    "get_truncation_factor",
    "ZeroTerm",
    "TailBound",
    "ProductSpec",
    "Exclusion",
    "MixedTerm",
    "MixedSumSpec",
    "LevelRadius",
    "ClassicExp",
    "Perturbed",
    "FunctionSpec",
    "Envelope",
    "MixedEnclosure",
    "PointValue",
    "modulus_interval",
    "log_modulus_bounds",
    "envelope",
    "exact_max_min_modulus",
    "max_modulus",
    "min_modulus",
    "jensen_mean",
    "zero_count_below",
    "point_eval",
    "poly_log_max_modulus",
    "mixed_log_modulus",
    "spec_to_dict",
    "spec_from_dict",
    "dumps_spec",
    "loads_spec",
]

DEFAULT_TRUNCATION_FACTOR = 16
_TRUNC: contextvars.ContextVar = contextvars.ContextVar("mcwd_truncation", default=DEFAULT_TRUNCATION_FACTOR)


def get_truncation_factor() -> int:
    return _TRUNC.get()


@contextlib.contextmanager
def truncation_factor(B: int):
    """Default ``B`` for product specs built inside the block."""
    if int(B) < 2:
        raise ValueError("truncation factor must be at least 2")
    token = _TRUNC.set(int(B))
    try:
        yield int(B)
    finally:
        _TRUNC.reset(token)
PHASE_CUTOFF = 700.0
DEFAULT_PHASE_BUDGET = 1e-6


class TruncationError(DomainError):
    """Evaluation radius beyond the range where the tail bound is valid."""


@dataclass(frozen=True)
class ZeroTerm:
    """A positive zero; ``log_modulus`` is an enclosure (often a point)."""

    log_modulus: XInterval
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "log_modulus", iv(self.log_modulus))
        if int(self.multiplicity) < 1:
            raise ValueError("multiplicity must be >= 1")


@dataclass(frozen=True)
class TailBound:
    """Zeros dropped from an infinite product.

    Guarantees that every unlisted zero has log-modulus at least
    ``log_modulus`` and that ``sum(mult_k / a_k) <= 2 * multiplicity *
    exp(-log_modulus)`` over the unlisted zeros (geometric decay, which the
    schedules establish when they build the spec).
    """

    start_index: int
    log_modulus: XReal
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "log_modulus", xr(self.log_modulus))


@dataclass(frozen=True)
class ProductSpec:
    power_at_zero: int = 0
    zeros: tuple = ()
    tail: TailBound | None = None
    truncation_factor: int = field(default_factory=get_truncation_factor)
    label: str = ""

    def __post_init__(self):
        zs = tuple(z if isinstance(z, ZeroTerm) else ZeroTerm(*z) for z in self.zeros)
        for a, b in zip(zs, zs[1:]):
            if b.log_modulus.lo < a.log_modulus.lo:
                raise ValueError("zeros must be sorted by log_modulus")
        if self.power_at_zero < 0:
            raise ValueError("power_at_zero must be non-negative")
        if self.tail is not None and zs and self.tail.log_modulus < zs[-1].log_modulus.lo:
            raise ValueError("tail must start above the listed zeros")
        object.__setattr__(self, "zeros", zs)

    @property
    def log_B(self) -> XReal:
        return xr_ln(XReal(self.truncation_factor))

    def cutoff(self) -> XReal | None:
        """Largest log r for which the tail bound is valid (None: no tail)."""
        if self.tail is None:
            return None
        return iv_sub(self.tail.log_modulus, iv(self.log_B)).lo

    def check_radius(self, log_r_hi: XReal):
        c = self.cutoff()
        if c is not None and log_r_hi > c:
            raise TruncationError(f"log r = {log_r_hi} beyond tail cutoff {c}")

    def zero_logs(self) -> list:
        return [z.log_modulus for z in self.zeros]

    def degree_below(self, log_t) -> int:
        return zero_count_below(self, log_t)


@dataclass(frozen=True)
class Exclusion:
    """Guarantee ``|1 - z/a| >= lower_bound`` for the zero with this index."""

    zero_index: int
    lower_bound: XReal

    def __post_init__(self):
        object.__setattr__(self, "lower_bound", xr(self.lower_bound))


@dataclass(frozen=True)
class MixedTerm:
    """One summand ``a (exp(-(z/S)**m) - 1)`` with ``a = S**((1-delta) m)``."""

    log_scale: XInterval
    exponent: XInterval
    delta: XInterval
    log_exponent: XInterval | None = None

    def __post_init__(self):
        object.__setattr__(self, "log_scale", iv(self.log_scale))
        object.__setattr__(self, "exponent", iv(self.exponent))
        object.__setattr__(self, "delta", iv(self.delta))
        if self.log_exponent is None:
            object.__setattr__(self, "log_exponent", _safe_ln(self.exponent))

    @property
    def log_amplitude(self) -> XInterval:
        return iv_mul(iv_mul(1 - self.delta, self.exponent), self.log_scale)

    @property
    def sqrt_log_scale(self) -> XInterval:
        # delta * log S = sqrt(log S) by construction of the schedule
        return iv_mul(self.delta, self.log_scale)


@dataclass(frozen=True)
class MixedSumSpec:
    """``f = g h``; ``g`` is a sum of :class:`MixedTerm`, ``h`` a product.

    ``tail_exponent`` is a lower bound for the exponent of the first unlisted
    term and ``tail_log_log_scale`` a lower bound for log(log S) of every
    unlisted term.  With them the unlisted terms contribute at most
    ``4 exp(-tail_exponent)`` on ``log r <= sqrt(log S_next) - 1``.
    """

    terms: tuple
    product_part: ProductSpec
    tail_exponent: XInterval | None = None
    tail_log_log_scale: XInterval | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def tail_log_bound(self, log_r_hi: XReal) -> XInterval | None:
        if self.tail_exponent is None:
            return None
        sqrt_next = iv_exp(iv_mul(self.tail_log_log_scale, XReal(0.5)))
        if log_r_hi > iv_sub(sqrt_next, 1).lo:
            raise TruncationError("radius beyond the mixed-sum tail cutoff")
        return iv_sub(iv_ln(XReal(4)), self.tail_exponent)


@dataclass(frozen=True)
class ClassicExp:
    """The exponential function."""

    label: str = "exp"


@dataclass(frozen=True)
class Perturbed:
    """``g = base + P`` with ``P(z) = sum coefficients[k] z**k``."""

    base: object
    coefficients: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))


FunctionSpec = Union[ProductSpec, MixedSumSpec, ClassicExp, Perturbed]


@dataclass(frozen=True)
class LevelRadius:
    """Radii ``R_n ** lam`` of a mixed-sum spec, with ``(R_n/S_n)**m_n = 1/2``."""

    level: int
    lam: XInterval

    def __post_init__(self):
        object.__setattr__(self, "lam", iv(self.lam))


def _safe_ln(x: XInterval) -> XInterval:
    return iv_ln(x)


def _as_iv(log_r) -> XInterval:
    return iv(log_r) if not isinstance(log_r, XInterval) else log_r


# ---------------------------------------------------------------------------
# positive-zero products


def _tail_T(spec: ProductSpec, t_hi: XReal, dropped: Sequence[ZeroTerm]) -> XInterval | None:
    """log of an upper bound for sum(mult * r / a) over dropped zeros."""
    logT = None
    for z in dropped:
        term = iv_add(iv_sub(t_hi, z.log_modulus), iv_ln(XReal(z.multiplicity)))
        logT = term if logT is None else iv_logsumexp(logT, term)
    if spec.tail is not None:
        term = iv_add(
            iv_sub(t_hi, spec.tail.log_modulus), iv_ln(XReal(2 * spec.tail.multiplicity))
        )
        logT = term if logT is None else iv_logsumexp(logT, term)
    return logT


def _tail_interval(logT: XInterval | None) -> XInterval:
    """[-2T, T] for a sum of log|1 - w_k| with sum |w_k| <= T <= 1/16."""
    if logT is None:
        return XInterval.point(XReal(0))
    T = iv_exp(logT).hi
    if T > XReal(0.5):
        raise TruncationError("tail bound too weak at this radius")
    return XInterval(-2 * T, T)


def _split(spec: ProductSpec, t_hi: XReal):
    spec.check_radius(t_hi)
    lim = iv_add(t_hi, spec.log_B).hi
    keep, drop = [], []
    for i, z in enumerate(spec.zeros):
        (keep if z.log_modulus.lo <= lim else drop).append((i, z))
    return keep, [z for _, z in drop]


def log_modulus_bounds(spec: ProductSpec, log_r, exclusions: Iterable[Exclusion] = ()) -> XInterval:
    """Enclosure of log|f(z)| over ``|z| = r``, ``log r`` in the given interval.

    Points inside exclusion disks are omitted.  A zero whose modulus lies in
    the radius range and is not excluded makes the lower bound ``-inf``.
    """
    T = _as_iv(log_r)
    excl = {e.zero_index: e.lower_bound for e in exclusions}
    keep, dropped = _split(spec, T.hi)
    total = iv_mul(XInterval.point(XReal(spec.power_at_zero)), T)
    for i, z in keep:
        lw = iv_sub(T, z.log_modulus)
        fac = log_abs_one_minus(lw, excl.get(i))
        if z.multiplicity != 1:
            fac = iv_mul(fac, XReal(z.multiplicity))
        total = iv_add(total, fac)
    return iv_add(total, _tail_interval(_tail_T(spec, T.hi, dropped)))


@dataclass(frozen=True)
class Envelope:
    """On a zero-free range of log r: ``log|f| in degree*t - const + corr``."""

    degree: int
    const: XInterval
    corr: XInterval
    t_range: XInterval

    def at(self, t) -> XInterval:
        return iv_add(iv_sub(iv_mul(XReal(self.degree), iv(t)), self.const), self.corr)

    def lower_linear(self, coef, t) -> XInterval:
        """Enclosure of ``degree*t - const + corr - coef*t`` (for slack checks)."""
        return iv_sub(self.at(t), iv_mul(iv(coef), iv(t)))


def envelope(spec: ProductSpec, log_r) -> Envelope:
    """Affine envelope of log|f| on a radius range containing no zero.

    Zeros below the range contribute ``t - log a + log|1 - a/z|``; those
    above contribute ``log|1 - z/a|``.  The corrections are enclosed over
    the whole range, so ``degree*t - const`` keeps the exact dependence on t.
    """
    T = _as_iv(log_r)
    keep, dropped = _split(spec, T.hi)
    deg = spec.power_at_zero
    const = XInterval.point(XReal(0))
    corr = XInterval.point(XReal(0))
    for _, z in keep:
        la = z.log_modulus
        if la.hi < T.lo:
            lw = iv_sub(la, T)  # log|a/z|
            const = iv_add(const, iv_mul(XReal(z.multiplicity), la))
            deg += z.multiplicity
        elif la.lo > T.hi:
            lw = iv_sub(T, la)
        else:
            raise DomainError("envelope range contains a zero")
        fac = log_abs_one_minus(lw)
        if z.multiplicity != 1:
            fac = iv_mul(fac, XReal(z.multiplicity))
        corr = iv_add(corr, fac)
    corr = iv_add(corr, _tail_interval(_tail_T(spec, T.hi, dropped)))
    return Envelope(deg, const, corr, T)


def _axis_sum(spec: ProductSpec, t: XReal, sign: int) -> XInterval:
    """log|f(sign * r)| for a positive-zero product (sign=-1 gives M, +1 gives m)."""
    T = XInterval.point(t)
    keep, dropped = _split(spec, t)
    total = iv_mul(XInterval.point(XReal(spec.power_at_zero)), T)
    for _, z in keep:
        lw = iv_sub(T, z.log_modulus)
        if sign < 0:
            fac = iv_softplus(lw)
        else:
            if lw.contains(XReal(0)):
                if lw.is_point():
                    return XInterval(XReal.ninf(), iv_add(total, XReal(0)).hi)
                fac = log_abs_one_minus(lw)
            elif lw.hi < XReal(0):
                fac = iv_log1mexp(lw)
            elif lw.contains(XReal(0)):
                fac = log_abs_one_minus(lw)
            else:
                # log(r/a - 1) = lw + log(1 - a/r)
                fac = iv_add(lw, iv_log1mexp(iv_sub(XReal(0), lw)))
        if z.multiplicity != 1:
            fac = iv_mul(fac, XReal(z.multiplicity))
        total = iv_add(total, fac)
    tail = _tail_interval(_tail_T(spec, t, dropped))
    if sign < 0:
        tail = XInterval(XReal(0), tail.hi)
    return iv_add(total, tail)


def exact_max_min_modulus(spec: ProductSpec, log_r) -> tuple:
    """(log M(r), log m(r)) as enclosures; M at z=-r, m at z=+r.

    Intervals rather than bare values: the width is the rounding plus the
    tail bound, and callers need both ends to judge inequalities.
    """
    t = xr(log_r)
    return _axis_sum(spec, t, -1), _axis_sum(spec, t, +1)


def max_modulus(spec, log_r) -> XInterval:
    """Enclosure of log M(r, f) for any supported spec."""
    if isinstance(spec, ProductSpec):
        return _axis_sum(spec, xr(log_r), -1)
    if isinstance(spec, ClassicExp):
        return iv_exp(iv(log_r))
    if isinstance(spec, Perturbed):
        base = max_modulus(spec.base, log_r)
        p = poly_log_max_modulus(spec.coefficients, log_r)
        if p is None:
            return base
        # M(f) - M(P) <= M(f + P) <= M(f) + M(P)
        lo = _sub_or_ninf(XInterval.point(base.lo), XInterval.point(p.hi)).lo
        return XInterval(lo, iv_logsumexp(base, p).hi)
    return modulus_interval(spec, log_r)


def min_modulus(spec, log_r) -> XInterval:
    """Enclosure (lower side rigorous) of log m(r, f)."""
    if isinstance(spec, ProductSpec):
        return _axis_sum(spec, xr(log_r), +1)
    if isinstance(spec, ClassicExp):
        return iv_sub(XReal(0), iv_exp(iv(log_r)))
    if isinstance(spec, Perturbed):
        base = min_modulus(spec.base, log_r)
        p = poly_log_max_modulus(spec.coefficients, log_r)
        return base if p is None else _sub_or_ninf(base, p)
    return modulus_interval(spec, log_r)


def _sub_or_ninf(a: XInterval, b: XInterval) -> XInterval:
    """Enclosure of log|u + v| from |u| in e^a and |v| <= e^b.hi; the lower
    end is -inf when the sum may vanish."""
    if a.lo > b.hi:
        lo = iv_logsubexp(XInterval.point(a.lo), XInterval.point(b.hi)).lo
    else:
        lo = XReal.ninf()
    return XInterval(lo, iv_logsumexp(XInterval.point(a.hi), XInterval.point(b.hi)).hi)


def poly_log_max_modulus(coefficients: Sequence, log_r) -> XInterval | None:
    """Enclosure of log M(r, P) (None for P = 0).

    Upper end from ``sum |c_k| r**k``, lower end from Cauchy's estimate
    ``|c_k| r**k <= M(r, P)`` for the largest single term.
    """
    T = iv(log_r)
    acc = None
    best = None
    for k, c in enumerate(coefficients):
        c = abs(complex(c)) if not isinstance(c, (int, float, Fraction, XReal)) else abs(c)
        if c == 0:
            continue
        term = iv_add(iv_ln(XInterval.point(xr(c))), iv_mul(XReal(k), T))
        acc = term if acc is None else iv_logsumexp(acc, term)
        best = term.lo if best is None or term.lo > best else best
    if acc is None:
        return None
    return XInterval(best, acc.hi)


def jensen_mean(spec: ProductSpec, log_r, exact: bool = False):
    """Mean of log|f| over ``|z| = r``: ``p t + sum_{a_k <= r} m_k (t - log a_k)``.

    Zeros on the circle count as inside.  Zeros beyond the truncation do not
    contribute at all (their circle means vanish).  With ``exact=True`` the
    dyadic inputs are summed as a Fraction; otherwise an enclosure is returned.
    """
    t = xr(log_r)
    if spec.tail is not None and spec.tail.log_modulus <= t:
        raise TruncationError("radius reaches unlisted zeros")
    if exact:
        tf = t.to_fraction()
        total = spec.power_at_zero * tf
        for z in spec.zeros:
            if not z.log_modulus.is_point():
                raise DomainError("exact Jensen mean needs point zeros")
            la = z.log_modulus.lo
            if la <= t:
                total += z.multiplicity * (tf - la.to_fraction())
        return total
    T = XInterval.point(t)
    total = iv_mul(XReal(spec.power_at_zero), T)
    for z in spec.zeros:
        la = z.log_modulus
        if la.hi <= t:
            total = iv_add(total, iv_mul(XReal(z.multiplicity), iv_sub(T, la)))
        elif la.lo <= t:
            raise DomainError("zero enclosure straddles the circle")
    return total


def zero_count_below(spec: ProductSpec, log_t) -> int:
    """Zeros (with multiplicity, origin included) of modulus < t."""
    t = xr(log_t)
    if spec.tail is not None and spec.tail.log_modulus < t:
        raise TruncationError("count would need unlisted zeros")
    n = spec.power_at_zero
    for z in spec.zeros:
        if z.log_modulus.hi < t:
            n += z.multiplicity
        elif z.log_modulus.lo < t:
            raise DomainError("zero enclosure straddles the circle")
        else:
            break
    return n


# ---------------------------------------------------------------------------
# point evaluation


@dataclass(frozen=True)
class PointValue:
    log_abs: XInterval
    arg: tuple  # (lo, hi) in radians, not reduced; None when downgraded
    phase_error: float
    modulus_only: bool


def point_eval(
    spec: ProductSpec, log_abs_z, arg: float, phase_budget: float = DEFAULT_PHASE_BUDGET
) -> PointValue:
    """log|f(z)| and arg f(z) at ``z = exp(log_abs_z + i arg)``.

    Factors with ``|log|z/a|| <= 700`` use double complex arithmetic; larger
    ones use the asymptotic forms ``-z/a`` or ``1`` with explicit modulus and
    phase error terms.
    """
    if not isinstance(spec, ProductSpec):
        raise TypeError("point_eval supports ProductSpec only")
    t = xr(log_abs_z)
    T = XInterval.point(t)
    keep, dropped = _split(spec, t)
    log_abs = iv_mul(XInterval.point(XReal(spec.power_at_zero)), T)
    phase = spec.power_at_zero * arg
    perr = 0.0
    fl_err = 0.0
    for _, z in keep:
        lw = iv_sub(T, z.log_modulus)
        lwf = float(lw.lo)
        m = z.multiplicity
        if abs(lwf) <= PHASE_CUTOFF:
            wmod = math.exp(float(lw.mid()))
            w = cmath.rect(wmod, arg)
            one_minus = 1 - w
            if one_minus == 0:
                return PointValue(XInterval(XReal.ninf(), XReal.ninf()), (math.nan, math.nan), math.inf, True)
            ln_abs = math.log(abs(one_minus))
            # double rounding of exp/log/complex ops: a few ulps relative
            err = 8 * 2.2e-16 * (1 + abs(ln_abs) + wmod / abs(one_minus))
            fl_err += m * err
            log_abs = iv_add(log_abs, XInterval(XReal(m * ln_abs) - XReal(m * err), XReal(m * ln_abs) + XReal(m * err)))
            phase += m * cmath.phase(one_minus)
            perr += m * err
        elif lwf > 0:
            fac = log_abs_one_minus(lw)
            log_abs = iv_add(log_abs, iv_mul(fac, XReal(m)))
            phase += m * (arg + math.pi)
            perr += m * 2 * math.exp(-lwf)
        else:
            fac = log_abs_one_minus(lw)
            log_abs = iv_add(log_abs, iv_mul(fac, XReal(m)))
            perr += m * 2 * math.exp(float(lw.hi))
    tail = _tail_T(spec, t, dropped)
    log_abs = iv_add(log_abs, _tail_interval(tail))
    if tail is not None:
        perr += 2 * math.exp(min(0.0, float(tail.hi)))
    if perr > phase_budget:
        return PointValue(log_abs, None, perr, True)
    return PointValue(log_abs, (phase - perr, phase + perr), perr, False)


# ---------------------------------------------------------------------------
# mixed sums


@dataclass
class MixedEnclosure:
    """Pieces of the modulus bound of ``f = g h`` on a radius range.

    All log-values are offsets from ``anchor`` (0 unless anchored at a level).
    """

    anchor_level: int | None
    term_logs: list = field(default_factory=list)  # per term: enclosure of log|g_j|
    saturated: list = field(default_factory=list)  # indices whose |g_j| is [0, tiny]
    tail_log: XInterval | None = None
    g_upper: XInterval | None = None
    g_lower: XInterval | None = None
    log_h: XInterval | None = None
    log_f: XInterval | None = None
    dominant: int | None = None


def _level_log_r(spec: MixedSumSpec, rad: LevelRadius) -> XInterval:
    term = spec.terms[rad.level - 1]
    ln2 = ln2_interval()
    log_R = iv_sub(term.log_scale, ln2 / term.exponent)
    return iv_mul(rad.lam, log_R)


def mixed_log_modulus(spec: MixedSumSpec, radius, real_axis: bool = False, anchored: bool = False) -> MixedEnclosure:
    """Modulus enclosure for a mixed sum on a radius range.

    ``radius`` is a log r (XReal/XInterval) or a :class:`LevelRadius`.
    With ``real_axis`` the points are positive reals, for which
    ``|exp(-w) - 1| = 1 - exp(-w)`` holds exactly.  With ``anchored`` (only
    for LevelRadius) every log-value is reported relative to log a_level, so
    that inequalities whose two sides are both of size log a_level can be
    judged without cancellation.
    """
    ln2 = ln2_interval()
    if isinstance(radius, LevelRadius):
        level = radius.level
        log_r = _level_log_r(spec, radius)
    else:
        level = None
        log_r = iv(radius)
        anchored = False
    out = MixedEnclosure(anchor_level=level if anchored else None)
    anchor = spec.terms[level - 1].log_amplitude if anchored else XInterval.point(XReal(0))

    lowers = []
    for j, term in enumerate(spec.terms, start=1):
        if level == j:
            lam = radius.lam
            mL = iv_mul(term.exponent, term.log_scale)
            # (lam - 1)(mL - ln 2) - ln 2: a single occurrence of lam keeps it sharp
            log_w = iv_sub(iv_mul(iv_sub(lam, 1), iv_sub(mL, ln2)), ln2)
        else:
            log_w = iv_mul(term.exponent, iv_sub(log_r, term.log_scale))
        # log(a |w|) = m (log r - sqrt(log S)); relative to the anchor
        if anchored and level == j:
            log_aw = log_w
            log_a = XInterval.point(XReal(0))
        else:
            log_aw = iv_sub(iv_mul(term.exponent, iv_sub(log_r, term.sqrt_log_scale)), anchor)
            log_a = iv_sub(term.log_amplitude, anchor) if not anchored else None
        if real_axis:
            w = iv_exp(log_w)
            fac = iv_log1mexp(iv_sub(XReal(0), w))
            if anchored and level != j:
                # log a - anchor: a_j S_j-power; use a|w| form to avoid a huge log a
                lo = XReal.ninf()
                hi = iv_add(iv_sub(term.log_amplitude, anchor), fac).hi if term.log_amplitude.hi.is_finite() else XReal.inf()
                if log_w.hi <= -ln2.hi:
                    hi = min(hi, iv_add(log_aw, XInterval.point(ln2.hi)).hi)
                enc = XInterval(lo, hi)
            else:
                base = log_a if log_a is not None else XInterval.point(XReal(0))
                enc = iv_add(base, fac)
        elif (level == j and radius.lam.hi <= XReal(1)) or log_w.hi <= -ln2.hi:
            # |w| <= 1/2; at a level radius this is exactly lam <= 1
            enc = iv_add(log_aw, XInterval(-ln2.hi, ln2.hi))
        else:
            # |g_j| <= a (e^{|w|} + 1); no lower bound off the real axis
            up = iv_softplus(iv_exp(log_w))
            hi = iv_add(iv_sub(term.log_amplitude, anchor), up).hi
            enc = XInterval(XReal.ninf(), hi)
        out.term_logs.append(enc)
        if enc.hi.is_finite() and iv_exp(XInterval.point(enc.hi)).lo.is_zero():
            out.saturated.append(j)
        lowers.append(enc.lo)

    tail = spec.tail_log_bound(log_r.hi)
    if tail is not None:
        tail = iv_sub(tail, anchor)
        out.tail_log = XInterval(XReal.ninf(), tail.hi)
        if iv_exp(XInterval.point(tail.hi)).lo.is_zero():
            out.saturated.append("tail")

    dom = level if level is not None else max(range(1, len(lowers) + 1), key=lambda j: lowers[j - 1])
    out.dominant = dom
    upper = None
    others = None
    for j, enc in enumerate(out.term_logs, start=1):
        up = XInterval.point(enc.hi)
        upper = up if upper is None else iv_logsumexp(upper, up)
        if j != dom:
            others = up if others is None else iv_logsumexp(others, up)
    if out.tail_log is not None:
        t_up = XInterval.point(out.tail_log.hi)
        upper = iv_logsumexp(upper, t_up)
        others = t_up if others is None else iv_logsumexp(others, t_up)
    out.g_upper = upper
    d_lo = out.term_logs[dom - 1].lo
    # g_lower.lo is the certified lower bound of log|g|; -inf means none
    if others is None and d_lo.is_finite():
        out.g_lower = XInterval.point(d_lo)
    elif others is not None and d_lo.is_finite() and d_lo > others.hi:
        out.g_lower = iv_logsubexp(XInterval.point(d_lo), others)
    else:
        out.g_lower = XInterval(XReal.ninf(), upper.hi)
    out.log_h = log_modulus_bounds(spec.product_part, log_r)
    out.log_f = XInterval(iv_add(out.g_lower.lo, out.log_h.lo).lo if out.g_lower.lo.is_finite() else XReal.ninf(),
                          iv_add(out.g_upper.hi, out.log_h.hi).hi)
    return out


# ---------------------------------------------------------------------------
# dispatch


def modulus_interval(spec, log_r, exclusions: Iterable[Exclusion] = ()) -> XInterval:
    """Enclosure of log|f(z)| over the circle(s) ``|z| = r``."""
    if isinstance(spec, ProductSpec):
        return log_modulus_bounds(spec, log_r, exclusions)
    if isinstance(spec, ClassicExp):
        r = iv_exp(iv(log_r))
        return XInterval(iv_sub(XReal(0), r).lo, r.hi)
    if isinstance(spec, Perturbed):
        base = modulus_interval(spec.base, log_r, exclusions)
        p = poly_log_max_modulus(spec.coefficients, log_r)
        if p is None:
            return base
        up = iv_logsumexp(XInterval.point(base.hi), p)
        lo = _sub_or_ninf(XInterval.point(base.lo), XInterval.point(p.hi)).lo if base.lo.is_finite() else XReal.ninf()
        return XInterval(lo, up.hi)
    if isinstance(spec, MixedSumSpec):
        return mixed_log_modulus(spec, log_r).log_f
    raise TypeError(f"unsupported spec {type(spec).__name__}")


# ---------------------------------------------------------------------------
# serialization (TOML-shaped nested dicts)


def _ivd(x: XInterval) -> list:
    return [x.lo.to_str(), x.hi.to_str()]


def _ivl(v) -> XInterval:
    # strings carry the exact binary endpoints, so nearest parsing is identity
    return XInterval(XReal(v[0]), XReal(v[1]))


def spec_to_dict(spec) -> dict:
    if isinstance(spec, ProductSpec):
        d = {
            "kind": "product",
            "power_at_zero": spec.power_at_zero,
            "truncation_factor": spec.truncation_factor,
            "zeros": [{"log_modulus": _ivd(z.log_modulus), "multiplicity": z.multiplicity} for z in spec.zeros],
        }
        if spec.label:
            d["label"] = spec.label
        if spec.tail is not None:
            d["tail"] = {
                "start_index": spec.tail.start_index,
                "log_modulus": spec.tail.log_modulus.to_str(),
                "multiplicity": spec.tail.multiplicity,
            }
        return d
    if isinstance(spec, MixedSumSpec):
        d = {
            "kind": "mixed",
            "terms": [
                {
                    "log_scale": _ivd(t.log_scale),
                    "exponent": _ivd(t.exponent),
                    "delta": _ivd(t.delta),
                    "log_exponent": _ivd(t.log_exponent),
                }
                for t in spec.terms
            ],
            "product_part": spec_to_dict(spec.product_part),
        }
        if spec.label:
            d["label"] = spec.label
        if spec.tail_exponent is not None:
            d["tail_exponent"] = _ivd(spec.tail_exponent)
            d["tail_log_log_scale"] = _ivd(spec.tail_log_log_scale)
        return d
    if isinstance(spec, ClassicExp):
        return {"kind": "exp"}
    if isinstance(spec, Perturbed):
        return {
            "kind": "perturbed",
            "base": spec_to_dict(spec.base),
            "coefficients": [xr(c).to_str() for c in spec.coefficients],
        }
    raise TypeError(f"unsupported spec {type(spec).__name__}")


def spec_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "product":
        tail = None
        if "tail" in d:
            t = d["tail"]
            tail = TailBound(int(t["start_index"]), XReal(t["log_modulus"]), int(t.get("multiplicity", 1)))
        return ProductSpec(
            power_at_zero=int(d.get("power_at_zero", 0)),
            zeros=tuple(ZeroTerm(_ivl(z["log_modulus"]), int(z.get("multiplicity", 1))) for z in d.get("zeros", [])),
            tail=tail,
            truncation_factor=int(d.get("truncation_factor", DEFAULT_TRUNCATION_FACTOR)),
            label=d.get("label", ""),
        )
    if kind == "mixed":
        return MixedSumSpec(
            terms=tuple(
                MixedTerm(_ivl(t["log_scale"]), _ivl(t["exponent"]), _ivl(t["delta"]), _ivl(t["log_exponent"]))
                for t in d["terms"]
            ),
            product_part=spec_from_dict(d["product_part"]),
            tail_exponent=_ivl(d["tail_exponent"]) if "tail_exponent" in d else None,
            tail_log_log_scale=_ivl(d["tail_log_log_scale"]) if "tail_log_log_scale" in d else None,
            label=d.get("label", ""),
        )
    if kind == "exp":
        return ClassicExp()
    if kind == "perturbed":
        return Perturbed(spec_from_dict(d["base"]), tuple(XReal(c) for c in d["coefficients"]))
    raise ValueError(f"unknown spec kind {kind!r}")


def dumps_spec(spec) -> str:
    import tomli_w

    return tomli_w.dumps(spec_to_dict(spec))


def loads_spec(text: str):
    import tomli

    return spec_from_dict(tomli.loads(text))
