"""Extended-range reals and outward-rounded intervals.

Every magnitude in the package is carried as an :class:`XReal`: a binary
floating-point number whose exponent is an unbounded Python integer.  The
numbers of interest are usually natural logarithms of gigantic quantities,
and some of those logarithms are themselves far beyond ``float`` range.

Values are backed by mpmath's low-level ``mpf`` tuples, which already provide
correctly rounded add/sub/mul/div in any rounding direction.  Transcendental
functions are computed here with guard bits scaled to the exponent size and
then widened outward, so interval results are enclosures.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import os
from fractions import Fraction

from mpmath import libmp as _mp

__all__ = [
    "DomainError",
    "PRECISION_ENV",
    "XR_EXP_MAX_BITS",
    "XReal",
    "XInterval",
    "EmptyInterval",
    "EMPTY",
    "get_precision",
    "working_precision",
    "xr",
    "xr_add",
    "xr_sub",
    "xr_mul",
    "xr_div",
    "xr_neg",
    "xr_cmp",
    "xr_ln",
    "xr_exp",
    "iv",
    "iv_add",
    "iv_sub",
    "iv_mul",
    "iv_div",
    "iv_neg",
    "iv_scale",
    "iv_ln",
    "iv_exp",
    "iv_union",
    "iv_intersect",
    "iv_width",
    "iv_log1p",
    "iv_softplus",
    "iv_log1mexp",
    "iv_logsumexp",
    "iv_logsubexp",
    "log_abs_one_minus",
    "ln2_interval",
]

PRECISION_ENV = "MCWD_PRECISION"

# |x| >= 2**XR_EXP_MAX_BITS makes exp saturate to [huge, +inf) or [0, tiny]
XR_EXP_MAX_BITS = 64

_F, _C, _N = _mp.round_floor, _mp.round_ceiling, _mp.round_nearest
_GUARD = 24


class DomainError(ValueError):
    """Raised for arguments outside a function's domain."""


def _env_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if not raw:
        return 53
    try:
        bits = int(raw)
    except ValueError as exc:
        raise ValueError(f"{PRECISION_ENV} must be an integer, got {raw!r}") from exc
    if bits < 53:
        raise ValueError(f"{PRECISION_ENV} must be at least 53, got {bits}")
    return bits


_PREC: contextvars.ContextVar[int | None] = contextvars.ContextVar("mcwd_precision", default=None)


def get_precision() -> int:
    """Mantissa precision in bits for the current context."""
    p = _PREC.get()
    return _env_precision() if p is None else p


@contextlib.contextmanager
def working_precision(bits: int):
    """Temporarily set the mantissa precision (e.g. 113)."""
    if bits < 53:
        raise ValueError("precision must be at least 53 bits")
    token = _PREC.set(int(bits))
    try:
        yield bits
    finally:
        _PREC.reset(token)


def _check(t):
    if t == _mp.fnan:
        raise DomainError("indeterminate result")
    return t


def _to_mpf(v, prec: int, rnd: str = _N):
    if isinstance(v, XReal):
        return _mp.mpf_pos(v._v, prec, rnd)
    if isinstance(v, bool):
        v = int(v)
    if isinstance(v, int):
        return _mp.from_int(v, prec, rnd)
    if isinstance(v, float):
        if math.isnan(v):
            raise DomainError("NaN is not an XReal")
        return _mp.mpf_pos(_mp.from_float(v), prec, rnd)
    if isinstance(v, Fraction):
        return _mp.from_rational(v.numerator, v.denominator, prec, rnd)
    if isinstance(v, str):
        return _parse(v, prec, rnd)
    if isinstance(v, tuple) and len(v) == 4:
        return _mp.mpf_pos(v, prec, rnd)
    mpf = getattr(v, "_mpf_", None)
    if mpf is not None:
        return _mp.mpf_pos(mpf, prec, rnd)
    raise TypeError(f"cannot convert {type(v).__name__} to XReal")


def _parse(s: str, prec: int, rnd: str):
    text = s.strip().lower()
    if text in ("inf", "+inf", "infinity", "+infinity"):
        return _mp.finf
    if text in ("-inf", "-infinity"):
        return _mp.fninf
    try:
        return _mp.from_str(text, prec, rnd)
    except ValueError as exc:
        raise ValueError(f"malformed decimal {s!r}") from exc


def _digits_for(prec: int) -> int:
    return math.ceil(prec * math.log10(2)) + 1


class XReal:
    """Signed real ``sign * mantissa * 2**exponent`` with unbounded exponent.

    Construction rounds to nearest at the current precision.  The special
    values ``XReal.inf()`` and ``XReal.ninf()`` exist so they can serve as
    interval endpoints; ordinary arithmetic on them follows extended-real
    rules and raises :class:`DomainError` on indeterminate forms.
    """

    __slots__ = ("_v",)

    def __init__(self, value=0, *, rnd: str = _N, prec: int | None = None):
        self._v = _to_mpf(value, get_precision() if prec is None else prec, rnd)

    @classmethod
    def _raw(cls, t) -> "XReal":
        obj = cls.__new__(cls)
        obj._v = _check(t)
        return obj

    @classmethod
    def pow2(cls, e: int) -> "XReal":
        return cls._raw(_mp.from_man_exp(1, int(e)))

    @classmethod
    def from_parts(cls, sign: int, mantissa, exponent: int) -> "XReal":
        if sign == 0:
            return cls._raw(_mp.fzero)
        m = _to_mpf(mantissa, get_precision())
        if sign < 0:
            m = _mp.mpf_neg(m)
        return cls._raw(_mp.mpf_shift(m, int(exponent)))

    @classmethod
    def inf(cls) -> "XReal":
        return cls._raw(_mp.finf)

    @classmethod
    def ninf(cls) -> "XReal":
        return cls._raw(_mp.fninf)

    @property
    def sign(self) -> int:
        if self._v == _mp.fzero:
            return 0
        return -1 if self._v[0] else 1

    @property
    def exponent(self) -> int:
        """Power of two with the mantissa normalized to [1, 2); 0 for zero."""
        self._require_finite()
        if self.sign == 0:
            return 0
        _, man, exp, bc = self._v
        return int(exp) + int(bc) - 1

    @property
    def mantissa(self) -> Fraction:
        """Exact mantissa in [1, 2); 0 for zero."""
        self._require_finite()
        if self.sign == 0:
            return Fraction(0)
        _, man, _, bc = self._v
        return Fraction(int(man), 1 << (int(bc) - 1))

    def _require_finite(self):
        if not self.is_finite():
            raise DomainError("infinite XReal has no mantissa/exponent")

    def is_finite(self) -> bool:
        return self._v not in (_mp.finf, _mp.fninf)

    def is_zero(self) -> bool:
        return self._v == _mp.fzero

    def mpf(self):
        """The underlying mpmath tuple."""
        return self._v

    def __float__(self) -> float:
        return _mp.to_float(self._v)

    def __int__(self) -> int:
        self._require_finite()
        return int(_mp.to_int(self._v))

    def floor(self) -> int:
        self._require_finite()
        return int(_mp.to_int(_mp.mpf_floor(self._v)))

    def ceil(self) -> int:
        self._require_finite()
        return int(_mp.to_int(_mp.mpf_ceil(self._v)))

    def to_fraction(self) -> Fraction:
        self._require_finite()
        s, man, exp, _ = self._v
        if self.sign == 0:
            return Fraction(0)
        v = Fraction(int(man)) * (Fraction(2) ** int(exp))
        return -v if s else v

    def to_str(self, digits: int | None = None) -> str:
        """Decimal string ``d.ddd...e+EEE``; defaults to round-trip digits."""
        if digits is None:
            digits = _digits_for(max(get_precision(), self._v[3] if self.is_finite() else 0))
        if self._v == _mp.finf:
            return "inf"
        if self._v == _mp.fninf:
            return "-inf"
        if self.is_zero():
            return "0.0e+0"
        s = _mp.to_str(self._v, digits, strip_zeros=False, min_fixed=1, max_fixed=0)
        if "e" not in s:
            s += "e+0"
        return s

    @classmethod
    def from_str(cls, s: str) -> "XReal":
        return cls._raw(_parse(s, get_precision(), _N))

    def __repr__(self) -> str:
        return f"XReal('{self.to_str()}')"

    def __str__(self) -> str:
        return self.to_str(10 if self.is_finite() else None)

    def log10(self) -> float:
        """Approximate decimal logarithm as a float (for display)."""
        return float(xr_ln(self)) / math.log(10)

    # comparisons
    def _cmp(self, other) -> int:
        o = other if isinstance(other, XReal) else XReal(other, prec=max(get_precision(), 64))
        return _mp.mpf_cmp(self._v, o._v)

    def __eq__(self, other):
        if isinstance(other, (XReal, int, float, Fraction)):
            return self._cmp(other) == 0
        return NotImplemented

    def __hash__(self):
        return hash(self._v)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # arithmetic, round to nearest
    def __add__(self, other):
        return xr_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return xr_sub(self, other)

    def __rsub__(self, other):
        return xr_sub(other, self)

    def __mul__(self, other):
        return xr_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return xr_div(self, other)

    def __rtruediv__(self, other):
        return xr_div(other, self)

    def __neg__(self):
        return xr_neg(self)

    def __pos__(self):
        return self

    def __abs__(self):
        return XReal._raw(_mp.mpf_abs(self._v))

    def ln(self) -> "XReal":
        return xr_ln(self)

    def exp(self) -> "XInterval":
        return xr_exp(self)


def xr(value) -> XReal:
    """Coerce to XReal (no-op for XReal)."""
    return value if isinstance(value, XReal) else XReal(value)


def _x(v):
    return v._v if isinstance(v, XReal) else XReal(v)._v


def xr_add(x, y, rnd: str = _N) -> XReal:
    return XReal._raw(_mp.mpf_add(_x(x), _x(y), get_precision(), rnd))


def xr_sub(x, y, rnd: str = _N) -> XReal:
    return XReal._raw(_mp.mpf_sub(_x(x), _x(y), get_precision(), rnd))


def xr_mul(x, y, rnd: str = _N) -> XReal:
    return XReal._raw(_mp.mpf_mul(_x(x), _x(y), get_precision(), rnd))


def xr_div(x, y, rnd: str = _N) -> XReal:
    yv = _x(y)
    if yv == _mp.fzero:
        raise DomainError("division by zero")
    return XReal._raw(_mp.mpf_div(_x(x), yv, get_precision(), rnd))


def xr_neg(x) -> XReal:
    return XReal._raw(_mp.mpf_neg(_x(x)))


def xr_cmp(x, y) -> int:
    return _mp.mpf_cmp(_x(x), _x(y))


# ---------------------------------------------------------------------------
# transcendental kernels on raw tuples; each returns (lo, hi) at precision p


def _widen(v, rel_bits: int, p: int):
    """Outward bracket of an approximation with relative error <= 2**-rel_bits."""
    if v == _mp.fzero:
        return v, v
    err = _mp.mpf_shift(_mp.mpf_abs(v), -rel_bits)
    return _mp.mpf_sub(v, err, p, _F), _mp.mpf_add(v, err, p, _C)


def _ln_bounds(v, p: int):
    if v == _mp.finf:
        return _mp.finf, _mp.finf
    if v == _mp.fzero:
        return _mp.fninf, _mp.fninf
    if v[0] or v == _mp.fninf:
        raise DomainError("logarithm of a non-positive number")
    _, man, exp, bc = v
    e = int(exp) + int(bc) - 1
    if v == _mp.fone:
        return _mp.fzero, _mp.fzero
    if -1 <= e <= 0:
        # near 1: mpmath adds its own guard bits against cancellation
        wp = p + _GUARD
        return _widen(_mp.mpf_log(v, wp, _N), wp - 4, p)
    wp = p + e.bit_length() + _GUARD
    m = _mp.mpf_shift(v, -e)  # in [1, 2)
    lnm = _mp.mpf_log(m, wp, _N)
    eln2 = _mp.mpf_mul(_mp.from_int(e), _mp.mpf_ln2(wp), wp, _N)
    s = _mp.mpf_add(lnm, eln2, wp, _N)
    # |E ln2| dominates |s| for |E| >= 1 and m in [1,2); error ~ few ulps of it
    return _widen(s, wp - e.bit_length() - 6, p)


def _exp_bounds(v, p: int):
    if v == _mp.fzero:
        return _mp.fone, _mp.fone
    if v == _mp.finf:
        return _mp.finf, _mp.finf
    if v == _mp.fninf:
        return _mp.fzero, _mp.fzero
    s, man, exp, bc = v
    e = int(exp) + int(bc) - 1
    if e >= XR_EXP_MAX_BITS:
        big = 1 << XR_EXP_MAX_BITS
        if s:
            return _mp.fzero, _mp.from_man_exp(1, -big)
        return _mp.from_man_exp(1, big), _mp.finf
    wp = p + XR_EXP_MAX_BITS + _GUARD
    ln2 = _mp.mpf_ln2(wp)
    k = int(_mp.to_int(_mp.mpf_div(v, ln2, 64 + XR_EXP_MAX_BITS, _N), _N))
    r = _mp.mpf_sub(v, _mp.mpf_mul(_mp.from_int(k), ln2, wp, _N), wp, _N)
    y = _mp.mpf_shift(_mp.mpf_exp(r, wp, _N), k)
    return _widen(y, wp - XR_EXP_MAX_BITS - 8, p)


def _log1p_bounds(u, p: int):
    """log(1+u) for u > -1, directed."""
    if u == _mp.fzero:
        return u, u
    if u == _mp.finf:
        return _mp.finf, _mp.finf
    if _mp.mpf_cmp(u, _mp.from_int(-1)) <= 0:
        if _mp.mpf_cmp(u, _mp.from_int(-1)) == 0:
            return _mp.fninf, _mp.fninf
        raise DomainError("log1p argument <= -1")
    s, man, exp, bc = u
    e = int(exp) + int(bc) - 1
    if e < -(p + 4):
        # u/(1+u) <= log1p(u) <= u, and u^2 is below an ulp here
        lo = _mp.mpf_sub(u, _mp.mpf_mul(u, u, p, _C), p, _F)
        return lo, _mp.mpf_pos(u, p, _C)
    wp = p + max(0, -e) + _GUARD
    one_lo = _mp.mpf_add(_mp.fone, u, wp, _F)
    one_hi = _mp.mpf_add(_mp.fone, u, wp, _C)
    lo = _ln_bounds(one_lo, wp)[0]
    hi = _ln_bounds(one_hi, wp)[1]
    return _mp.mpf_pos(lo, p, _F), _mp.mpf_pos(hi, p, _C)


def _expm1_neg_log_bounds(v, p: int):
    """log(1 - e^v) for v < 0, directed."""
    if v == _mp.fninf:
        return _mp.fzero, _mp.fzero
    if _mp.mpf_cmp(v, _mp.fzero) >= 0:
        if v == _mp.fzero:
            return _mp.fninf, _mp.fninf
        raise DomainError("log(1-e^v) needs v < 0")
    s, man, exp, bc = v
    e = int(exp) + int(bc) - 1
    if e < -p - 8:
        # 1 - e^v in [|v| (1 - |v|/2), |v|]; log(1 - x/2) >= -x here
        av = _mp.mpf_neg(v)
        llo, lhi = _ln_bounds(av, p + _GUARD)
        lo = _mp.mpf_sub(llo, av, p + _GUARD, _F)
        return _mp.mpf_pos(lo, p, _F), _mp.mpf_pos(lhi, p, _C)
    wp = p + max(0, -e) + _GUARD
    elo, ehi = _exp_bounds(v, wp)
    # 1 - e^v is decreasing in e^v
    lo_arg = _mp.mpf_sub(_mp.fone, ehi, wp, _F)
    hi_arg = _mp.mpf_sub(_mp.fone, elo, wp, _C)
    lo = _ln_bounds(lo_arg, wp)[0] if lo_arg != _mp.fzero and not lo_arg[0] else _mp.fninf
    hi = _ln_bounds(hi_arg, wp)[1]
    return _mp.mpf_pos(lo, p, _F), _mp.mpf_pos(hi, p, _C)


def xr_ln(x) -> XReal:
    """Natural logarithm, rounded to nearest at the current precision."""
    v = _x(x)
    if v == _mp.fzero or v[0] or v == _mp.fninf:
        raise DomainError("xr_ln of a non-positive number")
    p = get_precision()
    lo, hi = _ln_bounds(v, p + 8)
    mid = _mp.mpf_shift(_mp.mpf_add(lo, hi, p + 16, _N), -1)
    return XReal._raw(_mp.mpf_pos(mid, p, _N))


def xr_exp(x) -> "XInterval":
    """Enclosure of e**x; saturates explicitly outside the dynamic range."""
    lo, hi = _exp_bounds(_x(x), get_precision())
    return XInterval._raw(lo, hi)


def ln2_interval() -> "XInterval":
    lo, hi = _ln2_bounds(get_precision())
    return XInterval._raw(lo, hi)


# ---------------------------------------------------------------------------
# intervals


class EmptyInterval:
    """Explicit marker for an empty intersection."""

    __slots__ = ()
    is_empty = True

    def __repr__(self):
        return "EMPTY"

    def __bool__(self):
        return False


EMPTY = EmptyInterval()


class XInterval:
    """Closed interval ``[lo, hi]`` of extended reals; lo may be -inf, hi +inf."""

    __slots__ = ("lo", "hi")
    is_empty = False

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        p = get_precision()
        lo_v = _to_mpf(lo, p, _F)
        hi_v = _to_mpf(hi, p, _C)
        self.lo, self.hi = self._validate(lo_v, hi_v)

    @staticmethod
    def _validate(lo_v, hi_v):
        if lo_v == _mp.fnan or hi_v == _mp.fnan:
            raise DomainError("NaN interval endpoint")
        if lo_v == _mp.finf or hi_v == _mp.fninf:
            raise DomainError("interval endpoints must satisfy lo < +inf and hi > -inf")
        if _mp.mpf_cmp(lo_v, hi_v) > 0:
            raise DomainError("interval with lo > hi")
        return XReal._raw(lo_v), XReal._raw(hi_v)

    @classmethod
    def _raw(cls, lo_v, hi_v) -> "XInterval":
        obj = cls.__new__(cls)
        obj.lo, obj.hi = cls._validate(lo_v, hi_v)
        return obj

    @classmethod
    def point(cls, x) -> "XInterval":
        if isinstance(x, XReal):
            return cls._raw(x._v, x._v)
        return cls(x, x)

    @classmethod
    def whole(cls) -> "XInterval":
        return cls._raw(_mp.fninf, _mp.finf)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        if isinstance(x, XInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        v = _x(x)
        return _mp.mpf_cmp(self.lo._v, v) <= 0 <= _mp.mpf_cmp(self.hi._v, v)

    __contains__ = contains

    def subset_of(self, other: "XInterval") -> bool:
        return other.contains(self)

    def mid(self) -> XReal:
        if not (self.lo.is_finite() and self.hi.is_finite()):
            raise DomainError("midpoint of an unbounded interval")
        p = get_precision()
        return XReal._raw(_mp.mpf_shift(_mp.mpf_add(self.lo._v, self.hi._v, p + 1, _N), -1))

    def width(self) -> XReal:
        return iv_width(self)

    def __eq__(self, other):
        if not isinstance(other, XInterval):
            return NotImplemented
        return self.lo._v == other.lo._v and self.hi._v == other.hi._v

    def __hash__(self):
        return hash((self.lo._v, self.hi._v))

    def __repr__(self):
        return f"XInterval({self.lo.to_str()!s}, {self.hi.to_str()!s})"

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"

    def __add__(self, other):
        return iv_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return iv_sub(self, other)

    def __rsub__(self, other):
        return iv_sub(iv(other), self)

    def __mul__(self, other):
        return iv_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return iv_div(self, other)

    def __neg__(self):
        return iv_neg(self)


def iv(x, y=None) -> XInterval:
    """Coerce to an interval: XInterval passes through, scalars become points."""
    if isinstance(x, XInterval) and y is None:
        return x
    if y is None:
        return XInterval.point(x)
    return XInterval(x, y)


def _pair(a):
    a = iv(a)
    return a.lo._v, a.hi._v


def iv_add(a, b) -> XInterval:
    p = get_precision()
    al, ah = _pair(a)
    bl, bh = _pair(b)
    return XInterval._raw(_mp.mpf_add(al, bl, p, _F), _mp.mpf_add(ah, bh, p, _C))


def iv_sub(a, b) -> XInterval:
    p = get_precision()
    al, ah = _pair(a)
    bl, bh = _pair(b)
    return XInterval._raw(_mp.mpf_sub(al, bh, p, _F), _mp.mpf_sub(ah, bl, p, _C))


def iv_neg(a) -> XInterval:
    al, ah = _pair(a)
    return XInterval._raw(_mp.mpf_neg(ah), _mp.mpf_neg(al))


def _emul(x, y, p, rnd):
    # endpoint product with 0 * inf = 0: infinite endpoints are never attained
    if x == _mp.fzero or y == _mp.fzero:
        return _mp.fzero
    return _mp.mpf_mul(x, y, p, rnd)


def iv_mul(a, b) -> XInterval:
    p = get_precision()
    al, ah = _pair(a)
    bl, bh = _pair(b)
    if (al == ah == _mp.fzero) or (bl == bh == _mp.fzero):
        return XInterval._raw(_mp.fzero, _mp.fzero)
    cands = [(x, y) for x in (al, ah) for y in (bl, bh)]
    lo = min((_emul(x, y, p, _F) for x, y in cands), key=_mp_key)
    hi = max((_emul(x, y, p, _C) for x, y in cands), key=_mp_key)
    return XInterval._raw(lo, hi)


class _mp_key:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return _mp.mpf_cmp(self.v, other.v) < 0


def iv_div(a, b) -> XInterval:
    """Quotient; a divisor containing 0 yields the whole line."""
    bl, bh = _pair(b)
    if _mp.mpf_cmp(bl, _mp.fzero) <= 0 <= _mp.mpf_cmp(bh, _mp.fzero):
        return XInterval.whole()
    p = get_precision()
    al, ah = _pair(a)
    cands = []
    for x in (al, ah):
        for y in (bl, bh):
            cands.append((x, y))

    def q(x, y, rnd):
        if y in (_mp.finf, _mp.fninf):
            return _mp.fzero if x not in (_mp.finf, _mp.fninf) else None
        return _mp.mpf_div(x, y, p, rnd)

    los = [q(x, y, _F) for x, y in cands]
    his = [q(x, y, _C) for x, y in cands]
    if any(v is None for v in los):
        return XInterval.whole()
    return XInterval._raw(min(los, key=_mp_key), max(his, key=_mp_key))


def iv_scale(a, k) -> XInterval:
    """Multiply by a scalar (or interval) factor."""
    return iv_mul(a, k if isinstance(k, XInterval) else XInterval.point(xr(k)))


def iv_ln(a) -> XInterval:
    al, ah = _pair(a)
    if al[0] and al != _mp.fzero:
        raise DomainError("iv_ln of an interval containing negatives")
    p = get_precision()
    return XInterval._raw(_ln_bounds(al, p)[0], _ln_bounds(ah, p)[1])


def iv_exp(a) -> XInterval:
    al, ah = _pair(a)
    p = get_precision()
    return XInterval._raw(_exp_bounds(al, p)[0], _exp_bounds(ah, p)[1])


def iv_union(a, b) -> XInterval:
    """Interval hull."""
    if getattr(a, "is_empty", False):
        return b
    if getattr(b, "is_empty", False):
        return a
    al, ah = _pair(a)
    bl, bh = _pair(b)
    return XInterval._raw(min(al, bl, key=_mp_key), max(ah, bh, key=_mp_key))


def iv_intersect(a, b):
    if getattr(a, "is_empty", False) or getattr(b, "is_empty", False):
        return EMPTY
    al, ah = _pair(a)
    bl, bh = _pair(b)
    lo = max(al, bl, key=_mp_key)
    hi = min(ah, bh, key=_mp_key)
    if _mp.mpf_cmp(lo, hi) > 0:
        return EMPTY
    return XInterval._raw(lo, hi)


def iv_width(a) -> XReal:
    al, ah = _pair(a)
    return XReal._raw(_mp.mpf_sub(ah, al, get_precision(), _C))


def _mono_up(a, fn):
    al, ah = _pair(a)
    p = get_precision()
    return XInterval._raw(fn(al, p)[0], fn(ah, p)[1])


def iv_log1p(a) -> XInterval:
    """Enclosure of log(1 + x) for x > -1."""
    return _mono_up(a, _log1p_bounds)


def _softplus_bounds(v, p):
    if v == _mp.fninf:
        return _mp.fzero, _mp.fzero
    if v == _mp.finf:
        return _mp.finf, _mp.finf
    if v[0] or v == _mp.fzero:
        el, eh = _exp_bounds(v, p + _GUARD)
        return _log1p_bounds(el, p)[0], _log1p_bounds(eh, p)[1]
    el, eh = _exp_bounds(_mp.mpf_neg(v), p + _GUARD)
    return (
        _mp.mpf_add(v, _log1p_bounds(el, p + _GUARD)[0], p, _F),
        _mp.mpf_add(v, _log1p_bounds(eh, p + _GUARD)[1], p, _C),
    )


def iv_softplus(a) -> XInterval:
    """Enclosure of log(1 + e**x); exact-ish for any magnitude of x."""
    return _mono_up(a, _softplus_bounds)


def iv_log1mexp(a) -> XInterval:
    """Enclosure of log(1 - e**x) for x <= 0 (decreasing in x)."""
    al, ah = _pair(a)
    p = get_precision()
    return XInterval._raw(_expm1_neg_log_bounds(ah, p)[0], _expm1_neg_log_bounds(al, p)[1])


def iv_logsumexp(a, b) -> XInterval:
    """Enclosure of log(e**a + e**b)."""
    a, b = iv(a), iv(b)
    al, ah = _pair(a)
    bl, bh = _pair(b)
    p = get_precision()

    def lse(x, y, rnd_idx):
        if x == _mp.fninf:
            return y
        if y == _mp.fninf:
            return x
        if _mp.mpf_cmp(x, y) < 0:
            x, y = y, x
        if x == _mp.finf:
            return _mp.finf
        d = _mp.mpf_sub(y, x, p + _GUARD, _F if rnd_idx == 0 else _C)
        sp = _softplus_bounds(d, p + _GUARD)[rnd_idx]
        return _mp.mpf_add(x, sp, p, _F if rnd_idx == 0 else _C)

    return XInterval._raw(lse(al, bl, 0), lse(ah, bh, 1))


def iv_logsubexp(a, b) -> XInterval:
    """Enclosure of log(e**a - e**b); requires a > b on the whole intervals."""
    a, b = iv(a), iv(b)
    al, ah = _pair(a)
    bl, bh = _pair(b)
    p = get_precision()
    if _mp.mpf_cmp(al, bh) < 0:
        raise DomainError("iv_logsubexp needs a >= b")
    # lower: smallest a, largest b; upper: largest a, smallest b
    if _mp.mpf_cmp(al, bh) == 0:
        lo = _mp.fninf
    elif bh == _mp.fninf:
        lo = al
    else:
        d = _mp.mpf_sub(bh, al, p + _GUARD, _C)
        lo = _mp.mpf_add(al, _expm1_neg_log_bounds(d, p + _GUARD)[0], p, _F)
    if bl == _mp.fninf or ah == _mp.finf:
        hi = ah
    else:
        d = _mp.mpf_sub(bl, ah, p + _GUARD, _F)
        hi = _mp.mpf_add(ah, _expm1_neg_log_bounds(d, p + _GUARD)[1], p, _C)
    return XInterval._raw(lo, hi)


def _ln2_bounds(p):
    wp = p + _GUARD
    return _widen(_mp.mpf_ln2(wp), wp - 4, p)


def log_abs_one_minus(log_w, exclusion=None) -> XInterval:
    """Enclosure of log|1 - w| given an enclosure of log|w| (w complex).

    ``exclusion`` is an optional guaranteed lower bound on ``|1 - w|``; it
    only matters when the modulus of ``w`` may reach 1.
    """
    log_w = iv(log_w)
    L_lo, L_hi = log_w.lo._v, log_w.hi._v
    p = get_precision()
    ln2_lo, ln2_hi = _ln2_bounds(p + _GUARD)
    if _mp.mpf_cmp(L_lo, ln2_hi) >= 0:
        # |w| >= 2: log|w| + [log(1 - 1/|w|), log(1 + 1/|w|)]
        lo = _mp.mpf_add(L_lo, _expm1_neg_log_bounds(_mp.mpf_neg(L_lo), p + _GUARD)[0], p, _F)
        hi = _softplus_bounds(L_hi, p)[1]
        return XInterval._raw(lo, hi)
    if _mp.mpf_cmp(L_hi, _mp.mpf_neg(ln2_hi)) <= 0:
        # |w| <= 1/2
        lo = _expm1_neg_log_bounds(L_hi, p)[0]
        hi = _softplus_bounds(L_hi, p)[1]
        return XInterval._raw(lo, hi)
    hi = _softplus_bounds(L_hi, p)[1]
    lo = _mp.fninf
    if _mp.mpf_cmp(L_lo, _mp.fzero) > 0:
        # |w| > 1 everywhere: |1 - w| >= |w| - 1
        lo = _mp.mpf_add(L_lo, _expm1_neg_log_bounds(_mp.mpf_neg(L_lo), p + _GUARD)[0], p, _F)
    elif _mp.mpf_cmp(L_hi, _mp.fzero) < 0:
        lo = _expm1_neg_log_bounds(L_hi, p)[0]
    if exclusion is not None:
        ex = xr(exclusion)
        if ex.sign <= 0:
            raise DomainError("exclusion bound must be positive")
        ex_lo = _ln_bounds(ex._v, p)[0]
        lo = max(lo, ex_lo, key=_mp_key)
    if _mp.mpf_cmp(lo, hi) > 0:
        lo = hi
    return XInterval._raw(lo, hi)
