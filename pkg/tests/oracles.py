"""Independent reference computations used by the tests.

Nothing here calls into the interval kernels: values come from exact
Fractions, from mpmath at high precision, or from numpy sampling.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import mpmath
import numpy as np

from mcwd.xlog import (
    DomainError,
    XInterval,
    XReal,
    iv_add,
    iv_div,
    iv_exp,
    iv_ln,
    iv_log1mexp,
    iv_log1p,
    iv_logsubexp,
    iv_logsumexp,
    iv_mul,
    iv_softplus,
    iv_sub,
    log_abs_one_minus,
)

ORACLE_DPS = 90


def _dyadic(rng: random.Random, emin: int, emax: int) -> Fraction:
    m = rng.randrange(1, 2 ** 53)
    e = rng.randint(emin, emax)
    v = Fraction(m) * (Fraction(2) ** (e - 53))
    return -v if rng.random() < 0.5 else v


def _triple(rng, emin=-20, emax=20, positive=False):
    xs = sorted(abs(_dyadic(rng, emin, emax)) if positive else _dyadic(rng, emin, emax) for _ in range(3))
    return xs


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _box(lo: Fraction, hi: Fraction) -> XInterval:
    return XInterval(XReal(lo), XReal(hi))


def _contains(I: XInterval, y) -> bool:
    lo = mpmath.mpf(-mpmath.inf) if not I.lo.is_finite() and I.lo < XReal(0) else mpmath.mp.make_mpf(I.lo._v)
    hi = mpmath.mpf(mpmath.inf) if not I.hi.is_finite() and I.hi > XReal(0) else mpmath.mp.make_mpf(I.hi._v)
    return lo <= y <= hi


def _case(rng: random.Random, op: str):
    """One random case: (interval result, true value at a member point)."""
    if op in ("add", "sub", "mul", "div"):
        a0, a, a1 = _triple(rng)
        b0, b, b1 = _triple(rng)
        A, B = _box(a0, a1), _box(b0, b1)
        if op == "add":
            return iv_add(A, B), _mp(a + b)
        if op == "sub":
            return iv_sub(A, B), _mp(a - b)
        if op == "mul":
            return iv_mul(A, B), _mp(a * b)
        if b == 0:
            return None
        return iv_div(A, B), _mp(a) / _mp(b)
    if op == "ln":
        x0, x, x1 = _triple(rng, -300, 300, positive=True)
        return iv_ln(_box(x0, x1)), mpmath.log(_mp(x))
    if op == "exp":
        x0, x, x1 = _triple(rng, -12, 10)
        return iv_exp(_box(x0, x1)), mpmath.exp(_mp(x))
    if op == "log1p":
        x0, x, x1 = _triple(rng, -30, 30)
        x0, x, x1 = (max(v, Fraction(-1, 2)) for v in (x0, x, x1))
        return iv_log1p(_box(x0, x1)), mpmath.log1p(_mp(x))
    if op == "softplus":
        x0, x, x1 = _triple(rng, -10, 12)
        return iv_softplus(_box(x0, x1)), mpmath.log1p(mpmath.exp(_mp(x)))
    if op == "log1mexp":
        x0, x, x1 = _triple(rng, -30, 8, positive=True)
        x0, x, x1 = -x1, -x, -x0
        if x == 0:
            return None
        if x1 == 0:
            x1 = x / 2
        return iv_log1mexp(_box(x0, x1)), mpmath.log(-mpmath.expm1(_mp(x)))
    if op == "logsumexp":
        a0, a, a1 = _triple(rng, -10, 12)
        b0, b, b1 = _triple(rng, -10, 12)
        return iv_logsumexp(_box(a0, a1), _box(b0, b1)), mpmath.log(mpmath.exp(_mp(a)) + mpmath.exp(_mp(b)))
    if op == "logsubexp":
        a0, a, a1 = _triple(rng, -10, 12)
        gap = abs(_dyadic(rng, -20, 6)) + Fraction(1, 2 ** 30)
        b0, b, b1 = a0 - gap - abs(_dyadic(rng, -10, 3)), a0 - gap - Fraction(1, 2 ** 40), a0 - gap
        b0, b, b1 = sorted((b0, b, b1))
        return iv_logsubexp(_box(a0, a1), _box(b0, b1)), mpmath.log(mpmath.exp(_mp(a)) - mpmath.exp(_mp(b)))
    if op == "one_minus":
        x0, x, x1 = _triple(rng, -12, 8)
        th = Fraction(rng.randrange(0, 2 ** 20), 2 ** 20) * 6
        w = mpmath.exp(_mp(x)) * mpmath.expj(_mp(th))
        y = abs(1 - w)
        if y == 0:
            return None
        return log_abs_one_minus(_box(x0, x1)), mpmath.log(y)
    raise ValueError(op)


FUZZ_OPS = ("add", "sub", "mul", "div", "ln", "exp", "log1p", "softplus", "log1mexp",
            "logsumexp", "logsubexp", "one_minus")


def containment_fuzz(cases: int, seed: int = 0) -> tuple:
    """Run ``cases`` random containment checks; returns (checked, violations)."""
    rng = random.Random(seed)
    checked, bad = 0, []
    with mpmath.workdps(ORACLE_DPS):
        while checked < cases:
            op = FUZZ_OPS[checked % len(FUZZ_OPS)]
            try:
                r = _case(rng, op)
            except DomainError:
                r = None
            if r is None:
                rng.random()
                continue
            I, y = r
            if not _contains(I, y):
                bad.append((op, str(I), mpmath.nstr(y, 25)))
            checked += 1
    return checked, bad


# ---------------------------------------------------------------------------
# functions on circles


def dense_circle_log_modulus(power: int, log_zeros, log_r: float, samples: int = 4096) -> tuple:
    """(min, max) of log|z**p prod(1 - z/a)| sampled on |z| = e^log_r.

    Zeros are given by their logs; sampling includes theta = 0 and pi.
    """
    th = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    acc = np.full(samples, power * log_r)
    for la in log_zeros:
        d = log_r - la
        if d > 30:
            acc += d + np.log(np.abs(np.exp(-d) - np.exp(1j * th)))
        else:
            acc += np.log(np.abs(1 - np.exp(d + 1j * th)))
    return float(acc.min()), float(acc.max())


def jensen_closed_form(power: int, log_zeros: list, t: Fraction) -> Fraction:
    """``p t + sum_{log a <= t} (t - log a)`` straight from the raw data."""
    return power * t + sum((t - la for la in log_zeros if la <= t), Fraction(0))


def circle_mean_numeric(power: int, zeros: list, r: float, samples: int = 1 << 14) -> float:
    """Trapezoidal mean of log|f| over the circle (spectrally accurate away from zeros)."""
    th = (np.arange(samples) + 0.5) * (2 * np.pi / samples)
    z = r * np.exp(1j * th)
    acc = power * np.log(np.abs(z))
    for a in zeros:
        acc += np.log(np.abs(1 - z / a))
    return float(acc.mean())


def winding_number(values: np.ndarray) -> int:
    """Winding number around 0 of a closed polygon given by complex samples."""
    ang = np.angle(np.concatenate([values, values[:1]]))
    d = np.diff(ang)
    d = (d + np.pi) % (2 * np.pi) - np.pi
    return int(round(d.sum() / (2 * np.pi)))


def covering_witnesses(coeffs, r: float, R: float, lo: float, hi: float, grid: int = 64,
                       samples: int = 1 << 14) -> tuple:
    """Check every witness w on a grid x grid polar lattice of A(lo, hi)
    for a preimage in A(r, R) of the polynomial with ``coeffs`` (ascending).

    The preimage count is the difference of the winding numbers of f - w on
    |z| = R and |z| = r (argument principle).  Returns (witnesses, missing).
    """
    P = np.polynomial.Polynomial(coeffs)
    th = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    z_in, z_out = r * np.exp(1j * th), R * np.exp(1j * th)
    f_in, f_out = P(z_in), P(z_out)
    # witness radii strictly inside the covered annulus, angles offset from the axis
    radii = np.exp(np.linspace(math.log(lo), math.log(hi), grid + 2)[1:-1])
    angles = (np.arange(grid) + 0.5) * (2 * np.pi / grid)
    missing = []
    count = 0
    for rho in radii:
        for a in angles:
            w = rho * np.exp(1j * a)
            n = winding_number(f_out - w) - winding_number(f_in - w)
            count += 1
            if n < 1:
                missing.append((float(rho), float(a), n))
    return count, missing


def c0_reference(dps: int = 200):
    """``Gamma(1/4)**4 / (4 pi**2)`` at ``dps`` digits."""
    with mpmath.workdps(dps):
        return +(mpmath.gamma(mpmath.mpf(1) / 4) ** 4 / (4 * mpmath.pi ** 2))
