"""Hyperbolic density of round annuli and a lower bound for the punctured plane.

For ``A = A(r, R)`` with ``L = log(R/r)`` the density is

    lambda_A(z) = (pi / L) / (|z| sin(pi (log|z| - log r) / L)),

a function of ``u = (log|z| - log r) / L`` in (0, 1) and of |z|.  Everything
is carried as a log so that radii like exp(10**6) are fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .xlog import (
    DomainError,
    XInterval,
    XReal,
    get_precision,
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
    "RoundAnnulus",
    "C0",
    "pi_interval",
    "log_density",
    "density",
    "arc_distance_bound",
    "radial_distance_bound",
    "distance_upper_bound",
    "punctured_plane_log_bound",
    "punctured_plane_density_bound",
]


@dataclass(frozen=True)
class RoundAnnulus:
    log_r: XReal
    log_R: XReal

    def __post_init__(self):
        object.__setattr__(self, "log_r", xr(self.log_r))
        object.__setattr__(self, "log_R", xr(self.log_R))
        if not self.log_r < self.log_R:
            raise ValueError("need log_r < log_R")

    @property
    def modulus(self) -> XInterval:
        """``L = log(R/r)``."""
        return iv_sub(self.log_R, self.log_r)

    @property
    def log_core(self) -> XInterval:
        return iv_div(iv_add(self.log_r, self.log_R), XReal(2))

    def position(self, log_z) -> XInterval:
        """``u = (log|z| - log r) / L``; raises unless ``0 < u < 1``."""
        t = xr(log_z)
        if not (self.log_r < t < self.log_R):
            raise DomainError("point outside the annulus")
        u = iv_div(iv_sub(t, self.log_r), self.modulus)
        zero, one = XReal(0), XReal(1)
        return XInterval(max(u.lo, zero), min(u.hi, one))


def _mp_iv(x: XInterval):
    ctx = mpmath.iv
    ctx.prec = get_precision() + 20
    return ctx.mpf([mpmath.mp.make_mpf(x.lo._v), mpmath.mp.make_mpf(x.hi._v)])


def _from_mp_iv(v) -> XInterval:
    lo, hi = v._mpi_
    return XInterval(XReal(lo, rnd="f"), XReal(hi, rnd="c"))


def _sin_pi(u: XInterval) -> XInterval:
    """Enclosure of sin(pi u) for u in [0, 1]."""
    ctx = mpmath.iv
    ctx.prec = get_precision() + 20
    s = _from_mp_iv(ctx.sin(ctx.pi * _mp_iv(u)))
    return XInterval(max(s.lo, XReal(0)), min(s.hi, XReal(1)))


def pi_interval() -> XInterval:
    ctx = mpmath.iv
    ctx.prec = get_precision() + 20
    return _from_mp_iv(ctx.pi)


def log_density(A: RoundAnnulus, log_z) -> XInterval:
    """Enclosure of log lambda_A(z)."""
    u = A.position(log_z)
    s = _sin_pi(u)
    if s.lo.is_zero():
        raise DomainError("point too close to the boundary at this precision")
    return iv_sub(iv_sub(iv_sub(iv_ln(pi_interval()), iv_ln(A.modulus)), iv_ln(s)), iv(xr(log_z)))


def density(A: RoundAnnulus, log_z) -> XInterval:
    return iv_exp(log_density(A, log_z))


def arc_distance_bound(A: RoundAnnulus, log_z, angle) -> XInterval:
    """Length of the arc of angle ``angle`` on the circle ``|z| = exp(log_z)``:
    ``lambda |z| angle = pi angle / (L sin(pi u))``; |z| cancels."""
    ang = abs(float(angle))
    ang = min(ang, 2 * math.pi - ang) if ang <= 2 * math.pi else ang
    if ang == 0:
        return XInterval.point(XReal(0))
    s = _sin_pi(A.position(log_z))
    return iv_div(iv_mul(pi_interval(), XReal(ang)), iv_mul(A.modulus, s))


def _log_tan_half_pi(u: XInterval) -> XInterval:
    ctx = mpmath.iv
    ctx.prec = get_precision() + 20
    x = _mp_iv(u) * ctx.pi / 2
    return _from_mp_iv(ctx.log(ctx.tan(x)))


def radial_distance_bound(A: RoundAnnulus, log_z1, log_z2) -> XInterval:
    """Length of the radial segment: ``|log tan(pi u2/2) - log tan(pi u1/2)|``."""
    a = _log_tan_half_pi(A.position(log_z1))
    b = _log_tan_half_pi(A.position(log_z2))
    d = iv_sub(b, a)
    if d.hi < XReal(0):
        d = iv_sub(a, b)
    return XInterval(max(d.lo, XReal(0)), d.hi)


def distance_upper_bound(A: RoundAnnulus, z1: tuple, z2: tuple) -> XInterval:
    """Upper bound for the hyperbolic distance of two points ``(log|z|, arg)``:
    a radial segment plus an arc on whichever of the two circles is closer
    to the core circle (the cheaper path)."""
    (s1, t1), (s2, t2) = z1, z2
    ang = abs(float(t2) - float(t1)) % (2 * math.pi)
    rad = radial_distance_bound(A, s1, s2) if xr(s1) != xr(s2) else XInterval.point(XReal(0))
    arcs = [arc_distance_bound(A, s, ang) for s in (s1, s2)]
    arc = arcs[0] if arcs[0].hi <= arcs[1].hi else arcs[1]
    return iv_add(rad, arc)


def _C0() -> XInterval:
    ctx = mpmath.iv
    ctx.prec = get_precision() + 20
    g = ctx.gamma(ctx.mpf(1) / 4)
    return _from_mp_iv(g ** 4 / (4 * ctx.pi ** 2))


def C0() -> XInterval:
    """``Gamma(1/4)**4 / (4 pi**2) = 4.3768796...``."""
    return _C0()


def punctured_plane_log_bound(log_z) -> XInterval:
    """Enclosure of ``log(1 / (2|z| (|log|z|| + C0)))``, the classical lower
    estimate of the density of the twice-punctured plane C minus {0, 1}."""
    t = iv(xr(log_z))
    a = t if t.lo >= XReal(0) else iv_sub(XReal(0), t)
    return iv_sub(iv_sub(XReal(0), iv_add(iv_ln(XReal(2)), t)), iv_ln(iv_add(a, _C0())))


def punctured_plane_density_bound(log_z) -> XInterval:
    return iv_exp(punctured_plane_log_bound(log_z))
