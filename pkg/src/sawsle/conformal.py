"""Closed-form conformal maps of the upper half plane and the exact radial
SLE(8/3) distribution functions built from them.

Every avoided-region map ``map_*`` fixes 0 and i.  The probability that the
curve avoids the region is d0**b * di**bbar, where (d0, di) are the
derivative magnitudes of the map at 0 and at i; ``factors_*`` return those
pairs in closed form, algebraically rearranged to stay stable near the
domain edges.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .constants import SAW_EXPONENTS, Exponents

STAT_NAMES = ("X", "Y", "R", "S")


class SleCdfFactors(NamedTuple):
    """Derivative magnitudes |phi'(0)| and |phi'(i)| of an avoided-region map."""

    d0: float
    di: float


def endpoint_map(endpoint: complex, z):
    """Half-plane automorphism fixing 0 and sending ``endpoint`` to i.

    Accepts a scalar or ndarray ``z``.  phi(z) = y z / (y^2 + x^2 - x z)
    for endpoint x + iy; the map is invariant under joint scaling of the
    endpoint and the argument.
    """
    x = endpoint.real
    y = endpoint.imag
    if not y > 0:
        raise ValueError(f"degenerate endpoint {endpoint!r}: imaginary part must be positive")
    return y * z / (y * y + x * x - x * z)


# ---------------------------------------------------------------------------
# Avoided-region maps.  Used directly by the finite-difference validation
# suite; the estimators only ever need the derivative factors below.
# ---------------------------------------------------------------------------

def map_X(x: float, z):
    """Map of the half plane minus {Re z >= x}, fixing 0 and i.  Needs x > 0."""
    if x <= 0:
        raise ValueError("x must be positive")
    return 2 * x * (2 * x * z - z * z) / (z * z - 2 * x * z + 4 * x * x + 1)


def map_Y(y: float, z):
    """Map of the strip {0 < Im z < y}, fixing 0 and i.  Needs y > 1."""
    if y <= 1:
        raise ValueError("y must exceed 1")
    h = math.pi / (2 * y)
    # sin(pi/y) / (1 - cos(pi/y)) == cot(pi / (2 y))
    return (math.cos(h) / math.sin(h)) * np.tanh(h * z)


def map_R(r: float, z):
    """Map of the half disc {|z| < r}, fixing 0 and i.  Needs r > 1."""
    if r <= 1:
        raise ValueError("r must exceed 1")
    return (r * r - 1) * z / (z * z + r * r)


def _s_geometry(s: float) -> tuple[float, float, float]:
    """Chord half-width l, wedge angle theta, and arrival angle v = pi*alpha/theta.

    The circle |z - i| = s meets the real axis at -l and l with l^2 = s^2 - 1.
    f(z) = (l + z)/(l - z) opens the region inside the circle onto the wedge
    0 < arg < theta with theta = pi - arctan(l) in (pi/2, pi), and sends i to
    exp(i alpha) with alpha = 2 arctan(1/l) in (0, pi); the power pi/theta
    then lands i at angle v = pi alpha / theta.  atan2 keeps alpha fully
    accurate at both ends of the domain.
    """
    el = math.sqrt((s - 1.0) * (s + 1.0))
    theta = math.pi - math.atan(el)
    alpha = 2.0 * math.atan2(1.0, el)
    v = math.pi * alpha / theta
    return el, theta, v


def map_S(s: float, z):
    """Map of the half plane minus {|z - i| >= s}, fixing 0 and i.  Needs s > 1."""
    if s <= 1:
        raise ValueError("s must exceed 1 for the explicit map; s = 1 is a point mass")
    el, theta, v = _s_geometry(s)
    w = (el + z) / (el - z)
    w = np.power(w, math.pi / theta) - 1.0
    # arrival point of i, exp(i v) - 1; real part via 2 sin^2 avoids cancellation
    arrival = complex(-2.0 * math.sin(v / 2.0) ** 2, math.sin(v))
    return endpoint_map(arrival, w)


# ---------------------------------------------------------------------------
# Derivative factors.
# ---------------------------------------------------------------------------

def factors_X(x: float) -> SleCdfFactors:
    """Factors for the rightmost-excursion statistic; domain x > 0."""
    if x <= 0:
        raise ValueError("x must be positive")
    d0 = 4 * x * x / (4 * x * x + 1)
    di = math.sqrt(x * x + 1) / x
    return SleCdfFactors(d0, di)


def factors_Y(y: float) -> SleCdfFactors:
    """Factors for the highest-excursion statistic; domain y > 1."""
    if y <= 1:
        raise ValueError("y must exceed 1")
    h = math.pi / (2 * y)
    # d0 = sin(pi/y) pi / ((1 - cos(pi/y)) 2 y) = h cot(h), di = d0 / cos(h)^2
    d0 = h * math.cos(h) / math.sin(h)
    di = 2 * h / math.sin(2 * h)
    return SleCdfFactors(d0, di)


def factors_R(r: float) -> SleCdfFactors:
    """Factors for the maximum-modulus statistic; domain r > 1."""
    if r <= 1:
        raise ValueError("r must exceed 1")
    r2 = r * r
    return SleCdfFactors((r2 - 1) / r2, (r2 + 1) / (r2 - 1))


def factors_S(s: float) -> SleCdfFactors:
    """Factors for the maximum distance from i; domain s >= 1.

    At s = 1 the event has positive probability and the factors are the
    analytic limit (1/2, 2), giving the point mass 2**(bbar - b).
    """
    if s < 1:
        raise ValueError("s must be at least 1")
    if s == 1:
        return SleCdfFactors(0.5, 2.0)
    el, theta, v = _s_geometry(s)
    # 1 - cos(v) written as 2 sin^2(v/2): v approaches 0 as s grows
    sin_v = math.sin(v)
    d0 = math.pi * sin_v / (el * theta * 2.0 * math.sin(v / 2.0) ** 2)
    di = 2 * math.pi * el / (theta * sin_v * (el * el + 1.0))
    return SleCdfFactors(d0, di)


#: Lower edge of each statistic's domain.
_DOMAIN_EDGE = {"X": 0.0, "Y": 1.0, "R": 1.0, "S": 1.0}


def factors(stat: str, w: float) -> SleCdfFactors:
    """Dispatch to the factor function for statistic ``stat``.

    Resolved through the module namespace at call time so a swapped-out
    implementation is picked up by every consumer.
    """
    if stat not in _DOMAIN_EDGE:
        raise ValueError(f"unknown statistic {stat!r}")
    return globals()[f"factors_{stat}"](w)


def avoid_map(stat: str, w: float, z):
    """Dispatch to the avoided-region map for statistic ``stat``."""
    if stat not in _DOMAIN_EDGE:
        raise ValueError(f"unknown statistic {stat!r}")
    return globals()[f"map_{stat}"](w, z)


def exact_cdf(stat: str, w: float, exponents: Exponents = SAW_EXPONENTS) -> float:
    """Exact distribution function P(stat <= w) for the radial SLE(8/3) curve.

    At the lower edge of the domain the analytic limit is returned (0 for
    X, Y and R; the point mass for S); below the edge is a domain error.
    """
    if stat not in _DOMAIN_EDGE:
        raise ValueError(f"unknown statistic {stat!r}")
    edge = _DOMAIN_EDGE[stat]
    if w < edge:
        raise ValueError(f"{stat} threshold {w} below domain edge {edge}")
    if w == edge and stat != "S":
        return 0.0
    d0, di = factors(stat, w)
    return d0 ** float(exponents.b) * di ** float(exponents.bbar)


def factor_table(stat: str, ws: np.ndarray, exponents: Exponents = SAW_EXPONENTS):
    """Vectorized (d0, di, cdf) over a threshold grid, with edge limits.

    At the lower domain edge d0 -> 0 and di -> +inf for X, Y and R; the cdf
    column carries the analytic limit so downstream consumers can keep the
    full grid and mask the non-finite factor rows themselves.
    """
    ws = np.asarray(ws, dtype=float)
    d0 = np.empty_like(ws)
    di = np.empty_like(ws)
    cdf = np.empty_like(ws)
    edge = _DOMAIN_EDGE[stat]
    for i, w in enumerate(ws):
        if w < edge:
            raise ValueError(f"{stat} threshold {w} below domain edge {edge}")
        if w == edge and stat != "S":
            d0[i] = 0.0
            di[i] = math.inf
            cdf[i] = 0.0
        else:
            d0[i], di[i] = factors(stat, float(w))
            cdf[i] = d0[i] ** float(exponents.b) * di[i] ** float(exponents.bbar)
    return d0, di, cdf


@lru_cache(maxsize=8)
def _sin_power_norm(c: float) -> float:
    value, _ = quad(lambda t: math.sin(t) ** c, 0.0, math.pi, epsabs=0.0, epsrel=1e-10)
    return value


def angular_density_reference(theta: float, exponents: Exponents = SAW_EXPONENTS) -> float:
    """Conjectured endpoint-angle density sin(theta)^(b-bbar), normalized on [0, pi]."""
    if not 0.0 <= theta <= math.pi:
        raise ValueError("theta must lie in [0, pi]")
    c = float(exponents.b_minus_bbar)
    return math.sin(theta) ** c / _sin_power_norm(c)
