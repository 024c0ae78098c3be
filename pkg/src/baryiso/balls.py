"""Closed forms for balls, halfspace caps and lenses in R^n."""

from __future__ import annotations

import math

from scipy.special import betainc

from .constants import omega


def volume(n: int, r: float) -> float:
    return omega(n) * r**n


def surface(n: int, r: float) -> float:
    return n * omega(n) * r ** (n - 1)


def radius_for_volume(n: int, m: float) -> float:
    return (m / omega(n)) ** (1 / n)


def perimeter_for_volume(n: int, m: float) -> float:
    """Perimeter of a ball of volume ``m``: n * omega_n^(1/n) * m^((n-1)/n)."""
    return n * omega(n) ** (1 / n) * m ** ((n - 1) / n)


def cap_volume(n: int, r: float, d: float) -> float:
    """Volume of {x in B(0, r): x_1 > d}."""
    if d >= r:
        return 0.0
    full = volume(n, r)
    if d <= -r:
        return full
    t = max(0.0, 1.0 - (d / r) ** 2)
    half = 0.5 * full * float(betainc((n + 1) / 2, 0.5, t))
    return half if d >= 0 else full - half


def cap_moment(n: int, r: float, d: float) -> float:
    """First moment along x_1 of {x in B(0, r): x_1 > d}."""
    if abs(d) >= r:
        return 0.0
    return omega(n - 1) / (n + 1) * (r * r - d * d) ** ((n + 1) / 2)


def cap_curved_area(n: int, r: float, d: float) -> float:
    """Area of the part of the sphere of radius r with x_1 > d."""
    if d >= r:
        return 0.0
    full = surface(n, r)
    if d <= -r:
        return full
    t = max(0.0, 1.0 - (d / r) ** 2)
    half = 0.5 * full * float(betainc((n - 1) / 2, 0.5, t))
    return half if d >= 0 else full - half


def cap_base_area(n: int, r: float, d: float) -> float:
    """(n-1)-volume of the flat face {x_1 = d} of the cap."""
    if abs(d) >= r:
        return 0.0
    return omega(n - 1) * (r * r - d * d) ** ((n - 1) / 2)


def cap_diameter(r: float, d: float) -> float:
    if d >= r:
        return 0.0
    if d <= 0:
        return 2 * r
    return 2 * math.sqrt(r * r - d * d)


def lens_volume(n: int, r1: float, r2: float, dist: float) -> float:
    """Volume of the intersection of two balls whose centres are ``dist`` apart."""
    if dist >= r1 + r2:
        return 0.0
    if dist <= abs(r1 - r2):
        return volume(n, min(r1, r2))
    # signed distances from each centre to the radical hyperplane
    d1 = (dist * dist + r1 * r1 - r2 * r2) / (2 * dist)
    d2 = dist - d1
    return cap_volume(n, r1, d1) + cap_volume(n, r2, d2)


def cap_radius_for_volume(n: int, height: float, target: float, rtol: float = 1e-10) -> float:
    """Radius rho such that the cap {x_1 > -height} of B(0, rho) has volume ``target``.

    ``height`` is the signed distance from the ball centre to the cutting plane
    measured towards the kept side, i.e. the kept part is x_1 > -height in the
    ball frame.  The cap volume is strictly increasing in rho, so bisection
    applies.
    """
    if target <= 0:
        return 0.0
    d = -height
    lo = max(0.0, d)
    hi = max(1.0, 2 * abs(d) + 1.0)
    while cap_volume(n, hi, d) < target:
        hi *= 2
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if cap_volume(n, mid, d) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
