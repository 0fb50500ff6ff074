"""Closed-form collision probabilities and collision-location laws.

Model: two balls of common radius r in (0, 1) start with centers at
(-1, 0, ..., 0) and (+1, 0, ..., 0) in R^d and drift forever along
straight lines whose velocities are independent standard d-dimensional
Gaussian vectors.  The functions here answer, without simulation:

* how likely the balls are to ever touch (exactly, in closed form for
  low dimensions, and to leading order as r -> 0), and
* where in space the first contact happens, both as a defective limit
  density (total mass = collision probability) and as a proper density
  conditioned on a collision occurring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import f_cdf, log_gamma

__all__ = [
    "ModelParams",
    "collision_prob_exact",
    "collision_prob_closed",
    "asymptotic_prob_coefficient",
    "location_coefficient",
    "location_density_limit",
    "conditional_location_density",
    "radial_cdf_conditional",
    "cauchy_cdf_1d",
    "unit_sphere_area",
]


def _check_dim(d: int) -> int:
    if not isinstance(d, (int, np.integer)):
        raise ValueError(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return d


def _check_radius(r: float) -> float:
    r = float(r)
    if math.isnan(r) or not 0.0 < r < 1.0:
        raise ValueError(f"radius must lie strictly inside (0, 1), got {r}")
    return r


@dataclass(frozen=True)
class ModelParams:
    """Validated (dimension, radius) pair for the two-ball model."""

    d: int
    r: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", _check_dim(self.d))
        object.__setattr__(self, "r", _check_radius(self.r))


def _norm_sq(x) -> float:
    v = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if v.size == 0:
        raise ValueError("point must have at least one coordinate")
    if np.isnan(v).any():
        raise ValueError("point contains NaN")
    # fsum gives the correctly rounded sum, so the density is exactly
    # invariant under coordinate permutations and sign flips
    return math.fsum(float(t) * float(t) for t in v)


def _check_point(x, d: int) -> float:
    v = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if v.size != d:
        raise ValueError(f"point has {v.size} coordinates, expected {d}")
    return _norm_sq(v)


def collision_prob_exact(r: float, d: int) -> float:
    """Probability that the two balls ever collide.

    Equals 1/2 in dimension one; for d >= 2 it is half the F(d-1, 1)
    distribution function evaluated at r^2 / ((d-1)(1-r^2)), which is
    the mass of the spherical cap of relative directions that point one
    ball into the other.
    """
    r = _check_radius(r)
    d = _check_dim(d)
    if d == 1:
        return 0.5
    x = r * r / ((d - 1) * (1.0 - r * r))
    return 0.5 * f_cdf(x, d - 1, 1)


def collision_prob_closed(r: float, d: int) -> float:
    """Elementary closed forms for the collision probability, d <= 3."""
    r = _check_radius(r)
    d = _check_dim(d)
    if d == 1:
        return 0.5
    if d == 2:
        return math.atan(r / math.sqrt(1.0 - r * r)) / math.pi
    if d == 3:
        return 0.5 * (1.0 - math.sqrt(1.0 - r * r))
    raise ValueError(f"closed form is only available for d <= 3, got d={d}")


def asymptotic_prob_coefficient(d: int) -> float:
    """Leading coefficient of the small-radius law p ~ coeff * r^(d-1).

    Defined for d >= 2; the collision probability is constant in r for
    d = 1, so no power law applies there.
    """
    d = _check_dim(d)
    if d < 2:
        raise ValueError("asymptotic coefficient requires d >= 2")
    ratio = math.exp(log_gamma(0.5 * d) - log_gamma(0.5 * (d - 1)))
    return ratio / ((d - 1) * math.sqrt(math.pi))


def location_coefficient(d: int) -> float:
    """Normalizing constant of the defective limit location density."""
    d = _check_dim(d)
    ratio = math.exp(log_gamma(float(d)) - log_gamma(0.5 * (d + 1)))
    return 0.5 * math.pi ** (-0.5 * (d + 1)) * ratio


def location_density_limit(x, d: int) -> float:
    """Small-radius limit density of the first-contact point at x in R^d.

    Defective: integrating it over R^d yields the limiting ratio
    p / r^(d-1) rather than 1.  The full mass sits in the factor
    location_coefficient(d); the shape is the isotropic Cauchy-type
    kernel (1 + |x|^2)^(-d).
    """
    d = _check_dim(d)
    nsq = _check_point(x, d)
    return location_coefficient(d) / (1.0 + nsq) ** d


def conditional_location_density(x, d: int) -> float:
    """Proper density of the first-contact point given that a collision occurs,
    in the small-radius limit."""
    d = _check_dim(d)
    nsq = _check_point(x, d)
    ratio = math.exp(log_gamma(float(d)) - log_gamma(0.5 * d))
    return ratio * math.pi ** (-0.5 * d) * (1.0 + nsq) ** (-d)


def radial_cdf_conditional(a: float, d: int) -> float:
    """P(|C| <= a) for the conditional limit location C: |C|^2 is F(d, d)."""
    a = float(a)
    if math.isnan(a) or a < 0.0:
        raise ValueError(f"radius bound must be >= 0, got {a}")
    d = _check_dim(d)
    return f_cdf(a * a, d, d)


def cauchy_cdf_1d(x: float, r: float) -> float:
    """Exact defective CDF of the contact point on the line (d = 1).

    The collision event has probability 1/2 and, on that event, the
    contact point is Cauchy with scale 1 - r, so the total mass of this
    CDF is 1/2.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("x must be a number, got NaN")
    r = _check_radius(r)
    return 0.25 + math.atan(x / (1.0 - r)) / (2.0 * math.pi)


def unit_sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^(d-1); equals 2 for d = 1."""
    d = _check_dim(d)
    return 2.0 * math.pi ** (0.5 * d) * math.exp(-log_gamma(0.5 * d))
