"""Deterministic kinematics of one trajectory pair and body-shape oracles.

Both bodies drift with constant velocity; body one starts centered at
(-1, 0, ..., 0), body two at (+1, 0, ..., 0).  Everything reduces to
the relative picture: with the center-of-mass split

    v_mean = (v1 + v2) / 2        drift of the configuration midpoint,
    v_half_diff = (v1 - v2) / 2   half the closing velocity,

the bodies touch iff the ray from the origin in direction
-v_half_diff/|v_half_diff| meets body one, and the first-contact time
divides the ray's entry scale by |v_half_diff|.  The contact point is
then v_mean * t: the midpoint, carried by the drift alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .rng import block_rng, block_spans
from .stats import EstimateReport, binomial_ci

__all__ = [
    "VelocityPair",
    "ComSplit",
    "CollisionEvent",
    "Ball",
    "Ellipsoid",
    "ShapeOracle",
    "com_split",
    "collision_criterion",
    "collision_time",
    "contact_point",
    "collision_event",
    "contact_scale",
    "hit_fraction_mc",
]

# The centers are hard-wired at -e1 and +e1, so their separation is 2
# and the relative displacement X1 - X2 is -2 * e1.
CENTER_SEPARATION = 2.0

_UNIT_NORM_TOL = 1e-12


def _as_vector(name: str, v) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN")
    return arr


def _check_radius(r: float) -> float:
    r = float(r)
    if math.isnan(r) or not 0.0 < r < 1.0:
        raise ValueError(f"radius must lie strictly inside (0, 1), got {r}")
    return r


@dataclass(frozen=True, eq=False)
class VelocityPair:
    """Velocities of the two bodies, equal dimension, any d >= 1."""

    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self) -> None:
        v1 = _as_vector("v1", self.v1)
        v2 = _as_vector("v2", self.v2)
        if v1.shape != v2.shape:
            raise ValueError(f"velocity shapes differ: {v1.shape} vs {v2.shape}")
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    @property
    def dim(self) -> int:
        return self.v1.size


@dataclass(frozen=True, eq=False)
class ComSplit:
    """Center-of-mass decomposition of a velocity pair."""

    v_mean: np.ndarray
    v_half_diff: np.ndarray


@dataclass(frozen=True, eq=False)
class CollisionEvent:
    """Outcome of one trajectory pair: time and place of first contact, if any."""

    collided: bool
    t: Optional[float] = None
    c: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.collided:
            if self.t is None or self.c is None:
                raise ValueError("a collision must carry a time and a contact point")
            if not self.t > 0.0:
                raise ValueError(f"collision time must be positive, got {self.t}")
        elif self.t is not None or self.c is not None:
            raise ValueError("a miss carries neither time nor contact point")


def com_split(pair: VelocityPair) -> ComSplit:
    """Splits (v1, v2) into midpoint drift and half the velocity difference."""
    return ComSplit(
        v_mean=0.5 * (pair.v1 + pair.v2),
        v_half_diff=0.5 * (pair.v1 - pair.v2),
    )


def _closing_terms(pair: VelocityPair, r: float) -> tuple[float, float, float]:
    """Shared quantities for the contact test and the contact time.

    Returns (dv1, dvsq, disc): first component and squared norm of the
    velocity difference, and the discriminant of the contact quadratic
    scaled by 1/4.  The criterion and the solver both branch on exactly
    these values, so they can never disagree.
    """
    dv = pair.v1 - pair.v2
    dv1 = float(dv[0])
    dvsq = float(np.dot(dv, dv))
    disc = dv1 * dv1 - (1.0 - r * r) * dvsq
    return dv1, dvsq, disc


def collision_criterion(pair: VelocityPair, r: float) -> bool:
    """Whether the two balls of radius r ever touch.

    True iff the velocity difference makes a small enough angle with the
    line joining the centers: its first component must be positive and
    at least sqrt(1 - r^2) times its norm.  In dimension one this is
    exactly v1 > v2.
    """
    r = _check_radius(r)
    dv1, dvsq, disc = _closing_terms(pair, r)
    return dvsq > 0.0 and dv1 >= 0.0 and disc >= 0.0


def collision_time(pair: VelocityPair, r: float) -> Optional[float]:
    """First time the balls of radius r touch, or None if they never do.

    The center distance passes 2r when |dv|^2 t^2 - 4 dv_1 t + 4(1-r^2)
    vanishes; the smaller positive root is returned through the
    product-of-roots form, which stays fully accurate when the two
    roots are far apart.
    """
    r = _check_radius(r)
    dv1, dvsq, disc = _closing_terms(pair, r)
    if not (dvsq > 0.0 and dv1 >= 0.0 and disc >= 0.0):
        return None
    return 2.0 * (1.0 - r * r) / (dv1 + math.sqrt(disc))


def contact_point(pair: VelocityPair, t: float) -> np.ndarray:
    """Midpoint of the two centers at time t; the contact point when t
    is the collision time."""
    t = float(t)
    if math.isnan(t) or t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    return 0.5 * (pair.v1 + pair.v2) * t


def collision_event(pair: VelocityPair, r: float) -> CollisionEvent:
    """Full outcome record for one pair: collided flag, time, contact point."""
    t = collision_time(pair, r)
    if t is None:
        return CollisionEvent(collided=False)
    return CollisionEvent(collided=True, t=t, c=contact_point(pair, t))


# ---------------------------------------------------------------------------
# Shape oracles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Ball:
    """Ball of radius r in (0, 1) centered at (-1, 0, ..., 0)."""

    radius: float
    dim: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "radius", _check_radius(self.radius))
        d = int(self.dim)
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        object.__setattr__(self, "dim", d)

    @property
    def cap_cosine(self) -> float:
        """Smallest first coordinate of a unit direction that still hits."""
        return math.sqrt((1.0 - self.radius) * (1.0 + self.radius))

    def contact_scales(self, z: np.ndarray) -> np.ndarray:
        """Entry scale of the ray -b z into the ball for unit rows z.

        Vectorized over rows; misses come back as +inf.  The scale b
        solves b^2 - 2 b z_1 + 1 - r^2 = 0; the smaller root is taken in
        product form to avoid cancellation.  The discriminant is kept
        factored as (z_1 - c)(z_1 + c) with c the cap cosine, so a
        direction sitting exactly on the cap boundary grazes (double
        root) instead of rounding to a miss.
        """
        z = np.atleast_2d(np.asarray(z, dtype=float))
        z1 = z[:, 0]
        c = self.cap_cosine
        disc = (z1 - c) * (z1 + c)
        hit = (z1 > 0.0) & (disc >= 0.0)
        out = np.full(z.shape[0], np.inf)
        root = np.sqrt(np.where(hit, disc, 0.0))
        out[hit] = (1.0 - self.radius) * (1.0 + self.radius) / (z1[hit] + root[hit])
        return out


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Ellipsoid {x : (x - center)^T matrix (x - center) <= 1}.

    Args:
        center: Body-one center x0; the origin must lie strictly outside
            the body, i.e. x0^T Q x0 > 1.
        matrix: Symmetric positive definite quadratic form Q.
    """

    center: np.ndarray
    matrix: np.ndarray

    def __post_init__(self) -> None:
        x0 = _as_vector("center", self.center)
        q = np.asarray(self.matrix, dtype=float)
        if q.shape != (x0.size, x0.size):
            raise ValueError(f"matrix shape {q.shape} does not match center dimension {x0.size}")
        if np.isnan(q).any():
            raise ValueError("matrix contains NaN")
        if not np.allclose(q, q.T, rtol=1e-10, atol=1e-12):
            raise ValueError("matrix must be symmetric")
        try:
            np.linalg.cholesky(q)
        except np.linalg.LinAlgError:
            raise ValueError("matrix must be positive definite") from None
        if float(x0 @ q @ x0) <= 1.0:
            raise ValueError("origin must lie strictly outside the body (center^T Q center > 1)")
        object.__setattr__(self, "center", x0)
        object.__setattr__(self, "matrix", q)

    @classmethod
    def from_semi_axes(cls, center, semi_axes) -> "Ellipsoid":
        """Axis-aligned ellipsoid with the given semi-axis lengths."""
        semi = _as_vector("semi_axes", semi_axes)
        if not (semi > 0.0).all():
            raise ValueError("semi-axes must be positive")
        return cls(center=center, matrix=np.diag(1.0 / semi**2))

    @property
    def dim(self) -> int:
        return self.center.size

    def contact_scales(self, z: np.ndarray) -> np.ndarray:
        """Entry scale of the ray -b z into the ellipsoid for unit rows z.

        Solves (z^T Q z) b^2 + 2 (z^T Q x0) b + (x0^T Q x0 - 1) = 0 and
        returns the smaller positive root, +inf on a miss.  A hit needs
        z^T Q x0 < 0 (the ray must run toward the body) and a real root.
        """
        z = np.atleast_2d(np.asarray(z, dtype=float))
        qx0 = self.matrix @ self.center
        a = np.einsum("ij,jk,ik->i", z, self.matrix, z)
        b = z @ qx0
        c0 = float(self.center @ qx0) - 1.0
        disc = b * b - a * c0
        hit = (b < 0.0) & (disc >= 0.0)
        out = np.full(z.shape[0], np.inf)
        root = np.sqrt(np.where(hit, disc, 0.0))
        out[hit] = c0 / (-b[hit] + root[hit])
        return out


ShapeOracle = Union[Ball, Ellipsoid]


def contact_scale(shape: ShapeOracle, z) -> Optional[float]:
    """Distance scale at which the ray -b z first touches the body.

    Args:
        shape: Ball or Ellipsoid oracle.
        z: Unit direction in R^d, |z| within 1e-12 of 1.

    Returns:
        The smallest b > 0 with -b z inside the body, or None when the
        ray misses.
    """
    z = _as_vector("z", z)
    if z.size != shape.dim:
        raise ValueError(f"direction has dimension {z.size}, shape has {shape.dim}")
    norm = float(np.linalg.norm(z))
    if abs(norm - 1.0) > _UNIT_NORM_TOL:
        raise ValueError(f"direction must be a unit vector, |z| = {norm}")
    value = float(shape.contact_scales(z[None, :])[0])
    return None if math.isinf(value) else value


def hit_fraction_mc(shape: ShapeOracle, n: int, seed: int,
                    ci_level: float = 0.9999) -> EstimateReport:
    """Fraction of uniform random directions whose ray meets the body.

    For a ball this estimates the collision probability itself (the
    hitting directions form the spherical cap whose mass is the exact
    formula); for other bodies it is the unconditional weight needed to
    turn conditional expectations into plain ones.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"need at least one direction, got n={n}")
    d = shape.dim
    hits = 0
    for block, _start, count in block_spans(n):
        g = block_rng(seed, block)
        if d == 1:
            z = g.standard_normal((count, 1))
            norms = np.abs(z[:, 0])
        else:
            z = g.standard_normal((count, d))
            norms = np.linalg.norm(z, axis=1)
        ok = norms > 0.0
        unit = np.zeros_like(z)
        unit[ok] = z[ok] / norms[ok, None]
        scales = shape.contact_scales(unit)
        hits += int(np.isfinite(scales[ok]).sum())
    p_hat = hits / n
    lo, hi = binomial_ci(hits, n, ci_level)
    return EstimateReport(
        estimate=p_hat,
        successes=hits,
        trials=n,
        std_error=math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n),
        ci_low=lo,
        ci_high=hi,
        ci_level=ci_level,
        seed=int(seed),
        sampler="direction",
    )
