"""Monte Carlo engines for the two-body collision model.

Two samplers share one reproducibility contract:

* ``run_naive`` draws independent Gaussian velocity pairs and records
  which of them collide, at what time, and where.  Its hit rate
  estimates the collision probability directly, which becomes hopeless
  for small radii.
* ``run_conditional`` generates only colliding trajectories by
  factoring the motion into the hitting direction (uniform on the cap
  of directions that meet the body, or rejection-sampled for general
  bodies), the approach speed, and the independent midpoint drift.
  Every trial is a collision; multiply conditional expectations by the
  collision probability to recover unconditional ones.

Reproducibility: trials are processed in fixed blocks of ``rng.BLOCK``;
block i draws from a Philox stream keyed by (seed, i).  The result is a
pure function of (seed, n, sampler, shape) - the number of worker
threads only changes how blocks are scheduled, never a single output
bit.  Retained samples are capped: every collision gets a uniform
priority from its own block's stream, and only the ``sample_cap``
lowest-priority samples survive a merge, which keeps retention
deterministic and merge-order independent (a bottom-k over the union is
a bottom-k over partial bottom-k's).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Union

import numpy as np

from .geometry import Ball, ShapeOracle, VelocityPair
from .rng import block_rng, block_spans
from .stats import EstimateReport, binomial_ci

__all__ = [
    "SimConfig",
    "Accumulator",
    "Histogram",
    "sample_velocity_pair",
    "sample_cap_direction",
    "sample_relative_speed",
    "run_naive",
    "run_conditional",
    "run",
    "histogram",
    "proportion_report",
    "write_sample_csv",
]

_SQRT_HALF = math.sqrt(0.5)

# Rejection sampling of hitting directions aborts when it is clearly
# going nowhere: fewer than one hit per million proposals after this
# many draws inside a single block.
_REJECTION_PROPOSAL_LIMIT = 10_000_000
_REJECTION_MIN_RATE = 1e-6

DEFAULT_SAMPLE_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class SimConfig:
    """One simulation run: body shape, trial count, seed, engine choice.

    workers = 0 means machine parallelism; any value is superseded by
    the COLLIDE_THREADS environment variable when that is set.  The
    worker count never affects results, only wall time.
    """

    shape: ShapeOracle
    n: int
    seed: int
    sampler: str = "naive"
    workers: int = 0
    sample_cap: int = DEFAULT_SAMPLE_CAP

    def __post_init__(self) -> None:
        if not (hasattr(self.shape, "contact_scales") and hasattr(self.shape, "dim")):
            raise ValueError(f"shape must be a shape oracle, got {type(self.shape).__name__}")
        n = int(self.n)
        if n < 1:
            raise ValueError(f"trial count must be >= 1, got {n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "seed", int(self.seed))
        if self.sampler not in ("naive", "conditional"):
            raise ValueError(f"sampler must be 'naive' or 'conditional', got {self.sampler!r}")
        workers = int(self.workers)
        if workers < 0:
            raise ValueError(f"workers must be >= 0, got {workers}")
        object.__setattr__(self, "workers", workers)
        cap = int(self.sample_cap)
        if cap < 0:
            raise ValueError(f"sample cap must be >= 0, got {cap}")
        object.__setattr__(self, "sample_cap", cap)

    @property
    def dim(self) -> int:
        return self.shape.dim


# ---------------------------------------------------------------------------
# Accumulator
# ---------------------------------------------------------------------------


def _retain(cap: int, trial: np.ndarray, priority: np.ndarray,
            times: np.ndarray, locations: np.ndarray):
    """Keeps the cap lowest-priority samples, canonically ordered by trial."""
    if trial.size > cap:
        order = np.lexsort((trial, priority))[:cap]
        trial, priority = trial[order], priority[order]
        times, locations = times[order], locations[order]
    order = np.argsort(trial)
    return trial[order], priority[order], times[order], locations[order]


@dataclass(frozen=True, eq=False)
class Accumulator:
    """Mergeable tally of a simulation run.

    Counts are exact; the time/location samples are the retained subset
    described in the module docstring, always sorted by trial index.
    Merging is associative and commutative, and merging disjoint runs
    of the same configuration reproduces the single-run state exactly.
    """

    dim: int
    cap: int
    trials: int
    collisions: int
    sample_trial: np.ndarray
    sample_priority: np.ndarray
    sample_time: np.ndarray
    sample_location: np.ndarray

    @classmethod
    def empty(cls, dim: int, cap: int = DEFAULT_SAMPLE_CAP) -> "Accumulator":
        return cls(
            dim=int(dim),
            cap=int(cap),
            trials=0,
            collisions=0,
            sample_trial=np.empty(0, dtype=np.int64),
            sample_priority=np.empty(0, dtype=float),
            sample_time=np.empty(0, dtype=float),
            sample_location=np.empty((0, int(dim)), dtype=float),
        )

    @property
    def time_samples(self) -> np.ndarray:
        return self.sample_time

    @property
    def location_samples(self) -> np.ndarray:
        return self.sample_location

    @property
    def p_hat(self) -> float:
        return self.collisions / self.trials if self.trials else math.nan

    def merge(self, other: "Accumulator") -> "Accumulator":
        if self.dim != other.dim:
            raise ValueError(f"cannot merge dimensions {self.dim} and {other.dim}")
        if self.cap != other.cap:
            raise ValueError(f"cannot merge sample caps {self.cap} and {other.cap}")
        trial = np.concatenate([self.sample_trial, other.sample_trial])
        priority = np.concatenate([self.sample_priority, other.sample_priority])
        times = np.concatenate([self.sample_time, other.sample_time])
        locations = np.concatenate([self.sample_location, other.sample_location])
        trial, priority, times, locations = _retain(self.cap, trial, priority, times, locations)
        return Accumulator(
            dim=self.dim,
            cap=self.cap,
            trials=self.trials + other.trials,
            collisions=self.collisions + other.collisions,
            sample_trial=trial,
            sample_priority=priority,
            sample_time=times,
            sample_location=locations,
        )


@dataclass(frozen=True, eq=False)
class _BlockOut:
    trials: int
    idx: np.ndarray
    prio: np.ndarray
    times: np.ndarray
    locs: np.ndarray
    rows: Optional[tuple]


def _collect(dim: int, cap: int, trials: int, outs: list[_BlockOut]) -> Accumulator:
    idx = np.concatenate([o.idx for o in outs]) if outs else np.empty(0, dtype=np.int64)
    prio = np.concatenate([o.prio for o in outs]) if outs else np.empty(0)
    times = np.concatenate([o.times for o in outs]) if outs else np.empty(0)
    locs = np.concatenate([o.locs for o in outs]) if outs else np.empty((0, dim))
    collisions = int(idx.size)
    idx, prio, times, locs = _retain(cap, idx, prio, times, locs)
    return Accumulator(
        dim=dim, cap=cap, trials=trials, collisions=collisions,
        sample_trial=idx, sample_priority=prio, sample_time=times, sample_location=locs,
    )


# ---------------------------------------------------------------------------
# Elementary samplers
# ---------------------------------------------------------------------------


def sample_velocity_pair(rng: np.random.Generator, d: int, size: Optional[int] = None):
    """Independent standard normal velocities for both bodies.

    With size=None returns a single VelocityPair; with an integer size
    returns a (v1, v2) pair of (size, d) arrays drawn in the same
    per-trial layout the naive engine uses.
    """
    d = int(d)
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    m = 1 if size is None else int(size)
    if m < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    v = rng.standard_normal((m, 2 * d))
    v1, v2 = v[:, :d], v[:, d:]
    if size is None:
        return VelocityPair(v1[0], v2[0])
    return v1.copy(), v2.copy()


def sample_relative_speed(rng: np.random.Generator, d: int, size: Optional[int] = None):
    """Norm of the half velocity difference: sqrt(S/2) with S chi-square(d).

    Sampled exactly as the norm of d independent centered normals with
    variance 1/2.
    """
    d = int(d)
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    m = 1 if size is None else int(size)
    if m < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    draws = rng.standard_normal((m, d)) * _SQRT_HALF
    norms = np.linalg.norm(draws, axis=1)
    return float(norms[0]) if size is None else norms


def _unit_rows(rng: np.random.Generator, m: int, k: int) -> np.ndarray:
    """m uniform random unit vectors in R^k via normalized Gaussians."""
    out = rng.standard_normal((m, k))
    norms = np.linalg.norm(out, axis=1)
    while True:
        bad = norms == 0.0
        if not bad.any():
            break
        out[bad] = rng.standard_normal((int(bad.sum()), k))
        norms = np.linalg.norm(out, axis=1)
    return out / norms[:, None]


def _cap_first_coordinate(rng: np.random.Generator, d: int, c: float, m: int) -> np.ndarray:
    """First coordinate of a uniform cap direction for d >= 4.

    Target density on [c, 1] is proportional to (1 - x^2)^((d-3)/2),
    decreasing there, so a uniform proposal accepted with probability
    ((1 - x^2) / (1 - c^2))^((d-3)/2) is exact.
    """
    exponent = 0.5 * (d - 3)
    base = (1.0 - c) * (1.0 + c)
    out = np.empty(m)
    have = 0
    while have < m:
        k = max(128, 2 * (m - have))
        proposal = rng.uniform(c, 1.0, k)
        u = rng.random(k)
        accepted = proposal[u <= ((1.0 - proposal * proposal) / base) ** exponent]
        take = min(accepted.size, m - have)
        out[have:have + take] = accepted[:take]
        have += take
    return out


def sample_cap_direction(rng: np.random.Generator, d: int, c: float,
                         size: Optional[int] = None):
    """Uniform direction on the spherical cap {z on S^(d-1) : z_1 >= c}.

    d = 2 draws the polar angle uniformly on [-arccos c, arccos c];
    d = 3 uses the exact uniformity of the first coordinate on [c, 1];
    d >= 4 rejection-samples the first coordinate and attaches an
    independent uniform direction for the remaining components.
    """
    d = int(d)
    if d < 2:
        raise ValueError(f"cap sampling needs d >= 2, got {d}")
    c = float(c)
    if math.isnan(c) or not 0.0 < c < 1.0:
        raise ValueError(f"cap cosine must lie in (0, 1), got {c}")
    m = 1 if size is None else int(size)
    if m < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    if d == 2:
        theta_max = math.acos(c)
        theta = rng.uniform(-theta_max, theta_max, m)
        # cos(acos(c)) can land one ulp below c; clamp so every sampled
        # direction stays inside the cap it was drawn from.
        z = np.column_stack([np.maximum(np.cos(theta), c), np.sin(theta)])
    elif d == 3:
        z1 = rng.uniform(c, 1.0, m)
        phi = rng.uniform(0.0, 2.0 * math.pi, m)
        s = np.sqrt(np.maximum(1.0 - z1 * z1, 0.0))
        z = np.column_stack([z1, s * np.cos(phi), s * np.sin(phi)])
    else:
        z1 = _cap_first_coordinate(rng, d, c, m)
        w = _unit_rows(rng, m, d - 1)
        s = np.sqrt(np.maximum(1.0 - z1 * z1, 0.0))
        z = np.column_stack([z1, s[:, None] * w])
    return z[0] if size is None else z


def _hit_directions(rng: np.random.Generator, shape: ShapeOracle, m: int) -> np.ndarray:
    """Uniform sphere directions conditioned on the ray meeting the body."""
    d = shape.dim
    out = np.empty((m, d))
    have = 0
    proposals = 0
    while have < m:
        k = max(256, 2 * (m - have))
        unit = _unit_rows(rng, k, d)
        proposals += k
        hits = unit[np.isfinite(shape.contact_scales(unit))]
        take = min(hits.shape[0], m - have)
        out[have:have + take] = hits[:take]
        have += take
        if proposals >= _REJECTION_PROPOSAL_LIMIT and have < _REJECTION_MIN_RATE * proposals:
            raise RuntimeError(
                f"hitting-direction rejection stalled: {have} hits in {proposals} "
                f"proposals; the body is practically unreachable from the origin"
            )
    return out


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------


def _naive_block(config: SimConfig, span: tuple[int, int, int], want_rows: bool) -> _BlockOut:
    block, start, m = span
    d = config.dim
    g = block_rng(config.seed, block)
    v = g.standard_normal((m, 2 * d))
    prio = g.random(m)
    v1, v2 = v[:, :d], v[:, d:]
    t = np.full(m, np.nan)
    if isinstance(config.shape, Ball):
        r = config.shape.radius
        dv = v1 - v2
        dv1 = dv[:, 0]
        dvsq = np.einsum("ij,ij->i", dv, dv)
        disc = dv1 * dv1 - (1.0 - r * r) * dvsq
        collided = (dvsq > 0.0) & (dv1 >= 0.0) & (disc >= 0.0)
        t[collided] = 2.0 * (1.0 - r * r) / (dv1[collided] + np.sqrt(disc[collided]))
    else:
        half = 0.5 * (v1 - v2)
        speed = np.linalg.norm(half, axis=1)
        moving = speed > 0.0
        unit = np.zeros_like(half)
        unit[moving] = half[moving] / speed[moving, None]
        scales = config.shape.contact_scales(unit)
        collided = moving & np.isfinite(scales)
        t[collided] = scales[collided] / speed[collided]
    c = 0.5 * (v1 + v2) * t[:, None]
    idx = start + np.flatnonzero(collided)
    rows = (start + np.arange(m, dtype=np.int64), collided, t, c) if want_rows else None
    return _BlockOut(m, idx.astype(np.int64), prio[collided], t[collided], c[collided], rows)


def _conditional_block(config: SimConfig, span: tuple[int, int, int], want_rows: bool) -> _BlockOut:
    block, start, m = span
    shape = config.shape
    d = shape.dim
    g = block_rng(config.seed, block)
    if isinstance(shape, Ball):
        if d == 1:
            z = np.ones((m, 1))
        else:
            z = sample_cap_direction(g, d, shape.cap_cosine, m)
    else:
        z = _hit_directions(g, shape, m)
    scale = shape.contact_scales(z)
    speed = sample_relative_speed(g, d, m)
    drift = g.standard_normal((m, d)) * _SQRT_HALF
    prio = g.random(m)
    t = scale / speed
    c = drift * t[:, None]
    idx = start + np.arange(m, dtype=np.int64)
    rows = (idx, np.ones(m, dtype=bool), t, c) if want_rows else None
    return _BlockOut(m, idx, prio, t, c, rows)


def _resolve_workers(requested: int) -> int:
    env = os.environ.get("COLLIDE_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"COLLIDE_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"COLLIDE_THREADS must be >= 1, got {value}")
        return value
    if requested > 0:
        return requested
    return os.cpu_count() or 1


def _drive(config: SimConfig, block_fn, dump) -> Accumulator:
    spans = block_spans(config.n)
    workers = _resolve_workers(config.workers)
    want_rows = dump is not None
    if workers == 1 or len(spans) == 1:
        outs = [block_fn(config, s, want_rows) for s in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(lambda s: block_fn(config, s, want_rows), spans))
    acc = _collect(config.dim, config.sample_cap, config.n, outs)
    if dump is not None:
        write_sample_csv(dump, config.dim, (o.rows for o in outs))
    return acc


def run_naive(config: SimConfig, dump=None) -> Accumulator:
    """Runs the direct engine: every trial an independent velocity pair.

    Optionally dumps one CSV row per trial to ``dump`` (path or open
    text file); rows appear in trial order regardless of worker count.
    """
    if config.sampler != "naive":
        raise ValueError(f"config requests sampler {config.sampler!r}, not 'naive'")
    return _drive(config, _naive_block, dump)


def run_conditional(config: SimConfig, dump=None) -> Accumulator:
    """Runs the collision-only engine; every recorded trial collides.

    Trials compose the hitting direction, the approach speed, and the
    midpoint drift; contact time is the body entry scale divided by the
    speed and the contact point is the drift times that.  Estimates made
    from these samples are conditional on collision; multiply by the
    collision probability for unconditional quantities.
    """
    if config.sampler != "conditional":
        raise ValueError(f"config requests sampler {config.sampler!r}, not 'conditional'")
    return _drive(config, _conditional_block, dump)


def run(config: SimConfig, dump=None) -> Accumulator:
    """Dispatches on config.sampler."""
    if config.sampler == "naive":
        return run_naive(config, dump)
    return run_conditional(config, dump)


def proportion_report(acc: Accumulator, seed: int, sampler: str,
                      ci_level: float = 0.9999) -> EstimateReport:
    """Collision-fraction estimate with its confidence interval."""
    if acc.trials < 1:
        raise ValueError("cannot report on an empty accumulator")
    p_hat = acc.collisions / acc.trials
    lo, hi = binomial_ci(acc.collisions, acc.trials, ci_level)
    return EstimateReport(
        estimate=p_hat,
        successes=acc.collisions,
        trials=acc.trials,
        std_error=math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / acc.trials),
        ci_low=lo,
        ci_high=hi,
        ci_level=ci_level,
        seed=int(seed),
        sampler=sampler,
    )


# ---------------------------------------------------------------------------
# Histogram and CSV output
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Histogram:
    """Fixed uniform binning of scalar samples with explicit flow counts."""

    lo: float
    hi: float
    bins: int
    counts: np.ndarray
    underflow: int
    overflow: int

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)


def histogram(samples, lo: float, hi: float, bins: int) -> Histogram:
    """Bins samples uniformly on [lo, hi).

    Bins are lower-edge inclusive; values below lo and at or above hi
    land in the explicit underflow/overflow counters, so the total
    always matches the sample count.
    """
    lo = float(lo)
    hi = float(hi)
    bins = int(bins)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi})")
    if bins < 1:
        raise ValueError(f"need at least one bin, got {bins}")
    xs = np.asarray(samples, dtype=float).ravel()
    if np.isnan(xs).any():
        raise ValueError("samples contain NaN")
    pos = np.floor((xs - lo) / ((hi - lo) / bins)).astype(np.int64)
    under = int((pos < 0).sum())
    over = int((pos >= bins).sum())
    inside = pos[(pos >= 0) & (pos < bins)]
    counts = np.bincount(inside, minlength=bins).astype(np.int64)
    return Histogram(lo=lo, hi=hi, bins=bins, counts=counts, underflow=under, overflow=over)


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_sample_csv(path_or_file: Union[str, os.PathLike, IO[str]], dim: int,
                     row_blocks: Iterable[Optional[tuple]]) -> None:
    """Writes trial rows as CSV: trial,collided,t,c_1,...,c_d.

    Misses leave the time and location fields empty.  Row order follows
    the iteration order of ``row_blocks``, which the engines emit by
    ascending trial index.
    """
    own = isinstance(path_or_file, (str, os.PathLike))
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        header = ["trial", "collided", "t"] + [f"c_{i + 1}" for i in range(dim)]
        fh.write(",".join(header) + "\n")
        for block in row_blocks:
            if block is None:
                continue
            idx, collided, t, c = block
            lines = []
            for j in range(len(idx)):
                if collided[j]:
                    fields = [str(int(idx[j])), "true", _fmt(t[j])]
                    fields += [_fmt(c[j, k]) for k in range(dim)]
                else:
                    fields = [str(int(idx[j])), "false", ""] + [""] * dim
                lines.append(",".join(fields))
            if lines:
                fh.write("\n".join(lines) + "\n")
    finally:
        if own:
            fh.close()
