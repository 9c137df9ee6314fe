"""Centered Hardy-Littlewood maximal operator and A1-weight utilities.

M f(x) is the max over a ladder of radii rho of the average of |f| over
the discrete ball {cells c : |c - x| < rho}.  Averages divide by the
clipped cell count (cells actually inside the grid box) times h^d, which
makes M of a constant exactly that constant and guarantees M f >= |f|
pointwise (the radius-h ball is the cell itself).

Ball memberships are decided in integer cell units: an offset m belongs
to the radius-(t*h) ball iff |m|^2 <= S with S = ceil(t^2) - 1, so the
open-ball rule has no floating-point ties.  Ball sums for one threshold S
are accumulated from row cumulative sums, O(n^d * t) per threshold.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Field, GridSpec


class DegenerateWeightWarning(UserWarning):
    """Weight vanishes at points interior to its support; ratios there are
    excluded from the A1 max and the reported constant is grid-dependent."""


def _threshold(t: float) -> int:
    """Largest integer S with S < t^2 (the inclusion threshold |m|^2 <= S
    for the open ball of radius t cells).  The 1e-9 relative guard keeps
    radii that are meant to hit an exact lattice value (t^2 integer) from
    spilling into the next stencil through rounding in rho/h."""
    t2 = t * t
    return max(int(math.ceil(t2 * (1.0 - 1e-9))) - 1, 0)


@lru_cache(maxsize=None)
def _near_field_thresholds(d: int, kmax: int) -> tuple[int, ...]:
    """All realizable squared offset norms <= kmax^2, ascending."""
    rng = range(kmax + 1)
    if d == 1:
        sq = {i * i for i in rng}
    elif d == 2:
        sq = {i * i + j * j for i in rng for j in rng}
    else:
        sq = {i * i + j * j + l * l for i in rng for j in rng for l in rng}
    return tuple(s for s in sorted(sq) if s <= kmax * kmax)


def ball_sum(a: np.ndarray, S: int) -> np.ndarray:
    """Window sums over {offsets m : |m|^2 <= S} with zero outside the box.

    Offsets are clamped to n-1 per axis: anything farther only ever indexes
    zeros, so the clamp changes nothing but the work done.
    """
    d = a.ndim
    n = a.shape[0]
    k = min(math.isqrt(S), n - 1)
    pad_shape = tuple(n + 2 * k for _ in range(d - 1)) + (n + 2 * k + 1,)
    pad = np.zeros(pad_shape)
    core = (slice(k, k + n),) * (d - 1) + (slice(k + 1, k + n + 1),)
    pad[core] = a
    c = np.cumsum(pad, axis=-1)
    out = np.zeros(a.shape)
    if d == 1:
        out += c[2 * k + 1: 2 * k + 1 + n] - c[0:n]
        return out
    if d == 2:
        for dy in range(-k, k + 1):
            kx = min(math.isqrt(S - dy * dy), k)
            rows = c[k + dy: k + dy + n]
            np.add(out, rows[:, k + kx + 1: k + kx + 1 + n], out=out)
            np.subtract(out, rows[:, k - kx: k - kx + n], out=out)
        return out
    for dz in range(-k, k + 1):
        kk = min(math.isqrt(S - dz * dz), k)
        for dy in range(-kk, kk + 1):
            kx = min(math.isqrt(S - dz * dz - dy * dy), k)
            sheet = c[k + dz: k + dz + n, k + dy: k + dy + n]
            np.add(out, sheet[:, :, k + kx + 1: k + kx + 1 + n], out=out)
            np.subtract(out, sheet[:, :, k - kx: k - kx + n], out=out)
    return out


@lru_cache(maxsize=None)
def _ball_counts(d: int, n: int, S: int) -> tuple[np.ndarray, int]:
    """(clipped cell counts per grid point, unclipped lattice count)."""
    counts = ball_sum(np.ones((n,) * d), S)
    counts = np.rint(counts).astype(np.int64)
    counts.flags.writeable = False
    k = math.isqrt(S)
    if d == 1:
        ideal = 2 * k + 1
    elif d == 2:
        ideal = sum(2 * math.isqrt(S - dy * dy) + 1 for dy in range(-k, k + 1))
    else:
        ideal = 0
        for dz in range(-k, k + 1):
            kk = math.isqrt(S - dz * dz)
            ideal += sum(2 * math.isqrt(S - dz * dz - dy * dy) + 1
                         for dy in range(-kk, kk + 1))
    return counts, ideal


def ball_counts(spec: GridSpec, S: int) -> tuple[np.ndarray, int]:
    return _ball_counts(spec.d, spec.n, S)


@dataclass(frozen=True)
class RadiusLadder:
    """Increasing ball radii (physical units) from h up to the grid
    diameter: all integer multiples of h through 8h, then geometric with
    ratio ~1.25, capped by a radius covering the whole grid."""

    radii: tuple[float, ...]

    def __post_init__(self):
        if not self.radii:
            raise ValueError("empty radius ladder")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("ladder radii must be strictly increasing")

    @classmethod
    def default(cls, spec: GridSpec, ratio: float = 1.04,
                fine_multiples: int = 16) -> "RadiusLadder":
        """Near field: every realizable lattice radius up to fine_multiples
        cells (in d >= 2 that includes the intermediate radii sqrt(2),
        sqrt(5), ... which integer multiples of h would skip).  Far field:
        geometric."""
        cover = spec.n * math.sqrt(spec.d) + 1.0
        cells = [math.sqrt(s + 1) for s in
                 _near_field_thresholds(spec.d, fine_multiples)]
        t = float(fine_multiples)
        while t < cover:
            t *= ratio
            cells.append(min(t, cover))
        if cells[-1] < cover:
            cells.append(cover)
        return cls(tuple(c * spec.h for c in cells))

    @classmethod
    def full(cls, spec: GridSpec) -> "RadiusLadder":
        """Every distinct ball realizable on the grid: one radius per
        attainable squared offset norm.  Exhaustive; small grids only."""
        m = spec.n - 1
        sq = {0}
        if spec.d == 1:
            sq = {i * i for i in range(m + 1)}
        elif spec.d == 2:
            sq = {i * i + j * j for i in range(m + 1) for j in range(m + 1)}
        else:
            sq = {i * i + j * j + l * l for i in range(m + 1)
                  for j in range(m + 1) for l in range(m + 1)}
        return cls(tuple(spec.h * math.sqrt(s + 1) for s in sorted(sq)))

    def thresholds(self, spec: GridSpec) -> tuple[int, ...]:
        """Deduplicated integer inclusion thresholds, ascending."""
        out = []
        seen = set()
        for rho in self.radii:
            s = _threshold(rho / spec.h)
            if s not in seen:
                seen.add(s)
                out.append(s)
        return tuple(out)


def maximal(f: Field, ladder: RadiusLadder | None = None) -> Field:
    """Centered maximal function of |f| over the ladder radii."""
    spec = f.spec
    if ladder is None:
        ladder = RadiusLadder.default(spec)
    a = np.abs(f.values)
    best = a.copy()  # radius-h ball = the cell itself
    for S in ladder.thresholds(spec):
        if S == 0:
            continue
        counts, _ = ball_counts(spec, S)
        np.maximum(best, ball_sum(a, S) / counts, out=best)
    return f.with_values(best)


def maximal_indicator_majorant(rho: float, x, d: int) -> float:
    """Pointwise majorant of M applied to the indicator of B_rho(0):
    1 inside the ball, (rho/|x|)^d outside."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)
    if x.size != d:
        raise ValueError(f"point has {x.size} coordinates, expected {d}")
    dist = float(np.sqrt(np.sum(x ** 2)))
    if dist <= rho:
        return 1.0
    return (rho / dist) ** d


def a1_constant(w: Field, tol: float = 1e-300,
                ladder: RadiusLadder | None = None) -> float:
    """Empirical A1 constant: max of M w / w over cells with w > tol.

    Cells at or below the floor are excluded; if any of them lie strictly
    inside the support's bounding box a DegenerateWeightWarning is issued
    (the continuum constant is infinite there, the grid value is not).
    """
    if not w.is_nonnegative():
        raise ValueError("A1 constant needs a nonnegative weight")
    mask = w.values > tol
    if not mask.any():
        raise ValueError("degenerate weight: w vanishes identically")
    mw = maximal(w, ladder).values
    if not mask.all():
        # bounding box of the support, per axis
        box = np.ones_like(mask)
        for axis in range(w.spec.d):
            proj = mask.any(axis=tuple(k for k in range(w.spec.d)
                                       if k != axis))
            idx = np.nonzero(proj)[0]
            coord = np.arange(w.spec.n)
            shape = [1] * w.spec.d
            shape[axis] = w.spec.n
            inside = (coord >= idx[0]) & (coord <= idx[-1])
            box &= inside.reshape(shape)
        if np.any(box & ~mask):
            _warnings.warn(
                "weight vanishes inside its support bounding box; A1 "
                "constant excludes those cells and depends on the grid",
                DegenerateWeightWarning)
    return float(np.max(mw[mask] / w.values[mask]))


def a1_lift(b: Field, p0: float, p1: float,
            ladder: RadiusLadder | None = None) -> Field:
    """Lifted weight (M(b^p0))^(1/p0).  Dominates b pointwise since
    M g >= g; its p1-th power is an A1 weight because p1/p0 < 1.
    p1 >= p0 is rejected."""
    if not (0.0 < p1 < p0):
        raise ValueError(f"need 0 < p1 < p0, got p0={p0}, p1={p1}")
    if not b.is_nonnegative():
        raise ValueError("a1_lift needs a nonnegative weight")
    m = maximal(b.power(p0), ladder)
    return b.with_values(m.values ** (1.0 / p0))
