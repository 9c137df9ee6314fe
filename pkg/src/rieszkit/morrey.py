"""Morrey-condition estimation and the canonical weight families.

The scan estimates the smallest constant A with

    rho^alpha * (avg over B_rho(x) of b^p)^(1/p) <= A

over balls centered on a coarsened lattice with radii from the standard
ladder.  Two conventions matter and are recorded in every report:

* integral normalization: "avg" (default) divides the ball integral by the
  ball volume; "raw" uses the bare integral.  The averaged form is the one
  that keeps all downstream estimates dimensionally consistent in d.
* ball volume and radius: both come from the unclipped lattice count
  (the count the stencil would have on an infinite grid), since the field
  is zero outside the box anyway; the radius entering rho^alpha is the
  effective radius (volume / unit-ball-volume)^(1/d).  Labeling the
  single-cell ball by its ladder radius h instead systematically inflates
  small-ball values of singular weights by an h-independent factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Ball, Field, GridSpec
from .maximal import RadiusLadder, ball_counts, ball_sum
from .riesz import UNIT_BALL_VOLUME, unit_cube_singular_integral

CONVENTIONS = ("avg", "raw")


@dataclass(frozen=True)
class MorreyReport:
    """One scan: the estimated constant, the ball attaining it, and the
    per-radius best (center, effective radius, value) curve."""

    A: float
    argmax_ball: Ball
    scan: tuple[tuple[tuple[float, ...], float, float], ...]
    convention: str

    def as_dict(self) -> dict:
        return {
            "A": self.A,
            "argmax_center": list(self.argmax_ball.center),
            "argmax_radius": self.argmax_ball.radius,
            "convention": self.convention,
            "scan": [{"center": list(c), "radius": r, "value": v}
                     for c, r, v in self.scan],
        }


def morrey_constant(b: Field, p: float, alpha: float,
                    convention: str = "avg", center_stride: int = 4,
                    ladder: RadiusLadder | None = None) -> MorreyReport:
    """Scan balls for the Morrey constant of the weight b.

    Ties in the argmax break toward the smallest radius, then the
    lexicographically smallest center, so reports are deterministic.
    """
    spec = b.spec
    if not b.is_nonnegative():
        raise ValueError("Morrey scan needs a nonnegative weight")
    if not (0.0 < alpha < spec.d):
        raise ValueError(f"alpha must lie in (0, d={spec.d}), got {alpha}")
    if not p > 1.0:
        raise ValueError(f"p must exceed 1, got {p}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    if ladder is None:
        ladder = RadiusLadder.default(spec)

    bp = b.values ** p
    hvol = spec.cell_volume
    cball = UNIT_BALL_VOLUME[spec.d]
    stride = (slice(None, None, center_stride),) * spec.d
    lattice = [spec.axis_coords(k)[::center_stride] for k in range(spec.d)]

    best_val = -1.0
    best_center: tuple[float, ...] = ()
    best_radius = 0.0
    curve = []
    for S in ladder.thresholds(spec):
        _, ideal = ball_counts(spec, S)
        vol = ideal * hvol
        rho_eff = (vol / cball) ** (1.0 / spec.d)
        integrals = ball_sum(bp, S)[stride] * hvol
        if convention == "avg":
            values = rho_eff ** alpha * (integrals / vol) ** (1.0 / p)
        else:
            values = rho_eff ** alpha * integrals ** (1.0 / p)
        flat = int(np.argmax(values))  # first max = lexicographic center
        val = float(values.flat[flat])
        idx = np.unravel_index(flat, values.shape)
        center = tuple(float(lattice[k][idx[k]]) for k in range(spec.d))
        curve.append((center, rho_eff, val))
        if val > best_val:
            best_val = val
            best_center = center
            best_radius = rho_eff
    A = max(best_val, 0.0)
    return MorreyReport(A=A, argmax_ball=Ball(best_center, best_radius),
                        scan=tuple(curve), convention=convention)


def power_weight(alpha: float, scale: float, cutoff: float,
                 spec: GridSpec) -> Field:
    """Truncated power weight scale * |x|^(-alpha) * 1{|x| <= cutoff}.

    The cell containing the origin gets the cell average of |x|^(-alpha)
    (analytic in d = 1, radial quadrature of the cube integral in d >= 2)
    rather than the singular midpoint value.  Requires 0 <= alpha < d and
    a cutoff inside the grid half-extent.
    """
    if not (0.0 <= alpha < spec.d):
        raise ValueError(f"need 0 <= alpha < d={spec.d}, got {alpha}")
    if not cutoff > 0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    half = []
    for k in range(spec.d):
        lo = spec.origin[k] - spec.h / 2.0
        hi = spec.origin[k] + (spec.n - 1) * spec.h + spec.h / 2.0
        if not (lo < 0.0 < hi):
            raise ValueError("power weight needs the origin inside the box")
        half.append(min(-lo, hi))
    if cutoff > min(half):
        raise ValueError(
            f"cutoff {cutoff} exceeds grid half-extent {min(half):.6g}")
    r = spec.radii_from((0.0,) * spec.d)
    with np.errstate(divide="ignore"):
        vals = np.where(r > 0.0, r, 1.0) ** (-alpha)
    # exact cell average at the origin cell (if a cell center sits at 0)
    zero = r == 0.0
    if zero.any():
        avg = (unit_cube_singular_integral(spec.d, spec.d - alpha)
               * spec.h ** (spec.d - alpha)) / spec.cell_volume
        vals[zero] = avg
    vals[r > cutoff] = 0.0
    return Field(spec, scale * vals)


def indicator_ball(spec: GridSpec, radius: float, scale: float = 1.0) -> Field:
    """Indicator of {|x| <= radius} (cell-center rule), scaled."""
    return power_weight(0.0, scale, radius, spec)


def gaussian_bump(spec: GridSpec, center=None, width: float = 1.0,
                  amplitude: float = 1.0) -> Field:
    """amplitude * exp(-|x-center|^2 / (2 width^2))."""
    if center is None:
        center = (0.0,) * spec.d
    r = spec.radii_from(center)
    return Field(spec, amplitude * np.exp(-0.5 * (r / width) ** 2))


def smooth_bump(spec: GridSpec, center=None, radius: float = 1.0,
                amplitude: float = 1.0) -> Field:
    """Compactly supported C-infinity bump exp(1 - 1/(1 - (r/R)^2)) inside
    radius R, exactly zero outside."""
    if center is None:
        center = (0.0,) * spec.d
    r = spec.radii_from(center)
    t = (r / radius) ** 2
    inside = t < 1.0
    vals = np.zeros(spec.shape)
    vals[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside]))
    return Field(spec, amplitude * vals)


def _smooth_ramp(u: np.ndarray) -> np.ndarray:
    """C-infinity transition: 0 for u <= 1, 1 for u >= 2."""
    s = np.clip(u - 1.0, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(s > 0.0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        b = np.where(s < 1.0, np.exp(-1.0 / np.maximum(1.0 - s, 1e-300)), 0.0)
    return a / (a + b + 1e-300)


def boundary_taper(spec: GridSpec) -> np.ndarray:
    """Window that is exactly zero in the boundary band of width n/8 cells
    and ramps smoothly to 1 over the following n/8 cells."""
    band = spec.extent / 8.0
    taper = np.ones(spec.shape)
    for k, ax in enumerate(spec.coords()):
        lo = spec.origin[k] - spec.h / 2.0
        hi = spec.origin[k] + (spec.n - 1) * spec.h + spec.h / 2.0
        taper = taper * _smooth_ramp((ax - lo) / band)
        taper = taper * _smooth_ramp((hi - ax) / band)
    return taper


def _smoothed_noise_sq(seed: int, spec: GridSpec, smoothness: float
                       ) -> np.ndarray:
    """Squared smoothed noise: seeded Gaussians on a fixed 9-node-per-axis
    lattice in physical coordinates, so refining the grid samples the same
    function."""
    rng = np.random.default_rng(seed)
    m = 9
    offsets = np.linspace(-0.28 * spec.extent, 0.28 * spec.extent, m)
    sigma = max(smoothness, 0.05) * spec.extent / 10.0
    z = rng.standard_normal((m,) * spec.d)
    # separable Gaussians: per-axis (node, grid) factor matrices; the node
    # lattice is anchored at origin + extent/2, which refine() preserves,
    # so finer grids sample the same function
    mats = []
    for k in range(spec.d):
        mid = spec.origin[k] + spec.extent / 2.0
        diff = spec.axis_coords(k)[None, :] - (mid + offsets)[:, None]
        mats.append(np.exp(-0.5 * (diff / sigma) ** 2))
    if spec.d == 1:
        acc = z @ mats[0]
    elif spec.d == 2:
        acc = np.einsum("ab,ai,bj->ij", z, mats[0], mats[1])
    else:
        acc = np.einsum("abc,ai,bj,ck->ijk", z, mats[0], mats[1], mats[2])
    return acc ** 2


def random_weight(seed: int, spec: GridSpec, smoothness: float = 0.5,
                  pedestal: float = 0.05) -> Field:
    """Seeded nonnegative test weight: squared smoothed noise truncated to
    a centered ball, plus a pedestal keeping it bounded below there.

    Pointwise bounds of the form lhs <= C * b^s are vacuous where b decays
    to zero inside the scan region (the continuum statements carry an
    A1-type control that rules such weights out), so the canonical random
    weights are bounded below on a sharp ball support, like the power and
    indicator families.  The support ball keeps a clear margin inside the
    n/8 boundary band; deterministic for fixed seed.
    """
    noise = _smoothed_noise_sq(seed, spec, smoothness)
    anchor = tuple(spec.origin[k] + spec.extent / 2.0 for k in range(spec.d))
    r = spec.radii_from(anchor)
    support = r <= 0.3 * spec.extent
    vals = np.zeros(spec.shape)
    peak = float(np.max(noise[support])) if support.any() else 0.0
    vals[support] = noise[support] + pedestal * peak
    return Field(spec, vals)


def random_bump(seed: int, spec: GridSpec, smoothness: float = 0.5) -> Field:
    """Seeded nonnegative smooth bump: squared smoothed noise under a
    window that decays smoothly and is exactly zero on the boundary band
    (width n/8 cells).  Source-side probe; may vanish inside its support,
    so it is never used where a pointwise division by it occurs."""
    return Field(spec, _smoothed_noise_sq(seed, spec, smoothness)
                 * boundary_taper(spec))
