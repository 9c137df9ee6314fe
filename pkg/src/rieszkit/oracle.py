"""Brute-force reference implementations, trusted at small sizes.

Each oracle is either a definitionally identical summation on a different
code path (riesz) or a strict superset search (maximal, morrey).  They
share the kernel table and the convention switches with the fast paths so
that disagreements isolate algorithmic bugs, not quadrature conventions.
Single-threaded, no transforms, guarded against large grids.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import Field
from .riesz import UNIT_BALL_VOLUME, kernel_table

SIZE_GUARD = 2 ** 16


def _guard(f: Field) -> None:
    if f.spec.size > SIZE_GUARD:
        raise ValueError(
            f"oracle size guard: {f.spec.size} > {SIZE_GUARD} points")


def _grid_index(f: Field, x) -> tuple[int, ...]:
    return f.spec.index_of(x)


def riesz_bruteforce(f: Field, alpha: float, x,
                     central_cell: str = "analytic") -> float:
    """Literal sum over every source cell, kernel weight looked up by
    offset in the shared table.  `x` must be a grid point.

    central_cell="omit" drops the singular-cell weight entirely (pure
    midpoint quadrature has no finite value there); the difference with
    the default quantifies the analytic central-cell correction.
    """
    _guard(f)
    spec = f.spec
    idx = _grid_index(f, x)
    table = kernel_table(spec, alpha)
    n = spec.n
    slices = tuple(slice(n - 1 - i, 2 * n - 1 - i) for i in idx)
    w = table.weights[slices]
    if central_cell == "omit":
        w = w.copy()
        w[idx] = 0.0
    elif central_cell != "analytic":
        raise ValueError(f"unknown central_cell mode {central_cell!r}")
    total = 0.0
    wf = w.ravel()
    vf = f.values.ravel()
    for j in range(vf.size):
        total += wf[j] * vf[j]
    return total


def riesz_bruteforce_field(f: Field, alpha: float,
                           central_cell: str = "analytic") -> Field:
    """Brute-force potential at every grid point.  The per-point inner sum
    is a vectorized dot over the gathered weight block (still a direct
    summation; no transform, no symmetry use)."""
    _guard(f)
    spec = f.spec
    table = kernel_table(spec, alpha)
    n = spec.n
    out = np.zeros(spec.shape)
    center = tuple(n - 1 for _ in range(spec.d))
    for flat in range(spec.size):
        idx = np.unravel_index(flat, spec.shape)
        slices = tuple(slice(n - 1 - i, 2 * n - 1 - i) for i in idx)
        w = table.weights[slices]
        if central_cell == "omit":
            w = w.copy()
            w[idx] = 0.0
        out[idx] = np.sum(w * f.values)
    return f.with_values(out)


def maximal_bruteforce(f: Field, x) -> float:
    """Exhaustive centered maximal value at a grid point: sort all cells
    by distance, take the max of prefix averages over complete distance
    groups (every realizable ball radius)."""
    _guard(f)
    spec = f.spec
    idx = _grid_index(f, x)
    # integer squared distances in cell units: exact tie grouping
    sq = np.zeros(spec.shape, dtype=np.int64)
    for k in range(spec.d):
        off = np.arange(spec.n, dtype=np.int64) - idx[k]
        shape = [1] * spec.d
        shape[k] = spec.n
        sq = sq + (off ** 2).reshape(shape)
    order = np.argsort(sq.ravel(), kind="stable")
    dist = sq.ravel()[order]
    vals = np.abs(f.values).ravel()[order]
    csum = np.cumsum(vals)
    # group boundaries: last index of each distinct distance
    ends = np.nonzero(np.diff(dist))[0]
    ends = np.concatenate([ends, [dist.size - 1]])
    means = csum[ends] / (ends + 1.0)
    return float(np.max(means))


def morrey_bruteforce(b: Field, p: float, alpha: float,
                      convention: str = "avg") -> float:
    """Exhaustive Morrey scan: all cell centers, all realizable radii,
    same normalization and effective-radius convention as the fast scan."""
    _guard(b)
    spec = b.spec
    if not b.is_nonnegative():
        raise ValueError("Morrey scan needs a nonnegative weight")
    if convention not in ("avg", "raw"):
        raise ValueError(f"unknown convention {convention!r}")
    bp = b.values ** p
    hvol = spec.cell_volume
    cball = UNIT_BALL_VOLUME[spec.d]

    # unclipped lattice count for every realizable squared radius
    max_sq = spec.d * (spec.n - 1) ** 2
    kmax = spec.n - 1
    ideal_count = np.zeros(max_sq + 1, dtype=np.int64)
    rng = range(-kmax, kmax + 1)
    if spec.d == 1:
        for i in rng:
            ideal_count[i * i] += 1
    elif spec.d == 2:
        for i in rng:
            for j in rng:
                ideal_count[i * i + j * j] += 1
    else:
        for i in rng:
            for j in rng:
                for l in rng:
                    ideal_count[i * i + j * j + l * l] += 1
    ideal_cum = np.cumsum(ideal_count)

    best = 0.0
    for flat in range(spec.size):
        idx = np.unravel_index(flat, spec.shape)
        sq = np.zeros(spec.shape, dtype=np.int64)
        for k in range(spec.d):
            off = np.arange(spec.n, dtype=np.int64) - idx[k]
            shape = [1] * spec.d
            shape[k] = spec.n
            sq = sq + (off ** 2).reshape(shape)
        order = np.argsort(sq.ravel(), kind="stable")
        dist = sq.ravel()[order]
        vals = bp.ravel()[order]
        csum = np.cumsum(vals)
        ends = np.nonzero(np.diff(dist))[0]
        ends = np.concatenate([ends, [dist.size - 1]])
        integrals = csum[ends] * hvol
        vols = ideal_cum[dist[ends]] * hvol
        rho_eff = (vols / cball) ** (1.0 / spec.d)
        if convention == "avg":
            values = rho_eff ** alpha * (integrals / vols) ** (1.0 / p)
        else:
            values = rho_eff ** alpha * integrals ** (1.0 / p)
        best = max(best, float(np.max(values)))
    return best
