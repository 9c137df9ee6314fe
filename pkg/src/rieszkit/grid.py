"""Uniform cubic grids, sampled real fields, balls, and field file I/O.

Every operator in the package acts on a `Field`: float64 samples at the
cell centers of a uniform lattice in dimension 1, 2 or 3, and treats the
field as identically zero outside the grid box (compact-support
convention).  Discrete balls use the cell-center inclusion rule: a cell
belongs to B_rho(c) iff its center lies at distance < rho from c.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

# Refuse grids with more than this many samples (2**22).
POINT_CAP = 4_194_304

_MAGIC = b"RZF1"


class FieldFormatError(ValueError):
    """Malformed field file; `code` identifies the failure mode."""

    BAD_MAGIC = "bad-magic"
    BAD_DIMENSION = "unsupported-dimension"
    BAD_SHAPE = "bad-shape"
    TRUNCATED = "truncated"
    NON_FINITE = "non-finite"

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class GridSpec:
    """Uniform cubic lattice: n cells per axis, spacing h, `origin` is the
    coordinate of the index-0 cell center on each axis."""

    d: int
    n: int
    h: float
    origin: tuple[float, ...]

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if self.n < 4:
            raise ValueError(f"need at least 4 cells per axis, got {self.n}")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if self.n ** self.d > POINT_CAP:
            raise ValueError(
                f"grid has {self.n ** self.d} points, cap is {POINT_CAP}")
        origin = tuple(float(c) for c in self.origin)
        if len(origin) != self.d or not all(math.isfinite(c) for c in origin):
            raise ValueError(f"origin must be {self.d} finite reals")
        object.__setattr__(self, "origin", origin)

    @classmethod
    def centered(cls, d: int, n: int, extent: float) -> "GridSpec":
        """Box of total side `extent` with x = 0 on a cell center (index n//2
        for even n)."""
        h = extent / n
        return cls(d, n, h, (-extent / 2.0,) * d)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n ** self.d

    @property
    def extent(self) -> float:
        return self.n * self.h

    @property
    def diameter(self) -> float:
        return self.extent * math.sqrt(self.d)

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    def refine(self) -> "GridSpec":
        """Halve h, double n; same box, cell centers of the coarse grid are
        midpoints of fine cell pairs."""
        return GridSpec(self.d, 2 * self.n, self.h / 2.0, self.origin)

    def axis_coords(self, axis: int = 0) -> np.ndarray:
        return self.origin[axis] + self.h * np.arange(self.n)

    def coords(self) -> tuple[np.ndarray, ...]:
        """Sparse meshgrid of cell-center coordinates."""
        axes = [self.axis_coords(k) for k in range(self.d)]
        return tuple(np.meshgrid(*axes, indexing="ij", sparse=True))

    def radii_from(self, center) -> np.ndarray:
        """|x - center| at every cell center, shape self.shape."""
        center = np.asarray(center, dtype=float).reshape(self.d)
        sq = np.zeros(self.shape)
        for k, ax in enumerate(self.coords()):
            sq = sq + (ax - center[k]) ** 2
        return np.sqrt(sq)

    def index_of(self, point) -> tuple[int, ...]:
        """Grid multi-index of the cell whose center is `point`; the point
        must lie on a cell center (within 1e-9 h)."""
        point = np.asarray(point, dtype=float).reshape(self.d)
        idx = []
        for k in range(self.d):
            j = round((point[k] - self.origin[k]) / self.h)
            if not (0 <= j < self.n):
                raise ValueError(f"point {tuple(point)} outside grid")
            if abs(self.origin[k] + j * self.h - point[k]) > 1e-9 * self.h:
                raise ValueError(f"point {tuple(point)} is not a cell center")
            idx.append(int(j))
        return tuple(idx)

    def contains(self, point) -> bool:
        """True if the point lies inside the grid box (union of cells)."""
        point = np.asarray(point, dtype=float).reshape(self.d)
        for k in range(self.d):
            lo = self.origin[k] - self.h / 2.0
            hi = self.origin[k] + (self.n - 1) * self.h + self.h / 2.0
            if not (lo <= point[k] <= hi):
                return False
        return True


@dataclass(frozen=True)
class Field:
    """Real samples on a GridSpec.  Immutable; values exposed read-only."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        if arr.shape != self.spec.shape:
            raise ValueError(
                f"values shape {arr.shape} != grid shape {self.spec.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must all be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.spec, values)

    def power(self, s: float) -> "Field":
        """Pointwise |f|^s with the convention 0^0 = 1."""
        return Field(self.spec, np.abs(self.values) ** s)

    @property
    def max(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_nonnegative(self, tol: float = 0.0) -> bool:
        return bool(np.min(self.values) >= -tol)


@dataclass(frozen=True)
class Ball:
    """Open ball; the index set of Morrey scans and maximal averages."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center",
                           tuple(float(c) for c in self.center))


def lp_norm(f: Field, s: float) -> float:
    """Discrete L_s norm: (sum |f_i|^s h^d)^(1/s).  Requires s >= 1."""
    if not s >= 1.0:
        raise ValueError(f"lp_norm requires s >= 1, got {s}")
    total = float(np.sum(np.abs(f.values) ** s)) * f.spec.cell_volume
    return total ** (1.0 / s)


def integral(f: Field) -> float:
    """Plain quadrature sum f_i h^d (signed)."""
    return float(np.sum(f.values)) * f.spec.cell_volume


def inner(f: Field, g: Field) -> float:
    """Discrete L2 pairing sum f_i g_i h^d (shared grid required)."""
    if f.spec != g.spec:
        raise ValueError("inner() requires a shared GridSpec")
    return float(np.sum(f.values * g.values)) * f.spec.cell_volume


def ball_integral(f: Field, ball: Ball) -> float:
    """Sum of f over cells whose centers lie in the open ball, times h^d.

    Cell-center inclusion is the fixed convention; there is no
    partial-cell weighting.
    """
    spec = f.spec
    if len(ball.center) != spec.d:
        raise ValueError("ball center dimension mismatch")
    if ball.radius < spec.h:
        raise ValueError("sub-cell balls are meaningless on the grid")
    # Bounding slab per axis, then exact distance mask on the sub-box.
    slices = []
    for k in range(spec.d):
        lo = math.ceil((ball.center[k] - ball.radius - spec.origin[k]) / spec.h)
        hi = math.floor((ball.center[k] + ball.radius - spec.origin[k]) / spec.h)
        lo = max(lo, 0)
        hi = min(hi, spec.n - 1)
        if hi < lo:
            return 0.0
        slices.append(slice(lo, hi + 1))
    sub = f.values[tuple(slices)]
    sq = np.zeros(sub.shape)
    for k in range(spec.d):
        ax = spec.origin[k] + spec.h * np.arange(slices[k].start, slices[k].stop)
        shape = [1] * spec.d
        shape[k] = ax.size
        sq = sq + (ax.reshape(shape) - ball.center[k]) ** 2
    mask = sq < ball.radius ** 2
    return float(np.sum(sub[mask])) * spec.cell_volume


# ---------------------------------------------------------------------------
# Field file format (binary, little-endian):
#   magic "RZF1" | u32 d | u32 dims[d] | f64 h | f64 origin[d] | f64 values
# Values are row-major (C order).  dims must be equal on all axes.
# ---------------------------------------------------------------------------

def write_field(f: Field, path) -> None:
    spec = f.spec
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", spec.d))
        fh.write(struct.pack(f"<{spec.d}I", *spec.shape))
        fh.write(struct.pack("<d", spec.h))
        fh.write(struct.pack(f"<{spec.d}d", *spec.origin))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path) -> Field:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8 or data[:4] != _MAGIC:
        raise FieldFormatError(FieldFormatError.BAD_MAGIC,
                               f"bad magic in {path!r}")
    pos = 4
    (d,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if d not in (1, 2, 3):
        raise FieldFormatError(FieldFormatError.BAD_DIMENSION,
                               f"unsupported dimension {d}")
    if len(data) < pos + 4 * d + 8 + 8 * d:
        raise FieldFormatError(FieldFormatError.TRUNCATED,
                               "header truncated")
    dims = struct.unpack_from(f"<{d}I", data, pos)
    pos += 4 * d
    if len(set(dims)) != 1:
        raise FieldFormatError(FieldFormatError.BAD_SHAPE,
                               f"anisotropic dims {dims} unsupported")
    n = dims[0]
    if n < 4:
        raise FieldFormatError(FieldFormatError.BAD_SHAPE,
                               f"need at least 4 cells per axis, got {n}")
    (h,) = struct.unpack_from("<d", data, pos)
    pos += 8
    origin = struct.unpack_from(f"<{d}d", data, pos)
    pos += 8 * d
    count = n ** d
    if len(data) - pos < 8 * count:
        raise FieldFormatError(FieldFormatError.TRUNCATED,
                               f"payload truncated: want {count} values")
    values = np.frombuffer(data, dtype="<f8", count=count, offset=pos)
    values = values.reshape((n,) * d).astype(np.float64)
    if not np.all(np.isfinite(values)):
        raise FieldFormatError(FieldFormatError.NON_FINITE,
                               "payload contains non-finite values")
    try:
        spec = GridSpec(d, n, h, origin)
    except ValueError as exc:
        raise FieldFormatError(FieldFormatError.BAD_SHAPE, str(exc)) from exc
    return Field(spec, values)


def write_field_csv(f: Field, path) -> None:
    """Text form for small fields: header '# d n h origin...', one value
    per line, round-trip exact (%.17g)."""
    spec = f.spec
    origin = " ".join("%.17g" % c for c in spec.origin)
    with open(path, "w") as fh:
        fh.write(f"# {spec.d} {spec.n} {'%.17g' % spec.h} {origin}\n")
        for v in f.values.ravel():
            fh.write("%.17g\n" % v)


def read_field_csv(path) -> Field:
    with open(path) as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise FieldFormatError(FieldFormatError.BAD_MAGIC,
                                   "missing '# d n h origin...' header")
        parts = header[1:].split()
        d, n = int(parts[0]), int(parts[1])
        h = float(parts[2])
        origin = tuple(float(c) for c in parts[3:3 + d])
        values = np.array([float(line) for line in fh if line.strip()])
    if d not in (1, 2, 3):
        raise FieldFormatError(FieldFormatError.BAD_DIMENSION,
                               f"unsupported dimension {d}")
    if values.size != n ** d:
        raise FieldFormatError(FieldFormatError.TRUNCATED,
                               f"want {n ** d} values, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise FieldFormatError(FieldFormatError.NON_FINITE,
                               "non-finite values")
    return Field(GridSpec(d, n, h, origin), values.reshape((n,) * d))
