"""Spectral fractional Laplacian, gradient, and the inversion constant.

(-Delta)^(alpha/2) acts as the Fourier multiplier |xi|^alpha on a
zero-padded periodic copy of the grid box (pad factor 2 by default), then
the result is cropped back.  The periodic surrogate is only accurate for
fields supported well inside the box, so inputs whose boundary band
(width n/8 cells) is not negligible are rejected rather than silently
aliased.  pad_factor = 1 is the periodic test mode (eigenfunction and
Parseval checks); it skips the support check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy.special import gamma as _gamma

from .grid import Field, GridSpec


@dataclass(frozen=True)
class SpectralBox:
    """Padded periodic box: grid geometry plus the |xi| array laid out for
    the real FFT of the padded shape."""

    d: int
    n: int
    h: float
    pad_factor: int
    padded_n: int
    xi_abs: np.ndarray


@lru_cache(maxsize=8)
def _spectral_box(d: int, n: int, h: float, pad_factor: int) -> SpectralBox:
    if pad_factor < 1:
        raise ValueError(f"pad_factor must be >= 1, got {pad_factor}")
    padded = pad_factor * n
    freqs = [2.0 * math.pi * np.fft.fftfreq(padded, d=h) for _ in range(d)]
    freqs[-1] = 2.0 * math.pi * np.fft.rfftfreq(padded, d=h)
    sq = np.zeros(tuple(len(f) for f in freqs))
    for k, f in enumerate(freqs):
        shape = [1] * d
        shape[k] = len(f)
        sq = sq + f.reshape(shape) ** 2
    xi = np.sqrt(sq)
    xi.flags.writeable = False
    return SpectralBox(d, n, h, pad_factor, padded, xi)


def spectral_box(spec: GridSpec, pad_factor: int = 2) -> SpectralBox:
    return _spectral_box(spec.d, spec.n, spec.h, pad_factor)


def _check_support(u: Field) -> None:
    band = max(1, u.spec.n // 8)
    peak = u.max
    if peak == 0.0:
        return
    mask = np.zeros(u.spec.shape, dtype=bool)
    for axis in range(u.spec.d):
        sl = [slice(None)] * u.spec.d
        sl[axis] = slice(0, band)
        mask[tuple(sl)] = True
        sl[axis] = slice(u.spec.n - band, u.spec.n)
        mask[tuple(sl)] = True
    if float(np.max(np.abs(u.values[mask]))) > 1e-12 * peak:
        raise ValueError(
            "insufficient padding: field is not negligible on the "
            f"boundary band ({band} cells)")


def _apply_multiplier(u: Field, multiplier, pad_factor: int) -> np.ndarray:
    spec = u.spec
    box = spectral_box(spec, pad_factor)
    shape = (box.padded_n,) * spec.d
    work = np.zeros(shape)
    work[(slice(0, spec.n),) * spec.d] = u.values
    coeff = sfft.rfftn(work)
    coeff *= multiplier(box.xi_abs)
    out = sfft.irfftn(coeff, s=shape)
    return out[(slice(0, spec.n),) * spec.d].copy()


def frac_laplacian(u: Field, alpha: float, pad_factor: int = 2) -> Field:
    """(-Delta)^(alpha/2) u via the multiplier |xi|^alpha (real and even,
    so real input gives real output).  alpha = 2 reproduces -Delta."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if pad_factor >= 2:
        _check_support(u)
    return u.with_values(
        _apply_multiplier(u, lambda xi: xi ** alpha, pad_factor))


def gradient(u: Field, pad_factor: int = 2) -> list[Field]:
    """Spectral partial derivatives, one field per axis."""
    if pad_factor >= 2:
        _check_support(u)
    spec = u.spec
    box = spectral_box(spec, pad_factor)
    shape = (box.padded_n,) * spec.d
    work = np.zeros(shape)
    work[(slice(0, spec.n),) * spec.d] = u.values
    coeff = sfft.rfftn(work)
    freqs = [2.0 * math.pi * np.fft.fftfreq(box.padded_n, d=spec.h)
             for _ in range(spec.d)]
    freqs[-1] = 2.0 * math.pi * np.fft.rfftfreq(box.padded_n, d=spec.h)
    out = []
    for axis in range(spec.d):
        sh = [1] * spec.d
        sh[axis] = len(freqs[axis])
        deriv = sfft.irfftn(coeff * (1j * freqs[axis].reshape(sh)), s=shape)
        out.append(u.with_values(
            deriv[(slice(0, spec.n),) * spec.d].copy()))
    return out


def gradient_magnitude(u: Field, pad_factor: int = 2) -> Field:
    comps = gradient(u, pad_factor)
    sq = np.zeros(u.spec.shape)
    for comp in comps:
        sq += comp.values ** 2
    return u.with_values(np.sqrt(sq))


def riesz_inversion_constant(d: int, alpha: float) -> float:
    """c(d, alpha) = Gamma((d-alpha)/2) / (2^alpha pi^(d/2) Gamma(alpha/2)),
    so that c * R_alpha((-Delta)^(alpha/2) u) = u for the bare kernel
    |y|^(alpha-d).  The Gaussian round-trip test is the authority for this
    convention, not the formula."""
    if not (0.0 < alpha < d):
        raise ValueError(f"alpha must lie in (0, d={d}), got {alpha}")
    return float(_gamma((d - alpha) / 2.0)
                 / (2.0 ** alpha * math.pi ** (d / 2.0) * _gamma(alpha / 2.0)))
