"""Scalar exponent bookkeeping.

Validates the standing hypotheses on (d, alpha, r, p), computes the derived
exponents (r', p0, p1, gamma, q) used downstream, and records non-fatal
regime warnings instead of silently "fixing" borderline inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ParamError(ValueError):
    """Raised when an exponent bundle violates a hard constraint."""


# Warning codes attached to ExponentParams.warnings.
WARN_P_GT_D = "p > d"
WARN_PALPHA_GE_D = "p*alpha >= d"


@dataclass(frozen=True)
class ExponentParams:
    """Validated exponent bundle.

    Hard invariants (enforced at construction via validate_params):
      0 < alpha < d,  alpha <= r,  1 < r < p,  gamma > 0,
      (1+gamma)*r <= p,  1 + gamma*r_conj <= p,  r >= 1 + gamma,
      1 < q <= p,  r < p1 < p0 < p.

    `warnings` collects soft regime flags (p > d, p*alpha >= d); they are
    surfaced in reports, never raised.
    """

    d: int
    alpha: float
    r: float
    p: float
    gamma: float
    q: float
    r_conj: float
    p0: float
    p1: float
    warnings: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "alpha": self.alpha,
            "r": self.r,
            "p": self.p,
            "gamma": self.gamma,
            "q": self.q,
            "r_conj": self.r_conj,
            "p0": self.p0,
            "p1": self.p1,
            "warnings": list(self.warnings),
        }


def choose_gamma(r: float, p: float) -> float:
    """Largest gamma > 0 with (1+gamma)r <= p, 1+gamma*r' <= p and r >= 1+gamma.

    The three constraints are linear in gamma, so the maximum is
    min((p-r)/r, (p-1)/r', r-1); it is positive whenever 1 < r < p.
    Returning the maximum (rather than any feasible value) keeps runs
    deterministic and maximises exponent separation in the checks.
    """
    if not (1.0 < r < p):
        raise ParamError(f"choose_gamma requires 1 < r < p, got r={r}, p={p}")
    r_conj = r / (r - 1.0)
    return min((p - r) / r, (p - 1.0) / r_conj, r - 1.0)


def validate_params(
    d: int,
    alpha: float,
    r: float,
    p: float,
    q: float | None = None,
) -> ExponentParams:
    """Validate the hypotheses and fill in derived exponents.

    Raises ParamError on: alpha <= 0, alpha >= d, alpha > r, r <= 1, p <= r,
    non-finite inputs, d outside {1,2,3}.  p > d and p*alpha >= d are
    demoted to warnings (see the warnings field) so the harness stays
    runnable in d = 1 where 1 < r < p <= d is unsatisfiable.

    q defaults to (1+gamma)*r, the largest exponent at which the pointwise
    potential bound gets applied downstream; any explicit q must satisfy
    1 < q <= p.
    """
    for name, val in (("alpha", alpha), ("r", r), ("p", p)):
        if not math.isfinite(val):
            raise ParamError(f"{name} must be finite, got {val}")
    if d not in (1, 2, 3):
        raise ParamError(f"dimension d must be 1, 2 or 3, got {d}")
    if alpha <= 0:
        raise ParamError(f"alpha must be positive, got {alpha}")
    if alpha >= d:
        raise ParamError(f"alpha must be < d = {d}, got {alpha}")
    if r <= 1:
        raise ParamError(f"r must be > 1, got {r}")
    if p <= r:
        raise ParamError(f"p must be > r = {r}, got {p}")
    if alpha > r:
        raise ParamError(f"alpha must be <= r, got alpha={alpha}, r={r}")

    warnings = []
    if p > d:
        warnings.append(WARN_P_GT_D)
    if p * alpha >= d:
        warnings.append(WARN_PALPHA_GE_D)

    r_conj = r / (r - 1.0)
    gamma = choose_gamma(r, p)
    p0 = (r + p) / 2.0
    p1 = (r + p0) / 2.0

    if q is None:
        # Clip guards the fp case where the binding constraint makes
        # (1+gamma)*r land an ulp above p.
        q = min((1.0 + gamma) * r, p)
    if not math.isfinite(q) or not (1.0 < q <= p + 1e-12):
        raise ParamError(f"q must satisfy 1 < q <= p, got q={q}, p={p}")
    q = min(q, p)

    return ExponentParams(
        d=d, alpha=alpha, r=r, p=p, gamma=gamma, q=q,
        r_conj=r_conj, p0=p0, p1=p1, warnings=tuple(warnings),
    )
