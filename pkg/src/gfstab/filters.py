"""Frequency responses, filter application, and the low-pass constants.

Three response families are supported:

* polynomial: h(x) = sum_t h_t x^t
* exponential: h(x) = exp(s * sigma' * x), s in {-1, +1}; with log
  normalization sigma' = sigma / ln(n) so the effective decay tracks the
  growth of the realized frequencies on larger graphs
* resolvent: h(x) = 1 / (1 + alpha x)

The attenuation ratio of the closed-interval definition equals 1 for any
continuous monotone response (both intervals share the cutoff point), so the
spectrum-evaluated ratio over the realized frequencies is computed as well
and is the operative quantity in the stability bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegeneracyError, ValidationError

GRID_POINTS = 10_000

POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"
RESOLVENT = "resolvent"


@dataclass(frozen=True)
class FilterSpec:
    """Tagged frequency-response description; immutable and hashable."""

    kind: str
    coefficients: Optional[tuple] = None
    sign: Optional[int] = None
    sigma: Optional[float] = None
    log_normalize: bool = False
    alpha: Optional[float] = None
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind == POLYNOMIAL:
            if not self.coefficients:
                raise ValidationError("polynomial filter needs >= 1 coefficient")
            coeffs = tuple(float(c) for c in self.coefficients)
            if not all(math.isfinite(c) for c in coeffs):
                raise ValidationError("polynomial coefficients must be finite")
            object.__setattr__(self, "coefficients", coeffs)
        elif self.kind == EXPONENTIAL:
            if self.sign not in (-1, 1):
                raise ValidationError(f"exponential sign must be -1 or +1, got {self.sign}")
            if self.sigma is None or self.sigma <= 0:
                raise ValidationError(f"exponential scale must be > 0, got {self.sigma}")
        elif self.kind == RESOLVENT:
            if self.alpha is None or self.alpha <= 0:
                raise ValidationError(f"resolvent alpha must be > 0, got {self.alpha}")
        else:
            raise ValidationError(f"unknown filter kind {self.kind!r}")

    @classmethod
    def polynomial(cls, coefficients, name=None) -> "FilterSpec":
        return cls(kind=POLYNOMIAL, coefficients=tuple(coefficients), name=name)

    @classmethod
    def exponential(cls, sign, sigma, log_normalize=False, name=None) -> "FilterSpec":
        return cls(
            kind=EXPONENTIAL,
            sign=int(sign),
            sigma=float(sigma),
            log_normalize=bool(log_normalize),
            name=name,
        )

    @classmethod
    def resolvent(cls, alpha, name=None) -> "FilterSpec":
        return cls(kind=RESOLVENT, alpha=float(alpha), name=name)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == POLYNOMIAL:
            return "poly(" + ",".join(f"{c:g}" for c in self.coefficients) + ")"
        if self.kind == EXPONENTIAL:
            s = "-" if self.sign < 0 else "+"
            suffix = "/logn" if self.log_normalize else ""
            return f"exp({s}{self.sigma:g}{suffix})"
        return f"resolvent({self.alpha:g})"

    def sigma_eff(self, n: Optional[int]) -> float:
        """Effective exponential scale, after optional log-of-n normalization."""
        if self.kind != EXPONENTIAL:
            raise ValidationError("sigma_eff only applies to exponential filters")
        if not self.log_normalize:
            return self.sigma
        if n is None or n <= 1:
            raise ValidationError(
                f"log-normalized filter needs a node count > 1, got {n}"
            )
        return self.sigma / math.log(n)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == POLYNOMIAL:
            d["coefficients"] = list(self.coefficients)
        elif self.kind == EXPONENTIAL:
            d["sign"] = self.sign
            d["sigma"] = self.sigma
            d["log_normalize"] = self.log_normalize
        else:
            d["alpha"] = self.alpha
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FilterSpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise ValidationError(f"filter record must be a dict with 'kind': {d!r}")
        kind = d["kind"]
        allowed = {
            POLYNOMIAL: {"kind", "coefficients", "name"},
            EXPONENTIAL: {"kind", "sign", "sigma", "log_normalize", "name"},
            RESOLVENT: {"kind", "alpha", "name"},
        }
        if kind not in allowed:
            raise ValidationError(f"unknown filter kind {kind!r}")
        unknown = set(d) - allowed[kind]
        if unknown:
            raise ValidationError(f"unknown filter keys {sorted(unknown)}")
        name = d.get("name")
        if kind == POLYNOMIAL:
            return cls.polynomial(d.get("coefficients", ()), name=name)
        if kind == EXPONENTIAL:
            return cls.exponential(
                d.get("sign"), d.get("sigma"),
                log_normalize=d.get("log_normalize", False), name=name,
            )
        return cls.resolvent(d.get("alpha"), name=name)


def response_eval(f: FilterSpec, lam, n: Optional[int] = None):
    """Evaluate h at one or many frequencies (vectorized over lam)."""
    lam = np.asarray(lam, dtype=float)
    if f.kind == POLYNOMIAL:
        out = np.zeros_like(lam)
        for c in reversed(f.coefficients):
            out = out * lam + c
    elif f.kind == EXPONENTIAL:
        out = np.exp(f.sign * f.sigma_eff(n) * lam)
    else:
        out = 1.0 / (1.0 + f.alpha * lam)
    return float(out) if out.ndim == 0 else out


def _response_derivative(f: FilterSpec, lam, n: Optional[int] = None):
    lam = np.asarray(lam, dtype=float)
    if f.kind == POLYNOMIAL:
        out = np.zeros_like(lam)
        for t in range(len(f.coefficients) - 1, 0, -1):
            out = out * lam + t * f.coefficients[t]
        return out
    if f.kind == EXPONENTIAL:
        s = f.sign * f.sigma_eff(n)
        return s * np.exp(s * lam)
    return -f.alpha / (1.0 + f.alpha * lam) ** 2


def apply_filter(f: FilterSpec, e, n: Optional[int] = None) -> np.ndarray:
    """Build the filter matrix V diag(h(lambda)) V^T; output is symmetric."""
    if n is None:
        n = e.n
    h = response_eval(f, e.lambdas, n)
    m = (e.V * h) @ e.V.T
    return (m + m.T) / 2.0


def _grid(lo: float, hi: float) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    return np.linspace(lo, hi, GRID_POINTS)


def low_pass_ratio(
    f: FilterSpec, cutoff: float, lambda_max: float, n: Optional[int] = None
) -> float:
    """Attenuation ratio max|h| above the cutoff over min|h| below it.

    Monotone kinds use closed-form extrema (for decaying kinds the supremum
    over [cutoff, inf) sits at the cutoff); polynomials are grid-sampled on
    [0, cutoff] and [cutoff, lambda_max]. Values >= 1 are returned as-is:
    deciding whether the filter counts as low pass is the caller's job.
    """
    if cutoff <= 0:
        raise ValidationError(f"cutoff must be > 0, got {cutoff}")
    if lambda_max < cutoff:
        raise ValidationError(
            f"lambda_max={lambda_max} must be >= cutoff={cutoff}"
        )
    if f.kind == EXPONENTIAL:
        s = f.sign * f.sigma_eff(n)
        if s < 0:
            head_min = math.exp(s * cutoff)
            tail_max = math.exp(s * cutoff)
        else:
            head_min = 1.0
            tail_max = math.exp(s * lambda_max)
    elif f.kind == RESOLVENT:
        head_min = 1.0 / (1.0 + f.alpha * cutoff)
        tail_max = head_min
    else:
        head_min = float(np.min(np.abs(response_eval(f, _grid(0.0, cutoff), n))))
        tail_max = float(np.max(np.abs(response_eval(f, _grid(cutoff, lambda_max), n))))
    if head_min == 0.0:
        raise DegeneracyError("response vanishes below the cutoff; ratio undefined")
    return tail_max / head_min


def empirical_ratio(
    f: FilterSpec,
    lambdas: np.ndarray,
    lambdas_hat: np.ndarray,
    k: int,
    n: Optional[int] = None,
) -> float:
    """Spectrum-evaluated attenuation ratio at order k.

    max|h| over the tail frequencies (indices > k) of both spectra divided
    by min|h| over the head frequencies (indices <= k) of both.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    lambdas_hat = np.asarray(lambdas_hat, dtype=float)
    m = lambdas.shape[0]
    if lambdas_hat.shape[0] != m:
        raise ValidationError("spectra have different lengths")
    if not 1 <= k < m:
        raise ValidationError(f"k={k} out of range [1, {m - 1}]")
    heads = np.concatenate([lambdas[:k], lambdas_hat[:k]])
    tails = np.concatenate([lambdas[k:], lambdas_hat[k:]])
    head_min = float(np.min(np.abs(response_eval(f, heads, n))))
    tail_max = float(np.max(np.abs(response_eval(f, tails, n))))
    if head_min == 0.0:
        raise DegeneracyError("response vanishes on the head frequencies")
    return tail_max / head_min


def h_max(f: FilterSpec, cutoff: float, n: Optional[int] = None) -> float:
    """sup of |h| on [0, cutoff]."""
    if cutoff < 0:
        raise ValidationError(f"cutoff must be >= 0, got {cutoff}")
    if f.kind == EXPONENTIAL:
        s = f.sign * f.sigma_eff(n)
        return 1.0 if s < 0 else math.exp(s * cutoff)
    if f.kind == RESOLVENT:
        return 1.0
    return float(np.max(np.abs(response_eval(f, _grid(0.0, cutoff), n))))


def lipschitz(f: FilterSpec, cutoff: float, n: Optional[int] = None) -> float:
    """sup of |h'| on [0, cutoff]."""
    if cutoff < 0:
        raise ValidationError(f"cutoff must be >= 0, got {cutoff}")
    if f.kind == EXPONENTIAL:
        s = f.sigma_eff(n)
        return s * math.exp(s * cutoff) if f.sign > 0 else s
    if f.kind == RESOLVENT:
        return f.alpha
    return float(np.max(np.abs(_response_derivative(f, _grid(0.0, cutoff), n))))
