"""Filter distance and its community-structure upper bound.

The bound splits into three parts evaluated at a common cutoff between the
k-th and (k+1)-th frequencies of both operators:

* leakage: 2 * H_max * eta, what the tail frequencies can contribute;
* eig_term: Lipschitz constant times the bottom-k eigenvalue drift;
* vec_term: 2 * H_max times the sign-aligned bottom-k eigenvector drift.

Sign alignment tightens vec_term without breaking validity: the filter
matrix built from any eigenvector representatives is invariant under
per-column sign flips, so the inequality holds for the aligned choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GapViolationError, ValidationError
from .filters import FilterSpec, apply_filter, empirical_ratio, h_max, lipschitz, low_pass_ratio
from .spectral import EigenPair, spectral_gap_interval, spectral_norm, structural_terms

ETA_INTERVAL = "interval"
ETA_EMPIRICAL = "empirical"


@dataclass(frozen=True)
class BoundBreakdown:
    """The three bound terms, their sum, and the measured distance."""

    leakage: float
    eig_term: float
    vec_term: float
    total: float
    distance: float
    cutoff: float
    k: int
    eta_used: str
    eta: float
    gap_ok: bool


def filter_distance(h1: np.ndarray, h2: np.ndarray) -> float:
    """Worst-case output change over unit-norm inputs: ||H1 - H2||_2."""
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    if h1.shape != h2.shape or h1.ndim != 2 or h1.shape[0] != h1.shape[1]:
        raise ValidationError(f"incompatible shapes {h1.shape} vs {h2.shape}")
    return spectral_norm(h1 - h2)


def bound_cutoff(e: EigenPair, ehat: EigenPair, k: int):
    """Common cutoff for the bound: midpoint of the admissible interval.

    Falls back to the first spectrum's own gap midpoint (flagged not-ok)
    when the two spectra admit no common cutoff at order k.
    """
    try:
        lo, hi = spectral_gap_interval(e.lambdas, ehat.lambdas, k)
        return 0.5 * (lo + hi), True
    except GapViolationError:
        return 0.5 * (float(e.lambdas[k - 1]) + float(e.lambdas[k])), False


def stability_bound(
    f: FilterSpec,
    e: EigenPair,
    ehat: EigenPair,
    k: int,
    eta_mode: str = ETA_EMPIRICAL,
    n: int = None,
) -> BoundBreakdown:
    """Assemble the three-term bound and measure the actual distance."""
    if n is None:
        n = e.n
    if ehat.n != e.n:
        raise ValidationError("decompositions have different dimensions")
    if not 1 <= k <= e.n - 1:
        raise ValidationError(f"k={k} out of range [1, {e.n - 1}]")
    if eta_mode not in (ETA_INTERVAL, ETA_EMPIRICAL):
        raise ValidationError(f"unknown eta mode {eta_mode!r}")

    cutoff, gap_ok = bound_cutoff(e, ehat, k)
    if eta_mode == ETA_EMPIRICAL:
        eta = empirical_ratio(f, e.lambdas, ehat.lambdas, k, n)
    else:
        lambda_max = max(float(e.lambdas[-1]), float(ehat.lambdas[-1]), cutoff)
        eta = low_pass_ratio(f, cutoff, lambda_max, n)

    hm = h_max(f, cutoff, n)
    lip = lipschitz(f, cutoff, n)
    st = structural_terms(e, ehat, k)

    leakage = 2.0 * hm * eta
    eig_term = lip * st.eig_drift
    vec_term = 2.0 * hm * st.vec_drift
    total = leakage + eig_term + vec_term

    distance = filter_distance(apply_filter(f, e, n), apply_filter(f, ehat, n))
    return BoundBreakdown(
        leakage=leakage,
        eig_term=eig_term,
        vec_term=vec_term,
        total=total,
        distance=distance,
        cutoff=cutoff,
        k=k,
        eta_used=eta_mode,
        eta=eta,
        gap_ok=gap_ok,
    )


def polynomial_baseline_bound(coeffs, l: np.ndarray, lhat: np.ndarray) -> float:
    """Perturbation bound for polynomial filters of normalized Laplacians.

    sum_t t * 2^(t-1) * |h_t| * ||L - Lhat||_2, valid because both operator
    norms are at most 2. The t = 0 term contributes nothing.
    """
    coeffs = [float(c) for c in coeffs]
    l = np.asarray(l, dtype=float)
    lhat = np.asarray(lhat, dtype=float)
    if l.shape != lhat.shape:
        raise ValidationError(f"incompatible shapes {l.shape} vs {lhat.shape}")
    for name, mat in (("first", l), ("second", lhat)):
        if spectral_norm(mat) > 2.0 + 1e-8:
            raise ValidationError(
                f"{name} operator has norm > 2; not a normalized Laplacian"
            )
    drift = spectral_norm(l - lhat)
    return sum(t * 2.0 ** (t - 1) * abs(h) for t, h in enumerate(coeffs)) * drift
