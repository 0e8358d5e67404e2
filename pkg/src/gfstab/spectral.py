"""Symmetric eigendecomposition and structural comparison of two spectra.

The bottom-k comparison terms (eigenvalue drift, aligned eigenvector drift,
projector drift) quantify how much the slow subspaces of two shift operators
differ. Eigenvector sign ambiguity is resolved greedily per column; the
projector drift is reported alongside as the basis-free alternative, which
is the robust choice when eigenvalues inside the bottom-k are degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GapViolationError, NumericError, ValidationError

_SIGN_TIE_TOL = 1e-12


@dataclass(frozen=True)
class EigenPair:
    """Ascending eigenvalues with the matching orthonormal eigenvector columns."""

    lambdas: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        lambdas = np.asarray(self.lambdas, dtype=float)
        V = np.asarray(self.V, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1]:
            raise ValidationError(f"V must be square, got {V.shape}")
        if lambdas.shape != (V.shape[0],):
            raise ValidationError("eigenvalue count does not match V dimension")
        if np.any(np.diff(lambdas) < 0):
            raise ValidationError("eigenvalues must be ascending")
        lambdas = lambdas.copy()
        lambdas.flags.writeable = False
        V = V.copy()
        V.flags.writeable = False
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "V", V)

    @property
    def n(self) -> int:
        return self.V.shape[0]


@dataclass(frozen=True)
class StructuralTerms:
    """Bottom-k drift terms between two decompositions."""

    eig_drift: float
    vec_drift: float
    proj_drift: float
    k: int


def _require_symmetric(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {s.shape}")
    scale = max(1.0, float(np.max(np.abs(s))) if s.size else 1.0)
    if float(np.max(np.abs(s - s.T))) > 1e-10 * scale:
        raise ValidationError("matrix is not symmetric")
    return s


def eigh(s: np.ndarray) -> EigenPair:
    """Full decomposition of a symmetric matrix, eigenvalues ascending."""
    s = _require_symmetric(s)
    try:
        lambdas, V = np.linalg.eigh(s)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    if not np.all(np.isfinite(lambdas)):
        raise NumericError("eigendecomposition produced non-finite eigenvalues")
    return EigenPair(lambdas=lambdas, V=V)


def canonical_signs(e: EigenPair) -> EigenPair:
    """Flip each eigenvector so its largest-magnitude entry is positive.

    Entries within 1e-12 of the maximum magnitude tie; the smallest index
    wins, which makes the convention deterministic.
    """
    V = e.V.copy()
    mags = np.abs(V)
    for j in range(V.shape[1]):
        ref = int(np.argmax(mags[:, j] >= mags[:, j].max() - _SIGN_TIE_TOL))
        if V[ref, j] < 0:
            V[:, j] = -V[:, j]
    return EigenPair(lambdas=e.lambdas, V=V)


def align_signs(v_k: np.ndarray, vhat_k: np.ndarray) -> np.ndarray:
    """Flip columns of vhat_k to best match v_k.

    Column i is multiplied by sign(v_i . vhat_i), with zero dot products
    mapped to +1. This minimizes the Frobenius distance over per-column sign
    choices, since the columns decouple in the Frobenius objective.
    """
    v_k = np.asarray(v_k, dtype=float)
    vhat_k = np.asarray(vhat_k, dtype=float)
    if v_k.shape != vhat_k.shape:
        raise ValidationError(
            f"shape mismatch: {v_k.shape} vs {vhat_k.shape}"
        )
    dots = np.sum(v_k * vhat_k, axis=0)
    signs = np.where(dots < 0, -1.0, 1.0)
    return vhat_k * signs


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value; exact eigenvalue path for symmetric input."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValidationError(f"expected a matrix, got ndim={m.ndim}")
    if m.size == 0:
        return 0.0
    if m.shape[0] == m.shape[1] and np.array_equal(m, m.T):
        return float(np.max(np.abs(np.linalg.eigvalsh(m))))
    return float(np.linalg.norm(m, 2))


def structural_terms(e: EigenPair, ehat: EigenPair, k: int) -> StructuralTerms:
    """Bottom-k eigenvalue / eigenvector / projector drift between e and ehat."""
    n = e.n
    if ehat.n != n:
        raise ValidationError("decompositions have different dimensions")
    if not 1 <= k <= n:
        raise ValidationError(f"k={k} out of range [1, {n}]")
    eig_drift = float(np.max(np.abs(e.lambdas[:k] - ehat.lambdas[:k])))
    v_k = e.V[:, :k]
    vhat_k = align_signs(v_k, ehat.V[:, :k])
    vec_drift = spectral_norm(v_k - vhat_k)
    # ||P - Phat||_2 = sin of the largest principal angle between the spans;
    # the sines are the singular values of (I - P) Vhat_k, computed directly
    # to keep full precision for near-identical subspaces
    residual = ehat.V[:, :k] - v_k @ (v_k.T @ ehat.V[:, :k])
    sines = np.linalg.svd(residual, compute_uv=False)
    proj_drift = float(min(1.0, sines.max()))
    return StructuralTerms(
        eig_drift=eig_drift, vec_drift=vec_drift, proj_drift=proj_drift, k=k
    )


def spectral_gap_interval(
    lambdas: np.ndarray, lambdas_hat: np.ndarray, k: int
) -> tuple:
    """Admissible common-cutoff range [max of k-th, min of (k+1)-th] eigenvalues.

    k counts from 1. Raises GapViolationError when the interval is empty.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    lambdas_hat = np.asarray(lambdas_hat, dtype=float)
    n = lambdas.shape[0]
    if lambdas_hat.shape[0] != n:
        raise ValidationError("spectra have different lengths")
    if not 1 <= k <= n - 1:
        raise ValidationError(f"k={k} out of range [1, {n - 1}]")
    lo = max(float(lambdas[k - 1]), float(lambdas_hat[k - 1]))
    hi = min(float(lambdas[k]), float(lambdas_hat[k]))
    if lo > hi:
        raise GapViolationError(
            f"no common cutoff at order k={k}: [{lo:.6g}, {hi:.6g}] is empty"
        )
    return (lo, hi)
