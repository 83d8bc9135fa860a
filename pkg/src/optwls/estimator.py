"""Weighted Gramian systems and least-squares estimators.

The discrete inner product weights every sample by the inverse Christoffel
ratio of the current space, which makes the Gramian an unbiased estimate of
the identity. One symmetric eigendecomposition per system serves the spectral
deviation |||G - I|||, the condition number, and the (pseudo-)solve; the
conditioned estimator is gated to zero whenever the deviation exceeds 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import TensorBasis
from .multiindex import IndexSet

__all__ = [
    "GramianSystem",
    "Estimator",
    "design_matrix",
    "assemble",
    "spectral_deviation",
    "solve_wls",
    "conditioned",
    "residual_inner_products",
]

#: Relative eigenvalue cutoff below which the solve falls back to the
#: minimal-norm pseudo-inverse.
SINGULAR_RTOL = 1e-12

#: Spectral deviation gate of the conditioned estimator (non-strict).
DEVIATION_GATE = 0.5


def design_matrix(basis: TensorBasis, index_set: IndexSet, points) -> tuple[np.ndarray, np.ndarray]:
    """Basis matrix and per-sample weights for the space of `index_set`."""
    psi = basis.eval_indices(index_set.members, points)
    w = basis.weight(index_set.members, points, psi=psi)
    return psi, w


@dataclass
class GramianSystem:
    """Weighted normal equations G a = h with a spectral certificate.

    `deviation` is |||G - I||| (largest absolute eigenvalue of G - I) and
    `cond` the spectral condition number; deviation <= 1/2 implies cond <= 3.
    The eigendecomposition is computed once at assembly and reused by the
    solvers.
    """

    basis: TensorBasis
    index_set: IndexSet
    G: np.ndarray
    h: np.ndarray
    weights: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray
    m: int

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def deviation(self) -> float:
        return float(np.max(np.abs(self.eigvals - 1.0)))

    @property
    def cond(self) -> float:
        lo = float(self.eigvals.min())
        hi = float(self.eigvals.max())
        if lo <= 0.0:
            return np.inf
        return hi / lo


def assemble(basis, index_set, points, evals=None, psi=None, weights=None) -> GramianSystem:
    """Assemble the weighted Gramian and right-hand side from samples.

    G_ij = (1/m) sum_l w(x^l) psi_i(x^l) psi_j(x^l) and
    h_i  = (1/m) sum_l w(x^l) u(x^l) psi_i(x^l). Pass `evals=None` when only
    the stability certificate is needed (h is then zero).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m = points.shape[0]
    if m < 1:
        raise ValueError("at least one sample is required")
    if psi is None or weights is None:
        psi, weights = design_matrix(basis, index_set, points)
    scaled = psi * (weights / m)[:, None]
    G = psi.T @ scaled
    G = 0.5 * (G + G.T)
    if evals is None:
        h = np.zeros(G.shape[0])
    else:
        evals = np.asarray(evals, dtype=float)
        if evals.shape[0] != m:
            raise ValueError("evals must align with samples")
        h = scaled.T @ evals
    eigvals, eigvecs = np.linalg.eigh(G)
    return GramianSystem(basis, index_set, G, h, weights, eigvals, eigvecs, m)


def spectral_deviation(G: np.ndarray) -> float:
    """Largest absolute eigenvalue of G - I for symmetric G."""
    return float(np.max(np.abs(np.linalg.eigvalsh(G) - 1.0)))


@dataclass
class Estimator:
    """Coefficients over a lex-enumerated index set.

    `gate_passed` is None for the plain weighted least-squares solution and
    records the deviation gate outcome for conditioned estimators (with the
    coefficients zeroed on failure).
    """

    basis: TensorBasis
    index_set: IndexSet
    coefficients: np.ndarray
    gate_passed: bool | None = None

    def __call__(self, points, psi=None) -> np.ndarray:
        if psi is None:
            psi = self.basis.eval_indices(self.index_set.members, points)
        return psi @ self.coefficients


def solve_wls(system: GramianSystem) -> Estimator:
    """Solve G a = h; singular systems get the minimal-norm solution.

    Eigenvalues below SINGULAR_RTOL times the largest are treated as zero and
    their directions are dropped (spectral pseudo-inverse), which yields the
    unique minimal-l2-norm solution.
    """
    lam = system.eigvals
    cutoff = SINGULAR_RTOL * max(float(lam.max()), 0.0)
    inv = np.where(lam > cutoff, 1.0 / np.where(lam > cutoff, lam, 1.0), 0.0)
    a = system.eigvecs @ (inv * (system.eigvecs.T @ system.h))
    return Estimator(system.basis, system.index_set, a)


def conditioned(system: GramianSystem, estimator: Estimator) -> Estimator:
    """Gate the estimator on the stability certificate |||G - I||| <= 1/2."""
    if system.deviation <= DEVIATION_GATE:
        return Estimator(system.basis, system.index_set, estimator.coefficients, gate_passed=True)
    return Estimator(
        system.basis, system.index_set, np.zeros_like(estimator.coefficients), gate_passed=False
    )


def residual_inner_products(
    basis, points, weights, evals, estimator, candidates, psi=None, chunk=512
) -> dict:
    """Squared discrete inner products of the residual with candidate elements.

    e(nu) = |(1/m) sum_l w(x^l) (u(x^l) - est(x^l)) psi_nu(x^l)|^2 using the
    same samples and weights that produced the estimator. With an exact
    reconstruction all values vanish.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    evals = np.asarray(evals, dtype=float)
    m = points.shape[0]
    residual = evals - estimator(points, psi=psi)
    v = weights * residual / m
    candidates = list(candidates)
    out = {}
    for start in range(0, len(candidates), chunk):
        block = candidates[start : start + chunk]
        cols = basis.eval_indices(block, points)
        vals = (v @ cols) ** 2
        out.update(zip(block, vals))
    return out
