"""Tensor-product orthonormal basis over a product reference measure.

Each basis element is indexed by a multi-index nu and factorizes across
coordinates as a product of univariate orthonormal polynomials. Evaluation
shares one recurrence pass per coordinate across all requested indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import orthopoly
from .orthopoly import UnivariateFamily


class DegenerateWeightError(ValueError):
    """Raised when the Christoffel denominator underflows at a sample point."""


@dataclass(frozen=True)
class TensorBasis:
    """Product basis with one polynomial family per coordinate.

    Parameters
    ----------
    family : UnivariateFamily or sequence of UnivariateFamily
        A single family is broadcast to all coordinates.
    dim : int
        Number of coordinates d >= 1.
    """

    families: tuple
    dim: int

    def __init__(self, family, dim: int):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if isinstance(family, UnivariateFamily):
            families = (family,) * dim
        else:
            families = tuple(family)
            if len(families) != dim:
                raise ValueError("one family per coordinate required")
        object.__setattr__(self, "families", families)
        object.__setattr__(self, "dim", dim)

    def eval_index(self, nu, points: np.ndarray) -> np.ndarray:
        """Evaluate one basis element at points of shape (m, d)."""
        x = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.ones(x.shape[0])
        for i, deg in enumerate(nu):
            if deg > 0:
                out *= orthopoly.eval_orthonormal(self.families[i], int(deg), x[:, i])
        return out

    def eval_indices(self, indices, points: np.ndarray) -> np.ndarray:
        """Basis matrix Psi with Psi[l, j] = psi_{nu^j}(x^l).

        Parameters
        ----------
        indices : sequence of multi-indices (defines the column order)
        points : ndarray of shape (m, d)
        """
        x = np.atleast_2d(np.asarray(points, dtype=float))
        indices = list(indices)
        m = x.shape[0]
        n = len(indices)
        if n == 0:
            return np.empty((m, 0))
        cols = np.array(indices, dtype=np.int64)
        out = np.ones((m, n))
        for i in range(self.dim):
            maxdeg = int(cols[:, i].max())
            if maxdeg == 0:
                continue
            table = orthopoly.eval_all_orthonormal(self.families[i], maxdeg, x[:, i])
            out *= table[:, cols[:, i]]
        return out

    def weight(self, indices, points: np.ndarray, psi: np.ndarray | None = None) -> np.ndarray:
        """Inverse Christoffel weight w(x) = n / sum_nu psi_nu(x)^2.

        Strictly positive whenever some basis element is nonzero at x, which
        is automatic when the constant index is present. A denominator below
        1e-300 signals a violated assumption and raises.
        """
        if psi is None:
            psi = self.eval_indices(indices, points)
        denom = np.einsum("ij,ij->i", psi, psi)
        if np.any(denom < 1e-300):
            raise DegenerateWeightError("all basis elements vanish at a sample point")
        return psi.shape[1] / denom
