"""Gauss rules for the Gaussian probability measure gamma_alpha on the line."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from memflow.errors import ValidationError


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    alpha: float

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def degree(self):
        """Highest polynomial degree integrated exactly."""
        return 2 * self.n_nodes - 1

    def integrate(self, values):
        return float(np.dot(self.weights, values))


def _christoffel_weights(y, n):
    """1 / sum_{k<n} h_k(y)^2, rescaling as it goes so large n cannot overflow."""
    prev, cur = np.zeros_like(y), np.ones_like(y)
    total = np.ones_like(y)
    log_scale = np.zeros_like(y)
    for k in range(n - 1):
        prev, cur = cur, (y * cur - math.sqrt(k) * prev) / math.sqrt(k + 1)
        total += cur * cur
        big = np.abs(cur) > 1e100
        if big.any():
            f = np.where(big, np.abs(cur), 1.0)
            prev, cur, total = prev / f, cur / f, total / (f * f)
            log_scale += 2.0 * np.log(f)
    return np.exp(-log_scale) / total


def gauss_quadrature(alpha, n_nodes):
    """n-point Gauss rule for d gamma_alpha via Golub-Welsch.

    The Jacobi matrix of the monic probabilists' Hermite recurrence has zero
    diagonal and off-diagonal sqrt(1..n-1); its eigenvalues are the nodes for
    the standard Gaussian. Weights come from the Christoffel function
    1 / sum_k h_k(y)^2 over the orthonormal Hermite polynomials, which stays
    accurate in the tails where squared eigenvector components underflow.
    Nodes are rescaled by 1/sqrt(alpha).
    """
    if not alpha > 0:
        raise ValidationError(f"alpha must be positive, got {alpha}")
    n = int(n_nodes)
    if n < 1:
        raise ValidationError("need at least one quadrature node")
    if n == 1:
        y, w = np.zeros(1), np.ones(1)
    else:
        off = np.sqrt(np.arange(1, n, dtype=np.float64))
        y = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
        w = _christoffel_weights(y, n)
        # enforce the exact symmetry of the rule
        y = 0.5 * (y - y[::-1])
        w = 0.5 * (w + w[::-1])
        w = w / w.sum()
    nodes = y / math.sqrt(alpha)
    nodes.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(nodes, w, float(alpha))
