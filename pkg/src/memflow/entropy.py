"""Entropy, Fisher information and the inequalities between them under gamma_alpha.

Functions take either a plain callable or a :class:`~memflow.spectral.Snapshot`;
snapshots are differentiated analytically, callables by central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from memflow import volterra
from memflow.errors import PositivityError, ValidationError
from memflow.quadrature import QuadratureRule, gauss_quadrature
from memflow.spectral import Snapshot

FLOOR = 1e-12
FD_STEP = 1e-5
# absolute allowance for rounding in a near-zero entropy, per unit of mass
ROUNDOFF = 1e-14


def _values(f, rule):
    v = np.asarray(f(rule.nodes), dtype=np.float64) * np.ones(rule.n_nodes)
    return v


def _derivative(g, rule):
    if isinstance(g, Snapshot):
        return g.derivative(rule.nodes)
    x = rule.nodes
    return (np.asarray(g(x + FD_STEP)) - np.asarray(g(x - FD_STEP))) / (2 * FD_STEP)


def _positive_values(f, rule, what="entropy"):
    v = _values(f, rule)
    bad = np.flatnonzero(v < -FLOOR)
    if bad.size:
        i = bad[np.argmin(v[bad])]
        raise PositivityError(
            f"positivity violated at x={rule.nodes[i]:.6g} (value {v[i]:.3e}) in {what}",
            x=float(rule.nodes[i]), value=float(v[i]),
        )
    return np.where(v <= FLOOR, 0.0, v)


def xlogx(v):
    out = np.zeros_like(v)
    pos = v > 0
    out[pos] = v[pos] * np.log(v[pos])
    return out


def entropy_functional(f, rule):
    """Ent(f) = int f ln f - (int f) ln(int f), with 0 ln 0 = 0."""
    v = _positive_values(f, rule)
    m = rule.integrate(v)
    mlogm = m * math.log(m) if m > 0 else 0.0
    return rule.integrate(xlogx(v)) - mlogm


def fisher_information(g, rule):
    """int (g')^2 / g d gamma_alpha for g > 0."""
    v = _positive_values(g, rule, "Fisher information")
    if np.any(v == 0):
        raise PositivityError("Fisher information needs g > 0 at every node")
    d = _derivative(g, rule)
    return rule.integrate(d * d / v)


def dirichlet_energy(f, rule):
    d = _derivative(f, rule)
    return rule.integrate(d * d)


def lsi_check(f, rule):
    """(2/alpha) int (f')^2 - Ent(f^2); nonnegative by the log-Sobolev inequality."""
    if isinstance(f, Snapshot):
        sq = lambda x: f(x) ** 2  # noqa: E731
    else:
        sq = lambda x: np.asarray(f(x)) ** 2  # noqa: E731
    return (2.0 / rule.alpha) * dirichlet_energy(f, rule) - entropy_functional(sq, rule)


def entropy_fisher_check(g, rule):
    """Fisher(g)/(2 alpha) - Ent(g); nonnegative, zero for exponentials."""
    return fisher_information(g, rule) / (2.0 * rule.alpha) - entropy_functional(g, rule)


def positive_rule(snapshots, alpha, max_nodes=64, min_nodes=3):
    """Largest Gauss rule with at most ``max_nodes`` nodes on which every snapshot is positive.

    Truncated data such as 1 + c h_1 are negative far in the tails; a rule
    whose outer nodes reach that region cannot evaluate x ln x. Raises
    :class:`PositivityError` if even ``min_nodes`` fails.
    """
    last_error = None
    for n in range(max_nodes, min_nodes - 1, -1):
        rule = gauss_quadrature(alpha, n)
        try:
            for snap in snapshots:
                _positive_values(snap, rule)
        except PositivityError as exc:
            last_error = exc
            continue
        return rule
    raise last_error


@dataclass(frozen=True)
class EntropyReport:
    times: tuple
    entropy: tuple
    envelope: tuple
    memoryless: tuple
    margins: tuple
    tolerance: float
    initial_entropy: float
    mu: float

    @property
    def passed(self):
        return all(m >= -self.tolerance for m in self.margins)

    @property
    def worst_margin(self):
        return min(self.margins)

    def rows(self):
        return zip(self.times, self.entropy, self.envelope, self.memoryless, self.margins)


def scheme_error(grid, mu, backend=None):
    """Max error of the relaxation scheme against the exponential closed form on ``grid``."""
    from memflow.kernels import exponential

    s = volterra.solve_relaxation(exponential(1.0), mu, grid, backend)
    return float(np.max(np.abs(s.values - volterra.closed_form_exponential(1.0, mu, grid.times))))


def verify_decay(state, kernel, rule, times, mu=None, solver_budget=None,
                 rel_tol=1e-6, backend=None):
    """Check Ent(u(t)) <= s_mu(t) Ent(u_0) at the sampled ``times``.

    ``mu`` defaults to 2 alpha (the sharp rate). The tolerance is
    ``(rel_tol + solver_budget) * Ent(u_0) + ROUNDOFF * mass``;
    ``solver_budget`` defaults to the measured :func:`scheme_error` at the
    state's grid. The mass term only matters for states at equilibrium, whose
    entropy is pure rounding.
    """
    if state.kernel is not None and state.kernel != kernel:
        raise ValidationError("state was evolved with a different kernel")
    alpha = state.basis.alpha
    if not math.isclose(rule.alpha, alpha, rel_tol=1e-14):
        raise ValidationError("quadrature rule and basis use different alpha")
    mu = 2.0 * alpha if mu is None else float(mu)
    grid = state.grid
    idx = [grid.index(t) for t in times]
    s = volterra.solve_relaxation(kernel, mu, grid, backend).values
    e0 = entropy_functional(state.snapshot(0), rule)
    ents = [entropy_functional(state.snapshot(i), rule) for i in idx]
    env = [float(s[i]) * e0 for i in idx]
    mem = [math.exp(-2.0 * alpha * grid.times[i]) * e0 for i in idx]
    if solver_budget is None:
        solver_budget = scheme_error(grid, 2.0 * alpha, backend)
    return EntropyReport(
        times=tuple(float(grid.times[i]) for i in idx),
        entropy=tuple(ents),
        envelope=tuple(env),
        memoryless=tuple(mem),
        margins=tuple(a - b for a, b in zip(env, ents)),
        tolerance=(rel_tol + solver_budget) * e0 + ROUNDOFF * abs(float(state.coeffs[0, 0])),
        initial_entropy=e0,
        mu=mu,
    )
