"""Scalar Volterra solvers: the relaxation function and the resolvent kernel.

The relaxation function s_mu solves

    s' + (k * s')(t) + mu s = 0,   s(0) = 1,

and the resolvent kernel b solves b + k * b = 1. Both are computed on a
uniform grid by O(N^2) recursions (compiled when the extension is built).
They are tied together by s_mu + mu (b * s_mu) = 1 and by the Laplace
identity b^(lam) = 1 / (lam (1 + k^(lam))).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from memflow import _backend
from memflow import kernels as _k
from memflow.errors import DomainError, ValidationError


@dataclass(frozen=True)
class TimeGrid:
    t_end: float
    dt: float

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ValidationError(f"t_end must be positive, got {self.t_end}")
        n = round(self.t_end / self.dt)
        if n < 1 or abs(n * self.dt - self.t_end) > 1e-9 * self.t_end:
            raise ValidationError(
                f"t_end={self.t_end} is not an integer multiple of dt={self.dt}"
            )

    @classmethod
    def from_steps(cls, t_end, n_steps):
        return cls(float(t_end), float(t_end) / int(n_steps))

    @property
    def n_steps(self):
        return round(self.t_end / self.dt)

    @property
    def times(self):
        return np.arange(self.n_steps + 1) * self.dt

    def index(self, t):
        """Grid index of time ``t``, which must be a node."""
        i = round(t / self.dt)
        if not 0 <= i <= self.n_steps or abs(i * self.dt - t) > 1e-9 * max(1.0, t):
            raise DomainError(f"t={t} is not a node of the grid")
        return i

    def refined(self, factor=2):
        return TimeGrid(self.t_end, self.dt / factor)


@dataclass(frozen=True, eq=False)
class RelaxationCurve:
    grid: TimeGrid
    mu: float
    values: np.ndarray
    kernel: _k.KernelSpec

    @property
    def times(self):
        return self.grid.times

    def at(self, t):
        return float(self.values[self.grid.index(t)])


@dataclass(frozen=True, eq=False)
class ResolventCurve:
    grid: TimeGrid
    values: np.ndarray
    kernel: _k.KernelSpec

    @property
    def times(self):
        return self.grid.times

    def at(self, t):
        return float(self.values[self.grid.index(t)])


def _warn_if_inadmissible(kernel):
    report = _k.audit_admissibility(kernel)
    if not report.passed:
        warnings.warn(f"kernel {kernel.describe()} is not admissible: {report.summary()}",
                      stacklevel=3)


def solve_relaxation(kernel, mu, grid, backend=None):
    """Relaxation function s_mu on ``grid``.

    Forward difference for s' and composite trapezoid for the memory term,
    with s'(0) = -mu inserted at the left endpoint:

        s[n+1] = 2dt/(2 + k0 dt) * ( s[n] (1/dt - mu + k0/2)
                                     + dt mu k(t_n)/2
                                     - sum_{j=1}^{n-1} k(t_n - t_j)(s[j+1] - s[j]) )

    ``mu = 0`` returns s = 1 exactly.
    """
    mu = float(mu)
    if not (mu >= 0 and math.isfinite(mu)):
        raise ValidationError(f"mu must be nonnegative, got {mu}")
    _warn_if_inadmissible(kernel)
    if mu == 0.0:
        values = np.ones(grid.n_steps + 1)
    else:
        kv = np.ascontiguousarray(_k.eval_kernel(kernel, grid.times))
        values = np.asarray(_backend.get(backend).relaxation_recursion(kv, mu, grid.dt))
    values.setflags(write=False)
    return RelaxationCurve(grid, mu, values, kernel)


def exponential_rates(nu, mu):
    """(lam_plus, lam_minus, c_plus, c_minus) for k = nu exp(-t)."""
    if not nu > 0:
        raise ValidationError(f"nu must be positive, got {nu}")
    if not mu > 0:
        raise ValidationError(f"mu must be positive, got {mu}")
    a = mu - 1.0 + nu
    root = math.sqrt(a * a + 4.0 * nu)
    # pick the non-cancelling root, recover the other from lp * lm = -nu
    if a >= 0:
        lm = -0.5 * (a + root)
        lp = -nu / lm
    else:
        lp = 0.5 * (root - a)
        lm = -nu / lp
    cp = -(lm + mu - 1.0) / (lp - lm)
    cm = (lp + mu - 1.0) / (lp - lm)
    return lp, lm, cp, cm


def closed_form_exponential(nu, mu, t):
    """s_mu(t) for k = nu exp(-t): c+ exp((lam+ - 1)t) + c- exp((lam- - 1)t)."""
    lp, lm, cp, cm = exponential_rates(float(nu), float(mu))
    t = np.asarray(t, dtype=np.float64)
    out = cp * np.exp((lp - 1.0) * t) + cm * np.exp((lm - 1.0) * t)
    return float(out) if out.ndim == 0 else out


def solve_resolvent(kernel, grid, backend=None):
    """Resolvent kernel b with b + k*b = 1 by trapezoidal product quadrature."""
    _warn_if_inadmissible(kernel)
    kv = np.ascontiguousarray(_k.eval_kernel(kernel, grid.times))
    values = np.asarray(_backend.get(backend).resolvent_recursion(kv, grid.dt))
    values.setflags(write=False)
    return ResolventCurve(grid, values, kernel)


def convolve(grid, f, g, backend=None):
    """Trapezoid approximation of (f*g)(t_n) = int_0^t_n f(t_n - s) g(s) ds."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    g = np.ascontiguousarray(g, dtype=np.float64)
    n = grid.n_steps + 1
    if f.shape != (n,) or g.shape != (n,):
        raise ValidationError(
            f"sequences must have {n} samples, got {f.shape} and {g.shape}"
        )
    return np.asarray(_backend.get(backend).trapezoid_convolution(f, g, grid.dt))


def verify_duhamel(s, b):
    """max_n |s_n + mu (b*s)_n - 1|."""
    if s.grid != b.grid:
        raise ValidationError("relaxation and resolvent curves live on different grids")
    if s.kernel != b.kernel:
        raise ValidationError("relaxation and resolvent curves use different kernels")
    if s.mu == 0.0:
        return float(np.max(np.abs(s.values - 1.0)))
    bs = convolve(s.grid, b.values, s.values)
    return float(np.max(np.abs(s.values + s.mu * bs - 1.0)))


@dataclass(frozen=True)
class LaplaceCheck:
    lambdas: tuple
    b_hat: tuple
    expected: tuple
    residual: float
    relative_residual: float
    min_real_part: float


def resolvent_laplace(b, lam):
    """b^(lam) from the sampled curve plus a constant tail b_inf/lam exp(-lam T)."""
    lam = complex(lam)
    t = b.grid.times
    integrand = np.exp(-lam * t) * b.values
    body = np.trapezoid(integrand, dx=b.grid.dt)
    b_inf = 1.0 / (1.0 + _k.l1_norm(b.kernel))
    return complex(body + b_inf / lam * np.exp(-lam * b.grid.t_end))


def verify_laplace_identity(kernel, b, lambdas, min_real=0.5):
    """Compare b^(lam) with 1/(lam (1 + k^(lam))) on each lambda.

    ``residual`` is the absolute gap, ``relative_residual`` the max of
    |b^ lam (1 + k^) - 1|; ``min_real_part`` is the smallest Re b^.
    """
    if b.kernel != kernel:
        raise ValidationError("resolvent curve was computed for a different kernel")
    lambdas = tuple(complex(l) for l in lambdas)
    if not lambdas:
        raise ValidationError("need at least one lambda")
    for lam in lambdas:
        if lam.real < min_real:
            raise DomainError(
                f"Re(lambda)={lam.real} < {min_real}: truncation tail not controlled"
            )
    bh, ex, rel = [], [], []
    for lam in lambdas:
        khat = _k.laplace_transform(kernel, lam)
        bhat = resolvent_laplace(b, lam)
        bh.append(bhat)
        ex.append(1.0 / (lam * (1.0 + khat)))
        rel.append(abs(bhat * lam * (1.0 + khat) - 1.0))
    return LaplaceCheck(
        lambdas=lambdas,
        b_hat=tuple(bh),
        expected=tuple(ex),
        residual=max(abs(x - y) for x, y in zip(bh, ex)),
        relative_residual=max(rel),
        min_real_part=min(x.real for x in bh),
    )


@dataclass(frozen=True)
class OrderEstimate:
    dts: tuple
    errors: tuple
    orders: tuple
    reference: str

    @property
    def order(self):
        return self.orders[-1]


def _reference(kernel, mu):
    if kernel.family == "zero":
        return "exact", lambda t: np.exp(-mu * t)
    if kernel.family == "exponential" or (kernel.family == "stretched" and kernel.beta == 1.0):
        return "closed-form", lambda t: closed_form_exponential(kernel.nu, mu, t)
    return "richardson", None


def empirical_order(kernel, mu, t_end, dt=1e-2, levels=3, backend=None):
    """Observed convergence order of :func:`solve_relaxation` under halving dt.

    With a known reference (zero or exponential kernel) the max errors at
    dt, dt/2, dt/4 are compared; otherwise successive differences on the
    coarse nodes are (Richardson self-convergence).
    """
    label, exact = _reference(kernel, mu)
    grid = TimeGrid(t_end, dt)
    curves = [solve_relaxation(kernel, mu, grid.refined(2 ** i), backend)
              for i in range(levels)]
    dts = tuple(c.grid.dt for c in curves)
    if exact is not None:
        errs = tuple(float(np.max(np.abs(c.values - exact(c.times)))) for c in curves)
    else:
        # restrict every level to the coarse nodes
        coarse = [c.values[:: 2 ** i] for i, c in enumerate(curves)]
        errs = tuple(float(np.max(np.abs(coarse[i + 1] - coarse[i])))
                     for i in range(len(coarse) - 1))
    orders = tuple(math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1))
    return OrderEstimate(dts, errs, orders, label)


@dataclass(frozen=True)
class TailFit:
    """Least-squares fits of log s over the late part of a curve.

    ``algebraic_slope`` p fits s ~ C t^p; ``exponential_rate`` r fits
    s ~ C e^{r t}. Both are reported side by side; neither law is asserted.
    """

    t_start: float
    t_end: float
    algebraic_slope: float
    exponential_rate: float
    algebraic_rms: float
    exponential_rms: float

    def summary(self):
        return (f"tail on [{self.t_start:g}, {self.t_end:g}]: "
                f"s ~ t^{self.algebraic_slope:.4g} (rms {self.algebraic_rms:.2e}), "
                f"s ~ e^({self.exponential_rate:.4g} t) (rms {self.exponential_rms:.2e})")


def tail_slopes(curve, start_fraction=0.5):
    """Fit algebraic and exponential decay laws to ``curve`` on [f T, T]."""
    t, s = curve.times, np.asarray(curve.values)
    keep = (t >= start_fraction * t[-1]) & (t > 0) & (s > 0)
    if np.count_nonzero(keep) < 3:
        raise DomainError("need at least three positive samples in the tail window")
    tt, ls = t[keep], np.log(s[keep])
    fits = []
    for x in (np.log(tt), tt):
        coef, res, *_ = np.polyfit(x, ls, 1, full=True)
        rms = math.sqrt(float(res[0]) / tt.size) if res.size else 0.0
        fits.append((float(coef[0]), rms))
    return TailFit(float(tt[0]), float(tt[-1]), fits[0][0], fits[1][0], fits[0][1], fits[1][1])
