"""Memory kernels k(t): nonnegative, non-increasing, integrable on (0, inf).

Built-in families::

    zero                      k = 0
    exponential(nu)           k = nu * exp(-t)
    stretched(nu, beta)       k = nu * exp(-t**beta)
    powerlaw(nu, beta)        k = nu * (1 + t)**(-beta - 1)
    tabulated(t, k, tail)     piecewise linear, with a declared tail

All functions accept scalar or array ``t`` and return the same shape.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate

from memflow.errors import (
    DomainError,
    SingularityError,
    UnsupportedError,
    ValidationError,
)

FAMILIES = ("zero", "exponential", "stretched", "powerlaw", "tabulated")


@dataclass(frozen=True)
class Tail:
    """Extension of a tabulated kernel past its last sample.

    ``kind="exp"``: k(t) = k_last * exp(-rate * (t - t_last)).
    ``kind="alg"``: k(t) = k_last * (t / t_last)**(-rate), rate > 1.
    """

    kind: str
    rate: float

    def __post_init__(self):
        if self.kind not in ("exp", "alg"):
            raise ValidationError(f"unknown tail kind {self.kind!r}")
        if not self.rate > 0:
            raise ValidationError("tail rate must be positive")
        if self.kind == "alg" and not self.rate > 1:
            raise ValidationError("algebraic tail needs exponent > 1 to be integrable")


@dataclass(frozen=True, eq=False)
class KernelSpec:
    family: str
    nu: float = 0.0
    beta: float = 1.0
    t_samples: tuple = field(default=(), repr=False)
    k_samples: tuple = field(default=(), repr=False)
    tail: Tail | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown kernel family {self.family!r}")
        if self.family in ("exponential", "stretched", "powerlaw"):
            if not (math.isfinite(self.nu) and self.nu > 0):
                raise ValidationError(f"nu must be positive, got {self.nu}")
            if not (math.isfinite(self.beta) and self.beta > 0):
                raise ValidationError(f"beta must be positive, got {self.beta}")
        if self.family == "tabulated":
            t, k = self.t_samples, self.k_samples
            if len(t) != len(k) or len(t) < 2:
                raise ValidationError("tabulated kernel needs >= 2 matching (t, k) samples")
            if t[0] != 0.0:
                raise ValidationError("tabulated kernel must start at t = 0")
            if any(b <= a for a, b in zip(t, t[1:])):
                raise ValidationError("tabulated times must be strictly increasing")

    def _key(self):
        return (self.family, self.nu, self.beta, self.t_samples, self.k_samples, self.tail)

    def __eq__(self, other):
        return isinstance(other, KernelSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __call__(self, t):
        return eval_kernel(self, t)

    def describe(self):
        if self.family == "zero":
            return "zero"
        if self.family == "exponential":
            return f"exponential nu={self.nu:g}"
        if self.family == "tabulated":
            tail = f" tail={self.tail.kind}:{self.tail.rate:g}" if self.tail else ""
            return f"tabulated n={len(self.t_samples)}{tail}"
        return f"{self.family} nu={self.nu:g} beta={self.beta:g}"


def zero():
    return KernelSpec("zero")


def exponential(nu=1.0):
    return KernelSpec("exponential", nu=float(nu), beta=1.0)


def stretched(nu=1.0, beta=1.0):
    return KernelSpec("stretched", nu=float(nu), beta=float(beta))


def powerlaw(nu=1.0, beta=1.0):
    return KernelSpec("powerlaw", nu=float(nu), beta=float(beta))


def tabulated(k_samples, t_samples=None, tail=None):
    """Piecewise-linear kernel through ``(t_samples, k_samples)``.

    ``t_samples`` defaults to 0, 1, 2, ...; ``tail`` is a :class:`Tail`,
    a ``"exp:<rate>"``/``"alg:<p>"`` string, or None.
    """
    k = tuple(float(v) for v in k_samples)
    t = tuple(float(v) for v in (range(len(k)) if t_samples is None else t_samples))
    if isinstance(tail, str):
        tail = parse_tail(tail)
    return KernelSpec("tabulated", t_samples=t, k_samples=k, tail=tail)


def with_param(spec, name, value):
    """Copy of a parametric kernel with ``nu`` or ``beta`` replaced."""
    if name not in ("nu", "beta"):
        raise ValidationError(f"cannot vary kernel parameter {name!r}")
    if spec.family == "exponential" and name == "beta":
        return stretched(spec.nu, value)
    if spec.family not in ("exponential", "stretched", "powerlaw"):
        raise ValidationError(f"{spec.family} kernel has no parameter {name!r}")
    params = {"nu": spec.nu, "beta": spec.beta, name: float(value)}
    return KernelSpec(spec.family, **params)


def _check_t(t):
    arr = np.asarray(t, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("kernel evaluated at negative (or NaN) time")
    return arr


def _tabulated_eval(spec, t):
    ts = np.asarray(spec.t_samples)
    ks = np.asarray(spec.k_samples)
    out = np.interp(t, ts, ks)
    beyond = t > ts[-1]
    if np.any(beyond):
        tb = t[beyond]
        if spec.tail is None:
            out[beyond] = 0.0
        elif spec.tail.kind == "exp":
            out[beyond] = ks[-1] * np.exp(-spec.tail.rate * (tb - ts[-1]))
        else:
            out[beyond] = ks[-1] * (tb / ts[-1]) ** (-spec.tail.rate)
    return out


def eval_kernel(spec, t):
    """k(t) for t >= 0."""
    t = _check_t(t)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    f = spec.family
    if f == "zero":
        out = np.zeros_like(t)
    elif f == "exponential":
        out = spec.nu * np.exp(-t)
    elif f == "stretched":
        out = spec.nu * np.exp(-(t ** spec.beta))
    elif f == "powerlaw":
        out = spec.nu * (1.0 + t) ** (-spec.beta - 1.0)
    else:
        out = _tabulated_eval(spec, t)
    return float(out[0]) if scalar else out


def eval_kernel_derivative(spec, t, h=1e-6):
    """dk/dt; analytic for parametric families, central difference for tabulated.

    At t = 0 the stretched family with beta < 1 is singular and raises
    :class:`SingularityError`.
    """
    t = _check_t(t)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    f = spec.family
    if f == "zero":
        out = np.zeros_like(t)
    elif f == "exponential":
        out = -spec.nu * np.exp(-t)
    elif f == "stretched":
        b = spec.beta
        if np.any(t == 0):
            if b < 1:
                raise SingularityError("stretched kernel with beta < 1 has unbounded slope at t = 0")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -spec.nu * b * t ** (b - 1.0) * np.exp(-(t ** b))
        if b > 1:
            out[t == 0] = 0.0
        elif b == 1:
            out[t == 0] = -spec.nu
    elif f == "powerlaw":
        out = -spec.nu * (spec.beta + 1.0) * (1.0 + t) ** (-spec.beta - 2.0)
    else:
        lo = np.maximum(t - h, 0.0)
        hi = t + h
        out = (_tabulated_eval(spec, hi) - _tabulated_eval(spec, lo)) / (hi - lo)
    return float(out[0]) if scalar else out


def l1_norm(spec):
    """Integral of k over (0, inf)."""
    f = spec.family
    if f == "zero":
        return 0.0
    if f == "exponential":
        return spec.nu
    if f == "powerlaw":
        return spec.nu / spec.beta
    if f == "stretched":
        return spec.nu * math.gamma(1.0 + 1.0 / spec.beta)
    if spec.tail is None:
        raise UnsupportedError("tabulated kernel has no declared tail; its L1 norm is undefined")
    ts = np.asarray(spec.t_samples)
    ks = np.asarray(spec.k_samples)
    body = float(np.trapezoid(ks, ts))
    if spec.tail.kind == "exp":
        tail = ks[-1] / spec.tail.rate
    else:
        tail = ks[-1] * ts[-1] / (spec.tail.rate - 1.0)
    return body + tail


@dataclass(frozen=True)
class AuditReport:
    passed: bool
    negative_at: tuple
    increasing_at: tuple
    empirical: bool = False
    checked: int = 0

    def summary(self):
        if self.passed:
            tag = " (empirically admissible)" if self.empirical else ""
            return f"pass{tag}: {self.checked} samples"
        parts = []
        if self.negative_at:
            parts.append(f"negative at index {self.negative_at[0]}")
        if self.increasing_at:
            parts.append(f"monotonicity broken at index {self.increasing_at[0]}")
        return "fail: " + ", ".join(parts)


def audit_admissibility(spec, t_audit=10.0, n_samples=1000, tol=1e-14):
    """Sample k and report negativity or monotonicity violations.

    Tabulated kernels are checked on their own sample points (indices in the
    report refer to those) plus the tail.
    """
    if n_samples < 2:
        raise ValidationError("n_samples must be >= 2")
    if spec.family == "tabulated":
        ks = np.asarray(spec.k_samples)
        if spec.tail is not None:
            tt = spec.t_samples[-1] + np.linspace(0.0, t_audit, n_samples)[1:]
            ks = np.concatenate([ks, _tabulated_eval(spec, tt)])
    else:
        ks = eval_kernel(spec, np.linspace(0.0, t_audit, n_samples))
    scale = max(1.0, float(np.max(np.abs(ks))))
    neg = np.flatnonzero(ks < -tol * scale)
    inc = np.flatnonzero(np.diff(ks) > tol * scale) + 1
    return AuditReport(
        passed=neg.size == 0 and inc.size == 0,
        negative_at=tuple(int(i) for i in neg),
        increasing_at=tuple(int(i) for i in inc),
        empirical=spec.family == "tabulated",
        checked=int(ks.size),
    )


def laplace_transform(spec, lam, t_max=200.0, method="auto"):
    """k^(lam) = int_0^inf exp(-lam t) k(t) dt for Re lam > 0.

    Exponential kernels use nu/(lam + 1). Otherwise the integral over
    [0, t_max] is done by QUADPACK with cosine/sine weights; the remainder
    is bounded by k(t_max) exp(-Re lam t_max)/Re lam and a warning is issued
    when that bound exceeds 1e-12. ``method="quad"`` skips the shortcut.
    """
    if method not in ("auto", "quad"):
        raise ValidationError(f"unknown method {method!r}")
    lam = complex(lam)
    a, w = lam.real, lam.imag
    if not a > 0:
        raise DomainError("Laplace transform needs Re(lambda) > 0")
    if spec.family == "zero":
        return 0j
    if spec.family == "exponential" and method == "auto":
        return spec.nu / (lam + 1.0)

    def damped(t):
        return eval_kernel(spec, t) * math.exp(-a * t)

    opts = dict(limit=500, epsabs=1e-14, epsrel=1e-12)
    if w == 0.0:
        re = integrate.quad(damped, 0.0, t_max, **opts)[0]
        im = 0.0
    else:
        re = integrate.quad(damped, 0.0, t_max, weight="cos", wvar=w, **opts)[0]
        im = -integrate.quad(damped, 0.0, t_max, weight="sin", wvar=w, **opts)[0]
    tail = eval_kernel(spec, t_max) * math.exp(-a * t_max) / a
    if tail > 1e-12:
        warnings.warn(f"Laplace tail beyond t_max={t_max} may be {tail:.2e}", stacklevel=2)
    return complex(re, im)


def parse_tail(text):
    kind, _, rate = text.partition(":")
    try:
        return Tail(kind.strip(), float(rate))
    except ValueError as exc:
        raise ValidationError(f"bad tail {text!r}: {exc}") from None


def load_tabulated(path, tail=None):
    """Read a CSV with header ``t,k``."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["t", "k"]:
                raise ValidationError(f"{path}: expected header 't,k'")
            rows = [(float(r["t"]), float(r["k"])) for r in reader]
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    t, k = zip(*rows) if rows else ((), ())
    return tabulated(k, t, tail)


def parse_kernel(text, base_dir=None):
    """Parse a descriptor like ``"stretched nu=1.0 beta=0.5"``."""
    words = text.split()
    if not words:
        raise ValidationError("empty kernel descriptor")
    family, opts = words[0].lower(), {}
    for w in words[1:]:
        key, eq, val = w.partition("=")
        if not eq:
            raise ValidationError(f"bad kernel option {w!r} (expected key=value)")
        opts[key.lower()] = val
    allowed = {
        "zero": set(),
        "exponential": {"nu"},
        "stretched": {"nu", "beta"},
        "powerlaw": {"nu", "beta"},
        "tabulated": {"file", "tail"},
    }
    if family not in allowed:
        raise ValidationError(f"unknown kernel family {family!r}")
    extra = set(opts) - allowed[family]
    if extra:
        raise ValidationError(f"{family} kernel does not take {sorted(extra)}")
    if family == "tabulated":
        if "file" not in opts:
            raise ValidationError("tabulated kernel needs file=<path>")
        path = Path(opts["file"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return load_tabulated(path, opts.get("tail"))
    try:
        nums = {k: float(v) for k, v in opts.items()}
    except ValueError as exc:
        raise ValidationError(f"bad number in kernel descriptor {text!r}: {exc}") from None
    if family == "zero":
        return zero()
    if family == "exponential":
        return exponential(nums.get("nu", 1.0))
    if family == "stretched":
        return stretched(nums.get("nu", 1.0), nums.get("beta", 1.0))
    return powerlaw(nums.get("nu", 1.0), nums.get("beta", 1.0))
