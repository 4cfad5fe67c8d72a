"""The verification suite run by ``memflow verify``.

Each check returns a :class:`Check` with the measured value and the
tolerance it is held to. Everything is seeded, so reports are reproducible
byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from memflow import entropy as ent
from memflow import kernels as K
from memflow import spectral as sp
from memflow import volterra as vt
from memflow.quadrature import gauss_quadrature

SUITES = ("kernels", "volterra", "laplace", "figures", "spectral", "entropy", "decay")

DT = 1e-3
ALPHA = 1.0
SEED = 20200101


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    value: float
    tol: float
    passed: bool
    relation: str = "<="

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.suite}.{self.name}  value={self.value:.6e} {self.relation} {self.tol:.6e}"


def _le(suite, name, value, tol):
    return Check(suite, name, float(value), float(tol), bool(value <= tol), "<=")


def _ge(suite, name, value, tol):
    return Check(suite, name, float(value), float(tol), bool(value >= tol), ">=")


def builtin_kernels(values=(0.5, 1.0, 2.0)):
    out = [K.exponential(nu) for nu in values]
    out += [K.stretched(nu, b) for nu in values for b in values]
    out += [K.powerlaw(nu, b) for nu in values for b in values]
    return out


# -- kernels ---------------------------------------------------------------

def kernel_checks(extra=()):
    out = []
    audited = [K.exponential(1), K.stretched(1, 0.5), K.stretched(1, 2),
               K.powerlaw(1, 1), K.powerlaw(2, 0.5)]
    for spec in list(audited) + list(extra):
        rep = K.audit_admissibility(spec, 10.0, 1000)
        n = len(rep.negative_at) + len(rep.increasing_at)
        out.append(Check("kernels", f"audit[{spec.describe()}]", n, 0, rep.passed, "=="))
    for spec in (K.stretched(1, 0.5), K.stretched(2, 2), K.powerlaw(2, 0.5)):
        num = integrate.quad(spec, 0, np.inf, epsabs=0, epsrel=1e-13, limit=500)[0]
        rel = abs(K.l1_norm(spec) - num) / num
        out.append(_le("kernels", f"l1_norm[{spec.describe()}]", rel, 1e-8))
    rng = np.random.default_rng(SEED)
    t = rng.uniform(0.1, 10.0, 100)
    worst = 0.0
    h = 1e-5
    for spec in (K.exponential(1), K.stretched(1, 0.5), K.stretched(1, 2), K.powerlaw(1, 1)):
        fd = (spec(t + h) - spec(t - h)) / (2 * h)
        d = K.eval_kernel_derivative(spec, t)
        worst = max(worst, float(np.max(np.abs(d - fd) / np.abs(d))))
    out.append(_le("kernels", "derivative_vs_fd", worst, 1e-6))
    lam = rng.uniform(0.1, 10, 20) + 1j * rng.uniform(-10, 10, 20)
    spec = K.exponential(2.0)
    err = max(abs(K.laplace_transform(spec, l, method="quad") - 2.0 / (l + 1)) for l in lam)
    out.append(_le("kernels", "laplace_exponential", err, 1e-10))
    return out


# -- volterra --------------------------------------------------------------

def closed_form_error(dt=DT, t_end=10.0, mu=2.0):
    s = vt.solve_relaxation(K.exponential(1), mu, vt.TimeGrid(t_end, dt))
    return float(np.max(np.abs(s.values - vt.closed_form_exponential(1, mu, s.times))))


def volterra_checks():
    out = []
    e1 = closed_form_error()
    e2 = closed_form_error(DT / 2)
    out.append(_le("volterra", "closed_form_T10", e1, 5e-3))
    out.append(_ge("volterra", "closed_form_halving_factor", e1 / e2, 1.8))
    g5 = vt.TimeGrid(5.0, DT)
    s0 = vt.solve_relaxation(K.zero(), 2 * ALPHA, g5)
    out.append(_le("volterra", "memoryless_recovery",
                   np.max(np.abs(s0.values - np.exp(-2 * ALPHA * g5.times))), 5e-3))

    floor_gap = -math.inf
    mono = -math.inf
    rng_lo, rng_hi = math.inf, -math.inf
    for spec in builtin_kernels():
        for mu in (1.0, 2.0, 4.0):
            s = vt.solve_relaxation(spec, mu, g5).values
            mono = max(mono, float(np.max(np.diff(s))))
            rng_lo, rng_hi = min(rng_lo, s.min()), max(rng_hi, s.max())
            if mu == 2.0:
                floor_gap = max(floor_gap, float(np.max(np.exp(-mu * g5.times) - s)))
    out.append(_le("volterra", "memoryless_floor", floor_gap, 5 * e1))
    out.append(_le("volterra", "relaxation_monotone", mono, 1e-9))
    out.append(_ge("volterra", "relaxation_positive", rng_lo, 0.0))

    b = vt.solve_resolvent(K.exponential(1), g5)
    out.append(_le("volterra", "resolvent_exponential",
                   np.max(np.abs(b.values - (0.5 + 0.5 * np.exp(-2 * g5.times)))), 5e-4))
    lo, hi = math.inf, -math.inf
    for spec in builtin_kernels():
        bv = vt.solve_resolvent(spec, g5).values
        lo, hi = min(lo, bv.min()), max(hi, bv.max())
    out.append(_ge("volterra", "resolvent_lower", lo, -1e-9))
    out.append(_le("volterra", "resolvent_upper", hi, 1 + 1e-9))

    for spec in (K.exponential(1), K.stretched(1, 0.5), K.stretched(1, 2)):
        s = vt.solve_relaxation(spec, 2.0, g5)
        r = vt.verify_duhamel(s, vt.solve_resolvent(spec, g5))
        out.append(_le("volterra", f"duhamel[{spec.describe()}]", r, 5e-3))

    dt = 1e-4
    worst = 0.0
    for spec in builtin_kernels():
        for mu in (1.0, 2.0, 4.0):
            s = vt.solve_relaxation(spec, mu, vt.TimeGrid(10 * dt, dt)).values
            worst = max(worst, abs((s[1] - s[0]) / dt + mu) / dt)
    out.append(_le("volterra", "initial_slope_over_dt", worst, 10.0))
    return out


# -- laplace ---------------------------------------------------------------

def laplace_lambdas(n=10):
    rng = np.random.default_rng(SEED + 1)
    return rng.uniform(0.5, 5, n) + 1j * rng.uniform(-5, 5, n)


def laplace_checks(t_end=40.0, dt=DT):
    out = []
    lams = laplace_lambdas()
    g = vt.TimeGrid(t_end, dt)
    min_re = math.inf
    for spec in (K.exponential(1), K.stretched(1, 0.5), K.stretched(1, 2)):
        chk = vt.verify_laplace_identity(spec, vt.solve_resolvent(spec, g), lams)
        out.append(_le("laplace", f"identity[{spec.describe()}]", chk.relative_residual, 1e-3))
        min_re = min(min_re, chk.min_real_part)
    out.append(_ge("laplace", "positive_type_min_re", min_re, -1e-9))
    return out


# -- figures ---------------------------------------------------------------

FIG_TIMES = (1.0, 2.0, 4.0)
FIG_GAP = 1e-4


def sweep_values(make, values, mu_of, t_end=4.0, dt=DT):
    g = vt.TimeGrid(t_end, dt)
    rows = []
    for v in values:
        spec, mu = make(v), mu_of(v)
        s = vt.solve_relaxation(spec, mu, g)
        rows.append([s.at(t) for t in FIG_TIMES])
    return np.array(rows)


FIGURE_SWEEPS = {
    "stretched_beta": (lambda b: K.stretched(1, b), (0.5, 1, 2, 4), lambda v: 2.0, -1),
    "stretched_nu": (lambda n: K.stretched(n, 1), (0.5, 1, 2), lambda v: 2.0, +1),
    "stretched_alpha": (lambda a: K.stretched(1, 1), (0.5, 1, 2), lambda a: 2.0 * a, -1),
    "powerlaw_beta": (lambda b: K.powerlaw(1, b), (0.5, 1, 2, 4), lambda v: 2.0, -1),
    "powerlaw_nu": (lambda n: K.powerlaw(n, 1), (0.5, 1, 2), lambda v: 2.0, +1),
}


def ordering_gap(name):
    """Smallest signed step along the sweep; positive means the expected order holds."""
    make, values, mu_of, sign = FIGURE_SWEEPS[name]
    vals = sweep_values(make, values, mu_of)
    return float(np.min(sign * np.diff(vals, axis=0)))


def figure_checks():
    return [_ge("figures", f"order[{n}]", ordering_gap(n), FIG_GAP) for n in FIGURE_SWEEPS]


# -- spectral --------------------------------------------------------------

def spectral_checks():
    out = []
    basis = sp.HermiteBasis(ALPHA, 16)
    rule = gauss_quadrature(ALPHA, 64)
    H = basis.values(rule.nodes)
    gram = (H * rule.weights) @ H.T
    out.append(_le("spectral", "gram", np.max(np.abs(gram - np.eye(basis.size))), 1e-10))
    b10 = sp.HermiteBasis(ALPHA, 10)
    L = (b10.apply_ou(rule.nodes) * rule.weights) @ b10.values(rule.nodes).T
    out.append(_le("spectral", "eigen",
                   np.max(np.abs(L + ALPHA * np.diag(np.arange(11)))), 1e-8))
    g = vt.TimeGrid(10.0, 1e-2)
    c0 = np.zeros(basis.size)
    c0[:3] = (2.5, 0.3, 0.1)
    st = sp.evolve(c0, K.powerlaw(1, 1), basis, g)
    drift = max(abs(sp.mass(st, i) - 2.5) for i in range(g.n_steps + 1))
    out.append(Check("spectral", "mass_drift", drift, 0.0, drift == 0.0, "=="))
    rng = np.random.default_rng(SEED + 2)
    poly = np.polynomial.Polynomial(rng.normal(size=basis.size) / np.arange(1, basis.size + 1) ** 2)
    c = sp.project(poly, basis, rule)
    x = rng.uniform(-3, 3, 50)
    st0 = sp.SpectralState(basis, g, c[:, None])
    # polynomials with O(1) monomial coefficients have Hermite coefficients
    # ~1e5, so errors are measured against the L2(gamma) norm of the datum
    norm = math.sqrt(rule.integrate(poly(rule.nodes) ** 2))
    err = np.max(np.abs(sp.evaluate(st0, 0, x) - poly(x))) / max(1.0, norm)
    out.append(_le("spectral", "round_trip", err, 1e-9))
    g5 = vt.TimeGrid(5.0, DT)
    st = sp.evolve(sp.exponential_profile(basis, 0.5), K.exponential(1), basis, g5)
    worst = 0.0
    for n in range(1, basis.size):
        exact = st.coeffs[n, 0] * vt.closed_form_exponential(1, ALPHA * n, g5.times)
        budget = abs(st.coeffs[n, 0]) * closed_form_error(DT, 5.0, ALPHA * n)
        worst = max(worst, float(np.max(np.abs(st.coeffs[n] - exact))) / max(budget, 1e-300))
    out.append(_le("spectral", "mode_oracle_ratio", worst, 1.0 + 1e-9))
    return out


# -- entropy ---------------------------------------------------------------

def entropy_checks():
    out = []
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        r = gauss_quadrature(a, 64)
        for p in range(0, 9, 2):
            exact = math.prod(range(p - 1, 0, -2)) / a ** (p // 2)
            worst = max(worst, abs(r.integrate(r.nodes ** p) - exact) / exact)
    out.append(_le("entropy", "quadrature_moments", worst, 1e-12))
    lsi = ef = 0.0
    for a in (0.5, 1.0, 2.0):
        r = gauss_quadrature(a, 64)
        for th in (0.5, 1.0):
            lsi = max(lsi, abs(ent.lsi_check(lambda x: np.exp(th * x / 2), r)))
            ef = max(ef, abs(ent.entropy_fisher_check(lambda x: np.exp(th * x), r)))
    out.append(_le("entropy", "lsi_saturation", lsi, 1e-8))
    out.append(_le("entropy", "entropy_fisher_saturation", ef, 1e-8))
    r = gauss_quadrature(1.0, 64)
    out.append(_le("entropy", "entropy_exp_value",
                   abs(ent.entropy_functional(np.exp, r) - 0.5 * math.exp(0.5)), 1e-9))
    f = lambda x: 1 + 0.2 * x + 0.05 * x ** 2  # noqa: E731
    e = ent.entropy_functional(f, r)
    hom = max(abs(ent.entropy_functional(lambda x, c=c: c * f(x), r) - c * e) / (c * e)
              for c in (0.5, 2.0, 10.0))
    out.append(_le("entropy", "homogeneity", hom, 1e-10))
    return out


# -- decay -----------------------------------------------------------------

DECAY_TIMES = (0.5, 1.0, 2.0, 4.0)
PROBE_TIMES = (0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0)


def decay_data(size):
    def c(*a):
        x = np.zeros(size)
        x[: len(a)] = a
        return x

    return {
        "1+0.2h1": c(1.0, 0.2),
        "1+0.1h1+0.05h2": c(1.0, 0.1, 0.05),
        "1.5+0.3h1": c(1.5, 0.3),
    }


def decay_kernels():
    return (K.zero(), K.exponential(1), K.stretched(1, 0.5))


def run_decay(kernel, coeffs, times=DECAY_TIMES, mu=None, basis=None, grid=None):
    basis = basis or sp.HermiteBasis(ALPHA, 16)
    grid = grid or vt.TimeGrid(5.0, DT)
    st = sp.evolve(coeffs, kernel, basis, grid)
    rule = ent.positive_rule([st.snapshot(grid.index(t)) for t in (0.0,) + tuple(times)], ALPHA)
    return ent.verify_decay(st, kernel, rule, times, mu=mu)


def memoryless_gap(coeffs, times=DECAY_TIMES):
    rep = run_decay(K.zero(), coeffs, times)
    return max(abs(a - b) for a, b in zip(rep.entropy, rep.memoryless))


def decay_checks():
    out = []
    basis = sp.HermiteBasis(ALPHA, 16)
    for spec in decay_kernels():
        for label, c in decay_data(basis.size).items():
            rep = run_decay(spec, c, basis=basis)
            out.append(Check("decay", f"bound[{spec.describe()}; {label}]",
                             rep.worst_margin, -rep.tolerance, rep.passed, ">="))
    gap = max(memoryless_gap(c) for c in decay_data(basis.size).values())
    out.append(_le("decay", "memoryless_equality", gap, 1e-4))
    gap = memoryless_gap(sp.exponential_profile(basis, 1.0))
    out.append(_le("decay", "memoryless_equality_saturating", gap, 1e-4))
    for spec in (K.zero(), K.exponential(1)):
        rep = run_decay(spec, sp.exponential_profile(basis, 1.0), PROBE_TIMES, mu=2.5 * ALPHA)
        v = rep.worst_margin
        out.append(Check("decay", f"optimality_probe[{spec.describe()}]", v, -1e-6, v < -1e-6, "<"))
    return out


RUNNERS = {
    "kernels": kernel_checks,
    "volterra": volterra_checks,
    "laplace": laplace_checks,
    "figures": figure_checks,
    "spectral": spectral_checks,
    "entropy": entropy_checks,
    "decay": decay_checks,
}


def run(only=None, extra_kernels=()):
    suites = SUITES if not only else only
    out = []
    for name in suites:
        if name == "kernels":
            out.extend(kernel_checks(extra_kernels))
        else:
            out.extend(RUNNERS[name]())
    return out
