import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import memflow.kernels as K
from memflow.errors import DomainError, SingularityError, UnsupportedError, ValidationError

PARAMETRIC = [K.exponential(1), K.exponential(3), K.stretched(1, 0.5), K.stretched(2, 2),
              K.stretched(0.5, 4), K.powerlaw(1, 1), K.powerlaw(2, 0.5), K.powerlaw(0.5, 2)]


def test_eval_examples():
    assert K.eval_kernel(K.exponential(1), 0.0) == 1.0
    assert K.eval_kernel(K.powerlaw(1, 1), 1.0) == 0.25
    # mpmath: 2 exp(-1)
    assert K.eval_kernel(K.stretched(2, 2), 1.0) == pytest.approx(0.7357588823428846, rel=1e-15)
    assert K.eval_kernel(K.zero(), 3.0) == 0.0


def test_eval_array_shape():
    t = np.linspace(0, 5, 11)
    assert K.eval_kernel(K.stretched(1, 0.5), t).shape == t.shape


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        K.eval_kernel(K.exponential(1), -0.1)


@pytest.mark.parametrize("args", [(0.0,), (-1.0,), (float("nan"),)])
def test_invalid_nu(args):
    with pytest.raises(ValidationError):
        K.exponential(*args)


def test_invalid_beta():
    with pytest.raises(ValidationError):
        K.stretched(1.0, 0.0)
    with pytest.raises(ValidationError):
        K.powerlaw(1.0, -2.0)


def test_derivative_examples():
    # mpmath: -exp(-0.5)
    assert K.eval_kernel_derivative(K.exponential(1), 0.5) == pytest.approx(
        -0.6065306597126334, rel=1e-15)
    assert K.eval_kernel_derivative(K.zero(), 2.0) == 0.0
    assert K.eval_kernel_derivative(K.powerlaw(1, 1), 1.0) == pytest.approx(-0.25, rel=1e-15)


def test_derivative_singular_at_zero():
    with pytest.raises(SingularityError):
        K.eval_kernel_derivative(K.stretched(1, 0.5), 0.0)
    assert K.eval_kernel_derivative(K.stretched(1, 2), 0.0) == 0.0


SPEC_GRID = ([K.exponential(nu) for nu in (0.5, 1, 2)]
             + [K.stretched(nu, b) for nu in (0.5, 1, 2) for b in (0.5, 1, 2)]
             + [K.powerlaw(nu, b) for nu in (0.5, 1, 2) for b in (0.5, 1, 2)])


@pytest.mark.parametrize("spec", SPEC_GRID, ids=lambda s: s.describe())
def test_derivative_matches_central_difference(spec, rng):
    t = rng.uniform(0.1, 10.0, 100)
    h = 1e-5
    fd = (spec(t + h) - spec(t - h)) / (2 * h)
    d = K.eval_kernel_derivative(spec, t)
    assert np.all(np.abs(d - fd) <= 1e-6 * np.abs(d))


def test_l1_examples():
    assert K.l1_norm(K.exponential(3)) == 3.0
    assert K.l1_norm(K.powerlaw(2, 0.5)) == pytest.approx(4.0, rel=1e-15)
    assert K.l1_norm(K.zero()) == 0.0
    # nu Gamma(1 + 1/beta): Gamma(3) = 2
    assert K.l1_norm(K.stretched(1, 0.5)) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("spec", PARAMETRIC, ids=lambda s: s.describe())
def test_l1_matches_quadrature(spec):
    num = integrate.quad(spec, 0, np.inf, epsabs=0, epsrel=1e-13, limit=500)[0]
    assert abs(K.l1_norm(spec) - num) <= 1e-8 * num


def test_tabulated_l1_needs_tail():
    spec = K.tabulated([1.0, 0.5, 0.25])
    with pytest.raises(UnsupportedError):
        K.l1_norm(spec)
    spec = K.tabulated([1.0, 0.5, 0.25], tail="exp:0.5")
    # trapezoid 0.75 + 0.375, then 0.25 / 0.5
    assert K.l1_norm(spec) == pytest.approx(1.125 + 0.5)
    spec = K.tabulated([1.0, 0.5], [0.0, 1.0], tail="alg:3")
    # tail 0.5 * int_1^inf t^-3 dt = 0.25
    assert K.l1_norm(spec) == pytest.approx(0.75 + 0.25)


def test_tabulated_tail_evaluation():
    spec = K.tabulated([1.0, 0.5], tail="exp:2")
    assert spec(1.5) == pytest.approx(0.5 * math.exp(-1.0))
    assert spec(0.5) == pytest.approx(0.75)


def test_tabulated_validation():
    with pytest.raises(ValidationError):
        K.tabulated([1.0])
    with pytest.raises(ValidationError):
        K.tabulated([1.0, 0.5], [0.5, 1.0])
    with pytest.raises(ValidationError):
        K.tabulated([1.0, 0.5], tail="alg:1")


def test_audit_examples():
    assert K.audit_admissibility(K.exponential(1), 10, 1000).passed
    assert K.audit_admissibility(K.stretched(1, 0.5), 10, 1000).passed
    rep = K.audit_admissibility(K.tabulated([1.0, 0.5, 0.7]), 10, 1000)
    assert not rep.passed
    assert rep.increasing_at[0] == 2
    assert "index 2" in rep.summary()


def test_audit_flags_tabulated_as_empirical():
    rep = K.audit_admissibility(K.tabulated([1.0, 0.5, 0.2], tail="exp:1"))
    assert rep.passed and rep.empirical
    assert "empirically admissible" in rep.summary()


def test_audit_negative():
    rep = K.audit_admissibility(K.tabulated([0.5, -0.1, -0.2]))
    assert not rep.passed and rep.negative_at[0] == 1


def test_audit_needs_two_samples():
    with pytest.raises(ValidationError):
        K.audit_admissibility(K.zero(), 1.0, 1)


@settings(max_examples=60, deadline=None)
@given(
    family=st.sampled_from(["exponential", "stretched", "powerlaw"]),
    nu=st.sampled_from([0.5, 1.0, 2.0]),
    beta=st.sampled_from([0.5, 1.0, 2.0, 4.0]),
    t1=st.floats(0, 100),
    t2=st.floats(0, 100),
)
def test_monotone_nonnegative(family, nu, beta, t1, t2):
    spec = K.KernelSpec(family, nu=nu, beta=beta)
    lo, hi = sorted((t1, t2))
    assert spec(lo) >= spec(hi) >= 0.0


def test_laplace_examples():
    assert K.laplace_transform(K.exponential(1), 1) == pytest.approx(0.5)
    assert K.laplace_transform(K.exponential(2), 1 + 1j) == pytest.approx(0.8 - 0.4j)
    assert K.laplace_transform(K.zero(), 3 + 2j) == 0


def test_laplace_quadrature_path_matches_analytic(rng):
    lams = rng.uniform(0.1, 10, 20) + 1j * rng.uniform(-10, 10, 20)
    spec = K.exponential(1.5)
    for lam in lams:
        got = K.laplace_transform(spec, lam, method="quad")
        assert abs(got - 1.5 / (lam + 1)) <= 1e-10


def test_laplace_powerlaw_against_quad():
    spec = K.powerlaw(1, 1)
    # int_0^inf e^{-t} (1+t)^{-2} dt = 1 - e E_1(1), scipy.special oracle
    from scipy.special import exp1
    assert K.laplace_transform(spec, 1.0).real == pytest.approx(1 - math.e * exp1(1.0), rel=1e-10)


def test_laplace_domain():
    with pytest.raises(DomainError):
        K.laplace_transform(K.exponential(1), 0.0)
    with pytest.raises(DomainError):
        K.laplace_transform(K.exponential(1), -1 + 1j)


@pytest.mark.parametrize("text,expected", [
    ("exponential nu=1.0", K.exponential(1)),
    ("stretched nu=1.0 beta=0.5", K.stretched(1, 0.5)),
    ("powerlaw nu=1.0 beta=2.0", K.powerlaw(1, 2)),
    ("zero", K.zero()),
    ("  Exponential   nu=2 ", K.exponential(2)),
])
def test_parse_kernel(text, expected):
    assert K.parse_kernel(text) == expected


@pytest.mark.parametrize("text", ["", "bogus", "exponential beta=2", "stretched nu=x",
                                  "powerlaw nu", "tabulated tail=exp:1"])
def test_parse_kernel_errors(text):
    with pytest.raises(ValidationError):
        K.parse_kernel(text)


def test_parse_tabulated(tmp_path):
    f = tmp_path / "k.csv"
    f.write_text("t,k\n0,2\n1,1\n2,0.5\n")
    spec = K.parse_kernel(f"tabulated file={f} tail=exp:0.7")
    assert spec.family == "tabulated"
    assert spec.tail == K.Tail("exp", 0.7)
    assert spec(0.5) == pytest.approx(1.5)
    rel = K.parse_kernel("tabulated file=k.csv", base_dir=tmp_path)
    assert rel.k_samples == (2.0, 1.0, 0.5)


def test_parse_tabulated_bad_header(tmp_path):
    f = tmp_path / "k.csv"
    f.write_text("time,value\n0,1\n1,0.5\n")
    with pytest.raises(ValidationError):
        K.parse_kernel(f"tabulated file={f}")


def test_with_param():
    assert K.with_param(K.stretched(1, 1), "beta", 2) == K.stretched(1, 2)
    assert K.with_param(K.exponential(1), "beta", 0.5) == K.stretched(1, 0.5)
    assert K.with_param(K.powerlaw(1, 1), "nu", 3) == K.powerlaw(3, 1)
    with pytest.raises(ValidationError):
        K.with_param(K.zero(), "nu", 1)


def test_specs_hashable_and_immutable():
    a, b = K.stretched(1, 2), K.stretched(1.0, 2.0)
    assert a == b and hash(a) == hash(b)
    with pytest.raises(AttributeError):
        a.nu = 3
