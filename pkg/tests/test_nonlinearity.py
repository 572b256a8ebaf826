import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from fracsfe import (
    BadCaseClassification,
    ConditionF3Violated,
    F_eval,
    FracParams,
    MassCase,
    NonlinearitySpec,
    NoZeroAtZeta,
    ValidationError,
    classify_case,
    f_eval,
    find_zeta1,
    modify_eps,
    split_pm,
    truncate_above,
)

QUAD = NonlinearitySpec(((-1, 1), (1, 2)), "zero")  # f = -t + |t| t
CRIT = 3.0  # 2*_s - 1 for N = 2, s = 1/2


def quad_primitive(spec, t, breaks=()):
    pts = sorted(b for b in breaks if 0 < b < abs(t))
    val = quad(lambda x: float(spec.f(x)), 0.0, abs(t), points=pts or None, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
    return val


class TestEvaluation:
    def test_zero_at_one(self):
        assert float(QUAD.f(1.0)) == 0.0

    def test_odd_value(self):
        assert float(QUAD.f(-2.0)) == pytest.approx(-2.0, abs=1e-15)
        assert float(f_eval(QUAD, 2.0)) == pytest.approx(2.0, abs=1e-15)

    def test_origin(self):
        assert float(QUAD.f(0.0)) == 0.0 and float(QUAD.F(0.0)) == 0.0

    def test_primitive_closed_form(self):
        assert float(F_eval(QUAD, 3.0)) == pytest.approx(4.5, rel=1e-15)

    def test_split_values(self):
        fp_, fm_ = split_pm(QUAD)
        assert float(fp_(0.5)) == 0.0 and float(fm_(0.5)) == pytest.approx(0.25)
        assert float(fp_(2.0)) == pytest.approx(2.0) and float(fm_(2.0)) == 0.0

    @given(t=st.floats(-50, 50))
    def test_symmetries(self, t):
        assert float(QUAD.f(-t)) == pytest.approx(-float(QUAD.f(t)), abs=1e-12)
        assert float(QUAD.F(-t)) == pytest.approx(float(QUAD.F(t)), abs=1e-12)
        assert float(QUAD.f_plus(t)) * float(QUAD.f_minus(t)) == 0.0

    @given(t=st.floats(0.01, 8.0))
    def test_primitive_matches_quadrature(self, t):
        spec = NonlinearitySpec(((-1, 1), (2, 1.5), (-0.1, 3)), "zero")
        assert float(spec.F(t)) == pytest.approx(quad_primitive(spec, t), rel=1e-9, abs=1e-12)

    def test_callable_spec(self):
        spec = NonlinearitySpec(func=lambda t: np.sin(t), mass_case="zero")
        assert float(spec.F(np.pi)) == pytest.approx(2.0, rel=1e-10)
        assert spec.violations(2, FracParams(0.5)) == []


class TestTruncation:
    def test_truncate_at_one_zeroes_above(self):
        cubic = NonlinearitySpec(((-1, 1), (1, 2), (-0.25, 3)), "zero")  # zeros at 2 (double)
        with pytest.raises(NoZeroAtZeta):
            truncate_above(cubic, 3.0)

    def test_truncated_values(self):
        spec = NonlinearitySpec(((-1, 1), (1, 2), (-3 / 16, 3)), "zero")  # zeros at 4/3 and 4
        tr = truncate_above(spec, 4.0)
        assert float(tr.f(5.0)) == 0.0 and float(tr.f(-7.0)) == 0.0
        ts = np.linspace(-4, 4, 101)
        assert np.allclose(tr.f(ts), spec.f(ts), rtol=0, atol=1e-14)
        assert float(tr.F(9.0)) == pytest.approx(float(spec.F(4.0)), rel=1e-14)

    def test_non_zero_level_rejected(self):
        with pytest.raises(NoZeroAtZeta):
            truncate_above(QUAD, 2.0)

    def test_level_below_zeta1_rejected(self):
        # the only zero of -t + |t|t is 1, below zeta1 = 1.5
        with pytest.raises(NoZeroAtZeta):
            truncate_above(QUAD, 1.0)

    def test_growth_check_skipped_when_truncated(self):
        spec = truncate_above(NonlinearitySpec(((-1, 1), (1, 2), (-3 / 16, 3)), "zero"), 4.0)
        assert spec.violations(2, FracParams(0.5)) == []
        assert spec.zeta2 == 4.0


class TestEpsilon:
    def test_case_classification(self):
        assert classify_case(QUAD) == pytest.approx(1.0, abs=1e-12)
        assert classify_case(NonlinearitySpec(((1, 2),), "zero")) is None

    def test_bad_xi0(self):
        with pytest.raises(BadCaseClassification):
            modify_eps(QUAD, 0.5, 0.7, CRIT)

    def test_clamp_inactive_for_flat_negative_branch(self):
        # f = -t^3 + t^4: f_- = t^3 - t^4 <= t^3 / eps on [0, 1] for every eps <= 1
        spec = NonlinearitySpec(((-1, 3), (1, 4)), "zero")
        mod = modify_eps(spec, 0.5, 1.0, CRIT)
        ts = np.linspace(-3, 3, 601)
        assert np.allclose(mod.f(ts), spec.f(ts), rtol=1e-15, atol=1e-15)
        assert np.allclose(mod.F(ts), spec.F(ts), rtol=1e-13, atol=1e-15)

    def test_clamp_formula(self):
        mod = modify_eps(QUAD, 1.0, 1.0, CRIT)
        ts = np.linspace(0.0, 1.0, 201)
        expected = np.minimum(ts - ts**2, ts**3)
        assert np.allclose(mod.f_minus(ts), expected, rtol=0, atol=1e-15)
        big = np.linspace(1.0, 4.0, 50)
        assert np.allclose(mod.f(big), QUAD.f(big), rtol=0, atol=1e-14)

    def test_ordering_in_eps(self):
        ts = np.linspace(0.0, 3.0, 100)
        f1 = modify_eps(QUAD, 0.1, 1.0, CRIT).f_minus(ts)
        f2 = modify_eps(QUAD, 1.0, 1.0, CRIT).f_minus(ts)
        assert np.all(f2 <= f1 + 1e-15)

    def test_sup_distance_decreases(self):
        ts = np.linspace(0.0, 3.0, 3001)
        spec = NonlinearitySpec(((-1, 1), (1, 2)), "zero")
        d = [np.max(np.abs(modify_eps(spec, e, 1.0, 5.0).f(ts) - spec.f(ts))) for e in (1.0, 0.5, 0.1)]
        assert d[0] > d[1] > d[2]

    @given(t=st.floats(0.0, 3.0), eps=st.sampled_from([1.0, 0.5, 0.3, 0.05]))
    def test_primitive_matches_quadrature(self, t, eps):
        spec = NonlinearitySpec(((-1, 1), (1, 2)), "zero")
        mod = modify_eps(spec, eps, 1.0, 5.0)
        # the clamp switches where t - t^2 = t^5 / eps
        from scipy.optimize import brentq

        kink = brentq(lambda x: x - x * x - x**5 / eps, 1e-3, 0.999) if eps > 0.2 else 0.0
        assert float(mod.F(t)) == pytest.approx(quad_primitive(mod, t, (kink, 1.0)), rel=1e-10, abs=1e-13)

    def test_closed_form_value(self):
        spec = NonlinearitySpec(((-1, 1), (1, 2)), "zero")
        mod = modify_eps(spec, 1.0, 1.0, 3.0)
        # int_1^2.5 (t^2 - t) dt = 2.25 minus int_0^1 min(t - t^2, t^3) dt,
        # and the branches cross at the golden ratio conjugate
        c = (np.sqrt(5.0) - 1.0) / 2.0
        clamp = c**4 / 4 + (1 / 2 - 1 / 3) - (c**2 / 2 - c**3 / 3)
        assert float(mod.F(2.5)) == pytest.approx(2.25 - clamp, rel=1e-13)

    @given(seed=st.integers(0, 2**32 - 1))
    def test_energy_ordering_pointwise(self, seed):
        r = np.random.default_rng(seed)
        ts = r.uniform(-4, 4, 200)
        F1 = modify_eps(QUAD, 0.3, 1.0, CRIT).F(ts)
        F2 = modify_eps(QUAD, 1.0, 1.0, CRIT).F(ts)
        # F_eps decreases in eps, so the energies increase as eps shrinks
        assert np.all(F2 >= F1 - 1e-14)
        assert np.all(F1 >= QUAD.F(ts) - 1e-14)


class TestZeta1:
    def test_closed_form_root(self):
        assert find_zeta1(QUAD) == pytest.approx(1.5, abs=1e-9)

    def test_positive_mass_profile(self):
        spec = NonlinearitySpec(((-1, 1), (1, 3)), "positive")
        # F(t) - t^2/2 = t^4/4 - t^2 vanishes at t = 2
        assert find_zeta1(spec, FracParams(0.6, 1.0)) == pytest.approx(2.0, abs=1e-9)

    def test_pure_power_is_positive_at_once(self):
        z = find_zeta1(NonlinearitySpec(((1, 3),), "zero"))
        assert z == pytest.approx(10.0 / 10000)

    def test_negative_primitive(self):
        with pytest.raises(ConditionF3Violated):
            find_zeta1(NonlinearitySpec(((-1, 3),), "zero"))


class TestCertification:
    def test_growth_bound_strict(self):
        spec = NonlinearitySpec(((-1, 1), (1, 3)), "zero")  # q = 2*_s - 1 for N = 2, s = 1/2
        errs = spec.violations(2, FracParams(0.5))
        assert any("2*_s - 1" in e for e in errs)
        with pytest.raises(ValidationError):
            spec.certify(2, FracParams(0.5))

    def test_zero_mass_needs_nonpositive_lowest_term(self):
        spec = NonlinearitySpec(((1, 1.5),), "zero")
        assert spec.violations(2, FracParams(0.5))

    def test_positive_mass_linear_coefficient(self):
        spec = NonlinearitySpec(((1.5, 1), (1, 2)), "positive")
        assert any("a^s" in e for e in spec.violations(2, FracParams(0.5, 1.0)))
        assert spec.mass_case is MassCase.POSITIVE

    def test_examples_certify(self):
        QUAD.certify(2, FracParams(0.5))
        NonlinearitySpec(((-1, 1), (1, 3)), "positive").certify(2, FracParams(0.6, 1.0))

    def test_eps_range(self):
        with pytest.raises(ValueError):
            NonlinearitySpec(((-1, 1), (1, 2)), "zero", eps=1.5, crit_exp=3.0)
