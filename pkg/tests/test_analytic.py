import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from forcedcoag import (ExampleParams, ParameterError, example_decay_rate, exact_c1, exact_c2,
                        exact_ck, exact_equilibrium, exact_state, riccati_constants,
                        smallness_gap_demo)

SQ5 = math.sqrt(5.0)


def _reference(p, t_eval):
    """Sizes 1-3 of the example integrated by scipy at tight tolerance."""
    A, r1, r2, r3 = p.A_star, p.r(1), p.r(2), p.r(3)
    s1, s2, s3 = p.s_k(1), p.s_k(2), p.s_k(3)

    def f(t, y):
        return [-A * y[0] ** 2 + s1 - r1 * y[0], 0.5 * A * y[0] ** 2 + s2 - r2 * y[1],
                s3 - r3 * y[2]]

    y0 = [p.c_in_k(1), p.c_in_k(2), p.c_in_k(3)]
    sol = solve_ivp(f, (0.0, max(t_eval)), y0, method="DOP853", t_eval=t_eval,
                    rtol=1e-13, atol=1e-15)
    return sol.y


def test_equilibrium_closed_form():
    Q = exact_equilibrium(ExampleParams(), 4)
    assert Q[0] == pytest.approx((SQ5 - 1) / 2, abs=1e-15)
    assert Q[1] == pytest.approx((3 - SQ5) / 8 + 0.25, abs=1e-15)
    assert Q[2] == Q[3] == 0.0


def test_riccati_constants():
    rc = riccati_constants(ExampleParams())
    assert rc.Q1_plus == pytest.approx((SQ5 - 1) / 2)
    assert rc.Q1_minus == pytest.approx(-(SQ5 + 1) / 2)
    assert rc.alpha_ric == pytest.approx(1 / SQ5)
    with pytest.raises(ParameterError):
        riccati_constants(ExampleParams(A_star=0.0))


@pytest.mark.parametrize("p", [
    ExampleParams(),
    ExampleParams(A_star=2.0, R_star=0.5, gamma=0.7, s=(0.3, 0.1, 0.2), c_in=(1.0, 0.5, 0.25)),
    ExampleParams(A_star=1.0, R_star=1.0, gamma=1.0, s=(4.0,)),
    ExampleParams(A_star=0.5, R_star=2.0, gamma=1.5, s=(0.0, 1.0), c_in=(3.0,)),
], ids=["default", "general", "gap", "no-monomer-source"])
def test_closed_form_matches_scipy(p):
    ts = [0.0, 0.5, 1.0, 2.0, 5.0, 10.0]
    ref = _reference(p, ts)
    for i, t in enumerate(ts):
        assert exact_c1(p, t) == pytest.approx(ref[0, i], rel=1e-9, abs=1e-13)
        assert exact_c2(p, t) == pytest.approx(ref[1, i], rel=1e-9, abs=1e-13)
        assert exact_ck(p, 3, t) == pytest.approx(ref[2, i], rel=1e-9, abs=1e-13)


def test_linear_case():
    p = ExampleParams(A_star=0.0, s=(1.0, 0.5), c_in=(2.0,))
    assert exact_c1(p, 1.0) == pytest.approx(2 * math.exp(-1) + (1 - math.exp(-1)))
    assert exact_equilibrium(p, 2)[0] == 1.0


@given(t=st.floats(0, 50), A=st.floats(0.1, 5), s1=st.floats(0.01, 5), c0=st.floats(0, 5))
@settings(max_examples=100, deadline=None)
def test_c1_between_initial_value_and_equilibrium(t, A, s1, c0):
    # solutions of the scalar Riccati equation approach Q1 monotonically
    p = ExampleParams(A_star=A, s=(s1,), c_in=(c0,))
    q1 = riccati_constants(p).Q1_plus
    v = exact_c1(p, t)
    lo, hi = min(c0, q1), max(c0, q1)
    assert lo - 1e-12 * hi <= v <= hi + 1e-12 * hi


def test_exact_state_shape_and_limit():
    p = ExampleParams(s=(1.0, 0.5, 0.3))
    np.testing.assert_allclose(exact_state(p, 5, 60.0), exact_equilibrium(p, 5), atol=1e-12)


def test_decay_rate():
    assert example_decay_rate(ExampleParams()) == pytest.approx(1.0)
    assert example_decay_rate(ExampleParams(s=(4.0,))) == pytest.approx(1.0)
    # A*/(2 alpha_ric) = sqrt(r1^2 + 4 A s1)/2 limits for a weak source
    p = ExampleParams(R_star=3.0, s=(0.01,))
    assert example_decay_rate(p) == pytest.approx(math.sqrt(9 + 0.04) / 2)


def test_gap_demo():
    gap = smallness_gap_demo(ExampleParams(s=(4.0,)))
    assert gap.contraction_bracket_lower == pytest.approx(8.0)
    assert gap.bracket_at_equilibrium_lower == pytest.approx(3 * (math.sqrt(17) - 1) - 1)
    assert gap.bracket_at_equilibrium_lower >= gap.contraction_bracket_lower
    assert gap.observed_rate == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        smallness_gap_demo(ExampleParams())


def test_negative_time_rejected():
    with pytest.raises(ParameterError):
        exact_c1(ExampleParams(), -1.0)
    with pytest.raises(ParameterError):
        exact_ck(ExampleParams(), 2, 1.0)
