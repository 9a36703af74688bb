from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import fractions
from diffchar.deligne import (
    DC1_S1,
    DC1_T2,
    DC2_T2,
    DCTop,
    FourierFn,
    I_map,
    R_map,
    a_map,
    c1_hat,
    cup,
    cup_s1,
    cup_t2_11,
    cup_t2_21,
    ev_top,
    fiber_int_s1,
    from_json,
    holonomy_exponent,
    pullback,
    restrict_slice,
)
from diffchar.models import integrate_fund
from diffchar.scalars import TAU, TAU_INV, ZERO, CircleValue, ScalarK, phase_quarter

gauss = st.builds(lambda a, b: ScalarK({0: (a, b)}), fractions, fractions)


@st.composite
def fns(draw, dim, max_mode=2, max_terms=4):
    coeffs = {}
    for _ in range(draw(st.integers(0, max_terms))):
        k = tuple(draw(st.integers(-max_mode, max_mode)) for _ in range(dim))
        coeffs[k] = draw(gauss)
    return FourierFn(dim, coeffs)


ints = st.integers(-5, 5)
s1_classes = st.builds(DC1_S1, ints, fns(1))
t2_ones = st.builds(DC1_T2, ints, ints, fns(2))
t2_twos = st.builds(DC2_T2, ints, fns(2), fns(2))


# -- Fourier functions --------------------------------------------------------------


def test_fourier_calculus():
    f = FourierFn(1, {1: 2, 0: 3})
    assert f.mean() == 3
    assert f.derivative() == FourierFn(1, {1: TAU * 2})
    assert (f * FourierFn(1, {-1: 1}))[0] == 2
    g = FourierFn(2, {(1, 0): 1, (0, 2): 5, (0, 0): 1})
    assert g.integrate_axis(0) == FourierFn(1, {0: 1, 2: 5})
    assert g.restrict(0, 1) == FourierFn(1, {0: 1 + ScalarK({0: (0, 1)}), 2: 5})


@given(fns(2), fns(2))
def test_fourier_leibniz(f, g):
    for axis in (0, 1):
        assert (f * g).derivative(axis) == f.derivative(axis) * g + f * g.derivative(axis)
        assert f.derivative(axis).mean() == ZERO


# -- structure maps ------------------------------------------------------------------


def test_e_hat_structure():
    e = DC1_S1.e()
    S = e.R().pres
    assert R_map(e) == S.gen("dt") and I_map(e) == 1
    assert I_map(a_map(FourierFn(1, {2: 1}))) == 0
    z = DC1_S1()
    assert R_map(z).is_zero() and I_map(z) == 0


@given(fns(1), fns(1))
def test_a_is_additive_and_R_a_is_d(f, g):
    assert a_map(f) + a_map(g) == a_map(f + g)
    dt = a_map(f).R().pres.gen("dt")
    assert R_map(a_map(f)) == f.derivative().to_form() * dt
    assert I_map(a_map(f)) == 0


@given(s1_classes)
def test_R_has_integral_periods(x):
    S = x.R().pres
    assert integrate_fund(x.R(), S, {"dt": 1}) == x.n


def test_integer_constants_are_killed():
    f = FourierFn(1, {0: Fraction(7, 3), 1: 1})
    assert DC1_S1(2, f) == DC1_S1(2, f + 5)
    assert DC1_S1(2, f).f.mean() == Fraction(1, 3)


def test_ev_top():
    assert ev_top(a_map(("top", FourierFn.constant(1, Fraction(3, 4))))) == CircleValue(Fraction(3, 4))
    assert ev_top(a_map(("top", FourierFn.constant(1, 1)))).is_zero()
    with pytest.raises(Exception):
        ev_top(DC1_S1.e())


# -- products on S^1 -----------------------------------------------------------------


def test_e_cup_e():
    assert ev_top(cup(DC1_S1.e(), DC1_S1.e())) == CircleValue(Fraction(1, 2))


@given(s1_classes)
@settings(max_examples=250)
def test_x_cup_x_is_half_n_squared(x):
    assert ev_top(cup_s1(x, x)) == CircleValue(Fraction(x.n * x.n, 2))
    assert ev_top(cup_s1(x, x)) == CircleValue(Fraction(x.n, 2))


@given(s1_classes, s1_classes)
def test_graded_anticommutativity_s1(x, y):
    assert (ev_top(cup_s1(x, y)) + ev_top(cup_s1(y, x))).is_zero()


@given(fns(1), s1_classes)
def test_a_module_rule_s1(f, y):
    lhs = ev_top(cup_s1(a_map(f), y))
    S = y.R().pres
    rhs = CircleValue(integrate_fund(f.to_form(S) * y.R(), S, {"dt": 1}))
    assert lhs == rhs


def test_a_f_cup_a_g():
    f = FourierFn(1, {1: 1})
    g = FourierFn(1, {-1: 2})
    # int f dg = sum_k f_{-k} (tau k) g_k with k = -1
    assert ev_top(cup_s1(a_map(f), a_map(g))) == CircleValue(TAU * -2)


@given(s1_classes, s1_classes, st.integers(0, 3))
def test_rotation_naturality(x, y, q):
    assert ev_top(cup_s1(x.rotate(q), y.rotate(q))) == ev_top(cup_s1(x, y))
    assert x.rotate(q).n == x.n and x.rotate(4) == x


# -- products on T^2 -----------------------------------------------------------------

e1 = DC1_T2(1, 0)
e2 = DC1_T2(0, 1)


def test_generator_products():
    assert cup(e1, e2) == DC2_T2.P()
    assert cup(e2, e1) == -DC2_T2.P()
    assert cup(e1, e1) == DC2_T2(0, Fraction(1, 2), 0)


@pytest.mark.parametrize("k", range(-5, 6))
def test_p_cup_degree_one_grid(k):
    for n in range(-5, 6):
        for m in range(-5, 6):
            val = ev_top(cup_t2_21(k * DC2_T2.P(), DC1_T2(n, m)))
            assert val == CircleValue(Fraction(k * (n + m), 2))


@given(fns(2))
def test_p_cup_a_f_is_mean(f):
    assert ev_top(cup(DC2_T2.P(), a_map(f))) == CircleValue(f.mean())


@given(t2_ones, t2_ones)
def test_graded_commutativity_t2(x, y):
    assert cup_t2_11(x, y) == -cup_t2_11(y, x)


@given(t2_ones, t2_ones, t2_ones)
@settings(max_examples=60)
def test_associativity_t2(x, y, z):
    assert ev_top(cup(cup(x, y), z)) == ev_top(cup(x, cup(y, z)))


@given(t2_ones, t2_ones)
def test_cup_curvature_is_wedge(x, y):
    assert cup_t2_11(x, y).R() == x.R() * y.R()
    assert cup_t2_11(x, y).I() == x.n1 * y.n2 - x.n2 * y.n1


@given(fns(2), fns(2), t2_ones)
def test_a_module_rule_t2(a, b, y):
    T = y.R().pres
    alpha = a.to_form(T) * T.gen("ds") + b.to_form(T) * T.gen("dt")
    expected = CircleValue(integrate_fund(alpha * y.R(), T, {"ds": 1, "dt": 1}))
    assert ev_top(cup(a_map((a, b)), y)) == expected


@given(t2_twos, fns(2), t2_ones)
def test_canonical_form_mod_exact(x, g, y):
    # adding an exact 1-form or an integral harmonic form does not change the class
    shifted = x + DC2_T2(0, g.derivative(0) + 3, g.derivative(1) - 2)
    assert shifted == x
    assert ev_top(cup(shifted, y)) == ev_top(cup(x, y))


@given(t2_ones, fns(2), t2_ones)
def test_degree_one_representatives(x, g, y):
    assert cup(x + DC1_T2(0, 0, 4), y) == cup(x, y)


# -- fibre integration ---------------------------------------------------------------


def test_fiber_integrals_of_p():
    assert fiber_int_s1(DC2_T2.P(), 2) == DC1_S1.e()
    assert fiber_int_s1(DC2_T2.P(), 1) == -DC1_S1.e()
    assert fiber_int_s1(e2, 2) == 1 and fiber_int_s1(e1, 2) == 0


@given(t2_twos, st.sampled_from([1, 2]))
def test_fiber_integration_commutes_with_R(x, factor):
    y = fiber_int_s1(x, factor)
    rho = x.R_density()
    # int over the fibre of rho ds^dt with the fibre written last
    sign = 1 if factor == 2 else -1
    expected = rho.integrate_axis(factor - 1) * sign
    S = y.R().pres
    assert y.R() == expected.to_form(S) * S.gen("dt")
    assert I_map(y) == sign * x.k


@given(fns(2), fns(2), st.sampled_from([1, 2]))
def test_fiber_integration_commutes_with_a(a, b, factor):
    y = fiber_int_s1(a_map((a, b)), factor)
    comp = b if factor == 2 else a
    assert y == a_map(comp.integrate_axis(factor - 1))


@given(s1_classes, st.sampled_from([1, 2]))
def test_fiber_integration_kills_pullbacks(x, factor):
    other = 1 if factor == 2 else 2
    assert fiber_int_s1(pullback(x, other), factor) == 0
    top = DCTop(CircleValue(Fraction(1, 3)), 1)
    assert fiber_int_s1(pullback(top, other), factor) == DC1_S1()


@given(s1_classes, t2_ones)
def test_projection_formula(x, y):
    assert fiber_int_s1(cup(pullback(x, 1), y), 2) == y.n2 * x


@given(s1_classes, t2_twos)
def test_fubini_against_circle_product(x, Y):
    assert ev_top(cup(pullback(x, 1), Y)) == ev_top(cup_s1(x, fiber_int_s1(Y, 2)))


@given(s1_classes, s1_classes)
def test_pullback_products(x, y):
    # pr1^*x cup pr2^*y integrated over the second factor is I(y) x
    assert fiber_int_s1(cup(pullback(x, 1), pullback(y, 2)), 2) == y.n * x


# -- restriction and the homotopy formula ---------------------------------------------


def _interval_integral(f: FourierFn, q0: int, q1: int) -> FourierFn:
    """int_{q0/4}^{q1/4} f(s, t) ds for f on T^2, by explicit antiderivatives."""
    out = {}
    for (a, b), c in f.coeffs.items():
        if a == 0:
            v = c * Fraction(q1 - q0, 4)
        else:
            v = c * (phase_quarter(a * q1) - phase_quarter(a * q0)) * TAU_INV / a
        out[(b,)] = out.get((b,), ZERO) + v
    return FourierFn(1, out)


@given(t2_ones, st.integers(0, 3), st.integers(0, 3))
def test_homotopy_formula_degree_one(x, q0, q1):
    diff = restrict_slice(x, q1) - restrict_slice(x, q0)
    rs, _ = x.R_components()
    assert diff == a_map(_interval_integral(rs, q0, q1))


@given(t2_twos, st.integers(0, 3), st.integers(0, 3))
def test_homotopy_formula_degree_two(x, q0, q1):
    diff = ev_top(restrict_slice(x, q1)) - ev_top(restrict_slice(x, q0))
    assert diff == CircleValue(_interval_integral(x.R_density(), q0, q1).mean())


def test_restriction_of_generators():
    assert restrict_slice(e2, 1) == DC1_S1.e()
    assert restrict_slice(e1, 2) == DC1_S1(0, Fraction(1, 2))
    assert ev_top(restrict_slice(DC2_T2.P(), 1)) == CircleValue(Fraction(1, 4))


# -- holonomy -----------------------------------------------------------------------


def test_holonomy_examples():
    assert holonomy_exponent(FourierFn(1)) == 0
    assert holonomy_exponent(FourierFn.constant(1, 3)) == -3
    assert holonomy_exponent(FourierFn(1, {1: 1})) == 0


@given(fns(1))
def test_c1_hat_matches_holonomy(alpha):
    # exp(2 pi i ev(c1_hat)) = hol, i.e. tau * ev = exponent modulo tau Z
    ev = c1_hat(alpha).value.rep
    assert ev * TAU == holonomy_exponent(alpha)


# -- serialization --------------------------------------------------------------------


@given(st.one_of(s1_classes, t2_ones, t2_twos))
def test_json_round_trip(x):
    import json

    data = json.loads(json.dumps(x.to_json(), ensure_ascii=False))
    assert from_json(data) == x
