import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from k3prym.forms import Line, TernaryForm, X, Y, Z, fs_distance, monomials, restrict_to_line
from k3prym.quartics import (
    FERMAT,
    FERMAT_CONIC,
    NotSmooth,
    classify_tangency,
    is_smooth,
    make_tangent_pair,
    points_on_conic,
    proportionality_distance,
    random_pair,
    random_smooth_quartic,
)

S, U = sp.symbols("s u")


def form(expr, degree):
    return TernaryForm.from_sympy(sp.expand(expr), degree)


def oracle_restriction(F: TernaryForm, t: Line):
    """Coefficients of F(s P0 + u P1) by direct sympy substitution."""
    P0, P1 = t.parametrization()
    sub = {v: sp.nsimplify(a) * S + sp.nsimplify(b) * U for v, a, b in zip((X, Y, Z), P0, P1)}
    poly = sp.Poly(sp.expand(F.to_sympy().subs(sub, simultaneous=True)), S, U)
    d = F.degree
    return [poly.coeff_monomial(S ** (d - i) * U ** i) for i in range(d + 1)]


# ------------------------------------------------------------ restriction

def test_restriction_examples():
    z0 = Line.of(0, 0, 1)
    g = restrict_to_line(FERMAT, z0)
    assert [Fraction(c) for c in g.coeffs] == [1, 0, 0, 0, 1]
    g = restrict_to_line(FERMAT_CONIC, z0)
    assert [Fraction(c) for c in g.coeffs] == [1, 0, 1]
    F = form(Z * (X**3 + Y**3 + Z**3), 4)
    assert restrict_to_line(F, z0).is_zero


coef = st.integers(-3, 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=15, max_size=15), st.tuples(coef, coef, coef))
def test_restriction_matches_substitution(cs, line):
    if not any(cs) or not any(line):
        return
    F = TernaryForm(4, cs)
    t = Line.of(*line)
    ours = restrict_to_line(F, t).coeffs
    assert [sp.Rational(str(Fraction(c))) for c in ours] == oracle_restriction(F, t)
    # every parametrized point lies on the line
    for s_, u_ in ((1, 0), (0, 1), (2, -3)):
        p = t.point(s_, u_)
        assert sum(a * b for a, b in zip(t.coords, p)) == 0


def test_monomial_order():
    assert monomials(2) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    assert len(monomials(4)) == 15


# ------------------------------------------------------------- smoothness

def test_smoothness_examples():
    assert is_smooth(FERMAT)
    assert not is_smooth(form((X**2 + Y**2 + Z**2) ** 2, 4))
    F = form((X**2 - Y**2) ** 2 + Z**4, 4)
    assert not is_smooth(F)
    # oracle: all partials vanish at (1 : +-1 : 0)
    for p in ((1, 1, 0), (1, -1, 0)):
        assert all(F.partial(i)(p) == 0 for i in range(3))


def test_smoothness_of_float_form_is_exact():
    Fn = TernaryForm(4, [float(c) for c in FERMAT.coeffs], exact=False)
    assert is_smooth(Fn)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6))
def test_smoothness_is_projectively_invariant(seed):
    rng = random.Random(seed)
    F = random_smooth_quartic(rng)
    while True:
        T = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        if sp.Matrix(T).det() != 0:
            break
    assert is_smooth(F.compose(T))
    # a reducible quartic is singular where its components meet
    L = TernaryForm(1, [rng.randint(1, 3), rng.randint(-3, 3), rng.randint(-3, 3)])
    C = TernaryForm(3, [rng.randint(-3, 3) for _ in range(10)])
    if any(C.coeffs):
        assert not is_smooth(L * C)


# --------------------------------------------------------- classification

@pytest.mark.parametrize(
    "expr, expected",
    [
        (Y * (X**3 + Y * Z**2) + X**2 * Z * (X + Z), "simple-tangent"),
        (Y * (X**3 + Y * Z**2) + X**3 * Z, "flex"),
        (Y * (X**3 + Y * Z**2) + X**2 * Z**2, "bitangent"),
        (X**3 * Y + Y**4 + Z**4, "hyperflex"),
        (Y * (X**3 + Y * Z**2) + X * Z * (X + Z) * (X - 2 * Z), "ordinary"),
    ],
)
def test_classify_on_y_zero(expr, expected):
    F = form(expr, 4)
    t = Line.of(0, 1, 0)
    rep = classify_tangency(F, t)
    assert rep.classification == expected and rep.exact
    # the numeric path agrees
    Fn = TernaryForm(4, [complex(c) for c in F.coeffs], exact=False)
    assert classify_tangency(Fn, Line.of(0j, 1 + 0j, 0j)).classification == expected


def test_classify_fermat_line_ordinary():
    assert classify_tangency(FERMAT, Line.of(0, 0, 1)).classification == "ordinary"


def test_hyperflex_point():
    rep = classify_tangency(form(X**3 * Y + Y**4 + Z**4, 4), Line.of(0, 1, 0))
    (p, m), = rep.points
    assert m == 4 and np.allclose(p, (1, 0, 0))


def test_classify_rejects_component():
    with pytest.raises(ValueError):
        classify_tangency(form(Z * (X**3 + Y**3 + Z**3), 4), Line.of(0, 0, 1))


# ------------------------------------------------------------------ pairs

def test_fermat_pair_half():
    rep = make_tangent_pair(FERMAT, FERMAT_CONIC, Fraction(1, 2))
    assert rep.status == "U-member"
    assert len(rep.tangency_points) == 8 and rep.multiplicities == [2] * 8
    assert rep.total_intersection == 16


def test_fermat_pair_two_splits_into_lines():
    rep = make_tangent_pair(FERMAT, FERMAT_CONIC, 2)
    assert rep.status == "degenerate"
    factors = sp.factor_list(rep.Delta0.to_sympy(), extension=None)[1]
    assert sum(m * sp.Poly(f, X, Y, Z).total_degree() for f, m in factors) == 4
    target = -(X**2 - (Y + Z) ** 2) * (X**2 - (Y - Z) ** 2)
    assert sp.expand(rep.Delta0.to_sympy() - target) == 0
    assert rep.witness["singular_points"]


def test_lambda_zero_is_double_conic():
    rep = make_tangent_pair(FERMAT, FERMAT_CONIC, 0)
    assert rep.status == "Q-locus"
    assert rep.Delta0 == FERMAT_CONIC * FERMAT_CONIC


def test_singular_conic_rejected():
    with pytest.raises(NotSmooth):
        make_tangent_pair(FERMAT, form(X**2 - Y**2, 2), Fraction(1, 2))


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10**6))
def test_pair_tangency_oracle(seed):
    B0, Q, mu = random_pair(seed)
    rep = make_tangent_pair(B0, Q, mu * mu, seed=seed)
    assert rep.status == "U-member" and len(rep.tangency_points) == 8
    Bn, Qn, Dn = B0.numeric(), Q.numeric(), rep.Delta0.numeric()
    for p in rep.tangency_points:
        p = np.asarray(p, dtype=complex)
        p = p / np.linalg.norm(p)
        assert abs(Bn(tuple(p))) < 1e-8 * Bn.norm() and abs(Qn(tuple(p))) < 1e-8 * Qn.norm()
        # tangency: the gradients of B0 and Delta0 are proportional at p
        gb = np.asarray(Bn.gradient(tuple(p)), dtype=complex)
        gd = np.asarray(Dn.gradient(tuple(p)), dtype=complex)
        assert fs_distance(gb, gd) < 1e-7
    fit = points_on_conic(rep.tangency_points)
    assert fit.found and proportionality_distance(fit.conic, Q) < 1e-8


# ------------------------------------------------------------------ conics

def test_points_on_conic_from_parametrization():
    # (x : y : z) = (1 - t^2 : 2t : 1 + t^2) lies on x^2 + y^2 - z^2
    pts = [(1 - t * t, 2 * t, 1 + t * t) for t in (0.3, -1.2, 2.0, 0.7, -0.4, 5.0, 1.5, -3.0)]
    fit = points_on_conic(pts)
    assert fit.found
    assert proportionality_distance(fit.conic, form(X**2 + Y**2 - Z**2, 2)) < 1e-10


def test_generic_points_lie_on_no_conic():
    rng = np.random.default_rng(1)
    pts = list(rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3)))
    assert not points_on_conic(pts).found


def test_points_on_conic_needs_six_points():
    with pytest.raises(ValueError):
        points_on_conic([(1, 0, 0)] * 5)
