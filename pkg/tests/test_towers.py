from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from k3prym.forms import Line, TernaryForm, X, Y, Z
from k3prym.towers import (
    BranchData,
    CurveModel,
    NonGenericLine,
    TowerInstance,
    bigonal_dual,
    dual_model,
    dual_of_dual_branch,
    fermat_instance,
    instance_from_json,
    instance_to_json,
    match_roots,
    p_add,
    p_roots,
    random_instance,
    slice_tower,
    verify_branch_swap,
    verify_swapped_model,
)

U = sp.Symbol("u")


def degenerate_instance():
    B0 = TernaryForm.from_sympy(
        sp.expand((X**2 - Y**2) ** 2 + Z * (X**3 + 2 * Y**3 - X * Y * Z + 3 * Z**3 + X * Z**2)), 4
    )
    Q = TernaryForm.from_sympy(sp.expand(X**2 - Y**2 + Z * (X + 2 * Y + 3 * Z)), 2)
    return TowerInstance(B0, Q, Fraction(1, 2), Line.of(0, 0, 1))


def tower(inst):
    branch, model = slice_tower(inst)
    return branch, model, bigonal_dual(model, inst.restrictions()[2]).model


# ------------------------------------------------------------------ slicing

def test_fermat_branch_points():
    branch, model = slice_tower(fermat_instance())
    # b = 1 + u^4 and d = q^2 - b/2 with q = 1 + u^2, so d = (u^4 + 4u^2 + 1)/2
    assert [Fraction(c) for c in branch.b] == [1, 0, 0, 0, 1]
    assert [Fraction(c) for c in branch.d] == [Fraction(1, 2), 0, 2, 0, Fraction(1, 2)]
    for p in branch.p:
        assert min(abs(p * p - (-2 + s * np.sqrt(3))) for s in (1, -1)) < 1e-12
    for a in branch.a:
        assert abs(a**4 + 1) < 1e-12


def test_degenerate_line_raises_with_witness():
    with pytest.raises(NonGenericLine) as err:
        slice_tower(degenerate_instance())
    assert err.value.witness["reason"] == "double root in b(u)"


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**5))
def test_pencil_identity_and_genus(seed):
    inst = random_instance(seed)
    branch, model = slice_tower(inst)
    b, q, d = (sp.Poly(list(reversed([sp.Rational(str(c)) for c in poly])), U) for poly in inst.restrictions())
    lam = sp.Rational(str(inst.lam))
    assert d == q**2 - lam * b
    led = model.genus_ledger()
    assert led["valid"] and led["genus_C"] == 3 and led["genus_E"] == 1
    # oracle: Riemann-Hurwitz for the quartic cover with 4 branch points of
    # type 2+2 and 4 of type 2+1+1
    assert 2 - 2 * led["genus_C"] == 4 * 2 - (4 * 2 + 4 * 1)


# ----------------------------------------------------------- bigonal dual

@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**5))
def test_dual_identities(seed):
    inst = random_instance(seed)
    branch, model = slice_tower(inst)
    rep = bigonal_dual(model, inst.restrictions()[2], seed=seed)
    assert rep.pencil_identity is True and rep.max_numeric_error < 1e-9
    # the dual only depends on mu through mu^2
    neg = dual_model(CurveModel(model.D, -model.alpha, model.beta))
    assert (neg.D, neg.alpha, neg.beta) == (rep.model.D, rep.model.alpha, rep.model.beta)
    assert verify_branch_swap(branch, rep.model).passed
    lower, upper = dual_of_dual_branch(model)
    assert match_roots(lower, model.lower_branch_points())[0] < 1e-9
    assert match_roots(upper, model.upper_branch_points())[0] < 1e-9


def test_branch_swap_catches_perturbed_d():
    branch, model, dual = tower(random_instance(3))
    d_bad = p_add(branch.d, (Fraction(1, 1000),))
    bad = BranchData(branch.b, d_bad, branch.a, tuple(p_roots(d_bad)))
    rep = verify_branch_swap(bad, dual)
    assert rep.status == "fail" and rep.exact
    assert rep.details["lower_equals_d"] is False
    assert rep.witness["offending_point"]


def test_branch_swap_numeric_path():
    branch, model, dual = tower(fermat_instance())
    rep = verify_branch_swap(branch, dual)
    assert rep.passed and not rep.exact


@pytest.mark.parametrize("make", [lambda: random_instance(5), fermat_instance])
def test_swapped_model_matches_dual(make):
    inst = make()
    branch, model, dual = tower(inst)
    _, sw = slice_tower(inst.swapped())
    rep = verify_swapped_model(model, dual, sw, branch)
    assert rep.passed, rep.details
    assert len(set(rep.details["signs"])) == 1


def test_swapped_model_rejects_other_pencil_member():
    # the swapped tower of a different member Q^2 - lam' B0 is not the dual
    inst = random_instance(5)
    branch, model, dual = tower(inst)
    other = TowerInstance(inst.B0, inst.Q, inst.mu * 2, inst.line, check_smooth=False)
    _, sw = slice_tower(other.swapped())
    rep = verify_swapped_model(model, dual, sw, branch)
    assert rep.status == "fail" and rep.witness


def test_swap_twice_returns_original():
    inst = random_instance(2)
    back = inst.swapped().swapped()
    assert back.B0 == inst.B0 and back.mu == inst.mu
    assert back.Q == inst.Q


# --------------------------------------------------------------- records

def test_instance_json_round_trip():
    inst = random_instance(9)
    again = instance_from_json(instance_to_json(inst))
    assert (again.B0, again.Q, again.mu, again.line.coords) == (inst.B0, inst.Q, inst.mu, inst.line.coords)
    f = fermat_instance()
    again = instance_from_json(instance_to_json(f))
    assert again.lam == Fraction(1, 2) and abs(again.mu - f.mu) < 1e-15


@pytest.mark.parametrize(
    "patch, field",
    [({"mu": "x"}, "mu"), ({"B0": ["1"] * 14}, "B0"), ({"line": ["a", "0", "1"]}, "line")],
)
def test_instance_errors_name_field(patch, field):
    obj = instance_to_json(random_instance(1))
    obj.update(patch)
    with pytest.raises(ValueError, match=field):
        instance_from_json(obj)


def test_zero_mu_rejected():
    inst = random_instance(1)
    with pytest.raises(ValueError):
        TowerInstance(inst.B0, inst.Q, 0, inst.line)
