import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from k3prym.bitangents import SolverConfig, bitangents, match_lines, perfect_square_residual
from k3prym.forms import Line, TernaryForm, X, Y, Z, restrict_to_line
from k3prym.genericity import genericity_check
from k3prym.quartics import FERMAT, make_tangent_pair, random_pair, random_smooth_quartic


def root_pairing_gap(F: TernaryForm, t: Line) -> float:
    """Oracle for double tangency: the four roots of the restriction, found
    by numpy in an affine chart, split into two coincident pairs."""
    g = np.array(restrict_to_line(F.numeric(), t).complex_coeffs())
    g = g / np.max(np.abs(g))
    # random Moebius shift keeps roots away from infinity
    c = 0.37 + 0.61j
    shifted = np.zeros(5, dtype=complex)
    for n in range(5):
        for m in range(n + 1):
            shifted[n] += g[m] * sp.binomial(4 - m, n - m) * c ** (n - m)
    r = np.roots(shifted[::-1])
    r = np.concatenate([r, [np.inf] * (4 - len(r))])
    best = min(
        abs(r[i] - r[j]) + abs(r[k] - r[l]) for i, j, k, l in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))
    )
    return float(best / (1 + np.max(np.abs(r))))


def fermat_hyperflex_lines():
    """The 12 lines x_i = e x_j with e^4 = -1 meet x^4 + y^4 + z^4 in one point."""
    out = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        for k in range(4):
            e = np.exp(1j * np.pi * (2 * k + 1) / 4)
            v = [0j, 0j, 0j]
            v[i], v[j] = 1, -e
            out.append(Line(tuple(v)))
    return out


@pytest.fixture(scope="module")
def fermat_result():
    return bitangents(FERMAT)


def test_fermat_28_with_12_hyperflexes(fermat_result):
    res = fermat_result
    assert res.count == 28 and res.status == "hyperflex" and res.certified
    assert len(res.hyperflexes) == 12 and len(res.proper) == 16
    assert res.max_residual < 1e-9 and res.min_separation > 1e-4
    oracle = fermat_hyperflex_lines()
    hits = match_lines(oracle, [r.line for r in res.hyperflexes], 1e-8)
    assert sorted(i for i, _, _ in hits) == list(range(12))


def test_fermat_lines_pass_root_oracle(fermat_result):
    # a fourfold root only resolves to about eps^(1/4)
    for r in fermat_result.lines:
        tol = 1e-3 if r.classification == "hyperflex" else 1e-5
        assert root_pairing_gap(FERMAT, r.line) < tol


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_seeded_quartics_have_28(seed):
    F = random_smooth_quartic(random.Random(seed))
    res = bitangents(F, seed=seed)
    assert res.status == "complete" and res.count == 28
    assert res.max_residual < 1e-9
    for r in res.lines:
        assert root_pairing_gap(F, r.line) < 1e-5
    # the set does not depend on the solver seed
    again = bitangents(F, seed=seed + 1000)
    assert len(match_lines([r.line for r in res.lines], [r.line for r in again.lines], 1e-7)) == 28


def test_bitangents_are_projectively_covariant():
    F = random_smooth_quartic(random.Random(11))
    T = [[1, 2, 0], [0, 1, -1], [1, 0, 1]]
    res = bitangents(F, seed=3)
    res_t = bitangents(F.compose(T), seed=4)
    # if F(T v) = 0 then the line l maps to T^t l
    Tt = np.array(T, dtype=float).T
    moved = [Line(tuple(Tt @ r.line.as_array())) for r in res.lines]
    assert len(match_lines(moved, [r.line for r in res_t.lines], 1e-7)) == 28


def test_small_budget_reports_incomplete():
    F = random_smooth_quartic(random.Random(2))
    res = bitangents(F, config=SolverConfig(starts=2, rounds=1, charts=1))
    assert res.status == "incomplete" and not res.certified
    assert res.count < 28 and res.notes


def test_hyperflex_quartic_is_labelled():
    F = TernaryForm.from_sympy(X**3 * Y + Y**4 + Z**4, 4)
    res = bitangents(F)
    assert res.status == "hyperflex"
    assert match_lines([Line.of(0, 1, 0)], [r.line for r in res.hyperflexes], 1e-8)


def test_perfect_square_residual():
    # (s^2 + 2su - 3u^2)^2 * 5
    q = np.polynomial.polynomial.polymul([-3, 2, 1], [-3, 2, 1])[::-1] * 5
    res, p, qq = perfect_square_residual(q)
    assert res < 1e-14
    res, *_ = perfect_square_residual(np.array([1, 0, 0, 0, 1], dtype=complex))
    assert res > 0.1


def test_rejects_non_quartic():
    with pytest.raises(ValueError):
        bitangents(TernaryForm.from_sympy(X**2 + Y**2 + Z**2, 2))


# ------------------------------------------------------------- genericity

def test_seeded_pair_is_generic():
    B0, Q, mu = random_pair(0)
    rep = make_tangent_pair(B0, Q, mu * mu, seed=0)
    gen = genericity_check(B0, rep.Delta0, seed=0)
    assert gen.status == "pass"
    assert gen.conditions == {"no_hyperflex": True, "no_shared_tangency": True, "no_common_bitangent": True}


def test_common_bitangent_pair_fails():
    # z = 0 is a bitangent of B0 touching at (1 : +-1 : 0), on Q, so it is a
    # bitangent of Delta0 = Q^2 - B0/4 as well, with the same contact points
    B0 = TernaryForm.from_sympy(
        sp.expand((X**2 - Y**2) ** 2 + Z * (X**3 + 2 * Y**3 - X * Y * Z + 3 * Z**3 + X * Z**2)), 4
    )
    Q = TernaryForm.from_sympy(sp.expand(X**2 - Y**2 + Z * (X + 2 * Y + 3 * Z)), 2)
    rep = make_tangent_pair(B0, Q, Fraction(1, 4))
    gen = genericity_check(B0, rep.Delta0)
    assert gen.status == "fail"
    assert gen.no_shared_tangency is False and gen.no_common_bitangent is False
    reported = [Line(tuple(complex(c.replace("i", "j")) for c in w["line"])) for w in gen.witnesses["common_bitangents"]]
    assert match_lines([Line.of(0, 0, 1)], reported, 1e-8)


def test_fermat_fails_hyperflex_condition():
    rep = make_tangent_pair(FERMAT, TernaryForm.from_sympy(X**2 + Y**2 + Z**2, 2), Fraction(1, 2))
    gen = genericity_check(FERMAT, rep.Delta0)
    assert gen.no_hyperflex is False and gen.status == "fail"
    assert len(gen.witnesses["hyperflex_lines"]) == 12


def test_incomplete_solver_gives_inconclusive():
    B0, Q, mu = random_pair(1)
    rep = make_tangent_pair(B0, Q, mu * mu, seed=1)
    gen = genericity_check(B0, rep.Delta0, config=SolverConfig(starts=2, rounds=1, charts=1))
    assert gen.status == "inconclusive"
    assert None in gen.conditions.values()
