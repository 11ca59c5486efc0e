import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from k3prym import io as kio
from k3prym import lattice as lat
from k3prym import linalg as la

from .test_linalg import random_unimodular


def oracle_triple(G):
    """(r, a, delta) from the rational inverse Gram by brute force over
    0/1 combinations of dual basis vectors."""
    Gi = sp.Matrix(G).inv()
    r = len(G)
    Ginv2 = (2 * Gi).applyfunc(int)
    assert all(x == y for x, y in zip(Ginv2, 2 * Gi)), "not 2-elementary"
    a = _rank_mod2([[int(x) % 2 for x in row] for row in Ginv2.tolist()])
    delta = 0
    for c in itertools.product((0, 1), repeat=r):
        v = sp.Matrix([c])
        if not (v * Gi * v.T)[0].is_integer:
            delta = 1
            break
    return r, a, delta


def _rank_mod2(rows):
    rows = [r[:] for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                rows[i] = [(x + y) % 2 for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


@pytest.fixture(scope="module")
def emb():
    return kio.load_fixture("I17_2-in-K3")


@pytest.fixture(scope="module")
def emb_alt():
    return kio.load_fixture("I17_2-in-K3-alt")


UL = lat.U()


def sub_U(*rows):
    return lat.Embedding.of(UL, rows)


# ---------------------------------------------------------- standard lattices

def test_k3_lattice():
    L = lat.make_standard("K3")
    assert L.rank == 22 and L.signature == (3, 19)
    assert L.is_even and abs(L.det) == 1


def test_k3_fixture_matches_construction():
    L = kio.load_fixture("K3")
    assert L.rank == 22 and L.signature == (3, 19) and L.is_even and abs(L.det) == 1


def test_i17_2_gram():
    M = lat.rescale(lat.make_standard("I", 1, 7), 2)
    assert M.G == [[2 * (i == j) * (1 if i == 0 else -1) for j in range(8)] for i in range(8)]
    assert M.G == kio.load_fixture("I17_2").G


def test_make_standard_u_and_unknown():
    assert lat.make_standard("U").G == [[0, 1], [1, 0]]
    with pytest.raises(lat.LatticeError):
        lat.make_standard("D4")


# ------------------------------------------------------------------ triple

@pytest.mark.parametrize(
    "L, expected",
    [
        (lat.rescale(lat.I(1, 7), 2), (8, 8, 1)),
        (lat.rescale(lat.U(), 2), (2, 2, 0)),
        (lat.U(), (2, 0, 0)),
        (lat.A1(), (1, 1, 1)),
        (lat.E8(), (8, 0, 0)),
    ],
)
def test_triple_examples(L, expected):
    t = lat.triple(L)
    assert t.as_tuple() == expected
    assert t.as_tuple() == oracle_triple(L.G)


def test_triple_i17_2_signature():
    t = lat.triple(kio.load_fixture("I17_2"))
    assert (t.signature, t.a, t.delta) == ((1, 7), 8, 1)


def test_triple_errors():
    with pytest.raises(lat.NotTwoElementary):
        lat.triple(lat.Lattice.from_gram([[4]]))
    with pytest.raises(lat.LatticeError):
        lat.triple(lat.I(1, 1))  # odd
    with pytest.raises(lat.DegenerateLattice):
        lat.triple(lat.Lattice.from_gram([[0, 0], [0, 2]]))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["I17_2", "U2", "U+A1", "E8+U2"]), st.integers(0, 2**31))
def test_triple_invariant_under_unimodular_change(name, seed):
    L = {
        "I17_2": lat.rescale(lat.I(1, 7), 2),
        "U2": lat.rescale(lat.U(), 2),
        "U+A1": lat.direct_sum(lat.U(), lat.A1()),
        "E8+U2": lat.direct_sum(lat.E8(), lat.rescale(lat.U(), 2)),
    }[name]
    P = random_unimodular(np.random.default_rng(seed), L.rank)
    L2 = lat.Lattice.from_gram(la.matmul(la.matmul(P, L.G), la.transpose(P)))
    assert lat.triple(L2) == lat.triple(L)


# -------------------------------------------------------------- complement

def test_complement_in_u():
    P = lat.orthogonal_complement(sub_U((1, 1)))
    assert la.hnf_basis(P.B) == la.hnf_basis([[1, -1]])


def test_complement_of_full_rank_is_zero():
    assert lat.orthogonal_complement(sub_U((1, 0), (0, 1))).rank == 0


def test_complement_of_i17_2_in_k3(emb):
    P = lat.orthogonal_complement(emb)
    L = P.lattice
    assert L.rank == 14 and L.signature == (2, 12)
    t = lat.triple(L)
    assert t.a == 8 and L.is_even
    assert L.rank - 2 == 12
    assert la.inertia(L.G)[:2] == (2, 12)
    # every complement vector pairs to zero with M
    assert la.matmul(la.matmul(emb.B, emb.ambient.G), la.transpose(P.B)) == la.zeros(8, 14)
    assert lat.is_primitive(P)


def test_fixture_embedding_is_i17_2(emb, emb_alt):
    for E in (emb, emb_alt):
        assert E.lattice.G == kio.load_fixture("I17_2").G
        assert lat.is_primitive(E)


@pytest.mark.parametrize(
    "rows, expected",
    [(((1, 1),), True), (((2, 0),), False), (((1, 1), (1, -1)), False)],
)
def test_is_primitive(rows, expected):
    assert lat.is_primitive(sub_U(*rows)) is expected


# -------------------------------------------------------------------- glue

def test_glue_in_u():
    g = lat.glue_map(sub_U((1, 1)))
    assert g.source.order == 2 and g.verified and g.exhaustive
    # the generator (e+f)/2 has q = 1/2; its partner (e-f)/2 has q = -1/2
    x = g.source.generators[0]
    assert g.source.q(x) % 2 == sp.Rational(1, 2)
    assert (g.source.q(x) + g.target.q(g.images[0])) % 2 == 0


def test_glue_unimodular_sublattice():
    UU = lat.direct_sum(lat.U(), lat.U())
    E = lat.Embedding.of(UU, [(1, 0, 0, 0), (0, 1, 0, 0)])
    g = lat.glue_map(E)
    assert g.source.order == 1 and g.verified


def test_glue_i17_2_exhaustive(emb):
    g = lat.glue_map(emb)
    assert g.source.order == 2**8 == g.target.order
    assert g.exhaustive and g.checked_elements == 256
    assert g.verified


def test_glue_preconditions():
    with pytest.raises(lat.LatticeError):
        lat.glue_map(sub_U((2, 0)))
    L = lat.rescale(lat.U(), 2)
    with pytest.raises(lat.LatticeError):
        lat.glue_map(lat.Embedding.of(L, [(1, 0)]))


# --------------------------------------------------------------- involution

def test_involution_in_u_swaps_e_f():
    A = lat.involution_from_sublattice(sub_U((1, 1)))
    assert A == [[0, 1], [1, 0]]


def test_involution_full_rank_is_identity():
    assert lat.involution_from_sublattice(sub_U((1, 0), (0, 1))) == la.identity(2)


def test_involution_i17_2(emb):
    A = lat.involution_from_sublattice(emb)
    G = emb.ambient.G
    assert la.matmul(A, A) == la.identity(22)
    assert lat.is_isometry(A, G)
    fixed = lat.fixed_sublattice(A, 1)
    anti = lat.fixed_sublattice(A, -1)
    assert len(fixed) == 8 and len(anti) == 14
    assert la.hnf_basis(fixed) == la.hnf_basis(emb.B)
    assert la.hnf_basis(anti) == la.hnf_basis(lat.orthogonal_complement(emb).B)


def test_involution_not_integral():
    # <e + 2f> has norm 4; the projector has denominator 4
    with pytest.raises(lat.LatticeError, match="not integral"):
        lat.involution_from_sublattice(sub_U((1, 2)))


# ---------------------------------------------------------------- extension

def test_extend_identity(emb):
    res = lat.extend_isometry(emb, emb, la.identity(8), la.identity(14))
    assert res.compatible and res.matrix == la.identity(22)


def test_extend_minus_identity_on_u():
    E = sub_U((1, 1))
    res = lat.extend_isometry(E, E, [[-1]], [[-1]])
    assert res.matrix == [[-1, 0], [0, -1]]


def test_extend_id_minus_id_on_norm_two_is_the_swap():
    # -1 acts trivially on Z/2, so id + (-id) glues: it is the involution e <-> f
    E = sub_U((1, 1))
    res = lat.extend_isometry(E, E, [[1]], [[-1]])
    assert res.matrix == lat.involution_from_sublattice(E)


def test_extend_incompatible_on_norm_four():
    # A_M = Z/4 for <e + 2f>; -1 is a nontrivial automorphism there
    E = sub_U((1, 2))
    res = lat.extend_isometry(E, E, [[1]], [[-1]])
    assert not res.compatible and res.mismatches


def test_extend_involution_on_k3(emb):
    res = lat.extend_isometry(emb, emb, la.identity(8), la.neg(la.identity(14)))
    assert res.matrix == lat.involution_from_sublattice(emb)


def test_extend_rejects_non_isometry():
    E = sub_U((1, 1))
    with pytest.raises(lat.LatticeError):
        lat.extend_isometry(E, E, [[2]], [[1]])


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([1, -1]), st.sampled_from([1, -1]), st.integers(0, 7))
def test_extension_restricts_to_given_maps(s_phi, s_psi, k):
    # a sign change on one coordinate of M = I_{1,7}(2) is an isometry of M
    E = kio.load_fixture("I17_2-in-K3")
    phi = [[(s_phi if i == k else 1) * (i == j) for j in range(8)] for i in range(8)]
    psi = la.identity(14) if s_psi == 1 else la.neg(la.identity(14))
    res = lat.extend_isometry(E, E, phi, psi)
    if res.compatible:
        F = res.matrix
        assert lat.is_isometry(F, E.ambient.G)
        P = lat.orthogonal_complement(E)
        for i, row in enumerate(E.B):
            assert la.matvec(F, row) == la.vecmat(phi[i], E.B)
        for i, row in enumerate(P.B):
            assert la.matvec(F, row) == la.vecmat(psi[i], P.B)


# ---------------------------------------------------------------- Nikulin

def test_nikulin_examples(emb, emb_alt):
    M = lat.rescale(lat.I(1, 7), 2)
    assert lat.nikulin_isometry_class_equal(M, M)
    assert not lat.nikulin_isometry_class_equal(lat.U(), lat.rescale(lat.U(), 2))
    P1 = lat.orthogonal_complement(emb).lattice
    P2 = lat.orthogonal_complement(emb_alt).lattice
    assert P1.G != P2.G
    assert lat.nikulin_isometry_class_equal(P1, P2)


def test_nikulin_rejects_definite():
    with pytest.raises(lat.LatticeError):
        lat.nikulin_isometry_class_equal(lat.E8(), lat.E8())


def test_discriminant_orders_agree(emb, emb_alt):
    for E in (emb, emb_alt):
        A = lat.discriminant_group(E)
        B = lat.discriminant_group(lat.orthogonal_complement(E))
        assert A.order == B.order == abs(E.lattice.det) == 256


# --------------------------------------------------------------------- io

def test_matrix_file_round_trip(tmp_path, emb):
    p = tmp_path / "m.emb"
    kio.write_embedding(p, emb, "test embedding")
    E = kio.read_embedding(p)
    assert E.B == emb.B and E.ambient.G == emb.ambient.G


@pytest.mark.parametrize(
    "text",
    ["gram 2 2\n0 1\n1\n", "gram 2 2\n0 1\n1 x\n", "gram two 2\n", "gram 2 2\n0 1\n"],
)
def test_malformed_matrix_file(text):
    with pytest.raises(kio.FormatError):
        kio.parse_matrix_sections(text)
