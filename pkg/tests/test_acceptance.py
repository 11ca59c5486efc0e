"""Acceptance criteria 1-11, each at its stated tolerance and time limit.

Every test records a single ``criterion N: PASS|FAIL ...`` line, printed at
the end of the run by ``conftest.pytest_terminal_summary``.
"""

import contextlib
import random
import time

import pytest

from k3prym import io as kio
from k3prym import linalg as la
from k3prym.bitangents import bitangents
from k3prym.cli import instance_seed, main
from k3prym.genericity import genericity_check
from k3prym.homology import CoverPresentation
from k3prym.lattice import (
    fixed_sublattice,
    glue_map,
    involution_from_sublattice,
    is_isometry,
    is_primitive,
    orthogonal_complement,
    triple,
)
from k3prym.monodromy import cycle_type, fiber_monodromy
from k3prym.pipeline import Context, instance_claims, prym_profile, summarize
from k3prym.quartics import FERMAT, make_tangent_pair, points_on_conic, proportionality_distance, random_smooth_quartic
from k3prym.towers import (
    bigonal_dual,
    dual_model,
    match_roots,
    random_instance,
    slice_tower,
    verify_branch_swap,
    verify_swapped_model,
)

from .conftest import ACCEPTANCE

N_INSTANCES = 10
SEED = 0


@contextlib.contextmanager
def criterion(number: int, text: str):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        secs = time.perf_counter() - start
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {text}  ({secs:.2f} s)"
        ACCEPTANCE[number] = line
        print(line)


def same_row_span(A, B) -> bool:
    return la.hnf_basis(A) == la.hnf_basis(B)


@pytest.fixture(scope="module")
def embedding():
    return kio.load_fixture("I17_2-in-K3")


@pytest.fixture(scope="module")
def instances():
    return [random_instance(instance_seed(SEED, i)) for i in range(N_INSTANCES)]


# ------------------------------------------------------------ lattices

def test_criterion_01_triple():
    with criterion(1, "triple(I_{1,7}(2)) = ((1,7), 8, 1), < 1 s"):
        t0 = time.perf_counter()
        t = triple(kio.load_fixture("I17_2"))
        assert (t.signature, t.a, t.delta) == ((1, 7), 8, 1)
        assert t.r == 8
        assert time.perf_counter() - t0 < 1.0


def test_criterion_02_k3_lattice():
    with criterion(2, "K3 lattice: signature (3,19), even, |det| = 1, < 1 s"):
        t0 = time.perf_counter()
        L = kio.load_fixture("K3")
        assert L.signature == (3, 19) and L.is_even and abs(L.det) == 1
        assert time.perf_counter() - t0 < 1.0


def test_criterion_03_complement(embedding):
    with criterion(3, "complement: signature (2,12), 2-elementary a = 8, moduli dimension 12"):
        assert is_primitive(embedding)
        perp = orthogonal_complement(embedding).lattice
        t = triple(perp)
        assert t.signature == (2, 12) and t.a == 8
        assert perp.rank - 2 == 12


def test_criterion_04_glue(embedding):
    with criterion(4, "glue map anti-isometry on all 2^8 discriminant elements, < 10 s"):
        t0 = time.perf_counter()
        gm = glue_map(embedding, exhaustive=True)
        assert gm.exhaustive and gm.checked_elements == 2**8
        assert gm.verified and gm.checks["anti_isometry"]
        assert time.perf_counter() - t0 < 10.0


def test_criterion_05_involution(embedding):
    with criterion(5, "involution: integral, fixed lattice M, anti-fixed M-perp"):
        A = involution_from_sublattice(embedding)
        n = len(A)
        assert la.matmul(A, A) == la.identity(n)
        assert is_isometry(A, embedding.ambient.G)
        assert same_row_span(fixed_sublattice(A, 1), embedding.B)
        perp = orthogonal_complement(embedding)
        assert same_row_span(fixed_sublattice(A, -1), perp.B)


# ------------------------------------------------------------ bitangents

def test_criterion_06_bitangents():
    with criterion(6, "28 certified bitangents: Fermat + 5 seeded quartics, residual < 1e-9, < 60 s each"):
        quartics = [FERMAT] + [random_smooth_quartic(random.Random(s)) for s in range(1, 6)]
        for F in quartics:
            t0 = time.perf_counter()
            res = bitangents(F)
            assert res.certified and res.count == 28
            assert 2 * res.count == 56
            assert res.max_residual < 1e-9
            assert time.perf_counter() - t0 < 60.0


# ------------------------------------------------------------ pairs

def test_criterion_07_pairs(instances):
    with criterion(7, f"{N_INSTANCES} pairs: 8 tangency points of multiplicity 2 on a recovered conic, genericity report"):
        for inst in instances:
            rep = make_tangent_pair(inst.B0, inst.Q, inst.lam, seed=inst.seed)
            assert rep.status == "U-member"
            assert len(rep.tangency_points) == 8 and rep.multiplicities == [2] * 8
            fit = points_on_conic(rep.tangency_points)
            assert fit.found and fit.residual < 1e-8
            assert proportionality_distance(fit.conic, inst.Q) < 1e-8
            gen = genericity_check(inst.B0, rep.Delta0, seed=inst.seed)
            assert gen.status in ("pass", "fail", "inconclusive")
            assert set(gen.conditions) == {"no_hyperflex", "no_shared_tangency", "no_common_bitangent"}


# ------------------------------------------------------------ towers

@pytest.fixture(scope="module")
def towers(instances):
    out = []
    for inst in instances:
        branch, model = slice_tower(inst)
        dual_rep = bigonal_dual(model, inst.restrictions()[2], seed=SEED)
        out.append({"inst": inst, "branch": branch, "model": model, "dual_rep": dual_rep})
    return out


def test_criterion_08_tower_identities(towers):
    with criterion(8, f"{N_INSTANCES} towers: d = q^2 - lam b, genus 3 over 1, cycle types, product id, transitive"):
        for t in towers:
            assert t["dual_rep"].pencil_identity is True
            led = t["model"].genus_ledger()
            assert led["valid"] and led["genus_C"] == 3 and led["genus_E"] == 1
            M = fiber_monodromy(t["model"], seed=SEED)
            for kind, p in zip(M.kinds, M.perms):
                assert cycle_type(p) == ((2, 2) if kind == "lower" else (2, 1, 1))
            assert M.product == (0, 1, 2, 3) and M.transitive
            t["monodromy"] = M


def test_criterion_09_duality(towers):
    with criterion(9, f"{N_INSTANCES} towers: branch swap, eta = +q(a_i) on all four, branch divisors agree, dual of dual"):
        for t in towers:
            branch, model, dual = t["branch"], t["model"], t["dual_rep"].model
            swap = verify_branch_swap(branch, dual, tol=1e-10)
            assert swap.passed and swap.exact
            _, sw = slice_tower(t["inst"].swapped())
            rep = verify_swapped_model(model, dual, sw, branch)
            assert rep.details["signs"] == ["+"] * 4
            assert rep.passed
            back = dual_model(sw)
            assert match_roots(back.lower_branch_points(), list(branch.a))[0] < 1e-10
            assert match_roots(back.upper_branch_points(), list(branch.p))[0] < 1e-10
            dd = dual_model(dual)
            assert match_roots(dd.lower_branch_points(), list(branch.a))[0] < 1e-10
            assert match_roots(dd.upper_branch_points(), list(branch.p))[0] < 1e-10


def test_criterion_10_prym(towers):
    with criterion(10, f"{N_INSTANCES} towers and duals: Prym rank 4, type (1,2), component order 1, < 120 s each"):
        for t in towers:
            M = t.get("monodromy") or fiber_monodromy(t["model"], seed=SEED)
            Md = fiber_monodromy(t["dual_rep"].model, seed=SEED)
            for mono in (M, Md):
                prof = prym_profile(CoverPresentation.from_monodromy(mono))
                assert prof["H1_rank"] == 6 and prof["det_J"] == 1
                assert prof["prym_rank"] == 4
                assert prof["polarization_type"] == [1, 2]
                assert prof["component_order"] == 1
        # end to end, every claim on one instance from its record
        t0 = time.perf_counter()
        claims = instance_claims(towers[0]["inst"], Context(seed=SEED))
        assert summarize(claims) == "pass"
        assert time.perf_counter() - t0 < 120.0


# ------------------------------------------------------------ determinism

def test_criterion_11_determinism(tmp_path, capsys):
    with criterion(11, "suite with a fixed seed gives byte-identical reports twice"):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["suite", "--seed", "11", "--count", "3", "--out", str(a)]) == 0
        assert main(["suite", "--seed", "11", "--count", "3", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
