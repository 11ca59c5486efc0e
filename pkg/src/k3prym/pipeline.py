"""End-to-end verification runs producing claim records.

A claim record is a dict ``{"claim", "status", "details", ["witness"]}``
with ``status`` in ``pass | fail | inconclusive``; every non-pass record
carries a witness.  Floats in records are rounded so that reports are
reproducible byte for byte.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bitangents import SolverConfig
from .forms import fmt_number
from .genericity import genericity_check
from .homology import (
    CoverPresentation,
    PresentationError,
    PrymError,
    homology_with_intersection,
    polarization_type,
    prym_sublattice,
)
from .monodromy import TrackingError, fiber_monodromy
from .quartics import make_tangent_pair, points_on_conic, proportionality_distance
from .towers import (
    CurveModel,
    p_is_exact,
    p_mul,
    p_numeric,
    p_scale,
    p_sub,
    p_trim,
    NonGenericLine,
    TowerInstance,
    bigonal_dual,
    dual_model,
    match_roots,
    slice_tower,
    verify_branch_swap,
    verify_swapped_model,
)

DEFAULT_TOLERANCES = {
    "bitangent_dedup": 1e-6,
    "bitangent_residual": 1e-9,
    "bitangent_separation": 1e-4,
    "conic_residual": 1e-8,
    "identity": 1e-10,
    "root_match": 1e-10,
    "line_match": 1e-6,
}


def sig(x: float, digits: int = 3) -> float:
    """Round to ``digits`` significant figures (stable report values)."""
    return float(f"{x:.{digits - 1}e}")


def record(claim: str, ok: Optional[bool], details: dict, witness: Optional[dict] = None) -> dict:
    status = "pass" if ok else ("inconclusive" if ok is None else "fail")
    out = {"claim": claim, "status": status, "details": details}
    if status != "pass":
        out["witness"] = witness if witness is not None else {"details": "see details"}
    return out


@dataclass
class Context:
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    timings: bool = False

    def solver(self) -> SolverConfig:
        t = self.tolerances
        return SolverConfig(
            dedup_tol=t["bitangent_dedup"],
            residual_tol=t["bitangent_residual"],
            separation_tol=t["bitangent_separation"],
        )


def timed(ctx: Context, fn: Callable[[], dict]) -> dict:
    return timed_pair(ctx, lambda: (fn(), None))[0]


def timed_pair(ctx: Context, fn: Callable[[], tuple]) -> tuple:
    """Like :func:`timed` for functions returning ``(record, extra)``."""
    t0 = time.perf_counter()
    rec, extra = fn()
    if ctx.timings:
        rec["seconds"] = round(time.perf_counter() - t0, 3)
    return rec, extra


# ------------------------------------------------------------------ pairs

def pair_claims(inst: TowerInstance, ctx: Context) -> list[dict]:
    return pair_claims_for(inst.B0, inst.Q, inst.lam, inst.seed, ctx)


def pair_claims_for(B0, Q, lam, seed: int, ctx: Context, genericity: bool = True) -> list[dict]:
    """Tangency, conic and (optionally) genericity claims for ``Q^2 - lam B0``."""
    tol = ctx.tolerances
    out = []
    pair = make_tangent_pair(B0, Q, lam, seed=seed)

    def tangency():
        ok = (
            pair.status == "U-member"
            and len(pair.tangency_points) == 8
            and pair.multiplicities == [2] * 8
            and pair.certificate.get("Res_B0_Delta0_equals_c_R8_squared") is True
        )
        return record(
            "pair.tangency",
            ok,
            {
                "status": pair.status,
                "points": len(pair.tangency_points),
                "multiplicities": pair.multiplicities,
                "total_intersection": pair.total_intersection,
                "certificate": pair.certificate,
            },
            pair.witness,
        )

    out.append(timed(ctx, tangency))

    def conic():
        if pair.status != "U-member":
            return record("pair.conic_through_tangency_points", None, {}, {"reason": "no U-member pair"})
        fit = points_on_conic(pair.tangency_points, tol=tol["conic_residual"])
        dist = proportionality_distance(fit.conic, Q) if fit.found else None
        ok = fit.found and dist < tol["conic_residual"] and fit.max_point_residual < tol["conic_residual"]
        return record(
            "pair.conic_through_tangency_points",
            ok,
            {
                "smallest_singular_value": sig(fit.residual),
                "gap": sig(fit.gap),
                "distance_to_Q": None if dist is None else sig(dist),
                "max_point_residual": sig(fit.max_point_residual) if fit.found else None,
            },
        )

    out.append(timed(ctx, conic))

    if genericity:
        out.append(timed(ctx, lambda: genericity_claim(B0, pair.Delta0, ctx)))
    return out


def genericity_claim(B0, Delta0, ctx: Context) -> dict:
    rep = genericity_check(
        B0, Delta0, seed=ctx.seed, config=ctx.solver(), match_tol=ctx.tolerances["line_match"]
    )
    ok = {"pass": True, "fail": False}.get(rep.status)
    details = rep.to_json()
    details.pop("witnesses", None)
    for key, res in (("B0", rep.B0_bitangents), ("Delta0", rep.Delta0_bitangents)):
        details[f"{key}_max_residual"] = sig(res.max_residual)
    return record("pair.genericity", ok, details, rep.witnesses or None)


# ----------------------------------------------------------------- towers

def _monodromy_claim(name: str, model: CurveModel, ctx: Context) -> tuple[dict, Optional[CoverPresentation]]:
    try:
        M = fiber_monodromy(model, seed=ctx.seed)
    except TrackingError as exc:
        return record(name, False, {}, {"tracking": str(exc)}), None
    types = M.cycle_types()
    expected = {"lower": (2, 2), "upper": (2, 1, 1)}
    types_ok = all(t == expected[k] for t, k in zip(types, M.kinds))
    details = M.to_json()
    details["cycle_types_ok"] = types_ok
    ok = types_ok and details["product_is_identity"] and details["transitive"]
    pres = None
    if ok:
        pres = CoverPresentation.from_monodromy(M)
    return record(name, ok, details), pres


def prym_profile(pres: CoverPresentation) -> dict:
    h = homology_with_intersection(pres)
    checks = h.checks()
    prym = prym_sublattice(h)
    return {
        "genus": pres.genus,
        "euler": h.euler,
        "H1_rank": checks["rank"],
        "det_J": checks["det_J"],
        "tau_involution": checks["tau_involution"],
        "tau_symplectic": checks["tau_symplectic"],
        "invariant_rank": checks["invariant_rank"],
        "prym_rank": prym.rank,
        "polarization_type": list(polarization_type(prym.pairing)),
        "full_type": list(polarization_type(h.J)),
        "component_order": prym.component_order,
        "anti_invariant_index": prym.anti_index,
    }


EXPECTED_PROFILE = {
    "genus": 3,
    "H1_rank": 6,
    "det_J": 1,
    "tau_involution": True,
    "tau_symplectic": True,
    "invariant_rank": 2,
    "prym_rank": 4,
    "polarization_type": [1, 2],
    "full_type": [1, 1, 1],
    "component_order": 1,
}


def _prym_claim(name: str, pres: Optional[CoverPresentation]) -> tuple[dict, Optional[dict]]:
    if pres is None:
        return record(name, None, {}, {"reason": "no valid cover presentation"}), None
    try:
        prof = prym_profile(pres)
    except (PresentationError, PrymError) as exc:
        witness = {"error": str(exc)}
        witness.update(getattr(exc, "witness", None) or {})
        return record(name, False, {}, witness), None
    bad = {k: prof[k] for k, v in EXPECTED_PROFILE.items() if prof[k] != v}
    return record(name, not bad, prof, {"unexpected": bad} if bad else None), prof


TOWER_CLAIMS = (
    "tower.pencil_identity",
    "tower.genus_ledger",
    "bigonal.dual_identities",
    "bigonal.branch_swap",
    "bigonal.swapped_model",
    "bigonal.dual_of_dual",
    "tower.monodromy",
    "dual.monodromy",
    "prym.tower",
    "prym.dual",
    "prym.loop_system_independence",
)


def tower_claims(inst: TowerInstance, ctx: Context, select: Optional[set] = None) -> list[dict]:
    """Claims about the tower over the line of ``inst`` and its bigonal dual.

    ``select`` restricts the run to a subset of :data:`TOWER_CLAIMS`; the
    monodromy records are kept whenever a Prym claim needs them.
    """
    tol = ctx.tolerances
    select = set(TOWER_CLAIMS) if select is None else set(select)
    out = []
    try:
        branch, model = slice_tower(inst)
    except NonGenericLine as exc:
        return [record("tower.slice", False, {}, exc.witness)]
    b, q, d = inst.restrictions()

    def add(name, fn):
        if name in select:
            out.append(timed(ctx, fn))

    def pencil():
        rhs = p_sub(p_mul(q, q), p_scale(b, inst.lam))
        exact = p_is_exact(d) and p_is_exact(rhs)
        ok = p_trim(d) == p_trim(rhs) if exact else float(np.max(np.abs(p_numeric(p_sub(d, rhs))))) < tol["identity"]
        return record("tower.pencil_identity", ok, {"exact": exact})

    add("tower.pencil_identity", pencil)

    def genus():
        led = model.genus_ledger()
        ok = led["valid"] and led["genus_C"] == 3 and led["genus_E"] == 1
        return record("tower.genus_ledger", ok, led)

    add("tower.genus_ledger", genus)

    dual_rep = bigonal_dual(model, d, seed=ctx.seed)
    dual = dual_rep.model

    def dual_identities():
        neg = bigonal_dual(CurveModel(model.D, -model.alpha, model.beta), d, seed=ctx.seed).model
        mu_even = (neg.D, neg.alpha, neg.beta) == (dual.D, dual.alpha, dual.beta)
        ok = dual_rep.pencil_identity and dual_rep.max_numeric_error < tol["identity"] and mu_even
        details = dual_rep.to_json()
        details.pop("dual")
        details["max_numeric_identity_error"] = sig(dual_rep.max_numeric_error)
        details["mu_sign_invariant"] = mu_even
        return record("bigonal.dual_identities", ok, details)

    add("bigonal.dual_identities", dual_identities)
    add("bigonal.branch_swap", lambda: _check_record(verify_branch_swap(branch, dual, tol["root_match"])))

    def swapped_model():
        _, sw_model = slice_tower(inst.swapped())
        return _check_record(verify_swapped_model(model, dual, sw_model, branch))

    add("bigonal.swapped_model", swapped_model)

    def dual_of_dual():
        _, sw_model = slice_tower(inst.swapped())
        back = dual_model(sw_model)
        e_low, _ = match_roots(back.lower_branch_points(), list(branch.a))
        e_up, _ = match_roots(back.upper_branch_points(), list(branch.p))
        dd = dual_model(dual)
        f_low, _ = match_roots(dd.lower_branch_points(), list(branch.a))
        f_up, _ = match_roots(dd.upper_branch_points(), list(branch.p))
        worst = max(e_low, e_up, f_low, f_up)
        return record(
            "bigonal.dual_of_dual",
            worst < tol["root_match"],
            {
                "via_swapped_tower": {"lower": sig(e_low), "upper": sig(e_up)},
                "via_double_dual": {"lower": sig(f_low), "upper": sig(f_up)},
            },
        )

    add("bigonal.dual_of_dual", dual_of_dual)

    prym_tower = select & {"prym.tower", "prym.loop_system_independence"}
    if prym_tower or "tower.monodromy" in select:
        rec_m, pres = timed_pair(ctx, lambda: _monodromy_claim("tower.monodromy", model, ctx))
        out.append(rec_m)
        if prym_tower:
            rec_p, prof = timed_pair(ctx, lambda: _prym_claim("prym.tower", pres))
            if "prym.tower" in select:
                out.append(rec_p)
            if "prym.loop_system_independence" in select:
                if prof is None:
                    out.append(record("prym.loop_system_independence", None, {}, {"reason": "no tower profile"}))
                else:
                    out.append(timed(ctx, lambda: _second_basepoint_claim(model, prof, ctx)))
    if select & {"dual.monodromy", "prym.dual"}:
        rec_md, pres_d = timed_pair(ctx, lambda: _monodromy_claim("dual.monodromy", dual, ctx))
        out.append(rec_md)
        if "prym.dual" in select:
            out.append(timed_pair(ctx, lambda: _prym_claim("prym.dual", pres_d))[0])
    return out


def _second_basepoint_claim(model: CurveModel, prof: dict, ctx: Context) -> dict:
    """Profile again from a distant basepoint (different loop system)."""
    pts = model.branch_points()
    center = np.mean(pts)
    spread = max(abs(p - center) for p in pts)
    u1 = complex(center + 3.0 * spread * np.exp(0.37j))
    try:
        M = fiber_monodromy(model, basepoint=u1)
        prof2 = prym_profile(CoverPresentation.from_monodromy(M))
    except (TrackingError, PresentationError, PrymError) as exc:
        return record("prym.loop_system_independence", False, {}, {"error": str(exc)})
    keys = ["H1_rank", "det_J", "invariant_rank", "prym_rank", "polarization_type", "component_order"]
    diff = {k: [prof[k], prof2[k]] for k in keys if prof[k] != prof2[k]}
    return record(
        "prym.loop_system_independence",
        not diff,
        {"second_basepoint": fmt_number(complex(round(u1.real, 6), round(u1.imag, 6))), "compared": keys},
        {"differences": diff} if diff else None,
    )


def _check_record(rep) -> dict:
    out = rep.to_json()
    if rep.status != "pass" and "witness" not in out:
        out["witness"] = {"details": "see details"}
    return _round_floats(out)


def _round_floats(obj):
    if isinstance(obj, float):
        return sig(obj) if obj else 0.0
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def instance_claims(inst: TowerInstance, ctx: Context) -> list[dict]:
    return pair_claims(inst, ctx) + tower_claims(inst, ctx)


def summarize(claims: list[dict]) -> str:
    statuses = {c["status"] for c in claims}
    if "fail" in statuses:
        return "fail"
    if "inconclusive" in statuses:
        return "inconclusive"
    return "pass"
