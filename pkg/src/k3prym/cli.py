"""Command line front end: ``k3prym <group> <command> ...``.

Every command except ``generate`` prints one JSON report::

    {
      "schema": "k3prym.report/1",
      "command": "tower branch-swap",
      "seed": 0,
      "tolerances": {...},          # effective tolerances, always printed
      "status": "pass" | "fail" | "inconclusive",
      "claims": [{"claim", "status", "details", ["witness"], ["seconds"]}],
      "result": {...},              # command specific, optional
      "error": {"message", "witness"}   # only for invalid input
    }

Keys are sorted and floats rounded, so identical input and seed give
identical bytes.  ``--timings`` adds wall-clock seconds to each claim and
therefore gives up that guarantee.

Exit codes: 0 when every claim passes, 1 when any claim fails or is
inconclusive, 2 on invalid input (malformed file, singular curve, line
not in general position).

``--seed``, ``--tol key=value`` (repeatable), ``--out`` and ``--jobs`` may be
given before or after the subcommand; ``K3PRYM_SEED``, ``K3PRYM_TOL``
(comma separated ``key=value``), ``K3PRYM_OUT`` and ``K3PRYM_JOBS`` supply
defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from . import io as kio
from . import lattice as lat
from . import linalg as la
from .bitangents import bitangents
from .forms import TernaryForm, fmt_number
from .homology import CoverPresentation, PresentationError
from .pipeline import (
    DEFAULT_TOLERANCES,
    Context,
    _prym_claim,
    _round_floats,
    genericity_claim,
    instance_claims,
    pair_claims_for,
    record,
    summarize,
    tower_claims,
)
from .quartics import FERMAT, is_smooth, make_tangent_pair, pencil_member, random_pair, singular_points
from .towers import (
    NonGenericLine,
    bigonal_dual,
    fermat_instance,
    instance_from_json,
    instance_to_json,
    parse_scalar,
    random_instance,
    slice_tower,
)

SCHEMA = "k3prym.report/1"
SUITE_STRIDE = 100003


class InputError(Exception):
    """Invalid user input; reported with exit code 2."""

    def __init__(self, message: str, witness: Optional[dict] = None):
        super().__init__(message)
        self.witness = witness or {}


# ------------------------------------------------------------- options

def parse_tolerances(items) -> dict:
    tol = dict(DEFAULT_TOLERANCES)
    for item in items:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in tol:
            raise InputError(f"bad tolerance {item!r}; known keys: {', '.join(sorted(tol))}")
        try:
            tol[key] = float(value)
        except ValueError:
            raise InputError(f"tolerance {key} is not a number: {value!r}") from None
    return tol


def _resolve(args) -> tuple[Context, Optional[str], int]:
    env = os.environ
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = env.get("K3PRYM_SEED", "0")
    try:
        seed = int(seed)
    except ValueError:
        raise InputError(f"seed must be an integer: {seed!r}") from None
    items = [t for t in env.get("K3PRYM_TOL", "").split(",") if t.strip()]
    items += getattr(args, "tol", None) or []
    out = getattr(args, "out", None) or env.get("K3PRYM_OUT") or None
    jobs = getattr(args, "jobs", None) or env.get("K3PRYM_JOBS") or 1
    try:
        jobs = max(1, int(jobs))
    except ValueError:
        raise InputError(f"jobs must be an integer: {jobs!r}") from None
    ctx = Context(parse_tolerances(items), seed, bool(getattr(args, "timings", False)))
    return ctx, out, jobs


def make_report(command: str, ctx: Context, claims: list, result=None, error: Optional[InputError] = None) -> dict:
    if error is not None:
        status = "fail"
    else:
        status = summarize(claims) if claims else "pass"
    rep = {
        "schema": SCHEMA,
        "command": command,
        "seed": ctx.seed,
        "tolerances": ctx.tolerances,
        "status": status,
        "claims": claims,
    }
    if result is not None:
        rep["result"] = result
    if error is not None:
        rep["error"] = {"message": str(error), "witness": error.witness}
    return rep


def dump(report) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------- inputs

def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def _load_lattice_input(source: tuple[str, str]):
    kind, value = source
    if kind == "fixture":
        try:
            return kio.load_fixture(value)
        except KeyError as exc:
            raise InputError(str(exc.args[0])) from None
    sections = kio.parse_matrix_sections(_read_text(value))
    return kio.read_embedding(value) if "basis" in sections else kio.read_lattice(value)


def _as_embedding(obj, what: str) -> lat.Embedding:
    if not isinstance(obj, lat.Embedding):
        raise InputError(f"{what} needs an embedding (gram + basis sections)")
    return obj


def _load_form(path: str, degree: int) -> TernaryForm:
    expected = (degree + 1) * (degree + 2) // 2
    return TernaryForm(degree, kio.parse_coefficients(_read_text(path), expected))


def _load_pair(path: str) -> dict:
    """Fields ``B0`` (15 coefficients), ``Q`` (6), ``lambda`` or ``mu``, and
    optionally ``Delta0``; instance files qualify."""
    obj = _read_json(path)
    if not isinstance(obj, dict) or "B0" not in obj:
        raise InputError(f"{path}: pair record needs a 'B0' field")
    out = {}
    for key, degree in (("B0", 4), ("Q", 2), ("Delta0", 4)):
        if key in obj:
            try:
                out[key] = TernaryForm(degree, [parse_scalar(c) for c in obj[key]])
            except Exception as exc:
                raise InputError(f"{path}: field {key!r}: {exc}") from None
    try:
        if "lambda" in obj:
            out["lambda"] = parse_scalar(obj["lambda"])
        elif "mu" in obj:
            mu = parse_scalar(obj["mu"])
            out["lambda"] = mu * mu
    except Exception as exc:
        raise InputError(f"{path}: field 'lambda'/'mu': {exc}") from None
    return out


def _load_instance(path: str, ctx: Context):
    obj = _read_json(path)
    if not isinstance(obj, dict):
        raise InputError(f"{path}: instance must be a JSON object")
    if "tolerances" in obj:
        ctx.tolerances.update(parse_tolerances(f"{k}={v}" for k, v in obj["tolerances"].items()))
    try:
        inst = instance_from_json(obj)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    try:
        slice_tower(inst)
    except NonGenericLine as exc:
        raise InputError(str(exc), exc.witness) from None
    return inst


def _require_smooth(F: TernaryForm, name: str, seed: int):
    if not is_smooth(F):
        pts = singular_points(F, seed=seed)
        witness = {"singular_points": [[fmt_number(complex(round(c.real, 10), round(c.imag, 10))) for c in p] for p in pts]}
        raise InputError(f"{name} is not smooth", witness)


# -------------------------------------------------------------- lattice

def cmd_lattice(args, ctx: Context):
    sources = args.inputs or []
    if not sources:
        raise InputError("give --fixture NAME or --file PATH")
    objs = [_load_lattice_input(s) for s in sources]
    return LATTICE_COMMANDS[args.action](objs, args)


def _lattice_of(obj) -> lat.Lattice:
    return obj.lattice if isinstance(obj, lat.Embedding) else obj


def _triple_json(L: lat.Lattice) -> dict:
    t = lat.triple(L)
    return {"rank": t.r, "a": t.a, "delta": t.delta, "signature": list(t.signature), "triple": [t.r, t.a, t.delta]}


def _lat_triple(objs, args):
    L = _lattice_of(objs[0])
    base = {"rank": L.rank, "signature": list(L.signature), "even": L.is_even, "det": L.det}
    try:
        res = dict(base, **_triple_json(L))
    except lat.LatticeError as exc:
        return [record("lattice.triple", False, base, {"error": str(exc)})], base
    return [record("lattice.triple", True, res)], res


def _lat_complement(objs, args):
    E = _as_embedding(objs[0], "complement")
    primitive = lat.is_primitive(E)
    claims = [record("lattice.primitive", primitive, {"saturation_index": la.saturation_index(E.B)})]
    P = lat.orthogonal_complement(E)
    L = P.lattice
    res = {"rank": L.rank, "signature": list(L.signature), "even": L.is_even, "det": L.det}
    try:
        res.update(_triple_json(L))
        a_M = lat.two_elementary_a(E.lattice)
        ok = L.is_even and (not E.ambient.is_unimodular or res["a"] == a_M)
        res["moduli_dimension"] = L.rank - 2
        claims.append(record("lattice.complement", ok, res, None if ok else {"a_M": a_M, "a_perp": res["a"]}))
    except lat.LatticeError as exc:
        claims.append(record("lattice.complement", False, res, {"error": str(exc)}))
    res["basis"] = P.B
    return claims, res


def _same_row_lattice(A, B) -> bool:
    return la.hnf_basis(A) == la.hnf_basis(B)


def _lat_involution(objs, args):
    E = _as_embedding(objs[0], "involution")
    try:
        A = lat.involution_from_sublattice(E)
    except lat.LatticeError as exc:
        return [record("lattice.involution", False, {}, {"error": str(exc)})], None
    n = len(A)
    G = E.ambient.G
    checks = {
        "integral": True,
        "involution": la.matmul(A, A) == la.identity(n),
        "isometry": lat.is_isometry(A, G),
        "fixed_is_M": _same_row_lattice(lat.fixed_sublattice(A, 1), E.B),
        "anti_fixed_is_M_perp": _same_row_lattice(lat.fixed_sublattice(A, -1), lat.orthogonal_complement(E).B),
    }
    ok = all(checks.values())
    witness = None if ok else {"failed": [k for k, v in checks.items() if not v]}
    return [record("lattice.involution", ok, checks, witness)], {"matrix": A}


def _lat_glue(objs, args):
    E = _as_embedding(objs[0], "glue")
    try:
        g = lat.glue_map(E, verify=True)
    except lat.LatticeError as exc:
        return [record("lattice.glue", False, {}, {"error": str(exc)})], None
    details = {
        "order": g.source.order,
        "checks": g.checks,
        "exhaustive": g.exhaustive,
        "checked_elements": g.checked_elements,
    }
    witness = None if g.verified else {"failed": [k for k, v in g.checks.items() if not v]}
    res = {"images": [[str(a) for a in y] for y in g.images]}
    return [record("lattice.glue", g.verified, details, witness)], res


def _sub_map(choice: str, E: lat.Embedding, other: lat.Embedding, name: str):
    n = E.rank
    if choice == "id":
        return la.identity(n)
    if choice == "neg":
        return la.neg(la.identity(n))
    sections = kio.parse_matrix_sections(_read_text(choice))
    if len(sections) != 1:
        raise InputError(f"{name} file must hold exactly one matrix section")
    (M,) = sections.values()
    if len(M) != n or any(len(r) != other.rank for r in M):
        raise InputError(f"{name} must be a {n} x {other.rank} matrix")
    return M


def _lat_extend(objs, args):
    if len(objs) > 2:
        raise InputError("extend takes one or two embeddings")
    E1 = _as_embedding(objs[0], "extend")
    E2 = _as_embedding(objs[-1], "extend")
    P1, P2 = lat.orthogonal_complement(E1), lat.orthogonal_complement(E2)
    phi = _sub_map(args.phi, E1, E2, "phi")
    psi = _sub_map(args.psi, P1, P2, "psi")
    try:
        res = lat.extend_isometry(E1, E2, phi, psi)
    except lat.LatticeError as exc:
        raise InputError(str(exc)) from None
    details = {"compatible": res.compatible}
    out = {"matrix": res.matrix} if res.compatible else None
    witness = None if res.compatible else {"mismatches": res.mismatches}
    return [record("lattice.extend", res.compatible, details, witness)], out


def _lat_nikulin(objs, args):
    if len(objs) != 2:
        raise InputError("nikulin-equal takes exactly two inputs")
    # embeddings are compared through their orthogonal complements
    lats = [lat.orthogonal_complement(o).lattice if isinstance(o, lat.Embedding) else o for o in objs]
    try:
        equal = lat.nikulin_isometry_class_equal(*lats)
        triples = [_triple_json(L) for L in lats]
    except lat.LatticeError as exc:
        raise InputError(str(exc)) from None
    details = {"equal": equal, "invariants": triples}
    return [record("lattice.nikulin_equal", equal, details, None if equal else {"invariants": triples})], None


LATTICE_COMMANDS = {
    "triple": _lat_triple,
    "complement": _lat_complement,
    "involution": _lat_involution,
    "glue": _lat_glue,
    "extend": _lat_extend,
    "nikulin-equal": _lat_nikulin,
}


# -------------------------------------------------------------- quartic

def cmd_bitangents(args, ctx: Context):
    if args.fermat == bool(args.file):
        raise InputError("give a quartic file or --fermat")
    F = FERMAT if args.fermat else _load_form(args.file, 4)
    _require_smooth(F, "quartic", ctx.seed)
    res = bitangents(F, seed=ctx.seed, config=ctx.solver())
    ok = (res.count == 28) if res.certified else None
    details = res.to_json()
    lines = details.pop("bitangents")
    witness = None if ok else {"status": res.status, "count": res.count}
    return [record("quartic.bitangents", ok, details, witness)], {"bitangents": lines}


def cmd_genericity(args, ctx: Context):
    pair = _load_pair(args.pair)
    B0 = pair["B0"]
    Delta0 = pair.get("Delta0")
    if Delta0 is None:
        if "Q" not in pair or "lambda" not in pair:
            raise InputError("pair record needs 'Delta0' or both 'Q' and 'lambda'/'mu'")
        Delta0 = pencil_member(B0, pair["Q"], pair["lambda"])
    _require_smooth(B0, "B0", ctx.seed)
    _require_smooth(Delta0, "Delta0", ctx.seed)
    return [genericity_claim(B0, Delta0, ctx)], None


def _pair_forms(args, ctx: Context):
    if args.pair:
        pair = _load_pair(args.pair)
        if "Q" not in pair:
            raise InputError("pair record needs a 'Q' field")
        return pair["B0"], pair["Q"], pair.get("lambda")
    B0, Q, mu = random_pair(ctx.seed)
    return B0, Q, mu * mu


def cmd_make_pair(args, ctx: Context):
    B0, Q, lam = _pair_forms(args, ctx)
    if args.lam is not None:
        lam = _parse_lambda(args.lam)
    if lam is None:
        raise InputError("give --lambda")
    _require_smooth(B0, "B0", ctx.seed)
    rep = make_tangent_pair(B0, Q, lam, seed=ctx.seed)
    res = rep.to_json()
    res["B0"] = [fmt_number(c) for c in B0.coeffs]
    res["Q"] = [fmt_number(c) for c in Q.coeffs]
    ok = rep.status in ("U-member", "Q-locus")
    details = {"status": rep.status, "points": len(rep.tangency_points), "multiplicities": rep.multiplicities}
    return [record("pair.make", ok, details, rep.witness)], _round_floats(res)


def cmd_conic_check(args, ctx: Context):
    B0, Q, lam = _pair_forms(args, ctx)
    if args.lam is not None:
        lam = _parse_lambda(args.lam)
    if lam is None:
        raise InputError("pair record needs 'lambda' or 'mu' (or give --lambda)")
    _require_smooth(B0, "B0", ctx.seed)
    return pair_claims_for(B0, Q, lam, ctx.seed, ctx, genericity=False), None


def _parse_lambda(text: str):
    try:
        return kio.parse_rational(text)
    except kio.FormatError as exc:
        raise InputError(f"--lambda: {exc}") from None


# ---------------------------------------------------------------- tower

TOWER_SELECTIONS = {
    "slice": {"tower.pencil_identity", "tower.genus_ledger"},
    "dualize": {"bigonal.dual_identities", "bigonal.dual_of_dual"},
    "branch-swap": {"bigonal.branch_swap"},
    "swapped-model": {"bigonal.swapped_model"},
    "monodromy": {"tower.monodromy", "dual.monodromy"},
}


def cmd_tower(args, ctx: Context):
    inst = _load_instance(args.instance, ctx)
    claims = tower_claims(inst, ctx, TOWER_SELECTIONS[args.action])
    result = None
    if args.action in ("slice", "dualize"):
        branch, model = slice_tower(inst)
        result = {"branch": branch.to_json(), "model": model.to_json()}
        if args.action == "dualize":
            result["dual"] = bigonal_dual(model, branch.d, seed=ctx.seed).model.to_json()
        result = _round_floats(result)
    return claims, result


PRYM_SELECTION = {"tower.monodromy", "dual.monodromy", "prym.tower", "prym.dual", "prym.loop_system_independence"}


def cmd_prym(args, ctx: Context):
    text = _read_text(args.target)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        obj = None
    if obj is not None:
        inst = _load_instance(args.target, ctx)
        return tower_claims(inst, ctx, PRYM_SELECTION), None
    try:
        pres = CoverPresentation.from_text(text)
    except PresentationError as exc:
        # malformed text is invalid input; a well-formed but invalid cover is a failed claim
        if exc.witness and "failed" in exc.witness:
            return [record("prym.presentation", False, {}, dict(exc.witness, error=str(exc)))], None
        raise InputError(f"{args.target}: {exc}", exc.witness) from None
    except ValueError as exc:
        raise InputError(f"{args.target}: {exc}") from None
    rec, _ = _prym_claim("prym.presentation", pres)
    return [rec], None


# ---------------------------------------------------------------- suite

def instance_seed(seed: int, index: int) -> int:
    return seed * SUITE_STRIDE + index


def _suite_one(job):
    index, seed, tolerances, timings = job
    ctx = Context(dict(tolerances), seed, timings)
    s = instance_seed(seed, index)
    try:
        inst = random_instance(s)
        rec = instance_to_json(inst)
        claims = instance_claims(inst, ctx)
    except Exception as exc:  # noqa: BLE001 - reported as a failed instance
        rec = None
        claims = [record("suite.instance", False, {}, {"error": f"{type(exc).__name__}: {exc}"})]
    return {"id": index, "instance_seed": s, "instance": rec, "status": summarize(claims), "claims": claims}


def run_suite(seed: int, count: int, ctx: Context, jobs: int = 1) -> list[dict]:
    work = [(i, seed, ctx.tolerances, ctx.timings) for i in range(count)]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_suite_one, work))
    else:
        rows = [_suite_one(w) for w in work]
    return sorted(rows, key=lambda r: r["id"])


def cmd_suite(args, ctx: Context, jobs: int = 1):
    if args.count < 0:
        raise InputError("--count must be non-negative")
    rows = run_suite(ctx.seed, args.count, ctx, jobs)
    claims = []
    for row in rows:
        for c in row["claims"]:
            claims.append(dict(c, instance=row["id"]))
    counts = {s: sum(1 for r in rows if r["status"] == s) for s in ("pass", "fail", "inconclusive")}
    result = {"count": len(rows), "instances": [{k: r[k] for k in ("id", "instance_seed", "instance", "status")} for r in rows]}
    result.update(counts)
    return claims, result


def cmd_generate(args, ctx: Context) -> dict:
    if args.fermat:
        return instance_to_json(fermat_instance())
    return instance_to_json(random_instance(instance_seed(ctx.seed, args.index)))


# --------------------------------------------------------------- parser

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every randomized step")
    p.add_argument("--tol", action="append", default=argparse.SUPPRESS, metavar="KEY=VALUE",
                   help="override a tolerance (repeatable)")
    p.add_argument("--out", default=argparse.SUPPRESS, help="write the report here instead of stdout")
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes for suite runs")
    p.add_argument("--timings", action="store_true", default=argparse.SUPPRESS,
                   help="record wall-clock seconds per claim (output no longer reproducible)")
    return p


def _input_source(kind):
    def parse(value):
        return kind, value

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="k3prym", parents=[common], description="Verification runs for lattices, quartics, towers and Pryms."
    )
    groups = parser.add_subparsers(dest="group", required=True)

    p_lat = groups.add_parser("lattice", parents=[common], help="lattice invariants and gluing")
    p_lat.add_argument("action", choices=sorted(LATTICE_COMMANDS))
    p_lat.add_argument("--fixture", dest="inputs", action="append", type=_input_source("fixture"),
                       help=f"shipped fixture ({', '.join(sorted(kio.FIXTURES))})")
    p_lat.add_argument("--file", dest="inputs", action="append", type=_input_source("file"),
                       help="lattice (gram) or embedding (gram + basis) file")
    p_lat.add_argument("--phi", default="id", help="map on the sublattice: id, neg or a matrix file")
    p_lat.add_argument("--psi", default="id", help="map on the complement: id, neg or a matrix file")
    p_lat.set_defaults(handler=cmd_lattice, command=lambda a: f"lattice {a.action}")

    p_q = groups.add_parser("quartic", parents=[common], help="bitangents and totally tangent pairs")
    qsub = p_q.add_subparsers(dest="action", required=True)
    p = qsub.add_parser("bitangents", parents=[common], help="certified bitangent lines")
    p.add_argument("file", nargs="?", help="15 coefficients in graded-lex order")
    p.add_argument("--fermat", action="store_true", help="use x^4 + y^4 + z^4")
    p.set_defaults(handler=cmd_bitangents)
    p = qsub.add_parser("genericity", parents=[common], help="three genericity conditions of a pair")
    p.add_argument("pair", help="JSON with B0 and Delta0, or B0, Q and lambda/mu")
    p.set_defaults(handler=cmd_genericity)
    for name, fn, text in (
        ("make-pair", cmd_make_pair, "classify Q^2 - lambda B0"),
        ("conic-check", cmd_conic_check, "tangency points lie on the conic Q"),
    ):
        p = qsub.add_parser(name, parents=[common], help=text)
        p.add_argument("pair", nargs="?", help="JSON with B0 and Q (default: seeded random pair)")
        p.add_argument("--lambda", dest="lam", help="exact rational pencil parameter")
        p.set_defaults(handler=fn)
    p_q.set_defaults(command=lambda a: f"quartic {a.action}")

    p_t = groups.add_parser("tower", parents=[common], help="double cover towers over a line")
    tsub = p_t.add_subparsers(dest="action", required=True)
    aliases = {"branch-swap": ["verify-step2"], "swapped-model": ["verify-step3"]}
    for name in TOWER_SELECTIONS:
        p = tsub.add_parser(name, aliases=aliases.get(name, []), parents=[common])
        p.add_argument("instance", help="instance JSON file")
        p.set_defaults(handler=cmd_tower, action=name)
    p_t.set_defaults(command=lambda a: f"tower {a.action}")

    p = groups.add_parser("prym", parents=[common], help="Prym lattice of tower and dual, or of a cover presentation")
    p.add_argument("target", help="instance JSON or cover presentation text file")
    p.set_defaults(handler=cmd_prym, command=lambda a: "prym")

    p = groups.add_parser("suite", parents=[common], help="every claim on seeded random instances")
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(handler=cmd_suite, command=lambda a: "suite")

    p = groups.add_parser("generate", parents=[common], help="print an instance record")
    p.add_argument("--index", type=int, default=0, help="same instance as suite entry INDEX for this seed")
    p.add_argument("--fermat", action="store_true", help="the Fermat instance")
    p.set_defaults(handler=cmd_generate, command=lambda a: "generate")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command(args)
    try:
        ctx, out, jobs = _resolve(args)
    except InputError as exc:
        print(f"k3prym: {exc}", file=sys.stderr)
        return 2
    if args.handler is cmd_generate:
        _emit(dump(cmd_generate(args, ctx)), out)
        return 0
    try:
        if args.handler is cmd_suite:
            claims, result = cmd_suite(args, ctx, jobs)
        else:
            claims, result = args.handler(args, ctx)
    except (InputError, kio.FormatError, lat.LatticeError) as exc:
        err = exc if isinstance(exc, InputError) else InputError(str(exc))
        _emit(dump(make_report(command, ctx, [], error=err)), out)
        return 2
    except ValueError as exc:
        # constructor checks (singular curves, mismatched mu and lambda, ...)
        _emit(dump(make_report(command, ctx, [], error=InputError(str(exc)))), out)
        return 2
    report = make_report(command, ctx, claims, result)
    _emit(dump(report), out)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    raise SystemExit(main())
