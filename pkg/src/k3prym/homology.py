"""Integral homology of a 4-sheeted branched cover of P^1 from its
monodromy, with intersection form, deck action, and the Prym lattice.

The cover is cut along a star graph: straight edges from the basepoint to
every branch point.  Its preimage is a graph embedded in the curve whose
complement is a union of discs (one per sheet, since infinity is not a
branch point).  The cyclic order of edges at each vertex is known: around
a basepoint sheet it is the angular order of the rays; around a ramified
vertex over ``c_i`` it is ``e_i^(s), e_i^(sigma_i s), ...``.  This
rotation system gives the 2-cells, hence ``H_1 = Z_1 / B_1``, and the
intersection number of two cycles as a sum of local vertex terms after
pushing one cycle off the graph.

Row-vector conventions throughout: a class is a row of coordinates, and a
map ``f`` acts by ``x -> x @ M_f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import linalg as la
from .monodromy import (
    TAU,
    Monodromy,
    Perm,
    compose,
    cycle_notation,
    cycles,
    is_transitive,
    parse_cycle_notation,
)


class PresentationError(ValueError):
    """A cover presentation violates one of its invariants."""

    def __init__(self, message: str, witness: Optional[dict] = None):
        super().__init__(message)
        self.witness = witness or {}


# ------------------------------------------------------------ presentation

@dataclass(frozen=True)
class CoverPresentation:
    basepoint: complex
    branch_points: tuple  # complex, in loop order
    perms: tuple  # Perm per branch point
    tau: Perm = TAU

    @classmethod
    def from_monodromy(cls, m: Monodromy) -> "CoverPresentation":
        pres = cls(m.basepoint, tuple(m.branch_points), tuple(m.perms))
        pres.validate()
        return pres

    @property
    def sheets(self) -> int:
        return len(self.tau)

    def deficiencies(self) -> list[int]:
        return [self.sheets - len(cycles(p)) for p in self.perms]

    @property
    def genus(self) -> int:
        chi = 2 * self.sheets - sum(self.deficiencies())
        return 1 - chi // 2

    def checks(self) -> dict:
        ident = tuple(range(self.sheets))
        return {
            "product_is_identity": compose(*self.perms) == ident,
            "transitive": is_transitive(self.perms),
            "tau_involution": compose(self.tau, self.tau) == ident,
            "tau_fixed_point_free": all(self.tau[s] != s for s in range(self.sheets)),
            "tau_commutes": all(compose(p, self.tau) == compose(self.tau, p) for p in self.perms),
        }

    def validate(self) -> None:
        failed = [k for k, v in self.checks().items() if not v]
        if failed:
            w: dict = {"failed": failed}
            if "product_is_identity" in failed:
                w["product"] = cycle_notation(compose(*self.perms))
            if "transitive" in failed:
                w["orbit_of_0"] = sorted(_orbit(self.perms, 0))
            raise PresentationError(f"invalid cover presentation: {', '.join(failed)}", w)

    def to_text(self) -> str:
        from .forms import fmt_number

        lines = ["# cover presentation: branch <re> <im> <permutation in cycle notation>", f"sheets {self.sheets}"]
        lines.append(f"basepoint {self.basepoint.real!r} {self.basepoint.imag!r}")
        for c, p in zip(self.branch_points, self.perms):
            lines.append(f"branch {c.real!r} {c.imag!r} {cycle_notation(p)}")
        lines.append(f"tau {cycle_notation(self.tau)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CoverPresentation":
        n, base, pts, perms, tau = None, None, [], [], None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, rest = line.partition(" ")
            try:
                if key == "sheets":
                    n = int(rest)
                elif key == "basepoint":
                    re, im = rest.split()
                    base = complex(float(re), float(im))
                elif key == "branch":
                    re, im, cyc = rest.split(None, 2)
                    pts.append(complex(float(re), float(im)))
                    perms.append(parse_cycle_notation(cyc, n))
                elif key == "tau":
                    tau = parse_cycle_notation(rest, n)
                else:
                    raise ValueError(f"unknown key {key!r}")
            except (ValueError, TypeError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if n is None or base is None or tau is None or not pts:
            raise ValueError("presentation needs 'sheets', 'basepoint', 'branch' and 'tau' lines")
        return cls(base, tuple(pts), tuple(perms), tau)

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def read(cls, path: Union[str, Path]) -> "CoverPresentation":
        return cls.from_text(Path(path).read_text())


def _orbit(perms, s) -> set:
    seen, stack = {s}, [s]
    while stack:
        t = stack.pop()
        for p in perms:
            if p[t] not in seen:
                seen.add(p[t])
                stack.append(p[t])
    return seen


# ------------------------------------------------------------ ribbon graph

@dataclass
class RibbonGraph:
    """Lift of the star graph.  Darts are ``(edge, end)`` with ``end`` 0 at
    the tail (a basepoint sheet) and 1 at the head (a branch vertex)."""

    n_vertices: int
    edges: list  # (tail, head)
    rotation: list  # per vertex: darts in counterclockwise order
    edge_index: dict  # (branch index, sheet) -> edge

    def boundary_matrix(self) -> la.IntMatrix:
        M = la.zeros(len(self.edges), self.n_vertices)
        for e, (t, h) in enumerate(self.edges):
            M[e][t] -= 1
            M[e][h] += 1
        return M

    def faces(self) -> list[list[int]]:
        """Face boundaries as edge chains, from the rotation system."""
        nxt = {}
        for darts in self.rotation:
            for i, d in enumerate(darts):
                nxt[d] = darts[(i + 1) % len(darts)]
        seen, out = set(), []
        for e in range(len(self.edges)):
            for end in (0, 1):
                d = (e, end)
                if d in seen:
                    continue
                chain = [0] * len(self.edges)
                while d not in seen:
                    seen.add(d)
                    chain[d[0]] += 1 if d[1] == 0 else -1
                    d = nxt[(d[0], 1 - d[1])]
                out.append(chain)
        return out

    def intersection(self, A: Sequence[int], B: Sequence[int]) -> int:
        """Algebraic intersection of two 1-cycles on the surface.

        ``A`` is pushed to the right of every edge (w.r.t. the edge's own
        orientation) and routed inside a small disc around each vertex from
        a hub placed just clockwise of the first dart; each dart of ``B``
        crossed counterclockwise contributes ``-B`` (its outgoing flow).
        """
        total = 0
        for darts in self.rotation:
            flowA = [A[e] if end == 0 else -A[e] for e, end in darts]
            flowB = [B[e] if end == 0 else -B[e] for e, end in darts]
            before = 0
            for j, (e, end) in enumerate(darts):
                crossed = before + (flowB[j] if end == 1 else 0)
                total -= flowA[j] * crossed
                before += flowB[j]
        return total


def ribbon_graph(pres: CoverPresentation) -> RibbonGraph:
    n = pres.sheets
    m = len(pres.branch_points)
    vertex_of = {}
    nv = n
    for i, p in enumerate(pres.perms):
        for cyc in cycles(p):
            for s in cyc:
                vertex_of[(i, s)] = nv
            nv += 1
    edges, index = [], {}
    for i in range(m):
        for s in range(n):
            index[(i, s)] = len(edges)
            edges.append((s, vertex_of[(i, s)]))
    rotation: list[list] = [[] for _ in range(nv)]
    angles = [np.angle(c - pres.basepoint) for c in pres.branch_points]
    ccw = sorted(range(m), key=lambda i: angles[i])
    for s in range(n):
        rotation[s] = [(index[(i, s)], 0) for i in ccw]
    for i, p in enumerate(pres.perms):
        for cyc in cycles(p):
            v = vertex_of[(i, cyc[0])]
            rotation[v] = [(index[(i, s)], 1) for s in cyc]
    return RibbonGraph(nv, edges, rotation, index)


# ------------------------------------------------------------- homology

@dataclass
class HomologyModel:
    """``H_1`` with basis (edge chains), intersection matrix ``J`` and the
    deck action ``T`` (row action: ``basis_i . tau = sum_j T_ij basis_j``)."""

    basis: la.IntMatrix
    J: la.IntMatrix
    T: la.IntMatrix
    graph: Optional[RibbonGraph] = None
    euler: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.J)

    def checks(self) -> dict:
        n = self.rank
        I = la.identity(n)
        J, T = self.J, self.T
        return {
            "rank": n,
            "J_skew": all(J[i][j] == -J[j][i] for i in range(n) for j in range(n)),
            "det_J": la.det(J),
            "tau_involution": la.matmul(T, T) == I,
            "tau_symplectic": la.matmul(la.matmul(T, J), la.transpose(T)) == J,
            "invariant_rank": len(la.left_kernel_basis(la.add(T, la.neg(I)))) if n else 0,
            "anti_invariant_rank": len(la.left_kernel_basis(la.add(T, I))) if n else 0,
        }

    def change_basis(self, P) -> "HomologyModel":
        """Same classes in the basis given by the rows of unimodular ``P``."""
        Pinv = [[la._as_int(a) for a in row] for row in la.inverse(P)]
        J = la.matmul(la.matmul(P, self.J), la.transpose(P))
        T = la.matmul(la.matmul(P, self.T), Pinv)
        basis = la.matmul(P, self.basis) if self.basis else []
        return HomologyModel(basis, J, T, self.graph, self.euler)


def homology_with_intersection(pres: CoverPresentation) -> HomologyModel:
    pres.validate()
    G = ribbon_graph(pres)
    faces = G.faces()
    V, E, F = G.n_vertices, len(G.edges), len(faces)
    euler = {"V": V, "E": E, "F": F, "chi": V - E + F}
    if V - E + F != 2 - 2 * pres.genus:
        raise PresentationError("rotation system does not close up to the expected surface", euler)
    Z1 = la.left_kernel_basis(G.boundary_matrix())
    rel = []
    for f in faces:
        c = la.express_in_basis(Z1, f)
        if c is None:
            raise PresentationError("face boundary is not a cycle")
        rel.append([la._as_int(x) for x in c])
    snf = la.smith_normal_form(rel)
    r = snf.rank
    torsion = [d for d in snf.invariant_factors if d != 1]
    if torsion:
        raise PresentationError("homology has torsion", {"invariant_factors": torsion})
    coords_basis = snf.Vinv[r:]
    basis = la.matmul(coords_basis, Z1)

    def to_h1(chain) -> list[int]:
        c = la.express_in_basis(Z1, chain)
        if c is None:
            raise PresentationError("chain is not a cycle")
        x = la.vecmat([la._as_int(a) for a in c], snf.V)
        return x[r:]

    g = len(basis)
    J = [[G.intersection(basis[i], basis[j]) for j in range(g)] for i in range(g)]
    for f in faces:
        if any(G.intersection(f, b) for b in basis):
            raise PresentationError("intersection form does not vanish on face boundaries")
    T = []
    for b in basis:
        img = [0] * E
        for (i, s), e in G.edge_index.items():
            img[G.edge_index[(i, pres.tau[s])]] += b[e]
        T.append(to_h1(img))
    return HomologyModel(basis, J, T, G, euler)


# ----------------------------------------------------------------- Prym

@dataclass
class PrymLattice:
    basis: la.IntMatrix  # rows in H_1 coordinates
    pairing: la.IntMatrix
    component_order: int  # [ker(tau - id) : (id + tau) H_1]
    anti_index: int  # [ker(id + tau) : (id - tau) H_1]

    @property
    def rank(self) -> int:
        return len(self.basis)


class PrymError(ValueError):
    pass


def _index_in(sub_rows, lattice_rows) -> int:
    """Index of the span of ``sub_rows`` in the lattice spanned by
    ``lattice_rows`` (same rank assumed)."""
    coords = []
    for v in sub_rows:
        if not any(v):
            continue
        c = la.express_in_basis(lattice_rows, v)
        if c is None:
            raise PrymError("vector outside the lattice")
        coords.append([la._as_int(x) for x in c])
    snf = la.smith_normal_form(coords)
    if snf.rank != len(lattice_rows):
        raise PrymError("sublattice has smaller rank")
    out = 1
    for d in snf.invariant_factors:
        out *= d
    return out


def prym_sublattice(h: HomologyModel, expected_rank: int = 4) -> PrymLattice:
    """Saturated ``ker(id + tau)`` with its restricted pairing.

    ``component_order`` is the order of the component group of the kernel
    of ``id + tau`` on the Jacobian, ``[H_1^+ : (id + tau) H_1]``.  The
    index ``[H_1^- : (id - tau) H_1]`` is reported alongside as
    ``anti_index``.
    """
    n = h.rank
    I = la.identity(n)
    plus = la.add(h.T, I)
    minus = la.add(h.T, la.neg(I))
    K = la.left_kernel_basis(plus)
    if len(K) != expected_rank:
        raise PrymError(f"anti-invariant lattice has rank {len(K)}, expected {expected_rank}")
    pairing = la.matmul(la.matmul(K, h.J), la.transpose(K))
    Kplus = la.left_kernel_basis(minus)
    comp = _index_in(plus, Kplus)
    anti = _index_in(la.neg(minus), K)
    return PrymLattice(K, pairing, comp, anti)


def polarization_type(pairing) -> tuple:
    """Elementary divisors ``(d_1, ..., d_g)`` of a nondegenerate skew form."""
    n = len(pairing)
    if n % 2 or la.det(pairing) == 0:
        raise ValueError("pairing is degenerate")
    divs = sorted(la.elementary_divisors(pairing))
    # a skew form has each elementary divisor twice
    if any(divs[2 * i] != divs[2 * i + 1] for i in range(n // 2)):
        raise ValueError(f"not a skew form: elementary divisors {divs}")
    return tuple(divs[::2])
