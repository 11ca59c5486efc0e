"""Even lattices, 2-elementary invariants, complements, gluing and involutions.

Conventions
-----------
* A lattice is ``Z^n`` with an integral symmetric Gram matrix.
* A sublattice is given by an :class:`Embedding`: rows of ``basis`` are
  coordinate vectors in the ambient basis.
* Ambient endomorphisms act on column vectors, ``x -> A @ x``, so an
  isometry satisfies ``A.T @ G @ A == G``.
* Discriminant-group elements are rational vectors in ambient coordinates,
  taken modulo the sublattice and put in canonical form by reduced-HNF
  reduction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from . import linalg as la
from .linalg import IntMatrix


class LatticeError(ValueError):
    """Raised when a lattice operation's preconditions fail."""


class NotTwoElementary(LatticeError):
    pass


class DegenerateLattice(LatticeError):
    pass


@dataclass(frozen=True)
class Lattice:
    gram: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        g = tuple(tuple(int(a) for a in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        if not la.is_symmetric([list(r) for r in g]):
            raise LatticeError("Gram matrix is not symmetric")

    @classmethod
    def from_gram(cls, gram, name: str = "") -> "Lattice":
        return cls(tuple(tuple(r) for r in gram), name)

    @property
    def G(self) -> IntMatrix:
        return [list(r) for r in self.gram]

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def det(self) -> int:
        return la.det(self.G)

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    @property
    def is_degenerate(self) -> bool:
        return self.det == 0

    @cached_property
    def signature(self) -> tuple[int, int]:
        p, n, z = la.inertia(self.G)
        if z:
            raise DegenerateLattice(f"lattice {self.name!r} is degenerate")
        return p, n

    @property
    def is_indefinite(self) -> bool:
        p, n = self.signature
        return p > 0 and n > 0

    def pair(self, x, y):
        return sum(xi * gij * yj for xi, row in zip(x, self.gram) for gij, yj in zip(row, y))

    def norm(self, x):
        return self.pair(x, x)

    def discriminant_group(self) -> "DiscriminantGroup":
        return discriminant_group(Embedding(self, tuple(map(tuple, la.identity(self.rank)))))

    def __repr__(self):
        return f"Lattice({self.name or 'rank %d' % self.rank})"


# ---------------------------------------------------------------- standard

def U() -> Lattice:
    return Lattice.from_gram([[0, 1], [1, 0]], "U")


_E8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]


def E8(negative: bool = True) -> Lattice:
    """E8 root lattice; ``negative=True`` gives E8(-1)."""
    s = -1 if negative else 1
    g = [[2 * s * (i == j) for j in range(8)] for i in range(8)]
    for i, j in _E8_EDGES:
        g[i][j] = g[j][i] = -s
    return Lattice.from_gram(g, "E8(-1)" if negative else "E8")


def I(p: int, q: int) -> Lattice:
    """Odd unimodular ``I_{p,q}``: ``Z^{p+q}`` with diag(1,..,1,-1,..,-1)."""
    if p < 0 or q < 0:
        raise LatticeError("I_{p,q} needs p, q >= 0")
    return Lattice.from_gram(
        la.direct_sum(*([[[1]]] * p + [[[-1]]] * q)), f"I_{{{p},{q}}}"
    )


def A1(negative: bool = True) -> Lattice:
    return Lattice.from_gram([[-2 if negative else 2]], "<-2>" if negative else "<2>")


def rescale(L: Lattice, d: int) -> Lattice:
    """``L(d)``: the quadratic form multiplied by ``d``."""
    return Lattice.from_gram([[d * a for a in row] for row in L.gram], f"{L.name}({d})")


def direct_sum(*lattices: Lattice) -> Lattice:
    return Lattice.from_gram(
        la.direct_sum(*[L.G for L in lattices]), " + ".join(L.name for L in lattices)
    )


def k3_lattice() -> Lattice:
    """The K3 lattice ``E8(-1)^2 + U^3`` (rank 22, signature (3, 19))."""
    L = direct_sum(E8(), E8(), U(), U(), U())
    return Lattice(L.gram, "K3")


def make_standard(name: str, *params) -> Lattice:
    """Build a named lattice.

    Names: ``U``, ``E8`` (meaning E8(-1)), ``E8+``, ``I`` (params p, q),
    ``A1`` (the lattice <-2>), ``K3``, and ``rescale`` / ``sum`` which take
    lattices as params.
    """
    key = name.strip()
    table = {
        "U": U,
        "E8": E8,
        "E8(-1)": E8,
        "E8+": lambda: E8(negative=False),
        "A1": A1,
        "<-2>": A1,
        "K3": k3_lattice,
        "I": I,
        "rescale": rescale,
        "sum": direct_sum,
    }
    if key not in table:
        raise LatticeError(f"unknown lattice name {name!r}")
    return table[key](*params)


# --------------------------------------------------------------- embedding

@dataclass(frozen=True)
class Embedding:
    ambient: Lattice
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        b = tuple(tuple(int(a) for a in row) for row in self.basis)
        object.__setattr__(self, "basis", b)
        if any(len(r) != self.ambient.rank for r in b):
            raise LatticeError("basis rows must have ambient length")
        if b and la.rank([list(r) for r in b]) != len(b):
            raise LatticeError("embedding basis rows are linearly dependent")

    @classmethod
    def of(cls, ambient: Lattice, basis) -> "Embedding":
        return cls(ambient, tuple(tuple(r) for r in basis))

    @property
    def B(self) -> IntMatrix:
        return [list(r) for r in self.basis]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @cached_property
    def gram(self) -> IntMatrix:
        B = self.B
        return la.matmul(la.matmul(B, self.ambient.G), la.transpose(B)) if B else []

    @cached_property
    def lattice(self) -> Lattice:
        return Lattice.from_gram(self.gram, "M")

    def coords(self, x) -> list[Fraction]:
        """Coordinates of an ambient rational vector in the sublattice basis."""
        c = la.express_in_basis(self.B, x)
        if c is None:
            raise LatticeError("vector is not in the rational span of the sublattice")
        return c

    def to_ambient(self, c):
        return la.vecmat(list(c), self.B)

    def reduce(self, x) -> tuple[Fraction, ...]:
        """Canonical representative of ``x`` modulo the sublattice."""
        return tuple(_hnf_reduce(self._hnf, [Fraction(a) for a in x]))

    @cached_property
    def _hnf(self):
        return la.hnf_basis(self.B) if self.B else []


def _hnf_reduce(H, x):
    x = list(x)
    for row in H:
        c = next(j for j, a in enumerate(row) if a)
        q = (x[c] / row[c]).__floor__()
        if q:
            x = [a - q * b for a, b in zip(x, row)]
    return x


def is_primitive(E: Embedding) -> bool:
    """True iff the basis rows span their own saturation."""
    if E.rank == 0:
        return True
    return la.saturation_index(E.B) == 1


def orthogonal_complement(E: Embedding) -> Embedding:
    """Saturated orthogonal complement, basis in reduced HNF."""
    G = E.ambient.G
    if E.rank == 0:
        return Embedding.of(E.ambient, la.identity(E.ambient.rank))
    BG = la.matmul(E.B, G)
    return Embedding.of(E.ambient, la.kernel_basis(BG))


# ------------------------------------------------------ discriminant group

@dataclass
class DiscriminantGroup:
    """``M^v / M`` for a nondegenerate sublattice ``M``.

    ``generators[i]`` has order ``invariant_factors[i]``; generators are
    rational vectors in ambient coordinates.
    """

    embedding: Embedding
    invariant_factors: list[int]
    generators: list[tuple[Fraction, ...]]

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def reduce(self, x) -> tuple[Fraction, ...]:
        return self.embedding.reduce(x)

    def q(self, x) -> Fraction:
        """Discriminant quadratic form, valued in Q/2Z (returned in [0, 2))."""
        return Fraction(self.embedding.ambient.norm(x)) % 2

    def b(self, x, y) -> Fraction:
        """Discriminant bilinear form, valued in Q/Z (returned in [0, 1))."""
        return Fraction(self.embedding.ambient.pair(x, y)) % 1

    def combine(self, coeffs) -> tuple[Fraction, ...]:
        n = self.embedding.ambient.rank
        out = [Fraction(0)] * n
        for c, g in zip(coeffs, self.generators):
            if c:
                out = [a + c * b for a, b in zip(out, g)]
        return self.reduce(out)

    def elements(self):
        """Yield ``(coefficients, element)`` for every group element."""
        for coeffs in itertools.product(*[range(d) for d in self.invariant_factors]):
            yield coeffs, self.combine(coeffs)

    def is_zero(self, x) -> bool:
        return all(a == 0 for a in self.reduce(x))


def discriminant_group(E: Embedding) -> DiscriminantGroup:
    """Discriminant group of the sublattice described by ``E``.

    From ``U @ G @ V = S`` the dual lattice is generated by the columns of
    ``V`` divided by the diagonal of ``S`` (sublattice coordinates).
    """
    G = E.gram
    snf = la.smith_normal_form(G)
    if snf.rank != E.rank:
        raise DegenerateLattice("discriminant group of a degenerate lattice")
    factors, gens = [], []
    for i, d in enumerate(snf.diagonal):
        if d > 1:
            col = [Fraction(snf.V[r][i], d) for r in range(E.rank)]
            factors.append(d)
            gens.append(E.reduce(E.to_ambient(col)))
    return DiscriminantGroup(E, factors, gens)


@dataclass(frozen=True)
class Triple:
    r: int
    a: int
    delta: int
    signature: tuple[int, int]

    def as_tuple(self):
        return self.r, self.a, self.delta


ENUMERATE_LIMIT = 12


def two_elementary_a(L: Lattice) -> int:
    snf = la.smith_normal_form(L.G)
    if snf.rank != L.rank:
        raise DegenerateLattice("degenerate lattice")
    bad = [d for d in snf.invariant_factors if d not in (1, 2)]
    if bad:
        raise NotTwoElementary(f"discriminant group has invariant factor {bad[0]}")
    return sum(1 for d in snf.invariant_factors if d == 2)


def triple(L: Lattice) -> Triple:
    """``(r, a, delta)`` plus signature for an even 2-elementary lattice.

    ``delta`` is 0 iff every dual vector has integral square.  The whole
    group is enumerated for ``a <= ENUMERATE_LIMIT``; beyond that the
    generators suffice, since ``(x+y)^2 = x^2 + y^2 + 2(x,y)`` and
    ``2(x,y)`` is an integer whenever ``2y`` lies in the lattice.
    """
    if not L.is_even:
        raise LatticeError("triple is defined for even lattices")
    if L.is_degenerate:
        raise DegenerateLattice("degenerate lattice")
    sig = L.signature
    a = two_elementary_a(L)
    D = L.discriminant_group()
    if a <= ENUMERATE_LIMIT:
        values = (D.q(x) for _, x in D.elements())
    else:
        values = (D.q(g) for g in D.generators)
    delta = 0 if all(v.denominator == 1 for v in values) else 1
    return Triple(L.rank, a, delta, sig)


def nikulin_isometry_class_equal(L1: Lattice, L2: Lattice) -> bool:
    """Compare indefinite even 2-elementary lattices by (signature, a, delta)."""
    for L in (L1, L2):
        if L.is_degenerate or not L.is_indefinite:
            raise LatticeError("predicate only valid for indefinite lattices")
    t1, t2 = triple(L1), triple(L2)
    return (t1.signature, t1.a, t1.delta) == (t2.signature, t2.a, t2.delta)


# ------------------------------------------------------------------- glue

@dataclass
class GlueMap:
    """Isomorphism ``gamma: A_M -> A_{M-perp}`` induced by the ambient."""

    source: DiscriminantGroup
    target: DiscriminantGroup
    images: list[tuple[Fraction, ...]]
    checks: dict = field(default_factory=dict)
    exhaustive: bool = False
    checked_elements: int = 0

    @property
    def verified(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def __call__(self, coeffs) -> tuple[Fraction, ...]:
        n = self.target.embedding.ambient.rank
        out = [Fraction(0)] * n
        for c, y in zip(coeffs, self.images):
            if c:
                out = [a + c * b for a, b in zip(out, y)]
        return self.target.reduce(out)

    def apply(self, x) -> tuple[Fraction, ...]:
        """Image of an arbitrary element of ``A_M`` given as an ambient vector."""
        return self.target.reduce(_glue_partner(self.source.embedding, x))

    def verify(self, exhaustive: Optional[bool] = None) -> dict:
        """Check homomorphism, bijectivity and ``q_perp(gamma x) = -q(x)``.

        ``exhaustive`` (default: when ``|A_M| <= 2**ENUMERATE_LIMIT``) runs
        over every element, otherwise over generators and pairwise sums.
        """
        S, T = self.source, self.target
        if exhaustive is None:
            exhaustive = S.order <= 2 ** ENUMERATE_LIMIT
        if exhaustive:
            items = list(S.elements())
        else:
            k = len(S.invariant_factors)
            basis = [tuple(int(i == j) for j in range(k)) for i in range(k)]
            pairs = [tuple(a + b for a, b in zip(u, v)) for u, v in itertools.combinations(basis, 2)]
            items = [(c, S.combine(c)) for c in basis + pairs]
        anti = True
        consistent = True
        injective = True
        for coeffs, x in items:
            y = self(coeffs)
            if (S.q(x) + T.q(y)) % 2 != 0:
                anti = False
            if T.reduce(_glue_partner(S.embedding, x)) != y:
                consistent = False
            if not S.is_zero(x) and T.is_zero(y):
                injective = False
        orders_ok = all(
            T.is_zero([d * a for a in y]) for d, y in zip(S.invariant_factors, self.images)
        )
        self.exhaustive = bool(exhaustive)
        self.checked_elements = len(items)
        self.checks = {
            "orders_match": S.order == T.order,
            "generator_orders": orders_ok,
            "homomorphism": consistent,
            "injective": injective,
            "anti_isometry": anti,
        }
        return self.checks


def _glue_partner(E: Embedding, x) -> list[Fraction]:
    """For ``x`` in ``M^v`` find ``l`` in the ambient with ``l - x`` perpendicular
    to ``M`` and return ``l - x``."""
    BG = la.matmul(E.B, E.ambient.G)
    target = [sum(Fraction(bg) * xi for bg, xi in zip(row, x)) for row in BG]
    if any(t.denominator != 1 for t in target):
        raise LatticeError("vector is not in the dual lattice")
    l = la.integer_solve(BG, [int(t) for t in target])
    if l is None:
        raise LatticeError("no ambient lift; ambient not unimodular or M not primitive")
    return [li - xi for li, xi in zip(l, x)]


def _require_glue_preconditions(E: Embedding):
    if not E.ambient.is_unimodular:
        raise LatticeError("glue map needs a unimodular ambient lattice")
    if not is_primitive(E):
        raise LatticeError("glue map needs a primitive sublattice")
    if E.lattice.is_degenerate:
        raise DegenerateLattice("sublattice is degenerate")


def glue_map(E: Embedding, verify: bool = True, exhaustive: Optional[bool] = None) -> GlueMap:
    _require_glue_preconditions(E)
    perp = orthogonal_complement(E)
    A = discriminant_group(E)
    B = discriminant_group(perp)
    images = [B.reduce(_glue_partner(E, g)) for g in A.generators]
    gm = GlueMap(A, B, images)
    if verify:
        gm.verify(exhaustive)
    return gm


# ------------------------------------------------------------- involution

def projector(E: Embedding) -> list[list[Fraction]]:
    """Orthogonal projector onto ``M (x) Q`` acting on column vectors."""
    n = E.ambient.rank
    if E.rank == 0:
        return [[Fraction(0)] * n for _ in range(n)]
    Minv = la.inverse(E.gram)
    BG = la.matmul(E.B, E.ambient.G)
    return la.matmul(la.transpose(E.B), la.matmul(Minv, BG))


def involution_from_sublattice(E: Embedding) -> IntMatrix:
    """The involution acting as +1 on ``M`` and -1 on ``M``-perp.

    Raises ``LatticeError`` when the rational map ``2P - 1`` is not integral.
    """
    if E.ambient.is_degenerate:
        raise DegenerateLattice("ambient lattice is degenerate")
    if E.rank and E.lattice.is_degenerate:
        raise DegenerateLattice("sublattice is degenerate")
    if not is_primitive(E):
        raise LatticeError("sublattice is not primitive")
    P = projector(E)
    n = E.ambient.rank
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            v = 2 * P[i][j] - (i == j)
            if v.denominator != 1:
                raise LatticeError("extension not integral")
            row.append(int(v))
        out.append(row)
    return out


def is_isometry(A, G) -> bool:
    return la.matmul(la.matmul(la.transpose(A), G), A) == [list(r) for r in G]


def fixed_sublattice(A, sign: int = 1) -> IntMatrix:
    """Saturated basis (rows) of ``ker(A - sign * I)``."""
    n = len(A)
    return la.kernel_basis([[A[i][j] - sign * (i == j) for j in range(n)] for i in range(n)])


# ------------------------------------------------------- isometry extension

@dataclass
class ExtensionResult:
    matrix: Optional[IntMatrix]
    mismatches: list[dict]

    @property
    def compatible(self) -> bool:
        return self.matrix is not None


def _check_sub_isometry(phi, G1, G2, what):
    # Rows of phi give images of the source basis in the target basis.
    if la.matmul(la.matmul(phi, G2), la.transpose(phi)) != [list(r) for r in G1]:
        raise LatticeError(f"{what} is not an isometry")
    if not la.is_unimodular(phi):
        raise LatticeError(f"{what} is not invertible over Z")


def extend_isometry(E1: Embedding, E2: Embedding, phi, psi) -> ExtensionResult:
    """Glue ``phi: M1 -> M2`` and ``psi: M1perp -> M2perp`` to the ambient.

    ``phi`` and ``psi`` are integer matrices whose ``i``-th row holds the
    image of the ``i``-th source basis vector in target basis coordinates
    (complement bases are those of :func:`orthogonal_complement`).  If the
    induced maps on discriminant groups satisfy
    ``gamma2 . phi_bar == psi_bar . gamma1`` the unique ambient isometry
    restricting to ``phi`` and ``psi`` is returned; otherwise the
    mismatching generator images are reported.
    """
    if E1.ambient.gram != E2.ambient.gram:
        raise LatticeError("embeddings live in different ambient lattices")
    for E in (E1, E2):
        _require_glue_preconditions(E)
    P1, P2 = orthogonal_complement(E1), orthogonal_complement(E2)
    phi = la.as_matrix(phi)
    psi = la.as_matrix(psi)
    _check_sub_isometry(phi, E1.gram, E2.gram, "phi")
    _check_sub_isometry(psi, P1.gram, P2.gram, "psi")

    def push(E_src, E_dst, mat, x):
        c = E_src.coords(x)
        return E_dst.to_ambient(la.vecmat(c, mat))

    g1 = glue_map(E1, verify=False)
    g2 = glue_map(E2, verify=False)
    mismatches = []
    for i, x in enumerate(g1.source.generators):
        left = g2.apply(push(E1, E2, phi, x))
        right = P2.reduce(push(P1, P2, psi, g1.images[i]))
        if left != right:
            mismatches.append(
                {"generator": i, "gamma2_phi": [str(a) for a in left], "psi_gamma1": [str(a) for a in right]}
            )
    W1 = E1.B + P1.B
    W2 = la.matmul(phi, E2.B) + la.matmul(psi, P2.B)
    # Row action x -> x @ R with W1 @ R = W2; column action is R.T.
    R = la.matmul(la.inverse(W1), W2)
    integral = all(a.denominator == 1 for row in R for a in row)
    if mismatches or not integral:
        if not mismatches:
            mismatches.append({"generator": None, "reason": "non-integral extension"})
        return ExtensionResult(None, mismatches)
    F = la.transpose([[int(a) for a in row] for row in R])
    if not is_isometry(F, E1.ambient.G):
        raise AssertionError("glued map failed to be an isometry")
    return ExtensionResult(F, [])
