"""Plane quartic geometry: smoothness, tangency classification, totally
tangent pairs from a pencil containing a double conic, genericity checks,
and conics through point sets."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy as sp

from .forms import (
    X,
    Y,
    Z,
    BinaryForm,
    GaussianRational,
    Line,
    TernaryForm,
    conic,
    fmt_number,
    fs_distance,
    monomials,
    quartic,
    restrict_to_line,
)

S_, U_ = sp.symbols("s u")

PATTERNS = {
    (1, 1, 1, 1): "ordinary",
    (2, 1, 1): "simple-tangent",
    (3, 1): "flex",
    (2, 2): "bitangent",
    (4,): "hyperflex",
}


class NotSmooth(ValueError):
    """A curve that is required to be smooth has a singular point."""


# ------------------------------------------------------------- smoothness

def _exact_form(F: TernaryForm) -> TernaryForm:
    """Exact copy of ``F``; float coefficients are converted exactly."""
    if F.is_exact:
        return F
    return TernaryForm(F.degree, list(F.coeffs), exact=True)


def is_smooth(F: TernaryForm) -> bool:
    """True iff the partial derivatives of ``F`` have no common zero in P^2.

    Decided exactly: the ideal of partials is irrelevant iff its Groebner
    basis has a pure power of every variable among its leading monomials.
    Float coefficients are first converted to the rationals they denote.
    """
    F = _exact_form(F)
    if F.degree == 2:
        return conic_matrix_det(F) != 0
    P = F.to_poly()
    partials = [P.diff(v) for v in (X, Y, Z)]
    partials = [p for p in partials if not p.is_zero]
    if len(partials) < 3:
        return False
    G = sp.groebner(partials, X, Y, Z, order="grevlex", domain=P.domain)
    pure = set()
    for g in G.polys:
        m = g.monoms(order="grevlex")[0]
        nz = [i for i, e in enumerate(m) if e]
        if len(nz) == 1:
            pure.add(nz[0])
    return pure == {0, 1, 2}


def conic_matrix(Q: TernaryForm):
    c = dict(zip(monomials(2), Q.coeffs))
    h = Fraction(1, 2) if Q.is_exact else 0.5
    return [
        [c[(2, 0, 0)], h * c[(1, 1, 0)], h * c[(1, 0, 1)]],
        [h * c[(1, 1, 0)], c[(0, 2, 0)], h * c[(0, 1, 1)]],
        [h * c[(1, 0, 1)], h * c[(0, 1, 1)], c[(0, 0, 2)]],
    ]


def conic_matrix_det(Q: TernaryForm):
    m = conic_matrix(Q)
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def singular_points(F: TernaryForm, seed: int = 0, starts: int = 40, tol: float = 1e-9) -> list:
    """Numerical singular points of ``F`` (normalized, deduplicated).

    Gauss-Newton on the three partials in each affine chart from seeded
    random starts; used to produce witnesses, not to decide smoothness.
    """
    G = F.numeric()
    parts = [G.partial(v) for v in range(3)]
    hess = [[p.partial(v) if p is not None else None for v in range(3)] for p in parts]
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    for chart in range(3):
        free = [v for v in range(3) if v != chart]
        for _ in range(starts):
            pt = np.zeros(3, dtype=complex)
            pt[chart] = 1
            pt[free] = rng.normal(size=2) + 1j * rng.normal(size=2)
            for _ in range(80):
                r = np.array([0 if p is None else p(pt) for p in parts], dtype=complex)
                J = np.array(
                    [[0 if h is None else h(pt) for h in (hess[i][v] for v in free)] for i in range(3)],
                    dtype=complex,
                )
                step, *_ = np.linalg.lstsq(J, -r, rcond=None)
                pt[free] += step
                if np.linalg.norm(step) < 1e-15 * (1 + np.linalg.norm(pt)):
                    break
            if not np.all(np.isfinite(pt)):
                continue
            q = pt / np.linalg.norm(pt)
            r = np.array([0 if p is None else p(q) for p in parts], dtype=complex)
            if np.max(np.abs(r)) > tol * max(1.0, G.norm()):
                continue
            k = int(np.argmax(np.abs(q)))
            q = q / q[k]
            if all(fs_distance(q, f) > 1e-6 for f in found):
                found.append(q)
    found.sort(key=lambda v: tuple(np.round(np.concatenate([v.real, v.imag]), 9)))
    return found


# ------------------------------------------------------- binary roots

def binary_roots(g: BinaryForm, lead_tol: float = 1e-13) -> list[np.ndarray]:
    """Projective roots ``(s:u)`` of a numeric binary form, as unit vectors."""
    c = g.complex_coeffs()
    scale = np.max(np.abs(c))
    if scale == 0:
        raise ValueError("zero binary form has no isolated roots")
    c = c / scale
    d = len(c) - 1
    top = d
    while top > 0 and abs(c[top]) < lead_tol:
        top -= 1
    roots = []
    if top > 0:
        for u in np.roots(c[: top + 1][::-1]):
            v = np.array([1, u], dtype=complex)
            roots.append(v / np.linalg.norm(v))
    roots.extend(np.array([0, 1], dtype=complex) for _ in range(d - top))
    return roots


def _chordal(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(a[0] * b[1] - a[1] * b[0]))


def cluster_roots(roots: Sequence[np.ndarray], tol: float) -> list[tuple[np.ndarray, int]]:
    """Group projective roots closer than ``tol`` (single linkage)."""
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if _chordal(roots[i], roots[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for idx in groups.values():
        ref = roots[idx[0]]
        acc = np.zeros(2, dtype=complex)
        for i in idx:
            r = roots[i]
            ph = np.vdot(r, ref)
            acc += r * (ph / abs(ph) if abs(ph) > 0 else 1)
        out.append((acc / np.linalg.norm(acc), len(idx)))
    out.sort(key=lambda t: (-t[1], float(np.angle(t[0][1] / t[0][0])) if abs(t[0][0]) > 1e-12 else 10.0))
    return out


def pattern_residual(g: BinaryForm, clusters) -> float:
    """Relative coefficient misfit of ``g`` against ``c * prod (u s_r - s u_r)^m``."""
    model = np.array([1], dtype=complex)
    for r, m in clusters:
        lin = np.array([-r[1], r[0]], dtype=complex)  # in s^(d-i) u^i order
        for _ in range(m):
            model = np.convolve(model, lin)
    c = g.complex_coeffs()
    k = np.vdot(model, c) / np.vdot(model, model)
    return float(np.max(np.abs(c - k * model)) / np.max(np.abs(c)))


# ----------------------------------------------------------- tangency

@dataclass
class TangencyReport:
    line: Line
    classification: str
    points: list  # [(projective point as complex triple, multiplicity)]
    residual: float
    exact: bool = False

    @property
    def pattern(self) -> tuple:
        return tuple(sorted((m for _, m in self.points), reverse=True))

    def to_json(self) -> dict:
        return {
            "line": self.line.normalized().to_json(),
            "classification": self.classification,
            "points": [
                {"point": [fmt_number(complex(round_c(c))) for c in p], "multiplicity": m}
                for p, m in self.points
            ],
            "residual": float(f"{self.residual:.3e}"),
            "exact": self.exact,
        }


def round_c(c, digits: int = 10) -> complex:
    c = complex(c)
    re, im = round(c.real, digits), round(c.imag, digits)
    return complex(re + 0.0, im + 0.0)


def _points_on_line(t: Line, clusters) -> list:
    P0, P1 = t.parametrization()
    P0 = np.array([complex(c) for c in P0])
    P1 = np.array([complex(c) for c in P1])
    out = []
    for r, m in clusters:
        p = r[0] * P0 + r[1] * P1
        k = int(np.argmax(np.abs(p)))
        out.append((tuple(p / p[k]), m))
    return out


def classify_tangency(F: TernaryForm, t: Line, cluster_tol: float = 1e-3) -> TangencyReport:
    """Classify how ``t`` meets the quartic ``F`` by the multiplicity pattern
    of the roots of the restriction.

    Exact inputs use a square-free decomposition; numeric inputs cluster
    roots within ``cluster_tol`` (chordal distance on P^1).
    """
    g = restrict_to_line(F, t)
    if g.is_zero:
        raise ValueError("restriction is identically zero: the line is a component")
    exact = g.is_exact and t.is_exact
    if exact:
        expr = sum(
            (sp.sympify(fmt_exact(c)) * S_ ** (g.degree - i) * U_ ** i for i, c in enumerate(g.coeffs)),
            sp.Integer(0),
        )
        _, factors = sp.sqf_list(sp.Poly(expr, S_, U_, extension=sp.I if _has_i(g) else None))
        mults = []
        clusters = []
        for fac, m in factors:
            deg = fac.total_degree()
            mults.extend([m] * deg)
            sub = BinaryForm(tuple(complex(fac.coeff_monomial(S_ ** (deg - i) * U_ ** i)) for i in range(deg + 1)))
            for r in binary_roots(sub):
                clusters.append((r, m))
        pattern = tuple(sorted(mults, reverse=True))
        residual = 0.0
    else:
        clusters = cluster_roots(binary_roots(g), cluster_tol)
        pattern = tuple(sorted((m for _, m in clusters), reverse=True))
        residual = pattern_residual(g, clusters)
    cls = PATTERNS.get(pattern, "degenerate")
    return TangencyReport(t, cls, _points_on_line(t, clusters), residual, exact)


def _has_i(g: BinaryForm) -> bool:
    return any(isinstance(c, GaussianRational) for c in g.coeffs)


def fmt_exact(c) -> str:
    if isinstance(c, GaussianRational):
        return f"({c.re}) + ({c.im})*I"
    return f"({Fraction(c)})"


# -------------------------------------------------- totally tangent pairs

@dataclass
class PairReport:
    """Result of :func:`make_tangent_pair`.

    ``status`` is ``"U-member"``, ``"Q-locus"`` or ``"degenerate"``.  For
    U-members, ``tangency_points`` are the 8 points of ``B0 n Q`` and
    ``certificate`` records the exact resultant identity used to show each
    is an intersection point of multiplicity 2.
    """

    B0: TernaryForm
    Q: TernaryForm
    lam: Fraction
    Delta0: TernaryForm
    status: str
    tangency_points: list = field(default_factory=list)
    multiplicities: list = field(default_factory=list)
    certificate: dict = field(default_factory=dict)
    witness: Optional[dict] = None

    @property
    def total_intersection(self) -> int:
        return sum(self.multiplicities)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "lambda": str(self.lam),
            "Delta0": [fmt_number(c) for c in self.Delta0.coeffs],
            "tangency_points": [[fmt_number(round_c(c)) for c in p] for p in self.tangency_points],
            "multiplicities": self.multiplicities,
            "certificate": self.certificate,
            "witness": self.witness,
        }


def pencil_member(B0: TernaryForm, Q: TernaryForm, lam) -> TernaryForm:
    """``Q^2 - lam * B0``."""
    if lam == 0:
        return Q * Q
    return Q * Q - B0.scale(lam)


def _coordinate_change(rng: random.Random):
    while True:
        T = [[Fraction(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
        T[2][2] = Fraction(1)
        M = sp.Matrix(T)
        if M.det() != 0:
            return T


def intersection_certificate(B0: TernaryForm, Q: TernaryForm, Delta0: TernaryForm, seed: int = 0, tries: int = 8):
    """Exact check that ``B0`` and ``Delta0`` meet in exactly the 8 points of
    ``B0 n Q``, each with multiplicity 2.

    After a rational coordinate change (identity first) making the
    projection from ``(0:0:1)`` generic, ``R8 = Res_z(B0, Q)`` must be square
    free of degree 8 and ``Res_z(B0, Delta0) = c * R8^2``.  Returns the
    certificate dict and the coordinate change used.
    """
    rng = random.Random(seed)
    T = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    for attempt in range(tries):
        b, q, d = (F.compose(T).to_poly() for F in (B0, Q, Delta0))
        if b.degree(Z) == 4 and q.degree(Z) == 2 and d.degree(Z) == 4:
            R8 = sp.Poly(sp.resultant(b.as_expr(), q.as_expr(), Z), X, Y, domain=b.domain)
            if not R8.is_zero and R8.total_degree() == 8:
                sqf = sp.Poly(sp.quo(R8, sp.gcd(R8, R8.diff(X))), X, Y)
                if sqf.total_degree() == 8:
                    R16 = sp.Poly(sp.resultant(b.as_expr(), d.as_expr(), Z), X, Y, domain=b.domain)
                    lc8 = R8.LC()
                    lc16 = R16.LC()
                    c = lc16 / lc8 ** 2
                    ok = sp.expand(R16.as_expr() - c * R8.as_expr() ** 2) == 0
                    cert = {
                        "coordinate_change": [[str(a) for a in row] for row in T],
                        "R8_degree": 8,
                        "R8_squarefree": True,
                        "Res_B0_Delta0_equals_c_R8_squared": bool(ok),
                        "c": str(c),
                        "attempt": attempt,
                    }
                    return cert, T, R8
        T = _coordinate_change(rng)
    return {"R8_squarefree": False, "attempts": tries}, None, None


def _polish_intersection(F: TernaryForm, G: TernaryForm, p: np.ndarray, steps: int = 30) -> np.ndarray:
    """Newton on ``F = G = 0`` in the affine chart of the largest coordinate."""
    Fn, Gn = F.numeric(), G.numeric()
    k = int(np.argmax(np.abs(p)))
    p = p / p[k]
    free = [v for v in range(3) if v != k]
    for _ in range(steps):
        r = np.array([Fn(p), Gn(p)], dtype=complex)
        gF, gG = Fn.gradient(p), Gn.gradient(p)
        J = np.array([[gF[v] for v in free], [gG[v] for v in free]], dtype=complex)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            break
        p[free] += step
        if np.linalg.norm(step) < 1e-16:
            break
    return p


def intersection_points(B0: TernaryForm, Q: TernaryForm, T, R8) -> list[np.ndarray]:
    """The 8 points of ``B0 n Q`` from the roots of ``R8`` (in the changed
    coordinates of ``T``), mapped back and Newton-polished."""
    Tn = np.array([[complex(a) for a in row] for row in T])
    bT, qT = B0.compose(T).numeric(), Q.compose(T).numeric()
    coeffs = [complex(R8.coeff_monomial(X ** (8 - i) * Y ** i)) for i in range(9)]
    pts = []
    for r in binary_roots(BinaryForm(tuple(coeffs))):
        x, y = r
        # z from the quadratic q(x, y, z) = 0; keep the root that also kills b
        quad = [
            qT((x, y, 0)),
            (qT((x, y, 1)) - qT((x, y, -1))) / 2,
            (qT((x, y, 1)) + qT((x, y, -1))) / 2 - qT((x, y, 0)),
        ]
        zs = np.roots(quad[::-1]) if abs(quad[2]) > 0 else np.array([-quad[0] / quad[1]])
        best = min(zs, key=lambda z: abs(bT((x, y, z))))
        v = np.array([x, y, best], dtype=complex)
        v = _polish_intersection(bT, qT, v)
        p = Tn @ v
        k = int(np.argmax(np.abs(p)))
        pts.append(p / p[k])
    pts = [_polish_intersection(B0, Q, p) for p in pts]
    pts = [p / p[int(np.argmax(np.abs(p)))] for p in pts]
    pts.sort(key=lambda v: tuple(np.round(np.concatenate([v.real, v.imag]), 8)))
    return pts


def make_tangent_pair(B0: TernaryForm, Q: TernaryForm, lam, seed: int = 0) -> PairReport:
    """Form ``Delta0 = Q^2 - lam * B0`` and certify its tangency with ``B0``.

    Raises ``NotSmooth`` when ``Q`` (or ``B0``) is singular.  ``lam = 0``
    yields the double conic (status ``Q-locus``); a singular ``Delta0``
    yields status ``degenerate`` with a singular point as witness.
    """
    lam = Fraction(lam)
    if Q.degree != 2 or B0.degree != 4:
        raise ValueError("expected a quartic B0 and a conic Q")
    if not is_smooth(Q):
        raise NotSmooth("Q is not a smooth conic")
    if not is_smooth(B0):
        raise NotSmooth("B0 is not a smooth quartic")
    D0 = pencil_member(B0, Q, lam)
    if lam == 0:
        return PairReport(B0, Q, lam, D0, "Q-locus", witness={"Delta0_equals_Q_squared": True})
    if not is_smooth(D0):
        sing = singular_points(D0, seed=seed)
        w = {"singular_points": [[fmt_number(round_c(c)) for c in p] for p in sing[:4]]}
        factors = sp.factor_list(D0.to_sympy())
        w["factorization"] = [[str(f), int(m)] for f, m in factors[1]]
        w["constant"] = str(factors[0])
        return PairReport(B0, Q, lam, D0, "degenerate", witness=w)
    cert, T, R8 = intersection_certificate(B0, Q, D0, seed=seed)
    if T is None:
        return PairReport(
            B0, Q, lam, D0, "degenerate", certificate=cert,
            witness={"reason": "B0 and Q do not meet in 8 distinct points"},
        )
    pts = intersection_points(B0, Q, T, R8)
    mults = [2] * len(pts) if cert["Res_B0_Delta0_equals_c_R8_squared"] else []
    return PairReport(B0, Q, lam, D0, "U-member", pts, mults, cert)


# ---------------------------------------------------------- conic fitting

def veronese2(p: np.ndarray) -> np.ndarray:
    x, y, z = p
    return np.array([x * x, x * y, x * z, y * y, y * z, z * z], dtype=complex)


@dataclass
class ConicFit:
    conic: Optional[TernaryForm]
    residual: float  # smallest singular value of the normalized Veronese matrix
    gap: float  # next singular value (certifies a unique conic)
    max_point_residual: float = float("nan")

    @property
    def found(self) -> bool:
        return self.conic is not None


def points_on_conic(points: Sequence, tol: float = 1e-8, gap_tol: float = 1e-4) -> ConicFit:
    """Conic through ``points`` (at least 6), or ``conic=None`` if none.

    Rows of the Veronese matrix are built from unit-normalized points; a
    conic is returned when the smallest singular value is below ``tol`` and
    the next one is above ``gap_tol`` (so the conic is unique).
    """
    if len(points) < 6:
        raise ValueError(f"need at least 6 points, got {len(points)}")
    rows = []
    for p in points:
        v = np.asarray([complex(c) for c in p])
        v = v / np.linalg.norm(v)
        r = veronese2(v)
        rows.append(r / np.linalg.norm(r))
    A = np.array(rows)
    _, sv, Vh = np.linalg.svd(A)
    smallest = float(sv[-1]) if len(sv) == 6 else 0.0
    gap = float(sv[-2]) if len(sv) == 6 else float(sv[-1])
    if smallest >= tol or gap <= gap_tol:
        return ConicFit(None, smallest, gap)
    c = Vh[-1].conj()
    c = c / c[int(np.argmax(np.abs(c)))]
    C = TernaryForm(2, list(c), exact=False)
    worst = max(abs(C(tuple(np.asarray(p, dtype=complex) / np.linalg.norm(np.asarray(p, dtype=complex))))) for p in points)
    return ConicFit(C, smallest, gap, float(worst))


def proportionality_distance(F: TernaryForm, G: TernaryForm) -> float:
    """Fubini-Study distance between coefficient vectors (0 iff proportional)."""
    return fs_distance(F.complex_coeffs, G.complex_coeffs)


# --------------------------------------------------------- random inputs

def random_form(rng: random.Random, degree: int, bound: int = 5) -> TernaryForm:
    while True:
        cs = [Fraction(rng.randint(-bound, bound)) for _ in monomials(degree)]
        if any(cs):
            return TernaryForm(degree, cs)


def random_smooth_quartic(rng: random.Random, bound: int = 5) -> TernaryForm:
    while True:
        F = random_form(rng, 4, bound)
        if is_smooth(F):
            return F


def random_smooth_conic(rng: random.Random, bound: int = 3) -> TernaryForm:
    while True:
        Q = random_form(rng, 2, bound)
        if is_smooth(Q):
            return Q


def random_pair(seed: int, bound: int = 5):
    """Seeded U-member data ``(B0, Q, mu)`` with ``lam = mu^2`` and smooth
    ``Delta0``."""
    rng = random.Random(seed)
    while True:
        B0 = random_smooth_quartic(rng, bound)
        Q = random_smooth_conic(rng)
        mu = Fraction(rng.choice([1, 2, 3, 4, 5]), rng.choice([1, 2, 3, 4])) * rng.choice([1, -1])
        if is_smooth(pencil_member(B0, Q, mu * mu)):
            return B0, Q, mu


FERMAT = quartic([1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1])
FERMAT_CONIC = conic([1, 0, 0, 1, 0, 1])
