"""Ternary and binary forms with exact (Fraction / Gaussian rational) or
complex coefficients, plus lines in the dual plane."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import sympy as sp

Number = Union[int, Fraction, complex, float]
X, Y, Z = sp.symbols("x y z")


def monomials(d: int) -> list[tuple[int, int, int]]:
    """Exponents ``(i, j, k)`` of ``x^i y^j z^k``, degree ``d``, graded-lex."""
    return [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction)) or isinstance(c, GaussianRational)


def _exactify(c):
    if isinstance(c, bool):
        return Fraction(int(c))
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, (Fraction, GaussianRational)):
        return c
    if isinstance(c, float):
        return Fraction(c)
    if isinstance(c, complex):
        return GaussianRational(Fraction(c.real), Fraction(c.imag)).simplify()
    if isinstance(c, sp.Basic):
        re, im = c.as_real_imag()
        g = GaussianRational(Fraction(str(sp.Rational(re))), Fraction(str(sp.Rational(im))))
        return g.simplify()
    raise TypeError(f"unsupported coefficient {c!r}")


@dataclass(frozen=True)
class GaussianRational:
    """``re + i*im`` with rational parts; just enough arithmetic for forms."""

    re: Fraction
    im: Fraction = Fraction(0)

    def simplify(self):
        return self.re if self.im == 0 else self

    def _lift(self, o):
        if isinstance(o, GaussianRational):
            return o
        if isinstance(o, (int, Fraction)):
            return GaussianRational(Fraction(o))
        return NotImplemented

    def __add__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return complex(self) + o
        return GaussianRational(self.re + o.re, self.im + o.im).simplify()

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return complex(self) * o
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re).simplify()

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if o is NotImplemented:
            return complex(self) / o
        n = o.re * o.re + o.im * o.im
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, o):
        return GaussianRational(Fraction(o)) / self

    def __pow__(self, k: int):
        out = GaussianRational(Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        if isinstance(o, GaussianRational):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, Fraction)):
            return self.im == 0 and self.re == o
        return complex(self) == o

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def to_sympy(self):
        return sp.Rational(self.re) + sp.I * sp.Rational(self.im)


def to_sympy_number(c):
    if isinstance(c, GaussianRational):
        return c.to_sympy()
    if isinstance(c, (int, Fraction)):
        return sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else sp.Integer(c)
    return sp.nsimplify(c)


def fmt_number(c) -> str:
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, int):
        return str(c)
    if isinstance(c, GaussianRational):
        return f"{c.re}{'+' if c.im >= 0 else '-'}{abs(c.im)}i"
    c = complex(c)
    re, im = c.real + 0.0, c.imag + 0.0
    return f"{re!r}{'+' if im >= 0 else '-'}{abs(im)!r}i"


# ----------------------------------------------------------------- ternary

class TernaryForm:
    """Homogeneous polynomial in ``x, y, z`` of a fixed degree.

    ``coeffs`` follows :func:`monomials` order.  A form is *exact* when all
    coefficients are rationals (or Gaussian rationals); otherwise it is a
    numeric form with complex coefficients.
    """

    __slots__ = ("degree", "coeffs", "__dict__")

    def __init__(self, degree: int, coeffs: Sequence[Number], exact: Optional[bool] = None):
        mons = monomials(degree)
        if len(coeffs) != len(mons):
            raise ValueError(f"degree {degree} form needs {len(mons)} coefficients, got {len(coeffs)}")
        if exact is None:
            exact = all(isinstance(c, (int, Fraction, GaussianRational)) for c in coeffs)
        if exact:
            cs = tuple(_exactify(c) for c in coeffs)
        else:
            cs = tuple(complex(c) for c in coeffs)
        if all(c == 0 for c in cs):
            raise ValueError("form is identically zero")
        self.degree = degree
        self.coeffs = cs

    # -- constructors
    @classmethod
    def from_dict(cls, degree: int, d: dict) -> "TernaryForm":
        mons = monomials(degree)
        for k in d:
            if k not in mons:
                raise ValueError(f"monomial {k} is not of degree {degree}")
        return cls(degree, [d.get(m, 0) for m in mons])

    @classmethod
    def from_sympy(cls, expr, degree: Optional[int] = None) -> "TernaryForm":
        P = sp.Poly(sp.expand(expr), X, Y, Z)
        if not P.is_homogeneous:
            raise ValueError("expression is not homogeneous")
        deg = P.total_degree() if degree is None else degree
        d = {m: _exactify(c) for m, c in zip(P.monoms(), P.coeffs())}
        return cls.from_dict(deg, d)

    # -- views
    @property
    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs)

    @cached_property
    def as_dict(self) -> dict:
        return {m: c for m, c in zip(monomials(self.degree), self.coeffs) if c != 0}

    @cached_property
    def complex_coeffs(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def numeric(self) -> "TernaryForm":
        return TernaryForm(self.degree, [complex(c) for c in self.coeffs], exact=False)

    def to_sympy(self):
        return sum(
            (to_sympy_number(c) * X ** i * Y ** j * Z ** k for (i, j, k), c in self.as_dict.items()),
            sp.Integer(0),
        )

    @property
    def domain(self) -> str:
        return "QQ_I" if any(isinstance(c, GaussianRational) for c in self.coeffs) else "QQ"

    def to_poly(self):
        return sp.Poly(self.to_sympy(), X, Y, Z, domain=self.domain)

    # -- arithmetic (exactness is preserved when both operands are exact)
    def _combine(self, other: "TernaryForm", sign: int) -> "TernaryForm":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return TernaryForm(
            self.degree, [a + sign * b for a, b in zip(self.coeffs, other.coeffs)]
        )

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c) -> "TernaryForm":
        return TernaryForm(self.degree, [c * a for a in self.coeffs])

    def __mul__(self, other: "TernaryForm") -> "TernaryForm":
        if not isinstance(other, TernaryForm):
            return self.scale(other)
        out: dict = {}
        for (a, ca) in self.as_dict.items():
            for (b, cb) in other.as_dict.items():
                k = (a[0] + b[0], a[1] + b[1], a[2] + b[2])
                out[k] = out.get(k, 0) + ca * cb
        return TernaryForm.from_dict(self.degree + other.degree, out)

    __rmul__ = scale

    def __eq__(self, other):
        return isinstance(other, TernaryForm) and self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.degree, self.coeffs))

    def __repr__(self):
        return f"TernaryForm({self.degree}, {self.to_sympy()})"

    # -- evaluation
    def __call__(self, p):
        x, y, z = p
        return sum(c * x ** i * y ** j * z ** k for (i, j, k), c in self.as_dict.items())

    def partial(self, var: int) -> "TernaryForm":
        out: dict = {}
        for m, c in self.as_dict.items():
            if m[var]:
                k = list(m)
                k[var] -= 1
                out[tuple(k)] = out.get(tuple(k), 0) + m[var] * c
        if not out:
            return None
        return TernaryForm.from_dict(self.degree - 1, out)

    def gradient(self, p):
        out = []
        for v in range(3):
            d = self.partial(v)
            out.append(0 if d is None else d(p))
        return out

    def compose(self, T) -> "TernaryForm":
        """``F(T @ X)`` for a 3x3 matrix ``T`` (entries exact or complex)."""
        lin = [[T[r][c] for c in range(3)] for r in range(3)]
        out: dict = {}
        cache: dict = {}

        def power(r, e):
            key = (r, e)
            if key not in cache:
                if e == 0:
                    cache[key] = {(0, 0, 0): 1}
                else:
                    prev = power(r, e - 1)
                    acc: dict = {}
                    for m, c in prev.items():
                        for v in range(3):
                            if lin[r][v] != 0:
                                k = list(m)
                                k[v] += 1
                                acc[tuple(k)] = acc.get(tuple(k), 0) + c * lin[r][v]
                    cache[key] = acc
            return cache[key]

        for (i, j, k), c in self.as_dict.items():
            a, b, cc = power(0, i), power(1, j), power(2, k)
            for m1, c1 in a.items():
                for m2, c2 in b.items():
                    for m3, c3 in cc.items():
                        key = (m1[0] + m2[0] + m3[0], m1[1] + m2[1] + m3[1], m1[2] + m2[2] + m3[2])
                        out[key] = out.get(key, 0) + c * c1 * c2 * c3
        return TernaryForm.from_dict(self.degree, out)

    def norm(self) -> float:
        return float(np.max(np.abs(self.complex_coeffs)))


def quartic(coeffs) -> TernaryForm:
    return TernaryForm(4, coeffs)


def conic(coeffs) -> TernaryForm:
    return TernaryForm(2, coeffs)


# ------------------------------------------------------------------ binary

@dataclass(frozen=True)
class BinaryForm:
    """``sum_i c[i] s^(d-i) u^i`` on a parametrized line."""

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs)

    def __call__(self, s, u):
        d = self.degree
        return sum(c * s ** (d - i) * u ** i for i, c in enumerate(self.coeffs))

    def dehomogenized(self) -> list:
        """Coefficients of ``f(u) = form(1, u)``, constant term first."""
        return list(self.coeffs)

    def to_sympy(self, var=sp.Symbol("u")):
        return sum(to_sympy_number(c) * var ** i for i, c in enumerate(self.coeffs))

    def complex_coeffs(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


# -------------------------------------------------------------------- line

@dataclass(frozen=True)
class Line:
    """The line ``l0 x + l1 y + l2 z = 0`` (dual coordinates)."""

    coords: tuple

    def __post_init__(self):
        if len(self.coords) != 3 or all(c == 0 for c in self.coords):
            raise ValueError("line needs three coordinates, not all zero")

    @classmethod
    def of(cls, *coords) -> "Line":
        if len(coords) == 1:
            coords = tuple(coords[0])
        if all(isinstance(c, (int, Fraction)) for c in coords):
            return cls(tuple(Fraction(c) for c in coords))
        return cls(tuple(complex(c) for c in coords))

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coords)

    @property
    def pivot(self) -> int:
        mags = [abs(complex(c)) for c in self.coords]
        return mags.index(max(mags))

    def normalized(self) -> "Line":
        """Scale so the largest-modulus coordinate (first on ties) equals 1."""
        k = self.pivot
        c = self.coords[k]
        return Line(tuple(a / c for a in self.coords))

    def as_array(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coords], dtype=complex)

    def parametrization(self):
        """Two points ``P0, P1`` spanning the line, chosen deterministically.

        With ``k`` the pivot coordinate and ``j1 < j2`` the others,
        ``P0 = e_j1 - (l_j1/l_k) e_k`` and ``P1 = e_j2 - (l_j2/l_k) e_k``;
        the point with parameters ``(s, u)`` is ``s P0 + u P1``.
        """
        k = self.pivot
        j1, j2 = [j for j in range(3) if j != k]
        lk = self.coords[k]
        P0 = [0, 0, 0]
        P1 = [0, 0, 0]
        P0[j1] = 1
        P1[j2] = 1
        P0[k] = -self.coords[j1] / lk
        P1[k] = -self.coords[j2] / lk
        return tuple(P0), tuple(P1)

    def point(self, s, u):
        P0, P1 = self.parametrization()
        return tuple(s * a + u * b for a, b in zip(P0, P1))

    def distance(self, other: "Line") -> float:
        """Fubini-Study sine distance between lines in the dual plane."""
        return fs_distance(self.as_array(), other.as_array())

    def to_json(self, digits: int = 12):
        out = []
        for c in self.coords:
            if isinstance(c, complex):
                c = complex(round(c.real, digits) + 0.0, round(c.imag, digits) + 0.0)
            out.append(fmt_number(c))
        return out


def fs_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Sine of the Fubini-Study angle between ``[a]`` and ``[b]``.

    Computed as the norm of the part of ``a`` orthogonal to ``b``, which
    keeps full precision for nearly proportional vectors (the textbook
    ``sqrt(1 - cos^2)`` bottoms out near ``1e-8``).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(min(1.0, np.linalg.norm(a - np.vdot(b, a) * b)))


def restrict_along(F: TernaryForm, P0, P1) -> BinaryForm:
    """Binary form ``F(s P0 + u P1)``."""
    lin = [[P0[r], P1[r]] for r in range(3)]  # coordinate r = P0[r] s + P1[r] u
    total = [0] * (F.degree + 1)
    for (i, j, k), c in F.as_dict.items():
        poly = [c]
        for r, e in ((0, i), (1, j), (2, k)):
            for _ in range(e):
                poly = _poly_mul(poly, lin[r])
        for idx, v in enumerate(poly):
            total[idx] += v
    return BinaryForm(tuple(total))


def restrict_to_line(F: TernaryForm, t: Line) -> BinaryForm:
    """Restriction of ``F`` to ``t`` under :meth:`Line.parametrization`.

    Exact when both ``F`` and ``t`` are exact; the result ``is_zero`` flag
    marks lines contained in the curve.
    """
    P0, P1 = t.parametrization()
    return restrict_along(F, P0, P1)
