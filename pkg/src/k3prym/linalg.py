"""Exact integer and rational matrix kernel.

Matrices are plain lists of rows holding Python ``int`` (or ``Fraction``)
entries, so every computation here is exact.  Nothing in this module ever
touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

IntMatrix = list[list[int]]


def as_matrix(A: Sequence[Sequence[int]]) -> IntMatrix:
    """Copy ``A`` into a fresh list-of-lists, rejecting ragged input."""
    rows = [list(r) for r in A]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix rows have different lengths")
    return rows


def shape(A) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> IntMatrix:
    return [[0] * n for _ in range(m)]


def transpose(A):
    return [list(c) for c in zip(*A)] if A else []


def matmul(A, B):
    Bt = transpose(B)
    if not A:
        return []
    if not Bt:
        return [[] for _ in A]
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def vecmat(v, A):
    n = len(A[0]) if A else 0
    out = [0] * n
    for c, row in zip(v, A):
        if c:
            for j, a in enumerate(row):
                out[j] += c * a
    return out


def neg(A):
    return [[-a for a in row] for row in A]


def add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def is_symmetric(A) -> bool:
    n, m = shape(A)
    return n == m and all(A[i][j] == A[j][i] for i in range(n) for j in range(i))


def direct_sum(*blocks):
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, a in enumerate(row):
                out[k + i][k + j] = a
        k += len(b)
    return out


def det(A) -> int:
    """Determinant by fraction-free Bareiss elimination (exact for ints)."""
    n, m = shape(A)
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    M = [list(r) for r in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                if isinstance(num, int) and isinstance(prev, int):
                    M[i][j] = num // prev
                else:
                    M[i][j] = num / prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A) -> int:
    return len(_row_echelon(A)[1])


def _row_echelon(A):
    """Reduced row echelon form over Q; returns (R, pivot columns)."""
    R = [[Fraction(a) for a in row] for row in A]
    m, n = shape(R)
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [a * inv for a in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def inverse(A) -> list[list[Fraction]]:
    """Exact inverse over Q; raises ``ZeroDivisionError`` when singular."""
    n, m = shape(A)
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    R, piv = _row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R[:n]]


def rational_solve(A, b) -> Optional[list[Fraction]]:
    """Solve ``A x = b`` exactly over Q.

    Returns one solution (free variables set to zero) or ``None`` when the
    system is inconsistent.
    """
    m, n = shape(A)
    if len(b) != m:
        raise ValueError("right-hand side has the wrong length")
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    if n == 0:
        return [] if all(Fraction(bi) == 0 for bi in b) else None
    R, piv = _row_echelon(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(piv):
        x[c] = R[r][n]
    return x


@dataclass(frozen=True)
class SNFResult:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` diagonal."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    Vinv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        m, n = shape(self.S)
        return [self.S[i][i] for i in range(min(m, n))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> list[int]:
        return [d for d in self.diagonal if d != 0]


def smith_normal_form(A: Sequence[Sequence[int]]) -> SNFResult:
    """Smith normal form with unimodular transforms.

    The diagonal of ``S`` is nonnegative and each entry divides the next.
    ``Vinv`` (the exact inverse of ``V``) is tracked alongside since several
    callers need a basis of the row space saturation.
    """
    S = as_matrix(A)
    m, n = shape(S)
    if any(not isinstance(a, int) for row in S for a in row):
        S = [[_as_int(a) for a in row] for row in S]
    U = identity(m)
    V = identity(n)
    Vi = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        S[dst] = [a + q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        # col_dst += q * col_src
        for row in S:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        Vi[src] = [a - q * b for a, b in zip(Vi[src], Vi[dst])]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] != 0 and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // S[t][t]))
                    if S[i][t]:
                        done = False
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // S[t][t]))
                    if S[t][j]:
                        done = False
            if not done:
                i, j = min(
                    ((i, t) for i in range(t, m) if S[i][t]),
                    key=lambda ij: abs(S[ij[0]][ij[1]]),
                )
                k, l = min(
                    ((t, j) for j in range(t, n) if S[t][j]),
                    key=lambda ij: abs(S[ij[0]][ij[1]]),
                )
                if abs(S[i][j]) <= abs(S[k][l]):
                    swap_rows(t, i)
                else:
                    swap_cols(t, l)
                continue
            p = S[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-a for a in S[t]]
            U[t] = [-a for a in U[t]]
    return SNFResult(U=U, S=S, V=V, Vinv=Vi)


def _as_int(a) -> int:
    if isinstance(a, Fraction):
        if a.denominator != 1:
            raise ValueError(f"non-integer entry {a}")
        return a.numerator
    if int(a) != a:
        raise ValueError(f"non-integer entry {a}")
    return int(a)


def elementary_divisors(A) -> list[int]:
    return smith_normal_form(A).invariant_factors


def hermite_normal_form(A, reduce: bool = True) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form ``H = U @ A``.

    ``H`` is upper echelon with positive pivots and zero rows at the bottom.
    With ``reduce`` the entries above each pivot are brought into
    ``[0, pivot)``, which makes ``H`` the canonical basis of the row lattice.
    """
    H = [[_as_int(a) for a in row] for row in as_matrix(A)]
    m, n = shape(H)
    U = identity(m)
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[p] = H[p], H[r]
            U[r], U[p] = U[p], U[r]
            clean = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if H[i][c]:
                        clean = False
            if clean:
                break
        if r < m and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
                U[r] = [-a for a in U[r]]
            if reduce:
                for i in range(r):
                    q = H[i][c] // H[r][c]
                    if q:
                        H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                        U[i] = [a - q * b for a, b in zip(U[i], U[r])]
            pivots.append(c)
            r += 1
    return H, U


def hnf_basis(A) -> IntMatrix:
    """Canonical basis (nonzero rows of the reduced HNF) of the row lattice."""
    H, _ = hermite_normal_form(A)
    return [row for row in H if any(row)]


def saturate(B) -> IntMatrix:
    """Basis of ``span_Q(rows of B) ∩ Z^n`` in reduced HNF.

    Raises ``ValueError`` if the rows are linearly dependent.
    """
    B = as_matrix(B)
    if not B:
        return []
    snf = smith_normal_form(B)
    k = len(B)
    if snf.rank != k:
        raise ValueError("rows are linearly dependent")
    return hnf_basis(snf.Vinv[:k])


def saturation_index(B) -> int:
    """Index of the row lattice of ``B`` inside its saturation."""
    snf = smith_normal_form(B)
    if snf.rank != len(B):
        raise ValueError("rows are linearly dependent")
    out = 1
    for d in snf.invariant_factors:
        out *= d
    return out


def kernel_basis(A) -> IntMatrix:
    """Rows spanning the saturated integer right kernel ``{x : A x = 0}``."""
    A = as_matrix(A)
    m, n = shape(A)
    if m == 0:
        return identity(n)
    snf = smith_normal_form(A)
    Vt = transpose(snf.V)
    return hnf_basis(Vt[snf.rank:]) if snf.rank < n else []


def left_kernel_basis(A) -> IntMatrix:
    """Rows spanning the saturated integer left kernel ``{x : x A = 0}``."""
    return kernel_basis(transpose(A)) if A and A[0] else identity(len(A))


def integer_solve(A, b) -> Optional[list[int]]:
    """One integer solution of ``A x = b`` or ``None``."""
    A = as_matrix(A)
    m, n = shape(A)
    snf = smith_normal_form(A)
    c = matvec(snf.U, b)
    y = [0] * n
    for i in range(m):
        d = snf.S[i][i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        elif c[i] % d:
            return None
        else:
            y[i] = c[i] // d
    return matvec(snf.V, y)


def express_in_basis(B, v) -> Optional[list[Fraction]]:
    """Coordinates ``c`` with ``c @ B == v`` (rows of ``B`` independent)."""
    return rational_solve(transpose(B), list(v))


def inertia(G) -> tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) of a symmetric matrix by exact congruence.

    Zero diagonal entries are handled with 2x2 pivots: a block
    ``[[0, b], [b, c]]`` with ``b != 0`` always has one positive and one
    negative eigenvalue.
    """
    if not is_symmetric(G):
        raise ValueError("inertia requires a symmetric matrix")
    M = [[Fraction(a) for a in row] for row in G]
    n = len(M)
    pos = negc = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if M[i][i] != 0), None)
        if k is not None:
            d = M[k][k]
            if d > 0:
                pos += 1
            else:
                negc += 1
            rest = [i for i in active if i != k]
            for i in rest:
                f = M[i][k] / d
                if f:
                    for j in rest:
                        M[i][j] -= f * M[k][j]
            active = rest
            continue
        pair = next(
            ((i, j) for i in active for j in active if i < j and M[i][j] != 0), None
        )
        if pair is None:
            break
        i0, j0 = pair
        pos += 1
        negc += 1
        # Block [[0, b], [b, 0]] with inverse [[0, 1/b], [1/b, 0]].
        b = M[i0][j0]
        rest = [i for i in active if i not in pair]
        for i in rest:
            ui, vi = M[i][i0], M[i][j0]
            if ui == 0 and vi == 0:
                continue
            for j in rest:
                uj, vj = M[i0][j], M[j0][j]
                M[i][j] -= (ui * vj + vi * uj) / b
        active = rest
    return pos, negc, n - pos - negc


def is_unimodular(A) -> bool:
    return abs(det(A)) == 1
