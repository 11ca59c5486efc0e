"""Bitangent lines of a smooth plane quartic by seeded multistart Newton.

In a random projective chart ``X = T X'`` a line not through ``(0:0:1)``
is ``X'_3 = a X'_1 + b X'_2``.  Restricting ``F`` to it gives a binary
quartic ``g(s, u)``; the line is a bitangent iff
``g = k (s^2 + p s u + q u^2)^2``.  Matching the 5 coefficients gives a
square system in ``(a, b, k, p, q)``, solved in batches from random starts.
Hyperflexes (restriction a 4th power) are solutions too and are labelled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np

from .forms import Line, TernaryForm, fs_distance, restrict_to_line
from .quartics import TangencyReport, _points_on_line, binary_roots, cluster_roots

EXPECTED = 28


@dataclass(frozen=True)
class SolverConfig:
    starts: int = 300
    rounds: int = 6
    charts: int = 3
    newton_steps: int = 60
    dedup_tol: float = 1e-6
    residual_tol: float = 1e-9
    separation_tol: float = 1e-4
    hyperflex_tol: float = 1e-5


@dataclass
class BitangentResult:
    """Certified bitangent lines (hyperflex lines included and labelled).

    ``status`` is ``complete`` (28 proper bitangents), ``hyperflex`` (28
    lines of which some are hyperflexes) or ``incomplete``.
    """

    lines: list[TangencyReport]
    status: str
    max_residual: float
    min_separation: float
    starts_used: int
    charts_used: int
    seed: int
    notes: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.lines)

    @property
    def hyperflexes(self) -> list[TangencyReport]:
        return [r for r in self.lines if r.classification == "hyperflex"]

    @property
    def proper(self) -> list[TangencyReport]:
        return [r for r in self.lines if r.classification == "bitangent"]

    @property
    def certified(self) -> bool:
        return self.status in ("complete", "hyperflex")

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "count": self.count,
            "proper_count": len(self.proper),
            "hyperflex_count": len(self.hyperflexes),
            "lines_on_double_plane": 2 * self.count,
            "max_residual": float(f"{self.max_residual:.3e}"),
            "min_separation": float(f"{self.min_separation:.3e}"),
            "starts_used": self.starts_used,
            "charts_used": self.charts_used,
            "seed": self.seed,
            "bitangents": [r.to_json() for r in self.lines],
            "notes": self.notes,
        }


def _restriction_terms(H: np.ndarray):
    """For the quartic with coefficient vector ``H`` (monomial order of
    degree 4), list terms ``(n, coef, ea, eb)`` with
    ``g_n(a, b) = sum coef * a^ea * b^eb``."""
    from .forms import monomials

    terms = []
    for (i, j, k), h in zip(monomials(4), H):
        if h == 0:
            continue
        # s^i u^j (a s + b u)^k  ->  coefficient of s^(4-n) u^n
        for m in range(k + 1):
            n = j + m
            terms.append((n, h * comb(k, m), k - m, m))
    return terms


def _eval_g(terms, a: np.ndarray, b: np.ndarray):
    """``g`` and its partials in ``a`` and ``b`` for a batch of points."""
    N = a.shape[0]
    g = np.zeros((N, 5), dtype=complex)
    ga = np.zeros((N, 5), dtype=complex)
    gb = np.zeros((N, 5), dtype=complex)
    apow = [np.ones(N, dtype=complex)]
    bpow = [np.ones(N, dtype=complex)]
    for _ in range(4):
        apow.append(apow[-1] * a)
        bpow.append(bpow[-1] * b)
    for n, c, ea, eb in terms:
        g[:, n] += c * apow[ea] * bpow[eb]
        if ea:
            ga[:, n] += c * ea * apow[ea - 1] * bpow[eb]
        if eb:
            gb[:, n] += c * eb * apow[ea] * bpow[eb - 1]
    return g, ga, gb


def _square(k, p, q):
    one = np.ones_like(p)
    return np.stack([one, 2 * p, p * p + 2 * q, 2 * p * q, q * q], axis=1) * k[:, None]


def _newton(terms, a, b, steps: int):
    g, _, _ = _eval_g(terms, a, b)
    k = g[:, 0].copy()
    safe = np.where(np.abs(k) > 1e-14, k, 1e-14)
    p = g[:, 1] / (2 * safe)
    q = (g[:, 2] / safe - p * p) / 2
    v = np.stack([a, b, k, p, q], axis=1)
    for _ in range(steps):
        a, b, k, p, q = v.T
        g, ga, gb = _eval_g(terms, a, b)
        R = g - _square(k, p, q)
        one = np.ones_like(p)
        zero = np.zeros_like(p)
        J = np.empty((v.shape[0], 5, 5), dtype=complex)
        J[:, :, 0] = ga
        J[:, :, 1] = gb
        J[:, :, 2] = -np.stack([one, 2 * p, p * p + 2 * q, 2 * p * q, q * q], axis=1)
        J[:, :, 3] = -k[:, None] * np.stack([zero, 2 * one, 2 * p, 2 * q, zero], axis=1)
        J[:, :, 4] = -k[:, None] * np.stack([zero, zero, 2 * one, 2 * p, 2 * q], axis=1)
        with np.errstate(all="ignore"):
            try:
                step = np.linalg.solve(J, -R[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                step = np.stack([np.linalg.lstsq(Ji, -Ri, rcond=None)[0] for Ji, Ri in zip(J, R)])
        step[~np.isfinite(step)] = 0
        v = v + step
        big = np.abs(v) > 1e8
        v[big] = np.nan
    return v


def perfect_square_residual(g: np.ndarray) -> tuple[float, complex, complex]:
    """Relative misfit of a binary quartic ``g`` (``s^(4-n) u^n`` order)
    against its best ``k (s^2 + p s u + q u^2)^2`` fit.

    The fit anchors at whichever end coefficient is larger (reversing the
    roles of ``s`` and ``u`` if needed) and returns ``(residual, p, q)``
    in that orientation.
    """
    g = np.asarray(g, dtype=complex)
    scale = np.max(np.abs(g))
    g = g / scale
    if abs(g[4]) > abs(g[0]):
        g = g[::-1]
    if abs(g[0]) < 1e-3:
        # both ends small: shift s -> s + u to move roots away from u = 0
        shifted = np.zeros(5, dtype=complex)
        for n in range(5):
            for m in range(n + 1):
                # s^(4-m) u^m with s -> s + u contributes to s^(4-n) u^n
                shifted[n] += g[m] * comb(4 - m, n - m)
        g = shifted / np.max(np.abs(shifted))
        if abs(g[4]) > abs(g[0]):
            g = g[::-1]
    k = g[0]
    p = g[1] / (2 * k)
    q = (g[2] / k - p * p) / 2
    fit = k * np.array([1, 2 * p, p * p + 2 * q, 2 * p * q, q * q])
    return float(np.max(np.abs(g - fit))), p, q


def _sorted_key(line: Line):
    v = line.normalized().as_array()
    return tuple(np.round(np.concatenate([v.real, v.imag]), 7))


def bitangents(F: TernaryForm, seed: int = 0, config: Optional[SolverConfig] = None) -> BitangentResult:
    """All bitangent lines of the smooth quartic ``F``, certified.

    Each returned line has restriction ``c q(s, u)^2`` to within
    ``residual_tol`` (relative); lines are pairwise farther apart than
    ``separation_tol``.  The solver stops once 28 lines are found; fewer
    after the full budget gives status ``incomplete``, never a padded list.
    """
    cfg = config or SolverConfig()
    if F.degree != 4:
        raise ValueError("bitangents are defined here for quartics")
    Fn = F.numeric()
    coeffs = Fn.complex_coeffs / Fn.norm()
    Fs = TernaryForm(4, list(coeffs), exact=False)
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    starts_used = 0
    charts_used = 0
    notes = []
    for chart in range(cfg.charts):
        charts_used += 1
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        T, _ = np.linalg.qr(A)
        H = Fs.compose(T.tolist()).complex_coeffs
        terms = _restriction_terms(H)
        Tinv_t = np.linalg.inv(T).T
        for _ in range(cfg.rounds):
            # starting lines uniform on the dual plane; their chart slopes are
            # heavy tailed, which reaches bitangents far out in the chart
            m = rng.normal(size=(cfg.starts, 3)) + 1j * rng.normal(size=(cfg.starts, 3))
            a, b = -m[:, 0] / m[:, 2], -m[:, 1] / m[:, 2]
            starts_used += cfg.starts
            v = _newton(terms, a, b, cfg.newton_steps)
            ok = np.all(np.isfinite(v), axis=1)
            for a_, b_, *_ in v[ok]:
                ell = Tinv_t @ np.array([-a_, -b_, 1], dtype=complex)
                ell = ell / ell[int(np.argmax(np.abs(ell)))]
                if any(fs_distance(ell, f) < cfg.dedup_tol for f in found):
                    continue
                g = restrict_to_line(Fs, Line(tuple(ell))).complex_coeffs()
                res, _, _ = perfect_square_residual(g)
                if res < cfg.residual_tol:
                    found.append(ell)
            if len(found) >= EXPECTED:
                break
        if len(found) >= EXPECTED:
            break
    lines = sorted((Line(tuple(complex(c) for c in f)).normalized() for f in found), key=_sorted_key)
    reports = []
    max_res = 0.0
    for t in lines:
        g = restrict_to_line(Fs, t)
        res, p, q = perfect_square_residual(g.complex_coeffs())
        max_res = max(max_res, res)
        disc = abs(p * p - 4 * q) / max(1.0, abs(p) ** 2, abs(q))
        if disc < cfg.hyperflex_tol:
            cls = "hyperflex"
            clusters = [(_mean_root(binary_roots(g)), 4)]
        else:
            cls = "bitangent"
            clusters = _two_double_roots(g)
        reports.append(TangencyReport(t, cls, _points_on_line(t, clusters), res))
    sep = min(
        (lines[i].distance(lines[j]) for i in range(len(lines)) for j in range(i + 1, len(lines))),
        default=float("inf"),
    )
    if len(lines) == EXPECTED and sep > cfg.separation_tol:
        status = "hyperflex" if any(r.classification == "hyperflex" for r in reports) else "complete"
    else:
        status = "incomplete"
        notes.append(f"found {len(lines)} certified lines, expected {EXPECTED}")
        if sep <= cfg.separation_tol:
            notes.append(f"separation {sep:.2e} below {cfg.separation_tol:.0e}")
    return BitangentResult(reports, status, max_res, sep, starts_used, charts_used, seed, notes)


def _mean_root(roots):
    ref = roots[0]
    acc = np.zeros(2, dtype=complex)
    for r in roots:
        ph = np.vdot(r, ref)
        acc += r * (ph / abs(ph) if abs(ph) > 0 else 1)
    return acc / np.linalg.norm(acc)


def _two_double_roots(g):
    roots = binary_roots(g)
    # pair the 4 roots into the two closest pairs
    best = None
    for i, j, k, l in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
        d = abs(roots[i][0] * roots[j][1] - roots[i][1] * roots[j][0]) + abs(
            roots[k][0] * roots[l][1] - roots[k][1] * roots[l][0]
        )
        if best is None or d < best[0]:
            best = (d, ((i, j), (k, l)))
    out = [(_mean_root([roots[i], roots[j]]), 2) for i, j in best[1]]
    return sorted(out, key=lambda t: tuple(np.round(np.concatenate([t[0].real, t[0].imag]), 7)))


def match_lines(A: list[Line], B: list[Line], tol: float = 1e-6) -> list[tuple[int, int, float]]:
    """Pairs ``(i, j, distance)`` of lines in ``A`` and ``B`` closer than ``tol``."""
    out = []
    for i, s in enumerate(A):
        for j, t in enumerate(B):
            d = s.distance(t)
            if d < tol:
                out.append((i, j, d))
    return out
