"""Monodromy of the 4-sheeted cover ``C -> P^1`` by certified path tracking.

Sheets over the basepoint ``u0`` are labelled by the signs of ``(y, z)``
relative to principal square roots: ``0 = (+,+), 1 = (+,-), 2 = (-,+),
3 = (-,-)``.  The deck involution ``z -> -z`` is then ``(0 1)(2 3)``.
Each loop runs straight from ``u0`` to a small circle around one branch
point, once counterclockwise around it, and straight back.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .towers import CurveModel, p_eval

Perm = tuple  # images of 0..n-1

TAU = (1, 0, 3, 2)


class TrackingError(RuntimeError):
    """Path tracking could not keep the sheets certifiably separated."""


def compose(*perms: Perm) -> Perm:
    """Apply the permutations left to right: ``compose(a, b)(s) = b(a(s))``."""
    n = len(perms[0])
    out = list(range(n))
    for p in perms:
        out = [p[s] for s in out]
    return tuple(out)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def cycle_type(p: Perm) -> tuple:
    seen, lengths = set(), []
    for s in range(len(p)):
        if s in seen:
            continue
        n, t = 0, s
        while t not in seen:
            seen.add(t)
            t = p[t]
            n += 1
        lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def cycles(p: Perm) -> list[tuple]:
    seen, out = set(), []
    for s in range(len(p)):
        if s in seen:
            continue
        cyc, t = [], s
        while t not in seen:
            seen.add(t)
            cyc.append(t)
            t = p[t]
        out.append(tuple(cyc))
    return out


def cycle_notation(p: Perm) -> str:
    parts = ["(" + " ".join(str(s) for s in c) + ")" for c in cycles(p) if len(c) > 1]
    return "".join(parts) or "()"


def parse_cycle_notation(text: str, n: int) -> Perm:
    out = list(range(n))
    text = text.strip()
    if text in ("", "()"):
        return tuple(out)
    for chunk in text.replace(")", ")|").split("|"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("(") and chunk.endswith(")")):
            raise ValueError(f"bad cycle {chunk!r}")
        items = [int(t) for t in chunk[1:-1].replace(",", " ").split()]
        if any(not 0 <= s < n for s in items) or len(set(items)) != len(items):
            raise ValueError(f"bad cycle {chunk!r} on {n} points")
        for i, s in enumerate(items):
            out[s] = items[(i + 1) % len(items)]
    if sorted(out) != list(range(n)):
        raise ValueError(f"{text!r} is not a permutation of {n} points")
    return tuple(out)


def is_transitive(perms: Sequence[Perm]) -> bool:
    n = len(perms[0])
    seen, stack = {0}, [0]
    while stack:
        s = stack.pop()
        for p in perms:
            t = p[s]
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return len(seen) == n


# ----------------------------------------------------------------- tracking

class _Tracker:
    def __init__(self, model: CurveModel, min_step: float = 1e-9):
        self.D, self.alpha, self.beta = model.numeric()
        self.min_step = min_step
        self.steps = 0

    def values(self, u):
        D = p_eval(self.D, u)
        return D, p_eval(self.beta, u)

    def start(self, u0, sheet: int):
        D, b = self.values(u0)
        y = np.sqrt(D) * (1 if sheet < 2 else -1)
        z = np.sqrt(self.alpha * y - b) * (1 if sheet % 2 == 0 else -1)
        return complex(y), complex(z)

    def label(self, u0, y, z) -> int:
        D, b = self.values(u0)
        y0 = np.sqrt(D)
        sy = 0 if abs(y - y0) < abs(y + y0) else 2
        z0 = np.sqrt(self.alpha * (y0 if sy == 0 else -y0) - b)
        sz = 0 if abs(z - z0) < abs(z + z0) else 1
        return sy + sz

    def _step(self, u, y, z):
        D, b = self.values(u)
        ry = np.sqrt(D)
        y1 = ry if abs(ry - y) <= abs(ry + y) else -ry
        # certified if the nearest root is much closer than the other one
        if not abs(y1 - y) < 0.25 * abs(2 * y1):
            return None
        rz = np.sqrt(self.alpha * y1 - b)
        z1 = rz if abs(rz - z) <= abs(rz + z) else -rz
        if not abs(z1 - z) < 0.25 * abs(2 * z1):
            return None
        return y1, z1

    def follow(self, path, y, z, t0=0.0, t1=1.0, h=0.02):
        """Continue ``(y, z)`` along ``path(t)`` with adaptive steps."""
        t = t0
        while t < t1:
            h = min(h, t1 - t)
            nxt = self._step(path(t + h), y, z)
            if nxt is None:
                h /= 2
                if h < self.min_step:
                    raise TrackingError(f"step size underflow at u = {path(t)}")
                continue
            y, z = nxt
            t += h
            self.steps += 1
            h = min(h * 1.5, 0.05)
        return y, z


@dataclass
class Monodromy:
    basepoint: complex
    branch_points: list[complex]  # in loop order
    kinds: list[str]  # "lower" (root of D) or "upper"
    perms: list[Perm]
    radii: list[float]
    steps: int

    @property
    def product(self) -> Perm:
        return compose(*self.perms)

    @property
    def transitive(self) -> bool:
        return is_transitive(self.perms)

    def cycle_types(self) -> list[tuple]:
        return [cycle_type(p) for p in self.perms]

    def to_json(self) -> dict:
        from .forms import fmt_number
        from .quartics import round_c

        return {
            "basepoint": fmt_number(round_c(self.basepoint, 12)),
            "loops": [
                {
                    "branch_point": fmt_number(round_c(c, 12)),
                    "kind": k,
                    "permutation": cycle_notation(p),
                    "cycle_type": "+".join(str(x) for x in cycle_type(p)),
                }
                for c, k, p in zip(self.branch_points, self.kinds, self.perms)
            ],
            "product": cycle_notation(self.product),
            "product_is_identity": self.product == tuple(range(4)),
            "transitive": self.transitive,
        }


def _segment_distance(c, a, b) -> float:
    d = b - a
    t = max(0.0, min(1.0, ((c - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(c - (a + t * d))


def angular_order(u0: complex, pts: Sequence[complex]) -> list[int]:
    """Indices of ``pts`` sorted by decreasing argument of ``pt - u0``.

    With loops composed left to right (:func:`compose`) this order makes
    the product of all loops the loop around every branch point, which is
    trivial for these covers.
    """
    return sorted(range(len(pts)), key=lambda i: -np.angle(pts[i] - u0))


def choose_basepoint(pts: Sequence[complex], seed: int = 0, candidates: int = 200) -> complex:
    """Seeded basepoint maximizing clearance of the straight loop paths."""
    pts = list(pts)
    rng = np.random.default_rng(seed)
    center = np.mean(pts)
    spread = max(abs(p - center) for p in pts) + 1.0
    radii = _radii(pts)
    best, best_score = None, -1.0
    for _ in range(candidates):
        u0 = complex(center + spread * (rng.normal() + 1j * rng.normal()))
        score = min(abs(u0 - p) / r for p, r in zip(pts, radii))
        for i, c in enumerate(pts):
            for j, other in enumerate(pts):
                if i != j:
                    score = min(score, _segment_distance(other, u0, c) / radii[j])
        angles = sorted(np.angle(np.array(pts) - u0))
        gaps = np.diff(angles + [angles[0] + 2 * np.pi])
        score = min(score, float(np.min(gaps)) * 50)
        if score > best_score:
            best, best_score = u0, score
    return best


def _radii(pts: Sequence[complex]) -> list[float]:
    return [0.3 * min(abs(c - o) for o in pts if o is not c) for c in pts]


def loop_permutation(tr: _Tracker, u0: complex, c: complex, r: float) -> Perm:
    entry = c + r * (u0 - c) / abs(u0 - c)
    theta0 = np.angle(entry - c)
    out = []
    for s in range(4):
        y, z = tr.start(u0, s)
        y, z = tr.follow(lambda t: u0 + t * (entry - u0), y, z)
        y, z = tr.follow(lambda t: c + r * np.exp(1j * (theta0 + 2 * np.pi * t)), y, z, h=0.01)
        y, z = tr.follow(lambda t: entry + t * (u0 - entry), y, z)
        out.append(tr.label(u0, y, z))
    if sorted(out) != [0, 1, 2, 3]:
        raise TrackingError(f"loop around {c} did not return a permutation: {out}")
    return tuple(out)


def fiber_monodromy(
    model: CurveModel,
    basepoint: Optional[complex] = None,
    order: Optional[Sequence[int]] = None,
    seed: int = 0,
) -> Monodromy:
    """Permutations of the 4 sheets along the standard loops.

    ``order`` indexes ``model.branch_points()`` (lower then upper); by
    default loops follow :func:`angular_order` around the basepoint.
    """
    pts = model.branch_points()
    n_lower = len(model.lower_branch_points())
    kinds = ["lower"] * n_lower + ["upper"] * (len(pts) - n_lower)
    radii = _radii(pts)
    u0 = choose_basepoint(pts, seed) if basepoint is None else complex(basepoint)
    if min(abs(u0 - p) for p in pts) < 1e-6:
        raise ValueError("basepoint coincides with a branch point")
    idx = list(order) if order is not None else angular_order(u0, pts)
    tr = _Tracker(model)
    perms = []
    for i in idx:
        for attempt in range(3):
            try:
                perms.append(loop_permutation(tr, u0, pts[i], radii[i] / (2 ** attempt)))
                break
            except TrackingError:
                if attempt == 2:
                    raise
    return Monodromy(u0, [pts[i] for i in idx], [kinds[i] for i in idx], perms, [radii[i] for i in idx], tr.steps)


def simultaneous_conjugator(A: Sequence[Perm], B: Sequence[Perm]) -> Optional[Perm]:
    """A sheet relabelling ``g`` with ``B[i] = g^-1 A[i] g`` for all ``i``
    (brute force over the 24 relabellings), or None."""
    from itertools import permutations

    for g in permutations(range(len(A[0]))):
        gi = inverse(g)
        if all(compose(gi, a, g) == b for a, b in zip(A, B)):
            return tuple(g)
    return None
