"""The three genericity conditions on a totally tangent pair ``(B0, Delta0)``:

1. ``B0`` has no hyperflex line;
2. at each tangency point ``p`` of a bitangent ``m`` of ``B0``, the quartic
   ``Delta0`` is not tangent to ``m`` at ``p``;
3. ``B0`` and ``Delta0`` share no bitangent line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bitangents import BitangentResult, SolverConfig, bitangents, match_lines
from .forms import TernaryForm, fmt_number, restrict_to_line
from .quartics import binary_roots, round_c


@dataclass
class GenericityReport:
    status: str  # pass | fail | inconclusive
    no_hyperflex: Optional[bool]
    no_shared_tangency: Optional[bool]
    no_common_bitangent: Optional[bool]
    witnesses: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    B0_bitangents: Optional[BitangentResult] = None
    Delta0_bitangents: Optional[BitangentResult] = None

    @property
    def conditions(self) -> dict:
        return {
            "no_hyperflex": self.no_hyperflex,
            "no_shared_tangency": self.no_shared_tangency,
            "no_common_bitangent": self.no_common_bitangent,
        }

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "conditions": self.conditions,
            "witnesses": self.witnesses,
            "flags": self.flags,
        }
        for key, res in (("B0", self.B0_bitangents), ("Delta0", self.Delta0_bitangents)):
            if res is not None:
                out[f"{key}_bitangent_status"] = res.status
                out[f"{key}_bitangent_count"] = res.count
        return out


def _on_curve(F: TernaryForm, p: np.ndarray, tol: float) -> bool:
    p = np.asarray(p, dtype=complex)
    p = p / np.linalg.norm(p)
    return abs(F.numeric()(tuple(p))) < tol * F.norm()


def _tangent_at(F: TernaryForm, line, p: np.ndarray, tol: float) -> bool:
    """Whether the restriction of ``F`` to ``line`` has a multiple root at ``p``."""
    g = restrict_to_line(F.numeric(), line)
    P0, P1 = line.parametrization()
    M = np.array([[complex(c) for c in P0], [complex(c) for c in P1]]).T
    st, *_ = np.linalg.lstsq(M, np.asarray(p, dtype=complex), rcond=None)
    st = st / np.linalg.norm(st)
    near = [r for r in binary_roots(g) if abs(r[0] * st[1] - r[1] * st[0]) < tol]
    return len(near) >= 2


def genericity_check(
    B0: TernaryForm,
    Delta0: TernaryForm,
    seed: int = 0,
    config: Optional[SolverConfig] = None,
    match_tol: float = 1e-6,
    point_tol: float = 1e-8,
    root_tol: float = 1e-4,
) -> GenericityReport:
    """Evaluate the three conditions; ``inconclusive`` when a bitangent set
    is not certified complete (hyperflex lines count as certified)."""
    rb = bitangents(B0, seed=seed, config=config)
    rd = bitangents(Delta0, seed=seed + 1, config=config)
    witnesses: dict = {}
    flags: list = []

    c1: Optional[bool] = None
    c2: Optional[bool] = None
    c3: Optional[bool] = None
    if rb.certified:
        c1 = not rb.hyperflexes
        if not c1:
            witnesses["hyperflex_lines"] = [r.line.to_json() for r in rb.hyperflexes]
        shared = []
        for idx, rep in enumerate(rb.lines):
            for p, _ in rep.points:
                if _on_curve(Delta0, p, point_tol):
                    if _tangent_at(Delta0, rep.line, p, root_tol):
                        shared.append({"bitangent": idx, "point": [fmt_number(round_c(c)) for c in p]})
                    else:
                        flags.append(
                            f"tangency point of bitangent {idx} lies on Delta0 (transversal, allowed)"
                        )
        c2 = not shared
        if shared:
            witnesses["shared_tangency"] = shared
    if rb.certified and rd.certified:
        common = match_lines([r.line for r in rb.lines], [r.line for r in rd.lines], match_tol)
        c3 = not common
        if common:
            witnesses["common_bitangents"] = [
                {"B0_index": i, "Delta0_index": j, "line": rb.lines[i].line.to_json(), "distance": float(f"{d:.3e}")}
                for i, j, d in common
            ]
    vals = (c1, c2, c3)
    if any(v is False for v in vals):
        status = "fail"
    elif any(v is None for v in vals):
        status = "inconclusive"
        witnesses["incomplete"] = {"B0": rb.status, "Delta0": rd.status}
    else:
        status = "pass"
    return GenericityReport(status, c1, c2, c3, witnesses, flags, rb, rd)
