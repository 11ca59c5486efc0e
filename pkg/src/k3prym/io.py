"""Text formats for matrices, lattice fixtures and plane-curve coefficients.

Matrix files
    Lines starting with ``#`` are comments.  A file is a sequence of
    sections; each starts with a header ``<name> <rows> <cols>`` followed by
    ``rows`` lines of ``cols`` whitespace-separated integers (row-major).
    A lattice file has one ``gram`` section; an embedding file has a
    ``gram`` section for the ambient lattice and a ``basis`` section whose
    rows are sublattice basis vectors in ambient coordinates.

Curve files
    ``#`` comments, then 15 (quartic) or 6 (conic) exact rationals such as
    ``3``, ``-1/2``, separated by whitespace or commas, in graded-lex order
    of the monomials ``x^i y^j z^k`` (x > y > z).
"""

from __future__ import annotations

import re
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Union

from .lattice import Embedding, Lattice

PathLike = Union[str, Path]


class FormatError(ValueError):
    """Malformed input file; message carries the line number."""


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_matrix_sections(text: str) -> dict[str, list[list[int]]]:
    sections: dict[str, list[list[int]]] = {}
    lines = list(_content_lines(text))
    i = 0
    while i < len(lines):
        lineno, header = lines[i]
        parts = header.split()
        if len(parts) != 3 or not parts[1].isdigit() or not parts[2].isdigit():
            raise FormatError(f"line {lineno}: expected '<name> <rows> <cols>', got {header!r}")
        name, r, c = parts[0], int(parts[1]), int(parts[2])
        if name in sections:
            raise FormatError(f"line {lineno}: duplicate section {name!r}")
        rows = []
        for k in range(r):
            if i + 1 + k >= len(lines):
                raise FormatError(f"section {name!r}: expected {r} rows, file ended")
            ln, body = lines[i + 1 + k]
            try:
                row = [int(tok) for tok in body.split()]
            except ValueError:
                raise FormatError(f"line {ln}: non-integer entry in {body!r}") from None
            if len(row) != c:
                raise FormatError(f"line {ln}: expected {c} entries, got {len(row)}")
            rows.append(row)
        sections[name] = rows
        i += 1 + r
    return sections


def format_matrix_section(name: str, M) -> str:
    rows = [list(r) for r in M]
    c = len(rows[0]) if rows else 0
    width = max((len(str(a)) for r in rows for a in r), default=1)
    body = "\n".join(" ".join(str(a).rjust(width) for a in r) for r in rows)
    return f"{name} {len(rows)} {c}\n{body}\n"


def read_lattice(path: PathLike) -> Lattice:
    text = Path(path).read_text()
    secs = parse_matrix_sections(text)
    if "gram" not in secs:
        raise FormatError(f"{path}: missing 'gram' section")
    return Lattice.from_gram(secs["gram"], Path(path).stem)


def read_embedding(path: PathLike) -> Embedding:
    secs = parse_matrix_sections(Path(path).read_text())
    for key in ("gram", "basis"):
        if key not in secs:
            raise FormatError(f"{path}: missing {key!r} section")
    return Embedding.of(Lattice.from_gram(secs["gram"], "ambient"), secs["basis"])


def write_lattice(path: PathLike, L: Lattice, comment: str = "") -> None:
    head = "".join(f"# {c}\n" for c in comment.splitlines())
    Path(path).write_text(head + format_matrix_section("gram", L.gram))


def write_embedding(path: PathLike, E: Embedding, comment: str = "") -> None:
    head = "".join(f"# {c}\n" for c in comment.splitlines())
    Path(path).write_text(
        head + format_matrix_section("gram", E.ambient.gram) + format_matrix_section("basis", E.basis)
    )


# ------------------------------------------------------------- fixtures

FIXTURES = {
    "K3": "K3.lat",
    "I17_2": "I17_2.lat",
    "I17_2-in-K3": "I17_2-in-K3.emb",
    "I17_2-in-K3-alt": "I17_2-in-K3-alt.emb",
}


def fixture_path(name: str) -> Path:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return Path(str(resources.files("k3prym") / "data" / FIXTURES[name]))


def load_fixture(name: str) -> Union[Lattice, Embedding]:
    path = fixture_path(name)
    if path.suffix == ".emb":
        return read_embedding(path)
    L = read_lattice(path)
    return Lattice(L.gram, name)


# ---------------------------------------------------------- rationals

_RAT = re.compile(r"^[+-]?\d+(/\d+)?$|^[+-]?\d*\.\d+([eE][+-]?\d+)?$|^[+-]?\d+[eE][+-]?\d+$")


def parse_rational(tok: str) -> Fraction:
    tok = tok.strip()
    if not _RAT.match(tok):
        raise FormatError(f"not an exact rational: {tok!r}")
    return Fraction(tok)


def parse_coefficients(text: str, expected: int) -> list[Fraction]:
    toks = []
    for lineno, line in _content_lines(text):
        for tok in re.split(r"[,\s]+", line):
            if tok:
                try:
                    toks.append(parse_rational(tok))
                except FormatError as exc:
                    raise FormatError(f"line {lineno}: {exc}") from None
    if len(toks) != expected:
        raise FormatError(f"expected {expected} coefficients, found {len(toks)}")
    return toks
