"""Text input formats and JSON/CSV output.

Dataset:    "n m" then n lines of m characters from {0,1}.
Matrix:     "rows cols" then the rows, same character rules; the columns
            are the points being clustered.
Relations:  "SHARED k t" then t k-character tuples, or
            "PERCOORD m k" then, per coordinate, a count t_i and t_i tuples.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from .bitcore import Dataset
from .reductions import BinaryMatrix
from .relations import MAX_ARITY, Relation, RelationFamily, tuple_to_mask
from .solver import Solution

# reject headers that would not fit comfortably in memory
MAX_ROWS = 10**8
MAX_DIM = 10**6


class InputError(ValueError):
    def __init__(self, message: str, source: str = "<input>", line: int | None = None, col: int | None = None):
        where = source + (f":{line}" if line is not None else "") + (f":{col}" if col is not None else "")
        super().__init__(f"{where}: {message}")
        self.line = line
        self.col = col


class _Lines:
    """Line cursor that skips blank lines and reports 1-based positions."""

    def __init__(self, text: str, source: str):
        self.source = source
        self.items = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines()) if ln.strip()]
        self.pos = 0

    def next(self, what: str) -> tuple[int, str]:
        if self.pos >= len(self.items):
            last = self.items[-1][0] if self.items else 1
            raise InputError(f"unexpected end of input, expected {what}", self.source, last + 1)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def finish(self) -> None:
        if self.pos < len(self.items):
            lineno, _ = self.items[self.pos]
            raise InputError("unexpected trailing content", self.source, lineno)

    def error(self, message: str, line: int, col: int | None = None) -> InputError:
        return InputError(message, self.source, line, col)


def _ints(cur: _Lines, lineno: int, fields: list[str], names: Iterable[str], limits: Iterable[int]) -> list[int]:
    out = []
    for col, (tok, name, limit) in enumerate(zip(fields, names, limits), start=1):
        if not tok.isdigit():
            raise cur.error(f"{name} must be a nonnegative integer, got {tok!r}", lineno, col)
        val = int(tok)
        if val > limit:
            raise cur.error(f"{name}={val} exceeds the limit {limit}", lineno, col)
        out.append(val)
    return out


def _bitrow(cur: _Lines, lineno: int, text: str, width: int) -> np.ndarray:
    for col, ch in enumerate(text, start=1):
        if ch not in "01":
            raise cur.error(f"illegal character {ch!r}", lineno, col)
    if len(text) != width:
        raise cur.error(f"wrong line length: expected {width} characters, got {len(text)}", lineno)
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def _bit_block(text: str, source: str) -> np.ndarray:
    cur = _Lines(text, source)
    lineno, header = cur.next("header 'n m'")
    fields = header.split()
    if len(fields) != 2:
        raise cur.error("malformed header: expected two integers", lineno)
    n, m = _ints(cur, lineno, fields, ("row count", "width"), (MAX_ROWS, MAX_DIM))
    rows = np.zeros((n, m), dtype=np.uint8)
    for i in range(n):
        ln, row = cur.next(f"row {i + 1} of {n}")
        rows[i] = _bitrow(cur, ln, row, m)
    cur.finish()
    return rows


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read file: {exc.strerror}", str(path)) from exc


def load_dataset(text: str, source: str = "<dataset>") -> Dataset:
    rows = _bit_block(text, source)
    return Dataset(rows, rows.shape[1])


def parse_dataset(path: str | Path) -> Dataset:
    return load_dataset(read_text(path), str(path))


def load_matrix(text: str, source: str = "<matrix>") -> BinaryMatrix:
    rows = _bit_block(text, source)
    if 0 in rows.shape:
        raise InputError("matrix dimensions must be positive", source, 1)
    return BinaryMatrix(rows)


def parse_matrix(path: str | Path) -> BinaryMatrix:
    return load_matrix(read_text(path), str(path))


def _relation(cur: _Lines, k: int, t: int, header_line: int) -> Relation:
    if t == 0:
        raise cur.error("empty relation", header_line)
    masks = []
    seen: dict[int, int] = {}
    for _ in range(t):
        ln, row = cur.next("relation tuple")
        mask = tuple_to_mask(_bitrow(cur, ln, row, k).tolist())
        if mask in seen:
            raise cur.error(f"duplicate tuple {row} (first seen at line {seen[mask]})", ln)
        seen[mask] = ln
        masks.append(mask)
    return Relation(k, masks)


def load_relations(text: str, source: str = "<relations>", m: int | None = None) -> RelationFamily:
    """Parse a relation file. A shared relation needs the data dimension ``m``."""
    cur = _Lines(text, source)
    lineno, header = cur.next("header 'SHARED k t' or 'PERCOORD m k'")
    fields = header.split()
    if len(fields) != 3 or fields[0] not in ("SHARED", "PERCOORD"):
        raise cur.error("malformed header: expected 'SHARED k t' or 'PERCOORD m k'", lineno)
    if fields[0] == "SHARED":
        k, t = _ints(cur, lineno, fields[1:], ("k", "t"), (MAX_ARITY, 2**MAX_ARITY))
        if k < 1:
            raise cur.error("arity must be positive", lineno, 2)
        rel = _relation(cur, k, t, lineno)
        cur.finish()
        return RelationFamily.shared(0 if m is None else m, rel)
    mm, k = _ints(cur, lineno, fields[1:], ("m", "k"), (MAX_DIM, MAX_ARITY))
    if k < 1:
        raise cur.error("arity must be positive", lineno, 3)
    if m is not None and mm != m:
        raise cur.error(f"family covers {mm} coordinates but the data has dimension {m}", lineno, 2)
    rels = []
    for _ in range(mm):
        ln, count = cur.next("tuple count")
        (t,) = _ints(cur, ln, [count], ("tuple count",), (2**k,))
        rels.append(_relation(cur, k, t, ln))
    cur.finish()
    return RelationFamily.per_coordinate(rels) if rels else RelationFamily(0, [Relation.full(k)])


def parse_relations(path: str | Path, m: int | None = None) -> RelationFamily:
    return load_relations(read_text(path), str(path), m)


def solution_dict(sol: Solution) -> dict:
    return {
        "cost": int(sol.cost),
        "centers": sol.centers.to_strings(),
        "index_set": [int(i) for i in sol.index_set],
        "assignment": [int(a) for a in sol.assignment],
        "seed": None if sol.seed is None else int(sol.seed),
        "trials_used": int(sol.trials_used),
        "mode": sol.mode,
        "truncated": bool(sol.truncated),
    }


def emit_solution(sol: Solution, **extra) -> str:
    """JSON with a fixed key order; ``extra`` keys are appended after the core ones."""
    payload = solution_dict(sol)
    payload.update(extra)
    return json.dumps(payload, separators=(", ", ": "))


def emit_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
