"""On-disk formats: the functional JSON schema and the matrix text dumps.

Functional files are JSON objects with exactly the keys d, mA, mB, p, terms;
p is an mA x mB row-major array and each term an object with integer x, y,
i, k, F and real c.  Unknown keys are rejected so typos surface as errors
instead of silently ignored data.

Matrix dumps are line-oriented text with complex entries written row-major
as "re im" pairs at 17 significant digits, enough to round-trip doubles.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .functional import BellFunctional, Scenario, Term
from .ptm import PreparationSet
from .quantum import DensityMatrix, MeasurementSet, Povm

_FUNCTIONAL_KEYS = {"d", "mA", "mB", "p", "terms"}
_TERM_KEYS = {"x", "y", "i", "k", "F", "c"}
_MAGIC = "bellccp-matrices 1"


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where} must be an integer, got {value!r}")
    return value


def _as_real(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where} must be a number, got {value!r}")
    return float(value)


def functional_from_dict(obj) -> BellFunctional:
    if not isinstance(obj, dict):
        raise SchemaError("functional file must contain a JSON object")
    unknown = set(obj) - _FUNCTIONAL_KEYS
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)}")
    missing = _FUNCTIONAL_KEYS - set(obj)
    if missing:
        raise SchemaError(f"missing fields {sorted(missing)}")
    d = _as_int(obj["d"], "d")
    mA = _as_int(obj["mA"], "mA")
    mB = _as_int(obj["mB"], "mB")
    if d < 1 or mA < 1 or mB < 1:
        raise SchemaError("d, mA, mB must be positive")
    p = obj["p"]
    if not isinstance(p, list) or len(p) != mA:
        raise SchemaError(f"p must be an array of {mA} rows")
    rows = []
    for x, row in enumerate(p):
        if not isinstance(row, list) or len(row) != mB:
            raise SchemaError(f"p row {x} must have {mB} entries")
        rows.append([_as_real(v, f"p[{x}][{y}]") for y, v in enumerate(row)])
    if not isinstance(obj["terms"], list):
        raise SchemaError("terms must be an array")
    terms = []
    for n, t in enumerate(obj["terms"]):
        if not isinstance(t, dict):
            raise SchemaError(f"terms[{n}] must be an object")
        unknown = set(t) - _TERM_KEYS
        if unknown:
            raise SchemaError(f"terms[{n}] has unknown fields {sorted(unknown)}")
        missing = _TERM_KEYS - set(t)
        if missing:
            raise SchemaError(f"terms[{n}] is missing fields {sorted(missing)}")
        terms.append(
            Term(
                _as_int(t["x"], f"terms[{n}].x"),
                _as_int(t["y"], f"terms[{n}].y"),
                _as_int(t["i"], f"terms[{n}].i"),
                _as_int(t["k"], f"terms[{n}].k"),
                _as_int(t["F"], f"terms[{n}].F"),
                _as_real(t["c"], f"terms[{n}].c"),
            )
        )
    return BellFunctional(Scenario(d, mA, mB, np.array(rows)), tuple(terms))


def functional_to_dict(f: BellFunctional) -> dict:
    s = f.scenario
    return {
        "d": s.d,
        "mA": s.mA,
        "mB": s.mB,
        "p": [[float(v) for v in row] for row in s.p],
        "terms": [
            {"x": t.x, "y": t.y, "i": t.i, "k": t.k, "F": t.F, "c": float(t.c)}
            for t in f.terms
        ],
    }


def load_functional(path) -> BellFunctional:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    return functional_from_dict(obj)


def save_functional(f: BellFunctional, path) -> None:
    Path(path).write_text(json.dumps(functional_to_dict(f), indent=2) + "\n", encoding="utf-8")


# -- matrix text dumps -------------------------------------------------------


def _write_matrix(lines: list[str], mat: np.ndarray) -> None:
    for row in np.asarray(mat, dtype=complex):
        parts = []
        for v in row:
            parts.append(f"{v.real:.17g} {v.imag:.17g}")
        lines.append("  ".join(parts))


def _read_matrix(rows: list[str], dim: int, where: str) -> np.ndarray:
    mat = np.empty((dim, dim), dtype=complex)
    for r, line in enumerate(rows):
        parts = line.split()
        if len(parts) != 2 * dim:
            raise SchemaError(f"{where}: row {r} has {len(parts)} numbers, expected {2 * dim}")
        vals = [float(p) for p in parts]
        mat[r] = [complex(vals[2 * c], vals[2 * c + 1]) for c in range(dim)]
    return mat


def _dump_blocks(kind: str, meta: dict[str, int], blocks: list[tuple[str, np.ndarray]]) -> str:
    lines = [_MAGIC, f"kind {kind}", " ".join(f"{k}={v}" for k, v in meta.items())]
    for label, mat in blocks:
        lines.append(f"matrix {label}")
        _write_matrix(lines, mat)
    return "\n".join(lines) + "\n"


def _parse_blocks(text: str, expected_kind: str) -> tuple[dict[str, int], list[tuple[str, list[str]]]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != _MAGIC:
        raise SchemaError(f"not a matrix dump (missing '{_MAGIC}' header)")
    if len(lines) < 3 or not lines[1].startswith("kind "):
        raise SchemaError("missing kind line")
    kind = lines[1].split(None, 1)[1].strip()
    if kind != expected_kind:
        raise SchemaError(f"dump holds {kind!r}, expected {expected_kind!r}")
    meta = {}
    for item in lines[2].split():
        key, _, val = item.partition("=")
        try:
            meta[key] = int(val)
        except ValueError as exc:
            raise SchemaError(f"bad metadata entry {item!r}") from exc
    blocks: list[tuple[str, list[str]]] = []
    for line in lines[3:]:
        if line.startswith("matrix "):
            blocks.append((line.split(None, 1)[1].strip(), []))
        else:
            if not blocks:
                raise SchemaError("matrix rows before any 'matrix' header")
            blocks[-1][1].append(line)
    return meta, blocks


def dump_state(rho: DensityMatrix) -> str:
    return _dump_blocks("state", {"dim": rho.dim}, [("rho", rho.mat)])


def load_state(text: str) -> DensityMatrix:
    meta, blocks = _parse_blocks(text, "state")
    if len(blocks) != 1:
        raise SchemaError("state dump must hold exactly one matrix")
    return DensityMatrix(_read_matrix(blocks[0][1], meta["dim"], "state"))


def dump_measurements(ms: MeasurementSet) -> str:
    meta = {"settings": ms.settings, "outcomes": ms.outcomes, "dim": ms.dim}
    blocks = []
    for x in range(ms.settings):
        for b in range(ms.outcomes):
            blocks.append((f"setting={x} outcome={b}", ms[x][b]))
    return _dump_blocks("measurements", meta, blocks)


def load_measurements(text: str) -> MeasurementSet:
    meta, blocks = _parse_blocks(text, "measurements")
    settings, outcomes, dim = meta["settings"], meta["outcomes"], meta["dim"]
    if len(blocks) != settings * outcomes:
        raise SchemaError(f"expected {settings * outcomes} matrices, found {len(blocks)}")
    povms = []
    it = iter(blocks)
    for x in range(settings):
        elements = [_read_matrix(next(it)[1], dim, f"setting {x}") for _ in range(outcomes)]
        povms.append(Povm(elements))
    return MeasurementSet(povms)


def dump_preparations(prep: PreparationSet) -> str:
    meta = {"d": prep.d, "mA": prep.mA}
    blocks = []
    for x0 in range(prep.d):
        for x in range(prep.mA):
            blocks.append((f"x0={x0} x={x}", prep.state(x0, x)))
    return _dump_blocks("preparations", meta, blocks)


def load_preparations(text: str, trace_tol: float = 1e-8) -> PreparationSet:
    meta, blocks = _parse_blocks(text, "preparations")
    d, mA = meta["d"], meta["mA"]
    if len(blocks) != d * mA:
        raise SchemaError(f"expected {d * mA} matrices, found {len(blocks)}")
    states = np.empty((d, mA, d, d), dtype=complex)
    it = iter(blocks)
    for x0 in range(d):
        for x in range(mA):
            states[x0, x] = _read_matrix(next(it)[1], d, f"preparation ({x0}, {x})")
    return PreparationSet(states, trace_tol=trace_tol)
