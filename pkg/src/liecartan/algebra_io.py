"""Algebra definition files (JSON) with exact rational round-trips.

Schema: {name, dim, basis: [labels], constants: [[i, j, k, "p/q"], ...]
with c^k_ij entries stored for i < j, split?: {s, l, flags},
metric?: {b: [...], k: [...]}}.  Values are rational strings; floats are
rejected so the round-trip stays exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional, Union

from .algebra import LieAlgebra, SplitAlgebra


class AlgebraFileError(ValueError):
    def __init__(self, path_in_doc: str, message: str):
        super().__init__(f"{path_in_doc}: {message}")
        self.path_in_doc = path_in_doc


def _parse_rational(s, where: str) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise AlgebraFileError(where, "rational values must be strings")
    try:
        value = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise AlgebraFileError(where, f"not a rational: {s!r}") from exc
    return value


def _fmt_rational(v: Fraction) -> str:
    v = Fraction(v)
    return str(v)


def load_algebra(path: str) -> Union[LieAlgebra, SplitAlgebra]:
    with open(path) as fh:
        doc = json.load(fh)
    return algebra_from_dict(doc)


def algebra_from_dict(doc: dict) -> Union[LieAlgebra, SplitAlgebra]:
    for key in ("name", "dim", "basis", "constants"):
        if key not in doc:
            raise AlgebraFileError(key, "missing required field")
    dim = doc["dim"]
    basis = doc["basis"]
    if not isinstance(basis, list) or len(basis) != dim:
        raise AlgebraFileError("basis", "label count must equal dim")
    table = {}
    for t, row in enumerate(doc["constants"]):
        where = f"constants[{t}]"
        if not (isinstance(row, list) and len(row) == 4):
            raise AlgebraFileError(where, "expected [i, j, k, value]")
        i, j, k, raw = row
        for nm, idx in (("i", i), ("j", j), ("k", k)):
            if not isinstance(idx, int) or not 0 <= idx < dim:
                raise AlgebraFileError(f"{where}.{nm}", "index out of range")
        if i >= j:
            raise AlgebraFileError(where, "entries must be stored with i < j")
        v = _parse_rational(raw, f"{where}.value")
        row_kv = table.setdefault((i, j), {})
        row_kv[k] = row_kv.get(k, Fraction(0)) + v
    alg = LieAlgebra(doc["name"], basis, table)
    if "split" not in doc:
        return alg
    sp = doc["split"]
    s_idx = tuple(sp.get("s", ()))
    l_idx = tuple(sp.get("l", ()))
    if sorted(s_idx + l_idx) != list(range(dim)):
        raise AlgebraFileError("split", "s and l must partition the basis")
    metric = doc.get("metric", {})
    b = [_parse_rational(x, "metric.b") for x in metric.get("b", [])] or None
    k = [_parse_rational(x, "metric.k") for x in metric.get("k", [])] or None
    split = SplitAlgebra(alg, s_idx, l_idx, b, k,
                         flags=dict(sp.get("flags", {})))
    from .algebra import _verified_flags

    split.flags = _verified_flags(alg, split)
    return split


def algebra_to_dict(alg: Union[LieAlgebra, SplitAlgebra]) -> dict:
    split: Optional[SplitAlgebra] = None
    if isinstance(alg, SplitAlgebra):
        split = alg
        alg = alg.ambient
    doc = {
        "name": alg.name,
        "dim": alg.dim,
        "basis": list(alg.labels),
        "constants": [[i, j, k, _fmt_rational(v)] for k, i, j, v in alg.entries()],
    }
    if split is not None:
        doc["split"] = {"s": list(split.s_indices), "l": list(split.l_indices),
                        "flags": dict(split.flags)}
        metric = {}
        if split.b_diag is not None:
            metric["b"] = [_fmt_rational(x) for x in split.b_diag]
        if split.k_diag is not None:
            metric["k"] = [_fmt_rational(x) for x in split.k_diag]
        if metric:
            doc["metric"] = metric
    return doc


def save_algebra(alg: Union[LieAlgebra, SplitAlgebra], path: str):
    with open(path, "w") as fh:
        json.dump(algebra_to_dict(alg), fh, indent=1, sort_keys=True)
        fh.write("\n")
