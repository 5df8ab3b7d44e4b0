"""File formats: bracket descriptions and point sets, both JSON.

Bracket files (1-based indices, a-block first, [x_i, x_j] = sum_k c e_k):

    {"dim_a": 1, "dim_n": 3,
     "brackets": [{"i": 2, "j": 3, "k": 4, "c": 1},
                  {"i": 1, "j": 2, "k": 2, "c": "1/2"}],
     "gram": [[...], ...]}          # optional inner product matrix

Scalars are ints, floats, or "p/q" strings; ints and strings stay exact.
Point set files:

    {"dim": 3, "points": [["-1", "-1", "1"], ["-1", "0", "0"]]}

Serialization is deterministic: sorted keys, two-space indent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .bracket import BracketTensor
from .linalg import format_scalar, parse_scalar
from .minnorm import MinNormResult, PointSet


class FormatError(ValueError):
    """Malformed input file; the message names the offending field."""


@dataclass(frozen=True)
class BracketFile:
    """Raw parsed content; structural checks only, no algebra validation."""

    dim_a: int
    dim_n: int
    bracket: BracketTensor
    gram: list | None


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise FormatError(f"{where}: missing required key {key!r}")
    return obj[key]


def _as_dim(v, where: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise FormatError(f"{where}: expected a nonnegative integer, got {v!r}")
    return v


def parse_bracket_dict(obj, where: str = "input") -> BracketFile:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected a JSON object")
    dim_a = _as_dim(_need(obj, "dim_a", where), f"{where}.dim_a")
    dim_n = _as_dim(_need(obj, "dim_n", where), f"{where}.dim_n")
    d = dim_a + dim_n
    if d == 0:
        raise FormatError(f"{where}: dim_a + dim_n must be positive")
    entries = _need(obj, "brackets", where)
    if not isinstance(entries, list):
        raise FormatError(f"{where}.brackets: expected a list")
    coeffs: dict[tuple[int, int, int], object] = {}
    for pos, entry in enumerate(entries):
        tag = f"{where}.brackets[{pos}]"
        if not isinstance(entry, dict):
            raise FormatError(f"{tag}: expected an object")
        idx = {}
        for key in ("i", "j", "k"):
            v = _need(entry, key, tag)
            if not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= d:
                raise FormatError(f"{tag}.{key}: index {v!r} outside 1..{d}")
            idx[key] = v
        if idx["i"] == idx["j"]:
            raise FormatError(f"{tag}: i == j is forced to zero by antisymmetry")
        try:
            c = parse_scalar(_need(entry, "c", tag))
        except ValueError as exc:
            raise FormatError(f"{tag}.c: {exc}") from exc
        i, j, k = idx["i"], idx["j"], idx["k"]
        if i > j:
            i, j, c = j, i, -c
        if (i, j, k) in coeffs:
            raise FormatError(f"{tag}: duplicate coefficient for ({i},{j},{k})")
        coeffs[(i, j, k)] = c
    gram = obj.get("gram")
    if gram is not None:
        if (not isinstance(gram, list) or len(gram) != d
                or any(not isinstance(r, list) or len(r) != d for r in gram)):
            raise FormatError(f"{where}.gram: expected a {d} x {d} matrix")
        gram = [[parse_scalar(x) for x in row] for row in gram]
    try:
        bracket = BracketTensor.make(d, coeffs)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    return BracketFile(dim_a, dim_n, bracket, gram)


def read_bracket_file(path) -> BracketFile:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return parse_bracket_dict(obj, where=str(path))


def bracket_to_dict(dim_a: int, dim_n: int, bracket: BracketTensor) -> dict:
    return {
        "dim_a": dim_a,
        "dim_n": dim_n,
        "brackets": [{"i": i, "j": j, "k": k, "c": format_scalar(c)}
                     for (i, j, k), c in sorted(bracket.coeffs.items())],
    }


def read_point_set(path) -> PointSet:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    where = str(path)
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected a JSON object")
    dim = _as_dim(_need(obj, "dim", where), f"{where}.dim")
    raw = _need(obj, "points", where)
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"{where}.points: expected a nonempty list")
    pts = []
    for pos, p in enumerate(raw):
        if not isinstance(p, list) or len(p) != dim:
            raise FormatError(f"{where}.points[{pos}]: expected a list of length {dim}")
        try:
            pts.append([parse_scalar(x) for x in p])
        except ValueError as exc:
            raise FormatError(f"{where}.points[{pos}]: {exc}") from exc
    labels = obj.get("labels")
    try:
        return PointSet.make(pts, labels)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def min_norm_to_dict(res: MinNormResult) -> dict:
    return {
        "point": [format_scalar(x) for x in res.point],
        "weights": [format_scalar(w) for w in res.weights],
        "support": list(res.support),
        "norm_sq": format_scalar(res.norm_sq()),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)
