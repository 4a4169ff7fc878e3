"""
曲面与 IET 的 JSON 编解码

曲面：{"polygons": [[[x, y], ...], ...], "pairing": [[[p, e], [p', e']], ...]}
IET：字母表 + 两个秩数组 + 长度，或 {"generator": 名称, "params": {...}}，或显式分量列表。
标量一律用 scalar_to_json 的编码；读入时也接受 "1/2"、"1+1r2" 这类字符串。
"""

import logging
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional

from flatland.core.errors import UsageError
from flatland.core.iet import IET, Piece, baker_iet, baker_vertical_iet, golden_rotation, rotation_iet
from flatland.core.keane import keane_counterexample, keane_unperturbed
from flatland.core.scalar import scalar_from_json, scalar_to_json
from flatland.core.surface import EdgeRef, FiniteSurface, Polygon, Surface, as_finite

logger = logging.getLogger(__name__)


# ============================================================
# 曲面
# ============================================================


def surface_to_json(surface: Surface, window: Optional[int] = None, provenance: Optional[dict] = None) -> Dict[str, Any]:
    fs = as_finite(surface, window)
    keys = fs.indices()
    pos = {k: n for n, k in enumerate(keys)}
    out: Dict[str, Any] = {}
    if provenance is not None:
        out["provenance"] = provenance
    out["name"] = fs.name
    out["polygons"] = [
        [[scalar_to_json(x), scalar_to_json(y)] for x, y in fs.polygons[k].vertices] for k in keys
    ]
    out["pairing"] = [[[pos[a.poly], a.edge], [pos[b.poly], b.edge]] for a, b in fs.pairs]
    out["labels"] = [str(k) for k in keys]
    if fs.allow_boundary:
        out["boundary"] = True
    return out


def surface_from_json(obj: Mapping[str, Any]) -> FiniteSurface:
    try:
        polys = [
            Polygon(tuple((scalar_from_json(x), scalar_from_json(y)) for x, y in verts)) for verts in obj["polygons"]
        ]
        pairs = [(EdgeRef(int(a[0]), int(a[1])), EdgeRef(int(b[0]), int(b[1]))) for a, b in obj["pairing"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed surface JSON: {exc}") from None
    return FiniteSurface(polys, pairs, allow_boundary=bool(obj.get("boundary", False)), name=obj.get("name"))


# ============================================================
# IET
# ============================================================


def iet_to_json(f: IET, provenance: Optional[dict] = None) -> Dict[str, Any]:
    """完整 IET 写成字母表 + 秩数组；部分定义的写成显式分量"""
    out: Dict[str, Any] = {}
    if provenance is not None:
        out["provenance"] = provenance
    out["name"] = f.name
    if not f.unresolved_top and f.undefined_measure() == 0:
        alphabet = f.labels
        top, bottom = f.top_order(), f.bottom_order()
        out["alphabet"] = [str(a) for a in alphabet]
        out["top"] = [top.index(a) for a in alphabet]
        out["bottom"] = [bottom.index(a) for a in alphabet]
        out["lengths"] = [scalar_to_json(f.piece(a).length) for a in alphabet]
        return out
    out["total"] = scalar_to_json(f.total)
    out["pieces"] = [
        {
            "label": str(p.label),
            "top": scalar_to_json(p.top),
            "length": scalar_to_json(p.length),
            "bottom": scalar_to_json(p.bottom),
        }
        for p in f.pieces
    ]
    out["unresolved_top"] = [[scalar_to_json(a), scalar_to_json(b)] for a, b in f.unresolved_top]
    out["unresolved_bottom"] = [[scalar_to_json(a), scalar_to_json(b)] for a, b in f.unresolved_bottom]
    return out


def _pair(v) -> tuple:
    return scalar_from_json(v[0]), scalar_from_json(v[1])


GENERATORS: Dict[str, Callable[[Mapping[str, Any]], IET]] = {
    "rotation": lambda p: rotation_iet(scalar_from_json(p["a"])),
    "golden": lambda p: golden_rotation(),
    "baker_vertical": lambda p: baker_vertical_iet(scalar_from_json(p.get("alpha", "1/2")), int(p.get("n", 30))),
    "baker": lambda p: baker_iet(scalar_from_json(p.get("alpha", "1/2")), _pair(p["direction"]), int(p.get("n", 30))),
    "keane_unperturbed": lambda p: keane_unperturbed(int(p.get("n", 30))),
    "keane": lambda p: keane_counterexample(n=int(p.get("n", 30))),
}


def iet_from_json(obj: Mapping[str, Any]) -> IET:
    try:
        if "generator" in obj:
            name = obj["generator"]
            if name not in GENERATORS:
                raise UsageError(f"unknown IET generator {name!r}; known: {sorted(GENERATORS)}")
            return GENERATORS[name](obj.get("params", {}))
        if "pieces" in obj:
            pieces = [
                Piece(
                    p["label"],
                    scalar_from_json(p["top"]),
                    scalar_from_json(p["length"]),
                    scalar_from_json(p["bottom"]),
                )
                for p in obj["pieces"]
            ]
            total = scalar_from_json(obj["total"]) if "total" in obj else None
            return IET(
                pieces,
                total=total,
                unresolved_top=[_pair(u) for u in obj.get("unresolved_top", [])],
                unresolved_bottom=[_pair(u) for u in obj.get("unresolved_bottom", [])],
                name=obj.get("name"),
            )
        alphabet: List[Hashable] = list(obj["alphabet"])
        top = _order(alphabet, obj["top"])
        bottom = _order(alphabet, obj["bottom"])
        lengths = {a: scalar_from_json(v) for a, v in zip(alphabet, obj["lengths"])}
    except (KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"malformed IET JSON: {exc}") from None
    if len(lengths) != len(alphabet):
        raise UsageError("lengths must list one value per letter")
    return IET.from_orders(top, bottom, lengths, name=obj.get("name"))


def _order(alphabet: List[Hashable], ranks: List[int]) -> List[Hashable]:
    if sorted(ranks) != list(range(len(alphabet))):
        raise UsageError(f"rank array {ranks} is not a permutation of 0..{len(alphabet) - 1}")
    out: List[Hashable] = [None] * len(alphabet)
    for a, r in zip(alphabet, ranks):
        out[r] = a
    return out
