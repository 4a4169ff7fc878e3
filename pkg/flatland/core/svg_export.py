"""
SVG 输出：沿生成树展开窗口内的多边形，配对边标注同一个标签，可叠加轨迹线段
"""

import logging
from collections import deque
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from flatland.core.plane import Vec, vadd, vsub
from flatland.core.scalar import to_float
from flatland.core.surface import EdgeRef, FiniteSurface, Surface, as_finite

logger = logging.getLogger(__name__)

CANVAS = 800
MARGIN = 20

SegmentLike = Tuple[Hashable, Vec, Vec]


def _pair_label(i: int) -> str:
    s = ""
    i += 1
    while i > 0:
        i, r = divmod(i - 1, 26)
        s = chr(ord("A") + r) + s
    return s


def develop(fs: FiniteSurface) -> Dict[Hashable, Vec]:
    """按广度优先把每个多边形平移到与父多边形共边的位置；不同连通分量依次向右排开"""
    offsets: Dict[Hashable, Vec] = {}
    right_edge = 0.0
    for root in fs.indices():
        if root in offsets:
            continue
        xs = [to_float(x) for x, _ in fs.polygons[root].vertices]
        offsets[root] = (right_edge - min(xs) + (1.0 if offsets else 0.0), 0.0)
        queue = deque([root])
        while queue:
            idx = queue.popleft()
            poly = fs.polygons[idx]
            for i in range(poly.n):
                o = fs.opposite(EdgeRef(idx, i))
                if o is None or o.poly in offsets:
                    continue
                other = fs.polygons[o.poly]
                # 本边起点与对边终点重合
                here = vadd(offsets[idx], tuple(map(to_float, poly.vertex(i))))
                there = tuple(map(to_float, other.vertex(o.edge + 1)))
                offsets[o.poly] = vsub(here, there)
                queue.append(o.poly)
        right_edge = max(
            to_float(x) + offsets[k][0] for k in offsets for x, _ in fs.polygons[k].vertices
        )
    return offsets


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def surface_to_svg(
    surface: Surface,
    window: Optional[int] = None,
    segments: Iterable[SegmentLike] = (),
    header: Optional[str] = None,
) -> str:
    fs = as_finite(surface, window)
    offsets = develop(fs)
    pts: List[Tuple[float, float]] = []
    placed: Dict[Hashable, List[Tuple[float, float]]] = {}
    for k, poly in fs.polygons.items():
        ox, oy = offsets[k]
        placed[k] = [(to_float(x) + ox, to_float(y) + oy) for x, y in poly.vertices]
        pts.extend(placed[k])
    min_x = min(p[0] for p in pts)
    max_x = max(p[0] for p in pts)
    min_y = min(p[1] for p in pts)
    max_y = max(p[1] for p in pts)
    span = max(max_x - min_x, max_y - min_y) or 1.0
    scale = (CANVAS - 2 * MARGIN) / span
    height = (max_y - min_y) * scale + 2 * MARGIN
    width = (max_x - min_x) * scale + 2 * MARGIN

    def tx(p: Sequence[float]) -> Tuple[float, float]:
        # SVG 的 y 轴向下
        return MARGIN + (p[0] - min_x) * scale, height - MARGIN - (p[1] - min_y) * scale

    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    if header:
        lines.append(f"<!-- {header.replace('--', '- -')} -->")
    lines.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(width)}" height="{_fmt(height)}">'
    )
    for k in fs.indices():
        d = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(tx, placed[k]))
        lines.append(f'  <polygon points="{d}" fill="#eef3fb" stroke="#1f3b73" stroke-width="1"/>')
    labels: Dict[EdgeRef, str] = {}
    for n, (a, b) in enumerate(fs.pairs):
        name = fs.pair_labels[n] if fs.pair_labels and n < len(fs.pair_labels) else _pair_label(n)
        labels[a] = labels[b] = name
    for k in fs.indices():
        poly = fs.polygons[k]
        cx = sum(p[0] for p in placed[k]) / poly.n
        cy = sum(p[1] for p in placed[k]) / poly.n
        for i in range(poly.n):
            name = labels.get(EdgeRef(k, i))
            if name is None:
                continue
            a, b = placed[k][i], placed[k][(i + 1) % poly.n]
            mx, my = (a[0] + b[0]) / 2, (a[1] + b[1]) / 2
            # 标签向多边形内部收一点
            lx, ly = tx((mx + 0.12 * (cx - mx), my + 0.12 * (cy - my)))
            lines.append(f'  <text x="{_fmt(lx)}" y="{_fmt(ly)}" font-size="10" text-anchor="middle">{name}</text>')
    for poly_idx, start, end in segments:
        if poly_idx not in offsets:
            continue
        ox, oy = offsets[poly_idx]
        p = tx((to_float(start[0]) + ox, to_float(start[1]) + oy))
        q = tx((to_float(end[0]) + ox, to_float(end[1]) + oy))
        lines.append(
            f'  <line x1="{_fmt(p[0])}" y1="{_fmt(p[1])}" x2="{_fmt(q[0])}" y2="{_fmt(q[1])}" '
            'stroke="#c0392b" stroke-width="1.5"/>'
        )
    lines.append("</svg>")
    logger.debug("SVG：%s 个多边形", len(fs.polygons))
    return "\n".join(lines) + "\n"
