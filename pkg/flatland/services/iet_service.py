"""
IET 服务：求值、轨道、连接、周期分量、熵上界、Keane 反例与 Málaga 映射
"""

import logging
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from flatland.core.builders import step_billiard_lengths
from flatland.core.codec import iet_from_json
from flatland.core.config import RunConfig
from flatland.core.errors import FlatlandError
from flatland.core.iet import (
    IET,
    EntropyBound,
    abramov,
    entropy_upper_bound,
    find_connections,
    orbit,
    periodic_components,
    tail_from_lengths,
)
from flatland.core.keane import check_deltas, default_delta, in_cantor, keane_counterexample
from flatland.core.malaga import malaga_orbit
from flatland.core.scalar import QuadExt, Scalar, exact, format_scalar, to_float
from flatland.services.run_service import LedgerMixin, RunService

logger = logging.getLogger(__name__)

DEFAULT_M_RANGE = range(2, 51)


def _fmt_list(xs: Sequence[Scalar]) -> List[str]:
    return [format_scalar(x) for x in xs]


def iet_tail(f: IET):
    """Λ(m)：生成器自带尾部时直接用，否则由分量长度加上未定义部分的测度给出"""
    if f.tail is not None:
        return f.tail, None
    lengths = [p.length for p in f.pieces]
    return tail_from_lengths(lengths, remainder=f.undefined_measure(), sort=True), len(lengths)


def entropy_summary(bound: EntropyBound) -> Dict[str, Any]:
    return {
        "m": bound.ms,
        "values": bound.values,
        "running_inf": bound.running_inf,
        "last": bound.last,
    }


class IETService(LedgerMixin):
    def __init__(self, runs: Optional[RunService] = None):
        self.runs = runs

    @staticmethod
    def load(spec: Mapping[str, Any]) -> IET:
        return iet_from_json(spec)

    def eval(self, config: RunConfig, f: IET, x: Scalar) -> Dict[str, Any]:
        y = f.eval(exact(x))
        summary = {"x": format_scalar(x), "value": format_scalar(y), "label": str(f.piece_at(exact(x)).label)}
        self._record(config, summary)
        return summary

    def orbit(self, config: RunConfig, f: IET, x: Scalar, n: int) -> Dict[str, Any]:
        o = orbit(f, exact(x), n)
        summary = {"points": _fmt_list(o.points), "labels": [str(a) for a in o.labels], "status": o.status.value}
        self._record(config, summary)
        return summary

    def connections(self, config: RunConfig, f: IET, depth: int) -> Dict[str, Any]:
        found = find_connections(f, depth)
        summary = {
            "depth": depth,
            "count": len(found),
            "connections": [{"m": c.m, "x": format_scalar(c.x), "y": format_scalar(c.y)} for c in found],
        }
        self._record(config, summary)
        return summary

    def periodic(self, config: RunConfig, f: IET, n_max: int, strict: bool = False) -> Dict[str, Any]:
        comps = periodic_components(f, n_max, strict=strict)
        summary = {
            "n_max": n_max,
            "count": len(comps),
            "components": [
                {
                    "lo": format_scalar(c.lo),
                    "hi": format_scalar(c.hi),
                    "period": c.period,
                    "coding": [str(a) for a in c.coding],
                }
                for c in comps
            ],
        }
        self._record(config, summary)
        return summary

    # ------------------------------------------------------------
    # 熵
    # ------------------------------------------------------------
    def entropy_of_iet(self, config: RunConfig, f: IET, m_range: Optional[range] = None) -> Dict[str, Any]:
        tail, known = iet_tail(f)
        if m_range is None:
            m_range = DEFAULT_M_RANGE if known is None else range(2, max(known, 3))
        bound = entropy_upper_bound(tail, m_range)
        summary = entropy_summary(bound)
        summary["source"] = f.name
        self._record(config, summary)
        return summary

    def entropy_of_lengths(
        self, config: RunConfig, lengths: Sequence[Scalar], remainder: Scalar = 0, m_range: Optional[range] = None
    ) -> Dict[str, Any]:
        tail = tail_from_lengths(lengths, remainder=remainder, sort=True)
        m_range = m_range or range(2, max(len(lengths), 3))
        summary = entropy_summary(entropy_upper_bound(tail, m_range))
        summary["source"] = "lengths"
        self._record(config, summary)
        return summary

    def entropy_of_step_billiard(
        self, config: RunConfig, ratio: Scalar, direction: Tuple[Scalar, Scalar], levels: int
    ) -> Dict[str, Any]:
        """台阶台球的返回映射：前 levels 层的长度显式给出，其余由几何尾部覆盖"""
        lengths, rest = step_billiard_lengths(ratio, direction, levels)
        tail = tail_from_lengths([v for _, v in lengths], remainder=rest, sort=True)
        bound = entropy_upper_bound(tail, range(2, max(len(lengths), 3)))
        summary = entropy_summary(bound)
        summary["source"] = "step billiard"
        summary["pieces"] = [[name, format_scalar(v)] for name, v in lengths]
        summary["tail"] = format_scalar(rest)
        self._record(config, summary)
        return summary

    @staticmethod
    def abramov(entropy_return: Scalar, integral_return_time: Scalar) -> float:
        return to_float(abramov(entropy_return, exact(integral_return_time)))

    # ------------------------------------------------------------
    # 例子
    # ------------------------------------------------------------
    def keane(self, config: RunConfig, truncation: int = 30, depth: int = 20, cantor_depth: int = 10) -> Dict[str, Any]:
        """默认 ℚ(√2) 参数族：约束、连接搜索，以及三进 Cantor 端点的像"""
        report = check_deltas(default_delta, truncation)
        f = keane_counterexample(n=truncation)
        found = find_connections(f, depth)
        endpoints = _cantor_endpoints(cantor_depth)
        mapped = 0
        for x in endpoints:
            try:
                y = f.eval(x)
            except FlatlandError:
                continue
            if isinstance(y, QuadExt):
                if y.b != 0:
                    continue
                y = y.a
            if isinstance(y, float) or not in_cantor(y):
                continue
            mapped += 1
        summary = {
            "truncation": truncation,
            "constraints_ok": report.ok,
            "connections": len(found),
            "cantor_endpoints": len(endpoints),
            "cantor_endpoints_in_C3": mapped,
        }
        self._record(config, summary)
        return summary

    def malaga(
        self, config: RunConfig, alphas: Sequence[Scalar], x: Scalar, n: int, steps: int
    ) -> Dict[str, Any]:
        """α 序列按层号 n mod len 周期延拓"""
        seq = [exact(a) for a in alphas]
        states = malaga_orbit(lambda k: seq[k % len(seq)], (exact(x), n), steps)
        summary = {"states": [[format_scalar(s), m] for s, m in states]}
        self._record(config, summary)
        return summary


def _cantor_endpoints(depth: int) -> List[Scalar]:
    """C₃ 的 k ≤ depth 级区间左右端点，去掉 0 和 1"""
    intervals = [(Fraction(0), Fraction(1))]
    points = set()
    for _ in range(depth):
        nxt = []
        for lo, hi in intervals:
            third = (hi - lo) / 3
            nxt += [(lo, lo + third), (hi - third, hi)]
            points.update((lo + third, hi - third))
        intervals = nxt
    return sorted(points)
