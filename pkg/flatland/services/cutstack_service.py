import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from flatland.core import cutstack
from flatland.core.codec import iet_to_json
from flatland.core.config import RunConfig
from flatland.core.errors import UsageError
from flatland.core.scalar import format_scalar
from flatland.services.run_service import LedgerMixin, RunService

logger = logging.getLogger(__name__)


def named_steps(spec: str) -> List[cutstack.CutStackStep]:
    """`odometer:k`、`figure` 或 `shields:k`"""
    name, _, arg = spec.partition(":")
    if name == "odometer":
        return cutstack.odometer_steps(int(arg or 1))
    if name == "figure":
        return cutstack.figure_steps()
    if name == "shields":
        return cutstack.shields_steps(int(arg or 1))
    raise UsageError(f"unknown step family {spec!r}; known: odometer:k, figure, shields:k")


class CutStackService(LedgerMixin):
    def __init__(self, runs: Optional[RunService] = None):
        self.runs = runs

    def to_iet(
        self, config: RunConfig, steps: Sequence[cutstack.CutStackStep], k: Optional[int] = None
    ) -> Tuple[cutstack.StackIET, Dict[str, Any]]:
        res = cutstack.to_iet(steps, k)
        summary = {
            "steps": len(steps) if k is None else k,
            "pieces": len(res.iet.pieces),
            "undefined_measure": format_scalar(res.undefined_measure),
            "iet": iet_to_json(res.iet),
        }
        self._record(config, {k_: v for k_, v in summary.items() if k_ != "iet"})
        return res, summary

    def bratteli(
        self, config: RunConfig, steps: Sequence[cutstack.CutStackStep]
    ) -> Tuple[cutstack.BratteliDiagram, Dict[str, Any]]:
        diagram = cutstack.to_bratteli(steps)
        summary = {"levels": diagram.level_sizes(), "edges": len(diagram.edges)}
        self._record(config, summary)
        return diagram, summary

    def shields(self, config: RunConfig, k: int) -> Dict[str, Any]:
        res = cutstack.shields_example(k)
        summary = {
            "k": res.k,
            "q": str(res.q),
            "w": format_scalar(res.w),
            "log2_coefficient": format_scalar(res.log2_coefficient),
            "invariant": res.invariant,
            "materialized": res.family is not None,
        }
        if res.family is not None:
            summary["stacks"] = len(res.family.stacks)
            summary["measure"] = format_scalar(res.family.measure())
        self._record(config, summary)
        return summary
