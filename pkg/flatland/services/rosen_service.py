import logging
from typing import Any, Dict, Optional

from flatland.core import rosen
from flatland.core.config import RunConfig
from flatland.core.scalar import Scalar, format_scalar
from flatland.services.run_service import LedgerMixin, RunService

logger = logging.getLogger(__name__)


class RosenService(LedgerMixin):
    def __init__(self, runs: Optional[RunService] = None):
        self.runs = runs

    def expand(self, config: RunConfig, x: Scalar, lam: Scalar, depth: int = 30) -> Dict[str, Any]:
        e = rosen.expansion(x, lam, depth)
        summary = {
            "x": format_scalar(e.x),
            "lambda": format_scalar(e.lam),
            "digits": [list(d) for d in e.digits],
            "p": [format_scalar(v) for v in e.p],
            "q": [format_scalar(v) for v in e.q],
            "convergents": [format_scalar(v) for v in e.convergents()],
            "status": e.status.value,
            "growth_ok": e.growth_ok,
            "approximation_ok": e.approximation_ok,
        }
        self._record(config, summary, status="ok" if e.growth_ok and e.approximation_ok else "error")
        return summary

    def gap(self, config: RunConfig, lam: Scalar) -> Dict[str, Any]:
        lo, hi = rosen.limit_set_gap(lam)
        g = rosen.funnel_generator(lam)
        summary = {
            "lambda": format_scalar(lam),
            "gap": [format_scalar(lo), format_scalar(hi)],
            "gap_float": [float(lo), float(hi)],
            "max_limit_point": format_scalar(rosen.max_limit_point(lam)),
            "funnel_length": rosen.funnel_length(lam),
            "funnel_trace": format_scalar(g.trace()),
            "funnel_class": rosen.classify(g).value,
        }
        self._record(config, summary)
        return summary

    def reduce(self, config: RunConfig, x: Scalar, y: Scalar, lam: Scalar) -> Dict[str, Any]:
        red = rosen.reduce_to_domain((x, y), lam)
        m = red.matrix(lam)
        summary = {
            "point": [format_scalar(red.point[0]), format_scalar(red.point[1])],
            "word": [[name, power] for name, power in red.word],
            "matrix": [format_scalar(v) for v in (m.a, m.b, m.c, m.d)],
            "in_domain": rosen.in_fundamental_domain(red.point, lam),
        }
        self._record(config, summary)
        return summary
