import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from flatland.core.config import RunConfig
from flatland.core.scalar import Scalar, format_scalar
from flatland.core.windtree import DiffusionResult, in_E, windtree_diffusion
from flatland.services.run_service import LedgerMixin, RunService

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["orbit", "slope"]


class WindtreeService(LedgerMixin):
    def __init__(self, runs: Optional[RunService] = None):
        self.runs = runs

    def diffusion(
        self,
        config: RunConfig,
        a: Scalar,
        b: Scalar,
        direction: Union[float, Sequence[Scalar]],
        horizon: float,
        n_orbits: int,
    ) -> Tuple[DiffusionResult, Dict[str, Any]]:
        seed = config.seed if config.seed is not None else 0
        res = windtree_diffusion(a, b, direction, horizon=horizon, n_orbits=n_orbits, seed=seed)
        summary = {
            "a": format_scalar(a),
            "b": format_scalar(b),
            "in_E": in_E(a, b),
            "orbits": n_orbits,
            "horizon": horizon,
            "median": res.median,
            "ci": [res.ci_low, res.ci_high],
            "generic_direction": res.generic_direction,
            "seed": res.seed,
        }
        self._record(config, summary)
        return res, summary

    @staticmethod
    def csv_rows(res: DiffusionResult) -> List[List[Any]]:
        return [[k, s] for k, s in enumerate(res.slopes)]
