import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np

from ..core.config import PlacementParams
from ..core.errors import DomainError
from ..core.types import Netlist
from .dissymmetry import SCHEMA_VERSION, report

logger = logging.getLogger(__name__)


def assign_capacitances(netlist: Netlist, params: PlacementParams) -> Netlist:
    """
    Redraws the routing part of every net's load as base_fF * (1 + u),
    u ~ Uniform(-dispersion, +dispersion), in net declaration order. Pin
    capacitance is kept.
    """
    rng = np.random.default_rng(params.seed)
    u = rng.uniform(-params.dispersion, params.dispersion, size=len(netlist.nets))
    nets = tuple(
        replace(net, c_load_fF=net.c_pin_fF + params.base_fF * (1.0 + float(du)))
        for net, du in zip(netlist.nets, u)
    )
    return replace(netlist, nets=nets)


def area_proxy(netlist: Netlist, params: PlacementParams) -> float:
    """Gate count scaled by the flow's declared area overhead."""
    return len(netlist.gates) * params.area_overhead


@dataclass
class ComparisonReport:
    flat_max_d_a: List[float] = field(default_factory=list)
    hier_max_d_a: List[float] = field(default_factory=list)
    flat_area: float = 0.0
    hier_area: float = 0.0
    seeds: List[int] = field(default_factory=list)

    @property
    def area_ratio(self) -> float:
        return self.hier_area / self.flat_area if self.flat_area else float("nan")

    @property
    def flat_median(self) -> float:
        return statistics.median(self.flat_max_d_a)

    @property
    def hier_median(self) -> float:
        return statistics.median(self.hier_max_d_a)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "n_seeds": len(self.seeds),
            "seeds": self.seeds,
            "flat": {"max_d_A": self.flat_max_d_a, "median_max_d_A": self.flat_median, "area_proxy": self.flat_area},
            "hierarchical": {
                "max_d_A": self.hier_max_d_a,
                "median_max_d_A": self.hier_median,
                "area_proxy": self.hier_area,
            },
            "area_ratio": self.area_ratio,
        }


def compare_flows(
    netlist: Netlist,
    flat: PlacementParams,
    hier: PlacementParams,
    n_seeds: int,
    workers: int = 1,
) -> ComparisonReport:
    """
    Runs both flows over ``n_seeds`` seeds (each flow's seed + s) and collects the
    worst channel d_A of every run.
    """
    if n_seeds < 1:
        raise DomainError(f"n_seeds must be >= 1, got {n_seeds}")
    logger.info(f"--- Comparing flat and hierarchical placement over {n_seeds} seed(s) ---")

    def run(s: int):
        f = report(assign_capacitances(netlist, replace(flat, seed=flat.seed + s))).max_d_a
        h = report(assign_capacitances(netlist, replace(hier, seed=hier.seed + s))).max_d_a
        return f, h

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(run, range(n_seeds)))
    else:
        pairs = [run(s) for s in range(n_seeds)]

    result = ComparisonReport(
        flat_max_d_a=[f for f, _ in pairs],
        hier_max_d_a=[h for _, h in pairs],
        flat_area=area_proxy(netlist, flat),
        hier_area=area_proxy(netlist, hier),
        seeds=[flat.seed + s for s in range(n_seeds)],
    )
    logger.info(f"Median max d_A: flat {result.flat_median:.3f}, hierarchical {result.hier_median:.3f}; "
                f"area ratio {result.area_ratio:.2f}")
    return result
