import heapq
import importlib
import logging
import math
import os
from dataclasses import dataclass
from glob import glob
from typing import NamedTuple

import numpy as np

from fmasr.grid import assemble_stencils, stencil_economy
from fmasr.registry import ModuleBase, RegisterableModule
from fmasr.solver.hopflax import HopfLax
from fmasr.utils.loginit import get_logger, log_timing

logger = get_logger(__name__)  # pylint: disable=invalid-name

# permanent value of the lattice points that are not in the domain
BOUNDARY_CONDITIONS = {"source": math.inf, "escape": 0.0}


def outside_value_for(bc):
    if bc not in BOUNDARY_CONDITIONS:
        raise ValueError(f"unknown boundary condition {bc}; expected one of {sorted(BOUNDARY_CONDITIONS)}")
    return BOUNDARY_CONDITIONS[bc]


@dataclass
class DistanceField:
    """ Solver output: one value per grid point (+inf where unreachable) and the order in which points were accepted.

        `monotone` is False when some accepted value was smaller than a previously accepted one, which only happens
        when the stencils are not acute for the metric.
    """

    domain: object
    values: np.ndarray
    accepted: np.ndarray
    order: np.ndarray
    monotone: bool = True
    outside_value: float = math.inf

    @property
    def reachable(self):
        return np.isfinite(self.values)

    def accepted_values(self):
        return self.values[self.order]

    def to_array(self):
        return self.domain.to_array(self.values)


def fast_march(domain, table, bc="source"):
    """ Single pass solve of the discrete fixed point problem d = Lambda(d) on the interior points.

        Dirichlet points start accepted-to-be at 0; the trial point of smallest value (ties: smallest index) is accepted
        next, and each still-trial point x whose stencil contains it gets d(x) = min(d(x), Lambda(d, x; b, y)).
    """

    outside_value = outside_value_for(bc)
    hl = HopfLax(table, outside_value)
    N = domain.size
    values = [math.inf] * N
    accepted = [False] * N

    heap = []
    for y in domain.boundary.tolist():
        values[y] = 0.0
        heap.append((0.0, y))

    if outside_value == 0.0:
        for x in domain.interior.tolist():
            values[x] = hl.seed(x)
            if values[x] < math.inf:
                heap.append((values[x], x))
    heapq.heapify(heap)

    rev_indptr, rev_points, rev_slots = hl.rev_indptr, hl.rev_points, hl.rev_slots
    order = []
    last = -math.inf
    monotone = True
    while heap:
        d, y = heapq.heappop(heap)
        # stale entry: y was accepted or its value decreased after the push
        if accepted[y] or d > values[y]:
            continue

        accepted[y] = True
        order.append(y)
        if d < last:
            monotone = False
            logger.warning("acceptance order not monotone: point %s accepted at %.17g after %.17g", y, d, last)
        else:
            last = d

        for r in range(rev_indptr[y], rev_indptr[y + 1]):
            x = rev_points[r]
            if accepted[x]:
                continue
            value = hl.partial(values, accepted, x, rev_slots[r])
            if value < values[x]:
                values[x] = value
                heapq.heappush(heap, (value, x))

    unreachable = [x for x in range(N) if not accepted[x]]
    if unreachable:
        logger.info("%s of %s points are unreachable", len(unreachable), N)
        order.extend(unreachable)

    return DistanceField(
        domain, np.array(values, dtype=float), np.ones(N, dtype=bool), np.array(order, dtype=np.int64), monotone, outside_value
    )


class SolveResult(NamedTuple):
    field: DistanceField
    table: object
    prep_seconds: float
    solve_seconds: float

    @property
    def total_seconds(self):
        return self.prep_seconds + self.solve_seconds


class Solver(ModuleBase, metaclass=RegisterableModule):
    """the module base class"""

    module_type = "solver"

    def prepare(self, domain, metric):
        """ Build the StencilTable of `domain` for `metric` """
        raise NotImplementedError

    def execute(self, domain, table, bc="source"):
        return fast_march(domain, table, bc)

    def solve(self, domain, metric, bc="source"):
        """ Preprocessing then execution, each timed in CPU seconds. """

        with log_timing(logger, f"{self.name} preprocessing", logging.DEBUG) as prep:
            table = self.prepare(domain, metric)
        with log_timing(logger, f"{self.name} execution", logging.DEBUG) as run:
            field = self.execute(domain, table, bc)

        N, total, largest = stencil_economy(table)
        logger.info(
            "%s: N=%s N'=%s (largest stencil %s), preprocessing %.3fs, execution %.3fs",
            self.name,
            N,
            total,
            largest,
            prep["seconds"],
            run["seconds"],
        )
        return SolveResult(field, table, prep["seconds"], run["seconds"])


class FastMarchingASR(Solver):
    """ Fast marching with anisotropic stencil refinement: every point gets the F-acute mesh of its local norm. """

    name = "fm-asr"

    @staticmethod
    def config():
        safety_cap = 10_000_000  # maximum number of steps of each mesh construction

    def prepare(self, domain, metric):
        return assemble_stencils(domain, metric, safety_cap=self.cfg["safety_cap"])


# import the remaining solvers so that their classes are always registered
pwd = os.path.dirname(__file__)
for fn in glob(os.path.join(pwd, "*.py")):
    modname = os.path.basename(fn)[:-3]
    if not (modname.startswith("__") or modname.startswith("flycheck_")):
        importlib.import_module(f"fmasr.solver.{modname}")
