"""
Reference solvers sharing the grid and the Hopf-Lax updates of FM-ASR but not its stencils:

  - FM-8, the fast marching loop on the fixed 8-neighbor stencil, only guaranteed to converge for metrics of
    anisotropy ratio at most sqrt(2);
  - AGSI, an adaptive Gauss-Seidel iteration (label correcting, FIFO active list) on the six-neighbor one-ring of the
    standard triangulation of the grid.
"""

import math
from collections import deque

import numpy as np

from fmasr.grid import assemble_stencils
from fmasr.solver import DistanceField, Solver, fast_march, outside_value_for
from fmasr.solver.hopflax import HopfLax
from fmasr.stencil import StencilMesh
from fmasr.utils.exceptions import ConvergenceError
from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name

EIGHT_NEIGHBORS = StencilMesh(((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)))
# the six triangles around a vertex of the triangulation by (0,0),(1,0),(0,1) and its symmetric
KUHN_ONE_RING = StencilMesh(((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)))


def fixed_stencils(domain, metric, mesh, spec=None):
    """ StencilTable using the same lattice mesh at every point """

    def mesher(F):
        return mesh

    return assemble_stencils(domain, metric, spec=spec, mesher=mesher)


def fm8_solve(domain, metric, spec=None, bc="source"):
    return fast_march(domain, fixed_stencils(domain, metric, EIGHT_NEIGHBORS, spec), bc)


def agsi_iterate(domain, table, tol=1e-8, max_iter_factor=10_000, bc="source"):
    """ Label-correcting iteration of d(x) = Lambda(d, x) until no value decreases by more than `tol`.

        The active list starts with the points whose stencil touches a Dirichlet point (or OUTSIDE in escape mode).
        Whenever d(x) decreases by more than `tol`, the points whose stencils contain x become active again.
    """

    if not tol > 0:
        raise ValueError(f"tol must be positive but got {tol}")

    outside_value = outside_value_for(bc)
    hl = HopfLax(table, outside_value)
    N = domain.size
    values = [math.inf] * N
    for y in domain.boundary.tolist():
        values[y] = 0.0

    dirichlet = domain.dirichlet.tolist()
    in_queue = [False] * N
    queue = deque()

    def activate(x):
        if not dirichlet[x] and not in_queue[x]:
            in_queue[x] = True
            queue.append(x)

    for y in domain.boundary.tolist():
        for r in range(hl.rev_indptr[y], hl.rev_indptr[y + 1]):
            activate(hl.rev_points[r])
    if outside_value < math.inf:
        for x in domain.interior.tolist():
            if hl.seed(x) < math.inf:
                activate(x)

    max_updates = max_iter_factor * N
    updates = 0
    while queue:
        x = queue.popleft()
        in_queue[x] = False
        updates += 1
        if updates > max_updates:
            raise ConvergenceError(max_updates)

        old, new = values[x], hl.full(values, x)
        if new < old:
            values[x] = new
            if old - new > tol:
                for r in range(hl.rev_indptr[x], hl.rev_indptr[x + 1]):
                    activate(hl.rev_points[r])

    logger.debug("AGSI converged after %s updates (%.2f per point)", updates, updates / N)
    values = np.array(values, dtype=float)
    return DistanceField(
        domain, values, np.ones(N, dtype=bool), np.argsort(values, kind="stable").astype(np.int64), True, outside_value
    )


def agsi_solve(domain, metric, spec=None, tol=1e-8, max_iter_factor=10_000, bc="source"):
    table = fixed_stencils(domain, metric, KUHN_ONE_RING, spec)
    return agsi_iterate(domain, table, tol, max_iter_factor, bc)


class FM8(Solver):
    """ Fast marching on the 8-neighbor stencil """

    name = "fm-8"

    def prepare(self, domain, metric):
        return fixed_stencils(domain, metric, EIGHT_NEIGHBORS)


class AGSI(Solver):
    """ Adaptive Gauss-Seidel iteration on the one-ring of the standard grid triangulation """

    name = "agsi"

    @staticmethod
    def config():
        tol = 1e-8  # stop when no update decreases a value by more than tol
        max_iter_factor = 10_000  # give up after max_iter_factor * N updates

    def prepare(self, domain, metric):
        return fixed_stencils(domain, metric, KUHN_ONE_RING)

    def execute(self, domain, table, bc="source"):
        return agsi_iterate(domain, table, self.cfg["tol"], self.cfg["max_iter_factor"], bc)
