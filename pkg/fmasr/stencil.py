"""
Construction of the F-acute lattice mesh T(F) by recursive refinement of elementary triangles.

Meshes are star-shaped with respect to the origin, so they are stored as the counter-clockwise cycle of their
boundary vertices, starting at (1,0). The cycle is closed implicitly: the last vertex connects to the first.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from tqdm import tqdm

from fmasr.norms import _acute, is_acute, rotate_norm
from fmasr.utils.exceptions import ASCFinitenessError, LatticeOverflowError
from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name

INT64_MAX = np.iinfo(np.int64).max
DEFAULT_SAFETY_CAP = 10_000_000

LatticeVec = Tuple[int, int]


def det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def _add(u, v):
    w = (u[0] + v[0], u[1] + v[1])
    if abs(w[0]) > INT64_MAX or abs(w[1]) > INT64_MAX:
        raise LatticeOverflowError(w)
    return w


@dataclass(frozen=True)
class ElementaryTriangle:
    """ Lattice triangle of vertices 0, u, v with |det(u,v)| = 1 and s(T) = <u,v> >= 0. """

    u: LatticeVec
    v: LatticeVec

    def __post_init__(self):
        if abs(det(self.u, self.v)) != 1 or dot(self.u, self.v) < 0:
            raise ValueError(f"({self.u}, {self.v}) is not an elementary triangle")

    @property
    def s(self):
        return dot(self.u, self.v)

    def is_root(self):
        return self in ROOTS or ElementaryTriangle(self.v, self.u) in ROOTS


# T_0: the four triangles around the origin with vertices (+-1,0), (0,+-1), counter-clockwise from (1,0)
ROOTS = (
    ElementaryTriangle((1, 0), (0, 1)),
    ElementaryTriangle((0, 1), (-1, 0)),
    ElementaryTriangle((-1, 0), (0, -1)),
    ElementaryTriangle((0, -1), (1, 0)),
)


def children(T):
    w = _add(T.u, T.v)
    return ElementaryTriangle(T.u, w), ElementaryTriangle(w, T.v)


def parent(T):
    """ The unique elementary triangle that T is a child of, or None for the roots T_0. """

    if T.is_root():
        return None

    u, v = T.u, T.v
    if dot(u, u) <= dot(v, v):
        # T = (u, u+v') is a first child
        return ElementaryTriangle(u, (v[0] - u[0], v[1] - u[1]))
    return ElementaryTriangle((u[0] - v[0], u[1] - v[1]), v)


@dataclass(frozen=True)
class StencilMesh:
    """ Consecutive boundary vertices of a star-shaped lattice mesh, counter-clockwise from (1,0). """

    boundary: Tuple[LatticeVec, ...]

    @property
    def cardinality(self):
        """ The number of triangles, which is also the number of boundary vertices. """
        return len(self.boundary)

    def __len__(self):
        return len(self.boundary)

    def __iter__(self):
        return iter(self.boundary)

    def edges(self):
        n = len(self.boundary)
        return [(self.boundary[i], self.boundary[(i + 1) % n]) for i in range(n)]

    def triangles(self):
        return [ElementaryTriangle(u, v) for u, v in self.edges()]

    def winding(self):
        """ Sum of the angles between consecutive vertices, 2*pi for a mesh covering a neighborhood of 0. """
        return sum(math.atan2(det(u, v), dot(u, v)) for u, v in self.edges())

    def max_vertex_norm(self):
        return max(math.hypot(*w) for w in self.boundary)


def build_mesh(F, safety_cap=DEFAULT_SAFETY_CAP):
    """ Build T(F) with the two-list algorithm.

        L starts as [(1,0)] and M, used as a stack, as [(1,0), (0,-1), (-1,0), (0,1)]. While M is non-empty, with u the
        last element of L and v the top of M: if u and v form an F-acute angle, v moves from M to L, otherwise u+v is
        pushed on M.
    """

    if safety_cap < 8:
        raise ValueError(f"safety_cap must be at least 8 but got {safety_cap}")

    a, b, c = F.M.a, F.M.b, F.M.c
    mwx, mwy = F.drift
    L = [(1, 0)]
    M = [(1, 0), (0, -1), (-1, 0), (0, 1)]

    iterations = 0
    while M:
        iterations += 1
        if iterations > safety_cap:
            raise ASCFinitenessError(safety_cap, F)

        u, v = L[-1], M[-1]
        if _acute(a, b, c, mwx, mwy, u[0], u[1], v[0], v[1]):
            L.append(M.pop())
        else:
            M.append(_add(u, v))

    logger.debug("built a mesh of %s triangles in %s steps", len(L) - 1, iterations)
    # the final (1,0) closes the cycle and is stored once
    return StencilMesh(tuple(L[:-1]))


@lru_cache(maxsize=65536)
def cached_mesh(F, safety_cap=DEFAULT_SAFETY_CAP):
    """ build_mesh memoized on the exact norm parameters; metrics are often constant on large regions. """
    return build_mesh(F, safety_cap)


def refine_mesh(predicate, safety_cap=DEFAULT_SAFETY_CAP):
    """ Refine T_0 recursively until every triangle satisfies the stopping criterion `predicate`.

        Returns the mesh and the list of refined triangles E(p), in the in-order traversal of the four trees, so that
        the mesh has 4 + len(refined) triangles.
    """

    boundary = []
    refined = []
    steps = 0
    for root in ROOTS:
        stack = [root]
        while stack:
            steps += 1
            if steps > safety_cap:
                raise ASCFinitenessError(safety_cap)

            T = stack.pop()
            if predicate(T):
                boundary.append(T.v)
            else:
                refined.append(T)
                first, second = children(T)
                # second child pushed first so that the traversal stays counter-clockwise
                stack.append(second)
                stack.append(first)

    # boundary lists the end vertex of each leaf, so the cycle ends with (1,0)
    return StencilMesh(tuple([boundary[-1]] + boundary[:-1])), refined


def mesh_is_acute(F, mesh):
    return all(is_acute(F, T.u, T.v) for T in mesh.triangles())


def mesh_cardinality_stats(F, theta_samples, safety_cap=DEFAULT_SAFETY_CAP, progress=False):
    """ #T(F^theta) for theta = 2*pi*k/theta_samples, k = 0 .. theta_samples-1. """

    if theta_samples < 1:
        raise ValueError(f"theta_samples must be positive but got {theta_samples}")

    stats = []
    for k in tqdm(range(theta_samples), desc="orientations", disable=not progress):
        theta = 2 * math.pi * k / theta_samples
        stats.append((theta, build_mesh(rotate_norm(F, theta), safety_cap).cardinality))
    return stats


def isotropic_mesh(kappa):
    """ The mesh T_kappa obtained by refining until s(T) >= kappa, F-acute for every norm with kappa(F) <= kappa. """

    if kappa < 1:
        raise ValueError(f"kappa must be at least 1 but got {kappa}")
    mesh, _ = refine_mesh(lambda T: T.s >= kappa)
    return mesh
