"""
Discretization of a rectangular domain on the grid h R_theta (offset + Z^2), and assembly of the per-point stencils
V(z) = z + h R_theta T(F_z o R_theta) together with the reversed stencils.

Stencils are stored as flat arrays (CSR layout) of point indices; a lattice vertex that is not a grid point of the
domain is recorded with the reserved index OUTSIDE.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from fmasr.norms import Box, rotate_norm
from fmasr.stencil import DEFAULT_SAFETY_CAP, cached_mesh
from fmasr.utils.exceptions import EmptyDomainError, StencilAssemblyError
from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name

OUTSIDE = -1
GRID_MAGIC = "grid v1"


@dataclass(frozen=True)
class GridSpec:
    """ The grid h R_theta (offset + Z^2), restricted to the rectangle `bbox`. """

    h: float
    bbox: Box
    theta: float = 0.0
    offset: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"grid scale must be positive but got h={self.h}")

    @classmethod
    def square(cls, bbox, n, theta=0.0, offset=(0.0, 0.0)):
        """ n points along the x side of `bbox` when theta=0 and offset=0 """
        if n < 2:
            raise ValueError(f"need at least two points per side but got n={n}")
        return cls((bbox.xmax - bbox.xmin) / (n - 1), bbox, float(theta), (float(offset[0]), float(offset[1])))

    @property
    def rotation(self):
        cs, sn = math.cos(self.theta), math.sin(self.theta)
        return np.array([[cs, -sn], [sn, cs]])

    def to_position(self, lattice):
        """ Physical positions of lattice coordinates, h R_theta (offset + x). """
        lattice = np.asarray(lattice, dtype=float)
        return self.h * (lattice + np.asarray(self.offset)) @ self.rotation.T

    def to_lattice(self, positions):
        """ Fractional lattice coordinates of physical positions. """
        positions = np.asarray(positions, dtype=float)
        return (positions @ self.rotation) / self.h - np.asarray(self.offset)


@dataclass(frozen=True)
class DiscreteDomain:
    """ Grid points inside the box, enumerated row by row; the points nearest to the sources form the Dirichlet set.

        `index_of` covers the lattice rectangle [i0, i0+ni) x [j0, j0+nj), row j - j0, column i - i0, and holds OUTSIDE
        for lattice points that are not in the domain.
    """

    spec: GridSpec
    i0: int
    j0: int
    index_of: np.ndarray
    lattice: np.ndarray
    positions: np.ndarray
    dirichlet: np.ndarray

    @property
    def size(self):
        return len(self.lattice)

    @property
    def interior(self):
        return np.flatnonzero(~self.dirichlet)

    @property
    def boundary(self):
        return np.flatnonzero(self.dirichlet)

    @property
    def shape(self):
        return self.index_of.shape

    def lookup(self, i, j):
        r, c = j - self.j0, i - self.i0
        if 0 <= r < self.index_of.shape[0] and 0 <= c < self.index_of.shape[1]:
            return int(self.index_of[r, c])
        return OUTSIDE

    def to_array(self, values, fill=np.inf):
        """ Values per point laid out on the lattice rectangle, `fill` where there is no point. """
        out = np.full(self.index_of.shape, fill, dtype=float)
        present = self.index_of != OUTSIDE
        out[present] = np.asarray(values, dtype=float)[self.index_of[present]]
        return out


def discretize(spec, sources):
    """ Interior points h R_theta (offset + Z^2) inside the box, and one Dirichlet point nearest to each source. """

    box = spec.bbox
    for source in sources:
        if not box.contains(source):
            raise ValueError(f"source {source} lies outside the domain {box}")

    corners = spec.to_lattice(box.corners)
    i0, j0 = np.floor(corners.min(axis=0)).astype(int) - 1
    i1, j1 = np.ceil(corners.max(axis=0)).astype(int) + 1
    jj, ii = np.mgrid[j0 : j1 + 1, i0 : i1 + 1]
    lattice = np.stack([ii.ravel(), jj.ravel()], axis=1).astype(np.int64)
    positions = spec.to_position(lattice)

    slack = 1e-9 * spec.h
    inside = (
        (positions[:, 0] >= box.xmin - slack)
        & (positions[:, 0] <= box.xmax + slack)
        & (positions[:, 1] >= box.ymin - slack)
        & (positions[:, 1] <= box.ymax + slack)
    )

    if not inside.any():
        raise EmptyDomainError(f"no grid point of {spec} inside the box")

    # crop the lattice rectangle to the rows and columns holding grid points
    inside = inside.reshape(ii.shape)
    rows, cols = np.flatnonzero(inside.any(axis=1)), np.flatnonzero(inside.any(axis=0))
    inside = inside[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]
    i0, j0 = i0 + cols[0], j0 + rows[0]
    lattice = lattice.reshape(ii.shape + (2,))[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1].reshape(-1, 2)
    positions = positions.reshape(ii.shape + (2,))[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1].reshape(-1, 2)

    inside = inside.ravel()
    index_of = np.full(inside.shape, OUTSIDE, dtype=np.int64)
    index_of[inside] = np.arange(int(inside.sum()))
    index_of = index_of.reshape(rows[-1] - rows[0] + 1, cols[-1] - cols[0] + 1)
    lattice, positions = lattice[inside], positions[inside]

    dirichlet = np.zeros(len(lattice), dtype=bool)
    for source in sources:
        dirichlet[np.argmin(np.sum((positions - np.asarray(source)) ** 2, axis=1))] = True

    if dirichlet.all():
        raise EmptyDomainError(f"no interior point for grid {spec} and sources {sources}")

    domain = DiscreteDomain(spec, int(i0), int(j0), index_of, lattice, positions, dirichlet)
    logger.debug("discretized %s into %s points (%s Dirichlet)", box, domain.size, int(dirichlet.sum()))
    return domain


@dataclass(frozen=True)
class StencilTable:
    """ Forward stencils V(x) in CSR layout over all points (Dirichlet points have empty stencils), and the reversed
        stencils V*(y) = {x : y is a vertex of V(x)}.

        For each forward entry k: `neighbors[k]` is a point index or OUTSIDE, `vectors[k]` the physical displacement
        from x, `offsets[k]` the lattice vector of the mesh. Reversed entries store the point x and the forward entry
        `slots[r]` where y appears in V(x), so that the vertices flanking y are at hand.
    """

    indptr: np.ndarray
    neighbors: np.ndarray
    vectors: np.ndarray
    offsets: np.ndarray
    norms: tuple
    rev_indptr: np.ndarray
    rev_points: np.ndarray
    rev_slots: np.ndarray

    @classmethod
    def from_lists(cls, stencils, norms):
        """ stencils[x] is a list of (neighbor, vector, lattice offset) triples in counter-clockwise order. """

        counts = np.array([len(s) for s in stencils], dtype=np.int64)
        indptr = np.zeros(len(stencils) + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])

        flat = [entry for s in stencils for entry in s]
        neighbors = np.array([e[0] for e in flat], dtype=np.int64)
        vectors = np.array([e[1] for e in flat], dtype=float).reshape(-1, 2)
        offsets = np.array([e[2] for e in flat], dtype=np.int64).reshape(-1, 2)

        owners = np.repeat(np.arange(len(stencils), dtype=np.int64), counts)
        slots = np.flatnonzero(neighbors != OUTSIDE)
        order = slots[np.argsort(neighbors[slots], kind="stable")]
        rev_counts = np.bincount(neighbors[slots], minlength=len(stencils))
        rev_indptr = np.zeros(len(stencils) + 1, dtype=np.int64)
        np.cumsum(rev_counts, out=rev_indptr[1:])

        return cls(indptr, neighbors, vectors, offsets, tuple(norms), rev_indptr, owners[order], order)

    @property
    def size(self):
        return len(self.indptr) - 1

    @property
    def total_size(self):
        """ N', the sum of the stencil cardinalities """
        return len(self.neighbors)

    def stencil(self, x):
        return self.neighbors[self.indptr[x] : self.indptr[x + 1]]

    def reversed(self, y):
        return self.rev_points[self.rev_indptr[y] : self.rev_indptr[y + 1]]


def assemble_stencils(domain, metric, spec=None, mesher=None, safety_cap=DEFAULT_SAFETY_CAP):
    """ Build V(z) = z + h R_theta T(F_z o R_theta) for every interior point z, and the reversed stencils.

        `mesher` maps a norm to the lattice mesh to use; by default the F-acute mesh T(F). Fixed-stencil solvers pass a
        function returning a constant mesh.
    """

    spec = domain.spec if spec is None else spec
    if mesher is None:

        def mesher(F):
            return cached_mesh(F, safety_cap)

    hrot = spec.h * spec.rotation
    stencils = [[] for _ in range(domain.size)]
    norms = [None] * domain.size
    for x in domain.interior.tolist():
        z = domain.positions[x]
        i, j = domain.lattice[x].tolist()
        try:
            F = metric(z)
            norms[x] = F
            # T(F o R_theta), where F o R_theta = F^(-theta)
            mesh = mesher(F if spec.theta == 0 else rotate_norm(F, -spec.theta))
        except Exception as e:  # pylint: disable=broad-except
            raise StencilAssemblyError(z, e) from e

        for w in mesh:
            vector = (hrot[0, 0] * w[0] + hrot[0, 1] * w[1], hrot[1, 0] * w[0] + hrot[1, 1] * w[1])
            stencils[x].append((domain.lookup(i + w[0], j + w[1]), vector, w))

    table = StencilTable.from_lists(stencils, norms)
    logger.debug("assembled stencils: N=%s N'=%s", domain.size, table.total_size)
    return table


def stencil_economy(table):
    """ (N, N', largest stencil) """
    counts = np.diff(table.indptr)
    return table.size, table.total_size, int(counts.max()) if len(counts) else 0


def randomized_orientation(rng):
    """ A random grid orientation theta in [0, 2 pi) and offset in [0, 1)^2. """
    return float(rng.uniform(0, 2 * np.pi)), (float(rng.uniform()), float(rng.uniform()))


def write_grid(path, domain, values):
    """ Write the header `grid v1 <nx> <ny> <h> <theta> <ox> <oy>` then the values row by row, `inf` for +infinity.

        The written (ox, oy) absorb the lattice origin of the rectangle, so that column c and row r sit at
        h R_theta ((ox, oy) + (c, r)).
    """

    spec = domain.spec
    arr = domain.to_array(values)
    ny, nx = arr.shape
    ox, oy = spec.offset[0] + domain.i0, spec.offset[1] + domain.j0
    with open(path, "wt") as outf:
        print(f"{GRID_MAGIC} {nx} {ny} {spec.h!r} {spec.theta!r} {ox!r} {oy!r}", file=outf)
        for row in arr:
            print(" ".join("inf" if np.isposinf(v) else repr(float(v)) for v in row), file=outf)


def read_grid(path):
    """ Returns (GridSpec-like header dict, values array of shape (ny, nx)). """

    with open(path, "rt") as f:
        fields = f.readline().split()
        if " ".join(fields[:2]) != GRID_MAGIC or len(fields) != 8:
            raise ValueError(f"{path} is not a grid v1 file")
        nx, ny = int(fields[2]), int(fields[3])
        h, theta, ox, oy = (float(x) for x in fields[4:])
        values = np.array([float(x) for x in f.read().split()], dtype=float)

    if values.size != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} values but found {values.size}")
    return {"nx": nx, "ny": ny, "h": h, "theta": theta, "offset": (ox, oy)}, values.reshape(ny, nx)


def write_pgm(path, domain, values):
    """ 8-bit grayscale image: finite values mapped linearly from [0, max] to [0, 254], +infinity to 255. """

    arr = domain.to_array(values)
    finite = np.isfinite(arr)
    top = arr[finite].max() if finite.any() else 0.0
    scale = 254.0 / top if top > 0 else 0.0
    img = np.full(arr.shape, 255, dtype=np.uint8)
    img[finite] = np.rint(np.clip(arr[finite], 0, None) * scale).astype(np.uint8)

    # image rows run top to bottom, grid rows bottom to top
    img = img[::-1]
    with open(path, "wb") as outf:
        outf.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        outf.write(img.tobytes())
