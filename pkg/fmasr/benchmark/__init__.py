import math

import numpy as np

from fmasr.grid import GridSpec, discretize
from fmasr.norms import Box, MetricField, OffsetNorm, SymMat2, dual_norm
from fmasr.registry import ModuleBase, RegisterableModule


class Benchmark(ModuleBase, metaclass=RegisterableModule):
    """the module base class"""

    module_type = "benchmark"
    source = (0.0, 0.0)
    has_exact = False

    @property
    def bbox(self):
        return Box.square(0.5)

    @property
    def kappa_bound(self):
        raise NotImplementedError

    def norm_at(self, z):
        raise NotImplementedError

    @property
    def metric(self):
        if not hasattr(self, "_metric"):
            self._metric = MetricField(self.norm_at, self.bbox, self.kappa_bound)
        return self._metric

    def valid_mask(self, positions):
        """ Grid points where errors are measured """
        return np.ones(len(positions), dtype=bool)

    def exact(self, positions):
        raise NotImplementedError(f"benchmark {self.name} has no analytic solution")

    def grid_spec(self, n, theta=0.0, offset=(0.0, 0.0)):
        if n < 3 or n % 2 == 0:
            raise ValueError(f"n must be odd and at least 3 but got n={n}")
        return GridSpec.square(self.bbox, n, theta, offset)

    def discretize(self, n, theta=0.0, offset=(0.0, 0.0)):
        return discretize(self.grid_spec(n, theta, offset), [self.source])


def make_test_case(name, **overrides):
    return Benchmark.plugins[name].create(**overrides)


class Current(Benchmark):
    """ Boat at unit speed in an ocean current: the dual metric is F*_z(u) = |u| + <omega(z), u> with
        omega(x,y) = -gamma sin(4 pi x) sin(4 pi y) e, for the unit direction e = (drift_x, drift_y).
    """

    name = "current"

    @staticmethod
    def config():
        gamma = 0.9  # largest current speed
        drift_x = 1.0
        drift_y = 0.0

    @property
    def kappa_bound(self):
        gamma = self.cfg["gamma"]
        return (1 + gamma) / (1 - gamma)

    def norm_at(self, z):
        ex, ey = self.cfg["drift_x"], self.cfg["drift_y"]
        r = math.hypot(ex, ey)
        s = -self.cfg["gamma"] * math.sin(4 * math.pi * z[0]) * math.sin(4 * math.pi * z[1]) / r
        # |u| + <omega, u> is the OffsetNorm (I, -omega)
        return dual_norm(OffsetNorm(SymMat2.identity(), (-s * ex, -s * ey)))


def exact_spiral(z):
    """ arcsinh(|z|), the distance to the origin for the spiral metric """
    return math.asinh(math.hypot(z[0], z[1]))


class Spiral(Benchmark):
    """ F_z(u) = |u| - g(|z|) <z_perp / |z|, u> with g(r) = r / sqrt(1 + r^2), whose distance to the origin is
        arcsinh(|z|). Minimal paths spiral, so errors are only measured on the disk of radius r0.
    """

    name = "spiral"
    has_exact = True

    @staticmethod
    def config():
        r0 = 10.0  # half side of the square domain and radius of the disk where errors are measured

    @property
    def bbox(self):
        return Box.square(self.cfg["r0"])

    @property
    def kappa_bound(self):
        # kappa of F_z is (r + sqrt(1 + r^2))^2, largest at the corners
        r = self.cfg["r0"] * math.sqrt(2)
        return (r + math.sqrt(1 + r * r)) ** 2

    def norm_at(self, z):
        x, y = z
        scale = 1.0 / math.sqrt(1.0 + x * x + y * y)
        return OffsetNorm(SymMat2.identity(), (-y * scale, x * scale))

    def valid_mask(self, positions):
        positions = np.asarray(positions, dtype=float)
        r0 = self.cfg["r0"]
        return np.hypot(positions[:, 0], positions[:, 1]) <= r0 * (1 + 1e-12)

    def exact(self, positions):
        positions = np.asarray(positions, dtype=float)
        return np.arcsinh(np.hypot(positions[:, 0], positions[:, 1]))


class Seismic(Benchmark):
    """ Riemannian metric with eigenvalues fast^-2 along (1, (pi/2) cos(4 pi x)) and slow^-2 orthogonally. """

    name = "seismic"

    @staticmethod
    def config():
        slow = 0.2  # speed across the layers
        fast = 0.8  # speed along the layers

    @property
    def kappa_bound(self):
        return self.cfg["fast"] / self.cfg["slow"]

    def norm_at(self, z):
        e1 = (1.0, 0.5 * math.pi * math.cos(4 * math.pi * z[0]))
        return OffsetNorm(SymMat2.from_eigen(e1, self.cfg["fast"] ** -2, self.cfg["slow"] ** -2))


class Segmentation(Benchmark):
    """ Euclidean metric except on a thin band around an Archimedean spiral r = a phi, where moving along the curve is
        `kappa` times cheaper: eigenvalue 1/kappa^2 along the tangent, 1 across.

        The anisotropy is full within `half_width` of the curve and fades out geometrically by 2 * half_width, which
        keeps the metric continuous.
    """

    name = "segmentation"

    @staticmethod
    def config():
        kappa = 100.0  # anisotropy ratio on the band
        turns = 3  # number of turns of the spiral
        r_max = 0.45  # radius at the outer end of the spiral
        half_width = 0.005  # half width of the band

    @property
    def kappa_bound(self):
        return self.cfg["kappa"]

    @property
    def pitch(self):
        """ a, such that the spiral r = a phi reaches r_max after `turns` turns """
        return self.cfg["r_max"] / (2 * math.pi * self.cfg["turns"])

    def nearest_turn(self, z):
        """ (radial distance to the curve, curve parameter phi) over the turns crossing the ray through z """

        a = self.pitch
        r = math.hypot(z[0], z[1])
        theta = math.atan2(z[1], z[0]) % (2 * math.pi)
        phi_max = 2 * math.pi * self.cfg["turns"]

        best = (math.inf, theta)
        phi = theta
        while phi <= phi_max:
            best = min(best, (abs(r - a * phi), phi))
            phi += 2 * math.pi
        return best

    def norm_at(self, z):
        dist, phi = self.nearest_turn(z)
        weight = min(max(2.0 - dist / self.cfg["half_width"], 0.0), 1.0)
        if weight == 0.0:
            return OffsetNorm.euclidean()

        tangent = (math.cos(phi) - phi * math.sin(phi), math.sin(phi) + phi * math.cos(phi))
        return OffsetNorm(SymMat2.from_eigen(tangent, self.cfg["kappa"] ** (-2 * weight), 1.0))
