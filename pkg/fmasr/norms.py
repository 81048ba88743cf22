"""
Asymmetric norms of the form F(u) = sqrt(<u, M u>) - <omega, M u>, and Finsler metrics built from them.

An `OffsetNorm` is an anisotropic euclidean norm (the SPD matrix M) shifted by a linear form (the drift omega).
It covers isotropic, Riemannian and "current"-type asymmetric metrics, is differentiable away from the origin,
and its dual is again an `OffsetNorm`, which keeps the acuteness predicate exact and the Hopf-Lax edge solve
closed-form.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from fmasr.utils.exceptions import NotANormError, ZeroVectorError

ANISOTROPY_SAMPLES = 1024
ANISOTROPY_RTOL = 1e-10
ACUTE_TOL = 1e-12


@dataclass(frozen=True)
class SymMat2:
    """ The symmetric matrix [[a, b], [b, c]]. """

    a: float
    b: float
    c: float

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 1.0)

    @classmethod
    def diag(cls, x, y):
        return cls(float(x), 0.0, float(y))

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (2, 2) or not np.isclose(arr[0, 1], arr[1, 0], rtol=1e-12, atol=1e-14):
            raise ValueError(f"expected a symmetric 2x2 matrix but got {arr.tolist()}")
        return cls(float(arr[0, 0]), float(0.5 * (arr[0, 1] + arr[1, 0])), float(arr[1, 1]))

    @classmethod
    def from_eigen(cls, e1, lambda1, lambda2):
        """ Matrix with eigenvalue `lambda1` along the direction `e1`, and `lambda2` along its orthogonal. """
        x, y = e1
        r = math.hypot(x, y)
        x, y = x / r, y / r
        return cls(lambda1 * x * x + lambda2 * y * y, (lambda1 - lambda2) * x * y, lambda1 * y * y + lambda2 * x * x)

    @property
    def array(self):
        return np.array([[self.a, self.b], [self.b, self.c]])

    @property
    def det(self):
        return self.a * self.c - self.b * self.b

    def is_positive_definite(self):
        return self.a > 0 and self.det > 0

    def apply(self, u):
        return (self.a * u[0] + self.b * u[1], self.b * u[0] + self.c * u[1])

    def quad(self, u, v=None):
        """ <u, M v>, or <u, M u> when v is omitted """
        if v is None:
            v = u
        return self.a * u[0] * v[0] + self.b * (u[0] * v[1] + u[1] * v[0]) + self.c * u[1] * v[1]

    def inverse(self):
        det = self.det
        if det == 0:
            raise ZeroDivisionError(f"singular matrix {self}")
        return SymMat2(self.c / det, -self.b / det, self.a / det)

    def rotated(self, theta):
        """ R M R^T for the rotation R of angle theta """
        cs, sn = math.cos(theta), math.sin(theta)
        rot = np.array([[cs, -sn], [sn, cs]])
        return SymMat2.from_array(rot @ self.array @ rot.T)


@dataclass(frozen=True)
class OffsetNorm:
    """ F(u) = sqrt(<u, M u>) - <omega, M u>, an asymmetric norm when M is SPD and <omega, M omega> < 1. """

    M: SymMat2
    omega: Tuple[float, float] = (0.0, 0.0)
    # M omega, the linear part of F, cached for the hot paths (stencil construction, Hopf-Lax updates)
    drift: Tuple[float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        omega = (float(self.omega[0]), float(self.omega[1]))
        object.__setattr__(self, "omega", omega)
        if not self.M.is_positive_definite():
            raise NotANormError(float("nan"), msg=f"matrix {self.M} is not positive definite")

        delta = 1.0 - self.M.quad(omega)
        if not delta > 0:
            raise NotANormError(delta)
        object.__setattr__(self, "drift", self.M.apply(omega))

    @classmethod
    def euclidean(cls):
        return cls(SymMat2.identity())

    @classmethod
    def from_matrix(cls, M, omega=(0.0, 0.0)):
        return cls(SymMat2.from_array(M), tuple(omega))

    @property
    def delta(self):
        return 1.0 - self.M.quad(self.omega)

    def __call__(self, u):
        return norm_eval(self, u)


@dataclass(frozen=True)
class Box:
    """ The axis-aligned rectangle [xmin, xmax] x [ymin, ymax]. """

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate box {self}")

    @classmethod
    def square(cls, r):
        return cls(-r, r, -r, r)

    def contains(self, z, slack=0.0):
        return self.xmin - slack <= z[0] <= self.xmax + slack and self.ymin - slack <= z[1] <= self.ymax + slack

    @property
    def corners(self):
        return [(self.xmin, self.ymin), (self.xmax, self.ymin), (self.xmin, self.ymax), (self.xmax, self.ymax)]

    @property
    def center(self):
        return (0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))


@dataclass(frozen=True)
class MetricField:
    """ A Finsler metric: a continuous map from positions of `domain` to `OffsetNorm`s. """

    eval: Callable[[Tuple[float, float]], OffsetNorm]
    domain: Box
    kappa_bound: float

    def __call__(self, z):
        return self.eval(z)


def norm_eval(F, u):
    return math.sqrt(max(F.M.quad(u), 0.0)) - (F.drift[0] * u[0] + F.drift[1] * u[1])


def norm_grad(F, u):
    if u[0] == 0 and u[1] == 0:
        raise ZeroVectorError()

    mu = F.M.apply(u)
    r = math.sqrt(F.M.quad(u))
    return np.array([mu[0] / r - F.drift[0], mu[1] / r - F.drift[1]])


def dual_norm(F):
    """ The dual norm F*(u) = max_v <u,v> / F(v), which is again an OffsetNorm with closed-form parameters. """

    delta = F.delta
    if not delta > 0:
        raise NotANormError(delta)

    wx, wy = F.omega
    inv = F.M.inverse()
    d2 = delta * delta
    mstar = SymMat2((wx * wx + delta * inv.a) / d2, (wx * wy + delta * inv.b) / d2, (wy * wy + delta * inv.c) / d2)
    mx, my = mstar.inverse().apply(F.omega)
    return OffsetNorm(mstar, (-mx / delta, -my / delta))


def is_acute(F, u, v):
    """ Whether u and v form an F-acute angle: <u, grad F(v)> >= 0 and <v, grad F(u)> >= 0.

        Values within ACUTE_TOL of zero count as acute, matching the non-strict inequality of the definition.
    """

    if (u[0] == 0 and u[1] == 0) or (v[0] == 0 and v[1] == 0):
        raise ZeroVectorError("acuteness undefined for the zero vector")
    return _acute(F.M.a, F.M.b, F.M.c, F.drift[0], F.drift[1], u[0], u[1], v[0], v[1])


def _acute(a, b, c, mwx, mwy, ux, uy, vx, vy):
    # shared with the stencil construction, which calls it on plain numbers
    mux, muy = a * ux + b * uy, b * ux + c * uy
    umv = mux * vx + muy * vy
    nu = math.sqrt(mux * ux + muy * uy)
    nv = math.sqrt((a * vx + b * vy) * vx + (b * vx + c * vy) * vy)
    if umv / nv - (mwx * ux + mwy * uy) < -ACUTE_TOL:
        return False
    return umv / nu - (mwx * vx + mwy * vy) >= -ACUTE_TOL


def _unit_values(F, angles):
    ux, uy = np.cos(angles), np.sin(angles)
    M = F.M
    return np.sqrt(M.a * ux * ux + 2 * M.b * ux * uy + M.c * uy * uy) - (F.drift[0] * ux + F.drift[1] * uy)


def _refine_extremum(F, theta, step, sign):
    res = minimize_scalar(
        lambda t: -sign * norm_eval(F, (math.cos(t), math.sin(t))),
        bounds=(theta - step, theta + step),
        method="bounded",
        options={"xatol": 1e-13},
    )
    # the sampled value is kept when refinement does not improve on it
    return max(-res.fun, sign * norm_eval(F, (math.cos(theta), math.sin(theta)))) * sign


def anisotropy_ratio(F, samples=ANISOTROPY_SAMPLES):
    """ kappa(F) = max_{|u|=|v|=1} F(u) / F(v), by sampling the unit circle then refining the max and the min. """

    angles = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    values = _unit_values(F, angles)
    step = 2 * np.pi / samples

    fmax = _refine_extremum(F, float(angles[np.argmax(values)]), step, 1.0)
    fmin = _refine_extremum(F, float(angles[np.argmin(values)]), step, -1.0)
    return max(fmax / fmin, 1.0)


def rotate_norm(F, theta):
    """ The parameters of F^theta(u) = F(R_theta^T u). """

    cs, sn = math.cos(theta), math.sin(theta)
    wx, wy = F.omega
    return OffsetNorm(F.M.rotated(theta), (cs * wx - sn * wy, sn * wx + cs * wy))


def metric_anisotropy(metric, samples=256, rng=None):
    """ Largest anisotropy ratio found on random points of the metric's domain (plus its corners and center). """

    rng = np.random.default_rng(0) if rng is None else rng
    box = metric.domain
    points = list(box.corners) + [box.center]
    points += list(zip(rng.uniform(box.xmin, box.xmax, samples), rng.uniform(box.ymin, box.ymax, samples)))
    return max(anisotropy_ratio(metric(z), samples=256) for z in points)
