import pytest
from pathlib import Path

import numpy as np

from fmasr import registry
from fmasr.grid import GridSpec, assemble_stencils, discretize
from fmasr.norms import Box, MetricField, OffsetNorm, SymMat2


@pytest.fixture(scope="function")
def tmpdir_as_cache(tmpdir, monkeypatch):
    monkeypatch.setattr(registry, "CACHE_BASE_PATH", Path(tmpdir))


def constant_metric(F, box):
    return MetricField(lambda z: F, box, 1.0)


def random_norm(rng, max_ratio=10.0, max_drift=0.5):
    """ Random orientation, eigenvalue ratio and drift.

        The drift has M-norm s <= max_drift, so that kappa(F) <= max_ratio * (1 + s) / (1 - s).
    """

    angle = rng.uniform(0, np.pi)
    ratio = rng.uniform(1.0, max_ratio)
    scale = rng.uniform(0.5, 2.0)
    M = SymMat2.from_eigen((np.cos(angle), np.sin(angle)), scale, scale * ratio ** 2)

    strength = rng.uniform(0, max_drift)
    phi = rng.uniform(0, 2 * np.pi)
    u = (np.cos(phi), np.sin(phi))
    r = np.sqrt(M.quad(u))
    return OffsetNorm(M, (strength * u[0] / r, strength * u[1] / r))


def worst_case_norm(tau):
    return OffsetNorm(SymMat2(1.0, float(tau), 2.0 * tau * tau))


@pytest.fixture(scope="function")
def unit_grid():
    """ The 3x3 grid of step 1 around a source at the origin, with the euclidean metric """

    spec = GridSpec(1.0, Box.square(1.0))
    domain = discretize(spec, [(0.0, 0.0)])
    table = assemble_stencils(domain, constant_metric(OffsetNorm.euclidean(), spec.bbox))
    return domain, table


@pytest.fixture(scope="function")
def euclidean_grid():
    box = Box.square(0.5)
    domain = discretize(GridSpec.square(box, 21), [(0.0, 0.0)])
    return domain, constant_metric(OffsetNorm.euclidean(), box)
