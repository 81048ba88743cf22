import math

import numpy as np
import pytest

from fmasr.norms import OffsetNorm, SymMat2, anisotropy_ratio, is_acute
from fmasr.stencil import (
    ROOTS,
    ElementaryTriangle,
    build_mesh,
    children,
    det,
    dot,
    isotropic_mesh,
    mesh_cardinality_stats,
    mesh_is_acute,
    parent,
    refine_mesh,
)
from fmasr.tests.common_fixtures import random_norm, worst_case_norm
from fmasr.utils.exceptions import ASCFinitenessError


def test_children_and_parent():
    T = ElementaryTriangle((1, 0), (0, 1))
    assert children(T) == (ElementaryTriangle((1, 0), (1, 1)), ElementaryTriangle((1, 1), (0, 1)))
    assert parent(T) is None
    assert parent(ElementaryTriangle((1, 0), (1, 1))) == T
    assert parent(ElementaryTriangle((1, 1), (0, 1))) == T

    with pytest.raises(ValueError):
        ElementaryTriangle((1, 0), (2, 3))
    with pytest.raises(ValueError):
        ElementaryTriangle((1, 0), (-1, 1))


def test_random_descents_invert_parent():
    rng = np.random.default_rng(0)
    for root in ROOTS:
        for _ in range(20):
            T = root
            for _ in range(12):
                child = children(T)[rng.integers(2)]
                assert abs(det(child.u, child.v)) == 1 and child.s >= 0
                assert parent(child) == T
                T = child


def test_euclidean_mesh():
    mesh = build_mesh(OffsetNorm.euclidean())
    assert mesh.boundary == ((1, 0), (0, 1), (-1, 0), (0, -1))
    assert mesh.cardinality == 4


def test_worst_case_mesh():
    # at integer tau one acuteness inequality holds with equality, so the refinement stops a level early
    mesh = build_mesh(worst_case_norm(2))
    assert mesh.boundary == ((1, 0), (0, 1), (-1, 1), (-2, 1), (-1, 0), (0, -1), (1, -1), (2, -1))
    assert mesh.cardinality == 8

    assert build_mesh(worst_case_norm(2.5)).cardinality >= 10


def test_drifted_mesh_vertex_bound():
    F = OffsetNorm(SymMat2.identity(), (0.9, 0))
    mesh = build_mesh(F)
    assert mesh_is_acute(F, mesh)
    assert mesh.max_vertex_norm() <= 38


def test_mesh_invariants_on_random_norms():
    rng = np.random.default_rng(42)
    for _ in range(200):
        F = random_norm(rng)
        kappa = anisotropy_ratio(F)
        assert kappa <= 50

        mesh = build_mesh(F)
        assert mesh.boundary[0] == (1, 0)
        for u, v in mesh.edges():
            assert det(u, v) == 1
            assert dot(u, v) >= 0
            assert is_acute(F, u, v)
        assert mesh.winding() == pytest.approx(2 * math.pi)
        assert mesh.max_vertex_norm() <= 2 * kappa + 1e-9


def test_refinement_matches_two_list_construction():
    rng = np.random.default_rng(9)
    for _ in range(50):
        F = random_norm(rng)
        mesh, refined = refine_mesh(lambda T: is_acute(F, T.u, T.v))
        assert mesh == build_mesh(F)
        assert mesh.cardinality == 4 + len(refined)


def test_refined_triangles_contain_the_cheapest_direction():
    # for omega = 0, each refined triangle holds an eigenvector of the smallest eigenvalue of M strictly inside its cone
    rng = np.random.default_rng(13)
    for _ in range(100):
        angle = rng.uniform(0, np.pi)
        e = (math.cos(angle), math.sin(angle))
        F = OffsetNorm(SymMat2.from_eigen(e, 1.0, rng.uniform(2, 400)))
        _, refined = refine_mesh(lambda T: is_acute(F, T.u, T.v))
        for T in refined:
            assert any(det(T.u, w) > 0 and det(w, T.v) > 0 for w in (e, (-e[0], -e[1])))


def test_worst_case_family():
    for k in range(2, 51):
        F = worst_case_norm(k)
        assert build_mesh(F).cardinality >= 4 + 2 * k
        assert abs(anisotropy_ratio(F) - 2 * k) <= 1

        F = worst_case_norm(k + 0.5)
        assert build_mesh(F).cardinality >= 6 + 2 * k
        assert abs(anisotropy_ratio(F) - (2 * k + 1)) <= 1


def test_riemannian_cardinality_bound():
    rng = np.random.default_rng(1)
    for kappa in range(2, 201):
        angle = rng.uniform(0, np.pi)
        F = OffsetNorm(SymMat2.from_eigen((math.cos(angle), math.sin(angle)), 1.0, float(kappa) ** 2))
        assert build_mesh(F).cardinality <= 6 + 2 * kappa


def test_safety_cap():
    with pytest.raises(ASCFinitenessError):
        build_mesh(worst_case_norm(50), safety_cap=8)
    with pytest.raises(ValueError):
        build_mesh(OffsetNorm.euclidean(), safety_cap=4)


def test_cardinality_stats():
    stats = mesh_cardinality_stats(OffsetNorm.euclidean(), 16)
    assert len(stats) == 16
    assert all(card == 4 for _, card in stats)
    assert stats[1][0] == pytest.approx(2 * math.pi / 16)

    stats = mesh_cardinality_stats(OffsetNorm(SymMat2.diag(0.1, 10)), 256)
    assert max(card for _, card in stats) <= 26

    with pytest.raises(ValueError):
        mesh_cardinality_stats(OffsetNorm.euclidean(), 0)


def test_average_cardinality_grows_slowly():
    def cardinalities(kappa):
        return [card for _, card in mesh_cardinality_stats(OffsetNorm(SymMat2.diag(1 / kappa, kappa)), 256)]

    small, large = cardinalities(10), cardinalities(1000)
    assert np.mean(large) / np.mean(small) <= 3 * ((1 + math.log(1000)) / (1 + math.log(10))) ** 2
    assert max(large) > max(small)


@pytest.mark.slow
def test_worst_orientations_need_a_dense_sweep():
    stats = mesh_cardinality_stats(OffsetNorm(SymMat2.diag(1e-3, 1e3)), 4096)
    assert max(card for _, card in stats) > 200


def test_isotropic_mesh():
    assert isotropic_mesh(1).cardinality == 8
    growth = isotropic_mesh(64).cardinality / isotropic_mesh(8).cardinality
    assert growth <= 8 * (1 + math.log(64)) / (1 + math.log(8)) * 1.5

    mesh = isotropic_mesh(30)
    rng = np.random.default_rng(2)
    for _ in range(20):
        F = random_norm(rng)
        assert anisotropy_ratio(F) <= 30
        assert mesh_is_acute(F, mesh)

    with pytest.raises(ValueError):
        isotropic_mesh(0.5)
