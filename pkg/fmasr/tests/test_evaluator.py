import csv

import numpy as np
import pytest

from fmasr.benchmark import make_test_case
from fmasr.evaluator import (
    CSV_FIELDS,
    ErrorReport,
    average_stencil_size,
    compute_errors,
    parse_truth,
    reference_field,
    reference_solution,
    run_benchmark,
    write_csv,
)
from fmasr.solver import DistanceField, FastMarchingASR
from fmasr.tests.common_fixtures import tmpdir_as_cache  # pylint: disable=unused-import
from fmasr.utils.exceptions import EmptyDomainError


def spiral_field(n=21, perturb=None):
    benchmark = make_test_case("spiral")
    domain = benchmark.discretize(n)
    values = benchmark.exact(domain.positions)
    if perturb is not None:
        values[perturb] += 0.5
    return benchmark, DistanceField(domain, values, np.ones(domain.size, dtype=bool), np.argsort(values))


def test_exact_values_have_no_error():
    benchmark, field = spiral_field()
    report = compute_errors(field, benchmark.exact, benchmark, cpu_seconds=1.5)
    assert isinstance(report, ErrorReport)
    assert report.n == 21
    assert report.cpu_seconds == 1.5
    assert report.linf == pytest.approx(0, abs=1e-15)
    assert report.l1_avg == pytest.approx(0, abs=1e-15)

    # the same with truth given per grid point
    assert compute_errors(field, field.values.copy(), benchmark).linf == 0


def test_errors_of_a_single_point():
    benchmark, field = spiral_field()
    domain = field.domain
    x = domain.lookup(3, 2)
    _, perturbed = spiral_field(perturb=x)

    report = compute_errors(perturbed, benchmark.exact, benchmark)
    valid = np.sum(benchmark.valid_mask(domain.positions[domain.interior]))
    assert report.point_count == valid
    assert report.linf == pytest.approx(0.5)
    assert report.l1_avg == pytest.approx(0.5 / valid)


def test_unreachable_points_are_capped():
    benchmark, field = spiral_field()
    field.values[field.domain.lookup(1, 0)] = np.inf
    report = compute_errors(field, benchmark.exact, benchmark, inf_cap=7.0)
    assert report.unreachable == 1
    assert report.linf == 7.0


def test_empty_valid_region():
    benchmark = make_test_case("spiral", r0=1.0)
    domain = benchmark.discretize(3)
    field = DistanceField(domain, np.zeros(domain.size), np.ones(domain.size, dtype=bool), np.arange(domain.size))

    # only the corners and edge midpoints are interior, and the corners lie outside the unit disk
    assert compute_errors(field, benchmark.exact, benchmark).point_count == 4

    benchmark.valid_mask = lambda positions: np.zeros(len(positions), dtype=bool)
    with pytest.raises(EmptyDomainError):
        compute_errors(field, benchmark.exact, benchmark)


def test_reference_field_interpolates_nodes():
    benchmark = make_test_case("seismic")
    field = FastMarchingASR.create().solve(benchmark.discretize(21), benchmark.metric).field
    ref = reference_field(field)
    assert np.allclose(ref(field.domain.positions), field.values, rtol=1e-12, atol=1e-14)

    # bilinear in between nodes
    h = field.domain.spec.h
    a, b = field.domain.lookup(2, 3), field.domain.lookup(3, 3)
    midpoint = field.domain.positions[a] + [h / 2, 0]
    assert ref([midpoint])[0] == pytest.approx(0.5 * (field.values[a] + field.values[b]))

    rotated = FastMarchingASR.create().solve(benchmark.discretize(21, theta=0.3), benchmark.metric).field
    with pytest.raises(ValueError):
        reference_field(rotated)


def test_reference_solution_is_cached(tmpdir_as_cache):
    benchmark = make_test_case("seismic")
    first = reference_solution(benchmark, 21)
    cached = list(benchmark.get_cache_path().glob("reference_n-21_solver-fm-asr.npy"))
    assert len(cached) == 1

    second = reference_solution(benchmark, 21)
    positions = np.random.default_rng(0).uniform(-0.5, 0.5, size=(50, 2))
    assert np.array_equal(first(positions), second(positions))

    with pytest.raises(ValueError):
        reference_solution(benchmark, 20)


def test_parse_truth(tmpdir_as_cache):
    spiral, seismic = make_test_case("spiral"), make_test_case("seismic")
    assert parse_truth("analytic", spiral) == spiral.exact

    with pytest.raises(ValueError):
        parse_truth("analytic", seismic)
    with pytest.raises(ValueError):
        parse_truth("reference:21", seismic)

    ref = parse_truth("reference:11:fm-8", seismic)
    assert ref([[0.0, 0.0]])[0] == 0


def test_run_benchmark(tmpdir_as_cache, tmpdir):
    benchmark = make_test_case("seismic")
    rows = run_benchmark(benchmark, ["fm-asr", "nosuchsolver"], [11, 21], truth="reference:41:fm-asr")
    assert [(row["solver"], row["n"]) for row in rows] == [
        ("fm-asr", 11),
        ("fm-asr", 21),
        ("nosuchsolver", 11),
        ("nosuchsolver", 21),
    ]
    assert rows[0]["linf"] >= 0 and rows[0]["points"] == 120
    assert "error" not in rows[0]
    assert rows[2]["error"].startswith("KeyError")

    path = tmpdir / "bench.csv"
    write_csv(rows, path)
    with open(path, "rt") as f:
        lines = list(csv.DictReader(f))
    assert list(lines[0].keys()) == CSV_FIELDS
    assert len(lines) == 4
    assert lines[0]["test"] == "seismic" and lines[0]["error"] == ""
    assert lines[3]["linf"] == ""


def test_average_stencil_size():
    benchmark = make_test_case("seismic")
    ratio = average_stencil_size(benchmark, 11, 3)
    # the Dirichlet point has an empty stencil
    assert 3.9 <= ratio <= 6 + 2 * benchmark.kappa_bound
