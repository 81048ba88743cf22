import csv
import os
from typing import NamedTuple

import fasteners
import numpy as np
from scipy.interpolate import RegularGridInterpolator
from tqdm import tqdm

from fmasr.grid import assemble_stencils, discretize, randomized_orientation, stencil_economy
from fmasr.solver import DistanceField, Solver
from fmasr.utils.exceptions import EmptyDomainError
from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name

CSV_FIELDS = ["test", "solver", "n", "points", "prep_seconds", "solve_seconds", "linf", "l1_avg", "unreachable", "error"]
DEFAULT_INF_CAP = 1e3


class ErrorReport(NamedTuple):
    n: int
    point_count: int
    cpu_seconds: float
    linf: float
    l1_avg: float
    unreachable: int = 0


def grid_size(domain):
    """ n, the number of points along the x side of the box of a theta=0 grid """
    bbox = domain.spec.bbox
    return int(round((bbox.xmax - bbox.xmin) / domain.spec.h)) + 1


def compute_errors(field, truth, benchmark, cpu_seconds=0.0, inf_cap=DEFAULT_INF_CAP):
    """ L-infinity and averaged L1 errors over the interior points of the benchmark's valid region.

        `truth` is either an array of values per grid point or a function of an array of positions. Points left at
        +inf by the solver count with error `inf_cap` and are reported in `unreachable`.
    """

    domain = field.domain
    points = domain.interior[benchmark.valid_mask(domain.positions[domain.interior])]
    if len(points) == 0:
        raise EmptyDomainError(f"no grid point in the valid region of benchmark {benchmark.name}")

    if callable(truth):
        expected = np.asarray(truth(domain.positions[points]), dtype=float)
    else:
        expected = np.asarray(truth, dtype=float)[points]

    values = field.values[points]
    errors = np.abs(values - expected)
    missing = ~np.isfinite(errors)
    if missing.any():
        logger.warning("%s of %s points in the valid region have no finite value", int(missing.sum()), len(points))
        errors[missing] = inf_cap

    return ErrorReport(grid_size(domain), len(points), cpu_seconds, float(errors.max()), float(errors.mean()), int(missing.sum()))


class ReferenceField:
    """ Bilinear interpolation of a distance field computed on a theta=0 grid """

    def __init__(self, field):
        domain = field.domain
        if domain.spec.theta != 0:
            raise ValueError("reference fields require an unrotated grid")

        arr = domain.to_array(field.values)
        h, (ox, oy) = domain.spec.h, domain.spec.offset
        xs = h * (ox + domain.i0 + np.arange(arr.shape[1]))
        ys = h * (oy + domain.j0 + np.arange(arr.shape[0]))
        self.field = field
        self.interpolator = RegularGridInterpolator((ys, xs), arr, bounds_error=False, fill_value=None)

    def __call__(self, positions):
        positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        return self.interpolator(positions[:, ::-1])


def reference_field(field):
    return ReferenceField(field)


def _reference_cache_file(benchmark, ref_n, solver_name):
    return benchmark.get_cache_path() / f"reference_n-{ref_n}_solver-{solver_name}.npy"


def reference_solution(benchmark, ref_n, solver_name="fm-asr"):
    """ Solve `benchmark` at resolution ref_n with `solver_name` and interpolate the result. Values are cached on disk,
        keyed by the benchmark config, the resolution and the solver.
    """

    if ref_n < 3 or ref_n % 2 == 0:
        raise ValueError(f"reference resolution must be odd and at least 3 but got {ref_n}")

    domain = benchmark.discretize(ref_n)
    cache_file = _reference_cache_file(benchmark, ref_n, solver_name)
    os.makedirs(cache_file.parent, exist_ok=True)

    with fasteners.InterProcessLock(str(cache_file) + ".lock"):
        if cache_file.exists():
            logger.info("loading cached reference solution %s", cache_file)
            values = np.load(cache_file)
            if values.shape != (domain.size,):
                raise IOError(f"cached reference {cache_file} does not match the grid ({values.shape} vs {domain.size})")
            field = DistanceField(domain, values, np.ones(domain.size, dtype=bool), np.argsort(values, kind="stable"))
        else:
            logger.info("computing reference solution: %s n=%s solver=%s", benchmark.name, ref_n, solver_name)
            field = Solver.plugins[solver_name].create().solve(domain, benchmark.metric).field
            tmp_file = cache_file.with_suffix(".tmp.npy")
            np.save(tmp_file, field.values)
            os.replace(tmp_file, cache_file)

    return ReferenceField(field)


def parse_truth(truth, benchmark):
    """ `analytic` or `reference:<ref_n>:<solver>` to a function of positions """

    if truth == "analytic":
        if not benchmark.has_exact:
            raise ValueError(f"benchmark {benchmark.name} has no analytic solution; use truth=reference:<n>:<solver>")
        return benchmark.exact

    fields = str(truth).split(":")
    if len(fields) != 3 or fields[0] != "reference":
        raise ValueError(f"truth must be 'analytic' or 'reference:<ref_n>:<solver>' but got {truth!r}")
    return reference_solution(benchmark, int(fields[1]), fields[2])


def run_benchmark(benchmark, solver_names, n_list, truth="analytic", inf_cap=DEFAULT_INF_CAP, bc="source"):
    """ One CSV row per (solver, n); a failing run is recorded as a row with the `error` column set. """

    truth_fn = parse_truth(truth, benchmark)
    rows = []
    for solver_name, n in tqdm([(s, n) for s in solver_names for n in n_list], desc=f"benchmark {benchmark.name}"):
        row = {"test": benchmark.name, "solver": solver_name, "n": n}
        try:
            solver = Solver.plugins[solver_name].create()
            domain = benchmark.discretize(n)
            result = solver.solve(domain, benchmark.metric, bc)
            report = compute_errors(result.field, truth_fn, benchmark, result.total_seconds, inf_cap)
        except Exception as e:  # pylint: disable=broad-except
            logger.error("%s on %s at n=%s failed: %s", solver_name, benchmark.name, n, e)
            row["error"] = f"{type(e).__name__}: {e}"
        else:
            row.update(
                points=report.point_count,
                prep_seconds=result.prep_seconds,
                solve_seconds=result.solve_seconds,
                linf=report.linf,
                l1_avg=report.l1_avg,
                unreachable=report.unreachable,
            )
            logger.info("%s n=%s: linf=%.3e l1_avg=%.3e", solver_name, n, report.linf, report.l1_avg)
        rows.append(row)

    return rows


def write_csv(rows, path):
    with open(path, "wt", newline="") as outf:
        writer = csv.DictWriter(outf, fieldnames=CSV_FIELDS, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def average_stencil_size(benchmark, n, orientations, rng=None):
    """ Mean of N'/N over grids of random orientation and offset covering the benchmark domain """

    rng = np.random.default_rng(0) if rng is None else rng
    ratios = []
    for _ in tqdm(range(orientations), desc="orientations"):
        theta, offset = randomized_orientation(rng)
        spec = benchmark.grid_spec(n, theta, offset)
        domain = discretize(spec, [benchmark.source])
        N, total, _ = stencil_economy(assemble_stencils(domain, benchmark.metric, spec))
        ratios.append(total / N)
    return float(np.mean(ratios))
