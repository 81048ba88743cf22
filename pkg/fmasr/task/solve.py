from fmasr.grid import write_grid, write_pgm
from fmasr.solver.hopflax import residual
from fmasr.task import Task, results_path
from fmasr.utils.common import parse_pair
from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name


def describe(config, modules):
    return Task.describe_pipeline(config, modules, results_path(SolveTask.name, config, modules))


def run(config, modules):
    benchmark, solver = modules["benchmark"], modules["solver"]
    n = config["n"]
    domain = benchmark.discretize(n, config["theta"], parse_pair(config["offset"]))
    result = solver.solve(domain, benchmark.metric, config["bc"])

    field = result.field
    logger.info(
        "%s on %s at n=%s: %s points, %s reachable, max value %.6g, residual %.3e, %.3fs",
        solver.name,
        benchmark.name,
        n,
        domain.size,
        int(field.reachable.sum()),
        field.values[field.reachable].max(),
        residual(field, result.table),
        result.total_seconds,
    )
    if not field.monotone:
        logger.warning("%s accepted values out of order; its stencils are not acute for this metric", solver.name)

    if config["out"]:
        write_grid(config["out"], domain, field.values)
        logger.info("wrote distance field to %s", config["out"])
    if config["pgm"]:
        write_pgm(config["pgm"], domain, field.values)
        logger.info("wrote image to %s", config["pgm"])

    return result


class SolveTask(Task):
    def solve_config():
        n = 121  # grid points per side, odd
        theta = 0.0  # grid orientation
        offset = "0,0"  # grid offset, in lattice units
        bc = "source"  # source: points outside the box are unreachable; escape: they have value 0
        out = None  # distance field file
        pgm = None  # grayscale image of the distance field

    name = "solve"
    module_order = ["benchmark", "solver"]
    module_defaults = {"benchmark": "spiral", "solver": "fm-asr"}
    config_functions = [solve_config]
    commands = {"run": run, "describe": describe}
    default_command = "run"
