from fmasr import evaluator
from fmasr.norms import metric_anisotropy
from fmasr.task import Task, results_path
from fmasr.utils.common import parse_list, parse_odd_sizes
from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name


def describe(config, modules):
    return Task.describe_pipeline(config, modules, results_path(BenchTask.name, config, modules))


def run(config, modules):
    benchmark = modules["benchmark"]
    solvers = parse_list(config["solvers"])
    n_list = parse_odd_sizes(config["n_list"])

    rows = evaluator.run_benchmark(benchmark, solvers, n_list, str(config["truth"]), config["inf_cap"])
    evaluator.write_csv(rows, config["csv"])

    failed = [row for row in rows if row.get("error")]
    logger.info("wrote %s rows (%s failed) to %s", len(rows), len(failed), config["csv"])
    return rows


def economy(config, modules):
    """ Anisotropy of the benchmark metric and the average stencil size N'/N over randomly oriented grids """

    benchmark = modules["benchmark"]
    kappa = metric_anisotropy(benchmark.metric, samples=config["points"])
    ratio = evaluator.average_stencil_size(benchmark, config["economy_n"], config["orientations"])
    logger.info("%s: kappa=%.6g (bound %.6g), average stencil size %.3f", benchmark.name, kappa, benchmark.kappa_bound, ratio)
    return {"kappa": kappa, "kappa_bound": benchmark.kappa_bound, "average_stencil_size": ratio}


class BenchTask(Task):
    def bench_config():
        solvers = "fm-asr"  # comma-separated solver names
        n_list = "61,121,241"  # comma-separated odd grid sizes
        truth = "analytic"  # analytic, or reference:<ref_n>:<solver>
        csv = "bench.csv"
        inf_cap = 1e3  # error assigned to unreachable points
        economy_n = 121  # grid size for the economy command
        orientations = 16  # random grid orientations for the economy command
        points = 256  # random points where the economy command samples the anisotropy

    name = "bench"
    module_order = ["benchmark"]
    module_defaults = {"benchmark": "spiral"}
    config_functions = [bench_config]
    commands = {"run": run, "economy": economy, "describe": describe}
    default_command = "run"
