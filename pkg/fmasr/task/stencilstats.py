import csv

import numpy as np

from fmasr.norms import OffsetNorm, anisotropy_ratio
from fmasr.stencil import mesh_cardinality_stats
from fmasr.task import Task
from fmasr.utils.common import parse_floats, parse_pair
from fmasr.utils.loginit import get_logger

logger = get_logger(__name__)  # pylint: disable=invalid-name


def describe(config, modules):
    return Task.describe_pipeline(config, modules, config["csv"])


def run(config, modules):
    a, b, c = parse_floats(config["m"], 3)
    F = OffsetNorm.from_matrix([[a, b], [b, c]], parse_pair(config["omega"]))
    stats = mesh_cardinality_stats(F, config["samples"], progress=True)

    with open(config["csv"], "wt", newline="") as outf:
        writer = csv.writer(outf)
        writer.writerow(["theta", "cardinality"])
        writer.writerows(stats)

    cardinalities = np.array([card for _, card in stats])
    logger.info(
        "kappa=%.6g: mesh cardinality mean %.3f, max %s over %s orientations",
        anisotropy_ratio(F),
        cardinalities.mean(),
        cardinalities.max(),
        len(stats),
    )
    return stats


class StencilStatsTask(Task):
    def stencil_stats_config():
        m = "1,0,1"  # the symmetric matrix [[a, b], [b, c]] as a,b,c
        omega = "0,0"  # drift of the norm
        samples = 256  # number of grid orientations
        csv = "stencil_stats.csv"

    name = "stencil-stats"
    config_functions = [stencil_stats_config]
    commands = {"run": run, "describe": describe}
    default_command = "run"
