from fmasr.pipeline import Notebook
from fmasr.task.bench import BenchTask
from fmasr.task.solve import SolveTask
from fmasr.task.stencilstats import StencilStatsTask
