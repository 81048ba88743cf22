import logging
import os
import time
from contextlib import contextmanager

import colorlog

GLOBAL_LOGGING_CONF = {"level": os.environ.get("FMASR_LOGGING", logging.INFO), "logfile": os.environ.get("FMASR_LOGFILE")}


class RepeatFilter(logging.Filter):
    """ Drop low-level records whose message template was already emitted `max_repeats` times in a row.

        Solvers log from tight loops (e.g., one warning per non-monotone acceptance), so the template rather than
        the formatted message is compared.
    """

    def __init__(self, logger, maxlevel=logging.DEBUG, max_repeats=5):
        super().__init__()
        self.logger = logger
        self.maxlevel = maxlevel
        self.max_repeats = max_repeats
        self.last = None
        self.count = 0
        self.suppressing = False

    def filter(self, record):
        if getattr(record, "_repeat_notice", False) or record.levelno > self.maxlevel:
            return True

        key = (record.name, record.funcName, record.levelno, record.msg)
        if key != self.last:
            self.last, self.count, self.suppressing = key, 1, False
            return True

        self.count += 1
        if self.count <= self.max_repeats:
            return True

        if not self.suppressing:
            self.suppressing = True
            self.logger.log(
                record.levelno, "suppressing further repeats of: %s", record.msg, extra={"_repeat_notice": True}
            )
        return False


def _streamhandler():
    fmt = "%(thin_white)s%(asctime)s - %(reset)s%(log_color)s%(levelname)s - %(name)s.%(funcName)s - %(message)s"
    sh = colorlog.StreamHandler()
    sh.setFormatter(colorlog.ColoredFormatter(fmt))
    return sh


def _filehandler(fn):
    fh = logging.FileHandler(fn)
    fh.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(name)s.%(funcName)s - %(message)s"))
    return fh


def get_logger(name=None):
    # warnings from third-party packages go through the root logger
    rlogger = logging.getLogger()
    if not rlogger.handlers:
        rlogger.setLevel(logging.WARNING)
        rlogger.addHandler(_streamhandler())

    logger = logging.getLogger("fmasr")
    if not logger.handlers:
        logger.propagate = False
        sh = _streamhandler()
        sh.addFilter(RepeatFilter(logger, maxlevel=logging.WARNING))
        logger.addHandler(sh)

        if GLOBAL_LOGGING_CONF["logfile"]:
            logger.addHandler(_filehandler(GLOBAL_LOGGING_CONF["logfile"]))

    logger.setLevel(GLOBAL_LOGGING_CONF["level"])
    if name is None:
        name = "fmasr"
    if not name.startswith("fmasr"):
        name = "fmasr." + name
    return logging.getLogger(name)


@contextmanager
def log_timing(logger, what, level=logging.INFO):
    """ Log the CPU time spent inside the block. The elapsed seconds are stored on the yielded dict as `seconds`. """

    timing = {}
    start = time.process_time()
    try:
        yield timing
    finally:
        timing["seconds"] = time.process_time() - start
        logger.log(level, "%s took %.3fs", what, timing["seconds"])
