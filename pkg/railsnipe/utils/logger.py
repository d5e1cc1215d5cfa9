import logging
import sys

DEBUG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s (%(filename)s:%(lineno)d)'
PLAIN_FORMAT = '%(message)s'

# Third-party loggers that flood DEBUG output
QUIET_LOGGERS = ("matplotlib", "PIL")


def level_for(debug: bool) -> int:
    return logging.DEBUG if debug else logging.INFO


def setup_logger(level=logging.INFO):
    """Routes all railsnipe logging to stdout. Calling it again replaces the previous handler."""
    root = logging.getLogger()
    if root.hasHandlers():
        root.handlers.clear()
    root.setLevel(level)

    handler = logging.StreamHandler(sys.stdout)
    handler.setLevel(level)
    handler.setFormatter(logging.Formatter(DEBUG_FORMAT if level == logging.DEBUG else PLAIN_FORMAT))
    root.addHandler(handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(level, logging.WARNING))
