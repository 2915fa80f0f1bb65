import json
import logging
import multiprocessing as mp
import os
from fractions import Fraction
from importlib.resources import files
from pathlib import Path

from . import resources
from .errors import InvalidArgument, MalformedInput

# computation defaults
DEFAULT_SUBDIVISIONS = 1
LINK_SAMPLES = 3
DEFAULT_TOLERANCE = 1e-9
DEFAULT_MODE_CUTOFF = 16
FD_GRID_POINTS = 512
THREADS_ENV = "WITTKIT_THREADS"


def setup_logger(file_path=None, level="INFO"):
    """
    Configure the root logger used throughout the package.

    Parameters
    ----------
    file_path : pathlib.Path, optional
        Desired path for the logfile. If None, records only go to
        the terminal (stderr) via a StreamHandler.
    level : str (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        Desired level of reporting for the log.
    """

    logger = logging.getLogger()
    logger.setLevel(level)
    formatter = logging.Formatter(
        "%(asctime)s %(levelname)s %(module)s/%(funcName)s: %(message)s"
    )

    # stdout is reserved for JSON reports
    handlers = [logging.StreamHandler()]
    if file_path is not None:
        handlers.append(logging.FileHandler(file_path, mode="w"))

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    for handler in handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)


def get_package_data_name(name):
    """
    Return the filepath to a data file shipped with the package, e.g.
    "complexes/cp2_9.json" or "schemas/ih.schema.json".
    """
    return Path(str(files(resources).joinpath(name)))


def load_json(path):
    """
    Load a JSON document with some error-checking.

    Parameters
    ----------
    path : str or pathlib.Path
        Location of the document.

    Returns
    -------
    dict
    """
    path = Path(path)
    if not path.exists():
        raise MalformedInput(f"File {path} does not exist.")
    try:
        with open(path, "r", encoding="utf-8") as infile:
            return json.load(infile)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"File {path} is not valid JSON: {e}")


def get_cores():
    """Number of worker processes allowed by the WITTKIT_THREADS variable."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        cores = int(raw)
    except ValueError:
        raise InvalidArgument(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if not 1 <= cores <= mp.cpu_count():
        raise InvalidArgument(
            f"{THREADS_ENV} should be an integer from 1-{mp.cpu_count()}."
        )
    return cores


def parse_rational(value):
    """
    Parse an exact number: ints, "p/q" strings and decimal strings become
    Fractions, floats are kept as floats.
    """
    if isinstance(value, bool):
        raise MalformedInput(f"Not a number: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise MalformedInput(f"Not a rational string: {value!r}")
    raise MalformedInput(f"Not a number: {value!r}")


def format_rational(x):
    """Serialise exact values as "p/q" strings (integers as "p")."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_number(x):
    """Rationals become strings, floats stay JSON numbers."""
    if isinstance(x, (int, Fraction)):
        return format_rational(x)
    return float(x)


def dump_report(report, out=None):
    """
    Serialise a report deterministically and write it to `out` or return
    the text for stdout.
    """
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if out is not None:
        out = Path(out)
        out.parent.mkdir(exist_ok=True, parents=True)
        out.write_text(text, encoding="utf-8")
    return text
