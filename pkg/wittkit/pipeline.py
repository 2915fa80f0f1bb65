"""
Staged preparation of a stratified input shared by the command line:
load, validate, subdivide (with the filtration and orientation carried
along) and compute the strata poset.
"""

import logging
from dataclasses import dataclass, replace

from .complex_core import (
    barycentric_subdivide,
    check_pseudomanifold,
    load_complex,
    orient,
    subdivide_orientation,
)
from .errors import MalformedInput, NotPseudomanifold
from .library import builtin
from .stratification import (
    is_full,
    load_filtration,
    transport_filtration,
    validate_filtration,
)
from .utils import DEFAULT_SUBDIVISIONS, load_json

BUILTIN_PREFIX = "builtin:"


def load_input(source):
    """
    Load ``builtin:<name>`` from the corpus or a complex-JSON file, whose
    optional ``filtration`` key holds filtration-JSON.

    Returns
    -------
    (SimplicialComplex, Filtration)
    """
    source = str(source)
    if source.startswith(BUILTIN_PREFIX):
        return builtin(source[len(BUILTIN_PREFIX) :])
    document = load_json(source)
    if not isinstance(document, dict):
        raise MalformedInput(f"{source} does not hold a JSON object")
    K = load_complex(document)
    F = load_filtration(document.get("filtration"), K)
    return K, F


@dataclass(frozen=True)
class PreparedInput:
    """An input after the preparation stages; ``complex`` is the subdivision used."""

    base: object
    base_filtration: object
    complex: object
    filtration: object
    subdivisions: int
    poset: object = None
    oriented: object = None
    pseudomanifold: object = None


def effective_subdivisions(F, requested):
    """Requested count, raised to 1 when a nontrivial filtration asks for none."""
    if requested < 0:
        raise MalformedInput(f"subdivision count must be non-negative, got {requested}")
    if requested == 0 and not F.is_trivial:
        logging.warning(
            "Nontrivial filtration needs full skeleta; raising subdivisions from 0 to 1."
        )
        return 1
    return requested


def prepare(
    source,
    subdivisions=DEFAULT_SUBDIVISIONS,
    oriented=False,
    stages=set(range(4)),
    strict=False,
):
    """
    Run the preparation stages on an input.

    Parameters
    ----------
    source : str or pathlib.Path or (SimplicialComplex, Filtration)
        File path, ``builtin:<name>`` or an already loaded pair.
    subdivisions : int, optional
        Requested number of barycentric subdivisions.
    oriented : bool, optional
        Orient the input and carry the orientation through subdivision.
    stages : set, optional
        Integer stages (zero-indexed) to run:
        0 load, 1 pseudomanifold check, 2 subdivide, 3 strata poset.
        An already loaded pair counts as stage 0 done.
    strict : bool, optional
        Raise NotPseudomanifold when stage 1 fails instead of only
        recording the report.

    Returns
    -------
    PreparedInput
    """
    if not isinstance(stages, (list, set)):
        raise RuntimeError("stages must either be a set or list of ints")

    if isinstance(source, tuple):
        K, F = source
    elif 0 in stages:
        logging.info(f"Stage 0: Loading {source}.")
        K, F = load_input(source)
    else:
        raise RuntimeError("stage 0 is needed unless a loaded pair is given")

    report = None
    if 1 in stages:
        logging.info("Stage 1: Pseudomanifold check on the input.")
        report = check_pseudomanifold(K, F)
        if strict and not report.passed:
            detail = "; ".join(report.failures) or f"{K.name!r} fails the pseudomanifold check"
            raise NotPseudomanifold(detail)

    r = effective_subdivisions(F, subdivisions) if 2 in stages else 0
    sd, sdF, orientation = K, F, None
    if oriented:
        orientation = orient(K)
    if r:
        logging.info(f"Stage 2: {r} barycentric subdivision(s) of {K.name!r}.")
        sd = barycentric_subdivide(K, r)
        sdF = transport_filtration(F, sd)
        if orientation is not None:
            orientation = subdivide_orientation(orientation, r)
            assert orientation.base == sd, "orientation and subdivision disagree"

    poset = None
    if 3 in stages:
        logging.info("Stage 3: Strata of the subdivided input.")
        poset = validate_filtration(sd, sdF)

    return PreparedInput(
        base=K,
        base_filtration=F,
        complex=sd,
        filtration=sdF,
        subdivisions=r,
        poset=poset,
        oriented=orientation,
        pseudomanifold=report,
    )


def coarsest_for_pairing(prepared):
    """
    The least subdivided triangulation of a prepared input on which the
    middle pairing can be evaluated, as a PreparedInput with orientation
    and poset filled in.

    The input triangulation itself qualifies when its singular set is a
    set of vertices forming a full subcomplex; its pairing matrix is then
    congruent to the one on any subdivision. Otherwise the prepared
    subdivision is used.
    """
    K, F = prepared.base, prepared.base_filtration
    if all(len(s) == 1 for s in F.singular_set) and is_full(K, F):
        logging.info(f"Pairing evaluated on the input triangulation of {K.name!r}.")
        return replace(
            prepared,
            complex=K,
            filtration=F,
            subdivisions=0,
            poset=validate_filtration(K, F),
            oriented=orient(K),
        )
    orientation = prepared.oriented
    if orientation is None:
        orientation = orient(K)
        if prepared.subdivisions:
            orientation = subdivide_orientation(orientation, prepared.subdivisions)
    poset = prepared.poset or validate_filtration(prepared.complex, prepared.filtration)
    return replace(prepared, oriented=orientation, poset=poset)
