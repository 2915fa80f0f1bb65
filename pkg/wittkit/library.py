"""
Built-in corpus of triangulated spaces.

Manifolds come with the trivial filtration; the suspensions carry the
stratification by their cone points.
"""

import logging
from itertools import combinations

from .complex_core import SimplicialComplex, load_complex
from .errors import MalformedInput
from .stratification import (
    filtration_from_vertex_levels,
    product_with_manifold,
    suspension,
    trivial_filtration,
)
from .utils import get_package_data_name, load_json


def _shipped(filename, name):
    return load_complex(load_json(get_package_data_name(f"complexes/{filename}")), name=name)


def boundary_of_simplex(n):
    """The (n-1)-sphere as the boundary of the n-simplex."""
    return SimplicialComplex(combinations(range(n + 1), n), name=f"S{n - 1}")


def torus():
    """7-vertex torus."""
    return _shipped("torus_7.json", "T2")


def projective_plane():
    """6-vertex real projective plane."""
    return _shipped("rp2_6.json", "RP2")


def complex_projective_plane():
    """9-vertex complex projective plane."""
    return _shipped("cp2_9.json", "CP2")


def s2_x_s2():
    S = boundary_of_simplex(3)
    P, _ = product_with_manifold(S, S)
    return SimplicialComplex(P.facets, name="S2xS2")


def sigma_s2():
    return suspension(boundary_of_simplex(3))


def sigma_t2():
    return suspension(torus())


def sigma_cp2():
    return suspension(complex_projective_plane())


def sigma_sigma_t2():
    return suspension(*sigma_t2())


def cp2_marked():
    """CP2 with vertex 0 declared an isolated singular point."""
    K = complex_projective_plane()
    levels = {v: 0 if v == 0 else K.n for v in K.vertices}
    return K, filtration_from_vertex_levels(K, levels)


def _with_trivial(builder):
    def build():
        K = builder()
        return K, trivial_filtration(K)

    return build


BUILTINS = {
    "boundary_of_simplex_2": _with_trivial(lambda: boundary_of_simplex(2)),
    "boundary_of_simplex_3": _with_trivial(lambda: boundary_of_simplex(3)),
    "boundary_of_simplex_4": _with_trivial(lambda: boundary_of_simplex(4)),
    "boundary_of_simplex_5": _with_trivial(lambda: boundary_of_simplex(5)),
    "torus": _with_trivial(torus),
    "projective_plane": _with_trivial(projective_plane),
    "complex_projective_plane": _with_trivial(complex_projective_plane),
    "s2_x_s2": _with_trivial(s2_x_s2),
    "sigma_s2": sigma_s2,
    "sigma_t2": sigma_t2,
    "sigma_cp2": sigma_cp2,
    "sigma_sigma_t2": sigma_sigma_t2,
    "cp2_marked": cp2_marked,
}


def builtin(name):
    """
    Look up a corpus entry by name.

    Returns
    -------
    (SimplicialComplex, Filtration)
    """
    try:
        build = BUILTINS[name]
    except KeyError:
        raise MalformedInput(
            f"unknown built-in {name!r}; choose from {', '.join(sorted(BUILTINS))}"
        )
    K, F = build()
    logging.info(f"Built-in {name!r}: f-vector {K.f_vector}")
    return K, F
