"""
Finite simplicial complexes with exact rational chain complexes.

Simplices are strictly increasing tuples of integer vertex ids. The face
lattice is materialised once at construction and indexed
lexicographically per dimension; boundary matrices use the sign
(-1)^i for omitting the i-th vertex.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .errors import (
    DegreeOutOfRange,
    MalformedInput,
    NonOrientable,
    NonPure,
    NotPseudomanifold,
)
from .sparse import SparseRationalMatrix


class SimplicialComplex:
    """
    Pure n-dimensional simplicial complex given by its facets.

    Parameters
    ----------
    facets : iterable of iterables of int
        Vertex lists of the maximal simplices, in any order.
    name : str, optional
        Label carried into reports.
    carrier : dict, optional
        For subdivisions: new vertex id -> simplex of the original
        complex whose interior contains it.
    """

    def __init__(self, facets, name="", carrier=None):
        canon = []
        for facet in facets:
            simplex = tuple(sorted(facet))
            if len(set(simplex)) != len(simplex):
                raise MalformedInput(f"Facet {list(facet)} repeats a vertex.")
            if not simplex:
                raise MalformedInput("Empty facet.")
            canon.append(simplex)
        if not canon:
            raise MalformedInput("A complex needs at least one facet.")
        if len(set(canon)) != len(canon):
            raise MalformedInput("Duplicate facets.")

        n = max(len(s) for s in canon) - 1
        top = [s for s in canon if len(s) == n + 1]
        top_set = set(top)
        for s in canon:
            if len(s) == n + 1:
                continue
            covered = any(set(s) <= set(t) for t in top_set)
            if not covered:
                raise NonPure(f"Maximal simplex {list(s)} has dimension {len(s) - 1} < {n}.")
            raise MalformedInput(f"Listed simplex {list(s)} is not a facet.")

        self.name = name
        self.n = n
        self.facets = tuple(sorted(top))
        self.carrier = carrier

        faces = [set() for _ in range(n + 1)]
        for facet in self.facets:
            for k in range(n + 1):
                faces[k].update(combinations(facet, k + 1))
        self._simplices = [tuple(sorted(level)) for level in faces]
        self._index = [{s: i for i, s in enumerate(level)} for level in self._simplices]
        self.vertices = tuple(v for (v,) in self._simplices[0])
        self._boundary = {}

    def __repr__(self):
        return f"SimplicialComplex(name={self.name!r}, n={self.n}, f={self.f_vector})"

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.facets == other.facets

    def __hash__(self):
        return hash(self.facets)

    @property
    def dimension(self):
        return self.n

    def simplices(self, k):
        """Lexicographically sorted k-simplices (empty outside 0..n)."""
        if 0 <= k <= self.n:
            return self._simplices[k]
        return ()

    def all_simplices(self):
        for level in self._simplices:
            yield from level

    def index(self, simplex):
        return self._index[len(simplex) - 1][simplex]

    def __contains__(self, simplex):
        simplex = tuple(simplex)
        k = len(simplex) - 1
        return 0 <= k <= self.n and simplex in self._index[k]

    @property
    def f_vector(self):
        return tuple(len(level) for level in self._simplices)

    @property
    def euler_characteristic(self):
        return sum((-1) ** k * f for k, f in enumerate(self.f_vector))

    def star_facets(self, simplex):
        s = set(simplex)
        return [f for f in self.facets if s <= set(f)]

    def link(self, simplex, vertices=None, name=""):
        """
        Link of `simplex` as a complex, optionally restricted to the full
        subcomplex on `vertices`.
        """
        s = set(simplex)
        keep = None if vertices is None else set(vertices)
        faces = set()
        for f in self.star_facets(simplex):
            rest = tuple(v for v in f if v not in s)
            if keep is not None:
                rest = tuple(v for v in rest if v in keep)
            if rest:
                faces.add(rest)
        maximal = [f for f in faces if not any(set(f) < set(g) for g in faces)]
        return SimplicialComplex(maximal, name=name)

    def codim_one_incidence(self):
        """Map (n-1)-simplex -> list of (facet index, omitted position)."""
        incidence = {}
        for fi, facet in enumerate(self.facets):
            for i in range(len(facet)):
                face = facet[:i] + facet[i + 1 :]
                incidence.setdefault(face, []).append((fi, i))
        return incidence


def load_complex(document, name=None):
    """
    Build a complex from a complex-JSON document
    ``{"name": str, "dimension": n, "facets": [[int, ...], ...]}``.
    """
    if not isinstance(document, dict):
        raise MalformedInput("complex document must be a JSON object")
    facets = document.get("facets")
    if not isinstance(facets, list) or not facets:
        raise MalformedInput("'facets' must be a non-empty list")
    for facet in facets:
        if not isinstance(facet, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in facet
        ):
            raise MalformedInput(f"facet {facet!r} is not a list of integers")
    dim = document.get("dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise MalformedInput("'dimension' must be a non-negative integer")
    label = document.get("name", "")
    if not isinstance(label, str):
        raise MalformedInput("'name' must be a string")

    K = SimplicialComplex(facets, name=name or label)
    if K.n != dim:
        raise MalformedInput(f"declared dimension {dim} but facets have dimension {K.n}")
    logging.info(f"Loaded complex {K.name!r} with f-vector {K.f_vector}")
    return K


def dump_complex(K, F=None):
    """complex-JSON for K, with the filtration merged in when it is nontrivial."""
    document = {"name": K.name, "dimension": K.n, "facets": [list(f) for f in K.facets]}
    if F is not None and not F.is_trivial:
        document["filtration"] = F.to_json()
    return document


def boundary_matrix(K, k):
    """
    Matrix of the simplicial boundary map from k-chains to (k-1)-chains.

    Parameters
    ----------
    K : SimplicialComplex
    k : int
        Degree, 0 <= k <= n. For k = 0 the result is the 0 x f_0 zero
        matrix.

    Returns
    -------
    SparseRationalMatrix
        Rows indexed by (k-1)-simplices, columns by k-simplices, both in
        lexicographic order.
    """
    if not 0 <= k <= K.n:
        raise DegreeOutOfRange(f"degree {k} outside 0..{K.n}")
    if k in K._boundary:
        return K._boundary[k]
    cols = K.simplices(k)
    if k == 0:
        matrix = SparseRationalMatrix(0, len(cols))
    else:
        index = K._index[k - 1]
        data = {}
        for j, simplex in enumerate(cols):
            for i in range(k + 1):
                face = simplex[:i] + simplex[i + 1 :]
                data.setdefault(index[face], {})[j] = Fraction((-1) ** i)
        matrix = SparseRationalMatrix(len(K.simplices(k - 1)), len(cols), data)
    K._boundary[k] = matrix
    return matrix


@dataclass(frozen=True)
class OrientedComplex:
    """A complex with one sign per facet (aligned with ``base.facets``)."""

    base: SimplicialComplex
    signs: tuple

    def sign(self, facet):
        return self.signs[self.base.index(tuple(facet))]

    def reversed(self):
        return OrientedComplex(self.base, tuple(-s for s in self.signs))

    def fundamental_chain(self):
        """Top chain {facet index: sign}; a cycle when the orientation is consistent."""
        return {i: Fraction(s) for i, s in enumerate(self.signs)}

    def is_consistent(self):
        d = boundary_matrix(self.base, self.base.n)
        return not d.apply(self.fundamental_chain())


def orient(K):
    """
    Orient K by breadth-first propagation across codimension-one faces.

    The lexicographically first facet of every connected component is
    seeded with +1. A face ``facet[:i] + facet[i+1:]`` inherits sign
    ``s * (-1)**i`` from the facet, and the two facets on either side of
    a face must induce opposite signs on it.
    """
    if K.n == 0:
        return OrientedComplex(K, tuple(1 for _ in K.facets))
    incidence = K.codim_one_incidence()
    branching = [f for f, members in incidence.items() if len(members) != 2]
    if branching:
        raise NotPseudomanifold(
            f"{len(branching)} codimension-one faces do not lie in exactly two "
            f"facets, e.g. {list(branching[0])}"
        )
    signs = [0] * len(K.facets)
    for seed in range(len(K.facets)):
        if signs[seed]:
            continue
        signs[seed] = 1
        queue = deque([seed])
        while queue:
            fi = queue.popleft()
            facet = K.facets[fi]
            for i in range(len(facet)):
                face = facet[:i] + facet[i + 1 :]
                for gj, j in incidence[face]:
                    if gj == fi:
                        continue
                    want = -signs[fi] * (-1) ** (i + j)
                    if not signs[gj]:
                        signs[gj] = want
                        queue.append(gj)
                    elif signs[gj] != want:
                        raise NonOrientable(
                            f"sign conflict across face {list(face)} of {K.name!r}"
                        )
    return OrientedComplex(K, tuple(signs))


@dataclass(frozen=True)
class PseudomanifoldReport:
    pure: bool
    nonbranching: bool
    dense: bool
    branching_faces: tuple = field(default=())
    failures: tuple = field(default=())

    @property
    def passed(self):
        return self.pure and self.nonbranching and self.dense

    def to_json(self):
        return {
            "pure": self.pure,
            "nonbranching": self.nonbranching,
            "dense": self.dense,
            "passed": self.passed,
            "branching_faces": [list(f) for f in self.branching_faces],
            "failures": list(self.failures),
        }


def check_pseudomanifold(K, F=None):
    """
    Check purity, the two-facets condition on codimension-one faces
    off the singular set, and density of the regular part.

    Parameters
    ----------
    K : SimplicialComplex
    F : stratification.Filtration, optional
        Trivial when omitted.

    Returns
    -------
    PseudomanifoldReport
    """
    failures = []
    pure = all(len(f) == K.n + 1 for f in K.facets)
    if not pure:
        failures.append("facets of mixed dimension")

    singular = F.skeleton(K.n - 2) if F is not None and K.n >= 2 else frozenset()
    incidence = K.codim_one_incidence() if K.n >= 1 else {}
    branching = tuple(
        sorted(f for f, m in incidence.items() if len(m) != 2 and f not in singular)
    )
    if branching:
        failures.append(
            f"{len(branching)} codimension-one faces off the singular set "
            "do not lie in exactly two facets"
        )

    dense = True
    if F is not None:
        lower = F.skeleton(K.n - 1) if K.n >= 1 else frozenset()
        if any(len(s) == K.n + 1 for s in lower):
            dense = False
            failures.append("a lower skeleton contains a top simplex")

    report = PseudomanifoldReport(pure, not branching, dense, branching, tuple(failures))
    logging.info(f"Pseudomanifold check on {K.name!r}: passed={report.passed}")
    return report


def _subdivide_once(K):
    ordered = sorted(K.all_simplices(), key=lambda s: (len(s), s))
    vid = {s: i for i, s in enumerate(ordered)}
    facets = []
    for facet in K.facets:
        for order in _permutations(facet):
            flag = [vid[tuple(sorted(order[: i + 1]))] for i in range(len(order))]
            facets.append(flag)
    return facets, ordered


def _permutations(seq):
    if len(seq) <= 1:
        return [tuple(seq)]
    out = []
    for i, x in enumerate(seq):
        for rest in _permutations(seq[:i] + seq[i + 1 :]):
            out.append((x,) + rest)
    return out


def _subdivide_round(K):
    facets, ordered = _subdivide_once(K)
    base = K.carrier if K.carrier is not None else {v: (v,) for v in K.vertices}
    carrier = {
        i: tuple(sorted(set().union(*(base[v] for v in simplex))))
        for i, simplex in enumerate(ordered)
    }
    return SimplicialComplex(facets, name=K.name, carrier=carrier), ordered


def barycentric_subdivide(K, r=1):
    """
    r-fold barycentric subdivision.

    Vertices of each round are numbered by sorting the simplices of the
    previous round by (dimension, vertex tuple), so every new simplex,
    read in increasing vertex order, is a flag of increasing dimension.
    The returned complex carries ``carrier``: new vertex -> simplex of
    the original K containing it in its interior.
    """
    if r < 0:
        raise ValueError("subdivision count must be non-negative")
    current = K
    for round_ in range(r):
        current, _ = _subdivide_round(current)
        logging.info(
            f"Subdivision round {round_ + 1}/{r} of {K.name!r}: f-vector {current.f_vector}"
        )
    return current


def _permutation_sign(seq, reference):
    pos = {v: i for i, v in enumerate(reference)}
    perm = [pos[v] for v in seq]
    inversions = sum(
        1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j]
    )
    return -1 if inversions % 2 else 1


def subdivide_orientation(oriented, r=1):
    """
    Transport an orientation through r barycentric subdivisions.

    A flag sigma_0 < ... < sigma_n inside facet sigma_n gets the facet sign
    times the sign of the order in which the flag adds vertices.
    """
    current = oriented
    for _ in range(r):
        sd, ordered = _subdivide_round(current.base)
        signs = [0] * len(sd.facets)
        for fi, flag in enumerate(sd.facets):
            chain = [ordered[v] for v in flag]
            added = [chain[0][0]] + [
                next(v for v in chain[i] if v not in chain[i - 1])
                for i in range(1, len(chain))
            ]
            top = chain[-1]
            signs[fi] = current.sign(top) * _permutation_sign(added, top)
        current = OrientedComplex(sd, tuple(signs))
    return current


def _rank_job(matrix):
    return matrix.rank()


def boundary_ranks(K, cores=1):
    """Ranks of all boundary maps, indexed by degree 0..n+1 (degree n+1 is 0)."""
    matrices = [boundary_matrix(K, k) for k in range(K.n + 1)]
    if cores > 1 and len(matrices) > 1:
        with mp.Pool(cores) as pool:
            ranks = pool.map(_rank_job, matrices)
    else:
        ranks = [m.rank() for m in matrices]
    return list(ranks) + [0]


def homology_ranks(K, cores=1):
    """
    Rational Betti numbers b_k = dim ker d_k - rank d_{k+1}.

    Parameters
    ----------
    K : SimplicialComplex
    cores : int, optional
        Number of worker processes for the per-degree ranks.

    Returns
    -------
    tuple of int
    """
    for k in range(2, K.n + 1):
        product = boundary_matrix(K, k - 1) @ boundary_matrix(K, k)
        assert product.is_zero(), f"boundary of boundary nonzero in degree {k}"
    ranks = boundary_ranks(K, cores=cores)
    f = K.f_vector
    betti = tuple(f[k] - ranks[k] - ranks[k + 1] for k in range(K.n + 1))
    logging.info(f"Homology ranks of {K.name!r}: {betti}")
    return betti
