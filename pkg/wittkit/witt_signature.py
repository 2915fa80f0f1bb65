"""
Witt condition, perverse duality and the middle-dimensional intersection
pairing with its signature.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .complex_core import boundary_matrix, homology_ranks, orient
from .errors import (
    MalformedInput,
    NonPure,
    NotFullSubcomplex,
    NotManifoldInput,
    UnsupportedDepth,
    WrongDimensionParity,
)
from .ih_engine import complementary, ih_cycles, ih_ranks, middle_perversities
from .sparse import EchelonBasis, congruent_form, solve_dense
from .stratification import is_full, stratum_link, trivial_filtration, validate_filtration
from .utils import format_rational


@dataclass(frozen=True)
class WittEntry:
    stratum: int
    label: str
    link_dimension: int
    middle_rank: int = None

    @property
    def parity(self):
        return "even" if self.link_dimension % 2 == 0 else "odd"

    @property
    def passed(self):
        return self.middle_rank is None or self.middle_rank == 0

    def to_json(self):
        return {
            "stratum": self.stratum,
            "label": self.label,
            "link_dimension": self.link_dimension,
            "parity": self.parity,
            "middle_rank": self.middle_rank,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class WittReport:
    entries: tuple

    @property
    def witt(self):
        return all(e.passed for e in self.entries)

    def to_json(self):
        return {"witt": self.witt, "strata": [e.to_json() for e in self.entries]}


def witt_check(K, F, poset=None):
    """
    Check that every even-dimensional link L of a singular stratum has
    IH^m_{f/2}(L) = 0 for the lower middle perversity.

    Links carry their own filtration, so singular strata of the link are
    treated by the intersection homology of the link itself.

    Parameters
    ----------
    K : SimplicialComplex
        With full skeleta.
    F : Filtration
    poset : StrataPoset, optional

    Returns
    -------
    WittReport
    """
    poset = poset or validate_filtration(K, F)
    entries = []
    for Y in poset.singular_strata():
        link = stratum_link(K, F, Y, poset=poset)
        f = link.dimension
        rank = None
        if f % 2 == 0:
            m = middle_perversities(f)[0]
            rank = ih_ranks(link.complex, link.filtration, m).ranks[f // 2]
        entry = WittEntry(Y.id, Y.label, f, rank)
        logging.info(
            f"Stratum {Y.label}: link dimension {f}, middle rank {rank}, "
            f"passed={entry.passed}"
        )
        entries.append(entry)
    report = WittReport(tuple(entries))
    logging.info(f"Witt condition on {K.name!r}: {report.witt}")
    return report


@dataclass(frozen=True)
class DualityReport:
    p: object
    q: object
    ranks_p: tuple
    ranks_q: tuple
    witt: bool
    ranks_lower: tuple = None
    ranks_upper: tuple = None

    @property
    def dual(self):
        return self.ranks_p == tuple(reversed(self.ranks_q))

    @property
    def middle_self_dual(self):
        if self.ranks_lower is None:
            return None
        return (
            self.ranks_lower == tuple(reversed(self.ranks_lower))
            and self.ranks_lower == self.ranks_upper
        )

    @property
    def passed(self):
        return self.dual and self.middle_self_dual is not False

    def to_json(self):
        return {
            "p": self.p.to_json(),
            "q": self.q.to_json(),
            "ranks_p": list(self.ranks_p),
            "ranks_q": list(self.ranks_q),
            "dual": self.dual,
            "witt": self.witt,
            "middle_self_dual": self.middle_self_dual,
            "passed": self.passed,
        }


def duality_check(K, F, p, poset=None):
    """
    Verify rank IH^p_k = rank IH^q_{n-k} for the complementary perversity
    q = t - p, and on Witt spaces that the two middle perversities agree
    and are self-dual.
    """
    poset = poset or validate_filtration(K, F)
    q = complementary(p)
    ranks_p = ih_ranks(K, F, p).ranks
    ranks_q = ih_ranks(K, F, q).ranks
    witt = witt_check(K, F, poset=poset).witt
    lower = upper = None
    if witt:
        lm, um = middle_perversities(K.n)
        lower = ih_ranks(K, F, lm).ranks
        upper = ih_ranks(K, F, um).ranks
    report = DualityReport(p, q, ranks_p, ranks_q, witt, lower, upper)
    logging.info(f"Duality {ranks_p} vs {ranks_q}: passed={report.passed}")
    return report


def inertia(matrix):
    """
    (positive, negative, null) counts of a symmetric rational matrix by
    exact congruence diagonalisation.

    Pivots are taken on the lowest nonzero diagonal entry; when the
    remaining diagonal vanishes the lowest nonzero entry a_ij splits off
    the block [[0, b], [b, 0]] with one positive and one negative square.
    """
    a = [[Fraction(x) for x in row] for row in matrix]
    size = len(a)
    for i in range(size):
        for j in range(i):
            assert a[i][j] == a[j][i], "inertia needs a symmetric matrix"

    active = list(range(size))
    pos = neg = 0
    while active:
        i = next((i for i in active if a[i][i]), None)
        if i is not None:
            d = a[i][i]
            if d > 0:
                pos += 1
            else:
                neg += 1
            active.remove(i)
            for r in active:
                if not a[r][i]:
                    continue
                factor = a[r][i] / d
                for s in active:
                    a[r][s] -= factor * a[i][s]
            continue

        pair = next(
            ((i, j) for i in active for j in active if i < j and a[i][j]), None
        )
        if pair is None:
            break
        i, j = pair
        b = a[i][j]
        pos += 1
        neg += 1
        active.remove(i)
        active.remove(j)
        update = {
            (r, s): (a[r][i] * a[j][s] + a[r][j] * a[i][s]) / b
            for r in active
            for s in active
        }
        for (r, s), v in update.items():
            a[r][s] -= v
    return pos, neg, size - pos - neg


def signature_of_form(matrix):
    pos, neg, _ = inertia(matrix)
    return pos - neg


def _relative_cohomology(K, degree, relative):
    """
    Basis of H^degree of the cochains supported on `relative` simplices,
    as sparse cochains {global simplex index: Fraction}.

    `relative` maps a degree k to the sorted list of global k-simplex
    indices carrying cochains; the coboundary is the transpose of the
    boundary matrix restricted to those simplices.
    """
    cols = relative(degree)
    if degree < K.n:
        d_up = boundary_matrix(K, degree + 1).submatrix(cols, relative(degree + 1))
        kernel = d_up.transpose().nullspace()
    else:
        kernel = [{j: Fraction(1)} for j in range(len(cols))]
    cocycles = [{cols[j]: v for j, v in z.items()} for z in kernel]

    coboundaries = []
    if degree > 0:
        rows = relative(degree - 1)
        d_here = boundary_matrix(K, degree).submatrix(rows, cols)
        for r in range(len(rows)):
            image = {cols[j]: v for j, v in d_here.row(r).items()}
            if image:
                coboundaries.append(image)

    echelon = EchelonBasis(coboundaries)
    basis = []
    for z in cocycles:
        residual = echelon.add(z)
        if residual:
            basis.append(residual)
    return basis


def _cup_form(K, oriented, basis, half, facets):
    """
    C[a][b] = sum over oriented facets of alpha_a(front face) alpha_b(back face).
    """
    by_front = {}
    for facet in facets:
        front = K.index(facet[: half + 1])
        by_front.setdefault(front, []).append((K.index(facet[half:]), oriented.sign(facet)))
    carriers = {}
    for b, beta in enumerate(basis):
        for j, y in beta.items():
            carriers.setdefault(j, []).append((b, y))
    size = len(basis)
    form = [[Fraction(0)] * size for _ in range(size)]
    for a, alpha in enumerate(basis):
        row = form[a]
        for j, x in alpha.items():
            for back, sign in by_front.get(j, ()):
                for b, y in carriers.get(back, ()):
                    row[b] += sign * x * y
    return form


@dataclass(frozen=True)
class PairingMatrix:
    dimension: int
    matrix: tuple
    cycles: tuple = field(repr=False)
    skew: bool = False

    @property
    def middle_rank(self):
        return len(self.matrix)

    def to_json(self):
        return {
            "dimension": self.dimension,
            "middle_rank": self.middle_rank,
            "matrix": [[format_rational(x) for x in row] for row in self.matrix],
            "skew": self.skew,
        }


def intersection_pairing(K, F=None, oriented=None, poset=None):
    """
    Middle-dimensional intersection pairing on the lower middle IH cycle
    basis of a space whose singular strata are isolated points.

    Middle cycles avoid the singular points, so the pairing is computed
    on the complement M of the open stars of those points: each cycle z
    is written as the cap product x ∩ [M] of a class x in H^{n/2}(M, ∂M)
    by solving the linear system of evaluations, and the form is
    x_i ∪ x_j evaluated on the oriented fundamental chain.

    Parameters
    ----------
    K : SimplicialComplex
    F : Filtration, optional
        Trivial when omitted.
    oriented : OrientedComplex, optional
        Computed with ``orient`` when omitted.
    poset : StrataPoset, optional

    Returns
    -------
    PairingMatrix
    """
    F = F or trivial_filtration(K)
    n = K.n
    if n % 2:
        raise WrongDimensionParity(f"middle pairing needs even dimension, got {n}")
    poset = poset or validate_filtration(K, F)
    singular = poset.singular_strata()
    if any(Y.dimension > 0 for Y in singular):
        raise UnsupportedDepth(
            "pairing is only computed for isolated singular points; "
            f"strata of dimension {sorted({Y.dimension for Y in singular})} present"
        )
    if not F.is_trivial and not is_full(K, F):
        raise NotFullSubcomplex("skeleta are not full subcomplexes; subdivide first")
    oriented = oriented or orient(K)

    half = n // 2
    points = {Y.vertices[0] for Y in singular}
    # M avoids the singular points, its boundary is their link
    collar = set()
    for v in points:
        for facet in K.star_facets((v,)):
            rest = tuple(u for u in facet if u != v)
            for k in range(1, len(rest) + 1):
                collar.update(combinations(rest, k))

    def relative(k):
        return [
            i
            for i, s in enumerate(K.simplices(k))
            if s not in collar and not points.intersection(s)
        ]

    m_facets = [f for f in K.facets if not points.intersection(f)]
    basis = _relative_cohomology(K, half, relative)
    cup = _cup_form(K, oriented, basis, half, m_facets)

    lm = middle_perversities(n)[0]
    cycles = ih_cycles(K, F, lm, half)
    h = len(basis)
    if not cycles:
        matrix = ()
    else:
        evaluations = [
            [sum((alpha.get(j, 0) * x for j, x in z.items()), Fraction(0)) for z in cycles]
            for alpha in basis
        ]
        transposed = [[cup[a][b] for a in range(h)] for b in range(h)]
        try:
            duals = solve_dense(transposed, evaluations)
        except ValueError:
            raise AssertionError("middle cycles are not dual to relative classes")
        matrix = tuple(tuple(row) for row in congruent_form(duals, cup))

    skew = n % 4 == 2
    if not skew:
        assert all(
            matrix[i][j] == matrix[j][i] for i in range(len(matrix)) for j in range(i)
        ), "pairing matrix is not symmetric"
    logging.info(
        f"Intersection pairing of {K.name!r}: middle rank {len(matrix)}, "
        f"{len(points)} singular point(s)"
    )
    return PairingMatrix(n, matrix, cycles, skew)


def signature(K, F=None, oriented=None, poset=None):
    """Signature of the middle pairing; 0 unless n is divisible by 4."""
    if K.n % 4:
        return 0
    pairing = intersection_pairing(K, F, oriented=oriented, poset=poset)
    return signature_of_form(pairing.matrix)


def _is_homology_sphere(L):
    ranks = homology_ranks(L)
    if L.n == 0:
        return ranks == (2,)
    return ranks == (1,) + (0,) * (L.n - 1) + (1,)


def manifold_signature_oracle(K, oriented=None):
    """
    Signature of the cup product form on H^{n/2}(K; Q) of a closed
    oriented manifold, independent of the intersection homology code.

    Raises
    ------
    NotManifoldInput
        If some vertex link is not a rational homology sphere.
    """
    for v in K.vertices:
        try:
            L = K.link((v,))
        except (MalformedInput, NonPure):
            raise NotManifoldInput(f"vertex {v} has no pure link")
        if L.n != K.n - 1 or not _is_homology_sphere(L):
            raise NotManifoldInput(f"link of vertex {v} is not a homology {K.n - 1}-sphere")
    if K.n % 4:
        return 0
    oriented = oriented or orient(K)
    half = K.n // 2

    def everything(k):
        return list(range(len(K.simplices(k))))

    basis = _relative_cohomology(K, half, everything)
    form = _cup_form(K, oriented, basis, half, K.facets)
    sig = signature_of_form(form)
    logging.info(f"Cup product signature of {K.name!r}: {sig} (rank {len(basis)})")
    return sig
