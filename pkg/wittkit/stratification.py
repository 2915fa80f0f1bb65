"""
Filtrations by closed skeleta, strata, the frontier poset, depth and
links of strata.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product

from .complex_core import SimplicialComplex
from .errors import (
    CodimOneStratum,
    FrontierViolation,
    InvalidStratum,
    LinkDimensionMismatch,
    LinkInconsistent,
    MalformedInput,
    NoVertexInStratum,
    NonPure,
    NotDense,
    NotFullSubcomplex,
)
from .utils import LINK_SAMPLES


@dataclass(frozen=True)
class Filtration:
    """
    Closed skeleta X_0 ⊆ X_1 ⊆ ... ⊆ X_n = K, each stored as a frozenset of
    simplices. ``skeleta[j]`` is X_j for j < n.
    """

    n: int
    skeleta: tuple
    _levels: dict = field(default=None, compare=False, repr=False)

    def skeleton(self, j):
        if j < 0:
            return frozenset()
        if j >= self.n:
            raise ValueError("X_n is the whole complex; ask the complex instead")
        return self.skeleta[j]

    @property
    def is_trivial(self):
        return all(not s for s in self.skeleta)

    @property
    def singular_set(self):
        return self.skeleta[self.n - 2] if self.n >= 2 else frozenset()

    def level(self, simplex):
        """Smallest j with simplex in X_j (n for the regular part)."""
        levels = self._levels
        if levels is None:
            levels = {}
            for j in reversed(range(self.n)):
                for s in self.skeleta[j]:
                    levels[s] = j
            object.__setattr__(self, "_levels", levels)
        return levels.get(simplex, self.n)

    def vertex_levels(self, K):
        return {v: self.level((v,)) for v in K.vertices}

    def to_json(self):
        return {
            "skeleta": {
                str(j): [list(s) for s in sorted(self.skeleta[j])]
                for j in range(self.n)
                if self.skeleta[j]
            }
        }


def trivial_filtration(K):
    return Filtration(K.n, tuple(frozenset() for _ in range(K.n)))


def _closure(simplices):
    out = set()
    for s in simplices:
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


def load_filtration(document, K):
    """
    Build the filtration from filtration-JSON
    ``{"skeleta": {"0": [[v], ...], ...}}``. Each listed skeleton is
    closed under faces and the skeleta are nested by taking the upward
    union; omitted keys are empty.
    """
    if document is None:
        return trivial_filtration(K)
    raw = document.get("skeleta") if isinstance(document, dict) else None
    if not isinstance(raw, dict):
        raise MalformedInput("filtration must have a 'skeleta' object")
    given = {}
    for key, simplices in raw.items():
        try:
            j = int(key)
        except ValueError:
            raise MalformedInput(f"skeleton key {key!r} is not an integer")
        if not 0 <= j <= K.n:
            raise MalformedInput(f"skeleton key {j} outside 0..{K.n}")
        if not isinstance(simplices, list):
            raise MalformedInput(f"skeleton {j} must be a list of simplices")
        canon = []
        for s in simplices:
            if not isinstance(s, list) or not s:
                raise MalformedInput(f"bad simplex {s!r} in skeleton {j}")
            s = tuple(sorted(s))
            if s not in K:
                raise MalformedInput(f"simplex {list(s)} of skeleton {j} is not in the complex")
            canon.append(s)
        given[j] = _closure(canon)

    skeleta = []
    acc = set()
    for j in range(K.n):
        acc |= given.get(j, set())
        skeleta.append(frozenset(acc))
    return Filtration(K.n, tuple(skeleta))


def filtration_from_vertex_levels(K, levels):
    """Full filtration in which a simplex sits at the largest level of its vertices."""
    skeleta = [set() for _ in range(K.n)]
    for s in K.all_simplices():
        lev = max(levels[v] for v in s)
        for j in range(max(lev, 0), K.n):
            skeleta[j].add(s)
    return Filtration(K.n, tuple(frozenset(x) for x in skeleta))


def transport_filtration(F, sdK):
    """
    Carry a filtration of K to a subdivision of K through the carrier
    map: a new vertex sits at the level of its carrier simplex.
    """
    if sdK.carrier is None:
        return F
    levels = {v: F.level(sdK.carrier[v]) for v in sdK.vertices}
    return filtration_from_vertex_levels(sdK, levels)


def is_full(K, F):
    """True when every skeleton is a full subcomplex of K."""
    levels = F.vertex_levels(K)
    return all(F.level(s) == max(levels[v] for v in s) for s in K.all_simplices())


@dataclass(frozen=True)
class Stratum:
    id: int
    dimension: int
    simplices: frozenset = field(repr=False)
    label: str = ""

    @property
    def vertices(self):
        return tuple(sorted(s[0] for s in self.simplices if len(s) == 1))


@dataclass(frozen=True)
class StrataPoset:
    """Strata with the strict frontier relation: (y, z) in relation iff Y < Z."""

    n: int
    strata: tuple
    relation: frozenset

    def stratum(self, sid):
        return self.strata[sid]

    def above(self, sid):
        return sorted(z for y, z in self.relation if y == sid)

    def below(self, sid):
        return sorted(y for y, z in self.relation if z == sid)

    def singular_strata(self):
        return [s for s in self.strata if s.dimension < self.n]

    def regular_strata(self):
        return [s for s in self.strata if s.dimension == self.n]

    def depth_of(self, sid):
        memo = {}

        def _depth(i):
            if i not in memo:
                ups = self.above(i)
                memo[i] = 1 + max(_depth(z) for z in ups) if ups else 0
            return memo[i]

        return _depth(sid)

    def stratum_of_vertex(self):
        owner = {}
        for s in self.strata:
            for v in s.vertices:
                owner[v] = s.id
        return owner

    def labelled_structure(self):
        """Canonical form (labels, dimensions, depths, relations) for comparisons."""
        nodes = tuple(
            sorted((s.label, s.dimension, self.depth_of(s.id)) for s in self.strata)
        )
        labels = {s.id: s.label for s in self.strata}
        edges = tuple(sorted((labels[y], labels[z]) for y, z in self.relation))
        return nodes, edges

    def to_json(self):
        return {
            "strata": [
                {
                    "id": s.id,
                    "label": s.label,
                    "dimension": s.dimension,
                    "depth": self.depth_of(s.id),
                    "above": self.above(s.id),
                }
                for s in self.strata
            ],
            "depth": depth(self),
        }


def _components(simplices):
    """Connected components of a set of open simplices under codimension-one faces."""
    parent = {s: s for s in simplices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in simplices:
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            if face in parent:
                a, b = find(s), find(face)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups = {}
    for s in simplices:
        groups.setdefault(find(s), set()).add(s)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: min(g))


def validate_filtration(K, F):
    """
    Check the filtration and compute the strata poset.

    Parameters
    ----------
    K : SimplicialComplex
    F : Filtration

    Returns
    -------
    StrataPoset
        Strata are connected components of X_d minus X_{d-1}, numbered by
        (dimension, smallest simplex).
    """
    n = K.n
    if F.n != n:
        raise MalformedInput(f"filtration has dimension {F.n}, complex {n}")
    for j in range(n):
        if any(len(s) == n + 1 for s in F.skeleton(j)):
            raise NotDense(f"skeleton X_{j} contains a top simplex; regular part not dense")
    if n >= 1:
        if F.skeleton(n - 1) != F.skeleton(n - 2):
            raise CodimOneStratum(f"X_{n - 1} differs from X_{n - 2}")
        if any(len(s) == n for s in F.skeleton(n - 1)):
            raise CodimOneStratum(f"X_{n - 1} contains an {n - 1}-simplex")
    for j in range(n):
        big = [s for s in F.skeleton(j) if len(s) - 1 > j]
        if big:
            raise FrontierViolation(f"X_{j} has dimension above {j}: {list(big[0])}")

    pieces = []
    for d in range(n + 1):
        upper = set(K.all_simplices()) if d == n else set(F.skeleton(d))
        open_part = upper - set(F.skeleton(d - 1))
        for comp in _components(open_part):
            tops = [s for s in comp if len(s) == d + 1]
            if not tops:
                raise FrontierViolation(
                    f"a component of X_{d} minus X_{d - 1} has no {d}-simplex"
                )
            covered = _closure(tops)
            if not comp <= covered:
                raise FrontierViolation(f"a {d}-dimensional stratum is not pure")
            pieces.append((d, min(comp), comp))
    pieces.sort(key=lambda p: (p[0], p[1]))

    counters = {}
    strata = []
    for sid, (d, _, comp) in enumerate(pieces):
        k = counters.get(d, 0)
        counters[d] = k + 1
        strata.append(Stratum(sid, d, comp, label=f"{d}.{k}"))

    relation = set()
    for z in strata:
        if z.dimension == 0:
            continue
        cl = _closure(s for s in z.simplices if len(s) == z.dimension + 1)
        for y in strata:
            if y.dimension >= z.dimension:
                continue
            meet = y.simplices & cl
            if not meet:
                continue
            if meet != y.simplices:
                raise FrontierViolation(
                    f"closure of stratum {z.label} meets stratum {y.label} only partially"
                )
            relation.add((y.id, z.id))

    poset = StrataPoset(n, tuple(strata), frozenset(relation))
    logging.info(
        f"Filtration of {K.name!r}: {len(strata)} strata, depth {depth(poset)}"
    )
    return poset


def depth(P, stratum=None):
    """
    Depth of one stratum (longest chain of strata above it) or, without
    `stratum`, of the whole space.
    """
    if stratum is not None:
        sid = stratum.id if isinstance(stratum, Stratum) else stratum
        return P.depth_of(sid)
    return max((P.depth_of(s.id) for s in P.strata), default=0)


@dataclass(frozen=True)
class StratifiedLink:
    complex: SimplicialComplex
    filtration: Filtration
    dimension: int
    stratum: int
    center: tuple


def _sample_indices(count, samples):
    if count <= samples:
        return list(range(count))
    picks = {0, count // 2, count - 1}
    return sorted(picks)[:samples]


def stratum_link(K, F, Y, poset=None, samples=LINK_SAMPLES):
    """
    Link of a singular stratum as a stratified complex.

    The link is taken at a d-simplex (d = dim Y) all of whose vertices lie
    in Y, restricted to vertices of strata above Y; for a point stratum
    this is the full subcomplex of the vertex link on those vertices.
    Up to `samples` such simplices are compared by their lower middle
    intersection homology ranks.

    Parameters
    ----------
    K : SimplicialComplex
        Already subdivided so that every skeleton is full.
    F : Filtration
    Y : Stratum
    poset : StrataPoset, optional
        Reused when given.
    samples : int, optional

    Returns
    -------
    StratifiedLink
    """
    from .ih_engine import ih_ranks, middle_perversities

    if poset is None:
        poset = validate_filtration(K, F)
    n, d = K.n, Y.dimension
    if d == n:
        raise InvalidStratum(f"stratum {Y.label} is regular; links are only formed for singular strata")
    if not is_full(K, F):
        raise NotFullSubcomplex("skeleta are not full subcomplexes; subdivide first")

    own = set(Y.vertices)
    centers = sorted(s for s in Y.simplices if len(s) == d + 1 and set(s) <= own)
    if not centers:
        raise NoVertexInStratum(
            f"stratum {Y.label} has no {d}-simplex spanned by its own vertices"
        )

    owner = poset.stratum_of_vertex()
    up = set(poset.above(Y.id))
    up_vertices = [v for v in K.vertices if owner.get(v) in up]
    levels = F.vertex_levels(K)
    f = n - d - 1

    links = []
    for idx in _sample_indices(len(centers), samples):
        tau = centers[idx]
        try:
            L = K.link(tau, vertices=up_vertices, name=f"{K.name}:link{Y.label}")
        except (NonPure, MalformedInput) as e:
            raise LinkDimensionMismatch(f"link of {Y.label} at {list(tau)} is not pure: {e}")
        if L.n != f:
            raise LinkDimensionMismatch(
                f"link of {Y.label} has dimension {L.n}, expected {f}"
            )
        FL = filtration_from_vertex_levels(L, {v: levels[v] - d - 1 for v in L.vertices})
        links.append((tau, L, FL))

    if len(links) > 1:
        pm = middle_perversities(f)[0]
        ranks = [ih_ranks(L, FL, pm).ranks for _, L, FL in links]
        if any(r != ranks[0] for r in ranks[1:]):
            raise LinkInconsistent(
                f"sample links of stratum {Y.label} have IH ranks {ranks}"
            )

    tau, L, FL = links[0]
    logging.info(
        f"Link of stratum {Y.label} (dim {d}) at {list(tau)}: f-vector {L.f_vector}"
    )
    return StratifiedLink(L, FL, f, Y.id, tau)


def cone(K, F=None):
    """
    Cone on K with a new apex vertex; the apex forms the new point stratum
    and X_j(cone) = cone(X_{j-1}(K)) for j >= 1.
    """
    F = F or trivial_filtration(K)
    apex = max(K.vertices) + 1
    C = SimplicialComplex([f + (apex,) for f in K.facets], name=f"C({K.name})")
    skeleta = [frozenset({(apex,)})]
    for j in range(1, C.n):
        lower = F.skeleton(j - 1)
        sk = {(apex,)}
        for s in lower:
            sk.add(s)
            sk.add(s + (apex,))
        skeleta.append(frozenset(sk))
    return C, Filtration(C.n, tuple(skeleta))


def suspension(K, F=None):
    """
    Suspension of K with poles max+1 and max+2; the poles form X_0 and
    X_j(ΣK) is the suspension of X_{j-1}(K).
    """
    F = F or trivial_filtration(K)
    north, south = max(K.vertices) + 1, max(K.vertices) + 2
    facets = [f + (north,) for f in K.facets] + [f + (south,) for f in K.facets]
    S = SimplicialComplex(facets, name=f"S({K.name})")
    skeleta = [frozenset({(north,), (south,)})]
    for j in range(1, S.n):
        lower = F.skeleton(j - 1)
        sk = {(north,), (south,)}
        for s in lower:
            sk.update({s, s + (north,), s + (south,)})
        skeleta.append(frozenset(sk))
    return S, Filtration(S.n, tuple(skeleta))


def _staircase(sigma, tau):
    """Monotone lattice paths triangulating sigma x tau (as index pairs)."""
    p, q = len(sigma) - 1, len(tau) - 1
    out = []
    for ups in combinations(range(p + q), q):
        i = j = 0
        path = [(sigma[0], tau[0])]
        for step in range(p + q):
            if step in ups:
                j += 1
            else:
                i += 1
            path.append((sigma[i], tau[j]))
        out.append(path)
    return out


def product_with_manifold(K, M, F=None):
    """
    Staircase triangulation of |K| x |M| with X_j = X_{j - dim M}(K) x M.
    Vertex (a, b) gets id ia * |V(M)| + ib.
    """
    F = F or trivial_filtration(K)
    ka = {v: i for i, v in enumerate(K.vertices)}
    mb = {v: i for i, v in enumerate(M.vertices)}
    width = len(M.vertices)

    def vid(a, b):
        return ka[a] * width + mb[b]

    facets = []
    for sigma, tau in product(K.facets, M.facets):
        for path in _staircase(sigma, tau):
            facets.append([vid(a, b) for a, b in path])
    P = SimplicialComplex(facets, name=f"{K.name}x{M.name}")

    inverse = {vid(a, b): a for a in K.vertices for b in M.vertices}
    m = M.n
    skeleta = []
    for j in range(P.n):
        if j - m < 0:
            skeleta.append(frozenset())
            continue
        base = F.skeleton(j - m)
        skeleta.append(
            frozenset(
                s for s in P.all_simplices()
                if tuple(sorted({inverse[v] for v in s})) in base
            )
        )
    return P, Filtration(P.n, tuple(skeleta))
