"""
Resolution of a stratified space into boundary hypersurfaces with
iterated fibration data, and the blowdown back to the strata poset.

Every singular stratum Y becomes a hypersurface H_Y fibred over a base of
dimension dim Y with fibre the resolution of the link of Y. Two
hypersurfaces meet exactly when their strata are frontier-comparable, and
the one with the smaller fibre sits lower in the order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import InvalidTree
from .stratification import Stratum, StrataPoset, depth, stratum_link, validate_filtration


@dataclass(frozen=True)
class FibrationDatum:
    stratum: int
    label: str
    base_dim: int
    fibre: "ResolutionTree"
    fibre_dim: int
    adjacent_regular: tuple = ()
    base_depth: int = 0


@dataclass(frozen=True)
class ResolutionTree:
    """
    Boundary hypersurfaces of the resolved space.

    ``meets`` holds the unordered pairs of hypersurface ids whose strata
    are frontier-comparable; ``regular`` lists (id, label) of the regular
    components the hypersurfaces bound.
    """

    n: int
    hypersurfaces: tuple
    meets: frozenset = frozenset()
    regular: tuple = ()
    depth: int = 0
    name: str = ""

    def datum(self, hid):
        for h in self.hypersurfaces:
            if h.stratum == hid:
                return h
        raise KeyError(hid)

    @property
    def order(self):
        """Pairs (a, b) with a < b: the hypersurfaces meet and dim F_a < dim F_b."""
        out = set()
        for a, b in self.meets:
            fa, fb = self.datum(a).fibre_dim, self.datum(b).fibre_dim
            if fa < fb:
                out.add((a, b))
            elif fb < fa:
                out.add((b, a))
        return frozenset(out)

    def below(self, hid):
        return sorted(a for a, b in self.order if b == hid)

    def above(self, hid):
        return sorted(b for a, b in self.order if a == hid)


def _base_depth(poset, sid):
    memo = {}

    def _down(i):
        if i not in memo:
            lows = poset.below(i)
            memo[i] = 1 + max(_down(y) for y in lows) if lows else 0
        return memo[i]

    return _down(sid)


def resolve(K, F, poset=None):
    """
    Build the resolution tree of (K, F), recursing into the stratified
    links for the fibres.

    Parameters
    ----------
    K : SimplicialComplex
        With full skeleta.
    F : Filtration
    poset : StrataPoset, optional

    Returns
    -------
    ResolutionTree
        Hypersurfaces in (depth, stratum id) order.
    """
    poset = poset or validate_filtration(K, F)
    regular_ids = {s.id for s in poset.regular_strata()}
    data = []
    for Y in poset.singular_strata():
        link = stratum_link(K, F, Y, poset=poset)
        fibre = resolve(link.complex, link.filtration)
        data.append(
            FibrationDatum(
                stratum=Y.id,
                label=Y.label,
                base_dim=Y.dimension,
                fibre=fibre,
                fibre_dim=link.dimension,
                adjacent_regular=tuple(z for z in poset.above(Y.id) if z in regular_ids),
                base_depth=_base_depth(poset, Y.id),
            )
        )
    singular_ids = {h.stratum for h in data}
    meets = frozenset(
        (y, z) for y, z in poset.relation if y in singular_ids and z in singular_ids
    )
    data.sort(key=lambda h: (poset.depth_of(h.stratum), h.stratum))
    tree = ResolutionTree(
        n=K.n,
        hypersurfaces=tuple(data),
        meets=meets,
        regular=tuple((s.id, s.label) for s in poset.regular_strata()),
        depth=depth(poset),
        name=K.name,
    )
    logging.info(
        f"Resolved {K.name!r}: {len(data)} hypersurface(s), depth {tree.depth}"
    )
    return tree


def hypersurface_depth(T, hid):
    """1 + the longest chain of hypersurfaces below `hid` in the order."""
    memo = {}

    def _depth(h):
        if h not in memo:
            lows = T.below(h)
            memo[h] = 1 + max((_depth(b) for b in lows), default=0)
        return memo[h]

    return _depth(hid)


@dataclass(frozen=True)
class IFSReport:
    distinct_fibres: bool
    extremes_closed: bool
    depth_consistent: bool
    failures: tuple = field(default=())

    @property
    def passed(self):
        return self.distinct_fibres and self.extremes_closed and self.depth_consistent

    def to_json(self):
        return {
            "distinct_fibres": self.distinct_fibres,
            "extremes_closed": self.extremes_closed,
            "depth_consistent": self.depth_consistent,
            "passed": self.passed,
            "failures": list(self.failures),
        }


def validate_ifs(T):
    """
    Check the iterated fibration structure of a resolution tree.

    a) meeting hypersurfaces have different fibre dimensions;
    b) minimal hypersurfaces have closed (depth 0) fibres and maximal ones
       closed bases;
    c) hypersurface depths agree with the depth of the fibres and grow
       along the order, and the tree depth is the largest of them.
    """
    failures = []

    equal = sorted(
        (a, b) for a, b in T.meets if T.datum(a).fibre_dim == T.datum(b).fibre_dim
    )
    for a, b in equal:
        failures.append(f"hypersurfaces {a} and {b} meet with equal fibre dimension")

    extremes = True
    for h in T.hypersurfaces:
        if not T.below(h.stratum) and h.fibre.depth != 0:
            extremes = False
            failures.append(f"minimal hypersurface {h.stratum} has a singular fibre")
        if not T.above(h.stratum) and h.base_depth != 0:
            extremes = False
            failures.append(f"maximal hypersurface {h.stratum} has a singular base")

    consistent = True
    depths = {h.stratum: hypersurface_depth(T, h.stratum) for h in T.hypersurfaces}
    for h in T.hypersurfaces:
        if h.fibre.depth != depths[h.stratum] - 1:
            consistent = False
            failures.append(
                f"hypersurface {h.stratum} has depth {depths[h.stratum]} "
                f"but its fibre has depth {h.fibre.depth}"
            )
        if h.base_dim + h.fibre_dim != T.n - 1:
            consistent = False
            failures.append(
                f"hypersurface {h.stratum}: base {h.base_dim} + fibre {h.fibre_dim} != {T.n - 1}"
            )
    for a, b in T.order:
        if not depths[a] < depths[b]:
            consistent = False
            failures.append(f"order {a} < {b} does not increase depth")
    if max(depths.values(), default=0) != T.depth:
        consistent = False
        failures.append(f"tree depth {T.depth} differs from hypersurface depths")

    report = IFSReport(not equal, extremes, consistent, tuple(failures))
    logging.info(f"Iterated fibration structure of {T.name!r}: passed={report.passed}")
    return report


def blowdown(T):
    """
    Collapse every hypersurface onto its base and rebuild the labelled
    strata poset (the minimal blowdown; stratum simplices are not
    reconstructed).

    Raises
    ------
    InvalidTree
        If the tree fails validate_ifs or its ids do not describe a poset.
    """
    report = validate_ifs(T)
    if not report.passed:
        raise InvalidTree("; ".join(report.failures))

    strata = [Stratum(h.stratum, h.base_dim, frozenset(), h.label) for h in T.hypersurfaces]
    strata += [Stratum(sid, T.n, frozenset(), label) for sid, label in T.regular]
    strata.sort(key=lambda s: s.id)
    if [s.id for s in strata] != list(range(len(strata))):
        raise InvalidTree(f"stratum ids {[s.id for s in strata]} are not 0..{len(strata) - 1}")

    regular_ids = {sid for sid, _ in T.regular}
    relation = set()
    for a, b in T.order:
        # larger fibre means the smaller stratum lies in the closure of the other
        relation.add((b, a))
    for h in T.hypersurfaces:
        for z in h.adjacent_regular:
            if z not in regular_ids:
                raise InvalidTree(f"hypersurface {h.stratum} bounds unknown component {z}")
            relation.add((h.stratum, z))
    if not T.hypersurfaces and len(T.regular) == 0:
        raise InvalidTree("tree has no strata")

    poset = StrataPoset(T.n, tuple(strata), frozenset(relation))
    logging.info(f"Blowdown of {T.name!r}: {len(strata)} strata, depth {depth(poset)}")
    return poset


@dataclass(frozen=True)
class BoundaryDefiningLedger:
    symbols: tuple
    factors: tuple

    @property
    def rho(self):
        return " * ".join(self.symbols) if self.symbols else "1"

    def to_json(self):
        return {"symbols": list(self.symbols), "rho": self.rho, "factors": list(self.factors)}


def boundary_defining_ledger(T):
    """One formal symbol x_id per hypersurface; rho is their product."""
    factors = tuple(
        h.stratum
        for h in sorted(
            T.hypersurfaces, key=lambda h: (hypersurface_depth(T, h.stratum), h.stratum)
        )
    )
    return BoundaryDefiningLedger(tuple(f"x_{i}" for i in factors), factors)


def tree_to_json(T):
    ledger = boundary_defining_ledger(T)
    return {
        "hypersurfaces": [
            {
                "stratum": h.stratum,
                "label": h.label,
                "base_dim": h.base_dim,
                "fibre_dim": h.fibre_dim,
                "fibre": tree_to_json(h.fibre),
            }
            for h in T.hypersurfaces
        ],
        "depth": T.depth,
        "rho_factors": list(ledger.factors),
    }
