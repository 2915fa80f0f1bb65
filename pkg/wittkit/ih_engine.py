"""
Intersection homology of a filtered simplicial complex over the rationals.

An i-simplex sigma is allowable for a perversity p when, for every
codimension k in 2..n,

    dim(sigma ∩ X_{n-k}) <= i - k + p(k),       dim(∅) = -inf.

With full skeleta sigma ∩ X_{n-k} is the face spanned by the vertices of
sigma at level <= n - k. The allowable chain complex is

    IC_i = {xi in span(A_i) : boundary(xi) in span(A_{i-1})}

and the ranks come from

    rank IH_i = |A_i| - rank d_i[:, A_i] - rank d_{i+1}[:, A_{i+1}]
                + rank d_{i+1}[N_i, A_{i+1}]

where N_i are the non-allowable i-simplices.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
from dataclasses import dataclass, field

from .complex_core import barycentric_subdivide, boundary_matrix
from .errors import InvalidPerversity, NotFullSubcomplex
from .sparse import EchelonBasis
from .stratification import is_full, transport_filtration
from .utils import format_rational


@dataclass(frozen=True)
class Perversity:
    """Values p(2), ..., p(n) of a Goresky-MacPherson perversity."""

    n: int
    values: tuple
    name: str = "custom"

    def __post_init__(self):
        if len(self.values) != max(self.n - 1, 0):
            raise InvalidPerversity(
                f"perversity for n={self.n} needs {self.n - 1} values, got {len(self.values)}"
            )
        if any(v < 0 for v in self.values):
            raise InvalidPerversity("perversity values must be non-negative")
        if self.values and self.values[0] != 0:
            raise InvalidPerversity("p(2) must be 0")
        for a, b in zip(self.values, self.values[1:]):
            if not a <= b <= a + 1:
                raise InvalidPerversity(f"growth step {a} -> {b} not in {{0, 1}}")

    def __call__(self, k):
        return self.values[k - 2]

    def __le__(self, other):
        return self.n == other.n and all(a <= b for a, b in zip(self.values, other.values))

    def to_json(self):
        return {"name": self.name, "values": list(self.values)}


def middle_perversities(n):
    """Lower middle m(k) = floor((k-2)/2) and upper middle ceil((k-2)/2)."""
    lower = tuple((k - 2) // 2 for k in range(2, n + 1))
    upper = tuple(-((2 - k) // 2) for k in range(2, n + 1))
    return (
        Perversity(n, lower, "lower-middle"),
        Perversity(n, upper, "upper-middle"),
    )


def zero_perversity(n):
    return Perversity(n, tuple(0 for _ in range(2, n + 1)), "zero")


def top_perversity(n):
    return Perversity(n, tuple(k - 2 for k in range(2, n + 1)), "top")


def complementary(p):
    """The perversity q with p + q = t."""
    q = tuple(k - 2 - p(k) for k in range(2, p.n + 1))
    names = {
        "lower-middle": "upper-middle",
        "upper-middle": "lower-middle",
        "zero": "top",
        "top": "zero",
    }
    return Perversity(p.n, q, names.get(p.name, "custom"))


def parse_perversity(text, n):
    """
    Parse ``lower-middle | upper-middle | zero | top | custom:v2,v3,...,vn``.
    """
    text = text.strip()
    lower, upper = middle_perversities(n)
    named = {
        "lower-middle": lower,
        "upper-middle": upper,
        "zero": zero_perversity(n),
        "top": top_perversity(n),
    }
    if text in named:
        return named[text]
    if text.startswith("custom:"):
        body = text[len("custom:") :]
        try:
            values = tuple(int(v) for v in body.split(",")) if body else ()
        except ValueError:
            raise InvalidPerversity(f"cannot parse perversity values {body!r}")
        return Perversity(n, values, "custom")
    raise InvalidPerversity(f"unknown perversity {text!r}")


def _require_full(K, F):
    if not F.is_trivial and not is_full(K, F):
        raise NotFullSubcomplex("skeleta are not full subcomplexes; subdivide first")


def _allowable_mask(K, levels, p, i):
    """Boolean per i-simplex (lexicographic order)."""
    n = K.n
    mask = []
    for sigma in K.simplices(i):
        ok = True
        for k in range(2, n + 1):
            count = sum(1 for v in sigma if levels[v] <= n - k)
            if count and count - 1 > i - k + p(k):
                ok = False
                break
        mask.append(ok)
    return mask


def allowable_simplices(K, F, p, i):
    """Set of allowable i-simplices."""
    _require_full(K, F)
    if not 0 <= i <= K.n:
        return set()
    levels = F.vertex_levels(K)
    return {s for s, ok in zip(K.simplices(i), _allowable_mask(K, levels, p, i)) if ok}


@dataclass(frozen=True)
class ICComplex:
    """
    Allowable chain complex: per degree the allowable simplex indices and a
    basis of IC_i as sparse vectors over all i-simplices.
    """

    allowable: tuple
    bases: tuple = field(repr=False)

    @property
    def dimensions(self):
        return tuple(len(b) for b in self.bases)


def _masks(K, F, p):
    levels = F.vertex_levels(K)
    return [_allowable_mask(K, levels, p, i) for i in range(K.n + 1)]


def _restricted(K, masks, i):
    """
    d_i[:, A_i] and d_i[N_{i-1}, A_i] with the index lists used.
    """
    d = boundary_matrix(K, i)
    cols = [j for j, ok in enumerate(masks[i]) if ok]
    rows = list(range(d.rows))
    bad_rows = [r for r, ok in enumerate(masks[i - 1]) if not ok] if i >= 1 else []
    return d.submatrix(rows, cols), d.submatrix(bad_rows, cols), cols


def intersection_chain_complex(K, F, p):
    """
    Basis of every IC_i as the kernel of d_i on allowable chains followed
    by projection onto non-allowable (i-1)-simplices.
    """
    _require_full(K, F)
    masks = _masks(K, F, p)
    bases = []
    allowable = []
    for i in range(K.n + 1):
        _, projected, cols = _restricted(K, masks, i)
        kernel = projected.nullspace()
        bases.append(tuple({cols[j]: v for j, v in vec.items()} for vec in kernel))
        allowable.append(tuple(cols))
    for i in range(1, K.n + 1):
        d = boundary_matrix(K, i)
        for xi in bases[i]:
            image = d.apply(xi)
            assert all(masks[i - 1][r] for r in image), "boundary left the allowable chains"
    return ICComplex(tuple(allowable), tuple(bases))


@dataclass(frozen=True)
class IHResult:
    perversity: Perversity
    ranks: tuple
    chain_dimensions: tuple
    cycles: tuple = None

    def to_json(self, include_cycles=False, K=None):
        out = {
            "perversity": self.perversity.to_json(),
            "ranks": list(self.ranks),
            "chain_dimensions": list(self.chain_dimensions),
        }
        if include_cycles and self.cycles is not None and K is not None:
            out["cycles"] = [
                [
                    [
                        {"simplex": list(K.simplices(i)[j]), "coefficient": format_rational(v)}
                        for j, v in sorted(z.items())
                    ]
                    for z in self.cycles[i]
                ]
                for i in range(len(self.cycles))
            ]
        return out


def ih_ranks(K, F, p, cycles=False, cores=1):
    """
    Ranks of IH^p_i for i = 0..n.

    Parameters
    ----------
    K : SimplicialComplex
        Skeleta of F must be full (one barycentric subdivision suffices).
    F : Filtration
    p : Perversity
    cycles : bool, optional
        Also compute a basis of cycle representatives per degree.
    cores : int, optional
        Worker processes for the per-degree ranks.

    Returns
    -------
    IHResult
    """
    _require_full(K, F)
    n = K.n
    masks = _masks(K, F, p)
    jobs = []
    for i in range(n + 1):
        full, projected, _ = _restricted(K, masks, i)
        jobs.append((full, projected))
    # rank d_i[:, A_i] and rank d_i[N_{i-1}, A_i] per degree
    if cores > 1 and n > 0:
        with mp.Pool(cores) as pool:
            pairs = pool.map(_rank_pair, jobs)
    else:
        pairs = [_rank_pair(job) for job in jobs]
    r_full = [a for a, _ in pairs] + [0]
    r_proj = [b for _, b in pairs] + [0]

    sizes = [sum(m) for m in masks]
    ranks = tuple(sizes[i] - r_full[i] - r_full[i + 1] + r_proj[i + 1] for i in range(n + 1))
    dims = tuple(sizes[i] - r_proj[i] for i in range(n + 1))
    assert all(r >= 0 for r in ranks), f"negative IH rank {ranks}"
    logging.info(f"IH ranks of {K.name!r} for {p.name} {p.values}: {ranks}")

    basis = None
    if cycles:
        basis = tuple(ih_cycles(K, F, p, i, masks=masks) for i in range(n + 1))
        assert tuple(len(b) for b in basis) == ranks
    return IHResult(p, ranks, dims, basis)


def _rank_pair(job):
    full, projected = job
    return full.rank(), projected.rank()


def ih_cycles(K, F, p, degree, masks=None):
    """
    Cycle representatives of IH^p_degree, reduced modulo boundaries of
    allowable chains in a deterministic pivot order.

    Returns
    -------
    tuple of dict
        Sparse vectors {simplex index: Fraction} over the degree-simplices.
    """
    _require_full(K, F)
    masks = masks or _masks(K, F, p)
    i = degree
    full, _, cols = _restricted(K, masks, i)
    cycles = [{cols[j]: v for j, v in z.items()} for z in full.nullspace()]

    boundaries = []
    if i < K.n:
        d_next = boundary_matrix(K, i + 1)
        _, projected_next, cols_next = _restricted(K, masks, i + 1)
        for xi in projected_next.nullspace():
            chain = {cols_next[j]: v for j, v in xi.items()}
            image = d_next.apply(chain)
            if image:
                boundaries.append(image)

    echelon = EchelonBasis(boundaries)
    reps = []
    for z in cycles:
        residual = echelon.add(z)
        if residual:
            reps.append(residual)
    return tuple(reps)


@dataclass(frozen=True)
class ComparisonReport:
    p: Perversity
    q: Perversity
    ranks_p: tuple
    ranks_q: tuple

    @property
    def equal(self):
        return tuple(a == b for a, b in zip(self.ranks_p, self.ranks_q))

    @property
    def passed(self):
        return all(self.equal)

    @property
    def differing_degrees(self):
        return [i for i, ok in enumerate(self.equal) if not ok]

    def to_json(self):
        return {
            "p": self.p.to_json(),
            "q": self.q.to_json(),
            "ranks_p": list(self.ranks_p),
            "ranks_q": list(self.ranks_q),
            "equal": list(self.equal),
            "passed": self.passed,
        }


def ih_compare(K, F, p, q, cores=1):
    a = ih_ranks(K, F, p, cores=cores)
    b = ih_ranks(K, F, q, cores=cores)
    return ComparisonReport(p, q, a.ranks, b.ranks)


def ih_stability_check(K, F, p, extra=1, cores=1):
    """
    Compare IH ranks before and after `extra` further subdivisions.

    Returns
    -------
    (bool, tuple, tuple)
        Verdict, ranks on the input, ranks on the finer subdivision.
    """
    before = ih_ranks(K, F, p, cores=cores).ranks
    finer = barycentric_subdivide(K, extra)
    after = ih_ranks(finer, transport_filtration(F, finer), p, cores=cores).ranks
    logging.info(f"IH stability under {extra} extra subdivision(s): {before} vs {after}")
    return before == after, before, after
