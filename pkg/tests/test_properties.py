"""
Randomised invariance checks: relabelling vertices, exact against float
root computation, the adjoint reflection, allowability, boundaries and
congruence of forms.
"""

from fractions import Fraction

import numpy as np
import pytest

from wittkit.complex_core import (
    SimplicialComplex,
    barycentric_subdivide,
    boundary_matrix,
    homology_ranks,
    orient,
)
from wittkit.ih_engine import Perversity, allowable_simplices, ih_ranks, middle_perversities
from wittkit.indicial_spectral import (
    LinkSpectrum,
    SpectralMode,
    adjoint_reflect,
    indicial_roots,
)
from wittkit.stratification import Filtration, filtration_from_vertex_levels, validate_filtration
from wittkit.witt_signature import inertia, signature_of_form

CASES = 100


def _relabel(K, F, rng):
    perm = rng.permutation(len(K.vertices)) + 100
    mapping = {v: int(perm[i]) for i, v in enumerate(K.vertices)}

    def move(s):
        return tuple(sorted(mapping[v] for v in s))

    L = SimplicialComplex([move(f) for f in K.facets], name=K.name)
    G = Filtration(F.n, tuple(frozenset(move(s) for s in sk) for sk in F.skeleta))
    return L, G


def test_ih_is_invariant_under_relabelling(sigma_t2):
    K, F = sigma_t2
    lower, upper = middle_perversities(3)
    rng = np.random.default_rng(2024)
    for _ in range(CASES):
        L, G = _relabel(K, F, rng)
        P = validate_filtration(L, G)
        assert [s.dimension for s in P.strata] == [0, 0, 3]
        assert ih_ranks(L, G, lower).ranks == (1, 2, 0, 1)
        assert ih_ranks(L, G, upper).ranks == (1, 0, 2, 1)


def test_orientation_survives_relabelling(torus):
    rng = np.random.default_rng(5)
    for _ in range(CASES):
        L, _ = _relabel(torus, Filtration(2, (frozenset(), frozenset())), rng)
        assert orient(L).is_consistent()
        assert homology_ranks(L) == (1, 2, 1)


def _random_spectrum(rng):
    f0 = int(rng.integers(1, 5))
    modes = []
    for _ in range(int(rng.integers(1, 5))):
        degree = int(rng.integers(0, f0 + 1))
        lam = Fraction(int(rng.integers(0, 12)), int(rng.integers(1, 5)))
        modes.append(SpectralMode(degree, lam, int(rng.integers(1, 3))))
    return LinkSpectrum(f0, tuple(modes))


def test_exact_and_float_roots_agree():
    rng = np.random.default_rng(17)
    for _ in range(CASES):
        S = _random_spectrum(rng)
        a = Fraction(int(rng.integers(1, 8)), 8)
        exact = indicial_roots(S, a)
        approx = indicial_roots(S, float(a), tolerance=1e-9)
        assert exact.exact and not approx.exact
        assert approx.numeric == pytest.approx(exact.numeric, abs=1e-9)
        assert [r.families for r in approx.roots] == [r.families for r in exact.roots]


def test_adjoint_reflection_is_an_involution():
    rng = np.random.default_rng(3)
    for _ in range(CASES):
        zeta = Fraction(int(rng.integers(-50, 50)), int(rng.integers(1, 9)))
        f0 = int(rng.integers(0, 8))
        a = Fraction(int(rng.integers(1, 8)), 8)
        assert adjoint_reflect(adjoint_reflect(zeta, f0, a), f0, a) == zeta


def _gm_perversities(n):
    values = [(0,)]
    for _ in range(n - 2):
        values = [v + (v[-1] + step,) for v in values for step in (0, 1)]
    return [Perversity(n, v) for v in values]


def _random_pure_complex(rng, n, vertices, most):
    count = int(rng.integers(1, most + 1))
    facets = {
        tuple(sorted(rng.choice(vertices, n + 1, replace=False).tolist())) for _ in range(count)
    }
    return SimplicialComplex(sorted(facets))


def test_allowability_is_monotone_in_the_perversity():
    rng = np.random.default_rng(11)
    perversities = _gm_perversities(4)
    for _ in range(CASES):
        K = _random_pure_complex(rng, 4, 9, 7)
        F = filtration_from_vertex_levels(K, {v: int(rng.integers(0, 5)) for v in K.vertices})
        i, j = sorted(int(x) for x in rng.choice(len(perversities), 2))
        p, q = perversities[i], perversities[j]
        assert p <= q
        for degree in range(5):
            assert allowable_simplices(K, F, p, degree) <= allowable_simplices(K, F, q, degree)


def test_boundary_squares_to_zero_on_random_complexes():
    rng = np.random.default_rng(29)
    for _ in range(CASES):
        n = int(rng.integers(2, 4))
        K = _random_pure_complex(rng, n, n + 4, 4)
        for L in (K, barycentric_subdivide(K, 1)):
            for k in range(2, n + 1):
                assert (boundary_matrix(L, k - 1) @ boundary_matrix(L, k)).is_zero()


def _random_change_of_basis(rng, size):
    lower = np.array(
        [
            [Fraction(int(rng.integers(-3, 4))) if c < r else Fraction(int(r == c)) for c in range(size)]
            for r in range(size)
        ],
        dtype=object,
    )
    scale = np.diag([Fraction(int(rng.integers(1, 5)) * int(rng.choice([-1, 1])), int(rng.integers(1, 4))) for _ in range(size)])
    order = np.eye(size, dtype=int)[rng.permutation(size)]
    return order.astype(object) @ lower @ scale.astype(object)


def test_signature_is_a_congruence_invariant():
    rng = np.random.default_rng(41)
    for _ in range(CASES):
        size = int(rng.integers(1, 6))
        half = rng.integers(-4, 5, size=(size, size))
        M = np.array((half + half.T).tolist(), dtype=object)
        P = _random_change_of_basis(rng, size)
        moved = (P.T @ M @ P).tolist()
        assert signature_of_form(moved) == signature_of_form(M.tolist())
        assert inertia(moved)[2] == inertia(M.tolist())[2]
