import numpy as np
import pytest

from wittkit.complex_core import SimplicialComplex, barycentric_subdivide, orient
from wittkit.errors import (
    NonOrientable,
    NotManifoldInput,
    UnsupportedDepth,
    WrongDimensionParity,
)
from wittkit.ih_engine import middle_perversities
from wittkit import library
from wittkit.library import boundary_of_simplex
from wittkit.stratification import suspension, transport_filtration, trivial_filtration
from wittkit.witt_signature import (
    duality_check,
    inertia,
    intersection_pairing,
    manifold_signature_oracle,
    signature,
    signature_of_form,
    witt_check,
)


def test_witt_suspended_sphere(sigma_s2):
    report = witt_check(*sigma_s2)
    assert report.witt
    assert [e.middle_rank for e in report.entries] == [0, 0]
    assert all(e.parity == "even" for e in report.entries)


def test_witt_suspended_torus(sigma_t2):
    report = witt_check(*sigma_t2)
    assert not report.witt
    assert [e.middle_rank for e in report.entries] == [2, 2]
    doc = report.to_json()
    assert doc["witt"] is False
    assert doc["strata"][0]["label"] == "0.0"


def test_witt_suspended_cp2(sigma_cp2):
    report = witt_check(*sigma_cp2)
    assert not report.witt
    assert {e.middle_rank for e in report.entries} == {1}


def test_odd_links_pass():
    K, F = suspension(boundary_of_simplex(2))
    report = witt_check(K, F)
    assert report.witt
    assert all(e.middle_rank is None for e in report.entries)
    assert report.entries[0].parity == "odd"


def test_manifold_is_trivially_witt(torus):
    report = witt_check(torus, trivial_filtration(torus))
    assert report.witt
    assert report.entries == ()


@pytest.mark.slow
def test_witt_double_suspension(sigma_sigma_t2_sd):
    report = witt_check(*sigma_sigma_t2_sd)
    assert not report.witt
    failing = [e.label for e in report.entries if not e.passed]
    assert sorted(failing) == ["1.0", "1.1"]


def test_duality(sigma_t2, sigma_s2):
    K, F = sigma_t2
    report = duality_check(K, F, middle_perversities(3)[0])
    assert report.dual
    assert not report.witt
    assert report.middle_self_dual is None
    assert report.passed
    K, F = sigma_s2
    report = duality_check(K, F, middle_perversities(3)[0])
    assert report.witt
    assert report.middle_self_dual


def test_duality_beyond_three_dimensions(sigma_cp2, cp2_marked):
    report = duality_check(*sigma_cp2, middle_perversities(5)[0])
    assert report.dual
    assert not report.witt
    assert report.passed
    report = duality_check(*cp2_marked, middle_perversities(4)[0])
    assert report.dual
    assert report.witt
    assert report.middle_self_dual


@pytest.mark.parametrize(
    "build",
    [library.sigma_s2, library.sigma_t2, lambda: suspension(boundary_of_simplex(2))],
    ids=["sigma_s2", "sigma_t2", "sigma_circle"],
)
def test_witt_verdict_survives_subdivision(build):
    K, F = build()
    sd = barycentric_subdivide(K, 1)
    coarse = witt_check(K, F)
    fine = witt_check(sd, transport_filtration(F, sd))
    assert fine.witt == coarse.witt
    assert [e.middle_rank for e in fine.entries] == [e.middle_rank for e in coarse.entries]


def test_inertia():
    assert inertia([[1, 0], [0, -1]]) == (1, 1, 0)
    assert inertia([[0, 1], [1, 0]]) == (1, 1, 0)
    assert inertia([[2, 1], [1, 2]]) == (2, 0, 0)
    assert inertia([[1, 1], [1, 1]]) == (1, 0, 1)
    assert inertia([]) == (0, 0, 0)
    assert signature_of_form([[0, 0, 1], [0, 0, 0], [1, 0, 0]]) == 0


def test_inertia_matches_eigenvalues():
    rng = np.random.default_rng(11)
    for _ in range(100):
        size = int(rng.integers(1, 6))
        a = rng.integers(-3, 4, size=(size, size))
        sym = a + a.T
        sym[rng.random((size, size)) < 0.3] = 0
        sym = np.triu(sym) + np.triu(sym, 1).T
        pos, neg, null = inertia(sym.tolist())
        eig = np.linalg.eigvalsh(sym.astype(float))
        assert pos == int(np.sum(eig > 1e-9))
        assert neg == int(np.sum(eig < -1e-9))
        assert pos + neg + null == size


def test_signature_cp2(cp2):
    oriented = orient(cp2)
    assert signature(cp2, oriented=oriented) == 1
    assert signature(cp2, oriented=oriented.reversed()) == -1
    pairing = intersection_pairing(cp2, oriented=oriented)
    assert pairing.middle_rank == 1
    assert pairing.matrix[0][0] > 0
    assert not pairing.skew


def test_signature_s2_x_s2(s2xs2):
    pairing = intersection_pairing(s2xs2)
    assert pairing.middle_rank == 2
    assert signature_of_form(pairing.matrix) == 0
    assert signature(s2xs2) == 0


def test_signature_s4(sphere4):
    pairing = intersection_pairing(sphere4)
    assert pairing.matrix == ()
    assert signature(sphere4) == 0


def test_signature_marked_cp2(cp2_marked):
    assert signature(*cp2_marked) == 1


def test_torus_pairing_is_skew(torus):
    pairing = intersection_pairing(torus)
    assert pairing.skew
    assert pairing.middle_rank == 2
    m = pairing.matrix
    assert all(m[i][j] == -m[j][i] for i in range(2) for j in range(2))
    assert m[0][1] != 0
    assert signature(torus) == 0
    assert pairing.to_json()["skew"] is True


def test_pairing_errors(sigma_t2, sigma_sigma_t2, rp2):
    with pytest.raises(NonOrientable):
        intersection_pairing(rp2)
    with pytest.raises(WrongDimensionParity):
        intersection_pairing(*sigma_t2)
    with pytest.raises(UnsupportedDepth):
        intersection_pairing(*sigma_sigma_t2)


def test_manifold_oracle(cp2, s2xs2, torus):
    oriented = orient(cp2)
    assert manifold_signature_oracle(cp2, oriented) == signature(cp2, oriented=oriented)
    assert manifold_signature_oracle(s2xs2) == 0
    assert manifold_signature_oracle(torus) == 0
    assert manifold_signature_oracle(boundary_of_simplex(5)) == 0


def test_oracle_rejects_singular_input(sigma_t2):
    K, _ = sigma_t2
    with pytest.raises(NotManifoldInput):
        manifold_signature_oracle(K)
    wedge = SimplicialComplex(
        [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 4, 5], [0, 4, 6], [0, 5, 6], [4, 5, 6]]
    )
    with pytest.raises(NotManifoldInput):
        manifold_signature_oracle(wedge)
