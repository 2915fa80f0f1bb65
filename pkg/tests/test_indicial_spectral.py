import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from wittkit.errors import InvalidArgument, InvalidSpectrum, MalformedInput
from wittkit.indicial_spectral import (
    LinkSpectrum,
    SpectralMode,
    WeightWindow,
    adjoint_reflect,
    bessel_mode_excluded,
    bessel_order,
    bessel_small_t_exponent,
    check_gap_condition,
    circle_spectrum,
    delta0,
    finite_difference_circle_eigenvalues,
    in_weighted_l2,
    indicial_roots,
    load_spectrum,
    normal_injectivity_certificate,
    reflection_defect,
    rescale_for_gap,
    scale_spectrum,
    spectrum_to_json,
    weight_interval_clear,
    witt_spectral_check,
)


def test_load_spectrum(spectrum_document):
    S = load_spectrum(spectrum_document)
    assert S.f0 == 2
    assert S.harmonic_betti == (1, 0, 1)
    assert S.is_exact
    assert S.degrees_present == [0, 2]
    assert spectrum_to_json(S)["harmonic_betti"] == [1, 0, 1]


def test_load_spectrum_errors(spectrum_document):
    with pytest.raises(MalformedInput):
        load_spectrum([])
    with pytest.raises(MalformedInput):
        load_spectrum({"dim_link": "2", "modes": []})
    with pytest.raises(MalformedInput):
        load_spectrum({"dim_link": 2, "modes": [{"degree": 0}]})
    with pytest.raises(InvalidSpectrum):
        load_spectrum({"dim_link": 2, "modes": [{"degree": 3, "lambda": 1}]})
    with pytest.raises(InvalidSpectrum):
        load_spectrum({"dim_link": 2, "modes": [{"degree": 0, "lambda": "-1/2"}]})
    with pytest.raises(InvalidSpectrum):
        load_spectrum({**spectrum_document, "harmonic_betti": [1, 1, 1]})


def test_harmonic_roots(harmonic_spectrum):
    R = indicial_roots(harmonic_spectrum, Fraction(1, 2))
    assert R.exact
    assert R.values == [-3, -2, -1, 0]
    assert all(r.families == (1,) for r in R.roots)
    assert [float(x) for x in R.shifted] == [-1.5, -0.5, 0.5, 1.5]
    assert R.weight_in_range
    assert reflection_defect(R) == [0]


def test_harmonic_roots_float(harmonic_spectrum):
    R = indicial_roots(harmonic_spectrum, 0.5)
    assert not R.exact
    assert R.numeric == pytest.approx([-3.0, -2.0, -1.0, 0.0])
    assert reflection_defect(R) == [0.0]
    with pytest.raises(InvalidArgument):
        indicial_roots(harmonic_spectrum, 0.5, exact=True)


def test_middle_harmonic_forms_give_no_roots():
    S = LinkSpectrum(2, (SpectralMode(1, Fraction(0), 1),))
    assert indicial_roots(S, Fraction(1, 2)).roots == ()
    assert not witt_spectral_check(S)


def test_nonzero_mode_families():
    S = LinkSpectrum(2, (SpectralMode(0, 3.0, 1),))
    R = indicial_roots(S, 0.5)
    expected2 = sorted(-1.5 + s * math.sqrt(x) for x in (9.25, 5.25, 3.25) for s in (1, -1))
    expected3 = sorted(-0.5 + s * math.sqrt(x) for x in (5.25, 3.25) for s in (1, -1))
    assert sorted(R.family(2)) == pytest.approx(expected2)
    assert sorted(R.family(3)) == pytest.approx(expected3)
    assert R.family(1) == []


def test_exact_roots_are_deduplicated():
    S = LinkSpectrum(2, (SpectralMode(0, Fraction(3), 1),))
    R = indicial_roots(S, Fraction(1, 2))
    assert R.exact
    assert len(R.family(2)) == 6
    assert len(R.family(3)) == 4
    assert sympy.Rational(-3, 2) + sympy.sqrt(37) / 2 in R.values
    doc = R.to_json()
    assert len(doc["exact_roots"]) == len(doc["roots"]) == 10


def test_weight_out_of_range_is_flagged(harmonic_spectrum):
    R = indicial_roots(harmonic_spectrum, Fraction(3, 2))
    assert not R.weight_in_range
    assert R.to_json()["weight"] == "3/2"


def test_adjoint_reflection():
    assert adjoint_reflect(Fraction(-1), 2, Fraction(1, 2)) == -3
    assert adjoint_reflect(adjoint_reflect(0.25, 3, 0.1), 3, 0.1) == pytest.approx(0.25)


def test_weight_windows(harmonic_spectrum):
    half = Fraction(1, 2)
    assert weight_interval_clear(harmonic_spectrum, half, 0.0, 0.4)
    assert weight_interval_clear(harmonic_spectrum, half, 0.5, 0.3)
    assert not weight_interval_clear(harmonic_spectrum, half, 0.0, 0.6)
    window = WeightWindow(0.0, 0.6)
    shifted = indicial_roots(harmonic_spectrum, half).shifted
    assert window.hits(shifted) == [-0.5, 0.5]
    with pytest.raises(InvalidArgument):
        WeightWindow(0.0, 1.0)


def test_gap_and_rescaling():
    S = circle_spectrum(4, in_units_of_pi=True)
    assert not check_gap_condition(S)
    c = rescale_for_gap(S)
    assert c == Fraction(1, 2)
    assert check_gap_condition(scale_spectrum(S, c))
    assert witt_spectral_check(S)
    assert S.harmonic_betti == (1, 1)

    S = circle_spectrum(2, in_units_of_pi=True)
    assert check_gap_condition(S)
    assert min(m.eigenvalue for m in S.nonzero_modes) == 1
    assert rescale_for_gap(S) == 1


def test_float_circle_gap():
    S = circle_spectrum(2 * math.pi, cutoff=4)
    assert not S.is_exact
    assert check_gap_condition(S)
    assert rescale_for_gap(S) == pytest.approx(1.0)
    S = circle_spectrum(4 * math.pi, cutoff=4)
    assert rescale_for_gap(S) == pytest.approx(0.5)


def test_rescale_without_nonzero_modes(harmonic_spectrum):
    assert rescale_for_gap(harmonic_spectrum) == math.inf
    with pytest.raises(InvalidArgument):
        scale_spectrum(harmonic_spectrum, 0)


def test_circle_spectrum_errors():
    with pytest.raises(InvalidArgument):
        circle_spectrum(0)


def test_finite_difference_oracle():
    values = finite_difference_circle_eigenvalues(2 * math.pi)
    np.testing.assert_allclose(values, [0, 1, 1, 4, 4], atol=1e-3)
    coarse = finite_difference_circle_eigenvalues(2 * math.pi, grid_points=256)
    np.testing.assert_allclose(coarse, [0, 1, 1, 4, 4], atol=1e-3)


def test_finite_difference_oracle_on_longer_circle():
    values = finite_difference_circle_eigenvalues(4 * math.pi)
    np.testing.assert_allclose(values, [0, 0.25, 0.25, 1, 1], atol=1e-3)
    S = circle_spectrum(4, in_units_of_pi=True)
    smallest = min(m.eigenvalue for m in S.nonzero_modes)
    assert smallest == Fraction(1, 4)
    assert float(smallest) == pytest.approx(values[1], abs=1e-3)


def test_bessel_helpers():
    assert bessel_small_t_exponent(2) == pytest.approx(-2, abs=1e-3)
    assert bessel_small_t_exponent(0.5) == pytest.approx(-0.5, abs=1e-3)
    assert bessel_order(3, 0, 2, 1) == pytest.approx(math.sqrt(3.25))
    assert bessel_mode_excluded(0.6, 0.5)
    assert not bessel_mode_excluded(0.3, 0.5)


def test_weighted_l2():
    assert delta0(Fraction(1, 2), 2) == -1
    assert in_weighted_l2(0, Fraction(1, 2), 2)
    assert not in_weighted_l2(-2, Fraction(1, 2), 2)
    assert delta0(0.5, 2) == pytest.approx(-1.0)


def test_certificate_statuses(harmonic_spectrum):
    report = normal_injectivity_certificate(harmonic_spectrum, Fraction(1, 2))
    assert report.status == "INCOMPLETE"
    assert report.missing_degrees == (1,)

    report = normal_injectivity_certificate(circle_spectrum(2, in_units_of_pi=True), 0.5)
    assert report.status == "PASS"
    assert report.passed
    assert all(m["excluded"] for m in report.modes)

    report = normal_injectivity_certificate(circle_spectrum(4, in_units_of_pi=True), 0.5)
    assert report.status == "FAIL"
    assert report.witness == {"kind": "gap", "degree": 0, "lambda": "1/4"}

    S = LinkSpectrum(
        2,
        (
            SpectralMode(0, Fraction(0), 1),
            SpectralMode(1, Fraction(0), 2),
            SpectralMode(2, Fraction(0), 1),
        ),
    )
    report = normal_injectivity_certificate(S, Fraction(1, 2))
    assert report.witness["kind"] == "middle-harmonic"

    with pytest.raises(InvalidArgument):
        normal_injectivity_certificate(harmonic_spectrum, 1)


@pytest.mark.parametrize(
    "eigenvalue, status, witness",
    [
        (Fraction(13, 10), "PASS", None),
        (Fraction(1, 2), "FAIL", {"kind": "gap", "degree": 1, "lambda": "1/2"}),
    ],
)
def test_certificate_follows_the_smallest_eigenvalue(eigenvalue, status, witness):
    S = LinkSpectrum(
        2,
        (
            SpectralMode(0, Fraction(0), 1),
            SpectralMode(1, eigenvalue, 2),
            SpectralMode(2, Fraction(0), 1),
        ),
    )
    report = normal_injectivity_certificate(S, Fraction(1, 2))
    assert report.status == status
    assert report.witness == witness
    assert report.missing_degrees == ()
