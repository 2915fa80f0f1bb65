from fractions import Fraction

import pytest

from wittkit import library
from wittkit.complex_core import barycentric_subdivide
from wittkit.indicial_spectral import LinkSpectrum, SpectralMode
from wittkit.stratification import transport_filtration
from wittkit.utils import get_package_data_name, load_json


@pytest.fixture(scope="session")
def sphere2():
    return library.boundary_of_simplex(3)


@pytest.fixture(scope="session")
def sphere4():
    return library.boundary_of_simplex(5)


@pytest.fixture(scope="session")
def torus():
    return library.torus()


@pytest.fixture(scope="session")
def rp2():
    return library.projective_plane()


@pytest.fixture(scope="session")
def cp2():
    return library.complex_projective_plane()


@pytest.fixture(scope="session")
def s2xs2():
    return library.s2_x_s2()


@pytest.fixture(scope="session")
def sigma_s2():
    return library.sigma_s2()


@pytest.fixture(scope="session")
def sigma_t2():
    return library.sigma_t2()


@pytest.fixture(scope="session")
def sigma_cp2():
    return library.sigma_cp2()


@pytest.fixture(scope="session")
def sigma_sigma_t2():
    return library.sigma_sigma_t2()


@pytest.fixture(scope="session")
def sigma_sigma_t2_sd(sigma_sigma_t2):
    K, F = sigma_sigma_t2
    sd = barycentric_subdivide(K, 1)
    return sd, transport_filtration(F, sd)


@pytest.fixture(scope="session")
def cp2_marked():
    return library.cp2_marked()


@pytest.fixture
def harmonic_spectrum():
    """f0 = 2 with harmonic forms in degrees 0 and 2 only."""
    return LinkSpectrum(
        2, (SpectralMode(0, Fraction(0), 1), SpectralMode(2, Fraction(0), 1))
    )


@pytest.fixture
def spectrum_document():
    return {
        "dim_link": 2,
        "modes": [
            {"degree": 0, "lambda": "0", "multiplicity": 1},
            {"degree": 2, "lambda": 0, "multiplicity": 1},
        ],
        "cutoff_note": "harmonic forms only",
    }


@pytest.fixture(scope="session")
def schema():
    """Loader for the report schemas shipped with the package."""

    def _load(name):
        return load_json(get_package_data_name(f"schemas/{name}.schema.json"))

    return _load
