"""
Spectral data of a link and the conditions it imposes near a singular
stratum: the gap condition on the link Laplacian, rescaling of the link
metric, the containment set for indicial roots, the adjoint involution,
Bessel mode admissibility, weight windows and the injectivity
certificate for the normal operator.

Eigenvalues are exact rationals or floats. With exact input the roots are
kept as sympy expressions; otherwise comparisons use an absolute
tolerance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy
from scipy.linalg import circulant, eigh
from scipy.special import kv

from .errors import InvalidArgument, InvalidSpectrum, MalformedInput
from .utils import (
    DEFAULT_MODE_CUTOFF,
    DEFAULT_TOLERANCE,
    FD_GRID_POINTS,
    format_number,
    parse_rational,
)

ELLS = (-3, -1, 1, 3)
ELL_PRIMES = (-1, 1)


@dataclass(frozen=True)
class SpectralMode:
    degree: int
    eigenvalue: object
    multiplicity: int = 1


def _is_zero(x, tolerance=0.0):
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= tolerance


@dataclass(frozen=True)
class LinkSpectrum:
    """
    Truncated spectrum of the Hodge Laplacian on forms of a link of
    dimension f0: (degree, eigenvalue, multiplicity) triples.
    """

    f0: int
    modes: tuple
    cutoff_note: str = ""

    def __post_init__(self):
        if not isinstance(self.f0, int) or self.f0 < 0:
            raise InvalidSpectrum(f"link dimension must be a non-negative integer, got {self.f0!r}")
        for mode in self.modes:
            if not 0 <= mode.degree <= self.f0:
                raise InvalidSpectrum(f"degree {mode.degree} outside 0..{self.f0}")
            if mode.multiplicity < 1:
                raise InvalidSpectrum(f"multiplicity {mode.multiplicity} must be positive")
            if mode.eigenvalue < 0:
                raise InvalidSpectrum(f"negative eigenvalue {mode.eigenvalue}")

    @property
    def harmonic_betti(self):
        betti = [0] * (self.f0 + 1)
        for mode in self.modes:
            if _is_zero(mode.eigenvalue):
                betti[mode.degree] += mode.multiplicity
        return tuple(betti)

    @property
    def nonzero_modes(self):
        return [m for m in self.modes if not _is_zero(m.eigenvalue)]

    @property
    def degrees_present(self):
        return sorted({m.degree for m in self.modes})

    @property
    def is_exact(self):
        return all(isinstance(m.eigenvalue, Fraction) for m in self.modes)


def load_spectrum(document):
    """
    Parse spectrum-JSON ``{"dim_link": f0, "modes": [{"degree", "lambda",
    "multiplicity"}], "cutoff_note": str}``. An optional
    ``harmonic_betti`` list must agree with the zero modes.
    """
    if not isinstance(document, dict):
        raise MalformedInput("spectrum document must be a JSON object")
    f0 = document.get("dim_link")
    if not isinstance(f0, int) or isinstance(f0, bool):
        raise MalformedInput("'dim_link' must be an integer")
    raw = document.get("modes")
    if not isinstance(raw, list):
        raise MalformedInput("'modes' must be a list")
    modes = []
    for entry in raw:
        if not isinstance(entry, dict) or "degree" not in entry or "lambda" not in entry:
            raise MalformedInput(f"bad mode {entry!r}")
        multiplicity = entry.get("multiplicity", 1)
        if not isinstance(multiplicity, int) or isinstance(multiplicity, bool):
            raise MalformedInput(f"multiplicity of {entry!r} is not an integer")
        modes.append(
            SpectralMode(int(entry["degree"]), parse_rational(entry["lambda"]), multiplicity)
        )
    S = LinkSpectrum(f0, tuple(modes), str(document.get("cutoff_note", "")))
    given = document.get("harmonic_betti")
    if given is not None and tuple(given) != S.harmonic_betti:
        raise InvalidSpectrum(
            f"harmonic_betti {given} disagrees with zero modes {list(S.harmonic_betti)}"
        )
    logging.info(f"Loaded spectrum of a {f0}-dimensional link with {len(modes)} modes")
    return S


def spectrum_to_json(S):
    return {
        "dim_link": S.f0,
        "modes": [
            {
                "degree": m.degree,
                "lambda": format_number(m.eigenvalue),
                "multiplicity": m.multiplicity,
            }
            for m in S.modes
        ],
        "harmonic_betti": list(S.harmonic_betti),
        "cutoff_note": S.cutoff_note,
    }


def _below_gap(lam, tolerance):
    if isinstance(lam, Fraction):
        return lam < 1
    return lam < 1 - tolerance


def check_gap_condition(S, tolerance=DEFAULT_TOLERANCE):
    """True when every nonzero eigenvalue is at least 1."""
    return not any(_below_gap(m.eigenvalue, tolerance) for m in S.nonzero_modes)


def witt_spectral_check(S):
    """No harmonic forms in the middle degree of an even-dimensional link."""
    if S.f0 % 2:
        return True
    return S.harmonic_betti[S.f0 // 2] == 0


def _exact_sqrt(x):
    """Square root of a non-negative Fraction when it is rational, else None."""
    num, den = x.numerator, x.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def scale_spectrum(S, c):
    """Spectrum after scaling the link metric by c^2: lambda -> lambda / c^2."""
    if not c > 0 or (isinstance(c, float) and math.isinf(c)):
        raise InvalidArgument(f"scale must be positive and finite, got {c}")
    c2 = c * c
    modes = tuple(
        SpectralMode(m.degree, m.eigenvalue / c2, m.multiplicity) for m in S.modes
    )
    return LinkSpectrum(S.f0, modes, S.cutoff_note)


def rescale_for_gap(S, tolerance=DEFAULT_TOLERANCE):
    """
    Largest c such that the spectrum of c^2 g satisfies the gap condition,
    i.e. the square root of the smallest nonzero eigenvalue.

    Returns ``math.inf`` when every mode is harmonic. The result is an
    exact Fraction when that eigenvalue is the square of a rational.
    """
    nonzero = [m.eigenvalue for m in S.nonzero_modes]
    if not nonzero:
        return math.inf
    lam = min(nonzero)
    c = _exact_sqrt(lam) if isinstance(lam, Fraction) else None
    if c is None:
        c = math.sqrt(lam)
    assert check_gap_condition(scale_spectrum(S, c), tolerance), "rescaled spectrum has no gap"
    logging.info(f"Gap rescaling: smallest nonzero eigenvalue {lam}, c_max = {c}")
    return c


@dataclass(frozen=True)
class IndicialRoot:
    value: object
    families: tuple

    @property
    def numeric(self):
        return float(self.value)

    def to_json(self):
        out = {"value": self.numeric, "families": list(self.families)}
        if isinstance(self.value, sympy.Basic):
            out["exact"] = str(self.value)
        return out


@dataclass(frozen=True)
class IndicialRootSet:
    """Sorted, deduplicated containment set for the indicial roots at weight a."""

    f0: int
    weight: object
    roots: tuple
    exact: bool = False
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def values(self):
        return [r.value for r in self.roots]

    @property
    def numeric(self):
        return [r.numeric for r in self.roots]

    @property
    def shift(self):
        return sympy.Rational(self.f0, 2) + sympy.Rational(1, 2) if self.exact else self.f0 / 2 + 0.5

    @property
    def shifted(self):
        return [r.value + self.shift for r in self.roots]

    @property
    def weight_in_range(self):
        return 0 < self.weight < 1

    def family(self, tag):
        return [r.value for r in self.roots if tag in r.families]

    def to_json(self):
        return {
            "dim_link": self.f0,
            "weight": format_number(self.weight),
            "weight_in_range": self.weight_in_range,
            "exact": self.exact,
            "roots": [r.numeric for r in self.roots],
            "families": [list(r.families) for r in self.roots],
            "shifted": [float(x) for x in self.shifted],
            **({"exact_roots": [str(r.value) for r in self.roots]} if self.exact else {}),
        }


def _to_exact(x):
    x = Fraction(x)
    return sympy.Rational(x.numerator, x.denominator)


def _candidates(S, a, exact):
    """(value, family) pairs of the containment set before deduplication."""
    if exact:
        num, sqrt = _to_exact, sympy.sqrt
    else:
        num, sqrt = float, math.sqrt
    half = num(S.f0) / 2
    one_half = num(1) / 2
    centre = -half - num(a)
    out = []
    for k in S.degrees_present:
        harmonic = any(m.degree == k and _is_zero(m.eigenvalue) for m in S.modes)
        if not harmonic or 2 * k == S.f0:
            continue
        for inner in (one_half, -one_half):
            radius = abs(num(k) - half + inner)
            out.extend([(centre + radius, 1), (centre - radius, 1)])
    for m in S.nonzero_modes:
        lam = num(m.eigenvalue)
        shift = num(m.degree) - half
        for ell in ELLS:
            nu = sqrt(lam + (shift + num(ell) / 2) ** 2)
            out.extend([(centre + nu, 2), (centre - nu, 2)])
        for ell in ELL_PRIMES:
            nu = sqrt(lam + (shift + num(ell) / 2) ** 2)
            out.extend([(1 + centre + nu, 3), (1 + centre - nu, 3)])
    return out


def indicial_roots(S, a, exact=None, tolerance=DEFAULT_TOLERANCE):
    """
    Containment set for the indicial roots at weight a.

    Family 1 comes from harmonic forms in degree k != f0/2, families 2
    and 3 from nonzero eigenvalues with the shifts l in {+-1, +-3} and
    l' in {+-1}.

    Parameters
    ----------
    S : LinkSpectrum
    a : Fraction or float
        Weight; values outside (0, 1) are accepted and flagged in the result.
    exact : bool, optional
        Keep roots as sympy expressions. Defaults to True when a and all
        eigenvalues are rational.
    tolerance : float, optional
        Merging distance for float roots.

    Returns
    -------
    IndicialRootSet
    """
    if exact is None:
        exact = S.is_exact and not isinstance(a, float)
    if exact and not (S.is_exact and not isinstance(a, float)):
        raise InvalidArgument("exact indicial roots need rational weight and eigenvalues")

    merged = {}
    if exact:
        for value, fam in _candidates(S, a, True):
            merged.setdefault(value, set()).add(fam)
        roots = [IndicialRoot(v, tuple(sorted(f))) for v, f in merged.items()]
        roots.sort(key=lambda r: r.numeric)
    else:
        roots = []
        for value, fam in sorted(_candidates(S, a, False)):
            if roots and abs(value - roots[-1][0]) <= tolerance:
                roots[-1][1].add(fam)
            else:
                roots.append((value, {fam}))
        roots = [IndicialRoot(v, tuple(sorted(f))) for v, f in roots]

    result = IndicialRootSet(S.f0, a, tuple(roots), exact, tolerance)
    if not result.weight_in_range:
        logging.warning(f"weight {a} lies outside (0, 1)")
    logging.info(f"Indicial containment set at weight {a}: {len(roots)} roots")
    return result


def adjoint_reflect(zeta, f0, a):
    """Root of the adjoint problem: zeta -> -(zeta + f0 + 2a + 1)."""
    return -(zeta + f0 + 2 * a + 1)


def reflection_defect(R):
    """
    Roots of the containment set whose adjoint reflection is not itself
    in the set. The set of actual roots is closed under the reflection,
    the containment set need not be.
    """
    values = R.values
    out = []
    for v in values:
        image = adjoint_reflect(v, R.f0, _to_exact(R.weight) if R.exact else R.weight)
        if R.exact:
            found = any(sympy.simplify(image - w) == 0 for w in values)
        else:
            found = any(abs(image - w) <= R.tolerance for w in values)
        if not found:
            out.append(v)
    return out


def bessel_order(lam, k, f0, ell):
    """nu = sqrt(lambda + (k - f0/2 + l/2)^2)."""
    return math.sqrt(float(lam) + (k - f0 / 2 + ell / 2) ** 2)


def bessel_mode_excluded(nu, a, tolerance=DEFAULT_TOLERANCE):
    """True when |nu| + a >= 1, i.e. K_nu is not in t^(a - 1/2) L^2."""
    return abs(float(nu)) + float(a) >= 1 - tolerance


def bessel_small_t_exponent(nu, t=1e-6):
    """
    Log-slope of K_nu(t) near t = 0; approaches -|nu| for nu != 0.
    """
    t1, t2 = t, 2 * t
    return float((np.log(kv(nu, t2)) - np.log(kv(nu, t1))) / (np.log(t2) - np.log(t1)))


def delta0(gamma, f0):
    return gamma - Fraction(f0 + 1, 2) if isinstance(gamma, Fraction) else gamma - (f0 + 1) / 2


def in_weighted_l2(gamma, a, f0):
    """Whether x^gamma lies in x^a L^2(x^f0 dx) near 0."""
    return gamma > delta0(a, f0)


@dataclass(frozen=True)
class WeightWindow:
    alpha: float
    epsilon: float

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise InvalidArgument(f"epsilon must lie in (0, 1), got {self.epsilon}")

    def hits(self, values, tolerance=DEFAULT_TOLERANCE):
        return [
            float(x) for x in values if abs(float(x) - float(self.alpha)) <= float(self.epsilon) + tolerance
        ]

    def is_clear(self, values, tolerance=DEFAULT_TOLERANCE):
        """Only alpha itself may lie in [alpha - eps, alpha + eps]."""
        return all(abs(x - float(self.alpha)) <= tolerance for x in self.hits(values, tolerance))


def weight_interval_clear(S, a, alpha, epsilon, tolerance=DEFAULT_TOLERANCE):
    window = WeightWindow(alpha, epsilon)
    R = indicial_roots(S, a, tolerance=tolerance)
    clear = window.is_clear(R.shifted, tolerance)
    logging.info(
        f"Window [{alpha} - {epsilon}, {alpha} + {epsilon}] at weight {a}: clear={clear}"
    )
    return clear


@dataclass(frozen=True)
class CertificateReport:
    status: str
    weight: object
    witness: dict = None
    modes: tuple = field(default=())
    missing_degrees: tuple = field(default=())
    cutoff_note: str = ""

    @property
    def passed(self):
        return self.status == "PASS"

    def to_json(self):
        return {
            "status": self.status,
            "weight": format_number(self.weight),
            "witness": self.witness,
            "modes": list(self.modes),
            "missing_degrees": list(self.missing_degrees),
            "cutoff_note": self.cutoff_note,
        }


def normal_injectivity_certificate(S, a, tolerance=DEFAULT_TOLERANCE):
    """
    Certificate that the normal operator at weight a in (0, 1) is
    injective: every nonzero eigenvalue is at least 1 and there are no
    middle degree harmonic forms.

    Returns FAIL with the first witness found, INCOMPLETE when some degree
    in 0..f0 carries no modes, PASS otherwise.
    """
    if not 0 < a < 1:
        raise InvalidArgument(f"weight must lie in (0, 1), got {a}")

    modes = []
    for m in S.nonzero_modes:
        for ell in ELLS:
            nu = bessel_order(m.eigenvalue, m.degree, S.f0, ell)
            modes.append(
                {
                    "degree": m.degree,
                    "lambda": format_number(m.eigenvalue),
                    "ell": ell,
                    "nu": nu,
                    "excluded": bessel_mode_excluded(nu, a, tolerance),
                }
            )

    witness = None
    small = [m for m in S.nonzero_modes if _below_gap(m.eigenvalue, tolerance)]
    if small:
        worst = min(small, key=lambda m: m.eigenvalue)
        witness = {"kind": "gap", "degree": worst.degree, "lambda": format_number(worst.eigenvalue)}
    elif not witt_spectral_check(S):
        witness = {"kind": "middle-harmonic", "degree": S.f0 // 2, "lambda": "0"}

    missing = tuple(k for k in range(S.f0 + 1) if k not in S.degrees_present)
    if witness is not None:
        status = "FAIL"
    elif missing:
        status = "INCOMPLETE"
    else:
        status = "PASS"
    logging.info(f"Normal operator certificate at weight {a}: {status}")
    return CertificateReport(status, a, witness, tuple(modes), missing, S.cutoff_note)


def circle_spectrum(circumference, cutoff=DEFAULT_MODE_CUTOFF, in_units_of_pi=False):
    """
    Spectrum of the circle of length L on functions and 1-forms:
    (2 pi m / L)^2 with multiplicity 1 for m = 0 and 2 for m >= 1.

    With ``in_units_of_pi`` the length is L = circumference * pi and the
    eigenvalues (2m / circumference)^2 are exact.
    """
    if not circumference > 0:
        raise InvalidArgument(f"circumference must be positive, got {circumference}")
    modes = []
    for degree in (0, 1):
        modes.append(SpectralMode(degree, Fraction(0), 1))
        for m in range(1, cutoff + 1):
            if in_units_of_pi:
                lam = (Fraction(2 * m) / Fraction(circumference)) ** 2
            else:
                lam = (2 * math.pi * m / circumference) ** 2
            modes.append(SpectralMode(degree, lam, 2))
    unit = "pi" if in_units_of_pi else ""
    note = f"circle of length {circumference}{unit}, modes m <= {cutoff}"
    return LinkSpectrum(1, tuple(modes), note)


def finite_difference_circle_eigenvalues(circumference, grid_points=FD_GRID_POINTS, count=5):
    """
    Lowest eigenvalues of the periodic second difference on a circle of
    the given length; each nonzero value appears twice.
    """
    h = circumference / grid_points
    column = np.zeros(grid_points)
    column[0], column[1], column[-1] = 2.0, -1.0, -1.0
    laplacian = circulant(column) / h**2
    values = eigh(laplacian, eigvals_only=True, subset_by_index=[0, count - 1])
    return np.clip(values, 0.0, None)
