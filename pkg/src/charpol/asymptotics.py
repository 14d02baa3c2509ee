"""Large-N predictions: densities, saddle points, universal constants, kernels.

The 2k-th moments of characteristic polynomials grow as
    GOE:  F_2k ~ gamma_k N^{2k^2} (2 pi rho(lambda))^{2k^2 + k}
    GUE:  F_2k ~ gamma_k (2 N pi rho(lambda))^{k^2}
with semicircle densities rho = sqrt(2 - lambda^2)/pi (GOE) and
sqrt(4 - lambda^2)/(2 pi) (GUE).  In the Dyson scaling limit the two-point
function follows the kernel cos x / x^2 - sin x / x^3 (GOE) and the sine
kernel sin x / x (GUE), both elementary half-integer Bessel functions.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .ensembles import GOE, GUE

KERNEL_SERIES_CUTOFF = 1e-2


@dataclass(frozen=True)
class UniversalConstant:
    """gamma_k as an exact reduced rational with a float rendering."""

    k: int
    ensemble: str
    value: Fraction

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    @property
    def as_float(self) -> float:
        return self.value.numerator / self.value.denominator


@dataclass(frozen=True)
class SaddleData:
    """Saddle points of the dual-integral exponent at fixed real lambda.

    GOE roots solve 2 t^2 - 2 i lambda t - 1 = 0 (product -1/2); GUE roots
    solve b^2 - i lambda b - 1 = 0 (product -1).  The root difference equals
    pi rho(lambda) for GOE and 2 pi rho(lambda) for GUE.
    """

    ensemble: str
    lam: float
    plus: complex
    minus: complex


def rho(ensemble: str, lam: float) -> float:
    """Semicircle eigenvalue density; zero outside the support."""
    lam = float(lam)
    if ensemble == GOE:
        return math.sqrt(2.0 - lam * lam) / math.pi if abs(lam) < math.sqrt(2.0) else 0.0
    if ensemble == GUE:
        return math.sqrt(4.0 - lam * lam) / (2.0 * math.pi) if abs(lam) < 2.0 else 0.0
    raise ValueError(f"unknown ensemble {ensemble!r}")


def gamma_k(ensemble: str, k: int) -> UniversalConstant:
    """Universal 2k-th moment constant as an exact rational.

    GOE: prod_{l=1}^{k} (2l-1)! / (2k+2l-1)!; GUE: prod_{l=0}^{k-1} l!/(k+l)!.
    """
    if not 1 <= k <= 20:
        raise ValueError("gamma_k supports 1 <= k <= 20")
    if ensemble == GOE:
        value = Fraction(1)
        for l in range(1, k + 1):
            value *= Fraction(math.factorial(2 * l - 1), math.factorial(2 * k + 2 * l - 1))
    elif ensemble == GUE:
        value = Fraction(1)
        for l in range(k):
            value *= Fraction(math.factorial(l), math.factorial(k + l))
    else:
        raise ValueError(f"unknown ensemble {ensemble!r}")
    return UniversalConstant(k=k, ensemble=ensemble, value=value)


def gamma_k_binomial_form(ensemble: str, k: int) -> Fraction:
    """The equivalent binomial/fluctuation form of gamma_k, kept as a second
    route: GOE (2k)!/(k!k!) [prod_1^k (2l)!]^2 / prod_1^{2k} (2l)!,
    GUE C(2k,k) h_k^2 / h_2k with h_k = prod_0^k l!."""
    binom = Fraction(math.factorial(2 * k), math.factorial(k) ** 2)
    if ensemble == GOE:
        num = Fraction(1)
        for l in range(1, k + 1):
            num *= Fraction(math.factorial(2 * l))
        den = Fraction(1)
        for l in range(1, 2 * k + 1):
            den *= Fraction(math.factorial(2 * l))
        return binom * num * num / den
    if ensemble == GUE:

        def h(m):
            out = Fraction(1)
            for l in range(m + 1):
                out *= math.factorial(l)
            return out

        return binom * h(k) ** 2 / h(2 * k)
    raise ValueError(f"unknown ensemble {ensemble!r}")


def moment_asymptotic(ensemble: str, n: int, k: int, lam: float) -> float:
    """Large-N prediction for the 2k-th moment at lambda inside the support."""
    r = rho(ensemble, lam)
    if r <= 0.0:
        raise ValueError("lambda must lie strictly inside the support")
    g = gamma_k(ensemble, k).as_float
    if ensemble == GOE:
        return g * float(n) ** (2 * k * k) * (2.0 * math.pi * r) ** (2 * k * k + k)
    return g * (2.0 * n * math.pi * r) ** (k * k)


def saddle_points(ensemble: str, lam: float) -> SaddleData:
    lam = float(lam)
    if rho(ensemble, lam) <= 0.0:
        raise ValueError("lambda must lie strictly inside the support")
    if ensemble == GOE:
        root = cmath.sqrt(2.0 - lam * lam)
        plus = (1j * lam + root) / 2.0
        minus = (1j * lam - root) / 2.0
    else:
        root = cmath.sqrt(4.0 - lam * lam)
        plus = (1j * lam + root) / 2.0
        minus = (1j * lam - root) / 2.0
    return SaddleData(ensemble=ensemble, lam=lam, plus=plus, minus=minus)


def kernel_goe(x: float) -> float:
    """cos x / x^2 - sin x / x^3, with the Taylor series below |x| = 1e-2.

    Series -1/3 + x^2/30 - x^4/840 + x^6/45360 keeps the relative error under
    1e-12 at the switchover.
    """
    x = float(x)
    if abs(x) < KERNEL_SERIES_CUTOFF:
        x2 = x * x
        return -1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0
    return math.cos(x) / x**2 - math.sin(x) / x**3


def kernel_sine(x: float) -> float:
    """sin x / x with the Taylor series 1 - x^2/6 + x^4/120 - x^6/5040 near 0."""
    x = float(x)
    if abs(x) < KERNEL_SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    return math.sin(x) / x


def bessel_j_half(x: float) -> float:
    """J_{1/2}(x) = sqrt(2/(pi x)) sin x (elementary closed form)."""
    return math.sqrt(2.0 / (math.pi * x)) * math.sin(x)


def bessel_j_three_halves(x: float) -> float:
    """J_{3/2}(x) = sqrt(2/(pi x)) (sin x / x - cos x)."""
    return math.sqrt(2.0 / (math.pi * x)) * (math.sin(x) / x - math.cos(x))


def bessel_half_identity_check(grid) -> float:
    """Max relative deviation of the two half-integer Bessel identities
    kernel_goe = -sqrt(pi/(2x^3)) J_{3/2} and kernel_sine = sqrt(pi/(2x)) J_{1/2}."""
    worst = 0.0
    for x in grid:
        x = float(x)
        if x <= 0:
            raise ValueError("grid points must be positive")
        goe_ref = -math.sqrt(math.pi / (2.0 * x**3)) * bessel_j_three_halves(x)
        sine_ref = math.sqrt(math.pi / (2.0 * x)) * bessel_j_half(x)
        worst = max(
            worst,
            abs(kernel_goe(x) - goe_ref) / max(abs(goe_ref), 1e-300),
            abs(kernel_sine(x) - sine_ref) / max(abs(sine_ref), 1e-300),
        )
    return worst


def scaling_lambda_pair(n: int, center: float, x: float) -> tuple:
    """The lambda pair center +- x / (2 pi N rho(center)) probed at scaling variable x."""
    r = rho(GOE, center)
    if r <= 0.0:
        raise ValueError("center must lie strictly inside the support")
    delta = x / (2.0 * math.pi * n * r)
    return (center + delta, center - delta)


def scaling_limit_prediction(n: int, center: float, x: float) -> float:
    """Two-point kernel prediction at scaling variable x = pi N (l1 - l2) rho.

    Returns kernel_goe(x); the prediction carries one undetermined overall
    constant per (N, center), so callers compare shapes through normalized
    ratios at a reference x.
    """
    if rho(GOE, center) <= 0.0:
        raise ValueError("center must lie strictly inside the support")
    return kernel_goe(x)
