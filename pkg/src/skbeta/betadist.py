"""Beta-distribution machinery: special functions, shape moments, the
moment-based (S, K) -> (a, b) calibration, and the Yule-Simon / urn limit laws.

Parameterization notes
----------------------
* ``beta_skewness``/``beta_kurtosis`` use the standard Johnson & Kotz
  expressions; kurtosis is non-excess (normal limit -> 3).
* ``urn_limit_pmf(k; k0, a, b)`` decays like ``k**-b`` for large ``k``.  The
  same law written as a Yule-Simon pmf ``rho * B(k, rho + 1)`` carries
  parameter ``rho = b - 1`` and is usually quoted with tail exponent
  ``1 + rho`` -- the identical number.  Keep the two parameterizations apart.
* ``help_variable(s, k)`` equals ``a + b`` whenever ``(s, k)`` are the
  skewness and kurtosis of some Beta law; its pole ``6 + 3 s^2 - 2 k = 0``
  is exactly the Gamma-limit boundary of the Beta family, and the value can
  be negative or zero for moment pairs outside the family.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from .errors import (
    InfeasibleMomentPairError,
    InternalCheckError,
    NonNormalizableError,
    NotBetaRepresentableError,
)

__all__ = [
    "BetaParams",
    "BetaCalibration",
    "ln_gamma",
    "beta_function",
    "beta_pdf",
    "beta_cdf",
    "beta_skewness",
    "beta_kurtosis",
    "help_variable",
    "calibrate_from_sk",
    "yule_simon_pmf",
    "urn_limit_pmf",
    "cdf_curve",
    "cdf_curve_csv",
    "calibration_block",
]


@dataclass(frozen=True)
class BetaParams:
    """Shape parameters of a Beta(a, b) law; both must be positive."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError(
                f"Beta shape parameters must be positive, got a={self.a}, b={self.b}"
            )


@dataclass(frozen=True)
class BetaCalibration:
    """Artifacts of the moment inversion from a (S, K) pair.

    ``roots`` holds the two solutions of ``x * (rho - x) = ab`` as
    (smaller, larger); ``selected`` assigns them to (a, b) by the sign of
    the input skewness.
    """

    s_in: float
    k_in: float
    rho: float
    ab_product: float
    roots: tuple[float, float]
    selected: BetaParams


def ln_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0.0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def beta_function(a: float, b: float) -> float:
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"beta_function requires positive arguments, got ({a}, {b})")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def beta_pdf(x: float, params: BetaParams) -> float:
    """Density x^(a-1) (1-x)^(b-1) / B(a, b).

    Outside [0, 1] the density is 0 by convention.  At an endpoint the
    limiting value is returned, which is ``inf`` when the local exponent is
    negative (integrable singularity).
    """
    a, b = params.a, params.b
    if x < 0.0 or x > 1.0:
        return 0.0
    if x == 0.0:
        if a < 1.0:
            return math.inf
        return float(b) if a == 1.0 else 0.0
    if x == 1.0:
        if b < 1.0:
            return math.inf
        return float(a) if b == 1.0 else 0.0
    ln_b = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return math.exp((a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - ln_b)


def _beta_contfrac(a: float, b: float, x: float) -> float:
    # Continued fraction for the regularized incomplete Beta, evaluated with
    # the modified Lentz scheme.  Converges fast for x < (a+1)/(a+b+2).
    max_iter = 300
    eps = 1e-16
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise InternalCheckError(
        f"incomplete-beta continued fraction failed to converge for a={a}, b={b}, x={x}"
    )


def beta_cdf(x: float, params: BetaParams) -> float:
    """Regularized incomplete Beta I_x(a, b) via continued fraction.

    Uses the symmetry I_x(a, b) = 1 - I_(1-x)(b, a) to stay on the
    fast-converging branch; absolute error below 1e-10 on [0, 1].
    """
    a, b = params.a, params.b
    if x < 0.0 or x > 1.0:
        raise ValueError(f"beta_cdf requires x in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_contfrac(a, b, x) / a
    return 1.0 - front * _beta_contfrac(b, a, 1.0 - x) / b


def beta_skewness(params: BetaParams) -> float:
    """Skewness 2 (b - a) sqrt(a + b + 1) / ((a + b + 2) sqrt(a b))."""
    a, b = params.a, params.b
    return 2.0 * (b - a) * math.sqrt(a + b + 1.0) / ((a + b + 2.0) * math.sqrt(a * b))


def beta_kurtosis(params: BetaParams) -> float:
    """Non-excess kurtosis 3 (s+1) (2 s^2 + ab (s-6)) / (ab (s+2) (s+3)), s = a + b."""
    a, b = params.a, params.b
    s = a + b
    return (
        3.0
        * (s + 1.0)
        * (2.0 * s * s + a * b * (s - 6.0))
        / (a * b * (s + 2.0) * (s + 3.0))
    )


def help_variable(s: float, k: float) -> float:
    """rho = 6 (K - S^2 - 1) / (6 + 3 S^2 - 2 K); equals a + b on the Beta family."""
    denom = 6.0 + 3.0 * s * s - 2.0 * k
    if denom <= 0.0:
        raise NotBetaRepresentableError(
            f"help variable undefined: denominator 6 + 3 S^2 - 2 K = {denom} <= 0 "
            f"for (S, K) = ({s}, {k})"
        )
    return 6.0 * (k - s * s - 1.0) / denom


def calibrate_from_sk(s: float, k: float) -> BetaCalibration:
    """Invert a (skewness, kurtosis) pair to Beta shape parameters.

    The shape-parameter sum is the help variable rho; the product follows
    from the kurtosis; the individual parameters are the roots of
    ``x (rho - x) = ab``.  When the skewness is positive the larger root is
    b, when negative it is a, and the roots coincide for a symmetric pair.
    """
    rho = help_variable(s, k)
    if rho <= 0.0:
        raise InfeasibleMomentPairError(
            f"moment pair (S, K) = ({s}, {k}) implies a + b = {rho} <= 0",
            rho=rho,
        )
    denom = (rho + 2.0) * (rho + 3.0) * k - 3.0 * (rho - 6.0) * (rho + 1.0)
    if denom <= 0.0:
        raise InfeasibleMomentPairError(
            f"shape-product denominator {denom} <= 0 for (S, K) = ({s}, {k})",
            rho=rho,
        )
    ab = 6.0 * rho * rho * (rho + 1.0) / denom
    if ab <= 0.0:
        raise InfeasibleMomentPairError(
            f"shape product ab = {ab} <= 0 for (S, K) = ({s}, {k})",
            rho=rho,
            ab=ab,
        )
    disc = 1.0 - 4.0 * ab / (rho * rho)
    if disc < 0.0:
        if disc < -1e-12:
            raise InfeasibleMomentPairError(
                f"negative discriminant {disc} for (S, K) = ({s}, {k})",
                rho=rho,
                discriminant=disc,
                ab=ab,
            )
        disc = 0.0  # symmetric pair up to roundoff
    sqrt_disc = math.sqrt(disc)
    root_hi = 0.5 * rho * (1.0 + sqrt_disc)
    root_lo = 0.5 * rho * (1.0 - sqrt_disc)

    # Cross-check against direct root extraction of x^2 - rho x + ab = 0.
    quad_disc = max(rho * rho - 4.0 * ab, 0.0)
    alt_hi = 0.5 * (rho + math.sqrt(quad_disc))
    alt_lo = ab / alt_hi if alt_hi > 0.0 else root_lo
    scale = max(1.0, abs(rho))
    if abs(alt_hi - root_hi) > 1e-9 * scale or abs(alt_lo - root_lo) > 1e-9 * scale:
        raise InternalCheckError(
            f"root formulas disagree: ({root_lo}, {root_hi}) vs ({alt_lo}, {alt_hi})"
        )

    if s > 0.0:
        a_sel, b_sel = root_lo, root_hi
    elif s < 0.0:
        a_sel, b_sel = root_hi, root_lo
    else:
        a_sel = b_sel = 0.5 * rho

    try:
        selected = BetaParams(a_sel, b_sel)
    except ValueError as exc:
        raise InfeasibleMomentPairError(
            f"selected root is not positive for (S, K) = ({s}, {k}): {exc}",
            rho=rho,
            discriminant=disc,
            ab=ab,
        ) from exc

    s_back = beta_skewness(selected)
    k_back = beta_kurtosis(selected)
    if abs(s_back - s) > 1e-9 * max(1.0, abs(s)) or abs(k_back - k) > 1e-9 * max(
        1.0, abs(k)
    ):
        raise InfeasibleMomentPairError(
            f"inversion did not close for (S, K) = ({s}, {k}); "
            f"round trip gave ({s_back}, {k_back})",
            rho=rho,
            discriminant=disc,
            ab=ab,
        )
    return BetaCalibration(
        s_in=float(s),
        k_in=float(k),
        rho=rho,
        ab_product=ab,
        roots=(root_lo, root_hi),
        selected=selected,
    )


def _stirling_tail(y: float) -> float:
    # correction series of ln Gamma(y) beyond (y - 1/2) ln y - y + ln(2 pi)/2;
    # truncation error < 1/(1188 y^9), i.e. < 2e-15 for y >= 20
    y2 = y * y
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * y2)) / y2) / y2) / y


def _lgamma_diff(x: float, c: float) -> float:
    """ln Gamma(x) - ln Gamma(x + c) without large-term cancellation.

    For large x the two log-gammas grow like x ln x while their difference
    stays O(c ln x); subtracting direct lgamma values then loses ~x ln x * eps
    of absolute accuracy, which breaks pmf ratio identities at the 1e-12
    level.  The Stirling form keeps every term at the size of the result.
    """
    if x < 20.0:
        return math.lgamma(x) - math.lgamma(x + c)
    return (
        -(x - 0.5) * math.log1p(c / x)
        - c * math.log(x + c)
        + c
        + _stirling_tail(x)
        - _stirling_tail(x + c)
    )


def yule_simon_pmf(k: int, b: float) -> float:
    """Yule-Simon pmf b * B(k, b + 1) on integers k >= 1."""
    k = operator.index(k)
    if k < 1:
        raise ValueError(f"yule_simon_pmf requires k >= 1, got {k}")
    if not b > 0.0:
        raise ValueError(f"yule_simon_pmf requires b > 0, got {b}")
    return math.exp(
        math.log(b) + math.lgamma(k) + math.lgamma(b + 1.0) - math.lgamma(k + b + 1.0)
    )


def urn_limit_pmf(k: int, k0: int, a: float, b: float) -> float:
    """Long-time urn-occupancy law B(k + a, b) / B(k0 + a, b - 1).

    Normalized over k >= k0 (zero below k0); requires b > 1 for the
    normalization constant to exist.  Decays like k**-b in the tail.
    """
    k = operator.index(k)
    k0 = operator.index(k0)
    if k0 < 0:
        raise ValueError(f"urn_limit_pmf requires k0 >= 0, got {k0}")
    if a < -k0 or not k0 + a > 0.0:
        raise ValueError(
            f"urn_limit_pmf requires a >= -k0 with k0 + a > 0, got k0={k0}, a={a}"
        )
    if not b > 1.0:
        raise NonNormalizableError(
            f"urn limit pmf does not normalize for b = {b} <= 1"
        )
    if k < k0:
        return 0.0
    ln_ratio = (
        _lgamma_diff(k + a, b)
        - _lgamma_diff(k0 + a, b - 1.0)
        + math.log(b - 1.0)  # lgamma(b) - lgamma(b-1)
    )
    return math.exp(ln_ratio)


def cdf_curve(params: BetaParams, n_points: int = 512) -> list[tuple[float, float]]:
    """Sample the CDF at n_points uniform x values on [0, 1]."""
    if n_points < 2:
        raise ValueError("cdf_curve needs at least 2 points")
    step = 1.0 / (n_points - 1)
    out = []
    for i in range(n_points):
        x = 1.0 if i == n_points - 1 else i * step
        out.append((x, beta_cdf(x, params)))
    return out


def cdf_curve_csv(params: BetaParams, n_points: int = 512) -> str:
    """CDF curve as CSV text with the shape parameters in a metadata header."""
    lines = [f"# a={params.a!r}", f"# b={params.b!r}", "x,cdf"]
    for x, c in cdf_curve(params, n_points):
        lines.append(f"{x!r},{c!r}")
    return "\n".join(lines) + "\n"


def calibration_block(cal: BetaCalibration) -> str:
    """Key-value rendering of a calibration, full precision."""
    root_lo, root_hi = cal.roots
    lines = [
        f"S_in: {cal.s_in!r}",
        f"K_in: {cal.k_in!r}",
        f"rho: {cal.rho!r}",
        f"ab: {cal.ab_product!r}",
        f"root_low: {root_lo!r}",
        f"root_high: {root_hi!r}",
        f"a: {cal.selected.a!r}",
        f"b: {cal.selected.b!r}",
        f"skewness_roundtrip: {beta_skewness(cal.selected)!r}",
        f"kurtosis_roundtrip: {beta_kurtosis(cal.selected)!r}",
    ]
    return "\n".join(lines) + "\n"
