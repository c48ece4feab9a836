"""Least-squares fits of the kurtosis-skewness relation K = p S^nu + q.

The quadratic model fixes nu = 2 and is linear in (p, q); the power model
profiles nu by golden-section search over [0.5, 4], the model being linear
in (p, q) at each candidate nu.  Fitting happens in raw (K, S) space (the
additive q, which can be negative, forbids log transforms) and R^2 is
reported in raw space as well.

Input points are reordered internally to a canonical sort so that every
output, residuals included, is bit-identical under input permutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FitDomainError, SingularDesignError, UndefinedHelpVariableError
from .moments import SKPoint

__all__ = [
    "KSFitResult",
    "NU_BRACKET",
    "fit_quadratic",
    "fit_power",
    "help_variable_from_pq",
    "result_block",
    "residuals_csv",
    "curve_csv",
]

NU_BRACKET = (0.5, 4.0)
_GOLDEN_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class KSFitResult:
    model: str
    p: float
    q: float
    nu: float
    se_p: float
    se_q: float
    se_nu: float
    r_squared: float
    sse: float
    n_points: int
    residuals: tuple[float, ...]
    points: tuple[SKPoint, ...]  # canonical order matching residuals
    warnings: tuple[str, ...] = ()


def _canonical(points) -> list[SKPoint]:
    pts = list(points)
    if not pts:
        raise ValueError("no points to fit")
    return sorted(pts, key=lambda p: (p.s, p.k, p.n, p.group_key))


def _ols(x: np.ndarray, y: np.ndarray):
    xtx = x.T @ x
    try:
        coef = np.linalg.solve(xtx, x.T @ y)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(f"design matrix is singular: {exc}") from exc
    resid = y - x @ coef
    return coef, resid, float(resid @ resid), xtx


def _r_squared(y: np.ndarray, sse: float) -> float:
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        return 1.0 if sse <= 1e-300 else 0.0
    return min(max(1.0 - sse / sst, 0.0), 1.0)


def fit_quadratic(points) -> KSFitResult:
    """Ordinary least squares of K on S^2 (model K = p S^2 + q)."""
    pts = _canonical(points)
    n = len(pts)
    if n < 3:
        raise ValueError(f"quadratic fit needs at least 3 points, got {n}")
    s = np.array([p.s for p in pts])
    y = np.array([p.k for p in pts])
    if len(set((v * v) for v in s)) < 2:
        raise SingularDesignError("all S^2 values are equal; cannot fit p and q")
    x = np.column_stack([s * s, np.ones(n)])
    coef, resid, sse, xtx = _ols(x, y)
    dof = n - 2
    sigma2 = sse / dof
    cov = sigma2 * np.linalg.inv(xtx)
    return KSFitResult(
        model="quadratic",
        p=float(coef[0]),
        q=float(coef[1]),
        nu=2.0,
        se_p=float(math.sqrt(max(cov[0, 0], 0.0))),
        se_q=float(math.sqrt(max(cov[1, 1], 0.0))),
        se_nu=0.0,
        r_squared=_r_squared(y, sse),
        sse=sse,
        n_points=n,
        residuals=tuple(float(r) for r in resid),
        points=tuple(pts),
    )


def _profile_sse(nu: float, s: np.ndarray, y: np.ndarray) -> float:
    x = np.column_stack([s**nu, np.ones(len(s))])
    try:
        _, _, sse, _ = _ols(x, y)
    except SingularDesignError:
        return math.inf
    return sse


def fit_power(points) -> KSFitResult:
    """Least squares of K = p S^nu + q with nu profiled over [0.5, 4].

    Requires S > 0 everywhere (real powers).  Standard errors come from
    the linearized three-parameter Jacobian at the optimum.
    """
    pts = _canonical(points)
    n = len(pts)
    if n < 4:
        raise ValueError(f"power fit needs at least 4 points, got {n}")
    for p in pts:
        if p.s <= 0.0:
            raise FitDomainError(
                f"power fit requires S > 0; group {p.group_key!r} has S = {p.s}"
            )
    s = np.array([p.s for p in pts])
    y = np.array([p.k for p in pts])

    lo, hi = NU_BRACKET
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc = _profile_sse(c, s, y)
    fd = _profile_sse(d, s, y)
    while b - a > _GOLDEN_TOL:
        if fc <= fd:  # ties move left: lowest-nu tie breaking
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = _profile_sse(c, s, y)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = _profile_sse(d, s, y)
    nu = 0.5 * (a + b)

    warnings = []
    if nu - lo < 1e-6 or hi - nu < 1e-6:
        warnings.append(
            f"no interior minimum: nu = {nu!r} sits at the bracket boundary {NU_BRACKET}"
        )

    x = np.column_stack([s**nu, np.ones(n)])
    coef, resid, sse, _ = _ols(x, y)
    p_hat, q_hat = float(coef[0]), float(coef[1])

    jac = np.column_stack([s**nu, np.ones(n), p_hat * s**nu * np.log(s)])
    dof = n - 3
    sigma2 = sse / dof if dof > 0 else 0.0
    try:
        cov = sigma2 * np.linalg.inv(jac.T @ jac)
        ses = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        ses = np.full(3, math.nan)
    return KSFitResult(
        model="power",
        p=p_hat,
        q=q_hat,
        nu=float(nu),
        se_p=float(ses[0]),
        se_q=float(ses[1]),
        se_nu=float(ses[2]),
        r_squared=_r_squared(y, sse),
        sse=sse,
        n_points=n,
        residuals=tuple(float(r) for r in resid),
        points=tuple(pts),
        warnings=tuple(warnings),
    )


def help_variable_from_pq(p: float, q: float, s: float) -> float:
    """rho = 6 [(p-1) S^2 + (q-1)] / [(3-2p) S^2 + 2 (3-q)]."""
    denom = (3.0 - 2.0 * p) * s * s + 2.0 * (3.0 - q)
    if denom == 0.0:
        raise UndefinedHelpVariableError(
            f"zero denominator for (p, q, S) = ({p}, {q}, {s})"
        )
    return 6.0 * ((p - 1.0) * s * s + (q - 1.0)) / denom


def result_block(result: KSFitResult) -> str:
    """Key-value block with the fitted relation parameters, full precision."""
    lines = [
        f"model: {result.model}",
        f"nu: {result.nu!r}" + (" (fixed)" if result.model == "quadratic" else ""),
        f"se_nu: {result.se_nu!r}",
        f"p: {result.p!r}",
        f"se_p: {result.se_p!r}",
        f"q: {result.q!r}",
        f"se_q: {result.se_q!r}",
        f"R^2: {result.r_squared!r}",
        f"sse: {result.sse!r}",
        f"n_points: {result.n_points}",
        "fit_space: raw",
        "r2_space: raw",
    ]
    for w in result.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def residuals_csv(result: KSFitResult) -> str:
    lines = ["group,s,k,fitted,residual"]
    for pt, r in zip(result.points, result.residuals):
        fitted = pt.k - r
        lines.append(f"{pt.group_key},{pt.s!r},{pt.k!r},{fitted!r},{r!r}")
    return "\n".join(lines) + "\n"


def curve_csv(result: KSFitResult, n_grid: int = 200) -> str:
    """Fitted curve sampled on a uniform S grid spanning the data."""
    s_lo = result.points[0].s
    s_hi = result.points[-1].s
    lines = ["s,fitted_k"]
    for i in range(n_grid):
        s = s_lo + (s_hi - s_lo) * i / (n_grid - 1)
        k = result.p * s**result.nu + result.q
        lines.append(f"{s!r},{k!r}")
    return "\n".join(lines) + "\n"
