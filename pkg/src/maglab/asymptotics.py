"""Rate function, regime classification and finite-n diagnostics for the zero-one laws."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.special import gammaln

BOUNDARY_TOL = 1e-12
ROOT_RESIDUAL_TOL = 1e-12
ROOT_WIDTH_TOL = 1e-15


def _check_mu(mu: float):
    if not 0.0 < mu < 1.0:
        raise ValueError(f"mu={mu!r} outside (0, 1)")


def ln_g(nu: float, mu: float) -> float:
    """``-nu ln(nu/mu) - (1-nu) ln((1-nu)/(1-mu))`` with ``0 ln 0 = 0``."""
    _check_mu(mu)
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"nu={nu!r} outside [0, 1]")
    out = 0.0
    if nu > 0.0:
        out -= nu * math.log(nu / mu)
    if nu < 1.0:
        out -= (1.0 - nu) * math.log((1.0 - nu) / (1.0 - mu))
    return out


def g_value(nu: float, mu: float) -> float:
    return math.exp(ln_g(nu, mu))


def nu_star(rho: float, mu1: float) -> float:
    """Root in ``(0, mu1)`` of ``1 + rho ln G(nu, mu1) = 0``, by bisection.

    Requires ``1 + rho ln(1 - mu1) < 0``; ``ln G`` increases on ``(0, mu1)``
    so the root there is unique.
    """
    _check_mu(mu1)
    if rho <= 0:
        raise ValueError(f"rho={rho!r} must be positive")
    at_zero = 1.0 + rho * math.log1p(-mu1)
    if not at_zero < 0:
        raise ValueError(
            f"1 + rho ln(1 - mu1) = {at_zero!r} is not < 0; no root below mu1"
        )

    def f(nu):
        return 1.0 + rho * ln_g(nu, mu1)

    eps = 1e-3 * mu1
    lo, hi = eps, mu1 - eps
    # The bracket [0, mu1] always works; shrink the initial guess toward it.
    while f(lo) > 0:
        lo *= 0.5
        if lo < 1e-300:
            lo = 0.0
            break
    while f(hi) < 0:
        hi = 0.5 * (hi + mu1)
        if mu1 - hi < 1e-16:
            hi = mu1
            break
    while True:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) <= ROOT_RESIDUAL_TOL or hi - lo <= ROOT_WIDTH_TOL:
            return mid
        if fm < 0:
            lo = mid
        else:
            hi = mid


class Case(str, enum.Enum):
    CASE_ONE = "CaseOne"
    CASE_TWO = "CaseTwo"
    BOUNDARY = "Boundary"


class Limit(str, enum.Enum):
    ZERO = "Zero"
    ONE = "One"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class RegimeReport:
    rho: float
    case: Case
    discriminant: float
    threshold_value: float
    predicted_limit: Limit
    nu_star: float | None = None


def affine_threshold(nu: float, rho: float, gamma0: float, gamma1: float) -> float:
    """``1 + rho ln(Gamma(1)^nu Gamma(0)^(1-nu))``."""
    return 1.0 + rho * (nu * math.log(gamma1) + (1.0 - nu) * math.log(gamma0))


def classify_regime(rho: float, params) -> RegimeReport:
    """Which zero-one law applies at ``rho`` and the limit it predicts.

    When ``|1 + rho ln mu(0)|`` is within tolerance the case is reported as
    Boundary; the threshold is then the common value of both case formulas
    (nu_star tends to 0 there).
    """
    if rho <= 0:
        raise ValueError(f"rho={rho!r} must be positive")
    g0, g1 = params.gamma0, params.gamma1
    disc = 1.0 + rho * math.log(params.pmf.mu0)
    if abs(disc) <= BOUNDARY_TOL:
        return RegimeReport(rho, Case.BOUNDARY, disc, affine_threshold(0.0, rho, g0, g1), Limit.BOUNDARY)
    if disc > 0:
        case, root = Case.CASE_ONE, None
        threshold = affine_threshold(0.0, rho, g0, g1)
    else:
        case, root = Case.CASE_TWO, nu_star(rho, params.pmf.mu1)
        threshold = affine_threshold(root, rho, g0, g1)
    if abs(threshold) <= BOUNDARY_TOL:
        limit = Limit.BOUNDARY
    else:
        limit = Limit.ONE if threshold > 0 else Limit.ZERO
    return RegimeReport(rho, case, disc, threshold, limit, root)


@dataclass(frozen=True)
class ScalingSpec:
    """The scaling ``L_n = max(1, nearest integer to rho ln n)``."""

    rho: float

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"rho={self.rho!r} must be positive")

    def L(self, n: int) -> int:
        return max(1, math.floor(self.rho * math.log(n) + 0.5))

    def rho_n(self, n: int) -> float:
        if n < 2:
            raise ValueError("rho_n is defined for n >= 2")
        return self.L(n) / math.log(n)

    def level(self, n: int, nu: float) -> int:
        """The nu-associated level ``floor(nu L_n)``."""
        return math.floor(nu * self.L(n))


def finite_n_lemma_a(nu_n: float, n: int, scaling: ScalingSpec, params) -> float:
    """``(1 - (Gamma(1)^nu Gamma(0)^(1-nu))^(L_n))^(n-1)`` at finite n."""
    if not 0.0 <= nu_n <= 1.0:
        raise ValueError(f"nu={nu_n!r} outside [0, 1]")
    if n < 2:
        raise ValueError("n must be >= 2")
    log_base = nu_n * math.log(params.gamma1) + (1.0 - nu_n) * math.log(params.gamma0)
    x = math.exp(scaling.L(n) * log_base)
    return math.exp((n - 1) * math.log1p(-x))


def finite_n_lemma_b(c_n: float, n: int, scaling: ScalingSpec) -> float:
    """``n c_n^(L_n)``, which equals ``n^(1 + rho_n ln c_n)``."""
    if c_n <= 0:
        raise ValueError("c_n must be positive")
    if n < 2:
        raise ValueError("n must be >= 2")
    return math.exp(math.log(n) + scaling.L(n) * math.log(c_n))


def level_term_pair(n: int, L: int, nu: float, mu1: float) -> tuple[float, float]:
    """Stirling form ``n G(nu, mu1)^L / sqrt(2 pi nu (1-nu) L)`` and the exact term.

    The exact term is ``n P[S_L = l]`` at ``l = round(nu L)``, evaluated with
    log-gamma.
    """
    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu={nu!r} outside (0, 1)")
    level = math.floor(nu * L + 0.5)
    if not 1 <= level <= L - 1:
        raise ValueError(f"round(nu L) = {level} outside [1, L - 1] for L={L}")
    approx = n * math.exp(L * ln_g(nu, mu1)) / math.sqrt(2 * math.pi * nu * (1 - nu) * L)
    log_exact = (
        gammaln(L + 1) - gammaln(level + 1) - gammaln(L - level + 1)
        + level * math.log(mu1) + (L - level) * math.log1p(-mu1)
    )
    return approx, n * math.exp(log_exact)


def stirling_level_asymptote(n: int, scaling: ScalingSpec, nu: float, mu1: float) -> float:
    return level_term_pair(n, scaling.L(n), nu, mu1)[0]


def stirling_level_exact(n: int, scaling: ScalingSpec, nu: float, mu1: float) -> float:
    return level_term_pair(n, scaling.L(n), nu, mu1)[1]
