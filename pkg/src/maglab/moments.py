"""Closed-form moments of the isolated-node counts.

All series are summed with numpy's pairwise summation over terms that are
evaluated entirely in log space; ``(1 - x)^m`` is always
``exp(m * log1p(-x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .asymptotics import ln_g
from .model import (
    AttributeVector,
    MagParams,
    log_q_star,
    log_q_type,
    pair_kernel_moments,
    q_l,
    q_star,
    q_tilde,
)

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class MomentReport:
    e_I: float
    e_I_level: np.ndarray
    e_I_sq: float
    p_zero_lower: float
    p_zero_upper: float


@dataclass(frozen=True)
class ChangeOfMeasureReport:
    nu: float
    g_pow_l: float
    e_n: float
    e_n_plus: float
    e_n_minus: float
    reconstructed_e_I: float


def log_binom_pmf(L, k, mu1: float):
    """``log P[S_L = k]`` for ``S_L ~ Binomial(L, mu1)``; vectorised over ``k``."""
    k = np.asarray(k, dtype=np.float64)
    return (
        gammaln(L + 1) - gammaln(k + 1) - gammaln(L - k + 1)
        + k * math.log(mu1) + (L - k) * math.log1p(-mu1)
    )


def first_moment_levels(params: MagParams) -> np.ndarray:
    """``E[I^(l)]`` for every level ``l = 0..L``."""
    n, L = params.n, params.L
    s = np.arange(L + 1)
    log_isolated = (n - 1) * np.log1p(-np.exp(log_q_star(s, L, params)))
    return n * np.exp(log_isolated + log_binom_pmf(L, s, params.pmf.mu1))


def first_moment_level(params: MagParams, level: int) -> float:
    if not 0 <= level <= params.L:
        raise ValueError(f"level {level} outside 0..{params.L}")
    n, L = params.n, params.L
    log_isolated = (n - 1) * math.log1p(-q_star(level, L, params))
    return n * math.exp(log_isolated + float(log_binom_pmf(L, level, params.pmf.mu1)))


def first_moment_total(params: MagParams) -> float:
    return float(np.sum(first_moment_levels(params)))


def pair_conditional(a: AttributeVector, b: AttributeVector, params: MagParams) -> float:
    """P[both nodes isolated | their attribute vectors are ``a`` and ``b``]."""
    return (1.0 - q_l(a, b, params.q)) * math.exp(
        (params.n - 2) * math.log1p(-q_tilde(a, b, params))
    )


def _pair_type_grid(L: int):
    # j11 + j10 + j01 + j00 = L, where j10 counts (a=1, b=0) and j01 counts (a=0, b=1)
    j11, j10, j01 = np.meshgrid(np.arange(L + 1), np.arange(L + 1), np.arange(L + 1), indexing="ij")
    keep = j11 + j10 + j01 <= L
    j11, j10, j01 = j11[keep], j10[keep], j01[keep]
    return j11, j10, j01, L - j11 - j10 - j01


def joint_isolation_probability(params: MagParams) -> float:
    """``E[xi(1) xi(2)]``: probability that two given nodes are both isolated.

    Exact sum over the joint type of the two attribute vectors.  The type
    needs four counts rather than three, because the probability that a
    third node links to either one depends on each node's own count of
    ones, i.e. on how the mismatched coordinates split between them.
    """
    n, L = params.n, params.L
    mu1, mu0 = params.pmf.mu1, params.pmf.mu0
    m11, m10, m00 = pair_kernel_moments(params.q, params.pmf)
    j11, j10, j01, j00 = _pair_type_grid(L)
    log_weight = (
        gammaln(L + 1) - gammaln(j11 + 1) - gammaln(j10 + 1) - gammaln(j01 + 1) - gammaln(j00 + 1)
        + 2 * j11 * math.log(mu1) + (j10 + j01) * (math.log(mu1) + math.log(mu0))
        + 2 * j00 * math.log(mu0)
    )
    q_pair = np.exp(log_q_type(j11, j10 + j01, j00, params.q))
    star_a = np.exp(log_q_star(j11 + j10, L, params))
    star_b = np.exp(log_q_star(j11 + j01, L, params))
    star_star = np.exp(j11 * math.log(m11) + (j10 + j01) * math.log(m10) + j00 * math.log(m00))
    tilde = star_a + star_b - star_star
    terms = np.exp(log_weight + np.log1p(-q_pair) + (n - 2) * np.log1p(-tilde))
    return float(np.sum(terms))


def second_moment_total(params: MagParams) -> float:
    """``E[I^2] = E[I] + n (n - 1) E[xi(1) xi(2)]``."""
    n = params.n
    if n < 2:
        raise ValueError("second moment needs n >= 2")
    return first_moment_total(params) + n * (n - 1) * joint_isolation_probability(params)


def cross_moment_level_bound(params: MagParams, k: int, level: int) -> float:
    """Upper bound ``P[S_L = k] P[S_L = level]`` on ``E[xi^(k)(1) xi^(level)(2)]``."""
    L = params.L
    if not (0 <= k <= L and 0 <= level <= L):
        raise ValueError(f"levels ({k}, {level}) outside 0..{L}")
    return math.exp(float(log_binom_pmf(L, k, params.pmf.mu1) + log_binom_pmf(L, level, params.pmf.mu1)))


def moment_method_bounds(e1: float, e2: float) -> tuple[float, float]:
    """First- and second-moment bracket on P[Z = 0] for a counting variable Z."""
    if e1 < 0 or e2 < 0:
        raise ValueError("moments of a counting variable are non-negative")
    if e1 == 0:
        return 1.0, 1.0
    if e2 < e1 * e1 * (1.0 - CONSISTENCY_TOL):
        raise ValueError(f"inconsistent moments: E[Z^2]={e2!r} < E[Z]^2={e1 * e1!r}")
    lower = min(1.0, max(0.0, 1.0 - e1))
    upper = min(1.0, max(0.0, 1.0 - e1 * e1 / e2))
    return lower, upper


def moment_report(params: MagParams) -> MomentReport:
    levels = first_moment_levels(params)
    e1 = float(np.sum(levels))
    e2 = e1 + params.n * (params.n - 1) * joint_isolation_probability(params)
    lower, upper = moment_method_bounds(e1, e2)
    return MomentReport(e1, levels, e2, lower, upper)


def change_of_measure_eval(
    params: MagParams, nu: float, gamma_scale: float = 1.0
) -> ChangeOfMeasureReport:
    """Evaluate the first moment under the attribute law tilted to Bernoulli(nu).

    ``gamma_scale`` multiplies Gamma(1) inside the tilted expectation only;
    it exists so the identity check can be shown to detect a corrupted kernel.
    """
    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu={nu!r} outside (0, 1)")
    n, L = params.n, params.L
    mu1, mu0 = params.pmf.mu1, params.pmf.mu0
    s = np.arange(L + 1)
    log_g1 = math.log(params.gamma1 * gamma_scale)
    log_star = s * log_g1 + (L - s) * math.log(params.gamma0)
    log_ratio = math.log(mu1 / nu) + math.log((1.0 - nu) / mu0)
    log_terms = (
        log_binom_pmf(L, s, nu)
        + (n - 1) * np.log1p(-np.exp(log_star))
        + (s - L * nu) * log_ratio
    )
    terms = np.exp(log_terms)
    upper_side = s > L * nu
    e_plus = float(np.sum(terms[upper_side]))
    e_minus = float(np.sum(terms[~upper_side]))
    e_n = float(np.sum(terms))
    g_pow_l = math.exp(L * ln_g(nu, mu1))
    return ChangeOfMeasureReport(nu, g_pow_l, e_n, e_plus, e_minus, n * g_pow_l * e_n)
