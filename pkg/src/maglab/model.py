"""Model parameters and the affinity kernels derived from them.

Every product of per-coordinate probabilities is evaluated from the joint
type counts of the vectors involved, as ``exp(sum of count * log value)``.
That keeps the kernels finite for L in the thousands and makes the pairwise
kernels symmetric bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

PROB_MARGIN = 1e-12


class ParameterError(ValueError):
    """Raised when model parameters violate a model invariant."""


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not (PROB_MARGIN <= value <= 1.0 - PROB_MARGIN):
        raise ParameterError(
            f"{name}={value!r} violates {PROB_MARGIN:g} <= {name} <= 1 - {PROB_MARGIN:g}"
        )
    return value


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric 2x2 kernel; q(0,1) is q(1,0) by construction."""

    q11: float
    q10: float
    q00: float

    def __post_init__(self):
        for name in ("q11", "q10", "q00"):
            object.__setattr__(self, name, _check_probability(name, getattr(self, name)))

    def __call__(self, a: int, b: int) -> float:
        if a and b:
            return self.q11
        if a or b:
            return self.q10
        return self.q00

    @property
    def logs(self) -> tuple[float, float, float]:
        return math.log(self.q11), math.log(self.q10), math.log(self.q00)

    def as_tuple(self) -> tuple[float, float, float]:
        return self.q11, self.q10, self.q00


@dataclass(frozen=True)
class AttributePmf:
    """Bernoulli law of a single attribute; only mu1 is stored."""

    mu1: float

    def __post_init__(self):
        object.__setattr__(self, "mu1", _check_probability("mu1", self.mu1))

    @property
    def mu0(self) -> float:
        return 1.0 - self.mu1

    def __getitem__(self, a: int) -> float:
        return self.mu1 if a else self.mu0


@dataclass(frozen=True)
class MagParams:
    n: int
    L: int
    pmf: AttributePmf
    q: AffinityMatrix

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"n={self.n!r} violates n >= 2")
        if int(self.L) != self.L or self.L < 1:
            raise ParameterError(f"L={self.L!r} violates L >= 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "L", int(self.L))
        g0, g1 = gamma(0, self.q, self.pmf), gamma(1, self.q, self.pmf)
        if not g0 < g1:
            raise ParameterError(
                f"Gamma(0)={g0!r} < Gamma(1)={g1!r} fails; exchange the roles of "
                "attributes 0 and 1 to obtain this orientation"
            )

    @classmethod
    def build(cls, n: int, L: int, mu1: float, q: Sequence[float]) -> "MagParams":
        """Shorthand taking ``q`` as the triple ``(q11, q10, q00)``."""
        return cls(n, L, AttributePmf(mu1), AffinityMatrix(*q))

    def with_size(self, n: int, L: int) -> "MagParams":
        return MagParams(n, L, self.pmf, self.q)

    @property
    def gamma0(self) -> float:
        return gamma(0, self.q, self.pmf)

    @property
    def gamma1(self) -> float:
        return gamma(1, self.q, self.pmf)


@dataclass(frozen=True)
class AttributeVector:
    bits: tuple[int, ...]
    s: int

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("attribute bits must be 0 or 1")
        if self.s != sum(self.bits):
            raise ValueError(f"s={self.s} does not match the {sum(self.bits)} set bits")

    @classmethod
    def of(cls, bits: Sequence[int]) -> "AttributeVector":
        bits = tuple(int(b) for b in bits)
        return cls(bits, sum(bits))

    @property
    def L(self) -> int:
        return len(self.bits)


def gamma(a: int, q: AffinityMatrix, pmf: AttributePmf) -> float:
    """Expected kernel value ``E[q(a, A)]`` against a random attribute."""
    return pmf.mu0 * q(a, 0) + pmf.mu1 * q(a, 1)


def pair_types(a: AttributeVector, b: AttributeVector) -> tuple[int, int, int]:
    """Counts ``(j11, j10, j00)`` of coordinates where both are 1, they differ, both are 0."""
    if a.L != b.L:
        raise ValueError(f"attribute vectors have lengths {a.L} and {b.L}")
    j11 = sum(x & y for x, y in zip(a.bits, b.bits))
    j00 = sum((1 - x) & (1 - y) for x, y in zip(a.bits, b.bits))
    return j11, a.L - j11 - j00, j00


def log_q_type(j11, j10, j00, q: AffinityMatrix):
    """Log of ``Q_L`` for a pair with the given type counts; numpy-broadcasting."""
    l11, l10, l00 = q.logs
    return j11 * l11 + j10 * l10 + j00 * l00


def q_l(a: AttributeVector, b: AttributeVector, q: AffinityMatrix) -> float:
    """Edge probability between nodes carrying attribute vectors ``a`` and ``b``."""
    return math.exp(log_q_type(*pair_types(a, b), q))


def log_q_star(s, L, params: MagParams):
    return s * math.log(params.gamma1) + (L - s) * math.log(params.gamma0)


def q_star(s: int, L: int, params: MagParams) -> float:
    """Mean of ``Q_L(a, A_L)`` over a random vector, for ``a`` with ``s`` ones."""
    if not 0 <= s <= L:
        raise ValueError(f"s={s} outside 0..{L}")
    return math.exp(log_q_star(s, L, params))


def pair_kernel_moments(q: AffinityMatrix, pmf: AttributePmf) -> tuple[float, float, float]:
    """``E[q(1,A)^2]``, ``E[q(1,A) q(0,A)]`` and ``E[q(0,A)^2]``."""
    m11 = pmf.mu0 * q(1, 0) ** 2 + pmf.mu1 * q(1, 1) ** 2
    m10 = pmf.mu0 * q(1, 0) * q(0, 0) + pmf.mu1 * q(1, 1) * q(0, 1)
    m00 = pmf.mu0 * q(0, 0) ** 2 + pmf.mu1 * q(0, 1) ** 2
    return m11, m10, m00


def log_q_star_star_type(j11, j10, j00, params: MagParams):
    m11, m10, m00 = pair_kernel_moments(params.q, params.pmf)
    return j11 * math.log(m11) + j10 * math.log(m10) + j00 * math.log(m00)


def _check_length(a: AttributeVector, b: AttributeVector, params: MagParams):
    if not a.L == b.L == params.L:
        raise ValueError(f"vector lengths {a.L}, {b.L} do not match L={params.L}")


def q_star_star(a: AttributeVector, b: AttributeVector, params: MagParams) -> float:
    """``E[Q_L(a, A_L) Q_L(b, A_L)]`` for a shared random vector ``A_L``."""
    _check_length(a, b, params)
    return math.exp(log_q_star_star_type(*pair_types(a, b), params))


def q_tilde(a: AttributeVector, b: AttributeVector, params: MagParams) -> float:
    """Probability that a third random node links to ``a`` or to ``b``."""
    _check_length(a, b, params)
    return q_star(a.s, params.L, params) + q_star(b.s, params.L, params) - q_star_star(a, b, params)


def q_table(L: int, q: AffinityMatrix) -> np.ndarray:
    """``table[j11, j10] = Q_L`` for every feasible pair type, zero elsewhere.

    Shared by the samplers so that sampled edges use exactly the values
    returned by :func:`q_l`.
    """
    table = np.zeros((L + 1, L + 1))
    for j11 in range(L + 1):
        for j10 in range(L + 1 - j11):
            table[j11, j10] = math.exp(log_q_type(j11, j10, L - j11 - j10, q))
    return table
