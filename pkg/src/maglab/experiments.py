"""Brute-force oracle, identity battery and the phase-transition sweep."""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import moments
from .asymptotics import RegimeReport, ScalingSpec, classify_regime
from .model import MagParams
from .sampler import EstimateResult, estimate_prob_no_isolated, isolation_census, sample_graph, wilson_interval
from .serialize import dumps, format_float

MAX_BRUTE_N = 5
MAX_BRUTE_L = 3
IDENTITY_TOL = 1e-10
RECOMMENDED_REPLICATIONS = 100

CSV_FIELDS = (
    "n", "L", "rho", "rho_n", "p_hat", "std_err", "e_I", "e_I_sq",
    "p_lower", "p_upper", "case", "threshold", "predicted",
)


class ResourceLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    p_zero_exact: float
    e_I_exact: float
    e_I_sq_exact: float
    per_level_exact: np.ndarray


def brute_force(params: MagParams) -> OracleResult:
    """Exact law of the isolated-node count by exhaustive enumeration.

    Every attribute matrix is weighted by the product of its bit
    probabilities and, inside it, every edge subset by the product of its
    independent edge indicators. Edge probabilities are products of raw
    kernel entries, deliberately not routed through the model module.
    """
    n, L = params.n, params.L
    if n > MAX_BRUTE_N or L > MAX_BRUTE_L:
        raise ValueError(f"(n, L) = ({n}, {L}) exceeds the enumeration cap ({MAX_BRUTE_N}, {MAX_BRUTE_L})")
    mu = (1.0 - params.pmf.mu1, params.pmf.mu1)
    kernel = ((params.q.q00, params.q.q10), (params.q.q10, params.q.q11))

    pairs = list(itertools.combinations(range(n), 2))
    m = len(pairs)
    subsets = ((np.arange(2**m)[:, None] >> np.arange(m)) & 1).astype(bool)
    incidence = np.zeros((m, n), dtype=np.int64)
    for e, (u, v) in enumerate(pairs):
        incidence[e, u] = incidence[e, v] = 1
    isolated = (subsets.astype(np.int64) @ incidence) == 0
    count = isolated.sum(axis=1)

    pair_u = np.array([u for u, _ in pairs])
    pair_v = np.array([v for _, v in pairs])
    bits = np.array(list(itertools.product((0, 1), repeat=n * L)), dtype=np.int64)

    p_zero, e1, e2 = [], [], []
    per_level = [[] for _ in range(L + 1)]
    for start in range(0, len(bits), 512):
        flat = bits[start:start + 512]
        attrs = flat.reshape(-1, n, L)
        p_attr = np.prod(np.where(flat == 1, mu[1], mu[0]), axis=1)
        p_edge = np.ones((len(flat), m))
        for l in range(L):
            p_edge *= np.asarray(kernel)[attrs[:, pair_u, l], attrs[:, pair_v, l]]
        # (matrix, subset) probability of each realization
        weight = p_attr[:, None] * np.prod(
            np.where(subsets[None], p_edge[:, None, :], 1.0 - p_edge[:, None, :]), axis=2
        )
        p_zero.append(weight[:, count == 0].ravel())
        e1.append((weight * count).ravel())
        e2.append((weight * count * count).ravel())
        s = attrs.sum(axis=2)
        for level in range(L + 1):
            at_level = (isolated[None, :, :] & (s == level)[:, None, :]).sum(axis=2)
            per_level[level].append((weight * at_level).ravel())
    def total(chunks):
        return math.fsum(np.concatenate(chunks))

    return OracleResult(
        p_zero_exact=total(p_zero),
        e_I_exact=total(e1),
        e_I_sq_exact=total(e2),
        per_level_exact=np.array([total(v) for v in per_level]),
    )


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    passed: bool


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, residual: float, tol: float = IDENTITY_TOL):
        self.checks.append(Check(name, residual, bool(residual <= tol)))

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}  {c.name:<48s} residual={c.residual:.3e}" for c in self.checks]


def _rel(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def verify_identities(params: MagParams, nu_list, gamma_scale: float = 1.0) -> VerificationReport:
    """Exact finite-(n, L) identities; failures are reported, never raised.

    ``gamma_scale`` != 1 corrupts Gamma(1) inside the change-of-measure
    evaluation, which the reconstruction check must catch.
    """
    report = VerificationReport()
    rep = moments.moment_report(params)
    report.add("level sum equals E[I]", _rel(float(np.sum(rep.e_I_level)), rep.e_I))
    for nu in nu_list:
        com = moments.change_of_measure_eval(params, nu, gamma_scale=gamma_scale)
        report.add(f"change of measure reconstructs E[I] (nu={nu:g})", _rel(com.reconstructed_e_I, rep.e_I))
        report.add(f"E+ + E- equals E_n (nu={nu:g})", _rel(com.e_n_plus + com.e_n_minus, com.e_n))
    report.add("moment bounds ordered (lower <= upper)", max(0.0, rep.p_zero_lower - rep.p_zero_upper), 0.0)
    return report


ORACLE_GRID_Q = ((0.8, 0.5, 0.2), (0.6, 0.4, 0.3))


def oracle_grid(ns=(2, 3, 4), Ls=(1, 2), mu1s=(0.3, 0.5), qs=ORACLE_GRID_Q):
    for n, L, mu1, q in itertools.product(ns, Ls, mu1s, qs):
        yield MagParams.build(n, L, mu1, q)


def verify_oracle(params: MagParams, report: VerificationReport | None = None) -> VerificationReport:
    """Closed forms against exhaustive enumeration, plus the bracket on P[I = 0]."""
    report = report if report is not None else VerificationReport()
    tag = f"n={params.n} L={params.L} mu1={params.pmf.mu1:g} q={params.q.as_tuple()}"
    oracle = brute_force(params)
    rep = moments.moment_report(params)
    report.add(f"E[I] vs enumeration ({tag})", _rel(rep.e_I, oracle.e_I_exact))
    report.add(f"E[I^2] vs enumeration ({tag})", _rel(rep.e_I_sq, oracle.e_I_sq_exact))
    level_res = max(_rel(a, b) for a, b in zip(rep.e_I_level, oracle.per_level_exact))
    report.add(f"E[I^(l)] vs enumeration ({tag})", level_res)
    outside = max(0.0, rep.p_zero_lower - oracle.p_zero_exact, oracle.p_zero_exact - rep.p_zero_upper)
    report.add(f"P[I=0] inside moment bracket ({tag})", outside, 1e-12)
    return report


@dataclass(frozen=True)
class SweepConfig:
    mu1: float
    q: tuple[float, float, float]
    rho_list: tuple[float, ...]
    n_list: tuple[int, ...]
    replications: int
    seed: int
    mode: str = "census"
    max_rows: int | None = None
    max_seconds: float | None = None
    threads: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "rho_list", tuple(float(r) for r in self.rho_list))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        if list(self.n_list) != sorted(self.n_list):
            raise ValueError("n_list must be ascending")
        if self.mode not in ("census", "full-graph"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.replications < RECOMMENDED_REPLICATIONS:
            warnings.warn(
                f"replications={self.replications} is below the recommended {RECOMMENDED_REPLICATIONS}",
                stacklevel=3,
            )


@dataclass(frozen=True)
class SweepRow:
    n: int
    L: int
    rho: float
    rho_n: float
    p_hat: float
    std_err: float
    e_I: float
    e_I_sq: float
    p_lower: float
    p_upper: float
    regime: RegimeReport
    replications: int = 0

    def bracket_consistent(self, z: float = 3.0) -> bool:
        """Whether the moment bracket is compatible with the estimate at ``z`` sigma.

        Uses the Wilson interval, which stays informative when ``p_hat`` is 0 or 1.
        """
        lo, hi = wilson_interval(round(self.p_hat * self.replications), self.replications, z)
        return self.p_lower <= hi and lo <= self.p_upper

    def as_record(self) -> dict:
        return {
            "n": self.n, "L": self.L, "rho": self.rho, "rho_n": self.rho_n,
            "p_hat": self.p_hat, "std_err": self.std_err,
            "e_I": self.e_I, "e_I_sq": self.e_I_sq,
            "p_lower": self.p_lower, "p_upper": self.p_upper,
            "case": self.regime.case.value, "threshold": self.regime.threshold_value,
            "predicted": self.regime.predicted_limit.value,
        }


def _full_graph_estimate(params: MagParams, replications: int, seed: int):
    hits = sum(isolation_census(sample_graph(params, seed, r)).total == 0 for r in range(replications))
    p = hits / replications
    return EstimateResult(p, math.sqrt(p * (1 - p) / replications), wilson_interval(hits, replications), replications)


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """One row per (rho, n), in config order, with exact moments and an MC estimate.

    Each row draws from the streams ``(seed, 0..replications-1)``.
    """
    rows: list[SweepRow] = []
    started = time.monotonic()
    total = len(config.rho_list) * len(config.n_list)
    if config.max_rows is not None and total > config.max_rows:
        raise ResourceLimitExceeded(f"sweep has {total} rows, limit is {config.max_rows}")
    for rho in config.rho_list:
        scaling = ScalingSpec(rho)
        for n in config.n_list:
            params = MagParams.build(n, scaling.L(n), config.mu1, config.q)
            regime = classify_regime(rho, params)
            rep = moments.moment_report(params)
            if config.mode == "census":
                est = estimate_prob_no_isolated(params, config.replications, config.seed, config.threads)
            else:
                est = _full_graph_estimate(params, config.replications, config.seed)
            rows.append(SweepRow(
                n=n, L=params.L, rho=rho, rho_n=scaling.rho_n(n),
                p_hat=est.p_hat, std_err=est.std_err,
                e_I=rep.e_I, e_I_sq=rep.e_I_sq,
                p_lower=rep.p_zero_lower, p_upper=rep.p_zero_upper, regime=regime,
                replications=config.replications,
            ))
            if config.max_seconds is not None and time.monotonic() - started > config.max_seconds:
                raise ResourceLimitExceeded(
                    f"wall-clock limit of {config.max_seconds}s exceeded after {len(rows)} rows"
                )
    return rows


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        rec = row.as_record()
        writer.writerow(format_float(v) if isinstance(v, float) else v for v in rec.values())
    return buf.getvalue()


def rows_to_json(rows: list[SweepRow], config: SweepConfig) -> str:
    return dumps({
        "seed": config.seed,
        "replications": config.replications,
        "mode": config.mode,
        "mu1": config.mu1,
        "q": list(config.q),
        "rows": [row.as_record() for row in rows],
    })
