"""Sampling MAG realizations and counting their isolated nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist

import numba
import numpy as np

from . import _kernels
from .model import AttributeVector, MagParams, q_table
from .rng import stream_key, stream_keys

Z95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True, eq=False)
class MagGraph:
    """One realization: attribute bits ``(n, L)`` and the edges ``u < v``."""

    n: int
    L: int
    attributes: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        if self.attributes.shape != (self.n, self.L):
            raise ValueError(f"attribute matrix has shape {self.attributes.shape}")
        if len(self.edges) and not np.all(self.edges[:, 0] < self.edges[:, 1]):
            raise ValueError("edges must be stored as (u, v) with u < v")
        if len(self.edges) and (self.edges.min() < 0 or self.edges.max() >= self.n):
            raise ValueError(f"edge endpoint outside 0..{self.n - 1}")

    @property
    def s(self) -> np.ndarray:
        return self.attributes.sum(axis=1)

    def attribute(self, u: int) -> AttributeVector:
        return AttributeVector.of(self.attributes[u])

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def adjacency(self) -> np.ndarray:
        """Dense symmetric boolean adjacency matrix; meant for small graphs."""
        adj = np.zeros((self.n, self.n), dtype=bool)
        adj[self.edges[:, 0], self.edges[:, 1]] = True
        adj[self.edges[:, 1], self.edges[:, 0]] = True
        return adj


@dataclass(frozen=True)
class IsolationCensus:
    total: int
    by_level: tuple[int, ...]

    def __post_init__(self):
        if sum(self.by_level) != self.total:
            raise ValueError("per-level counts do not add up to the total")


@dataclass(frozen=True)
class EstimateResult:
    p_hat: float
    std_err: float
    ci95: tuple[float, float]
    replications: int


@dataclass(frozen=True)
class MomentEstimate:
    replications: int
    mean_I: float
    se_I: float
    mean_I_sq: float
    se_I_sq: float
    per_level_means: np.ndarray = field(repr=False)
    per_level_se: np.ndarray = field(repr=False)


def _unpack(packed: np.ndarray, L: int) -> np.ndarray:
    as_bytes = packed.astype("<u8").view(np.uint8).reshape(packed.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :L]


def _kernel_args(params: MagParams):
    return params.n, params.L, params.pmf.mu1, q_table(params.L, params.q)


def sample_graph(params: MagParams, seed: int, replication: int = 0) -> MagGraph:
    """Sample one realization from the stream ``(seed, replication)``.

    The n*L attribute draws come first, then one uniform per unordered pair
    in row-major order; the pair is an edge iff its uniform is <= Q_L.
    """
    n, L, mu1, qtab = _kernel_args(params)
    key = np.uint64(stream_key(seed, replication))
    packed, _, edges = _kernels.sample_edges(n, L, mu1, qtab, key)
    return MagGraph(n, L, _unpack(packed, L), edges)


def isolation_census(g: MagGraph) -> IsolationCensus:
    isolated = g.degrees() == 0
    by_level = np.bincount(g.s[isolated], minlength=g.L + 1)
    return IsolationCensus(int(isolated.sum()), tuple(int(c) for c in by_level))


def census_stream(params: MagParams, seed: int, replication: int = 0) -> IsolationCensus:
    """Census of the same realization as :func:`sample_graph`, in O(n) memory."""
    n, L, mu1, qtab = _kernel_args(params)
    by_level = _kernels.census(n, L, mu1, qtab, np.uint64(stream_key(seed, replication)))
    return IsolationCensus(int(by_level.sum()), tuple(int(c) for c in by_level))


def has_isolated(params: MagParams, seed: int, replication: int = 0) -> bool:
    n, L, mu1, qtab = _kernel_args(params)
    return bool(_kernels.has_isolated(n, L, mu1, qtab, np.uint64(stream_key(seed, replication))))


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def _set_threads(threads: int | None):
    if threads is not None:
        numba.set_num_threads(max(1, min(threads, numba.config.NUMBA_NUM_THREADS)))


def estimate_prob_no_isolated(
    params: MagParams, replications: int, seed: int, threads: int | None = None
) -> EstimateResult:
    """Monte Carlo estimate of P[no isolated nodes].

    Replication ``r`` uses stream ``(seed, r)``, so the estimate does not
    depend on the thread count or on the order in which replications run.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    _set_threads(threads)
    flags = _kernels.has_isolated_batch(*_kernel_args(params), stream_keys(seed, replications))
    hits = int(replications - flags.sum())
    p = hits / replications
    return EstimateResult(
        p_hat=p,
        std_err=math.sqrt(p * (1 - p) / replications),
        ci95=wilson_interval(hits, replications),
        replications=replications,
    )


def census_counts(
    params: MagParams, replications: int, seed: int, threads: int | None = None
) -> np.ndarray:
    """Per-replication isolated counts by level, shape ``(replications, L + 1)``."""
    _set_threads(threads)
    return _kernels.census_batch(*_kernel_args(params), stream_keys(seed, replications))


def estimate_moments_mc(
    params: MagParams, replications: int, seed: int, threads: int | None = None
) -> MomentEstimate:
    if replications < 2:
        raise ValueError("replications must be >= 2")
    counts = census_counts(params, replications, seed, threads).astype(np.float64)
    total = counts.sum(axis=1)
    root = math.sqrt(replications)
    return MomentEstimate(
        replications=replications,
        mean_I=float(np.mean(total)),
        se_I=float(np.std(total, ddof=1) / root),
        mean_I_sq=float(np.mean(total**2)),
        se_I_sq=float(np.std(total**2, ddof=1) / root),
        per_level_means=counts.mean(axis=0),
        per_level_se=counts.std(axis=0, ddof=1) / root,
    )


def edge_counts(params: MagParams, replications: int, seed: int) -> np.ndarray:
    return _kernels.edge_count_batch(*_kernel_args(params), stream_keys(seed, replications))


def write_edge_list(g: MagGraph, path) -> None:
    with open(path, "w") as fh:
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def write_attributes(g: MagGraph, path) -> None:
    with open(path, "w") as fh:
        for row in g.attributes:
            fh.write(" ".join(str(int(b)) for b in row) + "\n")


def read_edge_list(path) -> np.ndarray:
    text = Path(path).read_text().split()
    return np.array(text, dtype=np.int64).reshape(-1, 2)


def read_attributes(path) -> np.ndarray:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    return np.array(rows, dtype=np.uint8)
