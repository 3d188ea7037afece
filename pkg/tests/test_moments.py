import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maglab.experiments import brute_force
from maglab.model import AttributeVector, MagParams
from maglab.moments import (
    change_of_measure_eval,
    cross_moment_level_bound,
    first_moment_level,
    first_moment_levels,
    first_moment_total,
    joint_isolation_probability,
    log_binom_pmf,
    moment_method_bounds,
    moment_report,
    pair_conditional,
    second_moment_total,
)
from maglab.sampler import sample_graph


def _pair_enumeration(params):
    """E[xi(1) xi(2)] by summing the pair-conditional probability over all (a, b)."""
    L, mu1 = params.L, params.pmf.mu1
    terms = []
    for a in itertools.product((0, 1), repeat=L):
        for b in itertools.product((0, 1), repeat=L):
            w = mu1 ** (sum(a) + sum(b)) * (1 - mu1) ** (2 * L - sum(a) - sum(b))
            terms.append(w * pair_conditional(AttributeVector.of(a), AttributeVector.of(b), params))
    return math.fsum(terms)


class TestHandValues:
    def test_two_nodes_one_attribute(self, config_a):
        p = config_a(2, 1)
        # I is 0 or 2; the single pair is absent with probability 1 - E[Q] = 0.5
        assert first_moment_total(p) == pytest.approx(1.0, abs=1e-12)
        assert second_moment_total(p) == pytest.approx(2.0, abs=1e-12)
        assert joint_isolation_probability(p) == pytest.approx(0.5, abs=1e-12)

    def test_two_nodes_two_attributes(self, config_a):
        assert first_moment_total(config_a(2, 2)) == pytest.approx(1.5, abs=1e-12)

    def test_single_level(self, config_a):
        p = config_a(2, 1)
        # level 1: node has a 1, P = 0.5, isolated w.p. 1 - Gamma(1) = 0.35
        assert first_moment_level(p, 1) == pytest.approx(2 * 0.5 * 0.35, abs=1e-15)
        with pytest.raises(ValueError):
            first_moment_level(p, 2)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("L", [1, 2, 3])
@pytest.mark.parametrize("mu1,q", [(0.5, (0.8, 0.5, 0.2)), (0.3, (0.6, 0.4, 0.3)), (0.7, (0.9, 0.2, 0.1))])
def test_against_enumeration(n, L, mu1, q):
    p = MagParams.build(n, L, mu1, q)
    oracle = brute_force(p)
    rep = moment_report(p)
    assert rep.e_I == pytest.approx(oracle.e_I_exact, rel=1e-10)
    assert rep.e_I_sq == pytest.approx(oracle.e_I_sq_exact, rel=1e-10)
    np.testing.assert_allclose(rep.e_I_level, oracle.per_level_exact, rtol=1e-10)
    assert rep.p_zero_lower - 1e-12 <= oracle.p_zero_exact <= rep.p_zero_upper + 1e-12


@pytest.mark.parametrize("n,L,mu1", [(5, 4, 0.5), (50, 6, 0.3), (1000, 7, 0.6)])
def test_joint_probability_matches_pair_enumeration(n, L, mu1):
    p = MagParams.build(n, L, mu1, (0.7, 0.4, 0.2))
    assert joint_isolation_probability(p) == pytest.approx(_pair_enumeration(p), rel=1e-11)


def test_level_moments_sum_and_nonnegative(config_a):
    p = config_a(500, 30)
    levels = first_moment_levels(p)
    assert np.all(levels >= 0)
    assert levels.sum() == pytest.approx(first_moment_total(p), rel=1e-14)


def test_large_size_stays_finite(config_a):
    rep = moment_report(config_a(10**6, 200))
    assert all(math.isfinite(x) for x in (rep.e_I, rep.e_I_sq, rep.p_zero_lower, rep.p_zero_upper))
    assert rep.e_I_sq >= rep.e_I**2 * (1 - 1e-9)


def test_binomial_pmf_normalised():
    assert np.exp(log_binom_pmf(40, np.arange(41), 0.3)).sum() == pytest.approx(1.0, abs=1e-13)


class TestBounds:
    def test_zero_mean(self):
        assert moment_method_bounds(0.0, 0.0) == (1.0, 1.0)

    def test_clamped(self):
        lo, hi = moment_method_bounds(3.0, 10.0)
        assert lo == 0.0 and hi == pytest.approx(0.1)

    def test_inconsistent_rejected(self):
        with pytest.raises(ValueError):
            moment_method_bounds(2.0, 3.0)

    @given(st.lists(st.integers(0, 20), min_size=1, max_size=50))
    def test_bracket_empirical_law(self, sample):
        z = np.array(sample, dtype=float)
        e1, e2 = z.mean(), (z * z).mean()
        lo, hi = moment_method_bounds(e1, e2)
        p0 = float(np.mean(z == 0))
        assert lo - 1e-12 <= p0 <= hi + 1e-12


def test_cross_moment_bound(config_a):
    p = config_a(6, 3)
    # crude pmf product, so also an upper bound on the exact joint probability at each level pair
    total = sum(cross_moment_level_bound(p, k, l) for k in range(4) for l in range(4))
    assert total == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        cross_moment_level_bound(p, 4, 0)


class TestChangeOfMeasure:
    @pytest.mark.parametrize("nu", [0.1, 0.3, 0.5, 0.9])
    def test_reconstruction(self, config_a, nu):
        p = config_a(300, 25)
        com = change_of_measure_eval(p, nu)
        assert com.reconstructed_e_I == pytest.approx(first_moment_total(p), rel=1e-10)
        assert com.e_n_plus + com.e_n_minus == pytest.approx(com.e_n, rel=1e-12)

    def test_corrupted_gamma_detected(self, config_a):
        # needs a size where isolation is not negligible, or the corruption is invisible
        p = config_a(300, 5)
        com = change_of_measure_eval(p, 0.3, gamma_scale=1.01)
        assert abs(com.reconstructed_e_I / first_moment_total(p) - 1) > 1e-3

    def test_rejects_endpoints(self, config_a):
        with pytest.raises(ValueError):
            change_of_measure_eval(config_a(10, 3), 0.0)


def test_bounds_for_given_moments():
    lo, hi = moment_method_bounds(1.0, 2.1)
    assert lo == 0.0
    assert hi == pytest.approx(1 - 1 / 2.1, abs=1e-15)


def test_cross_moment_bound_dominates_mc(config_a):
    p = config_a(4, 2)
    reps = 20_000
    joint = np.zeros((3, 3))
    for r in range(reps):
        g = sample_graph(p, 21, r)
        iso = g.degrees() == 0
        if iso[0] and iso[1]:
            joint[g.s[0], g.s[1]] += 1
    mean = joint / reps
    se = np.sqrt(mean * (1 - mean) / reps)
    for k in range(3):
        for l in range(3):
            assert cross_moment_level_bound(p, k, l) >= mean[k, l] - 3 * se[k, l]
