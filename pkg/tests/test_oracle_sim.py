import csv
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from walkextrap.evaluation import EvalSpec, build_v, build_v_discrete_dtrw
from walkextrap.inner_products import FunctionSpec
from walkextrap.measures import CTQW, CTRW_Z, DTRW_Z, HADAMARD_R, RW, DomainError, density, dtqw, moment
from walkextrap.oracle_sim import (
    DistributionOnZ,
    SimulationTooLarge,
    arcsine_cdf,
    ctrw_distribution,
    discrete_v,
    gaussian_cdf,
    hadamard_norm_drift,
    konno_cdf,
    ks_statistic,
    quad_mean,
    quad_moment,
    quad_v,
    simulate_ctrw_measure_check,
    simulate_dtrw,
    simulate_hadamard_dtqw,
)

HAD = dtqw(HADAMARD_R)


@pytest.fixture(scope="module")
def hadamard_2000():
    return simulate_hadamard_dtqw(2000)


class TestQuadMoment:
    def test_mean_ctqw(self):
        assert quad_moment(CTQW, 1, 1.0, 0.3) == pytest.approx(0.4, rel=1e-12)

    def test_gaussian_fourth(self):
        assert quad_moment(RW, 4, 1.0, 0.5) == pytest.approx(3.0, rel=1e-12)

    def test_hadamard_second(self):
        assert quad_moment(HAD, 2, 1.0, 0.5) == pytest.approx(1 - 1 / math.sqrt(2), rel=1e-12)

    def test_lattice_walks(self):
        assert quad_moment(DTRW_Z, 2, 4, 0.25) == pytest.approx(7.0, rel=1e-14)
        assert quad_moment(CTRW_Z, 2, 2.0, 0.3) == pytest.approx(2.0 + 0.16 * 4, rel=1e-12)

    @pytest.mark.parametrize("walk", [CTQW, HAD, RW, CTRW_Z], ids=str)
    def test_mean(self, walk):
        for x, p in [(1.0, 0.25), (3.0, 0.9)]:
            assert quad_mean(walk, x, p) == pytest.approx((1 - 2 * p) * x, abs=1e-9)


class TestQuadV:
    def test_zero_function_at_half(self):
        a = 2.5
        spec = EvalSpec(RW, FunctionSpec.polynomial([0.0], a))
        assert quad_v(spec, 0.5) == pytest.approx(a * a / 2, rel=1e-7)

    def test_identity_at_zero(self):
        a = 1.0
        assert quad_v(EvalSpec(CTQW, FunctionSpec.identity(a)), 0.0) == pytest.approx(a**3 / 6, rel=1e-7)

    def test_hadamard_cos_quartic(self):
        spec = EvalSpec(HAD, FunctionSpec.cosine(math.pi), 4)
        assert quad_v(spec, 0.7) == pytest.approx(build_v(spec).at_p(0.7), rel=1e-6)

    def test_discrete_route(self):
        f = FunctionSpec.cosine(6)
        assert quad_v(EvalSpec(DTRW_Z, f), 0.4) == discrete_v(f, 6, 0.4)


class TestSimulateDtrw:
    def test_one_step(self):
        d = simulate_dtrw(1, 0.25)
        assert d.as_dict() == {-1: 0.25, 1: 0.75}

    def test_two_steps_exact(self):
        d = simulate_dtrw(2, Fraction(1, 2))
        assert d.as_dict() == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}
        assert d.total() == 1

    @pytest.mark.parametrize("t", [0, 1, 7, 18, 30])
    def test_bitwise_binomial(self, t):
        p = Fraction(2, 7)
        d = simulate_dtrw(t, p)
        for y in range(-t, t + 1):
            if (t - y) % 2:
                assert d.mass_at(y) == 0
                continue
            k = (t - y) // 2  # number of left steps
            assert d.mass_at(y) == math.comb(t, k) * p**k * (1 - p) ** (t - k)
        assert d.total() == 1

    def test_matches_density(self):
        d = simulate_dtrw(9, 0.35)
        for y in range(-9, 10):
            assert d.mass_at(y) == pytest.approx(density(DTRW_Z, 9, 0.35, y), rel=1e-12, abs=1e-300)

    def test_rejects(self):
        with pytest.raises(ValueError):
            simulate_dtrw(-1, 0.5)
        with pytest.raises(ValueError):
            simulate_dtrw(3, 1.5)

    def test_gaussian_limit(self):
        t = 10_000
        rep = ks_statistic(simulate_dtrw(t, 0.5), math.sqrt(t), gaussian_cdf, "gaussian")
        assert 0 <= rep.statistic <= 0.02
        assert rep.target == "gaussian" and rep.sample_or_time_scale == 100.0


class TestDiscreteV:
    def test_zero_function(self):
        assert discrete_v(FunctionSpec.polynomial([0.0], 2), 2, 0.5) == pytest.approx(3.0, abs=1e-15)

    def test_deterministic_walk(self):
        assert discrete_v(FunctionSpec.identity(3), 3, 0.0) == 0.0

    def test_against_quadratic(self):
        f = FunctionSpec.identity(3)
        assert discrete_v(f, 3, 0.3) == pytest.approx(build_v_discrete_dtrw(f, 3)(0.4), rel=1e-12)

    def test_random_triples(self):
        rng = random.Random(20240611)
        for _ in range(20):
            a = rng.randint(2, 12)
            coeffs = [rng.uniform(-2, 2) for _ in range(rng.randint(1, 3))]
            f = FunctionSpec.polynomial(coeffs, a)
            p = rng.uniform(0.01, 0.99)
            want = discrete_v(f, a, p)
            assert build_v_discrete_dtrw(f, a).at_p(p) == pytest.approx(want, rel=1e-10)


class TestCtrw:
    def test_master_equation(self):
        assert simulate_ctrw_measure_check(1.0, 0.5) <= 1e-6
        assert simulate_ctrw_measure_check(3.0, 0.2, (-15, 15)) <= 1e-6

    def test_normalisation(self):
        assert ctrw_distribution(2.0, 0.3).total() == pytest.approx(1.0, abs=1e-10)

    def test_symmetric_mean(self):
        assert ctrw_distribution(1.0, 0.5).moment(1) == pytest.approx(0.0, abs=1e-10)

    def test_moments_match_cumulant_route(self):
        d = ctrw_distribution(2.5, 0.3)
        for k in range(9):
            assert d.moment(k) == pytest.approx(moment(CTRW_Z, k, 2.5, 0.3), rel=1e-10)

    def test_large_x(self):
        d = ctrw_distribution(400.0, 0.1)
        assert d.total() == pytest.approx(1.0, abs=1e-10)
        assert d.moment(1) == pytest.approx(320.0, rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            ctrw_distribution(1.0, 1.0)
        with pytest.raises(ValueError):
            simulate_ctrw_measure_check(1e-6, 0.5)


class TestHadamard:
    def test_one_step(self):
        d = simulate_hadamard_dtqw(1)
        assert d.total() == pytest.approx(1.0, abs=1e-15)
        assert set(d.as_dict()) <= {-1, 1}

    def test_symmetric(self):
        d = simulate_hadamard_dtqw(101)
        np.testing.assert_allclose(d.masses, d.masses[::-1], atol=1e-15)

    def test_unitarity(self):
        assert hadamard_norm_drift(2000) <= 1e-12

    def test_second_moment(self, hadamard_2000):
        want = 1 - 1 / math.sqrt(2)
        assert abs(hadamard_2000.moment(2, 2000) - want) <= 0.01 * want

    def test_concentration(self, hadamard_2000):
        z = hadamard_2000.positions / 2000
        outside = math.fsum(hadamard_2000.masses[np.abs(z) > HADAMARD_R + 0.05])
        assert outside <= 0.02

    def test_konno_shape_is_close(self, hadamard_2000):
        # the lattice law oscillates around the limit density; this is only a loose sanity bound
        rep = ks_statistic(hadamard_2000, 2000, lambda z: konno_cdf(z, HADAMARD_R), "konno")
        assert rep.statistic < 0.1

    def test_too_large(self):
        with pytest.raises(SimulationTooLarge):
            simulate_hadamard_dtqw(10**9)


class TestCdfs:
    def test_konno_cdf_against_quadrature(self):
        r = 0.6

        def g(t):
            return density(dtqw(r), 1.0, 0.5, r * math.sin(t)) * r * math.cos(t)

        for z in (-0.5, -0.1, 0.0, 0.3, 0.59):
            want = integrate.quad(g, -math.pi / 2, math.asin(z / r), epsabs=1e-13)[0]
            assert konno_cdf(z, r) == pytest.approx(want, abs=1e-10)

    def test_endpoints(self):
        assert arcsine_cdf(-2.0) == 0.0 and arcsine_cdf(2.0) == 1.0
        assert konno_cdf(-1.0, 0.5) == pytest.approx(0.0) and konno_cdf(1.0, 0.5) == pytest.approx(1.0)

    def test_arcsine_median(self):
        assert arcsine_cdf(0.0) == 0.5


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=20), st.integers(-5, 5))
def test_distribution_moments(masses, offset):
    m = np.asarray(masses)
    d = DistributionOnZ(offset, m)
    assert d.moment(0) == pytest.approx(math.fsum(m))
    assert d.moment(1) == pytest.approx(math.fsum(m * np.arange(offset, offset + len(m))), abs=1e-12)


def test_distribution_csv(tmp_path):
    path = tmp_path / "d.csv"
    simulate_dtrw(2, 0.5).to_csv(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["position", "mass"]
    assert [(int(a), float(b)) for a, b in rows[1:]] == [(-2, 0.25), (-1, 0.0), (0, 0.5), (1, 0.0), (2, 0.25)]
