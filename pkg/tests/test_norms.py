import math

import numpy as np
import pytest

from rmlab.estimate import LOWER_BOUND
from rmlab.funcrep import ParamSpace, StepFunction, lebesgue_norm
from rmlab.geometry import Cube, Domain
from rmlab.norms import (
    morrey_norm_estimate,
    riesz_norm,
    rm_norm_bruteforce_1d,
    rm_norm_dyadic,
    rm_norm_estimate,
    rm_score,
)
from rmlab.verification import random_dyadic_step, random_intermediate_params

RIESZ2 = ParamSpace(2.0, 1.0, 0.0)
UNIT = Cube((0.0,), 1.0)


def two_step():
    return StepFunction(((Cube((0.0,), 0.5), 2.0), (Cube((0.5,), 0.5), 1.0)))


class TestRmScore:
    def test_examples(self):
        ones = StepFunction(((UNIT, 1.0),))
        assert rm_score(ones, [UNIT], RIESZ2) == pytest.approx(1.0, rel=1e-14)
        f = two_step()
        assert rm_score(f, [UNIT], RIESZ2) == pytest.approx(2.25, rel=1e-14)
        halves = [Cube((0.0,), 0.5), Cube((0.5,), 0.5)]
        assert rm_score(f, halves, RIESZ2) == pytest.approx(2.5, rel=1e-14)

    def test_additive_and_monotone(self):
        f = two_step()
        quarters = [Cube((0.25 * j,), 0.25) for j in range(4)]
        partial = rm_score(f, quarters[:2], RIESZ2)
        assert rm_score(f, quarters, RIESZ2) >= partial
        total = sum(rm_score(f, [c], RIESZ2) for c in quarters)
        assert rm_score(f, quarters, RIESZ2) == pytest.approx(total, rel=1e-12)

    def test_rejects_overlapping_family(self):
        f = two_step()
        with pytest.raises(ValueError):
            rm_score(f, [UNIT, Cube((0.5,), 1.0)], RIESZ2)

    def test_rejects_out_of_domain(self):
        f = two_step()
        with pytest.raises(ValueError):
            rm_score(f, [Cube((0.5,), 1.0)], RIESZ2, domain=Domain.of_cube(UNIT))

    def test_q_monotone_on_families(self):
        # fixed p and alpha: larger inner exponent gives larger family scores
        rng = np.random.default_rng(19)
        for _ in range(40):
            p = float(rng.uniform(2.0, 4.0))
            q = float(rng.uniform(1.0, p - 0.5))
            beta = float(rng.uniform(q + 0.01, p - 0.01))
            alpha = float((1.0 / p - 1.0 / q) * rng.uniform(0.05, 0.95))
            f = random_dyadic_step(rng, UNIT, 3)
            cells = [Cube((0.25 * j,), 0.25) for j in range(4)]
            low = rm_score(f, cells, ParamSpace(p, q, alpha), check=False)
            high = rm_score(f, cells, ParamSpace(p, beta, alpha), check=False)
            assert low <= high * (1.0 + 1e-12)


class TestDyadicOptimizer:
    def test_two_piece_example(self):
        est = rm_norm_dyadic(two_step(), UNIT, 3, RIESZ2, offsets=(0.0,))
        assert est.value == pytest.approx(math.sqrt(2.5), rel=1e-12)
        assert est.kind == LOWER_BOUND
        got = sorted((c.lower[0], c.side) for c in est.certificate)
        assert got == [(0.0, 0.5), (0.5, 0.5)]

    def test_constant_refinement_neutral(self):
        ones = StepFunction(((UNIT, 1.0),))
        est = rm_norm_dyadic(ones, UNIT, 5, RIESZ2, offsets=(0.0,))
        assert est.value == pytest.approx(1.0, rel=1e-12)
        assert [tuple(c.lower) for c in est.certificate] == [(0.0,)]

    def test_singleton_regime_certificate(self):
        params = ParamSpace(2.0, 1.0, -0.6)
        f = two_step()
        est = rm_norm_dyadic(f, UNIT, 5, params, offsets=(0.0,))
        assert [tuple(c.lower) for c in est.certificate] == [(0.0,)]
        assert est.value ** 2 == pytest.approx(rm_score(f, [UNIT], params), rel=1e-12)

    def test_monotone_in_depth_and_offsets(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            f = random_dyadic_step(rng, UNIT, 3)
            params = random_intermediate_params(rng)
            vals = [rm_norm_dyadic(f, UNIT, d, params, offsets=(0.0,)).value for d in range(5)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
            wider = rm_norm_dyadic(f, UNIT, 4, params, offsets=(0.0, 1 / 3, 2 / 3)).value
            assert wider >= vals[4] - 1e-12

    def test_certificate_rescoring(self):
        rng = np.random.default_rng(29)
        for _ in range(25):
            f = random_dyadic_step(rng, UNIT, 4)
            params = random_intermediate_params(rng)
            est = rm_norm_dyadic(f, UNIT, 4, params)
            rescored = rm_score(f, est.certificate, params) ** (1.0 / params.p)
            assert rescored == pytest.approx(est.value, rel=1e-10)

    def test_trace_nondecreasing(self):
        rng = np.random.default_rng(31)
        f = random_dyadic_step(rng, UNIT, 4)
        est = rm_norm_dyadic(f, UNIT, 6, random_intermediate_params(rng))
        values = [v for _, v in est.trace]
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))

    def test_generic_path_matches_fast_path(self):
        rng = np.random.default_rng(37)
        f = random_dyadic_step(rng, UNIT, 2)
        params = random_intermediate_params(rng)
        fast = rm_norm_dyadic(f, UNIT, 3, params, offsets=(0.0,))
        # two-dimensional product function exercises the recursive path
        f2 = StepFunction(
            tuple(
                (Cube((c.lower[0], c.lower[0]), c.side), h)
                for c, h in f.pieces
            )
        )
        est2 = rm_norm_dyadic(f2, Cube((0.0, 0.0), 1.0), 3, params, offsets=(0.0,))
        assert est2.value > 0.0
        rescored = rm_score(f2, est2.certificate, params) ** (1.0 / params.p)
        assert rescored == pytest.approx(est2.value, rel=1e-10)
        assert fast.value == pytest.approx(
            rm_norm_dyadic(f, UNIT, 3, params, offsets=(0.0,)).value, rel=0
        )

    def test_depth_cap(self):
        with pytest.raises(ValueError):
            rm_norm_dyadic(two_step(), UNIT, 25, RIESZ2)


class TestBruteForce:
    def test_agrees_with_optimizer_on_shared_cells(self):
        rng = np.random.default_rng(41)
        for k, cells in ((2, 4), (3, 8)):
            for _ in range(10):
                f = random_dyadic_step(rng, UNIT, k)
                for p in (1.5, 2.0, 3.0):
                    params = ParamSpace(p, 1.0, 0.0)
                    bf = rm_norm_bruteforce_1d(f, UNIT, cells, params)
                    dp = rm_norm_dyadic(f, UNIT, k, params, offsets=(0.0,))
                    assert bf.value == pytest.approx(dp.value, abs=1e-12, rel=1e-12)

    def test_constant_function_composition_invariant(self):
        ones = StepFunction(((UNIT, 1.0),))
        est = rm_norm_bruteforce_1d(ones, UNIT, 6, RIESZ2)
        assert est.value == pytest.approx(1.0, rel=1e-12)

    def test_monotone_under_grid_refinement(self):
        rng = np.random.default_rng(43)
        for _ in range(15):
            f = random_dyadic_step(rng, UNIT, 3)
            params = random_intermediate_params(rng)
            for m in (2, 3, 5, 7):
                coarse = rm_norm_bruteforce_1d(f, UNIT, m, params).value
                fine = rm_norm_bruteforce_1d(f, UNIT, 2 * m, params).value
                assert fine >= coarse - 1e-12

    def test_optimizer_never_exceeds_oracle_on_aligned_grids(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            k = int(rng.integers(2, 4))
            f = random_dyadic_step(rng, UNIT, k)
            params = random_intermediate_params(rng)
            bf = rm_norm_bruteforce_1d(f, UNIT, 1 << k, params)
            dp = rm_norm_dyadic(f, UNIT, k, params, offsets=(0.0,))
            assert dp.value <= bf.value * (1.0 + 1e-12)

    def test_certificate_rescoring(self):
        rng = np.random.default_rng(53)
        f = random_dyadic_step(rng, UNIT, 3)
        params = random_intermediate_params(rng)
        est = rm_norm_bruteforce_1d(f, UNIT, 9, params)
        rescored = rm_score(f, est.certificate, params) ** (1.0 / params.p)
        assert rescored == pytest.approx(est.value, rel=1e-10)

    def test_grid_cap(self):
        with pytest.raises(ValueError):
            rm_norm_bruteforce_1d(two_step(), UNIT, 15, RIESZ2)


class TestRieszNorm:
    def test_two_piece(self):
        est = riesz_norm(two_step(), UNIT, 2.0, 3)
        assert est.value == pytest.approx(math.sqrt(2.5), rel=1e-12)

    def test_indicator(self):
        ones = StepFunction(((UNIT, 1.0),))
        assert riesz_norm(ones, UNIT, 2.0, 4).value == pytest.approx(1.0, rel=1e-12)

    def test_refinement_below_constancy_scale(self):
        f = two_step()
        v1 = riesz_norm(f, UNIT, 2.5, 1).value
        v4 = riesz_norm(f, UNIT, 2.5, 4).value
        assert v4 == pytest.approx(v1, rel=1e-12)

    def test_matches_lebesgue_norm(self):
        rng = np.random.default_rng(59)
        for _ in range(30):
            depth = int(rng.integers(1, 6))
            f = random_dyadic_step(rng, UNIT, depth)
            for p in (1.5, 2.0, 3.0):
                lp = lebesgue_norm(f, Domain.of_cube(UNIT), p).value
                rp = riesz_norm(f, UNIT, p, depth).value
                assert rp == pytest.approx(lp, rel=1e-9)


class TestMorreyEstimate:
    def test_flat_exponent_full_cube(self):
        ones = StepFunction(((UNIT, 1.0),))
        est = morrey_norm_estimate(ones, Domain.of_cube(UNIT), 1.0, -1.0)
        assert est.value == pytest.approx(1.0, rel=1e-12)
        assert [tuple(c.lower) for c in est.certificate] == [(0.0,)]

    def test_indicator_on_line(self):
        ones = StepFunction(((UNIT, 1.0),))
        est = morrey_norm_estimate(ones, Domain.whole_space(1), 1.0, -0.5)
        assert est.value == pytest.approx(1.0, rel=1e-12)

    def test_height_scaling(self):
        rng = np.random.default_rng(61)
        f = random_dyadic_step(rng, UNIT, 3)
        doubled = StepFunction(tuple((c, 2.0 * h) for c, h in f.pieces))
        v1 = morrey_norm_estimate(f, Domain.whole_space(1), 2.0, -0.25).value
        v2 = morrey_norm_estimate(doubled, Domain.whole_space(1), 2.0, -0.25).value
        assert v2 == pytest.approx(2.0 * v1, rel=1e-12)

    def test_infinite_p_routes_to_single_cube_branch(self):
        ones = StepFunction(((UNIT, 1.0),))
        est = rm_norm_estimate(ones, ParamSpace(math.inf, 1.0, -0.5), UNIT, 4)
        assert est.value == pytest.approx(1.0, rel=1e-12)
