"""Lattice counting exactness, extremizer identities, dyadic search."""

import math

import numpy as np
import pytest

from causticlab.acceptance import naive_ball_count, naive_sphere_cap_count
from causticlab.torus import (CapQuery, OMEGA_PRESETS, ball_count, cap_solid_volume,
                              count_in_ball, dyadic_lower_bound_search, eval_sum,
                              eval_sum_grid, extremizer, sphere_cap_count,
                              sphere_solutions)


def test_ball_example_21():
    assert count_in_ball((0.0, 0.0), 2.5) == 21


def test_ball_empty_when_radius_too_small():
    # nearest lattice point to (0.5, 0.5) sits at distance sqrt(0.5)
    assert count_in_ball((0.5, 0.5), 0.5) == 0


def test_ball_counts_match_naive_oracle():
    rng = np.random.default_rng(321)
    for n in (1, 2, 3):
        for _ in range(8):
            center = tuple(rng.uniform(-4, 4, n))
            radius = float(rng.uniform(0.3, 50.0 if n <= 2 else 20.0))
            assert count_in_ball(center, radius) == naive_ball_count(center, radius)
    for _ in range(4):
        center = tuple(rng.uniform(-2, 2, 4))
        radius = float(rng.uniform(0.5, 8.0))
        assert count_in_ball(center, radius) == naive_ball_count(center, radius)


def test_ball_count_rejects_out_of_bounds():
    with pytest.raises(ValueError):
        count_in_ball((0.0, 0.0), 2.0e4)
    with pytest.raises(ValueError):
        count_in_ball((0.0,) * 5, 2.0)


def test_ball_scaling_law():
    # N ~ C h^{-n mu}: slope of log N against log(1/h) within 0.1 of n*mu
    om = OMEGA_PRESETS["diophantine"][2]
    mu = 0.5
    js = [2**k for k in range(12, 25, 2)]
    counts = [ball_count(CapQuery(n=2, omega=om, mu=mu, j=j)) for j in js]
    hs = [j**-0.5 for j in js]
    slope = np.polyfit(np.log([1 / h for h in hs]), np.log(counts), 1)[0]
    assert slope == pytest.approx(2 * mu, abs=0.1)


def test_sphere_cap_example():
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=25, cap_constant=2.0 / 25**0.5)
    assert q.cap_radius == pytest.approx(2.0)
    assert sphere_cap_count(q) == 2
    assert sorted(map(tuple, sphere_solutions(q).tolist())) == [(3, 4), (4, 3)]


def test_sphere_cap_covers_whole_circle():
    # r_2(25) = 12 representations
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=25, cap_constant=100.0)
    assert sphere_cap_count(q) == 12


def test_sphere_counts_match_naive_oracle():
    cases = [(2, 25, 2.0), (2, 325, 7.0), (3, 594, 10.0), (3, 101, 6.0),
             (4, 729, 12.0)]
    for n, j, width in cases:
        om = OMEGA_PRESETS["rational"][n]
        q = CapQuery(n=n, omega=om, mu=1.0, j=j, cap_constant=width * j**-0.5)
        assert sphere_cap_count(q) == naive_sphere_cap_count(n, j, om, q.cap_radius)


def test_sphere_query_validation():
    with pytest.raises(ValueError, match="omega"):
        sphere_cap_count(CapQuery(n=2, omega=(1.0, 1.0), mu=0.5, j=25))
    with pytest.raises(ValueError, match="integer"):
        sphere_cap_count(CapQuery(n=2, omega=(0.6, 0.8), mu=0.5, h=0.3))
    with pytest.raises(ValueError):
        sphere_cap_count(CapQuery(n=2, omega=(0.6, 0.8), mu=0.5, j=10**7))


def test_sphere_n1_degenerate():
    om = (1.0,)
    for j, want in ((16, 1), (15, 0)):
        q = CapQuery(n=1, omega=om, mu=0.5, j=j, cap_constant=1.0)
        assert sphere_cap_count(q) == want
    # a wide cap picks up both +-sqrt(j)
    q = CapQuery(n=1, omega=om, mu=1.0, j=16, cap_constant=3.0)
    assert sphere_cap_count(q) == 2


def test_extremizer_ratio_is_sqrt_count():
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=325, cap_constant=8.0 * 325**-0.5)
    count = sphere_cap_count(q)
    assert count >= 2
    ext = extremizer(q, "sphere")
    ratio = abs(eval_sum(ext, (0.0, 0.0))) / ext.l2_norm
    assert abs(ratio - math.sqrt(count)) < 1e-12


def test_extremizer_single_point_ratio_one():
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=25, cap_constant=0.5 * 25**-0.5)
    assert sphere_cap_count(q) == 1
    ext = extremizer(q, "sphere")
    assert abs(abs(eval_sum(ext, (0.7, -1.3))) - 1.0) < 1e-12


def test_extremizer_empty_cap_raises():
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=31, cap_constant=10.0)
    with pytest.raises(ValueError, match="empty"):
        extremizer(q, "sphere")  # 31 is not a sum of two squares


def test_eval_sum_raw_at_origin_counts():
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=25, cap_constant=100.0)
    ext = extremizer(q, "sphere", normalization="raw")
    assert eval_sum(ext, (0.0, 0.0)) == pytest.approx(12.0)


def test_grid_max_attained_at_origin():
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=325, cap_constant=8.0 * 325**-0.5)
    ext = extremizer(q, "sphere")
    count = len(ext.points)
    grid_abs = eval_sum_grid(ext, 64)
    assert float(np.max(grid_abs)) == pytest.approx(math.sqrt(count), abs=1e-9)


def test_parseval_on_sampling_grid():
    q = CapQuery(n=2, omega=(0.6, 0.8), mu=1.0, j=25, cap_constant=100.0)
    ext = extremizer(q, "sphere")
    grid_abs = eval_sum_grid(ext, 64)
    mean_sq = float(np.mean(grid_abs**2))
    assert mean_sq == pytest.approx(1.0, abs=1e-6)  # sum |a|^2 = 1


def test_dyadic_block_sums_track_volume():
    blocks = dyadic_lower_bound_search(2, 1.0, (1024, 4096))
    assert len(blocks) == 2
    for b in blocks:
        assert abs(b.block_sum - b.volume) / b.volume < 0.5


def test_dyadic_n1_degenerate():
    # with cap width 2 sqrt(j) the cap spans the whole two-point sphere
    blocks = dyadic_lower_bound_search(1, 1.0, (16, 64), omega=(1.0,),
                                       cap_constant=2.0)
    for b in blocks:
        assert 0 <= b.best_count <= 2
        assert b.best_count == 2  # a perfect square exists in every dyadic block here


def test_dyadic_selected_sequence_slope():
    blocks = dyadic_lower_bound_search(3, 0.5, (2**8, 2**14))
    sel = [(b.best_j, b.best_count) for b in blocks if b.best_count > 0]
    assert len(sel) >= 4
    slope = np.polyfit(np.log([j**0.5 for j, _ in sel]),
                       np.log([m for _, m in sel]), 1)[0]
    assert slope >= (3 - 1) * 0.5 - 1 - 0.15


def test_cap_volume_formula_2d():
    # delta = 1: half-angle psi = 2*arcsin(1/2) = pi/3, area = int 2 psi r dr
    vol = cap_solid_volume(2, 900, 1.0)
    lo, hi = math.sqrt(900), math.sqrt(1800)
    want = (math.pi / 3) * (hi**2 - lo**2)
    assert vol == pytest.approx(want, rel=1e-6)


def test_cap_query_validation():
    with pytest.raises(ValueError):
        CapQuery(n=5, omega=(1.0,) * 5, mu=0.5, j=10)
    with pytest.raises(ValueError):
        CapQuery(n=2, omega=(1.0,), mu=0.5, j=10)
    with pytest.raises(ValueError):
        CapQuery(n=2, omega=(0.6, 0.8), mu=0.5)  # neither h nor j
    with pytest.raises(ValueError):
        CapQuery(n=2, omega=(0.6, 0.8), mu=0.5, j=10, h=0.1)  # both
