"""Raw observables: dynamical balls, return times, covers and grids."""
import itertools
import math

import numpy as np
import pytest

from recurrence_lab import (CENSORED, BallParams, CodedPoint, CoverLemmaParams,
                            SymbolicWord, ball_min_return_empirical,
                            ball_return_time, ball_return_times, ball_statistics,
                            circle_expanding, cover_lemma_bound, cylinder_cover_count,
                            distance, dyn_ball_contains, full_shift, katok_ball_cover,
                            katok_cylinder_count, min_return_time_empirical,
                            min_return_time_symbolic, orbit, partition_return_time,
                            read_grids_csv, return_time_grid, return_time_profile,
                            sample_symbols, sample_typical, write_grids_csv)
from recurrence_lab.exceptions import ResourceLimitError, WindowExceededError
from recurrence_lab.recurrence import (agreement_length, ball_mass, boundary_visits,
                                       minimal_periods)

SHIFT = full_shift(2)


def shift_orbit(text_or_array, L=None, k=2):
    arr = (np.array([int(c) for c in text_or_array])
           if isinstance(text_or_array, str) else np.asarray(text_or_array))
    w = SymbolicWord(arr, k)
    sys = full_shift(k)
    return orbit(sys, w, L or len(w) // 2)


def random_bits(n, seed):
    return np.random.default_rng(seed).integers(0, 2, n).astype(np.uint8)


def brute_period(w):
    n = len(w)
    return next(k for k in range(1, n + 1) if all(w[t + k] == w[t] for t in range(n - k)))


def brute_first_occurrence(w, n):
    pat = list(w[:n])
    for k in range(1, len(w) - n + 1):
        if list(w[k:k + n]) == pat:
            return k
    return CENSORED


# -- radius bookkeeping ------------------------------------------------------

@pytest.mark.parametrize("m", range(0, 12))
def test_agreement_length_of_dyadic_radius(m):
    assert agreement_length(2.0 ** -m) == m + 1


def test_agreement_length_between_dyadics_and_beyond_diameter():
    assert agreement_length(0.3) == 2          # 2**-2 < 0.3 <= 2**-1
    assert agreement_length(1.5) == 0


def test_ball_parameters_are_validated():
    with pytest.raises(ValueError):
        BallParams(0, 0.5)
    with pytest.raises(ValueError):
        BallParams(2, 0.0)
    with pytest.raises(ValueError):
        CoverLemmaParams(1.0, 1.0, 0.1, 2)


# -- dynamical balls ---------------------------------------------------------

def test_every_point_lies_in_its_own_ball():
    o = orbit(circle_expanding(2), 0.1234, 50)
    for p in (BallParams(1, 1e-9), BallParams(20, 0.3)):
        assert dyn_ball_contains(o, 7, 7, p)


def test_period_two_point_lies_in_its_own_ball_after_two_steps():
    o = shift_orbit("01" * 20, 20)
    assert dyn_ball_contains(o, 0, 2, BallParams(5, 0.5))


def test_ball_test_is_strict():
    o = orbit(circle_expanding(2), 0.1, 4)
    assert not dyn_ball_contains(o, 0, 1, BallParams(1, 0.1))
    assert dyn_ball_contains(o, 0, 1, BallParams(1, 0.1000001))


def test_ball_indices_are_checked():
    o = orbit(circle_expanding(2), 0.1, 10)
    with pytest.raises(IndexError):
        dyn_ball_contains(o, 0, 8, BallParams(3, 0.1))


@pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 9) for m in range(0, 9)
                                 if n + m <= 16])
def test_shift_ball_is_a_cylinder(n, m):
    # oracle: the metric itself, applied to every shifted pair
    w = SymbolicWord(random_bits(80, n * 31 + m), 2)
    o = orbit(SHIFT, w, 40)
    p = BallParams(n, 2.0 ** -m)
    for i, j in itertools.product(range(0, 40 - n, 3), range(0, 40 - n)):
        by_metric = all(distance(SHIFT, w.shifted(i + t), w.shifted(j + t)) < p.eps
                        for t in range(n))
        by_prefix = np.array_equal(w.symbols[i:i + n + m], w.symbols[j:j + n + m])
        assert dyn_ball_contains(o, i, j, p) == by_metric == by_prefix


@pytest.mark.parametrize("length", range(2, 11))
def test_shift_ball_is_a_cylinder_for_every_short_word(length):
    # every binary word x of the given length, against a fixed de Bruijn-rich y
    y = random_bits(length + 8, length)
    for bits in itertools.product((0, 1), repeat=length):
        seq = np.concatenate([np.array(bits, dtype=np.uint8), y])
        o = orbit(SHIFT, SymbolicWord(seq, 2), 2 * length)
        for n in range(1, length + 1):
            m = length - n
            expect = np.array_equal(seq[:length], y[:length])
            assert dyn_ball_contains(o, 0, length, BallParams(n, 2.0 ** -m)) == expect


# -- return-time profiles ----------------------------------------------------

def test_fixed_point_returns_at_once():
    np.testing.assert_array_equal(
        return_time_profile(shift_orbit("0" * 40, 30), 0.5, 5), [1] * 5)


def test_period_two_point_returns_after_two():
    np.testing.assert_array_equal(
        return_time_profile(shift_orbit("01" * 30, 40), 0.5, 5), [2] * 5)


def test_bernoulli_return_equals_first_reoccurrence_of_longer_prefix():
    bits = random_bits(1 << 14, 3)
    o = orbit(SHIFT, SymbolicWord(bits, 2), (1 << 14) - 40)
    prof = return_time_profile(o, 2.0 ** -3, 8)
    assert prof[7] == brute_first_occurrence(bits, 11)


@pytest.mark.parametrize("m", range(0, 5))
def test_profile_equals_partition_return_at_depth_n_plus_m(m):
    for seed in range(20):
        bits = random_bits(4096, seed)
        o = orbit(SHIFT, SymbolicWord(bits, 2), 4096 - 30)
        prof = return_time_profile(o, 2.0 ** -m, 12)
        for n in range(1, 13):
            if prof[n - 1] != CENSORED:
                assert prof[n - 1] == partition_return_time(bits, n + m)


def test_geometric_profile_matches_direct_definition():
    sys = circle_expanding(3)
    x = sample_typical(sys.measure, sys, 1, length=3000)[0]
    o = orbit(sys, x, 2900)
    eps, n_max = 0.05, 6
    prof = return_time_profile(o, eps, n_max)
    for n in range(1, n_max + 1):
        expect = next((k for k in range(1, o.L - n_max + 1)
                       if dyn_ball_contains(o, 0, k, BallParams(n, eps))), CENSORED)
        assert prof[n - 1] == expect


def test_deep_balls_need_the_symbol_window():
    o = shift_orbit("01" * 10, 20)
    with pytest.raises(WindowExceededError):
        return_time_profile(o, 2.0 ** -4, 18)


# -- minimal return times ----------------------------------------------------

@pytest.mark.parametrize("text,period", [("0101", 2), ("0011", 4), ("0000", 1),
                                         ("0", 1), ("010010", 3)])
def test_minimal_period_examples(text, period):
    assert min_return_time_symbolic(SymbolicWord.from_string(text)) == period


def test_minimal_period_equals_brute_force_for_all_short_words():
    for length in range(1, 15):
        words = np.array(list(itertools.product((0, 1), repeat=length)), dtype=np.uint8)
        expect = np.full(words.shape[0], length)
        for k in range(length - 1, 0, -1):
            ok = np.all(words[:, k:] == words[:, :length - k], axis=1)
            expect[ok] = k
        got = [min_return_time_symbolic(SymbolicWord(w, 2)) for w in words]
        np.testing.assert_array_equal(got, expect)


def test_prefix_periods_match_single_word_periods():
    bits = random_bits(60, 9)
    per = minimal_periods(bits)
    for l in (1, 5, 17, 60):
        assert per[l - 1] == brute_period(bits[:l])


def test_empty_word_is_rejected():
    with pytest.raises(ValueError):
        min_return_time_symbolic(np.array([], dtype=np.uint8))


def test_empirical_minimal_return_of_period_two_point():
    assert min_return_time_empirical(shift_orbit("01" * 30, 40), BallParams(6, 0.5)) == 2


def test_empirical_minimal_return_matches_symbolic_on_cylinders():
    o = shift_orbit("0011" * 20, 60)
    p = BallParams(4, 1.0)
    assert min_return_time_empirical(o, p) == min_return_time_symbolic(
        SymbolicWord.from_string("0011")) == 4


def test_whole_space_ball_has_minimal_return_one():
    o = orbit(circle_expanding(2), 0.1234, 50)
    assert min_return_time_empirical(o, BallParams(1, 1.0)) == 1


def test_empirical_minimal_return_bounds_the_exact_value_from_above():
    # x -> 2x: S(B(x, r)) is the least k with d(2^k x, x) < r (2^k + 1)
    sys = circle_expanding(2)
    for x in sample_typical(sys.measure, sys, 10, length=400):
        o = orbit(sys, x, 300)
        pts = o.points[:, 0]
        for r in (0.2, 0.1, 0.05):
            exact = next(k for k in range(1, 60)
                         if distance(sys, pts[k], pts[0]) < r * (2 ** k + 1))
            got = ball_min_return_empirical(o, r)
            if got != CENSORED:
                assert got >= exact


# -- metric-ball returns -----------------------------------------------------

def test_fixed_point_ball_returns():
    o = orbit(circle_expanding(2), 0.0, 10)
    assert ball_return_time(o, 1e-6) == 1
    assert ball_min_return_empirical(o, 1e-6) == 1


def test_doubling_orbit_of_point_one_returns_at_once():
    assert ball_return_time(orbit(circle_expanding(2), 0.1, 10), 0.25) == 1


def test_ball_bigger_than_the_space():
    assert ball_return_time(orbit(circle_expanding(2), 0.37, 10), 1.0) == 1


def test_period_two_ball_minimal_return():
    o = orbit(circle_expanding(2), 1.0 / 3.0, 40)
    assert ball_min_return_empirical(o, 1e-3) == 2
    assert ball_return_time(o, 1e-3) == 2


def test_ball_statistics_match_brute_force():
    sys = circle_expanding(2)
    radii = [0.3, 0.1, 0.02, 0.004, 0.0005]
    for x in sample_typical(sys.measure, sys, 4, length=3000):
        o = orbit(sys, x, 2000)
        pts = o.points[:, 0]
        for c in (0, 17, 999):
            st = ball_statistics(o, radii, c)
            d = np.abs(pts - pts[c])
            d = np.minimum(d, 1 - d)
            for a, r in enumerate(radii):
                visits = np.flatnonzero(d < r)
                after = visits[visits > c]
                first = after[0] - c if after.size else CENSORED
                gap = np.diff(visits).min() if visits.size > 1 else CENSORED
                assert st.first_return[a] == first
                assert st.min_gap[a] == gap
                assert st.count[a] == visits.size - 1
            np.testing.assert_array_equal(ball_return_times(o, radii, c), st.first_return)


def test_ball_statistics_on_the_shift_use_cylinders():
    bits = random_bits(3000, 4)
    o = orbit(SHIFT, SymbolicWord(bits, 2), 2000)
    st = ball_statistics(o, [0.5, 0.125], 5)
    for a, agree in enumerate((2, 4)):
        hits = [j for j in range(2000)
                if np.array_equal(bits[j:j + agree], bits[5:5 + agree])]
        assert st.count[a] == len(hits) - 1
        assert st.first_return[a] == next(j for j in hits if j > 5) - 5


def test_radii_order_does_not_matter():
    o = orbit(circle_expanding(3), 0.1234567, 5000)
    a = ball_statistics(o, [0.01, 0.1, 0.05], 3)
    b = ball_statistics(o, [0.1, 0.05, 0.01], 3)
    np.testing.assert_array_equal(a.count, b.count[[2, 0, 1]])


def test_ball_mass_of_lebesgue_orbit_is_close_to_two_r():
    sys = circle_expanding(2)
    x = sample_typical(sys.measure, sys, 1, length=200_100)[0]
    o = orbit(sys, x, 200_000)
    mass = ball_mass(o, 0, [0.1, 0.01])
    np.testing.assert_allclose(mass, [0.2, 0.02], rtol=0.1)


def test_minimal_gap_never_exceeds_first_return():
    sys = circle_expanding(3)
    for x in sample_typical(sys.measure, sys, 5, length=5000):
        o = orbit(sys, x, 4000)
        for r in (0.1, 0.01, 0.001):
            R, S = ball_return_time(o, r), ball_min_return_empirical(o, r)
            if CENSORED not in (R, S):
                assert S <= R


# -- partition returns -------------------------------------------------------

@pytest.mark.parametrize("text,n,expect", [("0101010", 3, 2), ("0010000", 2, 3),
                                           ("0" + "1" * 9, 1, CENSORED)])
def test_partition_return_examples(text, n, expect):
    assert partition_return_time(SymbolicWord.from_string(text), n) == expect


def test_partition_return_matches_naive_search():
    for seed in range(30):
        bits = random_bits(500, seed)
        for n in (1, 3, 6, 9):
            assert partition_return_time(bits, n) == brute_first_occurrence(bits, n)


def test_partition_return_needs_one_symbol_more_than_the_depth():
    with pytest.raises(ValueError):
        partition_return_time(SymbolicWord.from_string("0101"), 4)


# -- cylinder covers ---------------------------------------------------------

@pytest.mark.parametrize("m", [0, 2])
def test_canonical_cover_count_is_one(m):
    w = SymbolicWord(random_bits(20, m), 2)
    for n in range(1, 9):
        assert cylinder_cover_count(SHIFT, w, BallParams(n, 2.0 ** -m)) == 1


def test_coarse_metric_needs_more_cylinders_within_the_lemma_bound():
    # the metric cannot tell symbols 2 and 3 apart, the test partition can
    sys = full_shift(4)
    classes, cells = (0, 1, 2, 2), (0, 1, 2, 3)
    rng = np.random.default_rng(1)
    for n in range(2, 9):
        w = SymbolicWord(rng.integers(0, 4, n + 4), 4)
        p = BallParams(n, 0.25)
        visits = boundary_visits(w, n, p.eps, cells, classes)
        oracle = 2 ** int(np.isin(w.symbols[:n], (2, 3)).sum())
        count = cylinder_cover_count(sys, w, p, cells, classes)
        assert count == oracle
        assert visits == int(np.isin(w.symbols[:n], (2, 3)).sum())
        gamma = min(max(visits / n, 1e-9), 1 - 1e-9)
        assert count <= cover_lemma_bound(n, gamma, 4)


def test_cover_count_refuses_huge_enumerations():
    with pytest.raises(ResourceLimitError):
        cylinder_cover_count(full_shift(4), SymbolicWord(np.zeros(30, int), 4),
                             BallParams(13, 0.5))


# -- Katok covers ------------------------------------------------------------

def test_identical_samples_need_one_ball():
    o = orbit(circle_expanding(2), 0.3, 20)
    assert katok_ball_cover([o] * 8, BallParams(5, 0.01), 0.9) == 1


def test_ball_larger_than_space_covers_everything():
    sys = circle_expanding(2)
    samples = [orbit(sys, x, 5) for x in sample_typical(sys.measure, sys, 30)]
    assert katok_ball_cover(samples, BallParams(1, 1.0), 0.7) == 1


def test_shift_ball_cover_equals_cylinder_count():
    sys = full_shift(2, seed=2)
    rows = sample_symbols(sys.measure, sys, 4000, 20)
    samples = [orbit(sys, SymbolicWord(r, 2), 2) for r in rows]
    for n in (2, 4, 6, 8):
        assert katok_ball_cover(samples, BallParams(n, 1.0), 0.5) == \
            katok_cylinder_count(rows, n, 0.5)


def test_greedy_geometric_cover_against_brute_force():
    # tiny instance: the optimum by exhaustive search bounds greedy from below
    sys = circle_expanding(2, seed=4)
    pts = sample_typical(sys.measure, sys, 9)
    samples = [orbit(sys, x, 3) for x in pts]
    p, c = BallParams(2, 0.2), 0.6
    need = math.ceil(c * len(samples))
    cover = [{j for j, s in enumerate(samples)
              if all(distance(sys, s.points[t, 0], samples[i].points[t, 0]) < p.eps
                     for t in range(p.n))} for i in range(len(samples))]
    best = next(k for k in range(1, 10)
                if any(len(set().union(*combo)) >= need
                       for combo in itertools.combinations(cover, k)))
    greedy = katok_ball_cover(samples, p, c)
    assert best <= greedy <= best * (1 + math.log(len(samples)))


def test_katok_mass_must_be_a_fraction():
    with pytest.raises(ValueError):
        katok_ball_cover([orbit(circle_expanding(2), 0.3, 5)], BallParams(1, 0.1), 1.0)
    with pytest.raises(ValueError):
        katok_cylinder_count(np.zeros((3, 3), int), 2, 0.0)


def test_shared_prefix_needs_one_cylinder():
    rows = np.array([[0, 1, 1, 0], [0, 1, 1, 1], [0, 1, 1, 0]])
    assert katok_cylinder_count(rows, 3, 0.99) == 1


def test_uniform_words_need_half_of_the_cylinders():
    sys = full_shift(2, seed=8)
    rows = sample_symbols(sys.measure, sys, 100_000, 3)
    assert katok_cylinder_count(rows, 3, 0.5) == 4


def test_biased_words_hand_computed_frequencies():
    # 11: 0.81, 10 and 01: 0.09 each, 00: 0.01
    sys = full_shift(2, (0.1, 0.9), seed=8)
    rows = sample_symbols(sys.measure, sys, 100_000, 2)
    assert katok_cylinder_count(rows, 2, 0.82) == 2
    assert katok_cylinder_count(rows, 2, 0.80) == 1


# -- grids -------------------------------------------------------------------

def _grid(seed=0):
    bits = random_bits(5000, seed)
    o = orbit(SHIFT, SymbolicWord(bits, 2), 4900)
    return return_time_grid(o, [2, 4, 8], [0.5, 0.25, 0.125], sample_id=seed)


def test_grid_cells_agree_with_profiles():
    g = _grid(1)
    bits = random_bits(5000, 1)
    for a, n in enumerate(g.n_ladder):
        for b, m in enumerate((1, 2, 3)):
            if not g.censored_R[a, b]:
                assert g.R[a, b] == partition_return_time(bits, n + m)
                assert g.S[a, b] == brute_period(bits[:n + m])


def test_censored_cells_store_the_scan_bound():
    o = orbit(SHIFT, SymbolicWord(random_bits(100, 2), 2), 60)
    g = return_time_grid(o, [1, 30], [0.5])
    assert g.censored_R[1, 0]
    assert g.R[1, 0] > 0 and g.R[1, 0] <= o.L


def test_grid_csv_round_trip(tmp_path):
    grids = [_grid(s) for s in range(3)]
    path = tmp_path / "g.csv"
    write_grids_csv(grids, path)
    header = path.read_text().splitlines()[0]
    assert header == "sample_id,n,eps,R,S,censored_R,censored_S"
    back = read_grids_csv(path, L=4900)
    assert back == grids


@pytest.mark.parametrize("content", ["", "a,b,c\n1,2,3\n",
                                     "sample_id,n,eps,R,S,censored_R,censored_S\n",
                                     "sample_id,n,eps,R,S,censored_R,censored_S\n0,1,x,1,1,0,0\n",
                                     "sample_id,n,eps,R,S,censored_R,censored_S\n0,1,0.5,1\n"])
def test_malformed_csv_is_rejected(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(ValueError):
        read_grids_csv(path)


def test_grid_ladders_are_validated():
    o = orbit(SHIFT, SymbolicWord(random_bits(500, 2), 2), 400)
    with pytest.raises(ValueError):
        return_time_grid(o, [4, 2], [0.5])
    with pytest.raises(ValueError):
        return_time_grid(o, [2, 4], [0.25, 0.5])


def test_symbolic_grid_needs_a_shift_orbit():
    o = orbit(circle_expanding(2), 0.1, 100)
    with pytest.raises(ValueError):
        return_time_grid(o, [1, 2], [0.1], s_method="symbolic")


def test_coded_points_reproduce_their_grid():
    sys = circle_expanding(2, seed=3)
    x = sample_typical(sys.measure, sys, 1, length=20_000 + sys.window)[0]
    g1 = return_time_grid(orbit(sys, x, 20_000), [2, 4, 6], [0.25, 0.125])
    g2 = return_time_grid(orbit(sys, CodedPoint(x.symbols.copy()), 20_000),
                          [2, 4, 6], [0.25, 0.125])
    assert g1 == g2
