import numpy as np
import pytest
from scipy.stats import kstest

from shapefit.incubation import (
    IcmError,
    IncubationData,
    fenchel_gap,
    g_process,
    inc_loglikelihood,
    inc_mle,
    load_incubation_csv,
    reduce_to_interval_censoring,
    w_process,
)
from shapefit.laws import TruncatedWeibull, Uniform
from shapefit.sim import gen_incubation
from shapefit.stepdist import StepDistribution

from oracles import inc_simplex_oracle


def small_sample(rng, n):
    e = rng.uniform(0.5, 4.0, n)
    v = rng.uniform(0.0, 3.0, n)
    u = rng.random(n) * e
    return IncubationData(e, u + v)


def weibull_sample(rng_or_seed, n):
    return gen_incubation(n, TruncatedWeibull(), Uniform(0.0, 30.0), rng_or_seed)


# ---- model reduction ----


def test_reduce_within_first_window():
    view = reduce_to_interval_censoring(IncubationData(np.array([1.0]), np.array([0.7])))
    assert view.t[0] == pytest.approx(0.7)
    assert view.j[0] == 0


def test_reduce_floor_arithmetic():
    view = reduce_to_interval_censoring(IncubationData(np.array([1.0]), np.array([2.3])))
    assert view.t[0] == pytest.approx(0.3)
    assert view.j[0] == 2


def test_reduce_round_trip_exact(rng):
    data = weibull_sample(rng, 500)
    view = reduce_to_interval_censoring(data)
    assert np.all(view.t >= 0)
    assert np.all(view.t < data.e)
    recon = view.t + view.j * view.e
    assert np.max(np.abs(recon - data.s)) <= 1e-12


def test_wrapped_time_uniform_ks():
    rng = np.random.default_rng(5)
    e = rng.uniform(1.0, 30.0, 10_000)
    v = TruncatedWeibull().sample(rng, 10_000)
    data = IncubationData(e, rng.random(10_000) * e + v)
    view = reduce_to_interval_censoring(data)
    stat = kstest(view.t / view.e, "uniform")
    assert stat.pvalue > 0.01


# ---- W and G processes ----


def test_w_process_single_record_bookkeeping():
    data = IncubationData(np.array([2.0]), np.array([1.5]))
    f = StepDistribution(np.array([1.5]), np.array([1.0]))
    wp = w_process(f, data)
    # the window [min s, max(s - e)] is empty: at most two pooled points,
    # here none, and no jump can have entered
    assert wp.eval_points.size <= 2
    assert np.all(wp.values == 0.0)


def test_w_process_tail_conditions_at_mle(rng):
    data = weibull_sample(rng, 120)
    f = inc_mle(data)
    violation, complement = fenchel_gap(f, data)
    assert violation <= 1e-8
    assert complement <= 1e-8


def test_w_complementarity_identity_at_mle(rng):
    data = weibull_sample(rng, 80)
    f = inc_mle(data)
    wp = w_process(f, data)
    # integral of W(t-) dF over the fitted atoms
    w_left = np.concatenate(([0.0], wp.values))
    idx = np.searchsorted(wp.eval_points, f.points, side="left")
    total = float(np.dot(f.masses, w_left[idx]))
    assert abs(total) <= 1e-8


def test_w_touches_zero_left_of_mass_points(rng):
    data = weibull_sample(rng, 100)
    f = inc_mle(data)
    wp = w_process(f, data)
    w_left = np.concatenate(([0.0], wp.values))
    idx = np.searchsorted(wp.eval_points, f.points, side="left")
    touch = w_left[idx]
    inside = (f.points >= wp.eval_points[0]) & (f.points <= wp.eval_points[-1])
    assert np.all(np.abs(touch[inside & (f.masses > 1e-6)]) <= 1e-6)


def test_g_process_two_record_hand_case():
    # records (e=1, s=1.2) and (e=0.5, s=3.0), uniform mass on {1.2, 3.0}:
    # window [min s, max(s-e)] = [1.2, 2.5]; both window masses are 0.5,
    # so G jumps by 1/(2 * 0.25) = 2 at s=1.2 and again at s-e=2.5, while
    # the jumps at 0.2 (below min s) and 3.0 (above the window) drop out
    data = IncubationData(np.array([1.0, 0.5]), np.array([1.2, 3.0]))
    f = StepDistribution(np.array([1.2, 3.0]), np.array([0.5, 0.5]))
    pts, vals = g_process(f, data)
    assert np.allclose(pts, [1.2, 2.5])
    assert np.allclose(vals, [2.0, 4.0])


def test_g_process_empty_window():
    # single-window overlap impossible: max(s-e) < min s leaves no jumps
    data = IncubationData(np.array([1.0, 2.0]), np.array([2.0, 3.0]))
    f = StepDistribution(np.array([2.0, 3.0]), np.array([0.5, 0.5]))
    pts, _ = g_process(f, data)
    assert pts.size == 0


def test_g_process_nondecreasing(rng):
    data = weibull_sample(rng, 60)
    masses = rng.dirichlet(np.ones(np.unique(data.s).size))
    f = StepDistribution(np.unique(data.s), masses)
    _, vals = g_process(f, data)
    assert np.all(np.diff(vals) >= -1e-12)


def test_floor_inactive_when_gaps_large(rng):
    data = weibull_sample(rng, 40)
    f = inc_mle(data)
    w1 = w_process(f, data, delta_floor=1e-10)
    w2 = w_process(f, data, delta_floor=2e-10)
    assert np.allclose(w1.values, w2.values, atol=0)
    g1 = g_process(f, data, delta_floor=1e-10)
    g2 = g_process(f, data, delta_floor=2e-10)
    assert np.allclose(g1[1], g2[1], atol=0)


# ---- the MLE ----


def test_single_record_mass_at_symptom_time():
    data = IncubationData(np.array([2.0]), np.array([1.5]))
    f = inc_mle(data)
    assert np.allclose(f.points, [1.5])
    assert np.allclose(f.masses, [1.0])


def test_four_record_sample_matches_simplex_oracle(rng):
    data = small_sample(rng, 4)
    f = inc_mle(data)
    lib = inc_loglikelihood(f, data)
    oracle, _ = inc_simplex_oracle(data.s, data.e)
    assert lib >= oracle - 1e-9
    assert lib - oracle <= 1e-4


def test_seeded_small_samples_match_oracle(rng):
    for _ in range(8):
        n = int(rng.integers(1, 6))
        data = small_sample(rng, n)
        f = inc_mle(data)
        lib = inc_loglikelihood(f, data)
        oracle, _ = inc_simplex_oracle(data.s, data.e)
        assert lib >= oracle - 1e-9
        assert lib - oracle <= 1e-4


def test_fenchel_gap_positive_at_uniform_start(rng):
    data = weibull_sample(rng, 50)
    atoms = np.unique(data.s)
    uniform = StepDistribution(atoms, np.full(atoms.size, 1.0 / atoms.size))
    violation, complement = fenchel_gap(uniform, data)
    assert violation > 0


def test_perturbing_mle_lowers_likelihood(rng):
    data = weibull_sample(rng, 60)
    f = inc_mle(data)
    best = inc_loglikelihood(f, data)
    masses = f.masses.copy()
    k = int(np.argmax(masses))
    masses[k] += 0.01
    masses /= masses.sum()
    worse = inc_loglikelihood(StepDistribution(f.points, masses), data)
    assert worse < best


def test_mle_is_fixed_point_of_self_induced_cusum(rng):
    # the converged MLE equals the left slopes of the greatest convex
    # minorant of the cusum built from its own W and G processes
    from shapefit.gcm import CusumDiagram, gcm_slopes

    data = weibull_sample(rng, 100)
    f = inc_mle(data)
    wp = w_process(f, data)
    gpts, gvals = g_process(f, data)
    assert np.array_equal(wp.eval_points, gpts)
    f_vals = f.cdf(gpts)
    ordinates = np.cumsum(f_vals * np.diff(gvals, prepend=0.0)) + wp.values
    slopes = gcm_slopes(CusumDiagram(gvals, ordinates))
    assert np.max(np.abs(slopes - f_vals)) <= 1e-6


def test_likelihood_ascent(rng):
    data = weibull_sample(rng, 100)
    lls = []
    inc_mle(data, on_iterate=lambda y, ll: lls.append(ll))
    assert len(lls) > 1
    assert np.all(np.diff(lls) >= -1e-12)


def test_initializer_independence(rng):
    data = weibull_sample(rng, 80)
    atoms = np.unique(data.s)
    m = atoms.size
    f1 = inc_mle(data)
    start = rng.dirichlet(np.ones(m))
    f2 = inc_mle(data, init_masses=start)
    assert np.max(np.abs(f1.cdf(atoms) - f2.cdf(atoms))) <= 1e-6


def test_tolerance_validation():
    data = IncubationData(np.array([2.0]), np.array([1.5]))
    with pytest.raises(ValueError, match="tol"):
        inc_mle(data, tol=0.0)


def test_nonconvergence_carries_gap(rng):
    data = weibull_sample(rng, 60)
    with pytest.raises(IcmError) as err:
        inc_mle(data, max_iter=1, tol=1e-14)
    assert np.isfinite(err.value.max_violation)


@pytest.mark.slow
def test_consistency_over_sample_sizes():
    truth = TruncatedWeibull()
    grid = np.linspace(0.5, 19.5, 96)
    sup_err = {}
    for n in (250, 1000, 4000):
        errs = []
        for r in range(50):
            data = gen_incubation(n, truth, Uniform(1.0, 30.0), (909, n, r))
            f = inc_mle(data)
            errs.append(np.max(np.abs(f.cdf(grid) - truth.cdf(grid))))
        sup_err[n] = float(np.mean(errs))
    assert sup_err[250] > sup_err[1000] > sup_err[4000]


# ---- data handling ----


def test_create_drops_out_of_support_records():
    with pytest.warns(UserWarning, match="dropping"):
        data = IncubationData.create(
            np.array([1.0, 1.0]), np.array([0.5, 25.0]), incubation_upper=20.0
        )
    assert len(data) == 1


def test_create_warns_on_separation():
    with pytest.warns(UserWarning, match="separation"):
        IncubationData.create(np.array([0.5, 2.0]), np.array([1.0, 1.0]), separation=1.0)


def test_invalid_exposure_rejected():
    with pytest.raises(ValueError, match="exposure"):
        IncubationData(np.array([0.0]), np.array([1.0]))


def test_csv_round_trip(tmp_path):
    path = tmp_path / "inc.csv"
    path.write_text("e,s\n2.0,1.5\n3.0,4.25\n")
    data = load_incubation_csv(path)
    assert np.allclose(data.e, [2.0, 3.0])
    assert np.allclose(data.s, [1.5, 4.25])


def test_csv_malformed_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("e,s\n2.0,oops\n")
    with pytest.raises(ValueError, match="row 2"):
        load_incubation_csv(path)
