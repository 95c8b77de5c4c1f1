import numpy as np
import pytest

from shapefit.current_status import smle_curve
from shapefit.functionals import (
    PhiSolution,
    asymptotic_variance_mean,
    c_e_constant,
    mean_of_mle,
    smle_asymptotic_variance,
    smle_quantile,
    solve_phi,
)
from shapefit.laws import Degenerate, TruncatedWeibull, Uniform
from shapefit.stepdist import StepDistribution

WEIBULL = TruncatedWeibull()
EXPOSURE = Uniform(1.0, 30.0)


class IdentityCurve:
    """Stub with the smoothed-curve interface: the uniform CDF on [0, 1]."""

    upper = 1.0
    values = np.linspace(0.0, 1.0, 11)
    is_monotone = True

    def __call__(self, t):
        return float(np.clip(t, 0.0, 1.0))


# ---- quantiles ----


def test_quantile_identity_curve():
    res = smle_quantile(IdentityCurve(), 0.5)
    assert res.value == pytest.approx(0.5, abs=1e-9)
    assert not res.at_boundary


def test_quantile_inverse_consistency(rng):
    pts = np.sort(rng.uniform(0.2, 1.8, 15))
    masses = rng.dirichlet(np.ones(15))
    curve = smle_curve(StepDistribution(pts, masses), 0.35, np.linspace(0, 2, 101), 2.0)
    for p in np.arange(0.1, 0.91, 0.1):
        res = smle_quantile(curve, p)
        assert float(curve(res.value)) == pytest.approx(p, abs=1e-9)


def test_quantile_requires_monotone_curve():
    class Wiggly(IdentityCurve):
        values = np.array([0.0, 0.4, 0.3, 1.0])
        is_monotone = False

    with pytest.raises(ValueError, match="local bandwidths"):
        smle_quantile(Wiggly(), 0.5)


def test_quantile_rejects_bad_level():
    with pytest.raises(ValueError, match="strictly between"):
        smle_quantile(IdentityCurve(), 1.0)


# ---- the plug-in mean ----


def test_mean_point_mass():
    assert mean_of_mle(StepDistribution(np.array([3.0]), np.array([1.0]))) == 3.0


def test_mean_two_point_average():
    f = StepDistribution(np.array([1.0, 2.0]), np.array([0.5, 0.5]))
    assert mean_of_mle(f) == pytest.approx(1.5)


def test_mean_matches_tail_integral(rng):
    pts = np.sort(rng.uniform(0.1, 9.9, 25))
    masses = rng.dirichlet(np.ones(25))
    f = StepDistribution(pts, masses)
    # mean = integral of (1 - F) over [0, upper] for a unit-mass step CDF
    u = np.linspace(0.0, 10.0, 2_000_001)
    tail = np.trapezoid(1.0 - f.cdf(u), u)
    assert mean_of_mle(f) == pytest.approx(tail, abs=1e-5)
    edges = np.concatenate(([0.0], pts))
    exact = float(np.sum((1.0 - f.cdf(edges)) * np.diff(np.append(edges, 10.0))))
    assert mean_of_mle(f) == pytest.approx(exact, abs=1e-10)


def test_mean_warns_on_defective_mass(caplog):
    f = StepDistribution(np.array([1.0]), np.array([0.8]))
    with caplog.at_level("WARNING", logger="shapefit.functionals"):
        mean_of_mle(f)
    assert "defective" in caplog.text


# ---- the local limit constant ----


def test_c_e_closed_form_point_exposure():
    val = c_e_constant(Uniform(0.0, 1.0).cdf, Degenerate(2.0), 0.5, 1.0)
    assert val == pytest.approx(2.0, abs=1e-12)


def test_c_e_riemann_oracle():
    t0 = 5.0
    cdf = WEIBULL.cdf

    def clamped(x):
        return np.where(x <= 0, 0.0, np.where(x >= 20.0, 1.0, cdf(np.clip(x, 0, 20))))

    e = np.linspace(1.0, 30.0, 1_000_001)
    f0 = float(clamped(np.array(t0)))
    vals = (1.0 / (f0 - clamped(t0 - e)) + 1.0 / (clamped(t0 + e) - f0)) / e
    riemann = np.trapezoid(vals * EXPOSURE.pdf(e), e)
    lib = c_e_constant(cdf, EXPOSURE, t0, 20.0)
    assert lib == pytest.approx(riemann, abs=1e-6)


def test_c_e_separation_violation():
    with pytest.raises(ValueError, match="separation"):
        c_e_constant(WEIBULL.cdf, Uniform(0.0, 30.0), 5.0, 20.0)


def test_c_e_interior_requirement():
    with pytest.raises(ValueError, match="interior"):
        c_e_constant(WEIBULL.cdf, EXPOSURE, 25.0, 20.0)


# ---- the adjoint equation ----


def test_phi_zero_rhs():
    sol = solve_phi(WEIBULL.cdf, EXPOSURE, lambda v: 0.0, 100, 20.0)
    assert np.all(sol.values == 0.0)


def test_phi_linearity():
    rhs1 = lambda v: 1.0
    rhs2 = lambda v: np.sin(v / 3.0)
    s1 = solve_phi(WEIBULL.cdf, EXPOSURE, rhs1, 120, 20.0)
    s2 = solve_phi(WEIBULL.cdf, EXPOSURE, rhs2, 120, 20.0)
    s12 = solve_phi(WEIBULL.cdf, EXPOSURE, lambda v: rhs1(v) + rhs2(v), 120, 20.0)
    assert np.allclose(s12.values, s1.values + s2.values, atol=1e-8)


def test_phi_closed_form_degenerate_exposure():
    # exposure longer than the support decouples the equation pointwise:
    # phi(v) = -e * F(v)(1 - F(v)) for the unit right-hand side
    sol = solve_phi(Uniform(0.0, 1.0).cdf, Degenerate(2.0), lambda v: 1.0, 256, 1.0)
    expected = -2.0 * sol.grid * (1.0 - sol.grid)
    assert np.allclose(sol.values, expected, atol=1e-12)


def test_phi_profile_shape_and_stability():
    sol = solve_phi(WEIBULL.cdf, EXPOSURE, lambda v: 1.0, 400, 20.0)
    assert sol.values[0] == 0.0 and sol.values[-1] == 0.0
    interior = sol.values[1:-1]
    assert np.all(interior < 0.0)  # single sign pattern
    mid = sol.values[200]
    fine = solve_phi(WEIBULL.cdf, EXPOSURE, lambda v: 1.0, 800, 20.0)
    assert abs(fine.values[400] - mid) / abs(mid) < 0.01


def test_phi_residual_is_certified():
    sol = solve_phi(WEIBULL.cdf, EXPOSURE, lambda v: 1.0, 200, 20.0)
    assert sol.residual <= 1e-6


def test_variance_report_deterministic():
    a = asymptotic_variance_mean(WEIBULL.cdf, EXPOSURE, 200, 20.0)
    b = asymptotic_variance_mean(WEIBULL.cdf, EXPOSURE, 200, 20.0)
    assert a.sigma2 == b.sigma2
    assert a.sigma2 > 0.0
    assert a.refinement_delta < 0.01


def test_variance_decreases_with_wider_exposure_soft():
    # more informative exposures should reduce the variance; flag rather
    # than fail hard if the model disagrees
    narrow = asymptotic_variance_mean(WEIBULL.cdf, Uniform(1.0, 15.0), 200, 20.0)
    wide = asymptotic_variance_mean(WEIBULL.cdf, Uniform(1.0, 30.0), 200, 20.0)
    if not wide.sigma2 < narrow.sigma2:
        pytest.xfail(
            f"wider exposure did not reduce sigma2 ({wide.sigma2} vs {narrow.sigma2}); "
            "model-dependent soft check"
        )


def test_smle_variance_boundary_guard():
    with pytest.raises(ValueError, match="inside"):
        smle_asymptotic_variance(WEIBULL.cdf, EXPOSURE, 0.5, 1.0, 500, 200, 20.0)


def test_smle_variance_positive():
    s2 = smle_asymptotic_variance(WEIBULL.cdf, EXPOSURE, 8.0, 1.7, 500, 300, 20.0)
    assert s2 > 0.0


@pytest.mark.slow
def test_smle_variance_monte_carlo_oracle():
    # empirical variance of n^{2/5} (smoothed estimate - its bootstrap-free
    # expectation proxy) against the adjoint-equation variance
    from shapefit.incubation import inc_mle
    from shapefit.sim import gen_incubation
    from shapefit.current_status import smle_eval

    n, t, reps = 4000, 8.0, 300
    h = 1.7
    vals = []
    for r in range(reps):
        data = gen_incubation(n, WEIBULL, EXPOSURE, (515, r))
        f = inc_mle(data)
        vals.append(smle_eval(f, h, t, 20.0))
    empirical = float(np.var(vals, ddof=1)) * n ** 0.8
    sigma2 = smle_asymptotic_variance(WEIBULL.cdf, EXPOSURE, t, h, n, 400, 20.0)
    assert sigma2 / 1.5 <= empirical <= sigma2 * 1.5
