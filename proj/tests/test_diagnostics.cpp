#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sgdlab/diagnostics.hpp"
#include "sgdlab/errors.hpp"

using namespace sgdlab;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

FiniteSumProblem two_center_quadratic() {
  Vector c0(1), c1(1);
  c0 << 0.0;
  c1 << 2.0;
  return FiniteSumProblem::quadratic({{c0, c1}, {}});
}

FiniteSumProblem small_logistic() {
  return FiniteSumProblem::logistic(
      {{vec2(1.0, 0.5), vec2(-0.5, 1.0), vec2(0.75, -1.0)}, {1.0, -1.0, 1.0}, 0.05});
}

// Test-side enumeration of E|<dX, e_j>|^{2+delta} / eta over the component
// draw, independent of the library implementation.
double moment_value_oracle(const FiniteSumProblem& p, const Vector& x, double eta,
                           double eta_bar, double delta, int coordinate) {
  const IterateState s{x, 0, 0.0};
  double acc = 0.0;
  for (int gamma = 0; gamma < p.component_count(); ++gamma) {
    const Vector dx = frozen_noise_step_with_index(p, s, eta, eta_bar, gamma).x - x;
    acc += std::pow(std::abs(dx[coordinate]), 2.0 + delta);
  }
  return acc / p.component_count() / eta;
}

}  // namespace

TEST_CASE("enumerated one-step moments obey the conditional identities") {
  for (const bool logistic : {false, true}) {
    const FiniteSumProblem p = logistic ? small_logistic() : two_center_quadratic();
    const Vector x = logistic ? vec2(0.3, -0.2) : vec1(0.5);
    const double eta = 0.01;
    const double eta_bar = 0.04;
    const FrozenStepMoments moments = enumerate_frozen_step_moments(p, x, eta, eta_bar);
    const Vector g = p.full_gradient(x);
    const Vector exact_mean = x - eta * g;
    const Matrix exact_second =
        eta * (eta_bar * p.noise_covariance(x).matrix + eta * (g * g.transpose()));
    CHECK((moments.mean - exact_mean).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((moments.second_moment - exact_second).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("empirical drift recovers minus the full gradient") {
  const auto p = two_center_quadratic();
  const EstimateWithCi est =
      empirical_drift(p, vec1(0.0), 0.01, 0.04, 10000, SeedSpec{404});
  // exact conditional drift at 0 is +1
  CHECK(std::abs(est.mean[0] - 1.0) <= 3.0 * est.halfwidth[0]);
}

TEST_CASE("empirical drift with one component is exact with zero variance") {
  const auto p = FiniteSumProblem::quadratic({{vec1(2.0)}, {}});
  const EstimateWithCi est = empirical_drift(p, vec1(0.0), 0.01, 0.04, 200, SeedSpec{1});
  CHECK(est.halfwidth[0] == 0.0);
  CHECK(est.mean[0] == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("empirical drift does not depend on eta_bar in expectation") {
  const auto p = two_center_quadratic();
  const EstimateWithCi a = empirical_drift(p, vec1(0.5), 0.01, 0.04, 20000, SeedSpec{11});
  const EstimateWithCi b = empirical_drift(p, vec1(0.5), 0.01, 0.16, 20000, SeedSpec{22});
  CHECK(std::abs(a.mean[0] - b.mean[0]) <= a.halfwidth[0] + b.halfwidth[0]);
}

TEST_CASE("empirical diffusion matches the exact one-step second moment") {
  const auto p = two_center_quadratic();
  const double eta = 0.01;
  const double eta_bar = 0.04;
  const MatrixEstimateWithCi est =
      empirical_diffusion(p, vec1(0.0), eta, eta_bar, 20000, SeedSpec{31});
  // exact: eta_bar * Sigma + eta * grad grad^T = 0.04 + 0.01 = 0.05
  CHECK(std::abs(est.mean(0, 0) - 0.05) <= 3.0 * est.halfwidth(0, 0) / 1.96);
}

TEST_CASE("empirical diffusion with one component is deterministic") {
  const auto p = FiniteSumProblem::quadratic({{vec1(2.0)}, {}});
  const MatrixEstimateWithCi est =
      empirical_diffusion(p, vec1(0.0), 0.01, 0.04, 2000, SeedSpec{5});
  // every replicate yields the same matrix; the half-width collapses to
  // mean-accumulation rounding
  CHECK(est.halfwidth(0, 0) <= 1e-15);
  CHECK(est.mean(0, 0) == doctest::Approx(0.01 * 4.0).epsilon(1e-12));
}

TEST_CASE("halving eta halves the deviation of the exact moment from its limit") {
  const auto p = two_center_quadratic();
  const Vector x = vec1(0.0);
  const double eta_bar = 0.04;
  const Matrix limit = eta_bar * p.noise_covariance(x).matrix;
  const auto deviation = [&](double eta) {
    const FrozenStepMoments m = enumerate_frozen_step_moments(p, x, eta, eta_bar);
    return (m.second_moment / eta - limit).cwiseAbs().maxCoeff();
  };
  CHECK(deviation(0.01) / deviation(0.005) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("third-moment ratio matches the hand enumeration at (0.01, 0.04)") {
  const auto p = two_center_quadratic();
  const MomentCheck check = moment_2plusdelta(p, vec1(0.0), {0.04, 0.02, 0.01, 0.005}, 0.04,
                                              1.0, 100, SeedSpec{0});
  REQUIRE(check.exact_enumeration);
  // grid index 2 is eta = 0.01; enumeration gives (|0.01|^3 + |0.03|^3)/2/0.01
  CHECK(check.worst[2] == doctest::Approx(1.4e-3).epsilon(1e-12));
  CHECK(check.fitted_slope >= 0.4);
}

TEST_CASE("moment check agrees with an independent per-coordinate oracle") {
  const auto p = small_logistic();
  const Vector x = vec2(0.4, 0.1);
  const std::vector<double> grid = {0.08, 0.02, 0.01};
  const MomentCheck check = moment_2plusdelta(p, x, grid, 0.04, 1.0, 100, SeedSpec{0});
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    for (int j = 0; j < 2; ++j) {
      const double want = moment_value_oracle(p, x, grid[gi], 0.04, 1.0, j);
      CHECK(check.per_coordinate[gi][j] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("moment slope clears delta/2 - 0.1 on the logistic family too") {
  const auto p = small_logistic();
  const MomentCheck check = moment_2plusdelta(p, vec2(0.4, 0.1), {0.04, 0.02, 0.01, 0.005},
                                              0.04, 1.0, 100, SeedSpec{0});
  REQUIRE(check.exact_enumeration);
  CHECK(check.fitted_slope >= 0.5 - 0.1);
}

TEST_CASE("single-component chains have moment slope 1 + delta") {
  const auto p = FiniteSumProblem::quadratic({{vec1(2.0)}, {}});
  const MomentCheck check = moment_2plusdelta(p, vec1(0.0), {0.08, 0.02, 0.01}, 0.04, 1.0,
                                              100, SeedSpec{0});
  CHECK(check.fitted_slope == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(check.fitted_slope >= 1.0 + 1.0 - 0.1);
}

TEST_CASE("noise-dominated regime follows the square-root law under eta -> 4 eta") {
  const auto p = two_center_quadratic();
  const double v1 = moment_value_oracle(p, vec1(0.0), 1e-4, 0.04, 1.0, 0);
  const double v4 = moment_value_oracle(p, vec1(0.0), 4e-4, 0.04, 1.0, 0);
  CHECK(v4 / v1 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("moment grid preconditions") {
  const auto p = two_center_quadratic();
  CHECK_THROWS_AS(
      moment_2plusdelta(p, vec1(0.0), {0.04, 0.02}, 0.04, 1.0, 100, SeedSpec{0}),
      std::domain_error);
  CHECK_THROWS_AS(
      moment_2plusdelta(p, vec1(0.0), {0.04, 0.02, 0.02}, 0.04, 1.0, 100, SeedSpec{0}),
      std::domain_error);
  CHECK_THROWS_AS(
      moment_2plusdelta(p, vec1(0.0), {0.04, 0.03, 0.02}, 0.04, 1.0, 100, SeedSpec{0}),
      std::domain_error);
  CHECK_THROWS_AS(
      moment_2plusdelta(p, vec1(0.0), {0.08, 0.02, 0.01}, 0.04, 0.0, 100, SeedSpec{0}),
      std::domain_error);
  // stationary point of an n = 1 family has identically zero increments
  const auto single = FiniteSumProblem::quadratic({{vec1(0.0)}, {}});
  CHECK_THROWS_AS(
      moment_2plusdelta(single, vec1(0.0), {0.08, 0.02, 0.01}, 0.04, 1.0, 100, SeedSpec{0}),
      std::domain_error);
}

TEST_CASE("closed-form weak error curve reproduces the contraction-vs-exponential gap") {
  const auto p = two_center_quadratic();
  WeakErrorOptions opt;
  opt.g = TestFunctionKind::identity;
  opt.x0 = vec1(2.0);
  opt.horizon_time = 1.0;
  opt.eta_bar_grid = {0.1, 0.05, 0.025};
  opt.sgd_closed_form = true;
  opt.sde_closed_form = true;
  const WeakErrorReport report = weak_error_curve(p, opt, SeedSpec{0});
  CHECK(report.errors[0] == doctest::Approx(0.019201).epsilon(1e-4));
  CHECK(report.errors[1] == doctest::Approx(0.009394).epsilon(1e-4));
  CHECK(report.errors[0] / report.errors[1] == doctest::Approx(2.04).epsilon(0.01));
  CHECK(report.fitted_slope >= 0.9);
  CHECK(report.fitted_slope <= 1.1);
  CHECK_FALSE(report.inconclusive);
  CHECK(report.ci_halfwidths[0] == 0.0);
}

TEST_CASE("constant test functions give exactly zero weak error") {
  const auto p = two_center_quadratic();
  WeakErrorOptions opt;
  opt.g = TestFunctionKind::constant;
  opt.x0 = vec1(2.0);
  opt.horizon_time = 1.0;
  opt.eta_bar_grid = {0.1, 0.05, 0.025};
  opt.sde_dt = 0.01;
  opt.replicates = 200;
  opt.sgd_closed_form = false;
  opt.sde_closed_form = false;
  const WeakErrorReport report = weak_error_curve(p, opt, SeedSpec{77});
  for (double e : report.errors) CHECK(e == 0.0);
}

TEST_CASE("weak error validates grids, horizons and closed-form availability") {
  const auto p = two_center_quadratic();
  WeakErrorOptions opt;
  opt.x0 = vec1(2.0);
  opt.eta_bar_grid = {0.1, 0.05, 0.025};
  opt.horizon_time = 1.0;

  SUBCASE("non-integral horizon is rejected") {
    opt.eta_bar_grid = {0.15, 0.1, 0.008};
    CHECK_THROWS_AS(weak_error_curve(p, opt, SeedSpec{0}), std::domain_error);
  }
  SUBCASE("too-short grids are rejected") {
    opt.eta_bar_grid = {0.1, 0.05};
    CHECK_THROWS_AS(weak_error_curve(p, opt, SeedSpec{0}), std::domain_error);
  }
  SUBCASE("closed form requires identity curvatures") {
    const auto logi = small_logistic();
    WeakErrorOptions lopt;
    lopt.x0 = vec2(0.0, 0.0);
    lopt.eta_bar_grid = {0.1, 0.05, 0.025};
    lopt.sgd_closed_form = true;
    lopt.sde_closed_form = true;
    CHECK_THROWS_AS(weak_error_curve(logi, lopt, SeedSpec{0}), std::domain_error);
  }
}

TEST_CASE("monte carlo weak error stays near the closed-form curve") {
  const auto p = two_center_quadratic();
  WeakErrorOptions opt;
  opt.g = TestFunctionKind::identity;
  opt.x0 = vec1(2.0);
  opt.horizon_time = 1.0;
  opt.eta_bar_grid = {0.1, 0.05, 0.025};
  opt.replicates = 40000;
  opt.sgd_closed_form = false;
  opt.sde_closed_form = true;  // substitute the exact SDE value
  const WeakErrorReport report = weak_error_curve(p, opt, SeedSpec{909});
  CHECK(report.fitted_slope >= 0.7);
  CHECK(report.fitted_slope <= 1.3);
}

TEST_CASE("distributional distances shrink toward the independent-ensemble floor") {
  const auto p = two_center_quadratic();
  DistributionalOptions opt;
  opt.x0 = vec1(1.0);  // relaxed start: the gap at the finest eta is resolvable
  opt.time = 1.0;
  opt.eta_grid = {0.2, 0.1, 0.05};
  opt.eta_bar = 0.04;
  opt.sde_dt = 2e-3;
  opt.replicates = 2000;
  const DistributionalReport report = distributional_convergence(p, opt, SeedSpec{1234});
  REQUIRE(report.energy_distances.size() == 3);
  CHECK(report.floor > 0.0);
  CHECK(report.pass);
  CHECK(report.energy_distances.back() <= 2.0 * report.floor);
  for (double ks : report.ks_max) {
    CHECK(ks >= 0.0);
    CHECK(ks <= 1.0);
  }
}

TEST_CASE("gaussian-replaced chain at eta = dt matches the sde in distribution") {
  // with the gaussian stepper and eta equal to the solver step the two
  // processes are identical in law, so the distance sits at the floor
  const auto p = two_center_quadratic();
  const double eta = 0.05;
  const double t = 1.0;
  const std::int64_t m = 2000;

  const StepperSpec gauss{ProcessKind::gaussian_sgd, eta, 0.04};
  const auto sgd_gen = [&](std::uint64_t seed) {
    return simulate(p, gauss, vec1(2.0), 20, 20, seed).states.back().x;
  };
  const SdeSpec sde{p, 0.04, eta};
  const auto sde_gen = [&](std::uint64_t seed) {
    return solve_sde(sde, vec1(2.0), t, 20, seed).states.back().x;
  };
  const Ensemble a = run_ensemble(sgd_gen, m, SeedSpec{derive_seed(7777, 0)});
  const Ensemble b = run_ensemble(sde_gen, m, SeedSpec{derive_seed(7777, 1)});
  const Ensemble c = run_ensemble(sde_gen, m, SeedSpec{derive_seed(7777, 2)});
  const Ensemble d = run_ensemble(sde_gen, m, SeedSpec{derive_seed(7777, 3)});

  const double distance = energy_distance(a.values, b.values);
  const double floor = 2.0 * energy_distance(c.values, d.values);
  CHECK(distance <= floor);
}

TEST_CASE("certificates on quadratic families are exact") {
  Matrix a(2, 2);
  a << 4.0, 0.0, 0.0, 1.0;
  const auto p = FiniteSumProblem::quadratic(
      {{vec2(0.0, 0.0), vec2(2.0, 0.0), vec2(0.0, 2.0)}, {a, a, a}});
  const CertifyGrids grids = default_certify_grids(2, 2.0, 5);
  const double h = 1e-3;
  const HypothesisCertificate cert = certify_hypotheses(p, grids, h);
  CHECK(cert.curvature.lambda0_estimate <= 1e-8 / (h * h));
  CHECK(cert.lipschitz_estimate == 4.0);
  CHECK(*p.known_gradient_lipschitz() == doctest::Approx(4.0));
}

TEST_CASE("logistic curvature certificate is stable under halving the step") {
  const auto p = small_logistic();
  const CertifyGrids grids = default_certify_grids(2, 2.0, 5);
  const double h = 1e-2;
  const double full = certify_hypotheses(p, grids, h).curvature.lambda0_estimate;
  const double half = certify_hypotheses(p, grids, h / 2).curvature.lambda0_estimate;
  CHECK(full == doctest::Approx(half).epsilon(0.10));
  CHECK(full > 0.0);
}

TEST_CASE("certificates are monotone under grid enlargement") {
  const auto p = small_logistic();
  CertifyGrids small = default_certify_grids(2, 1.0, 3);
  CertifyGrids large = small;
  const CertifyGrids extra = default_certify_grids(2, 2.0, 5);
  large.points.insert(large.points.end(), extra.points.begin(), extra.points.end());
  large.pairs.insert(large.pairs.end(), extra.pairs.begin(), extra.pairs.end());
  large.directions.insert(large.directions.end(), extra.directions.begin(),
                          extra.directions.end());
  const double h = 1e-2;
  const HypothesisCertificate small_cert = certify_hypotheses(p, small, h);
  const HypothesisCertificate large_cert = certify_hypotheses(p, large, h);
  CHECK(large_cert.curvature.lambda0_estimate >= small_cert.curvature.lambda0_estimate);
  CHECK(large_cert.lipschitz_estimate >= small_cert.lipschitz_estimate);
}

TEST_CASE("assumption report aggregates every check and passes on a sound instance") {
  const auto p = two_center_quadratic();
  AssumptionOptions opt;
  opt.eta = 0.01;
  opt.eta_bar = 0.04;
  opt.drift_replicates = 4000;
  opt.diffusion_replicates = 4000;
  const std::vector<Vector> points = {vec1(-1.0), vec1(0.0), vec1(1.0)};
  const AssumptionReport report = assumption_report(p, points, vec1(0.0), opt, SeedSpec{88});
  CHECK(report.drift_checks.size() == 3);
  CHECK(report.diffusion_checks.size() == 3);
  REQUIRE(report.exact_identity.has_value());
  CHECK(report.exact_identity->mean_error <= 1e-12);
  CHECK(report.exact_identity->second_moment_error <= 1e-12);
  CHECK(report.moment_check.fitted_slope >= 0.4);
  CHECK(report.pass);
}
