#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sgdlab/errors.hpp"
#include "sgdlab/montecarlo.hpp"
#include "sgdlab/psd_sqrt.hpp"
#include "sgdlab/sde.hpp"

using namespace sgdlab;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

FiniteSumProblem two_center_quadratic() {
  Vector c0(1), c1(1);
  c0 << 0.0;
  c1 << 2.0;
  return FiniteSumProblem::quadratic({{c0, c1}, {}});
}

Matrix random_psd(Philox4x32& rng, int d, int rank) {
  Matrix g(d, rank);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < rank; ++c) g(r, c) = rng.gaussian();
  Matrix s = g * g.transpose();
  return 0.5 * (s + s.transpose());
}

}  // namespace

TEST_CASE("psd_sqrt on diagonal and worked 2x2 examples") {
  CHECK((psd_sqrt(Matrix::Identity(3, 3)).root - Matrix::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);
  CHECK(psd_sqrt(Matrix::Identity(3, 3)).clipped_count == 0);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 4.0;
  diag(1, 1) = 9.0;
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 2.0;
  want(1, 1) = 3.0;
  CHECK((psd_sqrt(diag).root - want).cwiseAbs().maxCoeff() <= 1e-12);

  Matrix s(2, 2);
  s << 2.0, 1.0, 1.0, 2.0;
  Matrix root(2, 2);
  const double sqrt3 = std::sqrt(3.0);
  root << (sqrt3 + 1.0) / 2.0, (sqrt3 - 1.0) / 2.0, (sqrt3 - 1.0) / 2.0,
      (sqrt3 + 1.0) / 2.0;
  CHECK((psd_sqrt(s).root - root).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("psd_sqrt squares back to the input on random matrices") {
  Philox4x32 rng(808);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.uniform_index(8));
    const int rank = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(d)));
    const Matrix s = random_psd(rng, d, rank);
    const PsdSqrtResult res = psd_sqrt(s);
    CHECK((res.root * res.root - s).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((res.root - res.root.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(res.root);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("psd_sqrt clips slightly negative eigenvalues and reports them") {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = -5e-11;
  const PsdSqrtResult res = psd_sqrt(s);
  CHECK(res.clipped_count == 1);
  CHECK(res.min_eigenvalue_seen == doctest::Approx(-5e-11));
  CHECK(res.root(1, 1) == 0.0);
}

TEST_CASE("psd_sqrt rejects indefinite and asymmetric input") {
  Matrix indefinite = Matrix::Zero(2, 2);
  indefinite(0, 0) = 1.0;
  indefinite(1, 1) = -1.0;
  try {
    psd_sqrt(indefinite);
    FAIL("expected NotPsdError");
  } catch (const NotPsdError& ex) {
    CHECK(ex.offending_eigenvalue() == doctest::Approx(-1.0));
  }

  Matrix asym(2, 2);
  asym << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(psd_sqrt(asym), std::domain_error);
  CHECK_THROWS_AS(psd_sqrt(Matrix::Identity(2, 2), -1.0), std::domain_error);
}

TEST_CASE("euler step: forced draws and one-step mean") {
  const auto p = two_center_quadratic();
  const SdeSpec spec{p, 0.04, 0.1};
  const IterateState s{vec1(0.0), 0, 0.0};

  SUBCASE("zero draw is the deterministic gradient-flow Euler step") {
    const IterateState out = diffusion_step_with_draw(p, s, 0.1, 0.04, vec1(0.0), nullptr);
    CHECK(out.x[0] == doctest::Approx(0.1).epsilon(1e-15));
  }

  SUBCASE("unit draw matches the hand-computed value") {
    const IterateState out = diffusion_step_with_draw(p, s, 0.1, 0.04, vec1(1.0), nullptr);
    CHECK(out.x[0] == doctest::Approx(0.1 + 0.2 * std::sqrt(0.1)).epsilon(1e-12));
  }

  SUBCASE("Monte Carlo one-step mean is the drift") {
    const std::int64_t m = 100000;
    const auto generator = [&](std::uint64_t seed) {
      Philox4x32 rng(seed);
      return euler_maruyama_step(spec, s, rng).x;
    };
    const Ensemble ens = run_ensemble(generator, m, SeedSpec{31});
    const EstimateWithCi est = estimate(ens, [](const Vector& v) { return v[0]; });
    CHECK(std::abs(est.mean[0] - 0.1) <= 3.0 * est.halfwidth[0] / 1.96);
  }
}

TEST_CASE("single euler step is bitwise equal to the scalar recursion") {
  // constants chosen so every square root is exact in binary
  const auto p = two_center_quadratic();
  const double dt = 0.0625;
  const double eta_bar = 0.25;
  for (const double x : {0.0, 2.0, -1.0}) {
    for (const double z : {1.5, -0.75, 0.0}) {
      const IterateState out =
          diffusion_step_with_draw(p, IterateState{vec1(x), 0, 0.0}, dt, eta_bar, vec1(z),
                                   nullptr);
      const double sigma = 1.0;  // exact at integer points for centers {0, 2}
      const double oracle = x - (x - 1.0) * dt + std::sqrt(eta_bar * sigma * dt) * z;
      CHECK(out.x[0] == oracle);
    }
  }
}

TEST_CASE("multi-step path stays on the scalar recursion within accumulation noise") {
  const auto p = two_center_quadratic();
  const double dt = 0.01;
  const double eta_bar = 0.04;
  const SdeSpec spec{p, eta_bar, dt};
  const std::uint64_t seed = 321;
  const Trajectory traj = solve_sde(spec, vec1(2.0), 1.0, 1, seed);

  Philox4x32 rng(seed);
  double x = 2.0;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double z = rng.gaussian();
    const double sigma = p.noise_covariance(vec1(x)).matrix(0, 0);
    x = x - (x - 1.0) * dt + std::sqrt(eta_bar) * std::sqrt(dt) * std::sqrt(sigma) * z;
    CHECK(traj.states[k].x[0] == doctest::Approx(x).epsilon(1e-10));
  }
}

TEST_CASE("solve_sde horizons and step rounding") {
  const auto p = two_center_quadratic();
  const SdeSpec spec{p, 0.04, 0.1};

  SUBCASE("zero horizon keeps only the start") {
    const Trajectory traj = solve_sde(spec, vec1(2.0), 0.0, 1, 3);
    REQUIRE(traj.states.size() == 1);
  }

  SUBCASE("non-divisible horizons round to the nearest step count") {
    SdeSpec coarse{p, 0.04, 0.03};
    const Trajectory traj = solve_sde(coarse, vec1(2.0), 0.1, 1, 3);
    // 0.1 / 0.03 = 3.33 -> 3 steps, realized horizon 0.09
    CHECK(traj.states.back().k == 3);
    CHECK(traj.states.back().t == doctest::Approx(0.09).epsilon(1e-15));
  }

  SUBCASE("identical seeds give identical paths") {
    const Trajectory a = solve_sde(spec, vec1(2.0), 1.0, 1, 77);
    const Trajectory b = solve_sde(spec, vec1(2.0), 1.0, 1, 77);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i].x == b.states[i].x);
  }
}

TEST_CASE("ou ensemble mean and variance agree with the closed forms") {
  const auto p = two_center_quadratic();  // drift toward 1, Sigma = 1
  const double eta_bar = 0.04;
  const SdeSpec spec{p, eta_bar, 1e-2};
  const std::int64_t m = 4000;
  const auto generator = [&](std::uint64_t seed) {
    return solve_sde(spec, vec1(2.0), 1.0, 100, seed).states.back().x;
  };
  const Ensemble ens = run_ensemble(generator, m, SeedSpec{2025});
  const EstimateWithCi mean_est = estimate(ens, [](const Vector& v) { return v[0]; });
  const double want_mean = 1.0 + std::exp(-1.0);
  CHECK(std::abs(mean_est.mean[0] - want_mean) <= 3.0 * mean_est.halfwidth[0] / 1.96);

  double var = 0.0;
  for (const Vector& v : ens.values)
    var += (v[0] - mean_est.mean[0]) * (v[0] - mean_est.mean[0]);
  var /= static_cast<double>(m - 1);
  const double want_var = 0.5 * eta_bar * (1.0 - std::exp(-2.0));
  const double se_var = want_var * std::sqrt(2.0 / static_cast<double>(m - 1));
  CHECK(std::abs(var - want_var) <= 3.0 * se_var);
}

TEST_CASE("deterministic weak order of the mean recursion is one") {
  // (1 - dt)^{T/dt} vs exp(-T): halving dt halves the error
  const double t = 1.0;
  const auto mean_error = [&](double dt) {
    const auto steps = static_cast<std::int64_t>(std::llround(t / dt));
    double m = 1.0;
    for (std::int64_t k = 0; k < steps; ++k) m *= (1.0 - dt);
    return std::abs(m - std::exp(-1.0));
  };
  const double ratio = mean_error(0.01) / mean_error(0.005);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("constant-sigma fast path tracks the default path") {
  const auto p = two_center_quadratic();
  SdeSpec slow{p, 0.04, 0.01};
  SdeSpec fast{p, 0.04, 0.01, true};
  const Trajectory a = solve_sde(slow, vec1(2.0), 1.0, 1, 99);
  const Trajectory b = solve_sde(fast, vec1(2.0), 1.0, 1, 99);
  REQUIRE(a.states.size() == b.states.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i)
    worst = std::max(worst, std::abs(a.states[i].x[0] - b.states[i].x[0]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("fast path is rejected for state-dependent covariance") {
  Vector a1(1), a2(1);
  a1 << 1.0;
  a2 << -1.0;
  const auto logi = FiniteSumProblem::logistic({{a1, a2}, {1.0, -1.0}, 0.0});
  SdeSpec spec{logi, 0.04, 0.01, true};
  CHECK_THROWS_AS(spec.validate(), std::domain_error);
}

TEST_CASE("sde spec validates dt and eta_bar") {
  const auto p = two_center_quadratic();
  CHECK_THROWS_AS((SdeSpec{p, 0.04, 0.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((SdeSpec{p, 0.04, 0.2}.validate()), std::domain_error);
  CHECK_THROWS_AS((SdeSpec{p, 0.0, 0.01}.validate()), std::domain_error);
}
