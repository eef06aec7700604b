#include "sgdlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sgdlab/errors.hpp"

namespace sgdlab {

namespace {

// Stream tags keep the seed substreams of one report disjoint:
// replicate r of stream `tag` runs with
//   derive_seed(derive_seed(master, tag), r).
constexpr std::uint64_t kDriftStreamBase = 1000;
constexpr std::uint64_t kDiffusionStreamBase = 2000;
constexpr std::uint64_t kMomentStreamBase = 3000;
constexpr std::uint64_t kWeakErrorStreamBase = 4000;
constexpr std::uint64_t kDistributionStreamBase = 5000;

SeedSpec stream(SeedSpec seeds, std::uint64_t tag) {
  return SeedSpec{derive_seed(seeds.master_seed, tag)};
}

constexpr int kEnumerationLimit = 32;

void check_decreasing_positive(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw std::domain_error(std::string(what) + " must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::domain_error(std::string(what) + " must be positive");
    if (i > 0 && !(grid[i] < grid[i - 1]))
      throw std::domain_error(std::string(what) + " must be strictly decreasing");
  }
}

// Largest k with k * eta <= t (the piecewise-constant embedding index).
std::int64_t embedding_steps(double t, double eta) {
  std::int64_t k = static_cast<std::int64_t>(std::floor(t / eta));
  while (static_cast<double>(k + 1) * eta <= t) ++k;
  while (k > 0 && static_cast<double>(k) * eta > t) --k;
  return k;
}

bool has_identity_curvatures(const FiniteSumProblem& problem) {
  const QuadraticFamilySpec* spec = problem.quadratic_spec();
  if (spec == nullptr) return false;
  const Matrix identity = Matrix::Identity(problem.dimension(), problem.dimension());
  for (const Matrix& a : spec->curvatures)
    if ((a.array() != identity.array()).any()) return false;
  return true;
}

}  // namespace

double apply_test_function(TestFunctionKind g, const Vector& x) {
  switch (g) {
    case TestFunctionKind::identity: return x[0];
    case TestFunctionKind::square: return x[0] * x[0];
    case TestFunctionKind::constant: return 1.0;
  }
  throw std::domain_error("unknown test function");
}

const char* test_function_name(TestFunctionKind g) {
  switch (g) {
    case TestFunctionKind::identity: return "identity";
    case TestFunctionKind::square: return "square";
    case TestFunctionKind::constant: return "constant";
  }
  return "unknown";
}

TestFunctionKind test_function_from_name(const std::string& name) {
  if (name == "identity") return TestFunctionKind::identity;
  if (name == "square") return TestFunctionKind::square;
  if (name == "constant") return TestFunctionKind::constant;
  throw std::domain_error("unknown test function '" + name + "'");
}

std::pair<double, double> fit_line_slope_intercept(const std::vector<double>& x,
                                                   const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("line fit is degenerate");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

FrozenStepMoments enumerate_frozen_step_moments(const FiniteSumProblem& problem,
                                                const Vector& x, double eta, double eta_bar) {
  const int n = problem.component_count();
  const int d = problem.dimension();
  const IterateState state{x, 0, 0.0};
  Vector mean = Vector::Zero(d);
  Matrix second = Matrix::Zero(d, d);
  for (int gamma = 0; gamma < n; ++gamma) {
    const Vector xp = frozen_noise_step_with_index(problem, state, eta, eta_bar, gamma).x;
    mean += xp;
    const Vector dx = xp - x;
    second.noalias() += dx * dx.transpose();
  }
  return FrozenStepMoments{mean / n, second / n};
}

EstimateWithCi empirical_drift(const FiniteSumProblem& problem, const Vector& x, double eta,
                               double eta_bar, std::int64_t replicates, SeedSpec seeds) {
  if (replicates < 100) throw std::domain_error("empirical_drift needs M >= 100");
  const IterateState state{x, 0, 0.0};
  const auto generator = [&](std::uint64_t seed) {
    Philox4x32 rng(seed);
    const Vector xp = frozen_noise_sgd_step(problem, state, eta, eta_bar, rng).x;
    return Vector((xp - x) / eta);
  };
  const Ensemble ens = run_ensemble(generator, replicates, seeds);
  return estimate_vector(ens, [](const Vector& v) { return v; });
}

MatrixEstimateWithCi empirical_diffusion(const FiniteSumProblem& problem, const Vector& x,
                                         double eta, double eta_bar,
                                         std::int64_t replicates, SeedSpec seeds) {
  if (replicates < 1000) throw std::domain_error("empirical_diffusion needs M >= 1000");
  const int d = problem.dimension();
  const IterateState state{x, 0, 0.0};
  const auto generator = [&](std::uint64_t seed) {
    Philox4x32 rng(seed);
    const Vector xp = frozen_noise_sgd_step(problem, state, eta, eta_bar, rng).x;
    const Vector dx = xp - x;
    const Matrix outer = (dx * dx.transpose()) / eta;
    return Vector(Eigen::Map<const Vector>(outer.data(), d * d));
  };
  const Ensemble ens = run_ensemble(generator, replicates, seeds);
  const EstimateWithCi flat = estimate_vector(ens, [](const Vector& v) { return v; });
  MatrixEstimateWithCi out;
  out.mean = Eigen::Map<const Matrix>(flat.mean.data(), d, d);
  out.halfwidth = Eigen::Map<const Matrix>(flat.halfwidth.data(), d, d);
  out.sample_count = flat.sample_count;
  return out;
}

MomentCheck moment_2plusdelta(const FiniteSumProblem& problem, const Vector& x,
                              const std::vector<double>& eta_grid, double eta_bar,
                              double delta, std::int64_t replicates, SeedSpec seeds) {
  if (!(delta > 0.0)) throw std::domain_error("delta must be > 0");
  check_decreasing_positive(eta_grid, "eta_grid");
  if (eta_grid.size() < 3) throw std::domain_error("eta_grid needs at least 3 points");
  if (eta_grid.front() / eta_grid.back() < 8.0)
    throw std::domain_error("eta_grid must span at least a factor of 8");

  const int n = problem.component_count();
  const int d = problem.dimension();
  const double p = 2.0 + delta;

  MomentCheck check;
  check.eta_grid = eta_grid;
  check.delta = delta;
  check.exact_enumeration = n <= kEnumerationLimit;

  for (std::size_t gi = 0; gi < eta_grid.size(); ++gi) {
    const double eta = eta_grid[gi];
    const IterateState state{x, 0, 0.0};
    Vector values(d);
    if (check.exact_enumeration) {
      values.setZero();
      for (int gamma = 0; gamma < n; ++gamma) {
        const Vector dx =
            frozen_noise_step_with_index(problem, state, eta, eta_bar, gamma).x - x;
        for (int j = 0; j < d; ++j) values[j] += std::pow(std::abs(dx[j]), p);
      }
      values /= static_cast<double>(n) * eta;
    } else {
      const auto generator = [&](std::uint64_t seed) {
        Philox4x32 rng(seed);
        const Vector dx = frozen_noise_sgd_step(problem, state, eta, eta_bar, rng).x - x;
        Vector v(d);
        for (int j = 0; j < d; ++j) v[j] = std::pow(std::abs(dx[j]), p) / eta;
        return v;
      };
      const Ensemble ens =
          run_ensemble(generator, replicates,
                       stream(seeds, kMomentStreamBase + static_cast<std::uint64_t>(gi)));
      values = estimate_vector(ens, [](const Vector& v) { return v; }).mean;
    }
    check.per_coordinate.push_back(values);
    check.worst.push_back(values.maxCoeff());
  }

  std::vector<double> log_eta, log_val;
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    if (!(check.worst[i] > 0.0))
      throw std::domain_error(
          "moment values vanish at this point (stationary x); choose a non-stationary x");
    log_eta.push_back(std::log(eta_grid[i]));
    log_val.push_back(std::log(check.worst[i]));
  }
  check.fitted_slope = fit_line_slope_intercept(log_eta, log_val).first;
  return check;
}

AssumptionReport assumption_report(const FiniteSumProblem& problem,
                                   const std::vector<Vector>& points,
                                   const Vector& moment_point, const AssumptionOptions& opt,
                                   SeedSpec seeds) {
  if (points.empty()) throw std::domain_error("assumption_report needs grid points");
  AssumptionReport report;
  report.delta = opt.delta;
  bool all_pass = true;

  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector& x = points[i];
    DriftCheck dc;
    dc.x = x;
    dc.estimate =
        empirical_drift(problem, x, opt.eta, opt.eta_bar, opt.drift_replicates,
                        stream(seeds, kDriftStreamBase + static_cast<std::uint64_t>(i)));
    dc.exact = -problem.full_gradient(x);
    dc.discrepancy = (dc.estimate.mean - dc.exact).norm();
    dc.ci_norm = dc.estimate.halfwidth.norm();
    // absolute epsilon keeps zero-variance (n = 1) cases meaningful
    dc.pass = dc.discrepancy <= opt.drift_ci_multiple * dc.ci_norm + 1e-12;
    all_pass = all_pass && dc.pass;
    report.drift_checks.push_back(std::move(dc));
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector& x = points[i];
    DiffusionCheck fc;
    fc.x = x;
    fc.estimate = empirical_diffusion(
        problem, x, opt.eta, opt.eta_bar, opt.diffusion_replicates,
        stream(seeds, kDiffusionStreamBase + static_cast<std::uint64_t>(i)));
    const Vector g = problem.full_gradient(x);
    fc.limit = opt.eta_bar * problem.noise_covariance(x).matrix;
    fc.exact = fc.limit + opt.eta * (g * g.transpose());
    fc.max_abs_error_vs_exact = (fc.estimate.mean - fc.exact).cwiseAbs().maxCoeff();
    fc.max_abs_error_vs_limit = (fc.estimate.mean - fc.limit).cwiseAbs().maxCoeff();
    const Matrix se = fc.estimate.halfwidth / 1.96;
    fc.pass = ((fc.estimate.mean - fc.exact).cwiseAbs().array() <=
               opt.diffusion_se_multiple * se.array() + 1e-12)
                  .all();
    all_pass = all_pass && fc.pass;
    report.diffusion_checks.push_back(std::move(fc));
  }

  report.moment_check =
      moment_2plusdelta(problem, moment_point, opt.moment_eta_grid, opt.eta_bar, opt.delta,
                        opt.diffusion_replicates, seeds);
  const bool moment_pass =
      report.moment_check.fitted_slope >= opt.delta / 2.0 - opt.moment_slope_margin;
  all_pass = all_pass && moment_pass;

  if (problem.component_count() <= kEnumerationLimit) {
    const FrozenStepMoments moments =
        enumerate_frozen_step_moments(problem, moment_point, opt.eta, opt.eta_bar);
    const Vector g = problem.full_gradient(moment_point);
    const Vector exact_mean = moment_point - opt.eta * g;
    const Matrix exact_second =
        opt.eta * (opt.eta_bar * problem.noise_covariance(moment_point).matrix +
                   opt.eta * (g * g.transpose()));
    ExactMomentIdentity id;
    id.mean_error = (moments.mean - exact_mean).cwiseAbs().maxCoeff();
    id.second_moment_error = (moments.second_moment - exact_second).cwiseAbs().maxCoeff();
    id.pass = id.mean_error <= 1e-12 && id.second_moment_error <= 1e-12;
    all_pass = all_pass && id.pass;
    report.exact_identity = id;
  }

  report.pass = all_pass;
  return report;
}

namespace {

struct ClosedFormContext {
  Vector mean_center;         // average of the centers
  double center0_mean = 0.0;  // first coordinate statistics of the centers
  double center0_sq_mean = 0.0;
  double sigma00 = 0.0;  // constant covariance entry (0, 0)
};

ClosedFormContext closed_form_context(const FiniteSumProblem& problem) {
  if (!has_identity_curvatures(problem))
    throw std::domain_error(
        "closed-form weak error needs a quadratic family with identity curvatures");
  const QuadraticFamilySpec& spec = *problem.quadratic_spec();
  ClosedFormContext ctx;
  ctx.mean_center = Vector::Zero(problem.dimension());
  for (const Vector& c : spec.centers) ctx.mean_center += c;
  ctx.mean_center /= static_cast<double>(spec.centers.size());
  ctx.center0_mean = 0.0;
  ctx.center0_sq_mean = 0.0;
  for (const Vector& c : spec.centers) {
    ctx.center0_mean += c[0];
    ctx.center0_sq_mean += c[0] * c[0];
  }
  ctx.center0_mean /= static_cast<double>(spec.centers.size());
  ctx.center0_sq_mean /= static_cast<double>(spec.centers.size());
  ctx.sigma00 = problem.constant_noise_covariance()(0, 0);
  return ctx;
}

// E g(x_k) under plain SGD with identity curvatures: exact moment recursions.
double sgd_closed_form_value(const ClosedFormContext& ctx, TestFunctionKind g,
                             const Vector& x0, double eta_bar, std::int64_t steps) {
  if (g == TestFunctionKind::constant) return 1.0;
  double m1 = x0[0];
  if (g == TestFunctionKind::identity) {
    for (std::int64_t k = 0; k < steps; ++k)
      m1 = (1.0 - eta_bar) * m1 + eta_bar * ctx.center0_mean;
    return m1;
  }
  double m2 = x0[0] * x0[0];
  for (std::int64_t k = 0; k < steps; ++k) {
    m2 = (1.0 - eta_bar) * (1.0 - eta_bar) * m2 +
         2.0 * eta_bar * (1.0 - eta_bar) * m1 * ctx.center0_mean +
         eta_bar * eta_bar * ctx.center0_sq_mean;
    m1 = (1.0 - eta_bar) * m1 + eta_bar * ctx.center0_mean;
  }
  return m2;
}

// E g(X_T) for the limiting process with identity curvatures: the
// linear-drift SDE has Gaussian marginals with
//   mean(T)  = cbar + exp(-T) (x0 - cbar)
//   var(T)   = (eta_bar Sigma / 2)(1 - exp(-2T))   entrywise.
double sde_closed_form_value(const ClosedFormContext& ctx, TestFunctionKind g,
                             const Vector& x0, double eta_bar, double horizon_time) {
  if (g == TestFunctionKind::constant) return 1.0;
  const double mean0 =
      ctx.mean_center[0] + std::exp(-horizon_time) * (x0[0] - ctx.mean_center[0]);
  if (g == TestFunctionKind::identity) return mean0;
  const double var00 =
      0.5 * eta_bar * ctx.sigma00 * (1.0 - std::exp(-2.0 * horizon_time));
  return var00 + mean0 * mean0;
}

}  // namespace

WeakErrorReport weak_error_curve(const FiniteSumProblem& problem, const WeakErrorOptions& opt,
                                 SeedSpec seeds) {
  check_decreasing_positive(opt.eta_bar_grid, "eta_bar_grid");
  if (opt.eta_bar_grid.size() < 3)
    throw std::domain_error("eta_bar_grid needs at least 3 points");
  if (!(opt.horizon_time > 0.0)) throw std::domain_error("horizon_time must be > 0");
  if (static_cast<int>(opt.x0.size()) != problem.dimension())
    throw std::domain_error("x0 dimension mismatch");

  std::vector<std::int64_t> step_counts;
  for (double eb : opt.eta_bar_grid) {
    const double ratio = opt.horizon_time / eb;
    const std::int64_t k = static_cast<std::int64_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio) || k < 1)
      throw std::domain_error("horizon_time must be an integer multiple of each eta_bar");
    step_counts.push_back(k);
  }

  ClosedFormContext ctx;
  if (opt.sgd_closed_form || opt.sde_closed_form) ctx = closed_form_context(problem);

  WeakErrorReport report;
  report.eta_bar_grid = opt.eta_bar_grid;
  report.sgd_closed_form = opt.sgd_closed_form;
  report.sde_closed_form = opt.sde_closed_form;

  const auto g_of = [&](const Vector& x) { return apply_test_function(opt.g, x); };

  for (std::size_t gi = 0; gi < opt.eta_bar_grid.size(); ++gi) {
    const double eta_bar = opt.eta_bar_grid[gi];
    const std::int64_t k = step_counts[gi];

    double sgd_value = 0.0;
    double sgd_hw = 0.0;
    if (opt.sgd_closed_form) {
      sgd_value = sgd_closed_form_value(ctx, opt.g, opt.x0, eta_bar, k);
    } else {
      StepperSpec stepper{ProcessKind::plain_sgd, eta_bar, 0.0};
      const auto generator = [&](std::uint64_t seed) {
        return simulate(problem, stepper, opt.x0, k, std::max<std::int64_t>(k, 1), seed)
            .states.back()
            .x;
      };
      const Ensemble ens = run_ensemble(
          generator, opt.replicates,
          stream(seeds, kWeakErrorStreamBase + 2 * static_cast<std::uint64_t>(gi)));
      const EstimateWithCi est = estimate(ens, g_of);
      sgd_value = est.mean[0];
      sgd_hw = est.halfwidth[0];
    }

    double sde_value = 0.0;
    double sde_hw = 0.0;
    if (opt.sde_closed_form) {
      sde_value = sde_closed_form_value(ctx, opt.g, opt.x0, eta_bar, opt.horizon_time);
    } else {
      SdeSpec sde{problem, eta_bar, opt.sde_dt};
      const std::int64_t sde_steps =
          static_cast<std::int64_t>(std::llround(opt.horizon_time / opt.sde_dt));
      const auto generator = [&](std::uint64_t seed) {
        return solve_sde(sde, opt.x0, opt.horizon_time,
                         std::max<std::int64_t>(sde_steps, 1), seed)
            .states.back()
            .x;
      };
      const Ensemble ens = run_ensemble(
          generator, opt.replicates,
          stream(seeds, kWeakErrorStreamBase + 2 * static_cast<std::uint64_t>(gi) + 1));
      const EstimateWithCi est = estimate(ens, g_of);
      sde_value = est.mean[0];
      sde_hw = est.halfwidth[0];
    }

    report.errors.push_back(std::abs(sgd_value - sde_value));
    report.ci_halfwidths.push_back(std::sqrt(sgd_hw * sgd_hw + sde_hw * sde_hw));
  }

  std::vector<double> log_eb, log_err;
  for (std::size_t i = 0; i < report.errors.size(); ++i) {
    if (report.errors[i] > 0.0) {
      log_eb.push_back(std::log(report.eta_bar_grid[i]));
      log_err.push_back(std::log(report.errors[i]));
    }
  }
  if (log_eb.size() >= 2) {
    const auto [slope, intercept] = fit_line_slope_intercept(log_eb, log_err);
    report.fitted_slope = slope;
    report.fitted_log_intercept = intercept;
  } else {
    report.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    report.fitted_log_intercept = std::numeric_limits<double>::quiet_NaN();
  }

  // a grid point whose Monte Carlo uncertainty eats more than 20% of its own
  // error cannot support the slope fit
  report.inconclusive = false;
  for (std::size_t i = 0; i < report.errors.size(); ++i) {
    if (report.ci_halfwidths[i] == 0.0) continue;
    if (report.errors[i] <= 0.0 || report.ci_halfwidths[i] > 0.2 * report.errors[i])
      report.inconclusive = true;
  }
  return report;
}

DistributionalReport distributional_convergence(const FiniteSumProblem& problem,
                                                const DistributionalOptions& opt,
                                                SeedSpec seeds) {
  check_decreasing_positive(opt.eta_grid, "eta_grid");
  if (!(opt.time > 0.0)) throw std::domain_error("time must be > 0");
  if (opt.replicates < 2) throw std::domain_error("need at least 2 replicates");
  if (static_cast<int>(opt.x0.size()) != problem.dimension())
    throw std::domain_error("x0 dimension mismatch");

  const SdeSpec sde{problem, opt.eta_bar, opt.sde_dt};
  const std::int64_t sde_steps =
      static_cast<std::int64_t>(std::llround(opt.time / opt.sde_dt));
  const auto sde_generator = [&](std::uint64_t seed) {
    return solve_sde(sde, opt.x0, opt.time, std::max<std::int64_t>(sde_steps, 1), seed)
        .states.back()
        .x;
  };
  const Ensemble sde_primary = run_ensemble(sde_generator, opt.replicates,
                                            stream(seeds, kDistributionStreamBase + 0));
  const Ensemble sde_indep_a = run_ensemble(sde_generator, opt.replicates,
                                            stream(seeds, kDistributionStreamBase + 1));
  const Ensemble sde_indep_b = run_ensemble(sde_generator, opt.replicates,
                                            stream(seeds, kDistributionStreamBase + 2));

  DistributionalReport report;
  report.eta_grid = opt.eta_grid;
  report.replicates = opt.replicates;
  // twice the independent-ensemble self-distance; averaging the three
  // pairwise estimates tames the variance of the floor itself
  report.floor = 2.0 *
                 (energy_distance(sde_primary.values, sde_indep_a.values) +
                  energy_distance(sde_primary.values, sde_indep_b.values) +
                  energy_distance(sde_indep_a.values, sde_indep_b.values)) /
                 3.0;

  const int d = problem.dimension();
  for (std::size_t gi = 0; gi < opt.eta_grid.size(); ++gi) {
    const double eta = opt.eta_grid[gi];
    const std::int64_t k = embedding_steps(opt.time, eta);
    StepperSpec stepper{ProcessKind::frozen_noise_sgd, eta, opt.eta_bar};
    const auto generator = [&](std::uint64_t seed) {
      const Trajectory traj = simulate(problem, stepper, opt.x0, k, 1, seed);
      return embed_continuous(traj, std::min(opt.time, static_cast<double>(k) * eta));
    };
    const Ensemble sgd = run_ensemble(
        generator, opt.replicates,
        stream(seeds, kDistributionStreamBase + 3 + static_cast<std::uint64_t>(gi)));

    // average against the three SDE ensembles; same population quantity,
    // lower estimator variance
    report.energy_distances.push_back(
        (energy_distance(sgd.values, sde_primary.values) +
         energy_distance(sgd.values, sde_indep_a.values) +
         energy_distance(sgd.values, sde_indep_b.values)) /
        3.0);

    double worst_ks = 0.0;
    for (int j = 0; j < d; ++j) {
      std::vector<double> a, b;
      a.reserve(sgd.values.size());
      b.reserve(sde_primary.values.size());
      for (const Vector& v : sgd.values) a.push_back(v[j]);
      for (const Vector& v : sde_primary.values) b.push_back(v[j]);
      worst_ks = std::max(worst_ks, ks_statistic_1d(std::move(a), std::move(b)));
    }
    report.ks_max.push_back(worst_ks);
  }

  const double band = opt.floor_multiple * report.floor;
  bool pass = report.energy_distances.back() <= band;
  for (std::size_t i = 1; i < report.energy_distances.size(); ++i) {
    if (report.energy_distances[i] >
        std::max(report.energy_distances[i - 1], band))
      pass = false;
  }
  report.pass = pass;
  return report;
}

CertifyGrids default_certify_grids(int dimension, double radius, int points_per_axis) {
  if (dimension < 1) throw std::domain_error("dimension must be >= 1");
  if (!(radius > 0.0)) throw std::domain_error("radius must be > 0");
  if (points_per_axis < 2) throw std::domain_error("points_per_axis must be >= 2");
  const double spacing = 2.0 * radius / (points_per_axis - 1);

  CertifyGrids grids;
  if (dimension <= 3) {
    std::int64_t total = 1;
    for (int j = 0; j < dimension; ++j) total *= points_per_axis;
    for (std::int64_t idx = 0; idx < total; ++idx) {
      Vector p(dimension);
      std::int64_t rest = idx;
      for (int j = 0; j < dimension; ++j) {
        p[j] = -radius + spacing * static_cast<double>(rest % points_per_axis);
        rest /= points_per_axis;
      }
      grids.points.push_back(std::move(p));
    }
    grids.description = "tensor grid on [-" + std::to_string(radius) + ";" +
                        std::to_string(radius) + "]^" + std::to_string(dimension) + "; " +
                        std::to_string(points_per_axis) + " points per axis";
  } else {
    grids.points.push_back(Vector::Zero(dimension));
    for (int j = 0; j < dimension; ++j) {
      for (int s = 0; s < points_per_axis; ++s) {
        Vector p = Vector::Zero(dimension);
        p[j] = -radius + spacing * s;
        if (p.norm() > 0.0) grids.points.push_back(std::move(p));
      }
    }
    grids.description = "axis grid on [-" + std::to_string(radius) + ";" +
                        std::to_string(radius) + "] per coordinate; d = " +
                        std::to_string(dimension);
  }

  for (int j = 0; j < dimension; ++j) {
    Vector e = Vector::Zero(dimension);
    e[j] = 1.0;
    grids.directions.push_back(std::move(e));
  }
  grids.directions.push_back(Vector::Ones(dimension));

  for (const Vector& p : grids.points) {
    for (int j = 0; j < dimension; ++j) {
      Vector q = p;
      q[j] += spacing;
      grids.pairs.emplace_back(p, std::move(q));
    }
  }
  grids.description += "; directions: axes + diagonal; pair step " + std::to_string(spacing);
  return grids;
}

HypothesisCertificate certify_hypotheses(const FiniteSumProblem& problem,
                                         const CertifyGrids& grids, double h) {
  if (grids.points.empty() || grids.directions.empty() || grids.pairs.empty())
    throw std::domain_error("certify_hypotheses needs nonempty grids");
  HypothesisCertificate cert;
  double lambda0 = 0.0;
  for (const Vector& x : grids.points)
    for (const Vector& theta : grids.directions)
      lambda0 = std::max(lambda0, covariance_curvature_bound(problem, x, theta, h));
  cert.curvature.lambda0_estimate = lambda0;
  cert.curvature.grid_description = grids.description;
  cert.lipschitz_estimate = gradient_lipschitz_estimate(problem, grids.pairs);
  return cert;
}

}  // namespace sgdlab
