#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgdlab/montecarlo.hpp"
#include "sgdlab/processes.hpp"
#include "sgdlab/sde.hpp"

namespace sgdlab {

// Scalar test functions of the terminal point: x[0], x[0]^2, or 1.
enum class TestFunctionKind { identity, square, constant };

double apply_test_function(TestFunctionKind g, const Vector& x);
const char* test_function_name(TestFunctionKind g);
TestFunctionKind test_function_from_name(const std::string& name);

// Least-squares fit y = intercept + slope * x. Needs >= 2 points.
std::pair<double, double> fit_line_slope_intercept(const std::vector<double>& x,
                                                   const std::vector<double>& y);

// Exact conditional moments of one frozen-noise step from x, by enumeration
// over the component index (every gamma equiprobable). Deterministic.
struct FrozenStepMoments {
  Vector mean;           // E[x' | x]
  Matrix second_moment;  // E[(x' - x)(x' - x)^T | x]
};
FrozenStepMoments enumerate_frozen_step_moments(const FiniteSumProblem& problem,
                                                const Vector& x, double eta, double eta_bar);

// Monte Carlo estimate of E[X_{t+eta} - X_t | X_t = x] / eta over M one-step
// frozen-noise draws. The exact value is -grad f(x) for every eta_bar.
EstimateWithCi empirical_drift(const FiniteSumProblem& problem, const Vector& x, double eta,
                               double eta_bar, std::int64_t replicates, SeedSpec seeds);

struct MatrixEstimateWithCi {
  Matrix mean;
  Matrix halfwidth;  // 95% per-entry half-widths
  std::int64_t sample_count = 0;
};

// Monte Carlo estimate of E[(dX)(dX)^T | X_t = x] / eta; the exact value is
// eta_bar * Sigma(x) + eta * grad f grad f^T.
MatrixEstimateWithCi empirical_diffusion(const FiniteSumProblem& problem, const Vector& x,
                                         double eta, double eta_bar,
                                         std::int64_t replicates, SeedSpec seeds);

// Per-eta, per-coordinate values of E[|<dX, e_j>|^{2+delta} | x] / eta and
// the fitted log-log slope of the worst coordinate against eta. Uses exact
// enumeration over gamma when n <= 32, Monte Carlo otherwise.
struct MomentCheck {
  std::vector<double> eta_grid;
  std::vector<Vector> per_coordinate;  // one vector of size d per eta
  std::vector<double> worst;           // max over coordinates per eta
  double fitted_slope = 0.0;
  double delta = 0.0;
  bool exact_enumeration = false;
};
MomentCheck moment_2plusdelta(const FiniteSumProblem& problem, const Vector& x,
                              const std::vector<double>& eta_grid, double eta_bar,
                              double delta, std::int64_t replicates, SeedSpec seeds);

struct DriftCheck {
  Vector x;
  EstimateWithCi estimate;
  Vector exact;
  double discrepancy = 0.0;  // |estimate.mean - exact|
  double ci_norm = 0.0;      // |estimate.halfwidth|
  bool pass = false;
};

struct DiffusionCheck {
  Vector x;
  MatrixEstimateWithCi estimate;
  Matrix exact;  // eta_bar Sigma + eta grad grad^T
  Matrix limit;  // eta_bar Sigma
  double max_abs_error_vs_exact = 0.0;
  double max_abs_error_vs_limit = 0.0;
  bool pass = false;
};

// Deterministic check of the one-step identities when n is small enough to
// enumerate: mean = x - eta grad f, second moment = eta(eta_bar Sigma +
// eta grad grad^T), both to 1e-12.
struct ExactMomentIdentity {
  double mean_error = 0.0;
  double second_moment_error = 0.0;
  bool pass = false;
};

struct AssumptionReport {
  std::vector<DriftCheck> drift_checks;
  std::vector<DiffusionCheck> diffusion_checks;
  MomentCheck moment_check;
  std::optional<ExactMomentIdentity> exact_identity;  // present when n <= 32
  double delta = 0.0;
  bool pass = false;
};

struct AssumptionOptions {
  double eta = 0.01;
  double eta_bar = 0.04;
  double delta = 1.0;
  std::vector<double> moment_eta_grid = {0.04, 0.02, 0.01, 0.005};
  std::int64_t drift_replicates = 10000;
  std::int64_t diffusion_replicates = 10000;
  double drift_ci_multiple = 4.0;
  double diffusion_se_multiple = 4.0;
  double moment_slope_margin = 0.1;  // pass when slope >= delta/2 - margin
};

AssumptionReport assumption_report(const FiniteSumProblem& problem,
                                   const std::vector<Vector>& points,
                                   const Vector& moment_point, const AssumptionOptions& opt,
                                   SeedSpec seeds);

struct WeakErrorOptions {
  TestFunctionKind g = TestFunctionKind::identity;
  Vector x0;
  double horizon_time = 1.0;
  std::vector<double> eta_bar_grid = {0.1, 0.05, 0.025};
  double sde_dt = 1e-3;
  std::int64_t replicates = 10000;
  // Closed forms exist for quadratic families with identity curvatures and
  // g in {identity, square, constant}; requesting them elsewhere throws.
  bool sgd_closed_form = false;
  bool sde_closed_form = true;
};

struct WeakErrorReport {
  std::vector<double> eta_bar_grid;
  std::vector<double> errors;  // |E g(X_T) - E g(x_{T/eta_bar})| per grid point
  std::vector<double> ci_halfwidths;
  double fitted_slope = 0.0;
  double fitted_log_intercept = 0.0;
  bool inconclusive = false;  // MC half-widths exceed 20% of the smallest error
  bool sgd_closed_form = false;
  bool sde_closed_form = false;
};

WeakErrorReport weak_error_curve(const FiniteSumProblem& problem, const WeakErrorOptions& opt,
                                 SeedSpec seeds);

struct DistributionalOptions {
  Vector x0;
  double time = 1.0;
  std::vector<double> eta_grid = {0.2, 0.1, 0.05};
  double eta_bar = 0.04;
  double sde_dt = 1e-3;
  std::int64_t replicates = 10000;
  double floor_multiple = 2.0;  // pass band is floor_multiple * floor
};

struct DistributionalReport {
  std::vector<double> eta_grid;
  std::vector<double> energy_distances;
  std::vector<double> ks_max;  // max over coordinates per eta
  double floor = 0.0;          // 2x self-distance of independent SDE ensembles
  std::int64_t replicates = 0;
  bool pass = false;
};

DistributionalReport distributional_convergence(const FiniteSumProblem& problem,
                                                const DistributionalOptions& opt,
                                                SeedSpec seeds);

struct CurvatureBoundReport {
  double lambda0_estimate = 0.0;
  std::string grid_description;
};

struct HypothesisCertificate {
  CurvatureBoundReport curvature;
  double lipschitz_estimate = 0.0;
};

struct CertifyGrids {
  std::vector<Vector> points;
  std::vector<Vector> directions;
  std::vector<std::pair<Vector, Vector>> pairs;
  std::string description;
};

// Tensor grid on [-radius, radius]^d for d <= 3 (axis points above that),
// directions along each axis plus the all-ones diagonal, and pairs stepping
// one grid spacing along each axis from every point.
CertifyGrids default_certify_grids(int dimension, double radius, int points_per_axis);

// Empirical Lipschitz constant and curvature bound maxima over the grids.
HypothesisCertificate certify_hypotheses(const FiniteSumProblem& problem,
                                         const CertifyGrids& grids, double h);

}  // namespace sgdlab
