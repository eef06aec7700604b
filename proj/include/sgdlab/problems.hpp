#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sgdlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Project-wide numeric tolerances for matrix validation.
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPsdEigenvalueFloor = -1e-10;

enum class ProblemFamily { quadratic, logistic };

// f_i(x) = 1/2 (x - c_i)^T A_i (x - c_i)
struct QuadraticFamilySpec {
  std::vector<Vector> centers;
  std::vector<Matrix> curvatures;
};

// f_i(x) = log(1 + exp(-y_i <a_i, x>)) + (ridge/2) |x|^2, labels y_i in {-1, +1}
struct LogisticFamilySpec {
  std::vector<Vector> features;
  std::vector<double> labels;
  double ridge = 0.0;
};

// Gradient-noise covariance at a point: the average outer product of the
// deviations of component gradients from the full gradient. Symmetric PSD.
struct NoiseCovariance {
  Matrix matrix;

  // Validates symmetry (1e-12 absolute) and the PSD eigenvalue floor
  // (-1e-10); throws on violation.
  static NoiseCovariance checked(Matrix m);
};

// A finite family of differentiable losses with exact component gradients.
// Immutable after construction; all evaluations are const and reentrant.
class FiniteSumProblem {
 public:
  static FiniteSumProblem quadratic(QuadraticFamilySpec spec);
  static FiniteSumProblem logistic(LogisticFamilySpec spec);

  int component_count() const noexcept { return n_; }
  int dimension() const noexcept { return d_; }
  ProblemFamily family() const noexcept { return family_; }
  std::optional<double> known_gradient_lipschitz() const noexcept { return lipschitz_; }

  double component_value(int i, const Vector& x) const;
  double value(const Vector& x) const;

  // Exact analytic gradient of f_i at x; i is 0-based.
  Vector component_gradient(int i, const Vector& x) const;

  // Mean of the component gradients, accumulated in ascending i order.
  Vector full_gradient(const Vector& x) const;

  // (1/n) sum_i (grad f - grad f_i)(grad f - grad f_i)^T, ascending i.
  NoiseCovariance noise_covariance(const Vector& x) const;

  // True when every curvature matrix of a quadratic family is bitwise equal;
  // the covariance is then constant in x.
  bool has_identical_quadratic_curvatures() const;

  // Analytic constant covariance for identical-curvature quadratic families:
  // the empirical covariance of the A c_i. Throws for other problems.
  Matrix constant_noise_covariance() const;

  const QuadraticFamilySpec* quadratic_spec() const noexcept {
    return family_ == ProblemFamily::quadratic ? &quad_ : nullptr;
  }
  const LogisticFamilySpec* logistic_spec() const noexcept {
    return family_ == ProblemFamily::logistic ? &logi_ : nullptr;
  }

 private:
  FiniteSumProblem() = default;

  void check_point(const Vector& x) const;
  void check_index(int i) const;

  ProblemFamily family_ = ProblemFamily::quadratic;
  int n_ = 0;
  int d_ = 0;
  std::optional<double> lipschitz_;
  QuadraticFamilySpec quad_;
  LogisticFamilySpec logi_;
};

// Max over coordinates j of |<theta, D2_j theta>| / |theta|^2 where D2_j is
// the entrywise second central difference of the covariance along e_j with
// step h. Scale-invariant in theta.
double covariance_curvature_bound(const FiniteSumProblem& problem, const Vector& x,
                                  const Vector& theta, double h);

// Default finite-difference step: 1e-3 * (1 + |x|).
double default_curvature_fd_step(const Vector& x);

// Max over components and pairs of |grad f_i(x) - grad f_i(y)| / |x - y|;
// a lower bound on the true Lipschitz constant.
double gradient_lipschitz_estimate(const FiniteSumProblem& problem,
                                   const std::vector<std::pair<Vector, Vector>>& pairs);

// CSV schema: header feature_0,...,feature_{d-1},label; label in {0, 1}
// (mapped to -1/+1); LF or CRLF. Errors carry the 1-based line number.
LogisticFamilySpec load_logistic_dataset(const std::string& path);
void save_logistic_dataset(const LogisticFamilySpec& spec, const std::string& path);

}  // namespace sgdlab
