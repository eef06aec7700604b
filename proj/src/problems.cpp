#include "sgdlab/problems.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sgdlab/errors.hpp"

namespace sgdlab {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double max_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  return es.eigenvalues().maxCoeff();
}

void validate_symmetric_psd(const Matrix& m, int index) {
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol)
    throw std::domain_error("curvature matrix " + std::to_string(index) +
                            " is not symmetric (max asymmetry " +
                            std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kPsdEigenvalueFloor)
    throw std::domain_error("curvature matrix " + std::to_string(index) +
                            " is not PSD (min eigenvalue " +
                            std::to_string(min_eig) + ")");
}

}  // namespace

NoiseCovariance NoiseCovariance::checked(Matrix m) {
  if (m.rows() != m.cols()) throw std::domain_error("covariance must be square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol)
    throw std::domain_error("covariance is not symmetric (max asymmetry " +
                            std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kPsdEigenvalueFloor)
    throw std::domain_error("covariance is not PSD (min eigenvalue " +
                            std::to_string(min_eig) + ")");
  return NoiseCovariance{std::move(m)};
}

FiniteSumProblem FiniteSumProblem::quadratic(QuadraticFamilySpec spec) {
  if (spec.centers.empty()) throw std::domain_error("quadratic family needs n >= 1 centers");
  const int n = static_cast<int>(spec.centers.size());
  const int d = static_cast<int>(spec.centers.front().size());
  if (d < 1) throw std::domain_error("dimension must be >= 1");
  for (const auto& c : spec.centers)
    if (static_cast<int>(c.size()) != d)
      throw std::domain_error("all centers must share one dimension");
  if (spec.curvatures.empty()) {
    spec.curvatures.assign(static_cast<std::size_t>(n), Matrix::Identity(d, d));
  }
  if (static_cast<int>(spec.curvatures.size()) != n)
    throw std::domain_error("need one curvature matrix per center");
  double lipschitz = 0.0;
  for (int i = 0; i < n; ++i) {
    const Matrix& a = spec.curvatures[static_cast<std::size_t>(i)];
    if (a.rows() != d || a.cols() != d)
      throw std::domain_error("curvature matrix " + std::to_string(i) + " must be d x d");
    validate_symmetric_psd(a, i);
    lipschitz = std::max(lipschitz, max_eigenvalue(a));
  }
  FiniteSumProblem p;
  p.family_ = ProblemFamily::quadratic;
  p.n_ = n;
  p.d_ = d;
  p.lipschitz_ = lipschitz;
  p.quad_ = std::move(spec);
  return p;
}

FiniteSumProblem FiniteSumProblem::logistic(LogisticFamilySpec spec) {
  if (spec.features.empty()) throw std::domain_error("logistic family needs n >= 1 rows");
  const int n = static_cast<int>(spec.features.size());
  const int d = static_cast<int>(spec.features.front().size());
  if (d < 1) throw std::domain_error("dimension must be >= 1");
  for (const auto& a : spec.features)
    if (static_cast<int>(a.size()) != d)
      throw std::domain_error("all feature rows must share one dimension");
  if (static_cast<int>(spec.labels.size()) != n)
    throw std::domain_error("need one label per feature row");
  for (double y : spec.labels)
    if (y != -1.0 && y != 1.0)
      throw std::domain_error("labels must be -1 or +1");
  if (!(spec.ridge >= 0.0)) throw std::domain_error("ridge must be >= 0");
  double max_sq = 0.0;
  for (const auto& a : spec.features) max_sq = std::max(max_sq, a.squaredNorm());
  FiniteSumProblem p;
  p.family_ = ProblemFamily::logistic;
  p.n_ = n;
  p.d_ = d;
  p.lipschitz_ = max_sq / 4.0 + spec.ridge;
  p.logi_ = std::move(spec);
  return p;
}

void FiniteSumProblem::check_point(const Vector& x) const {
  if (static_cast<int>(x.size()) != d_)
    throw std::domain_error("point has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(d_));
  if (!x.allFinite()) throw std::domain_error("point must be finite");
}

void FiniteSumProblem::check_index(int i) const {
  if (i < 0 || i >= n_)
    throw std::domain_error("component index " + std::to_string(i) +
                            " out of range [0, " + std::to_string(n_) + ")");
}

double FiniteSumProblem::component_value(int i, const Vector& x) const {
  check_index(i);
  check_point(x);
  if (family_ == ProblemFamily::quadratic) {
    const Vector r = x - quad_.centers[static_cast<std::size_t>(i)];
    return 0.5 * r.dot(quad_.curvatures[static_cast<std::size_t>(i)] * r);
  }
  const double margin = logi_.labels[static_cast<std::size_t>(i)] *
                        logi_.features[static_cast<std::size_t>(i)].dot(x);
  // log(1 + exp(-m)) evaluated without overflow
  const double loss = margin > 0 ? std::log1p(std::exp(-margin))
                                 : -margin + std::log1p(std::exp(margin));
  return loss + 0.5 * logi_.ridge * x.squaredNorm();
}

double FiniteSumProblem::value(const Vector& x) const {
  check_point(x);
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) sum += component_value(i, x);
  return sum / n_;
}

Vector FiniteSumProblem::component_gradient(int i, const Vector& x) const {
  check_index(i);
  check_point(x);
  if (family_ == ProblemFamily::quadratic) {
    return quad_.curvatures[static_cast<std::size_t>(i)] *
           (x - quad_.centers[static_cast<std::size_t>(i)]);
  }
  const double y = logi_.labels[static_cast<std::size_t>(i)];
  const Vector& a = logi_.features[static_cast<std::size_t>(i)];
  Vector g = (-y * sigmoid(-y * a.dot(x))) * a;
  if (logi_.ridge != 0.0) g += logi_.ridge * x;
  return g;
}

Vector FiniteSumProblem::full_gradient(const Vector& x) const {
  check_point(x);
  Vector sum = Vector::Zero(d_);
  for (int i = 0; i < n_; ++i) sum += component_gradient(i, x);
  return sum / n_;
}

NoiseCovariance FiniteSumProblem::noise_covariance(const Vector& x) const {
  check_point(x);
  const Vector g = full_gradient(x);
  Matrix sum = Matrix::Zero(d_, d_);
  for (int i = 0; i < n_; ++i) {
    const Vector dev = g - component_gradient(i, x);
    sum.noalias() += dev * dev.transpose();
  }
  return NoiseCovariance{sum / n_};
}

bool FiniteSumProblem::has_identical_quadratic_curvatures() const {
  if (family_ != ProblemFamily::quadratic) return false;
  const Matrix& first = quad_.curvatures.front();
  for (const Matrix& a : quad_.curvatures)
    if ((a.array() != first.array()).any()) return false;
  return true;
}

Matrix FiniteSumProblem::constant_noise_covariance() const {
  if (!has_identical_quadratic_curvatures())
    throw std::domain_error(
        "constant covariance requires a quadratic family with identical curvatures");
  const Matrix& a = quad_.curvatures.front();
  Vector mean_center = Vector::Zero(d_);
  for (const Vector& c : quad_.centers) mean_center += c;
  mean_center /= n_;
  Matrix sum = Matrix::Zero(d_, d_);
  for (const Vector& c : quad_.centers) {
    const Vector dev = a * (c - mean_center);
    sum.noalias() += dev * dev.transpose();
  }
  return sum / n_;
}

double covariance_curvature_bound(const FiniteSumProblem& problem, const Vector& x,
                                  const Vector& theta, double h) {
  if (!(h > 0.0)) throw std::domain_error("finite-difference step h must be > 0");
  const double theta_sq = theta.squaredNorm();
  if (!(theta_sq > 0.0)) throw std::domain_error("direction theta must be nonzero");
  const int d = problem.dimension();
  const Matrix center = problem.noise_covariance(x).matrix;
  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    Vector xp = x;
    Vector xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Matrix second_diff =
        (problem.noise_covariance(xp).matrix - 2.0 * center +
         problem.noise_covariance(xm).matrix) /
        (h * h);
    worst = std::max(worst, std::abs(theta.dot(second_diff * theta)) / theta_sq);
  }
  return worst;
}

double default_curvature_fd_step(const Vector& x) { return 1e-3 * (1.0 + x.norm()); }

double gradient_lipschitz_estimate(const FiniteSumProblem& problem,
                                   const std::vector<std::pair<Vector, Vector>>& pairs) {
  if (pairs.empty()) throw std::domain_error("need at least one point pair");
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const double dist = (x - y).norm();
    if (!(dist > 0.0)) throw std::domain_error("point pairs must be distinct");
    for (int i = 0; i < problem.component_count(); ++i) {
      const double num =
          (problem.component_gradient(i, x) - problem.component_gradient(i, y)).norm();
      worst = std::max(worst, num / dist);
    }
  }
  return worst;
}

namespace {

double parse_field(const std::string& field, long line) {
  double out = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc{} || res.ptr != end)
    throw IngestError(line, "line " + std::to_string(line) + ": cannot parse '" +
                                field + "' as a number");
  return out;
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

LogisticFamilySpec load_logistic_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw IngestError(0, "cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError(1, "line 1: missing header");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "label")
    throw IngestError(1, "line 1: header must be feature_0,...,label");
  const int d = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < d; ++j) {
    if (header[static_cast<std::size_t>(j)] != "feature_" + std::to_string(j))
      throw IngestError(1, "line 1: expected column feature_" + std::to_string(j) +
                               ", got '" + header[static_cast<std::size_t>(j)] + "'");
  }
  LogisticFamilySpec spec;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;  // ignore trailing blank line
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != d + 1)
      throw IngestError(line_no, "line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(d + 1) + " fields, got " +
                                     std::to_string(fields.size()));
    Vector a(d);
    for (int j = 0; j < d; ++j)
      a[j] = parse_field(fields[static_cast<std::size_t>(j)], line_no);
    const double raw = parse_field(fields.back(), line_no);
    if (raw != 0.0 && raw != 1.0)
      throw IngestError(line_no, "line " + std::to_string(line_no) +
                                     ": label must be 0 or 1, got " + fields.back());
    spec.features.push_back(std::move(a));
    spec.labels.push_back(raw == 0.0 ? -1.0 : 1.0);
  }
  if (spec.features.empty()) throw IngestError(line_no, "dataset has no data rows");
  return spec;
}

void save_logistic_dataset(const LogisticFamilySpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw IngestError(0, "cannot open file for writing: " + path);
  const int d = spec.features.empty() ? 0 : static_cast<int>(spec.features.front().size());
  for (int j = 0; j < d; ++j) out << "feature_" << j << ",";
  out << "label\n";
  char buf[64];
  for (std::size_t i = 0; i < spec.features.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", spec.features[i][j]);
      out << buf << ",";
    }
    out << (spec.labels[i] < 0 ? "0" : "1") << "\n";
  }
}

}  // namespace sgdlab
