#include "sgdlab/psd_sqrt.hpp"

#include <stdexcept>
#include <string>

#include "sgdlab/errors.hpp"

namespace sgdlab {

PsdSqrtResult psd_sqrt(const Matrix& s, double clip_tol) {
  if (s.rows() != s.cols()) throw std::domain_error("psd_sqrt: matrix must be square");
  if (s.rows() == 0) throw std::domain_error("psd_sqrt: matrix must be nonempty");
  if (!(clip_tol >= 0.0)) throw std::domain_error("psd_sqrt: clip_tol must be >= 0");
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw std::domain_error("psd_sqrt: matrix asymmetry " + std::to_string(asym) +
                            " exceeds tolerance 1e-10");

  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");

  Eigen::VectorXd lambda = es.eigenvalues();
  PsdSqrtResult result;
  result.min_eigenvalue_seen = lambda.minCoeff();
  if (result.min_eigenvalue_seen < -clip_tol)
    throw NotPsdError(result.min_eigenvalue_seen,
                      "psd_sqrt: eigenvalue " + std::to_string(result.min_eigenvalue_seen) +
                          " below -clip_tol = " + std::to_string(-clip_tol));
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < 0.0) {
      lambda[i] = 0.0;
      ++result.clipped_count;
    }
  }
  const Matrix m =
      es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  result.root = 0.5 * (m + m.transpose());  // enforce exact symmetry
  return result;
}

}  // namespace sgdlab
