#pragma once

#include "sgdlab/problems.hpp"

namespace sgdlab {

inline constexpr double kDefaultClipTol = 1e-10;

struct PsdSqrtResult {
  Matrix root;                     // unique symmetric PSD square root
  int clipped_count = 0;           // eigenvalues in [-clip_tol, 0) clipped to 0
  double min_eigenvalue_seen = 0;  // before clipping
};

// Symmetric PSD square root via eigendecomposition S = Q L Q^T, negative
// eigenvalues within clip_tol of zero clipped. Throws NotPsdError when an
// eigenvalue is below -clip_tol, std::domain_error when S is asymmetric
// beyond 1e-10.
PsdSqrtResult psd_sqrt(const Matrix& s, double clip_tol = kDefaultClipTol);

}  // namespace sgdlab
