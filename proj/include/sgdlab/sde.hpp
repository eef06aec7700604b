#pragma once

#include <cstdint>

#include "sgdlab/problems.hpp"
#include "sgdlab/processes.hpp"
#include "sgdlab/psd_sqrt.hpp"

namespace sgdlab {

// dX = -grad f(X) dt + (eta_bar * Sigma(X))^{1/2} dB, Euler-Maruyama.
struct SdeSpec {
  FiniteSumProblem problem;
  double eta_bar = 0.04;
  double dt = 1e-3;

  // Opt-in: reuse one covariance root for quadratic families with identical
  // curvature matrices (Sigma constant in x). Off by default; the default
  // path re-evaluates and re-roots Sigma every step.
  bool cache_constant_sigma_root = false;

  void validate() const;
};

// Shared diffusion step body:
//   x' = x - step * grad f(x) + sqrt(step) * sqrt(eta_bar) * root(Sigma(x)) * z.
// gaussian_sgd_step and euler_maruyama_step both route here, so the two are
// bitwise identical for equal draws. cached_root, when non-null, replaces
// the per-step psd_sqrt(Sigma(x)).
IterateState diffusion_step_with_draw(const FiniteSumProblem& problem,
                                      const IterateState& state, double step, double eta_bar,
                                      const Vector& z, const Matrix* cached_root);

// One Euler-Maruyama step of size spec.dt with a fresh Gaussian draw.
IterateState euler_maruyama_step(const SdeSpec& spec, const IterateState& state,
                                 Philox4x32& rng);

// Integrates the SDE to horizon_time with round(T/dt) steps (the realized
// horizon steps*dt is the final recorded t). Deterministic given seed.
Trajectory solve_sde(const SdeSpec& spec, const Vector& x0, double horizon_time,
                     std::int64_t stride, std::uint64_t seed);

}  // namespace sgdlab
