#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sgdlab/problems.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {

struct IterateState {
  Vector x;
  std::int64_t k = 0;
  double t = 0.0;  // always recomputed as k * step, never accumulated
};

enum class ProcessKind { plain_sgd, frozen_noise_sgd, gaussian_sgd, euler_maruyama };

const char* process_kind_name(ProcessKind kind);

struct StepperSpec {
  ProcessKind kind = ProcessKind::plain_sgd;
  double eta = 0.1;
  double eta_bar = 0.0;  // ignored by plain_sgd

  // eta in (0, 1]; eta_bar in (0, 1] for kinds that use it.
  void validate() const;
};

struct Trajectory {
  std::vector<IterateState> states;  // strictly increasing k, first is k = 0
  double eta = 0.0;
  double eta_bar = 0.0;
  ProcessKind kind = ProcessKind::plain_sgd;
  std::int64_t stride = 1;
  std::uint64_t seed = 0;
};

// Deterministic step bodies with the randomness passed in explicitly.
// The rng-driven steppers below delegate to these, so enumeration oracles
// and the live processes share one code path.
IterateState sgd_step_with_index(const FiniteSumProblem& problem, const IterateState& state,
                                 double eta, int gamma);
IterateState frozen_noise_step_with_index(const FiniteSumProblem& problem,
                                          const IterateState& state, double eta,
                                          double eta_bar, int gamma);
IterateState gaussian_step_with_draw(const FiniteSumProblem& problem,
                                     const IterateState& state, double eta, double eta_bar,
                                     const Vector& z);

// x' = x - eta * grad f_gamma(x), gamma uniform on the components.
IterateState plain_sgd_step(const FiniteSumProblem& problem, const IterateState& state,
                            double eta, Philox4x32& rng);

// x' = x - eta * grad f(x) + sqrt(eta) * sqrt(eta_bar) * (grad f - grad f_gamma).
IterateState frozen_noise_sgd_step(const FiniteSumProblem& problem, const IterateState& state,
                                   double eta, double eta_bar, Philox4x32& rng);

// x' = x - eta * grad f(x) + sqrt(eta) * (eta_bar * Sigma(x))^{1/2} z.
IterateState gaussian_sgd_step(const FiniteSumProblem& problem, const IterateState& state,
                               double eta, double eta_bar, Philox4x32& rng);

// Applies the stepper horizon_steps times from x0, recording every stride-th
// state plus the initial and final states. Identical (spec, x0, seed) give
// bitwise-identical trajectories. Throws DivergenceError when an iterate
// goes non-finite or |x| exceeds 1e12.
Trajectory simulate(const FiniteSumProblem& problem, const StepperSpec& spec, const Vector& x0,
                    std::int64_t horizon_steps, std::int64_t stride, std::uint64_t seed);

// Piecewise-constant embedding X_t = x_k for t in [k*eta, (k+1)*eta).
// Requires stride 1 and 0 <= t <= (last k)*eta.
Vector embed_continuous(const Trajectory& traj, double t);

// Columns k,t,x_0,...,x_{d-1}; 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace sgdlab
