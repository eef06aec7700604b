#include "sgdlab/processes.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sgdlab/errors.hpp"
#include "sgdlab/sde.hpp"

namespace sgdlab {

namespace {

constexpr double kDivergenceNormGuard = 1e12;

void check_iterate(const Vector& x, std::int64_t step) {
  if (!x.allFinite() || x.norm() > kDivergenceNormGuard)
    throw DivergenceError(step, "iterate diverged at step " + std::to_string(step));
}

}  // namespace

const char* process_kind_name(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::plain_sgd: return "plain_sgd";
    case ProcessKind::frozen_noise_sgd: return "frozen_noise_sgd";
    case ProcessKind::gaussian_sgd: return "gaussian_sgd";
    case ProcessKind::euler_maruyama: return "euler_maruyama";
  }
  return "unknown";
}

void StepperSpec::validate() const {
  if (!(eta > 0.0) || eta > 1.0)
    throw std::domain_error("stepper eta must be in (0, 1]");
  if (kind != ProcessKind::plain_sgd) {
    if (!(eta_bar > 0.0) || eta_bar > 1.0)
      throw std::domain_error("stepper eta_bar must be in (0, 1]");
  }
  if (kind == ProcessKind::euler_maruyama)
    throw std::domain_error("euler_maruyama is driven by solve_sde, not simulate");
}

IterateState sgd_step_with_index(const FiniteSumProblem& problem, const IterateState& state,
                                 double eta, int gamma) {
  if (!(eta > 0.0)) throw std::domain_error("eta must be > 0");
  const std::int64_t k = state.k + 1;
  return IterateState{state.x - eta * problem.component_gradient(gamma, state.x), k,
                      static_cast<double>(k) * eta};
}

IterateState frozen_noise_step_with_index(const FiniteSumProblem& problem,
                                          const IterateState& state, double eta,
                                          double eta_bar, int gamma) {
  if (!(eta > 0.0)) throw std::domain_error("eta must be > 0");
  if (!(eta_bar > 0.0)) throw std::domain_error("eta_bar must be > 0");
  const Vector g = problem.full_gradient(state.x);
  const Vector noise = g - problem.component_gradient(gamma, state.x);
  const std::int64_t k = state.k + 1;
  return IterateState{state.x - eta * g + (std::sqrt(eta) * std::sqrt(eta_bar)) * noise, k,
                      static_cast<double>(k) * eta};
}

IterateState gaussian_step_with_draw(const FiniteSumProblem& problem,
                                     const IterateState& state, double eta, double eta_bar,
                                     const Vector& z) {
  return diffusion_step_with_draw(problem, state, eta, eta_bar, z, nullptr);
}

IterateState plain_sgd_step(const FiniteSumProblem& problem, const IterateState& state,
                            double eta, Philox4x32& rng) {
  const int gamma = static_cast<int>(
      rng.uniform_index(static_cast<std::uint64_t>(problem.component_count())));
  return sgd_step_with_index(problem, state, eta, gamma);
}

IterateState frozen_noise_sgd_step(const FiniteSumProblem& problem, const IterateState& state,
                                   double eta, double eta_bar, Philox4x32& rng) {
  const int gamma = static_cast<int>(
      rng.uniform_index(static_cast<std::uint64_t>(problem.component_count())));
  return frozen_noise_step_with_index(problem, state, eta, eta_bar, gamma);
}

IterateState gaussian_sgd_step(const FiniteSumProblem& problem, const IterateState& state,
                               double eta, double eta_bar, Philox4x32& rng) {
  Vector z(problem.dimension());
  rng.fill_gaussian(z);
  return gaussian_step_with_draw(problem, state, eta, eta_bar, z);
}

Trajectory simulate(const FiniteSumProblem& problem, const StepperSpec& spec, const Vector& x0,
                    std::int64_t horizon_steps, std::int64_t stride, std::uint64_t seed) {
  spec.validate();
  if (horizon_steps < 0) throw std::domain_error("horizon_steps must be >= 0");
  if (stride < 1) throw std::domain_error("stride must be >= 1");
  if (static_cast<int>(x0.size()) != problem.dimension())
    throw std::domain_error("x0 dimension mismatch");

  Philox4x32 rng(seed);
  Trajectory traj;
  traj.eta = spec.eta;
  traj.eta_bar = spec.kind == ProcessKind::plain_sgd ? 0.0 : spec.eta_bar;
  traj.kind = spec.kind;
  traj.stride = stride;
  traj.seed = seed;

  IterateState state{x0, 0, 0.0};
  check_iterate(state.x, 0);
  traj.states.push_back(state);
  for (std::int64_t k = 1; k <= horizon_steps; ++k) {
    switch (spec.kind) {
      case ProcessKind::plain_sgd:
        state = plain_sgd_step(problem, state, spec.eta, rng);
        break;
      case ProcessKind::frozen_noise_sgd:
        state = frozen_noise_sgd_step(problem, state, spec.eta, spec.eta_bar, rng);
        break;
      case ProcessKind::gaussian_sgd:
        state = gaussian_sgd_step(problem, state, spec.eta, spec.eta_bar, rng);
        break;
      case ProcessKind::euler_maruyama:
        throw std::domain_error("euler_maruyama is driven by solve_sde");
    }
    check_iterate(state.x, k);
    if (k % stride == 0 || k == horizon_steps) traj.states.push_back(state);
  }
  return traj;
}

Vector embed_continuous(const Trajectory& traj, double t) {
  if (traj.states.empty()) throw std::domain_error("trajectory is empty");
  if (traj.stride != 1)
    throw std::domain_error("embedding requires a trajectory recorded with stride 1");
  if (!(t >= 0.0)) throw std::out_of_range("time must be >= 0");
  const double eta = traj.eta;
  const std::int64_t last_k = traj.states.back().k;
  if (t > static_cast<double>(last_k) * eta)
    throw std::out_of_range("time beyond trajectory horizon");
  // Largest k with k * eta <= t; the floor is nudged to honor the
  // left-closed interval convention at representable boundaries.
  std::int64_t k = static_cast<std::int64_t>(std::floor(t / eta));
  while (k + 1 <= last_k && static_cast<double>(k + 1) * eta <= t) ++k;
  while (k > 0 && static_cast<double>(k) * eta > t) --k;
  return traj.states[static_cast<std::size_t>(k)].x;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  const int d = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().x.size());
  out << "k,t";
  for (int j = 0; j < d; ++j) out << ",x_" << j;
  out << "\n";
  char buf[64];
  for (const IterateState& s : traj.states) {
    out << s.k;
    std::snprintf(buf, sizeof(buf), "%.17g", s.t);
    out << "," << buf;
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.x[j]);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace sgdlab
