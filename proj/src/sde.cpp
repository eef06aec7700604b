#include "sgdlab/sde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sgdlab/errors.hpp"

namespace sgdlab {

namespace {

constexpr double kDivergenceNormGuard = 1e12;

}  // namespace

void SdeSpec::validate() const {
  if (!(dt > 0.0) || dt > 0.1) throw std::domain_error("sde dt must be in (0, 0.1]");
  if (!(eta_bar > 0.0)) throw std::domain_error("sde eta_bar must be > 0");
  if (cache_constant_sigma_root && !problem.has_identical_quadratic_curvatures())
    throw std::domain_error(
        "cache_constant_sigma_root requires a quadratic family with identical curvatures");
}

IterateState diffusion_step_with_draw(const FiniteSumProblem& problem,
                                      const IterateState& state, double step, double eta_bar,
                                      const Vector& z, const Matrix* cached_root) {
  if (!(step > 0.0)) throw std::domain_error("step must be > 0");
  if (!(eta_bar > 0.0)) throw std::domain_error("eta_bar must be > 0");
  if (z.size() != state.x.size()) throw std::domain_error("draw dimension mismatch");
  const Vector g = problem.full_gradient(state.x);
  Vector noise;
  if (cached_root != nullptr) {
    noise = *cached_root * z;
  } else {
    noise = psd_sqrt(problem.noise_covariance(state.x).matrix).root * z;
  }
  const double scale = std::sqrt(eta_bar) * std::sqrt(step);
  const std::int64_t k = state.k + 1;
  return IterateState{state.x - step * g + scale * noise, k,
                      static_cast<double>(k) * step};
}

IterateState euler_maruyama_step(const SdeSpec& spec, const IterateState& state,
                                 Philox4x32& rng) {
  spec.validate();
  Vector z(spec.problem.dimension());
  rng.fill_gaussian(z);
  return diffusion_step_with_draw(spec.problem, state, spec.dt, spec.eta_bar, z, nullptr);
}

Trajectory solve_sde(const SdeSpec& spec, const Vector& x0, double horizon_time,
                     std::int64_t stride, std::uint64_t seed) {
  spec.validate();
  if (!(horizon_time >= 0.0)) throw std::domain_error("horizon_time must be >= 0");
  if (stride < 1) throw std::domain_error("stride must be >= 1");
  if (static_cast<int>(x0.size()) != spec.problem.dimension())
    throw std::domain_error("x0 dimension mismatch");

  const std::int64_t steps = static_cast<std::int64_t>(std::llround(horizon_time / spec.dt));

  Matrix cached_root;
  const Matrix* root_ptr = nullptr;
  if (spec.cache_constant_sigma_root) {
    cached_root = psd_sqrt(spec.problem.constant_noise_covariance()).root;
    root_ptr = &cached_root;
  }

  Philox4x32 rng(seed);
  Trajectory traj;
  traj.eta = spec.dt;
  traj.eta_bar = spec.eta_bar;
  traj.kind = ProcessKind::euler_maruyama;
  traj.stride = stride;
  traj.seed = seed;

  IterateState state{x0, 0, 0.0};
  traj.states.push_back(state);
  Vector z(spec.problem.dimension());
  for (std::int64_t k = 1; k <= steps; ++k) {
    rng.fill_gaussian(z);
    state = diffusion_step_with_draw(spec.problem, state, spec.dt, spec.eta_bar, z, root_ptr);
    if (!state.x.allFinite() || state.x.norm() > kDivergenceNormGuard)
      throw DivergenceError(k, "SDE path diverged at step " + std::to_string(k));
    if (k % stride == 0 || k == steps) traj.states.push_back(state);
  }
  return traj;
}

}  // namespace sgdlab
