#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgdlab/diagnostics.hpp"
#include "sgdlab/montecarlo.hpp"
#include "sgdlab/problems.hpp"
#include "sgdlab/processes.hpp"
#include "sgdlab/psd_sqrt.hpp"
#include "sgdlab/sde.hpp"

namespace py = pybind11;
using namespace sgdlab;

namespace {

Matrix stack_states(const Trajectory& traj) {
  const int d = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().x.size());
  Matrix out(static_cast<int>(traj.states.size()), d);
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    out.row(static_cast<int>(i)) = traj.states[i].x.transpose();
  return out;
}

std::vector<Vector> rows_to_vectors(const Matrix& m) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) out.push_back(m.row(i).transpose());
  return out;
}

Matrix vectors_to_rows(const std::vector<Vector>& vs) {
  const int d = vs.empty() ? 0 : static_cast<int>(vs.front().size());
  Matrix out(static_cast<int>(vs.size()), d);
  for (std::size_t i = 0; i < vs.size(); ++i) out.row(static_cast<int>(i)) = vs[i].transpose();
  return out;
}

Matrix terminal_ensemble(const FiniteSumProblem& problem, const StepperSpec& spec,
                         const Vector& x0, std::int64_t horizon_steps, std::int64_t count,
                         std::uint64_t master_seed) {
  const auto generator = [&](std::uint64_t seed) {
    return simulate(problem, spec, x0, horizon_steps,
                    std::max<std::int64_t>(horizon_steps, 1), seed)
        .states.back()
        .x;
  };
  return vectors_to_rows(run_ensemble(generator, count, SeedSpec{master_seed}).values);
}

Matrix sde_terminal_ensemble(const FiniteSumProblem& problem, double eta_bar, double dt,
                             const Vector& x0, double horizon_time, std::int64_t count,
                             std::uint64_t master_seed) {
  SdeSpec spec{problem, eta_bar, dt};
  const std::int64_t steps = static_cast<std::int64_t>(std::llround(horizon_time / dt));
  const auto generator = [&](std::uint64_t seed) {
    return solve_sde(spec, x0, horizon_time, std::max<std::int64_t>(steps, 1), seed)
        .states.back()
        .x;
  };
  return vectors_to_rows(run_ensemble(generator, count, SeedSpec{master_seed}).values);
}

}  // namespace

PYBIND11_MODULE(_sgdlab, m) {
  m.doc() = "Finite-sum SGD processes, their diffusion limit, and convergence diagnostics";

  py::class_<FiniteSumProblem>(m, "FiniteSumProblem")
      .def_static(
          "quadratic",
          [](const std::vector<Vector>& centers, const std::vector<Matrix>& curvatures) {
            return FiniteSumProblem::quadratic({centers, curvatures});
          },
          py::arg("centers"), py::arg("curvatures") = std::vector<Matrix>{})
      .def_static(
          "logistic",
          [](const std::vector<Vector>& features, const std::vector<double>& labels,
             double ridge) {
            return FiniteSumProblem::logistic({features, labels, ridge});
          },
          py::arg("features"), py::arg("labels"), py::arg("ridge") = 0.0)
      .def_property_readonly("n", &FiniteSumProblem::component_count)
      .def_property_readonly("d", &FiniteSumProblem::dimension)
      .def_property_readonly("known_gradient_lipschitz",
                             [](const FiniteSumProblem& p) {
                               return p.known_gradient_lipschitz();
                             })
      .def("component_gradient", &FiniteSumProblem::component_gradient, py::arg("i"),
           py::arg("x"))
      .def("full_gradient", &FiniteSumProblem::full_gradient, py::arg("x"))
      .def(
          "noise_covariance",
          [](const FiniteSumProblem& p, const Vector& x) {
            return p.noise_covariance(x).matrix;
          },
          py::arg("x"))
      .def("value", &FiniteSumProblem::value, py::arg("x"))
      .def("component_value", &FiniteSumProblem::component_value, py::arg("i"), py::arg("x"));

  m.def(
      "load_logistic_problem",
      [](const std::string& path, double ridge) {
        LogisticFamilySpec spec = load_logistic_dataset(path);
        spec.ridge = ridge;
        return FiniteSumProblem::logistic(std::move(spec));
      },
      py::arg("path"), py::arg("ridge") = 0.0);

  m.def("covariance_curvature_bound", &covariance_curvature_bound, py::arg("problem"),
        py::arg("x"), py::arg("theta"), py::arg("h"));
  m.def("default_curvature_fd_step", &default_curvature_fd_step, py::arg("x"));
  m.def("gradient_lipschitz_estimate", &gradient_lipschitz_estimate, py::arg("problem"),
        py::arg("pairs"));

  py::class_<PsdSqrtResult>(m, "PsdSqrtResult")
      .def_readonly("root", &PsdSqrtResult::root)
      .def_readonly("clipped_count", &PsdSqrtResult::clipped_count)
      .def_readonly("min_eigenvalue_seen", &PsdSqrtResult::min_eigenvalue_seen);
  m.def("psd_sqrt", &psd_sqrt, py::arg("S"), py::arg("clip_tol") = kDefaultClipTol);

  py::enum_<ProcessKind>(m, "ProcessKind")
      .value("plain_sgd", ProcessKind::plain_sgd)
      .value("frozen_noise_sgd", ProcessKind::frozen_noise_sgd)
      .value("gaussian_sgd", ProcessKind::gaussian_sgd)
      .value("euler_maruyama", ProcessKind::euler_maruyama);

  py::class_<StepperSpec>(m, "StepperSpec")
      .def(py::init([](ProcessKind kind, double eta, double eta_bar) {
             StepperSpec s{kind, eta, eta_bar};
             s.validate();
             return s;
           }),
           py::arg("kind"), py::arg("eta"), py::arg("eta_bar") = 0.04)
      .def_readonly("kind", &StepperSpec::kind)
      .def_readonly("eta", &StepperSpec::eta)
      .def_readonly("eta_bar", &StepperSpec::eta_bar);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("ks",
                             [](const Trajectory& t) {
                               std::vector<std::int64_t> ks;
                               ks.reserve(t.states.size());
                               for (const auto& s : t.states) ks.push_back(s.k);
                               return ks;
                             })
      .def_property_readonly("times",
                             [](const Trajectory& t) {
                               std::vector<double> ts;
                               ts.reserve(t.states.size());
                               for (const auto& s : t.states) ts.push_back(s.t);
                               return ts;
                             })
      .def_property_readonly("points", &stack_states)
      .def_readonly("eta", &Trajectory::eta)
      .def_readonly("eta_bar", &Trajectory::eta_bar)
      .def_readonly("seed", &Trajectory::seed)
      .def("embed", &embed_continuous, py::arg("t"));

  m.def("simulate", &simulate, py::arg("problem"), py::arg("stepper"), py::arg("x0"),
        py::arg("horizon_steps"), py::arg("stride") = 1, py::arg("seed") = 0);
  m.def(
      "solve_sde",
      [](const FiniteSumProblem& problem, double eta_bar, double dt, const Vector& x0,
         double horizon_time, std::int64_t stride, std::uint64_t seed,
         bool cache_constant_sigma_root) {
        SdeSpec spec{problem, eta_bar, dt, cache_constant_sigma_root};
        return solve_sde(spec, x0, horizon_time, stride, seed);
      },
      py::arg("problem"), py::arg("eta_bar"), py::arg("dt"), py::arg("x0"),
      py::arg("horizon_time"), py::arg("stride") = 1, py::arg("seed") = 0,
      py::arg("cache_constant_sigma_root") = false);

  m.def("replicate_seed", &replicate_seed, py::arg("master_seed"), py::arg("replicate"));
  m.def("sgd_terminal_ensemble", &terminal_ensemble, py::arg("problem"), py::arg("stepper"),
        py::arg("x0"), py::arg("horizon_steps"), py::arg("replicates"),
        py::arg("master_seed"));
  m.def("sde_terminal_ensemble", &sde_terminal_ensemble, py::arg("problem"),
        py::arg("eta_bar"), py::arg("dt"), py::arg("x0"), py::arg("horizon_time"),
        py::arg("replicates"), py::arg("master_seed"));

  m.def(
      "energy_distance",
      [](const Matrix& a, const Matrix& b) {
        return energy_distance(rows_to_vectors(a), rows_to_vectors(b));
      },
      py::arg("a"), py::arg("b"));
  m.def("ks_statistic_1d", &ks_statistic_1d, py::arg("a"), py::arg("b"));

  py::class_<FrozenStepMoments>(m, "FrozenStepMoments")
      .def_readonly("mean", &FrozenStepMoments::mean)
      .def_readonly("second_moment", &FrozenStepMoments::second_moment);
  m.def("enumerate_frozen_step_moments", &enumerate_frozen_step_moments, py::arg("problem"),
        py::arg("x"), py::arg("eta"), py::arg("eta_bar"));

  py::class_<EstimateWithCi>(m, "EstimateWithCi")
      .def_readonly("mean", &EstimateWithCi::mean)
      .def_readonly("halfwidth", &EstimateWithCi::halfwidth)
      .def_readonly("sample_count", &EstimateWithCi::sample_count);
  m.def(
      "empirical_drift",
      [](const FiniteSumProblem& problem, const Vector& x, double eta, double eta_bar,
         std::int64_t replicates, std::uint64_t master_seed) {
        return empirical_drift(problem, x, eta, eta_bar, replicates, SeedSpec{master_seed});
      },
      py::arg("problem"), py::arg("x"), py::arg("eta"), py::arg("eta_bar"),
      py::arg("replicates"), py::arg("master_seed") = 0);

  py::class_<MatrixEstimateWithCi>(m, "MatrixEstimateWithCi")
      .def_readonly("mean", &MatrixEstimateWithCi::mean)
      .def_readonly("halfwidth", &MatrixEstimateWithCi::halfwidth)
      .def_readonly("sample_count", &MatrixEstimateWithCi::sample_count);
  m.def(
      "empirical_diffusion",
      [](const FiniteSumProblem& problem, const Vector& x, double eta, double eta_bar,
         std::int64_t replicates, std::uint64_t master_seed) {
        return empirical_diffusion(problem, x, eta, eta_bar, replicates,
                                   SeedSpec{master_seed});
      },
      py::arg("problem"), py::arg("x"), py::arg("eta"), py::arg("eta_bar"),
      py::arg("replicates"), py::arg("master_seed") = 0);

  py::class_<MomentCheck>(m, "MomentCheck")
      .def_readonly("eta_grid", &MomentCheck::eta_grid)
      .def_readonly("per_coordinate", &MomentCheck::per_coordinate)
      .def_readonly("worst", &MomentCheck::worst)
      .def_readonly("fitted_slope", &MomentCheck::fitted_slope)
      .def_readonly("delta", &MomentCheck::delta)
      .def_readonly("exact_enumeration", &MomentCheck::exact_enumeration);
  m.def(
      "moment_2plusdelta",
      [](const FiniteSumProblem& problem, const Vector& x, const std::vector<double>& grid,
         double eta_bar, double delta, std::int64_t replicates, std::uint64_t master_seed) {
        return moment_2plusdelta(problem, x, grid, eta_bar, delta, replicates,
                                 SeedSpec{master_seed});
      },
      py::arg("problem"), py::arg("x"), py::arg("eta_grid"), py::arg("eta_bar"),
      py::arg("delta") = 1.0, py::arg("replicates") = 10000, py::arg("master_seed") = 0);

  py::enum_<TestFunctionKind>(m, "TestFunctionKind")
      .value("identity", TestFunctionKind::identity)
      .value("square", TestFunctionKind::square)
      .value("constant", TestFunctionKind::constant);

  py::class_<WeakErrorReport>(m, "WeakErrorReport")
      .def_readonly("eta_bar_grid", &WeakErrorReport::eta_bar_grid)
      .def_readonly("errors", &WeakErrorReport::errors)
      .def_readonly("ci_halfwidths", &WeakErrorReport::ci_halfwidths)
      .def_readonly("fitted_slope", &WeakErrorReport::fitted_slope)
      .def_readonly("fitted_log_intercept", &WeakErrorReport::fitted_log_intercept)
      .def_readonly("inconclusive", &WeakErrorReport::inconclusive);
  m.def(
      "weak_error_curve",
      [](const FiniteSumProblem& problem, TestFunctionKind g, const Vector& x0,
         double horizon_time, const std::vector<double>& eta_bar_grid, double sde_dt,
         std::int64_t replicates, bool sgd_closed_form, bool sde_closed_form,
         std::uint64_t master_seed) {
        WeakErrorOptions opt;
        opt.g = g;
        opt.x0 = x0;
        opt.horizon_time = horizon_time;
        opt.eta_bar_grid = eta_bar_grid;
        opt.sde_dt = sde_dt;
        opt.replicates = replicates;
        opt.sgd_closed_form = sgd_closed_form;
        opt.sde_closed_form = sde_closed_form;
        return weak_error_curve(problem, opt, SeedSpec{master_seed});
      },
      py::arg("problem"), py::arg("g"), py::arg("x0"), py::arg("horizon_time"),
      py::arg("eta_bar_grid"), py::arg("sde_dt") = 1e-3, py::arg("replicates") = 10000,
      py::arg("sgd_closed_form") = false, py::arg("sde_closed_form") = true,
      py::arg("master_seed") = 0);

  py::class_<DistributionalReport>(m, "DistributionalReport")
      .def_readonly("eta_grid", &DistributionalReport::eta_grid)
      .def_readonly("energy_distances", &DistributionalReport::energy_distances)
      .def_readonly("ks_max", &DistributionalReport::ks_max)
      .def_readonly("floor", &DistributionalReport::floor)
      .def_readonly("replicates", &DistributionalReport::replicates)
      .def_readonly("passed", &DistributionalReport::pass);
  m.def(
      "distributional_convergence",
      [](const FiniteSumProblem& problem, const Vector& x0, double time,
         const std::vector<double>& eta_grid, double eta_bar, double sde_dt,
         std::int64_t replicates, std::uint64_t master_seed) {
        DistributionalOptions opt;
        opt.x0 = x0;
        opt.time = time;
        opt.eta_grid = eta_grid;
        opt.eta_bar = eta_bar;
        opt.sde_dt = sde_dt;
        opt.replicates = replicates;
        return distributional_convergence(problem, opt, SeedSpec{master_seed});
      },
      py::arg("problem"), py::arg("x0"), py::arg("time"), py::arg("eta_grid"),
      py::arg("eta_bar"), py::arg("sde_dt") = 1e-3, py::arg("replicates") = 10000,
      py::arg("master_seed") = 0);

  py::class_<CurvatureBoundReport>(m, "CurvatureBoundReport")
      .def_readonly("lambda0_estimate", &CurvatureBoundReport::lambda0_estimate)
      .def_readonly("grid_description", &CurvatureBoundReport::grid_description);
  py::class_<HypothesisCertificate>(m, "HypothesisCertificate")
      .def_readonly("curvature", &HypothesisCertificate::curvature)
      .def_readonly("lipschitz_estimate", &HypothesisCertificate::lipschitz_estimate);
  m.def(
      "certify_hypotheses",
      [](const FiniteSumProblem& problem, double radius, int points_per_axis, double h) {
        const CertifyGrids grids =
            default_certify_grids(problem.dimension(), radius, points_per_axis);
        return certify_hypotheses(problem, grids, h);
      },
      py::arg("problem"), py::arg("radius") = 2.0, py::arg("points_per_axis") = 5,
      py::arg("h") = 1e-3);
}
