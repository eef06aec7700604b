#include "sgdlab/csv.hpp"

#include <cstdio>
#include <ostream>

namespace sgdlab {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_sigma_csv(const Matrix& sigma, std::ostream& out) {
  for (int i = 0; i < sigma.rows(); ++i) {
    for (int j = 0; j < sigma.cols(); ++j) {
      if (j > 0) out << ",";
      out << format_double(sigma(i, j));
    }
    out << "\n";
  }
}

void write_weak_error_csv(const WeakErrorReport& report, std::ostream& out) {
  out << "eta_bar,error,ci_halfwidth\n";
  for (std::size_t i = 0; i < report.eta_bar_grid.size(); ++i) {
    out << format_double(report.eta_bar_grid[i]) << "," << format_double(report.errors[i])
        << "," << format_double(report.ci_halfwidths[i]) << "\n";
  }
}

void write_weak_error_summary_csv(const WeakErrorReport& report, bool pass,
                                  std::ostream& out) {
  out << "fitted_slope,fitted_log_intercept,inconclusive,pass\n";
  out << format_double(report.fitted_slope) << ","
      << format_double(report.fitted_log_intercept) << ","
      << (report.inconclusive ? 1 : 0) << "," << (pass ? 1 : 0) << "\n";
}

void write_distributional_csv(const DistributionalReport& report, std::ostream& out) {
  out << "eta,energy_distance,ks_max,floor\n";
  for (std::size_t i = 0; i < report.eta_grid.size(); ++i) {
    out << format_double(report.eta_grid[i]) << ","
        << format_double(report.energy_distances[i]) << ","
        << format_double(report.ks_max[i]) << "," << format_double(report.floor) << "\n";
  }
}

void write_distributional_summary_csv(const DistributionalReport& report, std::ostream& out) {
  out << "floor,replicates,pass\n";
  out << format_double(report.floor) << "," << report.replicates << ","
      << (report.pass ? 1 : 0) << "\n";
}

void write_assumptions_csv(const AssumptionReport& report, const AssumptionOptions& opt,
                           std::ostream& out) {
  out << "x_id,check,value,target,pass\n";
  for (std::size_t i = 0; i < report.drift_checks.size(); ++i) {
    const DriftCheck& c = report.drift_checks[i];
    out << "p" << i << ",drift_discrepancy," << format_double(c.discrepancy) << ","
        << format_double(opt.drift_ci_multiple * c.ci_norm) << "," << (c.pass ? 1 : 0)
        << "\n";
  }
  for (std::size_t i = 0; i < report.diffusion_checks.size(); ++i) {
    const DiffusionCheck& c = report.diffusion_checks[i];
    const double target =
        opt.diffusion_se_multiple * (c.estimate.halfwidth / 1.96).maxCoeff();
    out << "p" << i << ",diffusion_max_abs_error," << format_double(c.max_abs_error_vs_exact)
        << "," << format_double(target) << "," << (c.pass ? 1 : 0) << "\n";
  }
  const bool moment_pass =
      report.moment_check.fitted_slope >= report.delta / 2.0 - opt.moment_slope_margin;
  out << "moment,fitted_slope," << format_double(report.moment_check.fitted_slope) << ","
      << format_double(report.delta / 2.0 - opt.moment_slope_margin) << ","
      << (moment_pass ? 1 : 0) << "\n";
  if (report.exact_identity.has_value()) {
    out << "moment,exact_mean_identity," << format_double(report.exact_identity->mean_error)
        << "," << format_double(1e-12) << "," << (report.exact_identity->pass ? 1 : 0)
        << "\n";
    out << "moment,exact_second_moment_identity,"
        << format_double(report.exact_identity->second_moment_error) << ","
        << format_double(1e-12) << "," << (report.exact_identity->pass ? 1 : 0) << "\n";
  }
}

void write_curvature_csv(const CurvatureBoundReport& report, std::ostream& out) {
  out << "lambda0,grid_desc\n";
  out << format_double(report.lambda0_estimate) << "," << report.grid_description << "\n";
}

}  // namespace sgdlab
