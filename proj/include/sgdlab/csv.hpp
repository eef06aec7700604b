#pragma once

#include <iosfwd>
#include <string>

#include "sgdlab/diagnostics.hpp"

namespace sgdlab {

// %.17g: shortest text that round-trips a double.
std::string format_double(double v);

void write_sigma_csv(const Matrix& sigma, std::ostream& out);

// eta_bar,error,ci_halfwidth
void write_weak_error_csv(const WeakErrorReport& report, std::ostream& out);
// fitted_slope,fitted_log_intercept,inconclusive,pass
void write_weak_error_summary_csv(const WeakErrorReport& report, bool pass, std::ostream& out);

// eta,energy_distance,ks_max,floor
void write_distributional_csv(const DistributionalReport& report, std::ostream& out);
void write_distributional_summary_csv(const DistributionalReport& report, std::ostream& out);

// x_id,check,value,target,pass
void write_assumptions_csv(const AssumptionReport& report, const AssumptionOptions& opt,
                           std::ostream& out);

// lambda0,grid_desc
void write_curvature_csv(const CurvatureBoundReport& report, std::ostream& out);

}  // namespace sgdlab
