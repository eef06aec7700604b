#include "sgdlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sgdlab/errors.hpp"
#include "sgdlab/parallel.hpp"

namespace sgdlab {

namespace {

constexpr std::int64_t kEnergyDistanceCap = 20000;
constexpr double kNormalQuantile95 = 1.96;

void run_into_slots(const ReplicateGenerator& generator, Ensemble& out,
                    const std::vector<std::int64_t>& order, std::uint64_t master) {
  // Slot r always receives the replicate-r result no matter who computes it.
  parallel_for(static_cast<std::int64_t>(order.size()), [&](std::int64_t pos) {
    const std::int64_t r = order[static_cast<std::size_t>(pos)];
    const std::uint64_t seed = replicate_seed(master, static_cast<std::uint64_t>(r));
    try {
      out.values[static_cast<std::size_t>(r)] = generator(seed);
    } catch (const EnsembleError&) {
      throw;
    } catch (const std::exception& ex) {
      throw EnsembleError(r, seed,
                          "replicate " + std::to_string(r) + " (seed " +
                              std::to_string(seed) + ") failed: " + ex.what());
    }
  });
}

}  // namespace

Ensemble run_ensemble(const ReplicateGenerator& generator, std::int64_t replicate_count,
                      SeedSpec seeds, std::uint64_t config_fingerprint) {
  if (replicate_count < 1) throw std::domain_error("replicate_count must be >= 1");
  Ensemble out;
  out.master_seed = seeds.master_seed;
  out.config_fingerprint = config_fingerprint;
  out.values.resize(static_cast<std::size_t>(replicate_count));
  std::vector<std::int64_t> order(static_cast<std::size_t>(replicate_count));
  std::iota(order.begin(), order.end(), std::int64_t{0});
  run_into_slots(generator, out, order, seeds.master_seed);
  return out;
}

Ensemble run_ensemble_ordered(const ReplicateGenerator& generator,
                              const std::vector<std::int64_t>& execution_order,
                              SeedSpec seeds, std::uint64_t config_fingerprint) {
  if (execution_order.empty()) throw std::domain_error("replicate_count must be >= 1");
  const std::int64_t count = static_cast<std::int64_t>(execution_order.size());
  std::vector<std::int64_t> sorted = execution_order;
  std::sort(sorted.begin(), sorted.end());
  for (std::int64_t r = 0; r < count; ++r)
    if (sorted[static_cast<std::size_t>(r)] != r)
      throw std::domain_error("execution_order must be a permutation of 0..M-1");
  Ensemble out;
  out.master_seed = seeds.master_seed;
  out.config_fingerprint = config_fingerprint;
  out.values.resize(static_cast<std::size_t>(count));
  run_into_slots(generator, out, execution_order, seeds.master_seed);
  return out;
}

EstimateWithCi estimate(const Ensemble& ensemble,
                        const std::function<double(const Vector&)>& g) {
  return estimate_vector(ensemble, [&g](const Vector& v) {
    Vector out(1);
    out[0] = g(v);
    return out;
  });
}

EstimateWithCi estimate_vector(const Ensemble& ensemble,
                               const std::function<Vector(const Vector&)>& g) {
  const std::int64_t m = static_cast<std::int64_t>(ensemble.values.size());
  if (m < 1) throw std::domain_error("ensemble is empty");
  std::vector<Vector> vals(static_cast<std::size_t>(m));
  for (std::int64_t r = 0; r < m; ++r) {
    vals[static_cast<std::size_t>(r)] = g(ensemble.values[static_cast<std::size_t>(r)]);
    if (!vals[static_cast<std::size_t>(r)].allFinite())
      throw std::runtime_error("test function returned a non-finite value at replicate " +
                               std::to_string(r));
  }
  const int dim = static_cast<int>(vals.front().size());
  Vector mean = Vector::Zero(dim);
  for (std::int64_t r = 0; r < m; ++r) mean += vals[static_cast<std::size_t>(r)];
  mean /= static_cast<double>(m);
  Vector halfwidth = Vector::Zero(dim);
  if (m >= 2) {
    Vector ssq = Vector::Zero(dim);
    for (std::int64_t r = 0; r < m; ++r) {
      const Vector dev = vals[static_cast<std::size_t>(r)] - mean;
      ssq += dev.cwiseProduct(dev);
    }
    const Vector sd = (ssq / static_cast<double>(m - 1)).cwiseSqrt();
    halfwidth = (kNormalQuantile95 / std::sqrt(static_cast<double>(m))) * sd;
  }
  return EstimateWithCi{std::move(mean), std::move(halfwidth), m};
}

namespace {

double mean_pairwise_distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  const std::int64_t na = static_cast<std::int64_t>(a.size());
  const std::int64_t nb = static_cast<std::int64_t>(b.size());
  std::vector<double> row_sums(static_cast<std::size_t>(na), 0.0);
  parallel_for(na, [&](std::int64_t i) {
    double s = 0.0;
    const Vector& ai = a[static_cast<std::size_t>(i)];
    for (std::int64_t j = 0; j < nb; ++j) s += (ai - b[static_cast<std::size_t>(j)]).norm();
    row_sums[static_cast<std::size_t>(i)] = s;
  });
  double total = 0.0;
  for (double s : row_sums) total += s;  // fixed accumulation order
  return total / (static_cast<double>(na) * static_cast<double>(nb));
}

}  // namespace

double energy_distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.empty() || b.empty()) throw std::domain_error("energy_distance: empty sample set");
  if (static_cast<std::int64_t>(a.size()) > kEnergyDistanceCap ||
      static_cast<std::int64_t>(b.size()) > kEnergyDistanceCap)
    throw std::domain_error("energy_distance: sample sets are capped at " +
                            std::to_string(kEnergyDistanceCap) + " points");
  if (a.front().size() != b.front().size())
    throw std::domain_error("energy_distance: dimension mismatch");
  const double cross = mean_pairwise_distance(a, b);
  const double within_a = mean_pairwise_distance(a, a);
  const double within_b = mean_pairwise_distance(b, b);
  return 2.0 * cross - within_a - within_b;
}

double ks_statistic_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("ks_statistic_1d: empty sample set");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sup = 0.0;
  while (i < a.size() || j < b.size()) {
    double t;
    if (i < a.size() && j < b.size()) t = std::min(a[i], b[j]);
    else if (i < a.size()) t = a[i];
    else t = b[j];
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

void write_ensemble_csv(const Ensemble& ensemble, std::ostream& out) {
  const int d =
      ensemble.values.empty() ? 0 : static_cast<int>(ensemble.values.front().size());
  out << "replicate,seed";
  for (int j = 0; j < d; ++j) out << ",value_" << j;
  out << "\n";
  char buf[64];
  for (std::size_t r = 0; r < ensemble.values.size(); ++r) {
    out << r << "," << replicate_seed(ensemble.master_seed, r);
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ensemble.values[r][j]);
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace sgdlab
