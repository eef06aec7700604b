#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "sgdlab/problems.hpp"
#include "sgdlab/rng.hpp"

namespace sgdlab {

// Master seed for an ensemble; replicate r runs with derive_seed(master, r).
struct SeedSpec {
  std::uint64_t master_seed = 0;
};

inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
  return derive_seed(master_seed, replicate);
}

// M independent replicate outcomes under deterministic per-replicate seeding.
struct Ensemble {
  std::vector<Vector> values;  // ordered by replicate index
  std::uint64_t master_seed = 0;
  std::uint64_t config_fingerprint = 0;
};

using ReplicateGenerator = std::function<Vector(std::uint64_t seed)>;

// Runs the generator once per replicate with its derived seed. The result is
// a pure function of (generator, replicate_count, seeds) and independent of
// execution order; replicate failures surface as EnsembleError naming the
// replicate and its seed.
Ensemble run_ensemble(const ReplicateGenerator& generator, std::int64_t replicate_count,
                      SeedSpec seeds, std::uint64_t config_fingerprint = 0);

// Same, but replicates execute in the given order (must be a permutation of
// 0..M-1). Exists to make the order-independence contract testable.
Ensemble run_ensemble_ordered(const ReplicateGenerator& generator,
                              const std::vector<std::int64_t>& execution_order,
                              SeedSpec seeds, std::uint64_t config_fingerprint = 0);

// Sample mean with 95% normal-approximation half-width 1.96 * s / sqrt(M),
// per coordinate. Scalar results use size-1 vectors.
struct EstimateWithCi {
  Vector mean;
  Vector halfwidth;
  std::int64_t sample_count = 0;
};

EstimateWithCi estimate(const Ensemble& ensemble,
                        const std::function<double(const Vector&)>& g);
EstimateWithCi estimate_vector(const Ensemble& ensemble,
                               const std::function<Vector(const Vector&)>& g);

// V-statistic energy distance 2 E|a-b| - E|a-a'| - E|b-b'| over all pairs
// including self-pairs. Each sample set is capped at 20000 points.
double energy_distance(const std::vector<Vector>& a, const std::vector<Vector>& b);

// Two-sample Kolmogorov-Smirnov statistic (sup distance of empirical CDFs).
double ks_statistic_1d(std::vector<double> a, std::vector<double> b);

// Columns replicate,seed,value_0,...; ordered by replicate.
void write_ensemble_csv(const Ensemble& ensemble, std::ostream& out);

}  // namespace sgdlab
