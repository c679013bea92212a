#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cssir/covariance.hpp"

namespace cssir {

/// Reproducible random stream, identified by kRngName. The engine is
/// std::mt19937_64 seeded with splitmix64(seed); uniforms take the top 53
/// bits; normals use the Box-Muller transform, consuming two uniforms per
/// pair of draws. Changing any of this changes kRngName.
class Rng {
 public:
  static constexpr const char* kRngName = "mt19937_64/splitmix64-seed/box-muller/v1";

  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Uniform on {0, ..., n-1}, rejection sampled.
  std::uint64_t below(std::uint64_t n);
  /// Fisher-Yates with below().
  void shuffle(std::vector<Index>& v);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct SimSpec {
  int setting = 1;
  Index n = 100;
  Index d = 150;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruth {
  Matrix directions;           // d x K, unnormalized as in the model definition
  std::vector<Index> support;  // 0-based
  Index k = 1;
};

/// (Sigma)_ij = phi^|i-j|.
SymMatrix ar1_sigma(Index d, double phi = 0.5);

GroundTruth ground_truth(int setting, Index d);

/// Rows are drawn in order: d standard normals mapped through the Cholesky
/// factor of ar1_sigma(d), then one normal for the noise term.
std::pair<Dataset, GroundTruth> generate(const SimSpec& spec);

using Metrics = std::map<std::string, double>;
using ReplicatePipeline = std::function<Metrics(const Dataset&, const GroundTruth&)>;

struct ReplicateRow {
  int index = 0;  // 1-based
  std::uint64_t seed = 0;
  Metrics metrics;
  std::optional<std::string> failure;
};

struct MetricSummary {
  double mean = 0.0;
  std::optional<double> se;  // absent for a single replicate
  int count = 0;
};

struct ReplicateTable {
  std::vector<ReplicateRow> rows;
  std::map<std::string, MetricSummary> summary;
  int failures = 0;
};

/// Runs replicates r = 1..R on seeds template.seed + r, using up to
/// `parallelism` threads. Rows are stored by index, so the table does not
/// depend on scheduling. Throws kAggregateInvalid if at least 20% fail.
ReplicateTable run_replicates(const SimSpec& spec_template, int replicates, const ReplicatePipeline& pipeline,
                              int parallelism = 1);

}  // namespace cssir
