#include "cssir/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace cssir {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double Rng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidInput, "below(0) is empty");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

void Rng::shuffle(std::vector<Index>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(below(i));
    std::swap(v[i - 1], v[j]);
  }
}

void SimSpec::validate() const {
  if (setting < 1 || setting > 3) throw Error(ErrorKind::kInvalidParameter, "setting must be 1, 2 or 3");
  if (n < 2) throw Error(ErrorKind::kInvalidParameter, "n must be at least 2");
  const Index need = setting == 3 ? 5 : 3;
  if (d < need) {
    std::ostringstream os;
    os << "setting " << setting << " needs d >= " << need;
    throw Error(ErrorKind::kInvalidParameter, os.str());
  }
}

SymMatrix ar1_sigma(Index d, double phi) {
  if (!(std::abs(phi) < 1.0)) throw Error(ErrorKind::kInvalidParameter, "AR(1) coefficient must satisfy |phi| < 1");
  if (d < 1) throw Error(ErrorKind::kInvalidParameter, "dimension must be at least 1");
  Matrix s(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) s(i, j) = std::pow(phi, static_cast<double>(std::abs(i - j)));
  }
  return SymMatrix(s);
}

GroundTruth ground_truth(int setting, Index d) {
  SimSpec{setting, 2, d, 0}.validate();
  GroundTruth truth;
  truth.k = setting == 3 ? 2 : 1;
  truth.directions = Matrix::Zero(d, truth.k);
  truth.directions.col(0).head(3).setOnes();
  truth.support = {0, 1, 2};
  if (setting == 3) {
    truth.directions.col(1).segment(3, 2).setOnes();
    truth.support = {0, 1, 2, 3, 4};
  }
  return truth;
}

std::pair<Dataset, GroundTruth> generate(const SimSpec& spec) {
  spec.validate();
  const Matrix lower = cholesky(ar1_sigma(spec.d));
  Rng rng(spec.seed);

  Matrix z(spec.n, spec.d);
  Vector eps(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    for (Index j = 0; j < spec.d; ++j) z(i, j) = rng.normal();
    eps(i) = rng.normal();
  }
  Matrix x = z * lower.transpose();

  const double root3 = std::sqrt(3.0);
  Vector y(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    const double s123 = x(i, 0) + x(i, 1) + x(i, 2);
    switch (spec.setting) {
      case 1:
        y(i) = s123 / root3 + 2.0 * eps(i);
        break;
      case 2:
        y(i) = 1.0 + std::exp(s123 / root3) + eps(i);
        break;
      default: {
        const double den = x(i, 3) + x(i, 4) + 1.5;
        y(i) = s123 / (0.5 + den * den) + 0.1 * eps(i);
      }
    }
  }
  return {Dataset(std::move(y), std::move(x)), ground_truth(spec.setting, spec.d)};
}

ReplicateTable run_replicates(const SimSpec& spec_template, int replicates, const ReplicatePipeline& pipeline,
                              int parallelism) {
  if (replicates < 1) throw Error(ErrorKind::kInvalidParameter, "need at least one replicate");
  spec_template.validate();

  ReplicateTable table;
  table.rows.resize(static_cast<std::size_t>(replicates));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < replicates; r = next++) {
      ReplicateRow& row = table.rows[static_cast<std::size_t>(r)];
      row.index = r + 1;
      row.seed = spec_template.seed + static_cast<std::uint64_t>(r + 1);
      SimSpec spec = spec_template;
      spec.seed = row.seed;
      try {
        auto [data, truth] = generate(spec);
        row.metrics = pipeline(data, truth);
      } catch (const std::exception& e) {
        row.failure = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min(parallelism, replicates));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::map<std::string, std::vector<double>> columns;
  for (const auto& row : table.rows) {
    if (row.failure) {
      ++table.failures;
      continue;
    }
    for (const auto& [name, value] : row.metrics) columns[name].push_back(value);
  }
  if (table.failures * 5 >= replicates) {
    std::ostringstream os;
    os << table.failures << " of " << replicates << " replicates failed";
    const auto first = std::find_if(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.failure; });
    if (first != table.rows.end()) os << " (first: " << *first->failure << ")";
    throw Error(ErrorKind::kAggregateInvalid, os.str());
  }
  for (const auto& [name, values] : columns) {
    MetricSummary s;
    s.count = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.count;
    if (s.count > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.se = std::sqrt(ss / (s.count - 1)) / std::sqrt(static_cast<double>(s.count));
    }
    table.summary[name] = s;
  }
  return table;
}

}  // namespace cssir
