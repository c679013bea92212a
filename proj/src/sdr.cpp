#include "cssir/sdr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cssir/simulate.hpp"

namespace cssir {

namespace {

Index slices_required(const CvOptions& o) {
  if (o.basis) return o.basis->kind == BasisSpec::Kind::kSliceIndicator ? o.basis->order : 0;
  return o.method.kind == ConditionalMethod::Kind::kSlice ? o.method.slices : 0;
}

void check_pfc_rank(Index k, const BasisSpec& basis) {
  if (k >= basis.order) {
    std::ostringstream os;
    os << "PFC needs K < r, got K=" << k << " r=" << basis.order;
    throw Error(ErrorKind::kInvalidRank, os.str());
  }
}

}  // namespace

FitResult summarize_fit(SolveReport report, const SolverConfig& cfg, double support_threshold) {
  const EigenDecomposition eig = sym_eigen(report.pi_hat);
  FitResult fit{report.pi_hat, eig.vectors.leftCols(cfg.k), eig.values.head(cfg.k), {}, cfg.k, cfg.rho,
                std::move(report)};
  const Vector diag = fit.pi_hat.matrix().diagonal();
  for (Index j = 0; j < diag.size(); ++j) {
    if (diag(j) > support_threshold) fit.support.push_back(j);
  }
  return fit;
}

FitResult fit_sir(const Dataset& data, const SolverConfig& cfg, const ConditionalMethod& method,
                  double support_threshold) {
  cfg.validate(data.d());
  LadmmSolver solver(conditional_cov(data, method), sample_cov(data.x()), cfg.nu);
  return summarize_fit(solver.solve(cfg), cfg, support_threshold);
}

FitResult fit_pfc(const Dataset& data, const SolverConfig& cfg, const BasisSpec& basis, double support_threshold) {
  check_pfc_rank(cfg.k, basis);
  cfg.validate(data.d());
  LadmmSolver solver(fit_cov(data, basis), sample_cov(data.x()), cfg.nu);
  return summarize_fit(solver.solve(cfg), cfg, support_threshold);
}

MeanPredictor::MeanPredictor(const Matrix& directions, const Dataset& train)
    : directions_(directions), reduced_(train.x() * directions), y_(train.y()) {
  if (directions.rows() != train.d()) throw Error(ErrorKind::kInvalidInput, "directions do not match covariate dimension");
}

Vector MeanPredictor::weights(const Vector& x_star) const {
  if (x_star.size() != directions_.rows()) throw Error(ErrorKind::kInvalidInput, "query point has the wrong dimension");
  const Eigen::RowVectorXd r_star = (directions_.transpose() * x_star).transpose();
  const Vector dist2 = (reduced_.rowwise() - r_star).rowwise().squaredNorm();
  Vector w = (-0.5 * dist2.array()).exp().matrix();
  const double total = w.sum();
  if (total > 0.0) return w / total;

  Index nearest = 0;
  dist2.minCoeff(&nearest);
  w.setZero();
  w(nearest) = 1.0;
  return w;
}

double MeanPredictor::predict(const Vector& x_star) const {
  // Centering on y_0 keeps a constant response exact despite rounding in the
  // weight sum.
  const double base = y_(0);
  return base + weights(x_star).dot((y_.array() - base).matrix());
}

double predict_mean(const FitResult& fit, const Dataset& train, const Vector& x_star) {
  return MeanPredictor(fit.directions, train).predict(x_star);
}

std::vector<double> default_rho_grid(Index n, Index d, int count) {
  if (count < 1) throw Error(ErrorKind::kInvalidParameter, "rho grid needs at least one value");
  const double scale = std::sqrt(std::log(static_cast<double>(d)) / static_cast<double>(n));
  const double lo = std::log(0.01);
  const double hi = std::log(4.0);
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 1.0 : static_cast<double>(count - 1 - i) / (count - 1);
    grid.push_back(scale * std::exp(lo + t * (hi - lo)));
  }
  return grid;
}

std::vector<int> assign_folds(Index n, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) throw Error(ErrorKind::kInvalidFold, "fold count must lie in [2, n]");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(perm);
  const auto offsets = slice_offsets(n, folds);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (int m = 0; m < folds; ++m) {
    for (Index p = offsets[m]; p < offsets[m + 1]; ++p) fold_of[static_cast<std::size_t>(perm[p])] = m;
  }
  return fold_of;
}

CvReport cross_validate(const Dataset& data, const CvOptions& options) {
  const int folds = options.folds;
  if (folds < 2) throw Error(ErrorKind::kInvalidFold, "cross-validation needs at least 2 folds");
  if (options.k_grid.empty()) throw Error(ErrorKind::kInvalidParameter, "empty K grid");
  const std::vector<double> rho_grid =
      options.rho_grid.empty() ? default_rho_grid(data.n(), data.d()) : options.rho_grid;
  for (Index k : options.k_grid) {
    if (k < 1 || k > data.d()) throw Error(ErrorKind::kInvalidParameter, "K grid value out of range");
    if (options.basis) check_pfc_rank(k, *options.basis);
  }
  for (double rho : rho_grid) {
    if (!(rho >= 0.0)) throw Error(ErrorKind::kInvalidParameter, "rho grid values must be nonnegative");
  }

  std::vector<int> fold_of = options.fold_of;
  if (fold_of.empty()) {
    fold_of = assign_folds(data.n(), folds, options.seed);
  } else if (static_cast<Index>(fold_of.size()) != data.n()) {
    throw Error(ErrorKind::kInvalidFold, "explicit fold assignment has the wrong length");
  }

  std::vector<std::vector<Index>> members(static_cast<std::size_t>(folds));
  for (Index i = 0; i < data.n(); ++i) {
    const int m = fold_of[static_cast<std::size_t>(i)];
    if (m < 0 || m >= folds) throw Error(ErrorKind::kInvalidFold, "fold id out of range");
    members[static_cast<std::size_t>(m)].push_back(i);
  }
  const Index min_size = std::max<Index>(10, 2 * slices_required(options));
  for (int m = 0; m < folds; ++m) {
    const Index size = static_cast<Index>(members[static_cast<std::size_t>(m)].size());
    if (size < min_size) {
      std::ostringstream os;
      os << "fold " << m << " has " << size << " points, needs at least " << min_size;
      throw Error(ErrorKind::kInvalidFold, os.str());
    }
  }

  // Solve each K's path from the largest rho down; results are stored by
  // grid index so the report keeps the caller's ordering.
  std::vector<std::size_t> rho_order(rho_grid.size());
  std::iota(rho_order.begin(), rho_order.end(), std::size_t{0});
  std::stable_sort(rho_order.begin(), rho_order.end(),
                   [&rho_grid](std::size_t a, std::size_t b) { return rho_grid[a] > rho_grid[b]; });

  CvReport report;
  report.folds = folds;
  for (Index k : options.k_grid) {
    for (double rho : rho_grid) report.grid.emplace_back(k, rho);
  }
  report.fold_errors.assign(report.grid.size(), std::vector<double>(static_cast<std::size_t>(folds), 0.0));

  for (int m = 0; m < folds; ++m) {
    const auto& test_rows = members[static_cast<std::size_t>(m)];
    std::vector<Index> train_rows;
    for (Index i = 0; i < data.n(); ++i) {
      if (fold_of[static_cast<std::size_t>(i)] != m) train_rows.push_back(i);
    }
    const Dataset train = data.subset(train_rows);
    const SymMatrix target = options.basis ? fit_cov(train, *options.basis) : conditional_cov(train, options.method);
    const LadmmSolver solver(target, sample_cov(train.x()), options.solver.nu);

    for (std::size_t ki = 0; ki < options.k_grid.size(); ++ki) {
      std::optional<SolverState> warm;
      for (std::size_t ri : rho_order) {
        SolverConfig cfg = options.solver;
        cfg.k = options.k_grid[ki];
        cfg.rho = rho_grid[ri];
        SolveReport solved = solver.solve(cfg, warm);
        warm = solved.final_state;
        const FitResult fit = summarize_fit(std::move(solved), cfg, options.support_threshold);

        const MeanPredictor predictor(fit.directions, train);
        double sse = 0.0;
        for (Index i : test_rows) {
          const double resid = data.y()(i) - predictor.predict(data.x().row(i).transpose());
          sse += resid * resid;
        }
        const std::size_t g = ki * rho_grid.size() + ri;
        report.fold_errors[g][static_cast<std::size_t>(m)] = sse / static_cast<double>(test_rows.size());
      }
    }
  }

  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < report.grid.size(); ++g) {
    const auto& fe = report.fold_errors[g];
    const double err = std::accumulate(fe.begin(), fe.end(), 0.0) / static_cast<double>(folds);
    report.errors.push_back(err);
    const auto& [k, rho] = report.grid[g];
    const bool better = g == 0 || err < best_err ||
                        (err == best_err && (k < report.best.first || (k == report.best.first && rho > report.best.second)));
    if (better) {
      best_err = err;
      report.best = report.grid[g];
    }
  }
  return report;
}

}  // namespace cssir
