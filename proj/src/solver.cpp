#include "cssir/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cssir/fantope.hpp"

namespace cssir {

namespace {

void symmetrize(Matrix& a) { a = 0.5 * (a + a.transpose()).eval(); }

void soft_threshold_inplace(Matrix& a, double b) {
  a = a.unaryExpr([b](double v) {
    const double mag = std::abs(v) - b;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

// F^T X F
Matrix congruence_t(const Matrix& f, const Matrix& x) {
  Matrix tmp(f.cols(), x.cols());
  tmp.noalias() = f.transpose() * x;
  Matrix out(f.cols(), f.cols());
  out.noalias() = tmp * f;
  symmetrize(out);
  return out;
}

// F X F^T
Matrix congruence(const Matrix& f, const Matrix& x) {
  Matrix tmp(f.rows(), x.cols());
  tmp.noalias() = f * x;
  Matrix out(f.rows(), f.rows());
  out.noalias() = tmp * f.transpose();
  symmetrize(out);
  return out;
}

}  // namespace

void SolverConfig::validate(Index d) const {
  std::ostringstream os;
  if (!(rho >= 0.0) || !std::isfinite(rho)) os << "rho must be a finite nonnegative number; ";
  if (k < 1 || k > d) os << "K must lie in [1, " << d << "]; ";
  if (!(nu > 0.0) || !std::isfinite(nu)) os << "nu must be positive; ";
  if (!(epsilon > 0.0)) os << "epsilon must be positive; ";
  if (max_iter < 1) os << "max_iter must be at least 1; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw Error(ErrorKind::kInvalidParameter, msg.substr(0, msg.size() - 2));
}

SolverState SolverState::initial(Index d) {
  return SolverState{SymMatrix::identity(d), SymMatrix::identity(d), SymMatrix::zero(d), 0, 0.0};
}

LadmmSolver::LadmmSolver(SymMatrix m, const SymMatrix& sigma, double nu)
    : m_(std::move(m)), s_(SymMatrix::zero(1)), nu_(nu), tau_(0.0) {
  if (m_.dim() != sigma.dim()) throw Error(ErrorKind::kInvalidInput, "M and Sigma dimensions differ");
  if (!m_.all_finite()) throw Error(ErrorKind::kInvalidInput, "M has non-finite entries");
  if (!(nu > 0.0)) throw Error(ErrorKind::kInvalidParameter, "nu must be positive");

  EigenDecomposition eig = sym_eigen(sigma);
  const double lmax = eig.values(0);
  tau_ = 4.0 * nu_ * lmax * lmax;
  if (!(tau_ > 0.0) || !(lmax > 0.0)) throw Error(ErrorKind::kInvalidInput, "Sigma has no positive eigenvalue (tau = 0)");

  s_ = sqrt_psd(eig);
  Index rank = 0;
  while (rank < eig.values.size() && eig.values(rank) > 1e-12 * lmax) ++rank;
  if (rank == sigma.dim()) {
    factor_ = s_.matrix();
  } else {
    eig.values.tail(sigma.dim() - rank).setZero();
    s_ = sqrt_psd(eig);
    basis_ = eig.vectors.leftCols(rank);
    factor_ = basis_ * eig.values.head(rank).cwiseSqrt().asDiagonal();
  }
}

double LadmmSolver::objective(const SymMatrix& pi, double rho) const {
  return -(m_.matrix().cwiseProduct(pi.matrix())).sum() + rho * pi.matrix().cwiseAbs().sum();
}

LadmmSolver::Reduced LadmmSolver::compress(const SolverState& state) const {
  if (state.pi.dim() != dim()) throw Error(ErrorKind::kInvalidInput, "solver state has the wrong dimension");
  Matrix w = congruence_t(factor_, state.pi.matrix());
  if (basis_.size() == 0) return {state.pi.matrix(), state.h.matrix(), state.gamma.matrix(), std::move(w)};
  return {state.pi.matrix(), congruence_t(basis_, state.h.matrix()), congruence_t(basis_, state.gamma.matrix()),
          std::move(w)};
}

SolverState LadmmSolver::expand(const Reduced& state, int iter, double step_norm) const {
  if (basis_.size() == 0) return {SymMatrix(state.pi), SymMatrix(state.h), SymMatrix(state.gamma), iter, step_norm};
  return {SymMatrix(state.pi), SymMatrix(congruence(basis_, state.h)), SymMatrix(congruence(basis_, state.gamma)),
          iter, step_norm};
}

LadmmSolver::Sweep LadmmSolver::sweep(Reduced& state, const SolverConfig& cfg) const {
  // Pi <- Soft(Pi + M/tau - (nu/tau) S (S Pi S - H + Gamma) S, rho/tau)
  Matrix next = state.pi + m_.matrix() / tau_ - (nu_ / tau_) * congruence(factor_, state.w - state.h + state.gamma);
  soft_threshold_inplace(next, cfg.rho / tau_);
  symmetrize(next);
  if (!next.allFinite()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};

  // H <- Fantope projection of Gamma + S Pi S;  Gamma <- Gamma + S Pi S - H
  state.w = congruence_t(factor_, next);
  state.h = fantope_clip(state.gamma + state.w, cfg.k);
  const Matrix residual = state.w - state.h;
  state.gamma += residual;

  const double step_norm = (next - state.pi).norm();
  state.pi = std::move(next);
  return {step_norm, residual.norm()};
}

SolverState LadmmSolver::step(const SolverState& state, const SolverConfig& cfg) const {
  cfg.validate(dim());
  Reduced r = compress(state);
  const double step_norm = sweep(r, cfg).step;
  if (!std::isfinite(step_norm)) throw Error(ErrorKind::kDivergence, "non-finite iterate");
  return expand(r, state.iter + 1, step_norm);
}

SolveReport LadmmSolver::solve(const SolverConfig& cfg, const std::optional<SolverState>& warm) const {
  cfg.validate(dim());
  Reduced state = compress(warm ? *warm : SolverState::initial(dim()));

  SolveReport report{SymMatrix::zero(dim()), false, 0, 0.0, 0.0, {}, SolverState::initial(1)};
  report.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iter));
  Sweep last{0.0, 0.0};
  int it = 0;
  while (it < cfg.max_iter) {
    ++it;
    last = sweep(state, cfg);
    if (!std::isfinite(last.step) || !std::isfinite(last.residual) || !state.pi.allFinite() ||
        !state.gamma.allFinite()) {
      std::ostringstream os;
      os << "non-finite iterate at iteration " << it;
      throw Error(ErrorKind::kDivergence, os.str());
    }
    report.objective_trace.push_back(-(m_.matrix().cwiseProduct(state.pi)).sum() +
                                     cfg.rho * state.pi.cwiseAbs().sum());
    // A Pi step of zero alone is not enough: Pi can sit at an exact zero for
    // several sweeps while the dual is still moving it elsewhere.
    if (last.step <= cfg.epsilon && last.residual <= cfg.epsilon) {
      report.converged = true;
      break;
    }
  }

  report.iterations = it;
  report.final_step_norm = last.step;
  report.final_residual_norm = last.residual;
  report.final_state = expand(state, it, last.step);
  report.pi_hat = report.final_state.pi;
  return report;
}

SolveReport ladmm_solve(const SymMatrix& m, const SymMatrix& sigma, const SolverConfig& cfg) {
  cfg.validate(m.dim());
  return LadmmSolver(m, sigma, cfg.nu).solve(cfg);
}

}  // namespace cssir
