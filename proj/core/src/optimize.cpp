#include "gppenalty/optimize.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "gppenalty/errors.hpp"
#include "gppenalty/rng.hpp"

namespace gppen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijoC1 = 1e-4;
constexpr int kMemory = 8;          // L-BFGS history length
constexpr int kMaxBacktracks = 60;  // halvings before a line search gives up

// Negated penalized log likelihood with failure mapped to +inf, so the
// minimizer below can treat numerically infeasible points as ordinary
// rejections instead of exceptions.
struct Objective {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  double g;
  const PenaltySpec& spec;
  int* n_evals;

  double value(const Eigen::VectorXd& theta) const {
    ++*n_evals;
    try {
      const double q = penalized_loglik(theta, X, y, g, spec);
      return std::isfinite(q) ? -q : kInf;
    } catch (const NumericError&) {
      return kInf;
    }
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
    return -grad_penalized_loglik(theta, X, y, g, spec);
  }
};

Eigen::VectorXd clamp_to_box(const Eigen::VectorXd& x, double lo, double hi) {
  Eigen::VectorXd out = x;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < lo) out[i] = lo;
    if (out[i] > hi) out[i] = hi;
  }
  return out;
}

// Gradient with components pointing out of the box zeroed at active bounds;
// its sup-norm is the first-order stationarity measure for box constraints.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& grad, double lo,
                                   double hi) {
  Eigen::VectorXd pg = grad;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lo && grad[i] > 0.0) || (x[i] >= hi && grad[i] < 0.0)) {
      pg[i] = 0.0;
    }
  }
  return pg;
}

struct StartOutcome {
  bool ok = false;
  bool converged = false;
  Eigen::VectorXd x;
  double fx = kInf;  // negated objective (minimization frame)
  std::string note;
};

// Projected L-BFGS descent on f = -Q from one start point. Bound hits are
// exact because every candidate iterate is clamped componentwise onto the
// box before evaluation.
StartOutcome run_single_start(const Objective& f, Eigen::VectorXd x0,
                              const OptimConfig& cfg) {
  StartOutcome out;
  const double lo = cfg.theta_lo;
  const double hi = cfg.theta_hi;

  Eigen::VectorXd x = clamp_to_box(x0, lo, hi);
  double fx = f.value(x);
  if (!std::isfinite(fx)) {
    out.note = "objective not evaluable at start";
    return out;
  }
  Eigen::VectorXd grad = f.gradient(x);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::VectorXd pg = projected_gradient(x, grad, lo, hi);
    if (pg.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
      out.converged = true;
      break;
    }

    // Two-loop recursion for the quasi-Newton direction.
    Eigen::VectorXd dir = -grad;
    if (!s_hist.empty()) {
      std::vector<double> alpha_i(s_hist.size());
      Eigen::VectorXd q = grad;
      for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
        alpha_i[i] = rho_hist[i] * s_hist[i].dot(q);
        q -= alpha_i[i] * y_hist[i];
      }
      const double gamma =
          s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
      for (std::size_t i = 0; i < s_hist.size(); ++i) {
        const double beta = rho_hist[i] * y_hist[i].dot(q);
        q += (alpha_i[i] - beta) * s_hist[i];
      }
      dir = -q;
    }

    // Backtracking Armijo search along the projected path; if the
    // quasi-Newton direction stalls, retry once from steepest descent.
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = kInf;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        dir = -grad;
      }
      double step = 1.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
        x_new = clamp_to_box(x + step * dir, lo, hi);
        if (x_new == x) {
          // Clamping removed the whole step; smaller steps cannot move
          // either, so this direction is exhausted.
          break;
        }
        f_new = f.value(x_new);
        const double decrease = grad.dot(x_new - x);
        if (std::isfinite(f_new) &&
            f_new <= fx + kArmijoC1 * std::min(decrease, 0.0)) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      break;  // no usable step in any direction: stop at the current point
    }

    const Eigen::VectorXd g_new = f.gradient(x_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - grad;
    const double sy = s.dot(yv);
    if (sy > 1e-10 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = x_new;
    fx = f_new;
    grad = g_new;
  }

  // Re-check stationarity in case the loop exited by iteration cap right at
  // a solution.
  if (!out.converged) {
    const Eigen::VectorXd pg = projected_gradient(x, grad, lo, hi);
    out.converged = pg.lpNorm<Eigen::Infinity>() <= cfg.grad_tol;
  }
  out.ok = true;
  out.x = x;
  out.fx = fx;
  return out;
}

}  // namespace

Eigen::MatrixXd multistart_points(int d, double lo, double hi, int n_starts,
                                  std::uint64_t seed) {
  if (!(lo > 0.0) || !(lo < hi)) {
    throw DomainError("multistart_points: need 0 < lo < hi, got [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (n_starts < 1) {
    throw DomainError("multistart_points: n_starts must be >= 1");
  }
  const double log_lo = std::log(lo);
  const double span = std::log(hi) - log_lo;

  // One stratum permutation per dimension from a dedicated stream, so each
  // coordinate hits every log-decade slice exactly once across the starts.
  Rng perm_rng(derive_seed(seed, {static_cast<std::uint64_t>(n_starts)}));
  std::vector<std::vector<int>> perms(d);
  for (int p = 0; p < d; ++p) {
    perms[p] = perm_rng.permutation(n_starts);
  }

  Eigen::MatrixXd pts(n_starts, d);
  for (int s = 0; s < n_starts; ++s) {
    Rng offset_rng(derive_seed(seed, {static_cast<std::uint64_t>(s)}));
    for (int p = 0; p < d; ++p) {
      const double u = offset_rng.uniform01();
      pts(s, p) =
          std::exp(log_lo + (perms[p][s] + u) * span / n_starts);
    }
  }
  return pts;
}

FitResult maximize_penalized(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             double g, const PenaltySpec& spec,
                             const OptimConfig& config) {
  const int d = static_cast<int>(X.cols());
  int n_evals = 0;
  const Objective f{X, y, g, spec, &n_evals};

  const Eigen::MatrixXd starts = multistart_points(
      d, config.theta_lo, config.theta_hi, config.n_starts, config.seed);

  FitResult best;
  bool have_best = false;
  std::vector<std::string> diagnostics;
  for (int s = 0; s < config.n_starts; ++s) {
    const StartOutcome run = run_single_start(f, starts.row(s), config);
    if (!run.ok) {
      std::ostringstream msg;
      msg << "start " << s << ": " << run.note;
      diagnostics.push_back(msg.str());
      continue;
    }
    std::ostringstream msg;
    msg << "start " << s << ": objective " << -run.fx
        << (run.converged ? " (converged)" : " (iteration cap)");
    diagnostics.push_back(msg.str());
    // Strict improvement required, so ties stay with the lowest start index.
    if (!have_best || -run.fx > best.objective) {
      best.theta_hat = run.x;
      best.objective = -run.fx;
      best.start_index = s;
      best.converged = run.converged;
      have_best = true;
    }
  }
  if (!have_best) {
    throw OptimizationFailedError(
        "maximize_penalized: all " + std::to_string(config.n_starts) +
            " starts failed",
        diagnostics);
  }
  best.n_evals = n_evals;
  return best;
}

FitResult maximize_penalized(const Dataset& data, double g,
                             const PenaltySpec& spec,
                             const OptimConfig& config) {
  return maximize_penalized(data.inputs, data.responses, g, spec, config);
}

}  // namespace gppen
