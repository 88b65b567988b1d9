#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "vifuse/error.h"

namespace vifuse {

struct SolverSettings {
  int max_iterations = 30;
  int history_size = 10;
  double gradient_tolerance = 1e-6;  // on the max-norm of the gradient
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_evaluations = 25;

  void Validate() const {
    if (max_iterations < 0 || history_size < 1 || !(gradient_tolerance >= 0.0) ||
        !(wolfe_c1 > 0.0) || !(wolfe_c2 > wolfe_c1) || !(wolfe_c2 < 1.0) ||
        max_line_search_evaluations < 1) {
      throw Error(ErrorCode::kInvalidConfig, "invalid solver settings");
    }
  }
};

enum class SolverStatus { kConverged, kMaxIterations, kLineSearchFailure };

struct SolverSummary {
  SolverStatus status = SolverStatus::kConverged;
  int iterations = 0;
  int evaluations = 0;
  double initial_value = 0.0;
  double final_value = 0.0;
  double gradient_norm = 0.0;
};

namespace internal {

// Minimizer of the cubic through (a, fa, da), (b, fb, db), clamped to the
// inner part of [a, b]; falls back to bisection when the cubic degenerates.
inline double CubicStep(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  double t = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom != 0.0) t = b - (b - a) * (db + d2 - d1) / denom;
  }
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(t) || t < lo + margin || t > hi - margin) t = 0.5 * (a + b);
  return t;
}

}  // namespace internal

// Limited-memory BFGS with a strong-Wolfe line search. `f(x, &grad)` returns
// the objective and writes the gradient. `x` is overwritten with the best
// iterate found; the returned value never exceeds the initial one.
template <typename Objective>
SolverSummary MinimizeLbfgs(const Objective& f, Eigen::VectorXd& x,
                            const SolverSettings& settings) {
  settings.Validate();
  using Vector = Eigen::VectorXd;
  SolverSummary summary;

  Vector g(x.size());
  double fx = f(x, &g);
  ++summary.evaluations;
  summary.initial_value = fx;
  summary.final_value = fx;
  summary.gradient_norm = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
  if (!std::isfinite(fx)) {
    throw Error(ErrorCode::kInvalidConfig, "objective is not finite at the initial point");
  }

  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  std::deque<double> rho_hist;

  Vector x_trial(x.size());
  Vector g_trial(x.size());
  Vector d(x.size());

  for (int iter = 0;; ++iter) {
    if (summary.gradient_norm <= settings.gradient_tolerance) {
      summary.status = SolverStatus::kConverged;
      break;
    }
    if (iter >= settings.max_iterations) {
      summary.status = SolverStatus::kMaxIterations;
      break;
    }

    // Two-loop recursion for d = -H g.
    d = -g;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (m > 0) {
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (int i = 0; i < m; ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }
    double d0 = g.dot(d);
    if (!(d0 < 0.0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      d0 = g.dot(d);
    }

    // Strong-Wolfe line search (bracketing then zoom).
    const double f0 = fx;
    double step = m > 0 ? 1.0 : 1.0 / std::max(1.0, d.norm());
    double prev_step = 0.0;
    double prev_f = f0;
    double prev_df = d0;
    double best_step = 0.0;
    double best_f = f0;
    double accepted = -1.0;
    int evals = 0;
    double last_step = -1.0;
    double last_f = 0.0;

    auto eval = [&](double a, double* df) {
      last_step = a;
      x_trial = x + a * d;
      const double v = f(x_trial, &g_trial);
      ++evals;
      ++summary.evaluations;
      *df = g_trial.dot(d);
      last_f = v;
      if (std::isfinite(v) && v < best_f && v <= f0 + settings.wolfe_c1 * a * d0) {
        best_f = v;
        best_step = a;
      }
      return v;
    };

    auto zoom = [&](double lo, double f_lo, double df_lo, double hi, double f_hi,
                    double df_hi) -> double {
      while (evals < settings.max_line_search_evaluations) {
        const double a = internal::CubicStep(lo, f_lo, df_lo, hi, f_hi, df_hi);
        double df_a = 0.0;
        const double f_a = eval(a, &df_a);
        if (!std::isfinite(f_a) || f_a > f0 + settings.wolfe_c1 * a * d0 || f_a >= f_lo) {
          hi = a;
          f_hi = std::isfinite(f_a) ? f_a : std::numeric_limits<double>::max();
          df_hi = std::isfinite(df_a) ? df_a : 0.0;
        } else {
          if (std::abs(df_a) <= -settings.wolfe_c2 * d0) return a;
          if (df_a * (hi - lo) >= 0.0) {
            hi = lo;
            f_hi = f_lo;
            df_hi = df_lo;
          }
          lo = a;
          f_lo = f_a;
          df_lo = df_a;
        }
        if (std::abs(hi - lo) <= 1e-16 * std::max(1.0, std::abs(lo))) break;
      }
      return -1.0;
    };

    while (evals < settings.max_line_search_evaluations) {
      double df = 0.0;
      const double fa = eval(step, &df);
      if (!std::isfinite(fa) || fa > f0 + settings.wolfe_c1 * step * d0 ||
          (evals > 1 && fa >= prev_f)) {
        accepted = zoom(prev_step, prev_f, prev_df, step,
                        std::isfinite(fa) ? fa : std::numeric_limits<double>::max(),
                        std::isfinite(df) ? df : 0.0);
        break;
      }
      if (std::abs(df) <= -settings.wolfe_c2 * d0) {
        accepted = step;
        break;
      }
      if (df >= 0.0) {
        accepted = zoom(step, fa, df, prev_step, prev_f, prev_df);
        break;
      }
      prev_step = step;
      prev_f = fa;
      prev_df = df;
      step *= 2.0;
    }

    if (accepted < 0.0) {
      if (best_step > 0.0) {
        // Wolfe curvature not met, but a sufficient decrease was seen.
        x += best_step * d;
        fx = f(x, &g);
        ++summary.evaluations;
      }
      summary.iterations = iter + 1;
      summary.status = SolverStatus::kLineSearchFailure;
      summary.final_value = fx;
      summary.gradient_norm = g.cwiseAbs().maxCoeff();
      return summary;
    }

    // Re-evaluate at the accepted step when the last trial was elsewhere.
    double f_new = last_f;
    if (accepted != last_step) {
      x_trial = x + accepted * d;
      f_new = f(x_trial, &g_trial);
      ++summary.evaluations;
    }

    Vector s = x_trial - x;
    Vector y = g_trial - g;
    const double sy = s.dot(y);
    x = x_trial;
    g = g_trial;
    fx = f_new;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > settings.history_size) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    summary.iterations = iter + 1;
    summary.gradient_norm = g.cwiseAbs().maxCoeff();
    summary.final_value = fx;
  }
  summary.final_value = fx;
  return summary;
}

}  // namespace vifuse
