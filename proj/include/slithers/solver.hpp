#pragma once

// Box-constrained minimization by projected limited-memory quasi-Newton
// descent. Iterates stay exactly inside [lower, upper] (projection, not
// penalty) and the accepted cost sequence is non-increasing by construction.
//
// Non-finite trial values are treated as out-of-chart and rejected by the
// line search, so objectives may return +inf to fence off invalid regions.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "slithers/errors.hpp"

namespace slithers {

struct SolverOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;  // on the infinity norm of x - P(x - g)
  double step_tolerance = 1e-10;     // on the 2-norm of accepted steps
  int memory = 10;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 45;
  // When a full step passes Armijo, keep doubling while the decrease holds;
  // stands in for the curvature condition and un-sticks a collapsed Hessian
  // scale (narrow-valley objectives). The norm cap keeps expansion from
  // leaping into distant basins (e.g. 2*pi joint wraps).
  int max_expansions = 30;
  double max_expansion_step = 1.0;
  // When set, receives the accepted cost sequence (f at x0 first).
  std::vector<double>* cost_trace = nullptr;
};

struct SolverResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  double projected_gradient_norm = std::numeric_limits<double>::infinity();
};

namespace detail {

inline Eigen::VectorXd clampToBox(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& lo,
                                  const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Two-loop L-BFGS recursion over the stored curvature pairs.
inline Eigen::VectorXd lbfgsDirection(
    const Eigen::VectorXd& g,
    const std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs) {
  Eigen::VectorXd q = -g;
  if (pairs.empty()) return q;
  std::vector<double> alpha(pairs.size());
  for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
    const auto& [s, y] = pairs[i];
    const double rho = 1.0 / y.dot(s);
    alpha[i] = rho * s.dot(q);
    q -= alpha[i] * y;
  }
  const auto& [s_last, y_last] = pairs.back();
  q *= s_last.dot(y_last) / y_last.squaredNorm();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [s, y] = pairs[i];
    const double rho = 1.0 / y.dot(s);
    const double beta = rho * y.dot(q);
    q += (alpha[i] - beta) * s;
  }
  return q;
}

}  // namespace detail

// Minimizes f over the box [lower, upper] starting from x0 (projected inside
// first). grad is only evaluated at accepted, finite points. f(x0) must be
// finite.
inline SolverResult minimizeBox(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, const SolverOptions& opts = {}) {
  const auto dim = x0.size();
  if (lower.size() != dim || upper.size() != dim) {
    throw DimensionError("minimizeBox: bounds do not match variable size");
  }

  Eigen::VectorXd x = detail::clampToBox(x0, lower, upper);
  double fx = f(x);
  if (!std::isfinite(fx)) {
    throw Error("minimizeBox: objective not finite at the start point");
  }
  if (opts.cost_trace) {
    opts.cost_trace->clear();
    opts.cost_trace->push_back(fx);
  }

  Eigen::VectorXd g = grad(x);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;

  SolverResult result;
  result.x = x;
  result.value = fx;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    result.iterations = iter;
    const double pg_norm =
        (x - detail::clampToBox(x - g, lower, upper)).cwiseAbs().maxCoeff();
    result.projected_gradient_norm = pg_norm;
    if (pg_norm < opts.gradient_tolerance) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    Eigen::VectorXd x_next;
    double f_next = fx;
    if (g.norm() == 0.0) {
      result.converged = true;  // smooth stationary point
      break;
    }

    // L-BFGS direction first, projected steepest descent as the fallback. A
    // quasi-Newton direction that only passes Armijo at a microscopic step
    // means the local quadratic model is broken (typical at the kink of a
    // plain norm); it is discarded rather than accepted.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool quasi_newton = attempt == 0 && !pairs.empty();
      // Steepest descent runs on the normalized gradient: an unscaled -g step
      // can leave the box so far that projection lands on an arbitrary corner.
      Eigen::VectorXd d = quasi_newton
                              ? detail::lbfgsDirection(g, pairs)
                              : Eigen::VectorXd(-g / g.norm());
      if (g.dot(d) >= 0.0) {
        if (quasi_newton) pairs.clear();  // memory no longer models descent
        continue;
      }
      const auto sufficient = [&](const Eigen::VectorXd& candidate,
                                  double fc) {
        const double slope = g.dot(candidate - x);
        return std::isfinite(fc)
               && fc <= fx + opts.armijo_c1 * std::min(slope, 0.0) && fc < fx;
      };
      const double alpha_min = quasi_newton ? 1e-8 : 0.0;
      double alpha = 1.0;
      for (int bt = 0; bt < opts.max_backtracks && alpha > alpha_min; ++bt) {
        const Eigen::VectorXd candidate =
            detail::clampToBox(x + alpha * d, lower, upper);
        const Eigen::VectorXd step = candidate - x;
        if (step.cwiseAbs().maxCoeff() == 0.0) break;  // fully blocked
        const double fc = f(candidate);
        if (sufficient(candidate, fc)) {
          x_next = candidate;
          f_next = fc;
          accepted = true;
          break;
        }
        alpha *= opts.backtrack_factor;
      }
      if (accepted && alpha == 1.0) {
        for (int ex = 0; ex < opts.max_expansions; ++ex) {
          alpha *= 2.0;
          const Eigen::VectorXd candidate =
              detail::clampToBox(x + alpha * d, lower, upper);
          if ((candidate - x_next).cwiseAbs().maxCoeff() == 0.0) break;
          if ((candidate - x).norm() > opts.max_expansion_step) break;
          const double fc = f(candidate);
          if (!sufficient(candidate, fc) || fc >= f_next) break;
          x_next = candidate;
          f_next = fc;
        }
      }
    }

    if (!accepted) {
      // Gradient directions are blocked (kink of one of the norm terms). A
      // coordinate pattern search still escapes most kinks; only when every
      // axis fails too is the point treated as the minimizer.
      for (Eigen::Index c = 0; c < dim && !accepted; ++c) {
        for (double sign : {1.0, -1.0}) {
          double h = 1.0;
          bool improved = false;
          for (int bt = 0; bt < opts.max_backtracks && !improved; ++bt) {
            Eigen::VectorXd candidate = x;
            candidate[c] =
                std::clamp(x[c] + sign * h, lower[c], upper[c]);
            if (candidate[c] != x[c]) {
              const double fc = f(candidate);
              if (std::isfinite(fc) && fc < fx - 1e-15 * std::abs(fx)) {
                x_next = candidate;
                f_next = fc;
                accepted = true;
                improved = true;
                break;
              }
            }
            h *= opts.backtrack_factor;
          }
          if (improved) break;
        }
      }
      if (!accepted) {
        result.converged = true;
        break;
      }
    }

    const Eigen::VectorXd s = x_next - x;
    const Eigen::VectorXd g_next = grad(x_next);
    const Eigen::VectorXd y = g_next - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      pairs.emplace_back(s, y);
      while (static_cast<int>(pairs.size()) > opts.memory) pairs.pop_front();
    }

    x = x_next;
    fx = f_next;
    g = g_next;
    result.x = x;
    result.value = fx;
    result.iterations = iter + 1;
    if (opts.cost_trace) opts.cost_trace->push_back(fx);

    if (s.norm() < opts.step_tolerance) {
      result.converged = true;
      break;
    }
  }

  return result;
}

}  // namespace slithers
