#pragma once

// Bounded-iteration L-BFGS with a strong-Wolfe line search (cubic
// interpolation, sufficient-decrease constant 1e-4, curvature constant 0.1).
//
// The first iteration moves along -g with trial step step_size * min(1, 1/|g|_1)
// since no curvature is known yet; later iterations use the two-loop
// direction scaled by s^T y / y^T y and a unit trial step. Each accepted
// line-search step counts as one iteration.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include "bmpc/linalg.hpp"
#include "bmpc/rng.hpp"

namespace bmpc {

struct LbfgsConfig {
  int max_iters = 20;
  double step_size = 0.8;
  int memory = 10;
  double grad_tol = 1e-8;  // infinity norm

  void validate() const {
    // max_iters == 0 is allowed and returns the initial point unchanged.
    require(max_iters >= 0, "LbfgsConfig: max_iters must be non-negative");
    require(memory >= 1, "LbfgsConfig: memory must be at least 1");
    require(step_size > 0.0, "LbfgsConfig: step_size must be positive");
    require(grad_tol >= 0.0, "LbfgsConfig: grad_tol must be non-negative");
  }
};

// Objective returning f(x) and writing the gradient into g.
using ObjectiveFn = std::function<double(const Vector& x, Vector& g)>;

struct MinimizeResult {
  Vector x;
  double f = std::numeric_limits<double>::quiet_NaN();
  int iters = 0;
  int evaluations = 0;
  bool aborted = false;  // a non-finite value or gradient was encountered
};

namespace detail {

inline bool all_finite(double f, const Vector& g) { return std::isfinite(f) && g.allFinite(); }

// Minimizer of the cubic through (x1, f1, g1) and (x2, f2, g2), clamped to
// [lo, hi]; falls back to the midpoint when the cubic has no minimizer.
inline double cubic_minimizer(double x1, double f1, double g1, double x2, double f2, double g2,
                              double lo, double hi) {
  const double d1 = g1 + g2 - 3.0 * (f1 - f2) / (x1 - x2);
  const double d2sq = d1 * d1 - g1 * g2;
  if (d2sq >= 0.0) {
    const double d2 = std::sqrt(d2sq);
    const double t = x1 <= x2 ? x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2.0 * d2))
                              : x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2.0 * d2));
    if (std::isfinite(t)) return std::clamp(t, lo, hi);
  }
  return 0.5 * (lo + hi);
}

struct LinePoint {
  double t = 0.0;
  double f = 0.0;
  double slope = 0.0;  // g(x + t d)^T d
  Vector g;
};

enum class SearchStatus { kAccepted, kFailed, kNonFinite };

struct LineSearch {
  SearchStatus status = SearchStatus::kFailed;
  LinePoint point;
  int evaluations = 0;
};

inline LineSearch strong_wolfe(const ObjectiveFn& f, const Vector& x, const LinePoint& origin,
                               const Vector& d, double t_init) {
  constexpr double kArmijo = 1e-4;
  constexpr double kCurvature = 0.1;
  constexpr int kMaxEvaluations = 25;
  constexpr double kTolerance = 1e-9;

  LineSearch out;
  Vector g(x.size());
  auto eval = [&](double t) {
    LinePoint p;
    p.t = t;
    p.f = f(x + t * d, g);
    p.g = g;
    p.slope = g.dot(d);
    ++out.evaluations;
    return p;
  };
  auto armijo = [&](const LinePoint& p) { return p.f <= origin.f + kArmijo * p.t * origin.slope; };
  auto curvature = [&](const LinePoint& p) {
    return std::abs(p.slope) <= -kCurvature * origin.slope;
  };
  auto finish = [&](SearchStatus s, LinePoint p) {
    out.status = s;
    out.point = std::move(p);
    return out;
  };

  // Bracketing phase.
  LinePoint prev = origin;
  LinePoint lo, hi;
  double t = t_init;
  bool bracketed = false;
  while (out.evaluations < kMaxEvaluations) {
    LinePoint cur = eval(t);
    if (!all_finite(cur.f, cur.g)) return finish(SearchStatus::kNonFinite, cur);
    if (!armijo(cur) || (prev.t > 0.0 && cur.f >= prev.f)) {
      lo = prev;
      hi = cur;
      bracketed = true;
      break;
    }
    if (curvature(cur)) return finish(SearchStatus::kAccepted, cur);
    if (cur.slope >= 0.0) {
      lo = cur;
      hi = prev;
      bracketed = true;
      break;
    }
    const double next = cubic_minimizer(prev.t, prev.f, prev.slope, cur.t, cur.f, cur.slope,
                                        cur.t + 0.01 * (cur.t - prev.t), 10.0 * cur.t);
    prev = std::move(cur);
    t = next;
  }
  if (!bracketed) {
    return prev.t > 0.0 ? finish(SearchStatus::kAccepted, prev) : finish(SearchStatus::kFailed, prev);
  }

  // Zoom phase; lo always satisfies sufficient decrease (or is the origin).
  while (out.evaluations < kMaxEvaluations && std::abs(hi.t - lo.t) > kTolerance * std::max(1.0, hi.t)) {
    const double a = std::min(lo.t, hi.t), b = std::max(lo.t, hi.t);
    const double margin = 0.1 * (b - a);
    const double t_new =
        cubic_minimizer(lo.t, lo.f, lo.slope, hi.t, hi.f, hi.slope, a + margin, b - margin);
    LinePoint cur = eval(t_new);
    if (!all_finite(cur.f, cur.g)) return finish(SearchStatus::kNonFinite, cur);
    if (!armijo(cur) || cur.f >= lo.f) {
      hi = std::move(cur);
    } else {
      if (curvature(cur)) return finish(SearchStatus::kAccepted, cur);
      if (cur.slope * (hi.t - lo.t) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
  }
  return lo.t > 0.0 ? finish(SearchStatus::kAccepted, lo) : finish(SearchStatus::kFailed, lo);
}

}  // namespace detail

inline MinimizeResult minimize(const ObjectiveFn& f, const Vector& init, const LbfgsConfig& cfg) {
  cfg.validate();
  constexpr double kCurvatureFloor = 1e-12;

  MinimizeResult res;
  res.x = init;
  detail::LinePoint here;
  here.g.resize(init.size());
  here.f = f(init, here.g);
  res.evaluations = 1;
  res.f = here.f;
  if (!detail::all_finite(here.f, here.g)) {
    res.aborted = true;
    return res;
  }
  if (cfg.max_iters == 0 || here.g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) return res;

  Vector x = init;
  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  Vector alpha(cfg.memory);

  while (res.iters < cfg.max_iters) {
    const Vector& g = here.g;
    Vector d = -g;
    double t0 = 1.0;
    if (s_hist.empty()) {
      t0 = cfg.step_size * std::min(1.0, 1.0 / g.lpNorm<1>());
    } else {
      const int k = static_cast<int>(s_hist.size());
      for (int i = k - 1; i >= 0; --i) {
        alpha[i] = rho_hist[i] * s_hist[i].dot(d);
        d -= alpha[i] * y_hist[i];
      }
      d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      for (int i = 0; i < k; ++i) {
        const double beta = rho_hist[i] * y_hist[i].dot(d);
        d += (alpha[i] - beta) * s_hist[i];
      }
    }
    here.slope = g.dot(d);
    if (!(here.slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g;
      here.slope = g.dot(d);
      t0 = cfg.step_size * std::min(1.0, 1.0 / g.lpNorm<1>());
    }

    detail::LineSearch ls = detail::strong_wolfe(f, x, here, d, t0);
    res.evaluations += ls.evaluations;
    if (ls.status == detail::SearchStatus::kNonFinite) {
      res.aborted = true;
      return res;
    }
    if (ls.status == detail::SearchStatus::kFailed) break;

    Vector s = ls.point.t * d;
    Vector y = ls.point.g - g;
    const double sy = s.dot(y);
    if (sy > kCurvatureFloor) {
      if (static_cast<int>(s_hist.size()) == cfg.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    x += ls.point.t * d;
    here.f = ls.point.f;
    here.g = std::move(ls.point.g);
    ++res.iters;
    if (here.f < res.f) {
      res.f = here.f;
      res.x = x;
    }
    if (here.g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) break;
  }
  return res;
}

// Plan initialization with entries drawn from N(0, 1/H).
inline Plan random_init(int horizon, Eigen::Index p, CounterStream& stream) {
  require(horizon >= 1 && p >= 1, "random_init: horizon and p must be positive");
  const double scale = 1.0 / std::sqrt(static_cast<double>(horizon));
  Plan out(horizon, p);
  for (int t = 0; t < horizon; ++t)
    for (Eigen::Index k = 0; k < p; ++k) out(t, k) = scale * stream.normal();
  return out;
}

enum class InitScheme { kRandomGaussian, kSepMpcWarmStart };

}  // namespace bmpc
