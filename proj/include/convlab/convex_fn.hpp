#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "convlab/errors.hpp"

namespace convlab {

// The hinge family f_t(y) = max(y - t, 0).
inline double eval_ft(double t, double y) {
  if (t < 0)
    throw validation_error("eval_ft: t must be >= 0");
  return y > t ? y - t : 0.0;
}

// An evaluable convex test function on [0, Ymax] with f(0) = 0, with an
// exact antiderivative where the family has one.
class ConvexFn {
public:
  using Evaluator = std::function<double(double)>;

  static ConvexFn ft(double t) {
    ConvexFn f;
    f.family_ = "ft";
    f.param_ = t;
    f.eval_ = [t](double y) { return eval_ft(t, y); };
    f.antideriv_ = [t](double y) { return y > t ? (y - t) * (y - t) / 2.0 : 0.0; };
    f.lip_ = [](double) { return 1.0; };
    return f;
  }

  // y^p, p >= 1 (convex).
  static ConvexFn power(double p) {
    if (p < 1)
      throw validation_error("ConvexFn::power: p must be >= 1");
    ConvexFn f;
    f.family_ = "power";
    f.param_ = p;
    f.eval_ = [p](double y) { return std::pow(y, p); };
    f.antideriv_ = [p](double y) { return std::pow(y, p + 1) / (p + 1); };
    f.lip_ = [p](double i1) { return p * std::pow(i1, p - 1); };
    return f;
  }

  // -y^p, 0 < p <= 1 (convex).
  static ConvexFn negpower(double p) {
    if (!(p > 0) || p > 1)
      throw validation_error("ConvexFn::negpower: p must be in (0, 1]");
    ConvexFn f;
    f.family_ = "negpower";
    f.param_ = p;
    f.eval_ = [p](double y) { return -std::pow(y, p); };
    f.antideriv_ = [p](double y) { return -std::pow(y, p + 1) / (p + 1); };
    return f;
  }

  // y log y with the continuous extension 0 log 0 := 0.
  static ConvexFn entropy() {
    ConvexFn f;
    f.family_ = "entropy";
    f.eval_ = [](double y) { return y > 0 ? y * std::log(y) : 0.0; };
    f.antideriv_ = [](double y) {
      return y > 0 ? y * y / 2.0 * (std::log(y) - 0.5) : 0.0;
    };
    return f;
  }

  // Convex piecewise-linear interpolant of (y_i, f_i) breakpoints.
  static ConvexFn piecewise_linear(std::vector<std::pair<double, double>> pts) {
    if (pts.size() < 2)
      throw validation_error("ConvexFn::piecewise_linear: need >= 2 breakpoints");
    std::sort(pts.begin(), pts.end());
    if (pts.front().first != 0.0 || pts.front().second != 0.0)
      throw validation_error("ConvexFn::piecewise_linear: must start at (0, 0)");
    ConvexFn f;
    f.family_ = "piecewise_linear";
    f.ymax_ = pts.back().first;
    f.eval_ = [pts](double y) {
      auto it = std::lower_bound(pts.begin() + 1, pts.end(), std::make_pair(y, -1e300));
      if (it == pts.end())
        --it;
      auto [y2, v2] = *it;
      auto [y1, v1] = *(it - 1);
      return v1 + (v2 - v1) * (y - y1) / (y2 - y1);
    };
    f.antideriv_ = [pts](double y) {
      double acc = 0.0;
      for (size_t i = 1; i < pts.size(); ++i) {
        auto [y1, v1] = pts[i - 1];
        auto [y2, v2] = pts[i];
        double hi = std::min(y, y2);
        if (hi <= y1)
          break;
        double vh = v1 + (v2 - v1) * (hi - y1) / (y2 - y1);
        acc += (v1 + vh) * (hi - y1) / 2.0;
      }
      return acc;
    };
    return f;
  }

  static ConvexFn custom(Evaluator eval, std::optional<Evaluator> antideriv = std::nullopt) {
    ConvexFn f;
    f.family_ = "custom";
    f.eval_ = std::move(eval);
    if (antideriv)
      f.antideriv_ = std::move(*antideriv);
    return f;
  }

  double operator()(double y) const { return eval_(y); }
  const std::string &family() const { return family_; }
  double param() const { return param_; }
  double ymax() const { return ymax_; }
  ConvexFn &with_ymax(double ymax) {
    ymax_ = ymax;
    return *this;
  }

  bool has_exact_antiderivative() const { return static_cast<bool>(antideriv_); }

  // Integral of f over [0, y]: closed form when available, otherwise
  // composite Simpson with a fixed 4096 panels.
  double antiderivative(double y) const {
    if (antideriv_)
      return antideriv_(y);
    const int panels = 4096;
    const double h = y / panels;
    double acc = eval_(0.0) + eval_(y);
    for (int i = 1; i < panels; ++i)
      acc += (i % 2 ? 4.0 : 2.0) * eval_(i * h);
    return acc * h / 3.0;
  }

  // An upper bound on the Lipschitz constant of f on [y_floor, i1],
  // estimated by sampled finite differences when no closed form exists.
  double lipschitz_bound(double i1, double y_floor = 1e-3) const {
    if (lip_)
      return lip_(i1);
    const int samples = 1024;
    const double lo = std::min(y_floor, i1 / 2);
    double best = 0.0;
    double prev_y = lo, prev_v = eval_(lo);
    for (int i = 1; i <= samples; ++i) {
      double y = lo + (i1 - lo) * i / samples;
      double v = eval_(y);
      best = std::max(best, std::abs(v - prev_v) / (y - prev_y));
      prev_y = y;
      prev_v = v;
    }
    return best;
  }

private:
  std::string family_;
  double param_ = 0.0;
  double ymax_ = 1.0;
  Evaluator eval_;
  Evaluator antideriv_;
  std::function<double(double)> lip_;
};

// Chord of f through (y1, f(y1)) and (y2, f(y2)) evaluated at y.
inline double chord(const ConvexFn &f, double y1, double y2, double y) {
  if (!(y1 < y2))
    throw validation_error("chord: require y1 < y2");
  if (y < y1 || y > y2)
    throw validation_error("chord: y outside [y1, y2]");
  return ((y2 - y) * f(y1) + (y - y1) * f(y2)) / (y2 - y1);
}

// Chord-minus-function gap; nonnegative for convex f.
inline double gap(const ConvexFn &f, double y1, double y2, double y) {
  return chord(f, y1, y2, y) - f(y);
}

// Sampled convexity certificate on a 1024-point grid over [0, ymax].
inline bool is_convex_sampled(const ConvexFn &f, double ymax, double tol = 1e-12) {
  const int n = 1024;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i)
    v[i] = f(ymax * i / n);
  for (int i = 1; i < n; ++i)
    if (v[i] > (v[i - 1] + v[i + 1]) / 2.0 + tol)
      return false;
  return true;
}

// Piecewise-linear upper approximation f_(n) on [0, 1], evaluated as the
// chord of f on the subinterval [(j-1)/n, j/n] containing y.
inline double pl_approx(const ConvexFn &f, int n, double y) {
  if (n < 1)
    throw validation_error("pl_approx: n must be >= 1");
  if (y < 0 || y > 1)
    throw validation_error("pl_approx: y outside [0, 1]");
  int j = static_cast<int>(std::ceil(y * n));
  j = std::clamp(j, 1, n);
  const double y1 = static_cast<double>(j - 1) / n, y2 = static_cast<double>(j) / n;
  return ((y2 - y) * f(y1) + (y - y1) * f(y2)) / (y2 - y1);
}

// The same f_(n) by its defining sum over hinge functions:
// n ( f(1/n) y + 2 sum_{k=1}^{n-1} gap_k f_{k/n}(y) ) with
// gap_k the midpoint chord gap of f on [(k-1)/n, (k+1)/n].
inline double pl_approx_sum(const ConvexFn &f, int n, double y) {
  if (n < 1)
    throw validation_error("pl_approx_sum: n must be >= 1");
  double acc = f(1.0 / n) * y;
  for (int k = 1; k < n; ++k) {
    const double g =
        0.5 * (f(static_cast<double>(k - 1) / n) + f(static_cast<double>(k + 1) / n)) -
        f(static_cast<double>(k) / n);
    acc += 2.0 * g * eval_ft(static_cast<double>(k) / n, y);
  }
  return n * acc;
}

// Right side of the main inequality: 2 int_0^{I1} f + (I2 - I1) f(I1).
inline double rhs_bound(const ConvexFn &f, double i1, double i2) {
  if (i1 > i2)
    throw validation_error("rhs_bound: require I1 <= I2");
  return 2.0 * f.antiderivative(i1) + (i2 - i1) * f(i1);
}

enum class LpSign { Convex, Concave };

// Closed-form L^p bounds: ||phi1||^p (||phi2|| -+ (p-1)||phi1||/(p+1)).
inline double lp_bound(double p, double i1, double i2, LpSign sign) {
  if (i1 > i2)
    throw validation_error("lp_bound: require I1 <= I2");
  if (sign == LpSign::Convex) {
    if (p < 1)
      throw validation_error("lp_bound: convex branch needs p >= 1");
    return std::pow(i1, p) * (i2 - (p - 1) * i1 / (p + 1));
  }
  if (!(p > 0) || p > 1)
    throw validation_error("lp_bound: concave branch needs p in (0, 1]");
  return std::pow(i1, p) * (i2 + (1 - p) * i1 / (p + 1));
}

} // namespace convlab
