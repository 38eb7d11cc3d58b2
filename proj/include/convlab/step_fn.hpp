#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "convlab/errors.hpp"
#include "convlab/group_model.hpp"

namespace convlab {

// A nonnegative step function on a GroupModel, one value per cell.
// Optionally carries an exact rational representation: when exact_denom is
// set, values[i] * exact_denom is an integer for every cell (stored in
// exact_num).  Exact-mode checkers use the numerators directly.
class StepFn {
public:
  StepFn(GroupModelPtr model, std::vector<double> values,
         std::optional<double> range_cap = 1.0)
      : model_(std::move(model)), values_(std::move(values)), range_cap_(range_cap) {
    if (static_cast<int>(values_.size()) != model_->size())
      throw validation_error("StepFn: value count != cell count");
    for (double v : values_) {
      if (!(v >= 0.0))
        throw validation_error("StepFn: negative value");
      if (range_cap_ && v > *range_cap_)
        throw validation_error("StepFn: value exceeds range cap");
    }
  }

  static StepFn zero(GroupModelPtr model) {
    std::vector<double> vals(model->size(), 0.0);
    return StepFn(std::move(model), std::move(vals));
  }

  // Exact construction from integer numerators over a common denominator.
  static StepFn exact(GroupModelPtr model, std::vector<std::int64_t> num,
                      std::int64_t denom, std::optional<double> range_cap = 1.0) {
    if (denom <= 0)
      throw validation_error("StepFn::exact: denominator must be positive");
    std::vector<double> vals(num.size());
    for (size_t i = 0; i < num.size(); ++i)
      vals[i] = static_cast<double>(num[i]) / static_cast<double>(denom);
    StepFn fn(std::move(model), std::move(vals), range_cap);
    fn.exact_num_ = std::move(num);
    fn.exact_denom_ = denom;
    return fn;
  }

  const GroupModelPtr &model() const { return model_; }
  const std::vector<double> &values() const { return values_; }
  double operator[](int cell) const { return values_[cell]; }
  std::optional<double> range_cap() const { return range_cap_; }

  bool is_exact() const { return exact_denom_.has_value(); }
  std::int64_t exact_denom() const { return *exact_denom_; }
  const std::vector<std::int64_t> &exact_num() const { return exact_num_; }

  bool same_model(const StepFn &other) const { return model_ == other.model_; }

private:
  GroupModelPtr model_;
  std::vector<double> values_;
  std::optional<double> range_cap_;
  std::optional<std::int64_t> exact_denom_;
  std::vector<std::int64_t> exact_num_;
};

// L1 norm over all cells or a cell subset, summed in ascending cell order.
inline double l1_norm(const StepFn &fn) {
  double s = 0.0;
  for (double v : fn.values())
    s += v;
  return s * fn.model()->weight();
}

inline double l1_norm(const StepFn &fn, std::span<const int> region) {
  double s = 0.0;
  for (int c : region)
    s += fn[c];
  return s * fn.model()->weight();
}

// Per-coset masses P(g) := ||phi||_{g G0}.
struct MassProfile {
  std::vector<double> mass; // coset id -> mass

  double total() const {
    double s = 0.0;
    for (double m : mass)
      s += m;
    return s;
  }
};

inline MassProfile coset_masses(const StepFn &fn, const CosetStructure &cs) {
  if (cs.model != fn.model())
    throw model_mismatch_error("coset_masses: coset structure for a different model");
  MassProfile p;
  p.mass.assign(cs.num_cosets(), 0.0);
  for (int c = 0; c < fn.model()->size(); ++c)
    p.mass[cs.coset_of[c]] += fn[c];
  for (double &m : p.mass)
    m *= fn.model()->weight();
  return p;
}

enum class Side { Left, Right };

// L_g phi(g') = phi(g^-1 g'), R_g phi(g') = phi(g' g).
inline StepFn translate(const StepFn &fn, int g, Side side) {
  const auto &model = *fn.model();
  if (g < 0 || g >= model.size())
    throw validation_error("translate: cell out of range");
  std::vector<double> out(model.size(), 0.0);
  std::vector<char> used(model.size(), 0);
  const int gi = model.inverse(g);
  for (int c = 0; c < model.size(); ++c) {
    int src = side == Side::Left ? model.compose(gi, c) : model.compose(c, g);
    if (src == GroupModel::kOverflow) {
      // A translated line cell left the grid; only an error if it carried mass.
      continue;
    }
    out[c] = fn[src];
    used[src] = 1;
  }
  if (model.kind == GroupKind::RealLineGrid || model.kind == GroupKind::Product) {
    for (int c = 0; c < model.size(); ++c)
      if (!used[c] && fn[c] != 0.0)
        throw overflow_error("translate: support pushed outside the grid range");
  }
  return StepFn(fn.model(), std::move(out), fn.range_cap());
}

// Characteristic function of the centered interval (-I/2, I/2) on a
// RealLineGrid, with fractional values on boundary cells so that the mass
// is exactly I.
inline StepFn indicator_interval(GroupModelPtr model, double interval_length) {
  if (model->kind != GroupKind::RealLineGrid)
    throw validation_error("indicator_interval: RealLineGrid required");
  if (interval_length < 0)
    throw validation_error("indicator_interval: negative length");
  const double h = model->step();
  const int N = model->half_count();
  const double half = interval_length / 2.0;
  if (half > (N + 0.5) * h)
    throw validation_error("indicator_interval: interval exceeds grid extent");
  std::vector<double> vals(model->size(), 0.0);
  double acc = 0.0;
  for (int s = -N; s <= N; ++s) {
    const double lo = s * h - h / 2.0, hi = s * h + h / 2.0;
    const double ov = std::min(hi, half) - std::max(lo, -half);
    if (ov > 0)
      vals[model->cell_of_signed(s)] = std::min(1.0, ov / h);
    acc += std::max(ov, 0.0);
  }
  // Pin the mass to I: absorb the float residue in cells with room.
  (void)acc;
  double s = 0.0;
  for (double v : vals)
    s += v;
  double residue = interval_length - s * h;
  // Only fractional cells absorb, so the support is untouched.
  for (std::size_t i = 0; i < vals.size() && residue != 0.0; ++i) {
    if (vals[i] <= 0.0 || vals[i] >= 1.0)
      continue;
    double d = std::clamp(residue / h, -vals[i], 1.0 - vals[i]);
    vals[i] += d;
    residue -= d * h;
  }
  if (residue != 0.0 && interval_length > 0) {
    int c0 = model->cell_of_signed(0);
    vals[c0] = std::clamp(vals[c0] + residue / h, 0.0, 1.0);
  }
  for (double &v : vals)
    v = std::clamp(v, 0.0, 1.0);
  return StepFn(model, std::move(vals));
}

// Arc indicator of given length centered at `center` on a CircleGrid, with
// fractional boundary cells; mass is exact up to one float residue fix.
inline StepFn indicator_arc(GroupModelPtr model, double center, double arc_length) {
  if (model->kind != GroupKind::CircleGrid)
    throw validation_error("indicator_arc: CircleGrid required");
  const double V = model->total_volume();
  if (arc_length < 0 || arc_length > V)
    throw validation_error("indicator_arc: bad length");
  const double hc = model->weight();
  const double lo = center - arc_length / 2.0, hi = center + arc_length / 2.0;
  std::vector<double> vals(model->size(), 0.0);
  for (int i = 0; i < model->size(); ++i) {
    double cl = i * hc, ch = (i + 1) * hc;
    double ov = 0.0;
    for (int k = -2; k <= 2; ++k) { // arc may wrap
      double a = std::max(cl + k * V, lo), b = std::min(ch + k * V, hi);
      if (b > a)
        ov += b - a;
    }
    vals[i] = std::min(1.0, ov / hc);
  }
  StepFn fn(model, std::move(vals));
  double residue = arc_length - l1_norm(fn);
  if (residue != 0.0 && model->size() > 0) {
    auto v = fn.values();
    int c0 = static_cast<int>(center / hc) % model->size();
    if (c0 < 0)
      c0 += model->size();
    v[c0] = std::min(1.0, std::max(0.0, v[c0] + residue / hc));
    fn = StepFn(model, std::move(v));
  }
  return fn;
}

// Indicator of an explicit cell set (exact representation on any model).
inline StepFn indicator_cells(GroupModelPtr model, std::span<const int> cells) {
  std::vector<std::int64_t> num(model->size(), 0);
  for (int c : cells) {
    if (c < 0 || c >= model->size())
      throw validation_error("indicator_cells: cell out of range");
    num[c] = 1;
  }
  return StepFn::exact(std::move(model), std::move(num), 1);
}

enum class PointwiseOp { Min, Max, Product };

inline StepFn pointwise(const StepFn &a, const StepFn &b, PointwiseOp op) {
  if (!a.same_model(b))
    throw model_mismatch_error("pointwise: model mismatch");
  std::vector<double> out(a.values().size());
  for (size_t i = 0; i < out.size(); ++i) {
    switch (op) {
    case PointwiseOp::Min:
      out[i] = std::min(a.values()[i], b.values()[i]);
      break;
    case PointwiseOp::Max:
      out[i] = std::max(a.values()[i], b.values()[i]);
      break;
    case PointwiseOp::Product:
      out[i] = a.values()[i] * b.values()[i];
      break;
    }
  }
  return StepFn(a.model(), std::move(out), a.range_cap());
}

// a*phi + b*psi with the cap re-validated on the result.
inline StepFn affine(double ca, const StepFn &a, double cb, const StepFn &b,
                     std::optional<double> cap = 1.0) {
  if (!a.same_model(b))
    throw model_mismatch_error("affine: model mismatch");
  std::vector<double> out(a.values().size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = ca * a.values()[i] + cb * b.values()[i];
  return StepFn(a.model(), std::move(out), cap);
}

// Random member of B(I) = { phi : G -> [0,1], ||phi|| = I }: uniform values
// water-filled by a common additive shift until the mass hits I, then one
// unsaturated cell absorbs the residue.  Deterministic per seed.
inline StepFn sample_B(GroupModelPtr model, double target_mass, std::uint64_t seed) {
  const double total = model->total_volume();
  if (target_mass < 0 || target_mass > total * (1 + 1e-12))
    throw validation_error("sample_B: target mass outside [0, total volume]");
  const int n = model->size();
  const double w = model->weight();
  if (target_mass == 0.0)
    return StepFn(model, std::vector<double>(n, 0.0));
  if (target_mass >= total)
    return StepFn(model, std::vector<double>(n, 1.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> base(n);
  for (double &v : base)
    v = uni(rng);
  auto mass_at = [&](double theta) {
    double s = 0.0;
    for (double v : base)
      s += std::clamp(v + theta, 0.0, 1.0);
    return s * w;
  };
  double lo = -1.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (mass_at(mid) < target_mass ? lo : hi) = mid;
  }
  double theta = 0.5 * (lo + hi);
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i)
    vals[i] = std::clamp(base[i] + theta, 0.0, 1.0);
  // Absorb the bisection residue in one unsaturated cell.
  double s = 0.0;
  for (double v : vals)
    s += v;
  double residue = target_mass - s * w;
  for (int i = 0; i < n && residue != 0.0; ++i) {
    double room = residue > 0 ? 1.0 - vals[i] : vals[i];
    double d = std::clamp(residue / w, -vals[i], 1.0 - vals[i]);
    (void)room;
    vals[i] += d;
    residue -= d * w;
  }
  for (double &v : vals)
    v = std::clamp(v, 0.0, 1.0); // shave ulp excursions from the absorption step
  return StepFn(model, std::move(vals));
}

} // namespace convlab
