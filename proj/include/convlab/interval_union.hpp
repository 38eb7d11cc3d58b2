#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "convlab/errors.hpp"

namespace convlab {

// Union of open intervals with integer endpoints (endpoints are in units of
// the grid step h, so "grid-aligned" sets are represented exactly).
// Intervals are kept sorted, disjoint and non-adjacent-merged.  Open vs
// half-open does not matter for the measure or for sumsets of unions of
// open intervals, so we only track endpoints.
class IntervalUnion {
public:
  struct Interval {
    std::int64_t lo, hi; // (lo, hi), lo < hi
  };

  IntervalUnion() = default;

  static IntervalUnion single(std::int64_t lo, std::int64_t hi) {
    if (lo >= hi)
      throw validation_error("IntervalUnion: empty or inverted interval");
    IntervalUnion u;
    u.parts_.push_back({lo, hi});
    return u;
  }

  static IntervalUnion from_pairs(const std::vector<std::pair<std::int64_t, std::int64_t>> &ps) {
    std::vector<Interval> raw;
    raw.reserve(ps.size());
    for (auto &[a, b] : ps) {
      if (a >= b)
        throw validation_error("IntervalUnion: empty or inverted interval");
      raw.push_back({a, b});
    }
    return normalized(std::move(raw));
  }

  bool empty() const { return parts_.empty(); }
  const std::vector<Interval> &parts() const { return parts_; }

  // Total length in integer units.
  std::int64_t measure() const {
    std::int64_t m = 0;
    for (auto &p : parts_)
      m += p.hi - p.lo;
    return m;
  }

  // Minkowski sum: union over pairs of (lo1+lo2, hi1+hi2).
  friend IntervalUnion sumset(const IntervalUnion &a, const IntervalUnion &b) {
    std::vector<Interval> raw;
    raw.reserve(a.parts_.size() * b.parts_.size());
    for (auto &p : a.parts_)
      for (auto &q : b.parts_)
        raw.push_back({p.lo + q.lo, p.hi + q.hi});
    return normalized(std::move(raw));
  }

  // Sumset on a circle of circumference `period`: wrap each summed interval
  // modulo period; a part of length >= period covers the whole circle.
  friend IntervalUnion sumset_mod(const IntervalUnion &a, const IntervalUnion &b,
                                  std::int64_t period) {
    std::vector<Interval> raw;
    for (auto &p : a.parts_)
      for (auto &q : b.parts_) {
        std::int64_t lo = p.lo + q.lo, hi = p.hi + q.hi;
        if (hi - lo >= period) {
          raw.push_back({0, period});
          continue;
        }
        std::int64_t s = ((lo % period) + period) % period;
        std::int64_t e = s + (hi - lo);
        if (e <= period) {
          raw.push_back({s, e});
        } else {
          raw.push_back({s, period});
          raw.push_back({0, e - period});
        }
      }
    return normalized(std::move(raw));
  }

private:
  static IntervalUnion normalized(std::vector<Interval> raw) {
    IntervalUnion u;
    if (raw.empty())
      return u;
    std::sort(raw.begin(), raw.end(),
              [](const Interval &x, const Interval &y) { return x.lo < y.lo; });
    // Unions of open intervals: touching endpoints stay separate in set
    // terms, but the single missing point is null for the measure and the
    // support-set computation, so merge touching parts.
    for (auto &iv : raw) {
      if (!u.parts_.empty() && iv.lo <= u.parts_.back().hi)
        u.parts_.back().hi = std::max(u.parts_.back().hi, iv.hi);
      else
        u.parts_.push_back(iv);
    }
    return u;
  }

  std::vector<Interval> parts_;
};

} // namespace convlab
