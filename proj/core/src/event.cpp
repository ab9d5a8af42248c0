#include "sublex/event.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sublex/errors.hpp"

namespace sublex {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Event Event::empty() { return Event{}; }

Event Event::real_line() { return interval(-kInf, kInf); }

Event Event::interval(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
    throw ConfigError("event interval requires lo < hi");
  }
  if (lo == kInf || hi == -kInf) {
    throw ConfigError("event interval bounds out of range");
  }
  Event e;
  e.pieces_.push_back(Interval{lo, hi});
  return e;
}

Event Event::ray_ge(double t) { return interval(t, kInf); }

Event Event::ray_lt(double t) { return interval(-kInf, t); }

Event Event::union_of(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& iv) { return !(iv.lo < iv.hi); });
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  Event e;
  for (const Interval& iv : pieces) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi)) {
      throw ConfigError("event interval bounds must not be NaN");
    }
    if (!e.pieces_.empty() && iv.lo <= e.pieces_.back().hi) {
      // [a,b) and [b,c) describe the same set as [a,c): merge touching pieces.
      e.pieces_.back().hi = std::max(e.pieces_.back().hi, iv.hi);
    } else {
      e.pieces_.push_back(iv);
    }
  }
  return e;
}

Event Event::complement() const {
  Event out;
  double cursor = -kInf;
  for (const Interval& iv : pieces_) {
    if (cursor < iv.lo) out.pieces_.push_back(Interval{cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < kInf) out.pieces_.push_back(Interval{cursor, kInf});
  return out;
}

Event Event::united(const Event& other) const {
  std::vector<Interval> all = pieces_;
  all.insert(all.end(), other.pieces_.begin(), other.pieces_.end());
  return union_of(std::move(all));
}

double Event::prob_under(const Distribution& d) const {
  double p = 0.0;
  for (const Interval& iv : pieces_) {
    p += d.interval_prob(iv.lo, iv.hi);
  }
  return std::min(p, 1.0);
}

}  // namespace sublex
