#include "sublex/ambiguity_set.hpp"

#include <algorithm>
#include <cmath>

#include "sublex/errors.hpp"

namespace sublex {

AmbiguitySet::AmbiguitySet(std::vector<Distribution> members)
    : members_(std::move(members)) {
  if (members_.empty()) {
    throw ConfigError("ambiguity set needs at least one member");
  }
  for (const Distribution& d : members_) {
    if (!std::isfinite(d.mean())) {
      throw ConfigError("ambiguity set member has non-finite mean");
    }
  }
}

std::pair<double, double> AmbiguitySet::mean_interval() const {
  double lo = members_.front().mean();
  double hi = lo;
  for (const Distribution& d : members_) {
    lo = std::min(lo, d.mean());
    hi = std::max(hi, d.mean());
  }
  return {lo, hi};
}

std::pair<double, double> AmbiguitySet::hull() const {
  auto h = members_.front().integration_hull();
  for (const Distribution& d : members_) {
    auto hd = d.integration_hull();
    h.first = std::min(h.first, hd.first);
    h.second = std::max(h.second, hd.second);
  }
  return h;
}

bool AmbiguitySet::all_atoms() const {
  return std::all_of(members_.begin(), members_.end(), [](const Distribution& d) {
    return d.kind() == Distribution::Kind::kAtoms;
  });
}

ExtremalPair extremal_pair(const AmbiguitySet& a) {
  std::size_t up = 0, lo = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    // Strict comparisons keep the earliest index on ties.
    if (a.members()[i].mean() > a.members()[up].mean()) up = i;
    if (a.members()[i].mean() < a.members()[lo].mean()) lo = i;
  }
  return ExtremalPair{up, lo, a.members()[up], a.members()[lo]};
}

}  // namespace sublex
