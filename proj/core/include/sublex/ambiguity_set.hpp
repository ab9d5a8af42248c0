#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sublex/distribution.hpp"

namespace sublex {

/// A finite, non-empty family of candidate distributions. The family is
/// what upper/lower expectations, capacities and steering kernels range
/// over; every member has finite mean and finite E|X| by construction of
/// the supported kinds.
class AmbiguitySet {
 public:
  explicit AmbiguitySet(std::vector<Distribution> members);

  const std::vector<Distribution>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }

  /// [min member mean, max member mean].
  std::pair<double, double> mean_interval() const;

  /// Union of member integration hulls.
  std::pair<double, double> hull() const;

  /// True iff every member is a finite atom distribution.
  bool all_atoms() const;

 private:
  std::vector<Distribution> members_;
};

/// The pair of members attaining the extreme means, with ties broken by
/// the lowest member index. These are the two components every steering
/// mixture draws from.
struct ExtremalPair {
  std::size_t upper_index = 0;
  std::size_t lower_index = 0;
  Distribution p_upper;
  Distribution p_lower;
};

ExtremalPair extremal_pair(const AmbiguitySet& a);

}  // namespace sublex
