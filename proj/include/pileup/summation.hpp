#pragma once

#include <cstddef>
#include <span>

namespace pileup {

/// Cascade (pairwise) summation; error grows like O(log n) ulps and the
/// reduction tree depends only on the length of the input.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kBlock = 32;
  if (v.size() <= kBlock) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace pileup
