#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lipwidth/metric.hpp"

namespace lipwidth {

/// Disjoint dyadic cubes inside [-1,1]^n.
///
/// A cube at level l has side 2^-l. Its integer coordinates c (one per axis,
/// 0 <= c_i < 2^(l+1)) place it at prod_i [-1 + c_i 2^-l, -1 + (c_i+1) 2^-l].
struct CubeAllocation {
  unsigned n = 0;
  std::vector<int> levels;
  std::vector<std::uint32_t> coords;  ///< n entries per cube

  std::size_t size() const { return levels.size(); }
  double side(std::size_t j) const;
  Point center(std::size_t j) const;
  double lower_corner(std::size_t j, unsigned axis) const;
};

/// Largest supported level; keeps coordinates inside 32 bits.
inline constexpr int kMaxCubeLevel = 30;

/// Sum_j 2^(-n l_j) as a multiple of the unit cube volume; the request fits
/// in [-1,1]^n iff this is at most 2^n.
double dyadic_volume(unsigned n, const std::vector<int>& levels);

/// Places one cube per requested level. Requests are served largest first
/// from a free list of dyadic cells, splitting the smallest free cell that
/// fits; the result lists cubes in the requested order. Throws
/// PreconditionError naming the first partial sum that exceeds 2^n.
CubeAllocation allocate_dyadic_cubes(unsigned n, const std::vector<int>& levels);

struct AllocationAudit {
  bool ok = true;
  std::string message;
};

/// O(N^2) interval test: open interiors disjoint and every cube inside [-1,1]^n.
/// Exact, since every coordinate is a dyadic rational.
AllocationAudit audit_pairwise_overlap(const CubeAllocation& alloc);

/// O(N * levels) test: no cube is repeated or contains another. Dyadic cubes
/// are either nested or interior-disjoint, so this certifies disjointness.
AllocationAudit audit_dyadic_nesting(const CubeAllocation& alloc);

}  // namespace lipwidth
