#include "lipwidth/cube_allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace lipwidth {

double CubeAllocation::side(std::size_t j) const { return std::ldexp(1.0, -levels.at(j)); }

double CubeAllocation::lower_corner(std::size_t j, unsigned axis) const {
  return -1.0 + static_cast<double>(coords.at(j * n + axis)) * side(j);
}

Point CubeAllocation::center(std::size_t j) const {
  Point c(n);
  const double s = side(j);
  for (unsigned i = 0; i < n; ++i) c[i] = lower_corner(j, i) + 0.5 * s;
  return c;
}

double dyadic_volume(unsigned n, const std::vector<int>& levels) {
  double sum = 0.0;
  for (int l : levels) sum += std::ldexp(1.0, -static_cast<int>(n) * l);
  return sum;
}

namespace {

// Free cells grouped by level; level -1 is the whole cube [-1,1]^n.
class FreeList {
 public:
  explicit FreeList(unsigned n) : n_(n), cells_(kMaxCubeLevel + 2) {
    cells_[0].assign(n, 0);
  }

  bool take(int level, std::uint32_t* out) {
    int from = level;
    while (from >= -1 && bucket(from).empty()) --from;
    if (from < -1) return false;
    std::vector<std::uint32_t> cell(bucket(from).end() - n_, bucket(from).end());
    bucket(from).resize(bucket(from).size() - n_);
    // Split down to the requested level, keeping the lowest child each time.
    for (int l = from; l < level; ++l) {
      for (std::uint32_t mask = (1u << n_) - 1; mask >= 1; --mask) {
        for (unsigned i = 0; i < n_; ++i) bucket(l + 1).push_back(2 * cell[i] + ((mask >> i) & 1u));
      }
      for (unsigned i = 0; i < n_; ++i) cell[i] *= 2;
    }
    std::copy(cell.begin(), cell.end(), out);
    return true;
  }

 private:
  std::vector<std::uint32_t>& bucket(int level) { return cells_[level + 1]; }

  unsigned n_;
  std::vector<std::vector<std::uint32_t>> cells_;
};

}  // namespace

CubeAllocation allocate_dyadic_cubes(unsigned n, const std::vector<int>& levels) {
  if (n == 0 || n > 16) throw PreconditionError("cube allocation: dimension must be in 1..16");
  for (int l : levels)
    if (l < 0 || l > kMaxCubeLevel)
      throw PreconditionError("cube allocation: levels must lie in 0.." + std::to_string(kMaxCubeLevel));

  std::vector<std::size_t> order(levels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });

  const double capacity = std::ldexp(1.0, static_cast<int>(n));
  double partial = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    partial += std::ldexp(1.0, -static_cast<int>(n) * levels[order[k]]);
    if (partial > capacity * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "cube allocation: volume condition fails, partial sum over the " << (k + 1)
          << " largest cubes is " << partial << " > 2^" << n;
      throw PreconditionError(msg.str());
    }
  }

  CubeAllocation out;
  out.n = n;
  out.levels = levels;
  out.coords.assign(levels.size() * n, 0);
  FreeList free(n);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t j = order[k];
    if (!free.take(levels[j], out.coords.data() + j * n))
      throw NumericFailure("cube allocation: free list exhausted at request " + std::to_string(k));
  }
  return out;
}

AllocationAudit audit_pairwise_overlap(const CubeAllocation& alloc) {
  const unsigned n = alloc.n;
  for (std::size_t a = 0; a < alloc.size(); ++a) {
    for (unsigned i = 0; i < n; ++i) {
      const double lo = alloc.lower_corner(a, i);
      if (lo < -1.0 || lo + alloc.side(a) > 1.0)
        return {false, "cube " + std::to_string(a) + " leaves [-1,1]^n"};
    }
    for (std::size_t b = a + 1; b < alloc.size(); ++b) {
      bool separated = false;
      for (unsigned i = 0; i < n && !separated; ++i) {
        const double alo = alloc.lower_corner(a, i), ahi = alo + alloc.side(a);
        const double blo = alloc.lower_corner(b, i), bhi = blo + alloc.side(b);
        separated = ahi <= blo || bhi <= alo;
      }
      if (!separated)
        return {false, "cubes " + std::to_string(a) + " and " + std::to_string(b) + " overlap"};
    }
  }
  return {};
}

namespace {

struct CellKey {
  int level;
  std::vector<std::uint32_t> c;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = std::hash<int>{}(k.level);
    for (auto v : k.c) h = h * 1000003u ^ std::hash<std::uint32_t>{}(v);
    return h;
  }
};

}  // namespace

AllocationAudit audit_dyadic_nesting(const CubeAllocation& alloc) {
  const unsigned n = alloc.n;
  std::unordered_set<CellKey, CellHash> cells;
  cells.reserve(alloc.size() * 2);
  for (std::size_t j = 0; j < alloc.size(); ++j) {
    CellKey key{alloc.levels[j], {alloc.coords.begin() + j * n, alloc.coords.begin() + (j + 1) * n}};
    const std::uint64_t limit = std::uint64_t{2} << key.level;
    for (auto v : key.c)
      if (v >= limit) return {false, "cube " + std::to_string(j) + " leaves [-1,1]^n"};
    if (!cells.insert(key).second) return {false, "cube " + std::to_string(j) + " repeats a cell"};
  }
  for (std::size_t j = 0; j < alloc.size(); ++j) {
    CellKey key{alloc.levels[j], {alloc.coords.begin() + j * n, alloc.coords.begin() + (j + 1) * n}};
    while (key.level > 0) {
      --key.level;
      for (auto& v : key.c) v >>= 1;
      if (cells.count(key))
        return {false, "cube " + std::to_string(j) + " lies inside another allocated cube"};
    }
  }
  return {};
}

}  // namespace lipwidth
