#include "lipwidth/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace lipwidth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense bit rows: row i holds every j with d(i, j) <= eps.
struct CoverRows {
  std::size_t m = 0;
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;
  std::vector<std::size_t> counts;
  double next_distance = kInf;

  std::uint64_t* row(std::size_t i) { return bits.data() + i * words; }
  const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }
  bool test(std::size_t i, std::size_t j) const { return (row(i)[j / 64] >> (j % 64)) & 1u; }
};

CoverRows build_rows(const MetricSet& set, double eps) {
  CoverRows r;
  r.m = set.size();
  r.words = (r.m + 63) / 64;
  r.bits.assign(r.m * r.words, 0);
  r.counts.assign(r.m, 0);
  for (std::size_t i = 0; i < r.m; ++i) {
    r.row(i)[i / 64] |= std::uint64_t{1} << (i % 64);
    for (std::size_t j = i + 1; j < r.m; ++j) {
      const double d = set.distance(i, j);
      if (within(d, eps)) {
        r.row(i)[j / 64] |= std::uint64_t{1} << (j % 64);
        r.row(j)[i / 64] |= std::uint64_t{1} << (i % 64);
      } else if (d < r.next_distance) {
        r.next_distance = d;
      }
    }
  }
  for (std::size_t i = 0; i < r.m; ++i) {
    std::size_t c = 0;
    for (std::size_t w = 0; w < r.words; ++w) c += std::popcount(r.row(i)[w]);
    r.counts[i] = c;
  }
  return r;
}

// Points whose candidate-center sets are pairwise disjoint each need their own
// center. Scanning in ascending candidate count finds many such points.
std::size_t disjoint_lower_bound(const CoverRows& r) {
  if (r.m == 0) return 0;
  std::vector<std::size_t> order(r.m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r.counts[a] < r.counts[b]; });
  std::vector<std::uint64_t> marked(r.words, 0);
  std::size_t count = 0;
  for (std::size_t i : order) {
    const auto* row = r.row(i);
    bool free = true;
    for (std::size_t w = 0; w < r.words && free; ++w) free = (row[w] & marked[w]) == 0;
    if (!free) continue;
    ++count;
    for (std::size_t w = 0; w < r.words; ++w) marked[w] |= row[w];
  }
  const std::size_t widest = *std::max_element(r.counts.begin(), r.counts.end());
  const std::size_t counting = (r.m + widest - 1) / widest;
  return std::max(count, counting);
}

std::vector<std::size_t> greedy_cover(const CoverRows& r) {
  std::vector<std::uint64_t> uncovered(r.words, 0);
  for (std::size_t j = 0; j < r.m; ++j) uncovered[j / 64] |= std::uint64_t{1} << (j % 64);
  std::size_t remaining = r.m;

  // Max-heap on (gain, -index); stored gains are upper bounds (lazy greedy).
  using Entry = std::pair<std::size_t, std::size_t>;
  auto less = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(less)> heap(less);
  for (std::size_t i = 0; i < r.m; ++i) heap.push({r.counts[i], i});

  std::vector<std::size_t> centers;
  while (remaining > 0 && !heap.empty()) {
    auto [stale, i] = heap.top();
    heap.pop();
    const auto* row = r.row(i);
    std::size_t gain = 0;
    for (std::size_t w = 0; w < r.words; ++w) gain += std::popcount(row[w] & uncovered[w]);
    if (gain == 0) continue;
    if (gain < stale) {
      heap.push({gain, i});
      continue;
    }
    centers.push_back(i);
    for (std::size_t w = 0; w < r.words; ++w) uncovered[w] &= ~row[w];
    remaining -= gain;
  }
  std::sort(centers.begin(), centers.end());
  return centers;
}

// Iterative deepening over cover size. Each level branches on the uncovered
// point with the fewest candidate centers, trying candidates in index order.
class ExactCover {
 public:
  explicit ExactCover(const CoverRows& r) : m_(r.m) {
    masks_.resize(m_, 0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < m_; ++j)
        if (r.test(i, j)) masks_[i] |= 1u << j;
    full_ = m_ == 32 ? ~0u : ((1u << m_) - 1u);
    widest_ = 0;
    for (auto mk : masks_) widest_ = std::max<std::size_t>(widest_, std::popcount(mk));
  }

  std::vector<std::size_t> solve(std::size_t start) {
    for (std::size_t k = std::max<std::size_t>(start, 1); k <= m_; ++k) {
      chosen_.clear();
      if (search(0u, k)) {
        std::sort(chosen_.begin(), chosen_.end());
        return chosen_;
      }
    }
    std::vector<std::size_t> all(m_);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }

 private:
  bool search(std::uint32_t covered, std::size_t budget) {
    if (covered == full_) return true;
    if (budget == 0) return false;
    const std::size_t left = static_cast<std::size_t>(std::popcount(full_ & ~covered));
    if ((left + widest_ - 1) / widest_ > budget) return false;

    std::size_t pivot = m_;
    int fewest = std::numeric_limits<int>::max();
    for (std::size_t j = 0; j < m_; ++j) {
      if (covered >> j & 1u) continue;
      int options = 0;
      for (std::size_t i = 0; i < m_; ++i) options += (masks_[i] >> j) & 1u;
      if (options < fewest) {
        fewest = options;
        pivot = j;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!((masks_[i] >> pivot) & 1u)) continue;
      chosen_.push_back(i);
      if (search(covered | masks_[i], budget - 1)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  std::size_t m_;
  std::vector<std::uint32_t> masks_;
  std::uint32_t full_ = 0;
  std::size_t widest_ = 1;
  std::vector<std::size_t> chosen_;
};

double assignment_radius(const MetricSet& set, const CoverRows& r,
                         const std::vector<std::size_t>& centers) {
  std::vector<char> done(r.m, 0);
  double radius = 0.0;
  for (std::size_t c : centers) {
    for (std::size_t j = 0; j < r.m; ++j) {
      if (done[j] || !r.test(c, j)) continue;
      done[j] = 1;
      if (j != c) radius = std::max(radius, set.distance(c, j));
    }
  }
  return radius;
}

CoverProbe run_probe(const MetricSet& set, double eps) {
  CoverProbe p;
  p.eps = eps;
  const CoverRows rows = build_rows(set, eps);
  p.next_distance = rows.next_distance;
  p.lower_bound = disjoint_lower_bound(rows);
  if (p.lower_bound >= rows.m) {
    // Nothing can share a center: the identity cover is optimal.
    p.centers.resize(rows.m);
    std::iota(p.centers.begin(), p.centers.end(), std::size_t{0});
    p.exact = true;
    p.radius = 0.0;
    return p;
  }
  if (rows.m <= kExactCoverLimit) {
    p.centers = ExactCover(rows).solve(p.lower_bound);
    p.exact = true;
    p.lower_bound = p.centers.size();
  } else {
    p.centers = greedy_cover(rows);
    p.exact = p.centers.size() == p.lower_bound;
  }
  p.radius = assignment_radius(set, rows, p.centers);
  return p;
}

}  // namespace

PackingResult greedy_packing(const MetricSet& set, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("packing radius must be positive");
  PackingResult out;
  out.eps = eps;
  for (std::size_t i = 0; i < set.size(); ++i) {
    bool admissible = true;
    for (std::size_t j : out.indices) {
      if (within(set.distance(i, j), eps)) {
        admissible = false;
        break;
      }
    }
    if (admissible) out.indices.push_back(i);
  }
  return out;
}

bool is_maximal_packing(const MetricSet& set, const PackingResult& packing) {
  std::vector<char> in(set.size(), 0);
  for (std::size_t i : packing.indices) in.at(i) = 1;
  for (std::size_t a = 0; a < packing.indices.size(); ++a)
    for (std::size_t b = a + 1; b < packing.indices.size(); ++b)
      if (within(set.distance(packing.indices[a], packing.indices[b]), packing.eps)) return false;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (in[i]) continue;
    bool blocked = false;
    for (std::size_t j : packing.indices) {
      if (within(set.distance(i, j), packing.eps)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) return false;
  }
  return true;
}

CoveringResult minimal_inner_covering(const MetricSet& set, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("covering radius must be positive");
  if (set.size() == 0) return {eps, {}, true, 0, 0.0};
  CoverProbe p = run_probe(set, eps);
  CoveringResult out;
  out.eps = eps;
  out.center_indices = std::move(p.centers);
  out.exact = p.exact;
  out.lower_bound = p.lower_bound;
  out.radius = p.radius;
  return out;
}

EntropySolver::EntropySolver(const MetricSet& set) : set_(set), diameter_(0.0) {
  if (set.size() == 0) throw PreconditionError("entropy of an empty set");
  diameter_ = lipwidth::diameter(set);
}

const CoverProbe& EntropySolver::probe(double eps) {
  auto it = cache_.find(eps);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(eps, run_probe(set_, eps)).first->second;
}

EntropyEstimate EntropySolver::inner_entropy(unsigned n) {
  EntropyEstimate est;
  est.n = n;
  const std::size_t m = set_.size();
  const bool trivial = n >= 63 || (std::size_t{1} << n) >= m;
  if (trivial) {
    est.centers.resize(m);
    std::iota(est.centers.begin(), est.centers.end(), std::size_t{0});
    est.exact = true;
    return est;
  }
  const std::size_t target = std::size_t{1} << n;

  if (diameter_ == 0.0) {
    est.centers = {0};
    est.exact = true;
    return est;
  }

  double lo = 0.0, hi = diameter_;
  double upper_floor = 0.0;   // covers below this failed (inconclusively)
  double lower_ceil = diameter_;  // lower bounds above this are impossible
  est.centers = {0};
  {
    // One set point covers everything at radius = diameter.
    const CoverProbe& top = probe(diameter_);
    if (top.centers.size() <= target) {
      hi = top.radius;
      est.centers = top.centers;
    }
  }

  auto absorb = [&](const CoverProbe& p) {
    if (p.centers.size() <= target && p.radius <= hi) {
      if (p.radius < hi || p.centers.size() < est.centers.size()) est.centers = p.centers;
      hi = p.radius;
      lower_ceil = std::min(lower_ceil, p.radius);
    }
    if (p.lower_bound > target) {
      const double certified = p.next_distance / (1.0 + kCoverSlack);
      lo = std::max(lo, std::min(certified, hi));
      upper_floor = std::max(upper_floor, p.eps);
    }
    if (p.centers.size() > target && p.lower_bound <= target) {
      upper_floor = std::max(upper_floor, p.eps);
      lower_ceil = std::min(lower_ceil, p.eps);
    }
  };
  for (const auto& [eps, p] : cache_) absorb(p);

  constexpr double kWidth = 1e-12;
  constexpr int kMaxIterations = 60;
  for (int it = 0; it < kMaxIterations && hi - lo > kWidth; ++it) {
    // Covers are searched in [upper_floor, hi], lower bounds in [lo, lower_ceil].
    // With exact probes both intervals coincide and the cache absorbs repeats.
    const double u_lo = std::max(upper_floor, lo);
    const double l_hi = std::min(lower_ceil, hi);
    const bool upper_open = hi - u_lo > kWidth;
    const bool lower_open = l_hi - lo > kWidth;
    if (!upper_open && !lower_open) break;
    if (upper_open) absorb(probe(0.5 * (u_lo + hi)));
    if (lower_open) absorb(probe(0.5 * (lo + std::min(lower_ceil, hi))));
  }

  est.lower = std::min(lo, hi);
  est.upper = hi;
  est.exact = (hi - lo) <= 1e-9 * diameter_;
  return est;
}

EntropyEstimate inner_entropy(const MetricSet& set, unsigned n) {
  EntropySolver solver(set);
  return solver.inner_entropy(n);
}

std::vector<EntropyEstimate> inner_entropy_profile(const MetricSet& set, unsigned n_max) {
  EntropySolver solver(set);
  std::vector<EntropyEstimate> out;
  for (unsigned n = 0; n <= n_max; ++n) {
    EntropyEstimate e = solver.inner_entropy(n);
    // A cover with 2^(n-1) centers is also admissible for n.
    if (!out.empty() && out.back().upper < e.upper) {
      e.upper = out.back().upper;
      e.centers = out.back().centers;
      e.lower = std::min(e.lower, e.upper);
    }
    out.push_back(std::move(e));
  }
  return out;
}

SandwichReport sandwich_audit(const MetricSet& set, double eps) {
  SandwichReport rep;
  rep.eps = eps;
  rep.packing_eps = greedy_packing(set, eps).size();
  const CoveringResult cov = minimal_inner_covering(set, eps);
  rep.covering_eps = cov.size();
  rep.covering_lower = cov.lower_bound;
  rep.exact = cov.exact;
  rep.packing_2eps = greedy_packing(set, 2.0 * eps).size();
  // Without an exact cover only the certified lower bound can be compared
  // against the packing from above.
  rep.packing_ge_covering = rep.packing_eps >= (cov.exact ? rep.covering_eps : rep.covering_lower);
  rep.covering_ge_packing = rep.covering_eps >= rep.packing_2eps;
  return rep;
}

EntropyChainReport entropy_chain_audit(const MetricSet& set, unsigned n) {
  const EntropyEstimate e = inner_entropy(set, n);
  EntropyChainReport rep;
  rep.n = n;
  rep.inner_lower = e.lower;
  rep.inner_upper = e.upper;
  rep.outer_lower = e.lower / 2.0;
  rep.outer_upper = e.upper;
  rep.pass = rep.inner_lower <= rep.inner_upper && rep.outer_lower <= rep.outer_upper;
  return rep;
}

}  // namespace lipwidth
