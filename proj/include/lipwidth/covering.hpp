#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lipwidth/metric.hpp"

namespace lipwidth {

/// Sets at or below this size get an exhaustive (exact) set cover.
inline constexpr std::size_t kExactCoverLimit = 20;

/// Relative slack applied to every "d <= eps" and "d > eps" decision.
inline constexpr double kCoverSlack = 1e-12;

inline bool within(double d, double eps) { return d <= eps * (1.0 + kCoverSlack); }

struct PackingResult {
  double eps = 0.0;
  std::vector<std::size_t> indices;
  std::size_t size() const { return indices.size(); }
};

struct CoveringResult {
  double eps = 0.0;
  std::vector<std::size_t> center_indices;
  bool exact = false;
  /// Certified lower bound on the minimal inner covering number at eps.
  std::size_t lower_bound = 0;
  /// Largest point-to-assigned-center distance; never exceeds eps.
  double radius = 0.0;
  std::size_t size() const { return center_indices.size(); }
};

struct EntropyEstimate {
  unsigned n = 0;
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;  ///< every probe that fixed the bracket used an exact cover
  std::vector<std::size_t> centers;  ///< covering realising `upper`
};

/// Sequential scan in point order; admits a point iff it is farther than eps
/// from every admitted point. The result is a maximal eps-packing.
PackingResult greedy_packing(const MetricSet& set, double eps);

/// True when no point of the set can be added to `packing` at radius eps.
bool is_maximal_packing(const MetricSet& set, const PackingResult& packing);

/// Exact set cover for sets of at most kExactCoverLimit points, greedy
/// (lowest index wins ties) otherwise. Centers are set points.
CoveringResult minimal_inner_covering(const MetricSet& set, double eps);

/// Single step of the entropy search: covering, lower bound on the covering
/// number, and the first pairwise distance beyond eps.
struct CoverProbe {
  double eps = 0.0;
  std::vector<std::size_t> centers;
  double radius = 0.0;
  std::size_t lower_bound = 0;
  bool exact = false;
  double next_distance = 0.0;  ///< +inf when no pairwise distance exceeds eps
};

/// Shares probes across repeated entropy queries on one set.
class EntropySolver {
 public:
  explicit EntropySolver(const MetricSet& set);

  EntropyEstimate inner_entropy(unsigned n);
  const CoverProbe& probe(double eps);
  double diameter() const { return diameter_; }
  std::size_t probes_run() const { return cache_.size(); }

 private:
  const MetricSet& set_;
  double diameter_;
  std::map<double, CoverProbe> cache_;
};

/// Certified bracket on the inner entropy number: the smallest eps for which
/// 2^n set-centered closed balls of radius eps cover the set.
EntropyEstimate inner_entropy(const MetricSet& set, unsigned n);

/// Entropy brackets for n = 0..n_max sharing one probe cache.
std::vector<EntropyEstimate> inner_entropy_profile(const MetricSet& set, unsigned n_max);

struct SandwichReport {
  double eps = 0.0;
  std::size_t packing_eps = 0;       ///< greedy maximal packing at eps
  std::size_t covering_eps = 0;      ///< inner covering at eps
  std::size_t covering_lower = 0;    ///< certified lower bound on that covering number
  std::size_t packing_2eps = 0;      ///< greedy maximal packing at 2 eps
  bool exact = false;
  bool packing_ge_covering = false;  ///< P_eps >= N_eps
  bool covering_ge_packing = false;  ///< N_eps >= P_2eps
  bool pass() const { return packing_ge_covering && covering_ge_packing; }
};

/// Evaluates P_eps >= N_eps >= P_2eps. Maximal packings bound the true packing
/// number from below, so with an exact cover both comparisons are sound.
SandwichReport sandwich_audit(const MetricSet& set, double eps);

/// Entropy chain eps_n <= inner eps_n <= 2 eps_n, checked through the bracket.
struct EntropyChainReport {
  unsigned n = 0;
  double inner_lower = 0.0;
  double inner_upper = 0.0;
  double outer_lower = 0.0;  ///< inner_lower / 2
  double outer_upper = 0.0;  ///< inner_upper
  bool pass = false;
};

EntropyChainReport entropy_chain_audit(const MetricSet& set, unsigned n);

}  // namespace lipwidth
