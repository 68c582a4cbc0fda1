#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipwidth/covering.hpp"
#include "lipwidth/lip_maps.hpp"
#include "lipwidth/metric.hpp"
#include "lipwidth/width_bounds.hpp"

namespace lipwidth {

/// Decreasing null sequence sigma_j, j >= 1.
struct SequenceSetSpec {
  enum class Kind { LogInv, Power, Custom };
  Kind kind = Kind::LogInv;
  double c = 1.0;               ///< exponent for Power
  std::vector<double> values;   ///< sigma_1..sigma_M for Custom
  std::size_t truncation = 64;  ///< M

  static SequenceSetSpec log_inv(std::size_t truncation);
  static SequenceSetSpec power(double c, std::size_t truncation);
  static SequenceSetSpec custom(std::vector<double> values);

  /// 1/log2(j+1), j^-c, or the listed value (0 past the list).
  double sigma(std::size_t j) const;
  void validate() const;
};

/// {sigma_j e_j}_{j<=M} plus 0 in c_0, held as a distance oracle.
/// Index j-1 is sigma_j e_j; index M is the origin.
class SequenceSet final : public MetricSet {
 public:
  explicit SequenceSet(SequenceSetSpec spec);

  const SequenceSetSpec& spec() const { return spec_; }
  std::size_t size() const override { return sigma_.size() + 1; }
  double distance(std::size_t i, std::size_t j) const override;
  double sigma(std::size_t j) const { return sigma_.at(j - 1); }

 private:
  SequenceSetSpec spec_;
  std::vector<double> sigma_;
};

/// Closed-form inner entropy sigma_{2^n} of the untruncated set.
double sequence_entropy_exact(const SequenceSetSpec& spec, unsigned n);

/// Certified lower bound on log2 of the r-packing number of the untruncated
/// set: the origin together with every sigma_j e_j with sigma_j > r.
double sequence_packing_lower_log2(const SequenceSetSpec& spec, double r);

struct RefrCondition {
  bool holds = false;
  double lhs_upper = 0.0;  ///< certified bound on sum_{j<=N} sigma_j^n
  double rhs = 0.0;        ///< (gamma/2)^n
  std::string method;      ///< "exact", "dyadic_block" or "integral_tail"
  std::optional<double> s1, s2, s3;  ///< block sum pieces split at n/ln4 and n/ln2
  std::optional<unsigned> blocks;   ///< J with 2^(J-1) <= N < 2^J
};

/// Volume condition sum_{j<=N} sigma_j^n <= (gamma/2)^n. Exact for N <= 1e6,
/// otherwise the dyadic block bound (LogInv) or the integral tail (Power).
RefrCondition refr_condition(const SequenceSetSpec& spec, double gamma, unsigned n, double N);

struct SeparationResult {
  unsigned n = 0;
  double gamma = 0.0;
  double N = 0.0;                 ///< (n+1)^n
  WidthCertificate upper;
  WidthCertificate lower;
  double truncated_lower = 0.0;   ///< packing scan on the 2^min(n+4,14) truncation
  RefrCondition condition;
  std::size_t materialized = 0;
  double declared = 0.0;
  double sigma_N = 0.0;
  double entropy_reference = 0.0;  ///< 1/n
  double entropy_exact = 0.0;      ///< sigma_{2^n}
  double ratio = 0.0;              ///< upper / entropy_reference
  bool spot_check = false;         ///< Phi(y_j) = sigma_j e_j on sampled prefix bumps
};

/// Refr-map upper certificate sigma_N <= 1/(n log2(n+1)) and the packing lower
/// certificate for K(sigma) with sigma_j = 1/log2(j+1).
SeparationResult separation_certificates(unsigned n, double gamma);

/// Smallest n1 >= n0+1, n0 = ceil(1/c), with n0 + n0/(cn-1) <= (gamma/2)^n.
/// The left side falls and the right side grows in n, so it holds from n1 on.
unsigned collapse_threshold(double c, double gamma);

/// Integral tail inequality behind collapse_threshold.
bool collapse_tail_inequality(double c, double gamma, unsigned n);

struct CollapsePoint {
  std::size_t N = 0;
  double sigma_N = 0.0;
  double declared = 0.0;
  bool condition = false;
  bool spot_check = false;
};

/// Refr maps at n for sigma_j = j^-c, one per N.
std::vector<CollapsePoint> collapse_certificates(double c, double gamma, unsigned n,
                                                 const std::vector<std::size_t>& Ns);

/// {e_1, ..., e_count} in l2, all pairwise distances sqrt 2.
class HilbertBasisSet final : public MetricSet {
 public:
  explicit HilbertBasisSet(std::size_t count) : count_(count) {}
  std::size_t size() const override { return count_; }
  double distance(std::size_t i, std::size_t j) const override;

 private:
  std::size_t count_;
};

struct HilbertReport {
  unsigned m = 0;
  double gamma = 0.0;
  unsigned s = 0;
  double threshold_lhs = 0.0;  ///< sqrt2 / (12 gamma)
  double threshold_rhs = 0.0;  ///< 4 * 2^(-m/s)
  bool threshold_holds = false;
  std::vector<EntropyEstimate> entropy;  ///< k = 1..m
  bool entropy_contains_sqrt2 = false;
  WidthCertificate packing_lower;       ///< packing-count lower bound on d_s^gamma
  double example_lower = 0.0;           ///< sqrt2/3 when the threshold holds, else 0
};

/// K = {e_j}_{j <= 2^m + 1}.
HilbertReport hilbert_example(unsigned m, double gamma, unsigned s, unsigned workers = 1);

/// chi_a = indicator of [a, a+1] for a = k/grid, k = 0..grid, stored on 2*grid
/// cells of [0,2] in the exact L1 step norm.
FiniteSet transport_set(std::size_t grid);

struct TransportReference {
  double entropy = 0.0;           ///< 2^(-n+1)
  double kolmogorov_upper = 0.0;  ///< 4/n
  double kolmogorov_lower = 0.0;  ///< 1/(n+1)
};
TransportReference transport_reference(unsigned n);

/// Vertices +-e_j / sqrt(log2(j+1)), j <= truncation, of the weighted l1 ball in l2.
FiniteSet diagonal_set(std::size_t truncation);

/// Span of the first n unit vectors of l2^dim.
std::vector<Point> coordinate_basis(std::size_t dim, const std::vector<std::size_t>& coords);

/// (1/sqrt2) log2(2n+1)^(-1/2).
double stechkin_value(unsigned n);

/// {+-e_j / sqrt(log2(2n+1))}_{j <= 2n} in l2^(2n).
FiniteSet octahedron_set(unsigned n);

struct OctahedronBound {
  double best = 0.0;
  std::vector<std::size_t> coords;
  std::size_t subspaces = 0;
};
/// Best Kolmogorov upper bound over all n-element coordinate subspaces.
OctahedronBound octahedron_coordinate_upper(unsigned n);

/// Case-study report with references, computed values, per-inequality
/// pass flags and a "table" of (n, reference, computed_lower, computed_upper).
/// Names: separation, collapse, hilbert, transport, diagonal, stechkin,
/// sequence-entropy. `params` may hold n, gamma, c, m, s, grid, truncation.
nlohmann::json run_case_study(const std::string& name, const nlohmann::json& params,
                              unsigned workers = 1);

}  // namespace lipwidth
