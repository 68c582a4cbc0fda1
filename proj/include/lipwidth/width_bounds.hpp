#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipwidth/covering.hpp"
#include "lipwidth/lip_maps.hpp"
#include "lipwidth/metric.hpp"

namespace lipwidth {

enum class WidthQuantity { Lipschitz, Kolmogorov };

std::string_view to_string(WidthQuantity q);

/// A bound on a width together with the object that certifies it.
/// Upper certificates carry a map or subspace; lower ones a packing count.
struct WidthCertificate {
  WidthQuantity quantity = WidthQuantity::Lipschitz;
  unsigned n = 1;
  std::optional<double> gamma;
  double value = 0.0;
  BoundDirection direction = BoundDirection::Upper;
  nlohmann::json witness = nlohmann::json::object();
};

nlohmann::json to_json(const WidthCertificate& cert);
WidthCertificate certificate_from_json(const nlohmann::json& j);

/// max_f ||f - Phi(y(f))|| for one domain candidate per set point.
WidthCertificate fixed_width_upper(const FiniteSet& set, const LipschitzMapSpec& map,
                                   const std::vector<Point>& candidates);

struct EntropyWidthResult {
  WidthCertificate certificate;
  BumpSum map;
  std::vector<Point> candidates;
  double fixed_width = 0.0;      ///< evaluated max_f ||f - Phi(y(f))||
  double entropy_upper = 0.0;
  double declared = 0.0;         ///< declared Lipschitz constant of the built map
};

/// Covers the set with 2^(kn) set points, places them on a regular grid of
/// cubes and reports gamma = 2^k * (radius upper bound) together with the
/// entropy upper bound. Requires k*n <= 24.
EntropyWidthResult width_upper_from_entropy(const FiniteSet& set, unsigned k, unsigned n);

/// 64 log-spaced values spanning [diameter / 2^16, diameter].
std::vector<double> default_eps_grid(double diameter);

/// If some 4 eps-packing has more than (3 gamma / eps)^n points, then every
/// gamma-Lipschitz map from an n-dimensional ball misses some point by at
/// least eps. Returns the largest grid eps that passes this test, 0 if none.
WidthCertificate width_lower_certified(const MetricSet& set, unsigned n, double gamma,
                                       const std::vector<double>& eps_grid, unsigned workers = 1);

/// Same test driven by a certified lower bound on log2 of the r-packing number.
WidthCertificate width_lower_certified(const std::function<double(double)>& log2_packing_lower,
                                       unsigned n, double gamma, const std::vector<double>& eps_grid);

/// Subspace used by a Kolmogorov certificate, with per-point coefficients of
/// the chosen approximant.
struct KolmogorovResult {
  WidthCertificate certificate;
  std::vector<Point> basis;
  std::vector<Point> coefficients;  ///< one coefficient vector per set point
  std::vector<double> residuals;
};

/// Orthogonal projection onto span(basis) in an l2 space.
KolmogorovResult kolmogorov_upper_l2(const FiniteSet& set, const std::vector<Point>& basis);

/// Dispatches on the target norm; only l2 has a generic projector.
KolmogorovResult kolmogorov_upper(const FiniteSet& set, const std::vector<Point>& basis);

/// Step-function approximation with the n cell indicators of [2j/n, 2(j+1)/n]
/// for sets of interval indicators in an L1-step space on [0,2].
KolmogorovResult kolmogorov_upper_transport(const FiniteSet& set, unsigned n);

struct TkComparison {
  WidthCertificate certificate;
  AffineBall map;
  double kolmogorov_value = 0.0;
  double gamma = 0.0;
  bool gamma_raised = false;  ///< max_a ||a - g0|| exceeded d_n + rad
  bool holds = false;         ///< certificate <= Kolmogorov value + 1e-9
};

/// Affine map g -> g0 + gamma g on the unit ball of the Kolmogorov subspace,
/// gamma = d_n + rad; its fixed width is at most the Kolmogorov value.
TkComparison tk_comparison(const FiniteSet& set, const KolmogorovResult& kolmogorov);

/// Width bound d_n^gamma(K) < delta in the forms used by the transfer checks.
struct CarlInput {
  unsigned n = 1;
  double gamma = 1.0;
  double delta = 1.0;
  double radius = 0.0;  ///< rad(K) lower estimate; delta >= radius is vacuous
};

/// delta = c0 [log2 n]^beta / n^alpha
double power_log_delta(unsigned n, double c0, double alpha, double beta);
/// gamma_n = C' n^delta lambda^n
double growing_gamma(unsigned n, double c_prime, double delta, double lambda);

struct CarlReport {
  unsigned n = 0;
  double gamma = 0.0;
  double delta = 0.0;
  unsigned long long m = 0;     ///< ceil(n log2(3 gamma / delta))
  double implied_upper = 0.0;   ///< eps_m(K) <= 2 delta
  double entropy_lower = 0.0;   ///< certified lower value of eps_m(K)
  double margin = 0.0;          ///< implied_upper - entropy_lower
  bool vacuous = false;
  bool contradiction = false;
  bool pass = false;
};

/// N_{2 delta}(K) <= (3 gamma/delta)^n forces eps_m(K) <= 2 delta at
/// m = n log2(3 gamma / delta); compares with a certified entropy lower bound.
CarlReport carl_transfer_check(const CarlInput& input,
                               const std::function<double(unsigned long long)>& entropy_lower);

struct WitnessCheck {
  bool ok = false;
  std::string message;
};

/// Re-validates a certificate from its witness alone. Checks needing the
/// point set are skipped when `set` is null.
WitnessCheck verify_witness(const WidthCertificate& cert, const FiniteSet* set = nullptr);

}  // namespace lipwidth
