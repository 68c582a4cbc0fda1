#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "lipwidth/cube_allocation.hpp"
#include "lipwidth/metric.hpp"
#include "lipwidth/relu.hpp"

namespace lipwidth {

/// Sparse vector in the sequence space c_0, normed by the maximum entry.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

double sparse_linf_distance(const SparseVector& a, const SparseVector& b);

/// Phi(y) = value on the whole domain ball.
struct ConstantMap {
  NormedSpace domain = NormedSpace::linf(1);
  NormedSpace target = NormedSpace::linf(1);
  Point value;
};

/// Phi(y) = offset + sum_j sigma_j (1 - ||y_j - y|| / rho_j)_+ f_j.
///
/// Directions are either dense unit vectors in `target` or, when
/// `coordinates` is filled, unit coordinate vectors e_{coordinates[j]} of c_0.
/// `cells` lets evaluation find the unique active bump in O(levels) when the
/// supports are dyadic cubes of an l_inf domain.
struct BumpSum {
  NormedSpace domain = NormedSpace::linf(1);
  NormedSpace target = NormedSpace::linf(1);
  std::vector<Point> centers;
  std::vector<double> radii;
  std::vector<double> amplitudes;
  std::vector<Point> directions;
  std::vector<std::size_t> coordinates;
  Point offset;

  struct CellIndex {
    std::vector<int> levels;  ///< distinct levels present
    std::unordered_map<std::string, std::size_t> cells;
  };
  std::optional<CellIndex> cells;

  std::size_t size() const { return centers.size(); }
  bool sparse() const { return !coordinates.empty(); }
};

/// Piecewise linear interpolation on [-1,1] through (knots_j, values_j).
struct PiecewiseLinearPath {
  NormedSpace target = NormedSpace::linf(1);
  std::vector<double> knots;
  std::vector<Point> values;
};

/// Phi(c) = origin + gamma * sum_i c_i basis_i. The domain ball is
/// {c : ||sum_i c_i basis_i||_target <= 1}, which makes Phi gamma-Lipschitz.
struct AffineBall {
  NormedSpace target = NormedSpace::linf(1);
  Point origin;
  double gamma = 0.0;
  std::vector<Point> basis;
};

/// Parameter vector y in [-1,1]^params mapped to Phi(y) sampled on the Omega grid.
struct ReLUNetMap {
  ReLUNetConfig config;
};

using LipschitzMapSpec =
    std::variant<ConstantMap, BumpSum, PiecewiseLinearPath, AffineBall, ReLUNetMap>;

std::string variant_name(const LipschitzMapSpec& map);
std::size_t domain_dim(const LipschitzMapSpec& map);

/// Norm of the domain point; the map is defined on the ball of radius 1.
double domain_norm(const LipschitzMapSpec& map, PointView y);

/// Structural invariants (disjoint supports, unit directions, ascending knots).
void validate(const LipschitzMapSpec& map);

/// Throws PreconditionError outside the closed unit ball (1e-9 slack).
Point evaluate(const LipschitzMapSpec& map, PointView y);
SparseVector evaluate_sparse(const BumpSum& map, PointView y);

/// Distance between two image points measured in the map's target.
double image_distance(const LipschitzMapSpec& map, PointView y1, PointView y2);

double declared_lipschitz(const LipschitzMapSpec& map);

/// Largest difference quotient over `pairs` sampled domain pairs.
/// Deterministic in `seed`; independent of `workers`.
double empirical_lipschitz(const LipschitzMapSpec& map, std::uint64_t seed, std::size_t pairs,
                           unsigned workers = 1);

/// Largest difference quotient per stratum of a bump sum: both points in one
/// ball, both outside every ball, one inside and one outside, two different balls.
struct BumpStrata {
  double same_ball = 0.0;
  double both_outside = 0.0;
  double inside_outside = 0.0;
  double different_balls = 0.0;
  std::size_t pairs_per_stratum = 0;
};
BumpStrata bump_strata_lipschitz(const BumpSum& map, std::uint64_t seed, std::size_t pairs);

/// Path through the points with knots -1 + 2j/(N-1).
PiecewiseLinearPath build_path_map(const NormedSpace& target, const std::vector<Point>& points);

/// Regular grid of 2^(kn) cubes of side 2^(1-k) in [-1,1]^n. Bump j sits on
/// cube j (lexicographic, first axis slowest) and reproduces centers[j].
/// Amplitudes are ||centers[j] - offset||, directions the normalised differences.
BumpSum build_entropy_map(const NormedSpace& target, const std::vector<Point>& centers, unsigned k,
                          unsigned n, PointView offset);

/// Center of grid cube j used by build_entropy_map.
Point entropy_grid_center(std::size_t j, unsigned k, unsigned n);

/// Level l with 2^(-l-1) < 2 sigma / gamma <= 2^(-l).
int refr_level(double sigma, double gamma);

struct RefrMap {
  BumpSum map;
  CubeAllocation cubes;
  std::size_t requested = 0;      ///< N
  std::size_t materialized = 0;   ///< bumps actually built
  double sum_upper = 0.0;         ///< certified bound on sum_{j<=N} sigma_j^n
  double rhs = 0.0;               ///< (gamma/2)^n
  double sigma_n = 0.0;           ///< error bound sigma_N
  double declared = 0.0;          ///< max 2^(l_j+1) sigma_j over built bumps
};

/// Bump sum sending cube j to sigma_j e_j, with levels from refr_level.
/// `sum_upper` must bound sum_{j<=N} sigma_j^n; it is recomputed exactly
/// when N <= materialize_cap and required otherwise.
RefrMap build_refr_map(const std::function<double(std::size_t)>& sigma, double gamma, unsigned n,
                       std::size_t N, std::optional<double> sum_upper = std::nullopt,
                       std::size_t materialize_cap = 1000000);

/// Sampling helpers shared with the width code.
Point sample_domain_point(const LipschitzMapSpec& map, std::mt19937_64& rng);

}  // namespace lipwidth
