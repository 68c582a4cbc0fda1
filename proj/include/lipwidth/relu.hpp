#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lipwidth/metric.hpp"

namespace lipwidth {

/// Constant-width ReLU network y -> Phi(y) on Omega = [0,1]^d.
///
/// Layers are A_0 : R^d -> R^W, then depth-1 hidden maps R^W -> R^W, then
/// A_depth : R^W -> R, with a ReLU after every layer but the last.
/// Parameter vector layout: layer by layer; within a layer the weight matrix
/// row-major, followed by the bias vector.
struct ReLUNetConfig {
  unsigned d = 1;
  unsigned W = 2;
  unsigned depth = 1;
  unsigned grid = 0;  ///< Omega samples per axis; 0 selects default_grid(d)

  void validate() const;
};

std::size_t param_count(unsigned d, unsigned W, unsigned depth);
std::size_t param_count(const ReLUNetConfig& config);

/// 256 points per axis for d = 1, 32 for d = 2, 10 for d >= 3.
unsigned default_grid(unsigned d);
unsigned effective_grid(const ReLUNetConfig& config);

/// Tensor grid {i/(G-1)}^d in lexicographic order.
std::vector<Point> omega_grid(const ReLUNetConfig& config);

struct ForwardTrace {
  double value = 0.0;
  std::vector<double> layer_max;  ///< max |eta^(j)_i| for j = 0..depth
};

/// Output bound (d+2) W^j for the j-th layer, valid whenever ||y||_inf <= 1.
double layer_bound(const ReLUNetConfig& config, unsigned j);

/// Throws PreconditionError for a wrong parameter count, ||y||_inf > 1 or x
/// outside Omega, and NumericFailure if a layer exceeds layer_bound.
ForwardTrace forward_trace(const ReLUNetConfig& config, PointView y, PointView x);
double forward(const ReLUNetConfig& config, PointView y, PointView x);

/// Phi(y) sampled on the whole Omega grid.
std::vector<double> forward_grid(const ReLUNetConfig& config, PointView y,
                                 const std::vector<Point>& grid);

struct LipBoundTrace {
  std::vector<double> layer_bounds;  ///< (d+2) W^j, j = 0..depth
  std::vector<double> constants;     ///< C_j, j = 0..depth, rounded up to double
  std::string c_n_exact;             ///< C_depth as a decimal integer
  double c_n = 0.0;
  double c_prime = 0.0;              ///< C'(d) = 2(d+2) + 1/2
  double coarse_bound = 0.0;         ///< C' * depth * W^depth
  bool recursion_matches_closed_form = false;
  bool below_coarse = false;         ///< C_n < C' n W^n, decided in exact arithmetic
};

/// C_0 = d+1, C_j = W C_{j-1} + (d+2) W^j + 1, evaluated in exact integers.
LipBoundTrace lip_bound(const ReLUNetConfig& config);

/// Smallest C' with (n+1)(d+2)W^n + sum_{k<n} W^k <= C' n W^n for all n >= 1, W >= 2.
double c_prime(unsigned d);

enum class ReLUSampling { Uniform, LastLayer };

struct ReLUVerifyResult {
  double max_ratio = 0.0;
  double bound = 0.0;      ///< C_n
  double coarse_bound = 0.0;
  std::size_t trials = 0;
  std::size_t skipped = 0;  ///< degenerate pairs
  bool layer_bounds_ok = true;
  bool pass = false;
};

/// Samples parameter pairs in the unit cube and compares
/// max_x |Phi(y)(x) - Phi(y')(x)| / ||y - y'||_inf over the Omega grid with C_n.
/// Chunked seeding makes the result independent of `workers`.
ReLUVerifyResult verify_lipschitz(const ReLUNetConfig& config, std::uint64_t seed,
                                  std::size_t trials, unsigned workers = 1,
                                  ReLUSampling sampling = ReLUSampling::Uniform);

}  // namespace lipwidth
