#include "lipwidth/relu.hpp"

#include <algorithm>
#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include "lipwidth/parallel.hpp"

namespace lipwidth {

using boost::multiprecision::cpp_int;

void ReLUNetConfig::validate() const {
  if (d < 1) throw PreconditionError("relu: input dimension d must be >= 1");
  if (W < 2) throw PreconditionError("relu: width W must be >= 2");
  if (depth < 1) throw PreconditionError("relu: depth must be >= 1");
  if (grid == 1) throw PreconditionError("relu: grid needs at least 2 points per axis");
}

std::size_t param_count(unsigned d, unsigned W, unsigned depth) {
  const std::size_t w = W;
  return w * (d + 1) + (depth - 1) * w * (w + 1) + (w + 1);
}

std::size_t param_count(const ReLUNetConfig& config) {
  return param_count(config.d, config.W, config.depth);
}

unsigned default_grid(unsigned d) {
  if (d <= 1) return 256;
  if (d == 2) return 32;
  return 10;
}

unsigned effective_grid(const ReLUNetConfig& config) {
  return config.grid == 0 ? default_grid(config.d) : config.grid;
}

std::vector<Point> omega_grid(const ReLUNetConfig& config) {
  config.validate();
  const unsigned g = effective_grid(config);
  std::size_t total = 1;
  for (unsigned i = 0; i < config.d; ++i) total *= g;
  std::vector<Point> out;
  out.reserve(total);
  std::vector<unsigned> idx(config.d, 0);
  for (std::size_t t = 0; t < total; ++t) {
    Point x(config.d);
    for (unsigned i = 0; i < config.d; ++i) x[i] = static_cast<double>(idx[i]) / (g - 1);
    out.push_back(std::move(x));
    for (unsigned i = config.d; i-- > 0;) {
      if (++idx[i] < g) break;
      idx[i] = 0;
    }
  }
  return out;
}

double layer_bound(const ReLUNetConfig& config, unsigned j) {
  return (config.d + 2.0) * std::pow(static_cast<double>(config.W), static_cast<double>(j));
}

namespace {

// Layer-wise evaluation without allocation in the hot loop. Returns the
// output and records the largest |entry| of each layer when `maxima` is set.
double run_layers(const ReLUNetConfig& c, const double* y, const double* x, double* a, double* b,
                  double* maxima) {
  const unsigned W = c.W;
  const double* p = y;
  double peak = 0.0;
  for (unsigned i = 0; i < W; ++i) {
    double s = 0.0;
    for (unsigned k = 0; k < c.d; ++k) s += p[i * c.d + k] * x[k];
    a[i] = s;
  }
  p += static_cast<std::size_t>(W) * c.d;
  for (unsigned i = 0; i < W; ++i) {
    a[i] = std::max(0.0, a[i] + p[i]);
    peak = std::max(peak, a[i]);
  }
  p += W;
  if (maxima) maxima[0] = peak;

  for (unsigned layer = 1; layer < c.depth; ++layer) {
    peak = 0.0;
    for (unsigned i = 0; i < W; ++i) {
      double s = 0.0;
      const double* row = p + static_cast<std::size_t>(i) * W;
      for (unsigned k = 0; k < W; ++k) s += row[k] * a[k];
      b[i] = s;
    }
    p += static_cast<std::size_t>(W) * W;
    for (unsigned i = 0; i < W; ++i) {
      b[i] = std::max(0.0, b[i] + p[i]);
      peak = std::max(peak, b[i]);
    }
    p += W;
    if (maxima) maxima[layer] = peak;
    std::swap(a, b);
  }

  double out = 0.0;
  for (unsigned k = 0; k < W; ++k) out += p[k] * a[k];
  out += p[W];
  if (maxima) maxima[c.depth] = std::abs(out);
  return out;
}

void check_inputs(const ReLUNetConfig& c, PointView y, PointView x) {
  c.validate();
  if (y.size() != param_count(c))
    throw PreconditionError("relu: expected " + std::to_string(param_count(c)) +
                            " parameters, got " + std::to_string(y.size()));
  for (double v : y)
    if (!(std::abs(v) <= 1.0)) throw PreconditionError("relu: parameter vector outside the unit cube");
  if (x.size() != c.d) throw DimensionMismatch("relu: input point has the wrong dimension");
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0)) throw PreconditionError("relu: input point outside [0,1]^d");
}

}  // namespace

ForwardTrace forward_trace(const ReLUNetConfig& config, PointView y, PointView x) {
  check_inputs(config, y, x);
  std::vector<double> a(config.W), b(config.W);
  ForwardTrace t;
  t.layer_max.assign(config.depth + 1, 0.0);
  t.value = run_layers(config, y.data(), x.data(), a.data(), b.data(), t.layer_max.data());
  for (unsigned j = 0; j <= config.depth; ++j) {
    // Tiny slack for rounding in the accumulated sums.
    if (t.layer_max[j] > layer_bound(config, j) * (1.0 + 1e-12))
      throw NumericFailure("relu: layer " + std::to_string(j) + " output exceeds (d+2)W^j");
  }
  return t;
}

double forward(const ReLUNetConfig& config, PointView y, PointView x) {
  return forward_trace(config, y, x).value;
}

std::vector<double> forward_grid(const ReLUNetConfig& config, PointView y,
                                 const std::vector<Point>& grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (const auto& x : grid) out.push_back(forward(config, y, x));
  return out;
}

double c_prime(unsigned d) { return 2.0 * (d + 2.0) + 0.5; }

LipBoundTrace lip_bound(const ReLUNetConfig& config) {
  config.validate();
  const cpp_int W = config.W;
  const unsigned n = config.depth;
  const unsigned d = config.d;

  LipBoundTrace t;
  cpp_int c = d + 1;
  cpp_int wj = 1;
  t.constants.push_back(static_cast<double>(c));
  t.layer_bounds.push_back(d + 2.0);
  for (unsigned j = 1; j <= n; ++j) {
    wj *= W;
    c = W * c + (d + 2) * wj + 1;
    t.constants.push_back(static_cast<double>(c));
    t.layer_bounds.push_back(static_cast<double>((d + 2) * wj));
  }

  // Unrolled: (d+1) W^n + n (d+2) W^n + sum_{k<n} W^k.
  cpp_int geometric = 0, wk = 1;
  for (unsigned k = 0; k < n; ++k) {
    geometric += wk;
    wk *= W;
  }
  const cpp_int closed = (d + 1) * wk + n * (d + 2) * wk + geometric;
  t.recursion_matches_closed_form = closed == c;

  t.c_n_exact = c.str();
  t.c_n = static_cast<double>(c);
  t.c_prime = c_prime(d);
  t.coarse_bound = t.c_prime * n * static_cast<double>(wk);
  // C' = (4d + 9)/2, so C_n < C' n W^n  <=>  2 C_n < (4d + 9) n W^n.
  t.below_coarse = 2 * c < (4 * d + 9) * n * wk;
  return t;
}

ReLUVerifyResult verify_lipschitz(const ReLUNetConfig& config, std::uint64_t seed,
                                  std::size_t trials, unsigned workers, ReLUSampling sampling) {
  config.validate();
  if (trials < 1) throw PreconditionError("relu verify: trials must be >= 1");
  const LipBoundTrace lip = lip_bound(config);
  const std::vector<Point> grid = omega_grid(config);
  const std::size_t np = param_count(config);
  const std::size_t last_layer = config.W + 1;

  struct Partial {
    double max_ratio = 0.0;
    std::size_t skipped = 0;
    bool layers_ok = true;
  };

  auto chunk = [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto rng = chunk_rng(seed, c);
    Partial part;
    std::vector<double> y(np), y2(np), a(config.W), b(config.W), maxima(config.depth + 1);
    for (std::size_t t = begin; t < end; ++t) {
      for (double& v : y) v = 2.0 * unit_uniform(rng) - 1.0;
      y2 = y;
      const std::size_t first = sampling == ReLUSampling::LastLayer ? np - last_layer : 0;
      for (std::size_t i = first; i < np; ++i) y2[i] = 2.0 * unit_uniform(rng) - 1.0;

      double dy = 0.0;
      for (std::size_t i = 0; i < np; ++i) dy = std::max(dy, std::abs(y[i] - y2[i]));
      if (dy == 0.0) {
        ++part.skipped;
        continue;
      }
      double sup = 0.0;
      for (const auto& x : grid) {
        const double f1 = run_layers(config, y.data(), x.data(), a.data(), b.data(), maxima.data());
        for (unsigned j = 0; j <= config.depth; ++j)
          if (maxima[j] > lip.layer_bounds[j] * (1.0 + 1e-12)) part.layers_ok = false;
        const double f2 = run_layers(config, y2.data(), x.data(), a.data(), b.data(), maxima.data());
        for (unsigned j = 0; j <= config.depth; ++j)
          if (maxima[j] > lip.layer_bounds[j] * (1.0 + 1e-12)) part.layers_ok = false;
        sup = std::max(sup, std::abs(f1 - f2));
      }
      part.max_ratio = std::max(part.max_ratio, sup / dy);
    }
    return part;
  };

  const auto parts = map_chunks<Partial>(trials, 256, workers, chunk);
  ReLUVerifyResult r;
  r.trials = trials;
  r.bound = lip.c_n;
  r.coarse_bound = lip.coarse_bound;
  for (const auto& p : parts) {
    r.max_ratio = std::max(r.max_ratio, p.max_ratio);
    r.skipped += p.skipped;
    r.layer_bounds_ok = r.layer_bounds_ok && p.layers_ok;
  }
  r.pass = r.layer_bounds_ok && r.max_ratio <= r.bound;
  return r;
}

}  // namespace lipwidth
