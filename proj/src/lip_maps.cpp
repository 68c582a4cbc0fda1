#include "lipwidth/lip_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lipwidth/parallel.hpp"

namespace lipwidth {

namespace {

constexpr double kBallSlack = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string cell_key(int level, const std::vector<std::uint32_t>& c) {
  std::string key(1 + 4 * c.size(), '\0');
  key[0] = static_cast<char>(level);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int b = 0; b < 4; ++b) key[1 + 4 * i + b] = static_cast<char>((c[i] >> (8 * b)) & 0xffu);
  return key;
}

double affine_domain_norm(const AffineBall& m, PointView c) {
  if (c.size() != m.basis.size()) throw DimensionMismatch("affine ball: coefficient count mismatch");
  Point v(m.target.dim(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += c[i] * m.basis[i][k];
  return m.target.norm(v);
}

double bump_weight(const BumpSum& m, std::size_t j, PointView y) {
  const double r = m.domain.distance(m.centers[j], y);
  return std::max(0.0, 1.0 - r / m.radii[j]) * m.amplitudes[j];
}

// Indices of bumps that can be nonzero at y.
template <class Fn>
void for_each_active(const BumpSum& m, PointView y, Fn&& fn) {
  if (m.cells) {
    std::vector<std::uint32_t> c(y.size());
    for (int level : m.cells->levels) {
      const double scale = std::ldexp(1.0, level);
      const double top = std::ldexp(2.0, level) - 1.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double v = std::clamp(std::floor((y[i] + 1.0) * scale), 0.0, top);
        c[i] = static_cast<std::uint32_t>(v);
      }
      auto it = m.cells->cells.find(cell_key(level, c));
      if (it != m.cells->cells.end()) fn(it->second);
    }
    return;
  }
  for (std::size_t j = 0; j < m.size(); ++j) fn(j);
}

void require_in_ball(double norm) {
  if (!(norm <= 1.0 + kBallSlack))
    throw PreconditionError("domain point outside the unit ball (norm " + std::to_string(norm) + ")");
}

}  // namespace

double sparse_linf_distance(const SparseVector& a, const SparseVector& b) {
  std::map<std::size_t, double> diff;
  for (auto [i, v] : a) diff[i] += v;
  for (auto [i, v] : b) diff[i] -= v;
  double out = 0.0;
  for (auto [i, v] : diff) out = std::max(out, std::abs(v));
  return out;
}

std::string variant_name(const LipschitzMapSpec& map) {
  return std::visit(Overloaded{[](const ConstantMap&) { return std::string("constant"); },
                               [](const BumpSum&) { return std::string("bump_sum"); },
                               [](const PiecewiseLinearPath&) { return std::string("piecewise_linear_path"); },
                               [](const AffineBall&) { return std::string("affine_ball"); },
                               [](const ReLUNetMap&) { return std::string("relu_net"); }},
                    map);
}

std::size_t domain_dim(const LipschitzMapSpec& map) {
  return std::visit(Overloaded{[](const ConstantMap& m) { return m.domain.dim(); },
                               [](const BumpSum& m) { return m.domain.dim(); },
                               [](const PiecewiseLinearPath&) { return std::size_t{1}; },
                               [](const AffineBall& m) { return m.basis.size(); },
                               [](const ReLUNetMap& m) { return param_count(m.config); }},
                    map);
}

double domain_norm(const LipschitzMapSpec& map, PointView y) {
  return std::visit(
      Overloaded{[&](const ConstantMap& m) { return m.domain.norm(y); },
                 [&](const BumpSum& m) { return m.domain.norm(y); },
                 [&](const PiecewiseLinearPath&) {
                   if (y.size() != 1) throw DimensionMismatch("path domain is one-dimensional");
                   return std::abs(y[0]);
                 },
                 [&](const AffineBall& m) { return affine_domain_norm(m, y); },
                 [&](const ReLUNetMap& m) {
                   if (y.size() != param_count(m.config))
                     throw DimensionMismatch("relu map: parameter count mismatch");
                   double r = 0.0;
                   for (double v : y) r = std::max(r, std::abs(v));
                   return r;
                 }},
      map);
}

void validate(const LipschitzMapSpec& map) {
  std::visit(
      Overloaded{
          [](const ConstantMap& m) { m.target.check(m.value); },
          [](const BumpSum& m) {
            const std::size_t N = m.size();
            if (m.radii.size() != N || m.amplitudes.size() != N)
              throw PreconditionError("bump sum: centers, radii and amplitudes differ in length");
            if (m.sparse() ? m.coordinates.size() != N : m.directions.size() != N)
              throw PreconditionError("bump sum: one direction per bump required");
            for (std::size_t j = 0; j < N; ++j) {
              m.domain.check(m.centers[j]);
              if (!(m.radii[j] > 0.0)) throw PreconditionError("bump sum: radii must be positive");
              if (!m.sparse()) {
                const double norm = m.target.norm(m.directions[j]);
                const bool zero_bump = norm == 0.0 && m.amplitudes[j] == 0.0;
                if (!zero_bump && std::abs(norm - 1.0) > 1e-9)
                  throw PreconditionError("bump sum: direction " + std::to_string(j) + " is not a unit vector");
              }
            }
            if (!m.sparse() && !m.offset.empty()) m.target.check(m.offset);
            // Supports may touch: the closed ball of one bump never meets the
            // open support of another.
            if (!m.cells && N <= 4096) {
              for (std::size_t i = 0; i < N; ++i)
                for (std::size_t j = i + 1; j < N; ++j)
                  if (m.domain.distance(m.centers[i], m.centers[j]) <
                      (m.radii[i] + m.radii[j]) * (1.0 - 1e-12))
                    throw PreconditionError("bump sum: balls " + std::to_string(i) + " and " +
                                            std::to_string(j) + " overlap");
            }
          },
          [](const PiecewiseLinearPath& m) {
            if (m.knots.size() < 2 || m.knots.size() != m.values.size())
              throw PreconditionError("path: need matching knots and values, at least two");
            for (std::size_t j = 1; j < m.knots.size(); ++j)
              if (!(m.knots[j] > m.knots[j - 1])) throw PreconditionError("path: knots must increase");
            if (m.knots.front() > -1.0 || m.knots.back() < 1.0)
              throw PreconditionError("path: knots must span [-1,1]");
            for (const auto& v : m.values) m.target.check(v);
          },
          [](const AffineBall& m) {
            m.target.check(m.origin);
            for (const auto& b : m.basis) m.target.check(b);
            if (!(m.gamma >= 0.0)) throw PreconditionError("affine ball: gamma must be nonnegative");
          },
          [](const ReLUNetMap& m) { m.config.validate(); }},
      map);
}

SparseVector evaluate_sparse(const BumpSum& m, PointView y) {
  require_in_ball(m.domain.norm(y));
  std::map<std::size_t, double> acc;
  for_each_active(m, y, [&](std::size_t j) {
    const double w = bump_weight(m, j, y);
    if (w != 0.0) acc[m.coordinates[j]] += w;
  });
  return {acc.begin(), acc.end()};
}

Point evaluate(const LipschitzMapSpec& map, PointView y) {
  require_in_ball(domain_norm(map, y));
  return std::visit(
      Overloaded{
          [&](const ConstantMap& m) { return m.value; },
          [&](const BumpSum& m) {
            if (m.sparse()) {
              std::size_t dim = 0;
              for (auto c : m.coordinates) dim = std::max(dim, c + 1);
              Point out(dim, 0.0);
              for (auto [i, v] : evaluate_sparse(m, y)) out[i] = v;
              return out;
            }
            Point out = m.offset.empty() ? Point(m.target.dim(), 0.0) : m.offset;
            for_each_active(m, y, [&](std::size_t j) {
              const double w = bump_weight(m, j, y);
              if (w == 0.0) return;
              for (std::size_t k = 0; k < out.size(); ++k) out[k] += w * m.directions[j][k];
            });
            return out;
          },
          [&](const PiecewiseLinearPath& m) {
            const double t = std::clamp(y[0], m.knots.front(), m.knots.back());
            auto it = std::upper_bound(m.knots.begin(), m.knots.end(), t);
            std::size_t hi = static_cast<std::size_t>(it - m.knots.begin());
            if (hi >= m.knots.size()) hi = m.knots.size() - 1;
            const std::size_t lo = hi - 1;
            const double s = (t - m.knots[lo]) / (m.knots[hi] - m.knots[lo]);
            Point out(m.values[lo].size());
            for (std::size_t k = 0; k < out.size(); ++k)
              out[k] = (1.0 - s) * m.values[lo][k] + s * m.values[hi][k];
            return out;
          },
          [&](const AffineBall& m) {
            Point out = m.origin;
            for (std::size_t i = 0; i < m.basis.size(); ++i)
              for (std::size_t k = 0; k < out.size(); ++k) out[k] += m.gamma * y[i] * m.basis[i][k];
            return out;
          },
          [&](const ReLUNetMap& m) { return forward_grid(m.config, y, omega_grid(m.config)); }},
      map);
}

double image_distance(const LipschitzMapSpec& map, PointView y1, PointView y2) {
  if (const auto* b = std::get_if<BumpSum>(&map); b && b->sparse())
    return sparse_linf_distance(evaluate_sparse(*b, y1), evaluate_sparse(*b, y2));
  const Point f1 = evaluate(map, y1);
  const Point f2 = evaluate(map, y2);
  return std::visit(
      Overloaded{[&](const ConstantMap& m) { return m.target.distance(f1, f2); },
                 [&](const BumpSum& m) { return m.target.distance(f1, f2); },
                 [&](const PiecewiseLinearPath& m) { return m.target.distance(f1, f2); },
                 [&](const AffineBall& m) { return m.target.distance(f1, f2); },
                 [&](const ReLUNetMap&) {
                   double r = 0.0;
                   for (std::size_t i = 0; i < f1.size(); ++i) r = std::max(r, std::abs(f1[i] - f2[i]));
                   return r;
                 }},
      map);
}

double declared_lipschitz(const LipschitzMapSpec& map) {
  return std::visit(
      Overloaded{[](const ConstantMap&) { return 0.0; },
                 [](const BumpSum& m) {
                   double g = 0.0;
                   for (std::size_t j = 0; j < m.size(); ++j)
                     g = std::max(g, std::abs(m.amplitudes[j]) / m.radii[j]);
                   return g;
                 },
                 [](const PiecewiseLinearPath& m) {
                   double g = 0.0;
                   for (std::size_t j = 1; j < m.knots.size(); ++j)
                     g = std::max(g, m.target.distance(m.values[j], m.values[j - 1]) /
                                         (m.knots[j] - m.knots[j - 1]));
                   return g;
                 },
                 [](const AffineBall& m) { return m.gamma; },
                 [](const ReLUNetMap& m) { return lip_bound(m.config).c_n; }},
      map);
}

Point sample_domain_point(const LipschitzMapSpec& map, std::mt19937_64& rng) {
  const std::size_t dim = domain_dim(map);
  // Box that contains the unit ball of the domain norm.
  Point half(dim, 1.0);
  bool box_is_ball = false;
  std::visit(Overloaded{[&](const ConstantMap& m) {
                          if (m.domain.kind() == NormKind::Linf) box_is_ball = true;
                          if (m.domain.kind() == NormKind::WeightedLinf) {
                            for (std::size_t i = 0; i < dim; ++i) half[i] = 1.0 / m.domain.weights()[i];
                            box_is_ball = true;
                          }
                        },
                        [&](const BumpSum& m) {
                          if (m.domain.kind() == NormKind::Linf) box_is_ball = true;
                          if (m.domain.kind() == NormKind::WeightedLinf) {
                            for (std::size_t i = 0; i < dim; ++i) half[i] = 1.0 / m.domain.weights()[i];
                            box_is_ball = true;
                          }
                          if (m.domain.kind() == NormKind::L1Step) {
                            const auto& b = m.domain.breakpoints();
                            for (std::size_t i = 0; i < dim; ++i) half[i] = 1.0 / (b[i + 1] - b[i]);
                          }
                        },
                        [&](const PiecewiseLinearPath&) { box_is_ball = true; },
                        [&](const AffineBall&) {},
                        [&](const ReLUNetMap&) { box_is_ball = true; }},
             map);
  Point y(dim);
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (std::size_t i = 0; i < dim; ++i) y[i] = half[i] * (2.0 * unit_uniform(rng) - 1.0);
    if (box_is_ball) return y;
    if (domain_norm(map, y) <= 1.0) return y;
  }
  // High-dimensional balls rarely accept: shrink the last draw radially.
  const double r = domain_norm(map, y);
  if (r > 1.0)
    for (double& v : y) v /= r;
  return y;
}

double empirical_lipschitz(const LipschitzMapSpec& map, std::uint64_t seed, std::size_t pairs,
                           unsigned workers) {
  if (pairs < 1) throw PreconditionError("empirical_lipschitz: pairs must be >= 1");
  auto chunk = [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto rng = chunk_rng(seed, c);
    double best = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
      const Point y1 = sample_domain_point(map, rng);
      const Point y2 = sample_domain_point(map, rng);
      Point diff(y1.size());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = y1[i] - y2[i];
      const double dy = domain_norm(map, diff);
      if (!(dy > kZeroTolerance)) continue;
      best = std::max(best, image_distance(map, y1, y2) / dy);
    }
    return best;
  };
  const auto parts = map_chunks<double>(pairs, 512, workers, chunk);
  double best = 0.0;
  for (double v : parts) best = std::max(best, v);
  return best;
}

BumpStrata bump_strata_lipschitz(const BumpSum& m, std::uint64_t seed, std::size_t pairs) {
  if (m.size() == 0) throw PreconditionError("bump strata: empty bump sum");
  const LipschitzMapSpec spec = m;
  auto rng = chunk_rng(seed, 0);
  auto pick = [&](std::size_t count) {
    return static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(count));
  };
  const ConstantMap unit_sampler{m.domain, m.domain, Point(m.domain.dim(), 0.0)};
  auto inside = [&](std::size_t j) {
    for (;;) {
      const Point u = sample_domain_point(unit_sampler, rng);
      Point y = axpy(m.centers[j], 0.999 * m.radii[j], u);
      if (m.domain.norm(y) <= 1.0) return y;
    }
  };
  auto free_of_bumps = [&](PointView y) {
    bool free = true;
    for_each_active(m, y, [&](std::size_t j) {
      if (m.domain.distance(m.centers[j], y) < m.radii[j]) free = false;
    });
    return free;
  };
  auto outside = [&]() {
    for (int attempt = 0; attempt < 256; ++attempt) {
      Point y = sample_domain_point(spec, rng);
      if (free_of_bumps(y)) return y;
    }
    // Tiled domains leave only ball boundaries uncovered.
    for (;;) {
      const std::size_t j = pick(m.size());
      Point u = sample_domain_point(unit_sampler, rng);
      const double r = m.domain.norm(u);
      if (!(r > 0.0)) continue;
      Point y = axpy(m.centers[j], m.radii[j] / r, u);
      if (m.domain.norm(y) <= 1.0 && free_of_bumps(y)) return y;
    }
  };
  auto ratio = [&](const Point& a, const Point& b) {
    Point diff(a.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[i] - b[i];
    const double dy = m.domain.norm(diff);
    if (!(dy > kZeroTolerance)) return 0.0;
    return image_distance(spec, a, b) / dy;
  };

  BumpStrata s;
  s.pairs_per_stratum = pairs;
  for (std::size_t t = 0; t < pairs; ++t) {
    const std::size_t i = pick(m.size());
    s.same_ball = std::max(s.same_ball, ratio(inside(i), inside(i)));
    s.both_outside = std::max(s.both_outside, ratio(outside(), outside()));
    s.inside_outside = std::max(s.inside_outside, ratio(inside(i), outside()));
    if (m.size() > 1) {
      std::size_t j = pick(m.size() - 1);
      if (j >= i) ++j;
      s.different_balls = std::max(s.different_balls, ratio(inside(i), inside(j)));
    }
  }
  return s;
}

PiecewiseLinearPath build_path_map(const NormedSpace& target, const std::vector<Point>& points) {
  if (points.size() < 2) throw PreconditionError("path map: need at least two points");
  PiecewiseLinearPath p;
  p.target = target;
  const double N = static_cast<double>(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    p.knots.push_back(j + 1 == points.size() ? 1.0 : -1.0 + 2.0 * static_cast<double>(j) / (N - 1.0));
    p.values.push_back(points[j]);
  }
  validate(p);
  return p;
}

Point entropy_grid_center(std::size_t j, unsigned k, unsigned n) {
  const std::size_t per_axis = std::size_t{1} << k;
  const double side = std::ldexp(1.0, 1 - static_cast<int>(k));
  Point c(n);
  for (unsigned i = n; i-- > 0;) {
    c[i] = -1.0 + (static_cast<double>(j % per_axis) + 0.5) * side;
    j /= per_axis;
  }
  return c;
}

BumpSum build_entropy_map(const NormedSpace& target, const std::vector<Point>& centers, unsigned k,
                          unsigned n, PointView offset) {
  if (k < 1 || n < 1) throw PreconditionError("entropy map: k and n must be positive");
  if (k * n > 24) throw PreconditionError("entropy map: k*n exceeds the size guard 24");
  const std::size_t count = std::size_t{1} << (k * n);
  if (centers.size() != count)
    throw PreconditionError("entropy map: expected " + std::to_string(count) + " centers, got " +
                            std::to_string(centers.size()));
  target.check(offset);

  BumpSum m;
  m.domain = NormedSpace::linf(n);
  m.target = target;
  m.offset.assign(offset.begin(), offset.end());
  const double radius = std::ldexp(1.0, -static_cast<int>(k));
  const int level = static_cast<int>(k) - 1;
  BumpSum::CellIndex index;
  index.levels = {level};
  const std::size_t per_axis = std::size_t{1} << k;
  std::vector<std::uint32_t> cell(n);
  for (std::size_t j = 0; j < count; ++j) {
    m.centers.push_back(entropy_grid_center(j, k, n));
    m.radii.push_back(radius);
    Point diff = axpy(centers[j], -1.0, offset);
    const double norm = target.norm(diff);
    if (norm > kZeroTolerance) {
      for (double& v : diff) v /= norm;
      m.amplitudes.push_back(norm);
    } else {
      std::fill(diff.begin(), diff.end(), 0.0);
      m.amplitudes.push_back(0.0);
    }
    m.directions.push_back(std::move(diff));
    std::size_t rest = j;
    for (unsigned i = n; i-- > 0;) {
      cell[i] = static_cast<std::uint32_t>(rest % per_axis);
      rest /= per_axis;
    }
    index.cells.emplace(cell_key(level, cell), j);
  }
  m.cells = std::move(index);
  return m;
}

int refr_level(double sigma, double gamma) {
  if (!(sigma > 0.0) || !(gamma > 0.0)) throw PreconditionError("refr level: sigma and gamma must be positive");
  const double q = 2.0 * sigma / gamma;
  if (q > 1.0) throw PreconditionError("refr level: sigma exceeds gamma/2");
  int l = static_cast<int>(std::floor(-std::log2(q)));
  while (q > std::ldexp(1.0, -l)) --l;
  while (q <= std::ldexp(1.0, -l - 1)) ++l;
  return l;
}

RefrMap build_refr_map(const std::function<double(std::size_t)>& sigma, double gamma, unsigned n,
                       std::size_t N, std::optional<double> sum_upper, std::size_t materialize_cap) {
  if (n < 1) throw PreconditionError("refr map: n must be positive");
  if (N < 1) throw PreconditionError("refr map: N must be positive");
  if (!(gamma > 0.0)) throw PreconditionError("refr map: gamma must be positive");
  const double s1 = sigma(1);
  if (s1 > gamma / 2.0)
    throw PreconditionError("refr map: sigma_1 = " + std::to_string(s1) + " exceeds gamma/2");

  RefrMap out;
  out.requested = N;
  out.rhs = std::pow(gamma / 2.0, static_cast<double>(n));
  out.sigma_n = sigma(N);
  if (N <= materialize_cap) {
    long double sum = 0.0L;
    for (std::size_t j = 1; j <= N; ++j) sum += std::pow(static_cast<long double>(sigma(j)), n);
    out.sum_upper = static_cast<double>(sum);
  } else {
    if (!sum_upper) throw PreconditionError("refr map: N above the materialisation cap needs a certified sum bound");
    out.sum_upper = *sum_upper;
  }
  if (sum_upper) out.sum_upper = std::min(out.sum_upper, *sum_upper);
  if (!(out.sum_upper <= out.rhs))
    throw PreconditionError("refr map: sum of sigma_j^n = " + std::to_string(out.sum_upper) +
                            " exceeds (gamma/2)^n = " + std::to_string(out.rhs));

  const std::size_t M = std::min(N, materialize_cap);
  out.materialized = M;
  std::vector<int> levels(M);
  for (std::size_t j = 1; j <= M; ++j) levels[j - 1] = refr_level(sigma(j), gamma);
  out.cubes = allocate_dyadic_cubes(n, levels);

  BumpSum& m = out.map;
  m.domain = NormedSpace::linf(n);
  m.target = NormedSpace::linf(std::max<std::size_t>(M, 1));
  BumpSum::CellIndex index;
  std::vector<std::uint32_t> cell(n);
  m.centers.reserve(M);
  for (std::size_t j = 0; j < M; ++j) {
    m.centers.push_back(out.cubes.center(j));
    m.radii.push_back(std::ldexp(1.0, -levels[j] - 1));
    m.amplitudes.push_back(sigma(j + 1));
    m.coordinates.push_back(j);
    std::copy(out.cubes.coords.begin() + j * n, out.cubes.coords.begin() + (j + 1) * n, cell.begin());
    index.cells.emplace(cell_key(levels[j], cell), j);
    out.declared = std::max(out.declared, std::ldexp(sigma(j + 1), levels[j] + 1));
  }
  index.levels.assign(levels.begin(), levels.end());
  std::sort(index.levels.begin(), index.levels.end());
  index.levels.erase(std::unique(index.levels.begin(), index.levels.end()), index.levels.end());
  m.cells = std::move(index);
  return out;
}

}  // namespace lipwidth
