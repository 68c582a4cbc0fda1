#include "lipwidth/width_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "lipwidth/json_io.hpp"
#include "lipwidth/parallel.hpp"

namespace lipwidth {

using nlohmann::json;

std::string_view to_string(WidthQuantity q) {
  return q == WidthQuantity::Lipschitz ? "lipschitz_width" : "kolmogorov_width";
}

json to_json(const WidthCertificate& cert) {
  json j{{"quantity", std::string(to_string(cert.quantity))},
         {"n", cert.n},
         {"value", cert.value},
         {"direction", std::string(to_string(cert.direction))},
         {"witness", cert.witness}};
  j["gamma"] = cert.gamma ? json(*cert.gamma) : json(nullptr);
  return j;
}

WidthCertificate certificate_from_json(const json& j) {
  WidthCertificate c;
  const auto q = j.at("quantity").get<std::string>();
  if (q == "lipschitz_width")
    c.quantity = WidthQuantity::Lipschitz;
  else if (q == "kolmogorov_width")
    c.quantity = WidthQuantity::Kolmogorov;
  else
    throw PreconditionError("certificate: unknown quantity '" + q + "'");
  c.n = j.at("n").get<unsigned>();
  c.value = j.at("value").get<double>();
  const auto d = j.at("direction").get<std::string>();
  if (d == "upper")
    c.direction = BoundDirection::Upper;
  else if (d == "lower")
    c.direction = BoundDirection::Lower;
  else
    c.direction = BoundDirection::Exact;
  if (j.contains("gamma") && !j["gamma"].is_null()) c.gamma = j["gamma"].get<double>();
  c.witness = j.value("witness", json::object());
  return c;
}

WidthCertificate fixed_width_upper(const FiniteSet& set, const LipschitzMapSpec& map,
                                   const std::vector<Point>& candidates) {
  if (candidates.size() != set.size())
    throw PreconditionError("fixed width: one candidate per set point required");
  double worst = 0.0;
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Point image = evaluate(map, candidates[i]);
    const double err = set.space().distance(set.point(i), image);
    if (err > worst) {
      worst = err;
      worst_index = i;
    }
  }
  WidthCertificate c;
  c.quantity = WidthQuantity::Lipschitz;
  c.n = static_cast<unsigned>(domain_dim(map));
  c.gamma = declared_lipschitz(map);
  c.value = worst;
  c.direction = BoundDirection::Upper;
  c.witness = {{"kind", "fixed_map"},
               {"map", map_to_json(map)},
               {"candidates", candidates},
               {"worst_index", worst_index}};
  return c;
}

EntropyWidthResult width_upper_from_entropy(const FiniteSet& set, unsigned k, unsigned n) {
  if (k < 1 || n < 1) throw PreconditionError("width from entropy: k and n must be positive");
  if (k * n > 24) throw PreconditionError("width from entropy: k*n exceeds the size guard 24");
  if (set.size() == 0) throw PreconditionError("width from entropy: empty set");

  const RadiusBounds rad = radius_upper(set);
  // Entropy numbers are translation invariant; the map is built around the
  // radius center so that every amplitude is at most rad.upper.
  const FiniteSet shifted = set.translated(rad.center);
  const EntropyEstimate e = inner_entropy(shifted, k * n);

  const std::size_t count = std::size_t{1} << (k * n);
  std::vector<Point> centers;
  centers.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
    centers.push_back(set.points()[e.centers[j % e.centers.size()]]);

  EntropyWidthResult out;
  out.map = build_entropy_map(set.space(), centers, k, n, rad.center);
  out.entropy_upper = e.upper;
  out.declared = declared_lipschitz(out.map);

  // Each point goes to the grid cube of its nearest covering center.
  out.candidates.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < e.centers.size(); ++c) {
      const double d = set.distance(i, e.centers[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out.candidates.push_back(entropy_grid_center(best, k, n));
  }
  const WidthCertificate fixed = fixed_width_upper(set, out.map, out.candidates);
  out.fixed_width = fixed.value;

  const double gamma = std::ldexp(rad.upper, static_cast<int>(k));
  WidthCertificate& c = out.certificate;
  c.quantity = WidthQuantity::Lipschitz;
  c.n = n;
  c.gamma = gamma;
  c.value = e.upper;
  c.direction = BoundDirection::Upper;
  c.witness = {{"kind", "entropy_map"},
               {"k", k},
               {"entropy_index", k * n},
               {"entropy_lower", e.lower},
               {"entropy_upper", e.upper},
               {"center_indices", e.centers},
               {"radius_center", rad.center},
               {"radius_upper", rad.upper},
               {"declared_lipschitz", out.declared},
               {"fixed_width", out.fixed_width},
               {"bumps", count}};
  return out;
}

std::vector<double> default_eps_grid(double diameter) {
  std::vector<double> grid;
  if (!(diameter > 0.0)) return grid;
  constexpr int kPoints = 64;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i) / (kPoints - 1);
    grid.push_back(diameter * std::exp2(-16.0 * (1.0 - t)));
  }
  grid.back() = diameter;
  return grid;
}

namespace {

WidthCertificate lower_certificate(unsigned n, double gamma) {
  WidthCertificate c;
  c.quantity = WidthQuantity::Lipschitz;
  c.n = n;
  c.gamma = gamma;
  c.value = 0.0;
  c.direction = BoundDirection::Lower;
  c.witness = {{"kind", "packing_count"}, {"eps", 0.0}};
  return c;
}

double log2_threshold(unsigned n, double gamma, double eps) {
  return static_cast<double>(n) * std::log2(3.0 * gamma / eps);
}

std::vector<double> sorted_desc(std::vector<double> grid) {
  if (grid.empty()) throw PreconditionError("width lower bound: empty eps grid");
  for (double e : grid)
    if (!(e > 0.0)) throw PreconditionError("width lower bound: eps values must be positive");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  return grid;
}

}  // namespace

WidthCertificate width_lower_certified(const MetricSet& set, unsigned n, double gamma,
                                       const std::vector<double>& eps_grid, unsigned workers) {
  if (!(gamma > 0.0)) throw PreconditionError("width lower bound: gamma must be positive");
  const auto grid = sorted_desc(eps_grid);
  WidthCertificate c = lower_certificate(n, gamma);

  // Packings at 4 eps bound the outer 2 eps-covering number from below. The
  // grid is scanned from the top in batches so the first hit is the answer.
  const unsigned batch = std::max(1u, workers);
  for (std::size_t start = 0; start < grid.size(); start += batch) {
    const std::size_t stop = std::min(grid.size(), start + batch);
    auto sizes = map_chunks<std::vector<std::size_t>>(
        stop - start, 1, workers, [&](std::size_t, std::size_t b, std::size_t) {
          return greedy_packing(set, 4.0 * grid[start + b]).indices;
        });
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const double eps = grid[start + i];
      const double log2p = std::log2(static_cast<double>(sizes[i].size()));
      const double threshold = log2_threshold(n, gamma, eps);
      if (log2p > threshold) {
        c.value = eps;
        json packing = json::array();
        if (sizes[i].size() <= 4096) packing = sizes[i];
        c.witness = {{"kind", "packing_count"},
                     {"eps", eps},
                     {"packing_radius", 4.0 * eps},
                     {"packing_size", sizes[i].size()},
                     {"log2_packing", log2p},
                     {"log2_threshold", threshold},
                     {"packing_indices", packing}};
        return c;
      }
    }
  }
  return c;
}

WidthCertificate width_lower_certified(const std::function<double(double)>& log2_packing_lower,
                                       unsigned n, double gamma, const std::vector<double>& eps_grid) {
  if (!(gamma > 0.0)) throw PreconditionError("width lower bound: gamma must be positive");
  WidthCertificate c = lower_certificate(n, gamma);
  for (double eps : sorted_desc(eps_grid)) {
    const double log2p = log2_packing_lower(4.0 * eps);
    const double threshold = log2_threshold(n, gamma, eps);
    if (log2p > threshold) {
      c.value = eps;
      c.witness = {{"kind", "packing_count"},
                   {"eps", eps},
                   {"packing_radius", 4.0 * eps},
                   {"log2_packing", log2p},
                   {"log2_threshold", threshold}};
      return c;
    }
  }
  return c;
}

namespace {

KolmogorovResult kolmogorov_shell(unsigned n, const char* kind) {
  KolmogorovResult r;
  r.certificate.quantity = WidthQuantity::Kolmogorov;
  r.certificate.n = n;
  r.certificate.direction = BoundDirection::Upper;
  r.certificate.witness = {{"kind", kind}};
  return r;
}

}  // namespace

KolmogorovResult kolmogorov_upper_l2(const FiniteSet& set, const std::vector<Point>& basis) {
  if (set.space().kind() != NormKind::L2)
    throw PreconditionError("kolmogorov: orthogonal projection needs an l2 space");
  const std::size_t dim = set.space().dim();
  for (const auto& b : basis) set.space().check(b);

  KolmogorovResult r = kolmogorov_shell(static_cast<unsigned>(basis.size()), "l2_projection");
  r.basis = basis;
  Eigen::MatrixXd B(dim, basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t k = 0; k < dim; ++k) B(k, i) = basis[i][k];
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  if (!basis.empty() && qr.rank() < static_cast<Eigen::Index>(basis.size()))
    throw NumericFailure("kolmogorov: basis vectors are linearly dependent");

  double worst = 0.0;
  std::size_t worst_index = 0;
  for (std::size_t p = 0; p < set.size(); ++p) {
    const Eigen::Map<const Eigen::VectorXd> f(set.points()[p].data(), static_cast<Eigen::Index>(dim));
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    if (!basis.empty()) coef = qr.solve(f);
    const double res = (f - B * coef).norm();
    r.coefficients.emplace_back(coef.data(), coef.data() + coef.size());
    r.residuals.push_back(res);
    if (res > worst) {
      worst = res;
      worst_index = p;
    }
  }
  r.certificate.value = worst;
  r.certificate.witness["basis"] = basis;
  r.certificate.witness["worst_index"] = worst_index;
  return r;
}

KolmogorovResult kolmogorov_upper(const FiniteSet& set, const std::vector<Point>& basis) {
  if (set.space().kind() == NormKind::L2) return kolmogorov_upper_l2(set, basis);
  throw PreconditionError("kolmogorov: no closed-form projector for norm '" +
                          std::string(to_string(set.space().kind())) + "'");
}

namespace {

// Exact L1 distance between a step function and the indicator of [lo, hi].
double l1_step_to_indicator(const NormedSpace& space, PointView f, double lo, double hi) {
  const auto& b = space.breakpoints();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double len = b[i + 1] - b[i];
    const double overlap = std::max(0.0, std::min(hi, b[i + 1]) - std::max(lo, b[i]));
    acc += std::abs(f[i] - 1.0) * overlap + std::abs(f[i]) * (len - overlap);
  }
  return acc;
}

}  // namespace

KolmogorovResult kolmogorov_upper_transport(const FiniteSet& set, unsigned n) {
  const auto& space = set.space();
  if (space.kind() != NormKind::L1Step)
    throw PreconditionError("kolmogorov transport: needs an L1-step space");
  if (n < 1) throw PreconditionError("kolmogorov transport: n must be positive");
  const auto& b = space.breakpoints();
  if (b.front() != 0.0 || b.back() != 2.0)
    throw PreconditionError("kolmogorov transport: breakpoints must span [0,2]");

  KolmogorovResult r = kolmogorov_shell(n, "transport_cells");
  const double dn = static_cast<double>(n);
  // Basis element j: indicator of [2j/n, 2(j+1)/n], stored on the space's cells.
  for (unsigned j = 0; j < n; ++j) {
    Point e(space.dim(), 0.0);
    const double lo = 2.0 * j / dn, hi = 2.0 * (j + 1) / dn;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double overlap = std::max(0.0, std::min(hi, b[i + 1]) - std::max(lo, b[i]));
      e[i] = overlap / (b[i + 1] - b[i]);
    }
    r.basis.push_back(std::move(e));
  }

  double worst = 0.0;
  std::size_t worst_index = 0;
  for (std::size_t p = 0; p < set.size(); ++p) {
    const Point& f = set.points()[p];
    // Parameter a: left end of the support of f.
    double a = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] != 0.0) {
        a = b[i];
        break;
      }
    unsigned j1 = 0, j2 = 0;
    for (unsigned j = 0; j < n; ++j) {
      if (2.0 * j / dn <= a) j1 = j;
      if (2.0 * j / dn <= a + 1.0) j2 = j;
    }
    Point coef(n, 0.0);
    for (unsigned j = j1; j <= j2; ++j) coef[j] = 1.0;
    const double res = l1_step_to_indicator(space, f, 2.0 * j1 / dn, 2.0 * (j2 + 1) / dn);
    r.coefficients.push_back(std::move(coef));
    r.residuals.push_back(res);
    if (res > worst) {
      worst = res;
      worst_index = p;
    }
  }
  r.certificate.value = worst;
  r.certificate.witness["cells"] = n;
  r.certificate.witness["worst_index"] = worst_index;
  r.certificate.witness["reference_upper"] = 4.0 / dn;
  return r;
}

TkComparison tk_comparison(const FiniteSet& set, const KolmogorovResult& kol) {
  const auto& space = set.space();
  const std::size_t dim = space.dim();
  const std::size_t n = kol.basis.size();
  if (kol.coefficients.size() != set.size())
    throw PreconditionError("tk comparison: Kolmogorov witness does not match the set");

  auto combine = [&](const Point& coef) {
    Point v(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < dim; ++k) v[k] += coef[i] * kol.basis[i][k];
    return v;
  };
  std::vector<Point> approximants;
  for (const auto& c : kol.coefficients) approximants.push_back(combine(c));

  // g0 must lie in the subspace. Candidates: every approximant and their mean.
  std::vector<Point> g0_coefs = kol.coefficients;
  Point mean(n, 0.0);
  for (const auto& c : kol.coefficients)
    for (std::size_t i = 0; i < n; ++i) mean[i] += c[i] / static_cast<double>(kol.coefficients.size());
  g0_coefs.push_back(mean);

  double best_spread = std::numeric_limits<double>::infinity();
  Point g0_coef;
  for (const auto& cand : g0_coefs) {
    const Point g = combine(cand);
    double spread = 0.0;
    for (const auto& a : approximants) spread = std::max(spread, space.distance(a, g));
    if (spread < best_spread) {
      best_spread = spread;
      g0_coef = cand;
    }
  }

  TkComparison out;
  out.kolmogorov_value = kol.certificate.value;
  const double rad = radius_upper(set).upper;
  out.gamma = out.kolmogorov_value + rad;
  if (best_spread > out.gamma) {
    out.gamma = best_spread;
    out.gamma_raised = true;
  }

  out.map.target = space;
  out.map.origin = combine(g0_coef);
  out.map.gamma = out.gamma;
  out.map.basis = kol.basis;

  std::vector<Point> candidates;
  for (const auto& c : kol.coefficients) {
    Point y(n, 0.0);
    if (out.gamma > 0.0)
      for (std::size_t i = 0; i < n; ++i) y[i] = (c[i] - g0_coef[i]) / out.gamma;
    candidates.push_back(std::move(y));
  }
  out.certificate = fixed_width_upper(set, out.map, candidates);
  out.certificate.n = static_cast<unsigned>(n);
  out.certificate.witness["kind"] = "affine_ball";
  out.certificate.witness["kolmogorov_value"] = out.kolmogorov_value;
  out.certificate.witness["radius_upper"] = rad;
  out.certificate.witness["gamma_raised"] = out.gamma_raised;
  out.holds = out.certificate.value <= out.kolmogorov_value + 1e-9;
  return out;
}

double power_log_delta(unsigned n, double c0, double alpha, double beta) {
  return c0 * std::pow(std::log2(static_cast<double>(n)), beta) / std::pow(static_cast<double>(n), alpha);
}

double growing_gamma(unsigned n, double c_prime, double delta, double lambda) {
  return c_prime * std::pow(static_cast<double>(n), delta) * std::pow(lambda, static_cast<double>(n));
}

CarlReport carl_transfer_check(const CarlInput& in,
                               const std::function<double(unsigned long long)>& entropy_lower) {
  if (!(in.delta > 0.0) || !(in.gamma > 0.0) || in.n < 1)
    throw PreconditionError("carl transfer: need n >= 1, gamma > 0, delta > 0");
  CarlReport r;
  r.n = in.n;
  r.gamma = in.gamma;
  r.delta = in.delta;
  r.vacuous = in.radius > 0.0 && in.delta >= in.radius;
  const double exponent = static_cast<double>(in.n) * std::log2(std::max(1.0, 3.0 * in.gamma / in.delta));
  r.m = static_cast<unsigned long long>(std::ceil(exponent));
  r.implied_upper = 2.0 * in.delta;
  r.entropy_lower = entropy_lower(r.m);
  r.margin = r.implied_upper - r.entropy_lower;
  r.contradiction = !r.vacuous && r.margin < 0.0;
  r.pass = !r.contradiction;
  return r;
}

WitnessCheck verify_witness(const WidthCertificate& cert, const FiniteSet* set) {
  const json& w = cert.witness;
  const std::string kind = w.value("kind", std::string());
  auto fail = [](std::string msg) { return WitnessCheck{false, std::move(msg)}; };
  constexpr double tol = 1e-9;

  if (kind == "packing_count") {
    if (cert.direction != BoundDirection::Lower) return fail("packing witness on a non-lower certificate");
    const double eps = w.at("eps").get<double>();
    if (cert.value == 0.0 && eps == 0.0) return {true, "vacuous lower bound"};
    if (eps != cert.value) return fail("witness eps differs from the certified value");
    const double threshold = log2_threshold(cert.n, cert.gamma.value(), eps);
    const double log2p = w.at("log2_packing").get<double>();
    if (!(log2p > threshold)) return fail("packing count does not exceed (3 gamma/eps)^n");
    if (set && w.contains("packing_indices") && !w["packing_indices"].empty()) {
      const auto idx = w["packing_indices"].get<std::vector<std::size_t>>();
      if (std::abs(std::log2(static_cast<double>(idx.size())) - log2p) > tol)
        return fail("packing list disagrees with its count");
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
          if (within(set->distance(idx[a], idx[b]), 4.0 * eps)) return fail("packing points too close");
    }
    return {true, "packing count exceeds the volume bound"};
  }
  if (kind == "entropy_map") {
    const double gamma = cert.gamma.value();
    if (w.at("declared_lipschitz").get<double>() > gamma * (1.0 + tol))
      return fail("declared Lipschitz constant exceeds gamma");
    if (w.at("fixed_width").get<double>() > cert.value + tol) return fail("evaluated width exceeds the value");
    if (set) {
      const auto centers = w.at("center_indices").get<std::vector<std::size_t>>();
      const unsigned k = w.at("k").get<unsigned>();
      if (centers.size() > (std::size_t{1} << (k * cert.n))) return fail("too many covering centers");
      double radius = 0.0;
      for (std::size_t i = 0; i < set->size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c : centers) best = std::min(best, set->distance(i, c));
        radius = std::max(radius, best);
      }
      if (radius > cert.value * (1.0 + tol) + tol) return fail("covering centers do not reach every point");
      const Point center = w.at("radius_center").get<Point>();
      double amp = 0.0;
      for (std::size_t c : centers) amp = std::max(amp, set->space().distance(set->point(c), center));
      if (std::ldexp(amp, static_cast<int>(k)) > gamma * (1.0 + tol) + tol)
        return fail("bump amplitudes exceed gamma / 2^k");
    }
    return {true, "covering and map constants re-checked"};
  }
  if (kind == "fixed_map" || kind == "affine_ball") {
    const LipschitzMapSpec map = map_from_json(w.at("map"));
    if (declared_lipschitz(map) > cert.gamma.value_or(0.0) * (1.0 + tol) + tol)
      return fail("map constant exceeds gamma");
    if (set) {
      const auto cands = w.at("candidates").get<std::vector<Point>>();
      const WidthCertificate again = fixed_width_upper(*set, map, cands);
      if (again.value > cert.value + tol) return fail("re-evaluated width exceeds the value");
    }
    return {true, "map re-evaluated"};
  }
  if (kind == "l2_projection") {
    if (set) {
      const auto basis = w.at("basis").get<std::vector<Point>>();
      const auto again = kolmogorov_upper_l2(*set, basis);
      if (again.certificate.value > cert.value + tol) return fail("projection residual exceeds the value");
    }
    return {true, "projection re-evaluated"};
  }
  if (kind == "transport_cells") {
    if (set) {
      const auto again = kolmogorov_upper_transport(*set, cert.n);
      if (again.certificate.value > cert.value + tol) return fail("cell approximation exceeds the value");
    }
    return {true, "cell approximation re-evaluated"};
  }
  if (kind == "refr_map") {
    const double sum = w.at("sum_upper").get<double>();
    const double rhs = w.at("rhs").get<double>();
    if (!(sum <= rhs)) return fail("volume condition fails");
    if (w.at("declared_lipschitz").get<double>() > cert.gamma.value() * (1.0 + tol))
      return fail("declared constant exceeds gamma");
    if (w.at("sigma_N").get<double>() > cert.value * (1.0 + tol)) return fail("sigma_N exceeds the value");
    return {true, "volume condition and constants re-checked"};
  }
  return fail("unknown witness kind '" + kind + "'");
}

}  // namespace lipwidth
