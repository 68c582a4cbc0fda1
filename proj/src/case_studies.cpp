#include "lipwidth/case_studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lipwidth {

using nlohmann::json;

namespace {

constexpr double kExactSumLimit = 1e6;
// Bumps built explicitly for the large-N refr map; the remaining ones are
// covered by the certified volume bound.
constexpr std::size_t kRefrPrefix = std::size_t{1} << 17;

}  // namespace

SequenceSetSpec SequenceSetSpec::log_inv(std::size_t truncation) {
  SequenceSetSpec s;
  s.kind = Kind::LogInv;
  s.truncation = truncation;
  return s;
}

SequenceSetSpec SequenceSetSpec::power(double c, std::size_t truncation) {
  SequenceSetSpec s;
  s.kind = Kind::Power;
  s.c = c;
  s.truncation = truncation;
  return s;
}

SequenceSetSpec SequenceSetSpec::custom(std::vector<double> values) {
  SequenceSetSpec s;
  s.kind = Kind::Custom;
  s.truncation = values.size();
  s.values = std::move(values);
  return s;
}

double SequenceSetSpec::sigma(std::size_t j) const {
  if (j < 1) throw PreconditionError("sequence: indices start at 1");
  switch (kind) {
    case Kind::LogInv: return std::numbers::ln2 / std::log1p(static_cast<double>(j));
    case Kind::Power: return std::pow(static_cast<double>(j), -c);
    case Kind::Custom: return j <= values.size() ? values[j - 1] : 0.0;
  }
  return 0.0;
}

void SequenceSetSpec::validate() const {
  if (truncation < 2) throw PreconditionError("sequence: truncation must be at least 2");
  if (kind == Kind::Power && !(c > 0.0)) throw PreconditionError("sequence: power exponent must be positive");
  if (kind == Kind::Custom) {
    if (values.size() != truncation) throw PreconditionError("sequence: custom list length differs from truncation");
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (!(values[j] > 0.0)) throw PreconditionError("sequence: values must be positive");
      if (j > 0 && !(values[j] < values[j - 1]))
        throw PreconditionError("sequence: values must be strictly decreasing");
    }
  }
}

SequenceSet::SequenceSet(SequenceSetSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  sigma_.resize(spec_.truncation);
  for (std::size_t j = 1; j <= spec_.truncation; ++j) sigma_[j - 1] = spec_.sigma(j);
}

double SequenceSet::distance(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const std::size_t zero = sigma_.size();
  if (i == zero) return sigma_[j];
  if (j == zero) return sigma_[i];
  return std::max(sigma_[i], sigma_[j]);
}

double sequence_entropy_exact(const SequenceSetSpec& spec, unsigned n) {
  if (n > 62) throw PreconditionError("sequence entropy: n too large");
  return spec.sigma(std::size_t{1} << n);
}

double sequence_packing_lower_log2(const SequenceSetSpec& spec, double r) {
  if (!(r > 0.0)) throw PreconditionError("packing count: radius must be positive");
  // Guard against rounding in the closed forms below.
  constexpr double kShave = 1e-12;
  switch (spec.kind) {
    case SequenceSetSpec::Kind::LogInv: {
      // sigma_j > r iff j < 2^(1/r) - 1, so with the origin at least 2^(1/r) - 1 points.
      const double t = 1.0 / r;
      if (t <= 1.0) return 0.0;
      return std::max(0.0, t + std::log1p(-std::exp2(-t)) / std::numbers::ln2 - kShave * t);
    }
    case SequenceSetSpec::Kind::Power: {
      const double t = -std::log2(r) / spec.c;
      return std::max(0.0, t - kShave * std::abs(t));
    }
    case SequenceSetSpec::Kind::Custom: {
      const auto count = std::count_if(spec.values.begin(), spec.values.end(), [&](double s) { return s > r; });
      return std::log2(static_cast<double>(count + 1));
    }
  }
  return 0.0;
}

RefrCondition refr_condition(const SequenceSetSpec& spec, double gamma, unsigned n, double N) {
  if (n < 1) throw PreconditionError("refr condition: n must be positive");
  if (!(N >= 1.0)) throw PreconditionError("refr condition: N must be at least 1");
  if (spec.sigma(1) > gamma / 2.0) throw PreconditionError("refr condition: sigma_1 exceeds gamma/2");

  RefrCondition r;
  r.rhs = std::pow(gamma / 2.0, static_cast<double>(n));
  const double Nf = std::floor(N);
  if (Nf <= kExactSumLimit || spec.kind == SequenceSetSpec::Kind::Custom) {
    const auto last = static_cast<std::size_t>(
        spec.kind == SequenceSetSpec::Kind::Custom ? std::min<double>(Nf, static_cast<double>(spec.values.size())) : Nf);
    long double sum = 0.0L;
    for (std::size_t j = 1; j <= last; ++j) sum += std::pow(static_cast<long double>(spec.sigma(j)), n);
    r.lhs_upper = static_cast<double>(sum);
    r.method = "exact";
  } else if (spec.kind == SequenceSetSpec::Kind::LogInv) {
    // Block k holds the 2^k indices with 2^k <= j+1 < 2^(k+1), each sigma_j <= 1/k.
    int J = 0;
    std::frexp(Nf, &J);  // 2^(J-1) <= N < 2^J
    const double dn = static_cast<double>(n);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int k = 1; k <= J - 1; ++k) {
      const double term = std::exp2(static_cast<double>(k) - dn * std::log2(static_cast<double>(k)));
      if (k <= dn / std::log(4.0))
        s1 += term;
      else if (k <= dn / std::numbers::ln2)
        s2 += term;
      else
        s3 += term;
    }
    r.s1 = s1;
    r.s2 = s2;
    r.s3 = s3;
    r.blocks = static_cast<unsigned>(J);
    r.lhs_upper = 1.0 + s1 + s2 + s3;
    r.method = "dyadic_block";
  } else {
    const double cn = spec.c * n;
    if (!(cn > 1.0)) throw PreconditionError("refr condition: no summable tail majorant for c*n <= 1");
    const double n0 = std::ceil(1.0 / spec.c);
    r.lhs_upper = n0 + n0 / (cn - 1.0);
    r.method = "integral_tail";
  }
  r.holds = r.lhs_upper <= r.rhs;
  return r;
}

namespace {

// Phi sends the center of cube j to sigma_j e_j and the corner (-1,...,-1) to 0.
bool refr_spot_check(const RefrMap& refr, const std::function<double(std::size_t)>& sigma) {
  const std::size_t M = refr.materialized;
  std::vector<std::size_t> probe;
  for (std::size_t j = 0; j < std::min<std::size_t>(M, 64); ++j) probe.push_back(j);
  for (std::size_t j : {M / 3, M / 2, M - 1}) probe.push_back(j);
  for (std::size_t j : probe) {
    const SparseVector v = evaluate_sparse(refr.map, refr.cubes.center(j));
    if (v.size() != 1 || v[0].first != j) return false;
    if (std::abs(v[0].second - sigma(j + 1)) > 1e-12 * sigma(j + 1)) return false;
  }
  const Point corner(refr.cubes.n, -1.0);
  for (const auto& [coord, value] : evaluate_sparse(refr.map, corner)) {
    (void)coord;
    if (std::abs(value) > 1e-12) return false;
  }
  return true;
}

json condition_json(const RefrCondition& c) {
  json j{{"holds", c.holds}, {"lhs_upper", c.lhs_upper}, {"rhs", c.rhs}, {"method", c.method}};
  if (c.s1) {
    j["S1"] = *c.s1;
    j["S2"] = *c.s2;
    j["S3"] = *c.s3;
    j["J"] = *c.blocks;
  }
  return j;
}

}  // namespace

SeparationResult separation_certificates(unsigned n, double gamma) {
  if (n < 5) throw PreconditionError("separation certificates need n >= 5");
  if (!(gamma >= 3.0)) throw PreconditionError("separation certificates need gamma >= 3");
  if (n > 16) throw PreconditionError("separation certificates support n <= 16");

  SeparationResult r;
  r.n = n;
  r.gamma = gamma;
  const double dn = static_cast<double>(n);
  r.N = std::pow(dn + 1.0, dn);
  const auto spec = SequenceSetSpec::log_inv(std::size_t{1} << std::min(n + 4, 14u));
  const auto sigma = [&spec](std::size_t j) { return spec.sigma(j); };

  r.condition = refr_condition(spec, gamma, n, r.N);
  if (!r.condition.holds) throw NumericFailure("separation: volume condition fails");
  const RefrMap refr = build_refr_map(sigma, gamma, n, static_cast<std::size_t>(r.N), r.condition.lhs_upper,
                                      kRefrPrefix);
  r.materialized = refr.materialized;
  r.declared = refr.declared;
  r.sigma_N = refr.sigma_n;
  r.spot_check = refr_spot_check(refr, sigma);

  r.upper.quantity = WidthQuantity::Lipschitz;
  r.upper.n = n;
  r.upper.gamma = gamma;
  r.upper.value = 1.0 / (dn * std::log2(dn + 1.0));
  r.upper.direction = BoundDirection::Upper;
  r.upper.witness = {{"kind", "refr_map"},
                     {"N", r.N},
                     {"sigma_N", r.sigma_N},
                     {"sum_upper", refr.sum_upper},
                     {"rhs", refr.rhs},
                     {"declared_lipschitz", refr.declared},
                     {"materialized", refr.materialized},
                     {"condition", condition_json(r.condition)}};

  const auto grid = default_eps_grid(spec.sigma(1));
  r.lower = width_lower_certified([&spec](double rr) { return sequence_packing_lower_log2(spec, rr); }, n, gamma,
                                  grid);
  r.lower.witness["source"] = "untruncated_packing_count";

  // The truncation has at most M+1 points, counted exactly.
  const SequenceSet truncated(spec);
  const auto truncated_count = [&truncated, &spec](double rr) {
    std::size_t count = 1;
    for (std::size_t j = 1; j <= spec.truncation && truncated.sigma(j) > rr; ++j) ++count;
    return std::log2(static_cast<double>(count));
  };
  r.truncated_lower = width_lower_certified(truncated_count, n, gamma, grid).value;

  r.entropy_reference = 1.0 / dn;
  r.entropy_exact = sequence_entropy_exact(spec, n);
  r.ratio = r.upper.value / r.entropy_reference;
  return r;
}

bool collapse_tail_inequality(double c, double gamma, unsigned n) {
  const double n0 = std::ceil(1.0 / c);
  const double cn = c * n;
  if (!(cn > 1.0) || n < n0 + 1.0) return false;
  return n0 + n0 / (cn - 1.0) <= std::pow(gamma / 2.0, static_cast<double>(n));
}

unsigned collapse_threshold(double c, double gamma) {
  if (!(c > 0.0)) throw PreconditionError("collapse: c must be positive");
  if (!(gamma > 2.0)) throw PreconditionError("collapse: gamma must exceed 2");
  const auto n0 = static_cast<unsigned>(std::ceil(1.0 / c));
  for (unsigned n = n0 + 1; n < 1000000; ++n)
    if (collapse_tail_inequality(c, gamma, n)) return n;
  throw NumericFailure("collapse: no n1 below 10^6");
}

std::vector<CollapsePoint> collapse_certificates(double c, double gamma, unsigned n,
                                                 const std::vector<std::size_t>& Ns) {
  std::vector<CollapsePoint> out;
  for (std::size_t N : Ns) {
    const auto spec = SequenceSetSpec::power(c, std::max<std::size_t>(N, 2));
    const auto sigma = [&spec](std::size_t j) { return spec.sigma(j); };
    const RefrCondition cond = refr_condition(spec, gamma, n, static_cast<double>(N));
    CollapsePoint p;
    p.N = N;
    p.condition = cond.holds;
    if (cond.holds) {
      const RefrMap refr = build_refr_map(sigma, gamma, n, N, cond.lhs_upper, std::max(N, kRefrPrefix));
      p.sigma_N = refr.sigma_n;
      p.declared = refr.declared;
      p.spot_check = refr_spot_check(refr, sigma);
    }
    out.push_back(p);
  }
  return out;
}

double HilbertBasisSet::distance(std::size_t i, std::size_t j) const {
  return i == j ? 0.0 : std::numbers::sqrt2;
}

HilbertReport hilbert_example(unsigned m, double gamma, unsigned s, unsigned workers) {
  if (m < 1 || m > 20) throw PreconditionError("hilbert example: m must lie in 1..20");
  if (s < 1) throw PreconditionError("hilbert example: s must be positive");
  if (!(gamma > 0.0)) throw PreconditionError("hilbert example: gamma must be positive");
  HilbertReport r;
  r.m = m;
  r.gamma = gamma;
  r.s = s;
  r.threshold_lhs = std::numbers::sqrt2 / (12.0 * gamma);
  r.threshold_rhs = 4.0 * std::exp2(-static_cast<double>(m) / s);
  r.threshold_holds = r.threshold_lhs > r.threshold_rhs;

  const HilbertBasisSet set((std::size_t{1} << m) + 1);
  EntropySolver solver(set);
  r.entropy_contains_sqrt2 = true;
  for (unsigned k = 1; k <= m; ++k) {
    r.entropy.push_back(solver.inner_entropy(k));
    const auto& e = r.entropy.back();
    if (!(e.lower <= std::numbers::sqrt2 * (1 + 1e-12) && e.upper >= std::numbers::sqrt2 * (1 - 1e-12)))
      r.entropy_contains_sqrt2 = false;
  }
  r.packing_lower = width_lower_certified(set, s, gamma, default_eps_grid(std::numbers::sqrt2), workers);
  r.example_lower = r.threshold_holds ? std::numbers::sqrt2 / 3.0 : 0.0;
  return r;
}

FiniteSet transport_set(std::size_t grid) {
  if (grid < 2) throw PreconditionError("transport: grid must be at least 2");
  const double g = static_cast<double>(grid);
  std::vector<double> breaks(2 * grid + 1);
  for (std::size_t i = 0; i < breaks.size(); ++i) breaks[i] = static_cast<double>(i) / g;
  std::vector<Point> points;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k <= grid; ++k) {
    Point f(2 * grid, 0.0);
    std::fill(f.begin() + static_cast<std::ptrdiff_t>(k), f.begin() + static_cast<std::ptrdiff_t>(k + grid), 1.0);
    points.push_back(std::move(f));
    labels.push_back("a=" + std::to_string(k) + "/" + std::to_string(grid));
  }
  return {NormedSpace::l1_step(std::move(breaks)), std::move(points), std::move(labels)};
}

TransportReference transport_reference(unsigned n) {
  if (n < 1) throw PreconditionError("transport reference: n must be positive");
  const double dn = static_cast<double>(n);
  return {std::exp2(1.0 - dn), 4.0 / dn, 1.0 / (dn + 1.0)};
}

FiniteSet diagonal_set(std::size_t truncation) {
  if (truncation < 1) throw PreconditionError("diagonal set: truncation must be positive");
  std::vector<Point> points;
  std::vector<std::string> labels;
  for (std::size_t j = 1; j <= truncation; ++j) {
    const double v = 1.0 / std::sqrt(std::log2(static_cast<double>(j) + 1.0));
    for (double sign : {1.0, -1.0}) {
      Point p(truncation, 0.0);
      p[j - 1] = sign * v;
      points.push_back(std::move(p));
      labels.push_back((sign > 0 ? "+e" : "-e") + std::to_string(j));
    }
  }
  return {NormedSpace::l2(truncation), std::move(points), std::move(labels)};
}

std::vector<Point> coordinate_basis(std::size_t dim, const std::vector<std::size_t>& coords) {
  std::vector<Point> basis;
  for (std::size_t c : coords) {
    if (c >= dim) throw DimensionMismatch("coordinate basis: index out of range");
    Point e(dim, 0.0);
    e[c] = 1.0;
    basis.push_back(std::move(e));
  }
  return basis;
}

double stechkin_value(unsigned n) {
  if (n < 1) throw PreconditionError("stechkin value: n must be positive");
  return std::numbers::sqrt2 / 2.0 / std::sqrt(std::log2(2.0 * n + 1.0));
}

FiniteSet octahedron_set(unsigned n) {
  if (n < 1) throw PreconditionError("octahedron: n must be positive");
  const std::size_t dim = 2 * std::size_t{n};
  const double v = 1.0 / std::sqrt(std::log2(2.0 * n + 1.0));
  std::vector<Point> points;
  for (std::size_t j = 0; j < dim; ++j)
    for (double sign : {1.0, -1.0}) {
      Point p(dim, 0.0);
      p[j] = sign * v;
      points.push_back(std::move(p));
    }
  return {NormedSpace::l2(dim), std::move(points)};
}

OctahedronBound octahedron_coordinate_upper(unsigned n) {
  if (n < 1 || n > 10) throw PreconditionError("octahedron subspaces: n must lie in 1..10");
  const FiniteSet set = octahedron_set(n);
  const std::size_t dim = set.space().dim();
  std::vector<bool> mask(dim, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  OctahedronBound out;
  out.best = std::numeric_limits<double>::infinity();
  do {
    std::vector<std::size_t> coords;
    for (std::size_t i = 0; i < dim; ++i)
      if (mask[i]) coords.push_back(i);
    const double v = kolmogorov_upper_l2(set, coordinate_basis(dim, coords)).certificate.value;
    ++out.subspaces;
    if (v < out.best) {
      out.best = v;
      out.coords = coords;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

namespace {

struct Report {
  json checks = json::array();
  json table = json::array();
  json certificates = json::array();
  bool pass = true;

  void check(const std::string& name, bool ok, json detail = json::object()) {
    detail["name"] = name;
    detail["pass"] = ok;
    checks.push_back(std::move(detail));
    pass = pass && ok;
  }
  void row(double n, double reference, double lower, double upper) {
    table.push_back({{"n", n}, {"reference", reference}, {"computed_lower", lower}, {"computed_upper", upper}});
  }
};

template <class T>
T param(const json& p, const char* key, T fallback) {
  return p.contains(key) ? p[key].get<T>() : fallback;
}

// A list parameter may also be given as a single value.
template <class T>
std::vector<T> list_param(const json& p, const char* key, std::vector<T> fallback) {
  if (!p.contains(key)) return fallback;
  if (p[key].is_array()) return p[key].get<std::vector<T>>();
  return {p[key].get<T>()};
}

json entropy_json(const EntropyEstimate& e) {
  return {{"n", e.n}, {"lower", e.lower}, {"upper", e.upper}, {"exact", e.exact}};
}

bool brackets(const EntropyEstimate& e, double v, double rel = 1e-12) {
  return e.lower <= v * (1 + rel) && e.upper >= v * (1 - rel);
}

json case_separation(const json& p, Report& rep) {
  const auto n = param<unsigned>(p, "n", 6);
  const double gamma = param<double>(p, "gamma", 3.0);
  const auto r = separation_certificates(n, gamma);
  const double log_factor = 1.0 / std::log2(n + 1.0);
  rep.check("volume_condition", r.condition.holds, {{"lhs", r.condition.lhs_upper}, {"rhs", r.condition.rhs}});
  rep.check("declared_constant_le_gamma", r.declared <= gamma, {{"lhs", r.declared}, {"rhs", gamma}});
  rep.check("sigma_N_le_upper", r.sigma_N <= r.upper.value, {{"lhs", r.sigma_N}, {"rhs", r.upper.value}});
  rep.check("prefix_bumps_reproduce_targets", r.spot_check);
  rep.check("ratio_le_inverse_log", r.ratio <= log_factor * (1 + 1e-6), {{"lhs", r.ratio}, {"rhs", log_factor}});
  rep.check("lower_positive", r.lower.value > 0.0, {{"lhs", r.lower.value}});
  rep.check("lower_le_upper", r.lower.value <= r.upper.value, {{"lhs", r.lower.value}, {"rhs", r.upper.value}});
  rep.row(n, r.upper.value, r.lower.value, r.upper.value);
  rep.certificates.push_back(to_json(r.upper));
  rep.certificates.push_back(to_json(r.lower));
  return {{"references",
           {{"upper", 1.0 / (n * std::log2(n + 1.0))}, {"entropy", r.entropy_reference}, {"N", r.N}}},
          {"computed",
           {{"upper", r.upper.value},
            {"lower", r.lower.value},
            {"truncated_lower", r.truncated_lower},
            {"sigma_N", r.sigma_N},
            {"entropy_exact", r.entropy_exact},
            {"ratio", r.ratio},
            {"declared_lipschitz", r.declared},
            {"materialized", r.materialized},
            {"condition", condition_json(r.condition)}}}};
}

json case_collapse(const json& p, Report& rep) {
  const double c = param<double>(p, "c", 1.0);
  const double gamma = param<double>(p, "gamma", 4.0);
  const auto Ns = list_param<std::size_t>(p, "N", {1000, 1000000});
  const unsigned n1 = collapse_threshold(c, gamma);
  const unsigned n = param<unsigned>(p, "n", n1);
  const auto n0 = static_cast<unsigned>(std::ceil(1.0 / c));
  rep.check("inequality_at_n1", collapse_tail_inequality(c, gamma, n1));
  rep.check("inequality_fails_below_n1", n1 == n0 + 1 || !collapse_tail_inequality(c, gamma, n1 - 1));
  json points = json::array();
  for (const auto& pt : collapse_certificates(c, gamma, n, Ns)) {
    const double reference = std::pow(static_cast<double>(pt.N), -c);
    const std::string tag = "N=" + std::to_string(pt.N);
    rep.check("volume_condition_" + tag, pt.condition);
    rep.check("declared_constant_le_gamma_" + tag, pt.declared <= gamma);
    rep.check("prefix_bumps_reproduce_targets_" + tag, pt.spot_check);
    rep.row(static_cast<double>(pt.N), reference, 0.0, pt.sigma_N);
    WidthCertificate cert;
    cert.n = n;
    cert.gamma = gamma;
    cert.value = pt.sigma_N;
    cert.witness = {{"kind", "refr_map"},
                    {"N", pt.N},
                    {"sigma_N", pt.sigma_N},
                    {"sum_upper", refr_condition(SequenceSetSpec::power(c, 2), gamma, n, static_cast<double>(pt.N)).lhs_upper},
                    {"rhs", std::pow(gamma / 2.0, n)},
                    {"declared_lipschitz", pt.declared}};
    rep.certificates.push_back(to_json(cert));
    points.push_back({{"N", pt.N}, {"upper", pt.sigma_N}, {"declared_lipschitz", pt.declared}});
  }
  return {{"references", {{"n0", n0}, {"upper", "N^-c"}}},
          {"computed", {{"n1", n1}, {"n", n}, {"points", points}}}};
}

json case_hilbert(const json& p, Report& rep, unsigned workers) {
  const auto m = param<unsigned>(p, "m", 14);
  const double gamma = param<double>(p, "gamma", 2.0 * std::numbers::sqrt2);
  const auto s = param<unsigned>(p, "s", std::max(1u, m / 7));
  const auto r = hilbert_example(m, gamma, s, workers);
  rep.check("entropy_brackets_contain_sqrt2", r.entropy_contains_sqrt2);
  json entropy = json::array();
  for (const auto& e : r.entropy) {
    entropy.push_back(entropy_json(e));
    rep.row(e.n, std::numbers::sqrt2, e.lower, e.upper);
  }
  rep.certificates.push_back(to_json(r.packing_lower));
  return {{"references", {{"entropy", std::numbers::sqrt2}, {"example_lower", r.example_lower}}},
          {"computed",
           {{"threshold_lhs", r.threshold_lhs},
            {"threshold_rhs", r.threshold_rhs},
            {"threshold_holds", r.threshold_holds},
            {"regime", r.threshold_holds ? "lower_bound_claimed" : "vacuous"},
            {"entropy", entropy},
            {"packing_lower", r.packing_lower.value}}}};
}

json case_transport(const json& p, Report& rep) {
  const auto grid = param<std::size_t>(p, "grid", 1024);
  const auto n_max = param<unsigned>(p, "n_max", 8);
  const auto kol_ns = list_param<unsigned>(p, "kolmogorov_n", {4, 16, 64});
  const FiniteSet set = transport_set(grid);
  const DistanceMatrix dm(set);
  EntropySolver solver(dm);
  json entropy = json::array();
  for (unsigned n = 1; n <= n_max; ++n) {
    const auto e = solver.inner_entropy(n);
    const auto ref = transport_reference(n);
    entropy.push_back(entropy_json(e));
    rep.check("entropy_bracket_contains_reference_n=" + std::to_string(n), brackets(e, ref.entropy),
              {{"lower", e.lower}, {"upper", e.upper}, {"reference", ref.entropy}});
    rep.row(n, ref.entropy, e.lower, e.upper);
  }
  json kol = json::array();
  for (unsigned n : kol_ns) {
    const auto k = kolmogorov_upper_transport(set, n);
    const auto ref = transport_reference(n);
    const auto tk = tk_comparison(set, k);
    rep.check("kolmogorov_le_4_over_n_n=" + std::to_string(n), k.certificate.value <= ref.kolmogorov_upper,
              {{"lhs", k.certificate.value}, {"rhs", ref.kolmogorov_upper}});
    rep.check("reference_lower_le_computed_n=" + std::to_string(n), ref.kolmogorov_lower <= k.certificate.value,
              {{"lhs", ref.kolmogorov_lower}, {"rhs", k.certificate.value}});
    rep.check("lipschitz_le_kolmogorov_n=" + std::to_string(n), tk.holds,
              {{"lhs", tk.certificate.value}, {"rhs", tk.kolmogorov_value}});
    rep.certificates.push_back(to_json(k.certificate));
    kol.push_back({{"n", n}, {"upper", k.certificate.value}, {"tk_value", tk.certificate.value}, {"gamma", tk.gamma}});
  }
  return {{"references", {{"entropy", "2^(-n+1)"}, {"kolmogorov_upper", "4/n"}, {"kolmogorov_lower", "1/(n+1)"}}},
          {"computed", {{"grid", grid}, {"entropy", entropy}, {"kolmogorov", kol}}}};
}

json case_diagonal(const json& p, Report& rep) {
  const auto truncation = param<std::size_t>(p, "truncation", 64);
  const auto ns = list_param<unsigned>(p, "n", {4, 8, 16});
  const FiniteSet set = diagonal_set(truncation);
  json out = json::array();
  for (unsigned n : ns) {
    std::vector<std::size_t> coords(n);
    for (unsigned i = 0; i < n; ++i) coords[i] = i;
    const auto k = kolmogorov_upper_l2(set, coordinate_basis(truncation, coords));
    const auto tk = tk_comparison(set, k);
    const double reference = 1.0 / std::sqrt(std::log2(n + 2.0));
    rep.check("lipschitz_le_kolmogorov_n=" + std::to_string(n), tk.holds,
              {{"lhs", tk.certificate.value}, {"rhs", tk.kolmogorov_value}});
    rep.check("projection_matches_tail_n=" + std::to_string(n),
              std::abs(k.certificate.value - reference) <= 1e-12,
              {{"lhs", k.certificate.value}, {"rhs", reference}});
    rep.row(n, reference, 0.0, k.certificate.value);
    rep.certificates.push_back(to_json(k.certificate));
    rep.certificates.push_back(to_json(tk.certificate));
    out.push_back({{"n", n}, {"kolmogorov_upper", k.certificate.value}, {"tk_value", tk.certificate.value},
                   {"gamma", tk.gamma}, {"gamma_raised", tk.gamma_raised}});
  }
  return {{"references", {{"kolmogorov_upper", "1/sqrt(log2(n+2))"}}},
          {"computed", {{"truncation", truncation}, {"rows", out}}}};
}

json case_stechkin(const json& p, Report& rep) {
  const auto ns = list_param<unsigned>(p, "n", {1, 2, 4});
  json out = json::array();
  for (unsigned n : ns) {
    const double v = stechkin_value(n);
    const auto oct = octahedron_coordinate_upper(n);
    rep.check("coordinate_upper_ge_stechkin_n=" + std::to_string(n), oct.best >= v,
              {{"lhs", oct.best}, {"rhs", v}});
    rep.row(n, v, 0.0, oct.best);
    out.push_back({{"n", n}, {"stechkin", v}, {"coordinate_upper", oct.best}, {"coords", oct.coords},
                   {"subspaces", oct.subspaces}});
  }
  return {{"references", {{"stechkin", "(1/sqrt2) log2(2n+1)^(-1/2)"}}}, {"computed", out}};
}

json case_sequence_entropy(const json& p, Report& rep) {
  const auto n_max = param<unsigned>(p, "n_max", 8);
  const double c = param<double>(p, "c", 0.0);
  json out = json::array();
  for (unsigned n = 1; n <= n_max; ++n) {
    const std::size_t M = std::size_t{1} << (n + 2);
    const auto spec = c > 0.0 ? SequenceSetSpec::power(c, M) : SequenceSetSpec::log_inv(M);
    const SequenceSet set(spec);
    const auto e = inner_entropy(set, n);
    const double exact = sequence_entropy_exact(spec, n);
    rep.check("bracket_contains_sigma_2^n_n=" + std::to_string(n), brackets(e, exact),
              {{"lower", e.lower}, {"upper", e.upper}, {"reference", exact}});
    rep.check("bracket_width_n=" + std::to_string(n), e.upper - e.lower <= 1e-9 * spec.sigma(1));
    rep.row(n, exact, e.lower, e.upper);
    json row = entropy_json(e);
    row["sigma_2^n"] = exact;
    if (c <= 0.0) row["asymptotic_reference"] = 1.0 / n;
    out.push_back(row);
  }
  return {{"references", {{"entropy", "sigma_{2^n}"}}}, {"computed", out}};
}

}  // namespace

json run_case_study(const std::string& name, const json& params, unsigned workers) {
  Report rep;
  json body;
  if (name == "separation")
    body = case_separation(params, rep);
  else if (name == "collapse")
    body = case_collapse(params, rep);
  else if (name == "hilbert")
    body = case_hilbert(params, rep, workers);
  else if (name == "transport")
    body = case_transport(params, rep);
  else if (name == "diagonal")
    body = case_diagonal(params, rep);
  else if (name == "stechkin")
    body = case_stechkin(params, rep);
  else if (name == "sequence-entropy")
    body = case_sequence_entropy(params, rep);
  else
    throw PreconditionError("case study: unknown name '" + name + "'");
  body["name"] = name;
  body["params"] = params;
  body["checks"] = rep.checks;
  body["table"] = rep.table;
  body["certificates"] = rep.certificates;
  body["pass"] = rep.pass;
  return body;
}

}  // namespace lipwidth
