#include "lipwidth/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "lipwidth/case_studies.hpp"
#include "lipwidth/covering.hpp"
#include "lipwidth/cube_allocation.hpp"
#include "lipwidth/json_io.hpp"
#include "lipwidth/lip_maps.hpp"
#include "lipwidth/parallel.hpp"
#include "lipwidth/relu.hpp"
#include "lipwidth/width_bounds.hpp"

namespace lipwidth {

using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_params() {
  static const std::map<std::string, std::set<std::string>> table{
      {"entropy", {"n_min", "n_max"}},
      {"packing", {"eps"}},
      {"width-upper", {"k", "n"}},
      {"width-lower", {"n_min", "n_max", "gamma", "eps_grid"}},
      {"kolmogorov", {"n", "basis"}},
      {"case-study", {"n", "gamma", "c", "m", "s", "grid", "truncation", "N", "n_max", "kolmogorov_n"}},
      {"relu-verify", {"d", "W", "n", "trials", "grid", "sampling"}},
      {"audit-all", {}},
  };
  return table;
}

bool needs_set(const std::string& command) {
  return command == "entropy" || command == "packing" || command == "width-upper" || command == "width-lower" ||
         command == "kolmogorov";
}

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Both: return "both";
  }
  return "json";
}

OutputFormat format_from_name(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "both") return OutputFormat::Both;
  throw PreconditionError("config: format must be json, csv or both");
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : allowed_params()) v.push_back(k);
    return v;
  }();
  return names;
}

json ExperimentConfig::to_json() const {
  // The output directory is left out so reports written to different places
  // stay comparable.
  return {{"command", command},     {"target", target},   {"params", params},
          {"seed", seed},           {"workers", workers}, {"format", format_name(format)},
          {"verify_witness", verify_witness}};
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw PreconditionError("config: expected a JSON object");
  static const std::set<std::string> top{"command", "target", "params", "seed", "workers", "output", "verify_witness"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!top.count(it.key())) throw PreconditionError("config: unknown field '" + it.key() + "'");
  if (!j.contains("command") || !j["command"].is_string()) throw PreconditionError("config: 'command' is required");

  ExperimentConfig c;
  c.command = j["command"].get<std::string>();
  if (j.contains("target")) c.target = j["target"];
  if (j.contains("params")) c.params = j["params"];
  try {
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<unsigned>();
    if (j.contains("verify_witness")) c.verify_witness = j["verify_witness"].get<bool>();
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) throw PreconditionError("config: 'output' must be an object");
    for (auto it = o.begin(); it != o.end(); ++it)
      if (it.key() != "dir" && it.key() != "format")
        throw PreconditionError("config: unknown output field '" + it.key() + "'");
    if (o.contains("dir")) c.out_dir = o["dir"].get<std::string>();
    if (o.contains("format")) c.format = format_from_name(o["format"].get<std::string>());
  }
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  const auto it = allowed_params().find(c.command);
  if (it == allowed_params().end()) throw PreconditionError("config: unknown command '" + c.command + "'");
  if (!c.params.is_object()) throw PreconditionError("config: 'params' must be an object");
  for (auto p = c.params.begin(); p != c.params.end(); ++p)
    if (!it->second.count(p.key()))
      throw PreconditionError("config: parameter '" + p.key() + "' is not accepted by " + c.command);
  if (c.workers < 1) throw PreconditionError("config: workers must be at least 1");
  if (needs_set(c.command) && !c.target.is_object())
    throw PreconditionError("config: " + c.command + " needs a point-set target");
  if (c.command == "case-study" && !c.target.is_string())
    throw PreconditionError("config: case-study needs a case name as target");
}

bool RunReport::pass() const {
  if (failure) return false;
  for (const auto& a : audits)
    if (!a.at("pass").get<bool>()) return false;
  for (const auto& w : witness_checks)
    if (!w.at("ok").get<bool>()) return false;
  return true;
}

ExitCode RunReport::exit_code() const {
  if (failure) return ExitCode::Numeric;
  return pass() ? ExitCode::Pass : ExitCode::Violation;
}

json RunReport::to_json() const {
  json j = canonical();
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

json RunReport::canonical() const {
  json j{{"tool", kToolName},       {"version", kToolVersion},           {"config", config},
         {"results", results},      {"certificates", certificates},      {"audits", audits},
         {"table", table},          {"witness_checks", witness_checks},  {"pass", pass()}};
  j["failure"] = failure ? json(*failure) : json(nullptr);
  return j;
}

std::string RunReport::csv() const {
  std::ostringstream out;
  out << "n,reference,computed_lower,computed_upper\n";
  auto cell = [](const json& v) { return v.is_number() ? format_double(v.get<double>()) : std::string(); };
  for (const auto& r : table)
    out << cell(r.value("n", json())) << ',' << cell(r.value("reference", json())) << ','
        << cell(r.value("computed_lower", json())) << ',' << cell(r.value("computed_upper", json())) << '\n';
  return out.str();
}

namespace {

template <class T>
T param(const json& p, const char* key, T fallback) {
  try {
    return p.contains(key) ? p[key].get<T>() : fallback;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("parameter '") + key + "': " + e.what());
  }
}

void audit(RunReport& r, const std::string& name, bool ok, json detail = json::object()) {
  detail["name"] = name;
  detail["pass"] = ok;
  r.audits.push_back(std::move(detail));
}

json entropy_row(const EntropyEstimate& e) {
  return {{"n", e.n}, {"lower", e.lower}, {"upper", e.upper}, {"exact", e.exact}};
}

double schedule_gamma(const json& g, unsigned n, const FiniteSet& set) {
  if (g.is_number()) return g.get<double>();
  if (!g.is_object()) throw PreconditionError("gamma: expected a number or a schedule object");
  const std::string kind = g.at("schedule").get<std::string>();
  if (kind == "constant") return g.at("value").get<double>();
  if (kind == "two_pow_k_rad") return std::ldexp(radius_upper(set).upper, g.at("k").get<int>());
  if (kind == "growing")
    return growing_gamma(n, g.at("c_prime").get<double>(), g.at("delta").get<double>(), g.at("lambda").get<double>());
  throw PreconditionError("gamma: unknown schedule '" + kind + "'");
}

void run_entropy(const ExperimentConfig& c, const FiniteSet& set, RunReport& r) {
  const auto lo = param<unsigned>(c.params, "n_min", 0);
  const auto hi = param<unsigned>(c.params, "n_max", 4);
  if (lo > hi) throw PreconditionError("entropy: n_min exceeds n_max");
  EntropySolver solver(set);
  json rows = json::array();
  for (unsigned n = lo; n <= hi; ++n) {
    const auto e = solver.inner_entropy(n);
    rows.push_back(entropy_row(e));
    r.table.push_back({{"n", n}, {"reference", nullptr}, {"computed_lower", e.lower}, {"computed_upper", e.upper}});
    const auto chain = entropy_chain_audit(set, n);
    audit(r, "entropy_chain_n=" + std::to_string(n), chain.pass,
          {{"outer_lower", chain.outer_lower}, {"outer_upper", chain.outer_upper}});
  }
  r.results["entropy"] = rows;
}

void run_packing(const ExperimentConfig& c, const FiniteSet& set, RunReport& r) {
  const auto eps = param<std::vector<double>>(c.params, "eps", {});
  if (eps.empty()) throw PreconditionError("packing: 'eps' list is required");
  json rows = json::array();
  for (double e : eps) {
    if (!(e > 0.0)) throw PreconditionError("packing: eps must be positive");
    const auto p = greedy_packing(set, e);
    const auto s = sandwich_audit(set, e);
    rows.push_back({{"eps", e},
                    {"packing", p.indices},
                    {"packing_size", p.size()},
                    {"maximal", is_maximal_packing(set, p)},
                    {"covering", s.covering_eps},
                    {"covering_lower", s.covering_lower},
                    {"packing_2eps", s.packing_2eps},
                    {"exact", s.exact}});
    audit(r, "sandwich_eps=" + format_double(e), s.pass());
  }
  r.results["packing"] = rows;
}

void run_width_upper(const ExperimentConfig& c, const FiniteSet& set, RunReport& r) {
  const auto k = param<unsigned>(c.params, "k", 1);
  const auto n = param<unsigned>(c.params, "n", 1);
  const auto res = width_upper_from_entropy(set, k, n);
  const double gamma = *res.certificate.gamma;
  const double empirical = empirical_lipschitz(res.map, c.seed, 10000, c.workers);
  r.certificates.push_back(to_json(res.certificate));
  r.results = {{"value", res.certificate.value},
               {"gamma", gamma},
               {"declared_lipschitz", res.declared},
               {"empirical_lipschitz", empirical},
               {"fixed_width", res.fixed_width},
               {"entropy_upper", res.entropy_upper}};
  r.table.push_back({{"n", n}, {"reference", res.entropy_upper}, {"computed_lower", nullptr},
                     {"computed_upper", res.fixed_width}});
  audit(r, "declared_le_gamma", res.declared <= gamma * (1 + 1e-12));
  audit(r, "empirical_le_declared", empirical <= res.declared * (1 + 1e-9) + 1e-12);
  audit(r, "fixed_width_le_entropy", res.fixed_width <= res.entropy_upper + 1e-9);
}

void run_width_lower(const ExperimentConfig& c, const FiniteSet& set, RunReport& r) {
  const auto lo = param<unsigned>(c.params, "n_min", 1);
  const auto hi = param<unsigned>(c.params, "n_max", lo);
  if (lo < 1 || lo > hi) throw PreconditionError("width-lower: need 1 <= n_min <= n_max");
  if (!c.params.contains("gamma")) throw PreconditionError("width-lower: 'gamma' is required");
  const auto grid = param<std::vector<double>>(c.params, "eps_grid", default_eps_grid(diameter(set)));
  json rows = json::array();
  for (unsigned n = lo; n <= hi; ++n) {
    const double gamma = schedule_gamma(c.params["gamma"], n, set);
    const auto cert = width_lower_certified(set, n, gamma, grid, c.workers);
    r.certificates.push_back(to_json(cert));
    rows.push_back({{"n", n}, {"gamma", gamma}, {"lower", cert.value}});
    r.table.push_back({{"n", n}, {"reference", nullptr}, {"computed_lower", cert.value}, {"computed_upper", nullptr}});
  }
  r.results["width_lower"] = rows;
}

void run_kolmogorov(const ExperimentConfig& c, const FiniteSet& set, RunReport& r) {
  json rows = json::array();
  auto record = [&](const KolmogorovResult& k) {
    const auto tk = tk_comparison(set, k);
    r.certificates.push_back(to_json(k.certificate));
    r.certificates.push_back(to_json(tk.certificate));
    rows.push_back({{"n", k.certificate.n}, {"kolmogorov_upper", k.certificate.value},
                    {"lipschitz_upper", tk.certificate.value}, {"gamma", tk.gamma},
                    {"gamma_raised", tk.gamma_raised}});
    r.table.push_back({{"n", k.certificate.n}, {"reference", nullptr}, {"computed_lower", nullptr},
                       {"computed_upper", k.certificate.value}});
    audit(r, "lipschitz_le_kolmogorov_n=" + std::to_string(k.certificate.n), tk.holds,
          {{"lhs", tk.certificate.value}, {"rhs", tk.kolmogorov_value}});
  };
  if (c.params.contains("basis")) {
    record(kolmogorov_upper(set, param<std::vector<Point>>(c.params, "basis", {})));
  } else {
    const auto ns = param<std::vector<unsigned>>(c.params, "n", {1});
    for (unsigned n : ns) {
      if (set.space().kind() == NormKind::L1Step) {
        record(kolmogorov_upper_transport(set, n));
      } else {
        if (n > set.space().dim()) throw PreconditionError("kolmogorov: n exceeds the dimension");
        std::vector<std::size_t> coords(n);
        for (unsigned i = 0; i < n; ++i) coords[i] = i;
        record(kolmogorov_upper(set, coordinate_basis(set.space().dim(), coords)));
      }
    }
  }
  r.results["kolmogorov"] = rows;
}

ReLUNetConfig relu_config(const json& p) {
  ReLUNetConfig cfg;
  cfg.d = param<unsigned>(p, "d", 1);
  cfg.W = param<unsigned>(p, "W", 2);
  cfg.depth = param<unsigned>(p, "n", 1);
  cfg.grid = param<unsigned>(p, "grid", 0);
  cfg.validate();
  return cfg;
}

json relu_result(const ReLUNetConfig& cfg, const ReLUVerifyResult& v, const LipBoundTrace& t) {
  return {{"d", cfg.d},
          {"W", cfg.W},
          {"n", cfg.depth},
          {"grid", effective_grid(cfg)},
          {"params", param_count(cfg)},
          {"C_n", t.c_n_exact},
          {"C_n_double", t.c_n},
          {"C_prime", t.c_prime},
          {"coarse_bound", t.coarse_bound},
          {"layer_bounds", t.layer_bounds},
          {"max_ratio", v.max_ratio},
          {"trials", v.trials},
          {"skipped", v.skipped},
          {"pass", v.pass}};
}

void run_relu(const ExperimentConfig& c, RunReport& r) {
  const auto cfg = relu_config(c.params);
  const auto trials = param<std::size_t>(c.params, "trials", 10000);
  const auto sampling_name = param<std::string>(c.params, "sampling", "uniform");
  ReLUSampling sampling;
  if (sampling_name == "uniform")
    sampling = ReLUSampling::Uniform;
  else if (sampling_name == "last_layer")
    sampling = ReLUSampling::LastLayer;
  else
    throw PreconditionError("relu-verify: sampling must be uniform or last_layer");
  const auto trace = lip_bound(cfg);
  const auto v = verify_lipschitz(cfg, c.seed, trials, c.workers, sampling);
  r.results = relu_result(cfg, v, trace);
  r.table.push_back({{"n", cfg.depth}, {"reference", trace.c_n}, {"computed_lower", v.max_ratio},
                     {"computed_upper", trace.c_n}});
  audit(r, "ratio_le_C_n", v.pass, {{"lhs", v.max_ratio}, {"rhs", trace.c_n}});
  audit(r, "layer_bounds", v.layer_bounds_ok);
  audit(r, "C_n_below_coarse", trace.below_coarse);
  audit(r, "recursion_matches_closed_form", trace.recursion_matches_closed_form);
}

void run_case(const ExperimentConfig& c, RunReport& r) {
  json body = run_case_study(c.target.get<std::string>(), c.params, c.workers);
  for (auto& chk : body["checks"]) r.audits.push_back(chk);
  r.certificates = body["certificates"];
  r.table = body["table"];
  body.erase("checks");
  body.erase("certificates");
  body.erase("table");
  r.results = std::move(body);
}

void verify_certificates(RunReport& r, const FiniteSet* set) {
  for (const auto& c : r.certificates) {
    const auto check = verify_witness(certificate_from_json(c), set);
    r.witness_checks.push_back({{"kind", c["witness"].value("kind", "")}, {"ok", check.ok}, {"message", check.message}});
  }
}

}  // namespace

RunReport run(const ExperimentConfig& config) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  if (config.command == "audit-all") {
    r = audit_all(config.seed, config.workers);
  } else {
    std::optional<FiniteSet> set;
    if (needs_set(config.command)) set.emplace(set_from_json(config.target));
    try {
      if (config.command == "entropy")
        run_entropy(config, *set, r);
      else if (config.command == "packing")
        run_packing(config, *set, r);
      else if (config.command == "width-upper")
        run_width_upper(config, *set, r);
      else if (config.command == "width-lower")
        run_width_lower(config, *set, r);
      else if (config.command == "kolmogorov")
        run_kolmogorov(config, *set, r);
      else if (config.command == "case-study")
        run_case(config, r);
      else if (config.command == "relu-verify")
        run_relu(config, r);
    } catch (const NumericFailure& e) {
      r.failure = e.what();
    }
    if (config.verify_witness && !r.failure) verify_certificates(r, set ? &*set : nullptr);
  }
  r.config = config.to_json();
  r.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace {

FiniteSet random_set(std::mt19937_64& rng) {
  const NormKind kinds[] = {NormKind::L1, NormKind::L2, NormKind::Linf};
  const NormKind kind = kinds[rng() % 3];
  const std::size_t dim = 1 + rng() % 4;
  const std::size_t count = 2 + rng() % 19;
  std::vector<Point> pts(count, Point(dim));
  for (auto& p : pts)
    for (auto& x : p) x = 2.0 * unit_uniform(rng) - 1.0;
  NormedSpace space = kind == NormKind::L1 ? NormedSpace::l1(dim)
                      : kind == NormKind::L2 ? NormedSpace::l2(dim)
                                             : NormedSpace::linf(dim);
  return {std::move(space), std::move(pts)};
}

void audit_covering(std::uint64_t seed, RunReport& r) {
  std::size_t sandwich_violations = 0, inexact = 0, chain_failures = 0, non_maximal = 0;
  for (std::size_t s = 0; s < 40; ++s) {
    auto rng = chunk_rng(seed, 1000 + s);
    const FiniteSet set = random_set(rng);
    const double diam = diameter(set);
    for (int e = 0; e < 10; ++e) {
      const double eps = diam * (0.02 + 0.98 * unit_uniform(rng));
      const auto sw = sandwich_audit(set, eps);
      if (!sw.pass()) ++sandwich_violations;
      if (!sw.exact) ++inexact;
      if (!is_maximal_packing(set, greedy_packing(set, eps))) ++non_maximal;
    }
    for (unsigned n = 0; n <= 3; ++n)
      if (!entropy_chain_audit(set, n).pass) ++chain_failures;
  }
  audit(r, "sandwich", sandwich_violations == 0 && inexact == 0,
        {{"violations", sandwich_violations}, {"inexact", inexact}, {"sets", 40}, {"eps_per_set", 10}});
  audit(r, "greedy_packing_maximal", non_maximal == 0, {{"failures", non_maximal}});
  audit(r, "entropy_chain", chain_failures == 0, {{"failures", chain_failures}});
}

void audit_entropy_maps(std::uint64_t seed, unsigned workers, RunReport& r) {
  const std::pair<unsigned, unsigned> kn[] = {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 2}};
  std::size_t failures = 0, witness_failures = 0;
  double worst_ratio = 0.0;
  BumpStrata strata;
  double strata_declared = 0.0;
  for (std::size_t s = 0; s < 10; ++s) {
    auto rng = chunk_rng(seed, 2000 + s);
    const FiniteSet set = random_set(rng);
    for (const auto& [k, n] : kn) {
      const auto res = width_upper_from_entropy(set, k, n);
      const double emp = empirical_lipschitz(res.map, seed + s, 2000, workers);
      const double gamma = *res.certificate.gamma;
      if (res.declared > 0.0) worst_ratio = std::max(worst_ratio, emp / res.declared);
      if (emp > res.declared * (1 + 1e-9) + 1e-12 || res.declared > gamma * (1 + 1e-12) ||
          res.fixed_width > res.entropy_upper + 1e-9)
        ++failures;
      if (!verify_witness(res.certificate, &set).ok) ++witness_failures;
      if (s == 0 && k == 2 && n == 2) {
        strata = bump_strata_lipschitz(res.map, seed, 500);
        strata_declared = res.declared;
      }
    }
  }
  audit(r, "entropy_map_pipeline", failures == 0, {{"failures", failures}, {"worst_empirical_over_declared", worst_ratio}});
  audit(r, "entropy_map_witnesses", witness_failures == 0, {{"failures", witness_failures}});
  const double top = std::max({strata.same_ball, strata.both_outside, strata.inside_outside, strata.different_balls});
  audit(r, "bump_strata", top <= strata_declared * (1 + 1e-9) + 1e-12,
        {{"same_ball", strata.same_ball},
         {"both_outside", strata.both_outside},
         {"inside_outside", strata.inside_outside},
         {"different_balls", strata.different_balls},
         {"declared", strata_declared}});
}

void audit_cubes(std::uint64_t seed, RunReport& r) {
  auto rng = chunk_rng(seed, 3000);
  const unsigned n = 3;
  std::vector<int> levels;
  double volume = 0.0;
  const double cap = std::ldexp(1.0, static_cast<int>(n));
  while (true) {
    const int l = static_cast<int>(rng() % 4);
    const double v = std::ldexp(1.0, -static_cast<int>(n) * l);
    if (volume + v > cap) break;
    volume += v;
    levels.push_back(l);
  }
  const auto alloc = allocate_dyadic_cubes(n, levels);
  const auto overlap = audit_pairwise_overlap(alloc);
  const auto nesting = audit_dyadic_nesting(alloc);
  audit(r, "dyadic_allocation", overlap.ok && nesting.ok,
        {{"cubes", levels.size()}, {"volume", volume}, {"overlap", overlap.message}, {"nesting", nesting.message}});
}

void audit_case(RunReport& r, const std::string& name, const json& params, unsigned workers,
                const std::set<std::string>& skip = {}) {
  json body = run_case_study(name, params, workers);
  bool ok = true;
  json failed = json::array();
  for (const auto& chk : body["checks"]) {
    const std::string cname = chk["name"].get<std::string>();
    if (std::any_of(skip.begin(), skip.end(), [&](const std::string& p) { return cname.rfind(p, 0) == 0; }))
      continue;
    if (!chk["pass"].get<bool>()) {
      ok = false;
      failed.push_back(cname);
    }
  }
  for (const auto& cert : body["certificates"]) r.certificates.push_back(cert);
  audit(r, "case_" + name, ok, {{"checks", body["checks"].size()}, {"failed", failed}});
}

void audit_transport(RunReport& r) {
  const FiniteSet set = transport_set(256);
  const DistanceMatrix dm(set);
  EntropySolver solver(dm);
  bool ok = true;
  json rows = json::array();
  for (unsigned n = 1; n <= 6; ++n) {
    const auto e = solver.inner_entropy(n);
    const auto ref = transport_reference(n);
    ok = ok && e.upper <= ref.entropy * (1 + 1e-12);
    rows.push_back({{"n", n}, {"lower", e.lower}, {"upper", e.upper}, {"reference", ref.entropy}});
  }
  audit(r, "transport_entropy_le_reference", ok, {{"rows", rows}});
  bool kol_ok = true;
  for (unsigned n : {4u, 16u}) {
    const auto k = kolmogorov_upper_transport(set, n);
    const auto tk = tk_comparison(set, k);
    const auto ref = transport_reference(n);
    kol_ok = kol_ok && k.certificate.value <= ref.kolmogorov_upper && ref.kolmogorov_lower <= k.certificate.value &&
             tk.holds;
  }
  audit(r, "transport_kolmogorov", kol_ok);
}

void audit_relu(std::uint64_t seed, unsigned workers, RunReport& r) {
  const unsigned configs[][3] = {{1, 2, 3}, {2, 2, 2}, {3, 3, 1}, {1, 3, 4}};
  bool ok = true;
  json rows = json::array();
  for (const auto& c : configs) {
    ReLUNetConfig cfg;
    cfg.d = c[0];
    cfg.W = c[1];
    cfg.depth = c[2];
    const auto t = lip_bound(cfg);
    const auto v = verify_lipschitz(cfg, seed, 300, workers);
    ok = ok && v.pass && v.layer_bounds_ok && t.below_coarse && t.recursion_matches_closed_form;
    rows.push_back(relu_result(cfg, v, t));
  }
  audit(r, "relu_lipschitz", ok, {{"rows", rows}});
}

// Width bounds of the form delta(n) with gamma(n) transferred to entropy
// indices must not undercut certified entropy lower bounds of K(sigma).
void audit_carl(RunReport& r) {
  const auto outer_lower = [](unsigned long long m) {
    // Outer entropy is at least half the inner one, sigma_{2^m}/2.
    const double dm = static_cast<double>(m);
    return 0.5 * std::numbers::ln2 / (dm * std::numbers::ln2 + std::log1p(std::exp2(-dm)));
  };
  bool ok = true;
  json rows = json::array();
  const double rad = 0.5;  // diameter 1, so rad >= 1/2
  for (unsigned n = 5; n <= 12; ++n) {
    const double dn = n;
    const CarlInput certified{n, 3.0, 1.0 / (dn * std::log2(dn + 1.0)), rad};
    const auto a = carl_transfer_check(certified, outer_lower);
    const CarlInput hypothetical{n, growing_gamma(n, c_prime(1), 1.0, 2.0), power_log_delta(n, 1.0, 2.0, 0.0), rad};
    const auto b = carl_transfer_check(hypothetical, outer_lower);
    ok = ok && a.pass && b.pass;
    rows.push_back({{"n", n},
                    {"certified", {{"m", a.m}, {"implied", a.implied_upper}, {"lower", a.entropy_lower}, {"pass", a.pass}}},
                    {"hypothetical", {{"m", b.m}, {"implied", b.implied_upper}, {"lower", b.entropy_lower}, {"pass", b.pass}}}});
  }
  audit(r, "carl_transfer", ok, {{"rows", rows}});
}

void audit_json(std::uint64_t seed, RunReport& r) {
  auto rng = chunk_rng(seed, 4000);
  const FiniteSet set = random_set(rng);
  const FiniteSet back = set_from_json(json::parse(set_to_json(set).dump()));
  const bool set_ok = back.points() == set.points() && back.space() == set.space();
  const auto res = width_upper_from_entropy(set, 1, 2);
  const LipschitzMapSpec map = res.map;
  const LipschitzMapSpec map_back = map_from_json(json::parse(map_to_json(map).dump()));
  bool map_ok = true;
  for (const auto& y : res.candidates) map_ok = map_ok && evaluate(map, y) == evaluate(map_back, y);
  audit(r, "json_round_trip", set_ok && map_ok);
}

void verify_all(RunReport& r) {
  std::size_t failures = 0;
  for (const auto& c : r.certificates)
    if (!verify_witness(certificate_from_json(c), nullptr).ok) ++failures;
  audit(r, "certificate_witnesses", failures == 0, {{"certificates", r.certificates.size()}, {"failures", failures}});
}

}  // namespace

RunReport audit_all(std::uint64_t seed, unsigned workers) {
  RunReport r;
  try {
    audit_covering(seed, r);
    audit_entropy_maps(seed, workers, r);
    audit_cubes(seed, r);
    audit_case(r, "sequence-entropy", {{"n_max", 6}}, workers);
    audit_case(r, "separation", {{"n", 6}, {"gamma", 3.0}}, workers);
    audit_case(r, "collapse", {{"c", 1.0}, {"gamma", 4.0}, {"N", {1000, 100000}}}, workers);
    audit_case(r, "diagonal", json::object(), workers);
    audit_case(r, "stechkin", json::object(), workers);
    audit_case(r, "hilbert", {{"m", 10}, {"s", 1}}, workers);
    audit_transport(r);
    audit_relu(seed, workers, r);
    audit_carl(r);
    audit_json(seed, r);
    verify_all(r);
  } catch (const NumericFailure& e) {
    r.failure = e.what();
  }
  std::size_t passed = 0;
  for (const auto& a : r.audits) passed += a["pass"].get<bool>() ? 1 : 0;
  r.results = {{"audits_run", r.audits.size()}, {"audits_passed", passed}, {"seed", seed}};
  return r;
}

void write_report(const RunReport& report, const std::string& dir, OutputFormat format) {
  std::filesystem::create_directories(dir);
  if (format != OutputFormat::Csv) {
    std::ofstream out(std::filesystem::path(dir) / "report.json");
    out << canonical_dump(report.to_json()) << '\n';
  }
  if (format != OutputFormat::Json) {
    std::ofstream out(std::filesystem::path(dir) / "report.csv");
    out << report.csv();
  }
}

}  // namespace lipwidth
