#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lipwidth/json_io.hpp"
#include "lipwidth/metric.hpp"
#include "lipwidth/report.hpp"

using nlohmann::json;
using namespace lipwidth;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw PreconditionError("'" + path + "' is empty");
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError("'" + path + "': " + e.what());
  }
}

int code(ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified entropy, width and Lipschitz bounds for finite point sets"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path, out_dir, format = "json";
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool verify = false;
  auto* config_opt = app.add_option("--config", config_path, "experiment config (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* format_opt =
      app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv", "both"}));
  auto* verify_opt = app.add_flag("--verify-witness", verify, "re-check every certificate from its witness");

  json params = json::object();
  std::string set_path;

  auto set_option = [&](CLI::App* sub) { sub->add_option("--set", set_path, "point set (JSON)")->required(); };
  auto int_param = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<long long>(flag, [&params, key](const long long& v) { params[key] = v; }, help);
  };
  auto real_param = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<double>(flag, [&params, key](const double& v) { params[key] = v; }, help);
  };

  auto* entropy = app.add_subcommand("entropy", "inner entropy brackets for a range of n");
  set_option(entropy);
  int_param(entropy, "--n-min", "n_min", "smallest n");
  int_param(entropy, "--n-max", "n_max", "largest n");

  auto* packing = app.add_subcommand("packing", "greedy packings and the covering sandwich");
  set_option(packing);
  packing->add_option_function<std::vector<double>>(
      "--eps", [&params](const std::vector<double>& v) { params["eps"] = v; }, "radii")->required();

  auto* width_upper = app.add_subcommand("width-upper", "entropy-map upper bound on the Lipschitz width");
  set_option(width_upper);
  int_param(width_upper, "--k", "k", "grid refinement k");
  int_param(width_upper, "--n", "n", "domain dimension n");

  auto* width_lower = app.add_subcommand("width-lower", "packing-count lower bound on the Lipschitz width");
  set_option(width_lower);
  int_param(width_lower, "--n-min", "n_min", "smallest n");
  int_param(width_lower, "--n-max", "n_max", "largest n");
  real_param(width_lower, "--gamma", "gamma", "constant Lipschitz constant");
  width_lower->add_option_function<std::string>(
      "--gamma-schedule", [&params](const std::string& s) { params["gamma"] = json::parse(s, nullptr, false); },
      "schedule object, e.g. {\"schedule\":\"two_pow_k_rad\",\"k\":2}");
  width_lower->add_option_function<std::vector<double>>(
      "--eps-grid", [&params](const std::vector<double>& v) { params["eps_grid"] = v; }, "candidate eps values");

  auto* kolmogorov = app.add_subcommand("kolmogorov", "Kolmogorov upper bounds and the Lipschitz comparison");
  set_option(kolmogorov);
  kolmogorov->add_option_function<std::vector<unsigned>>(
      "--n", [&params](const std::vector<unsigned>& v) { params["n"] = v; }, "subspace dimensions");
  std::string basis_path;
  kolmogorov->add_option("--basis", basis_path, "basis file (JSON)");

  auto* case_study = app.add_subcommand("case-study", "closed-form case studies");
  case_study->require_subcommand(1);
  auto* case_run = case_study->add_subcommand("run", "run one case study");
  std::string case_name;
  case_run->add_option("name", case_name, "separation, collapse, hilbert, transport, diagonal, stechkin, sequence-entropy")
      ->required();
  int_param(case_run, "--n", "n", "dimension n");
  real_param(case_run, "--gamma", "gamma", "Lipschitz constant");
  real_param(case_run, "--c", "c", "power exponent");
  int_param(case_run, "--m", "m", "Hilbert example exponent");
  int_param(case_run, "--s", "s", "Hilbert example width index");
  int_param(case_run, "--grid", "grid", "transport parameter grid");
  int_param(case_run, "--truncation", "truncation", "sequence truncation");
  int_param(case_run, "--n-max", "n_max", "largest n");
  case_run->add_option_function<std::vector<long long>>(
      "--N", [&params](const std::vector<long long>& v) { params["N"] = v; }, "bump counts");

  auto* relu = app.add_subcommand("relu", "ReLU network Lipschitz checks");
  relu->require_subcommand(1);
  auto* relu_verify = relu->add_subcommand("verify", "sample parameter pairs against C_n");
  int_param(relu_verify, "--d", "d", "input dimension");
  int_param(relu_verify, "--W", "W", "width");
  int_param(relu_verify, "--n", "n", "depth");
  int_param(relu_verify, "--trials", "trials", "parameter pairs");
  int_param(relu_verify, "--grid", "grid", "Omega samples per axis");
  relu_verify->add_option_function<std::string>(
      "--sampling", [&params](const std::string& s) { params["sampling"] = s; }, "uniform or last_layer");

  auto* audit = app.add_subcommand("audit-all", "run the invariant suite");

  for (auto* sub : {entropy, packing, width_upper, width_lower, kolmogorov, case_study, case_run, relu, relu_verify,
                    audit})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(ExitCode::Usage);
  }

  try {
    json cfg = json::object();
    if (*config_opt) cfg = read_json_file(config_path);
    if (!cfg.is_object()) throw PreconditionError("config must be a JSON object");

    std::string command;
    if (*entropy) command = "entropy";
    if (*packing) command = "packing";
    if (*width_upper) command = "width-upper";
    if (*width_lower) command = "width-lower";
    if (*kolmogorov) command = "kolmogorov";
    if (*case_run) command = "case-study";
    if (*relu_verify) command = "relu-verify";
    if (*audit) command = "audit-all";
    if (!command.empty()) cfg["command"] = command;
    if (!set_path.empty()) cfg["target"] = read_json_file(set_path);
    if (command == "case-study") cfg["target"] = case_name;
    if (!basis_path.empty()) params["basis"] = read_json_file(basis_path);
    if (!params.empty()) {
      json merged = cfg.value("params", json::object());
      merged.update(params);
      cfg["params"] = merged;
    }
    if (*seed_opt) cfg["seed"] = seed;
    if (*workers_opt) cfg["workers"] = workers;
    if (*verify_opt) cfg["verify_witness"] = verify;
    if (*out_opt || *format_opt) {
      json out = cfg.value("output", json::object());
      if (*out_opt) out["dir"] = out_dir;
      if (*format_opt) out["format"] = format;
      cfg["output"] = out;
    }
    if (!cfg.contains("command")) throw PreconditionError("no command given (use a subcommand or --config)");

    const ExperimentConfig config = parse_config(cfg);
    const RunReport report = run(config);
    if (config.out_dir) {
      write_report(report, *config.out_dir, config.format);
    } else {
      if (config.format != OutputFormat::Csv) std::cout << canonical_dump(report.to_json()) << '\n';
      if (config.format != OutputFormat::Json) std::cout << report.csv();
    }
    if (report.failure) std::cerr << "numeric failure: " << *report.failure << '\n';
    return code(report.exit_code());
  } catch (const PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return code(ExitCode::Usage);
  } catch (const DimensionMismatch& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return code(ExitCode::Usage);
  } catch (const json::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return code(ExitCode::Usage);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return code(ExitCode::Numeric);
  }
}
