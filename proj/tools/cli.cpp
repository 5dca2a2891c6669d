#include "cli.hpp"

#include "mnsurv/checks.hpp"
#include "mnsurv/errors.hpp"
#include "mnsurv/report_io.hpp"
#include "mnsurv/survival.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace mnsurv::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string n;
  std::string p;
  std::string k;
  bool kAll = false;
  std::string routes;
  int nodes = kDefaultNodes;
  Count replications = 100000;
  std::optional<std::uint64_t> seed;
  double tolerance = 1e-8;
  double identityTolerance = 1e-10;
  std::string format;
  std::string outPath;
  std::string inputPath;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(item);
  return parts;
}

double parse_real(const std::string& token, const char* what) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE) {
    throw ValidationError(std::string("invalid ") + what + " entry '" + token + "'");
  }
  return value;
}

Count parse_count(const std::string& token, const char* what) {
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size() || errno == ERANGE) {
    throw ValidationError(std::string(what) + " must be integers, got '" + token + "'");
  }
  return value;
}

Eigen::VectorXd parse_weights(const std::string& text) {
  const auto parts = split(text, ',');
  Eigen::VectorXd p(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    p[static_cast<Eigen::Index>(i)] = parse_real(parts[i], "probability");
  }
  return p;
}

std::vector<Count> parse_thresholds(const std::string& text) {
  std::vector<Count> k;
  for (const auto& part : split(text, ',')) k.push_back(parse_count(part, "thresholds"));
  return k;
}

// "a", or "start:stop:step" inclusive of stop when reached.
std::vector<Count> parse_n_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_count(parts[0], "n")};
  if (parts.size() != 3) throw UsageError("--n range must look like start:stop:step");
  const Count start = parse_count(parts[0], "n");
  const Count stop = parse_count(parts[1], "n");
  const Count step = parse_count(parts[2], "n");
  if (step <= 0 || stop < start) throw UsageError("--n range needs step > 0 and stop >= start");
  std::vector<Count> values;
  for (Count v = start; v <= stop; v += step) values.push_back(v);
  return values;
}

RouteSelection parse_routes(const std::string& text) {
  if (text.empty()) return {};
  RouteSelection sel{false, false, false, false};
  for (const auto& name : split(text, ',')) {
    if (name == "exact") sel.exact = true;
    else if (name == "dirichlet") sel.dirichlet = true;
    else if (name == "gaussian") sel.gaussian = true;
    else if (name == "mc") sel.mc = true;
    else throw UsageError("unknown route '" + name + "'");
  }
  return sel;
}

std::vector<SurvivalInstance> load_batch(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open input file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("input is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ValidationError("input must be a JSON array of instances");
  std::vector<SurvivalInstance> instances;
  for (const auto& item : doc) {
    try {
      const auto p = item.at("p").get<std::vector<double>>();
      instances.push_back(build_instance(
          item.at("n").get<Count>(),
          Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())),
          item.at("k").get<std::vector<Count>>()));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("bad instance in input: ") + e.what());
    }
  }
  return instances;
}

// Every k in N_0^d with kappa_d <= n, in lexicographic order.
std::vector<std::vector<Count>> all_thresholds(Count n, int d) {
  std::vector<std::vector<Count>> out;
  std::vector<Count> k(d, 0);
  auto rec = [&](auto&& self, int i, Count budget) -> void {
    if (i == d) {
      out.push_back(k);
      return;
    }
    for (Count v = 0; v <= budget; ++v) {
      k[i] = v;
      self(self, i + 1, budget - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::optional<QuadratureSpec> mc_spec(const RunConfig& cfg, const RouteSelection& sel) {
  if (!sel.mc) return std::nullopt;
  if (!cfg.seed) throw UsageError("--seed is required when the mc route is requested");
  return QuadratureSpec::monte_carlo(cfg.replications, *cfg.seed);
}

void write_reports(const RunConfig& cfg, const std::vector<RouteReport>& reports, bool single,
                   std::ostream& out) {
  Output sink(cfg.outPath, out);
  if (cfg.format == "csv") {
    sink.get() << emit_reports_csv(reports);
  } else if (single) {
    sink.get() << emit_report_json(reports.front()) << '\n';
  } else {
    sink.get() << emit_reports_json(reports);
  }
}

int evaluate(const RunConfig& cfg, RouteSelection sel, std::ostream& out) {
  const auto mc = mc_spec(cfg, sel);
  std::vector<SurvivalInstance> instances;
  const bool batch = !cfg.inputPath.empty();
  if (batch) {
    instances = load_batch(cfg.inputPath);
  } else {
    if (cfg.n.empty() || cfg.p.empty() || cfg.k.empty()) {
      throw UsageError("--n, --p and --k are required (or --input)");
    }
    instances.push_back(
        build_instance(parse_count(cfg.n, "n"), parse_weights(cfg.p), parse_thresholds(cfg.k)));
  }
  const auto spec = QuadratureSpec::gauss_legendre(cfg.nodes);
  std::vector<RouteReport> reports;
  for (const auto& inst : instances) {
    reports.push_back(compare_routes(inst, spec, mc, sel, cfg.tolerance));
  }
  write_reports(cfg, reports, !batch, out);
  return kExitOk;
}

int sweep(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n.empty() || cfg.p.empty()) throw UsageError("--n and --p are required");
  if (cfg.kAll == !cfg.k.empty()) throw UsageError("give exactly one of --k and --k-all");
  const RouteSelection sel = parse_routes(cfg.routes);
  const auto mc = mc_spec(cfg, sel);
  const Eigen::VectorXd p = parse_weights(cfg.p);
  const auto fixedK = cfg.kAll ? std::vector<Count>{} : parse_thresholds(cfg.k);
  const auto spec = QuadratureSpec::gauss_legendre(cfg.nodes);
  std::vector<RouteReport> reports;
  for (Count n : parse_n_range(cfg.n)) {
    const auto grid = cfg.kAll ? all_thresholds(n, static_cast<int>(p.size()))
                               : std::vector<std::vector<Count>>{fixedK};
    for (const auto& k : grid) {
      reports.push_back(compare_routes(build_instance(n, p, k), spec, mc, sel, cfg.tolerance));
    }
  }
  RunConfig csvDefault = cfg;
  if (csvDefault.format.empty()) csvDefault.format = "csv";
  write_reports(csvDefault, reports, false, out);
  return kExitOk;
}

int check(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.seed) throw UsageError("--seed is required for check");
  if (!(cfg.tolerance > 0.0) || !(cfg.identityTolerance > 0.0)) {
    throw ValidationError("tolerances must be positive");
  }
  CheckOptions options;
  options.seed = *cfg.seed;
  options.routeTolerance = cfg.tolerance;
  options.identityTolerance = cfg.identityTolerance;
  options.nodes = cfg.nodes;
  QuadratureSpec::gauss_legendre(cfg.nodes).validate();
  const auto results = run_check_suite(options);

  bool allPass = true;
  Output sink(cfg.outPath, out);
  if (cfg.format == "json") {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      doc.push_back({{"name", r.name},
                     {"residual", r.residual},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass}});
      allPass = allPass && r.pass;
    }
    sink.get() << doc.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      char line[160];
      std::snprintf(line, sizeof line, "%s  %-30s residual=%-12.4g tol=%.1e\n",
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), r.residual, r.tolerance);
      sink.get() << line;
      allPass = allPass && r.pass;
    }
  }
  return allPass ? kExitOk : kExitCheckFailed;
}

void add_instance_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--n", cfg.n, "Sample size n");
  cmd->add_option("--p", cfg.p, "Cell probabilities p_1,...,p_d");
  cmd->add_option("--k", cfg.k, "Thresholds k_1,...,k_d");
  cmd->add_option("--nodes", cfg.nodes, "Gauss-Legendre nodes per axis")->capture_default_str();
  cmd->add_option("--mc", cfg.replications, "Monte Carlo replications")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Monte Carlo seed");
  cmd->add_option("--tol", cfg.tolerance, "Route agreement tolerance")->capture_default_str();
  cmd->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", cfg.outPath, "Write output to this file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint survival probabilities of cumulated multinomial components", "mnsurv"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* eval = app.add_subcommand("eval", "Evaluate selected routes for one instance or a batch");
  add_instance_options(eval, cfg);
  eval->add_option("--routes", cfg.routes, "Comma list of exact,dirichlet,gaussian,mc");
  eval->add_option("--input", cfg.inputPath, "JSON array of {n, p, k} instances");

  auto* compare = app.add_subcommand("compare", "Run all four routes and report discrepancies");
  add_instance_options(compare, cfg);
  compare->add_option("--input", cfg.inputPath, "JSON array of {n, p, k} instances");

  auto* sweepCmd = app.add_subcommand("sweep", "Evaluate a grid of n values and thresholds");
  add_instance_options(sweepCmd, cfg);
  sweepCmd->add_option("--routes", cfg.routes, "Comma list of exact,dirichlet,gaussian,mc");
  sweepCmd->add_flag("--k-all", cfg.kAll, "Every k with k_1 + ... + k_d <= n");

  auto* checkCmd = app.add_subcommand("check", "Run the identity and invariant suite");
  checkCmd->add_option("--seed", cfg.seed, "Seed for random instances")->required();
  checkCmd->add_option("--tol", cfg.tolerance, "Route agreement tolerance")->capture_default_str();
  checkCmd->add_option("--identity-tol", cfg.identityTolerance, "Pointwise identity tolerance")
      ->capture_default_str();
  checkCmd->add_option("--nodes", cfg.nodes, "Gauss-Legendre nodes per axis")->capture_default_str();
  checkCmd->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  checkCmd->add_option("--out", cfg.outPath, "Write output to this file");

  std::vector<std::string> argvStorage{"mnsurv"};
  argvStorage.insert(argvStorage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argvStorage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (!(cfg.tolerance > 0.0)) throw ValidationError("--tol must be positive");
    if (*eval) return evaluate(cfg, parse_routes(cfg.routes), out);
    if (*compare) {
      if (!cfg.seed) throw UsageError("compare runs the mc route and needs --seed");
      return evaluate(cfg, RouteSelection{true, true, true, true}, out);
    }
    if (*sweepCmd) return sweep(cfg, out);
    return check(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace mnsurv::cli
