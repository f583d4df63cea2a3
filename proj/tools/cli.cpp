#include "cordet/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "cordet/harness.hpp"
#include "cordet/model.hpp"
#include "cordet/theory.hpp"
#include "cordet/verify.hpp"

namespace cordet {

namespace {

constexpr const char* kVersion = CORDET_VERSION;
constexpr std::uint64_t kDefaultSeed = 1;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splices `key = value` pairs from --config into the argument list unless
// the same flag was given on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        throw UsageError("--config requires a file name");
      }
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) {
    return args;
  }
  for (auto [key, value] : parse_config_text(read_file(*path))) {
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) {
      args.push_back(flag);
      args.push_back(value);
    }
  }
  return args;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Every option of `cmd` as name -> value (given or default).
nlohmann::json echo_options(const CLI::App& cmd) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) {
      continue;
    }
    if (opt->count() > 0) {
      const auto& results = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < results.size(); ++i) {
        joined += (i ? "," : "") + results[i];
      }
      j[name] = joined;
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

nlohmann::json meta(const CLI::App& cmd, std::uint64_t seed) {
  return {{"version", kVersion},
          {"command", cmd.get_name()},
          {"seed", seed},
          {"params", echo_options(cmd)}};
}

void write_comment_header(std::ostream& out, const nlohmann::json& m) {
  out << "# cordet " << m["version"].get<std::string>() << '\n';
  out << "# command: " << m["command"].get<std::string>() << '\n';
  out << "# seed: " << m["seed"].get<std::uint64_t>() << '\n';
  out << "# params:";
  for (const auto& [key, value] : m["params"].items()) {
    out << ' ' << key << '=' << value.get<std::string>();
  }
  out << '\n';
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) {
        throw UsageError("cannot write '" + path + "'");
      }
    }
    stream_ = file_.is_open() ? static_cast<std::ostream*>(&file_) : &fallback;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

SigmaMode parse_sigma(const std::string& mode, const std::string& file) {
  if (mode == "id") {
    return SigmaMode::identity();
  }
  if (mode == "uniform") {
    return SigmaMode::uniform();
  }
  if (mode == "file") {
    if (file.empty()) {
      throw UsageError("--sigma file requires --sigma-file");
    }
    return SigmaMode::fixed(Permutation::parse(read_file(file)));
  }
  throw UsageError("unknown sigma mode '" + mode + "'");
}

PSource parse_p_source(const std::string& name) {
  if (name == "mc") {
    return PSource::monte_carlo;
  }
  if (name == "quarter") {
    return PSource::quarter_bound;
  }
  throw UsageError("unknown p source '" + name + "'");
}

// ---- gen ----

struct GenArgs {
  std::string hypothesis = "h0";
  std::string sigma = "id";
  std::string sigma_file;
  std::size_t n = 0;
  std::size_t d = 0;
  double rho = 0.0;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

int cmd_gen(const CLI::App& cmd, const GenArgs& a, std::ostream& out) {
  const ModelParams params(a.n, a.d, a.rho);
  const RngStream rng{a.seed, 0};
  DatabasePair<double> db;
  std::string sigma_text = "none";
  if (a.hypothesis == "h0") {
    db = sample_null(params, rng);
  } else {
    const SigmaMode mode = parse_sigma(a.sigma, a.sigma_file);
    if (mode.kind() == SigmaMode::Kind::uniform) {
      auto [sample, sigma] = sample_alt_uniform(params, rng);
      db = std::move(sample);
      sigma_text = sigma.to_string();
    } else {
      const Permutation sigma = mode.resolve(params.n());
      db = sample_alt(params, sigma, rng);
      sigma_text = sigma.to_string();
    }
  }
  write_database(a.out, params, db);
  auto m = meta(cmd, a.seed);
  m["sigma"] = sigma_text;
  m["out"] = a.out;
  out << m.dump(2) << '\n';
  return kExitOk;
}

// ---- risk / sweep ----

struct EstimateArgs {
  std::vector<std::string> tests{"sum"};
  std::size_t trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::string sigma_mode = "id";
  std::string sigma_file;
  std::string p_source = "mc";
  std::string hint = "n_grows_d_fixed";
  std::string format = "csv";
  std::string out;
  unsigned threads = 0;
};

SweepOptions sweep_options(const EstimateArgs& a) {
  SweepOptions o;
  o.trials = a.trials;
  o.sigma_mode = parse_sigma(a.sigma_mode, a.sigma_file);
  o.p_source = parse_p_source(a.p_source);
  o.hint = parse_asymptotic_hint(a.hint);
  o.threads = a.threads;
  if (o.trials < kMinRiskTrials) {
    throw UsageError("--trials must be at least " + std::to_string(kMinRiskTrials));
  }
  return o;
}

std::vector<TestKind> parse_tests(const std::vector<std::string>& names) {
  std::vector<TestKind> kinds;
  for (const auto& name : names) {
    kinds.push_back(parse_test_kind(name));
  }
  if (kinds.empty()) {
    throw UsageError("no tests requested");
  }
  return kinds;
}

void emit_records(const CLI::App& cmd, const EstimateArgs& a,
                  const std::vector<SweepRecord>& records, std::ostream& out, std::ostream& err) {
  Output sink(a.out, out);
  const auto m = meta(cmd, a.seed);
  if (a.format == "json") {
    nlohmann::json j;
    j["meta"] = m;
    j["records"] = nlohmann::json::array();
    for (const auto& r : records) {
      j["records"].push_back(to_json(r));
    }
    sink.get() << j.dump(2) << '\n';
  } else {
    write_comment_header(sink.get(), m);
    sink.get() << "# sigma: worst case over sigma equals sigma = id for every test "
                  "(row-permutation invariance)\n";
    write_sweep_csv_header(sink.get());
    for (const auto& r : records) {
      write_sweep_csv_row(sink.get(), r);
    }
  }
  for (const auto& r : records) {
    if (!r.error.empty()) {
      err << "warning: n=" << r.point.n << " d=" << r.point.d
          << " rho=" << format_double(r.point.rho) << " " << to_string(r.test) << ": " << r.error
          << '\n';
    }
  }
}

int cmd_risk(const CLI::App& cmd, const EstimateArgs& a, std::size_t n, std::size_t d,
             double rho, std::ostream& out, std::ostream& err) {
  const ModelParams params(n, d, rho);
  const auto kinds = parse_tests(a.tests);
  const auto records =
      sweep({SweepPoint{params.n(), params.d(), params.rho()}}, kinds, sweep_options(a),
            RngStream{a.seed, 0});
  emit_records(cmd, a, records, out, err);
  return kExitOk;
}

double rule_rho_sq(const std::string& rule, std::size_t n, std::size_t d) {
  if (rule == "one_over_d") {
    return 1.0 / static_cast<double>(d);
  }
  static const std::regex scaling(R"(count_scaling\(\s*([-+0-9.eE]+)\s*\))");
  std::smatch m;
  if (std::regex_match(rule, m, scaling)) {
    const double c = std::stod(m[1].str());
    if (d < 2) {
      return std::nan("");
    }
    return 1.0 - c * std::pow(static_cast<double>(n), -2.0 / (static_cast<double>(d) - 1.0));
  }
  throw UsageError("unknown --rho2-rule '" + rule + "' (expected one_over_d or count_scaling(c))");
}

template <typename T>
std::vector<T> parse_list(const std::vector<std::string>& tokens, const char* flag) {
  std::vector<T> values;
  for (const auto& raw : tokens) {
    const std::string token = trim(raw);
    if (token.empty()) {
      continue;
    }
    std::size_t used = 0;
    T value{};
    try {
      if constexpr (std::is_floating_point_v<T>) {
        value = std::stod(token, &used);
      } else {
        if (token[0] == '-') {
          throw std::invalid_argument("negative");
        }
        value = static_cast<T>(std::stoull(token, &used));
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw UsageError(std::string(flag) + ": cannot parse '" + token + "'");
    }
    values.push_back(value);
  }
  return values;
}

double rho_from_sq(double rho_sq) { return rho_sq >= 0.0 ? std::sqrt(rho_sq) : std::nan(""); }

int cmd_sweep(const CLI::App& cmd, const EstimateArgs& a, const std::vector<std::string>& n_tokens,
              const std::vector<std::string>& d_tokens, const std::vector<std::string>& rho2_tokens,
              const std::string& rule, std::ostream& out, std::ostream& err) {
  const auto ns = parse_list<std::size_t>(n_tokens, "--n-list");
  const auto ds = parse_list<std::size_t>(d_tokens, "--d-list");
  const auto rho2s = parse_list<double>(rho2_tokens, "--rho2-list");
  if (rho2s.empty() == rule.empty()) {
    throw UsageError("give exactly one of --rho2-list and --rho2-rule");
  }
  std::vector<SweepPoint> grid;
  for (std::size_t n : ns) {
    for (std::size_t d : ds) {
      if (!rule.empty()) {
        grid.push_back({n, d, rho_from_sq(rule_rho_sq(rule, n, d))});
        continue;
      }
      for (double r2 : rho2s) {
        grid.push_back({n, d, rho_from_sq(r2)});
      }
    }
  }
  if (grid.empty()) {
    throw UsageError("empty grid");
  }
  const auto kinds = parse_tests(a.tests);
  const auto records = sweep(grid, kinds, sweep_options(a), RngStream{a.seed, 0});
  emit_records(cmd, a, records, out, err);
  return kExitOk;
}

// ---- bounds ----

int cmd_bounds(const CLI::App& cmd, std::optional<std::size_t> n, std::size_t d,
               std::optional<double> rho2, std::optional<double> rho, const std::string& hint,
               const std::string& out_path, std::ostream& out) {
  if (rho2.has_value() == rho.has_value()) {
    throw UsageError("give exactly one of --rho2 and --rho");
  }
  if (rho2 && !(*rho2 > 0.0 && *rho2 <= 1.0)) {
    throw UsageError("--rho2 must lie in (0, 1]");
  }
  const double r = rho ? *rho : std::sqrt(*rho2);
  const auto report = classify_regime(n, d, r, parse_asymptotic_hint(hint));
  auto j = to_json(report);
  j["meta"] = meta(cmd, 0);
  j["meta"].erase("seed");
  Output sink(out_path, out);
  sink.get() << j.dump(2) << '\n';
  return kExitOk;
}

// ---- verify ----

int cmd_verify(const std::string& suite, const VerifyOptions& o, std::ostream& out) {
  const auto results = run_verify(suite, o);
  out << "# cordet " << kVersion << " verify suite=" << suite << " seed=" << o.seed
      << " n_max=" << o.n_max << " trials=" << o.trials << '\n';
  std::size_t passed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name << ": " << r.detail << '\n';
    passed += r.passed ? 1 : 0;
  }
  out << passed << '/' << results.size() << " checks passed\n";
  return passed == results.size() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": empty key");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlation detection between Gaussian databases: sampling, tests, risk "
               "estimation, bounds and verification",
               "cordet"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // gen
  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample a database pair and write it in CDB1 format");
  gen_cmd->add_option("--hypothesis", gen.hypothesis, "h0 or h1")
      ->check(CLI::IsMember({"h0", "h1"}));
  gen_cmd->add_option("--sigma", gen.sigma, "Planted permutation under h1: id, uniform or file")
      ->check(CLI::IsMember({"id", "uniform", "file"}));
  gen_cmd->add_option("--sigma-file", gen.sigma_file, "1-based permutation images");
  gen_cmd->add_option("--n", gen.n, "Number of users")->required();
  gen_cmd->add_option("--d", gen.d, "Feature dimension")->required();
  gen_cmd->add_option("--rho", gen.rho, "Correlation, nonzero in [-1, 1]")->required();
  gen_cmd->add_option("--seed", gen.seed, "Master seed");
  gen_cmd->add_option("--out", gen.out, "Output file")->required();

  // risk
  EstimateArgs risk;
  std::size_t risk_n = 0;
  std::size_t risk_d = 0;
  double risk_rho = 0.0;
  std::string risk_test = "sum";
  auto* risk_cmd = app.add_subcommand("risk", "Monte Carlo Type-I / Type-II error of one test");
  risk_cmd->add_option("--test", risk_test, "sum, count or max");
  risk_cmd->add_option("--n", risk_n, "Number of users")->required();
  risk_cmd->add_option("--d", risk_d, "Feature dimension")->required();
  risk_cmd->add_option("--rho", risk_rho, "Correlation")->required();
  risk_cmd->add_option("--trials", risk.trials, "Trials per hypothesis (>= 100)");
  risk_cmd->add_option("--seed", risk.seed, "Master seed");
  risk_cmd->add_option("--sigma-mode", risk.sigma_mode, "id, uniform or file")
      ->check(CLI::IsMember({"id", "uniform", "file"}));
  risk_cmd->add_option("--sigma-file", risk.sigma_file, "1-based permutation images");
  risk_cmd->add_option("--p-source", risk.p_source, "Count-test threshold: mc or quarter")
      ->check(CLI::IsMember({"mc", "quarter"}));
  risk_cmd->add_option("--hint", risk.hint, "Asymptotic hint for the attached bound report");
  risk_cmd->add_option("--format", risk.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  risk_cmd->add_option("--threads", risk.threads, "Worker threads (0 = hardware)");
  risk_cmd->add_option("--out", risk.out, "Output file (default stdout)");

  // sweep
  EstimateArgs sw;
  std::vector<std::string> n_list;
  std::vector<std::string> d_list;
  std::vector<std::string> rho2_list;
  std::string rho2_rule;
  auto* sweep_cmd = app.add_subcommand("sweep", "Risk estimates and bounds over a parameter grid");
  sweep_cmd->add_option("--n-list", n_list, "Comma-separated n values")->required()->delimiter(',');
  sweep_cmd->add_option("--d-list", d_list, "Comma-separated d values")->required()->delimiter(',');
  auto* rho2_opt =
      sweep_cmd->add_option("--rho2-list", rho2_list, "Comma-separated rho^2 values")->delimiter(',');
  sweep_cmd->add_option("--rho2-rule", rho2_rule, "one_over_d or count_scaling(c)")
      ->excludes(rho2_opt);
  sweep_cmd->add_option("--tests", sw.tests, "Comma-separated tests")->delimiter(',');
  sweep_cmd->add_option("--trials", sw.trials, "Trials per hypothesis (>= 100)");
  sweep_cmd->add_option("--seed", sw.seed, "Master seed");
  sweep_cmd->add_option("--sigma-mode", sw.sigma_mode, "id, uniform or file")
      ->check(CLI::IsMember({"id", "uniform", "file"}));
  sweep_cmd->add_option("--sigma-file", sw.sigma_file, "1-based permutation images");
  sweep_cmd->add_option("--p-source", sw.p_source, "Count-test threshold: mc or quarter")
      ->check(CLI::IsMember({"mc", "quarter"}));
  sweep_cmd->add_option("--hint", sw.hint, "Asymptotic hint for the bound reports");
  sweep_cmd->add_option("--format", sw.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sweep_cmd->add_option("--threads", sw.threads, "Worker threads (0 = hardware)");
  sweep_cmd->add_option("--out", sw.out, "Output file (default stdout)");

  // bounds
  std::optional<std::size_t> bounds_n;
  std::size_t bounds_d = 0;
  std::optional<double> bounds_rho2;
  std::optional<double> bounds_rho;
  std::string bounds_hint = "n_grows_d_fixed";
  std::string bounds_out;
  auto* bounds_cmd = app.add_subcommand("bounds", "Closed-form bounds and regime as JSON");
  bounds_cmd->add_option("--n", bounds_n, "Number of users (optional)");
  bounds_cmd->add_option("--d", bounds_d, "Feature dimension")->required();
  auto* b_rho2 = bounds_cmd->add_option("--rho2", bounds_rho2, "rho^2 in (0, 1]");
  bounds_cmd->add_option("--rho", bounds_rho, "rho")->excludes(b_rho2);
  bounds_cmd->add_option("--regime-hint,--hint", bounds_hint,
                         "both_grow, d_grows_n_fixed or n_grows_d_fixed")
      ->check(CLI::IsMember({"both_grow", "d_grows_n_fixed", "n_grows_d_fixed"}));
  bounds_cmd->add_option("--out", bounds_out, "Output file (default stdout)");

  // verify
  std::string suite = "all";
  VerifyOptions vopt;
  std::size_t v_k = 0;
  std::size_t v_d = 0;
  double v_rho = 0.0;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle cross-check suites");
  std::vector<std::string> suites{"all"};
  for (const auto& s : verify_suite_names()) {
    suites.push_back(s);
  }
  verify_cmd->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suites));
  verify_cmd->add_option("--n-max", vopt.n_max, "Largest n for the perms oracle (<= 8)");
  auto* k_opt = verify_cmd->add_option("--k", v_k, "Cycle length (lemma-cycle)");
  auto* d_opt = verify_cmd->add_option("--d", v_d, "Dimension (lemma-cycle)");
  auto* rho_opt = verify_cmd->add_option("--rho", v_rho, "Correlation (lemma-cycle)");
  verify_cmd->add_option("--trials", vopt.trials, "Monte Carlo trials (0 = suite default)");
  verify_cmd->add_option("--seed", vopt.seed, "Master seed");
  verify_cmd->add_option("--threads", vopt.threads, "Worker threads (0 = hardware)");

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kExitOk : kExitUsage;
    }

    if (gen_cmd->parsed()) {
      return cmd_gen(*gen_cmd, gen, out);
    }
    if (risk_cmd->parsed()) {
      risk.tests = {risk_test};
      return cmd_risk(*risk_cmd, risk, risk_n, risk_d, risk_rho, out, err);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(*sweep_cmd, sw, n_list, d_list, rho2_list, rho2_rule, out, err);
    }
    if (bounds_cmd->parsed()) {
      return cmd_bounds(*bounds_cmd, bounds_n, bounds_d, bounds_rho2, bounds_rho, bounds_hint,
                        bounds_out, out);
    }
    if (verify_cmd->parsed()) {
      if (k_opt->count() > 0) {
        vopt.k = v_k;
      }
      if (d_opt->count() > 0) {
        vopt.d = v_d;
      }
      if (rho_opt->count() > 0) {
        vopt.rho = v_rho;
      }
      return cmd_verify(suite, vopt, out);
    }
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
}

}  // namespace cordet
