#include "bidclub/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bidclub/bid_engine.hpp"
#include "bidclub/error.hpp"
#include "bidclub/experiments.hpp"
#include "bidclub/trace.hpp"

namespace bidclub::cli {

namespace {

[[noreturn]] void config_error(const std::string& message) { fail(ErrorKind::config, message); }

[[noreturn]] void line_error(int line, const std::string& message) {
  config_error("line " + std::to_string(line) + ": " + message);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

template <typename T>
T number(const std::string& text, const std::string& key, int line) {
  T value{};
  if (!parse_number(text, value)) line_error(line, "cannot parse '" + text + "' for " + key);
  return value;
}

template <typename T>
std::vector<T> number_list(const std::string& text, const std::string& key, int line) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number<T>(trim(item), key, line));
  if (out.empty()) line_error(line, key + " needs at least one entry");
  return out;
}

bool boolean(const std::string& text, const std::string& key, int line) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  line_error(line, key + " must be true or false");
}

std::string full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_table(std::ostream& out, const char* name, const std::map<int, double>& table) {
  out << '[' << name << "]\n";
  for (const auto& [count, p] : table) out << count << ' ' << full(p) << '\n';
}

void check_choice(const std::string& value, std::initializer_list<const char*> choices,
                  const std::string& field) {
  for (const char* c : choices) {
    if (value == c) return;
  }
  std::string msg = field + " must be one of:";
  for (const char* c : choices) msg += std::string(" ") + c;
  config_error(msg);
}

void validate(const RunConfig& config) {
  if (!config.experiment.empty()) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), config.experiment) == names.end()) {
      config_error("unknown experiment '" + config.experiment + "'");
    }
  }
  if (config.trials < 1) config_error("trials must be >= 1");
  if (config.grid_points < 2) config_error("grid_points must be >= 2");
  check_choice(config.valuation, {"uniform", "power"}, "valuation");
  check_choice(config.deviator, {"singleton", "club-member", "both"}, "deviator");
  check_choice(config.scenario, {"none", "false-name"}, "scenario");
  if (config.announced < 2) config_error("announced must be >= 2");
  if (config.club_size < 1) config_error("club_size must be >= 1");
  if (config.max_announced < 2) config_error("max_announced must be >= 2");
  for (int n : config.fixed_counts) {
    if (n < 2) config_error("fixed_counts entries must be >= 2");
  }
  const EnvironmentConfig env = config.environment();
  if (config.club_size > env.club_sizes.kappa()) config_error("club_size exceeds kappa");
  for (double v : config.values) {
    if (!env.valuations.contains(v)) config_error("values entry " + full(v) + " outside support");
  }
  for (const auto& [name, table] : config.count_models) {
    table_distribution(table, "count_model " + name).require_auction_counts("count_model " + name);
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{
      "equilibrium", "club-vs-disbanded", "nonmember-welfare", "utility-equivalence",
      "revenue",     "dominance-check",   "bid-table"};
  return names;
}

CountDistribution table_distribution(const std::map<int, double>& table, const std::string& field) {
  if (table.empty()) config_error(field + " has no entries");
  double sum = 0.0;
  for (const auto& [count, p] : table) {
    if (count < 0) config_error(field + " lists negative count " + std::to_string(count));
    if (!(p >= 0.0) || !std::isfinite(p)) {
      config_error(field + "(" + std::to_string(count) + ") must be a nonnegative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPmfTolerance) {
    config_error(field + " probabilities sum to " + fixed12(sum) + ", expected 1");
  }
  const int lo = table.begin()->first;
  const int hi = table.rbegin()->first;
  std::vector<double> dense(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (const auto& [count, p] : table) dense[static_cast<std::size_t>(count - lo)] = p;
  return CountDistribution(lo, std::move(dense));
}

ValuationDistribution RunConfig::valuations() const {
  if (valuation == "uniform") return uniform_valuations();
  if (valuation == "power") {
    if (!(alpha > 0.0)) config_error("alpha must be > 0");
    return power_valuations(alpha);
  }
  config_error("valuation must be uniform or power");
}

ClubSizeDistribution RunConfig::club_sizes() const {
  const CountDistribution table = table_distribution(gamma_A, "gamma_A");
  if (table.pmf(0) > 0.0) {
    config_error("gamma_A(0) must be 0: every potential coordinator has at least one agent");
  }
  const int top = table.max_count();
  const int bound = kappa > 0 ? kappa : top;
  if (bound < 2) config_error("kappa must be >= 2");
  if (top > bound) {
    config_error("gamma_A lists club size " + std::to_string(top) + " above kappa = " +
                 std::to_string(bound));
  }
  if (table.pmf(1) >= 1.0 - kPmfTolerance) config_error("gamma_A(1) must be < 1");
  std::vector<double> dense(static_cast<std::size_t>(bound), 0.0);
  for (int s = 1; s <= bound; ++s) dense[static_cast<std::size_t>(s - 1)] = table.pmf(s);
  return ClubSizeDistribution(std::move(dense));
}

CountDistribution RunConfig::coordinator_counts() const {
  const CountDistribution table = table_distribution(gamma_C, "gamma_C");
  if (table.pmf(0) > 0.0 || table.pmf(1) > 0.0) {
    config_error("gamma_C(0) and gamma_C(1) must be 0: at least two potential coordinators");
  }
  return table;
}

EnvironmentConfig RunConfig::environment() const {
  EnvironmentConfig env{coordinator_counts(), club_sizes(), valuations(), identity_enforcement};
  env.validate();
  return env;
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out << "experiment = " << experiment << '\n';
  out << "trials = " << trials << '\n';
  out << "grid_points = " << grid_points << '\n';
  out << "valuation = " << valuation << '\n';
  out << "alpha = " << full(alpha) << '\n';
  out << "kappa = " << kappa << '\n';
  out << "identity_enforcement = " << (identity_enforcement ? "true" : "false") << '\n';
  out << "deviator = " << deviator << '\n';
  out << "club_size = " << club_size << '\n';
  out << "announced = " << announced << '\n';
  out << "scenario = " << scenario << '\n';
  out << "values =";
  for (double v : values) out << ' ' << full(v);
  out << "\nmax_announced = " << max_announced << '\n';
  out << "fixed_counts =";
  for (int n : fixed_counts) out << ' ' << n;
  out << '\n';
  write_table(out, "gamma_A", gamma_A);
  write_table(out, "gamma_C", gamma_C);
  for (const auto& [name, table] : count_models) write_table(out, ("count_model " + name).c_str(), table);
  return out.str();
}

std::string RunConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::map<int, double>* table = nullptr;
  bool saw_gamma_A = false, saw_gamma_C = false;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') line_error(line, "unterminated section header");
      const std::string name = trim(std::string_view(text).substr(1, text.size() - 2));
      if (name == "gamma_A") {
        if (saw_gamma_A) line_error(line, "duplicate [gamma_A] section");
        saw_gamma_A = true;
        config.gamma_A.clear();
        table = &config.gamma_A;
      } else if (name == "gamma_C") {
        if (saw_gamma_C) line_error(line, "duplicate [gamma_C] section");
        saw_gamma_C = true;
        config.gamma_C.clear();
        table = &config.gamma_C;
      } else if (name.rfind("count_model", 0) == 0) {
        const std::string model = trim(std::string_view(name).substr(11));
        if (model.empty()) line_error(line, "count_model section needs a name");
        for (const auto& entry : config.count_models) {
          if (entry.first == model) line_error(line, "duplicate count_model " + model);
        }
        table = &config.count_models.emplace_back(model, std::map<int, double>{}).second;
      } else {
        line_error(line, "unknown section [" + name + "]");
      }
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      if (!table) line_error(line, "expected key = value");
      std::istringstream pair(text);
      std::string count_text, prob_text, extra;
      pair >> count_text >> prob_text;
      if (prob_text.empty() || (pair >> extra)) line_error(line, "expected 'count probability'");
      const int count = number<int>(count_text, "count", line);
      const double p = number<double>(prob_text, "probability", line);
      if (!table->emplace(count, p).second) {
        line_error(line, "count " + count_text + " listed twice");
      }
      continue;
    }
    if (table) line_error(line, "key = value lines must precede pmf sections");

    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (value.empty()) line_error(line, key + " has no value");
    if (key == "experiment") config.experiment = value;
    else if (key == "trials") config.trials = number<std::size_t>(value, key, line);
    else if (key == "seed") config.seed = number<std::uint64_t>(value, key, line);
    else if (key == "output") config.output = value;
    else if (key == "grid_points") config.grid_points = number<std::size_t>(value, key, line);
    else if (key == "valuation") config.valuation = value;
    else if (key == "alpha") config.alpha = number<double>(value, key, line);
    else if (key == "kappa") config.kappa = number<int>(value, key, line);
    else if (key == "identity_enforcement") config.identity_enforcement = boolean(value, key, line);
    else if (key == "deviator") config.deviator = value;
    else if (key == "club_size") config.club_size = number<int>(value, key, line);
    else if (key == "announced") config.announced = number<int>(value, key, line);
    else if (key == "scenario") config.scenario = value;
    else if (key == "values") config.values = number_list<double>(value, key, line);
    else if (key == "max_announced") config.max_announced = number<int>(value, key, line);
    else if (key == "fixed_counts") config.fixed_counts = number_list<int>(value, key, line);
    else if (key == "trace") config.trace = value;
    else if (key == "trace_trials") config.trace_trials = number<std::size_t>(value, key, line);
    else if (key == "threads") config.threads = number<unsigned>(value, key, line);
    else line_error(line, "unknown key '" + key + "'");
  }
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config file " + path);
  return parse_config(in);
}

std::vector<double> support_grid(const ValuationDistribution& valuations, std::size_t points) {
  if (points < 2) fail(ErrorKind::invalid_parameter, "grid needs at least two points");
  std::vector<double> grid(points);
  const double lo = valuations.lower();
  const double width = valuations.upper() - lo;
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + width * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = valuations.upper();
  return grid;
}

void export_bid_table(const ValuationDistribution& valuations,
                      std::span<const std::pair<std::string, CountDistribution>> models,
                      std::span<const double> grid, std::ostream& out) {
  out << "model,v,bid\n";
  for (const auto& [name, counts] : models) {
    for (double v : grid) {
      out << name << ',' << fixed12(v) << ',' << fixed12(equilibrium_bid_mixture(v, counts, valuations))
          << '\n';
    }
  }
}

namespace {

void absorb(ExperimentReport& into, ExperimentReport&& part) {
  into.rows.insert(into.rows.end(), part.rows.begin(), part.rows.end());
  into.violations.insert(into.violations.end(), part.violations.begin(), part.violations.end());
  into.notes.insert(into.notes.end(), part.notes.begin(), part.notes.end());
}

ExperimentReport run_experiment(const RunConfig& config, const EnvironmentConfig& env,
                                const ExperimentOptions& options) {
  const std::string& name = config.experiment;
  if (name == "equilibrium") {
    if (config.scenario == "false-name") {
      return false_name_experiment(env, config.club_size, config.values, options);
    }
    ExperimentReport report;
    bool first = true;
    auto add = [&](DeviatorRole role, int k) {
      DeviatorSpec spec{role, k, config.values};
      ExperimentReport part = verify_equilibrium(env, spec, options);
      if (first) {
        report = std::move(part);
        first = false;
      } else {
        absorb(report, std::move(part));
      }
    };
    if (config.deviator != "club-member") add(DeviatorRole::singleton, 1);
    if (config.deviator != "singleton") add(DeviatorRole::club_member, std::max(2, config.club_size));
    return report;
  }
  if (name == "club-vs-disbanded") {
    return compare_club_vs_disbanded(env, config.club_size, config.announced, options);
  }
  if (name == "nonmember-welfare") {
    return compare_nonmember_welfare(env, config.club_size, config.announced, options);
  }
  if (name == "utility-equivalence") {
    return verify_utility_equivalence(env, config.club_size, config.announced, options);
  }
  if (name == "dominance-check") return dominance_check(env, config.max_announced, options);
  if (name == "revenue") {
    if (config.trace.empty()) return revenue_accounting(env, options);
    std::ofstream trace(config.trace);
    if (!trace) fail(ErrorKind::io, "cannot open trace file " + config.trace);
    ExperimentReport report =
        revenue_accounting(env, options, config.trace_trials, [&](const TrialRecord& r) {
          trace << to_json(r).dump() << '\n';
        });
    if (!trace) fail(ErrorKind::io, "failed writing trace file " + config.trace);
    return report;
  }
  config_error("unknown experiment '" + name + "'");
}

void emit(const std::string& body, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::io, "cannot open output file " + path);
  file << body;
  if (!file) fail(ErrorKind::io, "failed writing output file " + path);
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.experiment.empty()) config_error("no experiment given");
    validate(config);
    const EnvironmentConfig env = config.environment();

    if (config.experiment == "bid-table") {
      std::vector<std::pair<std::string, CountDistribution>> models;
      for (int n : config.fixed_counts) {
        models.emplace_back("n=" + std::to_string(n), CountDistribution::point_mass(n));
      }
      for (const auto& [model, table] : config.count_models) {
        models.emplace_back(model, table_distribution(table, "count_model " + model));
      }
      std::ostringstream body;
      export_bid_table(env.valuations, models, support_grid(env.valuations, config.grid_points),
                       body);
      emit(body.str(), config.output, out);
      return kPass;
    }

    ExperimentOptions options;
    options.trials = config.trials;
    options.seed = config.seed;
    options.threads = config.threads;
    options.config_digest = config.digest();
    const ExperimentReport report = run_experiment(config, env, options);
    emit(report.render(), config.output, out);
    if (!report.passed()) {
      err << config.experiment << ": " << report.violations.size() << " violation(s)\n";
      for (const auto& v : report.violations) err << "  " << v << '\n';
      return kViolation;
    }
    return kPass;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == ErrorKind::io ? kIoError : kConfigError;
  }
}

}  // namespace bidclub::cli
