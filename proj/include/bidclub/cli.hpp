#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bidclub/distributions.hpp"
#include "bidclub/environment.hpp"

namespace bidclub::cli {

/// Process exit codes.
enum ExitCode : int { kPass = 0, kViolation = 1, kConfigError = 2, kIoError = 3 };

/// Recognized experiment names.
const std::vector<std::string>& experiment_names();

/// Parsed run configuration. Distributions are kept as raw tables and
/// validated by `environment()`.
struct RunConfig {
  std::string experiment;
  std::size_t trials = 1'000'000;
  std::uint64_t seed = 1;
  std::string output;  ///< empty writes to stdout
  std::size_t grid_points = 101;

  std::string valuation = "uniform";  ///< "uniform" or "power"
  double alpha = 1.0;
  std::map<int, double> gamma_A{{1, 0.5}, {2, 0.5}};
  std::map<int, double> gamma_C{{2, 0.5}, {3, 0.5}};
  int kappa = 0;  ///< 0 takes the largest listed club size
  bool identity_enforcement = true;

  std::string deviator = "both";  ///< singleton, club-member or both
  int club_size = 2;
  int announced = 2;
  std::string scenario = "none";  ///< "none" or "false-name"
  std::vector<double> values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int max_announced = 6;
  std::vector<int> fixed_counts{2, 3, 4, 5};
  std::vector<std::pair<std::string, std::map<int, double>>> count_models;

  std::string trace;  ///< JSON-lines trial trace for the revenue experiment
  std::size_t trace_trials = 10;
  unsigned threads = 0;

  ValuationDistribution valuations() const;
  ClubSizeDistribution club_sizes() const;
  CountDistribution coordinator_counts() const;
  EnvironmentConfig environment() const;

  /// Every field that affects results, one `key = value` per line, in a
  /// fixed order. Seed, output paths and thread count are excluded.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string digest() const;
};

/// Builds a dense pmf from a sparse table; `field` names the table in
/// validation errors.
CountDistribution table_distribution(const std::map<int, double>& table, const std::string& field);

/// Parses `key = value` lines and pmf sections ([gamma_A], [gamma_C],
/// [count_model NAME]) holding `count probability` lines; '#' starts a
/// comment. Throws Error(config) with the line number on parse failures and
/// naming the field on invariant violations, Error(io) when unreadable.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// One row per (model, v): `model,v,bid` at 12 significant digits.
void export_bid_table(const ValuationDistribution& valuations,
                      std::span<const std::pair<std::string, CountDistribution>> models,
                      std::span<const double> grid, std::ostream& out);

/// `points` evenly spaced values from the bottom to the top of the support.
std::vector<double> support_grid(const ValuationDistribution& valuations, std::size_t points);

/// Runs the configured experiment, writes the report, and returns the exit
/// code. Errors are reported on `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace bidclub::cli
