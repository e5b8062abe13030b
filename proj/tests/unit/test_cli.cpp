#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bidclub/cli.hpp"
#include "bidclub/error.hpp"

using namespace bidclub;
using namespace bidclub::cli;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error_message(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

std::string config_path(const std::string& name) {
  return std::string(BIDCLUB_CONFIG_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("parse a full config") {
  const RunConfig c = parse(
      "# comment\n"
      "experiment = revenue\n"
      "trials = 5000\n"
      "seed = 42\n"
      "valuation = power\n"
      "alpha = 2\n"
      "values = 0.25, 0.75\n"
      "\n"
      "[gamma_A]\n"
      "1 0.2\n"
      "2 0.3\n"
      "3 0.5\n"
      "[gamma_C]\n"
      "4 1\n");
  CHECK(c.experiment == "revenue");
  CHECK(c.trials == 5000);
  CHECK(c.seed == 42);
  CHECK(c.values == std::vector<double>{0.25, 0.75});
  CHECK(c.club_sizes().kappa() == 3);
  CHECK(c.coordinator_counts().pmf(4) == 1.0);
  CHECK(c.valuations().cdf(0.5) == doctest::Approx(0.25));
}

TEST_CASE("reference configs load") {
  const RunConfig ref = load_config(config_path("reference.cfg"));
  CHECK(ref.seed == 20240601);
  CHECK(ref.trials == 1'000'000);
  const RunConfig fn = load_config(config_path("false_name.cfg"));
  CHECK_FALSE(fn.identity_enforcement);
  CHECK(fn.club_sizes().kappa() == 3);
  const RunConfig bt = load_config(config_path("bid_table.cfg"));
  REQUIRE(bt.count_models.size() == 1);
  CHECK(bt.count_models[0].first == "club_n2_k2");
}

TEST_CASE("parse errors carry line numbers or field names") {
  CHECK(config_error_message("trials = 10\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(config_error_message("trials = ten\n").find("line 1") != std::string::npos);
  CHECK(config_error_message("[gamma_A]\n1 0.5\n2 0.5\ntrials = 4\n").find("line 4") !=
        std::string::npos);
  CHECK(config_error_message("[nonsense]\n").find("unknown section") != std::string::npos);
  CHECK(config_error_message("[gamma_A]\n1 1\n2 0\n").find("gamma_A(1) must be < 1") !=
        std::string::npos);
  CHECK(config_error_message("[gamma_A]\n0 0.5\n2 0.5\n").find("gamma_A(0) must be 0") !=
        std::string::npos);
  CHECK(config_error_message("[gamma_A]\n1 0.5\n2 0.47\n").find("sum to 0.97") !=
        std::string::npos);
  CHECK(config_error_message("[gamma_C]\n1 0.5\n2 0.5\n").find("gamma_C") != std::string::npos);
}

TEST_CASE("digest tracks result-relevant fields only") {
  RunConfig a = parse("experiment = revenue\n");
  RunConfig b = a;
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 16);
  b.seed = 99;
  b.threads = 7;
  b.output = "x.csv";
  CHECK(a.digest() == b.digest());
  b.trials = 17;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("exit codes") {
  std::ostringstream out, err;

  RunConfig unknown;
  unknown.experiment = "no-such-experiment";
  CHECK(run(unknown, out, err) == kConfigError);

  RunConfig fn = load_config(config_path("false_name.cfg"));
  fn.experiment = "equilibrium";
  fn.trials = 20000;
  fn.values = {0.9};
  CHECK(run(fn, out, err) == kViolation);
  CHECK(out.str().find("# status: FAIL") != std::string::npos);

  fn.identity_enforcement = true;
  err.str("");
  CHECK(run(fn, out, err) == kConfigError);
  CHECK(err.str().find("scenario unavailable") != std::string::npos);

  RunConfig io;
  io.experiment = "dominance-check";
  io.output = "/nonexistent-dir/out.csv";
  CHECK(run(io, out, err) == kIoError);
  CHECK_THROWS_AS(load_config("/nonexistent-dir/x.cfg"), Error);

  RunConfig dom;
  dom.experiment = "dominance-check";
  out.str("");
  CHECK(run(dom, out, err) == kPass);
  CHECK(out.str().find("# status: PASS") != std::string::npos);
}

TEST_CASE("bid table export") {
  RunConfig c = load_config(config_path("bid_table.cfg"));
  c.experiment = "bid-table";
  std::ostringstream out, err;
  REQUIRE(run(c, out, err) == kPass);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "model,v,bid");
  std::size_t rows = 0;
  bool saw_point = false;
  bool saw_zero = false;
  while (std::getline(lines, line)) {
    ++rows;
    if (line == "n=3,0.6,0.4") saw_point = true;
    if (line == "n=2,0,0") saw_zero = true;
  }
  CHECK(rows == 5 * 101);
  CHECK(saw_point);
  CHECK(saw_zero);
}
