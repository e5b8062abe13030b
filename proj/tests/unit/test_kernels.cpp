#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "bidclub/error.hpp"
#include "bidclub/kernels.hpp"

using namespace bidclub;
using namespace bidclub::kernels;

namespace {

struct Fixture {
  std::vector<double> scores, second, payments;
  std::vector<TrialScene> scenes;
};

Fixture random_fixture(std::size_t actions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Fixture f;
  for (std::size_t j = 0; j < actions; ++j) {
    // A coarse lattice makes exact ties with the threshold common.
    double s = std::round(u(rng) * 16.0) / 16.0;
    if (j % 11 == 3) s = std::numeric_limits<double>::quiet_NaN();
    if (j % 13 == 5) s = std::numeric_limits<double>::infinity();
    f.scores.push_back(s);
    f.second.push_back(std::round(u(rng) * 16.0) / 16.0);
    f.payments.push_back(u(rng) * 0.8);
  }
  for (int t = 0; t < 200; ++t) {
    TrialScene scene;
    scene.value = u(rng);
    scene.threshold = std::round(u(rng) * 16.0) / 16.0;
    scene.tie_share = 1.0 / (1 + t % 3);
    scene.second_threshold = std::round(u(rng) * 16.0) / 16.0;
    scene.baseline = u(rng) * 0.1;
    f.scenes.push_back(scene);
  }
  return f;
}

ActionSums run(const Fixture& f, bool with_second) {
  ActionSums sums(f.scores.size());
  for (const auto& scene : f.scenes) {
    accumulate_action_utilities(f.scores, with_second ? std::span<const double>(f.second)
                                                      : std::span<const double>(),
                                f.payments, scene, sums);
  }
  return sums;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Straightforward restatement of the win rule, used as the oracle.
double oracle_utility(double s, double s2, bool with_second, double pay, const TrialScene& sc) {
  double win = s > sc.threshold ? 1.0 : (s == sc.threshold ? sc.tie_share : 0.0);
  if (with_second && !(s2 > sc.second_threshold)) win = 0.0;
  return win * (sc.value - pay);
}

}  // namespace

TEST_CASE("scalar kernel matches the oracle") {
  force_isa(Isa::scalar);
  const Fixture f = random_fixture(37, 5);
  for (bool with_second : {false, true}) {
    const ActionSums sums = run(f, with_second);
    for (std::size_t j = 0; j < f.scores.size(); ++j) {
      double u = 0.0, g = 0.0;
      for (const auto& sc : f.scenes) {
        const double x = oracle_utility(f.scores[j], f.second[j], with_second, f.payments[j], sc);
        u += x;
        g += x - sc.baseline;
      }
      CHECK(sums.utility[j] == doctest::Approx(u).epsilon(1e-12));
      CHECK(sums.gain[j] == doctest::Approx(g).epsilon(1e-12));
    }
  }
  reset_isa();
}

TEST_CASE("vector kernels reproduce the scalar kernel bit for bit") {
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) {
      MESSAGE("skipping unavailable ISA " << std::string(to_string(isa)));
      continue;
    }
    for (std::size_t actions : {1u, 3u, 4u, 5u, 64u, 257u}) {
      const Fixture f = random_fixture(actions, 100 + actions);
      for (bool with_second : {false, true}) {
        force_isa(Isa::scalar);
        const ActionSums ref = run(f, with_second);
        force_isa(isa);
        const ActionSums vec = run(f, with_second);
        CHECK(bitwise_equal(ref.utility, vec.utility));
        CHECK(bitwise_equal(ref.utility_sq, vec.utility_sq));
        CHECK(bitwise_equal(ref.gain, vec.gain));
        CHECK(bitwise_equal(ref.gain_sq, vec.gain_sq));
      }
      std::vector<double> row(actions), a(actions, 0.25), b(actions, 0.25);
      std::mt19937_64 rng(actions);
      for (auto& x : row) x = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      force_isa(Isa::scalar);
      weighted_row_sum(0.3, row, a);
      force_isa(isa);
      weighted_row_sum(0.3, row, b);
      CHECK(bitwise_equal(a, b));
    }
  }
  reset_isa();
}

TEST_CASE("dispatch control") {
  CHECK(isa_available(Isa::scalar));
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  reset_isa();
  CHECK(isa_available(active_isa()));
#if !defined(BIDCLUB_HAVE_NEON)
  CHECK_THROWS_AS(force_isa(Isa::neon), Error);
#endif
}

TEST_CASE("kernel input validation and merge") {
  ActionSums sums(2);
  const std::vector<double> scores{0.5, 0.7}, pay{0.1};
  TrialScene scene;
  CHECK_THROWS_AS(accumulate_action_utilities(scores, {}, pay, scene, sums), Error);

  ActionSums a(2), b(2);
  a.utility = {1.0, 2.0};
  b.utility = {0.5, 0.25};
  a.merge(b);
  CHECK(a.utility[0] == 1.5);
  CHECK(a.utility[1] == 2.25);
}
