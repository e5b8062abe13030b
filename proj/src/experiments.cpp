#include "bidclub/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "bidclub/bid_engine.hpp"
#include "bidclub/error.hpp"
#include "bidclub/kernels.hpp"
#include "bidclub/random.hpp"
#include "bidclub/stats.hpp"

namespace bidclub {

namespace {

std::string num(double x, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string label(const char* key, double x) { return std::string(key) + "=" + num(x, 6); }

ExperimentReport make_report(const char* name, const ExperimentOptions& options) {
  ExperimentReport report;
  report.experiment = name;
  report.config_digest = options.config_digest;
  report.seed = options.seed;
  report.trials = options.trials;
  return report;
}

double draw_value(const ValuationDistribution& F, Rng& rng) {
  return F.inverse_cdf(uniform01(rng));
}

/// Highest of `count` fresh valuations; the support bottom when count is 0.
double max_value(int count, const ValuationDistribution& F, Rng& rng) {
  double top = F.lower();
  for (int i = 0; i < count; ++i) top = std::max(top, draw_value(F, rng));
  return top;
}

/// Highest valuation over `clubs` potential coordinators with i.i.d. sizes.
double max_over_clubs(int clubs, CountSampler& sizes, const ValuationDistribution& F, Rng& rng) {
  double top = F.lower();
  for (int c = 0; c < clubs; ++c) top = std::max(top, max_value(sizes(rng), F, rng));
  return top;
}

/// Order-independent fingerprint of a stream of draws.
std::uint64_t draw_hash(double x) { return trial_seed(std::bit_cast<std::uint64_t>(x), 0); }

std::string hex(std::uint64_t x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
  return buf;
}

void require_env(const EnvironmentConfig& env) { env.validate(); }

void require_club_size(const EnvironmentConfig& env, int k, int minimum) {
  if (k < minimum || k > env.club_sizes.kappa()) {
    std::ostringstream msg;
    msg << "club size " << k << " outside [" << minimum << ", " << env.club_sizes.kappa() << "]";
    fail(ErrorKind::invalid_parameter, msg.str());
  }
}

std::vector<double> even_grid(double lo, double hi, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = points == 1 ? hi
                          : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

struct Best {
  std::size_t index = 0;
  double gain = -std::numeric_limits<double>::infinity();
  double stderr_ = 0.0;
};

Best best_gain(const kernels::ActionSums& sums, std::size_t trials) {
  Best best;
  const double n = static_cast<double>(trials);
  for (std::size_t j = 0; j < sums.size(); ++j) {
    const double g = sums.gain[j] / n;
    if (g > best.gain) {
      best = {j, g, MeanAccumulator::standard_error(trials, sums.gain[j], sums.gain_sq[j])};
    }
  }
  return best;
}

bool significant(double mean, double se) { return mean > kSignificance * se; }

}  // namespace

std::string ExperimentReport::render() const {
  std::ostringstream out;
  out << "# experiment: " << experiment << '\n';
  out << "# config_digest: " << config_digest << '\n';
  out << "# seed: " << seed << '\n';
  out << "# trials: " << trials << '\n';
  out << "# status: " << (passed() ? "PASS" : "FAIL") << '\n';
  out << "# violations: " << violations.size() << '\n';
  for (const auto& v : violations) out << "# violation: " << v << '\n';
  for (const auto& n : notes) out << "# note: " << n << '\n';
  out << "scenario,statistic,mean,stderr,pass\n";
  for (const auto& r : rows) {
    out << r.scenario << ',' << r.statistic << ',' << num(r.mean) << ',' << num(r.standard_error)
        << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::vector<double> interior_grid(const ValuationDistribution& valuations, std::size_t points) {
  std::vector<double> grid(points);
  const double lo = valuations.lower();
  const double width = valuations.upper() - lo;
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = lo + width * static_cast<double>(i + 1) / static_cast<double>(points);
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Equilibrium deviation test

namespace {

struct DeviationCell {
  kernels::ActionSums stay;     // singleton bids, or declarations to the coordinator
  kernels::ActionSums decline;  // decline and bid directly (club members only)
};

struct DeviationChunk {
  CountSampler coordinators;
  CountSampler sizes;
  std::vector<DeviationCell> cells;           // value-major, then announced count
  std::vector<MeanAccumulator> prescribed;    // per value
};

}  // namespace

ExperimentReport verify_equilibrium(const EnvironmentConfig& env, const DeviatorSpec& deviator,
                                    const ExperimentOptions& options) {
  require_env(env);
  if (options.trials < 10'000) {
    fail(ErrorKind::precondition_violation, "equilibrium test needs at least 10^4 trials");
  }
  const bool member = deviator.role == DeviatorRole::club_member;
  const int k = member ? deviator.club_size : 1;
  if (member) require_club_size(env, k, 2);
  if (deviator.values.empty()) fail(ErrorKind::invalid_parameter, "no deviator values");
  if (deviator.bid_points < 2 || deviator.misreport_points < 2) {
    fail(ErrorKind::invalid_parameter, "deviation grids need at least two points");
  }
  const ValuationDistribution& F = env.valuations;
  for (double v : deviator.values) {
    if (!F.contains(v)) fail(ErrorKind::invalid_parameter, "deviator value outside support");
  }

  Coordinator coordinator(F, env.club_sizes);
  BidEvaluator evaluator(F);
  const int n_lo = std::max(2, env.coordinator_counts.min_support());
  const int n_hi = env.coordinator_counts.max_support();
  const auto n_count = static_cast<std::size_t>(n_hi - n_lo + 1);
  const std::size_t n_values = deviator.values.size();

  std::vector<double> bids = even_grid(F.lower(), F.upper(), deviator.bid_points);
  bids.push_back(kAbstain);
  std::vector<double> bid_payments;
  for (double a : bids) bid_payments.push_back(std::isnan(a) ? 0.0 : a);
  const std::vector<double> misreports = even_grid(F.lower(), F.upper(), deviator.misreport_points);

  auto inverse_row = [&](const CountDistribution& counts) {
    std::vector<double> row;
    for (double a : bids) row.push_back(std::isnan(a) ? a : evaluator.inverse_mixture(a, counts));
    return row;
  };

  // Per announced count: scores of direct bids (singleton path, or the
  // decline path where the announcement grows to n + k - 1).
  std::vector<std::vector<double>> direct(n_count), acceptor(n_count);
  // Per value and count: declaration scores and payments, prescribed payment.
  std::vector<std::vector<double>> declared(n_values);
  std::vector<std::vector<double>> declared_pay(n_values * n_count);
  std::vector<double> prescribed_pay(n_values * n_count);
  for (std::size_t c = 0; c < n_count; ++c) {
    const int n = n_lo + static_cast<int>(c);
    const int shown = member ? n + k - 1 : n;
    direct[c] = inverse_row(coordinator.belief(shown, 1));
    if (member) acceptor[c] = inverse_row(coordinator.belief(shown, k));
    for (std::size_t vi = 0; vi < n_values; ++vi) {
      const double v = deviator.values[vi];
      prescribed_pay[vi * n_count + c] = coordinator.equilibrium_bid(v, n, k);
      if (!member) continue;
      if (c == 0) {
        declared[vi] = misreports;
        declared[vi].push_back(v);
      }
      auto& pay = declared_pay[vi * n_count + c];
      for (double mu : declared[vi]) pay.push_back(coordinator.equilibrium_bid(mu, n, k));
    }
  }

  auto make = [&] {
    DeviationChunk chunk{CountSampler(env.coordinator_counts), CountSampler(env.club_sizes.counts()),
                         {}, std::vector<MeanAccumulator>(n_values)};
    chunk.cells.reserve(n_values * n_count);
    for (std::size_t i = 0; i < n_values * n_count; ++i) {
      chunk.cells.push_back({kernels::ActionSums(member ? misreports.size() + 1 : bids.size()),
                             kernels::ActionSums(member ? bids.size() : 0)});
    }
    return chunk;
  };
  auto body = [&](DeviationChunk& chunk, std::size_t t) {
    Rng rng(trial_seed(options.seed, t));
    const int n = chunk.coordinators(rng);
    const double mates = max_value(k - 1, F, rng);
    const double others = max_over_clubs(n - 1, chunk.sizes, F, rng);
    const double threshold = std::max(mates, others);
    const auto c = static_cast<std::size_t>(n - n_lo);

    for (std::size_t vi = 0; vi < n_values; ++vi) {
      const double v = deviator.values[vi];
      const double surplus = v - prescribed_pay[vi * n_count + c];
      const double baseline = v > threshold ? surplus : (v == threshold ? 0.5 * surplus : 0.0);
      chunk.prescribed[vi].add(baseline);
      DeviationCell& cell = chunk.cells[vi * n_count + c];

      kernels::TrialScene scene;
      scene.value = v;
      scene.threshold = threshold;
      scene.tie_share = 0.5;
      scene.baseline = baseline;
      if (!member) {
        kernels::accumulate_action_utilities(direct[c], {}, bid_payments, scene, cell.stay);
        continue;
      }
      kernels::accumulate_action_utilities(declared[vi], {}, declared_pay[vi * n_count + c], scene,
                                           cell.stay);
      scene.threshold = others;
      scene.second_threshold = mates;
      kernels::accumulate_action_utilities(direct[c], acceptor[c], bid_payments, scene,
                                           cell.decline);
    }
  };
  auto merge = [](DeviationChunk& total, DeviationChunk& part) {
    for (std::size_t i = 0; i < total.cells.size(); ++i) {
      total.cells[i].stay.merge(part.cells[i].stay);
      total.cells[i].decline.merge(part.cells[i].decline);
    }
    for (std::size_t i = 0; i < total.prescribed.size(); ++i) {
      total.prescribed[i].merge(part.prescribed[i]);
    }
  };
  const DeviationChunk total = run_trials(options.trials, options.threads, make, body, merge);

  ExperimentReport report = make_report("equilibrium", options);
  const std::string role = member ? "member k=" + std::to_string(k) : std::string("singleton");
  report.notes.push_back("deviator role: " + role);
  report.notes.push_back("gains are contributions to ex-ante utility at the deviator value; "
                         "each announced count is a separate information set");
  report.notes.push_back("common random numbers: every action is scored on the same draws");

  auto check = [&](const std::string& scenario, const std::string& statistic, const Best& best,
                   const std::string& action) {
    const bool ok = !significant(best.gain, best.stderr_);
    report.rows.push_back({scenario, statistic + "[" + action + "]", best.gain, best.stderr_, ok});
    if (!ok) {
      report.violations.push_back(scenario + " " + action + " gains " + num(best.gain) +
                                  " (stderr " + num(best.stderr_) + ")");
    }
  };
  auto action_name = [&](const char* key, double a) {
    return std::isnan(a) ? std::string("abstain") : label(key, a);
  };

  for (std::size_t vi = 0; vi < n_values; ++vi) {
    const double v = deviator.values[vi];
    const std::string base = role + " " + label("v", v);
    const MeanAccumulator& p = total.prescribed[vi];
    report.rows.push_back({base, "prescribed_utility", p.mean(), p.standard_error(), true});
    for (std::size_t c = 0; c < n_count; ++c) {
      const int n = n_lo + static_cast<int>(c);
      const std::string scenario = base + " n=" + std::to_string(n);
      const DeviationCell& cell = total.cells[vi * n_count + c];
      if (!member) {
        const Best b = best_gain(cell.stay, options.trials);
        check(scenario, "max_gain", b, action_name("bid", bids[b.index]));
        continue;
      }
      const Best m = best_gain(cell.stay, options.trials);
      check(scenario, "max_misreport_gain", m, label("declare", declared[vi][m.index]));
      const Best d = best_gain(cell.decline, options.trials);
      check(scenario, "max_decline_gain", d, "decline+" + action_name("bid", bids[d.index]));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Welfare comparisons

std::vector<BidMargin> club_vs_disbanded_margins(Coordinator& coordinator, int announced,
                                                 int club_size, std::span<const double> grid) {
  std::vector<BidMargin> out;
  for (double v : grid) {
    out.push_back({v, coordinator.equilibrium_bid(v, announced + club_size - 1, 1) -
                          coordinator.equilibrium_bid(v, announced, club_size)});
  }
  return out;
}

std::vector<BidMargin> nonmember_margins(Coordinator& coordinator, int announced, int club_size,
                                         std::span<const double> grid) {
  std::vector<BidMargin> out;
  for (double v : grid) {
    out.push_back({v, coordinator.equilibrium_bid(v, announced + club_size - 1, 1) -
                          coordinator.equilibrium_bid(v, announced, 1)});
  }
  return out;
}

namespace {

struct PairedChunk {
  Coordinator coordinator;
  CountSampler sizes;
  MeanAccumulator difference;
  MeanAccumulator with_club;
  MeanAccumulator without_club;
  std::uint64_t digest_a = 0;
  std::uint64_t digest_b = 0;
};

/// Shared driver for the two welfare comparisons. `focal_club` is the focal
/// agent's club size in scenario (a); `rivals` returns the highest
/// competing valuation; `pay_a` / `pay_b` are the focal payments.
ExperimentReport paired_welfare(const char* name, const EnvironmentConfig& env, int club_size,
                                int announced, const ExperimentOptions& options,
                                const std::vector<BidMargin>& margins, const char* margin_name,
                                int focal_club, int other_clubs) {
  const ValuationDistribution& F = env.valuations;
  ExperimentReport report = make_report(name, options);
  const int disbanded = announced + club_size - 1;

  // Exact bid-level check.
  double min_margin = std::numeric_limits<double>::infinity();
  for (const BidMargin& m : margins) {
    min_margin = std::min(min_margin, m.margin);
    const bool ok = club_size == 1 ? m.margin == 0.0 : m.margin > kExactMargin;
    if (!ok) {
      report.violations.push_back(std::string(margin_name) + " at " + label("v", m.value) + " is " +
                                  num(m.margin));
    }
  }
  const std::string setting =
      "k=" + std::to_string(club_size) + " n=" + std::to_string(announced);
  report.rows.push_back({setting + " exact", std::string("min_") + margin_name, min_margin, 0.0,
                         club_size == 1 ? min_margin == 0.0 : min_margin > kExactMargin});

  auto make = [&] {
    return PairedChunk{Coordinator(F, env.club_sizes), CountSampler(env.club_sizes.counts()),
                       {}, {}, {}, 0, 0};
  };
  auto body = [&](PairedChunk& chunk, std::size_t t) {
    Rng rng(trial_seed(options.seed, t));
    const double v = draw_value(F, rng);
    const double rivals = std::max(max_value(club_size - (focal_club == 1 ? 0 : 1), F, rng),
                                   max_over_clubs(other_clubs, chunk.sizes, F, rng));
    // Both scenarios see the same draws; only the announcement and the
    // focal payment rule differ.
    chunk.digest_a += draw_hash(v) ^ draw_hash(rivals);
    chunk.digest_b += draw_hash(v) ^ draw_hash(rivals);
    double ua = 0.0, ub = 0.0;
    if (v > rivals) {
      ua = v - chunk.coordinator.equilibrium_bid(v, announced, focal_club);
      ub = v - chunk.coordinator.equilibrium_bid(v, disbanded, 1);
    }
    chunk.with_club.add(ua);
    chunk.without_club.add(ub);
    chunk.difference.add(ua - ub);
  };
  auto merge = [](PairedChunk& total, PairedChunk& part) {
    total.difference.merge(part.difference);
    total.with_club.merge(part.with_club);
    total.without_club.merge(part.without_club);
    total.digest_a += part.digest_a;
    total.digest_b += part.digest_b;
  };
  const PairedChunk total = run_trials(options.trials, options.threads, make, body, merge);

  const std::string mc = setting + " monte_carlo";
  report.rows.push_back({mc, "utility_with_club", total.with_club.mean(),
                         total.with_club.standard_error(), true});
  report.rows.push_back({mc, "utility_disbanded", total.without_club.mean(),
                         total.without_club.standard_error(), true});
  const double d = total.difference.mean();
  const double se = total.difference.standard_error();
  const bool ok = club_size == 1 ? d == 0.0 : significant(d, se);
  report.rows.push_back({mc, "utility_difference", d, se, ok});
  if (!ok) {
    report.violations.push_back(mc + " difference " + num(d) + " is not above " +
                                num(kSignificance) + " standard errors (" + num(se) + ")");
  }
  const bool paired = total.digest_a == total.digest_b;
  report.notes.push_back("pairing: draw digest " + hex(total.digest_a) + " (club) " +
                         hex(total.digest_b) + " (disbanded)" + (paired ? " match" : " MISMATCH"));
  if (!paired) report.violations.push_back("paired scenarios saw different draws");
  return report;
}

}  // namespace

ExperimentReport compare_club_vs_disbanded(const EnvironmentConfig& env, int club_size,
                                           int announced, const ExperimentOptions& options) {
  require_env(env);
  require_club_size(env, club_size, 2);
  if (announced < 2) fail(ErrorKind::invalid_parameter, "announced count must be >= 2");
  Coordinator coordinator(env.valuations, env.club_sizes);
  const auto grid = interior_grid(env.valuations, 50);
  const auto margins = club_vs_disbanded_margins(coordinator, announced, club_size, grid);
  return paired_welfare("club-vs-disbanded", env, club_size, announced, options, margins,
                        "bid_gap", club_size, announced - 1);
}

ExperimentReport compare_nonmember_welfare(const EnvironmentConfig& env, int club_size,
                                           int announced, const ExperimentOptions& options) {
  require_env(env);
  require_club_size(env, club_size, 1);
  if (announced < 2) fail(ErrorKind::invalid_parameter, "announced count must be >= 2");
  Coordinator coordinator(env.valuations, env.club_sizes);
  const auto grid = interior_grid(env.valuations, 50);
  const auto margins = nonmember_margins(coordinator, announced, club_size, grid);
  return paired_welfare("nonmember-welfare", env, club_size, announced, options, margins,
                        "bid_gap", 1, announced - 2);
}

// ---------------------------------------------------------------------------
// Utility equivalence

double club_path_payment(Coordinator& coordinator, double value, int announced, int club_size) {
  if (announced < 2) fail(ErrorKind::invalid_parameter, "announced count must be >= 2");
  const double floor = coordinator.valuations().lower();
  if (!(value > floor)) fail(ErrorKind::invalid_parameter, "focal value must exceed the support bottom");

  // Focal agent 0; its clubmates declare the support bottom and every other
  // registrant bids zero, so the focal agent wins.
  std::vector<AgentId> registrants;
  std::optional<ClubState> club;
  if (club_size >= 2) {
    std::vector<AgentId> members;
    for (int m = 0; m < club_size; ++m) members.push_back(m);
    club.emplace(0, members);
    club->record_response(0, {true, value});
    for (int m = 1; m < club_size; ++m) club->record_response(m, {true, floor});
    const auto forwarded = coordinator.registrants(*club, 0);
    registrants.insert(registrants.end(), forwarded.begin(), forwarded.end());
  } else {
    registrants.push_back(0);
  }
  for (int r = 1; r < announced; ++r) registrants.push_back(1000 + r);

  auto bid_phase = [&](int shown) {
    std::vector<Bid> bids;
    if (club) {
      for (const Registration& reg : coordinator.collect_and_register(*club, shown, 0).registrations) {
        bids.push_back({reg.agent, reg.bid});
      }
    } else {
      bids.push_back({0, coordinator.equilibrium_bid(value, shown, 1)});
    }
    for (int r = 1; r < announced; ++r) bids.push_back({1000 + r, 0.0});
    return bids;
  };
  RevelationResult result = run_participation_revelation(registrants, bid_phase, 0);
  if (result.outcome.winner != 0) {
    fail(ErrorKind::precondition_violation, "focal agent did not win the payment probe");
  }
  double total = result.outcome.transfers_to_center.at(0);
  if (club) total += coordinator.settle(*club, result.outcome, result.announced).coordinator_payment;
  return total;
}

namespace {

constexpr std::size_t kBuckets = 10;

struct EquivalenceChunk {
  Coordinator coordinator;
  CountSampler sizes;
  CountSampler baseline_counts;
  std::vector<MeanAccumulator> difference;
  std::vector<MeanAccumulator> club;
  std::vector<MeanAccumulator> baseline;
  std::uint64_t digest = 0;
};

}  // namespace

ExperimentReport verify_utility_equivalence(const EnvironmentConfig& env, int club_size,
                                            int announced, const ExperimentOptions& options) {
  require_env(env);
  require_club_size(env, club_size, 1);
  if (announced < 2) fail(ErrorKind::invalid_parameter, "announced count must be >= 2");
  const ValuationDistribution& F = env.valuations;
  ExperimentReport report = make_report("utility-equivalence", options);
  const std::string setting =
      "k=" + std::to_string(club_size) + " n=" + std::to_string(announced);

  // Exact payment identity against an independently composed count model.
  const CountDistribution model =
      compose_count_distribution(announced, club_size, env.club_sizes);
  Coordinator probe(F, env.club_sizes);
  double worst = 0.0;
  for (double v : interior_grid(F, 50)) {
    const double club = club_path_payment(probe, v, announced, club_size);
    const double stochastic = equilibrium_bid_mixture(v, model, F);
    const double gap = std::abs(club - stochastic);
    worst = std::max(worst, gap);
    if (!(gap <= kExactMargin)) {
      report.violations.push_back("payment identity at " + label("v", v) + " off by " + num(gap));
    }
  }
  report.rows.push_back({setting + " exact", "max_payment_gap", worst, 0.0, worst <= kExactMargin});

  auto make = [&] {
    return EquivalenceChunk{Coordinator(F, env.club_sizes),
                            CountSampler(env.club_sizes.counts()),
                            CountSampler(model),
                            std::vector<MeanAccumulator>(kBuckets),
                            std::vector<MeanAccumulator>(kBuckets),
                            std::vector<MeanAccumulator>(kBuckets),
                            0};
  };
  auto body = [&](EquivalenceChunk& chunk, std::size_t t) {
    const std::uint64_t s = trial_seed(options.seed, t);
    Rng values(s);
    Rng club_counts(trial_seed(s, 1));
    Rng model_counts(trial_seed(s, 2));
    const std::size_t bucket = t % kBuckets;
    const double q = (static_cast<double>(bucket) + uniform01(values)) / kBuckets;
    const double v = F.inverse_cdf(q);
    chunk.digest += draw_hash(v);

    int club_rivals = club_size - 1;
    for (int c = 1; c < announced; ++c) club_rivals += chunk.sizes(club_counts);
    const int model_rivals = chunk.baseline_counts(model_counts) - 1;

    // Rival valuations come from one shared stream in both scenarios.
    Rng stream_a = values;
    Rng stream_b = values;
    const double rival_a = max_value(club_rivals, F, stream_a);
    const double rival_b = max_value(model_rivals, F, stream_b);

    double ua = 0.0, ub = 0.0;
    if (v > rival_a) {
      const double main = chunk.coordinator.equilibrium_bid(v, announced, 1);
      const double total = club_size == 1
                               ? main
                               : main + (chunk.coordinator.equilibrium_bid(v, announced, club_size) - main);
      ua = v - total;
    }
    if (v > rival_b) ub = v - chunk.coordinator.equilibrium_bid(v, announced, club_size);
    chunk.club[bucket].add(ua);
    chunk.baseline[bucket].add(ub);
    chunk.difference[bucket].add(ua - ub);
  };
  auto merge = [](EquivalenceChunk& total, EquivalenceChunk& part) {
    for (std::size_t b = 0; b < kBuckets; ++b) {
      total.difference[b].merge(part.difference[b]);
      total.club[b].merge(part.club[b]);
      total.baseline[b].merge(part.baseline[b]);
    }
    total.digest += part.digest;
  };
  const EquivalenceChunk total = run_trials(options.trials, options.threads, make, body, merge);

  for (std::size_t b = 0; b < kBuckets; ++b) {
    const std::string scenario = setting + " decile=" + std::to_string(b + 1);
    report.rows.push_back({scenario, "utility_club", total.club[b].mean(),
                           total.club[b].standard_error(), true});
    report.rows.push_back({scenario, "utility_no_club", total.baseline[b].mean(),
                           total.baseline[b].standard_error(), true});
    const double d = total.difference[b].mean();
    const double se = total.difference[b].standard_error();
    const bool ok = std::abs(d) <= kSignificance * se;
    report.rows.push_back({scenario, "utility_difference", d, se, ok});
    if (!ok) {
      report.violations.push_back(scenario + " difference " + num(d) + " exceeds " +
                                  num(kSignificance) + " standard errors (" + num(se) + ")");
    }
  }
  report.notes.push_back("pairing: focal value digest " + hex(total.digest) +
                         " shared by both scenarios; rival valuations share one stream");
  report.notes.push_back("agent counts are drawn independently in each scenario");
  return report;
}

// ---------------------------------------------------------------------------
// Full protocol simulation

TrialRecord play_protocol(const EnvironmentConfig& env, Coordinator& coordinator,
                          std::size_t trial, std::uint64_t seed) {
  Rng rng(trial_seed(seed, trial));
  TrialRecord record;
  record.trial = trial;
  record.instance = sample_instance(env, rng);
  const std::uint64_t tie_seed = rng();
  const AuctionInstance& inst = record.instance;

  std::vector<ClubState> clubs;
  std::vector<AgentId> registrants;
  std::vector<AgentId> singletons;
  for (const Club& club : inst.clubs) {
    if (club.size() == 1) {
      registrants.push_back(club.members.front());
      singletons.push_back(club.members.front());
      continue;
    }
    ClubState& state = clubs.emplace_back(club.club_id, club.members);
    for (AgentId id : club.members) {
      const double v = inst.agents.at(id).value;
      state.record_response(id, {true, v});
      record.actions.push_back({id, "declare", v});
    }
    const auto forwarded = coordinator.registrants(state, trial_seed(tie_seed, club.club_id + 1));
    registrants.insert(registrants.end(), forwarded.begin(), forwarded.end());
  }

  auto bid_phase = [&](int announced) {
    std::vector<Bid> bids;
    for (ClubState& state : clubs) {
      const auto plan = coordinator.collect_and_register(
          state, announced, trial_seed(tie_seed, state.club_id() + 1));
      for (const Registration& r : plan.registrations) bids.push_back({r.agent, r.bid});
    }
    for (AgentId id : singletons) {
      const double b = coordinator.equilibrium_bid(inst.agents.at(id).value, announced, 1);
      bids.push_back({id, b});
      record.actions.push_back({id, "bid", b});
    }
    return bids;
  };
  RevelationResult result = run_participation_revelation(registrants, bid_phase, tie_seed);
  record.announced = result.announced;
  record.outcome = std::move(result.outcome);

  for (ClubState& state : clubs) {
    const Settlement s = coordinator.settle(state, record.outcome, record.announced);
    record.coordinator_revenue[state.club_id()] = s.coordinator_payment;
    if (s.paying_agent) record.outcome.transfers_to_coordinator[*s.paying_agent] = s.coordinator_payment;
  }
  for (const auto& [id, type] : inst.agents) record.utilities[id] = 0.0;
  const AgentId winner = *record.outcome.winner;
  record.utilities[winner] = inst.agents.at(winner).value - record.outcome.winner_payment();
  record.seller_revenue = record.outcome.transfers_to_center.at(winner);
  return record;
}

namespace {

struct RevenueChunk {
  explicit RevenueChunk(Coordinator c) : coordinator(std::move(c)) {}

  Coordinator coordinator;
  MeanAccumulator coordinator_revenue;
  MeanAccumulator seller_revenue;
  MeanAccumulator total_revenue;
  MeanAccumulator winner_utility;
  MeanAccumulator club_wins;
  double min_revenue = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> negative_trials;
  std::vector<std::size_t> inefficient_trials;
  std::vector<TrialRecord> traces;
};

}  // namespace

ExperimentReport revenue_accounting(const EnvironmentConfig& env, const ExperimentOptions& options,
                                    std::size_t trace_trials,
                                    const std::function<void(const TrialRecord&)>& trace) {
  require_env(env);
  if (options.trials < 10'000) {
    fail(ErrorKind::precondition_violation, "revenue accounting needs at least 10^4 trials");
  }

  auto make = [&] { return RevenueChunk(Coordinator(env.valuations, env.club_sizes)); };
  auto body = [&](RevenueChunk& chunk, std::size_t t) {
    TrialRecord rec = play_protocol(env, chunk.coordinator, t, options.seed);
    double revenue = 0.0;
    for (const auto& [club, r] : rec.coordinator_revenue) {
      if (r < 0.0) chunk.negative_trials.push_back(t);
      revenue += r;
      chunk.min_revenue = std::min(chunk.min_revenue, r);
    }
    chunk.coordinator_revenue.add(revenue);
    chunk.seller_revenue.add(rec.seller_revenue);
    chunk.total_revenue.add(rec.seller_revenue + revenue);
    const AgentId winner = *rec.outcome.winner;
    chunk.winner_utility.add(rec.utilities.at(winner));
    chunk.club_wins.add(rec.instance.agents.at(winner).signal.value_or(1) >= 2 ? 1.0 : 0.0);

    double top = -std::numeric_limits<double>::infinity();
    for (const auto& [id, type] : rec.instance.agents) top = std::max(top, type.value);
    if (rec.instance.agents.at(winner).value != top) chunk.inefficient_trials.push_back(t);
    if (t < trace_trials) chunk.traces.push_back(std::move(rec));
  };
  auto merge = [](RevenueChunk& total, RevenueChunk& part) {
    total.coordinator_revenue.merge(part.coordinator_revenue);
    total.seller_revenue.merge(part.seller_revenue);
    total.total_revenue.merge(part.total_revenue);
    total.winner_utility.merge(part.winner_utility);
    total.club_wins.merge(part.club_wins);
    total.min_revenue = std::min(total.min_revenue, part.min_revenue);
    total.negative_trials.insert(total.negative_trials.end(), part.negative_trials.begin(),
                                 part.negative_trials.end());
    total.inefficient_trials.insert(total.inefficient_trials.end(), part.inefficient_trials.begin(),
                                    part.inefficient_trials.end());
    for (auto& r : part.traces) total.traces.push_back(std::move(r));
  };
  const RevenueChunk total = run_trials(options.trials, options.threads, make, body, merge);
  if (trace) {
    for (const TrialRecord& r : total.traces) trace(r);
  }

  ExperimentReport report = make_report("revenue", options);
  const double mean = total.coordinator_revenue.mean();
  const double se = total.coordinator_revenue.standard_error();
  const bool positive = significant(mean, se);
  const bool solvent = total.negative_trials.empty();
  const double floor = std::isfinite(total.min_revenue) ? total.min_revenue : 0.0;
  report.rows.push_back({"protocol", "coordinator_revenue", mean, se, positive});
  report.rows.push_back({"protocol", "min_coordinator_revenue", floor, 0.0, solvent});
  report.rows.push_back({"protocol", "seller_revenue", total.seller_revenue.mean(),
                         total.seller_revenue.standard_error(), true});
  report.rows.push_back({"protocol", "total_revenue", total.total_revenue.mean(),
                         total.total_revenue.standard_error(), true});
  report.rows.push_back({"protocol", "winner_utility", total.winner_utility.mean(),
                         total.winner_utility.standard_error(), true});
  report.rows.push_back({"protocol", "club_member_wins", total.club_wins.mean(),
                         total.club_wins.standard_error(), true});
  report.rows.push_back({"protocol", "inefficient_allocations",
                         static_cast<double>(total.inefficient_trials.size()), 0.0,
                         total.inefficient_trials.empty()});

  if (!solvent) {
    report.violations.push_back("coordinator revenue negative in " +
                                std::to_string(total.negative_trials.size()) +
                                " trials, first at trial " +
                                std::to_string(total.negative_trials.front()));
  }
  if (!positive) {
    report.violations.push_back("mean coordinator revenue " + num(mean) + " is not above " +
                                num(kSignificance) + " standard errors (" + num(se) + ")");
  }
  if (!total.inefficient_trials.empty()) {
    report.violations.push_back("item not allocated to the highest valuation in " +
                                std::to_string(total.inefficient_trials.size()) + " trials");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact structural checks

ExperimentReport dominance_check(const EnvironmentConfig& env, int max_announced,
                                 const ExperimentOptions& options) {
  require_env(env);
  if (max_announced < 2) fail(ErrorKind::invalid_parameter, "max_announced must be >= 2");
  ExperimentReport report = make_report("dominance-check", options);
  report.trials = 0;
  report.notes.push_back("exact checks; no sampling");

  const auto grid = interior_grid(env.valuations, 50);
  for (int n = 2; n <= max_announced; ++n) {
    for (int k = 2; k <= env.club_sizes.kappa(); ++k) {
      const std::string scenario = "n=" + std::to_string(n) + " k=" + std::to_string(k);
      const CountDistribution member = compose_count_distribution(n, k, env.club_sizes);
      const CountDistribution single = compose_count_distribution(n, 1, env.club_sizes);
      const CountDistribution disbanded = compose_count_distribution(n + k - 1, 1, env.club_sizes);

      std::vector<DominancePair> pairs;
      const std::pair<const char*, DominancePair> checks[] = {
          {"disbanded_over_member", {member, disbanded}},
          {"disbanded_over_singleton", {single, disbanded}},
      };
      for (const auto& [name, pair] : checks) {
        const bool ok = dominates(pair.higher, pair.lower);
        report.rows.push_back({scenario, std::string("dominance_") + name, ok ? 1.0 : 0.0, 0.0, ok});
        if (ok) {
          pairs.push_back(pair);
        } else {
          report.violations.push_back(scenario + " " + name + " dominance fails");
        }
      }
      const auto bad = verify_dominance_monotonicity(env.valuations, pairs, grid);
      report.rows.push_back({scenario, "monotonicity_violations", static_cast<double>(bad.size()),
                             0.0, bad.empty()});
      for (const auto& b : bad) {
        report.violations.push_back(scenario + " bid order fails at " + label("v", b.value));
      }
    }
  }
  return report;
}

ExperimentReport false_name_experiment(const EnvironmentConfig& env, int club_size,
                                       std::span<const double> values,
                                       const ExperimentOptions& options) {
  require_env(env);
  std::vector<double> bids = even_grid(env.valuations.lower(), env.valuations.upper(), 256);
  bids.push_back(kAbstain);

  ExperimentReport report = make_report("equilibrium", options);
  report.notes.push_back("scenario: false-name; identity enforcement disabled");
  report.notes.push_back("deviator declares the support bottom to its coordinator and bids "
                         "directly under a second identity, best bid per announced count");
  for (double v : values) {
    const FalseNameResult r = false_name_deviation_scenario(v, club_size, env, bids, options.trials,
                                                            options.seed, options.threads);
    const std::string scenario = "false-name k=" + std::to_string(club_size) + " " + label("v", v);
    report.rows.push_back({scenario, "prescribed_utility", r.equilibrium_utility,
                           r.equilibrium_stderr, true});
    report.rows.push_back({scenario, "deviation_utility", r.deviation_utility, r.deviation_stderr,
                           true});
    const bool ok = !significant(r.gain, r.gain_stderr);
    report.rows.push_back({scenario, "gain", r.gain, r.gain_stderr, ok});
    if (!ok) {
      report.violations.push_back(scenario + " false-name deviation gains " + num(r.gain) +
                                  " (stderr " + num(r.gain_stderr) + ")");
    }
  }
  return report;
}

}  // namespace bidclub
