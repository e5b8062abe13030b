#include "bidclub/environment.hpp"

#include "bidclub/error.hpp"

namespace bidclub {

void EnvironmentConfig::validate() const {
  if (coordinator_counts.pmf(0) > kPmfTolerance || coordinator_counts.pmf(1) > kPmfTolerance ||
      coordinator_counts.min_count() < 0) {
    fail(ErrorKind::config, "gamma_C must put zero mass on 0 and 1 coordinators");
  }
  if (club_sizes.pmf(1) >= 1.0 - kPmfTolerance) {
    fail(ErrorKind::config, "gamma_A(1) must be < 1");
  }
}

CountSampler::CountSampler(const CountDistribution& counts)
    : offset_(counts.min_count()),
      index_(counts.probabilities().begin(), counts.probabilities().end()) {}

int CountSampler::operator()(Rng& rng) { return offset_ + index_(rng); }

AuctionInstance sample_instance(const EnvironmentConfig& config, Rng& rng) {
  CountSampler coordinators(config.coordinator_counts);
  CountSampler sizes(config.club_sizes.counts());

  AuctionInstance instance;
  instance.n_potential_coordinators = coordinators(rng);
  AgentId next = 0;
  for (int c = 0; c < instance.n_potential_coordinators; ++c) {
    Club club{c, {}};
    const int size = sizes(rng);
    for (int m = 0; m < size; ++m) club.members.push_back(next++);
    instance.clubs.push_back(std::move(club));
  }
  for (const Club& club : instance.clubs) {
    for (AgentId id : club.members) {
      instance.agents[id] = {config.valuations.inverse_cdf(uniform01(rng)), club.size()};
    }
  }
  return instance;
}

AuctionInstance sample_instance(const EnvironmentConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return sample_instance(config, rng);
}

CountDistribution belief_distribution(int announced, int own_signal,
                                      const EnvironmentConfig& config) {
  return compose_count_distribution(announced, own_signal, config.club_sizes);
}

AuctionInstance baseline_stochastic_instance(const CountDistribution& counts,
                                             const ValuationDistribution& valuations, Rng& rng) {
  counts.require_auction_counts("baseline count model");
  CountSampler sampler(counts);
  AuctionInstance instance;
  instance.n_potential_coordinators = sampler(rng);
  for (AgentId id = 0; id < instance.n_potential_coordinators; ++id) {
    instance.clubs.push_back({id, {id}});
    instance.agents[id] = {valuations.inverse_cdf(uniform01(rng)), std::nullopt};
  }
  return instance;
}

AuctionInstance baseline_stochastic_instance(const CountDistribution& counts,
                                             const ValuationDistribution& valuations,
                                             std::uint64_t seed) {
  Rng rng(seed);
  return baseline_stochastic_instance(counts, valuations, rng);
}

}  // namespace bidclub
