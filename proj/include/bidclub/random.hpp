#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <thread>
#include <vector>

namespace bidclub {

using Rng = std::mt19937_64;

/// Seed for trial `index` of a run seeded with `master` (splitmix64 mix).
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Trials per work unit. Results are merged unit by unit in index order, so
/// aggregates do not depend on the number of threads.
inline constexpr std::size_t kTrialsPerChunk = 4096;

inline unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `trials` independent trials. `make` builds per-chunk state (and its
/// accumulator); `body(state, trial_index)` runs one trial; `merge(total,
/// state)` folds chunk results in chunk order.
template <typename Make, typename Body, typename Merge>
auto run_trials(std::size_t trials, unsigned threads, Make make, Body body, Merge merge) {
  using State = decltype(make());
  const std::size_t chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  const std::size_t workers =
      std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(chunks, 1));

  auto work = [&](State& state, std::size_t c) {
    const std::size_t begin = c * kTrialsPerChunk;
    const std::size_t end = std::min(trials, begin + kTrialsPerChunk);
    for (std::size_t t = begin; t < end; ++t) body(state, t);
  };

  State total = make();
  // Chunks run in waves of `workers`; each wave is merged in index order
  // before the next starts, which bounds memory to one state per worker.
  for (std::size_t first = 0; first < chunks; first += workers) {
    const std::size_t count = std::min(workers, chunks - first);
    std::vector<State> wave;
    wave.reserve(count);
    for (std::size_t i = 0; i < count; ++i) wave.push_back(make());
    if (count == 1) {
      work(wave[0], first);
    } else {
      std::vector<std::exception_ptr> errors(count);
      std::vector<std::thread> pool;
      pool.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        pool.emplace_back([&, i] {
          try {
            work(wave[i], first + i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (auto& state : wave) merge(total, state);
  }
  return total;
}

}  // namespace bidclub
