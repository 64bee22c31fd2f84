#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bafo/errors.hpp"
#include "bafo/info.hpp"
#include "bafo/model.hpp"
#include "bafo/parallel.hpp"

namespace bafo {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct SimulationResult {
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<Estimate> payoff;  // per type; zero for types of probability zero
  Estimate revenue;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0,1) from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline int sample_index(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  // Skip trailing zero-weight entries.
  int last = static_cast<int>(weights.size()) - 1;
  while (last > 0 && weights[static_cast<std::size_t>(last)] <= 0.0) --last;
  return last;
}

struct Welford {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  double se() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  }
};

struct TrialOutcome {
  std::vector<double> per_type;  // summed payoff of bidders of each type, divided by n
  double revenue = 0.0;
};

inline TrialOutcome play_once(const AuctionSpec& spec, const InformationStructure& structure,
                              const SymmetricStrategy& profile, std::mt19937_64& g) {
  const int n = spec.n();
  const int K = spec.num_types();
  std::vector<int> types(static_cast<std::size_t>(n));
  const auto& dist = spec.dist();
  if (dist.is_iid()) {
    for (auto& t : types) t = sample_index(dist.iid_probs(), uniform01(g));
  } else {
    std::vector<double> w(dist.profile_count());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = dist.profile_probability(c);
    dist.decode_profile(static_cast<std::size_t>(sample_index(w, uniform01(g))), types);
  }

  // Stage one; a random priority resolves ties uniformly.
  std::vector<int> b1(static_cast<std::size_t>(n));
  std::vector<int> all(static_cast<std::size_t>(spec.num_bids()), 0);
  for (int i = 0; i < n; ++i) {
    b1[static_cast<std::size_t>(i)] = profile.first[static_cast<std::size_t>(types[static_cast<std::size_t>(i)])];
    ++all[static_cast<std::size_t>(b1[static_cast<std::size_t>(i)])];
  }
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::vector<double> priority(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    idx[static_cast<std::size_t>(i)] = i;
    priority[static_cast<std::size_t>(i)] = uniform01(g);
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    if (b1[ua] != b1[ub]) return b1[ua] > b1[ub];
    if (priority[ua] != priority[ub]) return priority[ua] > priority[ub];
    return a < b;
  });
  const int f[2] = {idx[0], idx[1]};

  // Messages, drawn independently for each finalist.
  int b2[2];
  std::vector<std::pair<Signal, double>> msgs;
  std::vector<double> w;
  for (int j = 0; j < 2; ++j) {
    const int me = f[j];
    const int co = f[1 - j];
    structure.messages<double>(b1[static_cast<std::size_t>(me)], b1[static_cast<std::size_t>(co)], all, msgs);
    w.clear();
    for (const auto& m : msgs) w.push_back(m.second);
    const int pick = msgs.size() == 1 ? 0 : sample_index(w, uniform01(g));
    const int t = types[static_cast<std::size_t>(me)];
    b2[j] = profile.second_bid(spec, t, b1[static_cast<std::size_t>(me)], msgs[static_cast<std::size_t>(pick)].first);
  }
  int winner = b2[0] > b2[1] ? 0 : 1;
  if (b2[0] == b2[1]) winner = uniform01(g) < 0.5 ? 0 : 1;

  TrialOutcome out;
  out.per_type.assign(static_cast<std::size_t>(K), 0.0);
  const int wt = types[static_cast<std::size_t>(f[winner])];
  out.per_type[static_cast<std::size_t>(wt)] = (spec.value(wt) - spec.bid(b2[winner])) / n;
  out.revenue = spec.bid(b2[winner]);
  return out;
}

}  // namespace detail

/// Plays the game `trials` times. Trial t uses its own generator seeded from
/// (seed, t), so results do not depend on `jobs`. Per-type payoffs are
/// estimated as E[sum of type-k payoffs]/(n P(type k)).
inline SimulationResult simulate(const AuctionSpec& spec, const InformationStructure& structure,
                                 const SymmetricStrategy& profile, std::int64_t trials, std::uint64_t seed,
                                 int jobs = 1) {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  profile.validate(spec);
  constexpr std::int64_t kChunk = 4096;
  const auto chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  const auto parts = parallel_map(chunks, jobs, [&](std::size_t c) {
    std::vector<detail::TrialOutcome> out;
    const std::int64_t lo = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t hi = std::min(trials, lo + kChunk);
    for (std::int64_t t = lo; t < hi; ++t) {
      std::mt19937_64 g(detail::splitmix64(seed ^ detail::splitmix64(static_cast<std::uint64_t>(t))));
      out.push_back(detail::play_once(spec, structure, profile, g));
    }
    return out;
  });

  const int K = spec.num_types();
  std::vector<detail::Welford> per_type(static_cast<std::size_t>(K));
  detail::Welford revenue;
  for (const auto& part : parts) {
    for (const auto& o : part) {
      for (int k = 0; k < K; ++k) per_type[static_cast<std::size_t>(k)].add(o.per_type[static_cast<std::size_t>(k)]);
      revenue.add(o.revenue);
    }
  }
  SimulationResult r;
  r.trials = trials;
  r.seed = seed;
  for (int k = 0; k < K; ++k) {
    const double pk = spec.dist().type_marginal(spec.n(), k);
    const auto& acc = per_type[static_cast<std::size_t>(k)];
    if (pk <= 0.0) {
      r.payoff.push_back({});
      continue;
    }
    r.payoff.push_back({acc.mean / pk, acc.se() / pk});
  }
  r.revenue = {revenue.mean, revenue.se()};
  return r;
}

}  // namespace bafo
