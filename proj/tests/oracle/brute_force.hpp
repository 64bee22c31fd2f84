#pragma once

// Reference implementation by full enumeration: every type profile, every
// admissible pair of finalists and every pair of messages. Slow by design;
// shares only the data types with the library.

#include <cstddef>
#include <vector>

#include "bafo/info.hpp"
#include "bafo/model.hpp"

namespace oracle {

using bafo::AuctionSpec;
using bafo::InformationStructure;
using bafo::SecondStageRule;
using bafo::Signal;
using bafo::SymmetricStrategy;

inline void profiles(int n, int K, std::vector<std::vector<int>>& out) {
  std::vector<int> t(static_cast<std::size_t>(n), 0);
  for (;;) {
    out.push_back(t);
    int i = n - 1;
    while (i >= 0 && ++t[static_cast<std::size_t>(i)] == K) t[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
  }
}

inline double profile_prob(const AuctionSpec& spec, const std::vector<int>& t) {
  if (spec.dist().is_iid()) {
    double p = 1.0;
    for (int k : t) p *= spec.dist().iid_probs()[static_cast<std::size_t>(k)];
    return p;
  }
  return spec.dist().profile_probability(t);
}

// Message distribution to a finalist, built from the definition of each kind.
inline std::vector<std::pair<Signal, double>> messages(const InformationStructure& s, int own, int co,
                                                       const std::vector<int>& bids, int num_bids) {
  using K = InformationStructure::Kind;
  switch (s.kind()) {
    case K::non_informative:
      return {{Signal::null(), 1.0}};
    case K::opponent_bid:
      return {{Signal::opponent_bid(co), 1.0}};
    case K::full_bids: {
      std::vector<int> counts(static_cast<std::size_t>(num_bids), 0);
      for (int b : bids) ++counts[static_cast<std::size_t>(b)];
      return {{Signal::all_bids(counts), 1.0}};
    }
    case K::rank: {
      auto r = own > co ? bafo::RankMessage::strictly_first
                        : own == co ? bafo::RankMessage::tied_first : bafo::RankMessage::second;
      return {{Signal::rank(r), 1.0}};
    }
    case K::garbled: {
      std::vector<std::pair<Signal, double>> out;
      for (const auto& [base, p] : messages(s.base(), own, co, bids, num_bids)) {
        const auto row = s.kernel().row(base, own);
        for (std::size_t j = 0; j < row.size(); ++j) {
          if (row[j] > 0.0) out.emplace_back(Signal::custom(static_cast<int>(j)), p * row[j]);
        }
      }
      return out;
    }
  }
  return {};
}

struct Totals {
  double focal_payoff = 0.0;  // bidder 0, conditional on its type
  double revenue = 0.0;
};

// Bidder 0 has type `type`, bids `d` and follows `rule`; everyone else plays
// `profile`. With `type` < 0 every bidder plays `profile` and only revenue is
// meaningful.
inline Totals evaluate(const AuctionSpec& spec, const InformationStructure& structure,
                       const SymmetricStrategy& profile, int type, int d, const SecondStageRule& rule) {
  const int n = spec.n();
  std::vector<std::vector<int>> all;
  profiles(n, spec.num_types(), all);
  Totals t;
  double mass = 0.0;
  for (const auto& types : all) {
    if (type >= 0 && types[0] != type) continue;
    const double pt = profile_prob(spec, types);
    if (pt <= 0.0) continue;
    mass += pt;
    std::vector<int> b1(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) b1[static_cast<std::size_t>(i)] = profile.first[static_cast<std::size_t>(types[static_cast<std::size_t>(i)])];
    if (type >= 0) b1[0] = d;

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int lo = std::min(b1[static_cast<std::size_t>(i)], b1[static_cast<std::size_t>(j)]);
        bool ok = true;
        for (int l = 0; l < n; ++l) {
          if (l != i && l != j && b1[static_cast<std::size_t>(l)] > lo) ok = false;
        }
        if (ok) pairs.emplace_back(i, j);
      }
    }
    const double pair_p = 1.0 / static_cast<double>(pairs.size());
    for (const auto& [i, j] : pairs) {
      const int bi = b1[static_cast<std::size_t>(i)];
      const int bj = b1[static_cast<std::size_t>(j)];
      const auto mi = messages(structure, bi, bj, b1, spec.num_bids());
      const auto mj = messages(structure, bj, bi, b1, spec.num_bids());
      auto second = [&](int who, const Signal& s) {
        const int k = types[static_cast<std::size_t>(who)];
        const int b = b1[static_cast<std::size_t>(who)];
        if (type >= 0 && who == 0) return rule.apply(spec, k, b, s);
        return profile.second_bid(spec, k, b, s);
      };
      for (const auto& [si, qi] : mi) {
        for (const auto& [sj, qj] : mj) {
          const double w = pt * pair_p * qi * qj;
          const int ci = second(i, si);
          const int cj = second(j, sj);
          const double win_i = ci > cj ? 1.0 : ci == cj ? 0.5 : 0.0;
          t.revenue += w * (win_i * spec.bid(ci) + (1.0 - win_i) * spec.bid(cj));
          if (type >= 0 && i == 0) t.focal_payoff += w * win_i * (spec.value(type) - spec.bid(ci));
        }
      }
    }
  }
  if (type >= 0 && mass > 0.0) t.focal_payoff /= mass;
  return t;
}

inline double payoff(const AuctionSpec& spec, const InformationStructure& structure, const SymmetricStrategy& profile,
                     int type, int d, const SecondStageRule& rule) {
  return evaluate(spec, structure, profile, type, d, rule).focal_payoff;
}

inline double revenue(const AuctionSpec& spec, const InformationStructure& structure,
                      const SymmetricStrategy& profile) {
  return evaluate(spec, structure, profile, -1, 0, SecondStageRule::stay()).revenue;
}

}  // namespace oracle
