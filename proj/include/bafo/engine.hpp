#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "bafo/dist.hpp"
#include "bafo/errors.hpp"
#include "bafo/info.hpp"
#include "bafo/model.hpp"
#include "bafo/signal.hpp"

namespace bafo {

struct SelectionOutcome {
  double probability = 0.0;
  int co_finalist_type = 0;
  int co_finalist_first_bid = 0;
};

/// Distribution of (co-finalist type, co-finalist bid) for a bidder of
/// `deviator_type` bidding `deviator_first_bid` against n-1 opponents playing
/// `profile`. The not-selected event carries the remaining mass.
inline std::vector<SelectionOutcome> selection_outcomes(const AuctionSpec& spec, const SymmetricStrategy& profile,
                                                        int deviator_type, int deviator_first_bid) {
  const int K = spec.num_types();
  const auto pmf = opponent_count_pmf(spec.dist(), spec.n(), deviator_type);
  std::map<std::pair<int, int>, double> acc;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const int* c = pmf.count_vector(i);
    const auto opp = detail::bid_counts_from_types(c, profile, spec.num_bids());
    const auto sel = select_against<double>(deviator_first_bid, opp);
    if (sel.probability <= 0.0) continue;
    const double at_co = opp[static_cast<std::size_t>(sel.co_bid)];
    for (int t = 0; t < K; ++t) {
      if (c[t] == 0 || profile.first[static_cast<std::size_t>(t)] != sel.co_bid) continue;
      acc[{t, sel.co_bid}] += pmf.probs[i] * sel.probability * c[t] / at_co;
    }
  }
  std::vector<SelectionOutcome> out;
  for (const auto& [key, p] : acc) out.push_back({p, key.first, key.second});
  return out;
}

/// E[1/(X+1)] for X ~ Binomial(m, p).
inline double expected_inverse_successors(int m, double p) {
  if (m < 0) throw DomainError("binomial size must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0,1]");
  if (m == 0 || p == 0.0) return 1.0;
  const double k = m + 1.0;
  return -std::expm1(k * std::log1p(-p)) / (k * p);
}

struct PayoffReport {
  double expected_payoff = 0.0;
  struct Term {
    int co_type = 0;
    int co_first_bid = 0;
    double contribution = 0.0;
  };
  std::vector<Term> decomposition;
};

namespace detail {

// Probability of winning at bid `mine` against a co-finalist bid distribution
// (mass per bid index); a tie is a coin flip.
inline double win_mass(const std::vector<double>& co, int mine) {
  double w = 0.5 * co[static_cast<std::size_t>(mine)];
  for (int b = 0; b < mine; ++b) w += co[static_cast<std::size_t>(b)];
  return w;
}

// Walks every realization of stage one and the messages for a bidder of
// `type` bidding `d`, calling f(weight, co_type, co_bid, own_signal,
// co_second_bid). Weights sum to P(selected).
template <class F>
void for_each_finalist_outcome(const AuctionSpec& spec, const InformationStructure& structure,
                               const SymmetricStrategy& profile, const CountVectorPMF& pmf, int d, F&& f) {
  const int K = spec.num_types();
  std::vector<int> opp(static_cast<std::size_t>(spec.num_bids()));
  std::vector<std::pair<Signal, double>> own_msgs;
  std::vector<std::pair<Signal, double>> co_msgs;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const double pi = pmf.probs[i];
    if (pi <= 0.0) continue;
    const int* c = pmf.count_vector(i);
    std::fill(opp.begin(), opp.end(), 0);
    for (int t = 0; t < K; ++t) opp[static_cast<std::size_t>(profile.first[static_cast<std::size_t>(t)])] += c[t];
    const auto sel = select_against<double>(d, opp);
    if (sel.probability <= 0.0) continue;
    const int cb = sel.co_bid;
    ++opp[static_cast<std::size_t>(d)];  // now counts all n bids
    structure.messages<double>(d, cb, opp, own_msgs);
    structure.messages<double>(cb, d, opp, co_msgs);
    --opp[static_cast<std::size_t>(d)];
    const double at_co = opp[static_cast<std::size_t>(cb)];
    for (int t = 0; t < K; ++t) {
      if (c[t] == 0 || profile.first[static_cast<std::size_t>(t)] != cb) continue;
      const double w = pi * sel.probability * c[t] / at_co;
      for (const auto& [cs, cq] : co_msgs) {
        const int cb2 = profile.second_bid(spec, t, cb, cs);
        for (const auto& [os, oq] : own_msgs) f(w * cq * oq, t, cb, os, cb2);
      }
    }
  }
}

// Expected payoff of a bidder of `type` who bids `d` and then follows `rule`.
inline PayoffReport follow_rule(const AuctionSpec& spec, const InformationStructure& structure,
                                const SymmetricStrategy& profile, const CountVectorPMF& pmf, int type, int d,
                                const SecondStageRule& rule) {
  const double v = spec.value(type);
  std::map<std::pair<int, int>, double> terms;
  double total = 0.0;
  for_each_finalist_outcome(spec, structure, profile, pmf, d, [&](double w, int t, int cb, const Signal& s, int cb2) {
    const int b2 = rule.apply(spec, type, d, s);
    const double win = b2 > cb2 ? 1.0 : b2 == cb2 ? 0.5 : 0.0;
    const double u = w * win * (v - spec.bid(b2));
    terms[{t, cb}] += u;
    total += u;
  });
  PayoffReport r;
  r.expected_payoff = total;
  for (const auto& [key, u] : terms) r.decomposition.push_back({key.first, key.second, u});
  return r;
}

struct FirstBidResponse {
  double payoff = 0.0;
  std::map<Signal, int> second;  // best second bid per realized signal
};

// Best pointwise second-stage response after first bid `d`.
inline FirstBidResponse best_second_stage(const AuctionSpec& spec, const InformationStructure& structure,
                                          const SymmetricStrategy& profile, const CountVectorPMF& pmf, int type,
                                          int d) {
  const int M = spec.num_bids();
  const double v = spec.value(type);
  std::map<Signal, std::vector<double>> buckets;
  for_each_finalist_outcome(spec, structure, profile, pmf, d, [&](double w, int, int, const Signal& s, int cb2) {
    auto it = buckets.find(s);
    if (it == buckets.end()) it = buckets.emplace(s, std::vector<double>(static_cast<std::size_t>(M), 0.0)).first;
    it->second[static_cast<std::size_t>(cb2)] += w;
  });
  FirstBidResponse r;
  for (const auto& [s, co] : buckets) {
    int best_bid = d;
    double best = (v - spec.bid(d)) * win_mass(co, d);
    for (int b = d + 1; b < M && spec.affordable(type, b); ++b) {
      const double u = (v - spec.bid(b)) * win_mass(co, b);
      if (u > best) {
        best = u;
        best_bid = b;
      }
    }
    r.payoff += best;
    r.second.emplace(s, best_bid);
  }
  return r;
}

inline void require_positive(const AuctionSpec& spec, int type) {
  if (type < 0 || type >= spec.num_types()) throw DomainError("type index out of range");
  if (spec.dist().type_marginal(spec.n(), type) <= 0.0) throw ConditioningError("type has probability zero");
}

}  // namespace detail

/// Expected payoff of a bidder of `type` when everyone plays `profile`.
inline PayoffReport equilibrium_payoff(const AuctionSpec& spec, const InformationStructure& structure,
                                       const SymmetricStrategy& profile, int type) {
  detail::require_positive(spec, type);
  const auto pmf = opponent_count_pmf(spec.dist(), spec.n(), type);
  return detail::follow_rule(spec, structure, profile, pmf, type, profile.first[static_cast<std::size_t>(type)],
                             profile.second[static_cast<std::size_t>(type)]);
}

/// Expected payoff of a single bidder of `type` who bids `first_bid` and then
/// follows `rule` while everyone else plays `profile`.
inline double deviation_payoff(const AuctionSpec& spec, const InformationStructure& structure,
                               const SymmetricStrategy& profile, int type, int first_bid,
                               const SecondStageRule& rule) {
  detail::require_positive(spec, type);
  if (first_bid < 0 || first_bid >= spec.num_bids()) throw DomainError("first bid index out of range");
  const auto pmf = opponent_count_pmf(spec.dist(), spec.n(), type);
  return detail::follow_rule(spec, structure, profile, pmf, type, first_bid, rule).expected_payoff;
}

struct BestDeviation {
  int first_bid = 0;
  SecondStageRule second;  // table rule; signals absent from it keep the first bid
  double payoff = 0.0;
  std::vector<std::pair<int, double>> per_first_bid;  // value of the best continuation per first bid
};

/// Optimal pure deviation of a single bidder of `type`: any first bid below
/// value and, per realized message, any second bid in [first bid, value).
/// Ties between first bids go to the lowest.
inline BestDeviation best_deviation(const AuctionSpec& spec, const InformationStructure& structure,
                                    const SymmetricStrategy& profile, int type) {
  detail::require_positive(spec, type);
  const auto pmf = opponent_count_pmf(spec.dist(), spec.n(), type);
  BestDeviation best;
  best.payoff = -std::numeric_limits<double>::infinity();
  for (int d = 0; d < spec.num_bids() && spec.affordable(type, d); ++d) {
    auto r = detail::best_second_stage(spec, structure, profile, pmf, type, d);
    best.per_first_bid.emplace_back(d, r.payoff);
    if (r.payoff > best.payoff) {
      best.payoff = r.payoff;
      best.first_bid = d;
      std::map<std::pair<int, Signal>, int> table;
      for (const auto& [s, b] : r.second) {
        if (b != d) table.emplace(std::make_pair(d, s), b);
      }
      best.second = SecondStageRule::from_table(std::move(table));
    }
  }
  if (best.per_first_bid.empty()) best.payoff = 0.0;  // no bid below value
  return best;
}

/// Expected winning second-stage bid when everyone plays `profile`.
inline double expected_revenue(const AuctionSpec& spec, const InformationStructure& structure,
                               const SymmetricStrategy& profile) {
  double revenue = 0.0;
  for (int k = 0; k < spec.num_types(); ++k) {
    const double pk = spec.dist().type_marginal(spec.n(), k);
    if (pk <= 0.0) continue;
    const auto pmf = opponent_count_pmf(spec.dist(), spec.n(), k);
    const int d = profile.first[static_cast<std::size_t>(k)];
    const auto& rule = profile.second[static_cast<std::size_t>(k)];
    double paid = 0.0;
    detail::for_each_finalist_outcome(spec, structure, profile, pmf, d,
                                      [&](double w, int, int, const Signal& s, int cb2) {
                                        const int b2 = rule.apply(spec, k, d, s);
                                        const double win = b2 > cb2 ? 1.0 : b2 == cb2 ? 0.5 : 0.0;
                                        paid += w * win * spec.bid(b2);
                                      });
    revenue += pk * paid;
  }
  return spec.n() * revenue;
}

}  // namespace bafo
