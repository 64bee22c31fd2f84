#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bafo/decimal.hpp"
#include "bafo/dist.hpp"
#include "bafo/errors.hpp"
#include "bafo/signal.hpp"

namespace bafo {

/// Validated auction parameters: bidder count, type values, bid grid, type
/// distribution and the β-bid of every type. Immutable once built.
class AuctionSpec {
 public:
  int n() const { return n_; }
  int num_types() const { return static_cast<int>(values_.size()); }
  int num_bids() const { return static_cast<int>(bids_.size()); }

  const std::vector<Decimal>& values() const { return values_; }
  const std::vector<Decimal>& bids() const { return bids_; }
  double value(int type) const { return value_d_[static_cast<std::size_t>(type)]; }
  double bid(int index) const { return bid_d_[static_cast<std::size_t>(index)]; }

  /// Index of the highest allowable bid strictly below the type's value.
  int beta(int type) const { return beta_[static_cast<std::size_t>(type)]; }
  const std::vector<int>& betas() const { return beta_; }

  /// Bid index `b` is strictly below the value of `type`.
  bool affordable(int type, int b) const { return bids_[static_cast<std::size_t>(b)] < values_[static_cast<std::size_t>(type)]; }

  const JointTypeDistribution& dist() const { return dist_; }

  /// Index of a grid bid given its exact amount; throws DomainError if the
  /// amount is not on the grid.
  int bid_index(Decimal amount) const {
    auto it = std::lower_bound(bids_.begin(), bids_.end(), amount);
    if (it == bids_.end() || *it != amount) throw DomainError("bid " + amount.str() + " is not on the grid");
    return static_cast<int>(it - bids_.begin());
  }

  AuctionSpec with_bidders(int n) const;
  AuctionSpec with_dist(JointTypeDistribution dist) const;

 private:
  friend AuctionSpec build_auction_spec(int, std::vector<Decimal>, std::vector<Decimal>, JointTypeDistribution);

  AuctionSpec(int n, std::vector<Decimal> values, std::vector<Decimal> bids, JointTypeDistribution dist)
      : n_(n), values_(std::move(values)), bids_(std::move(bids)), dist_(std::move(dist)) {}

  int n_ = 0;
  std::vector<Decimal> values_;
  std::vector<Decimal> bids_;
  std::vector<double> value_d_;
  std::vector<double> bid_d_;
  std::vector<int> beta_;
  JointTypeDistribution dist_;
};

inline AuctionSpec build_auction_spec(int n, std::vector<Decimal> values, std::vector<Decimal> bids,
                                      JointTypeDistribution dist) {
  if (values.empty()) throw DomainError("type grid is empty");
  if (bids.size() < 2) throw DomainError("bid grid needs at least two bids");
  if (n < 3) throw DomainError("need at least three bidders, got n=" + std::to_string(n));
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i - 1] < values[i])) throw OrderingError("type values must be strictly ascending");
  }
  for (std::size_t i = 1; i < bids.size(); ++i) {
    if (!(bids[i - 1] < bids[i])) throw OrderingError("bids must be strictly ascending");
  }
  if (values.front() < Decimal{} || bids.front() < Decimal{}) throw DomainError("values and bids must be nonnegative");
  if (dist.num_types() != static_cast<int>(values.size())) {
    throw DomainError("distribution has " + std::to_string(dist.num_types()) + " types but the grid has " +
                      std::to_string(values.size()));
  }
  dist.require_bidders(n);

  AuctionSpec spec(n, std::move(values), std::move(bids), std::move(dist));
  for (const auto& v : spec.values_) spec.value_d_.push_back(v.to_double());
  for (const auto& b : spec.bids_) spec.bid_d_.push_back(b.to_double());
  for (std::size_t j = 0; j < spec.values_.size(); ++j) {
    // Richness: some bid lies strictly between the previous value and this one.
    auto below = std::lower_bound(spec.bids_.begin(), spec.bids_.end(), spec.values_[j]);
    if (below == spec.bids_.begin()) {
      throw RichnessError("no bid strictly below value " + spec.values_[j].str());
    }
    const int beta = static_cast<int>(below - spec.bids_.begin()) - 1;
    if (j > 0 && !(spec.values_[j - 1] < spec.bids_[static_cast<std::size_t>(beta)])) {
      throw RichnessError("no bid strictly between " + spec.values_[j - 1].str() + " and " + spec.values_[j].str());
    }
    spec.beta_.push_back(beta);
  }
  return spec;
}

inline AuctionSpec AuctionSpec::with_bidders(int n) const { return build_auction_spec(n, values_, bids_, dist_); }

inline AuctionSpec AuctionSpec::with_dist(JointTypeDistribution dist) const {
  return build_auction_spec(n_, values_, bids_, std::move(dist));
}

/// Second-stage behavior of one type, as a function of its own first bid
/// and the received message. Every rule is total and never lowers the bid.
struct SecondStageRule {
  enum class Kind { stay, raise_to, overtake, jump_to_beta, table };

  Kind kind = Kind::stay;
  int target = 0;                              // raise_to
  std::map<std::pair<int, Signal>, int> table;  // (own first bid, signal) -> bid; missing keys stay

  static SecondStageRule stay() { return {}; }
  static SecondStageRule raise_to(int bid) { return {Kind::raise_to, bid, {}}; }
  /// Bid one grid step above the observed co-finalist bid when that stays
  /// below value; otherwise keep the current bid.
  static SecondStageRule overtake() { return {Kind::overtake, 0, {}}; }
  /// Move to β when the co-finalist bid at least as much in stage one.
  static SecondStageRule jump_to_beta() { return {Kind::jump_to_beta, 0, {}}; }
  static SecondStageRule from_table(std::map<std::pair<int, Signal>, int> entries) {
    return {Kind::table, 0, std::move(entries)};
  }

  int apply(const AuctionSpec& spec, int type, int b1, const Signal& signal) const {
    switch (kind) {
      case Kind::stay:
        return b1;
      case Kind::raise_to:
        return std::max(b1, target);
      case Kind::overtake: {
        const auto co = observed_co_bid(signal, b1);
        if (!co || *co < b1) return b1;
        const int next = *co + 1;
        if (next < spec.num_bids() && spec.affordable(type, next)) return std::max(b1, next);
        return b1;
      }
      case Kind::jump_to_beta: {
        const auto co = observed_co_bid(signal, b1);
        if (co && *co >= b1) return std::max(b1, spec.beta(type));
        return b1;
      }
      case Kind::table: {
        auto it = table.find({b1, signal});
        return it == table.end() ? b1 : std::max(b1, it->second);
      }
    }
    return b1;
  }

  friend bool operator==(const SecondStageRule&, const SecondStageRule&) = default;
};

inline std::string to_string(SecondStageRule::Kind k) {
  switch (k) {
    case SecondStageRule::Kind::stay:
      return "stay";
    case SecondStageRule::Kind::raise_to:
      return "raise_to";
    case SecondStageRule::Kind::overtake:
      return "overtake";
    case SecondStageRule::Kind::jump_to_beta:
      return "jump_to_beta";
    case SecondStageRule::Kind::table:
      return "table";
  }
  return "?";
}

/// Pure symmetric two-stage strategy: a first bid per type and a second-stage
/// rule per type.
struct SymmetricStrategy {
  std::vector<int> first;
  std::vector<SecondStageRule> second;

  int second_bid(const AuctionSpec& spec, int type, int b1, const Signal& s) const {
    return second[static_cast<std::size_t>(type)].apply(spec, type, b1, s);
  }

  /// Checks totality and the never-bid-at-or-above-value restriction.
  void validate(const AuctionSpec& spec) const {
    const auto K = static_cast<std::size_t>(spec.num_types());
    if (first.size() != K || second.size() != K) throw DomainError("strategy must cover every type");
    for (int k = 0; k < spec.num_types(); ++k) {
      const int b = first[static_cast<std::size_t>(k)];
      if (b < 0 || b >= spec.num_bids()) throw DomainError("first bid index out of range");
      if (!spec.affordable(k, b)) {
        throw DomainError("type " + std::to_string(k) + " bids at or above its value in stage one");
      }
      const auto& rule = second[static_cast<std::size_t>(k)];
      if (rule.kind == SecondStageRule::Kind::raise_to) {
        if (rule.target < 0 || rule.target >= spec.num_bids() || !spec.affordable(k, rule.target)) {
          throw DomainError("raise_to target must be an allowable bid below value");
        }
      }
      if (rule.kind == SecondStageRule::Kind::table) {
        for (const auto& [key, b2] : rule.table) {
          if (b2 < key.first) throw DomainError("second-stage bid below first-stage bid");
          if (b2 >= spec.num_bids() || !spec.affordable(k, b2)) {
            throw DomainError("second-stage bid at or above value");
          }
        }
      }
    }
  }

  friend bool operator==(const SymmetricStrategy&, const SymmetricStrategy&) = default;
};

/// Σ*: every type bids its β in stage one and max(b1, β) in stage two,
/// whatever the message.
inline SymmetricStrategy revenue_maximizing_profile(const AuctionSpec& spec) {
  SymmetricStrategy s;
  for (int k = 0; k < spec.num_types(); ++k) {
    s.first.push_back(spec.beta(k));
    s.second.push_back(SecondStageRule::raise_to(spec.beta(k)));
  }
  return s;
}

inline bool is_revenue_maximizing(const AuctionSpec& spec, const SymmetricStrategy& s) {
  for (int k = 0; k < spec.num_types(); ++k) {
    if (s.first[static_cast<std::size_t>(k)] != spec.beta(k)) return false;
  }
  return true;
}

/// Compact human-readable identifier, e.g. "0.2>stay|0.8>raise_to:0.8".
inline std::string describe(const AuctionSpec& spec, const SymmetricStrategy& s) {
  std::string out;
  for (int k = 0; k < spec.num_types(); ++k) {
    if (k) out += '|';
    out += spec.bids()[static_cast<std::size_t>(s.first[static_cast<std::size_t>(k)])].str();
    out += '>';
    const auto& rule = s.second[static_cast<std::size_t>(k)];
    out += to_string(rule.kind);
    if (rule.kind == SecondStageRule::Kind::raise_to) {
      out += ':' + spec.bids()[static_cast<std::size_t>(rule.target)].str();
    }
  }
  return out;
}

}  // namespace bafo
