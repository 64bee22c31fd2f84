#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bafo {

enum class SignalKind : std::uint8_t {
  null,          // uninformative message (also what non-finalists receive)
  opponent_bid,  // the co-finalist's first-stage bid index
  all_bids,      // multiset of all n first-stage bids, as a per-bid count vector
  rank,          // own position among the two finalists
  custom,        // symbol of a garbled structure's finite alphabet
};

enum class RankMessage : int { strictly_first = 0, tied_first = 1, second = 2 };

/// Message a finalist receives between the two stages. The payload layout
/// depends on the kind; use the named constructors.
struct Signal {
  SignalKind kind = SignalKind::null;
  std::vector<int> payload;

  static Signal null() { return {}; }
  static Signal opponent_bid(int bid) { return {SignalKind::opponent_bid, {bid}}; }
  static Signal all_bids(std::vector<int> bid_counts) {
    return {SignalKind::all_bids, std::move(bid_counts)};
  }
  static Signal rank(RankMessage r) { return {SignalKind::rank, {static_cast<int>(r)}}; }
  static Signal custom(int symbol) { return {SignalKind::custom, {symbol}}; }

  friend auto operator<=>(const Signal&, const Signal&) = default;
  friend bool operator==(const Signal&, const Signal&) = default;
};

/// Co-finalist's first-stage bid when the message reveals it, given the
/// receiver's own first-stage bid.
inline std::optional<int> observed_co_bid(const Signal& s, int own_bid) {
  switch (s.kind) {
    case SignalKind::opponent_bid:
      return s.payload.at(0);
    case SignalKind::all_bids: {
      // The receiver is one of the top two; removing one copy of its own bid
      // leaves the co-finalist's bid as the maximum.
      for (int b = static_cast<int>(s.payload.size()) - 1; b >= 0; --b) {
        const int count = s.payload[static_cast<std::size_t>(b)] - (b == own_bid ? 1 : 0);
        if (count > 0) return b;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

inline std::string to_string(const Signal& s) {
  switch (s.kind) {
    case SignalKind::null:
      return "null";
    case SignalKind::opponent_bid:
      return "opponent_bid:" + std::to_string(s.payload.at(0));
    case SignalKind::all_bids: {
      std::string out = "all_bids:";
      for (std::size_t i = 0; i < s.payload.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s.payload[i]);
      }
      return out;
    }
    case SignalKind::rank: {
      static constexpr const char* kNames[] = {"strictly_first", "tied_first", "second"};
      return std::string("rank:") + kNames[s.payload.at(0)];
    }
    case SignalKind::custom:
      return "custom:" + std::to_string(s.payload.at(0));
  }
  return "?";
}

}  // namespace bafo
