#pragma once

#include <string>
#include <vector>

#include "bafo/bafo.hpp"

namespace testing_support {

inline bafo::Decimal dec(const char* s) { return bafo::Decimal::parse(s); }

// V = {0.3, 1}, B = {0, 0.2, 0.4, 0.6, 0.8}, high type with probability p.
inline bafo::AuctionSpec two_type_family(int n, double p) {
  return bafo::build_auction_spec(n, {dec("0.3"), dec("1")},
                                  {dec("0"), dec("0.2"), dec("0.4"), dec("0.6"), dec("0.8")},
                                  bafo::JointTypeDistribution::iid({1.0 - p, p}));
}

// V = {0.01, 1}, B = {0, 0.33, 0.66, 0.99}, high type with probability 0.01.
inline bafo::AuctionSpec three_bid_spec(int n) {
  return bafo::build_auction_spec(n, {dec("0.01"), dec("1")}, {dec("0"), dec("0.33"), dec("0.66"), dec("0.99")},
                                  bafo::JointTypeDistribution::iid({0.99, 0.01}));
}

inline bafo::SymmetricStrategy constant_profile(std::vector<int> first) {
  bafo::SymmetricStrategy s;
  s.first = std::move(first);
  s.second.assign(s.first.size(), bafo::SecondStageRule::stay());
  return s;
}

}  // namespace testing_support
