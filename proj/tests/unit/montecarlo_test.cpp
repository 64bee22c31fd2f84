#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/instances.hpp"

using namespace bafo;
using IS = InformationStructure;

TEST(Simulate, SigmaStarHighTypePayoff) {
  const auto spec = testing_support::two_type_family(4, 0.5);
  const auto r = simulate(spec, IS::non_informative(), revenue_maximizing_profile(spec), 100000, 7);
  EXPECT_EQ(r.trials, 100000);
  EXPECT_EQ(r.seed, 7U);
  EXPECT_GT(r.payoff[1].se, 0.0);
  EXPECT_LE(std::fabs(r.payoff[1].mean - 0.09375), 4 * r.payoff[1].se);
}

TEST(Simulate, ConstantLowestBid) {
  const auto spec = testing_support::two_type_family(5, 0.3);
  const auto r = simulate(spec, IS::full_bids(), testing_support::constant_profile({0, 0}), 5000, 1);
  EXPECT_EQ(r.revenue.mean, 0.0);
  EXPECT_EQ(r.revenue.se, 0.0);
  const auto spec2 = testing_support::three_bid_spec(3);
  const auto r2 = simulate(spec2, IS::rank(), testing_support::constant_profile({0, 0}), 3000, 2);
  EXPECT_EQ(r2.revenue.mean, spec2.bid(0));
  EXPECT_EQ(r2.revenue.se, 0.0);
}

TEST(Simulate, Reproducible) {
  const auto spec = testing_support::two_type_family(6, 0.35);
  const auto sigma = revenue_maximizing_profile(spec);
  const auto a = simulate(spec, IS::opponent_bid(), sigma, 20000, 99, 1);
  const auto b = simulate(spec, IS::opponent_bid(), sigma, 20000, 99, 1);
  const auto c = simulate(spec, IS::opponent_bid(), sigma, 20000, 99, 3);
  for (const auto* x : {&b, &c}) {
    EXPECT_EQ(a.revenue.mean, x->revenue.mean);
    EXPECT_EQ(a.revenue.se, x->revenue.se);
    for (std::size_t k = 0; k < a.payoff.size(); ++k) {
      EXPECT_EQ(a.payoff[k].mean, x->payoff[k].mean);
      EXPECT_EQ(a.payoff[k].se, x->payoff[k].se);
    }
  }
  const auto d = simulate(spec, IS::opponent_bid(), sigma, 20000, 100, 1);
  EXPECT_NE(a.revenue.mean, d.revenue.mean);
}

TEST(Simulate, RejectsZeroTrials) {
  const auto spec = testing_support::two_type_family(4, 0.5);
  EXPECT_THROW(simulate(spec, IS::non_informative(), revenue_maximizing_profile(spec), 0, 1), ConfigError);
}

TEST(Simulate, AgreesWithEngine) {
  testing_support::Rng g(61);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = testing_support::random_spec(g, testing_support::uniform_int(g, 3, 6),
                                                   testing_support::uniform_int(g, 1, 3), 4);
    const auto profile = testing_support::random_profile(g, spec);
    const auto structure = testing_support::random_structure(g, spec);
    const auto r = simulate(spec, structure, profile, 40000, 1000 + static_cast<std::uint64_t>(trial));
    auto within = [](double exact, const Estimate& e) {
      return std::fabs(exact - e.mean) <= 4.5 * e.se + 1e-12;
    };
    EXPECT_TRUE(within(expected_revenue(spec, structure, profile), r.revenue)) << trial;
    for (int k = 0; k < spec.num_types(); ++k) {
      if (spec.dist().type_marginal(spec.n(), k) < 0.02) continue;
      EXPECT_TRUE(within(equilibrium_payoff(spec, structure, profile, k).expected_payoff,
                         r.payoff[static_cast<std::size_t>(k)]))
          << trial << " type " << k;
    }
  }
}

TEST(Splitmix, KnownValues) {
  // Reference outputs of the splitmix64 finalizer.
  EXPECT_EQ(detail::splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_NE(detail::splitmix64(1), detail::splitmix64(2));
}
