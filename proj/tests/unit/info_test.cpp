#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "support/instances.hpp"

using namespace bafo;
using IS = InformationStructure;

namespace {

double mass_of(const SignalDistribution& d, const Signal& s) {
  double m = 0.0;
  for (const auto& [sig, p] : d) {
    if (sig == s) m += p;
  }
  return m;
}

}  // namespace

TEST(SelectAgainst, Cases) {
  // Two opponents above: out.
  EXPECT_EQ(select_against<double>(1, {0, 0, 2}).probability, 0.0);
  // One above, two tied: share the remaining seat.
  auto s = select_against<double>(1, {0, 2, 1});
  EXPECT_DOUBLE_EQ(s.probability, 1.0 / 3.0);
  EXPECT_EQ(s.co_bid, 2);
  // Tied at the top with three others: two of four seats.
  s = select_against<double>(1, {1, 3, 0});
  EXPECT_DOUBLE_EQ(s.probability, 0.5);
  EXPECT_EQ(s.co_bid, 1);
  // Strict top: co-finalist is the best of the rest.
  s = select_against<double>(2, {2, 1, 0});
  EXPECT_DOUBLE_EQ(s.probability, 1.0);
  EXPECT_EQ(s.co_bid, 1);
}

TEST(SignalDistribution, NonInformativeIsNull) {
  const auto spec = testing_support::two_type_family(4, 0.3);
  const auto d = signal_distribution(IS::non_informative(), spec, revenue_maximizing_profile(spec), 1, 2);
  ASSERT_EQ(d.size(), 1U);
  EXPECT_EQ(d[0].first, Signal::null());
  EXPECT_DOUBLE_EQ(d[0].second, 1.0);
}

TEST(SignalDistribution, OpponentBidUnderSigmaStar) {
  const double p = 0.5;
  const auto spec = testing_support::two_type_family(3, p);
  const auto d = signal_distribution(IS::opponent_bid(), spec, revenue_maximizing_profile(spec), 1, 4);
  // X other highs ~ Bin(2, p). X=0: selected, co at 0.2. X=1: two at the top,
  // both selected. X=2: two of three.
  const double q0 = (1 - p) * (1 - p);
  const double q1 = 2 * p * (1 - p);
  const double q2 = p * p;
  const double selected = q0 + q1 + q2 * 2.0 / 3.0;
  EXPECT_NEAR(mass_of(d, Signal::opponent_bid(1)), q0 / selected, 1e-15);
  EXPECT_NEAR(mass_of(d, Signal::opponent_bid(4)), 1.0 - q0 / selected, 1e-15);
}

TEST(SignalDistribution, RankWhenEveryoneBidsTheSame) {
  const auto spec = testing_support::two_type_family(5, 0.4);
  const auto s = testing_support::constant_profile({1, 1});
  const auto d = signal_distribution(IS::rank(), spec, s, 1, 1);
  ASSERT_EQ(d.size(), 1U);
  EXPECT_EQ(d[0].first, Signal::rank(RankMessage::tied_first));
}

TEST(SignalDistribution, NeverSelected) {
  // All opponents are high and bid 0.8 against a deviator at 0.
  const auto spec = build_auction_spec(4, {testing_support::dec("0.3"), testing_support::dec("1")},
                                       {testing_support::dec("0"), testing_support::dec("0.8")},
                                       JointTypeDistribution::iid({0.0, 1.0}));
  EXPECT_THROW(signal_distribution(IS::full_bids(), spec, revenue_maximizing_profile(spec), 1, 0), ConditioningError);
}

TEST(GarblingKernel, RejectsBadRows) {
  EXPECT_THROW(GarblingKernel::constant({0.5, 0.6}), DomainError);
  EXPECT_THROW(GarblingKernel::dense({{1.0}, {0.5, 0.5}}), DomainError);
  EXPECT_THROW(GarblingKernel::dense({{-0.5, 1.5}}), DomainError);
  const auto k = GarblingKernel::function(2, [](const Signal&, int) { return std::vector<double>{0.7, 0.7}; });
  EXPECT_THROW(k.row(Signal::null(), 0), DomainError);
}

TEST(IsNonInformative, TaggedKinds) {
  const auto spec = testing_support::two_type_family(4, 0.5);
  EXPECT_TRUE(is_non_informative(IS::non_informative(), spec).non_informative);
  const auto fb = is_non_informative(IS::full_bids(), spec);
  EXPECT_FALSE(fb.non_informative);
  ASSERT_TRUE(fb.witness.has_value());
  EXPECT_EQ(fb.witness->profile_a.size(), 3U);
  EXPECT_NE(fb.witness->profile_a, fb.witness->profile_b);
  EXPECT_FALSE(is_non_informative(IS::opponent_bid(), spec).non_informative);
  EXPECT_FALSE(is_non_informative(IS::rank(), spec).non_informative);
}

TEST(IsNonInformative, WitnessReallyDiffers) {
  const auto spec = testing_support::two_type_family(4, 0.5);
  for (const auto& s : {IS::full_bids(), IS::opponent_bid(), IS::rank()}) {
    const auto r = is_non_informative(s, spec);
    ASSERT_TRUE(r.witness);
    auto counts = [&](const std::vector<int>& prof) {
      std::vector<int> c(static_cast<std::size_t>(spec.num_bids()), 0);
      for (int b : prof) ++c[static_cast<std::size_t>(b)];
      return c;
    };
    const auto a = detail::conditional_messages<double>(s, r.witness->own_bid, counts(r.witness->profile_a));
    const auto b = detail::conditional_messages<double>(s, r.witness->own_bid, counts(r.witness->profile_b));
    ASSERT_FALSE(a.empty());
    ASSERT_FALSE(b.empty());
    EXPECT_FALSE(detail::same_distribution(a, b, 1e-12)) << s.name();
  }
}

TEST(IsNonInformative, GarbledKinds) {
  const auto spec = testing_support::two_type_family(4, 0.5);
  EXPECT_TRUE(is_non_informative(IS::garbled(IS::full_bids(), GarblingKernel::constant({0.3, 0.7})), spec).non_informative);
  // Depends on the base message only through the own bid: still uninformative.
  const auto own_only = GarblingKernel::function(2, [](const Signal&, int own) {
    return own % 2 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.25, 0.75};
  });
  EXPECT_TRUE(is_non_informative(IS::garbled(IS::full_bids(), own_only), spec).non_informative);
  const auto noisy = IS::garbled(IS::opponent_bid(), GarblingKernel::dense({{0.9, 0.1}, {0.8, 0.2}, {0.5, 0.5},
                                                                            {0.5, 0.5}, {0.5, 0.5}}));
  const auto r = is_non_informative(noisy, spec);
  EXPECT_FALSE(r.non_informative);
  EXPECT_TRUE(r.witness.has_value());
}

TEST(IsNonInformative, BudgetExceeded) {
  const auto spec = testing_support::two_type_family(60, 0.5);
  const auto noisy = IS::garbled(IS::full_bids(), testing_support::hashed_kernel(3, 2));
  EXPECT_THROW(is_non_informative(noisy, spec, 1000), ComplexityError);
}

TEST(MoreInformative, SpecExamples) {
  const auto spec = testing_support::two_type_family(3, 0.5);
  const auto sigma = revenue_maximizing_profile(spec);
  const auto fi_ni = more_informative(IS::full_bids(), IS::non_informative(), spec, sigma);
  EXPECT_TRUE(fi_ni.comparable);
  EXPECT_LE(fi_ni.residual, kGarblingTolerance);
  ASSERT_TRUE(fi_ni.witness);
  EXPECT_LE(garbling_residual(IS::full_bids(), IS::non_informative(), spec, sigma, *fi_ni.witness), 1e-9);

  const auto fi_ob = more_informative(IS::full_bids(), IS::opponent_bid(), spec, sigma);
  EXPECT_TRUE(fi_ob.comparable);
  ASSERT_TRUE(fi_ob.witness);
  EXPECT_LE(garbling_residual(IS::full_bids(), IS::opponent_bid(), spec, sigma, *fi_ob.witness), 1e-9);

  const auto ni_fi = more_informative(IS::non_informative(), IS::full_bids(), spec, sigma);
  EXPECT_FALSE(ni_fi.comparable);
  EXPECT_GT(ni_fi.residual, kGarblingTolerance);
  EXPECT_FALSE(is_non_informative(IS::full_bids(), spec).non_informative);
}

TEST(MoreInformative, OpponentBidAndRank) {
  const auto spec = testing_support::two_type_family(4, 0.4);
  const auto s = testing_support::constant_profile({1, 3});
  EXPECT_TRUE(more_informative(IS::opponent_bid(), IS::rank(), spec, s).comparable);
  EXPECT_FALSE(more_informative(IS::rank(), IS::opponent_bid(), spec, s).comparable);
}

TEST(MoreInformativeProperties, IdentityTransitivityAndNonInformativeBottom) {
  testing_support::Rng g(23);
  int transitive_checks = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int M = testing_support::uniform_int(g, 2, 4);
    const int K = testing_support::uniform_int(g, 1, std::min(M, 3));
    const auto spec = testing_support::random_spec(g, testing_support::uniform_int(g, 3, 5), K, M);
    const auto profile = testing_support::random_profile(g, spec, true);
    std::vector<IS> pool;
    for (int i = 0; i < 3; ++i) pool.push_back(testing_support::random_structure(g, spec));
    pool.push_back(IS::non_informative());
    pool.push_back(IS::full_bids());

    for (const auto& a : pool) {
      const auto self = more_informative(a, a, spec, profile);
      EXPECT_TRUE(self.comparable) << a.name();
      if (self.witness) {
        EXPECT_LE(garbling_residual(a, a, spec, profile, *self.witness), 1e-9);
      }
    }
    for (const auto& s : pool) {
      if (!is_non_informative(s, spec).non_informative) continue;
      for (const auto& t : pool) EXPECT_TRUE(more_informative(t, s, spec, profile).comparable) << t.name() << " vs " << s.name();
    }
    for (const auto& a : pool) {
      for (const auto& b : pool) {
        const auto ab = more_informative(a, b, spec, profile);
        if (!ab.comparable) continue;
        for (const auto& c : pool) {
          const auto bc = more_informative(b, c, spec, profile);
          if (!bc.comparable) continue;
          ++transitive_checks;
          EXPECT_TRUE(more_informative(a, c, spec, profile).comparable);
          ASSERT_TRUE(ab.witness && bc.witness);
          EXPECT_LE(garbling_residual(a, c, spec, profile, compose(*ab.witness, *bc.witness)), 2e-9);
        }
      }
    }
  }
  EXPECT_GT(transitive_checks, 100);
}

TEST(MoreInformativeProperties, BaseDominatesItsGarbling) {
  testing_support::Rng g(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = testing_support::random_spec(g, 4, 2, 3);
    const auto profile = testing_support::random_profile(g, spec, true);
    const auto garbled = IS::garbled(IS::full_bids(), testing_support::hashed_kernel(g(), 3));
    EXPECT_TRUE(more_informative(IS::full_bids(), garbled, spec, profile).comparable);
  }
}
