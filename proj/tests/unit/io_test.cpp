#include <gtest/gtest.h>

#include "bafo/io.hpp"
#include "support/fixtures.hpp"

using namespace bafo;
using bafo::io::json;

namespace {

json spec_doc() {
  return json::parse(R"({"n": 4, "values": ["0.3", 1], "bids": [0, 0.2, "0.4", 0.6, 0.8],
                         "dist": {"kind": "iid", "p": [0.5, 0.5]}})");
}

}  // namespace

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(io::format_number(0.0), "0");
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(0.09375), "0.09375");
  EXPECT_EQ(io::format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(io::format_number(38.0), "38");
  EXPECT_EQ(io::format_number(1e-20), "1e-20");
  EXPECT_DOUBLE_EQ(io::rounded(1.0 / 3.0), 0.333333333333);
  EXPECT_EQ(io::rounded(0.25), 0.25);
}

TEST(ParseSpec, ReadsDocument) {
  const auto spec = io::parse_spec(spec_doc());
  EXPECT_EQ(spec.n(), 4);
  EXPECT_EQ(spec.num_bids(), 5);
  EXPECT_EQ(spec.bids()[2], testing_support::dec("0.4"));
  EXPECT_EQ(spec.beta(1), 4);
  EXPECT_EQ(io::parse_spec(spec_doc(), 9).n(), 9);
}

TEST(ParseSpec, RejectsUnknownAndMissingFields) {
  auto doc = spec_doc();
  doc["extra"] = 1;
  EXPECT_THROW(io::parse_spec(doc), ConfigError);
  doc = spec_doc();
  doc.erase("bids");
  EXPECT_THROW(io::parse_spec(doc), ConfigError);
  doc = spec_doc();
  doc["dist"]["kind"] = "gaussian";
  EXPECT_THROW(io::parse_spec(doc), ConfigError);
  doc = spec_doc();
  doc["dist"]["q"] = 1;
  EXPECT_THROW(io::parse_spec(doc), ConfigError);
  doc = spec_doc();
  doc["values"] = json::array({"0.5", "1"});
  doc["bids"] = json::array({"0.6", "0.8"});
  EXPECT_THROW(io::parse_spec(doc), RichnessError);
}

TEST(ParseSpec, Tabular) {
  auto doc = spec_doc();
  doc["n"] = 3;
  doc["dist"] = json::parse(R"({"kind": "tabular", "n": 3, "table": [
      {"profile": [0, 0, 0], "prob": 0.4},
      {"profile": [0, 1, 1], "prob": 0.2}, {"profile": [1, 0, 1], "prob": 0.2}, {"profile": [1, 1, 0], "prob": 0.2}]})");
  const auto spec = io::parse_spec(doc);
  EXPECT_FALSE(spec.dist().is_iid());
  EXPECT_NEAR(spec.dist().type_marginal(3, 1), 0.4, 1e-15);
  doc["n"] = 4;
  EXPECT_THROW(io::parse_spec(doc), DomainError);
}

TEST(ParseStructure, NamesAndGarbled) {
  using K = InformationStructure::Kind;
  EXPECT_EQ(io::parse_structure(json("ni")).kind(), K::non_informative);
  EXPECT_EQ(io::parse_structure(json("full_bids")).kind(), K::full_bids);
  EXPECT_EQ(io::parse_structure(json::parse(R"({"kind":"opponent_bid"})")).kind(), K::opponent_bid);
  EXPECT_EQ(io::parse_structure_arg("rank").kind(), K::rank);
  const auto g = io::parse_structure_arg(R"({"kind":"garbled","base":"rank","kernel":{"matrix":[[1,0],[0.5,0.5],[0,1]]}})");
  EXPECT_EQ(g.kind(), K::garbled);
  EXPECT_EQ(g.base().kind(), K::rank);
  EXPECT_EQ(g.kernel().symbols(), 2);
  EXPECT_THROW(io::parse_structure(json("psychic")), ConfigError);
  EXPECT_THROW(io::parse_structure(json::parse(R"({"kind":"rank","kernel":{"constant":[1]}})")), ConfigError);
  EXPECT_THROW(io::parse_structure(json::parse(R"({"kind":"garbled","base":"rank","kernel":{}})")), ConfigError);
  EXPECT_THROW(io::parse_structure_arg("{not json"), ConfigError);
}

TEST(ParseProfile, AmountsAndRules) {
  const auto spec = io::parse_spec(spec_doc());
  const auto s = io::parse_profile(json::parse(R"({"first":[0.2, "0.4"], "second":["stay", {"raise_to":0.6}]})"), spec);
  EXPECT_EQ(s.first, (std::vector<int>{1, 2}));
  EXPECT_EQ(s.second[1], SecondStageRule::raise_to(3));
  const auto t = io::parse_profile(json::parse(R"({"first":[0, 0.8]})"), spec);
  EXPECT_EQ(t.second[0], SecondStageRule::stay());
  EXPECT_THROW(io::parse_profile(json::parse(R"({"first":[0.1, 0.8]})"), spec), ConfigError);
  EXPECT_THROW(io::parse_profile(json::parse(R"({"first":[0.4, 0.8]})"), spec), DomainError);
  EXPECT_THROW(io::parse_profile(json::parse(R"({"first":[0, 0.8], "second":["dance","stay"]})"), spec), ConfigError);
}

TEST(Emitters, CertificateAndThreshold) {
  const auto spec = testing_support::two_type_family(4, 0.5);
  const auto c = is_equilibrium(spec, InformationStructure::non_informative(), revenue_maximizing_profile(spec));
  const auto j = io::certificate_json(spec, InformationStructure::non_informative(), c);
  EXPECT_EQ(j.at("verdict"), "equilibrium");
  EXPECT_EQ(j.dump(), io::certificate_json(spec, InformationStructure::non_informative(), c).dump());
  const auto t = threshold_n([](int n) { return testing_support::two_type_family(n, 0.5); },
                             InformationStructure::non_informative(), 30);
  const auto tj = io::threshold_json(t);
  EXPECT_EQ(tj.at("N"), 4);
  EXPECT_EQ(tj.at("verified_range"), json::array({4, 30}));
}

TEST(Emitters, GridCsvHeader) {
  const auto r = uniqueness_grid_search({4, 4}, {4, 4}, {{0.25, 0.3}});
  const auto csv = io::grid_rows_csv(r);
  EXPECT_EQ(csv.rfind("M,n,p,v1,structure,profile,verdict,revenue_maximizing\n", 0), 0U);
  EXPECT_NE(csv.find("4,4,0.25,0.3,non_informative,"), std::string::npos);
  EXPECT_EQ(io::grid_rows_csv(uniqueness_grid_search({4, 4}, {4, 4}, {})),
            "M,n,p,v1,structure,profile,verdict,revenue_maximizing\n");
}
