#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bafo/decimal.hpp"
#include "bafo/dist.hpp"
#include "bafo/engine.hpp"
#include "bafo/equilibrium.hpp"
#include "bafo/errors.hpp"
#include "bafo/info.hpp"
#include "bafo/model.hpp"
#include "bafo/montecarlo.hpp"

namespace bafo::io {

using json = nlohmann::json;

/// Shortest decimal that reads back as `x`, capped at 12 significant digits.
inline std::string format_number(double x) {
  if (x == 0.0) return "0";
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  for (int prec = 1; prec <= 12; ++prec) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, prec);
    double back = 0.0;
    std::from_chars(buf, end, back);
    if (back == x || prec == 12) return std::string(buf, end);
  }
  return {};
}

/// `x` rounded to what format_number prints, for JSON emission.
inline double rounded(double x) {
  if (!std::isfinite(x)) return x;
  const auto s = format_number(x);
  double back = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), back);
  return back;
}

namespace detail {

inline void only_fields(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError("unknown field '" + key + "' in " + what);
  }
}

inline const json& required(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + " is missing '" + key + "'");
  return j.at(key);
}

inline Decimal decimal_of(const json& j) {
  if (j.is_string()) return Decimal::parse(j.get<std::string>());
  if (j.is_number_integer()) return Decimal::from_scaled(j.get<std::int64_t>() * Decimal::kScale);
  if (j.is_number()) return Decimal::parse(json(j.get<double>()).dump());
  throw ConfigError("expected a number or a numeric string");
}

inline double double_of(const json& j) {
  if (j.is_string()) return Decimal::parse(j.get<std::string>()).to_double();
  if (j.is_number()) return j.get<double>();
  throw ConfigError("expected a number");
}

inline std::vector<double> doubles_of(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(double_of(e));
  return out;
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(what + " is not valid JSON: " + e.what());
  }
}

/// {"kind":"iid","p":[...]} or
/// {"kind":"tabular","n":3,"table":[{"profile":[0,1,1],"prob":0.25}, ...]}
/// where profiles list 0-based type indices.
inline JointTypeDistribution parse_dist(const json& j, int num_types) {
  detail::only_fields(j, {"kind", "p", "n", "table"}, "dist");
  const auto kind = detail::required(j, "kind", "dist").get<std::string>();
  if (kind == "iid") {
    auto p = detail::doubles_of(detail::required(j, "p", "dist"));
    return JointTypeDistribution::iid(std::move(p));
  }
  if (kind == "tabular") {
    const int n = detail::required(j, "n", "dist").get<int>();
    std::vector<std::pair<std::vector<int>, double>> entries;
    for (const auto& e : detail::required(j, "table", "dist")) {
      detail::only_fields(e, {"profile", "prob"}, "tabular entry");
      entries.emplace_back(detail::required(e, "profile", "tabular entry").get<std::vector<int>>(),
                           detail::double_of(detail::required(e, "prob", "tabular entry")));
    }
    return JointTypeDistribution::tabular(n, num_types, entries);
  }
  throw ConfigError("unknown dist kind '" + kind + "'");
}

/// Spec document: {"n", "values", "bids", "dist"}. `n_override` replaces n.
inline AuctionSpec parse_spec(const json& j, std::optional<int> n_override = std::nullopt) {
  detail::only_fields(j, {"n", "values", "bids", "dist"}, "spec");
  std::vector<Decimal> values;
  std::vector<Decimal> bids;
  for (const auto& v : detail::required(j, "values", "spec")) values.push_back(detail::decimal_of(v));
  for (const auto& b : detail::required(j, "bids", "spec")) bids.push_back(detail::decimal_of(b));
  int n = 0;
  if (n_override) {
    n = *n_override;
  } else {
    n = detail::required(j, "n", "spec").get<int>();
  }
  auto dist = parse_dist(detail::required(j, "dist", "spec"), static_cast<int>(values.size()));
  return build_auction_spec(n, std::move(values), std::move(bids), std::move(dist));
}

inline InformationStructure parse_structure(const json& j);

namespace detail {

inline GarblingKernel parse_kernel(const json& j) {
  only_fields(j, {"constant", "matrix", "by_bid"}, "kernel");
  if (j.size() != 1) throw ConfigError("kernel needs exactly one of constant, matrix, by_bid");
  if (j.contains("constant")) return GarblingKernel::constant(doubles_of(j.at("constant")));
  auto matrix_of = [](const json& m) {
    std::vector<std::vector<double>> out;
    if (!m.is_array()) throw ConfigError("kernel matrix must be an array of rows");
    for (const auto& row : m) out.push_back(doubles_of(row));
    return out;
  };
  if (j.contains("matrix")) return GarblingKernel::dense(matrix_of(j.at("matrix")));
  // One dense matrix per own first bid.
  std::vector<GarblingKernel> per_bid;
  for (const auto& m : j.at("by_bid")) per_bid.push_back(GarblingKernel::dense(matrix_of(m)));
  if (per_bid.empty()) throw ConfigError("by_bid kernel has no matrices");
  const int symbols = per_bid.front().symbols();
  for (const auto& k : per_bid) {
    if (k.symbols() != symbols) throw ConfigError("by_bid matrices disagree on the alphabet size");
  }
  return GarblingKernel::function(symbols, [per_bid](const Signal& base, int own) {
    if (own < 0 || own >= static_cast<int>(per_bid.size())) throw DomainError("by_bid kernel has no matrix for this bid");
    return per_bid[static_cast<std::size_t>(own)].row(base, own);
  });
}

}  // namespace detail

/// Structure descriptor: a kind name ("non_informative", "full_bids",
/// "opponent_bid", "rank"), or an object {"kind": ...} where garbled
/// structures add "base" and "kernel".
inline InformationStructure parse_structure(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "non_informative" || name == "ni") return InformationStructure::non_informative();
    if (name == "full_bids" || name == "fi") return InformationStructure::full_bids();
    if (name == "opponent_bid") return InformationStructure::opponent_bid();
    if (name == "rank") return InformationStructure::rank();
    throw ConfigError("unknown structure '" + name + "'");
  }
  detail::only_fields(j, {"kind", "base", "kernel"}, "structure");
  const auto kind = detail::required(j, "kind", "structure").get<std::string>();
  if (kind != "garbled") {
    if (j.contains("base") || j.contains("kernel")) throw ConfigError("only garbled structures take base/kernel");
    return parse_structure(json(kind));
  }
  return InformationStructure::garbled(parse_structure(detail::required(j, "base", "structure")),
                                       detail::parse_kernel(detail::required(j, "kernel", "structure")));
}

/// Command-line form: a kind name, inline JSON, or a path to a JSON file.
inline InformationStructure parse_structure_arg(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '"')) return parse_structure(parse_json(arg, "structure"));
  std::ifstream probe(arg);
  if (probe) return parse_structure(parse_json(read_file(arg), arg));
  return parse_structure(json(arg));
}

inline SecondStageRule parse_rule(const json& j, const AuctionSpec& spec) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "stay") return SecondStageRule::stay();
    if (name == "overtake") return SecondStageRule::overtake();
    if (name == "jump_to_beta") return SecondStageRule::jump_to_beta();
    throw ConfigError("unknown second-stage rule '" + name + "'");
  }
  detail::only_fields(j, {"raise_to"}, "second-stage rule");
  return SecondStageRule::raise_to(spec.bid_index(detail::decimal_of(detail::required(j, "raise_to", "rule"))));
}

/// {"first": [bid per type], "second": [rule per type]}; bids are amounts.
/// A missing "second" means every type keeps its bid.
inline SymmetricStrategy parse_profile(const json& j, const AuctionSpec& spec) {
  detail::only_fields(j, {"first", "second"}, "profile");
  SymmetricStrategy s;
  try {
    for (const auto& b : detail::required(j, "first", "profile")) s.first.push_back(spec.bid_index(detail::decimal_of(b)));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("second")) {
    for (const auto& r : j.at("second")) s.second.push_back(parse_rule(r, spec));
  } else {
    s.second.assign(s.first.size(), SecondStageRule::stay());
  }
  s.validate(spec);
  return s;
}

inline json rule_json(const AuctionSpec& spec, int type, const SecondStageRule& rule) {
  switch (rule.kind) {
    case SecondStageRule::Kind::raise_to:
      return {{"raise_to", rounded(spec.bid(rule.target))}};
    case SecondStageRule::Kind::table: {
      json entries = json::array();
      for (const auto& [key, b2] : rule.table) {
        entries.push_back({{"first_bid", rounded(spec.bid(key.first))},
                           {"signal", to_string(key.second)},
                           {"second_bid", rounded(spec.bid(b2))}});
      }
      (void)type;
      return {{"table", entries}};
    }
    default:
      return to_string(rule.kind);
  }
}

inline json profile_json(const AuctionSpec& spec, const SymmetricStrategy& s) {
  json first = json::array();
  json second = json::array();
  for (int k = 0; k < spec.num_types(); ++k) {
    first.push_back(rounded(spec.bid(s.first[static_cast<std::size_t>(k)])));
    second.push_back(rule_json(spec, k, s.second[static_cast<std::size_t>(k)]));
  }
  return {{"first", first}, {"second", second}, {"id", describe(spec, s)}};
}

inline json certificate_json(const AuctionSpec& spec, const InformationStructure& structure,
                             const EquilibriumCertificate& c) {
  json per_type = json::array();
  for (const auto& t : c.per_type) {
    json e = {{"type", t.type}, {"value", rounded(spec.value(t.type))}};
    if (t.skipped) {
      e["skipped"] = true;
    } else {
      e["equilibrium_payoff"] = rounded(t.equilibrium_payoff);
      e["best_deviation_payoff"] = rounded(t.deviation.payoff);
      e["witness"] = {{"first_bid", rounded(spec.bid(t.deviation.first_bid))},
                      {"second", rule_json(spec, t.type, t.deviation.second)}};
      e["holds"] = t.holds;
    }
    per_type.push_back(e);
  }
  return {{"n", spec.n()},
          {"structure", structure.name()},
          {"profile", profile_json(spec, c.profile)},
          {"per_type", per_type},
          {"verdict", c.equilibrium ? "equilibrium" : "refuted"}};
}

inline json threshold_json(const ThresholdResult& r) {
  return {{"structure", r.structure},
          {"N", r.N},
          {"verified_range", {r.N, r.n_max}},
          {"monotone", r.monotone}};
}

inline json enumeration_json(const AuctionSpec& spec, const InformationStructure& structure,
                             const EnumerationReport& r) {
  json eq = json::array();
  for (const auto& c : r.equilibria) eq.push_back(certificate_json(spec, structure, c));
  return {{"n", spec.n()},
          {"structure", structure.name()},
          {"family", r.family},
          {"candidate_count", r.candidate_count},
          {"equilibria", eq},
          {"revenue_maximizing_unique", sigma_star_unique(spec, r)}};
}

inline json simulation_json(const SimulationResult& r) {
  json payoff = json::array();
  for (const auto& e : r.payoff) payoff.push_back({{"mean", rounded(e.mean)}, {"se", rounded(e.se)}});
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"payoff", payoff},
          {"revenue", {{"mean", rounded(r.revenue.mean)}, {"se", rounded(r.revenue.se)}}}};
}

inline json comparison_json(const ComparisonResult& r) {
  json out = {{"comparable", r.comparable}, {"residual", rounded(r.residual)}, {"exact", r.exact}};
  if (r.witness) {
    json blocks = json::array();
    for (const auto& [own, blk] : r.witness->by_own_bid) {
      json from = json::array();
      json to = json::array();
      json m = json::array();
      for (const auto& s : blk.from) from.push_back(to_string(s));
      for (const auto& s : blk.to) to.push_back(to_string(s));
      for (const auto& row : blk.matrix) {
        json jr = json::array();
        for (double x : row) jr.push_back(rounded(x));
        m.push_back(jr);
      }
      blocks.push_back({{"own_bid", own}, {"from", from}, {"to", to}, {"matrix", m}});
    }
    out["witness"] = blocks;
  }
  return out;
}

inline std::string grid_rows_csv(const GridReport& r) {
  std::string out = "M,n,p,v1,structure,profile,verdict,revenue_maximizing\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.M) + ',' + std::to_string(row.n) + ',' + format_number(row.p) + ',' +
           format_number(row.v1) + ',' + row.structure + ',' + row.profile + ',' +
           (row.equilibrium ? "equilibrium" : "refuted") + ',' + (row.revenue_maximizing ? "1" : "0") + '\n';
  }
  return out;
}

inline std::string grid_cells_csv(const GridReport& r) {
  std::string out = "M,n,p,v1,ni_equilibria,fi_equilibria,unique_ni,unique_fi,counterexample,error\n";
  for (const auto& c : r.cells) {
    out += std::to_string(c.M) + ',' + std::to_string(c.n) + ',' + format_number(c.p) + ',' + format_number(c.v1) +
           ',' + std::to_string(c.ni_equilibria) + ',' + std::to_string(c.fi_equilibria) + ',' +
           (c.unique_ni ? "1" : "0") + ',' + (c.unique_fi ? "1" : "0") + ',' + (c.counterexample ? "1" : "0") + ',' +
           c.error + '\n';
  }
  return out;
}

}  // namespace bafo::io
