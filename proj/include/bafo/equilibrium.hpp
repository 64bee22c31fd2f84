#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bafo/decimal.hpp"
#include "bafo/dist.hpp"
#include "bafo/engine.hpp"
#include "bafo/errors.hpp"
#include "bafo/info.hpp"
#include "bafo/model.hpp"
#include "bafo/parallel.hpp"

namespace bafo {

/// A deviation is profitable only if it beats the equilibrium payoff by more
/// than this.
inline constexpr double kEquilibriumTolerance = 1e-9;

struct TypeCertificate {
  int type = 0;
  bool skipped = false;  // type has probability zero
  double equilibrium_payoff = 0.0;
  BestDeviation deviation;
  bool holds = true;
};

struct EquilibriumCertificate {
  SymmetricStrategy profile;
  std::vector<TypeCertificate> per_type;
  bool equilibrium = true;
};

/// Exact check of `profile` against every pure deviation of every type.
/// With `stop_early`, types after the first refuted one are left out.
inline EquilibriumCertificate is_equilibrium(const AuctionSpec& spec, const InformationStructure& structure,
                                             const SymmetricStrategy& profile, bool stop_early = false) {
  profile.validate(spec);
  EquilibriumCertificate cert;
  cert.profile = profile;
  for (int k = 0; k < spec.num_types(); ++k) {
    TypeCertificate tc;
    tc.type = k;
    if (spec.dist().type_marginal(spec.n(), k) <= 0.0) {
      tc.skipped = true;
      cert.per_type.push_back(std::move(tc));
      continue;
    }
    tc.equilibrium_payoff = equilibrium_payoff(spec, structure, profile, k).expected_payoff;
    tc.deviation = best_deviation(spec, structure, profile, k);
    tc.holds = tc.deviation.payoff <= tc.equilibrium_payoff + kEquilibriumTolerance;
    cert.equilibrium = cert.equilibrium && tc.holds;
    cert.per_type.push_back(std::move(tc));
    if (stop_early && !cert.equilibrium) break;
  }
  return cert;
}

using SpecFamily = std::function<AuctionSpec(int n)>;

struct ThresholdResult {
  std::string structure;
  int N = 0;
  int n_max = 0;
  bool monotone = true;
  std::vector<std::pair<int, bool>> verdicts;  // Σ* verdict for n = 3..n_max
};

/// Smallest N such that Σ* is an equilibrium for every n in [N, n_max].
/// Throws NotFound when Σ* fails at n_max.
inline ThresholdResult threshold_n(const SpecFamily& family, const InformationStructure& structure, int n_max) {
  if (n_max < 3) throw DomainError("n_max must be at least 3");
  ThresholdResult r;
  r.structure = structure.name();
  r.n_max = n_max;
  for (int n = 3; n <= n_max; ++n) {
    const auto spec = family(n);
    const bool ok = is_equilibrium(spec, structure, revenue_maximizing_profile(spec), true).equilibrium;
    r.verdicts.emplace_back(n, ok);
  }
  if (!r.verdicts.back().second) {
    throw NotFound("revenue-maximizing profile is not an equilibrium at n=" + std::to_string(n_max));
  }
  std::size_t i = r.verdicts.size();
  while (i > 0 && r.verdicts[i - 1].second) --i;
  r.N = r.verdicts[i].first;
  // Monotone: failures only below N.
  for (std::size_t j = 0; j < i; ++j) r.monotone = r.monotone && !r.verdicts[j].second;
  return r;
}

struct EnumerationReport {
  std::vector<EquilibriumCertificate> equilibria;
  std::size_t candidate_count = 0;
  std::string family;
};

inline constexpr std::size_t kEnumerationBudget = 10'000'000;

namespace detail {

// Affordable first bids per type.
inline std::vector<std::vector<int>> first_bid_choices(const AuctionSpec& spec) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(spec.num_types()));
  for (int k = 0; k < spec.num_types(); ++k) {
    for (int b = 0; b < spec.num_bids() && spec.affordable(k, b); ++b) out[static_cast<std::size_t>(k)].push_back(b);
  }
  return out;
}

template <class F>
void for_each_product(const std::vector<std::size_t>& sizes, F&& f) {
  std::vector<std::size_t> idx(sizes.size(), 0);
  for (std::size_t s : sizes) {
    if (s == 0) return;
  }
  for (;;) {
    f(idx);
    std::size_t pos = 0;
    while (pos < sizes.size() && ++idx[pos] == sizes[pos]) idx[pos++] = 0;
    if (pos == sizes.size()) return;
  }
}

}  // namespace detail

/// All pure symmetric equilibria of the non-informative auction. Second
/// stages are constant (bid unchanged), which loses nothing without
/// information.
inline EnumerationReport enumerate_equilibria_ni(const AuctionSpec& spec, int jobs = 1,
                                                 std::size_t budget = kEnumerationBudget) {
  const auto choices = detail::first_bid_choices(spec);
  double total = 1.0;
  for (const auto& c : choices) total *= static_cast<double>(c.size());
  if (total > static_cast<double>(budget)) {
    throw ComplexityError("non-informative enumeration has " + std::to_string(total) + " candidates");
  }
  std::vector<std::size_t> sizes;
  for (const auto& c : choices) sizes.push_back(c.size());
  std::vector<SymmetricStrategy> candidates;
  detail::for_each_product(sizes, [&](const std::vector<std::size_t>& idx) {
    SymmetricStrategy s;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      s.first.push_back(choices[k][idx[k]]);
      s.second.push_back(SecondStageRule::stay());
    }
    candidates.push_back(std::move(s));
  });
  const auto ni = InformationStructure::non_informative();
  auto certs = parallel_map(candidates.size(), jobs, [&](std::size_t i) {
    return std::optional<EquilibriumCertificate>(is_equilibrium(spec, ni, candidates[i]));
  });
  EnumerationReport r;
  r.candidate_count = candidates.size();
  r.family = "first bid below value per type; second bid equal to first";
  for (auto& c : certs) {
    if (c->equilibrium) r.equilibria.push_back(std::move(*c));
  }
  return r;
}

/// Second-stage templates tried for every type by the informative enumerator.
inline std::vector<SecondStageRule> canonical_templates() {
  return {SecondStageRule::stay(), SecondStageRule::overtake(), SecondStageRule::jump_to_beta()};
}

/// Pure symmetric equilibria within the template family under an
/// informative structure. Each candidate is checked against unrestricted
/// deviations, so listed profiles are equilibria; completeness holds only
/// relative to the templates. When a type's first bid is already its β,
/// only the first template is kept since the others cannot move it.
inline EnumerationReport enumerate_equilibria_fi(const AuctionSpec& spec, const InformationStructure& structure,
                                                 int jobs = 1,
                                                 const std::vector<SecondStageRule>& templates = canonical_templates(),
                                                 std::size_t budget = kEnumerationBudget) {
  using Kind = InformationStructure::Kind;
  if (structure.kind() != Kind::full_bids && structure.kind() != Kind::opponent_bid) {
    throw DomainError("informative enumeration needs full_bids or opponent_bid, got " + structure.name());
  }
  if (templates.empty()) throw DomainError("no second-stage templates");
  const auto choices = detail::first_bid_choices(spec);
  // Per type: (first bid, template) pairs.
  std::vector<std::vector<std::pair<int, std::size_t>>> options(choices.size());
  double total = 1.0;
  for (std::size_t k = 0; k < choices.size(); ++k) {
    for (int b : choices[k]) {
      const bool at_beta = b == spec.beta(static_cast<int>(k));
      for (std::size_t t = 0; t < (at_beta ? 1 : templates.size()); ++t) options[k].emplace_back(b, t);
    }
    total *= static_cast<double>(options[k].size());
  }
  if (total > static_cast<double>(budget)) {
    throw ComplexityError("informative enumeration has " + std::to_string(total) + " candidates");
  }
  std::vector<std::size_t> sizes;
  for (const auto& o : options) sizes.push_back(o.size());
  std::vector<SymmetricStrategy> candidates;
  detail::for_each_product(sizes, [&](const std::vector<std::size_t>& idx) {
    SymmetricStrategy s;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& [b, t] = options[k][idx[k]];
      s.first.push_back(b);
      s.second.push_back(templates[t]);
    }
    candidates.push_back(std::move(s));
  });
  auto certs = parallel_map(candidates.size(), jobs, [&](std::size_t i) {
    return std::optional<EquilibriumCertificate>(is_equilibrium(spec, structure, candidates[i]));
  });
  EnumerationReport r;
  r.candidate_count = candidates.size();
  r.family = "first bid below value per type; second stage from {";
  for (std::size_t t = 0; t < templates.size(); ++t) r.family += (t ? ", " : "") + to_string(templates[t].kind);
  r.family += "}; complete only within this family";
  for (auto& c : certs) {
    if (c->equilibrium) r.equilibria.push_back(std::move(*c));
  }
  return r;
}

/// True when the report is non-empty and every listed equilibrium has every
/// type bidding its β in stage one.
inline bool sigma_star_unique(const AuctionSpec& spec, const EnumerationReport& r) {
  if (r.equilibria.empty()) return false;
  for (const auto& e : r.equilibria) {
    if (!is_revenue_maximizing(spec, e.profile)) return false;
  }
  return true;
}

struct GridPoint {
  double p = 0.0;   // probability of the high type
  double v1 = 0.0;  // value of the low type
};

/// Evenly spaced points covering [p_lo,p_hi] x [v_lo,v_hi], `per_axis`
/// values on each axis (one point sits at the lower corner).
inline std::vector<GridPoint> rectangular_grid(int per_axis, double p_lo, double p_hi, double v_lo, double v_hi) {
  std::vector<GridPoint> out;
  if (per_axis <= 0) return out;
  for (int i = 0; i < per_axis; ++i) {
    for (int j = 0; j < per_axis; ++j) {
      const double fp = per_axis == 1 ? 0.0 : static_cast<double>(i) / (per_axis - 1);
      const double fv = per_axis == 1 ? 0.0 : static_cast<double>(j) / (per_axis - 1);
      out.push_back({p_lo + fp * (p_hi - p_lo), v_lo + fv * (v_hi - v_lo)});
    }
  }
  return out;
}

/// Two types {v1, 1} with the high type drawn with probability p, and bids
/// {0, 1/M, ..., (M-1)/M}.
inline AuctionSpec grid_spec(int M, int n, double p, double v1) {
  std::vector<Decimal> bids;
  for (int k = 0; k < M; ++k) bids.push_back(Decimal::from_scaled(Decimal::kScale * k / M));
  return build_auction_spec(n, {Decimal::from_double(v1), Decimal::from_double(1.0)}, std::move(bids),
                            JointTypeDistribution::iid({1.0 - p, p}));
}

struct GridRow {
  int M = 0;
  int n = 0;
  double p = 0.0;
  double v1 = 0.0;
  std::string structure;
  std::string profile;
  bool equilibrium = false;
  bool revenue_maximizing = false;
};

struct GridCell {
  int M = 0;
  int n = 0;
  double p = 0.0;
  double v1 = 0.0;
  std::size_t ni_equilibria = 0;
  std::size_t fi_equilibria = 0;
  bool unique_ni = false;
  bool unique_fi = false;
  bool counterexample = false;  // unique with information, not without
  std::string error;            // set when the spec cannot be built
};

struct GridReport {
  std::vector<GridCell> cells;
  std::vector<GridRow> rows;
  std::size_t counterexamples = 0;
};

/// Uniqueness of Σ* with and without information over every (M, n, point).
/// Informative runs use the all-bids structure.
inline GridReport uniqueness_grid_search(std::pair<int, int> M_range, std::pair<int, int> n_range,
                                         const std::vector<GridPoint>& points, int jobs = 1) {
  struct Task {
    int M, n;
    GridPoint pt;
  };
  std::vector<Task> tasks;
  for (int M = M_range.first; M <= M_range.second; ++M) {
    for (int n = n_range.first; n <= n_range.second; ++n) {
      for (const auto& pt : points) tasks.push_back({M, n, pt});
    }
  }
  struct Result {
    GridCell cell;
    std::vector<GridRow> rows;
  };
  const auto fi = InformationStructure::full_bids();
  auto results = parallel_map(tasks.size(), jobs, [&](std::size_t i) {
    const auto& t = tasks[i];
    Result res;
    res.cell.M = t.M;
    res.cell.n = t.n;
    res.cell.p = t.pt.p;
    res.cell.v1 = t.pt.v1;
    std::optional<AuctionSpec> spec;
    try {
      spec = grid_spec(t.M, t.n, t.pt.p, t.pt.v1);
    } catch (const Error& e) {
      res.cell.error = e.what();
      return res;
    }
    const auto ni_rep = enumerate_equilibria_ni(*spec);
    const auto fi_rep = enumerate_equilibria_fi(*spec, fi);
    res.cell.ni_equilibria = ni_rep.equilibria.size();
    res.cell.fi_equilibria = fi_rep.equilibria.size();
    res.cell.unique_ni = sigma_star_unique(*spec, ni_rep);
    res.cell.unique_fi = sigma_star_unique(*spec, fi_rep);
    res.cell.counterexample = res.cell.unique_fi && !res.cell.unique_ni;
    auto emit = [&](const std::string& name, const EquilibriumCertificate& c) {
      res.rows.push_back({t.M, t.n, t.pt.p, t.pt.v1, name, describe(*spec, c.profile), c.equilibrium,
                          is_revenue_maximizing(*spec, c.profile)});
    };
    const auto sigma = revenue_maximizing_profile(*spec);
    const auto ni = InformationStructure::non_informative();
    for (const auto& [name, rep, structure] :
         {std::tuple{std::string("non_informative"), &ni_rep, &ni}, std::tuple{std::string("full_bids"), &fi_rep, &fi}}) {
      bool sigma_listed = false;
      for (const auto& c : rep->equilibria) {
        emit(name, c);
        sigma_listed = sigma_listed || c.profile == sigma;
      }
      if (!sigma_listed) emit(name, is_equilibrium(*spec, *structure, sigma, true));
    }
    return res;
  });
  GridReport report;
  for (auto& r : results) {
    if (r.cell.counterexample) ++report.counterexamples;
    report.cells.push_back(r.cell);
    for (auto& row : r.rows) report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace bafo
