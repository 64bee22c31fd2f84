#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bafo/dist.hpp"
#include "bafo/errors.hpp"
#include "bafo/lp.hpp"
#include "bafo/model.hpp"
#include "bafo/signal.hpp"

namespace bafo {

/// Stochastic post-processing of a base message into a symbol of a finite
/// custom alphabet. A row may depend on the base message and on the
/// receiver's own first-stage bid.
class GarblingKernel {
 public:
  using RowFn = std::function<std::vector<double>(const Signal& base, int own_bid)>;

  /// Same row whatever the base message.
  static GarblingKernel constant(std::vector<double> row) {
    check_row(row, row.size());
    GarblingKernel k;
    k.symbols_ = static_cast<int>(row.size());
    k.ignores_base_ = true;
    k.constant_row_ = row;
    k.fn_ = [row](const Signal&, int) { return row; };
    return k;
  }

  /// One row per base symbol (see base_symbol_index), shared by all own bids.
  static GarblingKernel dense(std::vector<std::vector<double>> matrix) {
    if (matrix.empty()) throw DomainError("garbling matrix has no rows");
    const std::size_t width = matrix[0].size();
    for (const auto& r : matrix) check_row(r, width);
    GarblingKernel k;
    k.symbols_ = static_cast<int>(width);
    k.matrix_ = matrix;
    k.fn_ = [matrix](const Signal& base, int) {
      const int row = base_symbol_index(base);
      if (row < 0 || row >= static_cast<int>(matrix.size())) throw DomainError("garbling matrix has no row for " + to_string(base));
      return matrix[static_cast<std::size_t>(row)];
    };
    return k;
  }

  /// Arbitrary row function; rows are checked when used.
  static GarblingKernel function(int symbols, RowFn fn, bool ignores_base = false) {
    if (symbols < 1) throw DomainError("garbling alphabet must be nonempty");
    GarblingKernel k;
    k.symbols_ = symbols;
    k.ignores_base_ = ignores_base;
    k.fn_ = std::move(fn);
    return k;
  }

  int symbols() const { return symbols_; }
  bool ignores_base() const { return ignores_base_; }
  const std::optional<std::vector<double>>& constant_row() const { return constant_row_; }
  const std::optional<std::vector<std::vector<double>>>& matrix() const { return matrix_; }

  std::vector<double> row(const Signal& base, int own_bid) const {
    auto r = fn_(base, own_bid);
    check_row(r, static_cast<std::size_t>(symbols_));
    return r;
  }

  /// Row index of a base message in a dense matrix.
  static int base_symbol_index(const Signal& s) {
    switch (s.kind) {
      case SignalKind::null:
        return 0;
      case SignalKind::opponent_bid:
      case SignalKind::rank:
      case SignalKind::custom:
        return s.payload.at(0);
      case SignalKind::all_bids:
        break;
    }
    throw DomainError("dense garbling matrices cannot index all-bids messages");
  }

 private:
  static void check_row(const std::vector<double>& r, std::size_t width) {
    if (r.size() != width || r.empty()) throw DomainError("garbling row has the wrong length");
    double s = 0.0;
    for (double x : r) {
      if (!(x >= 0.0)) throw DomainError("garbling row has a negative entry");
      s += x;
    }
    if (std::fabs(s - 1.0) > kProbabilityTolerance) throw DomainError("garbling row does not sum to one");
  }

  int symbols_ = 1;
  bool ignores_base_ = false;
  std::optional<std::vector<double>> constant_row_;
  std::optional<std::vector<std::vector<double>>> matrix_;
  RowFn fn_;
};

/// Map from first-stage bids to the messages sent to the two finalists.
/// Non-finalists always receive the null message. Garbled structures apply
/// their kernel independently to each finalist's base message.
class InformationStructure {
 public:
  enum class Kind { non_informative, full_bids, opponent_bid, rank, garbled };

  static InformationStructure non_informative() { return InformationStructure(Kind::non_informative); }
  static InformationStructure full_bids() { return InformationStructure(Kind::full_bids); }
  static InformationStructure opponent_bid() { return InformationStructure(Kind::opponent_bid); }
  static InformationStructure rank() { return InformationStructure(Kind::rank); }
  static InformationStructure garbled(InformationStructure base, GarblingKernel kernel) {
    InformationStructure s(Kind::garbled);
    s.base_ = std::make_shared<const InformationStructure>(std::move(base));
    s.kernel_ = std::make_shared<const GarblingKernel>(std::move(kernel));
    return s;
  }

  Kind kind() const { return kind_; }
  const InformationStructure& base() const { return *base_; }
  const GarblingKernel& kernel() const { return *kernel_; }
  bool deterministic() const { return kind_ != Kind::garbled; }

  std::string name() const {
    switch (kind_) {
      case Kind::non_informative:
        return "non_informative";
      case Kind::full_bids:
        return "full_bids";
      case Kind::opponent_bid:
        return "opponent_bid";
      case Kind::rank:
        return "rank";
      case Kind::garbled:
        return "garbled(" + base_->name() + ")";
    }
    return "?";
  }

  /// Message of a deterministic structure to a finalist bidding `own_bid`
  /// whose co-finalist bid `co_bid`; `all_counts` counts every first-stage
  /// bid (all n bidders).
  void base_message(int own_bid, int co_bid, const std::vector<int>& all_counts, Signal& out) const {
    out.payload.clear();
    switch (kind_) {
      case Kind::non_informative:
        out.kind = SignalKind::null;
        return;
      case Kind::opponent_bid:
        out.kind = SignalKind::opponent_bid;
        out.payload.push_back(co_bid);
        return;
      case Kind::full_bids:
        out.kind = SignalKind::all_bids;
        out.payload.assign(all_counts.begin(), all_counts.end());
        return;
      case Kind::rank:
        out.kind = SignalKind::rank;
        out.payload.push_back(static_cast<int>(own_bid > co_bid    ? RankMessage::strictly_first
                                               : own_bid == co_bid ? RankMessage::tied_first
                                                                   : RankMessage::second));
        return;
      case Kind::garbled:
        break;
    }
    throw DomainError("garbled structures have no deterministic message");
  }

  /// Distribution of the message to a finalist. Works in any scalar type;
  /// exact scalars renormalize kernel rows exactly.
  template <class Scalar>
  void messages(int own_bid, int co_bid, const std::vector<int>& all_counts,
                std::vector<std::pair<Signal, Scalar>>& out) const {
    out.clear();
    if (deterministic()) {
      Signal s;
      base_message(own_bid, co_bid, all_counts, s);
      out.emplace_back(std::move(s), Scalar(1));
      return;
    }
    std::vector<std::pair<Signal, Scalar>> inner;
    base_->messages<Scalar>(own_bid, co_bid, all_counts, inner);
    std::vector<Scalar> mass(static_cast<std::size_t>(kernel_->symbols()), Scalar(0));
    for (const auto& [sig, pr] : inner) {
      const auto row = kernel_->row(sig, own_bid);
      Scalar row_sum(0);
      std::vector<Scalar> exact(row.size());
      for (std::size_t j = 0; j < row.size(); ++j) {
        exact[j] = Scalar(row[j]);
        row_sum += exact[j];
      }
      for (std::size_t j = 0; j < row.size(); ++j) {
        if constexpr (std::is_floating_point_v<Scalar>) {
          mass[j] += pr * exact[j];
        } else {
          mass[j] += pr * exact[j] / row_sum;
        }
      }
    }
    for (std::size_t j = 0; j < mass.size(); ++j) {
      if (mass[j] > Scalar(0)) out.emplace_back(Signal::custom(static_cast<int>(j)), mass[j]);
    }
  }

  /// Structural sufficient condition for non-informativeness.
  bool structurally_non_informative() const {
    if (kind_ == Kind::non_informative) return true;
    if (kind_ == Kind::garbled) return kernel_->ignores_base() || base_->structurally_non_informative();
    return false;
  }

 private:
  explicit InformationStructure(Kind k) : kind_(k) {}

  Kind kind_;
  std::shared_ptr<const InformationStructure> base_;
  std::shared_ptr<const GarblingKernel> kernel_;
};

/// Selection of a bidder bidding `own_bid` against opponents whose first-stage
/// bids have counts `opp_counts`: probability of reaching stage two and the
/// co-finalist's bid (which is deterministic given the counts).
template <class Scalar>
struct BidSelection {
  Scalar probability{};
  int co_bid = -1;
};

template <class Scalar>
BidSelection<Scalar> select_against(int own_bid, const std::vector<int>& opp_counts) {
  const int M = static_cast<int>(opp_counts.size());
  int above = 0;
  int top_above = -1;
  for (int b = own_bid + 1; b < M; ++b) {
    above += opp_counts[static_cast<std::size_t>(b)];
    if (opp_counts[static_cast<std::size_t>(b)] > 0) top_above = b;
  }
  const int tied = opp_counts[static_cast<std::size_t>(own_bid)];
  BidSelection<Scalar> s;
  if (above >= 2) return s;
  if (above == 1) {
    s.probability = Scalar(1) / Scalar(tied + 1);
    s.co_bid = top_above;
    return s;
  }
  if (tied >= 1) {
    s.probability = Scalar(2) / Scalar(tied + 1);
    s.co_bid = own_bid;
    return s;
  }
  s.probability = Scalar(1);
  for (int b = own_bid - 1; b >= 0; --b) {
    if (opp_counts[static_cast<std::size_t>(b)] > 0) {
      s.co_bid = b;
      break;
    }
  }
  if (s.co_bid < 0) s.probability = Scalar(0);  // no opponents at all
  return s;
}

using SignalDistribution = std::vector<std::pair<Signal, double>>;

namespace detail {

inline std::vector<int> bid_counts_from_types(const int* type_counts, const SymmetricStrategy& profile, int num_bids) {
  std::vector<int> out(static_cast<std::size_t>(num_bids), 0);
  for (std::size_t k = 0; k < profile.first.size(); ++k) {
    out[static_cast<std::size_t>(profile.first[k])] += type_counts[k];
  }
  return out;
}

// Opponents' first-stage bid-count vectors that occur with positive
// probability for some own type, when opponents play `profile`.
inline std::vector<std::vector<int>> opponent_bid_states(const AuctionSpec& spec, const SymmetricStrategy& profile) {
  std::set<std::vector<int>> states;
  for (int k = 0; k < spec.num_types(); ++k) {
    if (spec.dist().type_marginal(spec.n(), k) <= 0.0) continue;
    const auto pmf = opponent_count_pmf(spec.dist(), spec.n(), k);
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      if (pmf.probs[i] <= 0.0) continue;
      states.insert(bid_counts_from_types(pmf.count_vector(i), profile, spec.num_bids()));
    }
  }
  return {states.begin(), states.end()};
}

template <class Scalar>
void add_mass(std::vector<std::pair<Signal, Scalar>>& acc, const Signal& s, const Scalar& p) {
  for (auto& [sig, mass] : acc) {
    if (sig == s) {
      mass += p;
      return;
    }
  }
  acc.emplace_back(s, p);
}

// Message distribution to a finalist bidding `own_bid` against opponents with
// bid counts `opp`, conditional on selection. Empty when never selected.
template <class Scalar>
std::vector<std::pair<Signal, Scalar>> conditional_messages(const InformationStructure& structure, int own_bid,
                                                            const std::vector<int>& opp) {
  const auto sel = select_against<Scalar>(own_bid, opp);
  std::vector<std::pair<Signal, Scalar>> out;
  if (!(sel.probability > Scalar(0))) return out;
  std::vector<int> all = opp;
  ++all[static_cast<std::size_t>(own_bid)];
  structure.messages<Scalar>(own_bid, sel.co_bid, all, out);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace detail

/// Exact distribution of the message received by a bidder of `bidder_type`
/// who bids `own_bid` while everyone else plays `profile`, conditional on
/// reaching the second stage.
inline SignalDistribution signal_distribution(const InformationStructure& structure, const AuctionSpec& spec,
                                              const SymmetricStrategy& profile, int bidder_type, int own_bid) {
  const auto pmf = opponent_count_pmf(spec.dist(), spec.n(), bidder_type);
  std::map<Signal, double> acc;
  double selected = 0.0;
  std::vector<std::pair<Signal, double>> msgs;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    const auto opp = detail::bid_counts_from_types(pmf.count_vector(i), profile, spec.num_bids());
    const auto sel = select_against<double>(own_bid, opp);
    const double w = pmf.probs[i] * sel.probability;
    if (w <= 0.0) continue;
    std::vector<int> all = opp;
    ++all[static_cast<std::size_t>(own_bid)];
    structure.messages<double>(own_bid, sel.co_bid, all, msgs);
    for (const auto& [sig, pr] : msgs) acc[sig] += w * pr;
    selected += w;
  }
  if (selected <= 0.0) throw ConditioningError("bidder never reaches the second stage with this bid");
  SignalDistribution out;
  for (const auto& [sig, mass] : acc) out.emplace_back(sig, mass / selected);
  return out;
}

struct NonInformativeResult {
  bool non_informative = true;
  // When informative: an own bid and two opponents' bid profiles (bid
  // indices, one per opponent) that both select the bidder but lead to
  // different message distributions.
  struct Witness {
    int own_bid = 0;
    std::vector<int> profile_a;
    std::vector<int> profile_b;
  };
  std::optional<Witness> witness;
};

namespace detail {

inline std::vector<int> profile_from_counts(const std::vector<int>& counts) {
  std::vector<int> out;
  for (std::size_t b = 0; b < counts.size(); ++b) out.insert(out.end(), static_cast<std::size_t>(counts[b]), static_cast<int>(b));
  return out;
}

inline bool same_distribution(const std::vector<std::pair<Signal, double>>& a,
                              const std::vector<std::pair<Signal, double>>& b, double tol) {
  std::map<Signal, double> diff;
  for (const auto& [s, p] : a) diff[s] += p;
  for (const auto& [s, p] : b) diff[s] -= p;
  return std::all_of(diff.begin(), diff.end(), [tol](const auto& e) { return std::fabs(e.second) <= tol; });
}

}  // namespace detail

/// Tests whether a finalist's message distribution, given its own bid, is
/// the same for every opponents' bid profile that lets it reach stage two.
/// Tagged kinds are decided structurally; garbled ones by enumerating bid
/// multisets (up to `budget` of them).
inline NonInformativeResult is_non_informative(const InformationStructure& structure, const AuctionSpec& spec,
                                               std::size_t budget = 200'000) {
  NonInformativeResult r;
  if (structure.structurally_non_informative()) return r;
  const int M = spec.num_bids();
  const int others = spec.n() - 1;

  if (structure.kind() != InformationStructure::Kind::garbled) {
    // Everyone else at the lowest bid versus one opponent a step above: the
    // bidder is selected in both, but the co-finalist's bid differs.
    r.non_informative = false;
    NonInformativeResult::Witness w;
    w.own_bid = 0;
    w.profile_a.assign(static_cast<std::size_t>(others), 0);
    w.profile_b = w.profile_a;
    w.profile_b[0] = 1;
    r.witness = w;
    return r;
  }

  // Number of opponents' bid multisets: C(others + M - 1, M - 1).
  double multisets = 1.0;
  for (int i = 1; i < M; ++i) multisets = multisets * (others + i) / i;
  if (multisets * M > static_cast<double>(budget)) {
    throw ComplexityError("non-informativeness check needs " + std::to_string(multisets * M) +
                          " evaluations, over the budget");
  }
  std::vector<bool> allowed(static_cast<std::size_t>(M), true);
  for (int own = 0; own < M; ++own) {
    std::optional<std::pair<std::vector<int>, std::vector<std::pair<Signal, double>>>> reference;
    bool found = false;
    detail::for_each_composition(others, allowed, [&](const std::vector<int>& opp) {
      if (found) return;
      auto msgs = detail::conditional_messages<double>(structure, own, opp);
      if (msgs.empty()) return;
      if (!reference) {
        reference.emplace(opp, std::move(msgs));
        return;
      }
      if (!detail::same_distribution(reference->second, msgs, kProbabilityTolerance)) {
        found = true;
        r.non_informative = false;
        r.witness = NonInformativeResult::Witness{own, detail::profile_from_counts(reference->first),
                                                  detail::profile_from_counts(opp)};
      }
    });
    if (found) return r;
  }
  return r;
}

/// Garbling kernel found for a comparison, one block per own first bid.
struct GarblingWitness {
  struct Block {
    std::vector<Signal> from;
    std::vector<Signal> to;
    std::vector<std::vector<double>> matrix;  // from.size() x to.size()
  };
  std::map<int, Block> by_own_bid;
};

struct ComparisonResult {
  bool comparable = false;
  std::optional<GarblingWitness> witness;
  double residual = 0.0;
  bool exact = false;  // verdict produced by exact rational arithmetic
};

inline constexpr double kGarblingTolerance = 1e-9;
inline constexpr std::size_t kExactAlphabetLimit = 16;

namespace detail {

template <class Scalar>
struct GarblingProblem {
  std::vector<Signal> from;
  std::vector<Signal> to;
  std::vector<std::vector<Scalar>> A;
  std::vector<Scalar> b;
};

// Constraints for one own bid: rows of L sum to one, and for every state
// (opponents' bid counts) B's conditional message distribution equals A's
// pushed through L.
template <class Scalar>
GarblingProblem<Scalar> garbling_problem(const InformationStructure& more, const InformationStructure& less, int own,
                                         const std::vector<std::vector<int>>& states) {
  GarblingProblem<Scalar> prob;
  std::vector<std::vector<std::pair<Signal, Scalar>>> pa;
  std::vector<std::vector<std::pair<Signal, Scalar>>> pb;
  std::set<Signal> from;
  std::set<Signal> to;
  for (const auto& opp : states) {
    auto a = conditional_messages<Scalar>(more, own, opp);
    if (a.empty()) continue;
    auto bb = conditional_messages<Scalar>(less, own, opp);
    for (const auto& e : a) from.insert(e.first);
    for (const auto& e : bb) to.insert(e.first);
    pa.push_back(std::move(a));
    pb.push_back(std::move(bb));
  }
  prob.from.assign(from.begin(), from.end());
  prob.to.assign(to.begin(), to.end());
  const std::size_t nf = prob.from.size();
  const std::size_t nt = prob.to.size();
  auto idx = [](const std::vector<Signal>& v, const Signal& s) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), s) - v.begin());
  };
  const std::size_t vars = nf * nt;
  for (std::size_t i = 0; i < nf; ++i) {
    std::vector<Scalar> row(vars, Scalar(0));
    for (std::size_t j = 0; j < nt; ++j) row[i * nt + j] = Scalar(1);
    prob.A.push_back(std::move(row));
    prob.b.push_back(Scalar(1));
  }
  for (std::size_t s = 0; s < pa.size(); ++s) {
    for (std::size_t j = 0; j < nt; ++j) {
      std::vector<Scalar> row(vars, Scalar(0));
      for (const auto& [sig, pr] : pa[s]) row[idx(prob.from, sig) * nt + j] = pr;
      Scalar rhs(0);
      for (const auto& [sig, pr] : pb[s]) {
        if (sig == prob.to[j]) rhs = pr;
      }
      prob.A.push_back(std::move(row));
      prob.b.push_back(rhs);
    }
  }
  return prob;
}

}  // namespace detail

/// Decides whether `more` is at least as informative as `less` for bidder 1
/// when the others play `profile`: searches, per own first bid, a
/// row-stochastic kernel that turns `more`'s message into `less`'s with the
/// right conditional distribution in every opponents' bid state.
inline ComparisonResult more_informative(const InformationStructure& more, const InformationStructure& less,
                                         const AuctionSpec& spec, const SymmetricStrategy& profile) {
  using Rational = boost::multiprecision::cpp_rational;
  const auto states = detail::opponent_bid_states(spec, profile);
  ComparisonResult result;
  result.exact = true;
  GarblingWitness witness;
  double residual = 0.0;
  for (int own = 0; own < spec.num_bids(); ++own) {
    auto prob = detail::garbling_problem<double>(more, less, own, states);
    if (prob.from.empty()) continue;
    auto sol = lp::solve_feasibility<double>(prob.A, prob.b, 1e-12);
    double block_residual = sol.residual;
    if (prob.from.size() <= kExactAlphabetLimit && prob.to.size() <= kExactAlphabetLimit) {
      auto exact = detail::garbling_problem<Rational>(more, less, own, states);
      auto esol = lp::solve_feasibility<Rational>(exact.A, exact.b, Rational(0));
      block_residual = static_cast<double>(esol.residual);
      if (esol.residual == 0) {
        for (std::size_t i = 0; i < sol.x.size(); ++i) sol.x[i] = static_cast<double>(esol.x[i]);
      }
    } else {
      result.exact = false;
    }
    residual = std::max(residual, block_residual);
    GarblingWitness::Block block;
    block.from = prob.from;
    block.to = prob.to;
    const std::size_t nt = prob.to.size();
    for (std::size_t i = 0; i < prob.from.size(); ++i) {
      std::vector<double> row(nt);
      for (std::size_t j = 0; j < nt; ++j) row[j] = std::max(0.0, sol.x[i * nt + j]);
      block.matrix.push_back(std::move(row));
    }
    witness.by_own_bid.emplace(own, std::move(block));
  }
  result.residual = residual;
  result.comparable = residual <= kGarblingTolerance;
  if (result.comparable) result.witness = std::move(witness);
  return result;
}

/// Largest violation of the garbling equations by a given kernel, including
/// row-sum defects. Messages of `more` missing from the kernel count as
/// violations of their full mass.
inline double garbling_residual(const InformationStructure& more, const InformationStructure& less,
                                const AuctionSpec& spec, const SymmetricStrategy& profile,
                                const GarblingWitness& kernel) {
  const auto states = detail::opponent_bid_states(spec, profile);
  double worst = 0.0;
  for (int own = 0; own < spec.num_bids(); ++own) {
    const auto it = kernel.by_own_bid.find(own);
    for (const auto& opp : states) {
      const auto a = detail::conditional_messages<double>(more, own, opp);
      if (a.empty()) continue;
      const auto b = detail::conditional_messages<double>(less, own, opp);
      std::map<Signal, double> pushed;
      for (const auto& [sig, pr] : a) {
        if (it == kernel.by_own_bid.end()) {
          worst = std::max(worst, pr);
          continue;
        }
        const auto& blk = it->second;
        const auto pos = std::find(blk.from.begin(), blk.from.end(), sig);
        if (pos == blk.from.end()) {
          worst = std::max(worst, pr);
          continue;
        }
        const auto& row = blk.matrix[static_cast<std::size_t>(pos - blk.from.begin())];
        for (std::size_t j = 0; j < blk.to.size(); ++j) pushed[blk.to[j]] += pr * row[j];
      }
      for (const auto& [sig, pr] : b) pushed[sig] -= pr;
      for (const auto& [sig, d] : pushed) worst = std::max(worst, std::fabs(d));
    }
    if (it != kernel.by_own_bid.end()) {
      for (const auto& row : it->second.matrix) {
        double s = 0.0;
        for (double x : row) s += x;
        worst = std::max(worst, std::fabs(s - 1.0));
      }
    }
  }
  return worst;
}

/// Kernel product: first apply `ab`, then `bc`.
inline GarblingWitness compose(const GarblingWitness& ab, const GarblingWitness& bc) {
  GarblingWitness out;
  for (const auto& [own, first] : ab.by_own_bid) {
    const auto it = bc.by_own_bid.find(own);
    if (it == bc.by_own_bid.end()) continue;
    const auto& second = it->second;
    GarblingWitness::Block blk;
    blk.from = first.from;
    blk.to = second.to;
    for (const auto& row : first.matrix) {
      std::vector<double> composed(second.to.size(), 0.0);
      for (std::size_t j = 0; j < first.to.size(); ++j) {
        const auto pos = std::find(second.from.begin(), second.from.end(), first.to[j]);
        if (pos == second.from.end()) continue;
        const auto& mid = second.matrix[static_cast<std::size_t>(pos - second.from.begin())];
        for (std::size_t l = 0; l < composed.size(); ++l) composed[l] += row[j] * mid[l];
      }
      blk.matrix.push_back(std::move(composed));
    }
    out.by_own_bid.emplace(own, std::move(blk));
  }
  return out;
}

}  // namespace bafo
