#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bafo/errors.hpp"

namespace bafo {

inline constexpr double kProbabilityTolerance = 1e-12;

/// Joint distribution of bidder types. Either i.i.d. with a per-type
/// probability vector (valid for any n), or an explicit exchangeable table
/// over type profiles for one fixed n.
class JointTypeDistribution {
 public:
  static constexpr int kMaxTabularBidders = 8;
  static constexpr int kMaxTabularTypes = 4;

  static JointTypeDistribution iid(std::vector<double> p) {
    if (p.empty()) throw DomainError("iid distribution needs at least one type");
    double total = 0.0;
    for (double x : p) {
      if (!(x >= 0.0) || x > 1.0) throw DomainError("iid probability outside [0,1]");
      total += x;
    }
    if (std::fabs(total - 1.0) > kProbabilityTolerance) {
      throw DomainError("iid probabilities sum to " + std::to_string(total));
    }
    JointTypeDistribution d;
    d.kind_ = Iid{std::move(p)};
    return d;
  }

  /// Profiles list 0-based type indices, one per bidder. Profiles absent from
  /// `entries` have probability zero.
  static JointTypeDistribution tabular(int n, int num_types,
                                       const std::vector<std::pair<std::vector<int>, double>>& entries) {
    if (n < 1 || n > kMaxTabularBidders) {
      throw DomainError("tabular distributions support 1.." + std::to_string(kMaxTabularBidders) + " bidders");
    }
    if (num_types < 1 || num_types > kMaxTabularTypes) {
      throw DomainError("tabular distributions support 1.." + std::to_string(kMaxTabularTypes) + " types");
    }
    Tabular t;
    t.n = n;
    t.types = num_types;
    std::size_t size = 1;
    for (int i = 0; i < n; ++i) size *= static_cast<std::size_t>(num_types);
    t.probs.assign(size, 0.0);
    std::vector<bool> seen(size, false);
    double total = 0.0;
    for (const auto& [profile, prob] : entries) {
      if (static_cast<int>(profile.size()) != n) throw DomainError("tabular profile has wrong length");
      for (int k : profile) {
        if (k < 0 || k >= num_types) throw DomainError("tabular profile has unknown type index");
      }
      if (!(prob >= 0.0)) throw DomainError("negative tabular probability");
      const std::size_t code = t.encode(profile);
      if (seen[code]) throw DomainError("duplicate tabular profile");
      seen[code] = true;
      t.probs[code] = prob;
      total += prob;
    }
    if (std::fabs(total - 1.0) > kProbabilityTolerance) {
      throw DomainError("tabular probabilities sum to " + std::to_string(total));
    }
    // Exchangeability: every profile must carry the probability of its sorted
    // rearrangement.
    std::vector<int> profile(static_cast<std::size_t>(n));
    for (std::size_t code = 0; code < size; ++code) {
      t.decode(code, profile);
      std::vector<int> sorted = profile;
      std::sort(sorted.begin(), sorted.end());
      if (std::fabs(t.probs[code] - t.probs[t.encode(sorted)]) > kProbabilityTolerance) {
        throw DomainError("tabular distribution is not exchangeable");
      }
    }
    JointTypeDistribution d;
    d.kind_ = std::move(t);
    return d;
  }

  bool is_iid() const { return std::holds_alternative<Iid>(kind_); }

  int num_types() const {
    if (const auto* iid = std::get_if<Iid>(&kind_)) return static_cast<int>(iid->p.size());
    return std::get<Tabular>(kind_).types;
  }

  const std::vector<double>& iid_probs() const { return std::get<Iid>(kind_).p; }

  int tabular_bidders() const { return std::get<Tabular>(kind_).n; }

  /// Throws DomainError if the distribution cannot describe n bidders.
  void require_bidders(int n) const {
    if (const auto* t = std::get_if<Tabular>(&kind_)) {
      if (t->n != n) {
        throw DomainError("tabular distribution is defined for n=" + std::to_string(t->n) +
                          ", not n=" + std::to_string(n));
      }
    }
  }

  /// Probability of the profile (type index per bidder). Tabular only.
  double profile_probability(const std::vector<int>& profile) const {
    const auto& t = std::get<Tabular>(kind_);
    return t.probs[t.encode(profile)];
  }

  std::size_t profile_count() const { return std::get<Tabular>(kind_).probs.size(); }

  void decode_profile(std::size_t code, std::vector<int>& out) const {
    std::get<Tabular>(kind_).decode(code, out);
  }

  double profile_probability(std::size_t code) const { return std::get<Tabular>(kind_).probs[code]; }

  /// Marginal probability that a given bidder has type k (n bidders).
  double type_marginal(int n, int k) const {
    if (const auto* iid = std::get_if<Iid>(&kind_)) return iid->p.at(static_cast<std::size_t>(k));
    require_bidders(n);
    const auto& t = std::get<Tabular>(kind_);
    double total = 0.0;
    std::vector<int> profile(static_cast<std::size_t>(t.n));
    for (std::size_t code = 0; code < t.probs.size(); ++code) {
      t.decode(code, profile);
      if (profile[0] == k) total += t.probs[code];
    }
    return total;
  }

 private:
  struct Iid {
    std::vector<double> p;
  };
  struct Tabular {
    int n = 0;
    int types = 0;
    std::vector<double> probs;  // indexed by base-`types` profile code, bidder 0 most significant

    std::size_t encode(const std::vector<int>& profile) const {
      std::size_t code = 0;
      for (int k : profile) code = code * static_cast<std::size_t>(types) + static_cast<std::size_t>(k);
      return code;
    }
    void decode(std::size_t code, std::vector<int>& profile) const {
      profile.resize(static_cast<std::size_t>(n));
      for (int i = n - 1; i >= 0; --i) {
        profile[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::size_t>(types));
        code /= static_cast<std::size_t>(types);
      }
    }
  };

  std::variant<Iid, Tabular> kind_;
};

/// Distribution over type-count vectors of a group of bidders. Entries are
/// stored flat: entry i occupies counts[i*types .. i*types+types).
struct CountVectorPMF {
  int types = 0;
  int bidders = 0;
  std::vector<int> counts;
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  const int* count_vector(std::size_t i) const { return counts.data() + i * static_cast<std::size_t>(types); }
  double total() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }
};

namespace detail {

// Calls f(counts) for every composition of `total` into the slots whose
// `allowed` flag is set (disallowed slots stay zero).
template <class F>
void for_each_composition(int total, const std::vector<bool>& allowed, F&& f) {
  const int k = static_cast<int>(allowed.size());
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  int last = -1;
  for (int i = 0; i < k; ++i) {
    if (allowed[static_cast<std::size_t>(i)]) last = i;
  }
  if (last < 0) {
    if (total == 0) f(counts);
    return;
  }
  std::function<void(int, int)> rec = [&](int slot, int remaining) {
    if (slot == last) {
      counts[static_cast<std::size_t>(slot)] = remaining;
      f(counts);
      counts[static_cast<std::size_t>(slot)] = 0;
      return;
    }
    if (!allowed[static_cast<std::size_t>(slot)]) {
      rec(slot + 1, remaining);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      counts[static_cast<std::size_t>(slot)] = c;
      rec(slot + 1, remaining - c);
    }
    counts[static_cast<std::size_t>(slot)] = 0;
  };
  rec(0, total);
}

inline double log_multinomial_pmf(const std::vector<int>& counts, const std::vector<double>& q) {
  int m = 0;
  double acc = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    m += counts[k];
    acc += counts[k] * std::log(q[k]) - std::lgamma(counts[k] + 1.0);
  }
  return acc + std::lgamma(m + 1.0);
}

}  // namespace detail

/// Exact pmf of the type-count vector of the n-1 opponents of a bidder with
/// type `own_type`, optionally conditioned on D_k (every type at most k).
inline CountVectorPMF opponent_count_pmf(const JointTypeDistribution& dist, int n, int own_type,
                                         std::optional<int> condition = std::nullopt) {
  const int K = dist.num_types();
  if (n < 2) throw DomainError("need at least two bidders");
  if (own_type < 0 || own_type >= K) throw DomainError("own type out of range");
  if (condition && (*condition < 0 || *condition >= K)) throw DomainError("conditioning type out of range");
  if (condition && own_type > *condition) throw DomainError("own type exceeds the conditioning bound");
  dist.require_bidders(n);
  const int top = condition ? *condition : K - 1;

  CountVectorPMF out;
  out.types = K;
  out.bidders = n - 1;

  if (dist.is_iid()) {
    const auto& p = dist.iid_probs();
    if (p[static_cast<std::size_t>(own_type)] <= 0.0) {
      throw ConditioningError("own type has probability zero");
    }
    double mass = 0.0;
    for (int k = 0; k <= top; ++k) mass += p[static_cast<std::size_t>(k)];
    if (mass <= 0.0) throw ConditioningError("conditioning event has probability zero");
    std::vector<double> q(static_cast<std::size_t>(K), 0.0);
    std::vector<bool> allowed(static_cast<std::size_t>(K), false);
    for (int k = 0; k <= top; ++k) {
      q[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)] / mass;
      allowed[static_cast<std::size_t>(k)] = q[static_cast<std::size_t>(k)] > 0.0;
    }
    detail::for_each_composition(n - 1, allowed, [&](const std::vector<int>& c) {
      out.counts.insert(out.counts.end(), c.begin(), c.end());
      out.probs.push_back(std::exp(detail::log_multinomial_pmf(c, q)));
    });
    // lgamma rounding accumulates over many count vectors; renormalize.
    long double sum = 0.0L;
    for (double x : out.probs) sum += x;
    for (double& x : out.probs) x = static_cast<double>(x / sum);
    return out;
  }

  // Tabular: enumerate profiles with bidder 0 fixed at own_type.
  std::vector<int> profile;
  std::vector<int> c(static_cast<std::size_t>(K));
  std::vector<std::pair<std::vector<int>, double>> acc;
  double total = 0.0;
  for (std::size_t code = 0; code < dist.profile_count(); ++code) {
    const double pr = dist.profile_probability(code);
    if (pr <= 0.0) continue;
    dist.decode_profile(code, profile);
    if (profile[0] != own_type) continue;
    if (std::any_of(profile.begin(), profile.end(), [top](int k) { return k > top; })) continue;
    std::fill(c.begin(), c.end(), 0);
    for (std::size_t i = 1; i < profile.size(); ++i) ++c[static_cast<std::size_t>(profile[i])];
    auto it = std::find_if(acc.begin(), acc.end(), [&](const auto& e) { return e.first == c; });
    if (it == acc.end()) {
      acc.emplace_back(c, pr);
    } else {
      it->second += pr;
    }
    total += pr;
  }
  if (total <= 0.0) throw ConditioningError("conditioning event has probability zero");
  std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [counts, pr] : acc) {
    out.counts.insert(out.counts.end(), counts.begin(), counts.end());
    out.probs.push_back(pr / total);
  }
  return out;
}

/// δ(F_n): the smallest conditional probability that another bidder shares
/// the highest realized type, uniformly over k and over every revealed
/// subset of the remaining bidders' types.
inline double delta(const JointTypeDistribution& dist, int n) {
  const int K = dist.num_types();
  if (dist.is_iid()) {
    const auto& p = dist.iid_probs();
    double best = 1.0;
    double cumulative = 0.0;
    for (int k = 0; k < K; ++k) {
      cumulative += p[static_cast<std::size_t>(k)];
      const double ratio = cumulative > 0.0 ? p[static_cast<std::size_t>(k)] / cumulative : 0.0;
      best = std::min(best, ratio);
    }
    return best;
  }

  dist.require_bidders(n);
  if (n < 2) return 1.0;
  // Bidder 0 is fixed at type k, bidder 1 is the one whose type is
  // predicted, bidders 2..n-1 are each either hidden or revealed. A pattern
  // encodes, per revealed-eligible bidder, 0 = hidden or 1 + type.
  double best = 1.0;
  std::vector<int> profile;
  const int others = n - 2;
  for (int k = 0; k < K; ++k) {
    const std::size_t base = static_cast<std::size_t>(k) + 2;
    std::size_t patterns = 1;
    for (int i = 0; i < others; ++i) patterns *= base;
    std::vector<double> numerator(patterns, 0.0);
    std::vector<double> denominator(patterns, 0.0);
    for (std::size_t code = 0; code < dist.profile_count(); ++code) {
      const double pr = dist.profile_probability(code);
      if (pr <= 0.0) continue;
      dist.decode_profile(code, profile);
      if (profile[0] != k) continue;
      if (std::any_of(profile.begin(), profile.end(), [k](int t) { return t > k; })) continue;
      const bool hit = profile[1] == k;
      // Every reveal mask over bidders 2..n-1.
      for (std::size_t mask = 0; mask < (std::size_t{1} << others); ++mask) {
        std::size_t pattern = 0;
        for (int i = 0; i < others; ++i) {
          const std::size_t digit =
              (mask >> i) & 1U ? static_cast<std::size_t>(profile[static_cast<std::size_t>(i) + 2]) + 1 : 0;
          pattern = pattern * base + digit;
        }
        denominator[pattern] += pr;
        if (hit) numerator[pattern] += pr;
      }
    }
    for (std::size_t i = 0; i < patterns; ++i) {
      if (denominator[i] > 0.0) best = std::min(best, numerator[i] / denominator[i]);
    }
  }
  return best;
}

struct FullSupportReport {
  int n_lo = 0;
  int n_hi = 0;
  double bound = 0.0;
  std::vector<std::pair<int, double>> per_n;
  double min_delta = 1.0;
  bool pass = false;
};

/// Finite-range surrogate for the uniform full support condition: δ(F_n)
/// over n in [n_lo, n_hi] compared against `bound`.
inline FullSupportReport uniform_full_support_check(const std::function<JointTypeDistribution(int)>& family,
                                                    int n_lo, int n_hi, double bound) {
  if (n_lo > n_hi) throw DomainError("empty bidder-count range");
  FullSupportReport r;
  r.n_lo = n_lo;
  r.n_hi = n_hi;
  r.bound = bound;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double d = delta(family(n), n);
    r.per_n.emplace_back(n, d);
    r.min_delta = std::min(r.min_delta, d);
  }
  r.pass = r.min_delta >= bound;
  return r;
}

}  // namespace bafo
