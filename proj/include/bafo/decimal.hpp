#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "bafo/errors.hpp"

namespace bafo {

/// Exact decimal amount with nine fractional digits, stored as a scaled
/// integer. Used for values and bids so that order comparisons (b < v) never
/// depend on floating-point rounding.
class Decimal {
 public:
  static constexpr int kDigits = 9;
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_scaled(std::int64_t scaled) {
    Decimal d;
    d.scaled_ = scaled;
    return d;
  }

  /// Rounds to the nearest representable amount. Inputs with at most nine
  /// fractional digits round-trip exactly.
  static Decimal from_double(double x) {
    if (!std::isfinite(x) || std::fabs(x) > 9.0e9) {
      throw DomainError("amount out of range: " + std::to_string(x));
    }
    return from_scaled(static_cast<std::int64_t>(std::llround(x * static_cast<double>(kScale))));
  }

  /// Parses a plain decimal literal such as "0.33", "-1.5" or "12".
  static Decimal parse(std::string_view text) {
    if (text.empty()) throw ConfigError("empty decimal literal");
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
      negative = text[0] == '-';
      pos = 1;
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool seen_digit = false;
    bool in_frac = false;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (c == '.' && !in_frac) {
        in_frac = true;
        continue;
      }
      if (c < '0' || c > '9') throw ConfigError("bad decimal literal: " + std::string(text));
      seen_digit = true;
      if (in_frac) {
        if (frac_digits == kDigits) {
          throw ConfigError("more than 9 fractional digits: " + std::string(text));
        }
        frac = frac * 10 + (c - '0');
        ++frac_digits;
      } else {
        whole = whole * 10 + (c - '0');
        if (whole > 9'000'000'000LL) throw DomainError("amount out of range: " + std::string(text));
      }
    }
    if (!seen_digit) throw ConfigError("bad decimal literal: " + std::string(text));
    for (int i = frac_digits; i < kDigits; ++i) frac *= 10;
    const std::int64_t scaled = whole * kScale + frac;
    return from_scaled(negative ? -scaled : scaled);
  }

  constexpr std::int64_t scaled() const { return scaled_; }
  double to_double() const { return static_cast<double>(scaled_) / static_cast<double>(kScale); }

  /// Shortest exact decimal rendering ("0.2", "1", "-0.33").
  std::string str() const {
    std::int64_t s = scaled_;
    std::string out;
    if (s < 0) {
      out.push_back('-');
      s = -s;
    }
    out += std::to_string(s / kScale);
    std::int64_t frac = s % kScale;
    if (frac != 0) {
      std::string digits = std::to_string(frac);
      digits.insert(0, static_cast<std::size_t>(kDigits) - digits.size(), '0');
      while (!digits.empty() && digits.back() == '0') digits.pop_back();
      out += '.';
      out += digits;
    }
    return out;
  }

  friend constexpr auto operator<=>(const Decimal&, const Decimal&) = default;

 private:
  std::int64_t scaled_ = 0;
};

}  // namespace bafo
