#pragma once

// The machine's number format: sign, eight decimal digits, a signed
// four-bit exponent and a flag for the three special values.
//
//   value = (+/-) 0.d1 d2 ... d8 * 10^(+/-e),  0 <= e <= 15
//
// On the plugboards one number occupies a 39-bit row:
//
//   bit 1        significand sign (1 = negative)
//   bits 2..33   d1..d8, one excess-3 tetrad each, lower bit number = more significant
//   bit 34       exponent sign (1 = negative)
//   bits 35..38  exponent, plain binary, bit 35 = most significant
//   bit 39       special flag; then 38 = zero, 37 = infinite, 36 = indeterminate
//
// Packed into an integer, bit k is at position k-1.

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "oprema/error.hpp"

namespace oprema {

inline constexpr int kDigits = 8;
inline constexpr int kMaxExponent = 15;

enum class Special : std::uint8_t { none, zero, infinite, indeterminate };

class Number {
 public:
  using Digits = std::array<std::uint8_t, kDigits>;

  /// Default construction yields the special value zero.
  constexpr Number() = default;

  static constexpr Number zero() { return Number(Special::zero); }
  static constexpr Number infinite() { return Number(Special::infinite); }
  static constexpr Number indeterminate() { return Number(Special::indeterminate); }

  /// A non-special number. The digits may be unnormalized (d1 == 0), as
  /// numbers could be plugged that way.
  static Number finite(bool negative, const Digits& digits, int exponent) {
    for (auto d : digits)
      if (d > 9) throw Error(Errc::invalid_tetrad, "digit out of range");
    if (exponent < -kMaxExponent || exponent > kMaxExponent)
      throw Error(Errc::exponent_overflow, "exponent " + std::to_string(exponent));
    Number n(Special::none);
    n.negative_ = negative;
    n.digits_ = digits;
    n.exponent_ = static_cast<std::int8_t>(exponent);
    return n;
  }

  /// `significand` holds d1..d8 as an integer below 10^8.
  static Number from_significand(bool negative, std::uint32_t significand, int exponent) {
    Digits d{};
    for (int i = kDigits - 1; i >= 0; --i) {
      d[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(significand % 10);
      significand /= 10;
    }
    return finite(negative, d, exponent);
  }

  constexpr Special special() const { return special_; }
  constexpr bool is_special() const { return special_ != Special::none; }
  constexpr bool is_finite() const { return special_ == Special::none; }
  constexpr bool is_zero() const { return special_ == Special::zero; }
  constexpr bool is_infinite() const { return special_ == Special::infinite; }
  constexpr bool is_indeterminate() const { return special_ == Special::indeterminate; }
  constexpr bool negative() const { return negative_; }
  constexpr int exponent() const { return exponent_; }
  constexpr const Digits& digits() const { return digits_; }
  /// d1..d8 are addressed 1-based like the machine's digit names.
  constexpr int digit(int i) const { return digits_[static_cast<std::size_t>(i - 1)]; }
  constexpr bool is_normalized() const { return is_special() || digits_[0] > 0; }

  constexpr std::uint32_t significand() const {
    std::uint32_t s = 0;
    for (auto d : digits_) s = s * 10 + d;
    return s;
  }

  Number negated() const {
    if (is_special()) return *this;
    Number n = *this;
    n.negative_ = !negative_;
    return n;
  }
  Number with_sign(bool negative) const {
    if (is_special()) return *this;
    Number n = *this;
    n.negative_ = negative;
    return n;
  }

  friend constexpr bool operator==(const Number&, const Number&) = default;

 private:
  constexpr explicit Number(Special s) : special_(s) {}

  bool negative_ = false;
  Digits digits_{};
  std::int8_t exponent_ = 0;
  Special special_ = Special::zero;
};

/// One 39-socket plugboard row.
struct Row39 {
  static constexpr int kWidth = 39;
  static constexpr std::uint64_t kMask = (std::uint64_t{1} << kWidth) - 1;

  std::uint64_t bits = 0;

  constexpr bool bit(int k) const { return ((bits >> (k - 1)) & 1u) != 0; }
  constexpr void set(int k, bool on) {
    const std::uint64_t m = std::uint64_t{1} << (k - 1);
    bits = on ? (bits | m) : (bits & ~m);
  }
  constexpr void flip(int k) { bits ^= std::uint64_t{1} << (k - 1); }

  std::string hex() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%010llx", static_cast<unsigned long long>(bits));
    return buf;
  }

  friend constexpr bool operator==(const Row39&, const Row39&) = default;
};

namespace detail {

constexpr int tetrad_first_bit(int digit_index) { return 2 + 4 * digit_index; }

inline void put_field(Row39& r, int first_bit, int width, unsigned value) {
  for (int b = 0; b < width; ++b) r.set(first_bit + b, ((value >> (width - 1 - b)) & 1u) != 0);
}

inline unsigned get_field(const Row39& r, int first_bit, int width) {
  unsigned v = 0;
  for (int b = 0; b < width; ++b) v = (v << 1) | (r.bit(first_bit + b) ? 1u : 0u);
  return v;
}

}  // namespace detail

inline Row39 encode_row(const Number& n) {
  Row39 r;
  switch (n.special()) {
    case Special::zero: r.set(38, true); r.set(39, true); return r;
    case Special::infinite: r.set(37, true); r.set(39, true); return r;
    case Special::indeterminate: r.set(36, true); r.set(39, true); return r;
    case Special::none: break;
  }
  r.set(1, n.negative());
  for (int i = 0; i < kDigits; ++i)
    detail::put_field(r, detail::tetrad_first_bit(i), 4, n.digit(i + 1) + 3u);
  r.set(34, n.exponent() < 0);
  detail::put_field(r, 35, 4, static_cast<unsigned>(n.exponent() < 0 ? -n.exponent() : n.exponent()));
  return r;
}

/// Decodes without normalizing. Throws InvalidTetrad / InvalidSpecial.
inline Number decode_row(const Row39& r) {
  if (r.bit(39)) {
    const int pattern = (r.bit(36) ? 4 : 0) | (r.bit(37) ? 2 : 0) | (r.bit(38) ? 1 : 0);
    switch (pattern) {
      case 1: return Number::zero();
      case 2: return Number::infinite();
      case 4: return Number::indeterminate();
      default: throw Error(Errc::invalid_special, "special pattern in bits 36-38 is not one-hot (row " + r.hex() + ")");
    }
  }
  Number::Digits d{};
  for (int i = 0; i < kDigits; ++i) {
    const unsigned t = detail::get_field(r, detail::tetrad_first_bit(i), 4);
    if (t < 3 || t > 12)
      throw Error(Errc::invalid_tetrad, "tetrad " + std::to_string(i + 1) + " holds " + std::to_string(t) +
                                            " (row " + r.hex() + ")");
    d[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(t - 3);
  }
  const int e = static_cast<int>(detail::get_field(r, 35, 4));
  return Number::finite(r.bit(1), d, r.bit(34) ? -e : e);
}

/// Canonical text: "+0.12250000e+04", or "zero" / "inf" / "indet".
/// Unnormalized numbers are printed digit for digit.
inline std::string format_number(const Number& n) {
  switch (n.special()) {
    case Special::zero: return "zero";
    case Special::infinite: return "inf";
    case Special::indeterminate: return "indet";
    case Special::none: break;
  }
  std::string s;
  s += n.negative() ? '-' : '+';
  s += "0.";
  for (int i = 1; i <= kDigits; ++i) s += static_cast<char>('0' + n.digit(i));
  const int e = n.exponent();
  s += e < 0 ? "e-" : "e+";
  const int a = e < 0 ? -e : e;
  s += static_cast<char>('0' + a / 10);
  s += static_cast<char>('0' + a % 10);
  return s;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Drops trailing digits one at a time with the normalization-stage rule:
// a nonzero dropped digit bumps an even last kept digit to the next odd one.
inline void shorten_by_right_shifts(std::string& digits, std::size_t keep) {
  while (digits.size() > keep) {
    const char dropped = digits.back();
    digits.pop_back();
    const int last = digits.back() - '0';
    if (dropped != '0' && last % 2 == 0) digits.back() = static_cast<char>('0' + last + 1);
  }
}

}  // namespace detail

/// Parses `[+-]digits[.digits][e[+-]int]` or `zero|inf|indet` into a
/// normalized number. More than eight significant digits are dropped by
/// right shifts with normalization rounding; tiny values become zero.
inline Number parse_decimal(std::string_view text) {
  const std::string_view s = detail::trim(text);
  if (s == "zero") return Number::zero();
  if (s == "inf") return Number::infinite();
  if (s == "indet") return Number::indeterminate();

  auto fail = [&](const char* why) -> Error {
    return Error(Errc::syntax, std::string(why) + " in number '" + std::string(s) + "'");
  };
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
  std::string all;
  std::size_t int_len = 0;
  while (i < s.size() && detail::is_digit(s[i])) all += s[i++];
  int_len = all.size();
  if (int_len == 0) throw fail("missing digits");
  if (i < s.size() && s[i] == '.') {
    ++i;
    const std::size_t before = all.size();
    while (i < s.size() && detail::is_digit(s[i])) all += s[i++];
    if (all.size() == before) throw fail("missing fraction digits");
  }
  long long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    const std::size_t start = i;
    while (i < s.size() && detail::is_digit(s[i])) {
      if (exp10 < 1'000'000) exp10 = exp10 * 10 + (s[i] - '0');
      ++i;
    }
    if (i == start) throw fail("missing exponent digits");
    if (eneg) exp10 = -exp10;
  }
  if (i != s.size()) throw fail("unexpected character");

  const std::size_t first = all.find_first_not_of('0');
  if (first == std::string::npos) return Number::zero();
  std::string sig = all.substr(first);
  const long long exponent = static_cast<long long>(int_len) - static_cast<long long>(first) + exp10;
  detail::shorten_by_right_shifts(sig, kDigits);
  sig.resize(kDigits, '0');
  if (exponent > kMaxExponent) throw Error(Errc::exponent_overflow, "'" + std::string(s) + "' exceeds 10^15");
  if (exponent < -kMaxExponent) return Number::zero();
  Number::Digits d{};
  for (int k = 0; k < kDigits; ++k) d[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(sig[static_cast<std::size_t>(k)] - '0');
  return Number::finite(negative, d, static_cast<int>(exponent));
}

/// Number literal as plugged: the canonical spelling is stored digit for
/// digit (so unnormalized plugging survives); anything else goes through
/// parse_decimal.
inline Number parse_plugged(std::string_view text) {
  const std::string_view s = detail::trim(text);
  // canonical spelling has a two-digit exponent: "+0.12345678e+05" is 15 chars
  if (s.size() == 15 && (s[0] == '+' || s[0] == '-') && s[1] == '0' && s[2] == '.' && s[11] == 'e' &&
      (s[12] == '+' || s[12] == '-') && detail::is_digit(s[13]) && detail::is_digit(s[14])) {
    Number::Digits d{};
    bool ok = true;
    for (int k = 0; k < kDigits; ++k) {
      const char c = s[static_cast<std::size_t>(3 + k)];
      if (!detail::is_digit(c)) { ok = false; break; }
      d[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(c - '0');
    }
    if (ok) {
      const int e = (s[13] - '0') * 10 + (s[14] - '0');
      if (e > kMaxExponent) throw Error(Errc::exponent_overflow, "'" + std::string(s) + "'");
      return Number::finite(s[0] == '-', d, s[12] == '-' ? -e : e);
    }
  }
  return parse_decimal(s);
}

}  // namespace oprema
