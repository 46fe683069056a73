#pragma once

// Reference arithmetic for checking the emulator. Nothing here uses the
// ALU: exact values are big-integer decimals, and the machine's rounding
// chains are re-derived in closed or big-integer form.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "oprema/error.hpp"
#include "oprema/numeric.hpp"

namespace oprema::oracle {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt pow10(int n) {
  BigInt p = 1;
  for (int i = 0; i < n; ++i) p *= 10;
  return p;
}

inline int digit_count(const BigInt& v) {
  if (v == 0) return 0;
  BigInt a = boost::multiprecision::abs(v);
  return static_cast<int>(a.str().size());
}

/// coefficient * 10^scale, exact.
struct ExactDecimal {
  BigInt coef = 0;
  int scale = 0;

  static ExactDecimal of(const Number& n) {
    if (!n.is_finite()) {
      if (n.is_zero()) return {};
      throw Error(Errc::invalid_special, "only finite numbers and zero have exact values");
    }
    BigInt c = n.significand();
    return {n.negative() ? BigInt(-c) : c, n.exponent() - kDigits};
  }

  bool is_zero() const { return coef == 0; }
  bool negative() const { return coef < 0; }

  /// Same value with the smaller of two scales.
  static std::pair<BigInt, BigInt> common(const ExactDecimal& a, const ExactDecimal& b, int& scale) {
    scale = std::min(a.scale, b.scale);
    return {a.coef * pow10(a.scale - scale), b.coef * pow10(b.scale - scale)};
  }

  friend bool operator==(const ExactDecimal& a, const ExactDecimal& b) {
    int s;
    const auto [x, y] = common(a, b, s);
    return x == y;
  }
};

inline ExactDecimal exact_add(const ExactDecimal& a, const ExactDecimal& b) {
  int s;
  const auto [x, y] = ExactDecimal::common(a, b, s);
  return {x + y, s};
}
inline ExactDecimal exact_sub(const ExactDecimal& a, const ExactDecimal& b) { return exact_add(a, {-b.coef, b.scale}); }
inline ExactDecimal exact_mul(const ExactDecimal& a, const ExactDecimal& b) { return {a.coef * b.coef, a.scale + b.scale}; }

/// Quotient truncated toward zero to at least `digits` significant digits.
inline ExactDecimal exact_div(const ExactDecimal& a, const ExactDecimal& b, int digits = 24) {
  if (b.is_zero()) throw Error(Errc::div_by_zero, "exact division by zero");
  if (a.is_zero()) return {};
  const int k = std::max(0, digits + digit_count(b.coef) - digit_count(a.coef) + 1);
  return {(a.coef * pow10(k)) / b.coef, a.scale - b.scale - k};
}

/// Square root truncated to at least `digits` significant digits.
inline ExactDecimal exact_sqrt(const ExactDecimal& a, int digits = 24) {
  if (a.negative()) throw Error(Errc::invalid_special, "square root of a negative value");
  if (a.is_zero()) return {};
  const int m = std::max(0, digits - digit_count(a.coef) / 2 + 1);
  BigInt c = a.coef * pow10(2 * m);
  int scale = a.scale - 2 * m;
  if (scale % 2 != 0) {
    c *= 10;
    scale -= 1;
  }
  return {boost::multiprecision::sqrt(c), scale / 2};
}

enum class Rounding { ties_away, ties_even, truncate };

/// Exact value rounded to the 8-digit format; exponents past +15 give
/// infinite, below -15 zero.
inline Number round_to_format(const ExactDecimal& x, Rounding mode = Rounding::ties_away) {
  if (x.is_zero()) return Number::zero();
  BigInt mag = boost::multiprecision::abs(x.coef);
  int n = digit_count(mag);
  int scale = x.scale;
  if (n > kDigits) {
    const BigInt div = pow10(n - kDigits);
    BigInt q = mag / div;
    const BigInt rem = mag % div;
    const BigInt twice = rem * 2;
    bool up = false;
    switch (mode) {
      case Rounding::ties_away: up = twice >= div; break;
      case Rounding::ties_even: up = twice > div || (twice == div && (q % 2) != 0); break;
      case Rounding::truncate: break;
    }
    if (up) q += 1;
    scale += n - kDigits;
    mag = q;
    if (mag == pow10(kDigits)) {
      mag /= 10;
      scale += 1;
    }
    n = kDigits;
  } else {
    mag *= pow10(kDigits - n);
    scale -= kDigits - n;
  }
  const int e = scale + kDigits;
  if (e > kMaxExponent) return Number::infinite();
  if (e < -kMaxExponent) return Number::zero();
  return Number::from_significand(x.negative(), static_cast<std::uint32_t>(mag), e);
}

/// |a - b| in units of the last digit of b (b finite, nonzero). nullopt when
/// the two differ in kind (special vs finite).
inline std::optional<double> ulp_distance(const Number& a, const Number& b) {
  if (a.is_special() || b.is_special()) {
    if (a == b) return 0.0;
    return std::nullopt;
  }
  const ExactDecimal d = exact_sub(ExactDecimal::of(a), ExactDecimal::of(b));
  const int ulp_scale = b.exponent() - kDigits;
  // d.coef * 10^(d.scale - ulp_scale)
  const BigInt mag = boost::multiprecision::abs(d.coef);
  const int shift = d.scale - ulp_scale;
  if (shift >= 0) return static_cast<double>(mag * pow10(shift));
  return static_cast<double>(mag) / static_cast<double>(pow10(-shift));
}

/// True when |a - b| <= 1 unit of b's last digit, decided exactly.
inline bool within_one_ulp(const Number& a, const Number& b) {
  if (a.is_special() || b.is_special()) return a == b;
  const ExactDecimal d = exact_sub(ExactDecimal::of(a), ExactDecimal::of(b));
  const ExactDecimal ulp{1, b.exponent() - kDigits};
  int s;
  const auto [x, u] = ExactDecimal::common(d, ulp, s);
  return boost::multiprecision::abs(x) <= u;
}

// ---------------------------------------------------------------------------
// Reference roundings on nine-digit frames d0 d1..d8 (as integers)

/// One right shift with roundTiesToAway on the dropped digit.
constexpr std::uint64_t rta_shift(std::uint64_t frame) { return frame / 10 + (frame % 10 >= 5 ? 1 : 0); }

/// One right shift with roundTiesToEven on the dropped digit.
constexpr std::uint64_t rtte_shift(std::uint64_t frame) {
  const std::uint64_t q = frame / 10, d = frame % 10;
  return (d > 5 || (d == 5 && q % 2 == 1)) ? q + 1 : q;
}

/// The normalization rounding: when the dropped digit is nonzero the
/// result is whichever of q and q+1 is odd.
constexpr std::uint64_t round_norm_shift(std::uint64_t frame) {
  const std::uint64_t q = frame / 10;
  if (frame % 10 == 0) return q;
  return q % 2 == 1 ? q : q + 1;
}

/// Adding 5 at d8 and clearing it; the carry may reach d0.
constexpr std::uint64_t rta_add5(std::uint64_t frame) { return (frame + 5) / 10 * 10; }

/// Spelling "d0 dddd dddd" of a nine-digit frame.
inline std::string frame_str(std::uint64_t f) {
  std::string s = std::to_string(f % 1'000'000'000ull);
  s.insert(0, 9 - s.size(), '0');
  return s.substr(0, 1) + " " + s.substr(1, 4) + " " + s.substr(5, 4);
}

struct RoundingRow {
  int d7 = 0;
  int d8 = 0;
  int norm_error = 0;  // signed, in units of the dropped digit
  int rta_error = 0;
  int norm_last_digit = 0;
};

/// Signed errors of one-place right shifts over all 100 (d7, d8) pairs.
/// `norm` maps a frame to the shifted frame.
inline std::vector<RoundingRow> enumerate_rounding_errors(const std::function<std::uint64_t(std::uint64_t)>& norm,
                                                          std::uint64_t base = 122'222'200) {
  std::vector<RoundingRow> rows;
  for (int d7 = 0; d7 <= 9; ++d7)
    for (int d8 = 0; d8 <= 9; ++d8) {
      const std::uint64_t frame = base - base % 100 + static_cast<std::uint64_t>(d7 * 10 + d8);
      RoundingRow r{d7, d8};
      const std::uint64_t n = norm(frame);
      r.norm_error = static_cast<int>(static_cast<std::int64_t>(n * 10) - static_cast<std::int64_t>(frame));
      r.rta_error = static_cast<int>(static_cast<std::int64_t>(rta_shift(frame) * 10) - static_cast<std::int64_t>(frame));
      r.norm_last_digit = static_cast<int>(n % 10);
      rows.push_back(r);
    }
  return rows;
}

struct RoundingStats {
  long signed_norm = 0;
  long signed_rta = 0;
  long abs_norm = 0;
  long abs_rta = 0;
  int count = 0;
  double mean_abs_norm() const { return static_cast<double>(abs_norm) / count; }
  double mean_abs_rta() const { return static_cast<double>(abs_rta) / count; }
};

inline RoundingStats summarize(const std::vector<RoundingRow>& rows) {
  RoundingStats s;
  for (const auto& r : rows) {
    s.signed_norm += r.norm_error;
    s.signed_rta += r.rta_error;
    s.abs_norm += std::abs(r.norm_error);
    s.abs_rta += std::abs(r.rta_error);
    ++s.count;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Long division

struct LongDivision {
  std::vector<int> digits;
  std::vector<std::uint64_t> rests;  // rest before each digit
};

/// School long division of two frames, one digit per step, rest scaled by
/// ten after each step.
inline LongDivision long_division(std::uint64_t dividend, std::uint64_t divisor, int steps = 9) {
  LongDivision out;
  BigInt r = dividend;
  const BigInt s = divisor;
  for (int j = 0; j < steps; ++j) {
    out.rests.push_back(static_cast<std::uint64_t>(r));
    const BigInt q = r / s;
    out.digits.push_back(static_cast<int>(q));
    r = (r - q * s) * 10;
  }
  return out;
}

/// Significant quotient digits of x/y (first nonzero digit onward) and the
/// decimal exponent of the first one: x/y = 0.D1D2... * 10^point.
inline std::pair<std::vector<int>, int> reference_division_digits(const ExactDecimal& x, const ExactDecimal& y, int count) {
  if (y.is_zero()) throw Error(Errc::div_by_zero, "division by zero");
  const ExactDecimal q = exact_div(x, y, count + 4);
  BigInt mag = boost::multiprecision::abs(q.coef);
  const std::string s = mag.str();
  std::vector<int> d;
  for (int i = 0; i < count && i < static_cast<int>(s.size()); ++i) d.push_back(s[static_cast<std::size_t>(i)] - '0');
  return {d, q.scale + static_cast<int>(s.size())};
}

// ---------------------------------------------------------------------------
// The machine's rounding chains, re-derived

namespace chain {

enum class Kind { zero, finite, infinite, indeterminate };

inline Kind kind(const Number& n) {
  if (n.is_zero()) return Kind::zero;
  if (n.is_infinite()) return Kind::infinite;
  if (n.is_indeterminate()) return Kind::indeterminate;
  return Kind::finite;
}

/// Rows: left operand kind, columns: right operand kind.
/// z = zero, f = finite (computed), i = infinite, n = indeterminate,
/// a / b = the left / right operand as is.
inline constexpr std::array<std::array<char, 4>, 4> kAddTable{{
    {'z', 'b', 'i', 'n'},
    {'a', 'f', 'i', 'n'},
    {'i', 'i', '?', 'n'},
    {'n', 'n', 'n', 'n'},
}};
inline constexpr std::array<std::array<char, 4>, 4> kMulTable{{
    {'z', 'z', 'n', 'n'},
    {'z', 'f', 'i', 'n'},
    {'n', 'i', 'i', 'n'},
    {'n', 'n', 'n', 'n'},
}};
inline constexpr std::array<std::array<char, 4>, 4> kDivTable{{
    {'n', 'z', 'z', 'n'},
    {'i', 'f', 'z', 'n'},
    {'i', 'i', 'n', 'n'},
    {'n', 'n', 'n', 'n'},
}};

/// Frame F (a nonnegative integer with value F * 10^(e-8)) into the format.
inline Number normalize(BigInt f, int e, bool negative) {
  if (f == 0) return Number::zero();
  if (f >= pow10(8)) {
    f = BigInt(round_norm_shift(static_cast<std::uint64_t>(f)));
    e += 1;
  }
  while (f < pow10(7)) {
    f *= 10;
    e -= 1;
  }
  if (e > kMaxExponent) return Number::infinite();
  if (e < -kMaxExponent) return Number::zero();
  return Number::from_significand(negative, static_cast<std::uint32_t>(f), e);
}

/// Register view of a plugged number: leading zeros shifted out.
inline Number normalized(const Number& n) {
  if (!n.is_finite()) return n;
  return normalize(BigInt(n.significand()), n.exponent(), n.negative());
}

/// Sign forms of the 16 additions: 0 +x, 1 -x, 2 +|x|, 3 -|x|.
inline Number form(int f, const Number& n) {
  if (!n.is_finite()) return n;
  switch (f) {
    case 0: return n;
    case 1: return n.negated();
    case 2: return n.with_sign(false);
    default: return n.with_sign(true);
  }
}

/// f1(x) + f2(y) as the adder computes it: the aligned operand keeps one
/// guard digit below d8.
inline Number add(const Number& x, const Number& y, int f1 = 0, int f2 = 0) {
  const Number a = form(f1, normalized(x));
  const Number b = form(f2, normalized(y));
  switch (kAddTable[static_cast<std::size_t>(kind(a))][static_cast<std::size_t>(kind(b))]) {
    case 'z': return Number::zero();
    case 'a': return a;
    case 'b': return b;
    case 'i': return Number::infinite();
    case 'n': return Number::indeterminate();
    case '?': return ((f1 % 2) != (f2 % 2)) ? Number::indeterminate() : Number::infinite();
    default: break;
  }
  const int e = std::max(a.exponent(), b.exponent());
  auto guarded = [&](const Number& n) {
    const int shift = e - n.exponent();
    BigInt g = BigInt(n.significand()) * 10 / pow10(shift);
    return n.negative() ? BigInt(-g) : g;
  };
  const BigInt sum = guarded(a) + guarded(b);
  const bool negative = sum < 0;
  const BigInt m = boost::multiprecision::abs(sum);
  if (m == 0) return Number::zero();
  if (m < pow10(8)) return normalize(m, e - 1, negative);
  return normalize(BigInt(rta_shift(static_cast<std::uint64_t>(m))), e, negative);
}

inline Number sub(const Number& x, const Number& y) { return add(x, y, 0, 1); }

/// Digit-serial product: multiplier digits from the last, partial product
/// shifted right with roundTiesToAway between additions.
inline Number mul(const Number& x, const Number& y) {
  const Number a = normalized(x), b = normalized(y);
  switch (kMulTable[static_cast<std::size_t>(kind(a))][static_cast<std::size_t>(kind(b))]) {
    case 'z': return Number::zero();
    case 'i': return Number::infinite();
    case 'n': return Number::indeterminate();
    default: break;
  }
  BigInt acc = 0;
  const BigInt yv = b.significand();
  for (int k = kDigits; k >= 1; --k) {
    acc += a.digit(k) * yv;
    if (k > 1) acc = (acc + 5) / 10;
  }
  return normalize(acc, a.exponent() + b.exponent() - 1, a.negative() != b.negative());
}

/// Nine truncated quotient digits, then normalization.
inline Number div(const Number& x, const Number& y) {
  const Number a = normalized(x), b = normalized(y);
  switch (kDivTable[static_cast<std::size_t>(kind(a))][static_cast<std::size_t>(kind(b))]) {
    case 'z': return Number::zero();
    case 'i': return Number::infinite();
    case 'n': return Number::indeterminate();
    default: break;
  }
  const BigInt q = BigInt(a.significand()) * pow10(8) / BigInt(b.significand());
  return normalize(q, a.exponent() - b.exponent(), a.negative() != b.negative());
}

/// Nine truncated root digits, then normalization.
inline Number sqrt(const Number& x, bool negate_result = false) {
  const Number a = normalized(x);
  if (!a.is_finite()) return a;
  if (a.negative()) return Number::indeterminate();
  const bool odd = a.exponent() % 2 != 0;
  const BigInt radicand = BigInt(a.significand()) * pow10(odd ? 9 : 10);
  const int even = odd ? a.exponent() + 1 : a.exponent();
  return normalize(boost::multiprecision::sqrt(radicand), even / 2 - 1, negate_result);
}

}  // namespace chain

}  // namespace oprema::oracle
