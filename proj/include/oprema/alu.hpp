#pragma once

// Arithmetic as the machine performed it. All significand work happens in
// a 9-digit adder frame d0 d1 ... d8 whose value is d0.d1...d8; a normalized
// operand sits in it as 0 d1 ... d8. The frame is held as an integer below
// 10^9, so "d8" is the units digit of that integer.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oprema/error.hpp"
#include "oprema/numeric.hpp"

namespace oprema::alu {

inline constexpr std::uint32_t kFrameLimit = 1'000'000'000;  // 10^9
inline constexpr std::uint32_t kOne = 100'000'000;           // 1 0000 0000
inline constexpr std::uint32_t kTenth = 10'000'000;          // 0 1000 0000

class Significand9 {
 public:
  constexpr Significand9() = default;
  constexpr explicit Significand9(std::uint32_t value) : value_(value % kFrameLimit) {}

  /// Frame of a number: 0 d1 ... d8.
  static constexpr Significand9 of(const Number& n) { return Significand9(n.significand()); }

  /// Parses the grouped spelling "1 2222 2219"; blanks are ignored and
  /// exactly nine digits are required.
  static Significand9 parse(std::string_view text) {
    std::uint32_t v = 0;
    int count = 0;
    for (char c : text) {
      if (c == ' ') continue;
      if (c < '0' || c > '9' || ++count > 9) throw Error(Errc::syntax, "bad frame '" + std::string(text) + "'");
      v = v * 10 + static_cast<std::uint32_t>(c - '0');
    }
    if (count != 9) throw Error(Errc::syntax, "frame needs nine digits: '" + std::string(text) + "'");
    return Significand9(v);
  }

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  /// d0 .. d8
  constexpr int digit(int i) const {
    std::uint32_t v = value_;
    for (int k = 8; k > i; --k) v /= 10;
    return static_cast<int>(v % 10);
  }

  /// "d0 d1d2d3d4 d5d6d7d8"
  std::string str() const {
    std::string s;
    for (int i = 0; i <= 8; ++i) {
      if (i == 1 || i == 5) s += ' ';
      s += static_cast<char>('0' + digit(i));
    }
    return s;
  }

  friend constexpr auto operator<=>(const Significand9&, const Significand9&) = default;

 private:
  std::uint32_t value_ = 0;
};

enum class Transform : std::uint8_t { identity, negate, abs, negabs };
enum class Op : std::uint8_t { add, sub, mul, div, sqrt };
enum class Status : std::uint8_t { ok, overflow, underflow };

struct Result {
  Number value;
  Status status = Status::ok;
};

// ---------------------------------------------------------------------------
// Rounding

/// roundTiesToAway on a right shift: `frame` holds the kept digits, `tail`
/// the shifted-out digits, most significant first. Only the leading tail
/// digit is inspected; a carry may ripple all the way into d0.
inline Significand9 round_ties_away(Significand9 frame, std::string_view tail) {
  if (!tail.empty() && tail.front() >= '5') return Significand9(frame.value() + 1);
  return frame;
}

/// The add-5 formulation: 5 is added to d8 and d8 is then dropped (left 0).
/// 0 9999 9995 becomes 1 0000 0000.
inline Significand9 round_ties_away_add5(Significand9 s_u) {
  const std::uint32_t v = s_u.value() + 5;
  return Significand9(v - v % 10);
}

struct Rounded {
  Significand9 frame;
  int exponent_delta = 0;
};

/// The normalization group's rounding. The frame is shifted right one
/// place; if the dropped d8 is nonzero and d7 is even, d7 is incremented
/// (d7 = 8 is the largest even digit, so this never carries).
inline Rounded round_norm(Significand9 s_u) {
  const std::uint32_t v = s_u.value();
  const std::uint32_t d8 = v % 10;
  std::uint32_t kept = v / 10;
  if (d8 != 0 && (kept % 10) % 2 == 0) kept += 1;
  return {Significand9(kept), 1};
}

// ---------------------------------------------------------------------------
// Normalization

/// Brings a nonnegative frame into number format. A frame with d0 > 0 is
/// right-shifted once with round_norm; otherwise it is left-shifted until
/// d1 > 0. Exponents beyond +-15 become infinite / zero.
inline Result normalize(Significand9 frame, int exponent, bool negative) {
  if (frame.is_zero()) return {Number::zero(), Status::ok};
  std::uint32_t v = frame.value();
  int e = exponent;
  if (v >= kOne) {
    const Rounded r = round_norm(frame);
    v = r.frame.value();
    e += r.exponent_delta;
  }
  while (v < kTenth) {
    v *= 10;
    e -= 1;
  }
  if (e > kMaxExponent) return {Number::infinite(), Status::overflow};
  if (e < -kMaxExponent) return {Number::zero(), Status::underflow};
  return {Number::from_significand(negative, v, e), Status::ok};
}

/// Normalizes a number as read into a register (no rounding is ever needed).
inline Number normalize_operand(const Number& n) {
  if (n.is_special() || n.is_normalized()) return n;
  return normalize(Significand9::of(n), n.exponent(), n.negative()).value;
}

inline Number apply(Transform t, const Number& n) {
  if (n.is_special()) return n;
  switch (t) {
    case Transform::identity: return n;
    case Transform::negate: return n.negated();
    case Transform::abs: return n.with_sign(false);
    case Transform::negabs: return n.with_sign(true);
  }
  return n;
}

constexpr bool is_negating(Transform t) { return t == Transform::negate || t == Transform::negabs; }

// ---------------------------------------------------------------------------
// Special values

/// Algebra of zero, infinite and indeterminate, after the Z4 rules. Returns
/// nothing when both operands are finite and the operation is regular. For
/// `sub` the result is a - b. `b` is ignored for sqrt. Operands must be
/// normalized.
inline std::optional<Number> special_combine(Op op, const Number& a, const Number& b = Number::zero()) {
  if (op == Op::sqrt) {
    if (a.is_special()) return a;
    if (a.negative()) return Number::indeterminate();
    return std::nullopt;
  }
  if (a.is_indeterminate() || b.is_indeterminate()) return Number::indeterminate();
  switch (op) {
    case Op::add:
    case Op::sub:
      if (a.is_infinite() && b.is_infinite()) return op == Op::add ? Number::infinite() : Number::indeterminate();
      if (a.is_infinite() || b.is_infinite()) return Number::infinite();
      if (a.is_zero() && b.is_zero()) return Number::zero();
      if (a.is_zero()) return op == Op::sub ? b.negated() : b;
      if (b.is_zero()) return a;
      return std::nullopt;
    case Op::mul:
      if ((a.is_zero() && b.is_infinite()) || (a.is_infinite() && b.is_zero())) return Number::indeterminate();
      if (a.is_infinite() || b.is_infinite()) return Number::infinite();
      if (a.is_zero() || b.is_zero()) return Number::zero();
      return std::nullopt;
    case Op::div:
      if (b.is_zero()) return a.is_zero() ? Number::indeterminate() : Number::infinite();
      if (a.is_infinite()) return b.is_infinite() ? Number::indeterminate() : Number::infinite();
      if (b.is_infinite() || a.is_zero()) return Number::zero();
      return std::nullopt;
    case Op::sqrt: break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Alignment and addition

struct Aligned {
  Significand9 x;
  Significand9 y;
  int exponent = 0;
};

namespace detail {

constexpr std::uint64_t pow10(int n) {
  std::uint64_t p = 1;
  while (n-- > 0) p *= 10;
  return p;
}

// frame shifted right `places`, kept as (frame, leading shifted-out digit)
struct Shifted {
  std::uint32_t frame;
  int guard;
};

inline Shifted shift_right(std::uint32_t frame, int places) {
  if (places <= 0) return {frame, 0};
  if (places > 9) return {0, 0};
  const std::uint64_t scaled = std::uint64_t{frame} * 10 / pow10(places);
  return {static_cast<std::uint32_t>(scaled / 10), static_cast<int>(scaled % 10)};
}

}  // namespace detail

/// Brings two finite operands to the larger exponent. The smaller one is
/// shifted right and the shifted-out tail is rounded back in with
/// roundTiesToAway; a gap of nine or more places leaves a zero frame.
inline Aligned align(const Number& x, const Number& y) {
  const int ex = x.exponent(), ey = y.exponent();
  const auto fx = detail::shift_right(x.significand(), ey - ex);
  const auto fy = detail::shift_right(y.significand(), ex - ey);
  auto rounded = [](detail::Shifted s) {
    const char lead = static_cast<char>('0' + s.guard);
    return round_ties_away(Significand9(s.frame), std::string_view(&lead, 1));
  };
  return {rounded(fx), rounded(fy), ex > ey ? ex : ey};
}

/// Alignment as the adder uses it: the first shifted-out digit is kept as a
/// guard digit below d8 instead of being rounded in immediately.
struct GuardedAligned {
  std::uint64_t x = 0;  // frame * 10 + guard
  std::uint64_t y = 0;
  int exponent = 0;
};

inline GuardedAligned align_guarded(const Number& x, const Number& y) {
  const int ex = x.exponent(), ey = y.exponent();
  const auto fx = detail::shift_right(x.significand(), ey - ex);
  const auto fy = detail::shift_right(y.significand(), ex - ey);
  return {std::uint64_t{fx.frame} * 10 + static_cast<std::uint64_t>(fx.guard),
          std::uint64_t{fy.frame} * 10 + static_cast<std::uint64_t>(fy.guard), ex > ey ? ex : ey};
}

/// Adder result of a signed-magnitude add: 9-digit frame plus guard digit.
/// If the result needs a left shift the guard moves into d8; otherwise it is
/// rounded into d8 with roundTiesToAway, and the frame is normalized.
inline Result finish_guarded_sum(std::uint64_t magnitude, int exponent, bool negative) {
  if (magnitude == 0) return {Number::zero(), Status::ok};
  if (magnitude < kOne) return normalize(Significand9(static_cast<std::uint32_t>(magnitude)), exponent - 1, negative);
  const char guard = static_cast<char>('0' + magnitude % 10);
  const Significand9 frame =
      round_ties_away(Significand9(static_cast<std::uint32_t>(magnitude / 10)), std::string_view(&guard, 1));
  return normalize(frame, exponent, negative);
}

/// One of the 16 additions: tx(x) + ty(y).
inline Result add_variant(const Number& x, const Number& y, Transform tx, Transform ty) {
  const Number a = apply(tx, normalize_operand(x));
  const Number b = apply(ty, normalize_operand(y));
  if (a.is_special() || b.is_special()) {
    const bool subtracting = is_negating(tx) != is_negating(ty);
    if (auto s = special_combine(subtracting ? Op::sub : Op::add, a, subtracting ? b.negated() : b)) return {*s};
  }
  const GuardedAligned g = align_guarded(a, b);
  if (a.negative() == b.negative()) return finish_guarded_sum(g.x + g.y, g.exponent, a.negative());
  if (g.x >= g.y) return finish_guarded_sum(g.x - g.y, g.exponent, a.negative());
  return finish_guarded_sum(g.y - g.x, g.exponent, b.negative());
}

// ---------------------------------------------------------------------------
// Multiplication and division

/// The nine multiples s*1 .. s*9 of one significand, built by repeated
/// addition.
class MultiplesStore {
 public:
  explicit MultiplesStore(Significand9 s) {
    std::uint32_t acc = 0;
    for (auto& m : m_) {
      acc += s.value();
      m = Significand9(acc);
    }
  }
  /// i in 1..9
  Significand9 operator[](int i) const { return m_[static_cast<std::size_t>(i - 1)]; }

 private:
  std::array<Significand9, 9> m_{};
};

struct ProductTrace {
  Significand9 partial;  // 9-digit frame before normalization
  int exponent = 0;      // exponent of that frame
};

/// Phase 2 of multiplication on the significands: the multiplier digits are
/// processed from d8 leftwards, each adding m[digit] (digit 0 adds nothing),
/// and the partial product is shifted right one place with roundTiesToAway
/// after every addition except the last. The frame then holds the nine
/// leading product digits, i.e. d0.d1... = 10 * x * y.
inline Significand9 multiply_significands(const Number& x, const MultiplesStore& m) {
  std::uint32_t p = 0;
  for (int k = kDigits; k >= 1; --k) {
    const int d = x.digit(k);
    if (d != 0) p += m[d].value();
    if (k > 1) {
      const char shifted_out = static_cast<char>('0' + p % 10);
      p = round_ties_away(Significand9(p / 10), std::string_view(&shifted_out, 1)).value();
    }
  }
  return Significand9(p);
}

inline Result multiply(const Number& x, const Number& y) {
  const Number a = normalize_operand(x), b = normalize_operand(y);
  if (auto s = special_combine(Op::mul, a, b)) return {*s};
  const MultiplesStore m(Significand9::of(b));
  const Significand9 p = multiply_significands(a, m);
  return normalize(p, a.exponent() + b.exponent() - 1, a.negative() != b.negative());
}

struct DivisionStep {
  Significand9 rest;          // r before the step
  int candidate = 0;          // i, minimal with (s*i)_{0-1} >= r_{0-1}; 9 if none
  std::int64_t main_result = 0;       // ma = r - s*i
  std::int64_t secondary_result = 0;  // sa = r - s*(i-1)
  int quotient_digit = 0;     // q
  Significand9 new_rest;      // rest after selection, before the x10
};

/// Leading two frame digits d0 d1.
constexpr std::uint32_t leading_pair(std::uint32_t frame) { return frame / kTenth; }

/// One quotient digit. The candidate comes from comparing only the first two
/// digits; main and secondary adder then compute r - s*i and r - s*(i-1) and
/// the nonnegative one wins.
inline DivisionStep division_step(Significand9 rest, const MultiplesStore& m) {
  DivisionStep st;
  st.rest = rest;
  const std::uint32_t r01 = leading_pair(rest.value());
  int i = 0;
  for (int k = 1; k <= 9; ++k) {
    if (leading_pair(m[k].value()) >= r01) {
      i = k;
      break;
    }
  }
  const auto r = static_cast<std::int64_t>(rest.value());
  if (i == 0) {
    // no multiple reaches the rest: the digit is 9, only the main adder is used
    st.candidate = 9;
    st.main_result = r - m[9].value();
    st.secondary_result = st.main_result;
    st.quotient_digit = 9;
    st.new_rest = Significand9(static_cast<std::uint32_t>(st.main_result));
    return st;
  }
  st.candidate = i;
  st.main_result = r - static_cast<std::int64_t>(m[i].value());
  st.secondary_result = i > 1 ? r - static_cast<std::int64_t>(m[i - 1].value()) : r;
  if (st.main_result >= 0) {
    st.quotient_digit = i;
    st.new_rest = Significand9(static_cast<std::uint32_t>(st.main_result));
  } else {
    st.quotient_digit = i - 1;
    st.new_rest = Significand9(static_cast<std::uint32_t>(st.secondary_result));
  }
  return st;
}

/// Phase 2 of division: nine quotient digits q0..q8, left to right.
inline std::vector<DivisionStep> division_steps(Significand9 dividend, Significand9 divisor, int digits = 9) {
  const MultiplesStore m(divisor);
  std::vector<DivisionStep> steps;
  steps.reserve(static_cast<std::size_t>(digits));
  Significand9 r = dividend;
  for (int j = 0; j < digits; ++j) {
    steps.push_back(division_step(r, m));
    r = Significand9(steps.back().new_rest.value() * 10);
  }
  return steps;
}

inline Result divide(const Number& x, const Number& y) {
  const Number a = normalize_operand(x), b = normalize_operand(y);
  if (auto s = special_combine(Op::div, a, b)) return {*s};
  std::uint32_t q = 0;
  for (const auto& st : division_steps(Significand9::of(a), Significand9::of(b))) q = q * 10 + static_cast<std::uint32_t>(st.quotient_digit);
  return normalize(Significand9(q), a.exponent() - b.exponent(), a.negative() != b.negative());
}

// ---------------------------------------------------------------------------
// Square root

struct SqrtStep {
  int pair = 0;                 // the two radicand digits brought down
  std::uint64_t consumed = 0;   // radicand digits consumed so far, as integer
  std::uint64_t root = 0;       // a after this step
  std::uint64_t rest = 0;       // consumed - root^2
  std::vector<std::uint64_t> subtrahends;  // odd numbers 20a+1, 20a+3, ...
  int digit() const { return static_cast<int>(subtrahends.size()); }
};

/// Digit-pair square root: for each pair, successive odd numbers
/// 20a+1, 20a+3, ... are subtracted while the rest stays nonnegative; the
/// count is the next root digit.
inline std::vector<SqrtStep> sqrt_steps(const std::vector<int>& pairs) {
  std::vector<SqrtStep> steps;
  std::uint64_t rest = 0, root = 0, consumed = 0;
  for (int p : pairs) {
    SqrtStep st;
    st.pair = p;
    rest = rest * 100 + static_cast<std::uint64_t>(p);
    consumed = consumed * 100 + static_cast<std::uint64_t>(p);
    std::uint64_t odd = 20 * root + 1;
    while (rest >= odd) {
      rest -= odd;
      st.subtrahends.push_back(odd);
      odd += 2;
    }
    root = root * 10 + st.subtrahends.size();
    st.consumed = consumed;
    st.root = root;
    st.rest = rest;
    steps.push_back(std::move(st));
  }
  return steps;
}

/// Radicand digit pairs for nine root digits. An odd exponent is made even
/// by one right shift, which pairs the digits as 0d1 | d2d3 | ... | d8 0.
inline std::vector<int> radicand_pairs(const Number& x) {
  std::array<int, 18> digits{};
  const int offset = (x.exponent() % 2 != 0) ? 1 : 0;
  for (int i = 1; i <= kDigits; ++i) digits[static_cast<std::size_t>(i - 1 + offset)] = x.digit(i);
  std::vector<int> pairs;
  for (std::size_t k = 0; k < digits.size(); k += 2) pairs.push_back(digits[k] * 10 + digits[k + 1]);
  return pairs;
}

/// ±sqrt(x). Negative radicands give indeterminate.
inline Result sqrt_op(const Number& x, bool negate_result) {
  const Number a = normalize_operand(x);
  if (auto s = special_combine(Op::sqrt, a)) return {*s};
  const int even_exponent = a.exponent() % 2 != 0 ? a.exponent() + 1 : a.exponent();
  const auto steps = sqrt_steps(radicand_pairs(a));
  return normalize(Significand9(static_cast<std::uint32_t>(steps.back().root)), even_exponent / 2 - 1, negate_result);
}

}  // namespace oprema::alu
