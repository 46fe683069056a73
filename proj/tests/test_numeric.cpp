#include <gtest/gtest.h>

#include <random>

#include "oprema/numeric.hpp"
#include "oprema/oracle.hpp"

using namespace oprema;

namespace {

// Independent reading of the row layout: bit k at position k-1, tetrads
// most significant bit first.
unsigned tetrad(std::uint64_t bits, int digit) {
  const int first = 2 + 4 * (digit - 1);
  unsigned v = 0;
  for (int b = 0; b < 4; ++b) v = (v << 1) | static_cast<unsigned>((bits >> (first + b - 1)) & 1u);
  return v;
}

}  // namespace

TEST(Numeric, EncodesExcessThreeTetrads) {
  const Number n = Number::from_significand(true, 12'345'678, -7);
  const std::uint64_t bits = encode_row(n).bits;
  for (int d = 1; d <= 8; ++d) EXPECT_EQ(tetrad(bits, d), static_cast<unsigned>(d + 3)) << "digit " << d;
  EXPECT_EQ(bits & 1u, 1u);                // significand sign
  EXPECT_EQ((bits >> 33) & 1u, 1u);        // exponent sign
  EXPECT_EQ((bits >> 34) & 0xFu, 0b1110u); // 7, bit 35 most significant
  EXPECT_EQ((bits >> 38) & 1u, 0u);
}

TEST(Numeric, SpecialRows) {
  EXPECT_EQ(encode_row(Number::zero()).bits, (std::uint64_t{1} << 38) | (std::uint64_t{1} << 37));
  EXPECT_EQ(encode_row(Number::infinite()).bits, (std::uint64_t{1} << 38) | (std::uint64_t{1} << 36));
  EXPECT_EQ(encode_row(Number::indeterminate()).bits, (std::uint64_t{1} << 38) | (std::uint64_t{1} << 35));
  for (const Number& n : {Number::zero(), Number::infinite(), Number::indeterminate()}) EXPECT_EQ(decode_row(encode_row(n)), n);
}

TEST(Numeric, RowRoundTripRandom) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20'000; ++i) {
    const auto sig = static_cast<std::uint32_t>(rng() % 100'000'000);
    const int e = static_cast<int>(rng() % 31) - 15;
    const Number n = Number::from_significand(rng() & 1u, sig, e);
    ASSERT_EQ(decode_row(encode_row(n)), n);
  }
}

TEST(Numeric, InvalidTetradAndSpecial) {
  Row39 r = encode_row(Number::from_significand(false, 50'000'000, 1));
  for (int b = 2; b <= 5; ++b) r.set(b, false);  // tetrad 0000
  try {
    decode_row(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_tetrad);
  }
  Row39 s = encode_row(Number::infinite());
  s.set(38, true);
  try {
    decode_row(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_special);
  }
  Row39 t;
  t.set(39, true);
  EXPECT_THROW(decode_row(t), Error);
}

TEST(Numeric, ParseAndFormat) {
  EXPECT_EQ(format_number(parse_decimal("1225")), "+0.12250000e+04");
  EXPECT_EQ(format_number(parse_decimal("-0.00031")), "-0.31000000e-03");
  EXPECT_EQ(format_number(parse_decimal("2.5e-3")), "+0.25000000e-02");
  EXPECT_EQ(format_number(parse_decimal("zero")), "zero");
  EXPECT_EQ(parse_decimal("inf"), Number::infinite());
  EXPECT_EQ(parse_decimal("indet"), Number::indeterminate());
  EXPECT_EQ(parse_decimal("0.000"), Number::zero());
  for (const char* bad : {"", "1.", "abc", "1e", "--1", "1.2.3"}) EXPECT_THROW(parse_decimal(bad), Error) << bad;
}

TEST(Numeric, ParseRoundsExtraDigitsLikeNormalization) {
  // each dropped digit goes through one normalizing right shift
  for (const char* text : {"123456785", "123456780", "123456771", "999999991", "100000001"}) {
    std::uint64_t f = std::stoull(text);
    f = oracle::round_norm_shift(f);
    const Number n = parse_decimal(text);
    EXPECT_EQ(n.significand(), f) << text;
    EXPECT_EQ(n.exponent(), 9) << text;
  }
}

TEST(Numeric, ExponentRange) {
  EXPECT_EQ(parse_decimal("1e-16").exponent(), -15);
  EXPECT_TRUE(parse_decimal("1e-17").is_zero());
  EXPECT_NO_THROW(parse_decimal("0.99999999e15"));
  try {
    parse_decimal("1e15");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::exponent_overflow);
  }
}

TEST(Numeric, PluggedSpellingKeepsUnnormalizedDigits) {
  const Number n = parse_plugged("+0.01234567e+02");
  EXPECT_FALSE(n.is_normalized());
  EXPECT_EQ(n.significand(), 1'234'567u);
  EXPECT_EQ(format_number(n), "+0.01234567e+02");
  EXPECT_EQ(parse_plugged("3"), parse_decimal("3"));
}

TEST(Numeric, FormatParseRoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 5000; ++i) {
    const auto sig = static_cast<std::uint32_t>(10'000'000 + rng() % 90'000'000);
    const Number n = Number::from_significand(rng() & 1u, sig, static_cast<int>(rng() % 31) - 15);
    ASSERT_EQ(parse_decimal(format_number(n)), n);
  }
}
