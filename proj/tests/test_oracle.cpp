#include <gtest/gtest.h>

#include "oprema/oracle.hpp"
#include "oprema/verify.hpp"

using namespace oprema;
using namespace oprema::oracle;

namespace {

ExactDecimal ex(const char* s) { return ExactDecimal::of(parse_decimal(s)); }

}  // namespace

TEST(Oracle, ExactArithmetic) {
  EXPECT_EQ(exact_add(ex("0.5"), ex("0.25")), ex("0.75"));
  EXPECT_EQ(exact_mul(ex("1.5"), ex("-4")), ex("-6"));
  EXPECT_EQ(exact_sub(ex("1"), ex("1")), ExactDecimal{});
  const ExactDecimal third = exact_div(ex("1"), ex("3"), 30);
  EXPECT_GE(digit_count(third.coef), 30);
  EXPECT_EQ(round_to_format(third), parse_decimal("0.33333333"));
  EXPECT_EQ(round_to_format(exact_sqrt(ex("2"))), parse_decimal("1.4142136"));
  EXPECT_THROW(exact_div(ex("1"), ExactDecimal{}), Error);
}

TEST(Oracle, WorkedExactValues) {
  const ExactDecimal third = exact_div(ex("1"), ex("3"), 12);
  EXPECT_EQ(oracle::BigInt(boost::multiprecision::abs(third.coef)).str().substr(0, 12), "333333333333");
  EXPECT_EQ(exact_sqrt(ex("1225")), ex("35"));
  EXPECT_EQ(exact_mul(ex("0.201"), ex("4")), ex("0.804"));
  EXPECT_EQ(reference_division_digits(ex("0.8"), ex("0.201"), 1).first, (std::vector<int>{3}));
  EXPECT_EQ(reference_division_digits(ex("0.1"), ex("0.3"), 9).first, (std::vector<int>(9, 3)));
}

TEST(Oracle, RoundToFormatModes) {
  const ExactDecimal tie{BigInt(123456785), -9};  // 0.123456785
  EXPECT_EQ(round_to_format(tie, Rounding::ties_away).significand(), 12'345'679u);
  EXPECT_EQ(round_to_format(tie, Rounding::ties_even).significand(), 12'345'678u);
  EXPECT_EQ(round_to_format(tie, Rounding::truncate).significand(), 12'345'678u);
  const ExactDecimal carry{BigInt(999999995), -9};
  const Number c = round_to_format(carry);
  EXPECT_EQ(c.significand(), 10'000'000u);
  EXPECT_EQ(c.exponent(), 1);
  EXPECT_TRUE(round_to_format(ExactDecimal{1, 20}).is_infinite());
  EXPECT_TRUE(round_to_format(ExactDecimal{1, -20}).is_zero());
}

TEST(Oracle, UlpDistance) {
  const Number a = parse_decimal("1.0000001"), b = parse_decimal("1");
  EXPECT_EQ(ulp_distance(a, b), 1.0);
  EXPECT_TRUE(within_one_ulp(a, b));
  EXPECT_FALSE(within_one_ulp(parse_decimal("1.0000002"), b));
  EXPECT_FALSE(ulp_distance(Number::infinite(), b).has_value());
  EXPECT_EQ(ulp_distance(Number::zero(), Number::zero()), 0.0);
}

TEST(Oracle, FrameRoundings) {
  EXPECT_EQ(rta_shift(15), 2u);
  EXPECT_EQ(rta_shift(14), 1u);
  EXPECT_EQ(rtte_shift(15), 2u);
  EXPECT_EQ(rtte_shift(25), 2u);
  EXPECT_EQ(round_norm_shift(20), 2u);
  EXPECT_EQ(round_norm_shift(21), 3u);
  EXPECT_EQ(round_norm_shift(31), 3u);
  EXPECT_EQ(round_norm_shift(39), 3u);
  EXPECT_EQ(rta_add5(999'999'995), 1'000'000'000u);
  EXPECT_EQ(frame_str(122'222'219), "1 2222 2219");
}

TEST(Oracle, RoundingStatistics) {
  const auto s = summarize(enumerate_rounding_errors([](std::uint64_t f) { return round_norm_shift(f); }));
  EXPECT_EQ(s.count, 100);
  EXPECT_EQ(s.signed_norm, 0);
  EXPECT_EQ(s.abs_norm, 450);
  EXPECT_EQ(s.abs_rta, 250);
  EXPECT_DOUBLE_EQ(s.mean_abs_norm() / s.mean_abs_rta(), 1.8);
  EXPECT_GT(s.signed_rta, 0);
}

TEST(Oracle, MutantRoundNormFailsStatistics) {
  EXPECT_TRUE(verify::rounding_statistics().passed);
  const auto r = verify::rounding_statistics(verify::mutant_round_norm());
  EXPECT_FALSE(r.passed) << r.detail;
}

TEST(Oracle, LongDivision) {
  const auto d = long_division(10'000'000, 30'000'000);
  EXPECT_EQ(d.digits, (std::vector<int>{0, 3, 3, 3, 3, 3, 3, 3, 3}));
  const auto [digits, point] = reference_division_digits(ex("1"), ex("8"), 4);
  EXPECT_EQ(digits, (std::vector<int>{1, 2, 5, 0}));
  EXPECT_EQ(point, 0);
}

TEST(Oracle, ChainSpecials) {
  namespace ch = chain;
  const Number z = Number::zero(), inf = Number::infinite(), nd = Number::indeterminate(), one = parse_decimal("1");
  EXPECT_EQ(ch::div(one, z), inf);
  EXPECT_EQ(ch::div(z, z), nd);
  EXPECT_EQ(ch::mul(z, inf), nd);
  EXPECT_EQ(ch::add(inf, inf, 0, 1), nd);
  EXPECT_EQ(ch::add(inf, inf, 0, 0), inf);
  EXPECT_EQ(ch::add(z, one, 0, 1), parse_decimal("-1"));
  EXPECT_EQ(ch::sqrt(parse_decimal("-1")), nd);
  EXPECT_EQ(ch::sqrt(parse_decimal("1225")), parse_decimal("35"));
}
