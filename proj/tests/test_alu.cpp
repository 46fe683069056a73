#include <gtest/gtest.h>

#include <random>

#include "oprema/alu.hpp"
#include "oprema/oracle.hpp"

using namespace oprema;
using alu::Significand9;
using alu::Transform;

namespace {

Number random_finite(std::mt19937_64& rng, int lo = -7, int hi = 7) {
  const auto sig = static_cast<std::uint32_t>(10'000'000 + rng() % 90'000'000);
  return Number::from_significand(rng() & 1u, sig, lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)));
}

Number random_any(std::mt19937_64& rng) {
  switch (rng() % 10) {
    case 0: return Number::zero();
    case 1: return Number::infinite();
    case 2: return Number::indeterminate();
    default: return random_finite(rng);
  }
}

Number num(const char* s) { return parse_decimal(s); }

}  // namespace

TEST(Alu, RoundNormMatchesOddRule) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100'000; ++i) {
    const std::uint32_t f = static_cast<std::uint32_t>(rng() % 1'000'000'000);
    ASSERT_EQ(alu::round_norm(Significand9(f)).frame.value(), oracle::round_norm_shift(f)) << f;
  }
  EXPECT_EQ(alu::round_norm(Significand9::parse("1 2222 2219")).frame.str(), "0 1222 2221");
  EXPECT_EQ(alu::round_norm(Significand9::parse("1 2222 2221")).frame.str(), "0 1222 2223");
  EXPECT_EQ(alu::round_norm(Significand9::parse("1 2222 2220")).frame.str(), "0 1222 2222");
}

TEST(Alu, RoundTiesAwayAdd5) {
  EXPECT_EQ(alu::round_ties_away_add5(Significand9::parse("0 9999 9995")).str(), "1 0000 0000");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100'000; ++i) {
    const std::uint32_t f = static_cast<std::uint32_t>(rng() % 999'999'990);
    ASSERT_EQ(alu::round_ties_away_add5(Significand9(f)).value(), oracle::rta_add5(f));
  }
}

TEST(Alu, WorkedAddition) {
  // +|3| + -|-4| = -1
  const auto r = alu::add_variant(num("3"), num("-4"), Transform::abs, Transform::negabs);
  EXPECT_EQ(r.value, num("-1"));
  EXPECT_EQ(alu::add_variant(num("0.5"), num("0.6"), Transform::identity, Transform::identity).value, num("1.1"));
}

TEST(Alu, AdditionMatchesChainOracle) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50'000; ++i) {
    const Number x = random_any(rng), y = random_any(rng);
    const int f1 = static_cast<int>(rng() % 4), f2 = static_cast<int>(rng() % 4);
    const Number got = alu::add_variant(x, y, static_cast<Transform>(f1), static_cast<Transform>(f2)).value;
    ASSERT_EQ(got, oracle::chain::add(x, y, f1, f2)) << format_number(x) << " " << format_number(y) << " forms " << f1 << f2;
  }
}

TEST(Alu, ProductQuotientRootMatchChainOracle) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 30'000; ++i) {
    const Number x = random_any(rng), y = random_any(rng);
    ASSERT_EQ(alu::multiply(x, y).value, oracle::chain::mul(x, y)) << format_number(x) << " * " << format_number(y);
    ASSERT_EQ(alu::divide(x, y).value, oracle::chain::div(x, y)) << format_number(x) << " / " << format_number(y);
    ASSERT_EQ(alu::sqrt_op(x, false).value, oracle::chain::sqrt(x)) << format_number(x);
    ASSERT_EQ(alu::sqrt_op(x, true).value, oracle::chain::sqrt(x, true)) << format_number(x);
  }
}

TEST(Alu, ResultsWithinOneUlpOfExact) {
  std::mt19937_64 rng(7);
  using oracle::ExactDecimal;
  for (int i = 0; i < 20'000; ++i) {
    const Number x = random_finite(rng), y = random_finite(rng);
    const auto ex = ExactDecimal::of(x), ey = ExactDecimal::of(y);
    const Number sum = alu::add_variant(x, y, Transform::identity, Transform::identity).value;
    const Number ref_sum = oracle::round_to_format(oracle::exact_add(ex, ey));
    if (!ref_sum.is_zero()) {
      ASSERT_TRUE(oracle::within_one_ulp(sum, ref_sum)) << format_number(x) << " + " << format_number(y);
    }
    ASSERT_TRUE(oracle::within_one_ulp(alu::multiply(x, y).value, oracle::round_to_format(oracle::exact_mul(ex, ey))));
    ASSERT_TRUE(oracle::within_one_ulp(alu::divide(x, y).value, oracle::round_to_format(oracle::exact_div(ex, ey))));
    const Number ax = x.with_sign(false);
    ASSERT_TRUE(oracle::within_one_ulp(alu::sqrt_op(ax, false).value, oracle::round_to_format(oracle::exact_sqrt(ExactDecimal::of(ax)))));
  }
}

TEST(Alu, SpecialAlgebra) {
  const Number z = Number::zero(), inf = Number::infinite(), nd = Number::indeterminate(), one = num("1");
  EXPECT_EQ(alu::divide(one, z).value, inf);
  EXPECT_EQ(alu::divide(z, z).value, nd);
  EXPECT_EQ(alu::divide(one, inf).value, z);
  EXPECT_EQ(alu::multiply(z, inf).value, nd);
  EXPECT_EQ(alu::add_variant(inf, inf, Transform::identity, Transform::negate).value, nd);
  EXPECT_EQ(alu::add_variant(inf, inf, Transform::identity, Transform::identity).value, inf);
  EXPECT_EQ(alu::add_variant(one, one, Transform::identity, Transform::negate).value, z);
  EXPECT_EQ(alu::sqrt_op(num("-4"), false).value, nd);
  EXPECT_EQ(alu::sqrt_op(z, true).value, z);
}

TEST(Alu, OverflowAndUnderflow) {
  const Number big = num("0.9e15"), tiny = num("0.1e-15");
  const auto over = alu::multiply(big, big);
  EXPECT_EQ(over.value, Number::infinite());
  EXPECT_EQ(over.status, alu::Status::overflow);
  const auto under = alu::multiply(tiny, tiny);
  EXPECT_EQ(under.value, Number::zero());
  EXPECT_EQ(under.status, alu::Status::underflow);
}

TEST(Alu, MultiplesStore) {
  const Significand9 s(87'654'321);
  const alu::MultiplesStore m(s);
  for (int i = 1; i <= 9; ++i) EXPECT_EQ(m[i].value(), (87'654'321ull * static_cast<unsigned>(i)) % 1'000'000'000ull);
}

TEST(Alu, DivisionDigitsMatchLongDivision) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20'000; ++i) {
    const auto y = static_cast<std::uint32_t>(10'000'000 + rng() % 90'000'000);
    const auto x = static_cast<std::uint32_t>(10'000'000 + rng() % 90'000'000);
    const auto steps = alu::division_steps(Significand9(x), Significand9(y));
    const auto ref = oracle::long_division(x, y);
    for (std::size_t j = 0; j < steps.size(); ++j) {
      ASSERT_EQ(steps[j].quotient_digit, ref.digits[j]) << x << "/" << y << " digit " << j;
      ASSERT_EQ(steps[j].rest.value(), ref.rests[j]);
    }
  }
}

TEST(Alu, DivisionCandidateCorrection) {
  // leading pairs agree but the full multiple is too large: the secondary adder wins
  const alu::MultiplesStore m(Significand9(12'999'999));
  const auto st = alu::division_step(Significand9(12'500'000), m);
  EXPECT_EQ(st.candidate, 1);
  EXPECT_LT(st.main_result, 0);
  EXPECT_EQ(st.quotient_digit, 0);
  EXPECT_EQ(st.new_rest.value(), 12'500'000u);
}

TEST(Alu, SquareRootSteps) {
  const auto steps = alu::sqrt_steps({2, 0, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_EQ(steps.back().root, 141'421'356u);
  for (const auto& st : steps) {
    EXPECT_EQ(oracle::BigInt(st.root) * st.root + st.rest, oracle::BigInt(st.consumed));
    EXPECT_EQ(oracle::BigInt(st.root), boost::multiprecision::sqrt(oracle::BigInt(st.consumed)));
  }
  EXPECT_EQ(steps[0].subtrahends, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(steps[1].subtrahends, (std::vector<std::uint64_t>{21, 23, 25, 27}));
}

TEST(Alu, RadicandPairingByExponentParity) {
  const Number even = Number::from_significand(false, 12'345'678, 2);
  const Number odd = Number::from_significand(false, 12'345'678, 3);
  EXPECT_EQ(alu::radicand_pairs(even), (std::vector<int>{12, 34, 56, 78, 0, 0, 0, 0, 0}));
  EXPECT_EQ(alu::radicand_pairs(odd), (std::vector<int>{1, 23, 45, 67, 80, 0, 0, 0, 0}));
  EXPECT_EQ(alu::sqrt_op(num("1225"), false).value, num("35"));
  EXPECT_EQ(alu::sqrt_op(num("122.5"), false).value, oracle::chain::sqrt(num("122.5")));
}

TEST(Alu, NormalizeOperandShiftsLeadingZeros) {
  const Number n = parse_plugged("+0.00012345e+05");
  EXPECT_EQ(alu::normalize_operand(n), num("12.345"));
  EXPECT_EQ(alu::normalize_operand(parse_plugged("+0.00000000e+03")), Number::zero());
}
