#pragma once

// Property suites behind `oprema verify` and the acceptance test: each
// check returns one result line.

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oprema/alu.hpp"
#include "oprema/assembler.hpp"
#include "oprema/control.hpp"
#include "oprema/demos.hpp"
#include "oprema/image_io.hpp"
#include "oprema/machine.hpp"
#include "oprema/numeric.hpp"
#include "oprema/oracle.hpp"
#include "oprema/twin.hpp"

namespace oprema::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
  double limit_seconds = 0;  // 0 = no limit
};

using RoundNormFn = std::function<std::uint64_t(std::uint64_t)>;

inline RoundNormFn emulator_round_norm() {
  return [](std::uint64_t f) { return std::uint64_t{alu::round_norm(alu::Significand9(static_cast<std::uint32_t>(f))).frame.value()}; };
}

/// roundNorm with the odd-digit rule replaced by ties-away rounding.
inline RoundNormFn mutant_round_norm() {
  return [](std::uint64_t f) { return f / 10 + (f % 10 >= 5 ? 1 : 0); };
}

namespace detail {

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) {
      ++failed_;
      if (failures_.size() < 5) failures_.push_back(what);
    }
  }
  bool ok() const { return failed_ == 0; }
  int total() const { return total_; }
  std::string failures() const {
    std::string s = std::to_string(failed_) + " of " + std::to_string(total_) + " checks failed";
    for (const auto& f : failures_) s += "; " + f;
    return s;
  }

 private:
  int total_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

template <typename F>
CheckResult timed(int id, std::string name, double limit, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.limit_seconds = limit;
  if (limit > 0 && r.seconds > limit) {
    r.passed = false;
    r.detail += " (took " + std::to_string(r.seconds) + " s, limit " + std::to_string(limit) + " s)";
  }
  return r;
}

inline std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Random operands

inline std::uint32_t random_significand(std::mt19937_64& rng) {
  return static_cast<std::uint32_t>(std::uniform_int_distribution<std::uint32_t>(10'000'000, 99'999'999)(rng));
}

inline Number random_number(std::mt19937_64& rng, int min_exp, int max_exp) {
  const bool neg = (rng() & 1u) != 0;
  return Number::from_significand(neg, random_significand(rng), std::uniform_int_distribution<int>(min_exp, max_exp)(rng));
}

/// Any row the image format can hold: random rows, random cables with their
/// sockets, constants and cyclic tables (including non-canonical bits).
inline PlugboardImage random_image(std::mt19937_64& rng) {
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
  auto below = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto random_row39 = [&]() {
    if (chance(0.2)) return Row39{rng() & Row39::kMask};
    if (chance(0.1)) {
      const Number s[] = {Number::zero(), Number::infinite(), Number::indeterminate()};
      return encode_row(s[below(3)]);
    }
    std::array<std::uint8_t, kDigits> d{};
    for (auto& x : d) x = static_cast<std::uint8_t>(below(10));
    return encode_row(Number::finite(chance(0.5), d, below(31) - 15));
  };

  PlugboardImage img;
  const double fill = std::uniform_real_distribution<double>(0, 1)(rng);
  for (auto& row : img.program)
    if (chance(fill)) {
      if (chance(0.3)) {
        row = static_cast<std::uint32_t>(rng()) & kRowMask & ~15u;
      } else {
        Instruction in;
        in.op.code = below(25);
        in.op.print = chance(0.3);
        in.adr1 = below(64);
        in.adr2 = below(64);
        in.adr3 = below(32);
        if (!in.op.reads_first() && chance(0.8)) in.adr1 = 0;
        if (!in.op.reads_second() && chance(0.8)) in.adr2 = 0;
        if (!in.op.writes() && chance(0.8)) in.adr3 = 0;
        row = encode_instruction(in) & ~15u;
      }
    }
  std::vector<int> occupied;
  for (int r = 0; r < kProgramRows; ++r)
    if (img.program[static_cast<std::size_t>(r)]) occupied.push_back(r);
  for (int r : occupied) {
    if (chance(0.15)) img.cond_jumps[r] = below(kProgramRows);
    if (chance(0.15)) img.uncond_jumps[r] = below(kProgramRows);
  }
  for (const auto* jumps : {&img.cond_jumps, &img.uncond_jumps})
    for (const auto& [from, to] : *jumps) {
      auto& row = img.program[static_cast<std::size_t>(predecessor_row(to))];
      if (!row) row = 0u;
    }
  for (int r = 0; r < kProgramRows; ++r)
    if (auto& row = img.program[static_cast<std::size_t>(r)]) *row = (*row & ~15u) | wired_sockets(img, r).nibble();

  for (auto& c : img.constants)
    if (chance(0.4)) c = random_row39();
  for (int k = 0; k < kCyclicUnits; ++k) {
    auto& t = img.cyclic[static_cast<std::size_t>(k)];
    if (chance(0.3)) continue;
    const int n = 1 + below(kCyclicRows);
    for (int i = 0; i < n; ++i) t.append(random_row39());
    for (int i = 0; i < n; ++i)
      if (chance(0.05)) t.add_jump(i, below(n));
    img.start.positions[static_cast<std::size_t>(k)] = below(n);
  }
  img.start.pc = below(kProgramRows);
  return img;
}

// ---------------------------------------------------------------------------
// 1. Worked examples

inline CheckResult worked_examples() {
  return detail::timed(1, "worked-example fidelity", 1.0, [](CheckResult& r) {
    detail::Checker c;
    using alu::Significand9;
    const auto rn1 = alu::round_norm(Significand9::parse("1 2222 2219")).frame.str();
    const auto rn2 = alu::round_norm(Significand9::parse("1 2222 2221")).frame.str();
    c.expect(rn1 == "0 1222 2221", "roundNorm(1 2222 2219) = " + rn1);
    c.expect(rn2 == "0 1222 2223", "roundNorm(1 2222 2221) = " + rn2);

    const auto rta = alu::round_ties_away_add5(Significand9::parse("0 9999 9995")).str();
    c.expect(rta == "1 0000 0000", "roundTiesToAway(0 9999 9995) = " + rta);
    c.expect(oracle::rta_add5(99'999'995) == 100'000'000, "oracle add-5 rounding");

    const auto rtte = oracle::frame_str(oracle::rtte_shift(199'999'995));
    c.expect(rtte == "0 2000 0000", "RTTE(1 9999 9995) = " + rtte);

    const alu::MultiplesStore m(Significand9::parse("0 2010 0000"));
    const auto st = alu::division_step(Significand9::parse("0 8000 0000"), m);
    c.expect(st.candidate == 4, "division candidate " + std::to_string(st.candidate));
    c.expect(st.main_result < 0 && st.secondary_result >= 0, "main adder negative, secondary nonnegative");
    c.expect(st.quotient_digit == 3, "division digit " + std::to_string(st.quotient_digit));

    const auto root = alu::sqrt_op(parse_decimal("1225"), false).value;
    c.expect(root == parse_decimal("35"), "sqrt(1225) = " + format_number(root));

    const Significand9 sum(Significand9::parse("0 5000 0000").value() + Significand9::parse("0 6000 0000").value());
    c.expect(sum.str() == "1 1000 0000", "frame sum " + sum.str());
    for (int e : {-3, 0, 7}) {
      const auto n = alu::normalize(sum, e, false).value;
      c.expect(n == Number::from_significand(false, 11'000'000, e + 1), "normalize(1 1000 0000) at e=" + std::to_string(e));
      const auto added = alu::add_variant(Number::from_significand(false, 50'000'000, e), Number::from_significand(false, 60'000'000, e),
                                          alu::Transform::identity, alu::Transform::identity).value;
      c.expect(added == n, "0.5 + 0.6 at e=" + std::to_string(e) + " gives " + format_number(added));
    }
    r.passed = c.ok();
    r.detail = c.ok() ? std::to_string(c.total()) + " exact checks" : c.failures();
  });
}

// ---------------------------------------------------------------------------
// 2. Rounding statistics

inline CheckResult rounding_statistics(const RoundNormFn& round_norm = emulator_round_norm()) {
  return detail::timed(2, "rounding statistics", 1.0, [&](CheckResult& r) {
    const auto rows = oracle::enumerate_rounding_errors(round_norm);
    const auto s = oracle::summarize(rows);
    bool odd_at_5 = true;
    for (const auto& row : rows)
      if (row.d8 == 5 && row.norm_last_digit % 2 == 0) odd_at_5 = false;
    const bool drift = s.signed_norm == 0;
    const bool ratio = s.count == 100 && s.abs_norm * 10 == s.abs_rta * 18 && s.abs_norm == 450 && s.abs_rta == 250;
    r.passed = drift && ratio && odd_at_5;
    r.detail = "sum signed roundNorm error = " + std::to_string(s.signed_norm) + ", mean |roundNorm| = " + detail::fmt(s.mean_abs_norm()) +
               ", mean |roundTiesToAway| = " + detail::fmt(s.mean_abs_rta()) + ", ratio = " +
               detail::fmt(s.mean_abs_norm() / s.mean_abs_rta()) + ", d8=5 gives odd d7: " + (odd_at_5 ? "yes" : "no");
  });
}

/// The 100-row table of signed errors in units of d8.
inline std::string rounding_table(const RoundNormFn& round_norm = emulator_round_norm()) {
  std::string out = "d7\\d8 " ;
  for (int d8 = 0; d8 <= 9; ++d8) out += "   " + std::to_string(d8) + "     ";
  out += "   (roundNorm / roundTiesToAway)\n";
  const auto rows = oracle::enumerate_rounding_errors(round_norm);
  for (int d7 = 0; d7 <= 9; ++d7) {
    out += "  " + std::to_string(d7) + "   ";
    for (int d8 = 0; d8 <= 9; ++d8) {
      const auto& row = rows[static_cast<std::size_t>(d7 * 10 + d8)];
      char cell[16];
      std::snprintf(cell, sizeof cell, "%+3d/%+3d  ", row.norm_error, row.rta_error);
      out += cell;
    }
    out += "\n";
  }
  const auto s = oracle::summarize(rows);
  out += "mean |error|: roundNorm " + detail::fmt(s.mean_abs_norm()) + ", roundTiesToAway " + detail::fmt(s.mean_abs_rta()) +
         "; sum of signed errors: roundNorm " + std::to_string(s.signed_norm) + ", roundTiesToAway " + std::to_string(s.signed_rta) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Division digits

inline CheckResult division_digits(int random_pairs = 100'000, std::uint64_t seed = 3) {
  return detail::timed(3, "division digit equivalence", 60.0, [&](CheckResult& r) {
    detail::Checker c;
    long digits = 0;
    auto check_pair = [&](std::uint32_t x, std::uint32_t y) {
      const auto steps = alu::division_steps(alu::Significand9(x), alu::Significand9(y));
      const auto ref = oracle::long_division(x, y);
      bool same = true, invariant = true;
      for (std::size_t j = 0; j < steps.size(); ++j) {
        same = same && steps[j].quotient_digit == ref.digits[j] && steps[j].rest.value() == ref.rests[j];
        invariant = invariant && steps[j].new_rest.value() < y;
        ++digits;
      }
      c.expect(same, "digits differ for " + oracle::frame_str(x) + " / " + oracle::frame_str(y));
      c.expect(invariant, "rest invariant broken for " + oracle::frame_str(x) + " / " + oracle::frame_str(y));
    };
    std::mt19937_64 rng(seed);
    for (int i = 0; i < random_pairs; ++i) check_pair(random_significand(rng), random_significand(rng));
    const std::uint32_t tails[] = {0, 999'999};
    for (std::uint32_t px = 10; px <= 99; ++px)
      for (std::uint32_t py = 10; py <= 99; ++py) {
        for (auto tx : tails)
          for (auto ty : tails) check_pair(px * 1'000'000 + tx, py * 1'000'000 + ty);
        check_pair(px * 1'000'000 + static_cast<std::uint32_t>(rng() % 1'000'000), py * 1'000'000 + static_cast<std::uint32_t>(rng() % 1'000'000));
      }
    r.passed = c.ok();
    r.detail = c.ok() ? std::to_string(c.total() / 2) + " pairs, " + std::to_string(digits) + " digits match long division" : c.failures();
  });
}

// ---------------------------------------------------------------------------
// 4. Accuracy

struct AccuracyStats {
  double max_ulps = 0;
  long samples = 0;
  long over = 0;
};

inline CheckResult arithmetic_accuracy(int samples = 100'000, std::uint64_t seed = 4) {
  return detail::timed(4, "arithmetic accuracy", 60.0, [&](CheckResult& r) {
    using oracle::ExactDecimal;
    std::mt19937_64 rng(seed);
    detail::Checker c;
    std::map<std::string, AccuracyStats> stats;
    auto record = [&](const std::string& op, const Number& got, const Number& want, const std::string& what) {
      auto& s = stats[op];
      ++s.samples;
      const bool ok = oracle::within_one_ulp(got, want);
      if (const auto d = oracle::ulp_distance(got, want)) s.max_ulps = std::max(s.max_ulps, *d);
      if (!ok) ++s.over;
      c.expect(ok, op + " " + what + " = " + format_number(got) + ", exact " + format_number(want));
    };
    auto transformed = [](int f, const ExactDecimal& v) {
      const bool neg = f == 1 ? !v.negative() : f == 2 ? false : f == 3 ? true : v.negative();
      oracle::BigInt m = boost::multiprecision::abs(v.coef);
      return ExactDecimal{neg ? oracle::BigInt(-m) : m, v.scale};
    };
    for (int i = 0; i < samples; ++i) {
      const Number x = random_number(rng, -14, 14), y = random_number(rng, -14, 14);
      const int f1 = static_cast<int>(rng() % 4), f2 = static_cast<int>(rng() % 4);
      const Number got = alu::add_variant(x, y, static_cast<alu::Transform>(f1), static_cast<alu::Transform>(f2)).value;
      const Number want = oracle::round_to_format(oracle::exact_add(transformed(f1, ExactDecimal::of(x)), transformed(f2, ExactDecimal::of(y))));
      record("add", got, want, format_number(x) + " " + std::to_string(f1) + std::to_string(f2) + " " + format_number(y));
    }
    for (int i = 0; i < samples; ++i) {
      const Number x = random_number(rng, -7, 7), y = random_number(rng, -7, 7);
      record("mul", alu::multiply(x, y).value, oracle::round_to_format(oracle::exact_mul(ExactDecimal::of(x), ExactDecimal::of(y))),
             format_number(x) + " * " + format_number(y));
    }
    for (int i = 0; i < samples; ++i) {
      const Number x = random_number(rng, -7, 7), y = random_number(rng, -7, 7);
      record("div", alu::divide(x, y).value, oracle::round_to_format(oracle::exact_div(ExactDecimal::of(x), ExactDecimal::of(y))),
             format_number(x) + " / " + format_number(y));
    }
    for (int i = 0; i < samples; ++i) {
      const Number x = random_number(rng, -7, 7).with_sign(false);
      record("sqrt", alu::sqrt_op(x, false).value, oracle::round_to_format(oracle::exact_sqrt(ExactDecimal::of(x))),
             "sqrt " + format_number(x));
    }
    long identities = 0;
    for (int i = 0; i < samples; ++i) {
      const Number x = random_number(rng, -15, 15);
      const Number diff = alu::add_variant(x, x, alu::Transform::identity, alu::Transform::negate).value;
      const Number quot = alu::divide(x, x).value;
      c.expect(diff == Number::zero(), "x - x for " + format_number(x) + " gives " + format_number(diff));
      c.expect(quot == parse_decimal("1"), "x / x for " + format_number(x) + " gives " + format_number(quot));
      identities += 2;
    }
    r.passed = c.ok();
    std::string d;
    for (const auto& [op, s] : stats) d += op + " max " + detail::fmt(s.max_ulps) + " ulp (" + std::to_string(s.over) + " over 1); ";
    d += std::to_string(identities) + " x-x / x/x identities";
    r.detail = c.ok() ? d : c.failures() + " | " + d;
  });
}

// ---------------------------------------------------------------------------
// 5. Encoding and storage accounting

inline CheckResult isa_storage(std::uint64_t seed = 5) {
  return detail::timed(5, "ISA/storage accounting", 0, [&](CheckResult& r) {
    detail::Checker c;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 20'000; ++i) {
      Instruction in;
      in.adr1 = static_cast<int>(rng() % 64);
      in.op = Opcode{static_cast<int>(rng() % 32), (rng() & 1u) != 0};
      in.adr2 = static_cast<int>(rng() % 64);
      in.adr3 = static_cast<int>(rng() % 32);
      in.sockets = Sockets::from_nibble(static_cast<unsigned>(rng() % 16));
      const std::uint32_t bits = encode_instruction(in);
      c.expect(bits <= kRowMask, "instruction wider than 27 bits");
      c.expect(split_row(bits) == in, "instruction fields do not survive 27 bits");
      c.expect(encode_instruction(split_row(bits)) == bits, "row bits do not survive decoding");
    }
    for (int i = 0; i < 20'000; ++i) {
      std::array<std::uint8_t, kDigits> d{};
      for (auto& x : d) x = static_cast<std::uint8_t>(rng() % 10);
      const Number n = Number::finite((rng() & 1u) != 0, d, static_cast<int>(rng() % 31) - 15);
      const Row39 row = encode_row(n);
      c.expect(row.bits <= Row39::kMask && decode_row(row) == n, "number " + format_number(n) + " does not survive 39 bits");
    }
    for (const Number& s : {Number::zero(), Number::infinite(), Number::indeterminate()})
      c.expect(decode_row(encode_row(s)) == s, "special " + format_number(s));

    auto capacity_error = [&](const std::string& src, const std::string& expect_msg) {
      try {
        asm_::assemble(src);
        return false;
      } catch (const Error& e) {
        return e.code() == Errc::capacity_exceeded && std::string(e.what()).find(expect_msg) != std::string::npos;
      }
    };
    std::string prog = ".prog\n";
    for (int i = 0; i < 301; ++i) prog += "  STOP\n";
    c.expect(capacity_error(prog, "program section over capacity by 1"), "301 instructions accepted");
    std::string consts = ".const\n";
    for (int i = 0; i < 30; ++i) consts += "  " + std::to_string(i + 1) + "\n";
    c.expect(capacity_error(consts, "const section over capacity by 2"), "30 constants accepted");
    std::string cyc = ".cyclic 2\n";
    for (int i = 0; i < 81; ++i) cyc += "  1\n";
    c.expect(capacity_error(cyc, "cyclic 2 section over capacity by 1"), "81 cyclic rows accepted");
    try {
      CyclicTable t;
      for (int i = 0; i <= kCyclicRows; ++i) t.append(Row39{});
      c.expect(false, "cyclic table took 81 rows");
    } catch (const Error& e) {
      c.expect(e.code() == Errc::capacity_exceeded, "cyclic overflow error code");
    }

    const PlugboardImage full = full_capacity_image();
    const auto bits = storage_bits(full);
    c.expect(bits == 23'560, "full-capacity bits = " + std::to_string(bits));
    c.expect(kProgramRows * kRowBits == 8'100 && kCyclicUnits * kCyclicRows * 41 == 13'120 && kConstantRows * 39 == 1'092 &&
                 kRegisters * 39 == 1'248,
             "storage table parts");

    std::array<int, 3> spaces{};
    for (int a = 0; a < 64; ++a) ++spaces[static_cast<std::size_t>(resolve_address(a).space)];
    c.expect(spaces[0] == 28 && spaces[1] == 4 && spaces[2] == 32, "address partition");
    bool rejected = false;
    try {
      resolve_address(64);
    } catch (const Error&) {
      rejected = true;
    }
    c.expect(rejected, "address 64 accepted");

    PlugboardImage wrap;
    wrap.program[299] = 0u;
    wrap.start.pc = 299;
    MachineState st = initial_state(wrap);
    control::start(st);
    const auto rec = control::step(st, wrap);
    c.expect(rec.next_pc == 0 && st.pc == 0 && successor_row(299) == 0, "pc after row 299 is " + std::to_string(st.pc));

    r.passed = c.ok();
    r.detail = c.ok() ? "27/39-bit round trips, capacities 300/28/4x80, " + std::to_string(bits) + " bits, 28+4+32 = 64, 299 -> 0"
                      : c.failures();
  });
}

// ---------------------------------------------------------------------------
// 6. Timing

inline CheckResult timing_model() {
  return detail::timed(6, "timing model", 0, [](CheckResult& r) {
    detail::Checker c;
    const PlugboardImage img = asm_::assemble(demos::timing_source());
    MachineState st = initial_state(img);
    const auto rep = control::run(st, img);
    c.expect(rep.status == control::RunStatus::halted && rep.trace.size() == 5, "timing demo did not halt after 5 steps");
    const char* names[] = {"ADD", "MUL", "DIV", "SQR+"};
    const std::int64_t ms[] = {120, 800, 800, 1200};
    std::string d;
    for (std::size_t i = 0; i < 4 && i < rep.trace.size(); ++i) {
      const auto& t = rep.trace[i];
      c.expect(t.mnemonic.rfind(names[i], 0) == 0, "step " + std::to_string(i + 1) + " is " + t.mnemonic);
      c.expect(t.op_ms() == Millis{ms[i], 1}, std::string(names[i]) + " took " + t.op_ms().str() + " ms");
      d += std::string(names[i]) + " " + t.op_ms().str() + " ms, ";
    }
    for (const auto& t : rep.trace) {
      const Millis m = t.ms();
      c.expect(m.num * 3 == t.pulses * 20 * m.den, "cumulative ms is not pulses x 20/3");
    }
    c.expect(Millis::of_pulses(TimingModel::kPulsesPerSecond) == Millis{1000, 1}, "150 pulses != 1 s");
    r.passed = c.ok();
    r.detail = c.ok() ? d + "150 pulses = " + Millis::of_pulses(150).str() + " ms" : c.failures();
  });
}

// ---------------------------------------------------------------------------
// 7. Cyclic memories and the ray trace

struct RaytraceReplay {
  std::vector<Number> printed;
  double max_op_ulps = 0;
  bool ops_within_one_ulp = true;
};

/// The ray trace written out operation by operation, with each operation's
/// error against its correctly rounded exact result.
inline RaytraceReplay replay_raytrace(const demos::RaytraceParams& p = {}) {
  using namespace oracle;
  RaytraceReplay out;
  auto check = [&](const Number& got, const Number& want) {
    if (const auto d = ulp_distance(got, want)) out.max_op_ulps = std::max(out.max_op_ulps, *d);
    if (!within_one_ulp(got, want)) out.ops_within_one_ulp = false;
    return got;
  };
  auto exact = [](const Number& n) { return ExactDecimal::of(n); };
  auto finite = [](const Number& a, const Number& b) { return (a.is_finite() || a.is_zero()) && (b.is_finite() || b.is_zero()); };
  auto add = [&](const Number& a, const Number& b, int f2) {
    const Number got = chain::add(a, b, 0, f2);
    if (finite(a, b)) {
      const ExactDecimal eb = exact(b);
      check(got, round_to_format(exact_add(exact(a), f2 ? ExactDecimal{-eb.coef, eb.scale} : eb)));
    }
    return got;
  };
  auto mul = [&](const Number& a, const Number& b) {
    const Number got = chain::mul(a, b);
    if (finite(a, b)) check(got, round_to_format(exact_mul(exact(a), exact(b))));
    return got;
  };
  auto div = [&](const Number& a, const Number& b) {
    const Number got = chain::div(a, b);
    if (finite(a, b) && !b.is_zero()) check(got, round_to_format(exact_div(exact(a), exact(b))));
    return got;
  };
  const std::size_t surfaces = p.radii.size();
  for (const auto& [y0, u0] : p.rays) {
    Number y = parse_decimal(y0), u = parse_decimal(u0), n = parse_decimal(p.indices[0]);
    for (std::size_t i = 1; i <= surfaces; ++i) {
      const Number n2 = parse_decimal(p.indices[i]);
      const Number bend = div(mul(y, add(n2, n, 1)), parse_decimal(p.radii[i - 1]));
      u = div(add(mul(n, u), bend, 1), n2);
      out.printed.push_back(u);
      y = add(y, mul(parse_decimal(p.distances[i - 1]), u), 0);
      out.printed.push_back(y);
      n = n2;
    }
  }
  return out;
}

inline CheckResult cyclic_memory() {
  return detail::timed(7, "cyclic memory behavior", 0, [](CheckResult& r) {
    detail::Checker c;
    // rows 0..9 hold 1..10; row 6 jumps back to row 2, so rows 7..9 are never read
    std::string src = ".cyclic 1\n";
    for (int i = 0; i < 10; ++i) src += std::string(i == 2 ? "back: " : "  ") + std::to_string(i + 1) + (i == 6 ? " @jump back" : "") + "\n";
    const PlugboardImage img = asm_::assemble(src);
    MachineState st = initial_state(img);
    bool seq_ok = true;
    for (int n = 0; n < 60; ++n) {
      const int expect_row = n < 7 ? n : 2 + (n - 2) % 5;
      const Number got = read_operand(st, img, kFirstCyclicAddress + 1);
      if (got != parse_decimal(std::to_string(expect_row + 1))) seq_ok = false;
    }
    c.expect(seq_ok, "wired cycle read order");

    // no wiring: period equals the table length
    const PlugboardImage plain = asm_::assemble(".cyclic 0\n  1\n  2\n  3\n.start\n  positions = 2, 0, 0, 0\n");
    MachineState ps = initial_state(plain);
    bool period_ok = true;
    for (int n = 0; n < 12; ++n)
      if (read_operand(ps, plain, kFirstCyclicAddress) != parse_decimal(std::to_string((n + 2) % 3 + 1))) period_ok = false;
    c.expect(period_ok, "unwired cycle read order");

    const PlugboardImage rt = asm_::assemble(demos::raytrace_source());
    MachineState rs = initial_state(rt);
    const auto rep = control::run(rs, rt);
    const RaytraceReplay ref = replay_raytrace();
    c.expect(rep.status == control::RunStatus::halted, "ray trace did not halt");
    c.expect(rs.output.size() == ref.printed.size(), "ray trace printed " + std::to_string(rs.output.size()) + " values");
    int mismatches = 0;
    for (std::size_t i = 0; i < std::min(rs.output.size(), ref.printed.size()); ++i)
      if (rs.output[i] != format_number(ref.printed[i])) ++mismatches;
    c.expect(mismatches == 0, std::to_string(mismatches) + " ray-trace values differ from the recomputation");
    c.expect(ref.ops_within_one_ulp, "a ray-trace operation is off by more than 1 ulp (" + detail::fmt(ref.max_op_ulps) + ")");
    r.passed = c.ok();
    r.detail = c.ok() ? "60 wired + 12 unwired reads in declared order; " + std::to_string(ref.printed.size()) +
                            " ray-trace values equal the recomputation, max per-op error " + detail::fmt(ref.max_op_ulps) + " ulp"
                      : c.failures();
  });
}

// ---------------------------------------------------------------------------
// 8. Twin mode

/// Step index at which a single faulty machine first shows a different
/// observable than a clean one; nullopt if it never does within the run.
inline std::optional<std::int64_t> first_observed_difference(const PlugboardImage& img, const twin::FaultSpec& f,
                                                             std::int64_t max_steps) {
  MachineState clean = initial_state(img), faulty = initial_state(img);
  faulty.faults.push_back(ArmedFault{f.site, f.bit, f.stuck, f.trigger, false});
  control::start(clean);
  control::start(faulty);
  for (std::int64_t s = 1; s <= max_steps; ++s) {
    const twin::Observation a = twin::observe_step(clean, img);
    const twin::Observation b = twin::observe_step(faulty, img);
    if (a.error != b.error || a.written != b.written || a.printed != b.printed || a.next_pc != b.next_pc || a.halted != b.halted) return s;
    if (a.halted || a.error) return std::nullopt;
  }
  return std::nullopt;
}

inline twin::FaultSpec random_fault(std::mt19937_64& rng, const PlugboardImage& img, std::int64_t steps) {
  twin::FaultSpec f;
  f.side = (rng() & 1u) ? twin::Side::a : twin::Side::b;
  f.trigger = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(steps));
  f.stuck = (rng() % 4) == 0;
  std::vector<int> units;
  for (int k = 0; k < kCyclicUnits; ++k)
    if (!img.cyclic[static_cast<std::size_t>(k)].empty()) units.push_back(k);
  for (;;) {
    switch (rng() % 5) {
      case 0: f.site = {FaultSite::Kind::reg, static_cast<int>(rng() % 16), 0}; break;
      case 1: f.site = {FaultSite::Kind::program, static_cast<int>(rng() % 24), 0}; break;
      case 2: f.site = {FaultSite::Kind::constant, static_cast<int>(rng() % 12), 0}; break;
      case 3: {
        if (units.empty()) continue;
        const int k = units[rng() % units.size()];
        f.site = {FaultSite::Kind::cyclic, k, static_cast<int>(rng() % static_cast<std::uint64_t>(img.cyclic[static_cast<std::size_t>(k)].size()))};
        break;
      }
      default: f.site = {FaultSite::Kind::operand, 1 + static_cast<int>(rng() % 2), 0}; break;
    }
    break;
  }
  f.bit = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(f.site.kind == FaultSite::Kind::program ? kRowBits : Row39::kWidth));
  return f;
}

inline CheckResult twin_mode(int faults_per_demo = 200, std::uint64_t seed = 8) {
  return detail::timed(8, "twin mode", 30.0, [&](CheckResult& r) {
    detail::Checker c;
    std::mt19937_64 rng(seed);
    const twin::Policy halt{{twin::Resolution{twin::Action::halt, {}, {}}}};
    const twin::Policy repeat{{twin::Resolution{twin::Action::repeat, {}, {}}}};
    int detected = 0, silent = 0;
    for (const auto& demo : demos::corpus()) {
      const PlugboardImage img = asm_::assemble(demo.source);
      twin::TwinSession clean(img);
      twin::TwinLimits limits;
      limits.keep_trace = true;
      const auto rep = twin::run_twin(clean, halt, limits);
      c.expect(rep.status == twin::TwinStatus::completed && rep.mismatches.empty(), demo.name + ": zero-fault run reported mismatches");
      // both machines' outputs identical
      c.expect(clean.machine(twin::Side::a).output == clean.machine(twin::Side::b).output, demo.name + ": outputs differ");
      const std::int64_t steps = rep.steps;

      for (int i = 0; i < faults_per_demo; ++i) {
        const twin::FaultSpec f = random_fault(rng, img, steps);
        const auto expect = first_observed_difference(img, f, steps + 10);
        twin::TwinSession s(img);
        s.inject(f);
        twin::TwinLimits lim;
        lim.max_steps = steps + 10;
        const auto fr = twin::run_twin(s, halt, lim);
        const auto got = fr.mismatches.empty() ? std::nullopt : std::optional<std::int64_t>(fr.mismatches.front().step);
        c.expect(got == expect, demo.name + " " + twin::format_fault(f) + ": reported at " + (got ? std::to_string(*got) : "-") +
                                    ", first difference at " + (expect ? std::to_string(*expect) : "-"));
        (expect ? detected : silent) += 1;
      }
    }

    // transient fault healed by repeating the instruction
    const PlugboardImage poly = asm_::assemble(demos::polynomial_source());
    MachineState ref = initial_state(poly);
    control::run(ref, poly, {100000, std::numeric_limits<std::int64_t>::max(), false});
    {
      twin::TwinSession s(poly);
      s.inject(twin::parse_fault("B:12:R0.7:transient"));
      const auto rep = twin::run_twin(s, repeat);
      c.expect(rep.status == twin::TwinStatus::completed, "transient + repeat ended with " + std::string(twin::twin_status_name(rep.status)));
      c.expect(rep.mismatches.size() == 1 && rep.mismatches[0].resolution == "repeat", "transient + repeat mismatch count");
      c.expect(s.machine(twin::Side::a).output == ref.output && s.machine(twin::Side::b).output == ref.output,
               "transient + repeat output differs from a clean run");
    }
    // stuck fault keeps failing
    {
      twin::TwinSession s(poly);
      s.inject(twin::parse_fault("A:5:P2.17:stuck"));
      twin::TwinLimits lim;
      lim.max_retries = 10;
      const auto rep = twin::run_twin(s, repeat, lim);
      c.expect(rep.status == twin::TwinStatus::retries_exhausted && rep.mismatches.size() == 11,
               "stuck + repeat: " + std::string(twin::twin_status_name(rep.status)) + " after " + std::to_string(rep.mismatches.size()) + " mismatches");
    }
    r.passed = c.ok();
    r.detail = c.ok() ? "demo corpus clean; " + std::to_string(detected) + " faults reported at their first observing step, " +
                            std::to_string(silent) + " masked faults unreported; transient+repeat converges; stuck+repeat gives up after 10 retries"
                      : c.failures();
  });
}

// ---------------------------------------------------------------------------
// 9. Polynomial experiment

inline std::vector<Number> replay_polynomial(const demos::PolynomialParams& p = {}) {
  namespace ch = oracle::chain;
  std::vector<Number> a;
  for (const auto& s : p.coefficients) a.push_back(parse_decimal(s));
  const Number h = parse_decimal(p.h);
  Number x = parse_decimal(p.x0);
  std::vector<Number> out;
  for (int i = 0; i < p.count; ++i) {
    Number v = ch::mul(a[0], x);
    for (std::size_t k = 1; k < a.size(); ++k) {
      v = ch::add(v, a[k]);
      if (k + 1 < a.size()) v = ch::mul(v, x);
    }
    out.push_back(v);
    x = ch::add(x, h);
  }
  return out;
}

inline CheckResult polynomial_experiment() {
  return detail::timed(9, "polynomial experiment", 0, [](CheckResult& r) {
    detail::Checker c;
    const PlugboardImage img = asm_::assemble(demos::polynomial_source());
    MachineState st = initial_state(img);
    const auto rep = control::run(st, img, {100000, std::numeric_limits<std::int64_t>::max(), false});
    const auto ref = replay_polynomial();
    c.expect(rep.status == control::RunStatus::halted, "polynomial demo did not halt");
    c.expect(st.output.size() == 151, "printed " + std::to_string(st.output.size()) + " values");
    int errors = 0;
    for (std::size_t i = 0; i < std::min(st.output.size(), ref.size()); ++i)
      if (st.output[i] != format_number(ref[i])) ++errors;
    c.expect(errors == 0, std::to_string(errors) + " printed values differ from the oracle chain");
    r.passed = c.ok();
    r.detail = c.ok() ? "halted after " + std::to_string(rep.steps) + " steps (" + rep.ms().str() + " ms), 151 values, errors found: 0"
                      : c.failures();
  });
}

// ---------------------------------------------------------------------------
// 10. Format round trips

inline CheckResult format_round_trips(int random_images = 1000, int mutations = 10'000, std::uint64_t seed = 10) {
  return detail::timed(10, "format round-trips", 0, [&](CheckResult& r) {
    detail::Checker c;
    std::mt19937_64 rng(seed);
    std::vector<PlugboardImage> corpus;
    for (const auto& d : demos::corpus()) corpus.push_back(asm_::assemble(d.source));
    corpus.emplace_back();
    for (int i = 0; i < random_images; ++i) corpus.push_back(random_image(rng));
    std::vector<image::Bytes> files;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& img = corpus[i];
      try {
        const std::string text = asm_::disassemble(img);
        c.expect(asm_::assemble(text) == img, "image " + std::to_string(i) + " changes through text");
        const image::Bytes b = image::save_image(img);
        const PlugboardImage back = image::load_image(b);
        c.expect(back == img, "image " + std::to_string(i) + " changes through bytes");
        c.expect(image::save_image(back) == b, "image " + std::to_string(i) + " bytes change");
        files.push_back(b);
      } catch (const Error& e) {
        c.expect(false, "image " + std::to_string(i) + ": " + e.what());
      }
    }
    int structured = 0, loaded = 0, other = 0;
    for (int i = 0; i < mutations && !files.empty(); ++i) {
      image::Bytes b = files[rng() % files.size()];
      switch (rng() % 4) {
        case 0: {  // flip bits
          const int n = 1 + static_cast<int>(rng() % 4);
          for (int k = 0; k < n && !b.empty(); ++k) b[rng() % b.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
          break;
        }
        case 1:  // truncate
          b.resize(rng() % (b.size() + 1));
          break;
        case 2:  // overwrite a byte
          if (!b.empty()) b[rng() % b.size()] = static_cast<std::uint8_t>(rng());
          break;
        default:  // insert bytes
          b.insert(b.begin() + static_cast<std::ptrdiff_t>(rng() % (b.size() + 1)), static_cast<std::uint8_t>(rng()));
          break;
      }
      try {
        const PlugboardImage img = image::load_image(b);
        ++loaded;
        c.expect(image::save_image(img) == b, "accepted mutant does not re-save identically");
      } catch (const Error&) {
        ++structured;
      } catch (...) {
        ++other;
      }
    }
    c.expect(other == 0, std::to_string(other) + " mutants raised unstructured exceptions");
    r.passed = c.ok();
    r.detail = c.ok() ? std::to_string(corpus.size()) + " images identical through text and bytes; " + std::to_string(mutations) +
                            " mutants: " + std::to_string(structured) + " structured errors, " + std::to_string(loaded) + " valid"
                      : c.failures();
  });
}

inline std::vector<CheckResult> run_all() {
  return {worked_examples(), rounding_statistics(), division_digits(), arithmetic_accuracy(), isa_storage(),
          timing_model(),    cyclic_memory(),       twin_mode(),       polynomial_experiment(), format_round_trips()};
}

}  // namespace oprema::verify
