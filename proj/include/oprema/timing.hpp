#pragma once

// Pulse-count timing. A new clock pulse starts every 6 2/3 ms, so the
// activation wave advances 150 relays per second. Instruction times are
// whole pulse counts; milliseconds are kept as exact fractions.

#include <cstdint>
#include <numeric>
#include <ratio>
#include <string>

namespace oprema {

enum class OpKind : std::uint8_t { add, mul, div, sqrt_pos, sqrt_neg, jgt, jze, jinf, mov, stop };

struct TimingModel {
  using PulsePeriodMs = std::ratio<20, 3>;
  static constexpr int kPulsesPerSecond = 150;

  static constexpr int kAdd = 18;   // 120 ms
  static constexpr int kMul = 120;  // 800 ms
  static constexpr int kDiv = 120;  // 800 ms
  static constexpr int kSqrt = 180; // 1200 ms
  // Not published; estimates.
  static constexpr int kMov = 18;
  static constexpr int kJump = 6;
  static constexpr int kStop = 6;

  static constexpr int pulses_for(OpKind k) {
    switch (k) {
      case OpKind::add: return kAdd;
      case OpKind::mul: return kMul;
      case OpKind::div: return kDiv;
      case OpKind::sqrt_pos:
      case OpKind::sqrt_neg: return kSqrt;
      case OpKind::jgt:
      case OpKind::jze:
      case OpKind::jinf: return kJump;
      case OpKind::mov: return kMov;
      case OpKind::stop: return kStop;
    }
    return 0;
  }
};

static_assert(TimingModel::PulsePeriodMs::num * TimingModel::kPulsesPerSecond ==
              1000 * TimingModel::PulsePeriodMs::den);

/// An exact duration in milliseconds: pulses * 20/3.
struct Millis {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Millis of_pulses(std::int64_t pulses) {
    Millis m{pulses * TimingModel::PulsePeriodMs::num, TimingModel::PulsePeriodMs::den};
    const std::int64_t g = std::gcd(m.num, m.den);
    if (g > 1) {
      m.num /= g;
      m.den /= g;
    }
    return m;
  }

  /// "800" or "40/3"
  std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

  friend bool operator==(const Millis&, const Millis&) = default;
};

}  // namespace oprema
