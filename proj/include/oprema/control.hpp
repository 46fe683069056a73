#pragma once

// Run control: start/stop/idle, single steps with timing, run loops and
// trace records.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "oprema/machine.hpp"
#include "oprema/timing.hpp"

namespace oprema::control {

struct TraceRecord {
  std::int64_t step = 0;  // 1-based evaluation index
  int pc = 0;
  std::string mnemonic;
  std::vector<Number> operands;
  std::optional<Number> result;
  int result_register = -1;
  std::optional<std::string> printed;
  int next_pc = 0;
  std::int64_t pulses = 0;  // cumulative
  int op_pulses = 0;
  bool halted = false;

  Millis ms() const { return Millis::of_pulses(pulses); }
  Millis op_ms() const { return Millis::of_pulses(op_pulses); }
};

/// One tab-separated line: step, pc, mnemonic, operands, result, pulses, ms.
inline std::string format_trace(const TraceRecord& r) {
  std::string ops;
  for (std::size_t i = 0; i < r.operands.size(); ++i) {
    if (i) ops += ' ';
    ops += format_number(r.operands[i]);
  }
  if (ops.empty()) ops = "-";
  return std::to_string(r.step) + '\t' + std::to_string(r.pc) + '\t' + r.mnemonic + '\t' + ops + '\t' +
         (r.result ? format_number(*r.result) : std::string("-")) + '\t' + std::to_string(r.pulses) + '\t' + r.ms().str();
}

inline void start(MachineState& st) {
  st.mode = Mode::running;
  st.stop_latch = false;
}

inline void stop_button(MachineState& st) {
  if (st.mode == Mode::running) st.stop_latch = true;
}

/// Mnemonic for a row as the machine sees it; rows that do not decode are
/// shown as raw hex.
inline std::string describe_row(std::uint32_t bits, int pc, const PlugboardImage& img) {
  try {
    return format_instruction(decode_instruction(bits, pc, img));
  } catch (const Error&) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%07X", bits);
    return std::string(".raw ") + buf;
  }
}

/// Executes one instruction. Raises Idle when the machine is not running.
inline TraceRecord step(MachineState& st, const PlugboardImage& img) {
  if (st.mode != Mode::running) throw Error(Errc::idle, "machine is idle; press start");
  ++st.evaluations;
  TraceRecord rec;
  rec.step = st.evaluations;
  rec.pc = st.pc;
  const std::uint32_t bits = fetch_row(st, img);
  const Instruction in = decode_instruction(bits, st.pc, img);
  rec.mnemonic = format_instruction(in);
  const StepOutcome out = execute_instruction(st, img, in);
  st.pulse_count += out.pulses;
  rec.operands = out.operands;
  if (out.written) {
    rec.result_register = out.written->first;
    rec.result = out.written->second;
  }
  rec.printed = out.printed;
  rec.next_pc = out.next_pc;
  rec.pulses = st.pulse_count;
  rec.op_pulses = out.pulses;
  rec.halted = out.halted;
  if (out.halted || st.stop_latch) {
    st.mode = Mode::idle;
    st.stop_latch = false;
  }
  return rec;
}

struct Limits {
  std::int64_t max_steps = 1'000'000;
  std::int64_t max_pulses = std::numeric_limits<std::int64_t>::max();
  bool keep_trace = true;
};

enum class RunStatus { halted, stopped, step_limit, pulse_limit };

inline const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::halted: return "halted";
    case RunStatus::stopped: return "stopped";
    case RunStatus::step_limit: return "step limit";
    case RunStatus::pulse_limit: return "pulse limit";
  }
  return "?";
}

struct RunReport {
  RunStatus status = RunStatus::halted;
  std::vector<TraceRecord> trace;
  std::int64_t steps = 0;
  std::int64_t pulses = 0;  // pulses spent by this run

  Millis ms() const { return Millis::of_pulses(pulses); }
};

using Observer = std::function<void(const TraceRecord&)>;

/// Starts the machine if needed and steps until STOP, the stop latch or a
/// limit. Limits are reported in-band.
inline RunReport run(MachineState& st, const PlugboardImage& img, const Limits& limits = {}, const Observer& observer = {}) {
  RunReport rep;
  start(st);
  const std::int64_t pulses0 = st.pulse_count;
  for (;;) {
    if (rep.steps >= limits.max_steps) {
      rep.status = RunStatus::step_limit;
      break;
    }
    if (st.pulse_count - pulses0 >= limits.max_pulses) {
      rep.status = RunStatus::pulse_limit;
      break;
    }
    TraceRecord rec = step(st, img);
    ++rep.steps;
    if (observer) observer(rec);
    const bool halted = rec.halted;
    if (limits.keep_trace) rep.trace.push_back(std::move(rec));
    if (halted) {
      rep.status = RunStatus::halted;
      break;
    }
    if (st.mode == Mode::idle) {
      rep.status = RunStatus::stopped;
      break;
    }
  }
  if (rep.status == RunStatus::step_limit || rep.status == RunStatus::pulse_limit) st.mode = Mode::idle;
  rep.pulses = st.pulse_count - pulses0;
  return rep;
}

}  // namespace oprema::control
