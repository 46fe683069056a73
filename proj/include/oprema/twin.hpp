#pragma once

// Twin mode: two machines run the same program in lockstep and their
// observables are compared after every instruction. A disagreement idles
// both machines until a resolution is chosen.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oprema/control.hpp"
#include "oprema/machine.hpp"

namespace oprema::twin {

enum class Side : std::uint8_t { a, b };

struct FaultSpec {
  Side side = Side::b;
  std::int64_t trigger = 1;  // evaluation index from which the fault is live
  FaultSite site;
  int bit = 1;
  bool stuck = false;
};

inline std::string site_name(const FaultSite& s) {
  switch (s.kind) {
    case FaultSite::Kind::reg: return "R" + std::to_string(s.index);
    case FaultSite::Kind::program: return "P" + std::to_string(s.index);
    case FaultSite::Kind::constant: return "C" + std::to_string(s.index);
    case FaultSite::Kind::cyclic: return "Y" + std::to_string(s.index) + "." + std::to_string(s.row);
    case FaultSite::Kind::operand: return "IN" + std::to_string(s.index);
  }
  return "?";
}

inline std::string format_fault(const FaultSpec& f) {
  return std::string(f.side == Side::a ? "A" : "B") + ":" + std::to_string(f.trigger) + ":" + site_name(f.site) + "." +
         std::to_string(f.bit) + ":" + (f.stuck ? "stuck" : "transient");
}

/// Parses "B:12:R0.7:transient". Locations: R<reg>.<bit>, P<row>.<bit>,
/// C<row>.<bit>, Y<unit>.<row>.<bit>, IN1.<bit>, IN2.<bit>.
inline FaultSpec parse_fault(std::string_view text) {
  auto fail = [&](const std::string& why) { return Error(Errc::invalid_location, why + ": '" + std::string(text) + "'"); };
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = text.find(':', start);
    parts.emplace_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 4) throw fail("expected SIDE:STEP:LOCATION:PERSISTENCE");
  auto number = [&](const std::string& s) {
    if (s.empty() || s.size() > 9) throw fail("bad number '" + s + "'");
    for (char c : s)
      if (c < '0' || c > '9') throw fail("bad number '" + s + "'");
    return std::stoi(s);
  };
  FaultSpec f;
  if (parts[0] == "A" || parts[0] == "a") f.side = Side::a;
  else if (parts[0] == "B" || parts[0] == "b") f.side = Side::b;
  else throw fail("side must be A or B");
  f.trigger = number(parts[1]);
  if (parts[3] == "transient") f.stuck = false;
  else if (parts[3] == "stuck") f.stuck = true;
  else throw fail("persistence must be transient or stuck");

  const std::string& loc = parts[2];
  std::vector<std::string> fields;
  std::size_t p = 0;
  for (;;) {
    const auto dot = loc.find('.', p);
    fields.push_back(loc.substr(p, dot == std::string::npos ? dot : dot - p));
    if (dot == std::string::npos) break;
    p = dot + 1;
  }
  const std::string head = fields[0];
  auto prefixed = [&](std::string_view prefix) { return head.size() > prefix.size() && head.compare(0, prefix.size(), prefix) == 0; };
  if (prefixed("IN")) {
    f.site = {FaultSite::Kind::operand, number(head.substr(2)), 0};
  } else if (prefixed("R")) {
    f.site = {FaultSite::Kind::reg, number(head.substr(1)), 0};
  } else if (prefixed("P")) {
    f.site = {FaultSite::Kind::program, number(head.substr(1)), 0};
  } else if (prefixed("C")) {
    f.site = {FaultSite::Kind::constant, number(head.substr(1)), 0};
  } else if (prefixed("Y")) {
    if (fields.size() != 3) throw fail("cyclic locations are Y<unit>.<row>.<bit>");
    f.site = {FaultSite::Kind::cyclic, number(head.substr(1)), number(fields[1])};
  } else {
    throw fail("unknown location");
  }
  const std::size_t want = f.site.kind == FaultSite::Kind::cyclic ? 3 : 2;
  if (fields.size() != want) throw fail("missing bit number");
  f.bit = number(fields.back());
  return f;
}

/// Rejects locations outside the machine.
inline void check_location(const FaultSpec& f, const PlugboardImage& img) {
  auto fail = [&](const std::string& why) { return Error(Errc::invalid_location, format_fault(f) + ": " + why); };
  const FaultSite& s = f.site;
  int width = Row39::kWidth;
  switch (s.kind) {
    case FaultSite::Kind::reg:
      if (s.index < 0 || s.index >= kRegisters) throw fail("no such register");
      break;
    case FaultSite::Kind::program:
      if (s.index < 0 || s.index >= kProgramRows) throw fail("no such program row");
      width = kRowBits;
      break;
    case FaultSite::Kind::constant:
      if (s.index < 0 || s.index >= kConstantRows) throw fail("no such constant row");
      break;
    case FaultSite::Kind::cyclic:
      if (s.index < 0 || s.index >= kCyclicUnits) throw fail("no such cyclic unit");
      if (s.row < 0 || s.row >= img.cyclic[static_cast<std::size_t>(s.index)].size()) throw fail("no such cyclic row");
      break;
    case FaultSite::Kind::operand:
      if (s.index != 1 && s.index != 2) throw fail("operand bus is IN1 or IN2");
      break;
  }
  if (f.bit < 1 || f.bit > width) throw fail("bit outside 1.." + std::to_string(width));
  if (f.trigger < 1) throw fail("trigger step starts at 1");
}

enum class Observable : std::uint8_t { none, error, written, printed, next_pc, halted };

inline const char* observable_name(Observable o) {
  switch (o) {
    case Observable::none: return "none";
    case Observable::error: return "error";
    case Observable::written: return "written";
    case Observable::printed: return "printed";
    case Observable::next_pc: return "next_pc";
    case Observable::halted: return "halted";
  }
  return "?";
}

/// What the comparison circuit sees after one instruction.
struct Observation {
  std::optional<std::string> error;
  std::optional<std::pair<int, Row39>> written;
  std::optional<std::string> printed;
  int next_pc = 0;
  bool halted = false;

  /// Bits shown in the mismatch report for one observable.
  std::string show(Observable o) const {
    switch (o) {
      case Observable::error: return error.value_or("-");
      case Observable::written:
        return written ? "R" + std::to_string(written->first) + "=" + written->second.hex() : std::string("-");
      case Observable::printed: return printed.value_or("-");
      case Observable::next_pc: return std::to_string(next_pc);
      case Observable::halted: return halted ? "1" : "0";
      case Observable::none: break;
    }
    return "";
  }
};

inline Observable first_difference(const Observation& a, const Observation& b) {
  if (a.error != b.error) return Observable::error;
  if (a.written != b.written) return Observable::written;
  if (a.printed != b.printed) return Observable::printed;
  if (a.next_pc != b.next_pc) return Observable::next_pc;
  if (a.halted != b.halted) return Observable::halted;
  return Observable::none;
}

/// Steps one machine and records its observables; machine errors become an
/// observable instead of escaping.
inline Observation observe_step(MachineState& st, const PlugboardImage& img, control::TraceRecord* rec = nullptr) {
  Observation obs;
  try {
    control::TraceRecord r = control::step(st, img);
    if (r.result) obs.written = std::make_pair(r.result_register, encode_row(*r.result));
    obs.printed = r.printed;
    obs.next_pc = r.next_pc;
    obs.halted = r.halted;
    if (rec) *rec = std::move(r);
  } catch (const Error& e) {
    obs.error = std::string(errc_name(e.code()));
    st.mode = Mode::idle;
  }
  return obs;
}

enum class Action : std::uint8_t { repeat, insert, halt };

struct Resolution {
  Action action = Action::halt;
  std::optional<Number> value;  // insert: value to write (default: machine A's result)
  std::optional<int> reg;       // insert: target register (default: the instruction's)
};

inline const char* action_name(Action a) {
  switch (a) {
    case Action::repeat: return "repeat";
    case Action::insert: return "insert";
    case Action::halt: return "halt";
  }
  return "?";
}

/// Parses "repeat", "halt", "insert" or "insert:R<k>=<value>".
inline Resolution parse_resolution(std::string_view text) {
  if (text == "repeat") return {Action::repeat, {}, {}};
  if (text == "halt") return {Action::halt, {}, {}};
  if (text == "insert") return {Action::insert, {}, {}};
  if (text.substr(0, 8) == "insert:R") {
    const std::string_view rest = text.substr(8);
    const auto eq = rest.find('=');
    if (eq == std::string_view::npos || eq == 0) throw Error(Errc::syntax, "insert needs insert:R<k>=<value>");
    const std::string reg(rest.substr(0, eq));
    for (char c : reg)
      if (c < '0' || c > '9' || reg.size() > 2) throw Error(Errc::syntax, "bad register in '" + std::string(text) + "'");
    const int k = std::stoi(reg);
    if (k >= kRegisters) throw Error(Errc::invalid_operand, "no register R" + reg);
    return {Action::insert, parse_decimal(rest.substr(eq + 1)), k};
  }
  throw Error(Errc::syntax, "unknown policy '" + std::string(text) + "'");
}

/// Comma-separated resolutions, e.g. "repeat,repeat,halt".
inline std::vector<Resolution> parse_policy(std::string_view text) {
  std::vector<Resolution> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    out.push_back(parse_resolution(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Resolutions applied to successive mismatches; the last one repeats.
struct Policy {
  std::vector<Resolution> script{Resolution{Action::halt, {}, {}}};

  const Resolution& at(std::size_t i) const { return script.empty() ? fallback() : script[std::min(i, script.size() - 1)]; }
  static const Resolution& fallback() {
    static const Resolution halt{Action::halt, {}, {}};
    return halt;
  }
};

struct MismatchRecord {
  std::int64_t step = 0;
  int pc = 0;
  Observable observable = Observable::none;
  std::string a_bits;
  std::string b_bits;
  std::string resolution;  // filled when resolved
};

inline std::string format_mismatch(const MismatchRecord& m) {
  return "mismatch step=" + std::to_string(m.step) + " pc=" + std::to_string(m.pc) + " observable=" +
         observable_name(m.observable) + " A=" + m.a_bits + " B=" + m.b_bits +
         " resolution=" + (m.resolution.empty() ? "-" : m.resolution);
}

struct LockstepResult {
  bool agree = true;
  control::TraceRecord record;  // machine A's record when in agreement
  MismatchRecord mismatch;
};

class TwinSession {
 public:
  explicit TwinSession(const PlugboardImage& image) : TwinSession(image, image) {}
  TwinSession(const PlugboardImage& image_a, const PlugboardImage& image_b)
      : img_a_(image_a), img_b_(image_b), a_(initial_state(image_a)), b_(initial_state(image_b)) {}

  const MachineState& machine(Side s) const { return s == Side::a ? a_ : b_; }
  MachineState& machine(Side s) { return s == Side::a ? a_ : b_; }
  const PlugboardImage& image(Side s) const { return s == Side::a ? img_a_ : img_b_; }
  bool in_mismatch() const { return pending_.has_value(); }
  bool finished() const { return finished_; }
  std::int64_t steps() const { return steps_; }
  const std::vector<MismatchRecord>& log() const { return log_; }
  /// Set when both machines raised the same machine error.
  const std::optional<std::string>& error() const { return error_; }

  /// Arms a fault; it stays transparent until its trigger evaluation.
  void inject(const FaultSpec& f) {
    check_location(f, image(f.side));
    machine(f.side).faults.push_back(ArmedFault{f.site, f.bit, f.stuck, f.trigger, false});
  }

  void start() {
    control::start(a_);
    control::start(b_);
  }

  /// Runs one instruction on both machines and compares the results. On
  /// agreement both advance; otherwise both idle before the instruction.
  LockstepResult lockstep_step() {
    if (in_mismatch()) throw Error(Errc::idle, "twin session waits for a mismatch resolution");
    if (a_.pc != b_.pc) throw Error(Errc::desynced_pc, "A at " + std::to_string(a_.pc) + ", B at " + std::to_string(b_.pc));
    MachineState next_a = a_;
    MachineState next_b = b_;
    LockstepResult res;
    control::TraceRecord rec_b;
    const Observation oa = observe_step(next_a, img_a_, &res.record);
    const Observation ob = observe_step(next_b, img_b_, &rec_b);
    ++steps_;
    const Observable diff = first_difference(oa, ob);
    if (diff == Observable::none) {
      a_ = std::move(next_a);
      b_ = std::move(next_b);
      if (oa.error) error_ = "both machines failed at pc " + std::to_string(a_.pc) + ": " + *oa.error;
      if (oa.halted || oa.error) finished_ = true;
      return res;
    }
    res.agree = false;
    res.mismatch = MismatchRecord{next_a.evaluations, a_.pc, diff, oa.show(diff), ob.show(diff), {}};
    // Both sit idle at the failed instruction; fault bookkeeping and the
    // spent time of the attempt are kept.
    freeze(a_, next_a);
    freeze(b_, next_b);
    pending_ = Pending{std::move(next_a), std::move(next_b), oa, log_.size()};
    log_.push_back(res.mismatch);
    return res;
  }

  void resolve(const Resolution& r) {
    if (!pending_) throw Error(Errc::not_in_mismatch, "no mismatch to resolve");
    Pending p = std::move(*pending_);
    pending_.reset();
    std::string how = action_name(r.action);
    switch (r.action) {
      case Action::repeat:
        start();
        break;
      case Action::insert: {
        const int reg = r.reg.value_or(p.a_obs.written ? p.a_obs.written->first : 0);
        const Number value = r.value.value_or(p.a_obs.written ? decode_row(p.a_obs.written->second)
                                                              : a_.registers[static_cast<std::size_t>(reg)]);
        a_ = std::move(p.a);
        b_ = std::move(p.b);
        a_.registers[static_cast<std::size_t>(reg)] = value;
        b_.registers[static_cast<std::size_t>(reg)] = value;
        b_.pc = a_.pc;
        b_.cyclic_pos = a_.cyclic_pos;
        const bool halted = p.a_obs.halted;
        a_.mode = b_.mode = halted ? Mode::idle : Mode::running;
        if (halted) finished_ = true;
        how += " " + format_number(value) + " -> R" + std::to_string(reg);
        break;
      }
      case Action::halt:
        finished_ = true;
        break;
    }
    log_[p.log_index].resolution = how;
  }

 private:
  struct Pending {
    MachineState a;
    MachineState b;
    Observation a_obs;
    std::size_t log_index;
  };

  static void freeze(MachineState& pre, const MachineState& post) {
    pre.faults = post.faults;
    pre.evaluations = post.evaluations;
    pre.pulse_count = post.pulse_count;
    pre.mode = Mode::idle;
  }

  PlugboardImage img_a_;
  PlugboardImage img_b_;
  MachineState a_;
  MachineState b_;
  std::optional<Pending> pending_;
  std::vector<MismatchRecord> log_;
  std::int64_t steps_ = 0;
  bool finished_ = false;
  std::optional<std::string> error_;
};

enum class TwinStatus : std::uint8_t { completed, halted_on_mismatch, retries_exhausted, step_limit, machine_error };

inline const char* twin_status_name(TwinStatus s) {
  switch (s) {
    case TwinStatus::completed: return "completed";
    case TwinStatus::halted_on_mismatch: return "halted on mismatch";
    case TwinStatus::retries_exhausted: return "retries exhausted";
    case TwinStatus::step_limit: return "step limit";
    case TwinStatus::machine_error: return "machine error";
  }
  return "?";
}

struct TwinReport {
  TwinStatus status = TwinStatus::completed;
  std::vector<MismatchRecord> mismatches;
  std::vector<control::TraceRecord> trace;  // agreed steps
  std::int64_t steps = 0;
};

struct TwinLimits {
  std::int64_t max_steps = 1'000'000;
  int max_retries = 10;  // consecutive repeats of one instruction
  bool keep_trace = false;
};

/// Decides each mismatch; receives the mismatch and its index in the log.
using Decider = std::function<Resolution(const MismatchRecord&, std::size_t)>;

inline TwinReport run_twin(TwinSession& s, const Decider& decide, const TwinLimits& limits = {}) {
  TwinReport rep;
  s.start();
  int retries = 0;
  while (!s.finished()) {
    if (s.steps() >= limits.max_steps) {
      rep.status = TwinStatus::step_limit;
      break;
    }
    LockstepResult r = s.lockstep_step();
    if (r.agree) {
      retries = 0;
      if (limits.keep_trace) rep.trace.push_back(std::move(r.record));
      continue;
    }
    Resolution res = decide(r.mismatch, s.log().size() - 1);
    if (res.action == Action::repeat && retries >= limits.max_retries) {
      s.resolve(Resolution{Action::halt, {}, {}});
      rep.status = TwinStatus::retries_exhausted;
      break;
    }
    retries = res.action == Action::repeat ? retries + 1 : 0;
    s.resolve(res);
    if (res.action == Action::halt) {
      rep.status = TwinStatus::halted_on_mismatch;
      break;
    }
  }
  if (s.error()) rep.status = TwinStatus::machine_error;
  rep.mismatches = s.log();
  rep.steps = s.steps();
  return rep;
}

inline TwinReport run_twin(TwinSession& s, const Policy& policy, const TwinLimits& limits = {}) {
  return run_twin(s, [&](const MismatchRecord&, std::size_t i) { return policy.at(i); }, limits);
}

}  // namespace oprema::twin
