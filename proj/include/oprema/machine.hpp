#pragma once

// The machine model: plugboards, address space, instruction rows and the
// semantics of a single instruction.
//
// Instruction row, 27 bits, most significant first:
//
//   Adr1(6) Op(6) Adr2(6) Adr3(5) Adr4(4)
//
// Op is the 5-bit operation code followed by the print bit. Adr4 holds the
// socket occupancy of the two jump socket pairs: conditional (left, right)
// then unconditional (left, right). A jump from row i1 to row i2 is a cable
// from the left socket of i1 to the right socket of i2-1; the cables
// themselves are kept as wiring maps next to the rows.
//
// Operand addresses: 0..27 constants C0..C27, 28..31 cyclic units Y0..Y3,
// 32..63 registers R0..R31. Adr3 names a register directly (0..31).

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oprema/alu.hpp"
#include "oprema/error.hpp"
#include "oprema/numeric.hpp"
#include "oprema/timing.hpp"

namespace oprema {

inline constexpr int kProgramRows = 300;
inline constexpr int kConstantRows = 28;
inline constexpr int kCyclicUnits = 4;
inline constexpr int kCyclicRows = 80;
inline constexpr int kRegisters = 32;
inline constexpr int kRowBits = 27;
inline constexpr std::uint32_t kRowMask = (1u << kRowBits) - 1;

inline constexpr int kFirstCyclicAddress = kConstantRows;                 // 28
inline constexpr int kFirstRegisterAddress = kConstantRows + kCyclicUnits; // 32
static_assert(kFirstRegisterAddress + kRegisters == 64);

// ---------------------------------------------------------------------------
// Operation codes

namespace opcode {
inline constexpr int kMul = 16;
inline constexpr int kDiv = 17;
inline constexpr int kSqrtPos = 18;
inline constexpr int kSqrtNeg = 19;
inline constexpr int kJgt = 20;
inline constexpr int kJze = 21;
inline constexpr int kJinf = 22;
inline constexpr int kMov = 23;
inline constexpr int kStop = 24;
inline constexpr int kLastValid = 24;

/// Codes 0..15: operand-1 form in the high two bits, operand-2 form in the low two.
constexpr int add(alu::Transform t1, alu::Transform t2) { return static_cast<int>(t1) * 4 + static_cast<int>(t2); }
}  // namespace opcode

struct Opcode {
  int code = 0;
  bool print = false;

  constexpr bool valid() const { return code >= 0 && code <= opcode::kLastValid; }
  constexpr bool is_add() const { return code < 16; }

  constexpr OpKind kind() const {
    if (code < 16) return OpKind::add;
    switch (code) {
      case opcode::kMul: return OpKind::mul;
      case opcode::kDiv: return OpKind::div;
      case opcode::kSqrtPos: return OpKind::sqrt_pos;
      case opcode::kSqrtNeg: return OpKind::sqrt_neg;
      case opcode::kJgt: return OpKind::jgt;
      case opcode::kJze: return OpKind::jze;
      case opcode::kJinf: return OpKind::jinf;
      case opcode::kMov: return OpKind::mov;
      default: return OpKind::stop;
    }
  }
  constexpr alu::Transform first_form() const { return static_cast<alu::Transform>(code / 4); }
  constexpr alu::Transform second_form() const { return static_cast<alu::Transform>(code % 4); }

  /// The operation writes Adr3.
  constexpr bool writes() const {
    const OpKind k = kind();
    return k == OpKind::add || k == OpKind::mul || k == OpKind::div || k == OpKind::sqrt_pos ||
           k == OpKind::sqrt_neg || k == OpKind::mov;
  }
  constexpr bool is_jump() const {
    const OpKind k = kind();
    return k == OpKind::jgt || k == OpKind::jze || k == OpKind::jinf;
  }
  constexpr bool reads_first() const {
    const OpKind k = kind();
    return k != OpKind::sqrt_pos && k != OpKind::sqrt_neg && (k != OpKind::stop || print);
  }
  constexpr bool reads_second() const {
    const OpKind k = kind();
    return k == OpKind::add || k == OpKind::mul || k == OpKind::div || k == OpKind::sqrt_pos || k == OpKind::sqrt_neg;
  }

  friend constexpr bool operator==(const Opcode&, const Opcode&) = default;
};

struct Sockets {
  bool cond_from = false;
  bool cond_to = false;
  bool uncond_from = false;
  bool uncond_to = false;

  constexpr unsigned nibble() const {
    return (cond_from ? 8u : 0u) | (cond_to ? 4u : 0u) | (uncond_from ? 2u : 0u) | (uncond_to ? 1u : 0u);
  }
  static constexpr Sockets from_nibble(unsigned n) { return {(n & 8u) != 0, (n & 4u) != 0, (n & 2u) != 0, (n & 1u) != 0}; }
  friend constexpr bool operator==(const Sockets&, const Sockets&) = default;
};

struct Instruction {
  int adr1 = 0;  // 0..63
  Opcode op;
  int adr2 = 0;  // 0..63
  int adr3 = 0;  // 0..31
  Sockets sockets;
  std::optional<int> cond_target;
  std::optional<int> uncond_target;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

inline std::uint32_t encode_instruction(const Instruction& in) {
  const auto op6 = static_cast<std::uint32_t>((in.op.code << 1) | (in.op.print ? 1 : 0));
  return (static_cast<std::uint32_t>(in.adr1 & 63) << 21) | ((op6 & 63u) << 15) |
         (static_cast<std::uint32_t>(in.adr2 & 63) << 9) | (static_cast<std::uint32_t>(in.adr3 & 31) << 4) |
         in.sockets.nibble();
}

/// Fields of a row without any validation.
inline Instruction split_row(std::uint32_t row) {
  Instruction in;
  in.adr1 = static_cast<int>((row >> 21) & 63u);
  const auto op6 = (row >> 15) & 63u;
  in.op = Opcode{static_cast<int>(op6 >> 1), (op6 & 1u) != 0};
  in.adr2 = static_cast<int>((row >> 9) & 63u);
  in.adr3 = static_cast<int>((row >> 4) & 31u);
  in.sockets = Sockets::from_nibble(row & 15u);
  return in;
}

// ---------------------------------------------------------------------------
// Plugboards

/// One cyclic memory: up to 80 number rows plus jump cables that shorten or
/// reorder the cycle (row -> next row to be read).
class CyclicTable {
 public:
  int size() const { return static_cast<int>(rows_.size()); }
  bool empty() const { return rows_.empty(); }
  const std::vector<Row39>& rows() const { return rows_; }
  const Row39& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  const std::map<int, int>& jumps() const { return jumps_; }

  void append(const Row39& r) {
    if (size() >= kCyclicRows) throw Error(Errc::capacity_exceeded, "cyclic memory holds at most 80 numbers");
    rows_.push_back(r);
  }
  void set_row(int i, const Row39& r) { rows_.at(static_cast<std::size_t>(i)) = r; }

  /// At most one cable leaves each row.
  void add_jump(int from, int to) {
    if (!jumps_.emplace(from, to).second)
      throw Error(Errc::duplicate_jump, "cyclic row " + std::to_string(from) + " already has a jump");
  }

  /// Position after a read of row `pos`.
  int next(int pos) const {
    if (auto it = jumps_.find(pos); it != jumps_.end()) return it->second;
    return pos + 1 >= size() ? 0 : pos + 1;
  }

  friend bool operator==(const CyclicTable&, const CyclicTable&) = default;

 private:
  std::vector<Row39> rows_;
  std::map<int, int> jumps_;
};

struct StartConfig {
  int pc = 0;
  std::array<int, kCyclicUnits> positions{};
  friend bool operator==(const StartConfig&, const StartConfig&) = default;
};

/// Complete content of one machine's plugboards.
struct PlugboardImage {
  std::array<std::optional<std::uint32_t>, kProgramRows> program{};
  std::map<int, int> cond_jumps;    // from row -> target row
  std::map<int, int> uncond_jumps;  // from row -> target row
  std::array<std::optional<Row39>, kConstantRows> constants{};
  std::array<CyclicTable, kCyclicUnits> cyclic{};
  StartConfig start;

  /// Row bits as the machine reads them; an unplugged row reads as all zeros.
  std::uint32_t row_bits(int pc) const { return program[static_cast<std::size_t>(pc)].value_or(0u); }

  friend bool operator==(const PlugboardImage&, const PlugboardImage&) = default;
};

inline int successor_row(int pc) { return pc + 1 >= kProgramRows ? 0 : pc + 1; }
inline int predecessor_row(int pc) { return pc == 0 ? kProgramRows - 1 : pc - 1; }

/// Socket occupancy implied by the wiring maps for one row.
inline Sockets wired_sockets(const PlugboardImage& img, int row) {
  Sockets s;
  s.cond_from = img.cond_jumps.count(row) != 0;
  s.uncond_from = img.uncond_jumps.count(row) != 0;
  const int arrival = successor_row(row);
  for (const auto& [from, to] : img.cond_jumps)
    if (to == arrival) s.cond_to = true;
  for (const auto& [from, to] : img.uncond_jumps)
    if (to == arrival) s.uncond_to = true;
  return s;
}

/// Checks that rows, cables and start settings fit together. Every cable end
/// must sit on an occupied row whose Adr4 bits show it, and vice versa.
inline void validate_image(const PlugboardImage& img) {
  auto bad = [](const std::string& m) { return Error(Errc::inconsistent_wiring, m); };
  for (const auto* jumps : {&img.cond_jumps, &img.uncond_jumps})
    for (const auto& [from, to] : *jumps)
      if (from < 0 || from >= kProgramRows || to < 0 || to >= kProgramRows)
        throw bad("jump " + std::to_string(from) + " -> " + std::to_string(to) + " out of range");
  for (int r = 0; r < kProgramRows; ++r) {
    const auto& row = img.program[static_cast<std::size_t>(r)];
    const Sockets want = wired_sockets(img, r);
    if (!row) {
      if (want.nibble() != 0) throw bad("cable ends on unplugged row " + std::to_string(r));
      continue;
    }
    if (*row > kRowMask) throw Error(Errc::malformed, "program row " + std::to_string(r) + " wider than 27 bits");
    if (Sockets::from_nibble(*row & 15u) != want)
      throw bad("Adr4 sockets of row " + std::to_string(r) + " disagree with the cables");
  }
  for (int k = 0; k < kCyclicUnits; ++k) {
    const auto& t = img.cyclic[static_cast<std::size_t>(k)];
    if (t.size() > kCyclicRows) throw Error(Errc::capacity_exceeded, "cyclic unit over capacity");
    for (const auto& [from, to] : t.jumps())
      if (from < 0 || from >= t.size() || to < 0 || to >= t.size())
        throw bad("cyclic unit " + std::to_string(k) + " jump " + std::to_string(from) + " -> " + std::to_string(to) +
                  " outside the table");
    const int pos = img.start.positions[static_cast<std::size_t>(k)];
    if (pos < 0 || (t.empty() ? pos != 0 : pos >= t.size()))
      throw Error(Errc::malformed, "start position of Y" + std::to_string(k) + " outside the table");
  }
  if (img.start.pc < 0 || img.start.pc >= kProgramRows) throw Error(Errc::malformed, "start pc out of range");
}

/// Bits held by the image's plugged rows plus the register file.
inline std::int64_t storage_bits(const PlugboardImage& img) {
  std::int64_t bits = 0;
  for (const auto& r : img.program)
    if (r) bits += kRowBits;
  for (const auto& c : img.cyclic) bits += std::int64_t{c.size()} * (Row39::kWidth + 2);
  for (const auto& c : img.constants)
    if (c) bits += Row39::kWidth;
  return bits + std::int64_t{kRegisters} * Row39::kWidth;
}

/// An image with every row of every plugboard in use.
inline PlugboardImage full_capacity_image() {
  PlugboardImage img;
  for (auto& r : img.program) r = 0u;
  for (auto& c : img.constants) c = encode_row(Number::zero());
  for (auto& t : img.cyclic)
    for (int i = 0; i < kCyclicRows; ++i) t.append(encode_row(Number::zero()));
  return img;
}

// ---------------------------------------------------------------------------
// Address space

enum class Space : std::uint8_t { constant, cyclic, reg };

struct Operand {
  Space space;
  int index;
};

inline Operand resolve_address(int addr) {
  if (addr < 0 || addr > 63) throw Error(Errc::invalid_operand, "address " + std::to_string(addr));
  if (addr < kFirstCyclicAddress) return {Space::constant, addr};
  if (addr < kFirstRegisterAddress) return {Space::cyclic, addr - kFirstCyclicAddress};
  return {Space::reg, addr - kFirstRegisterAddress};
}

inline std::string address_name(int addr) {
  const Operand o = resolve_address(addr);
  switch (o.space) {
    case Space::constant: return "C" + std::to_string(o.index);
    case Space::cyclic: return "Y" + std::to_string(o.index);
    case Space::reg: return "R" + std::to_string(o.index);
  }
  return "?";
}

inline constexpr int register_address(int reg) { return kFirstRegisterAddress + reg; }

// ---------------------------------------------------------------------------
// Machine state and read faults

/// A location whose reads can be corrupted (used by the twin-mode harness).
struct FaultSite {
  enum class Kind : std::uint8_t { reg, program, constant, cyclic, operand };
  Kind kind = Kind::reg;
  int index = 0;  // register / program row / constant row / cyclic unit / operand 1 or 2
  int row = 0;    // cyclic row
  friend bool operator==(const FaultSite&, const FaultSite&) = default;
};

/// One flipped bit armed on a machine. A transient fault corrupts the first
/// read of its site at or after the trigger evaluation and is then spent; a
/// stuck fault corrupts every such read.
struct ArmedFault {
  FaultSite site;
  int bit = 1;
  bool stuck = false;
  std::int64_t trigger = 0;
  bool spent = false;
  friend bool operator==(const ArmedFault&, const ArmedFault&) = default;
};

enum class Mode : std::uint8_t { idle, running };

struct MachineState {
  int pc = 0;
  std::array<Number, kRegisters> registers{};
  std::array<int, kCyclicUnits> cyclic_pos{};
  Mode mode = Mode::idle;
  bool stop_latch = false;
  std::int64_t pulse_count = 0;
  std::int64_t evaluations = 0;  // instruction evaluations started so far
  std::vector<std::string> output;
  std::vector<std::string> diagnostics;
  std::vector<ArmedFault> faults;
};

/// Fresh machine at the image's start settings, idle until started.
inline MachineState initial_state(const PlugboardImage& img) {
  MachineState s;
  s.pc = img.start.pc;
  s.cyclic_pos = img.start.positions;
  return s;
}

namespace detail {

template <typename Flip>
inline void apply_faults(MachineState& st, const FaultSite& site, Flip&& flip) {
  for (auto& f : st.faults) {
    if (f.spent || f.site != site || st.evaluations < f.trigger) continue;
    flip(f.bit);
    if (!f.stuck) f.spent = true;
  }
}

inline Number corrupt_number(MachineState& st, const FaultSite& site, const Number& n) {
  if (st.faults.empty()) return n;
  Row39 r = encode_row(n);
  bool touched = false;
  apply_faults(st, site, [&](int bit) {
    r.flip(bit);
    touched = true;
  });
  return touched ? decode_row(r) : n;
}

inline Row39 corrupt_row(MachineState& st, const FaultSite& site, Row39 r) {
  if (!st.faults.empty()) apply_faults(st, site, [&](int bit) { r.flip(bit); });
  return r;
}

}  // namespace detail

/// Fetches the current row with any program faults applied.
inline std::uint32_t fetch_row(MachineState& st, const PlugboardImage& img) {
  std::uint32_t bits = img.row_bits(st.pc);
  if (!st.faults.empty())
    detail::apply_faults(st, {FaultSite::Kind::program, st.pc, 0}, [&](int bit) { bits ^= 1u << (bit - 1); });
  return bits;
}

/// Decodes a row and resolves its jump targets from the image's cables.
inline Instruction decode_instruction(std::uint32_t row, int row_index, const PlugboardImage& wiring) {
  Instruction in = split_row(row);
  if (!in.op.valid())
    throw Error(Errc::invalid_opcode, "operation code " + std::to_string(in.op.code) + " at row " + std::to_string(row_index));
  const Sockets wired = wired_sockets(wiring, row_index);
  if (wired != in.sockets)
    throw Error(Errc::wiring_mismatch, "Adr4 sockets of row " + std::to_string(row_index) + " do not match the cables");
  if (in.sockets.cond_from) in.cond_target = wiring.cond_jumps.at(row_index);
  if (in.sockets.uncond_from) in.uncond_target = wiring.uncond_jumps.at(row_index);
  if (in.op.writes()) {
    const int dest = register_address(in.adr3);
    if ((in.op.reads_first() && in.adr1 == dest) || (in.op.reads_second() && in.adr2 == dest))
      throw Error(Errc::write_conflict, "row " + std::to_string(row_index) + " writes R" + std::to_string(in.adr3) +
                                            " which it also reads");
  }
  return in;
}

/// Reads one operand. Plugboard rows are normalized on the way in; reading a
/// cyclic unit returns its current number and advances it. Unplugged rows
/// read as zero and leave a diagnostic.
inline Number read_operand(MachineState& st, const PlugboardImage& img, int addr) {
  const Operand o = resolve_address(addr);
  switch (o.space) {
    case Space::reg:
      return detail::corrupt_number(st, {FaultSite::Kind::reg, o.index, 0}, st.registers[static_cast<std::size_t>(o.index)]);
    case Space::constant: {
      const auto& row = img.constants[static_cast<std::size_t>(o.index)];
      if (!row) {
        st.diagnostics.push_back("unplugged constant C" + std::to_string(o.index) + " read as zero");
        return Number::zero();
      }
      return alu::normalize_operand(decode_row(detail::corrupt_row(st, {FaultSite::Kind::constant, o.index, 0}, *row)));
    }
    case Space::cyclic: {
      const auto& table = img.cyclic[static_cast<std::size_t>(o.index)];
      if (table.empty()) {
        st.diagnostics.push_back("unplugged cyclic memory Y" + std::to_string(o.index) + " read as zero");
        return Number::zero();
      }
      int& pos = st.cyclic_pos[static_cast<std::size_t>(o.index)];
      const Row39 row = detail::corrupt_row(st, {FaultSite::Kind::cyclic, o.index, pos}, table.row(pos));
      pos = table.next(pos);
      return alu::normalize_operand(decode_row(row));
    }
  }
  return Number::zero();
}

/// Value of an operand without side effects (no cyclic advance, no faults).
inline Number peek_operand(const MachineState& st, const PlugboardImage& img, int addr) {
  MachineState copy;
  copy.registers = st.registers;
  copy.cyclic_pos = st.cyclic_pos;
  return read_operand(copy, img, addr);
}

// ---------------------------------------------------------------------------
// Single instruction

struct StepOutcome {
  std::optional<std::pair<int, Number>> written;  // register, value
  std::optional<std::string> printed;
  int next_pc = 0;
  bool halted = false;
  bool jumped = false;
  int pulses = 0;
  std::vector<Number> operands;
  alu::Status status = alu::Status::ok;
};

inline bool positive(const Number& n) { return n.is_finite() && !n.negative() && n.digit(1) > 0; }

/// Executes one decoded instruction: register write, print, cyclic advances
/// and the new pc. Timing and run control are left to the caller.
inline StepOutcome execute_instruction(MachineState& st, const PlugboardImage& img, const Instruction& in) {
  StepOutcome out;
  out.pulses = TimingModel::pulses_for(in.op.kind());
  auto read = [&](int addr, int bus) {
    Number v = read_operand(st, img, addr);
    v = detail::corrupt_number(st, {FaultSite::Kind::operand, bus, 0}, v);
    out.operands.push_back(v);
    return v;
  };

  std::optional<alu::Result> result;
  std::optional<Number> tested;
  bool take_cond = false;
  switch (in.op.kind()) {
    case OpKind::add: {
      const Number a = read(in.adr1, 1);
      const Number b = read(in.adr2, 2);
      result = alu::add_variant(a, b, in.op.first_form(), in.op.second_form());
      break;
    }
    case OpKind::mul: {
      const Number a = read(in.adr1, 1);
      const Number b = read(in.adr2, 2);
      result = alu::multiply(a, b);
      break;
    }
    case OpKind::div: {
      const Number a = read(in.adr1, 1);
      const Number b = read(in.adr2, 2);
      result = alu::divide(a, b);
      break;
    }
    case OpKind::sqrt_pos:
    case OpKind::sqrt_neg:
      result = alu::sqrt_op(read(in.adr2, 2), in.op.kind() == OpKind::sqrt_neg);
      break;
    case OpKind::mov:
      result = alu::Result{alu::normalize_operand(read(in.adr1, 1))};
      break;
    case OpKind::jgt:
      tested = alu::normalize_operand(read(in.adr1, 1));
      take_cond = positive(*tested);
      break;
    case OpKind::jze:
      tested = alu::normalize_operand(read(in.adr1, 1));
      take_cond = tested->is_zero();
      break;
    case OpKind::jinf:
      tested = alu::normalize_operand(read(in.adr1, 1));
      take_cond = tested->is_infinite();
      break;
    case OpKind::stop:
      out.halted = true;
      if (in.op.print) tested = alu::normalize_operand(read(in.adr1, 1));
      break;
  }

  if (result) {
    st.registers[static_cast<std::size_t>(in.adr3)] = result->value;
    out.written = std::make_pair(in.adr3, result->value);
    out.status = result->status;
    if (result->status != alu::Status::ok)
      st.diagnostics.push_back(std::string(result->status == alu::Status::overflow ? "exponent overflow" : "exponent underflow") +
                               " at row " + std::to_string(st.pc));
  }
  if (in.op.print) {
    out.printed = format_number(result ? result->value : tested.value_or(Number::zero()));
    st.output.push_back(*out.printed);
  }
  if (take_cond && in.cond_target) {
    out.next_pc = *in.cond_target;
    out.jumped = true;
  } else if (in.uncond_target) {
    out.next_pc = *in.uncond_target;
    out.jumped = true;
  } else {
    out.next_pc = successor_row(st.pc);
  }
  st.pc = out.next_pc;
  return out;
}

// ---------------------------------------------------------------------------
// Text form of instructions (trace lines, disassembly)

inline std::string operand_form(alu::Transform t, int addr) {
  const std::string a = address_name(addr);
  switch (t) {
    case alu::Transform::identity: return "+" + a;
    case alu::Transform::negate: return "-" + a;
    case alu::Transform::abs: return "+|" + a + "|";
    case alu::Transform::negabs: return "-|" + a + "|";
  }
  return a;
}

using TargetNamer = std::function<std::string(int)>;

inline std::string format_instruction(const Instruction& in, const TargetNamer& target = {}) {
  auto name = [&](int t) { return target ? target(t) : std::to_string(t); };
  const std::string dest = " -> R" + std::to_string(in.adr3);
  std::string s;
  switch (in.op.kind()) {
    case OpKind::add:
      s = "ADD " + operand_form(in.op.first_form(), in.adr1) + " " + operand_form(in.op.second_form(), in.adr2) + dest;
      break;
    case OpKind::mul: s = "MUL " + address_name(in.adr1) + " " + address_name(in.adr2) + dest; break;
    case OpKind::div: s = "DIV " + address_name(in.adr1) + " " + address_name(in.adr2) + dest; break;
    case OpKind::sqrt_pos: s = "SQR+ " + address_name(in.adr2) + dest; break;
    case OpKind::sqrt_neg: s = "SQR- " + address_name(in.adr2) + dest; break;
    case OpKind::mov: s = "MOV " + address_name(in.adr1) + dest; break;
    case OpKind::jgt:
    case OpKind::jze:
    case OpKind::jinf:
      s = std::string(in.op.kind() == OpKind::jgt ? "JGT " : in.op.kind() == OpKind::jze ? "JZE " : "JINF ") +
          address_name(in.adr1);
      if (in.cond_target) s += ", " + name(*in.cond_target);
      break;
    case OpKind::stop:
      s = "STOP";
      if (in.op.print) s += " " + address_name(in.adr1);
      break;
  }
  if (in.op.print) s += " [P]";
  if (in.uncond_target) s += " GOTO " + name(*in.uncond_target);
  return s;
}

/// The row the assembler would produce for this instruction's text; rows
/// that differ (stray bits in unused fields, cond cables on non-jumps) have
/// no mnemonic spelling.
inline bool has_canonical_spelling(const Instruction& in) {
  if (!in.op.valid()) return false;
  const OpKind k = in.op.kind();
  if (!in.op.reads_first() && in.adr1 != 0) return false;
  if (!in.op.reads_second() && in.adr2 != 0) return false;
  if (!in.op.writes() && in.adr3 != 0) return false;
  if (k != OpKind::jgt && k != OpKind::jze && k != OpKind::jinf && in.sockets.cond_from) return false;
  return true;
}

}  // namespace oprema
