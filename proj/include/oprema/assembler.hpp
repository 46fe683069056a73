#pragma once

// Text form of a plugboard image (.oprema) and its inverse.
//
//   .const            name = literal | C<n> = literal | literal
//   .cyclic <k>       [label:] literal [@jump target]
//   .prog             [label:] instruction, .org <row>
//   .start            pc = target, positions = a, b, c, d
//
// Comments run from ';' to the end of the line. See docs/formats.md.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oprema/error.hpp"
#include "oprema/machine.hpp"
#include "oprema/numeric.hpp"

namespace oprema::asm_ {

namespace detail {

struct Token {
  std::string text;
  int column = 1;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
      ++i;
      continue;
    }
    if (c == '=') {
      out.push_back({"=", static_cast<int>(i) + 1});
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != ',' && line[i] != '=') ++i;
    out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
  }
  return out;
}

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::optional<int> small_number(std::string_view s) {
  if (s.empty() || s.size() > 6) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

/// C<n>, Y<n> or R<n> with n in range, as an operand address.
inline std::optional<int> machine_address(std::string_view s) {
  if (s.size() < 2) return std::nullopt;
  const auto n = small_number(s.substr(1));
  if (!n) return std::nullopt;
  switch (std::toupper(static_cast<unsigned char>(s[0]))) {
    case 'C': return *n < kConstantRows ? std::optional<int>(*n) : std::nullopt;
    case 'Y': return *n < kCyclicUnits ? std::optional<int>(kFirstCyclicAddress + *n) : std::nullopt;
    case 'R': return *n < kRegisters ? std::optional<int>(kFirstRegisterAddress + *n) : std::nullopt;
    default: return std::nullopt;
  }
}

/// Names that look like machine locations cannot be labels.
inline bool reserved_name(std::string_view s) {
  if (s.size() < 2) return false;
  const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return (c == 'C' || c == 'Y' || c == 'R') && small_number(s.substr(1)).has_value();
}

inline std::string hex(std::uint64_t v, int width) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%0*llX", width, static_cast<unsigned long long>(v));
  return buf;
}

inline std::optional<std::uint64_t> parse_hex(std::string_view s) {
  if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X') || s.size() > 2 + 16) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : s.substr(2)) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else return std::nullopt;
    v = v * 16 + static_cast<unsigned>(d);
  }
  return v;
}

struct PendingJump {
  int from;
  std::string target;
  int line;
  int column;
};

}  // namespace detail

/// Number of rows each section holds after assembly.
struct Usage {
  int program = 0;
  int constants = 0;
  std::array<int, kCyclicUnits> cyclic{};
  std::int64_t bits = 0;
};

inline Usage usage(const PlugboardImage& img) {
  Usage u;
  for (const auto& r : img.program)
    if (r) ++u.program;
  for (const auto& c : img.constants)
    if (c) ++u.constants;
  for (int k = 0; k < kCyclicUnits; ++k) u.cyclic[static_cast<std::size_t>(k)] = img.cyclic[static_cast<std::size_t>(k)].size();
  u.bits = storage_bits(img);
  return u;
}

inline std::string usage_summary(const Usage& u) {
  std::string s = std::to_string(u.program) + "/300 instructions, " + std::to_string(u.constants) + "/28 constants";
  for (int k = 0; k < kCyclicUnits; ++k) s += ", Y" + std::to_string(k) + " " + std::to_string(u.cyclic[static_cast<std::size_t>(k)]) + "/80";
  s += ", " + std::to_string(u.bits) + " bits";
  return s;
}

class Assembler {
 public:
  PlugboardImage assemble(std::string_view source) {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= source.size()) {
      const auto nl = source.find('\n', pos);
      std::string_view line = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++line_no;
      line_ = line_no;
      if (const auto semi = line.find(';'); semi != std::string_view::npos) line = line.substr(0, semi);
      const auto tokens = detail::tokenize(line);
      if (!tokens.empty()) handle_line(tokens);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish();
    return img_;
  }

 private:
  enum class Section { none, constants, cyclic, program, start };

  [[noreturn]] void fail(Errc code, const std::string& msg, int column) const { throw Error(code, msg, line_, column); }
  [[noreturn]] void fail(Errc code, const std::string& msg, const detail::Token& t) const { fail(code, msg, t.column); }

  void handle_line(const std::vector<detail::Token>& t) {
    const std::string head = detail::upper(t[0].text);
    if (head == ".CONST" || head == ".PROG" || head == ".START" || head == ".CYCLIC") {
      if (head == ".CYCLIC") {
        if (t.size() != 2) fail(Errc::syntax, ".cyclic takes a unit number 0..3", t[0]);
        const auto k = detail::small_number(t[1].text);
        if (!k || *k >= kCyclicUnits) fail(Errc::syntax, "cyclic unit must be 0..3", t[1]);
        unit_ = *k;
        section_ = Section::cyclic;
        return;
      }
      if (t.size() != 1) fail(Errc::syntax, "unexpected text after section name", t[1]);
      section_ = head == ".CONST" ? Section::constants : head == ".PROG" ? Section::program : Section::start;
      return;
    }
    switch (section_) {
      case Section::none: fail(Errc::syntax, "text outside a section", t[0]);
      case Section::constants: constant_line(t); break;
      case Section::cyclic: cyclic_line(t); break;
      case Section::program: program_line(t); break;
      case Section::start: start_line(t); break;
    }
  }

  Row39 literal(const detail::Token& t) const {
    if (!t.text.empty() && t.text[0] == '#') {
      const auto v = detail::parse_hex(std::string_view(t.text).substr(1));
      if (!v || *v > Row39::kMask) fail(Errc::syntax, "raw row must be #0x followed by at most 39 bits of hex", t);
      return Row39{*v};
    }
    try {
      return encode_row(parse_plugged(t.text));
    } catch (const Error& e) {
      fail(e.code(), std::string(e.what()), t);
    }
  }

  void constant_line(const std::vector<detail::Token>& t) {
    std::optional<int> row;
    std::size_t lit = 0;
    std::optional<std::string> name;
    if (t.size() == 3 && t[1].text == "=") {
      if (auto a = detail::machine_address(t[0].text); a && detail::upper(t[0].text)[0] == 'C') {
        row = *a;
      } else if (detail::is_identifier(t[0].text) && !detail::reserved_name(t[0].text)) {
        name = t[0].text;
      } else {
        fail(Errc::syntax, "expected a constant name or C<row>", t[0]);
      }
      lit = 2;
    } else if (t.size() != 1) {
      fail(Errc::syntax, "expected 'name = number', 'C<row> = number' or a number", t[0]);
    }
    const Row39 value = literal(t[lit]);
    if (!row) {
      while (next_constant_ < kConstantRows && img_.constants[static_cast<std::size_t>(next_constant_)]) ++next_constant_;
      if (next_constant_ >= kConstantRows) {
        ++constant_overflow_;
        if (!overflow_line_) overflow_line_ = std::make_pair(line_, t[0].column);
        return;
      }
      row = next_constant_;
    }
    auto& slot = img_.constants[static_cast<std::size_t>(*row)];
    if (slot) fail(Errc::syntax, "constant row C" + std::to_string(*row) + " already plugged", t[0]);
    slot = value;
    if (name) {
      if (symbols_.count(*name) || labels_.count(*name)) fail(Errc::duplicate_label, "'" + *name + "' already defined", t[0]);
      symbols_[*name] = *row;
    }
  }

  void cyclic_line(const std::vector<detail::Token>& t) {
    std::size_t i = 0;
    auto& table = img_.cyclic[static_cast<std::size_t>(unit_)];
    auto& labels = cyclic_labels_[static_cast<std::size_t>(unit_)];
    if (t[0].text.size() > 1 && t[0].text.back() == ':') {
      const std::string label = t[0].text.substr(0, t[0].text.size() - 1);
      if (!detail::is_identifier(label) || detail::reserved_name(label)) fail(Errc::syntax, "bad label '" + label + "'", t[0]);
      if (labels.count(label)) fail(Errc::duplicate_label, "label '" + label + "' already defined in Y" + std::to_string(unit_), t[0]);
      labels[label] = table.size() + cyclic_overflow_[static_cast<std::size_t>(unit_)];
      ++i;
    }
    if (i >= t.size()) fail(Errc::syntax, "cyclic rows need a number", t[0]);
    const Row39 value = literal(t[i]);
    ++i;
    const int row = table.size();
    if (i < t.size()) {
      if (detail::upper(t[i].text) != "@JUMP" || i + 2 != t.size()) fail(Errc::syntax, "expected '@jump target'", t[i]);
      cyclic_jumps_[static_cast<std::size_t>(unit_)].push_back({row, t[i + 1].text, line_, t[i + 1].column});
    }
    if (table.size() >= kCyclicRows) {
      ++cyclic_overflow_[static_cast<std::size_t>(unit_)];
      if (!overflow_line_) overflow_line_ = std::make_pair(line_, t[0].column);
      return;
    }
    table.append(value);
  }

  int address(const detail::Token& t) const {
    if (auto a = detail::machine_address(t.text)) return *a;
    if (auto it = symbols_.find(t.text); it != symbols_.end()) return it->second;
    if (detail::reserved_name(t.text)) fail(Errc::invalid_operand, "no such location '" + t.text + "'", t);
    fail(Errc::undefined_label, "unknown operand '" + t.text + "'", t);
  }

  std::pair<alu::Transform, int> add_operand(const detail::Token& t) const {
    std::string s = t.text;
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
      neg = s[0] == '-';
      s = s.substr(1);
    }
    bool abs = false;
    if (s.size() >= 2 && s.front() == '|' && s.back() == '|') {
      abs = true;
      s = s.substr(1, s.size() - 2);
    }
    const int a = address(detail::Token{s, t.column});
    const alu::Transform f = abs ? (neg ? alu::Transform::negabs : alu::Transform::abs)
                                 : (neg ? alu::Transform::negate : alu::Transform::identity);
    return {f, a};
  }

  int destination(const detail::Token& t) const {
    const auto a = detail::machine_address(t.text);
    if (!a || *a < kFirstRegisterAddress) fail(Errc::syntax, "destination must be a register R0..R31", t);
    return *a - kFirstRegisterAddress;
  }

  void define_label(const std::string& label, const detail::Token& t) {
    if (!detail::is_identifier(label) || detail::reserved_name(label)) fail(Errc::syntax, "bad label '" + label + "'", t);
    if (labels_.count(label) || symbols_.count(label)) fail(Errc::duplicate_label, "label '" + label + "' already defined", t);
    labels_[label] = next_row_;
  }

  void program_line(const std::vector<detail::Token>& t) {
    std::size_t i = 0;
    while (i < t.size() && t[i].text.size() > 1 && t[i].text.back() == ':') {
      define_label(t[i].text.substr(0, t[i].text.size() - 1), t[i]);
      ++i;
    }
    if (i == t.size()) return;
    const std::string m = detail::upper(t[i].text);
    if (m == ".ORG") {
      if (i + 2 != t.size()) fail(Errc::syntax, ".org takes one row number", t[i]);
      const auto n = detail::small_number(t[i + 1].text);
      if (!n || *n >= kProgramRows) fail(Errc::syntax, ".org row must be 0..299", t[i + 1]);
      next_row_ = *n;
      return;
    }
    instruction(t, i);
  }

  void instruction(const std::vector<detail::Token>& t, std::size_t i) {
    const detail::Token& mt = t[i];
    const std::string m = detail::upper(mt.text);
    std::size_t end = t.size();
    Instruction in;
    std::optional<std::uint32_t> raw;
    std::optional<detail::Token> cond_target, uncond_target;

    // trailing [P], GOTO and (for .raw) IF clauses
    std::vector<bool> used(t.size(), false);
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const std::string u = detail::upper(t[j].text);
      if (u == "[P]") {
        if (in.op.print) fail(Errc::syntax, "[P] given twice", t[j]);
        in.op.print = true;
        used[j] = true;
      } else if (u == "GOTO" || (u == "IF" && m == ".RAW")) {
        if (j + 1 >= t.size()) fail(Errc::syntax, u + " needs a target", t[j]);
        auto& slot = u == "GOTO" ? uncond_target : cond_target;
        if (slot) fail(Errc::duplicate_jump, "row already has a " + std::string(u == "GOTO" ? "GOTO" : "IF") + " cable", t[j]);
        slot = t[j + 1];
        used[j] = used[j + 1] = true;
        ++j;
      }
    }
    std::vector<detail::Token> args;
    for (std::size_t j = i + 1; j < end; ++j)
      if (!used[j]) args.push_back(t[j]);

    auto expect_args = [&](std::size_t n, const char* shape) {
      if (args.size() != n) fail(Errc::syntax, std::string("expected ") + shape, mt);
    };
    auto arrow_dest = [&](std::size_t at) {
      if (args[at].text != "->") fail(Errc::syntax, "expected '->'", args[at]);
      in.adr3 = destination(args[at + 1]);
    };

    if (m == "ADD") {
      expect_args(4, "ADD a b -> Rk");
      const auto [f1, a1] = add_operand(args[0]);
      const auto [f2, a2] = add_operand(args[1]);
      in.op.code = opcode::add(f1, f2);
      in.adr1 = a1;
      in.adr2 = a2;
      arrow_dest(2);
    } else if (m == "MUL" || m == "DIV") {
      expect_args(4, "MUL|DIV a b -> Rk");
      in.op.code = m == "MUL" ? opcode::kMul : opcode::kDiv;
      in.adr1 = address(args[0]);
      in.adr2 = address(args[1]);
      arrow_dest(2);
    } else if (m == "SQR+" || m == "SQR-") {
      expect_args(3, "SQR+|SQR- b -> Rk");
      in.op.code = m == "SQR+" ? opcode::kSqrtPos : opcode::kSqrtNeg;
      in.adr2 = address(args[0]);
      arrow_dest(1);
    } else if (m == "MOV") {
      expect_args(3, "MOV a -> Rk");
      in.op.code = opcode::kMov;
      in.adr1 = address(args[0]);
      arrow_dest(1);
    } else if (m == "JGT" || m == "JZE" || m == "JINF") {
      if (args.empty() || args.size() > 2) fail(Errc::syntax, "expected JGT|JZE|JINF a, target", mt);
      in.op.code = m == "JGT" ? opcode::kJgt : m == "JZE" ? opcode::kJze : opcode::kJinf;
      in.adr1 = address(args[0]);
      if (args.size() == 2) cond_target = args[1];
    } else if (m == "STOP") {
      if (args.size() > 1) fail(Errc::syntax, "expected STOP [a] [P]", mt);
      in.op.code = opcode::kStop;
      if (args.size() == 1) {
        if (!in.op.print) fail(Errc::syntax, "STOP only takes an operand to print it; add [P]", args[0]);
        in.adr1 = address(args[0]);
      }
    } else if (m == ".RAW") {
      expect_args(1, ".raw 0x<27-bit row>");
      const auto v = detail::parse_hex(args[0].text);
      if (!v || *v > kRowMask) fail(Errc::syntax, "raw row must be hex of at most 27 bits", args[0]);
      if (in.op.print) fail(Errc::syntax, "[P] is part of the raw bits", mt);
      raw = static_cast<std::uint32_t>(*v);
    } else {
      fail(Errc::syntax, "unknown instruction '" + mt.text + "'", mt);
    }

    if (!raw) {
      if (in.op.writes()) {
        const int dest = register_address(in.adr3);
        if ((in.op.reads_first() && in.adr1 == dest) || (in.op.reads_second() && in.adr2 == dest))
          fail(Errc::write_conflict, "R" + std::to_string(in.adr3) + " is both read and written", mt);
      }
      in.sockets = {};
      raw = encode_instruction(in);
    }

    if (next_row_ >= kProgramRows) {
      ++program_overflow_;
      if (!overflow_line_) overflow_line_ = std::make_pair(line_, mt.column);
      return;
    }
    const int row = next_row_;
    if (img_.program[static_cast<std::size_t>(row)]) fail(Errc::syntax, "program row " + std::to_string(row) + " already used", mt);
    img_.program[static_cast<std::size_t>(row)] = *raw;
    raw_rows_[row] = {m == ".RAW", line_, mt.column};
    if (cond_target) cond_.push_back({row, cond_target->text, line_, cond_target->column});
    if (uncond_target) uncond_.push_back({row, uncond_target->text, line_, uncond_target->column});
    next_row_ = row + 1;
  }

  void start_line(const std::vector<detail::Token>& t) {
    if (t.size() < 3 || t[1].text != "=") fail(Errc::syntax, "expected 'pc = target' or 'positions = a, b, c, d'", t[0]);
    const std::string key = detail::upper(t[0].text);
    if (key == "PC") {
      if (t.size() != 3) fail(Errc::syntax, "pc takes one target", t[0]);
      start_pc_ = detail::PendingJump{0, t[2].text, line_, t[2].column};
    } else if (key == "POSITIONS") {
      if (t.size() != 2 + kCyclicUnits) fail(Errc::syntax, "positions takes four values", t[0]);
      for (int k = 0; k < kCyclicUnits; ++k)
        start_positions_[static_cast<std::size_t>(k)] = detail::PendingJump{k, t[2 + static_cast<std::size_t>(k)].text, line_,
                                                                            t[2 + static_cast<std::size_t>(k)].column};
    } else {
      fail(Errc::syntax, "unknown start setting '" + t[0].text + "'", t[0]);
    }
  }

  int program_target(const detail::PendingJump& j) const {
    if (auto n = detail::small_number(j.target)) {
      if (*n >= kProgramRows) throw Error(Errc::syntax, "row " + j.target + " outside 0..299", j.line, j.column);
      return *n;
    }
    const auto it = labels_.find(j.target);
    if (it == labels_.end()) throw Error(Errc::undefined_label, "label '" + j.target + "' is not defined", j.line, j.column);
    if (it->second >= kProgramRows) throw Error(Errc::capacity_exceeded, "label '" + j.target + "' lies past row 299", j.line, j.column);
    return it->second;
  }

  int cyclic_target(int unit, const detail::PendingJump& j) const {
    const auto& table = img_.cyclic[static_cast<std::size_t>(unit)];
    int row;
    if (auto n = detail::small_number(j.target)) {
      row = *n;
    } else {
      const auto& labels = cyclic_labels_[static_cast<std::size_t>(unit)];
      const auto it = labels.find(j.target);
      if (it == labels.end())
        throw Error(Errc::undefined_label, "label '" + j.target + "' is not defined in Y" + std::to_string(unit), j.line, j.column);
      row = it->second;
    }
    if (row >= std::max(table.size(), 1))
      throw Error(Errc::syntax, "row " + std::to_string(row) + " outside Y" + std::to_string(unit), j.line, j.column);
    return row;
  }

  void finish() {
    auto overflow = [&](const std::string& section, int n) {
      const auto [l, c] = overflow_line_.value_or(std::make_pair(line_, 1));
      throw Error(Errc::capacity_exceeded, section + " section over capacity by " + std::to_string(n), l, c);
    };
    if (program_overflow_) overflow("program", program_overflow_);
    if (constant_overflow_) overflow("const", constant_overflow_);
    for (int k = 0; k < kCyclicUnits; ++k)
      if (cyclic_overflow_[static_cast<std::size_t>(k)]) overflow("cyclic " + std::to_string(k), cyclic_overflow_[static_cast<std::size_t>(k)]);

    for (const auto& j : cond_) img_.cond_jumps[j.from] = program_target(j);
    for (const auto& j : uncond_) img_.uncond_jumps[j.from] = program_target(j);
    for (int k = 0; k < kCyclicUnits; ++k)
      for (const auto& j : cyclic_jumps_[static_cast<std::size_t>(k)]) {
        try {
          img_.cyclic[static_cast<std::size_t>(k)].add_jump(j.from, cyclic_target(k, j));
        } catch (const Error& e) {
          if (e.line()) throw;
          throw Error(e.code(), e.what(), j.line, j.column);
        }
      }

    // Right sockets sit on the row before each target; a cable may need an
    // otherwise empty row to carry its socket.
    std::set<int> arrivals;
    for (const auto* jumps : {&img_.cond_jumps, &img_.uncond_jumps})
      for (const auto& [from, to] : *jumps) arrivals.insert(predecessor_row(to));
    for (int r : arrivals)
      if (!img_.program[static_cast<std::size_t>(r)]) img_.program[static_cast<std::size_t>(r)] = 0u;
    for (int r = 0; r < kProgramRows; ++r) {
      auto& row = img_.program[static_cast<std::size_t>(r)];
      if (!row) continue;
      const unsigned want = wired_sockets(img_, r).nibble();
      const auto it = raw_rows_.find(r);
      if (it != raw_rows_.end() && it->second.raw && (*row & 15u) != want)
        throw Error(Errc::wiring_mismatch, "raw row Adr4 bits disagree with its cables", it->second.line, it->second.column);
      *row = (*row & ~15u) | want;
    }

    if (start_pc_) img_.start.pc = program_target(*start_pc_);
    for (int k = 0; k < kCyclicUnits; ++k)
      if (const auto& p = start_positions_[static_cast<std::size_t>(k)]) {
        const int row = cyclic_target(k, *p);
        if (img_.cyclic[static_cast<std::size_t>(k)].empty() && row != 0)
          throw Error(Errc::syntax, "Y" + std::to_string(k) + " is empty", p->line, p->column);
        img_.start.positions[static_cast<std::size_t>(k)] = row;
      }
    validate_image(img_);
  }

  struct RowOrigin {
    bool raw;
    int line;
    int column;
  };

  PlugboardImage img_;
  Section section_ = Section::none;
  int line_ = 0;
  int unit_ = 0;
  int next_row_ = 0;
  int next_constant_ = 0;
  int program_overflow_ = 0;
  int constant_overflow_ = 0;
  std::array<int, kCyclicUnits> cyclic_overflow_{};
  std::optional<std::pair<int, int>> overflow_line_;
  std::map<std::string, int> symbols_;  // constant names -> address
  std::map<std::string, int> labels_;   // program labels -> row
  std::array<std::map<std::string, int>, kCyclicUnits> cyclic_labels_;
  std::vector<detail::PendingJump> cond_;
  std::vector<detail::PendingJump> uncond_;
  std::array<std::vector<detail::PendingJump>, kCyclicUnits> cyclic_jumps_;
  std::map<int, RowOrigin> raw_rows_;
  std::optional<detail::PendingJump> start_pc_;
  std::array<std::optional<detail::PendingJump>, kCyclicUnits> start_positions_;
};

inline PlugboardImage assemble(std::string_view source) { return Assembler().assemble(source); }

/// Spelling of a number row that assembles back to the same bits.
inline std::string row_literal(const Row39& r) {
  try {
    const Number n = decode_row(r);
    const std::string text = format_number(n);
    if (encode_row(parse_plugged(text)) == r) return text;
  } catch (const Error&) {
  }
  return "#" + detail::hex(r.bits, 10);
}

/// Canonical source text for an image: labels L<row> in the program,
/// y<k>_<row> in cyclic tables, constants by row.
inline std::string disassemble(const PlugboardImage& img) {
  std::string out;
  out += ".const\n";
  for (int c = 0; c < kConstantRows; ++c)
    if (const auto& row = img.constants[static_cast<std::size_t>(c)]) out += "  C" + std::to_string(c) + " = " + row_literal(*row) + "\n";

  for (int k = 0; k < kCyclicUnits; ++k) {
    const auto& t = img.cyclic[static_cast<std::size_t>(k)];
    if (t.empty()) continue;
    std::set<int> targets;
    for (const auto& [from, to] : t.jumps()) targets.insert(to);
    out += ".cyclic " + std::to_string(k) + "\n";
    for (int r = 0; r < t.size(); ++r) {
      out += "  ";
      if (targets.count(r)) out += "y" + std::to_string(k) + "_" + std::to_string(r) + ": ";
      out += row_literal(t.row(r));
      if (auto it = t.jumps().find(r); it != t.jumps().end())
        out += " @jump y" + std::to_string(k) + "_" + std::to_string(it->second);
      out += "\n";
    }
  }

  out += ".prog\n";
  std::set<int> targets;
  for (const auto* jumps : {&img.cond_jumps, &img.uncond_jumps})
    for (const auto& [from, to] : *jumps) targets.insert(to);
  const auto label = [](int row) { return "L" + std::to_string(row); };
  int counter = 0;
  for (int r = 0; r < kProgramRows; ++r) {
    const auto& row = img.program[static_cast<std::size_t>(r)];
    if (!row && !targets.count(r)) continue;
    if (counter != r) out += "  .org " + std::to_string(r) + "\n";
    counter = r;
    if (targets.count(r)) out += label(r) + ":\n";
    if (!row) continue;
    std::string text;
    try {
      const Instruction in = decode_instruction(*row, r, img);
      if (has_canonical_spelling(in)) text = format_instruction(in, label);
    } catch (const Error&) {
    }
    if (text.empty()) {
      text = ".raw " + detail::hex(*row, 7);
      if (auto it = img.cond_jumps.find(r); it != img.cond_jumps.end()) text += " IF " + label(it->second);
      if (auto it = img.uncond_jumps.find(r); it != img.uncond_jumps.end()) text += " GOTO " + label(it->second);
    }
    out += "  " + text + "\n";
    counter = r + 1;
  }

  out += ".start\n";
  out += "  pc = " + std::to_string(img.start.pc) + "\n";
  out += "  positions = ";
  for (int k = 0; k < kCyclicUnits; ++k) out += (k ? ", " : "") + std::to_string(img.start.positions[static_cast<std::size_t>(k)]);
  out += "\n";
  return out;
}

}  // namespace oprema::asm_
