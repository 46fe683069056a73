#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oprema {

enum class Errc {
  // number rows and text
  invalid_tetrad,
  invalid_special,
  syntax,
  exponent_overflow,
  // instruction decoding
  invalid_opcode,
  wiring_mismatch,
  write_conflict,
  invalid_operand,
  // run control
  idle,
  // twin mode
  desynced_pc,
  not_in_mismatch,
  invalid_location,
  // assembler
  undefined_label,
  duplicate_label,
  capacity_exceeded,
  duplicate_jump,
  // image files
  bad_magic,
  version_unsupported,
  truncated,
  inconsistent_wiring,
  malformed,
  // oracle
  div_by_zero,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_tetrad: return "InvalidTetrad";
    case Errc::invalid_special: return "InvalidSpecial";
    case Errc::syntax: return "Syntax";
    case Errc::exponent_overflow: return "ExponentOverflow";
    case Errc::invalid_opcode: return "InvalidOpcode";
    case Errc::wiring_mismatch: return "WiringMismatch";
    case Errc::write_conflict: return "WriteConflict";
    case Errc::invalid_operand: return "InvalidOperand";
    case Errc::idle: return "Idle";
    case Errc::desynced_pc: return "DesyncedPC";
    case Errc::not_in_mismatch: return "NotInMismatch";
    case Errc::invalid_location: return "InvalidLocation";
    case Errc::undefined_label: return "UndefinedLabel";
    case Errc::duplicate_label: return "DuplicateLabel";
    case Errc::capacity_exceeded: return "CapacityExceeded";
    case Errc::duplicate_jump: return "DuplicateJump";
    case Errc::bad_magic: return "BadMagic";
    case Errc::version_unsupported: return "VersionUnsupported";
    case Errc::truncated: return "Truncated";
    case Errc::inconsistent_wiring: return "InconsistentWiring";
    case Errc::malformed: return "Malformed";
    case Errc::div_by_zero: return "DivByZero";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code.
/// Assembler errors also carry a 1-based line/column, image errors a byte offset.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Error(Errc code, const std::string& message, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                           std::string(errc_name(code)) + ": " + message),
        code_(code), line_(line), column_(column) {}

  static Error at_offset(Errc code, const std::string& message, std::size_t offset) {
    Error e(code, message + " (at byte offset " + std::to_string(offset) + ")");
    e.offset_ = static_cast<std::int64_t>(offset);
    return e;
  }

  Errc code() const noexcept { return code_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  std::int64_t offset() const noexcept { return offset_; }

 private:
  Errc code_;
  int line_ = 0;
  int column_ = 0;
  std::int64_t offset_ = -1;
};

}  // namespace oprema
