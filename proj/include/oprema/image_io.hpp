#pragma once

// Binary plugboard image (.opimg). All integers little-endian; the byte
// map is documented in docs/formats.md.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "oprema/error.hpp"
#include "oprema/machine.hpp"

namespace oprema::image {

inline constexpr char kMagic[4] = {'O', 'P', 'I', 'M'};
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kProgramBitmapBytes = (kProgramRows + 7) / 8;   // 38
inline constexpr std::size_t kConstantBitmapBytes = (kConstantRows + 7) / 8; // 4

using Bytes = std::vector<std::uint8_t>;

namespace detail {

struct Writer {
  Bytes out;
  void u8(unsigned v) { out.push_back(static_cast<std::uint8_t>(v)); }
  void u16(unsigned v) {
    u8(v & 0xFFu);
    u8((v >> 8) & 0xFFu);
  }
  void uint(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) u8(static_cast<unsigned>((v >> (8 * i)) & 0xFFu));
  }
};

class Reader {
 public:
  explicit Reader(const Bytes& b) : b_(b) {}
  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == b_.size(); }

  std::uint64_t uint(int bytes, const char* what) {
    if (b_.size() - pos_ < static_cast<std::size_t>(bytes))
      throw Error::at_offset(Errc::truncated, std::string("file ends inside ") + what, pos_);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{b_[pos_ + static_cast<std::size_t>(i)]} << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  unsigned u8(const char* what) { return static_cast<unsigned>(uint(1, what)); }
  unsigned u16(const char* what) { return static_cast<unsigned>(uint(2, what)); }

  [[noreturn]] void malformed(const std::string& why, std::size_t at) const { throw Error::at_offset(Errc::malformed, why, at); }

 private:
  const Bytes& b_;
  std::size_t pos_ = 0;
};

inline void write_bitmap(Writer& w, const std::vector<bool>& bits, std::size_t bytes) {
  for (std::size_t i = 0; i < bytes; ++i) {
    unsigned v = 0;
    for (std::size_t b = 0; b < 8; ++b)
      if (i * 8 + b < bits.size() && bits[i * 8 + b]) v |= 1u << b;
    w.u8(v);
  }
}

inline std::vector<bool> read_bitmap(Reader& r, std::size_t count, std::size_t bytes, const char* what) {
  std::vector<bool> bits(count);
  for (std::size_t i = 0; i < bytes; ++i) {
    const std::size_t at = r.offset();
    const unsigned v = r.u8(what);
    for (std::size_t b = 0; b < 8; ++b) {
      const bool on = (v >> b) & 1u;
      if (i * 8 + b < count) bits[i * 8 + b] = on;
      else if (on) r.malformed(std::string("padding bit set in ") + what, at);
    }
  }
  return bits;
}

inline void write_jumps(Writer& w, const std::map<int, int>& jumps) {
  w.u16(static_cast<unsigned>(jumps.size()));
  for (const auto& [from, to] : jumps) {
    w.u16(static_cast<unsigned>(from));
    w.u16(static_cast<unsigned>(predecessor_row(to)));
  }
}

inline std::map<int, int> read_jumps(Reader& r, const char* what) {
  std::map<int, int> jumps;
  const unsigned n = r.u16(what);
  if (n > static_cast<unsigned>(kProgramRows)) r.malformed(std::string("too many ") + what, r.offset() - 2);
  int last = -1;
  for (unsigned i = 0; i < n; ++i) {
    const std::size_t at = r.offset();
    const int from = static_cast<int>(r.u16(what));
    const int socket = static_cast<int>(r.u16(what));
    if (from >= kProgramRows || socket >= kProgramRows) r.malformed(std::string(what) + " row out of range", at);
    if (from <= last) r.malformed(std::string(what) + " not sorted by source row", at);
    last = from;
    jumps[from] = successor_row(socket);
  }
  return jumps;
}

}  // namespace detail

inline Bytes save_image(const PlugboardImage& img) {
  validate_image(img);
  detail::Writer w;
  for (char c : kMagic) w.u8(static_cast<unsigned char>(c));
  w.u16(kVersion);
  w.u16(0);
  w.u16(static_cast<unsigned>(img.start.pc));
  for (int p : img.start.positions) w.u8(static_cast<unsigned>(p));

  std::vector<bool> occupied(kProgramRows);
  for (int r = 0; r < kProgramRows; ++r) occupied[static_cast<std::size_t>(r)] = img.program[static_cast<std::size_t>(r)].has_value();
  detail::write_bitmap(w, occupied, kProgramBitmapBytes);
  for (const auto& row : img.program)
    if (row) w.uint(*row, 4);
  detail::write_jumps(w, img.cond_jumps);
  detail::write_jumps(w, img.uncond_jumps);

  std::vector<bool> plugged(kConstantRows);
  for (int c = 0; c < kConstantRows; ++c) plugged[static_cast<std::size_t>(c)] = img.constants[static_cast<std::size_t>(c)].has_value();
  detail::write_bitmap(w, plugged, kConstantBitmapBytes);
  for (const auto& row : img.constants)
    if (row) w.uint(row->bits, 5);

  for (const auto& t : img.cyclic) {
    w.u8(static_cast<unsigned>(t.size()));
    for (const auto& row : t.rows()) w.uint(row.bits, 5);
    w.u8(static_cast<unsigned>(t.jumps().size()));
    for (const auto& [from, to] : t.jumps()) {
      w.u8(static_cast<unsigned>(from));
      w.u8(static_cast<unsigned>(to == 0 ? t.size() - 1 : to - 1));
    }
  }
  return std::move(w.out);
}

inline PlugboardImage load_image(const Bytes& bytes) {
  detail::Reader r(bytes);
  PlugboardImage img;
  for (char c : kMagic)
    if (r.u8("magic") != static_cast<unsigned char>(c)) throw Error::at_offset(Errc::bad_magic, "not an OPIM file", 0);
  const unsigned version = r.u16("version");
  if (version != kVersion) throw Error::at_offset(Errc::version_unsupported, "version " + std::to_string(version), 4);
  if (r.u16("flags") != 0) r.malformed("unknown flags", 6);

  std::size_t at = r.offset();
  img.start.pc = static_cast<int>(r.u16("start pc"));
  if (img.start.pc >= kProgramRows) r.malformed("start pc out of range", at);
  const std::size_t positions_at = r.offset();
  for (auto& p : img.start.positions) p = static_cast<int>(r.u8("start positions"));

  const auto occupied = detail::read_bitmap(r, kProgramRows, kProgramBitmapBytes, "program bitmap");
  for (int row = 0; row < kProgramRows; ++row) {
    if (!occupied[static_cast<std::size_t>(row)]) continue;
    at = r.offset();
    const auto v = r.uint(4, "program rows");
    if (v > kRowMask) r.malformed("program row " + std::to_string(row) + " wider than 27 bits", at);
    img.program[static_cast<std::size_t>(row)] = static_cast<std::uint32_t>(v);
  }
  img.cond_jumps = detail::read_jumps(r, "conditional cables");
  img.uncond_jumps = detail::read_jumps(r, "unconditional cables");

  const auto plugged = detail::read_bitmap(r, kConstantRows, kConstantBitmapBytes, "constant bitmap");
  for (int c = 0; c < kConstantRows; ++c) {
    if (!plugged[static_cast<std::size_t>(c)]) continue;
    at = r.offset();
    const auto v = r.uint(5, "constant rows");
    if (v > Row39::kMask) r.malformed("constant row wider than 39 bits", at);
    img.constants[static_cast<std::size_t>(c)] = Row39{v};
  }

  for (auto& t : img.cyclic) {
    at = r.offset();
    const unsigned n = r.u8("cyclic row count");
    if (n > static_cast<unsigned>(kCyclicRows)) r.malformed("cyclic unit holds more than 80 rows", at);
    for (unsigned i = 0; i < n; ++i) {
      at = r.offset();
      const auto v = r.uint(5, "cyclic rows");
      if (v > Row39::kMask) r.malformed("cyclic row wider than 39 bits", at);
      t.append(Row39{v});
    }
    at = r.offset();
    const unsigned m = r.u8("cyclic cable count");
    if (m > n) r.malformed("more cyclic cables than rows", at);
    int last = -1;
    for (unsigned i = 0; i < m; ++i) {
      at = r.offset();
      const int from = static_cast<int>(r.u8("cyclic cables"));
      const int socket = static_cast<int>(r.u8("cyclic cables"));
      if (from >= static_cast<int>(n) || socket >= static_cast<int>(n)) r.malformed("cyclic cable outside the table", at);
      if (from <= last) r.malformed("cyclic cables not sorted by source row", at);
      last = from;
      t.add_jump(from, socket + 1 == static_cast<int>(n) ? 0 : socket + 1);
    }
  }
  if (!r.at_end()) r.malformed("trailing bytes", r.offset());

  for (int k = 0; k < kCyclicUnits; ++k) {
    const int p = img.start.positions[static_cast<std::size_t>(k)];
    const int size = img.cyclic[static_cast<std::size_t>(k)].size();
    if (size == 0 ? p != 0 : p >= size) r.malformed("start position of Y" + std::to_string(k) + " outside the table", positions_at + static_cast<std::size_t>(k));
  }
  try {
    validate_image(img);
  } catch (const Error& e) {
    throw Error::at_offset(e.code(), e.what(), bytes.size());
  }
  return img;
}

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::malformed, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::malformed, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace oprema::image
