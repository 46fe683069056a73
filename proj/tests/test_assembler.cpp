#include <gtest/gtest.h>

#include "oprema/assembler.hpp"
#include "oprema/demos.hpp"

using namespace oprema;

namespace {

Instruction row(const PlugboardImage& img, int r) { return split_row(*img.program[static_cast<std::size_t>(r)]); }

Error error_of(const std::string& src) {
  try {
    asm_::assemble(src);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "assembled: " << src;
  return Error(Errc::malformed, "none");
}

}  // namespace

TEST(Assembler, OperandAddresses) {
  const auto img = asm_::assemble(".prog\n MUL Y0 Y1 -> R0\n");
  const Instruction in = row(img, 0);
  EXPECT_EQ(in.adr1, 28);
  EXPECT_EQ(in.adr2, 29);
  EXPECT_EQ(in.adr3, 0);
  EXPECT_EQ(in.op.code, opcode::kMul);
  EXPECT_FALSE(in.op.print);
}

TEST(Assembler, AddForms) {
  const auto img = asm_::assemble(".const\n x = 3\n y = -4\n.prog\n ADD +|x| -|y| -> R2 [P]\n ADD -x y -> R3\n ADD |x| +y -> R4\n");
  EXPECT_EQ(row(img, 0).op, (Opcode{opcode::add(alu::Transform::abs, alu::Transform::negabs), true}));
  EXPECT_EQ(row(img, 1).op.code, opcode::add(alu::Transform::negate, alu::Transform::identity));
  EXPECT_EQ(row(img, 2).op.code, opcode::add(alu::Transform::abs, alu::Transform::identity));
  EXPECT_EQ(decode_row(*img.constants[1]), parse_decimal("-4"));
}

TEST(Assembler, LabelsAndCables) {
  const auto img = asm_::assemble(R"(.const
  one = 1
.prog
top:    JGT one, done
        STOP GOTO top
done:   STOP
)");
  EXPECT_EQ(img.cond_jumps.at(0), 2);
  EXPECT_EQ(img.uncond_jumps.at(1), 0);
  const Sockets s0 = Sockets::from_nibble(*img.program[0] & 15u);
  EXPECT_TRUE(s0.cond_from);
  EXPECT_FALSE(s0.cond_to);
  EXPECT_TRUE(Sockets::from_nibble(*img.program[1] & 15u).cond_to);       // arrival at row 2
  EXPECT_TRUE(Sockets::from_nibble(*img.program[299] & 15u).uncond_to);  // implicit row carries the socket for row 0
  EXPECT_NO_THROW(validate_image(img));
}

TEST(Assembler, ConstantsByRowAndRaw) {
  const auto img = asm_::assemble(".const\n C5 = 2.5\n 1\n #0x4000000000\n");
  EXPECT_EQ(decode_row(*img.constants[5]), parse_decimal("2.5"));
  EXPECT_EQ(decode_row(*img.constants[0]), parse_decimal("1"));
  EXPECT_EQ(img.constants[1]->bits, 0x4000000000ull);
}

TEST(Assembler, CyclicSectionAndStart) {
  const auto img = asm_::assemble(".cyclic 2\nfirst: 1\n 2\n 3 @jump first\n 4\n.start\n pc = 0\n positions = 0, 0, 1, 0\n.prog\n STOP\n");
  const auto& t = img.cyclic[2];
  EXPECT_EQ(t.size(), 4);
  EXPECT_EQ(t.next(2), 0);
  EXPECT_EQ(img.start.positions[2], 1);
}

TEST(Assembler, ErrorsCarryPositions) {
  const Error e = error_of(".prog\n  STOP\n  FOO R1\n");
  EXPECT_EQ(e.code(), Errc::syntax);
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 3);
  EXPECT_EQ(error_of(".prog\n JGT R0, nowhere\n").code(), Errc::undefined_label);
  EXPECT_EQ(error_of(".prog\na: STOP\na: STOP\n").code(), Errc::duplicate_label);
  EXPECT_EQ(error_of(".prog\n ADD +R0 +R1 -> R0\n").code(), Errc::write_conflict);
  EXPECT_EQ(error_of(".prog\n STOP R4\n").code(), Errc::syntax);
  EXPECT_EQ(error_of(".prog\n MOV Q9 -> R1\n").code(), Errc::undefined_label);
  EXPECT_EQ(error_of(".prog\n MOV R1 -> C0\n").code(), Errc::syntax);
  EXPECT_EQ(error_of(" STOP\n").code(), Errc::syntax);
}

TEST(Assembler, CapacityMessages) {
  std::string prog = ".prog\n .org 298\n";
  for (int i = 0; i < 4; ++i) prog += " STOP\n";
  const Error e = error_of(prog);
  EXPECT_EQ(e.code(), Errc::capacity_exceeded);
  EXPECT_NE(std::string(e.what()).find("program section over capacity by 2"), std::string::npos) << e.what();

  std::string cyc = ".cyclic 3\n";
  for (int i = 0; i < 83; ++i) cyc += " 1\n";
  const Error c = error_of(cyc);
  EXPECT_EQ(c.code(), Errc::capacity_exceeded);
  EXPECT_NE(std::string(c.what()).find("cyclic 3 section over capacity by 3"), std::string::npos) << c.what();

  std::string cst = ".const\n";
  for (int i = 0; i < 29; ++i) cst += " 1\n";
  const Error k = error_of(cst);
  EXPECT_NE(std::string(k.what()).find("const section over capacity by 1"), std::string::npos) << k.what();
}

TEST(Assembler, DisassemblyRoundTripsDemos) {
  for (const auto& d : demos::corpus()) {
    const auto img = asm_::assemble(d.source);
    const std::string text = asm_::disassemble(img);
    EXPECT_EQ(asm_::assemble(text), img) << d.name << "\n" << text;
    EXPECT_EQ(asm_::disassemble(asm_::assemble(text)), text) << d.name;
  }
}

TEST(Assembler, RawRows) {
  const auto img = asm_::assemble(".prog\n .raw 0x1234560\n STOP\n");
  EXPECT_EQ(*img.program[0], 0x1234560u);
  EXPECT_EQ(asm_::assemble(asm_::disassemble(img)), img);
  EXPECT_EQ(error_of(".prog\n .raw 0x1234568\n STOP\n").code(), Errc::wiring_mismatch);
}

TEST(Assembler, EmptySourceGivesEmptyImage) {
  const auto img = asm_::assemble("; nothing\n");
  const auto u = asm_::usage(img);
  EXPECT_EQ(u.program, 0);
  EXPECT_EQ(u.bits, 32 * 39);
}

TEST(Assembler, UsageSummary) {
  const auto u = asm_::usage(asm_::assemble(demos::polynomial_source()));
  EXPECT_EQ(u.program, 18);
  EXPECT_EQ(u.constants, 10);
  EXPECT_EQ(u.bits, 18 * 27 + 10 * 39 + 32 * 39);
}
