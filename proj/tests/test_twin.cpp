#include <gtest/gtest.h>

#include "oprema/assembler.hpp"
#include "oprema/control.hpp"
#include "oprema/demos.hpp"
#include "oprema/twin.hpp"

using namespace oprema;
using namespace oprema::twin;

namespace {

const PlugboardImage& raytrace() {
  static const PlugboardImage img = asm_::assemble(demos::raytrace_source());
  return img;
}

std::vector<std::string> solo_output(const PlugboardImage& img) {
  MachineState st = initial_state(img);
  control::run(st, img);
  return st.output;
}

TwinReport run_with(const std::string& fault, const std::string& policy, TwinSession* out = nullptr, int retries = 10) {
  TwinSession s(raytrace());
  if (!fault.empty()) s.inject(parse_fault(fault));
  TwinLimits lim;
  lim.max_retries = retries;
  auto rep = run_twin(s, Policy{parse_policy(policy)}, lim);
  if (out) *out = s;
  return rep;
}

}  // namespace

TEST(Twin, ParseFault) {
  const FaultSpec f = parse_fault("B:12:R0.7:transient");
  EXPECT_EQ(f.side, Side::b);
  EXPECT_EQ(f.trigger, 12);
  EXPECT_EQ(f.site.kind, FaultSite::Kind::reg);
  EXPECT_EQ(f.site.index, 0);
  EXPECT_EQ(f.bit, 7);
  EXPECT_FALSE(f.stuck);
  for (const char* text : {"A:5:P2.17:stuck", "B:1:C3.39:transient", "A:9:Y2.4.1:stuck", "B:2:IN1.5:transient", "A:3:IN2.39:stuck"})
    EXPECT_EQ(format_fault(parse_fault(text)), text);
  for (const char* bad : {"B:12:R0.7", "C:1:R0.1:stuck", "B:x:R0.1:stuck", "B:1:Q0.1:stuck", "B:1:R0.1:sometimes", "B:1:Y0.1:stuck",
                          "B:1:R0:stuck"})
    EXPECT_THROW(parse_fault(bad), Error) << bad;
}

TEST(Twin, CheckLocationAgainstImage) {
  TwinSession s(raytrace());
  try {
    s.inject(parse_fault("B:1:Y0.50.1:stuck"));  // Y0 holds 7 rows
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_location);
  }
  for (const char* bad : {"B:1:R0.40:stuck", "B:1:P2.28:stuck", "B:1:R32.1:stuck", "B:1:IN3.1:stuck", "B:0:R0.1:stuck", "A:1:C28.1:stuck"})
    EXPECT_THROW(check_location(parse_fault(bad), raytrace()), Error) << bad;
  EXPECT_NO_THROW(check_location(parse_fault("B:1:P2.27:stuck"), raytrace()));
}

TEST(Twin, ParseResolution) {
  EXPECT_EQ(parse_resolution("repeat").action, Action::repeat);
  EXPECT_EQ(parse_resolution("halt").action, Action::halt);
  const Resolution r = parse_resolution("insert:R3=1.5");
  EXPECT_EQ(r.action, Action::insert);
  EXPECT_EQ(r.reg, 3);
  EXPECT_EQ(r.value, parse_decimal("1.5"));
  EXPECT_THROW(parse_resolution("insert:R40=1"), Error);
  EXPECT_THROW(parse_resolution("retry"), Error);
  EXPECT_EQ(parse_policy("repeat,repeat,halt").size(), 3u);
  const Policy p{parse_policy("repeat,halt")};
  EXPECT_EQ(p.at(0).action, Action::repeat);
  EXPECT_EQ(p.at(5).action, Action::halt);
}

TEST(Twin, FaultFreeRunCompletes) {
  TwinSession s(raytrace());
  const auto rep = run_twin(s, Policy{});
  EXPECT_EQ(rep.status, TwinStatus::completed);
  EXPECT_TRUE(rep.mismatches.empty());
  EXPECT_EQ(s.machine(Side::a).output, solo_output(raytrace()));
  EXPECT_EQ(s.machine(Side::b).output, solo_output(raytrace()));
}

TEST(Twin, TransientRegisterFaultWithRepeat) {
  TwinSession s(raytrace());
  const auto rep = run_with("B:12:R0.7:transient", "repeat", &s);
  EXPECT_EQ(rep.status, TwinStatus::completed);
  ASSERT_EQ(rep.mismatches.size(), 1u);
  EXPECT_GE(rep.mismatches[0].step, 12);
  EXPECT_EQ(rep.mismatches[0].resolution, "repeat");
  EXPECT_EQ(s.machine(Side::a).output, solo_output(raytrace()));
  EXPECT_EQ(s.machine(Side::b).output, solo_output(raytrace()));
}

TEST(Twin, StuckFaultExhaustsRetries) {
  const auto rep = run_with("A:5:P2.17:stuck", "repeat");
  EXPECT_EQ(rep.status, TwinStatus::retries_exhausted);
  EXPECT_EQ(rep.mismatches.size(), 11u);
  for (const auto& m : rep.mismatches) EXPECT_EQ(m.pc, rep.mismatches.front().pc);
  EXPECT_EQ(run_with("A:5:P2.17:stuck", "repeat", nullptr, 3).mismatches.size(), 4u);
}

TEST(Twin, HaltPolicy) {
  const auto rep = run_with("B:12:R0.7:transient", "halt");
  EXPECT_EQ(rep.status, TwinStatus::halted_on_mismatch);
  ASSERT_EQ(rep.mismatches.size(), 1u);
  EXPECT_EQ(rep.mismatches[0].resolution, "halt");
}

TEST(Twin, InsertTakesMachineAResult) {
  TwinSession s(raytrace());
  const auto rep = run_with("B:12:R0.7:stuck", "insert", &s);
  ASSERT_FALSE(rep.mismatches.empty());
  EXPECT_EQ(rep.mismatches[0].resolution.rfind("insert", 0), 0u);
  EXPECT_EQ(s.machine(Side::a).pc, s.machine(Side::b).pc);
}

TEST(Twin, MismatchFreezesBothMachines) {
  TwinSession s(raytrace());
  s.inject(parse_fault("B:2:IN1.2:transient"));
  s.start();
  LockstepResult r;
  do r = s.lockstep_step();
  while (r.agree && !s.finished());
  ASSERT_FALSE(r.agree);
  EXPECT_TRUE(s.in_mismatch());
  EXPECT_EQ(s.machine(Side::a).mode, Mode::idle);
  EXPECT_EQ(s.machine(Side::b).mode, Mode::idle);
  EXPECT_EQ(s.machine(Side::a).pc, r.mismatch.pc);
  EXPECT_EQ(s.machine(Side::b).pc, r.mismatch.pc);
  EXPECT_THROW(s.lockstep_step(), Error);
  s.resolve(parse_resolution("repeat"));
  EXPECT_TRUE(s.lockstep_step().agree);
  try {
    s.resolve(parse_resolution("repeat"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_in_mismatch);
  }
}

TEST(Twin, DesyncedPc) {
  TwinSession s(raytrace());
  s.start();
  s.machine(Side::b).pc = 3;
  try {
    s.lockstep_step();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::desynced_pc);
  }
}

TEST(Twin, ErrorObservableComparedFirst) {
  Observation a, b;
  a.error = "InvalidOpcode";
  b.written = std::make_pair(1, Row39{5});
  b.next_pc = 7;
  EXPECT_EQ(first_difference(a, b), Observable::error);
  a.error.reset();
  EXPECT_EQ(first_difference(a, b), Observable::written);
  b.written.reset();
  EXPECT_EQ(first_difference(a, b), Observable::next_pc);
}

TEST(Twin, CommonMachineErrorIsReported) {
  PlugboardImage img;
  img.program[0] = 25u << 16;
  TwinSession s(img);
  const auto rep = run_twin(s, Policy{});
  EXPECT_EQ(rep.status, TwinStatus::machine_error);
  ASSERT_TRUE(s.error().has_value());
}

TEST(Twin, StepLimit) {
  const PlugboardImage img = asm_::assemble(".const\n z = 0\n.prog\nloop: JZE z, loop\n");
  TwinSession s(img);
  TwinLimits lim;
  lim.max_steps = 50;
  const auto rep = run_twin(s, Policy{}, lim);
  EXPECT_EQ(rep.status, TwinStatus::step_limit);
  EXPECT_EQ(rep.steps, 50);
}
