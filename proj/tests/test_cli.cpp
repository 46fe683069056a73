#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "oprema/assembler.hpp"
#include "oprema/control.hpp"
#include "oprema/demos.hpp"
#include "oprema/image_io.hpp"

namespace fs = std::filesystem;
using namespace oprema;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(OPREMA_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("oprema_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::vector<std::string> expected_output(const std::string& src) {
  const auto img = asm_::assemble(src);
  MachineState st = initial_state(img);
  control::run(st, img);
  return st.output;
}

std::string joined(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

}  // namespace

TEST_F(Cli, DemoList) {
  const auto r = cli("demo list");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "polynomial\nraytrace\ntiming\nspecials\nstop\n");
}

TEST_F(Cli, AssembleRunAndDisassemble) {
  const std::string src = write("poly.oprema", demos::polynomial_source());
  auto r = cli("asm " + src);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("18/300 instructions"), std::string::npos);
  const std::string img = path("poly.opimg");
  EXPECT_EQ(image::load_image(image::read_file(img)), asm_::assemble(demos::polynomial_source()));

  r = cli("run " + img);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, joined(expected_output(demos::polynomial_source())));

  r = cli("disasm " + img + " -o " + path("back.oprema"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(cli("asm " + path("back.oprema") + " -o " + path("back.opimg")).code, 0);
  EXPECT_EQ(image::read_file(path("back.opimg")), image::read_file(img));
}

TEST_F(Cli, RunSourceWithTraceFileAndTiming) {
  const std::string src = write("t.oprema", demos::timing_source());
  const auto r = cli("run " + src + " --timing --trace " + path("t.trace"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("pulses 444"), std::string::npos) << r.out;
  std::ifstream in(path("t.trace"));
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 5);
}

TEST_F(Cli, StepLimitExitCode) {
  const std::string src = write("loop.oprema", ".const\n z = 0\n.prog\nloop: JZE z, loop\n");
  const auto r = cli("run " + src + " --max-steps 1000");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("after 1000 steps"), std::string::npos) << r.out;
  EXPECT_EQ(cli("trace " + src + " --max-steps 3").code, 2);
}

TEST_F(Cli, StartOverrides) {
  const std::string src = write("r.oprema", demos::raytrace_source());
  EXPECT_EQ(cli("run " + src + " --start-positions 0,0,0").code, 1);
  EXPECT_EQ(cli("run " + src + " --start-positions 0,0,0,99").code, 1);
  EXPECT_EQ(cli("run " + src + " --start-pc 300").code, 1);
  const std::string stop = write("s.oprema", ".const\n a = 1\n.prog\n MOV a -> R0 [P]\n STOP\n");
  const auto r = cli("run " + stop + " --start-pc 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
}

TEST_F(Cli, UserErrors) {
  const std::string bad = write("bad.oprema", ".prog\n FOO\n");
  auto r = cli("asm " + bad);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("bad.oprema:2:2: Syntax"), std::string::npos) << r.out;
  EXPECT_EQ(cli("run " + path("missing.opimg")).code, 1);
  EXPECT_EQ(cli("bogus").code, 1);
  EXPECT_EQ(cli("").code, 1);
  const std::string junk = write("junk.opimg", std::string("OPIM\x01", 5));
  r = cli("run " + junk);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("Truncated"), std::string::npos) << r.out;
}

TEST_F(Cli, EmptyProgramWarning) {
  const std::string src = write("e.oprema", "");
  const auto r = cli("asm " + src);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("warning: empty program"), std::string::npos);
}

TEST_F(Cli, TwinExitCodes) {
  const std::string src = write("r.oprema", demos::raytrace_source());
  auto r = cli("twin " + src + " --inject B:12:R0.7:transient --policy repeat");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("observable=written"), std::string::npos);
  r = cli("twin " + src + " --inject B:12:R0.7:transient");
  EXPECT_EQ(r.code, 3);
  r = cli("twin " + src + " --inject A:5:P2.17:stuck --policy repeat --max-retries 2");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("retries exhausted"), std::string::npos);
  EXPECT_EQ(cli("twin " + src + " --inject B:12:R99.7:transient").code, 1);
  EXPECT_EQ(cli("twin " + src + " --policy sometimes").code, 1);
  r = cli("twin " + src + " --inject B:12:R0.7:transient --policy insert:R0=1");
  EXPECT_NE(r.out.find("insert +0.10000000e+01 -> R0"), std::string::npos) << r.out;
}

TEST_F(Cli, DemoSourceAndRun) {
  auto r = cli("demo stop");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, demos::stop_source());
  r = cli("demo specials --run");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, joined(expected_output(demos::specials_source())));
  EXPECT_EQ(cli("demo nothing").code, 1);
}

TEST_F(Cli, VerifyMutant) {
  const auto r = cli("verify --mutant --table");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL  2"), std::string::npos) << r.out;
}
