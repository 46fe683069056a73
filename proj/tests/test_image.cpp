#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oprema/assembler.hpp"
#include "oprema/demos.hpp"
#include "oprema/image_io.hpp"
#include "oprema/verify.hpp"

using namespace oprema;

namespace {

Error load_error(const image::Bytes& b) {
  try {
    image::load_image(b);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "loaded";
  return Error(Errc::malformed, "none");
}

}  // namespace

TEST(Image, GoldenMinimalStop) {
  const image::Bytes bytes = image::save_image(asm_::assemble(".prog\n STOP\n"));
  image::Bytes expected = {'O', 'P', 'I', 'M', 1, 0, 0, 0};  // magic, version, flags
  expected.insert(expected.end(), {0, 0, 0, 0, 0, 0});        // start pc, positions
  image::Bytes bitmap(38, 0);
  bitmap[0] = 1;
  expected.insert(expected.end(), bitmap.begin(), bitmap.end());
  expected.insert(expected.end(), {0x00, 0x00, 0x18, 0x00});  // op 24 << 16
  expected.insert(expected.end(), {0, 0, 0, 0});              // no cables
  expected.insert(expected.end(), {0, 0, 0, 0});              // constant bitmap
  for (int k = 0; k < 4; ++k) expected.insert(expected.end(), {0, 0});
  EXPECT_EQ(bytes, expected);
  EXPECT_EQ(bytes.size(), 72u);

  const PlugboardImage img = image::load_image(expected);
  MachineState st = initial_state(img);
  const auto rep = control::run(st, img);
  EXPECT_EQ(rep.status, control::RunStatus::halted);
  EXPECT_EQ(rep.steps, 1);
}

TEST(Image, DemosRoundTripByteIdentical) {
  for (const auto& d : demos::corpus()) {
    const auto img = asm_::assemble(d.source);
    const auto bytes = image::save_image(img);
    const auto back = image::load_image(bytes);
    EXPECT_EQ(back, img) << d.name;
    EXPECT_EQ(image::save_image(back), bytes) << d.name;
  }
}

TEST(Image, RandomImagesRoundTrip) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto img = verify::random_image(rng);
    const auto bytes = image::save_image(img);
    ASSERT_EQ(image::load_image(bytes), img);
    ASSERT_EQ(asm_::assemble(asm_::disassemble(img)), img);
  }
}

TEST(Image, TruncationReportsOffset) {
  const auto bytes = image::save_image(asm_::assemble(demos::raytrace_source()));
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    const image::Bytes cut(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
    const Error e = load_error(cut);
    ASSERT_EQ(e.code(), Errc::truncated) << n << ": " << e.what();
    ASSERT_GE(e.offset(), 0);
    ASSERT_LE(static_cast<std::size_t>(e.offset()), n);
  }
}

TEST(Image, HeaderErrors) {
  auto bytes = image::save_image(asm_::assemble(".prog\n STOP\n"));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_EQ(load_error(bad).code(), Errc::bad_magic);
  bad = bytes;
  bad[4] = 2;
  EXPECT_EQ(load_error(bad).code(), Errc::version_unsupported);
  bad = bytes;
  bad[6] = 1;
  EXPECT_EQ(load_error(bad).code(), Errc::malformed);
  bad = bytes;
  bad.push_back(0);
  EXPECT_EQ(load_error(bad).code(), Errc::malformed);
  bad = bytes;
  bad[14 + 37] = 0x80;  // past row 299 in the bitmap
  EXPECT_EQ(load_error(bad).code(), Errc::malformed);
}

TEST(Image, InconsistentWiringRejected) {
  auto bytes = image::save_image(asm_::assemble(".prog\n STOP\n"));
  bytes[52] |= 0x8;  // cond-from socket without a cable
  const Error e = load_error(bytes);
  EXPECT_EQ(e.code(), Errc::inconsistent_wiring);
}

TEST(Image, FileIo) {
  const auto path = (std::filesystem::temp_directory_path() / "oprema_image_test.opimg").string();
  const auto bytes = image::save_image(asm_::assemble(demos::polynomial_source()));
  image::write_file(path, bytes);
  EXPECT_EQ(image::read_file(path), bytes);
  std::filesystem::remove(path);
  EXPECT_THROW(image::read_file(path), Error);
}
