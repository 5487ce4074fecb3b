#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <set>
#include <vector>

#include "pbgi/pattern.hpp"
#include "pbgi/scene.hpp"
#include "test_support.hpp"

using namespace pbgi;

TEST_CASE("pattern generation is deterministic in (m, n, seed)") {
  const auto a = generate_pattern(2, 4, 1234);
  const auto b = generate_pattern(2, 4, 1234);
  CHECK((a.data.array() == b.data.array()).all());
  const auto c = generate_pattern(2, 4, 1235);
  CHECK((a.data.array() != c.data.array()).any());
}

TEST_CASE("pattern entries are exactly 0 or 1") {
  const auto p = generate_pattern(2, 4, 99);
  for (int i = 0; i < p.m(); ++i) {
    for (int j = 0; j < p.n(); ++j) {
      CHECK((p.data(i, j) == 0.0 || p.data(i, j) == 1.0));
    }
  }
}

TEST_CASE("pattern mean is near one half at 64x64") {
  const auto p = generate_pattern(64, 64, 42);
  // direct count over all 4096 draws
  int ones = 0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      if (p.data(i, j) == 1.0) ++ones;
    }
  }
  const double mean = static_cast<double>(ones) / 4096.0;
  CHECK(mean >= 0.45);
  CHECK(mean <= 0.55);
}

TEST_CASE("pattern dimension validation") {
  CHECK_THROWS_AS(generate_pattern(0, 4, 1), DimensionError);
  CHECK_THROWS_AS(generate_pattern(5, 4, 1), DimensionError);
  CHECK_THROWS_AS(SpecklePattern(Eigen::MatrixXd::Constant(2, 4, 0.5)), DimensionError);
}

TEST_CASE("sequence length follows the scan protocol") {
  const auto per_strip = generate_sequence(3, 4, 2, PatternMode::PerStrip, 7);
  CHECK(per_strip.length() == 4);  // q + m - 1
  CHECK(per_strip.strip_count() == 2);

  const auto invariant = generate_sequence(3, 4, 2, PatternMode::Invariant, 7);
  CHECK(invariant.length() == 1);
}

TEST_CASE("per-strip sequences are pairwise distinct") {
  const auto seq = generate_sequence(3, 4, 5, PatternMode::PerStrip, 11);
  REQUIRE(seq.length() == 7);
  for (int a = 0; a < seq.length(); ++a) {
    for (int b = a + 1; b < seq.length(); ++b) {
      CHECK((seq.patterns[a].data.array() != seq.patterns[b].data.array()).any());
    }
  }
}

TEST_CASE("sequence patterns can be regenerated in isolation") {
  const auto seq = generate_sequence(4, 6, 3, PatternMode::PerStrip, 21);
  for (int k = 0; k < seq.length(); ++k) {
    const auto solo = generate_pattern(4, 6, sequence_pattern_seed(21, k));
    CHECK((seq.patterns[k].data.array() == solo.data.array()).all());
  }
}

TEST_CASE("invariant sequences hold exactly one pattern") {
  std::vector<SpecklePattern> two(2, generate_pattern(2, 3, 5));
  CHECK_THROWS_AS(PatternSequence(std::move(two), PatternMode::Invariant, 5), DimensionError);
}

namespace {

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("graymap load scales by the bit-depth peak") {
  test_support::TempDir dir;

  SUBCASE("uniform white is 1.0") {
    write_bytes(dir.path() / "white.pgm", std::string("P5\n2 2\n255\n") + "\xFF\xFF\xFF\xFF");
    const auto scene = load_scene(dir.path() / "white.pgm");
    CHECK(scene.data.minCoeff() == 1.0);
    CHECK(scene.data.maxCoeff() == 1.0);
  }

  SUBCASE("uniform black is 0.0") {
    write_bytes(dir.path() / "black.pgm", std::string("P5\n2 2\n255\n") + std::string(4, '\0'));
    const auto scene = load_scene(dir.path() / "black.pgm");
    CHECK(scene.data.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("a 128 sample maps to 128/255") {
    std::string data = "P5\n2 2\n255\n";
    data += static_cast<char>(128);
    data += std::string(3, '\0');
    write_bytes(dir.path() / "gray.pgm", data);
    const auto scene = load_scene(dir.path() / "gray.pgm");
    CHECK(scene.data(0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    CHECK(scene.data(0, 1) == 0.0);
  }

  SUBCASE("ascii graymaps load too") {
    write_bytes(dir.path() / "ascii.pgm", "P2\n# comment\n2 2\n255\n0 255\n128 64\n");
    const auto scene = load_scene(dir.path() / "ascii.pgm");
    CHECK(scene.data(0, 1) == 1.0);
    CHECK(scene.data(1, 0) == doctest::Approx(128.0 / 255.0));
  }
}

TEST_CASE("scene save/load round trip stays within one quantization step") {
  test_support::TempDir dir;

  SUBCASE("all zeros and all ones survive exactly") {
    const Scene zeros(Eigen::MatrixXd::Zero(4, 3));
    save_scene(zeros, dir.path() / "z.pgm");
    CHECK((load_scene(dir.path() / "z.pgm").data.array() == zeros.data.array()).all());

    const Scene ones(Eigen::MatrixXd::Ones(4, 3));
    save_scene(ones, dir.path() / "o.pgm");
    CHECK((load_scene(dir.path() / "o.pgm").data.array() == ones.data.array()).all());
  }

  SUBCASE("random scene is off by at most 1/255") {
    const Scene scene(test_support::random_matrix01(9, 7, 31));
    save_scene(scene, dir.path() / "r.pgm");
    const auto back = load_scene(dir.path() / "r.pgm");
    CHECK((back.data - scene.data).cwiseAbs().maxCoeff() <= 1.0 / 255.0);
  }

  SUBCASE("16-bit scenes use two-byte samples") {
    const Scene scene(test_support::random_matrix01(5, 4, 32), 16);
    save_scene(scene, dir.path() / "wide.pgm");
    const auto back = load_scene(dir.path() / "wide.pgm", 16);
    CHECK((back.data - scene.data).cwiseAbs().maxCoeff() <= 1.0 / 65535.0);
  }
}

TEST_CASE("graymap error paths name the offending file") {
  test_support::TempDir dir;
  CHECK_THROWS_AS(load_scene(dir.path() / "absent.pgm"), IoError);

  write_bytes(dir.path() / "bad.pgm", "P6\n2 2\n255\n....");
  CHECK_THROWS_AS(load_scene(dir.path() / "bad.pgm"), IoError);

  write_bytes(dir.path() / "short.pgm", "P5\n4 4\n255\nxx");
  CHECK_THROWS_AS(load_scene(dir.path() / "short.pgm"), IoError);

  // maxval above the requested bit depth's peak
  write_bytes(dir.path() / "deep.pgm", std::string("P5\n2 2\n1023\n") + std::string(8, '\0'));
  CHECK_THROWS_AS(load_scene(dir.path() / "deep.pgm", 8), IoError);
}

TEST_CASE("scene validation rejects out-of-range data") {
  CHECK_THROWS_AS(Scene(Eigen::MatrixXd::Constant(3, 3, 1.5)), DimensionError);
  CHECK_THROWS_AS(Scene(Eigen::MatrixXd::Constant(3, 3, -0.1)), DimensionError);
  CHECK_THROWS_AS(Scene(Eigen::MatrixXd::Zero(1, 3)), DimensionError);
}

TEST_CASE("pattern sequence files round trip and carry the documented header") {
  test_support::TempDir dir;
  const auto seq = generate_sequence(3, 5, 4, PatternMode::PerStrip, 77);
  const auto file = dir.path() / "patterns.bin";
  save_pattern_sequence(seq, file);

  std::ifstream in(file, std::ios::binary);
  std::string header(8, '\0');
  in.read(header.data(), 8);
  CHECK(header == "GISCPAT1");
  unsigned char dims[12];
  in.read(reinterpret_cast<char*>(dims), 12);
  const auto u32 = [&](int offset) {
    return static_cast<std::uint32_t>(dims[offset]) | (dims[offset + 1] << 8) |
           (dims[offset + 2] << 16) | (dims[offset + 3] << 24);
  };
  CHECK(u32(0) == 3);
  CHECK(u32(4) == 5);
  CHECK(u32(8) == 6);  // q + m - 1

  const auto back = load_pattern_sequence(file);
  CHECK(back.mode == PatternMode::PerStrip);
  REQUIRE(back.length() == seq.length());
  for (int k = 0; k < seq.length(); ++k) {
    CHECK((back.patterns[k].data.array() == seq.patterns[k].data.array()).all());
  }

  // single-pattern file loads as invariant unless told otherwise
  const auto one = generate_sequence(3, 5, 1, PatternMode::Invariant, 8);
  save_pattern_sequence(one, dir.path() / "one.bin");
  CHECK(load_pattern_sequence(dir.path() / "one.bin").mode == PatternMode::Invariant);
}

TEST_CASE("pattern files with out-of-alphabet bytes are rejected") {
  test_support::TempDir dir;
  const auto seq = generate_sequence(2, 3, 2, PatternMode::PerStrip, 5);
  const auto file = dir.path() / "patterns.bin";
  save_pattern_sequence(seq, file);

  std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(8 + 12 + 2);  // a data byte past the header
  f.put('\x07');
  f.close();
  CHECK_THROWS_AS(load_pattern_sequence(file), IoError);

  std::fstream g(file, std::ios::in | std::ios::out | std::ios::binary);
  g.put('X');  // break the magic
  g.close();
  CHECK_THROWS_AS(load_pattern_sequence(file), IoError);
}
