#include <doctest.h>

#include <fstream>
#include <vector>

#include "oracles.hpp"
#include "pbgi/forward_model.hpp"
#include "test_support.hpp"

using namespace pbgi;

namespace {

ScanGeometry geometry_for(int m, int n, int q) {
  ScanGeometry g;
  g.m = m;
  g.n = n;
  g.q = q;
  return g;
}

PatternSequence replicate(const SpecklePattern& p, int count, PatternMode mode) {
  std::vector<SpecklePattern> patterns(static_cast<std::size_t>(count), p);
  return PatternSequence(std::move(patterns), mode, 0);
}

std::vector<Eigen::MatrixXd> raw_patterns(const PatternSequence& seq) {
  std::vector<Eigen::MatrixXd> raw;
  for (const auto& p : seq.patterns) raw.push_back(p.data);
  return raw;
}

}  // namespace

TEST_CASE("all-zero scene produces all-zero frames") {
  const Scene scene(Eigen::MatrixXd::Zero(4, 3));
  const auto seq = generate_sequence(2, 4, 3, PatternMode::PerStrip, 5);
  const auto record = simulate_scan(scene, seq, geometry_for(2, 4, 3));
  CHECK(record.frames.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("all-ones pattern rows read a+b on a two-pixel strip") {
  Eigen::MatrixXd strip(2, 1);
  const double a = 0.3, b = 0.6;
  strip << a, b;
  const Scene scene(strip);
  const auto seq = replicate(SpecklePattern(Eigen::MatrixXd::Ones(2, 2)), 2,
                             PatternMode::PerStrip);
  const auto record = simulate_scan(scene, seq, geometry_for(2, 2, 1));
  REQUIRE(record.steps() == 2);
  // step 0: row 0 sees the strip, row 1 is ahead of the scene
  CHECK(record.frames(0, 0) == doctest::Approx(a + b).epsilon(1e-15));
  CHECK(record.frames(1, 0) == 0.0);
  // step 1: row 0 is past the scene, row 1 sees the strip
  CHECK(record.frames(0, 1) == 0.0);
  CHECK(record.frames(1, 1) == doctest::Approx(a + b).epsilon(1e-15));
}

TEST_CASE("scan frames match the staggered-product oracle on an enumerated instance") {
  // n=3, m=2, q=2 with explicitly listed binary patterns
  Eigen::MatrixXd p1(2, 3), p2(2, 3), p3(2, 3);
  p1 << 1, 0, 1,
        0, 1, 1;
  p2 << 0, 1, 0,
        1, 1, 0;
  p3 << 1, 1, 1,
        1, 0, 1;
  std::vector<SpecklePattern> patterns{SpecklePattern(p1), SpecklePattern(p2), SpecklePattern(p3)};
  const PatternSequence seq(std::move(patterns), PatternMode::PerStrip, 0);

  Eigen::MatrixXd scene_data(3, 2);
  scene_data << 0.2, 0.9,
                0.5, 0.1,
                0.8, 0.4;
  const Scene scene(scene_data);

  const auto record = simulate_scan(scene, seq, geometry_for(2, 3, 2));

  // Oracle: build each strip matrix from the definition and multiply, then
  // scatter back into frames (strip i is read by row j at step i + j - 1).
  const auto raw = raw_patterns(seq);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, 3);
  for (int i = 1; i <= 2; ++i) {
    const Eigen::MatrixXd a_i = oracles::strip_matrix(raw, i, 2, 3);
    const Eigen::VectorXd y_i = a_i * scene_data.col(i - 1);
    for (int j = 1; j <= 2; ++j) {
      expected(j - 1, i + j - 2) = y_i(j - 1);
    }
  }
  CHECK((record.frames - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("scan is linear in the scene when noiseless") {
  const auto seq = generate_sequence(3, 5, 4, PatternMode::PerStrip, 17);
  const auto g = geometry_for(3, 5, 4);
  const Eigen::MatrixXd xa = test_support::random_matrix01(5, 4, 1);
  const Eigen::MatrixXd xb = test_support::random_matrix01(5, 4, 2);
  const double alpha = 0.3, beta = 0.5;
  const auto fa = simulate_scan(Scene(xa), seq, g).frames;
  const auto fb = simulate_scan(Scene(xb), seq, g).frames;
  const auto fc = simulate_scan(Scene(alpha * xa + beta * xb), seq, g).frames;
  CHECK((fc - alpha * fa - beta * fb).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("strip matrices follow the stagger definition") {
  SUBCASE("invariant mode returns the shared pattern for any strip") {
    const auto seq = generate_sequence(3, 4, 5, PatternMode::Invariant, 3);
    const auto a0 = assemble_strip_matrix(seq, 0);
    const auto a4 = assemble_strip_matrix(seq, 4);
    CHECK((a0.array() == seq.patterns.front().data.array()).all());
    CHECK((a4.array() == a0.array()).all());
  }

  SUBCASE("single-row stagger degenerates to the pattern row") {
    const auto seq = generate_sequence(1, 4, 3, PatternMode::PerStrip, 9);
    for (int i = 0; i < 3; ++i) {
      const auto a_i = assemble_strip_matrix(seq, i);
      CHECK((a_i.array() == seq.patterns[i].data.row(0).array()).all());
    }
  }

  SUBCASE("m=3 stagger picks rows from three consecutive patterns") {
    const auto seq = generate_sequence(3, 4, 4, PatternMode::PerStrip, 13);
    // strip 2 in 1-based terms: rows of patterns 2, 3, 4
    const auto a = assemble_strip_matrix(seq, 1);
    CHECK((a.row(0).array() == seq.patterns[1].data.row(0).array()).all());
    CHECK((a.row(1).array() == seq.patterns[2].data.row(1).array()).all());
    CHECK((a.row(2).array() == seq.patterns[3].data.row(2).array()).all());
    // and against the independent constructor
    const auto expected = oracles::strip_matrix(raw_patterns(seq), 2, 3, 4);
    CHECK((a.array() == expected.array()).all());
  }

  SUBCASE("out-of-range strip raises") {
    const auto seq = generate_sequence(3, 4, 4, PatternMode::PerStrip, 13);
    CHECK_THROWS_AS(assemble_strip_matrix(seq, -1), IndexError);
    CHECK_THROWS_AS(assemble_strip_matrix(seq, 4), IndexError);
  }
}

TEST_CASE("assembled system reproduces the dense block-diagonal product") {
  SUBCASE("single strip keeps the signal length at m") {
    const auto seq = generate_sequence(2, 4, 1, PatternMode::PerStrip, 23);
    const Scene scene(test_support::random_matrix01(4, 1, 3));
    const auto record = simulate_scan(scene, seq, geometry_for(2, 4, 1));
    const auto system = assemble_system(record, seq);
    CHECK(system.signal().size() == 2);
    CHECK((system.strip_matrix(0).array() == assemble_strip_matrix(seq, 0).array()).all());
  }

  SUBCASE("random instance matches the stacked-matrix oracle") {
    const auto seq = generate_sequence(2, 4, 3, PatternMode::PerStrip, 29);
    const Scene scene(test_support::random_matrix01(4, 3, 4));
    const auto record = simulate_scan(scene, seq, geometry_for(2, 4, 3));
    const auto system = assemble_system(record, seq);

    const Eigen::MatrixXd dense = oracles::dense_system_matrix(raw_patterns(seq), 2, 4, 3);
    const Eigen::VectorXd expected = dense * oracles::stack_scene(scene.data);
    CHECK((system.signal() - expected).norm() <= 1e-12 * expected.norm());

    // implementation's own dense path agrees with the oracle
    CHECK((system.dense_matrix() - dense).cwiseAbs().maxCoeff() == 0.0);

    // operator views agree with the dense matrix
    const Eigen::VectorXd probe = test_support::random_vector(12, 5);
    CHECK((system.apply(probe) - dense * probe).norm() <= 1e-12);
    const Eigen::VectorXd probe_m = test_support::random_vector(6, 6);
    CHECK((system.adjoint(probe_m) - dense.transpose() * probe_m).norm() <= 1e-12);
  }
}

TEST_CASE("replicated per-strip patterns degenerate to the invariant scheme") {
  const int m = 3, n = 5, q = 4;
  const auto shared = generate_pattern(m, n, 31);
  const Scene scene(test_support::random_matrix01(n, q, 7));
  const auto g = geometry_for(m, n, q);

  const auto per_strip = replicate(shared, q + m - 1, PatternMode::PerStrip);
  const auto invariant = replicate(shared, 1, PatternMode::Invariant);

  const auto sys2 = assemble_system(simulate_scan(scene, per_strip, g), per_strip);
  const auto sys1 = assemble_system(simulate_scan(scene, invariant, g), invariant);

  // stacked signal reshaped column-wise equals the invariant signal matrix
  CHECK((sys2.signal() - sys1.signal()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys1.signal_matrix().col(2) -
         sys2.signal().segment(2 * m, m)).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < q; ++i) {
    CHECK((sys2.strip_matrix(i).array() == sys1.strip_matrix(i).array()).all());
  }
}

TEST_CASE("assemble_system rejects inconsistent inputs") {
  const auto seq = generate_sequence(2, 4, 3, PatternMode::PerStrip, 1);
  const Scene scene(test_support::random_matrix01(4, 3, 1));
  const auto record = simulate_scan(scene, seq, geometry_for(2, 4, 3));

  const auto other_mode = generate_sequence(2, 4, 3, PatternMode::Invariant, 1);
  CHECK_THROWS_AS(assemble_system(record, other_mode), ConsistencyError);

  const auto wrong_length = generate_sequence(2, 4, 4, PatternMode::PerStrip, 1);
  CHECK_THROWS_AS(assemble_system(record, wrong_length), ConsistencyError);
}

TEST_CASE("simulate_scan validates dimensions and geometry") {
  const auto seq = generate_sequence(2, 4, 3, PatternMode::PerStrip, 1);
  const Scene scene(test_support::random_matrix01(4, 3, 1));

  CHECK_THROWS_AS(simulate_scan(scene, seq, geometry_for(2, 4, 2)), DimensionError);
  CHECK_THROWS_AS(simulate_scan(scene, seq, geometry_for(3, 4, 3)), DimensionError);
  CHECK_THROWS_AS(simulate_scan(Scene(test_support::random_matrix01(5, 3, 1)), seq,
                                geometry_for(2, 4, 3)),
                  DimensionError);

  ScanGeometry drifting = geometry_for(2, 4, 3);
  drifting.velocity = drifting.strip_resolution * drifting.sampling_frequency * 1.01;
  CHECK_THROWS_AS(simulate_scan(scene, seq, drifting), GeometryError);

  ScanGeometry oversampled = geometry_for(5, 4, 3);
  CHECK_THROWS_AS(oversampled.validate(), GeometryError);
}

TEST_CASE("sampling rate is m over n") {
  CHECK(sampling_rate(geometry_for(16, 64, 1)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sampling_rate(geometry_for(64, 64, 1)) == 1.0);
  CHECK(sampling_rate(geometry_for(40, 64, 1)) == doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("synchronization check accepts the matched desk-scale values") {
  // r = 248 um, f = 2 Hz, matched stepper velocity 496 um/s
  CHECK(check_synchronization(248e-6, 2.0, 496e-6, 1e-9));
  CHECK(check_synchronization(248e-6, 2.0, 248e-6 * 2.0, 0.0));
  // 500 um/s misses by about 8.06e-3 relative
  CHECK_FALSE(check_synchronization(248e-6, 2.0, 500e-6, 1e-3));
  CHECK_THROWS_AS(check_synchronization(0.0, 2.0, 1.0, 1e-3), DomainError);
  CHECK_THROWS_AS(check_synchronization(1.0, -2.0, 1.0, 1e-3), DomainError);
  CHECK_THROWS_AS(check_synchronization(1.0, 2.0, 2.0, -1e-3), DomainError);
}

TEST_CASE("additive noise is seeded per frame and reproducible") {
  const auto seq = generate_sequence(3, 6, 4, PatternMode::PerStrip, 2);
  const Scene scene(test_support::random_matrix01(6, 4, 2));
  const auto g = geometry_for(3, 6, 4);

  NoiseSpec noise;
  noise.kind = NoiseSpec::Kind::AdditiveGaussian;
  noise.sigma = 0.5;
  noise.seed = 404;

  const auto a = simulate_scan(scene, seq, g, noise);
  const auto b = simulate_scan(scene, seq, g, noise);
  CHECK((a.frames.array() == b.frames.array()).all());

  const auto clean = simulate_scan(scene, seq, g);
  CHECK((a.frames.array() != clean.frames.array()).any());

  noise.seed = 405;
  const auto c = simulate_scan(scene, seq, g, noise);
  CHECK((a.frames.array() != c.frames.array()).any());

  NoiseSpec invalid = noise;
  invalid.sigma = -1.0;
  CHECK_THROWS_AS(simulate_scan(scene, seq, g, invalid), DomainError);
}

TEST_CASE("scan records round trip through the binary format") {
  test_support::TempDir dir;
  const auto seq = generate_sequence(3, 6, 4, PatternMode::PerStrip, 2);
  const Scene scene(test_support::random_matrix01(6, 4, 2));
  const auto record = simulate_scan(scene, seq, geometry_for(3, 6, 4));

  const auto file = dir.path() / "scan.bin";
  save_scan_record(record, file);

  std::ifstream in(file, std::ios::binary);
  std::string header(8, '\0');
  in.read(header.data(), 8);
  CHECK(header == "GISCSCN1");

  const auto back = load_scan_record(file);
  CHECK(back.meta.m == 3);
  CHECK(back.meta.n == 6);
  CHECK(back.meta.q == 4);
  CHECK(back.meta.mode == PatternMode::PerStrip);
  CHECK((back.frames.array() == record.frames.array()).all());

  std::ofstream bad(dir.path() / "bad.bin", std::ios::binary);
  bad << "NOTASCAN";
  bad.close();
  CHECK_THROWS_AS(load_scan_record(dir.path() / "bad.bin"), IoError);
  CHECK_THROWS_AS(load_scan_record(dir.path() / "absent.bin"), IoError);
}
