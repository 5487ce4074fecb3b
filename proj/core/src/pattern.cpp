#include "pbgi/pattern.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include "pbgi/rng.hpp"

namespace pbgi {

SpecklePattern::SpecklePattern(Eigen::MatrixXd values) : data(std::move(values)) {
  const auto rows = data.rows();
  const auto cols = data.cols();
  if (rows < 1 || cols < rows) {
    throw DimensionError("pattern needs 1 <= m <= n, got m=" + std::to_string(rows) +
                         " n=" + std::to_string(cols));
  }
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double v = data(i, j);
      if (v != 0.0 && v != 1.0) {
        throw DimensionError("pattern entry must be 0 or 1, got " + std::to_string(v) + " at (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

PatternSequence::PatternSequence(std::vector<SpecklePattern> pats, PatternMode m_,
                                 std::uint64_t seed_)
    : patterns(std::move(pats)), mode(m_), seed(seed_) {
  if (patterns.empty()) {
    throw DimensionError("pattern sequence must not be empty");
  }
  const int m0 = patterns.front().m();
  const int n0 = patterns.front().n();
  for (const auto& p : patterns) {
    if (p.m() != m0 || p.n() != n0) {
      throw DimensionError("all patterns in a sequence must share one shape");
    }
  }
  if (mode == PatternMode::Invariant && patterns.size() != 1) {
    throw DimensionError("invariant-mode sequence must hold exactly one pattern, got " +
                         std::to_string(patterns.size()));
  }
  if (mode == PatternMode::PerStrip && length() < m0) {
    throw DimensionError("per-strip sequence of length " + std::to_string(length()) +
                         " cannot cover any strip with m=" + std::to_string(m0));
  }
}

int PatternSequence::strip_count() const {
  if (mode == PatternMode::Invariant) return -1;  // unbounded
  return length() - m() + 1;
}

const SpecklePattern& PatternSequence::at_step(int k) const {
  if (mode == PatternMode::Invariant) {
    if (k < 0) throw IndexError("negative scan step " + std::to_string(k));
    return patterns.front();
  }
  if (k < 0 || k >= length()) {
    throw IndexError("scan step " + std::to_string(k) + " outside [0, " +
                     std::to_string(length()) + ")");
  }
  return patterns[static_cast<std::size_t>(k)];
}

SpecklePattern generate_pattern(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < m) {
    throw DimensionError("pattern needs 1 <= m <= n, got m=" + std::to_string(m) +
                         " n=" + std::to_string(n));
  }
  std::mt19937_64 engine(seed);
  Eigen::MatrixXd data(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      data(i, j) = static_cast<double>(rng::coin_flip(engine));
    }
  }
  return SpecklePattern(std::move(data));
}

std::uint64_t sequence_pattern_seed(std::uint64_t seed, int index) {
  return rng::substream(seed, static_cast<std::uint64_t>(index));
}

PatternSequence generate_sequence(int m, int n, int q, PatternMode mode, std::uint64_t seed) {
  if (q < 1) {
    throw DimensionError("strip count must be >= 1, got " + std::to_string(q));
  }
  const int count = mode == PatternMode::Invariant ? 1 : q + m - 1;
  std::vector<SpecklePattern> patterns;
  patterns.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    patterns.push_back(generate_pattern(m, n, sequence_pattern_seed(seed, k)));
  }
  return PatternSequence(std::move(patterns), mode, seed);
}

namespace {

constexpr std::array<char, 8> kPatternMagic = {'G', 'I', 'S', 'C', 'P', 'A', 'T', '1'};

void put_u32le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_u32le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw IoError("truncated header in " + path.string());
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void save_pattern_sequence(const PatternSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(kPatternMagic.data(), kPatternMagic.size());
  put_u32le(out, static_cast<std::uint32_t>(seq.m()));
  put_u32le(out, static_cast<std::uint32_t>(seq.n()));
  put_u32le(out, static_cast<std::uint32_t>(seq.length()));
  for (const auto& p : seq.patterns) {
    for (int i = 0; i < p.m(); ++i) {
      for (int j = 0; j < p.n(); ++j) {
        out.put(p.data(i, j) != 0.0 ? '\x01' : '\x00');
      }
    }
  }
  if (!out) {
    throw IoError("failed while writing " + path.string());
  }
}

PatternSequence load_pattern_sequence(const std::filesystem::path& path,
                                      std::optional<PatternMode> mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open pattern file " + path.string());
  }
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kPatternMagic) {
    throw IoError("bad magic in pattern file " + path.string());
  }
  const std::uint32_t m = get_u32le(in, path);
  const std::uint32_t n = get_u32le(in, path);
  const std::uint32_t count = get_u32le(in, path);
  if (m < 1 || n < m || count < 1) {
    throw IoError("bad pattern dimensions in " + path.string());
  }
  std::vector<SpecklePattern> patterns;
  patterns.reserve(count);
  std::vector<char> row(n);
  for (std::uint32_t k = 0; k < count; ++k) {
    Eigen::MatrixXd data(m, n);
    for (std::uint32_t i = 0; i < m; ++i) {
      in.read(row.data(), static_cast<std::streamsize>(n));
      if (!in) throw IoError("truncated pattern data in " + path.string());
      for (std::uint32_t j = 0; j < n; ++j) {
        const char b = row[j];
        if (b != 0 && b != 1) throw IoError("pattern byte not in {0,1} in " + path.string());
        data(i, j) = static_cast<double>(b);
      }
    }
    patterns.emplace_back(std::move(data));
  }
  const PatternMode resolved =
      mode.value_or(count == 1 ? PatternMode::Invariant : PatternMode::PerStrip);
  return PatternSequence(std::move(patterns), resolved, 0);
}

}  // namespace pbgi
