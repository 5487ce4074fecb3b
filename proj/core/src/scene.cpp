#include "pbgi/scene.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

namespace pbgi {

Scene::Scene(Eigen::MatrixXd values, int depth) : data(std::move(values)), bit_depth(depth) {
  if (data.rows() < 2 || data.cols() < 1) {
    throw DimensionError("scene must be at least 2 pixels across-track and 1 strip long, got " +
                         std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
  if (bit_depth < 1 || bit_depth > 16) {
    throw DimensionError("scene bit depth must be in [1, 16], got " + std::to_string(bit_depth));
  }
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const double v = data(i, j);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw DimensionError("scene value out of [0, 1] at (" + std::to_string(i) + ", " +
                             std::to_string(j) + "): " + std::to_string(v));
      }
    }
  }
}

namespace {

// Skips whitespace and '#' comment lines, then reads one unsigned token.
unsigned read_pnm_token(std::istream& in, const std::filesystem::path& path) {
  int c = in.peek();
  while (c != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
    c = in.peek();
  }
  unsigned value = 0;
  if (!(in >> value)) {
    throw IoError("malformed graymap header in " + path.string());
  }
  return value;
}

}  // namespace

Scene load_scene(const std::filesystem::path& path, int bit_depth) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open scene file " + path.string());
  }
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw IoError("not a portable graymap (P5/P2): " + path.string());
  }
  const bool binary = magic[1] == '5';
  const unsigned width = read_pnm_token(in, path);
  const unsigned height = read_pnm_token(in, path);
  const unsigned maxval = read_pnm_token(in, path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw IoError("bad graymap dimensions/maxval in " + path.string());
  }
  if (bit_depth < 1 || bit_depth > 16) {
    throw IoError("unsupported bit depth " + std::to_string(bit_depth) + " for " + path.string());
  }
  const unsigned peak = (1u << bit_depth) - 1u;
  if (maxval > peak) {
    throw IoError("graymap maxval " + std::to_string(maxval) + " exceeds 2^" +
                  std::to_string(bit_depth) + "-1 in " + path.string());
  }

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<unsigned> samples(count);
  if (binary) {
    in.get();  // single whitespace after maxval
    if (maxval > 255) {
      std::vector<std::uint8_t> raw(count * 2);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
      if (!in) throw IoError("truncated graymap data in " + path.string());
      for (std::size_t i = 0; i < count; ++i) {
        samples[i] = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      }
    } else {
      std::vector<std::uint8_t> raw(count);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
      if (!in) throw IoError("truncated graymap data in " + path.string());
      for (std::size_t i = 0; i < count; ++i) samples[i] = raw[i];
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) samples[i] = read_pnm_token(in, path);
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (samples[i] > maxval) {
      throw IoError("graymap sample exceeds maxval in " + path.string());
    }
  }

  Eigen::MatrixXd data(height, width);
  const double scale = static_cast<double>(peak);
  for (unsigned row = 0; row < height; ++row) {
    for (unsigned col = 0; col < width; ++col) {
      data(row, col) = static_cast<double>(samples[static_cast<std::size_t>(row) * width + col]) / scale;
    }
  }
  try {
    return Scene(std::move(data), bit_depth);
  } catch (const DimensionError& e) {
    throw IoError("graymap " + path.string() + " is not a valid scene: " + e.what());
  }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  const unsigned maxval = (1u << scene.bit_depth) - 1u;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << "P5\n" << scene.q() << " " << scene.n() << "\n" << maxval << "\n";
  const bool wide = maxval > 255;
  for (int row = 0; row < scene.n(); ++row) {
    for (int col = 0; col < scene.q(); ++col) {
      const double clipped = std::min(1.0, std::max(0.0, scene.data(row, col)));
      const unsigned v = static_cast<unsigned>(std::lround(clipped * maxval));
      if (wide) {
        out.put(static_cast<char>((v >> 8) & 0xFF));
        out.put(static_cast<char>(v & 0xFF));
      } else {
        out.put(static_cast<char>(v & 0xFF));
      }
    }
  }
  if (!out) {
    throw IoError("failed while writing " + path.string());
  }
}

}  // namespace pbgi
