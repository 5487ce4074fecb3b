#pragma once

// Ground-truth reflectivity scenes and portable graymap I/O.
//
// A scene is an n x q matrix: rows are across-track pixels (the direction the
// line detector spans), columns are strips along the scan direction. Values
// live in [0, 1]; bit_depth only matters for quantized file I/O and PSNR
// scaling. On disk, image rows map to across-track pixels and image columns
// map to strips, so a PGM of width w and height h loads as n = h, q = w.

#include <Eigen/Dense>
#include <filesystem>

#include "pbgi/errors.hpp"

namespace pbgi {

struct Scene {
  Eigen::MatrixXd data;  // n x q, values in [0, 1]
  int bit_depth = 8;

  Scene(Eigen::MatrixXd values, int depth = 8);

  int n() const { return static_cast<int>(data.rows()); }
  int q() const { return static_cast<int>(data.cols()); }
  double peak() const { return static_cast<double>((1u << bit_depth) - 1u); }
};

// Reads a binary (P5) or ASCII (P2) graymap. Pixel values are divided by
// 2^bit_depth - 1; a file whose maxval exceeds that peak is rejected.
Scene load_scene(const std::filesystem::path& path, int bit_depth = 8);

// Clips to [0, 1], quantizes to the scene's bit depth, and writes a binary
// graymap (maxval 2^bit_depth - 1; two bytes per sample above 8 bits).
// save followed by load changes no pixel by more than one quantization step.
void save_scene(const Scene& scene, const std::filesystem::path& path);

}  // namespace pbgi
