#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>

#include "wrinkle/grid.hpp"

namespace wrinkle {

// FGRID: ASCII header "FGRID <width> <height> <cell_size_m>[ <origin_x> <origin_y>]\n"
// followed by width*height little-endian IEEE-754 f32 values, row-major, top row first.
FloatGrid read_grid(std::istream& in);
FloatGrid read_grid(const std::filesystem::path& path);
void write_grid(const FloatGrid& grid, std::ostream& out);
void write_grid(const FloatGrid& grid, const std::filesystem::path& path);

// 16-bit binary PGM (P5, maxval 65535, big-endian); intensity = sample / maxval.
// Reading also accepts 8-bit PGMs.
GrayImage read_gray(std::istream& in);
GrayImage read_gray(const std::filesystem::path& path);
void write_gray(const GrayImage& img, std::ostream& out);
void write_gray(const GrayImage& img, const std::filesystem::path& path);

// 8-bit PGM with raw label values 0 = background, 1 = wrinkle, 2 = bump.
LabelMask read_labels(std::istream& in);
LabelMask read_labels(const std::filesystem::path& path);
void write_labels(const LabelMask& mask, std::ostream& out);
void write_labels(const LabelMask& mask, const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace wrinkle
