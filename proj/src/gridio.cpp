#include "wrinkle/gridio.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace wrinkle {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_int(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError(std::string("malformed header: bad ") + what + " '" + tok + "'");
  }
}

double parse_double(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError(std::string("malformed header: bad ") + what + " '" + tok + "'");
  }
}

struct PgmData {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

PgmData read_pgm(std::istream& in) {
  PgmData pgm;
  if (pgm_token(in) != "P5") throw FormatError("malformed header: not a binary PGM (P5)");
  pgm.width = parse_int(pgm_token(in), "width");
  pgm.height = parse_int(pgm_token(in), "height");
  pgm.maxval = parse_int(pgm_token(in), "maxval");
  if (pgm.width <= 0 || pgm.height <= 0) throw FormatError("malformed header: bad dimensions");
  if (pgm.maxval <= 0 || pgm.maxval > 65535) throw FormatError("malformed header: bad maxval");
  // pgm_token consumed exactly one whitespace byte after maxval.
  const std::size_t count = static_cast<std::size_t>(pgm.width) * pgm.height;
  const std::size_t bytes_per = pgm.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw FormatError("length mismatch: PGM payload shorter than header dimensions");
  }
  if (in.peek() != EOF) throw FormatError("length mismatch: trailing bytes after PGM payload");
  pgm.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    pgm.samples[i] = bytes_per == 2
                         ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                         : raw[i];
    if (pgm.samples[i] > pgm.maxval) throw FormatError("PGM sample exceeds maxval");
  }
  return pgm;
}

void write_pgm_header(std::ostream& out, int width, int height, int maxval) {
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
}

}  // namespace

FloatGrid read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("malformed header: empty FGRID file");
  std::istringstream hs(line);
  std::vector<std::string> tok{std::istream_iterator<std::string>(hs), {}};
  if ((tok.size() != 4 && tok.size() != 6) || tok[0] != "FGRID") {
    throw FormatError("malformed header: expected 'FGRID <width> <height> <cell_size>'");
  }
  const int width = parse_int(tok[1], "width");
  const int height = parse_int(tok[2], "height");
  const double cell = parse_double(tok[3], "cell size");
  Vec2 origin;
  if (tok.size() == 6) origin = {parse_double(tok[4], "origin x"), parse_double(tok[5], "origin y")};
  if (width < 3 || height < 3) throw FormatError("malformed header: grid must be at least 3x3");
  if (!(cell > 0.0) || !std::isfinite(cell)) throw FormatError("malformed header: bad cell size");

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() != count * 4) {
    throw FormatError("length mismatch: header declares " + std::to_string(count) +
                      " values, payload holds " + std::to_string(raw.size() / 4.0));
  }
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, raw.data() + 4 * i, 4);
    data[i] = std::bit_cast<float>(to_little_endian(bits));
    if (!std::isfinite(data[i])) {
      throw FormatError("non-finite value at index " + std::to_string(i));
    }
  }
  return FloatGrid(width, height, cell, origin, std::move(data));
}

FloatGrid read_grid(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_grid(in);
}

void write_grid(const FloatGrid& grid, std::ostream& out) {
  out << "FGRID " << grid.width() << ' ' << grid.height() << ' '
      << format_double(grid.cell_size());
  if (grid.origin() != Vec2{}) {
    out << ' ' << format_double(grid.origin().x) << ' ' << format_double(grid.origin().y);
  }
  out << '\n';
  std::vector<char> raw(grid.size() * 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw FormatError("non-finite value at index " + std::to_string(i));
    const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(grid[i]));
    std::memcpy(raw.data() + 4 * i, &bits, 4);
  }
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

void write_grid(const FloatGrid& grid, const std::filesystem::path& path) {
  std::ostringstream os;
  write_grid(grid, os);
  write_file_atomic(path, os.str());
}

GrayImage read_gray(std::istream& in) {
  const PgmData pgm = read_pgm(in);
  if (pgm.width < 3 || pgm.height < 3) throw FormatError("image must be at least 3x3");
  GrayImage img(pgm.width, pgm.height);
  const double scale = 1.0 / pgm.maxval;
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = static_cast<float>(pgm.samples[i] * scale);
  }
  return img;
}

GrayImage read_gray(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_gray(in);
}

void write_gray(const GrayImage& img, std::ostream& out) {
  write_pgm_header(out, img.width(), img.height(), 65535);
  std::vector<unsigned char> raw(img.size() * 2);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const float v = img[i];
    if (!std::isfinite(v)) throw FormatError("non-finite intensity at index " + std::to_string(i));
    const double clamped = std::fmin(1.0, std::fmax(0.0, static_cast<double>(v)));
    const auto s = static_cast<std::uint16_t>(std::lround(clamped * 65535.0));
    raw[2 * i] = static_cast<unsigned char>(s >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(s & 0xFF);
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_gray(const GrayImage& img, const std::filesystem::path& path) {
  std::ostringstream os;
  write_gray(img, os);
  write_file_atomic(path, os.str());
}

LabelMask read_labels(std::istream& in) {
  const PgmData pgm = read_pgm(in);
  if (pgm.width < 3 || pgm.height < 3) throw FormatError("label mask must be at least 3x3");
  LabelMask mask(pgm.width, pgm.height);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (pgm.samples[i] > 2) throw FormatError("label value out of range at index " + std::to_string(i));
    mask[i] = static_cast<Label>(pgm.samples[i]);
  }
  return mask;
}

LabelMask read_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

void write_labels(const LabelMask& mask, std::ostream& out) {
  write_pgm_header(out, mask.width(), mask.height(), 255);
  std::vector<char> raw(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) raw[i] = static_cast<char>(mask[i]);
  out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

void write_labels(const LabelMask& mask, const std::filesystem::path& path) {
  std::ostringstream os;
  write_labels(mask, os);
  write_file_atomic(path, os.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace wrinkle
