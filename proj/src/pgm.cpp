#include "handpose/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "handpose/error.hpp"

namespace handpose {

namespace {

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
};

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int parse_positive(const std::string& token, const std::string& file, const char* field, long max_value) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char ch) { return std::isdigit(ch); })) {
    throw IoError(file + ": malformed PGM header: field '" + field + "' is '" + token + "'");
  }
  long value = 0;
  try {
    value = std::stol(token);
  } catch (const std::exception&) {
    throw IoError(file + ": malformed PGM header: field '" + field + "' out of range");
  }
  if (value < 1 || value > max_value) {
    throw IoError(file + ": malformed PGM header: field '" + field + "' out of range: " + token);
  }
  return static_cast<int>(value);
}

PgmHeader read_header(std::istream& in, const std::string& file) {
  const std::string magic = next_token(in);
  if (magic != "P5") throw IoError(file + ": malformed PGM header: field 'magic' is '" + magic + "', expected P5");
  PgmHeader h;
  h.width = parse_positive(next_token(in), file, "width", 16384);
  h.height = parse_positive(next_token(in), file, "height", 16384);
  h.maxval = parse_positive(next_token(in), file, "maxval", 65535);
  // next_token consumed exactly one whitespace byte after maxval.
  return h;
}

std::vector<std::uint16_t> read_samples(const std::filesystem::path& path, PgmHeader& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  header = read_header(in, path.string());
  const std::size_t count = static_cast<std::size_t>(header.width) * header.height;
  const std::size_t bytes_per = header.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError(path.string() + ": truncated PGM body: expected " + std::to_string(raw.size()) + " bytes, got " +
                  std::to_string(in.gcount()));
  }
  std::vector<std::uint16_t> samples(count);
  for (std::size_t i = 0; i < count; ++i) {
    samples[i] = bytes_per == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
    if (samples[i] > header.maxval) {
      throw IoError(path.string() + ": sample " + std::to_string(i) + " exceeds maxval");
    }
  }
  return samples;
}

void write_raw(const std::filesystem::path& path, int width, int height, int maxval,
               const std::vector<unsigned char>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace

void write_depth_pgm(const std::filesystem::path& path, const DepthImage& depth) {
  std::vector<unsigned char> body(depth.size() * 2);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double mm = std::clamp(std::round(depth.data[i]), 0.0, 65535.0);
    const auto v = static_cast<std::uint16_t>(mm);
    body[2 * i] = static_cast<unsigned char>(v >> 8);
    body[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
  }
  write_raw(path, depth.width, depth.height, 65535, body);
}

DepthImage read_depth_pgm(const std::filesystem::path& path) {
  PgmHeader h;
  const auto samples = read_samples(path, h);
  if (h.maxval <= 255) throw IoError(path.string() + ": depth PGM must be 16-bit (field 'maxval' <= 255)");
  DepthImage depth(h.width, h.height);
  std::copy(samples.begin(), samples.end(), depth.data.begin());
  return depth;
}

void write_mask_pgm(const std::filesystem::path& path, const SilhouetteMask& mask) {
  std::vector<unsigned char> body(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) body[i] = mask.data[i] ? 255 : 0;
  write_raw(path, mask.width, mask.height, 255, body);
}

SilhouetteMask read_mask_pgm(const std::filesystem::path& path) {
  PgmHeader h;
  const auto samples = read_samples(path, h);
  if (h.maxval > 255) throw IoError(path.string() + ": mask PGM must be 8-bit (field 'maxval' > 255)");
  SilhouetteMask mask(h.width, h.height);
  for (std::size_t i = 0; i < samples.size(); ++i) mask.data[i] = samples[i] != 0 ? 1 : 0;
  return mask;
}

void write_gray_pgm(const std::filesystem::path& path, const Image<std::uint8_t>& image) {
  write_raw(path, image.width, image.height, 255, std::vector<unsigned char>(image.data.begin(), image.data.end()));
}

}  // namespace handpose
