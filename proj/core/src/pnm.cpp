#include "landing/pnm.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "landing/descent.hpp"

namespace landing::pnm {

namespace {

struct Header {
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
};

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int parse_int(const std::string& tok, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw PnmError(path.string() + ": malformed header value '" + tok + "'");
  }
}

Header read_header(std::istream& in, const std::filesystem::path& path) {
  Header h;
  h.magic = next_token(in);
  if (h.magic != "P5" && h.magic != "P6") {
    throw PnmError(path.string() + ": unsupported PNM magic '" + h.magic + "' (need P5 or P6)");
  }
  h.width = parse_int(next_token(in), path);
  h.height = parse_int(next_token(in), path);
  h.maxval = parse_int(next_token(in), path);
  if (h.width <= 0 || h.height <= 0) throw PnmError(path.string() + ": non-positive image size");
  if (h.maxval <= 0 || h.maxval > 65535) throw PnmError(path.string() + ": maxval out of range");
  return h;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PnmError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PnmError("cannot write " + path.string());
  return out;
}

}  // namespace

Frame read(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const Header h = read_header(in, path);
  if (h.maxval != 255) throw PnmError(path.string() + ": only 8-bit images are supported here");
  Frame f(h.width, h.height, h.magic == "P6" ? 3 : 1);
  in.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(f.data.size())) {
    throw PnmError(path.string() + ": truncated pixel data");
  }
  return f;
}

void write(const std::filesystem::path& path, const Frame& frame) {
  frame.validate();
  std::ofstream out = open_out(path);
  out << (frame.channels == 3 ? "P6" : "P5") << '\n' << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.data.data()), static_cast<std::streamsize>(frame.data.size()));
}

void write_binary(const std::filesystem::path& path, const BinaryMap& map) {
  Frame f(map.width, map.height, 1);
  for (std::size_t i = 0; i < map.bits.size(); ++i) f.data[i] = map.bits[i] ? 255 : 0;
  write(path, f);
}

BinaryMap read_binary(const std::filesystem::path& path) {
  const Frame f = read(path);
  if (f.channels != 1) throw PnmError(path.string() + ": binary maps must be grayscale");
  BinaryMap m(f.width, f.height);
  for (std::size_t i = 0; i < f.data.size(); ++i) m.bits[i] = f.data[i] ? 1 : 0;
  return m;
}

void write_depth(const std::filesystem::path& path, const DepthFrame& depth) {
  std::ofstream out = open_out(path);
  out << "P5\n" << depth.width << ' ' << depth.height << "\n65535\n";
  std::string buf;
  buf.reserve(depth.depth.size() * 2);
  for (float d : depth.depth) {
    std::uint16_t v = 0;
    if (DepthFrame::valid(d)) {
      const double mm = std::round(static_cast<double>(d) * kDepthUnitsPerMeter);
      v = static_cast<std::uint16_t>(std::clamp(mm, 1.0, 65535.0));
    }
    buf.push_back(static_cast<char>(v >> 8));
    buf.push_back(static_cast<char>(v & 0xFF));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

DepthFrame read_depth(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const Header h = read_header(in, path);
  if (h.magic != "P5" || h.maxval != 65535) throw PnmError(path.string() + ": depth must be 16-bit P5");
  CameraModel cam;
  cam.width = h.width;
  cam.height = h.height;
  DepthFrame d(h.width, h.height, cam);
  std::string buf(static_cast<std::size_t>(h.width) * h.height * 2, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) throw PnmError(path.string() + ": truncated");
  for (std::size_t i = 0; i < d.depth.size(); ++i) {
    const auto hi = static_cast<unsigned char>(buf[2 * i]);
    const auto lo = static_cast<unsigned char>(buf[2 * i + 1]);
    const std::uint16_t v = static_cast<std::uint16_t>((hi << 8) | lo);
    d.depth[i] = v == 0 ? std::numeric_limits<float>::quiet_NaN()
                        : static_cast<float>(v / kDepthUnitsPerMeter);
  }
  return d;
}

}  // namespace landing::pnm
