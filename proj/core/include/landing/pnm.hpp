#pragma once

#include <filesystem>
#include <stdexcept>

#include "landing/frame.hpp"

namespace landing {

struct DepthFrame;

namespace pnm {

struct PnmError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads binary P5 (gray) or P6 (RGB) with maxval 255.
Frame read(const std::filesystem::path& path);

/// Writes P5 for 1-channel frames, P6 for 3-channel frames.
void write(const std::filesystem::path& path, const Frame& frame);

/// Edge maps and masks are stored as P5 with values {0, 255}; reading maps
/// any nonzero value to 1.
void write_binary(const std::filesystem::path& path, const BinaryMap& map);
BinaryMap read_binary(const std::filesystem::path& path);

/// Depth in millimeters, 16-bit big-endian P5 (maxval 65535). Invalid pixels
/// are written as 0; depths above 65.535 m clamp to 65535.
inline constexpr double kDepthUnitsPerMeter = 1000.0;
void write_depth(const std::filesystem::path& path, const DepthFrame& depth);
/// Pixels read back as 0 are marked invalid (NaN). Intrinsics are not stored
/// in the file and must be supplied by the caller.
DepthFrame read_depth(const std::filesystem::path& path);

}  // namespace pnm
}  // namespace landing
