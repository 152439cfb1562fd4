#pragma once

#include "opal/image.hpp"
#include "opal/lightfield.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace opal {

/// Contents of a light field container directory:
///   meta.json          {"angular_n": N, "height": H, "width": W, "disparity_range": [lo, hi]?}
///   view_{row}_{col}.png for row, col in 0..N-1
///   gt.pfm             optional ground-truth disparity of the central view
struct LightFieldContainer {
    LightField lightfield;
    std::optional<DisparityMap> ground_truth;
    std::optional<std::pair<double, double>> disparity_range;
};

LightFieldContainer load_lightfield(const std::filesystem::path& dir);

/// Writes views as 16-bit PNGs so that re-loading is accurate to 1/65535.
void save_lightfield(const std::filesystem::path& dir, const LightField& lf,
                     const DisparityMap* ground_truth = nullptr,
                     std::optional<std::pair<double, double>> disparity_range = std::nullopt);

std::string view_filename(int row, int col);

/// Single-channel PFM ("Pf"). Rows are stored bottom-to-top on disk and
/// top-to-bottom in memory. Non-finite values read back as invalid pixels.
DisparityMap read_pfm(const std::filesystem::path& path);
void write_pfm(const DisparityMap& map, const std::filesystem::path& path);

/// Loads 8- or 16-bit gray / RGB PNGs (alpha dropped) as [0,1] floats.
Image read_png(const std::filesystem::path& path);
/// Writes a 1- or 3-channel image, clamping to [0,1]. `bit_depth` is 8 or 16.
void write_png(const Image& img, const std::filesystem::path& path, int bit_depth = 8);
/// Encodes to an in-memory PNG byte stream (same encoder settings as write_png).
std::vector<unsigned char> encode_png(const Image& img, int bit_depth = 8);

} // namespace opal
