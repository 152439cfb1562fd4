#pragma once

#include "opal/image.hpp"
#include "opal/lightfield.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opal {

inline constexpr double kDefaultBadPixEps = 0.07;

/// Crop of ceil(d_max) + 1 pixels, the band where warps can leave the frame.
int default_border(double d_max);

/// 1 inside the image minus a `border`-pixel frame.
std::vector<std::uint8_t> border_mask(int width, int height, int border);

/// 100 * mean of (est - gt)^2 over masked pixels where both are finite.
double mse_x100(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask);

/// Percentage of masked pixels with |est - gt| > eps (strict). The difference
/// is taken in single precision, the precision disparity maps are stored in.
double badpix(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask, double eps);

struct MetricsReport {
    double mse_x100 = 0.0;
    std::map<double, double> badpix;
    std::size_t evaluated_pixels = 0;
    int border_crop = 0;
    std::optional<std::string> external_mask;
};

MetricsReport evaluate(const DisparityMap& est, const DisparityMap& gt, const std::vector<double>& eps_values,
                       int border, const std::vector<std::uint8_t>* external_mask = nullptr,
                       std::optional<std::string> external_mask_path = std::nullopt);

nlohmann::json to_json(const MetricsReport& report);

/// Grayscale, -d_max -> black, +d_max -> white.
Image disparity_image(const DisparityMap& disp, double d_max);
/// Two-tone: light gray where |est - gt| <= eps, red where it exceeds eps,
/// black outside the mask.
Image error_image(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask, double eps);

/// Writes disparity.png and, with ground truth, error.png into `dir`.
void render_maps(const DisparityMap& est, const DisparityMap* gt, double d_max, double eps, int border,
                 const std::filesystem::path& dir);

} // namespace opal
