#include "opal/eval.hpp"

#include "opal/error.hpp"
#include "opal/io.hpp"

#include <algorithm>
#include <cmath>

namespace opal {

int default_border(double d_max) { return static_cast<int>(std::ceil(d_max)) + 1; }

std::vector<std::uint8_t> border_mask(int width, int height, int border)
{
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    for (int y = border; y < height - border; ++y)
        for (int x = border; x < width - border; ++x)
            mask[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)] = 1;
    return mask;
}

namespace {

void check_shapes(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask)
{
    if (est.width != gt.width || est.height != gt.height)
        throw DataError("estimate and ground truth dimensions differ");
    if (mask.size() != est.values.size())
        throw DataError("mask size does not match the disparity maps");
}

bool usable(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask, std::size_t i)
{
    return mask[i] && std::isfinite(est.values[i]) && std::isfinite(gt.values[i]);
}

} // namespace

double mse_x100(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask)
{
    check_shapes(est, gt, mask);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!usable(est, gt, mask, i))
            continue;
        const double e = static_cast<double>(est.values[i]) - static_cast<double>(gt.values[i]);
        sum += e * e;
        ++n;
    }
    if (n == 0)
        throw DataError("empty evaluation mask");
    return 100.0 * sum / static_cast<double>(n);
}

double badpix(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask, double eps)
{
    check_shapes(est, gt, mask);
    if (!(eps > 0.0))
        throw ConfigError("badpix threshold must be positive");
    const auto threshold = static_cast<float>(eps);
    std::size_t bad = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!usable(est, gt, mask, i))
            continue;
        if (std::abs(est.values[i] - gt.values[i]) > threshold)
            ++bad;
        ++n;
    }
    if (n == 0)
        throw DataError("empty evaluation mask");
    return 100.0 * static_cast<double>(bad) / static_cast<double>(n);
}

MetricsReport evaluate(const DisparityMap& est, const DisparityMap& gt, const std::vector<double>& eps_values,
                       int border, const std::vector<std::uint8_t>* external_mask,
                       std::optional<std::string> external_mask_path)
{
    std::vector<std::uint8_t> mask = border_mask(est.width, est.height, border);
    if (external_mask) {
        if (external_mask->size() != mask.size())
            throw DataError("external mask size does not match the disparity maps");
        for (std::size_t i = 0; i < mask.size(); ++i)
            mask[i] = static_cast<std::uint8_t>(mask[i] && (*external_mask)[i]);
    }
    MetricsReport r;
    r.border_crop = border;
    r.external_mask = std::move(external_mask_path);
    r.mse_x100 = mse_x100(est, gt, mask);
    for (double eps : eps_values)
        r.badpix[eps] = badpix(est, gt, mask, eps);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (usable(est, gt, mask, i))
            ++r.evaluated_pixels;
    return r;
}

nlohmann::json to_json(const MetricsReport& report)
{
    nlohmann::json j;
    j["mse_x100"] = report.mse_x100;
    nlohmann::json bp = nlohmann::json::object();
    for (const auto& [eps, value] : report.badpix) {
        char key[32];
        std::snprintf(key, sizeof(key), "%.4g", eps);
        bp[key] = value;
    }
    j["badpix"] = bp;
    j["evaluated_pixels"] = report.evaluated_pixels;
    j["mask"] = {{"border_crop", report.border_crop}};
    if (report.external_mask)
        j["mask"]["external"] = *report.external_mask;
    return j;
}

Image disparity_image(const DisparityMap& disp, double d_max)
{
    Image img(disp.width, disp.height, 1);
    for (std::size_t i = 0; i < disp.values.size(); ++i) {
        const double v = disp.values[i];
        img.data[i] = std::isfinite(v) ? static_cast<float>(std::clamp((v + d_max) / (2.0 * d_max), 0.0, 1.0)) : 0.0f;
    }
    return img;
}

Image error_image(const DisparityMap& est, const DisparityMap& gt, const std::vector<std::uint8_t>& mask, double eps)
{
    check_shapes(est, gt, mask);
    static constexpr float kGood[3] = {0.85f, 0.85f, 0.85f};
    static constexpr float kBad[3] = {0.85f, 0.1f, 0.1f};
    const auto threshold = static_cast<float>(eps);
    Image img(est.width, est.height, 3, 0.0f);
    for (int y = 0; y < est.height; ++y) {
        for (int x = 0; x < est.width; ++x) {
            const std::size_t i = est.index(x, y);
            if (!usable(est, gt, mask, i))
                continue;
            const float* tone = std::abs(est.values[i] - gt.values[i]) > threshold ? kBad : kGood;
            for (int c = 0; c < 3; ++c)
                img.at(x, y, c) = tone[c];
        }
    }
    return img;
}

void render_maps(const DisparityMap& est, const DisparityMap* gt, double d_max, double eps, int border,
                 const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_png(disparity_image(est, d_max), dir / "disparity.png");
    if (gt)
        write_png(error_image(est, *gt, border_mask(est.width, est.height, border), eps), dir / "error.png");
}

} // namespace opal
