#include "opal/objective.hpp"

#include "opal/error.hpp"

#include <cmath>

namespace opal {

namespace {

void check_dims(const LightField& lf, const DisparityMap& disp)
{
    if (lf.width() != disp.width || lf.height() != disp.height)
        throw DataError("disparity map dimensions do not match the light field");
}

} // namespace

DirectionalOpal opal_direction(const LightField& lf, const DisparityMap& disp, const PatternSet& ps, Direction d,
                               double tau, bool pattern_selection)
{
    check_dims(lf, disp);
    if (ps.native_n != lf.angular_n())
        throw DataError("pattern set does not match the light field angular resolution");

    const ViewLine line = extract_view_line(lf, d);
    const ResidualStack rs = residual_stack(line, disp);
    const PatternCosts pc = pattern_costs(rs, ps);

    DirectionalOpal out;
    out.direction = d;
    if (pattern_selection) {
        out.selection = select_patterns(pc, tau);
    } else {
        out.selection.width = disp.width;
        out.selection.height = disp.height;
        out.selection.index.assign(static_cast<std::size_t>(disp.width) * static_cast<std::size_t>(disp.height), 0);
    }
    const std::size_t pixels = static_cast<std::size_t>(disp.width) * static_cast<std::size_t>(disp.height);
    out.pixel_sum.assign(pixels, 0.0);
    out.pixel_count.assign(pixels, 0);

    for (int y = 0; y < disp.height; ++y) {
        for (int x = 0; x < disp.width; ++x) {
            const std::size_t p = disp.index(x, y);
            if (!std::isfinite(disp.values[p]))
                continue;
            const std::vector<std::uint8_t>& mask = ps.upsampled[out.selection.index[p]];
            double sum = 0.0;
            int count = 0;
            for (int i = 0; i < rs.positions; ++i) {
                const std::size_t idx = rs.index(i, x, y);
                if (mask[static_cast<std::size_t>(i)] && rs.valid[idx]) {
                    sum += rs.values[idx];
                    ++count;
                }
            }
            out.pixel_sum[p] = sum;
            out.pixel_count[p] = count;
        }
    }
    // Row-major accumulation keeps the reduction order fixed.
    for (std::size_t p = 0; p < pixels; ++p) {
        out.sum += out.pixel_sum[p];
        out.count += static_cast<std::size_t>(out.pixel_count[p]);
    }
    return out;
}

std::array<double, 4> opal_loss(const LightField& lf, const DisparityMap& disp, const PatternSet& ps, double tau)
{
    std::array<double, 4> out{};
    for (Direction d : kAllDirections)
        out[static_cast<std::size_t>(direction_index(d))] = opal_direction(lf, disp, ps, d, tau).loss();
    return out;
}

std::vector<double> opal_pixel_residual(const LightField& lf, const DisparityMap& disp, const PatternSet& ps,
                                        std::span<const Direction> directions, double tau,
                                        bool pattern_selection)
{
    const std::size_t pixels = static_cast<std::size_t>(disp.width) * static_cast<std::size_t>(disp.height);
    std::vector<double> out(pixels, 0.0);
    std::vector<int> used(pixels, 0);
    for (Direction d : directions) {
        const DirectionalOpal dir = opal_direction(lf, disp, ps, d, tau, pattern_selection);
        for (std::size_t p = 0; p < pixels; ++p) {
            if (dir.pixel_count[p] > 0) {
                out[p] += dir.pixel_sum[p] / dir.pixel_count[p];
                ++used[p];
            }
        }
    }
    for (std::size_t p = 0; p < pixels; ++p)
        out[p] = used[p] > 0 ? out[p] / used[p] : 0.0;
    return out;
}

double smoothness_loss(const DisparityMap& disp, const Image& center, double gamma)
{
    if (disp.width != center.width || disp.height != center.height)
        throw DataError("smoothness_loss: disparity and image dimensions differ");
    if (!(gamma > 0.0))
        throw ConfigError("gamma must be positive");
    if (disp.width < 2 || disp.height < 2)
        return 0.0;

    double total = 0.0;
    for (int y = 0; y + 1 < disp.height; ++y) {
        for (int x = 0; x + 1 < disp.width; ++x) {
            const double d = disp.at(x, y);
            const double ddx = std::abs(static_cast<double>(disp.at(x + 1, y)) - d);
            const double ddy = std::abs(static_cast<double>(disp.at(x, y + 1)) - d);
            const double idx = mean_abs_diff(center, x + 1, y, center, x, y);
            const double idy = mean_abs_diff(center, x, y + 1, center, x, y);
            total += ddx * std::exp(-gamma * idx) + ddy * std::exp(-gamma * idy);
        }
    }
    return total / (static_cast<double>(disp.width - 1) * static_cast<double>(disp.height - 1));
}

LossBreakdown total_objective(const LightField& lf, const DisparityMap& disp_raw, const DisparityMap& disp_final,
                              const ObjectiveConfig& cfg)
{
    if (cfg.lambda1 < 0.0 || cfg.lambda1 > 1.0)
        throw ConfigError("lambda1 must lie in [0, 1]");
    if (cfg.lambda2 < 0.0)
        throw ConfigError("lambda2 must be non-negative");

    const PatternSet ps = generate_pattern_set(lf.angular_n(), cfg.beta);
    const std::array<double, 4> raw = opal_loss(lf, disp_raw, ps, cfg.tau);
    const std::array<double, 4> fin = opal_loss(lf, disp_final, ps, cfg.tau);

    LossBreakdown out;
    out.constants = cfg;
    for (std::size_t i = 0; i < 4; ++i) {
        out.opal_per_direction[i] = cfg.lambda1 * raw[i] + (1.0 - cfg.lambda1) * fin[i];
        out.opal_total += out.opal_per_direction[i];
        out.opal_raw += raw[i];
        out.opal_final += fin[i];
    }
    out.smooth = smoothness_loss(disp_final, lf.center(), cfg.gamma);
    out.total = out.opal_total + cfg.lambda2 * out.smooth;
    return out;
}

} // namespace opal
