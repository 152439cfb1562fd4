#include "opal/photometric.hpp"

#include "opal/error.hpp"

#include <cmath>
#include <limits>

namespace opal {

bool pixel_residual(const Image& view, const Image& center, int x, int y, double sx, double sy, double& residual)
{
    double sample[4];
    if (!sample_bilinear(view, sx, sy, sample))
        return false;
    const float* c = center.pixel(x, y);
    double sum = 0.0;
    for (int ch = 0; ch < center.channels; ++ch)
        sum += std::abs(sample[ch] - static_cast<double>(c[ch]));
    residual = sum / center.channels;
    return true;
}

WarpedView warp_to_center(const Image& view, AngularOffset offset, const DisparityMap& disp)
{
    if (view.width != disp.width || view.height != disp.height)
        throw DataError("warp_to_center: view and disparity dimensions differ");
    WarpedView out{Image(view.width, view.height, view.channels),
                   std::vector<std::uint8_t>(static_cast<std::size_t>(view.width) * static_cast<std::size_t>(view.height), 0)};
#pragma omp parallel for schedule(static)
    for (int y = 0; y < view.height; ++y) {
        double sample[4];
        for (int x = 0; x < view.width; ++x) {
            const double d = disp.at(x, y);
            if (!std::isfinite(d))
                continue;
            if (!sample_bilinear(view, x + offset.col * d, y + offset.row * d, sample))
                continue;
            for (int c = 0; c < view.channels; ++c)
                out.image.at(x, y, c) = static_cast<float>(sample[c]);
            out.valid[disp.index(x, y)] = 1;
        }
    }
    return out;
}

ResidualStack residual_stack(const ViewLine& line, const DisparityMap& disp)
{
    const Image& center = line.center();
    if (center.width != disp.width || center.height != disp.height)
        throw DataError("residual_stack: line and disparity dimensions differ");

    ResidualStack rs;
    rs.positions = line.size();
    rs.width = disp.width;
    rs.height = disp.height;
    const std::size_t total = static_cast<std::size_t>(rs.positions) * static_cast<std::size_t>(rs.width)
                              * static_cast<std::size_t>(rs.height);
    rs.values.assign(total, 0.0);
    rs.valid.assign(total, 0);

    for (int i = 0; i < rs.positions; ++i) {
        const Image& view = *line.views[static_cast<std::size_t>(i)];
        const AngularOffset off = line.offsets[static_cast<std::size_t>(i)];
#pragma omp parallel for schedule(static)
        for (int y = 0; y < rs.height; ++y) {
            for (int x = 0; x < rs.width; ++x) {
                const double d = disp.at(x, y);
                if (!std::isfinite(d))
                    continue;
                double r = 0.0;
                if (pixel_residual(view, center, x, y, x + off.col * d, y + off.row * d, r)) {
                    rs.values[rs.index(i, x, y)] = r;
                    rs.valid[rs.index(i, x, y)] = 1;
                }
            }
        }
    }
    return rs;
}

void masked_pattern_costs(const PatternSet& ps, std::span<const double> residuals,
                          std::span<const std::uint8_t> valid, std::span<double> costs)
{
    const int m = ps.downsampled_m;
    for (int j = 0; j < m; ++j) {
        const std::vector<std::uint8_t>& mask = ps.patterns[static_cast<std::size_t>(j)].mask;
        double sum = 0.0;
        int count = 0;
        for (int i = 0; i < m; ++i) {
            if (mask[static_cast<std::size_t>(i)] && valid[static_cast<std::size_t>(i)]) {
                sum += residuals[static_cast<std::size_t>(i)];
                ++count;
            }
        }
        costs[static_cast<std::size_t>(j)] = count > 0 ? sum / count : std::numeric_limits<double>::infinity();
    }
}

int select_pattern(std::span<const double> costs, double tau)
{
    const int m = static_cast<int>(costs.size());
    if (m < 3)
        throw ConfigError("pattern selection needs at least 3 patterns");
    const int last_even = (m - 1) % 2 == 0 ? m - 1 : m - 2;
    const int last_odd = (m - 1) % 2 == 1 ? m - 1 : m - 2;
    const double gap = std::abs(costs[static_cast<std::size_t>(last_even)] - costs[static_cast<std::size_t>(last_odd)]);
    if (gap < tau)
        return 0;
    int best = 0;
    for (int j = 1; j < m; ++j)
        if (costs[static_cast<std::size_t>(j)] < costs[static_cast<std::size_t>(best)])
            best = j;
    return best;
}

PatternCosts pattern_costs(const ResidualStack& rs, const PatternSet& ps)
{
    if (rs.positions != ps.native_n)
        throw DataError("pattern_costs: residual stack length does not match the pattern set");
    const int m = ps.downsampled_m;
    PatternCosts pc;
    pc.width = rs.width;
    pc.height = rs.height;
    pc.patterns = m;
    pc.costs.assign(static_cast<std::size_t>(rs.width) * static_cast<std::size_t>(rs.height) * static_cast<std::size_t>(m), 0.0);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < rs.height; ++y) {
        std::vector<double> r(static_cast<std::size_t>(m));
        std::vector<std::uint8_t> v(static_cast<std::size_t>(m));
        for (int x = 0; x < rs.width; ++x) {
            for (int i = 0; i < m; ++i) {
                const std::size_t idx = rs.index(ps.native_index(i), x, y);
                r[static_cast<std::size_t>(i)] = rs.values[idx];
                v[static_cast<std::size_t>(i)] = rs.valid[idx];
            }
            double* out = pc.costs.data()
                          + (static_cast<std::size_t>(y) * static_cast<std::size_t>(rs.width) + static_cast<std::size_t>(x))
                                * static_cast<std::size_t>(m);
            masked_pattern_costs(ps, r, v, {out, static_cast<std::size_t>(m)});
        }
    }
    return pc;
}

SelectionMap select_patterns(const PatternCosts& pc, double tau)
{
    SelectionMap sel;
    sel.width = pc.width;
    sel.height = pc.height;
    sel.index.assign(static_cast<std::size_t>(pc.width) * static_cast<std::size_t>(pc.height), 0);
    for (int y = 0; y < pc.height; ++y)
        for (int x = 0; x < pc.width; ++x)
            sel.index[static_cast<std::size_t>(y) * static_cast<std::size_t>(pc.width) + static_cast<std::size_t>(x)]
                = static_cast<std::uint8_t>(select_pattern(pc.at(x, y), tau));
    return sel;
}

} // namespace opal
