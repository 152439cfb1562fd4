#pragma once

#include "opal/lightfield.hpp"
#include "opal/patterns.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace opal {

/// Default occlusion threshold on the cost gap between the two maximal patterns.
inline constexpr double kDefaultTau = 0.01;

struct WarpedView {
    Image image;
    std::vector<std::uint8_t> valid;
};

/// Backward warp: output(x) = bilinear sample of `view` at x + offset * disp(x).
WarpedView warp_to_center(const Image& view, AngularOffset offset, const DisparityMap& disp);

/// Mean-over-channels |view(sx, sy) - center(x, y)|. Returns false if the
/// bilinear sample needs a tap outside the view.
bool pixel_residual(const Image& view, const Image& center, int x, int y, double sx, double sy, double& residual);

/// Residuals of every view on a line against the central view, warped with a
/// per-pixel disparity. Layout [position][y][x].
struct ResidualStack {
    int positions = 0;
    int width = 0;
    int height = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;

    [[nodiscard]] std::size_t index(int i, int x, int y) const
    {
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(height) + static_cast<std::size_t>(y))
                   * static_cast<std::size_t>(width)
               + static_cast<std::size_t>(x);
    }
};

ResidualStack residual_stack(const ViewLine& line, const DisparityMap& disp);

/// Masked-mean cost of every pattern for one pixel. `residuals` and `valid`
/// hold the M downsampled line positions. Invalid positions are dropped from
/// both numerator and denominator; a pattern with no valid position costs +inf.
void masked_pattern_costs(const PatternSet& ps, std::span<const double> residuals,
                          std::span<const std::uint8_t> valid, std::span<double> costs);

/// Chooses pattern 0 when the two maximally-occluding patterns (largest even
/// and largest odd index) cost within `tau` of each other, otherwise the
/// argmin with ties going to the smaller index. Requires M >= 3.
int select_pattern(std::span<const double> costs, double tau);

/// Per-pixel costs over the M patterns, layout [y][x][j].
struct PatternCosts {
    int width = 0;
    int height = 0;
    int patterns = 0;
    std::vector<double> costs;

    [[nodiscard]] std::span<const double> at(int x, int y) const
    {
        return {costs.data() + (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x))
                                   * static_cast<std::size_t>(patterns),
                static_cast<std::size_t>(patterns)};
    }
};

PatternCosts pattern_costs(const ResidualStack& rs, const PatternSet& ps);

struct SelectionMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> index;

    [[nodiscard]] int at(int x, int y) const
    {
        return index[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
};

SelectionMap select_patterns(const PatternCosts& pc, double tau);

} // namespace opal
