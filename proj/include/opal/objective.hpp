#pragma once

#include "opal/lightfield.hpp"
#include "opal/patterns.hpp"
#include "opal/photometric.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace opal {

/// Loss constants. Defaults are the shipped configuration: lambda1 = 0.6 for
/// the full estimator (1.0 for the fast preset), lambda2 = 0.3, gamma = 150.
struct ObjectiveConfig {
    double tau = kDefaultTau;
    double gamma = 150.0;
    double lambda1 = 0.6;
    double lambda2 = 0.3;
    int beta = 1;
};

/// Pattern-aware photometric loss along one direction.
struct DirectionalOpal {
    Direction direction = Direction::Horizontal;
    SelectionMap selection;        ///< j* per pixel on the downsampled line.
    double sum = 0.0;              ///< Sum of masked residuals over (view, pixel) pairs.
    std::size_t count = 0;         ///< Number of contributing (view, pixel) pairs.
    std::vector<double> pixel_sum; ///< Per-pixel masked residual sum.
    std::vector<int> pixel_count;  ///< Per-pixel contributing view count.

    [[nodiscard]] double loss() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }
};

/// Selects j* per pixel from the downsampled residuals, expands it to the
/// native line and accumulates the masked residuals of all N views. With
/// `pattern_selection` false every pixel uses pattern 0.
DirectionalOpal opal_direction(const LightField& lf, const DisparityMap& disp, const PatternSet& ps, Direction d,
                               double tau, bool pattern_selection = true);

/// Normalized loss for each of the four directions, in kAllDirections order.
std::array<double, 4> opal_loss(const LightField& lf, const DisparityMap& disp, const PatternSet& ps, double tau);

/// Per-pixel masked mean residual averaged over the given directions.
std::vector<double> opal_pixel_residual(const LightField& lf, const DisparityMap& disp, const PatternSet& ps,
                                        std::span<const Direction> directions, double tau,
                                        bool pattern_selection = true);

/// Edge-aware smoothness: mean over pixels (last row and column excluded) of
/// |dD/dx| exp(-gamma |dI/dx|) + |dD/dy| exp(-gamma |dI/dy|), forward
/// differences, image differences averaged over channels.
double smoothness_loss(const DisparityMap& disp, const Image& center, double gamma);

struct LossBreakdown {
    /// lambda1 * raw + (1 - lambda1) * final, per direction.
    std::array<double, 4> opal_per_direction{};
    double opal_total = 0.0;
    double opal_raw = 0.0;
    double opal_final = 0.0;
    double smooth = 0.0;
    double total = 0.0;
    ObjectiveConfig constants;
};

/// total = lambda1 * opal(raw) + (1 - lambda1) * opal(final) + lambda2 * smooth(final).
LossBreakdown total_objective(const LightField& lf, const DisparityMap& disp_raw, const DisparityMap& disp_final,
                              const ObjectiveConfig& cfg = {});

} // namespace opal
