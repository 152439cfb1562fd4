#pragma once

#include "opal/lightfield.hpp"
#include "opal/objective.hpp"
#include "opal/patterns.hpp"
#include "opal/photometric.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace opal {

enum class Regression { HardArgmin, Soft };

struct SweepConfig {
    double d_max = 4.0;
    int num_candidates = 65; ///< Odd, so that d = 0 is a candidate.
    int beta = 1;
    double tau = kDefaultTau;
    std::vector<Direction> directions{kAllDirections.begin(), kAllDirections.end()};
    int aggregation_radius = 2;
    Regression regression = Regression::HardArgmin;
    double soft_temperature = 10.0;
    bool refine = true;
    /// false forces j* = 0 everywhere (plain photometric cost, ablation).
    bool pattern_selection = true;
    /// Upper bound on H * W * K scratch elements processed per row band.
    std::size_t memory_budget = std::size_t{1} << 26;

    // Objective constants used when reporting the loss of the result.
    double lambda1 = 0.6;
    double lambda2 = 0.3;
    double gamma = 150.0;

    /// Four directions, gated median refinement, lambda1 = 0.6.
    static SweepConfig full();
    /// Horizontal and vertical lines only, no refinement, lambda1 = 1.0.
    static SweepConfig fast();

    void validate() const;
    /// d_k = -d_max + 2 d_max k / (K - 1).
    [[nodiscard]] std::vector<double> candidates() const;
    [[nodiscard]] double candidate_step() const { return 2.0 * d_max / (num_candidates - 1); }
    [[nodiscard]] ObjectiveConfig objective() const { return {tau, gamma, lambda1, lambda2, beta}; }
};

/// Matching costs per candidate, layout [k][y][x].
struct CostVolume {
    int width = 0;
    int height = 0;
    std::vector<double> candidates;
    std::vector<double> costs;

    [[nodiscard]] int size() const { return static_cast<int>(candidates.size()); }
    [[nodiscard]] std::size_t index(int x, int y, int k) const
    {
        return (static_cast<std::size_t>(k) * static_cast<std::size_t>(height) + static_cast<std::size_t>(y))
                   * static_cast<std::size_t>(width)
               + static_cast<std::size_t>(x);
    }
    [[nodiscard]] double at(int x, int y, int k) const { return costs[index(x, y, k)]; }
};

/// costs(x, k) = mean over enabled directions of Cost(j*) at constant
/// disparity d_k, j* chosen per direction and candidate.
CostVolume build_cost_volume(const LightField& lf, const SweepConfig& cfg);

/// Per-candidate box filter of side 2 * radius + 1 with replicated borders.
CostVolume aggregate(const CostVolume& cv, int radius);

/// Hard: minimal-cost candidate, ties to smaller |d|. Soft: expectation of d
/// under softmax(-temperature * cost). Pixels whose cost range is below 1e-4
/// are flagged invalid. Output clamped to [-d_max, d_max].
DisparityMap regress_disparity(const CostVolume& cv, const SweepConfig& cfg);

/// Pixels below the 20th percentile of confidence exp(-r), r the pattern-aware
/// mean residual at their disparity, and with r > tau are replaced by the
/// confidence- and edge-weighted median of their ungated 5x5 neighbours.
/// Passes repeat until no pixel changes.
DisparityMap refine(const DisparityMap& disp, const LightField& lf, const SweepConfig& cfg);

struct VolumeStats {
    double min_cost = 0.0;
    double max_cost = 0.0;
    double mean_cost = 0.0;
    std::size_t degenerate_pixels = 0;
    /// Per enabled direction, histogram of j* at the regressed disparity.
    std::vector<std::vector<std::size_t>> selection_histogram;
};

struct EstimateResult {
    DisparityMap raw;
    DisparityMap final;
    VolumeStats stats;
    LossBreakdown loss;
    /// j* per enabled direction at the regressed disparity.
    std::vector<SelectionMap> selection;
};

EstimateResult estimate(const LightField& lf, const SweepConfig& cfg);

/// Selection maps of the enabled directions at a given disparity map.
std::vector<SelectionMap> selection_at(const LightField& lf, const DisparityMap& disp, const SweepConfig& cfg);

/// Sets the worker count for parallel loops; results do not depend on it.
void set_thread_count(int threads);
int default_thread_count();

} // namespace opal
