#pragma once

#include "opal/estimator.hpp"
#include "opal/eval.hpp"
#include "opal/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace opal {

/// Thresholds checked by the suite run.
struct SuiteThresholds {
    double end_to_end_badpix = 5.0;    ///< Full preset, percent, per textured scene.
    double end_to_end_mse_x100 = 1.0;  ///< Full preset, per textured scene.
    double band_mse_gain = 1.5;        ///< no-OPAL band MSE >= gain * pattern-aware band MSE.
    double neutrality_badpix_pp = 0.5; ///< |BadPix(aware) - BadPix(no-OPAL)| on the occlusion-free scene.
    double eps = kDefaultBadPixEps;
};

struct SuiteVariant {
    std::string name;
    SweepConfig config;
};

/// "full", "fast" and "fast_no_opal" (fast preset with j* forced to 0).
std::vector<SuiteVariant> suite_variants();

/// Pixels inside the evaluation crop that are hidden in at least one view.
std::vector<std::uint8_t> occlusion_band(const GroundTruth& truth, int border);

struct SuiteReport {
    nlohmann::json json;
    std::string summary;
    std::vector<std::string> failures;

    [[nodiscard]] bool passed() const { return failures.empty(); }
};

/// Renders the standard suite, runs every variant and checks the thresholds.
/// With a non-empty `out_dir`, writes summary.json, summary.txt and per
/// scene/variant metrics.json, disparity.pfm and the rendered maps.
SuiteReport run_suite(const std::filesystem::path& out_dir, const SuiteThresholds& thresholds = {});

} // namespace opal
