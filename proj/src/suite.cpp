#include "opal/suite.hpp"

#include "opal/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace opal {

std::vector<SuiteVariant> suite_variants()
{
    SweepConfig no_opal = SweepConfig::fast();
    no_opal.pattern_selection = false;
    return {{"full", SweepConfig::full()}, {"fast", SweepConfig::fast()}, {"fast_no_opal", no_opal}};
}

std::vector<std::uint8_t> occlusion_band(const GroundTruth& truth, int border)
{
    const DisparityMap& gt = truth.disparity;
    std::vector<std::uint8_t> band = border_mask(gt.width, gt.height, border);
    for (std::size_t i = 0; i < band.size(); ++i) {
        if (!band[i])
            continue;
        const bool hidden = std::any_of(truth.occlusion.begin(), truth.occlusion.end(),
                                        [i](const std::vector<std::uint8_t>& occ) { return occ[i] != 0; });
        band[i] = hidden ? 1 : 0;
    }
    return band;
}

namespace {

nlohmann::json loss_json(const LossBreakdown& loss)
{
    nlohmann::json j;
    nlohmann::json per_dir = nlohmann::json::object();
    for (Direction d : kAllDirections)
        per_dir[std::string(to_string(d))] = loss.opal_per_direction[static_cast<std::size_t>(direction_index(d))];
    j["opal_per_direction"] = per_dir;
    j["opal_total"] = loss.opal_total;
    j["opal_raw"] = loss.opal_raw;
    j["opal_final"] = loss.opal_final;
    j["smooth"] = loss.smooth;
    j["total"] = loss.total;
    j["constants"] = {{"tau", loss.constants.tau},
                      {"gamma", loss.constants.gamma},
                      {"lambda1", loss.constants.lambda1},
                      {"lambda2", loss.constants.lambda2},
                      {"beta", loss.constants.beta}};
    return j;
}

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

} // namespace

SuiteReport run_suite(const std::filesystem::path& out_dir, const SuiteThresholds& th)
{
    namespace fs = std::filesystem;
    const bool write = !out_dir.empty();
    if (write)
        fs::create_directories(out_dir);

    const std::vector<SuiteVariant> variants = suite_variants();
    SuiteReport report;
    report.json["variants"] = nlohmann::json::array();
    for (const SuiteVariant& v : variants)
        report.json["variants"].push_back(v.name);
    report.json["thresholds"] = {{"end_to_end_badpix", th.end_to_end_badpix},
                                 {"end_to_end_mse_x100", th.end_to_end_mse_x100},
                                 {"band_mse_gain", th.band_mse_gain},
                                 {"neutrality_badpix_pp", th.neutrality_badpix_pp},
                                 {"eps", th.eps}};
    nlohmann::json scenes = nlohmann::json::array();
    nlohmann::json checks = nlohmann::json::array();

    std::ostringstream table;
    table << "scene                  variant        BadPix(" << th.eps << ")   MSEx100   band MSEx100\n";

    auto check = [&](const std::string& criterion, const std::string& scene, double value, double bound,
                     bool ok) {
        checks.push_back({{"criterion", criterion}, {"scene", scene}, {"value", value}, {"bound", bound}, {"pass", ok}});
        if (!ok)
            report.failures.push_back(criterion + " failed on " + scene + ": value " + fmt("%.6g", value)
                                      + ", bound " + fmt("%.6g", bound));
    };

    for (const auto& [name, spec] : standard_suite()) {
        const RenderedScene scene = render_scene(spec);
        const DisparityMap& gt = scene.truth.disparity;
        const int border = default_border(spec.d_max);
        const std::vector<std::uint8_t> band = occlusion_band(scene.truth, border);
        const auto band_pixels = static_cast<std::size_t>(std::count(band.begin(), band.end(), std::uint8_t{1}));

        nlohmann::json sj;
        sj["scene"] = name;
        sj["occluder"] = is_occluder_scene(name);
        sj["band_pixels"] = band_pixels;

        std::map<std::string, MetricsReport> metrics;
        std::map<std::string, double> band_mse;
        for (const SuiteVariant& v : variants) {
            const EstimateResult r = estimate(scene.lightfield, v.config);
            const MetricsReport m = evaluate(r.final, gt, {th.eps}, border);
            const double bm = band_pixels > 0 ? mse_x100(r.final, gt, band) : 0.0;
            metrics[v.name] = m;
            band_mse[v.name] = bm;

            nlohmann::json vj;
            vj["metrics"] = to_json(m);
            vj["band_mse_x100"] = bm;
            vj["loss"] = loss_json(r.loss);
            vj["degenerate_pixels"] = r.stats.degenerate_pixels;
            vj["selection_histogram"] = r.stats.selection_histogram;
            sj["variants"][v.name] = vj;

            table << name << std::string(23 - std::min<std::size_t>(22, name.size()), ' ') << v.name
                  << std::string(15 - std::min<std::size_t>(14, v.name.size()), ' ')
                  << fmt("%10.3f", m.badpix.at(th.eps)) << fmt("%10.4f", m.mse_x100) << fmt("%14.4f", bm) << "\n";

            if (write) {
                const fs::path dir = out_dir / name / v.name;
                fs::create_directories(dir);
                std::ofstream(dir / "metrics.json") << vj.dump(2) << "\n";
                write_pfm(r.final, dir / "disparity.pfm");
                render_maps(r.final, &gt, spec.d_max, th.eps, border, dir);
            }
        }

        if (name != "textureless_patch") {
            check("end_to_end_badpix", name, metrics["full"].badpix.at(th.eps), th.end_to_end_badpix,
                  metrics["full"].badpix.at(th.eps) < th.end_to_end_badpix);
            check("end_to_end_mse", name, metrics["full"].mse_x100, th.end_to_end_mse_x100,
                  metrics["full"].mse_x100 < th.end_to_end_mse_x100);
        }
        if (is_occluder_scene(name)) {
            const double aware = band_mse["fast"];
            const double forced = band_mse["fast_no_opal"];
            check("opal_band_benefit", name, forced, th.band_mse_gain * aware,
                  forced > aware && forced >= th.band_mse_gain * aware);
            check("opal_overall_not_worse", name, metrics["fast_no_opal"].mse_x100, metrics["fast"].mse_x100,
                  metrics["fast_no_opal"].mse_x100 >= metrics["fast"].mse_x100);
        } else {
            const double diff = std::abs(metrics["fast"].badpix.at(th.eps) - metrics["fast_no_opal"].badpix.at(th.eps));
            check("non_occlusion_neutrality", name, diff, th.neutrality_badpix_pp, diff < th.neutrality_badpix_pp);
        }
        scenes.push_back(sj);
    }

    report.json["scenes"] = scenes;
    report.json["checks"] = checks;
    report.json["passed"] = report.failures.empty();

    std::ostringstream summary;
    summary << table.str() << "\n";
    for (const auto& c : checks)
        summary << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["criterion"].get<std::string>() << " ["
                << c["scene"].get<std::string>() << "] value=" << fmt("%.6g", c["value"].get<double>())
                << " bound=" << fmt("%.6g", c["bound"].get<double>()) << "\n";
    summary << (report.failures.empty() ? "suite: all checks passed\n" : "suite: FAILED\n");
    report.summary = summary.str();

    if (write) {
        std::ofstream(out_dir / "summary.json") << report.json.dump(2) << "\n";
        std::ofstream(out_dir / "summary.txt") << report.summary;
    }
    return report;
}

} // namespace opal
