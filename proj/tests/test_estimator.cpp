#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brute_force.hpp"
#include "support.hpp"

#include "opal/error.hpp"
#include "opal/estimator.hpp"
#include "opal/eval.hpp"
#include "opal/suite.hpp"

#include <cmath>
#include <cstring>

using namespace opal;

namespace {

CostVolume volume(int w, int h, std::vector<double> candidates, double fill = 1.0)
{
    CostVolume cv;
    cv.width = w;
    cv.height = h;
    cv.candidates = std::move(candidates);
    cv.costs.assign(static_cast<std::size_t>(w * h) * cv.candidates.size(), fill);
    return cv;
}

double& cost(CostVolume& cv, int x, int y, int k) { return cv.costs[cv.index(x, y, k)]; }

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double band_mse(const DisparityMap& est, const RenderedScene& s)
{
    const auto band = occlusion_band(s.truth, default_border(4.0));
    return mse_x100(est, s.truth.disparity, band);
}

} // namespace

TEST_CASE("candidate grid")
{
    const SweepConfig cfg;
    const auto c = cfg.candidates();
    REQUIRE(c.size() == 65);
    CHECK(c.front() == -4.0);
    CHECK(c.back() == 4.0);
    CHECK(c[32] == 0.0);
    CHECK(cfg.candidate_step() == 0.125);
    for (std::size_t k = 0; k < c.size(); ++k)
        CHECK(c[k] == -4.0 + 0.125 * static_cast<double>(k));
}

TEST_CASE("presets")
{
    const SweepConfig full = SweepConfig::full();
    CHECK(full.directions.size() == 4);
    CHECK(full.refine);
    CHECK(full.lambda1 == 0.6);
    CHECK(full.lambda2 == 0.3);
    CHECK(full.gamma == 150.0);
    CHECK(full.tau == 0.01);
    CHECK(full.d_max == 4.0);
    CHECK(full.regression == Regression::HardArgmin);
    const SweepConfig fast = SweepConfig::fast();
    CHECK(fast.directions == std::vector<Direction>{Direction::Horizontal, Direction::Vertical});
    CHECK_FALSE(fast.refine);
    CHECK(fast.lambda1 == 1.0);
}

TEST_CASE("configuration validation")
{
    auto rejects = [](auto mutate) {
        SweepConfig cfg;
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    };
    rejects([](SweepConfig& c) { c.num_candidates = 64; });
    rejects([](SweepConfig& c) { c.num_candidates = 1; });
    rejects([](SweepConfig& c) { c.d_max = 0.0; });
    rejects([](SweepConfig& c) { c.beta = 0; });
    rejects([](SweepConfig& c) { c.directions.clear(); });
    rejects([](SweepConfig& c) { c.aggregation_radius = -1; });
    rejects([](SweepConfig& c) { c.soft_temperature = 0.0; });
    rejects([](SweepConfig& c) { c.lambda1 = -0.1; });
    CHECK_NOTHROW(SweepConfig{}.validate());
    const RenderedScene s = render_scene(test::one_layer(0.0, TextureSpec::constant(0.5), 8));
    SweepConfig bad_beta;
    bad_beta.beta = 3;
    CHECK_THROWS_AS(build_cost_volume(s.lightfield, bad_beta), ConfigError);
}

TEST_CASE("cost at the true plane of the occlusion-free scene")
{
    const RenderedScene& s = test::suite_scene("no_occlusion");
    SweepConfig cfg;
    const CostVolume cv = build_cost_volume(s.lightfield, cfg);
    const int k_gt = 22; // -1.25
    REQUIRE(cv.candidates[k_gt] == -1.25);
    double worst = 0.0;
    std::size_t greater = 0, total = 0;
    for (int y = 5; y < 123; ++y)
        for (int x = 5; x < 123; ++x) {
            worst = std::max(worst, cv.at(x, y, k_gt));
            ++total;
            greater += cv.at(x, y, k_gt + 8) > cv.at(x, y, k_gt);
        }
    CHECK(worst < 1e-3);
    CHECK(static_cast<double>(greater) >= 0.99 * static_cast<double>(total));
}

TEST_CASE("constant scene is degenerate at every candidate")
{
    const RenderedScene s = render_scene(test::one_layer(1.0, TextureSpec::constant(0.6), 20));
    SweepConfig cfg;
    const CostVolume cv = build_cost_volume(s.lightfield, cfg);
    for (double c : cv.costs)
        CHECK(c < 1e-6);
    const DisparityMap d = regress_disparity(aggregate(cv, 2), cfg);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x) {
            CHECK_FALSE(d.is_valid(x, y));
            CHECK(d.at(x, y) == 0.0f);
        }
}

TEST_CASE("row banding does not change the volume")
{
    const RenderedScene s = render_scene(test::occluder_scene(0.0, 2.0, Rect{8, 8, 10, 10}, 30));
    SweepConfig cfg;
    cfg.num_candidates = 17;
    const CostVolume whole = build_cost_volume(s.lightfield, cfg);
    for (std::size_t budget : {std::size_t{1}, std::size_t{30 * 17 * 4}}) {
        SweepConfig banded = cfg;
        banded.memory_budget = budget;
        CHECK(bit_equal(build_cost_volume(s.lightfield, banded).costs, whole.costs));
    }
}

TEST_CASE("box aggregation")
{
    CostVolume cv = volume(7, 6, {-1.0, 0.0, 1.0}, 0.0);
    cost(cv, 3, 2, 1) = 9.0;
    CHECK(bit_equal(aggregate(cv, 0).costs, cv.costs));
    const CostVolume a = aggregate(cv, 1);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 7; ++x) {
            const bool near = std::abs(x - 3) <= 1 && std::abs(y - 2) <= 1;
            CHECK(a.at(x, y, 1) == (near ? 1.0 : 0.0));
            CHECK(a.at(x, y, 0) == 0.0);
        }

    CostVolume corner = volume(5, 5, {0.0}, 0.0);
    cost(corner, 0, 0, 0) = 9.0;
    const CostVolume b = aggregate(corner, 1);
    CHECK(b.at(0, 0, 0) == doctest::Approx(4.0));
    CHECK(b.at(1, 0, 0) == doctest::Approx(2.0));
    CHECK(b.at(1, 1, 0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(aggregate(cv, -1), ConfigError);
}

TEST_CASE("aggregation keeps the argmin of a per-candidate constant volume")
{
    CostVolume cv = volume(9, 8, {-2.0, -1.0, 0.0, 1.0, 2.0});
    const double level[] = {0.7, 0.2, 0.5, 0.1, 0.9};
    for (int k = 0; k < 5; ++k)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 9; ++x)
                cost(cv, x, y, k) = level[k];
    SweepConfig cfg;
    cfg.d_max = 2.0;
    cfg.num_candidates = 5;
    const DisparityMap before = regress_disparity(cv, cfg);
    const DisparityMap after = regress_disparity(aggregate(cv, 3), cfg);
    CHECK(before.values == after.values);
    CHECK(after.at(4, 4) == 1.0f);
}

TEST_CASE("hard regression")
{
    SweepConfig cfg;
    cfg.d_max = 2.0;
    cfg.num_candidates = 5;
    CostVolume cv = volume(3, 1, {-2.0, -1.0, 0.0, 1.0, 2.0});
    cost(cv, 0, 0, 3) = 0.1;
    // Tie between -1 and 2: smaller magnitude wins.
    cost(cv, 1, 0, 1) = 0.2;
    cost(cv, 1, 0, 4) = 0.2;
    // Tie between -1 and 1: the first one at that magnitude wins.
    cost(cv, 2, 0, 1) = 0.3;
    cost(cv, 2, 0, 3) = 0.3;
    const DisparityMap d = regress_disparity(cv, cfg);
    CHECK(d.at(0, 0) == 1.0f);
    CHECK(d.at(1, 0) == -1.0f);
    CHECK(std::abs(d.at(2, 0)) == 1.0f);
    for (int x = 0; x < 3; ++x)
        CHECK(d.is_valid(x, 0));

    CostVolume flat = volume(1, 1, {-2.0, -1.0, 0.0, 1.0, 2.0}, 0.5);
    cost(flat, 0, 0, 4) = 0.5 - 5e-5;
    const DisparityMap f = regress_disparity(flat, cfg);
    CHECK(f.at(0, 0) == 2.0f);
    CHECK_FALSE(f.is_valid(0, 0));
}

TEST_CASE("soft regression")
{
    SweepConfig cfg;
    cfg.regression = Regression::Soft;
    cfg.num_candidates = 9;
    const auto cands = cfg.candidates();

    CostVolume sat = volume(1, 1, cands, 10.0);
    cost(sat, 0, 0, 6) = 0.0;
    CHECK(std::abs(regress_disparity(sat, cfg).at(0, 0) - 2.0f) < 1e-3);

    // Parabola centred at 0.5, halfway between candidates 0 and 1. The
    // unpaired end candidate -4 carries weight e^-101, below double precision.
    CostVolume para = volume(1, 1, cands);
    for (int k = 0; k < 9; ++k) {
        const double dk = cands[static_cast<std::size_t>(k)];
        cost(para, 0, 0, k) = 0.05 * (dk - 0.5) * (dk - 0.5);
    }
    cfg.soft_temperature = 100.0;
    CHECK(std::abs(regress_disparity(para, cfg).at(0, 0) - 0.5f) < 1e-6);

    // Symmetric candidate set around a midpoint, moderate temperature.
    CostVolume mid = volume(1, 1, {-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5});
    for (int k = 0; k < 8; ++k) {
        const double dk = mid.candidates[static_cast<std::size_t>(k)];
        cost(mid, 0, 0, k) = 0.3 * dk * dk;
    }
    cfg.soft_temperature = 10.0;
    CostVolume shifted = mid;
    for (double& c : shifted.candidates)
        c += 0.25;
    CHECK(std::abs(regress_disparity(shifted, cfg).at(0, 0) - 0.25f) < 1e-6);

    CostVolume clamp = volume(1, 1, {-4.0, 4.0, 9.0});
    cost(clamp, 0, 0, 2) = 0.0;
    SweepConfig wide;
    wide.regression = Regression::Soft;
    wide.soft_temperature = 1e3;
    CHECK(regress_disparity(clamp, wide).at(0, 0) == 4.0f);
}

TEST_CASE("refinement keeps a correct map unchanged")
{
    const RenderedScene& s = test::suite_scene("no_occlusion");
    const DisparityMap out = refine(s.truth.disparity, s.lightfield, SweepConfig{});
    CHECK(out.values == s.truth.disparity.values);
}

TEST_CASE("refinement removes an isolated speckle")
{
    const RenderedScene s = render_scene(test::one_layer(1.0, TextureSpec::noise(4, 0.1, 0.9), 40));
    DisparityMap d = s.truth.disparity;
    d.at(20, 20) = -2.5f;
    const DisparityMap out = refine(d, s.lightfield, SweepConfig{});
    CHECK(out.at(20, 20) == 1.0f);
    CHECK(out.values == s.truth.disparity.values);
}

TEST_CASE("refinement is idempotent")
{
    for (const char* name : {"single_occluder", "thin_bar", "textureless_patch"}) {
        CAPTURE(name);
        const RenderedScene& s = test::suite_scene(name);
        SweepConfig cfg;
        cfg.refine = false;
        const DisparityMap raw = estimate(s.lightfield, cfg).raw;
        const DisparityMap once = refine(raw, s.lightfield, cfg);
        const DisparityMap twice = refine(once, s.lightfield, cfg);
        CHECK(once.values == twice.values);
    }
}

TEST_CASE("plane sweep matches the brute-force oracle")
{
    SceneSpec spec = test::occluder_scene(-1.0, 1.0, Rect{5, 4, 6, 7}, 16);
    const RenderedScene s = render_scene(spec);
    struct Case {
        int k;
        int beta;
        int radius;
        bool select;
        std::vector<Direction> dirs;
    };
    const std::vector<Case> cases = {
        {9, 1, 2, true, {kAllDirections.begin(), kAllDirections.end()}},
        {9, 2, 1, true, {Direction::Horizontal, Direction::Vertical}},
        {7, 4, 0, true, {Direction::DiagonalMain}},
        {9, 1, 2, false, {kAllDirections.begin(), kAllDirections.end()}},
    };
    for (const Case& c : cases) {
        SweepConfig cfg;
        cfg.num_candidates = c.k;
        cfg.beta = c.beta;
        cfg.aggregation_radius = c.radius;
        cfg.pattern_selection = c.select;
        cfg.directions = c.dirs;
        cfg.refine = false;
        const DisparityMap fast = estimate(s.lightfield, cfg).raw;
        const DisparityMap slow = test::brute_force_hard(s.lightfield, cfg);
        CHECK(fast.values == slow.values);
        CHECK(fast.valid == slow.valid);
    }
}

TEST_CASE("results do not depend on the worker count")
{
    const RenderedScene s = render_scene(test::occluder_scene(0.0, 2.0, Rect{10, 12, 14, 10}, 36));
    SweepConfig cfg;
    cfg.num_candidates = 33;
    set_thread_count(1);
    const EstimateResult a = estimate(s.lightfield, cfg);
    set_thread_count(4);
    const EstimateResult b = estimate(s.lightfield, cfg);
    set_thread_count(default_thread_count());
    CHECK(a.raw.values == b.raw.values);
    CHECK(a.final.values == b.final.values);
    CHECK(a.loss.total == b.loss.total);
}

TEST_CASE("fast preset reports a full breakdown")
{
    const RenderedScene& s = test::suite_scene("single_occluder");
    const EstimateResult r = estimate(s.lightfield, SweepConfig::fast());
    CHECK(r.final.width == 128);
    CHECK(r.loss.constants.lambda1 == 1.0);
    CHECK(r.loss.opal_total > 0.0);
    CHECK(r.loss.smooth >= 0.0);
    CHECK(r.loss.total == doctest::Approx(r.loss.opal_total + 0.3 * r.loss.smooth));
    CHECK(r.loss.opal_per_direction[0] > 0.0);
    REQUIRE(r.selection.size() == 2);
    REQUIRE(r.stats.selection_histogram.size() == 2);
    std::size_t total = 0;
    for (std::size_t c : r.stats.selection_histogram[0])
        total += c;
    CHECK(total == 128u * 128u);
    CHECK(r.stats.min_cost >= 0.0);
    CHECK(r.stats.max_cost >= r.stats.mean_cost);
    CHECK(r.final.values == r.raw.values);
}

TEST_CASE("full preset beats fast on the double occluder")
{
    const RenderedScene& s = test::suite_scene("double_occluder");
    const auto mask = border_mask(128, 128, default_border(4.0));
    const double full = mse_x100(estimate(s.lightfield, SweepConfig::full()).final, s.truth.disparity, mask);
    const double fast = mse_x100(estimate(s.lightfield, SweepConfig::fast()).final, s.truth.disparity, mask);
    CHECK(full < fast);
}

TEST_CASE("forcing pattern 0 hurts the occlusion band")
{
    const RenderedScene& s = test::suite_scene("single_occluder");
    SweepConfig aware = SweepConfig::fast();
    SweepConfig plain = aware;
    plain.pattern_selection = false;
    const DisparityMap a = estimate(s.lightfield, aware).final;
    const DisparityMap p = estimate(s.lightfield, plain).final;
    CHECK(band_mse(p, s) > band_mse(a, s));
}
