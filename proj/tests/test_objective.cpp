#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "opal/error.hpp"
#include "opal/objective.hpp"

#include <cmath>

using namespace opal;

namespace {

DisparityMap shifted(const DisparityMap& d, float delta)
{
    DisparityMap out = d;
    for (float& v : out.values)
        v += delta;
    return out;
}

/// Brute-force per-pixel masked residual for one direction, independent of
/// the library's accumulation.
double direct_pixel_loss(const LightField& lf, const DisparityMap& disp, const PatternSet& ps, Direction d, int x,
                         int y, bool select)
{
    const ViewLine line = extract_view_line(lf, d);
    const int n = line.size();
    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    std::vector<std::uint8_t> v(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const AngularOffset o = line.offsets[static_cast<std::size_t>(i)];
        double res = 0.0;
        v[static_cast<std::size_t>(i)] = pixel_residual(*line.views[static_cast<std::size_t>(i)], lf.center(), x, y,
                                                        x + o.col * double(disp.at(x, y)),
                                                        y + o.row * double(disp.at(x, y)), res);
        r[static_cast<std::size_t>(i)] = res;
    }
    int j = 0;
    if (select) {
        std::vector<double> dr, c(static_cast<std::size_t>(ps.size()));
        std::vector<std::uint8_t> dv;
        for (int i = 0; i < ps.size(); ++i) {
            dr.push_back(r[static_cast<std::size_t>(ps.native_index(i))]);
            dv.push_back(v[static_cast<std::size_t>(ps.native_index(i))]);
        }
        masked_pattern_costs(ps, dr, dv, c);
        j = select_pattern(c, kDefaultTau);
    }
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i)
        if (ps.upsampled[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] && v[static_cast<std::size_t>(i)]) {
            sum += r[static_cast<std::size_t>(i)];
            ++count;
        }
    return count ? sum / count : 0.0;
}

} // namespace

TEST_CASE("opal at the true disparity of the occlusion-free scene")
{
    const RenderedScene& s = test::suite_scene("no_occlusion");
    const auto loss = opal_loss(s.lightfield, s.truth.disparity, generate_pattern_set(9, 1), kDefaultTau);
    for (double l : loss) {
        CHECK(l >= 0.0);
        CHECK(l < 1e-3);
    }
}

TEST_CASE("opal on a constant scene is zero")
{
    SceneSpec spec = test::one_layer(0.0, TextureSpec::constant(0.3), 32);
    spec.layers.push_back({2.0, Rect{8, 8, 10, 10}, TextureSpec::constant(0.3)});
    const RenderedScene s = render_scene(spec);
    for (float d : {-3.0f, 0.0f, 1.7f})
        for (double l : opal_loss(s.lightfield, DisparityMap(32, 32, d), generate_pattern_set(9, 1), kDefaultTau))
            CHECK(l == 0.0);
}

TEST_CASE("masking removes most of the occlusion band residual")
{
    const RenderedScene& s = test::suite_scene("single_occluder");
    const PatternSet ps = generate_pattern_set(9, 1);
    for (Direction d : kAllDirections) {
        CAPTURE(to_string(d));
        const DirectionalOpal aware = opal_direction(s.lightfield, s.truth.disparity, ps, d, kDefaultTau);
        const DirectionalOpal plain = opal_direction(s.lightfield, s.truth.disparity, ps, d, kDefaultTau, false);
        const ViewLine line = extract_view_line(s.lightfield, d);
        double a_sum = 0.0, p_sum = 0.0;
        std::size_t a_n = 0, p_n = 0;
        for (int y = 5; y < 123; ++y)
            for (int x = 5; x < 123; ++x) {
                bool band = false;
                for (const AngularOffset& o : line.offsets)
                    band = band || s.truth.occluded(o, x, y);
                if (!band)
                    continue;
                const std::size_t i = static_cast<std::size_t>(y * 128 + x);
                a_sum += aware.pixel_sum[i];
                a_n += static_cast<std::size_t>(aware.pixel_count[i]);
                p_sum += plain.pixel_sum[i];
                p_n += static_cast<std::size_t>(plain.pixel_count[i]);
            }
        REQUIRE(a_n > 0);
        REQUIRE(p_n > 0);
        CHECK(a_sum / double(a_n) < 0.25 * (p_sum / double(p_n)));
    }
}

TEST_CASE("directional accumulation matches a per-pixel recomputation")
{
    const RenderedScene s = render_scene(test::occluder_scene(-1.0, 1.0, Rect{8, 10, 12, 9}, 28));
    DisparityMap disp = s.truth.disparity;
    for (std::size_t i = 0; i < disp.values.size(); ++i)
        disp.values[i] += 0.1f * static_cast<float>(i % 5) - 0.2f;
    for (int beta : {1, 2, 4}) {
        const PatternSet ps = generate_pattern_set(9, beta);
        for (Direction d : kAllDirections)
            for (bool select : {true, false}) {
                const DirectionalOpal o = opal_direction(s.lightfield, disp, ps, d, kDefaultTau, select);
                double sum = 0.0;
                std::size_t count = 0;
                int mismatches = 0;
                for (int y = 0; y < 28; ++y)
                    for (int x = 0; x < 28; ++x) {
                        const std::size_t i = static_cast<std::size_t>(y * 28 + x);
                        const double want = direct_pixel_loss(s.lightfield, disp, ps, d, x, y, select);
                        const double got = o.pixel_count[i] ? o.pixel_sum[i] / o.pixel_count[i] : 0.0;
                        mismatches += std::abs(want - got) > 1e-12;
                        sum += o.pixel_sum[i];
                        count += static_cast<std::size_t>(o.pixel_count[i]);
                        if (!select)
                            mismatches += o.selection.at(x, y) != 0;
                    }
                CHECK(mismatches == 0);
                CHECK(o.count == count);
                CHECK(o.sum == doctest::Approx(sum).epsilon(1e-12));
            }
    }
}

TEST_CASE("selection inside the loss is the photometric selection")
{
    const RenderedScene s = render_scene(test::occluder_scene(0.0, 2.0, Rect{12, 12, 16, 16}, 40));
    const PatternSet ps = generate_pattern_set(9, 1);
    for (Direction d : kAllDirections) {
        const DirectionalOpal o = opal_direction(s.lightfield, s.truth.disparity, ps, d, kDefaultTau);
        const SelectionMap ref = select_patterns(
            pattern_costs(residual_stack(extract_view_line(s.lightfield, d), s.truth.disparity), ps), kDefaultTau);
        CHECK(o.selection.index == ref.index);
    }
}

TEST_CASE("smoothness closed forms")
{
    const Image flat(16, 12, 3, 0.4f);
    CHECK(smoothness_loss(DisparityMap(16, 12, 1.3f), flat, 150.0) == 0.0);

    DisparityMap ramp(16, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x)
            ramp.at(x, y) = static_cast<float>(x);
    CHECK(std::abs(smoothness_loss(ramp, flat, 150.0) - 1.0) < 1e-9);

    DisparityMap yramp(16, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x)
            yramp.at(x, y) = -0.5f * static_cast<float>(y);
    CHECK(std::abs(smoothness_loss(yramp, flat, 150.0) - 0.5) < 1e-9);

    // Step of height 3 at x = 8 colocated with a 0.5 image edge.
    Image edge(16, 12, 3, 0.2f);
    DisparityMap step(16, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 8; x < 16; ++x) {
            step.at(x, y) = 3.0f;
            for (int c = 0; c < 3; ++c)
                edge.at(x, y, c) = 0.7f;
        }
    const double s = smoothness_loss(step, edge, 150.0);
    CHECK(s < 1e-32 * 3.0);
    CHECK(s == doctest::Approx(3.0 * std::exp(-75.0) * 11.0 / (15.0 * 11.0)).epsilon(1e-6));
    // Without the edge the same step costs its full height on one column.
    CHECK(std::abs(smoothness_loss(step, flat, 150.0) - 3.0 / 15.0) < 1e-9);
}

TEST_CASE("smoothness ignores a constant offset")
{
    const RenderedScene& s = test::suite_scene("double_occluder");
    const double a = smoothness_loss(s.truth.disparity, s.lightfield.center(), 150.0);
    const double b = smoothness_loss(shifted(s.truth.disparity, 0.75f), s.lightfield.center(), 150.0);
    CHECK(a > 0.0);
    CHECK(std::abs(a - b) < 1e-12);
}

TEST_CASE("total objective composition")
{
    const RenderedScene& s = test::suite_scene("single_occluder");
    const DisparityMap& gt = s.truth.disparity;
    const DisparityMap off = shifted(gt, 0.5f);
    const PatternSet ps = generate_pattern_set(9, 1);
    const auto raw = opal_loss(s.lightfield, gt, ps, kDefaultTau);
    const auto fin = opal_loss(s.lightfield, off, ps, kDefaultTau);
    const double smooth_off = smoothness_loss(off, s.lightfield.center(), 150.0);

    const LossBreakdown def = total_objective(s.lightfield, gt, off);
    CHECK(def.constants.lambda1 == 0.6);
    CHECK(def.constants.lambda2 == 0.3);
    CHECK(def.constants.gamma == 150.0);
    CHECK(def.constants.tau == 0.01);
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(def.opal_per_direction[i] == doctest::Approx(0.6 * raw[i] + 0.4 * fin[i]).epsilon(1e-12));
        CHECK(def.opal_per_direction[i] >= 0.0);
        sum += def.opal_per_direction[i];
    }
    CHECK(def.opal_total == doctest::Approx(sum).epsilon(1e-12));
    CHECK(def.smooth == smooth_off);
    CHECK(def.total == doctest::Approx(def.opal_total + 0.3 * smooth_off).epsilon(1e-12));

    ObjectiveConfig fast;
    fast.lambda1 = 1.0;
    const LossBreakdown a = total_objective(s.lightfield, gt, off, fast);
    CHECK(a.opal_total == doctest::Approx(raw[0] + raw[1] + raw[2] + raw[3]).epsilon(1e-12));
    CHECK(a.total == doctest::Approx(a.opal_total + 0.3 * smooth_off).epsilon(1e-12));

    ObjectiveConfig flat;
    flat.lambda2 = 0.0;
    const LossBreakdown b = total_objective(s.lightfield, gt, gt, flat);
    const LossBreakdown c = total_objective(s.lightfield, gt, shifted(gt, 0.0f), flat);
    CHECK(b.total == b.opal_total);
    CHECK(b.total == c.total);

    ObjectiveConfig bad;
    bad.lambda1 = 1.5;
    CHECK_THROWS_AS(total_objective(s.lightfield, gt, gt, bad), ConfigError);
}

TEST_CASE("total objective at the truth of the occlusion-free scene")
{
    const RenderedScene& s = test::suite_scene("no_occlusion");
    const LossBreakdown l = total_objective(s.lightfield, s.truth.disparity, s.truth.disparity);
    CHECK(l.smooth == 0.0);
    CHECK(l.total < 1e-3);
}

TEST_CASE("opal is lowest at the true disparity")
{
    const RenderedScene& s = test::suite_scene("single_occluder");
    const PatternSet ps = generate_pattern_set(9, 1);
    auto total = [&](float delta) {
        const auto l = opal_loss(s.lightfield, shifted(s.truth.disparity, delta), ps, kDefaultTau);
        return l[0] + l[1] + l[2] + l[3];
    };
    const double at_gt = total(0.0f);
    for (float delta : {-1.0f, -0.5f, 0.5f, 1.0f})
        CHECK(at_gt < total(delta));
}
