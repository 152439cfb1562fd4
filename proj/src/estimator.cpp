#include "opal/estimator.hpp"

#include "opal/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace opal {

SweepConfig SweepConfig::full() { return SweepConfig{}; }

SweepConfig SweepConfig::fast()
{
    SweepConfig cfg;
    cfg.directions = {Direction::Horizontal, Direction::Vertical};
    cfg.refine = false;
    cfg.lambda1 = 1.0;
    return cfg;
}

void SweepConfig::validate() const
{
    if (!(d_max > 0.0))
        throw ConfigError("d_max must be positive");
    if (num_candidates < 3 || num_candidates % 2 == 0)
        throw ConfigError("number of candidates must be odd and >= 3");
    if (beta < 1)
        throw ConfigError("beta must be >= 1");
    if (tau < 0.0)
        throw ConfigError("tau must be non-negative");
    if (directions.empty())
        throw ConfigError("at least one direction is required");
    if (aggregation_radius < 0)
        throw ConfigError("aggregation radius must be >= 0");
    if (!(soft_temperature > 0.0))
        throw ConfigError("soft temperature must be positive");
    if (lambda1 < 0.0 || lambda1 > 1.0)
        throw ConfigError("lambda1 must lie in [0, 1]");
    if (lambda2 < 0.0)
        throw ConfigError("lambda2 must be non-negative");
    if (!(gamma > 0.0))
        throw ConfigError("gamma must be positive");
    if (memory_budget == 0)
        throw ConfigError("memory budget must be positive");
}

std::vector<double> SweepConfig::candidates() const
{
    std::vector<double> out(static_cast<std::size_t>(num_candidates));
    for (int k = 0; k < num_candidates; ++k)
        out[static_cast<std::size_t>(k)] = -d_max + 2.0 * d_max * k / (num_candidates - 1);
    return out;
}

namespace {

PatternSet checked_patterns(const LightField& lf, const SweepConfig& cfg)
{
    cfg.validate();
    PatternSet ps = generate_pattern_set(lf.angular_n(), cfg.beta);
    if (cfg.pattern_selection && ps.downsampled_m < 3)
        throw ConfigError("beta leaves fewer than 3 views per line; pattern selection needs at least 3");
    return ps;
}

} // namespace

CostVolume build_cost_volume(const LightField& lf, const SweepConfig& cfg)
{
    const PatternSet ps = checked_patterns(lf, cfg);
    const int w = lf.width();
    const int h = lf.height();
    const int m = ps.downsampled_m;
    const int num_dirs = static_cast<int>(cfg.directions.size());

    CostVolume cv;
    cv.width = w;
    cv.height = h;
    cv.candidates = cfg.candidates();
    const int num_k = cv.size();
    cv.costs.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(num_k), 0.0);

    // Downsampled line positions for every enabled direction.
    std::vector<std::vector<const Image*>> line_views(static_cast<std::size_t>(num_dirs));
    std::vector<std::vector<AngularOffset>> line_offsets(static_cast<std::size_t>(num_dirs));
    for (int di = 0; di < num_dirs; ++di) {
        const ViewLine line = extract_view_line(lf, cfg.directions[static_cast<std::size_t>(di)]);
        for (int i = 0; i < m; ++i) {
            const int native = ps.native_index(i);
            line_views[static_cast<std::size_t>(di)].push_back(line.views[static_cast<std::size_t>(native)]);
            line_offsets[static_cast<std::size_t>(di)].push_back(line.offsets[static_cast<std::size_t>(native)]);
        }
    }
    const Image& center = lf.center();

    const std::size_t per_row = static_cast<std::size_t>(w) * static_cast<std::size_t>(num_k);
    const int band_rows = static_cast<int>(std::clamp<std::size_t>(cfg.memory_budget / per_row, 1, static_cast<std::size_t>(h)));

    for (int band_start = 0; band_start < h; band_start += band_rows) {
        const int band_end = std::min(h, band_start + band_rows);
#pragma omp parallel for schedule(static)
        for (int y = band_start; y < band_end; ++y) {
            std::vector<double> residuals(static_cast<std::size_t>(w) * static_cast<std::size_t>(m));
            std::vector<std::uint8_t> valid(static_cast<std::size_t>(w) * static_cast<std::size_t>(m));
            std::vector<double> pattern_cost(static_cast<std::size_t>(m));
            for (int k = 0; k < num_k; ++k) {
                const double d = cv.candidates[static_cast<std::size_t>(k)];
                double* out = cv.costs.data() + cv.index(0, y, k);
                for (int di = 0; di < num_dirs; ++di) {
                    const auto& views = line_views[static_cast<std::size_t>(di)];
                    const auto& offsets = line_offsets[static_cast<std::size_t>(di)];
                    for (int i = 0; i < m; ++i) {
                        const Image& view = *views[static_cast<std::size_t>(i)];
                        const AngularOffset off = offsets[static_cast<std::size_t>(i)];
                        for (int x = 0; x < w; ++x) {
                            const std::size_t s = static_cast<std::size_t>(x) * static_cast<std::size_t>(m)
                                                  + static_cast<std::size_t>(i);
                            double r = 0.0;
                            valid[s] = pixel_residual(view, center, x, y, x + off.col * d, y + off.row * d, r) ? 1 : 0;
                            residuals[s] = valid[s] ? r : 0.0;
                        }
                    }
                    for (int x = 0; x < w; ++x) {
                        const std::size_t s = static_cast<std::size_t>(x) * static_cast<std::size_t>(m);
                        masked_pattern_costs(ps, {residuals.data() + s, static_cast<std::size_t>(m)},
                                             {valid.data() + s, static_cast<std::size_t>(m)}, pattern_cost);
                        const int j = cfg.pattern_selection ? select_pattern(pattern_cost, cfg.tau) : 0;
                        out[x] += pattern_cost[static_cast<std::size_t>(j)];
                    }
                }
                for (int x = 0; x < w; ++x)
                    out[x] /= num_dirs;
            }
        }
    }
    return cv;
}

CostVolume aggregate(const CostVolume& cv, int radius)
{
    if (radius < 0)
        throw ConfigError("aggregation radius must be >= 0");
    if (radius == 0)
        return cv;

    CostVolume out = cv;
    const int w = cv.width;
    const int h = cv.height;
    const double norm = static_cast<double>((2 * radius + 1) * (2 * radius + 1));

#pragma omp parallel for schedule(static)
    for (int k = 0; k < cv.size(); ++k) {
        std::vector<double> horiz(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
        for (int y = 0; y < h; ++y) {
            const double* row = cv.costs.data() + cv.index(0, y, k);
            for (int x = 0; x < w; ++x) {
                double sum = 0.0;
                for (int dx = -radius; dx <= radius; ++dx)
                    sum += row[std::clamp(x + dx, 0, w - 1)];
                horiz[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = sum;
            }
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double sum = 0.0;
                for (int dy = -radius; dy <= radius; ++dy)
                    sum += horiz[static_cast<std::size_t>(std::clamp(y + dy, 0, h - 1)) * static_cast<std::size_t>(w)
                                 + static_cast<std::size_t>(x)];
                out.costs[out.index(x, y, k)] = sum / norm;
            }
        }
    }
    return out;
}

DisparityMap regress_disparity(const CostVolume& cv, const SweepConfig& cfg)
{
    cfg.validate();
    DisparityMap out(cv.width, cv.height);
    const int num_k = cv.size();
    const double lo = -cfg.d_max;
    const double hi = cfg.d_max;

#pragma omp parallel for schedule(static)
    for (int y = 0; y < cv.height; ++y) {
        for (int x = 0; x < cv.width; ++x) {
            int best = 0;
            double cmin = cv.at(x, y, 0);
            double cmax = cmin;
            for (int k = 1; k < num_k; ++k) {
                const double c = cv.at(x, y, k);
                cmax = std::max(cmax, c);
                const double dk = cv.candidates[static_cast<std::size_t>(k)];
                const double db = cv.candidates[static_cast<std::size_t>(best)];
                if (c < cmin || (c == cmin && std::abs(dk) < std::abs(db))) {
                    cmin = c;
                    best = k;
                }
            }

            double value = cv.candidates[static_cast<std::size_t>(best)];
            if (cfg.regression == Regression::Soft) {
                double wsum = 0.0;
                double dsum = 0.0;
                for (int k = 0; k < num_k; ++k) {
                    const double wk = std::exp(-cfg.soft_temperature * (cv.at(x, y, k) - cmin));
                    wsum += wk;
                    dsum += wk * cv.candidates[static_cast<std::size_t>(k)];
                }
                value = dsum / wsum;
            }
            out.at(x, y) = static_cast<float>(std::clamp(value, lo, hi));
            out.valid[out.index(x, y)] = (cmax - cmin) < 1e-4 ? 0 : 1;
        }
    }
    return out;
}

namespace {

double percentile_nearest_rank(std::vector<double> values, double q)
{
    if (values.empty())
        return 0.0;
    const auto rank = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end());
    return values[rank];
}

constexpr int kMedianRadius = 2;
constexpr double kConfidencePercentile = 0.2;
constexpr int kMaxRefinePasses = 16;

} // namespace

DisparityMap refine(const DisparityMap& disp, const LightField& lf, const SweepConfig& cfg)
{
    const PatternSet ps = checked_patterns(lf, cfg);
    if (disp.width != lf.width() || disp.height != lf.height())
        throw DataError("refine: disparity dimensions do not match the light field");

    const int w = disp.width;
    const int h = disp.height;
    const Image& center = lf.center();
    const std::size_t pixels = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);

    DisparityMap cur = disp;
    for (float& v : cur.values)
        v = std::clamp(v, static_cast<float>(-cfg.d_max), static_cast<float>(cfg.d_max));

    for (int pass = 0; pass < kMaxRefinePasses; ++pass) {
        const std::vector<double> residual = opal_pixel_residual(lf, cur, ps, cfg.directions, cfg.tau, cfg.pattern_selection);
        std::vector<double> confidence(pixels);
        for (std::size_t p = 0; p < pixels; ++p)
            confidence[p] = std::exp(-residual[p]);
        const double gate = percentile_nearest_rank(confidence, kConfidencePercentile);

        std::vector<std::uint8_t> gated(pixels, 0);
        bool any = false;
        for (std::size_t p = 0; p < pixels; ++p) {
            if (confidence[p] < gate && residual[p] > cfg.tau) {
                gated[p] = 1;
                any = true;
            }
        }
        if (!any)
            break;

        DisparityMap next = cur;
        std::size_t changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed)
        for (int y = 0; y < h; ++y) {
            std::vector<std::pair<float, double>> samples;
            for (int x = 0; x < w; ++x) {
                const std::size_t p = cur.index(x, y);
                if (!gated[p])
                    continue;
                samples.clear();
                double total = 0.0;
                for (int dy = -kMedianRadius; dy <= kMedianRadius; ++dy) {
                    for (int dx = -kMedianRadius; dx <= kMedianRadius; ++dx) {
                        const int qx = x + dx;
                        const int qy = y + dy;
                        if (qx < 0 || qy < 0 || qx >= w || qy >= h)
                            continue;
                        const std::size_t q = cur.index(qx, qy);
                        if (gated[q])
                            continue;
                        const double wt = confidence[q] * std::exp(-cfg.gamma * mean_abs_diff(center, x, y, center, qx, qy));
                        samples.emplace_back(cur.values[q], wt);
                        total += wt;
                    }
                }
                if (samples.empty() || !(total > 0.0))
                    continue;
                std::sort(samples.begin(), samples.end());
                double acc = 0.0;
                float median = samples.back().first;
                for (const auto& [value, wt] : samples) {
                    acc += wt;
                    if (acc >= 0.5 * total) {
                        median = value;
                        break;
                    }
                }
                if (median != cur.values[p]) {
                    next.values[p] = median;
                    ++changed;
                }
            }
        }
        cur = std::move(next);
        if (changed == 0)
            break;
    }
    return cur;
}

std::vector<SelectionMap> selection_at(const LightField& lf, const DisparityMap& disp, const SweepConfig& cfg)
{
    const PatternSet ps = checked_patterns(lf, cfg);
    std::vector<SelectionMap> out;
    for (Direction d : cfg.directions) {
        if (!cfg.pattern_selection) {
            SelectionMap zero;
            zero.width = disp.width;
            zero.height = disp.height;
            zero.index.assign(static_cast<std::size_t>(disp.width) * static_cast<std::size_t>(disp.height), 0);
            out.push_back(std::move(zero));
            continue;
        }
        const ResidualStack rs = residual_stack(extract_view_line(lf, d), disp);
        out.push_back(select_patterns(pattern_costs(rs, ps), cfg.tau));
    }
    return out;
}

EstimateResult estimate(const LightField& lf, const SweepConfig& cfg)
{
    const CostVolume volume = aggregate(build_cost_volume(lf, cfg), cfg.aggregation_radius);

    EstimateResult result;
    result.raw = regress_disparity(volume, cfg);
    result.final = cfg.refine ? refine(result.raw, lf, cfg) : result.raw;
    result.loss = total_objective(lf, result.raw, result.final, cfg.objective());
    result.selection = selection_at(lf, result.raw, cfg);

    VolumeStats& st = result.stats;
    st.min_cost = std::numeric_limits<double>::infinity();
    st.max_cost = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double c : volume.costs) {
        st.min_cost = std::min(st.min_cost, c);
        st.max_cost = std::max(st.max_cost, c);
        sum += c;
    }
    st.mean_cost = volume.costs.empty() ? 0.0 : sum / static_cast<double>(volume.costs.size());
    st.degenerate_pixels = static_cast<std::size_t>(
        std::count(result.raw.valid.begin(), result.raw.valid.end(), std::uint8_t{0}));
    const int m = generate_pattern_set(lf.angular_n(), cfg.beta).downsampled_m;
    for (const SelectionMap& sel : result.selection) {
        std::vector<std::size_t> hist(static_cast<std::size_t>(m), 0);
        for (std::uint8_t j : sel.index)
            ++hist[j];
        st.selection_histogram.push_back(std::move(hist));
    }
    return result;
}

void set_thread_count(int threads)
{
    if (threads > 0)
        omp_set_num_threads(threads);
}

int default_thread_count() { return omp_get_num_procs(); }

} // namespace opal
