#include "opal/synth.hpp"

#include "opal/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace opal {

TextureSpec TextureSpec::noise(std::uint64_t seed, double low, double high, double scale)
{
    TextureSpec t;
    t.kind = TextureKind::Noise;
    t.seed = seed;
    t.low = low;
    t.high = high;
    t.scale = scale;
    return t;
}

TextureSpec TextureSpec::gradient(double center_value, double slope_x, double slope_y)
{
    TextureSpec t;
    t.kind = TextureKind::Gradient;
    t.value = center_value;
    t.slope_x = slope_x;
    t.slope_y = slope_y;
    return t;
}

TextureSpec TextureSpec::checker(double low, double high, double square)
{
    TextureSpec t;
    t.kind = TextureKind::Checker;
    t.low = low;
    t.high = high;
    t.scale = square;
    return t;
}

TextureSpec TextureSpec::constant(double value)
{
    TextureSpec t;
    t.kind = TextureKind::Constant;
    t.value = value;
    return t;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double lattice_value(std::uint64_t seed, long long ix, long long iy, int c)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(ix));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(iy) * 0x632BE59BD9B4E019ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(c + 1));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double fine_value(const TextureSpec& tex, double x, double y, int c, double cx, double cy)
{
    switch (tex.kind) {
    case TextureKind::Constant: return tex.value;
    case TextureKind::Gradient: {
        const double angle = c * std::numbers::pi / 3.0;
        const double sx = tex.slope_x * std::cos(angle) - tex.slope_y * std::sin(angle);
        const double sy = tex.slope_x * std::sin(angle) + tex.slope_y * std::cos(angle);
        return tex.value + sx * (x - cx) + sy * (y - cy);
    }
    case TextureKind::Checker: {
        const auto ix = static_cast<long long>(std::floor(x / tex.scale));
        const auto iy = static_cast<long long>(std::floor(y / tex.scale));
        return ((ix + iy) & 1LL) ? tex.high : tex.low;
    }
    case TextureKind::Noise: {
        const double gx = x / tex.scale;
        const double gy = y / tex.scale;
        const double fx0 = std::floor(gx);
        const double fy0 = std::floor(gy);
        const double fx = gx - fx0;
        const double fy = gy - fy0;
        const auto ix = static_cast<long long>(fx0);
        const auto iy = static_cast<long long>(fy0);
        const double v = (1 - fx) * (1 - fy) * lattice_value(tex.seed, ix, iy, c)
                         + fx * (1 - fy) * lattice_value(tex.seed, ix + 1, iy, c)
                         + (1 - fx) * fy * lattice_value(tex.seed, ix, iy + 1, c)
                         + fx * fy * lattice_value(tex.seed, ix + 1, iy + 1, c);
        return tex.low + (tex.high - tex.low) * v;
    }
    }
    return 0.0;
}

bool regions_can_overlap(const Layer& back, const Layer& front, double max_shift)
{
    if (!back.region || !front.region)
        return true;
    const Rect& a = *back.region;
    const Rect& b = *front.region;
    const double m = max_shift;
    return a.x - m < b.x + b.width && b.x - m < a.x + a.width && a.y - m < b.y + b.height
           && b.y - m < a.y + a.height;
}

} // namespace

void sample_texture(const TextureSpec& tex, double x, double y, int channels, double center_x, double center_y,
                    float* out)
{
    static constexpr double kSub[2] = {-0.25, 0.25};
    for (int c = 0; c < channels; ++c) {
        double sum = 0.0;
        for (double oy : kSub)
            for (double ox : kSub)
                sum += fine_value(tex, x + ox, y + oy, c, center_x, center_y);
        out[c] = static_cast<float>(sum / 4.0);
    }
}

void SceneSpec::validate() const
{
    if (layers.empty())
        throw DataError("scene has no layers");
    if (layers.front().region)
        throw DataError("the back layer must be full-frame");
    if (angular_n < 3 || angular_n % 2 == 0)
        throw DataError("angular resolution must be odd and >= 3");
    if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
        throw DataError("invalid scene dimensions");
    const int half = (angular_n - 1) / 2;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (std::abs(layers[i].disparity) > d_max)
            throw DataError("layer disparity exceeds d_max");
        for (std::size_t j = i + 1; j < layers.size(); ++j) {
            const double shift = half * std::abs(layers[j].disparity - layers[i].disparity);
            if (regions_can_overlap(layers[i], layers[j], shift) && !(layers[j].disparity > layers[i].disparity))
                throw DataError("layer ordering violates disparity invariant: layer " + std::to_string(j)
                                + " covers layer " + std::to_string(i) + " but is not nearer");
        }
    }
}

SceneSpec SceneSpec::mirrored_horizontally() const
{
    SceneSpec out = *this;
    for (Layer& l : out.layers) {
        if (l.region)
            l.region->x = width - l.region->x - l.region->width;
        l.texture.slope_x = -l.texture.slope_x;
    }
    return out;
}

const std::vector<std::uint8_t>& GroundTruth::occlusion_at(AngularOffset offset) const
{
    const int half = (angular_n - 1) / 2;
    return occlusion[static_cast<std::size_t>((offset.row + half) * angular_n + offset.col + half)];
}

bool GroundTruth::occluded(AngularOffset offset, int x, int y) const
{
    return occlusion_at(offset)[disparity.index(x, y)] != 0;
}

RenderedScene render_scene(const SceneSpec& spec)
{
    spec.validate();
    const int n = spec.angular_n;
    const int half = (n - 1) / 2;
    const int w = spec.width;
    const int h = spec.height;
    const double cx = 0.5 * (w - 1);
    const double cy = 0.5 * (h - 1);
    const int num_layers = static_cast<int>(spec.layers.size());

    std::vector<Image> views(static_cast<std::size_t>(n * n));
    std::vector<std::vector<std::uint8_t>> occlusion(static_cast<std::size_t>(n * n));

    GroundTruth truth;
    truth.angular_n = n;
    truth.disparity = DisparityMap(w, h);
    truth.layer_id.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int front = 0;
            for (int l = num_layers - 1; l >= 0; --l) {
                const Layer& layer = spec.layers[static_cast<std::size_t>(l)];
                if (!layer.region || layer.region->contains(x, y)) {
                    front = l;
                    break;
                }
            }
            truth.layer_id[truth.disparity.index(x, y)] = front;
            truth.disparity.at(x, y) = static_cast<float>(spec.layers[static_cast<std::size_t>(front)].disparity);
        }
    }

#pragma omp parallel for schedule(dynamic)
    for (int v = 0; v < n * n; ++v) {
        const AngularOffset off{v / n - half, v % n - half};
        Image img(w, h, spec.channels);
        std::vector<std::uint8_t> occ(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                for (int l = num_layers - 1; l >= 0; --l) {
                    const Layer& layer = spec.layers[static_cast<std::size_t>(l)];
                    const double qx = x - off.col * layer.disparity;
                    const double qy = y - off.row * layer.disparity;
                    if (layer.region && !layer.region->contains(qx, qy))
                        continue;
                    sample_texture(layer.texture, qx, qy, spec.channels, cx, cy, &img.at(x, y, 0));
                    break;
                }

                // Visibility of the central pixel's scene point in this view.
                const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(w)
                                        + static_cast<std::size_t>(x);
                const int own = truth.layer_id[idx];
                const double d_own = spec.layers[static_cast<std::size_t>(own)].disparity;
                for (int l = own + 1; l < num_layers; ++l) {
                    const Layer& layer = spec.layers[static_cast<std::size_t>(l)];
                    const double qx = x + off.col * (d_own - layer.disparity);
                    const double qy = y + off.row * (d_own - layer.disparity);
                    if (!layer.region || layer.region->contains(qx, qy)) {
                        occ[idx] = 1;
                        break;
                    }
                }
            }
        }
        views[static_cast<std::size_t>(v)] = std::move(img);
        occlusion[static_cast<std::size_t>(v)] = std::move(occ);
    }

    truth.occlusion = std::move(occlusion);
    return {LightField(n, std::move(views)), std::move(truth)};
}

namespace {

constexpr double kBackLow = 0.05;
constexpr double kBackHigh = 0.45;
constexpr double kFrontLow = 0.55;
constexpr double kFrontHigh = 0.95;

SceneSpec base_scene()
{
    SceneSpec s;
    s.angular_n = 9;
    s.width = 128;
    s.height = 128;
    s.channels = 3;
    return s;
}

} // namespace

std::vector<std::pair<std::string, SceneSpec>> standard_suite()
{
    std::vector<std::pair<std::string, SceneSpec>> suite;

    {
        // Affine ramp: bilinear resampling is exact for any disparity, so a
        // fractional value is usable here.
        SceneSpec s = base_scene();
        s.layers.push_back({-1.25, std::nullopt, TextureSpec::gradient(0.5, 0.004, 0.003)});
        suite.emplace_back("no_occlusion", s);
    }
    {
        SceneSpec s = base_scene();
        s.layers.push_back({0.0, std::nullopt, TextureSpec::noise(101, kBackLow, kBackHigh, 2.0)});
        s.layers.push_back({2.0, Rect{44, 44, 40, 40}, TextureSpec::noise(102, kFrontLow, kFrontHigh, 2.0)});
        suite.emplace_back("single_occluder", s);
    }
    {
        // Background strip between two occluders is hidden from both ends of the line.
        SceneSpec s = base_scene();
        s.layers.push_back({-1.0, std::nullopt, TextureSpec::noise(201, kBackLow, kBackHigh, 2.0)});
        s.layers.push_back({2.0, Rect{14, 30, 34, 68}, TextureSpec::noise(202, kFrontLow, kFrontHigh, 2.0)});
        s.layers.push_back({3.0, Rect{76, 30, 36, 68}, TextureSpec::noise(203, kFrontLow, kFrontHigh, 2.0)});
        suite.emplace_back("double_occluder", s);
    }
    {
        SceneSpec s = base_scene();
        s.layers.push_back({0.0, std::nullopt, TextureSpec::noise(301, kBackLow, kBackHigh, 2.0)});
        s.layers.push_back({2.0, Rect{62, 20, 3, 88}, TextureSpec::noise(302, kFrontLow, kFrontHigh, 2.0)});
        suite.emplace_back("thin_bar", s);
    }
    {
        SceneSpec s = base_scene();
        s.layers.push_back({-1.0, std::nullopt, TextureSpec::noise(401, kBackLow, kBackHigh, 2.0)});
        s.layers.push_back({0.0, Rect{40, 40, 48, 48}, TextureSpec::constant(0.7)});
        suite.emplace_back("textureless_patch", s);
    }
    {
        SceneSpec s = base_scene();
        s.layers.push_back({-2.0, std::nullopt, TextureSpec::noise(501, kBackLow, kBackHigh, 1.0)});
        s.layers.push_back({1.0, Rect{36, 48, 56, 32}, TextureSpec::noise(502, kFrontLow, kFrontHigh, 1.0)});
        suite.emplace_back("high_frequency_noise", s);
    }
    return suite;
}

bool is_occluder_scene(const std::string& name) { return name != "no_occlusion"; }

} // namespace opal
