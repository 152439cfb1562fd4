#pragma once

#include "opal/lightfield.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace opal {

enum class TextureKind { Noise, Gradient, Checker, Constant };

/// Procedural texture on the plane of a layer. Samples are the 2x2 area
/// average of a finer procedural function, i.e. the texture as rendered at
/// twice the resolution and box-downsampled.
struct TextureSpec {
    TextureKind kind = TextureKind::Noise;
    std::uint64_t seed = 0;
    double low = 0.0;   ///< Noise/checker lower intensity.
    double high = 1.0;  ///< Noise/checker upper intensity.
    double scale = 1.0; ///< Noise lattice spacing or checker square size, in pixels.
    double value = 0.5; ///< Constant intensity, or gradient value at the image center.
    double slope_x = 0.0; ///< Gradient intensity change per pixel along x (channel 0; rotated for others).
    double slope_y = 0.0;

    static TextureSpec noise(std::uint64_t seed, double low, double high, double scale = 1.0);
    static TextureSpec gradient(double center_value, double slope_x, double slope_y);
    static TextureSpec checker(double low, double high, double square);
    static TextureSpec constant(double value);
};

/// Axis-aligned rectangle in central-view pixel coordinates (inclusive pixel span).
struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    /// Continuous containment with pixel i covering [i - 0.5, i + 0.5).
    [[nodiscard]] bool contains(double px, double py) const
    {
        return px >= x - 0.5 && px < x + width - 0.5 && py >= y - 0.5 && py < y + height - 0.5;
    }
};

struct Layer {
    double disparity = 0.0;
    std::optional<Rect> region; ///< nullopt means the layer fills the whole plane.
    TextureSpec texture;
};

/// Fronto-parallel layered scene, layers ordered back to front.
struct SceneSpec {
    std::vector<Layer> layers;
    int angular_n = 9;
    int height = 128;
    int width = 128;
    int channels = 3;
    double d_max = 4.0;

    /// Throws DataError if the first layer is not full-frame, a disparity
    /// exceeds d_max, or a front layer does not have strictly larger
    /// disparity than a layer it can cover in some view.
    void validate() const;
    /// Mirror about the vertical image axis.
    [[nodiscard]] SceneSpec mirrored_horizontally() const;
};

struct GroundTruth {
    DisparityMap disparity;
    /// Per view, row-major by angular grid index: true where the central
    /// pixel's scene point is hidden in that view.
    std::vector<std::vector<std::uint8_t>> occlusion;
    /// Index of the layer seen by each central pixel.
    std::vector<int> layer_id;
    int angular_n = 0;

    [[nodiscard]] const std::vector<std::uint8_t>& occlusion_at(AngularOffset offset) const;
    [[nodiscard]] bool occluded(AngularOffset offset, int x, int y) const;
};

struct RenderedScene {
    LightField lightfield;
    GroundTruth truth;
};

/// Renders every view by z-buffering the layers: view pixel p shows the
/// frontmost layer l whose region contains p - offset * D_l. Views may be
/// rendered in parallel.
RenderedScene render_scene(const SceneSpec& spec);

/// Sample of a texture at continuous plane coordinates (central-view pixels).
void sample_texture(const TextureSpec& tex, double x, double y, int channels, double center_x, double center_y,
                    float* out);

/// Fixed seeded scenes at 128x128, N = 9.
std::vector<std::pair<std::string, SceneSpec>> standard_suite();
/// Names of suite scenes containing at least one occluding layer.
bool is_occluder_scene(const std::string& name);

} // namespace opal
