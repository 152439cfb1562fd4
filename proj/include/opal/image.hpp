#pragma once

#include <cstddef>
#include <vector>

namespace opal {

/// Interleaved float image, row-major, intensities nominally in [0,1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, float fill = 0.0f);

    [[nodiscard]] bool empty() const { return data.empty(); }
    [[nodiscard]] std::size_t index(int x, int y, int c = 0) const
    {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x))
                   * static_cast<std::size_t>(channels)
               + static_cast<std::size_t>(c);
    }
    [[nodiscard]] float at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }
    float& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
    [[nodiscard]] const float* pixel(int x, int y) const { return data.data() + index(x, y); }

    [[nodiscard]] bool same_shape(const Image& other) const
    {
        return width == other.width && height == other.height && channels == other.channels;
    }
};

/// Mean over channels of |a(x,y) - b(x,y)|.
double mean_abs_diff(const Image& a, int ax, int ay, const Image& b, int bx, int by);

/// Bilinear sample of `img` at continuous position (sx, sy), pixel centers at integers.
/// Taps carrying zero weight are not required to be inside the image, so an
/// integer position on the last row/column is valid. Returns false when a
/// required tap falls outside; `out` then holds unspecified values.
bool sample_bilinear(const Image& img, double sx, double sy, double* out);

} // namespace opal
