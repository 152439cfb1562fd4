#include "opal/image.hpp"

#include <cmath>

namespace opal {

Image::Image(int w, int h, int c, float fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill)
{
}

double mean_abs_diff(const Image& a, int ax, int ay, const Image& b, int bx, int by)
{
    const float* pa = a.pixel(ax, ay);
    const float* pb = b.pixel(bx, by);
    double sum = 0.0;
    for (int c = 0; c < a.channels; ++c)
        sum += std::abs(static_cast<double>(pa[c]) - static_cast<double>(pb[c]));
    return sum / a.channels;
}

bool sample_bilinear(const Image& img, double sx, double sy, double* out)
{
    const double fx0 = std::floor(sx);
    const double fy0 = std::floor(sy);
    const double fx = sx - fx0;
    const double fy = sy - fy0;
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);
    const int x1 = fx > 0.0 ? x0 + 1 : x0;
    const int y1 = fy > 0.0 ? y0 + 1 : y0;
    if (x0 < 0 || y0 < 0 || x1 >= img.width || y1 >= img.height)
        return false;

    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    const float* p00 = img.pixel(x0, y0);
    const float* p10 = img.pixel(x1, y0);
    const float* p01 = img.pixel(x0, y1);
    const float* p11 = img.pixel(x1, y1);
    for (int c = 0; c < img.channels; ++c)
        out[c] = w00 * p00[c] + w10 * p10[c] + w01 * p01[c] + w11 * p11[c];
    return true;
}

} // namespace opal
