#pragma once

#include "opal/image.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace opal {

/// Angular displacement from the central view, in units of one view step.
/// `row` moves vertically (spatial y), `col` moves horizontally (spatial x).
struct AngularOffset {
    int row = 0;
    int col = 0;

    friend bool operator==(const AngularOffset&, const AngularOffset&) = default;
};

enum class Direction { Horizontal, Vertical, DiagonalMain, DiagonalAnti };

inline constexpr std::array<Direction, 4> kAllDirections = {
    Direction::Horizontal, Direction::Vertical, Direction::DiagonalMain, Direction::DiagonalAnti};

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view name);
int direction_index(Direction d);

/// Unit step of line parameter t along a direction.
AngularOffset direction_step(Direction d);

/// N x N grid of co-registered sub-aperture images. Views are stored row-major
/// by angular grid index; the central view sits at row = col = (N-1)/2.
class LightField {
public:
    LightField() = default;
    /// Validates that N is odd and >= 3 and that all N^2 views share one shape.
    LightField(int angular_n, std::vector<Image> views);

    [[nodiscard]] int angular_n() const { return n_; }
    [[nodiscard]] int half() const { return (n_ - 1) / 2; }
    [[nodiscard]] int width() const { return views_.front().width; }
    [[nodiscard]] int height() const { return views_.front().height; }
    [[nodiscard]] int channels() const { return views_.front().channels; }

    /// View by grid index, 0 <= row, col < N.
    [[nodiscard]] const Image& grid_view(int row, int col) const;
    /// View by centered angular offset, |row|, |col| <= (N-1)/2.
    [[nodiscard]] const Image& view(AngularOffset offset) const;
    [[nodiscard]] const Image& center() const { return view({0, 0}); }
    [[nodiscard]] const std::vector<Image>& views() const { return views_; }

private:
    int n_ = 0;
    std::vector<Image> views_;
};

/// The N views on a line through the central view, ordered by t = -(N-1)/2 .. (N-1)/2.
/// Holds non-owning pointers; the source LightField must outlive it.
struct ViewLine {
    Direction direction = Direction::Horizontal;
    std::vector<const Image*> views;
    std::vector<AngularOffset> offsets;

    [[nodiscard]] int size() const { return static_cast<int>(views.size()); }
    [[nodiscard]] int center_index() const { return (size() - 1) / 2; }
    [[nodiscard]] const Image& center() const { return *views[static_cast<std::size_t>(center_index())]; }
};

ViewLine extract_view_line(const LightField& lf, Direction d);

/// Per-pixel disparity of the central view in pixels per unit angular step.
struct DisparityMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;
    std::vector<std::uint8_t> valid;

    DisparityMap() = default;
    DisparityMap(int w, int h, float fill = 0.0f);

    [[nodiscard]] std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
    }
    [[nodiscard]] float at(int x, int y) const { return values[index(x, y)]; }
    float& at(int x, int y) { return values[index(x, y)]; }
    [[nodiscard]] bool is_valid(int x, int y) const { return valid[index(x, y)] != 0; }
};

} // namespace opal
