#include "opal/lightfield.hpp"

#include "opal/error.hpp"

#include <string>

namespace opal {

std::string_view to_string(Direction d)
{
    switch (d) {
    case Direction::Horizontal: return "horizontal";
    case Direction::Vertical: return "vertical";
    case Direction::DiagonalMain: return "diagonal_main";
    case Direction::DiagonalAnti: return "diagonal_anti";
    }
    return "unknown";
}

Direction direction_from_string(std::string_view name)
{
    for (Direction d : kAllDirections)
        if (to_string(d) == name)
            return d;
    throw ConfigError("unknown direction '" + std::string(name) + "'");
}

int direction_index(Direction d) { return static_cast<int>(d); }

AngularOffset direction_step(Direction d)
{
    switch (d) {
    case Direction::Horizontal: return {0, 1};
    case Direction::Vertical: return {1, 0};
    case Direction::DiagonalMain: return {1, 1};
    case Direction::DiagonalAnti: return {1, -1};
    }
    return {0, 0};
}

LightField::LightField(int angular_n, std::vector<Image> views) : n_(angular_n), views_(std::move(views))
{
    if (n_ < 3)
        throw DataError("angular resolution must be >= 3");
    if (n_ % 2 == 0)
        throw DataError("angular resolution must be odd");
    if (views_.size() != static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_))
        throw DataError("view count mismatch: expected " + std::to_string(n_ * n_) + ", got "
                        + std::to_string(views_.size()));
    const Image& first = views_.front();
    if (first.empty() || (first.channels != 1 && first.channels != 3))
        throw DataError("views must be non-empty with 1 or 3 channels");
    for (const Image& v : views_)
        if (!v.same_shape(first))
            throw DataError("inconsistent view dimensions");
}

const Image& LightField::grid_view(int row, int col) const
{
    return views_[static_cast<std::size_t>(row) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(col)];
}

const Image& LightField::view(AngularOffset offset) const
{
    return grid_view(offset.row + half(), offset.col + half());
}

ViewLine extract_view_line(const LightField& lf, Direction d)
{
    ViewLine line;
    line.direction = d;
    const AngularOffset step = direction_step(d);
    const int h = lf.half();
    for (int t = -h; t <= h; ++t) {
        const AngularOffset off{step.row * t, step.col * t};
        line.offsets.push_back(off);
        line.views.push_back(&lf.view(off));
    }
    return line;
}

DisparityMap::DisparityMap(int w, int h, float fill)
    : width(w), height(h),
      values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill),
      valid(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 1)
{
}

} // namespace opal
