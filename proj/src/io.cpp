#include "opal/io.hpp"

#include "opal/error.hpp"

#include <json.hpp>
#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace opal {

namespace fs = std::filesystem;

std::string view_filename(int row, int col)
{
    return "view_" + std::to_string(row) + "_" + std::to_string(col) + ".png";
}

LightFieldContainer load_lightfield(const fs::path& dir)
{
    const fs::path meta_path = dir / "meta.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in)
        throw DataError("cannot open " + meta_path.string());
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed meta.json: " + std::string(e.what()));
    }

    int n = 0, h = 0, w = 0;
    try {
        n = meta.at("angular_n").get<int>();
        h = meta.at("height").get<int>();
        w = meta.at("width").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("meta.json missing required key: " + std::string(e.what()));
    }
    if (n % 2 == 0)
        throw DataError("angular resolution must be odd");
    if (n < 3)
        throw DataError("angular resolution must be >= 3");

    std::size_t view_files = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.starts_with("view_") && name.ends_with(".png"))
            ++view_files;
    }
    if (view_files != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw DataError("view count mismatch: meta declares " + std::to_string(n * n) + ", found "
                        + std::to_string(view_files));

    std::vector<Image> views;
    views.reserve(view_files);
    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const fs::path p = dir / view_filename(row, col);
            if (!fs::exists(p))
                throw DataError("view count mismatch: missing " + p.filename().string());
            Image img = read_png(p);
            if (img.width != w || img.height != h)
                throw DataError("inconsistent dimensions in " + p.filename().string());
            views.push_back(std::move(img));
        }
    }

    LightFieldContainer out{LightField(n, std::move(views)), std::nullopt, std::nullopt};
    if (meta.contains("disparity_range")) {
        const auto& r = meta["disparity_range"];
        if (!r.is_array() || r.size() != 2)
            throw DataError("disparity_range must be a two-element array");
        out.disparity_range = std::make_pair(r[0].get<double>(), r[1].get<double>());
    }
    const fs::path gt_path = dir / "gt.pfm";
    if (fs::exists(gt_path)) {
        DisparityMap gt = read_pfm(gt_path);
        if (gt.width != w || gt.height != h)
            throw DataError("gt.pfm dimensions do not match meta.json");
        out.ground_truth = std::move(gt);
    }
    return out;
}

void save_lightfield(const fs::path& dir, const LightField& lf, const DisparityMap* ground_truth,
                     std::optional<std::pair<double, double>> disparity_range)
{
    fs::create_directories(dir);
    nlohmann::json meta;
    meta["angular_n"] = lf.angular_n();
    meta["height"] = lf.height();
    meta["width"] = lf.width();
    if (disparity_range)
        meta["disparity_range"] = {disparity_range->first, disparity_range->second};
    std::ofstream(dir / "meta.json") << meta.dump(2) << "\n";

    for (int row = 0; row < lf.angular_n(); ++row)
        for (int col = 0; col < lf.angular_n(); ++col)
            write_png(lf.grid_view(row, col), dir / view_filename(row, col), 16);
    if (ground_truth)
        write_pfm(*ground_truth, dir / "gt.pfm");
}

// ---------------------------------------------------------------------------
// PFM

namespace {

std::string next_token(std::istream& in)
{
    std::string tok;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
            continue;
        }
        if (!std::isspace(static_cast<unsigned char>(c))) {
            tok.push_back(c);
            break;
        }
    }
    while (in.get(c) && !std::isspace(static_cast<unsigned char>(c)))
        tok.push_back(c);
    return tok;
}

std::uint32_t byteswap32(std::uint32_t v)
{
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

} // namespace

DisparityMap read_pfm(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + path.string());

    const std::string magic = next_token(in);
    if (magic == "PF")
        throw DataError("PFM has 3 channels; expected single-channel 'Pf'");
    if (magic != "Pf")
        throw DataError("malformed PFM header in " + path.string());

    int w = 0, h = 0;
    double scale = 0.0;
    try {
        w = std::stoi(next_token(in));
        h = std::stoi(next_token(in));
        scale = std::stod(next_token(in));
    } catch (const std::exception&) {
        throw DataError("malformed PFM header in " + path.string());
    }
    if (w <= 0 || h <= 0 || scale == 0.0)
        throw DataError("malformed PFM header in " + path.string());
    // next_token consumed exactly one whitespace byte after the scale field.

    const bool file_little = scale < 0.0;
    const bool host_little = std::endian::native == std::endian::little;

    DisparityMap map(w, h);
    std::vector<std::uint32_t> row(static_cast<std::size_t>(w));
    for (int r = 0; r < h; ++r) {
        if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 4)))
            throw DataError("truncated PFM payload in " + path.string());
        const int y = h - 1 - r;
        for (int x = 0; x < w; ++x) {
            std::uint32_t bits = row[static_cast<std::size_t>(x)];
            if (file_little != host_little)
                bits = byteswap32(bits);
            const float v = std::bit_cast<float>(bits);
            map.at(x, y) = v;
            map.valid[map.index(x, y)] = std::isfinite(v) ? 1 : 0;
        }
    }
    return map;
}

void write_pfm(const DisparityMap& map, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    const bool host_little = std::endian::native == std::endian::little;
    out << "Pf\n" << map.width << " " << map.height << "\n" << (host_little ? "-1.0" : "1.0") << "\n";
    for (int y = map.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(map.values.data() + map.index(0, y)),
                  static_cast<std::streamsize>(map.width) * 4);
    if (!out)
        throw DataError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// PNG

Image read_png(const fs::path& path)
{
    png_image img;
    std::memset(&img, 0, sizeof(img));
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str()))
        throw DataError("cannot read PNG " + path.string() + ": " + img.message);

    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    const int channels = color ? 3 : 1;
    img.format = color ? PNG_FORMAT_LINEAR_RGB : PNG_FORMAT_LINEAR_Y;
    // The simplified API linearizes 8-bit sRGB input when asked for 16-bit
    // linear output; request native 8-bit data for 8-bit files instead.
    png_uint_32 src_depth = 0;
    {
        FILE* fp = std::fopen(path.string().c_str(), "rb");
        if (fp) {
            unsigned char header[26];
            if (std::fread(header, 1, sizeof(header), fp) == sizeof(header))
                src_depth = header[24];
            std::fclose(fp);
        }
    }

    Image out(static_cast<int>(img.width), static_cast<int>(img.height), channels);
    if (src_depth == 16) {
        std::vector<png_uint_16> buf(PNG_IMAGE_SIZE(img) / 2);
        if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr))
            throw DataError("cannot decode PNG " + path.string() + ": " + img.message);
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = static_cast<float>(buf[i] / 65535.0);
    } else {
        img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
        std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
        if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr))
            throw DataError("cannot decode PNG " + path.string() + ": " + img.message);
        for (std::size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = static_cast<float>(buf[i] / 255.0);
    }
    return out;
}

namespace {

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length)
{
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

} // namespace

std::vector<unsigned char> encode_png(const Image& img, int bit_depth)
{
    if (img.channels != 1 && img.channels != 3)
        throw DataError("PNG encoding supports 1 or 3 channels");
    if (bit_depth != 8 && bit_depth != 16)
        throw DataError("PNG bit depth must be 8 or 16");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw DataError("libpng initialisation failed");
    }
    std::vector<unsigned char> bytes;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("PNG encoding failed");
    }
    png_set_write_fn(png, &bytes, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), bit_depth,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const std::size_t row_values = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.channels);
    std::vector<png_byte> row(row_values * static_cast<std::size_t>(bit_depth / 8));
    const double max_value = bit_depth == 16 ? 65535.0 : 255.0;
    for (int y = 0; y < img.height; ++y) {
        const float* src = img.pixel(0, y);
        for (std::size_t i = 0; i < row_values; ++i) {
            const double v = std::clamp(static_cast<double>(src[i]), 0.0, 1.0);
            const auto q = static_cast<unsigned>(std::lround(v * max_value));
            if (bit_depth == 16) {
                row[2 * i] = static_cast<png_byte>(q >> 8);
                row[2 * i + 1] = static_cast<png_byte>(q & 0xFF);
            } else {
                row[i] = static_cast<png_byte>(q);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return bytes;
}

void write_png(const Image& img, const fs::path& path, int bit_depth)
{
    const std::vector<unsigned char> bytes = encode_png(img, bit_depth);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace opal
