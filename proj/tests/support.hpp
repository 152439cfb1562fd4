#pragma once

#include "opal/lightfield.hpp"
#include "opal/synth.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace opal::test {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "opal_tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Renders a standard suite scene once per process.
inline const RenderedScene& suite_scene(const std::string& name)
{
    static std::map<std::string, RenderedScene> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        for (const auto& [n, spec] : standard_suite())
            if (n == name)
                it = cache.emplace(name, render_scene(spec)).first;
    }
    return it->second;
}

inline const SceneSpec& suite_spec(const std::string& name)
{
    static const auto suite = standard_suite();
    for (const auto& [n, spec] : suite)
        if (n == name)
            return spec;
    throw std::out_of_range(name);
}

inline SceneSpec one_layer(double disparity, TextureSpec tex, int size = 48, int n = 9, int channels = 3)
{
    SceneSpec s;
    s.layers.push_back({disparity, std::nullopt, tex});
    s.angular_n = n;
    s.width = size;
    s.height = size;
    s.channels = channels;
    return s;
}

/// Textured background with one rectangular occluder in front.
inline SceneSpec occluder_scene(double back, double front, Rect r, int size = 48, int n = 9)
{
    SceneSpec s = one_layer(back, TextureSpec::noise(11, 0.05, 0.45), size, n);
    s.layers.push_back({front, r, TextureSpec::noise(12, 0.55, 0.95)});
    return s;
}

inline DisparityMap filled(const DisparityMap& like, float value)
{
    DisparityMap d(like.width, like.height, value);
    return d;
}

} // namespace opal::test
