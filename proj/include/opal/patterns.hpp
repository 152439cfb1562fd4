#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace opal {

/// Binary view mask over one view line (true = view used / unoccluded),
/// ordered by line parameter t from the low end to the high end.
struct OcclusionPattern {
    int index = 0;
    std::vector<std::uint8_t> mask;

    [[nodiscard]] int size() const { return static_cast<int>(mask.size()); }
    [[nodiscard]] int count() const;
    [[nodiscard]] std::string to_string() const;
};

/// One-sided contiguous occlusion patterns on the beta-downsampled line.
///
/// Pattern 0 uses every position. Odd j masks the ceil(j/2) lowest positions,
/// even j > 0 masks the j/2 highest positions, so the family enumerates every
/// occluded run that starts at one end of the line and stops short of the
/// center. `upsampled[j]` is pattern j expanded back to the native N views.
struct PatternSet {
    int native_n = 0;
    int beta = 1;
    int downsampled_m = 0;
    std::vector<OcclusionPattern> patterns;
    std::vector<std::vector<std::uint8_t>> upsampled;

    [[nodiscard]] int size() const { return downsampled_m; }
    /// Native line index (0..N-1) of downsampled position i (0..M-1).
    [[nodiscard]] int native_index(int i) const { return (i - (downsampled_m - 1) / 2) * beta + (native_n - 1) / 2; }
    /// Largest even and largest odd pattern index; these mask the most views on each side.
    [[nodiscard]] int last_even() const { return (downsampled_m - 1) % 2 == 0 ? downsampled_m - 1 : downsampled_m - 2; }
    [[nodiscard]] int last_odd() const { return (downsampled_m - 1) % 2 == 1 ? downsampled_m - 1 : downsampled_m - 2; }
};

/// Throws ConfigError for even/too-small N, beta < 1, or unless (N-1)/beta is a
/// whole even number (the downsampled line must keep the central view).
PatternSet generate_pattern_set(int n, int beta);

/// Expands a downsampled pattern to N native views. Downsampled position t sits
/// at native position beta*t; every native position between two kept samples
/// takes the value of the kept sample on its outer side (away from the center),
/// so a masked downsampled view masks the whole block of native views it stands for.
std::vector<std::uint8_t> upsample_pattern(const OcclusionPattern& p, int beta, int n);

/// One row per pattern: "j=<index>  <mask>", masks printed low-t to high-t.
std::string pattern_table(int n, int beta);

std::string mask_to_string(const std::vector<std::uint8_t>& mask);

} // namespace opal
