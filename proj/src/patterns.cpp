#include "opal/patterns.hpp"

#include "opal/error.hpp"

#include <algorithm>
#include <sstream>

namespace opal {

int OcclusionPattern::count() const
{
    return static_cast<int>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::string OcclusionPattern::to_string() const { return mask_to_string(mask); }

std::string mask_to_string(const std::vector<std::uint8_t>& mask)
{
    std::string s;
    s.reserve(mask.size());
    for (std::uint8_t m : mask)
        s.push_back(m ? '1' : '0');
    return s;
}

PatternSet generate_pattern_set(int n, int beta)
{
    if (n < 3 || n % 2 == 0)
        throw ConfigError("angular resolution must be odd and >= 3, got " + std::to_string(n));
    if (beta < 1)
        throw ConfigError("beta must be >= 1");
    if ((n - 1) % beta != 0)
        throw ConfigError("(N-1) = " + std::to_string(n - 1) + " is not divisible by beta = " + std::to_string(beta));
    if (((n - 1) / beta) % 2 != 0)
        throw ConfigError("beta = " + std::to_string(beta) + " drops the central view for N = " + std::to_string(n)
                          + "; (N-1)/beta must be even");

    PatternSet set;
    set.native_n = n;
    set.beta = beta;
    set.downsampled_m = (n - 1) / beta + 1;
    const int m = set.downsampled_m;
    const int half = (m - 1) / 2;

    for (int j = 0; j < m; ++j) {
        OcclusionPattern p;
        p.index = j;
        p.mask.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const int u = i - half;
            bool used = true;
            if (j % 2 == 1)
                used = u >= -half + (j + 1) / 2;
            else if (j > 0)
                used = u <= half - j / 2;
            p.mask[static_cast<std::size_t>(i)] = used ? 1 : 0;
        }
        set.upsampled.push_back(upsample_pattern(p, beta, n));
        set.patterns.push_back(std::move(p));
    }
    return set;
}

std::vector<std::uint8_t> upsample_pattern(const OcclusionPattern& p, int beta, int n)
{
    if (beta < 1 || n < 1 || (n - 1) % beta != 0 || ((n - 1) / beta) % 2 != 0 || p.size() != (n - 1) / beta + 1)
        throw ConfigError("pattern length " + std::to_string(p.size()) + " does not match N="
                          + std::to_string(n) + ", beta=" + std::to_string(beta));
    const int native_half = (n - 1) / 2;
    const int m_half = (p.size() - 1) / 2;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n));
    for (int s = -native_half; s <= native_half; ++s) {
        // ceil(|s| / beta) toward the outer end, sign preserved.
        const int mag = (std::abs(s) + beta - 1) / beta;
        const int t = s < 0 ? -mag : mag;
        out[static_cast<std::size_t>(s + native_half)] = p.mask[static_cast<std::size_t>(t + m_half)];
    }
    return out;
}

std::string pattern_table(int n, int beta)
{
    const PatternSet set = generate_pattern_set(n, beta);
    std::ostringstream os;
    os << "# N=" << n << " beta=" << beta << " M=" << set.downsampled_m << "\n";
    for (std::size_t j = 0; j < set.patterns.size(); ++j) {
        os << "j=" << j << "  " << set.patterns[j].to_string();
        if (beta > 1)
            os << "  -> " << mask_to_string(set.upsampled[j]);
        os << "\n";
    }
    return os.str();
}

} // namespace opal
