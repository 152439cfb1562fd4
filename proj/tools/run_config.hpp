#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace opal::cli {

/// `key = value` lines; blank lines and lines starting with '#' are ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

/// Applies config-file entries to the options of `sub` that were not given on
/// the command line. Keys are long option names without the leading dashes.
/// Unknown keys raise ConfigError.
void apply_config_file(CLI::App& sub, const std::filesystem::path& path);

/// Records resolved settings in insertion order and prints them as
/// "resolved config:" followed by one "  key = value" line each.
class ResolvedConfig {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, int value);
    void add(const std::string& key, bool value);
    void print(std::ostream& log) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_number(double v);

} // namespace opal::cli
