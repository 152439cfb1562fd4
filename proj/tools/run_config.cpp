#include "run_config.hpp"

#include "opal/error.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace opal::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

void apply_config_file(CLI::App& sub, const std::filesystem::path& path)
{
    for (const auto& [key, value] : read_config_file(path)) {
        if (key == "config")
            throw ConfigError("config files cannot include other config files");
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw ConfigError("unknown config key '" + key + "' for subcommand " + sub.get_name());
        if (opt->count() > 0)
            continue; // command line wins
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw ConfigError("invalid value for config key '" + key + "': " + e.what());
        }
    }
}

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void ResolvedConfig::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void ResolvedConfig::add(const std::string& key, double value) { add(key, format_number(value)); }
void ResolvedConfig::add(const std::string& key, int value) { add(key, std::to_string(value)); }
void ResolvedConfig::add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

void ResolvedConfig::print(std::ostream& log) const
{
    log << "resolved config:\n";
    for (const auto& [k, v] : entries_)
        log << "  " << k << " = " << v << "\n";
}

} // namespace opal::cli
