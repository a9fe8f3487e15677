#pragma once

#include "mfg/coupler.hpp"
#include "mfg/particle.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mfg {

/// Flat `key = value` document with `#` comments; keys carry dotted section
/// prefixes (grid.nx = 199).
class ConfigDocument {
public:
    static ConfigDocument parse(const std::string& text, const std::string& origin = "config");
    static ConfigDocument load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;

    /// Line of a key, or 0 when absent.
    std::size_t line(const std::string& key) const;
    void set(const std::string& key, const std::string& value);
    /// Serialises back to key = value text in key order.
    std::string text() const;
    const std::string& origin() const { return origin_; }
    const std::filesystem::path& directory() const { return dir_; }
    std::vector<std::string> keys() const;

    /// "origin:LINE: msg" when the key is present, "origin: msg" otherwise.
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    std::map<std::string, Entry> entries_;
    std::string origin_ = "config";
    std::filesystem::path dir_;
};

struct RunConfig {
    std::string label = "run";
    std::filesystem::path out = "out";
    Problem problem;
    LevyMeasureSpec levy;
    CouplerConfig coupler;
    ParticleConfig particle;
    double verify_C = 10.0;
    double compat_residual = 0.0;
    ConfigDocument document;
};

/// Parses and cross-validates a document; every failure is an
/// ErrorKind::config error with a line-anchored message.
RunConfig build_run_config(const ConfigDocument& doc);

RunConfig load_run_config(const std::filesystem::path& path);

/// Every key understood by build_run_config.
const std::vector<std::string>& known_keys();

/// Maps a short sweep parameter (eps0) to its full key (demand.eps0).
std::string resolve_key(const std::string& name);

} // namespace mfg
