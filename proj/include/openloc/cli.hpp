#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace openloc::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_nonconvergence = 3,
    exit_io = 4,
};

// Environment variable overriding the master seed (below --seed, above --config).
inline constexpr const char* seed_env_var = "OPENLOC_SEED";

// Ordered key = value pairs of a run manifest.
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::vector<double>& values);
    const std::string* find(const std::string& key) const;

    std::string format() const;
    // Accepts `key = value` lines; blank lines and lines starting with '#'
    // are skipped. Throws ParseError on any other line.
    static Manifest parse(const std::string& text);
};

// Runs the command line and returns the process exit code. Normal output
// goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace openloc::cli
