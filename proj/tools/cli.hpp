#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mfd::cli {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerdict = 3;

/// Flat key=value configuration.
///
///   file    := { line '\n' }
///   line    := blank | '#' comment | key ws* '=' ws* value
///   key     := [a-z0-9_]+
///
/// Values run to the end of the line and are trimmed. Duplicate keys are
/// errors. Which keys are accepted depends on the command.
class Config {
public:
    static Config parse(std::istream& in, const std::string& origin = "config");
    static Config parse_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    // Command-line flag: takes precedence and is exempt from key checks.
    void override_with(const std::string& key, const std::string& value) {
        values_[key] = value;
        overrides_.insert(key);
    }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string text(const std::string& key, const std::string& fallback) const;
    double real(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<std::string> list(const std::string& key, const std::string& fallback) const;

    // ConfigError naming the first key not in `allowed`.
    void require_known(const std::vector<std::string>& allowed, const std::string& command) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> overrides_;
};

// Runs one command; returns the process exit code. Messages go to `err`,
// short summaries to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfd::cli
