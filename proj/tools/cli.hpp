#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "altlms/harness.hpp"

namespace altlms::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsageError = 2,
    kUnstable = 3,
    kIoError = 4,
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::string key, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + (key.empty() ? "" : " (" + key + ")") + ": " + message),
          line_(line),
          key_(std::move(key)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::size_t line_;
    std::string key_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses `key = value` lines. `#` starts a comment. An optional leading
/// `preset = fig2|fig3` seeds every field; later keys override it. Each
/// `[algorithm]` section adds one roster entry, and the first such section
/// discards any preset roster.
Scenario parse_config(std::string_view text);

/// Inverse of parse_config: parse_config(format_config(s)) == s.
std::string format_config(const Scenario& scenario);

/// A preset name, or the path of a config file.
Scenario load_scenario(const std::string& source);

/// "start:stop:count", inclusive and evenly spaced.
std::vector<double> parse_grid(const std::string& spec);

struct RunMetadata {
    std::string command;
    Scenario scenario;
    std::vector<std::string> notes;  // extra `key = value` facts, written as comments
};

std::string curves_csv(const std::vector<LearningCurve>& curves);
std::string sweep_csv(const SweepTable& table);
std::string metadata_text(const RunMetadata& meta);

/// Sibling metadata path: `<out>.meta`.
std::filesystem::path metadata_path(const std::filesystem::path& out);

void emit_csv(const std::vector<LearningCurve>& curves, const std::filesystem::path& out, const RunMetadata& meta);
void emit_csv(const SweepTable& table, const std::filesystem::path& out, const RunMetadata& meta);

/// `cost <alg> [penalty] <m>` -> "adds=.. mults=.. divs=..".
std::string cost_line(const std::vector<std::string>& args);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace altlms::cli
