#pragma once

// The five experiments behind the command-line tool. Each returns its report
// and CSV bodies; writing them to disk is left to the caller.

#include "gaborfio/config.hpp"
#include "gaborfio/diagnostics.hpp"

#include <string>
#include <vector>

namespace gaborfio {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_not_a_frame = 2,
    exit_insufficient_range = 3,
    exit_extraction_radius = 4,
};

struct OutputFile {
    std::string name;
    std::string body;
};

struct CommandResult {
    int exit_code = exit_ok;
    Report report;
    std::vector<OutputFile> files;
};

/// CSV text: header row, %.17g numbers, '\n' line ends.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<double>& values);
    const std::string& body() const { return body_; }

private:
    std::size_t columns_;
    std::string body_;
};

std::string format_double(double v);

CommandResult cmd_frame_check(const RunConfig& cfg);
CommandResult cmd_decay_scan(const RunConfig& cfg);
CommandResult cmd_approximate(const RunConfig& cfg);
CommandResult cmd_dilation_demo(const RunConfig& cfg);
CommandResult cmd_warp_frame(const RunConfig& cfg);

/// Dispatches on the subcommand name. Library errors are mapped to exit codes
/// and recorded in the report instead of escaping.
CommandResult run_command(const std::string& command, const RunConfig& cfg);

} // namespace gaborfio
